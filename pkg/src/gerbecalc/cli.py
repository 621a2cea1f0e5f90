"""Command-line front end.

Every command writes one JSON document to stdout (or ``--out``).  Exit code
0 means the question was answered, including negative answers such as
"not stably isomorphic"; exit code 2 means the input was invalid.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .cohomology import cohomology_group, cycle_basis
from .complex import EXAMPLE_NAMES, SimplicialMap, example_complex
from .deligne import (
    connect,
    deligne_equal,
    deligne_trivialize,
    periods,
    three_curvature,
)
from .errors import FormatError, GerbeError, NonzeroClass
from .gerbe import (
    apply_gauge,
    dd_class,
    dual,
    flat_from_class,
    from_class,
    pullback,
    random_gauge,
    stable_iso,
    tensor,
    trivial_gerbe,
    trivialize,
    validate_gerbe,
)
from .lifting import find_flat_lift, find_lift, lifting_obstruction
from .serialize import (
    bundle_from_json,
    class_to_json,
    cochain_to_json,
    complex_from_json,
    complex_to_json,
    deligne_from_json,
    deligne_to_json,
    deligne_trivialization_to_json,
    dumps,
    extension_from_json,
    gerbe_from_json,
    gerbe_to_json,
    lift_to_json,
    map_from_json,
    trivialization_from_json,
    trivialization_to_json,
)


class InputError(Exception):
    pass


def _read(path):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _inputs(args, n, what):
    paths = args.inputs or []
    if len(paths) != n:
        raise InputError(f"{args.command} needs {n} --in file(s): {what}")
    return [_read(p) for p in paths]


def _complex(args):
    if args.name:
        return example_complex(args.name)
    if args.complex:
        return complex_from_json(_read(args.complex))
    if args.inputs:
        return complex_from_json(_read(args.inputs[0]))
    raise InputError(f"{args.command} needs --complex FILE or --name SPACE")


def _ints(text, key):
    if text is None or text.strip() == "":
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise FormatError(key, f"expected comma-separated integers, got {text!r}") from None


def _gerbe(doc):
    g = gerbe_from_json(doc)
    validate_gerbe(g)
    return g


# -- commands ----------------------------------------------------------------

def cmd_cohomology(args):
    k = _complex(args)
    pres = cohomology_group(k, args.degree, args.ring)
    return {"degree": args.degree, "ring": args.ring, "group": str(pres),
            "free_rank": pres.free_rank, "torsion": list(pres.torsion)}


def cmd_dd(args):
    (doc,) = _inputs(args, 1, "gerbe")
    return class_to_json(dd_class(_gerbe(doc)))


def cmd_trivialize(args):
    (doc,) = _inputs(args, 1, "gerbe")
    g = _gerbe(doc)
    try:
        h = trivialize(g)
    except NonzeroClass as exc:
        return {"trivial": False, "answer": "not trivial", "class": class_to_json(exc.cls)}
    out = trivialization_to_json(h)
    out.update({"trivial": True, "answer": "trivial"})
    return out


def cmd_tensor(args):
    a, b = _inputs(args, 2, "two gerbes")
    return gerbe_to_json(tensor(_gerbe(a), _gerbe(b)))


def cmd_dual(args):
    (doc,) = _inputs(args, 1, "gerbe")
    return gerbe_to_json(dual(_gerbe(doc)))


def cmd_pullback(args):
    gdoc, mdoc = _inputs(args, 2, "gerbe, then map")
    g = _gerbe(gdoc)
    phi = map_from_json(mdoc)
    if phi.target != g.base:
        raise FormatError("target", "map target is not the gerbe's complex")
    return gerbe_to_json(pullback(g, phi))


def cmd_gauge(args):
    paths = args.inputs or []
    if len(paths) not in (1, 2):
        raise InputError("gauge needs a gerbe and optionally a Čech 1-cochain (--in twice)")
    g = _gerbe(_read(paths[0]))
    if len(paths) == 2:
        h = trivialization_from_json(_read(paths[1]), base=g.base)
    else:
        h = random_gauge(g.base, random.Random(args.seed))
    return gerbe_to_json(apply_gauge(g, h))


def cmd_stable_iso(args):
    a, b = _inputs(args, 2, "two gerbes")
    g1, g2 = _gerbe(a), _gerbe(b)
    h = stable_iso(g1, g2)
    if h is None:
        return {"stably_isomorphic": False, "answer": "not stably isomorphic",
                "class_difference": class_to_json(dd_class(g1) - dd_class(g2))}
    out = trivialization_to_json(h)
    out.update({"stably_isomorphic": True, "answer": "stably isomorphic"})
    return out


def cmd_from_class(args):
    k = _complex(args)
    pres = cohomology_group(k, 3)
    free = _ints(args.free, "free") or (0,) * pres.free_rank
    tors = _ints(args.torsion, "torsion") or (0,) * len(pres.torsion)
    if len(free) != pres.free_rank:
        raise FormatError("free", f"H^3 = {pres} needs {pres.free_rank} free coordinate(s)")
    if len(tors) != len(pres.torsion):
        raise FormatError("torsion", f"H^3 = {pres} needs {len(pres.torsion)} torsion coordinate(s)")
    c = pres.element(free, tors)
    g = flat_from_class(k, c) if args.flat else from_class(k, c)
    return gerbe_to_json(g)


def cmd_connect(args):
    (doc,) = _inputs(args, 1, "gerbe")
    return deligne_to_json(connect(_gerbe(doc)))


def cmd_curvature(args):
    (doc,) = _inputs(args, 1, "Deligne cocycle")
    return {"omega": cochain_to_json(three_curvature(deligne_from_json(doc)))}


def cmd_periods(args):
    (doc,) = _inputs(args, 1, "Deligne cocycle")
    d = deligne_from_json(doc)
    omega = three_curvature(d)
    cycles = cycle_basis(d.base, 3)
    return {"periods": [str(p) for p in periods(omega, cycles)],
            "cycles": [{",".join(map(str, d.base.labels(s))): c for s, c in sorted(z.coeffs.items())}
                       for z in cycles],
            "dd_class": class_to_json(dd_class(d.g))}


def cmd_deligne_eq(args):
    a, b = _inputs(args, 2, "two Deligne cocycles")
    ok, w = deligne_equal(deligne_from_json(a), deligne_from_json(b))
    out = {"equal": ok, "answer": "equal" if ok else "not equal"}
    if ok:
        out["witness"] = deligne_trivialization_to_json(w)
    return out


def cmd_deligne_trivialize(args):
    (doc,) = _inputs(args, 1, "Deligne cocycle")
    try:
        t = deligne_trivialize(deligne_from_json(doc))
    except NonzeroClass as exc:
        out = {"trivial": False, "answer": "not trivial", "reason": exc.reason}
        if exc.cls is not None:
            out["class"] = class_to_json(exc.cls)
        if exc.detail:
            out["detail"] = exc.detail
        return out
    out = deligne_trivialization_to_json(t)
    out.update({"trivial": True, "answer": "trivial"})
    return out


def _bundle_and_extension(args):
    bdoc, edoc = _inputs(args, 2, "bundle, then extension")
    e = extension_from_json(edoc)
    return bundle_from_json(bdoc, e.group), e


def cmd_lift_obstruction(args):
    b, e = _bundle_and_extension(args)
    return class_to_json(lifting_obstruction(b, e))


def cmd_find_lift(args):
    b, e = _bundle_and_extension(args)
    lift = find_flat_lift(b, e) if args.flat else find_lift(b, e)
    if lift is None:
        return {"lifts": False, "answer": "no lift"}
    out = lift_to_json(lift)
    out.update({"lifts": True, "answer": "lift found"})
    return out


def cmd_example(args):
    name = args.name or "sphere3"
    if name == "trivial":
        return gerbe_to_json(trivial_gerbe(example_complex("sphere3")))
    k = example_complex(name)
    if args.kind == "complex":
        return complex_to_json(k)
    if args.kind == "trivial":
        return gerbe_to_json(trivial_gerbe(k))
    pres = cohomology_group(k, 3)
    if pres.free_rank:
        return gerbe_to_json(from_class(k, pres.generators()[0]))
    if pres.torsion:
        return gerbe_to_json(flat_from_class(k, pres.generators()[0]))
    return gerbe_to_json(trivial_gerbe(k))


COMMANDS = {
    "cohomology": cmd_cohomology,
    "dd": cmd_dd,
    "trivialize": cmd_trivialize,
    "tensor": cmd_tensor,
    "dual": cmd_dual,
    "pullback": cmd_pullback,
    "gauge": cmd_gauge,
    "stable-iso": cmd_stable_iso,
    "from-class": cmd_from_class,
    "connect": cmd_connect,
    "curvature": cmd_curvature,
    "periods": cmd_periods,
    "deligne-eq": cmd_deligne_eq,
    "deligne-trivialize": cmd_deligne_trivialize,
    "lift-obstruction": cmd_lift_obstruction,
    "find-lift": cmd_find_lift,
    "example": cmd_example,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="gerbecalc", description="Exact bundle gerbe calculus.")
    parser.add_argument("--version", action="version", version=f"gerbecalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--in", dest="inputs", action="append", metavar="FILE",
                       help="input JSON file ('-' for stdin); repeat for binary commands")
        p.add_argument("--out", metavar="FILE", help="write the JSON result here instead of stdout")
        p.add_argument("--complex", metavar="FILE", help="complex JSON")
        p.add_argument("--name", help=f"bundled example: {', '.join(EXAMPLE_NAMES)}")
        if name == "cohomology":
            p.add_argument("--degree", type=int, required=True)
            p.add_argument("--ring", choices=("Z", "Q"), default="Z")
        if name == "from-class":
            p.add_argument("--free", help="comma-separated free coordinates")
            p.add_argument("--torsion", help="comma-separated torsion coordinates")
            p.add_argument("--flat", action="store_true", help="locally constant data (torsion classes only)")
        if name == "gauge":
            p.add_argument("--seed", type=int, default=0, help="seed for a random gauge")
        if name == "find-lift":
            p.add_argument("--flat", action="store_true", help="search for constant edge phases only")
        if name == "example":
            p.add_argument("--kind", choices=("gerbe", "trivial", "complex"), default="gerbe")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except (InputError, GerbeError) as exc:
        key = getattr(exc, "key", None)
        msg = f"error: {exc}"
        if key is not None and f"{key!r}" not in msg:
            msg += f" (key {key!r})"
        print(msg, file=sys.stderr)
        return 2
    text = dumps(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
