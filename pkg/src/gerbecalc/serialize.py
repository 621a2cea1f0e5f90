"""Canonical JSON for complexes, gerbes, Deligne data, groups and bundles.

Simplices are written as comma-joined vertex labels in the complex's vertex
order; rationals are strings "p/q" (or "p").  Keys given in another vertex
order are accepted and re-oriented with the permutation sign.  Every loader
raises :class:`FormatError` naming the offending key.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cech import BiCochain
from .cohomology import ClassHk
from .complex import Cochain, Complex, SimplicialMap, build_complex, sort_with_sign
from .deligne import DeligneCocycle, DeligneTrivialization
from .errors import FormatError, GerbeError
from .gerbe import CircleCochain, GerbeData, Trivialization
from .lifting import CentralExtension, FiniteGroup, Lift, PrincipalBundleData

__all__ = [
    "dumps",
    "rational_to_json",
    "rational_from_json",
    "complex_to_json",
    "complex_from_json",
    "gerbe_to_json",
    "gerbe_from_json",
    "trivialization_to_json",
    "trivialization_from_json",
    "deligne_to_json",
    "deligne_from_json",
    "deligne_trivialization_to_json",
    "class_to_json",
    "cochain_to_json",
    "cochain_from_json",
    "map_to_json",
    "map_from_json",
    "group_to_json",
    "extension_to_json",
    "extension_from_json",
    "bundle_to_json",
    "bundle_from_json",
    "lift_to_json",
]


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def rational_to_json(v) -> str:
    return str(Fraction(v))


def rational_from_json(v, key):
    if isinstance(v, bool):
        raise FormatError(key, "expected a rational, got a boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            f = Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise FormatError(key, f"{v!r} is not a rational 'p/q'") from None
        return int(f) if f.denominator == 1 else f
    raise FormatError(key, f"expected a rational string, got {type(v).__name__}")


def _int_from_json(v, key):
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, str):
            try:
                return int(v)
            except ValueError:
                pass
        raise FormatError(key, f"expected an integer, got {v!r}")
    return v


def _require(doc, key, kind=dict, where=""):
    path = f"{where}.{key}" if where else key
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(path, "missing")
    val = doc[key]
    if not isinstance(val, kind):
        raise FormatError(path, f"expected {kind.__name__}")
    return val


def _simplex_key(k: Complex, s) -> str:
    return ",".join(str(v) for v in k.labels(s))


def _parse_simplex(k: Complex, key: str, dim=None, path=None):
    path = path or key
    if not isinstance(key, str) or not key:
        raise FormatError(path, "empty simplex key")
    try:
        idx = tuple(k.vertex_index(t.strip()) for t in key.split(","))
    except GerbeError as exc:
        raise FormatError(path, str(exc)) from None
    s, sign = sort_with_sign(idx)
    if s is None:
        raise FormatError(path, "repeated vertex")
    if s not in k:
        raise FormatError(path, "not a simplex of the complex")
    if dim is not None and len(s) != dim + 1:
        raise FormatError(path, f"expected a {dim}-simplex")
    return s, sign


# -- complexes ---------------------------------------------------------------

def complex_to_json(k: Complex) -> dict:
    return {
        "vertices": list(k.vertices),
        "maximal_simplices": [list(k.labels(s)) for s in sorted(k.maximal_simplices())],
    }


def complex_from_json(doc) -> Complex:
    verts = _require(doc, "vertices", list)
    tops = _require(doc, "maximal_simplices", list)
    for i, v in enumerate(verts):
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            raise FormatError(f"vertices[{i}]", "vertex labels are integers or strings")
    for i, s in enumerate(tops):
        if not isinstance(s, list) or not s:
            raise FormatError(f"maximal_simplices[{i}]", "expected a nonempty list of vertices")
    try:
        return build_complex([tuple(s) for s in tops], vertices=verts)
    except GerbeError as exc:
        raise FormatError("maximal_simplices", str(exc)) from None


# -- bicochains and circle cochains -----------------------------------------

def _bicochain_to_json(x: BiCochain) -> dict:
    k = x.base
    out = {}
    for s, loc in sorted(x.values.items()):
        out[_simplex_key(k, s)] = {_simplex_key(k, r): rational_to_json(v) for r, v in sorted(loc.items())}
    return out


def _bicochain_from_json(k, doc, p, q, path, integer=False):
    if not isinstance(doc, dict):
        raise FormatError(path, "expected an object")
    values = {}
    for key, loc in doc.items():
        s, sign = _parse_simplex(k, key, p, f"{path}.{key}")
        if not isinstance(loc, dict):
            raise FormatError(f"{path}.{key}", "expected an object")
        tgt = values.setdefault(s, {})
        for rkey, v in loc.items():
            rp = f"{path}.{key}.{rkey}"
            r, rsign = _parse_simplex(k, rkey, q, rp)
            val = _int_from_json(v, rp) if integer else rational_from_json(v, rp)
            tgt[r] = tgt.get(r, 0) + sign * rsign * val
    x = BiCochain(k, p, q, values)
    if not x.support_ok():
        raise FormatError(path, "local value outside the carrying star")
    return x


def _circle_to_json(c: CircleCochain) -> dict:
    k = c.base
    out = {}
    keys = set(c.theta.values) | set(c.winding.values)
    for s in sorted(keys):
        out[_simplex_key(k, s)] = {
            "theta": {str(k.vertices[r[0]]): rational_to_json(v) for r, v in sorted(c.theta.local(s).items())},
            "winding": {_simplex_key(k, r): int(v) for r, v in sorted(c.winding.local(s).items())},
        }
    return out


def _circle_from_json(k, doc, p, path):
    if not isinstance(doc, dict):
        raise FormatError(path, "expected an object")
    theta, wind = {}, {}
    for key, entry in doc.items():
        ep = f"{path}.{key}"
        s, sign = _parse_simplex(k, key, p, ep)
        if not isinstance(entry, dict):
            raise FormatError(ep, "expected an object with 'theta' and 'winding'")
        unknown = set(entry) - {"theta", "winding"}
        if unknown:
            raise FormatError(f"{ep}.{sorted(unknown)[0]}", "unexpected key")
        th = entry.get("theta", {})
        if not isinstance(th, dict):
            raise FormatError(f"{ep}.theta", "expected an object")
        tgt = theta.setdefault(s, {})
        for v, val in th.items():
            r, _ = _parse_simplex(k, v, 0, f"{ep}.theta.{v}")
            tgt[r] = tgt.get(r, 0) + sign * rational_from_json(val, f"{ep}.theta.{v}")
        wd = entry.get("winding", {})
        if not isinstance(wd, dict):
            raise FormatError(f"{ep}.winding", "expected an object")
        tgt = wind.setdefault(s, {})
        for e, val in wd.items():
            r, rsign = _parse_simplex(k, e, 1, f"{ep}.winding.{e}")
            tgt[r] = tgt.get(r, 0) + sign * rsign * _int_from_json(val, f"{ep}.winding.{e}")
    th = BiCochain(k, p, 0, theta)
    wd = BiCochain(k, p, 1, wind)
    if not (th.support_ok() and wd.support_ok()):
        raise FormatError(path, "local value outside the carrying star")
    return th, wd


def gerbe_to_json(g: GerbeData) -> dict:
    return {"complex": complex_to_json(g.base), "data": _circle_to_json(g)}


def gerbe_from_json(doc, base: Complex = None) -> GerbeData:
    k = base if base is not None else complex_from_json(_require(doc, "complex"))
    th, wd = _circle_from_json(k, _require(doc, "data"), 2, "data")
    return GerbeData(th, wd)


def trivialization_to_json(h: CircleCochain) -> dict:
    return {"complex": complex_to_json(h.base), "h": _circle_to_json(h)}


def trivialization_from_json(doc, base: Complex = None) -> Trivialization:
    k = base if base is not None else complex_from_json(_require(doc, "complex"))
    th, wd = _circle_from_json(k, _require(doc, "h"), 1, "h")
    return Trivialization(th, wd)


def deligne_to_json(d: DeligneCocycle) -> dict:
    doc = gerbe_to_json(d.g)
    doc["connection"] = _bicochain_to_json(d.A)
    doc["curving"] = _bicochain_to_json(d.f)
    return doc


def deligne_from_json(doc) -> DeligneCocycle:
    g = gerbe_from_json(doc)
    k = g.base
    A = _bicochain_from_json(k, _require(doc, "connection"), 1, 1, "connection")
    f = _bicochain_from_json(k, _require(doc, "curving"), 0, 2, "curving")
    return DeligneCocycle(g, A, f)


def deligne_trivialization_to_json(t: DeligneTrivialization) -> dict:
    return {"complex": complex_to_json(t.h.base), "h": _circle_to_json(t.h), "k": _bicochain_to_json(t.k)}


def cochain_to_json(c: Cochain) -> dict:
    k = c.complex
    return {
        "degree": c.degree,
        "values": {_simplex_key(k, s): rational_to_json(v) for s, v in sorted(c.values.items())},
    }


def cochain_from_json(k: Complex, doc) -> Cochain:
    deg = _require(doc, "degree", int)
    vals = _require(doc, "values")
    out = {}
    for key, v in vals.items():
        s, sign = _parse_simplex(k, key, deg, f"values.{key}")
        out[s] = out.get(s, 0) + sign * rational_from_json(v, f"values.{key}")
    return Cochain(k, deg, out)


def class_to_json(c: ClassHk) -> dict:
    pres = c.presentation
    return {
        "degree": pres.degree,
        "group": str(pres),
        "free": list(c.free),
        "torsion": list(c.torsion),
        "torsion_orders": list(pres.torsion),
        "class": str(c),
        "zero": c.is_zero(),
    }


# -- maps --------------------------------------------------------------------

def map_to_json(phi: SimplicialMap) -> dict:
    return {
        "source": complex_to_json(phi.source),
        "target": complex_to_json(phi.target),
        "vertex_map": {str(v): phi.target.vertices[w] for v, w in zip(phi.source.vertices, phi.vertex_map)},
    }


def map_from_json(doc) -> SimplicialMap:
    src = complex_from_json(_require(doc, "source"))
    tgt = complex_from_json(_require(doc, "target"))
    vm = _require(doc, "vertex_map")
    try:
        return SimplicialMap.from_labels(src, tgt, vm)
    except GerbeError as exc:
        raise FormatError("vertex_map", str(exc)) from None


# -- groups, extensions, bundles -----------------------------------------------

def group_to_json(G: FiniteGroup) -> dict:
    return {
        "elements": list(G.elements),
        "table": [[G.elements[v] for v in row] for row in G.table],
    }


def _group_from_json(doc) -> FiniteGroup:
    elems = _require(doc, "elements", list)
    table = _require(doc, "table", list)
    for i, row in enumerate(table):
        if not isinstance(row, list):
            raise FormatError(f"table[{i}]", "expected a list")
    try:
        return FiniteGroup.from_table(elems, table)
    except GerbeError as exc:
        raise FormatError("table", str(exc)) from None


def extension_to_json(e: CentralExtension) -> dict:
    G = e.group
    doc = group_to_json(G)
    doc["epsilon"] = {f"{G.elements[a]},{G.elements[b]}": rational_to_json(v)
                      for (a, b), v in sorted(e.epsilon.items())}
    return doc


def extension_from_json(doc) -> CentralExtension:
    G = _group_from_json(doc)
    eps = _require(doc, "epsilon")
    out = {}
    for key, v in eps.items():
        parts = key.split(",")
        if len(parts) != 2 or any(p.strip() not in G.elements for p in parts):
            raise FormatError(f"epsilon.{key}", "expected 'a,b' with group elements a, b")
        a, b = (G.elements.index(p.strip()) for p in parts)
        out[(a, b)] = rational_from_json(v, f"epsilon.{key}")
    return CentralExtension(G, out)


def bundle_to_json(b: PrincipalBundleData) -> dict:
    k, G = b.base, b.group
    return {
        "complex": complex_to_json(k),
        "transition": {_simplex_key(k, e): G.elements[g] for e, g in sorted(b.transition.items())
                       if g != G.identity},
    }


def bundle_from_json(doc, group: FiniteGroup) -> PrincipalBundleData:
    k = complex_from_json(_require(doc, "complex"))
    trans = {}
    for key, name in _require(doc, "transition").items():
        path = f"transition.{key}"
        e, sign = _parse_simplex(k, key, 1, path)
        if str(name) not in group.elements:
            raise FormatError(path, f"{name!r} is not a group element")
        g = group.elements.index(str(name))
        trans[e] = g if sign > 0 else group.inv(g)
    return PrincipalBundleData(k, group, trans)


def lift_to_json(lift: Lift) -> dict:
    doc = {"complex": complex_to_json(lift.phase.base), "flat": lift.is_flat(), "h": _circle_to_json(lift.phase)}
    if lift.is_flat():
        k = lift.phase.base
        doc["phase"] = {_simplex_key(k, e): rational_to_json(v) for e, v in sorted(lift.constant_phases().items())}
    return doc
