"""Lifting gerbes of principal bundles with finite structure group.

A central extension of a finite group G by the circle is presented by a
normalized 2-cocycle eps: G x G -> Q/Z (phases in turns).  A bundle is a
G-valued transition function on oriented edges with t01 t12 = t02 on every
triangle.  The lifting gerbe has the constant phase eps(t01, t12) on the
star of each triangle.

Two kinds of lift are offered.  A lift is a Čech 1-cochain of circle
functions chi with delta chi = eps^{-1} (as circle functions), which exists
exactly when the Dixmier-Douady class of the lifting gerbe vanishes.  A flat
lift uses constant phases only; it exists exactly when the class of eps in
H^2(K; Q/Z) vanishes, which is a strictly stronger condition in general.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd

from .cech import BiCochain, constant_family, contraction_K
from .cohomology import ClassHk, coboundary_snf
from .complex import Cochain, Complex, SimplicialMap, coboundary_matrix
from .errors import AxiomError, BaseMismatch, CocycleViolation, InvalidParameter, NonzeroClass
from .gerbe import CircleCochain, GerbeData, Trivialization, dd_class, trivialize
from .intlinalg import Matrix, solve_integer_linear, solve_rational_linear

__all__ = [
    "FiniteGroup",
    "CentralExtension",
    "PrincipalBundleData",
    "Lift",
    "validate_group",
    "validate_extension",
    "validate_bundle",
    "lifting_gerbe",
    "lifting_obstruction",
    "find_lift",
    "find_flat_lift",
    "verify_lift",
    "lift_agreement",
    "pullback_bundle",
    "random_bundle",
    "standard_extensions",
]


def _mod1(x):
    x = Fraction(x)
    return x - floor(x)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Finite group by multiplication table over element indices.

    ``factors`` records the orders of a cyclic decomposition when the group
    was built by :meth:`cyclic` or :meth:`product` (used for sampling).
    """

    elements: tuple
    table: tuple
    identity: int = 0
    inverses: tuple = ()
    factors: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(str(e) for e in self.elements))
        object.__setattr__(self, "table", tuple(tuple(r) for r in self.table))
        validate_group(self)

    @classmethod
    def from_table(cls, elements, table):
        """Build from element names and a table of names or indices."""
        names = [str(e) for e in elements]
        idx = {n: i for i, n in enumerate(names)}
        rows = []
        for r in table:
            row = []
            for v in r:
                if isinstance(v, int) and not isinstance(v, bool) and 0 <= v < len(names):
                    row.append(v)
                elif str(v) in idx:
                    row.append(idx[str(v)])
                else:
                    raise AxiomError("closure", f"table entry {v!r} is not an element")
            rows.append(tuple(row))
        return cls(tuple(names), tuple(rows))

    @classmethod
    def cyclic(cls, n):
        if n < 1:
            raise InvalidParameter("cyclic group order must be positive")
        return cls(tuple(str(i) for i in range(n)),
                   tuple(tuple((i + j) % n for j in range(n)) for i in range(n)),
                   factors=(n,))

    @classmethod
    def product(cls, a, b):
        nb = len(b.elements)
        names = tuple(f"{x}.{y}" for x in a.elements for y in b.elements)
        table = tuple(
            tuple(a.table[i // nb][j // nb] * nb + b.table[i % nb][j % nb] for j in range(len(names)))
            for i in range(len(names)))
        factors = a.factors + b.factors if a.factors is not None and b.factors is not None else None
        return cls(names, table, factors=factors)

    @property
    def order(self):
        return len(self.elements)

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverses[a]

    def index(self, name):
        try:
            return self.elements.index(str(name))
        except ValueError:
            raise InvalidParameter(f"{name!r} is not a group element") from None

    def coords(self, a):
        """Coordinates of ``a`` in the cyclic decomposition."""
        out = []
        for n in reversed(self.factors):
            out.append(a % n)
            a //= n
        return tuple(reversed(out))

    def from_coords(self, coords):
        a = 0
        for c, n in zip(coords, self.factors):
            a = a * n + c % n
        return a

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.elements == other.elements and self.table == other.table

    def __hash__(self):
        return hash((self.elements, self.table))


def validate_group(G: FiniteGroup):
    """Closure, identity, inverses and associativity; AxiomError names the failure."""
    n = len(G.elements)
    if n == 0:
        raise AxiomError("nonempty", "a group has at least one element")
    if len(set(G.elements)) != n:
        raise AxiomError("elements", "duplicate element names")
    if len(G.table) != n or any(len(r) != n for r in G.table):
        raise AxiomError("closure", "table is not square over the elements")
    if any(not (0 <= v < n) for r in G.table for v in r):
        raise AxiomError("closure", "table entry out of range")
    ids = [e for e in range(n) if all(G.table[e][x] == x == G.table[x][e] for x in range(n))]
    if not ids:
        raise AxiomError("identity", "no two-sided identity")
    e = ids[0]
    object.__setattr__(G, "identity", e)
    inv = []
    for x in range(n):
        cands = [y for y in range(n) if G.table[x][y] == e == G.table[y][x]]
        if not cands:
            raise AxiomError("inverse", f"{G.elements[x]} has no inverse")
        inv.append(cands[0])
    object.__setattr__(G, "inverses", tuple(inv))
    for a, b, c in itertools.product(range(n), repeat=3):
        if G.table[G.table[a][b]][c] != G.table[a][G.table[b][c]]:
            raise AxiomError("associativity",
                             f"({G.elements[a]}{G.elements[b]}){G.elements[c]} != "
                             f"{G.elements[a]}({G.elements[b]}{G.elements[c]})")


@dataclass(eq=False)
class CentralExtension:
    """Circle extension of ``group`` by the 2-cocycle ``epsilon`` (turns, mod 1)."""

    group: FiniteGroup
    epsilon: dict = field(default_factory=dict)

    def __post_init__(self):
        self.epsilon = {tuple(k): _mod1(v) for k, v in self.epsilon.items() if _mod1(v)}

    def eps(self, a, b):
        return self.epsilon.get((a, b), Fraction(0))

    @classmethod
    def from_function(cls, group, fn):
        n = group.order
        return cls(group, {(a, b): fn(a, b) for a in range(n) for b in range(n)})

    def __eq__(self, other):
        return isinstance(other, CentralExtension) and self.group == other.group and self.epsilon == other.epsilon


def validate_extension(e: CentralExtension):
    G = e.group
    n = G.order
    for (a, b) in e.epsilon:
        if not (0 <= a < n and 0 <= b < n):
            raise AxiomError("epsilon", f"pair {(a, b)} is not a pair of elements")
    for x in range(n):
        if e.eps(G.identity, x) or e.eps(x, G.identity):
            raise AxiomError("normalization", f"epsilon is nonzero at the identity paired with {G.elements[x]}")
    for a, b, c in itertools.product(range(n), repeat=3):
        lhs = e.eps(a, b) + e.eps(G.mul(a, b), c)
        rhs = e.eps(b, c) + e.eps(a, G.mul(b, c))
        if _mod1(lhs - rhs):
            raise AxiomError("cocycle", f"fails at ({G.elements[a]}, {G.elements[b]}, {G.elements[c]})")


@dataclass(eq=False)
class PrincipalBundleData:
    """Transition element per edge (u, v) with u < v; reversed edges use inverses."""

    base: Complex
    group: FiniteGroup
    transition: dict = field(default_factory=dict)

    def t(self, u, v):
        if u == v:
            return self.group.identity
        if u < v:
            return self.transition.get((u, v), self.group.identity)
        return self.group.inv(self.transition.get((v, u), self.group.identity))

    @classmethod
    def trivial(cls, base, group):
        return cls(base, group, {})

    def __eq__(self, other):
        if not isinstance(other, PrincipalBundleData):
            return NotImplemented
        e = self.group.identity
        mine = {k: v for k, v in self.transition.items() if v != e}
        theirs = {k: v for k, v in other.transition.items() if v != e}
        return self.base == other.base and self.group == other.group and mine == theirs


def validate_bundle(b: PrincipalBundleData):
    k, G = b.base, b.group
    for edge, g in b.transition.items():
        if edge not in k or len(edge) != 2:
            raise AxiomError("transition", f"{edge} is not an edge of the base")
        if not (isinstance(g, int) and 0 <= g < G.order):
            raise AxiomError("transition", f"value on {edge} is not a group element")
    for s in k.simplices(2):
        v0, v1, v2 = s
        if G.mul(b.t(v0, v1), b.t(v1, v2)) != b.t(v0, v2):
            raise CocycleViolation("cocycle", f"t01 t12 != t02 on the triangle {s}")


@dataclass(eq=False)
class Lift:
    """Čech 1-cochain of circle functions with delta(phase) = eps(t01, t12)^-1."""

    phase: CircleCochain

    def is_flat(self):
        """True when every local function is constant (a flat lift)."""
        for s, loc in self.phase.theta.values.items():
            if len(set(loc.values())) > 1:
                return False
        return self.phase.winding.is_zero()

    def constant_phases(self):
        """Edge phases of a flat lift (rational per edge)."""
        if not self.is_flat():
            raise InvalidParameter("lift is not flat")
        out = {}
        for s, loc in self.phase.theta.values.items():
            out[s] = next(iter(loc.values()))
        return out


def _eps_cochain(b: PrincipalBundleData, e: CentralExtension) -> Cochain:
    return Cochain(b.base, 2, {s: e.eps(b.t(s[0], s[1]), b.t(s[1], s[2])) for s in b.base.simplices(2)})


def _check_pair(b, e):
    if b.group != e.group:
        raise BaseMismatch("bundle and extension use different groups")
    validate_bundle(b)
    validate_extension(e)


def lifting_gerbe(b: PrincipalBundleData, e: CentralExtension) -> GerbeData:
    _check_pair(b, e)
    k = b.base
    return GerbeData(constant_family(_eps_cochain(b, e)), BiCochain.zero(k, 2, 1))


def lifting_obstruction(b: PrincipalBundleData, e: CentralExtension) -> ClassHk:
    return dd_class(lifting_gerbe(b, e))


def verify_lift(b: PrincipalBundleData, e: CentralExtension, lift: Lift):
    """First triangle where the lifted cocycle condition fails, or None."""
    k = b.base
    target = -constant_family(_eps_cochain(b, e))
    wanted = CircleCochain(target, BiCochain.zero(k, 2, 1))
    if lift.phase.flat_failure() is not None:
        return lift.phase.flat_failure()
    return lift.phase.delta().equivalence_failure(wanted)


def find_lift(b: PrincipalBundleData, e: CentralExtension):
    """A lift, or None when the bundle does not lift.

    Independent of the descent machinery: eps is a rational 2-cochain whose
    coboundary N' is integral; a lift exists iff N' = delta N for an integer
    2-cochain N, and then r = eps - N is a rational cocycle whose constant
    family is delta of K(r).
    """
    _check_pair(b, e)
    k = b.base
    E = _eps_cochain(b, e)
    dE = E.coboundary()
    if not dE.is_integral():
        raise ArithmeticError("coboundary of the extension cochain is not integral")
    N = solve_integer_linear(coboundary_matrix(k, 2), [int(v) for v in dE.vector()],
                             snf=coboundary_snf(k, 2))
    if N is None:
        return None
    r = E - Cochain.from_vector(k, 2, N)
    theta = -contraction_K(constant_family(r))
    lift = Lift(Trivialization(theta, BiCochain.zero(k, 1, 1)))
    bad = verify_lift(b, e, lift)
    if bad is not None:
        raise ArithmeticError(f"lift failed verification on {bad}")
    return lift


def _flat_obstruction_rows(k: Complex):
    key = ("flat_lift_rows",)
    if key not in k._cache:
        snf = coboundary_snf(k, 1)
        q = Matrix(snf.nrows - snf.rank, snf.nrows, [dict(r) for r in snf.u_rows[snf.rank:]])
        k._cache[key] = q
    return k._cache[key]


def find_flat_lift(b: PrincipalBundleData, e: CentralExtension):
    """A lift by constant edge phases p with delta p = -eps (mod 1), or None."""
    _check_pair(b, e)
    k = b.base
    E = _eps_cochain(b, e)
    q = _flat_obstruction_rows(k)
    rhs = q.matvec(E.vector())
    if any(Fraction(v).denominator != 1 for v in rhs):
        return None
    N = solve_integer_linear(q, [int(v) for v in rhs])
    if N is None:
        return None
    target = [n - v for n, v in zip(N, E.vector())]
    p = solve_rational_linear(coboundary_matrix(k, 1), target, snf=coboundary_snf(k, 1))
    if p is None:
        raise ArithmeticError("flat lift equation inconsistent after the integer step")
    phases = Cochain.from_vector(k, 1, [_mod1(v) for v in p])
    lift = Lift(Trivialization(constant_family(phases), BiCochain.zero(k, 1, 1)))
    bad = verify_lift(b, e, lift)
    if bad is not None:
        raise ArithmeticError(f"flat lift failed verification on {bad}")
    return lift


def lift_agreement(b, e):
    """(find_lift present, obstruction zero, trivialize succeeds) for cross-checks."""
    lift = find_lift(b, e)
    obs = lifting_obstruction(b, e)
    try:
        trivialize(lifting_gerbe(b, e))
        triv = True
    except NonzeroClass:
        triv = False
    return lift is not None, obs.is_zero(), triv


def pullback_bundle(b: PrincipalBundleData, phi: SimplicialMap) -> PrincipalBundleData:
    if phi.target != b.base:
        raise BaseMismatch("map target differs from the bundle's base")
    vm = phi.vertex_map
    trans = {}
    for u, v in phi.source.simplices(1):
        g = b.t(vm[u], vm[v])
        if g != b.group.identity:
            trans[(u, v)] = g
    return PrincipalBundleData(phi.source, b.group, trans)


def random_bundle(k: Complex, G: FiniteGroup, rng, gauge=True) -> PrincipalBundleData:
    """Pseudo-random bundle: a random cocycle per cyclic factor, then a random gauge.

    Groups without a recorded cyclic decomposition only get gauges of the
    trivial bundle.
    """
    verts = range(len(k.vertices))
    edges = k.simplices(1)
    if G.factors is not None:
        snf = coboundary_snf(k, 1)
        per_factor = []
        for n in G.factors:
            y = []
            for t in range(snf.ncols):
                if t < snf.rank:
                    step = n // gcd(snf.diagonal[t], n)
                    y.append(step * rng.randrange(n // step) if step < n else 0)
                else:
                    y.append(rng.randrange(n))
            per_factor.append([x % n for x in snf.apply_v(y)])
        trans = {e: G.from_coords(tuple(f[i] for f in per_factor)) for i, e in enumerate(edges)}
    else:
        trans = {}
    b = PrincipalBundleData(k, G, trans)
    if gauge:
        g = [rng.randrange(G.order) for _ in verts]
        trans = {}
        for u, v in edges:
            trans[(u, v)] = G.mul(G.mul(G.inv(g[u]), b.t(u, v)), g[v])
        b = PrincipalBundleData(k, G, trans)
    validate_bundle(b)
    return b


def standard_extensions(G: FiniteGroup):
    """A small family of normalized 2-cocycles on a product of cyclic groups.

    Always includes the split extension; for a single factor of order n the
    carry cocycle and ab/n; for two factors the bilinear forms a_i b_j / gcd.
    """
    if G.factors is None:
        return [CentralExtension(G, {})]
    fs = G.factors
    out = [CentralExtension(G, {})]

    def form(i, j, scale):
        def fn(a, b):
            ca, cb = G.coords(a), G.coords(b)
            return Fraction(ca[i] * cb[j], scale)
        return fn

    if len(fs) == 1:
        n = fs[0]
        if n > 1:
            out.append(CentralExtension.from_function(
                G, lambda a, b: Fraction((a + b) // n, n) if n > 2 else Fraction(a * b, 2)))
            if n > 2:
                out.append(CentralExtension.from_function(G, form(0, 0, n)))
    else:
        for i, j in ((0, 1), (1, 0), (0, 0)):
            scale = gcd(fs[i], fs[j])
            if scale > 1:
                out.append(CentralExtension.from_function(G, form(i, j, scale)))
    for e in out:
        validate_extension(e)
    return out
