"""Bundle gerbes in local form over the vertex-star cover.

A circle-valued function on a star is a pair (theta, w): rational vertex
phases in turns and integer edge windings with dw = 0, modulo
(theta, w) ~ (theta + n, w - dn) for integer vertex functions n.  Its
logarithmic derivative dlog = d(theta) + w is a well-defined rational
1-cochain.

A Čech p-cochain of such functions is a :class:`CircleCochain`; gerbe data
is the case p = 2 with delta g ~ 1, trivializations and gauges are p = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, lcm

from .cech import (
    BiCochain,
    TotalCochain,
    cech_delta,
    cone_contract,
    constant_family,
    contraction_K,
    descend_with_primitive,
    ascend,
    restrict_global,
    simp_d,
    total_d,
)
from .cohomology import ClassHk, class_coordinates, coboundary_snf, cohomology_group
from .complex import Cochain, Complex, SimplicialMap, coboundary_matrix, star
from .errors import (
    BaseMismatch,
    IncomparableClasses,
    InvalidParameter,
    NonzeroClass,
    NotACocycle,
)
from .intlinalg import solve_integer_linear

__all__ = [
    "CircleFunction",
    "CircleCochain",
    "GerbeData",
    "Trivialization",
    "trivial_gerbe",
    "validate_gerbe",
    "dd_cocycle",
    "dd_class",
    "dual",
    "tensor",
    "pullback",
    "apply_gauge",
    "trivialize",
    "stable_iso",
    "from_class",
    "flat_from_class",
    "random_gauge",
]


def _is_int(v):
    return isinstance(v, int) or Fraction(v).denominator == 1


@dataclass(frozen=True, eq=False)
class CircleFunction:
    """A single circle-valued function on the star of ``carrier``."""

    base: Complex
    carrier: tuple
    theta: dict
    winding: dict

    def dlog(self):
        out = {}
        for e in star(self.base, self.carrier).simplices(1):
            v = self.theta.get((e[1],), 0) - self.theta.get((e[0],), 0) + self.winding.get(e, 0)
            if v:
                out[e] = v
        return out

    def canonical(self):
        """Representative with phases in [0, 1)."""
        shift = {v: floor(Fraction(t)) for v, t in self.theta.items()}
        theta = {v: Fraction(t) - shift[v] for v, t in self.theta.items()}
        winding = dict(self.winding)
        for e in star(self.base, self.carrier).simplices(1):
            dn = shift.get((e[1],), 0) - shift.get((e[0],), 0)
            winding[e] = winding.get(e, 0) + dn
        return CircleFunction(self.base, self.carrier,
                              {v: t for v, t in theta.items() if t},
                              {e: w for e, w in winding.items() if w})

    def is_flat(self):
        for t in star(self.base, self.carrier).simplices(2):
            if self.winding.get(t[1:], 0) - self.winding.get((t[0], t[2]), 0) + self.winding.get(t[:2], 0):
                return False
        return True

    def equivalent(self, other):
        a, b = self.canonical(), other.canonical()
        return a.theta == b.theta and a.winding == b.winding


@dataclass(eq=False)
class CircleCochain:
    """Čech p-cochain of circle-valued functions, stored as two bicochains.

    ``theta`` has bidegree (p, 0) (rational), ``winding`` has (p, 1) (integer).
    """

    theta: BiCochain
    winding: BiCochain

    def __post_init__(self):
        if self.theta.base != self.winding.base:
            raise BaseMismatch("phase and winding data on different complexes")
        if self.theta.q != 0 or self.winding.q != 1 or self.theta.p != self.winding.p:
            raise InvalidParameter("circle cochain needs bidegrees (p, 0) and (p, 1)")
        for _, _, w in self.winding.entries():
            if not _is_int(w):
                raise InvalidParameter("windings must be integers")

    @property
    def base(self):
        return self.theta.base

    @property
    def p(self):
        return self.theta.p

    @classmethod
    def zero(cls, base, p):
        return cls(BiCochain.zero(base, p, 0), BiCochain.zero(base, p, 1))

    def function(self, sigma) -> CircleFunction:
        return CircleFunction(self.base, tuple(sigma), dict(self.theta.local(sigma)),
                              dict(self.winding.local(sigma)))

    def dlog(self) -> BiCochain:
        return simp_d(self.theta) + self.winding

    def delta(self):
        return CircleCochain(cech_delta(self.theta), cech_delta(self.winding))

    def _same_base(self, other):
        if other.base is not self.base and other.base != self.base:
            raise BaseMismatch("circle cochains on different complexes")

    def __add__(self, other):
        self._same_base(other)
        return type(self)(self.theta + other.theta, self.winding + other.winding)

    def __neg__(self):
        return type(self)(-self.theta, -self.winding)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, CircleCochain):
            return NotImplemented
        return self.theta == other.theta and self.winding == other.winding

    def flat_failure(self):
        """First Čech index whose windings are not flat, or None."""
        dw = simp_d(self.winding)
        return min(dw.values) if dw.values else None

    def equivalence_failure(self, other):
        """First Čech index where self and other differ as circle functions, or None.

        Equivalent means theta - theta' = n integer and w - w' = -dn on each star.
        """
        self._same_base(other)
        diff = self.theta - other.theta
        for s, loc in sorted(diff.values.items()):
            if not all(_is_int(v) for v in loc.values()):
                return s
        wdiff = (self.winding - other.winding) + simp_d(diff)
        return min(wdiff.values) if wdiff.values else None

    def equivalent(self, other):
        return self.equivalence_failure(other) is None


class GerbeData(CircleCochain):
    """Local bundle gerbe: circle functions on stars of 2-simplices with delta g ~ 1."""

    def __post_init__(self):
        super().__post_init__()
        if self.p != 2:
            raise InvalidParameter("gerbe data lives in Čech degree 2")

    def g(self, sigma):
        return self.function(sigma)


class Trivialization(CircleCochain):
    """Čech 1-cochain h of circle functions; trivializes g when delta h ~ g."""

    def __post_init__(self):
        super().__post_init__()
        if self.p != 1:
            raise InvalidParameter("trivializations live in Čech degree 1")


def trivial_gerbe(k: Complex) -> GerbeData:
    return GerbeData(BiCochain.zero(k, 2, 0), BiCochain.zero(k, 2, 1))


def _as_gerbe(c: CircleCochain) -> GerbeData:
    return GerbeData(c.theta, c.winding)


def validate_gerbe(g: GerbeData):
    """Check carriers, flatness of windings and delta g ~ 1."""
    if not (g.theta.support_ok() and g.winding.support_ok()):
        raise NotACocycle("gerbe data has values outside the carrying stars", relation="support")
    bad = g.flat_failure()
    if bad is not None:
        raise NotACocycle(f"windings are not flat on the star of {bad}", simplex=bad, relation="flatness")
    bad = g.delta().equivalence_failure(CircleCochain.zero(g.base, 3))
    if bad is not None:
        raise NotACocycle(f"delta g != 1 on the 3-simplex {bad}", simplex=bad, relation="delta g = 1")


def _dd_total(g: GerbeData) -> TotalCochain:
    n = cech_delta(g.theta).to_integers()
    return TotalCochain(g.base, 3, {3: n, 2: -g.winding.to_integers()})


def dd_cocycle(g: GerbeData) -> Cochain:
    """Integer 3-cocycle representing the Dixmier-Douady class."""
    validate_gerbe(g)
    c, _ = descend_with_primitive(_dd_total(g))
    return c


def dd_class(g: GerbeData) -> ClassHk:
    return class_coordinates(dd_cocycle(g), cohomology_group(g.base, 3))


def dual(g: GerbeData) -> GerbeData:
    return _as_gerbe(-g)


def tensor(g1: GerbeData, g2: GerbeData) -> GerbeData:
    if g1.base != g2.base:
        raise BaseMismatch("tensor product needs gerbes on the same complex")
    return _as_gerbe(g1 + g2)


def pullback(g: GerbeData, phi: SimplicialMap) -> GerbeData:
    """Compose the local data with a simplicial map into ``g.base``."""
    return GerbeData(g.theta.pullback(phi), g.winding.pullback(phi))


def apply_gauge(g: GerbeData, h: CircleCochain) -> GerbeData:
    """g . delta(h) for a Čech 1-cochain h of circle functions."""
    if h.p != 1:
        raise InvalidParameter("a gauge is a Čech 1-cochain")
    if h.base != g.base:
        raise BaseMismatch("gauge and gerbe on different complexes")
    bad = h.flat_failure()
    if bad is not None:
        raise NotACocycle(f"gauge windings are not flat on the star of {bad}", simplex=bad, relation="flatness")
    return _as_gerbe(g + h.delta())


def trivialize(g: GerbeData) -> Trivialization:
    """A Čech 1-cochain h with delta h ~ g; NonzeroClass when d(g) != 0."""
    validate_gerbe(g)
    k = g.base
    z = _dd_total(g)
    c, prim = descend_with_primitive(z)
    pres = cohomology_group(k, 3)
    cls = class_coordinates(c, pres)
    if not cls.is_zero():
        raise NonzeroClass(cls)
    b = solve_integer_linear(coboundary_matrix(k, 2), c.vector(), snf=coboundary_snf(k, 2))
    if b is None:
        raise ArithmeticError("zero class but the DD cocycle is not an integer coboundary")
    # z = D(W) with W integer of total degree 2
    w_total = prim + TotalCochain(k, 2, {0: restrict_global(Cochain.from_vector(k, 2, b))})
    v = cone_contract(w_total.component(0))
    w_total = w_total - total_d(TotalCochain(k, 1, {0: v}))
    theta_h = contraction_K(g.theta - w_total.component(2))
    h = Trivialization(theta_h, -w_total.component(1))
    bad = h.delta().equivalence_failure(g)
    if bad is not None or h.flat_failure() is not None:
        raise ArithmeticError(f"trivialization failed verification at {bad}")
    return h


def stable_iso(g1: GerbeData, g2: GerbeData):
    """Trivialization of g1 (x) g2* when the gerbes are stably isomorphic, else None."""
    if g1.base != g2.base:
        raise BaseMismatch("stable isomorphism needs gerbes on the same complex")
    try:
        return trivialize(tensor(g1, dual(g2)))
    except NonzeroClass:
        return None


def from_class(k: Complex, c: ClassHk) -> GerbeData:
    """A gerbe whose Dixmier-Douady class is ``c``."""
    pres = cohomology_group(k, 3)
    if c.presentation is not pres:
        raise IncomparableClasses("class does not belong to H^3 of this complex")
    if c.is_zero():
        g = trivial_gerbe(k)
    else:
        top = ascend(pres.representative(c)).component(3)
        g = GerbeData(contraction_K(top), BiCochain.zero(k, 2, 1))
    if dd_class(g) != c:
        raise ArithmeticError("from_class round trip failed")
    return g


def flat_from_class(k: Complex, c: ClassHk) -> GerbeData:
    """Gerbe with locally constant phases (so dlog g = 0) realizing a torsion class."""
    pres = cohomology_group(k, 3)
    if c.presentation is not pres:
        raise IncomparableClasses("class does not belong to H^3 of this complex")
    if any(c.free):
        raise InvalidParameter("flat gerbes only realize torsion classes")
    z = pres.representative(c)
    order = 1
    for t, d in zip(c.torsion, pres.torsion):
        if t:
            order = lcm(order, d)
    b = solve_integer_linear(coboundary_matrix(k, 2), [order * v for v in z.vector()],
                             snf=coboundary_snf(k, 2))
    theta = Cochain.from_vector(k, 2, [Fraction(v, order) for v in b])
    g = GerbeData(constant_family(theta), BiCochain.zero(k, 2, 1))
    if dd_class(g) != c:
        raise ArithmeticError("flat_from_class round trip failed")
    return g


def random_gauge(k: Complex, rng, max_den=4, max_num=6, winding_range=2) -> Trivialization:
    """Pseudo-random Čech 1-cochain of circle functions (flat windings)."""
    theta, wind = {}, {}
    for e in k.simplices(1):
        st = star(k, e)
        theta[e] = {r: Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
                    for r in st.simplices(0)}
        n = {r[0]: rng.randint(-winding_range, winding_range) for r in st.simplices(0)}
        wind[e] = {r: n[r[1]] - n[r[0]] for r in st.simplices(1)}
    return Trivialization(BiCochain(k, 1, 0, theta), BiCochain(k, 1, 1, wind))
