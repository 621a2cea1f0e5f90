"""Connections, curvings and Deligne cocycles on local gerbe data.

Forms on a star are rational simplicial cochains on it, so a connection is
a bicochain of bidegree (1, 1), a curving one of bidegree (0, 2).  Every
witness here is found by the contraction K and re-checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cech import (
    BiCochain,
    cech_delta,
    cone_contract,
    contraction_K,
    glue,
    restrict_global,
    simp_d,
)
from .cohomology import coboundary_snf, cohomology_group, cycle_basis, pair_with_cycle
from .complex import Cochain, coboundary_matrix
from .errors import (
    BaseMismatch,
    InvalidDegree,
    NonzeroClass,
    NotAConnection,
    NotACocycle,
    NotClosed,
)
from .gerbe import CircleCochain, GerbeData, Trivialization, trivialize, validate_gerbe
from .intlinalg import solve_rational_linear

__all__ = [
    "DeligneCocycle",
    "DeligneTrivialization",
    "dlog",
    "connection_for",
    "curving_for",
    "connect",
    "three_curvature",
    "periods",
    "validate_deligne",
    "deligne_tensor",
    "deligne_dual",
    "deligne_gauge",
    "deligne_trivialize",
    "deligne_equal",
]


@dataclass(eq=False)
class DeligneCocycle:
    """Gerbe data g with connection A (bidegree (1,1)) and curving f (bidegree (0,2))."""

    g: GerbeData
    A: BiCochain
    f: BiCochain

    def __post_init__(self):
        if (self.A.p, self.A.q) != (1, 1):
            raise InvalidDegree(f"connection must have bidegree (1, 1), got {(self.A.p, self.A.q)}")
        if (self.f.p, self.f.q) != (0, 2):
            raise InvalidDegree(f"curving must have bidegree (0, 2), got {(self.f.p, self.f.q)}")
        if not (self.g.base == self.A.base == self.f.base):
            raise BaseMismatch("gerbe, connection and curving on different complexes")

    @property
    def base(self):
        return self.g.base

    def __eq__(self, other):
        if not isinstance(other, DeligneCocycle):
            return NotImplemented
        return self.g == other.g and self.A == other.A and self.f == other.f


@dataclass(eq=False)
class DeligneTrivialization:
    """(h, k) with g = delta h, A = delta k + dlog h and f = dk."""

    h: Trivialization
    k: BiCochain


def dlog(g: CircleCochain) -> BiCochain:
    return g.dlog()


def _first(x: BiCochain):
    return min(x.values) if x.values else None


def connection_for(g: GerbeData) -> BiCochain:
    """A = K(dlog g), so that delta A = dlog g."""
    validate_gerbe(g)
    lg = g.dlog()
    a = contraction_K(lg)
    if not (cech_delta(a) - lg).is_zero():
        raise ArithmeticError("connection construction failed verification")
    return a


def curving_for(g: GerbeData, A: BiCochain) -> BiCochain:
    """f = K(dA), so that delta f = dA; NotAConnection unless delta A = dlog g."""
    bad = _first(cech_delta(A) - g.dlog())
    if bad is not None:
        raise NotAConnection(f"delta A != dlog g on the 2-simplex {bad}")
    F = simp_d(A)
    if not cech_delta(F).is_zero():
        raise ArithmeticError("curvature of a connection is not delta-closed")
    f = contraction_K(F)
    if not (cech_delta(f) - F).is_zero():
        raise ArithmeticError("curving construction failed verification")
    return f


def connect(g: GerbeData) -> DeligneCocycle:
    """Gerbe together with a canonical connection and curving."""
    A = connection_for(g)
    return DeligneCocycle(g, A, curving_for(g, A))


def validate_deligne(d: DeligneCocycle):
    """Check delta g = 1, delta A = dlog g and delta f = dA exactly."""
    validate_gerbe(d.g)
    if not d.A.support_ok() or not d.f.support_ok():
        raise NotACocycle("connection or curving has values outside the carrying stars", relation="support")
    bad = _first(cech_delta(d.A) - d.g.dlog())
    if bad is not None:
        raise NotACocycle(f"delta A != dlog g on the 2-simplex {bad}", simplex=bad, relation="delta A = dlog g")
    bad = _first(cech_delta(d.f) - simp_d(d.A))
    if bad is not None:
        raise NotACocycle(f"delta f != dA on the 1-simplex {bad}", simplex=bad, relation="delta f = dA")


def three_curvature(d: DeligneCocycle) -> Cochain:
    """The global closed 3-cochain omega with df = omega on every star."""
    validate_deligne(d)
    omega = glue(simp_d(d.f))
    if not omega.coboundary().is_zero():
        raise ArithmeticError("three-curvature is not closed")
    return omega


def periods(omega: Cochain, cycles) -> list:
    """Pairings of a closed cochain with each cycle (NotClosed otherwise)."""
    if not omega.coboundary().is_zero():
        raise NotClosed("three-curvature is not closed")
    return [pair_with_cycle(omega, c, check_cocycle=False) for c in cycles]


def deligne_tensor(d1: DeligneCocycle, d2: DeligneCocycle) -> DeligneCocycle:
    if d1.base != d2.base:
        raise BaseMismatch("Deligne cocycles on different complexes")
    g = d1.g + d2.g
    return DeligneCocycle(GerbeData(g.theta, g.winding), d1.A + d2.A, d1.f + d2.f)


def deligne_dual(d: DeligneCocycle) -> DeligneCocycle:
    g = -d.g
    return DeligneCocycle(GerbeData(g.theta, g.winding), -d.A, -d.f)


def deligne_gauge(d: DeligneCocycle, h: CircleCochain, k: BiCochain) -> DeligneCocycle:
    """(g . delta h, A + dlog h + delta k, f + dk): a cohomologous triple."""
    if h.p != 1 or (k.p, k.q) != (0, 1):
        raise InvalidDegree("gauge needs a Čech 1-cochain h and a (0, 1) bicochain k")
    if h.base != d.base or k.base != d.base:
        raise BaseMismatch("gauge data on a different complex")
    bad = h.flat_failure()
    if bad is not None:
        raise NotACocycle(f"gauge windings are not flat on the star of {bad}", simplex=bad, relation="flatness")
    g = d.g + h.delta()
    return DeligneCocycle(GerbeData(g.theta, g.winding),
                          d.A + h.dlog() + cech_delta(k), d.f + simp_d(k))


def _check_trivialization(d: DeligneCocycle, t: DeligneTrivialization):
    if not t.h.delta().equivalent(d.g) or t.h.flat_failure() is not None:
        raise ArithmeticError("g = delta h fails")
    if not (cech_delta(t.k) + t.h.dlog() - d.A).is_zero():
        raise ArithmeticError("A = delta k + dlog h fails")
    if not (simp_d(t.k) - d.f).is_zero():
        raise ArithmeticError("f = dk fails")


def deligne_trivialize(d: DeligneCocycle) -> DeligneTrivialization:
    """Witness (h, k) that the Deligne class of d vanishes.

    Raises NonzeroClass whose ``reason`` is one of "dixmier-douady",
    "non-closed residual", "non-integral periods" or "non-exact residual".
    """
    validate_deligne(d)
    K = d.base
    h0 = trivialize(d.g)
    a_res = d.A - h0.dlog()
    k0 = contraction_K(a_res)
    if not (cech_delta(k0) - a_res).is_zero():
        raise ArithmeticError("connection residue is not delta-closed")
    phi = glue(d.f - simp_d(k0))
    if not phi.coboundary().is_zero():
        raise NonzeroClass(reason="non-closed residual",
                           detail="curving residue is not closed (three-curvature != 0)")
    per = periods(phi, cycle_basis(K, 2))
    for i, v in enumerate(per):
        if Fraction(v).denominator != 1:
            raise NonzeroClass(reason="non-integral periods",
                               detail=f"residual period {v} on 2-cycle #{i}")
    pres = cohomology_group(K, 2)
    free = pres.rational_free_coords(phi.vector())
    if any(Fraction(x).denominator != 1 for x in free):
        raise ArithmeticError("integral periods but non-integral class coordinates")
    a = Cochain.from_vector(K, 2, pres.from_coords(tuple(int(x) for x in free),
                                                   (0,) * len(pres.torsion)))
    beta = solve_rational_linear(coboundary_matrix(K, 1), (phi - a).vector(), snf=coboundary_snf(K, 1))
    if beta is None:
        raise NonzeroClass(reason="non-exact residual", detail="residual 2-form is not exact")
    kappa = cone_contract(restrict_global(a))
    chi = CircleCochain(BiCochain.zero(K, 1, 0), -cech_delta(kappa))
    h = h0 + chi
    k = k0 + kappa + restrict_global(Cochain.from_vector(K, 1, beta))
    out = DeligneTrivialization(Trivialization(h.theta, h.winding), k)
    _check_trivialization(d, out)
    return out


def deligne_equal(d1: DeligneCocycle, d2: DeligneCocycle):
    """(True, witness) when d1 and d2 have the same Deligne class, else (False, None)."""
    if d1.base != d2.base:
        raise BaseMismatch("Deligne cocycles on different complexes")
    try:
        return True, deligne_trivialize(deligne_tensor(d1, deligne_dual(d2)))
    except NonzeroClass:
        return False, None
