"""The Čech-simplicial double complex of the vertex-star cover.

A :class:`BiCochain` of bidegree (p, q) assigns to every p-simplex sigma of
the base (a Čech index) a simplicial q-cochain on the closed star St(sigma).
The total differential is D = delta + (-1)^p d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complex import Cochain, Complex, SimplicialMap, sort_with_sign, star
from .errors import BaseMismatch, InvalidDegree, InvalidMap, NotClosed

__all__ = [
    "BiCochain",
    "TotalCochain",
    "cech_delta",
    "simp_d",
    "contraction_K",
    "cone_contraction",
    "cone_contract",
    "restrict_global",
    "constant_family",
    "glue",
    "total_d",
    "descend",
    "descend_with_primitive",
    "ascend",
]


def _clean(values):
    out = {}
    for s, loc in values.items():
        loc = {r: v for r, v in loc.items() if v}
        if loc:
            out[s] = loc
    return out


@dataclass(eq=False)
class BiCochain:
    """Element of the double complex in bidegree (p, q)."""

    base: Complex
    p: int
    q: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = _clean(self.values)

    @classmethod
    def zero(cls, base, p, q):
        return cls(base, p, q, {})

    @property
    def ring(self):
        for loc in self.values.values():
            for v in loc.values():
                if not isinstance(v, int) and Fraction(v).denominator != 1:
                    return "Q"
        return "Z"

    def local(self, sigma):
        return self.values.get(sigma, {})

    def is_zero(self):
        return not self.values

    def entries(self):
        for s, loc in self.values.items():
            for r, v in loc.items():
                yield s, r, v

    def support_ok(self):
        """Every local value lives on a simplex of the carrying star."""
        for s, loc in self.values.items():
            if len(s) != self.p + 1 or s not in self.base:
                return False
            st = star(self.base, s)
            if any(len(r) != self.q + 1 or r not in st for r in loc):
                return False
        return True

    def to_integers(self):
        """Same cochain with integral Fraction entries turned into ints."""
        out = {}
        for s, loc in self.values.items():
            out[s] = {r: int(v) for r, v in loc.items()}
        return BiCochain(self.base, self.p, self.q, out)

    def _check(self, other):
        if other.base is not self.base and other.base != self.base:
            raise BaseMismatch("bicochains live on different complexes")
        if (other.p, other.q) != (self.p, self.q):
            raise InvalidDegree(f"bidegrees differ: {(self.p, self.q)} vs {(other.p, other.q)}")

    def __add__(self, other):
        self._check(other)
        out = {s: dict(loc) for s, loc in self.values.items()}
        for s, loc in other.values.items():
            tgt = out.setdefault(s, {})
            for r, v in loc.items():
                tgt[r] = tgt.get(r, 0) + v
        return BiCochain(self.base, self.p, self.q, out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return BiCochain(self.base, self.p, self.q,
                         {s: {r: scalar * v for r, v in loc.items()} for s, loc in self.values.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BiCochain):
            return NotImplemented
        return (self.p, self.q) == (other.p, other.q) and self.base == other.base and self.values == other.values

    def __repr__(self):
        n = sum(len(loc) for loc in self.values.values())
        return f"BiCochain(p={self.p}, q={self.q}, entries={n})"

    def pullback(self, phi: SimplicialMap):
        """Alternating pullback along a simplicial map into ``self.base``."""
        if phi.target != self.base:
            raise InvalidMap("map target differs from the bicochain's base")
        src = phi.source
        out = {}
        for s in src.simplices(self.p):
            img, sign = phi.image(s)
            if img is None:
                continue
            loc = self.values.get(img)
            if not loc:
                continue
            new = {}
            for r in star(src, s).simplices(self.q):
                rimg, rsign = phi.image(r)
                if rimg is None:
                    continue
                v = loc.get(rimg)
                if v:
                    new[r] = sign * rsign * v
            out[s] = new
        return BiCochain(src, self.p, self.q, out)


def cech_delta(x: BiCochain) -> BiCochain:
    """(delta x)_{v0..v(p+1)} = sum_i (-1)^i x_{..^vi..} restricted to the smaller star."""
    k, out = x.base, {}
    for s in k.simplices(x.p + 1):
        faces = [x.values.get(s[:i] + s[i + 1:]) for i in range(len(s))]
        if not any(faces):
            continue
        loc = {}
        for r in star(k, s).simplices(x.q):
            acc = 0
            for i, f in enumerate(faces):
                if f:
                    v = f.get(r)
                    if v:
                        acc += v if i % 2 == 0 else -v
            if acc:
                loc[r] = acc
        if loc:
            out[s] = loc
    return BiCochain(k, x.p + 1, x.q, out)


def _local_d(loc, simplices):
    out = {}
    for r in simplices:
        acc = 0
        for i in range(len(r)):
            v = loc.get(r[:i] + r[i + 1:])
            if v:
                acc += v if i % 2 == 0 else -v
        if acc:
            out[r] = acc
    return out


def simp_d(x: BiCochain) -> BiCochain:
    """Local simplicial coboundary on every star."""
    k, out = x.base, {}
    for s, loc in x.values.items():
        new = _local_d(loc, star(k, s).simplices(x.q + 1))
        if new:
            out[s] = new
    return BiCochain(k, x.p, x.q + 1, out)


def _insert(v, tau):
    """(sorted tuple of v followed by tau, sign) or (None, 0) if v in tau."""
    if v in tau:
        return None, 0
    pos = 0
    while pos < len(tau) and tau[pos] < v:
        pos += 1
    return tau[:pos] + (v,) + tau[pos:], (-1) ** pos


def contraction_K(x: BiCochain) -> BiCochain:
    """Row homotopy with min-vertex weights: (Kx)_tau(rho) = x_{min(rho) tau}(rho).

    delta K + K delta = id in Čech degrees >= 1; integer input stays integer.
    """
    if x.p < 1:
        raise InvalidDegree("contraction_K needs Čech degree >= 1")
    k, out = x.base, {}
    for tau in k.simplices(x.p - 1):
        loc = {}
        for r in star(k, tau).simplices(x.q):
            sigma, sign = _insert(r[0], tau)
            if sigma is None:
                continue
            src = x.values.get(sigma)
            if src:
                v = src.get(r)
                if v:
                    loc[r] = sign * v
        if loc:
            out[tau] = loc
    return BiCochain(k, x.p - 1, x.q, out)


def cone_contraction(k: Complex, sigma, local: dict, q: int) -> dict:
    """Cone homotopy on St(sigma) with apex min(sigma): (hx)(rho) = x(apex rho).

    ``local`` is a q-cochain on the star; returns a (q-1)-cochain with
    d h + h d = id for q >= 1.
    """
    if q < 1:
        raise InvalidDegree("cone contraction needs form degree >= 1")
    apex = sigma[0]
    out = {}
    for r in star(k, sigma).simplices(q - 1):
        full, sign = _insert(apex, r)
        if full is None:
            continue
        v = local.get(full)
        if v:
            out[r] = sign * v
    return out


def cone_contract(x: BiCochain) -> BiCochain:
    """Apply :func:`cone_contraction` on every star."""
    if x.q < 1:
        raise InvalidDegree("cone contraction needs form degree >= 1")
    return BiCochain(x.base, x.p, x.q - 1,
                     {s: cone_contraction(x.base, s, loc, x.q) for s, loc in x.values.items()})


def restrict_global(c: Cochain) -> BiCochain:
    """Čech-0 family of restrictions of a global cochain to every vertex star."""
    k, out = c.complex, {}
    for v in k.simplices(0):
        loc = {}
        for r in star(k, v).simplices(c.degree):
            val = c.values.get(r)
            if val:
                loc[r] = val
        if loc:
            out[v] = loc
    return BiCochain(k, 0, c.degree, out)


def constant_family(c: Cochain) -> BiCochain:
    """Čech p-cochain of locally constant functions with value c(sigma) on St(sigma)."""
    k, out = c.complex, {}
    for s, val in c.values.items():
        out[s] = {(v,): val for (v,) in star(k, s).simplices(0)}
    return BiCochain(k, c.degree, 0, out)


def glue(x: BiCochain) -> Cochain:
    """Glue a delta-closed Čech-0 family into one global cochain."""
    if x.p != 0:
        raise InvalidDegree("only Čech-0 families glue")
    if not cech_delta(x).is_zero():
        raise NotClosed("local cochains disagree on overlaps")
    k, out = x.base, {}
    for r in k.simplices(x.q):
        v = x.values.get((r[0],))
        if v:
            val = v.get(r)
            if val:
                out[r] = val
    return Cochain(k, x.q, out)


@dataclass(eq=False)
class TotalCochain:
    """Element of the total complex: components keyed by Čech degree p."""

    base: Complex
    degree: int
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        comps = {}
        for p, bc in self.components.items():
            if bc.p != p or bc.p + bc.q != self.degree:
                raise InvalidDegree(f"component at p={p} has bidegree {(bc.p, bc.q)}")
            if not bc.is_zero():
                comps[p] = bc
        self.components = comps

    def component(self, p):
        return self.components.get(p) or BiCochain.zero(self.base, p, self.degree - p)

    def is_zero(self):
        return not self.components

    def __add__(self, other):
        if other.degree != self.degree:
            raise InvalidDegree("total degrees differ")
        comps = dict(self.components)
        for p, bc in other.components.items():
            comps[p] = comps[p] + bc if p in comps else bc
        return TotalCochain(self.base, self.degree, comps)

    def __neg__(self):
        return TotalCochain(self.base, self.degree, {p: -bc for p, bc in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, TotalCochain):
            return NotImplemented
        return (self.degree == other.degree and set(self.components) == set(other.components)
                and all(self.components[p] == other.components[p] for p in self.components))


def total_d(z: TotalCochain) -> TotalCochain:
    """D = delta + (-1)^p d."""
    comps = {}
    for p, bc in z.components.items():
        for term in (cech_delta(bc), simp_d(bc) * (-1) ** p):
            if term.is_zero():
                continue
            comps[term.p] = comps[term.p] + term if term.p in comps else term
    return TotalCochain(z.base, z.degree + 1, comps)


def descend_with_primitive(z: TotalCochain, check=True):
    """Staircase to Čech degree 0.

    Returns (c, Y) with z - D(Y) equal to the restriction of the global
    cocycle c to every star.
    """
    if check and not total_d(z).is_zero():
        raise NotClosed("total cochain is not D-closed")
    n, k = z.degree, z.base
    comps = dict(z.components)
    prim = {}
    for p in range(max(comps, default=0), 0, -1):
        x = comps.pop(p, None)
        if x is None:
            continue
        y = contraction_K(x)
        residue = x - cech_delta(y)
        if not residue.is_zero():
            raise NotClosed(f"top Čech component in degree {p} is not delta-closed")
        corr = simp_d(y) * (-1) ** (p - 1)
        if not corr.is_zero():
            comps[p - 1] = comps[p - 1] - corr if p - 1 in comps else -corr
        prim[p - 1] = prim[p - 1] + y if p - 1 in prim else y
    bottom = comps.get(0, BiCochain.zero(k, 0, n))
    c = glue(bottom)
    return c, TotalCochain(k, n - 1, prim)


def descend(z: TotalCochain) -> Cochain:
    """Global simplicial cocycle representing the class of a D-closed ``z``."""
    return descend_with_primitive(z)[0]


def ascend(c: Cochain, with_primitive=False):
    """Move a global cocycle to Čech degree n via cone contractions.

    The result has a single component in bidegree (n, 0) whose local values
    are locally constant, and is D-cohomologous to the restriction of c.
    """
    if not c.coboundary().is_zero():
        raise NotClosed("cochain is not a cocycle")
    k, n = c.complex, c.degree
    x = restrict_global(c)
    prim = {}
    for p in range(0, n):
        y = cone_contract(x) * (-1) ** p
        # D y = delta y + (-1)^p d y, and (-1)^p d y == x because d x == 0
        if not (simp_d(y) * (-1) ** p - x).is_zero():
            raise NotClosed(f"component at Čech degree {p} is not d-closed")
        prim[p] = y
        x = -cech_delta(y)
    z = TotalCochain(k, n, {n: x})
    if with_primitive:
        return z, TotalCochain(k, n - 1, prim)
    return z
