"""Simplicial cohomology with canonical class coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complex import Chain, Cochain, Complex, boundary_matrix, coboundary_matrix
from .errors import DimensionError, IncomparableClasses, InvalidParameter, NotClosed
from .intlinalg import Matrix, kernel_basis, smith_normal_form

__all__ = [
    "GroupPresentation",
    "ClassHk",
    "cohomology_group",
    "class_coordinates",
    "classes_equal",
    "pair_with_cycle",
    "cycle_basis",
    "fundamental_cycle",
    "coboundary_snf",
    "pullback_class",
]


def coboundary_snf(k: Complex, degree: int):
    """Cached Smith decomposition of the coboundary C^degree -> C^(degree+1)."""
    key = ("coboundary_snf", degree)
    if key not in k._cache:
        k._cache[key] = smith_normal_form(coboundary_matrix(k, degree))
    return k._cache[key]


@dataclass(eq=False)
class GroupPresentation:
    """H^degree(K) as Z^free_rank + sum Z/torsion_i (over Q: torsion empty).

    Coordinates: with U the left transform of the incoming coboundary,
    y = U z splits into a block where coboundaries live (torsion read off
    mod d_i) and a free block whose lattice of cocycles is parametrised by
    the kernel basis of a second Smith decomposition.
    """

    complex: Complex = field(repr=False)
    degree: int
    ring: str
    free_rank: int
    torsion: tuple
    _incoming: object = field(repr=False, default=None)
    _outgoing: object = field(repr=False, default=None)
    _torsion_slots: tuple = field(repr=False, default=())

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.ring == "Z" else "Q")
            if self.free_rank > 1:
                parts[-1] += f"^{self.free_rank}"
        parts += [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"

    @property
    def rank_in(self):
        return self._incoming.rank

    def _split(self, vec):
        y = self._incoming.apply_u(vec)
        r = self._incoming.rank
        w = self._outgoing.apply_vinv(y[r:])
        return y, w

    def to_coords(self, vec):
        """Raw coordinates (free, torsion) of a cocycle vector."""
        y, w = self._split(vec)
        r2 = self._outgoing.rank
        if any(w[:r2]):
            raise NotClosed("vector is not a cocycle")
        free = tuple(w[r2:])
        if self.ring == "Z":
            torsion = tuple(y[t] % d for t, d in zip(self._torsion_slots, self.torsion))
        else:
            torsion = ()
        return free, torsion

    def from_coords(self, free, torsion=()):
        """Representative cocycle vector for the given coordinates."""
        if len(free) != self.free_rank or len(torsion) != len(self.torsion):
            raise DimensionError("coordinate vector has the wrong length")
        r, r2 = self._incoming.rank, self._outgoing.rank
        y = [0] * self._incoming.nrows
        for t, val in zip(self._torsion_slots, torsion):
            y[t] = val
        lifted = [0] * r2 + list(free)
        tail = self._outgoing.apply_v(lifted)
        y[r:] = tail
        return self._incoming.apply_uinv(y)

    def rational_free_coords(self, vec):
        """Free coordinates of a rational cocycle; integral iff its class is."""
        _, w = self._split([Fraction(v) for v in vec])
        r2 = self._outgoing.rank
        if any(w[:r2]):
            raise NotClosed("vector is not a cocycle")
        return tuple(w[r2:])

    def zero(self):
        return ClassHk(self, (0,) * self.free_rank, (0,) * len(self.torsion))

    def generators(self):
        gens = []
        for i in range(self.free_rank):
            gens.append(ClassHk(self, tuple(int(i == j) for j in range(self.free_rank)),
                                (0,) * len(self.torsion)))
        for i in range(len(self.torsion)):
            gens.append(ClassHk(self, (0,) * self.free_rank,
                                tuple(int(i == j) for j in range(len(self.torsion)))))
        return gens

    def element(self, free=None, torsion=None):
        free = tuple(free) if free is not None else (0,) * self.free_rank
        torsion = tuple(torsion) if torsion is not None else (0,) * len(self.torsion)
        if len(free) != self.free_rank or len(torsion) != len(self.torsion):
            raise DimensionError("coordinate vector has the wrong length")
        return ClassHk(self, free, torsion)

    def representative(self, cls: "ClassHk") -> Cochain:
        if cls.presentation is not self:
            raise IncomparableClasses("class belongs to another presentation")
        return Cochain.from_vector(self.complex, self.degree, self.from_coords(cls.free, cls.torsion))


@dataclass(frozen=True, eq=False)
class ClassHk:
    """A cohomology class in canonical coordinates."""

    presentation: GroupPresentation
    free: tuple
    torsion: tuple

    def __post_init__(self):
        tors = tuple(int(t) % d for t, d in zip(self.torsion, self.presentation.torsion))
        object.__setattr__(self, "torsion", tors)
        object.__setattr__(self, "free", tuple(self.free))

    def _same(self, other):
        if not isinstance(other, ClassHk) or other.presentation is not self.presentation:
            raise IncomparableClasses("classes come from different presentations")

    def __add__(self, other):
        self._same(other)
        return ClassHk(self.presentation,
                       tuple(a + b for a, b in zip(self.free, other.free)),
                       tuple(a + b for a, b in zip(self.torsion, other.torsion)))

    def __neg__(self):
        return ClassHk(self.presentation, tuple(-a for a in self.free), tuple(-a for a in self.torsion))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n):
        return ClassHk(self.presentation, tuple(n * a for a in self.free), tuple(n * a for a in self.torsion))

    def is_zero(self):
        return not any(self.free) and not any(self.torsion)

    def __eq__(self, other):
        return classes_equal(self, other)

    def __hash__(self):
        return hash((id(self.presentation), self.free, self.torsion))

    def __str__(self):
        free = ",".join(str(a) for a in self.free)
        tors = ",".join(f"{t} mod {d}" for t, d in zip(self.torsion, self.presentation.torsion))
        return f"free=({free}) torsion=({tors})"

    def __repr__(self):
        return f"ClassHk(H^{self.presentation.degree}, {self})"


def cohomology_group(k: Complex, degree: int, ring: str = "Z") -> GroupPresentation:
    """H^degree(k; ring) with ring in {"Z", "Q"}.

    Degrees above the dimension give the zero group.
    """
    if ring not in ("Z", "Q"):
        raise InvalidParameter(f"ring must be 'Z' or 'Q', got {ring!r}")
    if degree < 0:
        raise InvalidParameter(f"negative degree {degree}")
    key = ("cohomology", degree, ring)
    if key in k._cache:
        return k._cache[key]
    incoming = coboundary_snf(k, degree - 1)
    r = incoming.rank
    outgoing_mat = coboundary_matrix(k, degree)
    # columns r.. of U^-1 span a complement of the coboundaries
    cols = []
    for c in range(r, incoming.nrows):
        cols.append(incoming.uinv_cols[c])
    by_col = outgoing_mat.transpose().rows
    rows = [{} for _ in range(outgoing_mat.nrows)]
    for newc, col in enumerate(cols):
        for i, v in col.items():
            for rr, w in by_col[i].items():
                rows[rr][newc] = rows[rr].get(newc, 0) + w * v
    restricted = Matrix(outgoing_mat.nrows, len(cols), rows)
    outgoing = smith_normal_form(restricted)
    free_rank = len(cols) - outgoing.rank
    slots = tuple(t for t in range(r) if incoming.diagonal[t] > 1)
    torsion = tuple(incoming.diagonal[t] for t in slots) if ring == "Z" else ()
    pres = GroupPresentation(k, degree, ring, free_rank, torsion, incoming, outgoing,
                             slots if ring == "Z" else ())
    k._cache[key] = pres
    return pres


def _check_cocycle(z: Cochain):
    if not z.coboundary().is_zero():
        raise NotClosed(f"degree-{z.degree} cochain is not a cocycle")


def class_coordinates(z: Cochain, pres: GroupPresentation) -> ClassHk:
    """Canonical coordinates of the class of the cocycle ``z``."""
    if z.degree != pres.degree or z.complex != pres.complex:
        raise IncomparableClasses("cocycle and presentation do not match")
    _check_cocycle(z)
    vec = z.vector()
    if pres.ring == "Z" and not z.is_integral():
        raise InvalidParameter("integer presentation needs an integer cocycle")
    free, torsion = pres.to_coords(vec)
    return ClassHk(pres, free, torsion)


def classes_equal(a: ClassHk, b: ClassHk) -> bool:
    if not isinstance(a, ClassHk) or not isinstance(b, ClassHk):
        raise IncomparableClasses("can only compare cohomology classes")
    if a.presentation is not b.presentation:
        raise IncomparableClasses("classes come from different presentations")
    return a.free == b.free and a.torsion == b.torsion


def pair_with_cycle(z: Cochain, c: Chain, check_cocycle=True) -> Fraction:
    """Evaluate a cocycle on a cycle."""
    if z.degree != c.degree:
        raise DimensionError(f"cannot pair a degree-{z.degree} cochain with a {c.degree}-chain")
    if check_cocycle:
        _check_cocycle(z)
    if c.degree > 0 and not c.boundary().is_zero():
        raise NotClosed("chain is not a cycle")
    return Fraction(sum(v * z(s) for s, v in c.coeffs.items()))


def cycle_basis(k: Complex, degree: int):
    """Integer basis of the cycle group Z_degree as chains (column order of V)."""
    if degree > k.dimension or degree < 0:
        return []
    if degree == 0:
        return [Chain(k, 0, {s: 1}) for s in k.simplices(0)]
    key = ("cycle_basis", degree)
    if key not in k._cache:
        basis = kernel_basis(boundary_matrix(k, degree))
        k._cache[key] = [Chain.from_vector(k, degree, v) for v in basis]
    return k._cache[key]


def fundamental_cycle(k: Complex) -> Chain:
    """Generator of top-dimensional cycles, first facet with coefficient +1."""
    basis = cycle_basis(k, k.dimension)
    if len(basis) != 1:
        raise InvalidParameter(f"top cycle group has rank {len(basis)}, expected 1")
    c = basis[0]
    first = min(c.coeffs)
    return c if c.coeffs[first] > 0 else c * -1


def pullback_class(c: ClassHk, phi) -> ClassHk:
    """phi^* c in the presentation of the same degree on phi.source."""
    pres = c.presentation
    if phi.target != pres.complex:
        raise IncomparableClasses("map target is not the class's complex")
    rep = pres.representative(c).pullback(phi)
    return class_coordinates(rep, cohomology_group(phi.source, pres.degree, pres.ring))
