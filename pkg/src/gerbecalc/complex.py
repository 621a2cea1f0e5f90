"""Finite abstract simplicial complexes, simplicial maps and (co)chains.

Simplices are stored as strictly increasing tuples of vertex *indices*; the
index order is the global vertex order.  Labels only matter for I/O.
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import DimensionError, InvalidMap, InvalidParameter, InvalidSimplex, NotASimplex
from .intlinalg import Matrix

__all__ = [
    "Complex",
    "Subcomplex",
    "SimplicialMap",
    "Cochain",
    "Chain",
    "build_complex",
    "example_complex",
    "simplicial_product",
    "star",
    "boundary_matrix",
    "coboundary_matrix",
    "sort_with_sign",
]


def label_key(label):
    """Natural order on vertex labels: integers first, then strings."""
    if isinstance(label, bool):
        raise InvalidSimplex(f"boolean vertex label {label!r}")
    if isinstance(label, int):
        return (0, label, "")
    if isinstance(label, str):
        return (1, 0, label)
    raise InvalidSimplex(f"vertex labels must be int or str, got {label!r}")


def sort_with_sign(tup):
    """Sort a tuple, returning (sorted tuple, permutation sign) or (None, 0) on repeats."""
    if len(set(tup)) != len(tup):
        return None, 0
    arr = list(tup)
    sign = 1
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return tuple(arr), sign


class Complex:
    """An immutable finite simplicial complex.

    ``vertices`` are labels in global order; simplices are index tuples.
    """

    def __init__(self, vertices, simplices_by_dim):
        self.vertices = tuple(vertices)
        self._by_dim = tuple(tuple(sorted(s)) for s in simplices_by_dim)
        self._pos = [{s: i for i, s in enumerate(level)} for level in self._by_dim]
        self._label_pos = {str(v): i for i, v in enumerate(self.vertices)}
        if len(self._label_pos) != len(self.vertices):
            raise InvalidSimplex("vertex labels must be distinct as strings")
        self._hash = None
        self._cache = {}

    # -- basic queries -------------------------------------------------
    @property
    def dimension(self):
        return len(self._by_dim) - 1

    def simplices(self, dim):
        if 0 <= dim < len(self._by_dim):
            return self._by_dim[dim]
        return ()

    def count(self, dim):
        return len(self.simplices(dim))

    def index(self, simplex):
        try:
            return self._pos[len(simplex) - 1][simplex]
        except (IndexError, KeyError):
            raise NotASimplex(f"{simplex} is not a simplex") from None

    def __contains__(self, simplex):
        d = len(simplex) - 1
        return 0 <= d < len(self._pos) and simplex in self._pos[d]

    def all_simplices(self):
        for level in self._by_dim:
            yield from level

    def vertex_index(self, label):
        try:
            return self._label_pos[str(label)]
        except KeyError:
            raise NotASimplex(f"unknown vertex {label!r}") from None

    def labels(self, simplex):
        return tuple(self.vertices[i] for i in simplex)

    def simplex_from_labels(self, labels):
        idx = tuple(self.vertex_index(v) for v in labels)
        s, sign = sort_with_sign(idx)
        if s is None:
            raise InvalidSimplex(f"repeated vertex in {labels!r}")
        if s not in self:
            raise NotASimplex(f"{labels!r} is not a simplex")
        return s, sign

    def maximal_simplices(self):
        cached = self._cache.get("maximal")
        if cached is None:
            covered = set()
            for level in self._by_dim[1:]:
                for s in level:
                    for f in combinations(s, len(s) - 1):
                        covered.add(f)
            cached = tuple(s for s in self.all_simplices() if s not in covered)
            self._cache["maximal"] = cached
        return cached

    def euler_characteristic(self):
        return sum((-1) ** d * len(level) for d, level in enumerate(self._by_dim))

    def f_vector(self):
        return tuple(len(level) for level in self._by_dim)

    def cofaces(self, simplex, dim):
        """``dim``-simplices containing ``simplex``."""
        st = star(self, simplex)
        return tuple(t for t in st.simplices(dim) if set(simplex) <= set(t))

    # -- equality ------------------------------------------------------
    def _key(self):
        return (self.vertices, self._by_dim)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Complex):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"Complex(f={self.f_vector()})"


@dataclass(frozen=True)
class Subcomplex:
    """Face-closed subset of a parent complex, grouped by dimension."""

    parent: Complex = field(repr=False, compare=False)
    by_dim: tuple

    def simplices(self, dim):
        if 0 <= dim < len(self.by_dim):
            return self.by_dim[dim]
        return ()

    def __contains__(self, simplex):
        return simplex in self._members()

    def _members(self):
        mem = self.__dict__.get("_mem")
        if mem is None:
            mem = frozenset(s for level in self.by_dim for s in level)
            object.__setattr__(self, "_mem", mem)
        return mem

    @property
    def dimension(self):
        return len(self.by_dim) - 1

    def is_face_closed(self):
        mem = self._members()
        return all(f in mem for s in mem for k in range(1, len(s)) for f in combinations(s, k))


def build_complex(maximal_simplices, vertices=None) -> Complex:
    """Face closure of a list of simplices given by vertex labels.

    Vertices are ordered by ``vertices`` when given, otherwise by the natural
    label order.
    """
    tuples = []
    for s in maximal_simplices:
        s = tuple(s)
        if not s:
            raise InvalidSimplex("empty simplex")
        if len(set(map(str, s))) != len(s):
            raise InvalidSimplex(f"duplicate vertex in {s!r}")
        tuples.append(s)
    seen = {}
    for s in tuples:
        for v in s:
            label_key(v)
            seen.setdefault(str(v), v)
    if vertices is None:
        order = sorted(seen.values(), key=label_key)
    else:
        order = list(vertices)
        names = [str(v) for v in order]
        if len(set(names)) != len(names):
            raise InvalidSimplex("duplicate vertex in vertex list")
        missing = set(seen) - set(names)
        if missing:
            raise InvalidSimplex(f"simplex uses undeclared vertices {sorted(missing)}")
        unused = set(names) - set(seen)
        if unused:
            raise InvalidSimplex(f"vertices {sorted(unused)} lie in no simplex")
    pos = {str(v): i for i, v in enumerate(order)}
    faces = set()
    for s in tuples:
        idx = tuple(sorted(pos[str(v)] for v in s))
        for k in range(1, len(idx) + 1):
            faces.update(combinations(idx, k))
    top = max(len(f) for f in faces) if faces else 0
    levels = [[] for _ in range(top)]
    for f in faces:
        levels[len(f) - 1].append(f)
    return _intern(Complex(order, levels))


_INTERNED = weakref.WeakValueDictionary()


def _intern(k: Complex) -> Complex:
    """Share one instance (and so one cache) among equal complexes."""
    existing = _INTERNED.get(k._key())
    if existing is not None:
        return existing
    _INTERNED[k._key()] = k
    return k


def simplicial_product(a: Complex, b: Complex) -> Complex:
    """Staircase triangulation of |a| x |b|.

    Vertices are pairs ordered lexicographically, labelled ``"<u>x<v>"``.
    """
    if not a.vertices or not b.vertices:
        raise InvalidParameter("product of an empty complex")
    nb = len(b.vertices)
    labels = [f"{u}x{v}" for u in a.vertices for v in b.vertices]
    maximal = []
    for s in a.maximal_simplices():
        for t in b.maximal_simplices():
            p, q = len(s) - 1, len(t) - 1
            # lattice paths from (0, 0) to (p, q): choose which steps move in s
            for steps in combinations(range(p + q), p):
                i = j = 0
                chain = [s[0] * nb + t[0]]
                stepset = set(steps)
                for k in range(p + q):
                    if k in stepset:
                        i += 1
                    else:
                        j += 1
                    chain.append(s[i] * nb + t[j])
                maximal.append(tuple(labels[c] for c in chain))
    return build_complex(maximal, vertices=labels)


_RP2 = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
]


def _sphere(n):
    if n < 1:
        raise InvalidParameter("sphere dimension must be >= 1")
    return build_complex(combinations(range(n + 2), n + 1))


def _circle(m):
    if m < 3:
        raise InvalidParameter("a circle needs at least 3 vertices")
    return build_complex([(i, (i + 1) % m) for i in range(m)])


def example_complex(name, n=None) -> Complex:
    """Standard test spaces.

    ``name`` is one of ``sphere``, ``circle``, ``rp2``, ``torus2``, ``torus3``,
    ``rp2_x_s1``, ``s3_x_s1``; the size parameter may be given as ``n`` or
    appended to the name (``"sphere3"``, ``"circle5"``).
    """
    m = re.fullmatch(r"(sphere|circle)(\d+)", name)
    if m:
        name, n = m.group(1), int(m.group(2))
    if name == "sphere":
        return _sphere(3 if n is None else n)
    if name == "circle":
        return _circle(3 if n is None else n)
    if name == "rp2":
        return build_complex(_RP2)
    if name == "torus2":
        c = _circle(3)
        return simplicial_product(c, c)
    if name == "torus3":
        c = _circle(3)
        return simplicial_product(simplicial_product(c, c), c)
    if name == "rp2_x_s1":
        return simplicial_product(build_complex(_RP2), _circle(3))
    if name == "s3_x_s1":
        return simplicial_product(_sphere(3), _circle(3))
    raise InvalidParameter(f"unknown example complex {name!r}")


EXAMPLE_NAMES = ("sphere3", "circle3", "rp2", "torus2", "torus3", "rp2_x_s1", "s3_x_s1")


def star(k: Complex, sigma) -> Subcomplex:
    """Closed star St(sigma) = {tau : tau U sigma in k}."""
    sigma = tuple(sigma)
    cache = k._cache.setdefault("star", {})
    st = cache.get(sigma)
    if st is not None:
        return st
    if sigma not in k:
        raise NotASimplex(f"{sigma} is not a simplex")
    sset = set(sigma)
    tops = [s for s in k.maximal_simplices() if sset <= set(s)]
    faces = set()
    for s in tops:
        for r in range(1, len(s) + 1):
            faces.update(combinations(s, r))
    top = max(len(f) for f in faces)
    levels = [[] for _ in range(top)]
    for f in faces:
        levels[len(f) - 1].append(f)
    st = Subcomplex(k, tuple(tuple(sorted(level)) for level in levels))
    cache[sigma] = st
    return st


def boundary_matrix(k: Complex, dim: int) -> Matrix:
    """Matrix of the boundary C_dim -> C_{dim-1} in canonical bases."""
    if not 1 <= dim <= k.dimension:
        raise InvalidParameter(f"boundary dimension {dim} outside 1..{k.dimension}")
    key = ("boundary", dim)
    if key not in k._cache:
        lower = k._pos[dim - 1]
        rows = [{} for _ in range(len(lower))]
        for j, s in enumerate(k.simplices(dim)):
            for i in range(len(s)):
                rows[lower[s[:i] + s[i + 1:]]][j] = (-1) ** i
        k._cache[key] = Matrix(len(lower), k.count(dim), rows)
    return k._cache[key]


def coboundary_matrix(k: Complex, degree: int) -> Matrix:
    """Matrix of the coboundary C^degree -> C^(degree+1); any degree >= -1."""
    key = ("coboundary", degree)
    if key not in k._cache:
        if 0 <= degree < k.dimension:
            mat = boundary_matrix(k, degree + 1).transpose()
        else:
            mat = Matrix(k.count(degree + 1), k.count(degree))
        k._cache[key] = mat
    return k._cache[key]


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    """Vertex map (by index) that sends simplices to simplices."""

    source: Complex
    target: Complex
    vertex_map: tuple

    def __post_init__(self):
        vm = tuple(self.vertex_map)
        object.__setattr__(self, "vertex_map", vm)
        if len(vm) != len(self.source.vertices):
            raise InvalidMap("vertex map must be defined on every source vertex")
        for v in vm:
            if not (isinstance(v, int) and 0 <= v < len(self.target.vertices)):
                raise InvalidMap(f"vertex image {v!r} is not a target vertex")
        for s in self.source.maximal_simplices():
            img = tuple(sorted({vm[v] for v in s}))
            if img not in self.target:
                raise InvalidMap(f"image of {s} is not a simplex of the target")

    @classmethod
    def from_labels(cls, source, target, mapping):
        vm = []
        for v in source.vertices:
            if str(v) not in {str(k) for k in mapping}:
                raise InvalidMap(f"vertex {v!r} has no image")
        lookup = {str(k): w for k, w in mapping.items()}
        for v in source.vertices:
            vm.append(target.vertex_index(lookup[str(v)]))
        return cls(source, target, tuple(vm))

    @classmethod
    def identity(cls, k):
        return cls(k, k, tuple(range(len(k.vertices))))

    @classmethod
    def constant(cls, source, target, vertex=0):
        return cls(source, target, (vertex,) * len(source.vertices))

    @classmethod
    def projection(cls, a, b, factor=0, product=None):
        """Projection of ``simplicial_product(a, b)`` onto one factor."""
        prod = product if product is not None else simplicial_product(a, b)
        nb = len(b.vertices)
        if factor == 0:
            return cls(prod, a, tuple(i // nb for i in range(len(prod.vertices))))
        return cls(prod, b, tuple(i % nb for i in range(len(prod.vertices))))

    def image(self, simplex):
        """(sorted image tuple, orientation sign), or (None, 0) if degenerate."""
        return sort_with_sign(tuple(self.vertex_map[v] for v in simplex))


def _clean(values):
    return {s: v for s, v in values.items() if v}


@dataclass(eq=False)
class Cochain:
    """Simplicial cochain: sparse map from ``degree``-simplices to numbers."""

    complex: Complex
    degree: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = _clean(self.values)

    @classmethod
    def from_vector(cls, k, degree, vec):
        simp = k.simplices(degree)
        if len(vec) != len(simp):
            raise DimensionError("vector length does not match simplex count")
        return cls(k, degree, dict(zip(simp, vec)))

    def vector(self):
        return [self.values.get(s, 0) for s in self.complex.simplices(self.degree)]

    def __call__(self, simplex):
        return self.values.get(simplex, 0)

    def coboundary(self):
        k, out = self.complex, {}
        for s in k.simplices(self.degree + 1):
            acc = 0
            for i in range(len(s)):
                v = self.values.get(s[:i] + s[i + 1:])
                if v:
                    acc += v if i % 2 == 0 else -v
            if acc:
                out[s] = acc
        return Cochain(k, self.degree + 1, out)

    def is_zero(self):
        return not self.values

    def is_integral(self):
        return all(Fraction(v).denominator == 1 for v in self.values.values())

    def _check(self, other):
        if other.complex is not self.complex and other.complex != self.complex:
            raise DimensionError("cochains live on different complexes")
        if other.degree != self.degree:
            raise DimensionError("cochain degrees differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.values)
        for s, v in other.values.items():
            out[s] = out.get(s, 0) + v
        return Cochain(self.complex, self.degree, out)

    def __neg__(self):
        return Cochain(self.complex, self.degree, {s: -v for s, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return Cochain(self.complex, self.degree, {s: scalar * v for s, v in self.values.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.degree == other.degree and self.complex == other.complex and self.values == other.values

    def pullback(self, phi: SimplicialMap):
        if phi.target != self.complex:
            raise InvalidMap("map target differs from the cochain's complex")
        out = {}
        for s in phi.source.simplices(self.degree):
            img, sign = phi.image(s)
            if img is not None:
                v = self.values.get(img)
                if v:
                    out[s] = sign * v
        return Cochain(phi.source, self.degree, out)


@dataclass(eq=False)
class Chain:
    """Integer simplicial chain."""

    complex: Complex
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = _clean(self.coeffs)

    @classmethod
    def from_vector(cls, k, degree, vec):
        return cls(k, degree, dict(zip(k.simplices(degree), vec)))

    def boundary(self):
        out = {}
        for s, c in self.coeffs.items():
            for i in range(len(s)):
                f = s[:i] + s[i + 1:]
                if f:
                    out[f] = out.get(f, 0) + (c if i % 2 == 0 else -c)
        return Chain(self.complex, self.degree - 1, out)

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for s, v in other.coeffs.items():
            out[s] = out.get(s, 0) + v
        return Chain(self.complex, self.degree, out)

    def __mul__(self, scalar):
        return Chain(self.complex, self.degree, {s: scalar * v for s, v in self.coeffs.items()})

    __rmul__ = __mul__
