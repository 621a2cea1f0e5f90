import random
from fractions import Fraction
from itertools import product

import pytest

from gerbecalc.cech import BiCochain
from gerbecalc.cohomology import cohomology_group, pullback_class
from gerbecalc.complex import SimplicialMap, example_complex
from gerbecalc.errors import AxiomError, BaseMismatch, CocycleViolation, NonzeroClass
from gerbecalc.gerbe import dd_class, pullback, trivialize, validate_gerbe
from gerbecalc.lifting import (
    CentralExtension,
    FiniteGroup,
    Lift,
    PrincipalBundleData,
    find_flat_lift,
    find_lift,
    lift_agreement,
    lifting_gerbe,
    lifting_obstruction,
    pullback_bundle,
    random_bundle,
    standard_extensions,
    validate_bundle,
    validate_extension,
    verify_lift,
)

Z2, Z4 = FiniteGroup.cyclic(2), FiniteGroup.cyclic(4)
V4 = FiniteGroup.product(Z2, Z2)


def v4_bundle(k, a, b):
    """V4 bundle whose first coordinate is the Z/2-cocycle a and second is b."""
    trans = {e: V4.from_coords((a.get(e, 0), b.get(e, 0))) for e in k.simplices(1)}
    return PrincipalBundleData(k, V4, trans)


def mod2_generators(k):
    """Z/2-valued 1-cocycles generating H^1(k; Z/2), from random bundles."""
    from gerbecalc.lifting import random_bundle as rb
    rng = random.Random(0)
    return [rb(k, Z2, rng, gauge=False).transition for _ in range(6)]


def a1b2():
    return CentralExtension.from_function(
        V4, lambda x, y: Fraction(V4.coords(x)[0] * V4.coords(y)[1], 2))


# -- groups, extensions, bundles ---------------------------------------------

def test_group_constructions():
    assert Z4.table[3][2] == 1 and Z4.inv(1) == 3
    assert V4.elements == ("0.0", "0.1", "1.0", "1.1")
    assert all(V4.mul(x, x) == V4.identity for x in range(4))
    g = FiniteGroup.from_table(["e", "x"], [["e", "x"], ["x", "e"]])
    assert g.identity == 0 and g.inv(1) == 1


@pytest.mark.parametrize("table,axiom", [
    ([[0, 1], [1, 1]], "inverse"),
    ([[1, 0], [0, 0]], "identity"),
    ([[0, 1, 2], [1, 0, 0], [2, 0, 0]], "associativity"),
    ([[0, 1], [1]], "closure"),
])
def test_group_axiom_failures(table, axiom):
    with pytest.raises(AxiomError) as err:
        FiniteGroup([str(i) for i in range(len(table))], table)
    assert err.value.axiom == axiom


def test_z2_extension_cocycle_identity_by_enumeration():
    e = CentralExtension(Z2, {(1, 1): Fraction(1, 2)})
    validate_extension(e)
    for a, b, c in product(range(2), repeat=3):
        lhs = e.eps(a, b) + e.eps(Z2.mul(a, b), c)
        rhs = e.eps(b, c) + e.eps(a, Z2.mul(b, c))
        assert (lhs - rhs).denominator == 1


def test_extension_failures():
    with pytest.raises(AxiomError) as err:
        validate_extension(CentralExtension(Z2, {(0, 1): Fraction(1, 2)}))
    assert err.value.axiom == "normalization"
    Z3 = FiniteGroup.cyclic(3)
    with pytest.raises(AxiomError) as err:
        validate_extension(CentralExtension(Z3, {(1, 1): Fraction(1, 3)}))
    assert err.value.axiom == "cocycle"


def test_standard_extensions_are_valid():
    assert len(standard_extensions(Z2)) == 2
    assert len(standard_extensions(Z4)) == 3
    assert len(standard_extensions(V4)) == 4
    assert standard_extensions(Z2)[1].epsilon == {(1, 1): Fraction(1, 2)}


def test_bundle_cocycle_violation():
    k = example_complex("rp2")
    b = PrincipalBundleData(k, Z2, {(0, 1): 1})
    with pytest.raises(CocycleViolation):
        validate_bundle(b)
    with pytest.raises(AxiomError):
        validate_bundle(PrincipalBundleData(k, Z2, {(0, 3): 1}))


@pytest.mark.parametrize("name", ["torus2", "rp2_x_s1"])
def test_random_bundles_are_cocycles(name):
    k = example_complex(name)
    rng = random.Random(1)
    for G in (Z2, Z4, V4):
        for _ in range(3):
            validate_bundle(random_bundle(k, G, rng))


# -- lifting gerbes ------------------------------------------------------------

def test_split_extension_gives_trivial_gerbe_and_zero_lift():
    k = example_complex("torus2")
    b = random_bundle(k, Z4, random.Random(2))
    e = CentralExtension(Z4, {})
    g = lifting_gerbe(b, e)
    assert g.theta.is_zero() and g.winding.is_zero()
    lift = find_lift(b, e)
    assert lift.phase.theta.is_zero() and lift.is_flat()
    assert lifting_obstruction(b, e).is_zero()


def test_trivial_bundle_gives_trivial_gerbe():
    k = example_complex("rp2_x_s1")
    for e in standard_extensions(V4):
        g = lifting_gerbe(PrincipalBundleData.trivial(k, V4), e)
        assert g.theta.is_zero()


def test_mismatched_groups():
    k = example_complex("torus2")
    with pytest.raises(BaseMismatch):
        lifting_gerbe(PrincipalBundleData.trivial(k, Z2), CentralExtension(Z4, {}))


@pytest.mark.parametrize("name", ["torus2", "torus3", "rp2_x_s1"])
def test_three_way_agreement_and_torsion(name):
    k = example_complex(name)
    rng = random.Random(11)
    for G in (Z2, Z4, V4):
        for e in standard_extensions(G):
            b = random_bundle(k, G, rng)
            validate_gerbe(lifting_gerbe(b, e))
            found, zero, triv = lift_agreement(b, e)
            assert found == zero == triv
            assert not any(lifting_obstruction(b, e).free)
            if found:
                assert verify_lift(b, e, find_lift(b, e)) is None
            if name == "torus3":
                assert found


def test_nonzero_obstruction_on_rp2_x_s1():
    k = example_complex("rp2_x_s1")
    e = a1b2()
    hits = 0
    rng = random.Random(4)
    for _ in range(12):
        b = random_bundle(k, V4, rng)
        obs = lifting_obstruction(b, e)
        if obs.is_zero():
            assert find_lift(b, e) is not None
            continue
        hits += 1
        assert obs.torsion == (1,)
        assert find_lift(b, e) is None and find_flat_lift(b, e) is None
        with pytest.raises(NonzeroClass):
            trivialize(lifting_gerbe(b, e))
    assert hits > 0


def test_lift_verification_rejects_wrong_phases():
    k = example_complex("torus2")
    b = random_bundle(k, Z2, random.Random(3))
    e = standard_extensions(Z2)[1]
    lift = find_lift(b, e)
    wrong = Lift(type(lift.phase)(lift.phase.theta + BiCochain(k, 1, 0, {(0, 1): {(0,): Fraction(1, 3)}}),
                                  lift.phase.winding))
    assert verify_lift(b, e, wrong) is not None


# -- flat lifts and a brute-force oracle -------------------------------------

def brute_force_flat_lift(b, e, den=8):
    """Backtracking search for constant edge phases in (1/den)Z/Z, tree edges fixed to 0."""
    k = b.base
    eps = {s: e.eps(b.t(s[0], s[1]), b.t(s[1], s[2])) for s in k.simplices(2)}
    parent, tree, stack = {0}, set(), [0]
    adj = {v: [] for v in range(len(k.vertices))}
    for u, v in k.simplices(1):
        adj[u].append(v)
        adj[v].append(u)
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in parent:
                parent.add(v)
                tree.add(tuple(sorted((u, v))))
                stack.append(v)
    edges = [e_ for e_ in k.simplices(1) if e_ not in tree]
    phase = {t: Fraction(0) for t in tree}
    tris_by_edge = {e_: [s for s in k.simplices(2) if set(e_) <= set(s)] for e_ in k.simplices(1)}

    def ok(s):
        v0, v1, v2 = s
        val = phase[(v0, v1)] + phase[(v1, v2)] - phase[(v0, v2)] + eps[s]
        return val.denominator == 1

    def rec(i):
        if i == len(edges):
            return True
        edge = edges[i]
        for n in range(den):
            phase[edge] = Fraction(n, den)
            if all(ok(s) for s in tris_by_edge[edge] if all(f in phase for f in ((s[0], s[1]), (s[1], s[2]), (s[0], s[2])))):
                if rec(i + 1):
                    return True
        del phase[edge]
        return False

    return rec(0)


@pytest.mark.parametrize("name", ["rp2", "torus2"])
def test_flat_lift_matches_brute_force(name):
    k = example_complex(name)
    rng = random.Random(6)
    for G in (Z2, Z4, V4):
        for e in standard_extensions(G):
            b = random_bundle(k, G, rng, gauge=False)
            flat = find_flat_lift(b, e)
            assert (flat is not None) == brute_force_flat_lift(b, e)
            if flat is not None:
                assert flat.is_flat() and verify_lift(b, e, flat) is None
                assert find_lift(b, e) is not None


def test_flat_lift_is_stronger_than_lifting():
    # on the 2-torus every lifting gerbe is trivial, but x.y/2 has no flat lift
    k = example_complex("torus2")
    pres = cohomology_group(k, 1)
    x, y = (pres.representative(g) for g in pres.generators())
    a = {s: int(v) % 2 for s, v in x.values.items()}
    bb = {s: int(v) % 2 for s, v in y.values.items()}
    b = v4_bundle(k, a, bb)
    validate_bundle(b)
    e = a1b2()
    assert lifting_obstruction(b, e).is_zero()
    assert find_lift(b, e) is not None
    assert find_flat_lift(b, e) is None
    assert not brute_force_flat_lift(b, e)


# -- naturality --------------------------------------------------------------

def _monotone_maps():
    t3, t2 = example_complex("torus3"), example_complex("torus2")
    c3 = example_complex("circle3")
    rp = example_complex("rp2_x_s1")
    return [
        (t3, SimplicialMap.identity(t3)),
        (t3, SimplicialMap.constant(t3, t3, 5)),
        (t2, SimplicialMap.projection(t2, c3, 0, t3)),
        (c3, SimplicialMap.projection(t2, c3, 1, t3)),
        (example_complex("rp2"), SimplicialMap.projection(example_complex("rp2"), c3, 0, rp)),
    ]


def test_lifting_gerbe_naturality_for_monotone_maps():
    rng = random.Random(8)
    for base, phi in _monotone_maps():
        for G in (Z2, V4):
            b = random_bundle(base, G, rng)
            for e in standard_extensions(G):
                lhs = lifting_gerbe(pullback_bundle(b, phi), e)
                rhs = pullback(lifting_gerbe(b, e), phi)
                assert lhs == rhs


def test_obstruction_naturality_at_class_level():
    rng = random.Random(4)
    rp, s1 = example_complex("rp2"), example_complex("circle3")
    k = example_complex("rp2_x_s1")
    e = a1b2()
    maps = [SimplicialMap.identity(k), SimplicialMap.projection(rp, s1, 0, k),
            SimplicialMap.projection(rp, s1, 1, k)]
    for phi in maps:
        for _ in range(3):
            b = random_bundle(phi.target, V4, rng)
            obs = lifting_obstruction(b, e)
            assert lifting_obstruction(pullback_bundle(b, phi), e) == pullback_class(obs, phi)
