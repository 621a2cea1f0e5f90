import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import gerbe_family
from gerbecalc.cech import BiCochain, simp_d
from gerbecalc.cohomology import cohomology_group, pullback_class
from gerbecalc.complex import SimplicialMap, example_complex, simplicial_product
from gerbecalc.errors import (
    BaseMismatch,
    IncomparableClasses,
    InvalidParameter,
    NonzeroClass,
    NotACocycle,
)
from gerbecalc.gerbe import (
    CircleCochain,
    CircleFunction,
    GerbeData,
    Trivialization,
    apply_gauge,
    dd_class,
    dd_cocycle,
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

seeds = st.integers(0, 2**32 - 1)


def test_trivial_gerbe():
    k = example_complex("sphere3")
    g = trivial_gerbe(k)
    validate_gerbe(g)
    assert dd_class(g).is_zero()
    h = trivialize(g)
    assert h.delta().equivalent(g)


def test_circle_function_equivalence():
    k = example_complex("circle3")
    f = CircleFunction(k, (0,), {(0,): Fraction(5, 4), (1,): Fraction(-1, 4)}, {})
    c = f.canonical()
    assert c.theta == {(0,): Fraction(1, 4), (1,): Fraction(3, 4)}
    assert f.equivalent(c)
    assert f.dlog() == c.dlog() == {(0, 1): Fraction(-3, 2), (0, 2): Fraction(-5, 4)}
    assert not f.equivalent(CircleFunction(k, (0,), {(0,): Fraction(1, 4), (1,): Fraction(3, 4)}, {}))


def test_validation_names_the_failure():
    k = example_complex("sphere3")
    bad = GerbeData(BiCochain(k, 2, 0, {(0, 1, 2): {(0,): Fraction(1, 2)}}), BiCochain.zero(k, 2, 1))
    with pytest.raises(NotACocycle) as err:
        validate_gerbe(bad)
    assert err.value.relation == "delta g = 1" and len(err.value.simplex) == 4
    unflat = GerbeData(BiCochain.zero(k, 2, 0), BiCochain(k, 2, 1, {(0, 1, 2): {(0, 1): 1}}))
    with pytest.raises(NotACocycle) as err:
        validate_gerbe(unflat)
    assert err.value.relation == "flatness" and err.value.simplex == (0, 1, 2)
    with pytest.raises(InvalidParameter):
        GerbeData(BiCochain.zero(k, 2, 0), BiCochain(k, 2, 1, {(0, 1, 2): {(0, 1): Fraction(1, 2)}}))
    with pytest.raises(InvalidParameter):
        GerbeData(BiCochain.zero(k, 1, 0), BiCochain.zero(k, 1, 1))


def test_integer_shift_of_phases_is_the_same_gerbe():
    k = example_complex("sphere3")
    g = from_class(k, cohomology_group(k, 3).generators()[0])
    n = BiCochain(k, 2, 0, {(0, 1, 2): {(0,): 1, (1,): 2, (2,): 0, (3,): 0, (4,): 0}})
    shifted = GerbeData(g.theta + n, g.winding - simp_d(n))
    assert shifted.equivalent(g)
    assert dd_class(shifted) == dd_class(g)


@pytest.mark.parametrize("name", ["sphere3", "torus3", "rp2_x_s1"])
def test_from_class_round_trip(name):
    k = example_complex(name)
    pres = cohomology_group(k, 3)
    for g in pres.generators():
        for m in (-2, -1, 0, 1, 2):
            c = m * g
            gerbe = from_class(k, c)
            validate_gerbe(gerbe)
            assert dd_class(gerbe) == c
            assert dd_cocycle(gerbe).coboundary().is_zero()


def test_from_class_rejects_foreign_class():
    other = cohomology_group(example_complex("torus3"), 3).generators()[0]
    with pytest.raises(IncomparableClasses):
        from_class(example_complex("sphere3"), other)


@pytest.mark.parametrize("name", ["sphere3", "rp2_x_s1"])
@given(seed=seeds)
def test_gauge_invariance_and_trivialization(name, seed):
    k = example_complex(name)
    rng = random.Random(seed)
    pres = cohomology_group(k, 3)
    c = rng.randint(-2, 2) * pres.generators()[0]
    g = apply_gauge(from_class(k, c), random_gauge(k, rng))
    assert dd_class(g) == c
    if c.is_zero():
        h = trivialize(g)
        assert isinstance(h, Trivialization)
        assert h.delta().equivalent(g) and h.flat_failure() is None
    else:
        with pytest.raises(NonzeroClass) as err:
            trivialize(g)
        assert err.value.cls == c


@pytest.mark.parametrize("name", ["sphere3", "rp2_x_s1"])
def test_group_laws_on_family(name):
    k = example_complex(name)
    fam = gerbe_family(k, random.Random(7))
    for a in fam:
        assert dd_class(dual(a)) == -dd_class(a)
        for b in fam:
            assert dd_class(tensor(a, b)) == dd_class(a) + dd_class(b)
            w = stable_iso(a, b)
            same = dd_class(a) == dd_class(b)
            assert (w is not None) == same
            if w is not None:
                assert w.delta().equivalent(tensor(a, dual(b)))


def test_tensor_needs_same_base():
    with pytest.raises(BaseMismatch):
        tensor(trivial_gerbe(example_complex("sphere3")), trivial_gerbe(example_complex("rp2")))


def test_flat_torsion_gerbe():
    k = example_complex("rp2_x_s1")
    c = cohomology_group(k, 3).generators()[0]
    g = flat_from_class(k, c)
    assert g.dlog().is_zero()
    assert dd_class(g) == c
    assert dd_class(tensor(g, g)).is_zero()
    with pytest.raises(InvalidParameter):
        flat_from_class(example_complex("sphere3"), cohomology_group(example_complex("sphere3"), 3).generators()[0])


def test_gauge_must_be_flat():
    k = example_complex("sphere3")
    h = CircleCochain(BiCochain.zero(k, 1, 0), BiCochain(k, 1, 1, {(0, 1): {(0, 1): 1}}))
    with pytest.raises(NotACocycle):
        apply_gauge(trivial_gerbe(k), h)


def test_pullback_along_orientation_reversal():
    k = example_complex("sphere3")
    c = cohomology_group(k, 3).generators()[0]
    swap = SimplicialMap(k, k, (1, 0, 2, 3, 4))
    g = pullback(from_class(k, c), swap)
    assert dd_class(g) == -c == pullback_class(c, swap)


def test_pullback_along_projection():
    s3, s1 = example_complex("sphere3"), example_complex("circle3")
    prod = simplicial_product(s3, s1)
    proj = SimplicialMap.projection(s3, s1, 0, prod)
    c = cohomology_group(s3, 3).generators()[0]
    g = pullback(from_class(s3, c), proj)
    validate_gerbe(g)
    pc = pullback_class(c, proj)
    assert not pc.is_zero()
    assert dd_class(g) == pc
