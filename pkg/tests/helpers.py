"""Random test data shared by several test modules."""

from fractions import Fraction

from gerbecalc.cech import BiCochain, restrict_global
from gerbecalc.complex import Cochain, star
from gerbecalc.deligne import DeligneCocycle
from gerbecalc.gerbe import trivial_gerbe


def rand_q(rng, num=6, den=4):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_bicochain(k, p, q, rng, density=0.6):
    values = {}
    for s in k.simplices(p):
        loc = {r: rand_q(rng) for r in star(k, s).simplices(q) if rng.random() < density}
        values[s] = loc
    return BiCochain(k, p, q, values)


def random_cochain(k, degree, rng, integral=False):
    if integral:
        return Cochain(k, degree, {s: rng.randint(-3, 3) for s in k.simplices(degree)})
    return Cochain(k, degree, {s: rand_q(rng) for s in k.simplices(degree)})


def zero_triple(k):
    return DeligneCocycle(trivial_gerbe(k), BiCochain.zero(k, 1, 1), BiCochain.zero(k, 0, 2))


def shift_curving(d, rho):
    """Same gerbe and connection, curving plus a global 2-cochain."""
    return DeligneCocycle(d.g, d.A, d.f + restrict_global(rho))


def gerbe_family(k, rng, gauges=1):
    """Trivial, generator multiples, gauged copies and flat torsion gerbes on k."""
    from gerbecalc.cohomology import cohomology_group
    from gerbecalc.gerbe import apply_gauge, flat_from_class, from_class, random_gauge

    pres = cohomology_group(k, 3)
    fam = [trivial_gerbe(k)]
    for g in pres.generators():
        if any(g.free):
            fam += [from_class(k, g), from_class(k, -1 * g), from_class(k, 2 * g)]
        else:
            fam += [from_class(k, g), flat_from_class(k, g)]
    base = list(fam)
    for g in base[:1 + gauges]:
        for _ in range(gauges):
            fam.append(apply_gauge(g, random_gauge(k, rng)))
    return fam
