import itertools
import random

import pytest
from scipy.stats import chisquare

from oracles import coset_table, pc_relators_as_ints, trace, ut_from_exponents, mat_mul

from engelkit import catalog
from engelkit.errors import CollectionBudgetExceeded, InfiniteGroupError, PresentationError
from engelkit.pc import (
    INFINITY,
    FreeWord,
    PcPresentation,
    collect,
    commutator,
    element_order,
    engel_commutator,
    enumerate_elements,
    growth_ball,
    growth_curve,
    random_element,
)

SMALL = ["burnside3:1", "burnside3:2", "S3", "Q8", "D8", "D16", "C5"]
PROPERTY_GROUPS = ["burnside3:2", "burnside3:3", "S3", "Q8", "D32", "C3wrC3", "heisenberg",
                   "freenil:2:3", "expquot:2:2:25", "expquot:2:3:25"]


def _random_word(p, rng, length=12):
    letters = tuple((rng.randrange(p.ngens), rng.choice((-2, -1, 1, 2))) for _ in range(length))
    return FreeWord(letters, p.ngens)


# -- worked examples -------------------------------------------------------------


def test_heisenberg_word_b_a(groups):
    h = groups("heisenberg")
    assert h.parse("b a").exps == (1, 1, -1)
    assert (h.element((0, 1, 0)) * h.element((1, 0, 0))).exps == (1, 1, -1)


def test_heisenberg_inverses_and_powers(groups):
    h = groups("heisenberg")
    assert (~h.element((1, 0, 0))).exps == (-1, 0, 0)
    assert (~h.element((1, 1, 0))).exps == (-1, -1, -1)
    assert (h.element((1, 0, 0)) ** 5).exps == (5, 0, 0)
    assert commutator([h.gen(0), h.gen(1)]).exps == (0, 0, 1)
    assert engel_commutator(h.gen(0), h.gen(1), 2).is_identity()


def test_empty_word_and_cubes(groups):
    b = groups("burnside3:2")
    assert collect(b, FreeWord((), b.ngens)).is_identity()
    assert b.parse("a a a").is_identity()
    assert all((x ** 3).is_identity() for x in enumerate_elements(b))


def test_single_commutator_and_trivial_cases(groups):
    b = groups("burnside3:2")
    x = b.element((1, 2, 0))
    assert commutator([x]) == x
    assert commutator([x, x]).is_identity()
    assert (x ** 0).is_identity()
    assert x * b.identity() == x
    assert engel_commutator(x, b.gen(1), 1) == commutator([x, b.gen(1)])


def test_d16_third_engel(groups):
    d = groups("D16")
    for g in enumerate_elements(d):
        if element_order(g) != 2:
            continue
        for x in enumerate_elements(d):
            assert engel_commutator(x, g, 3) == commutator([x, g]) ** 4


# -- element orders, enumeration, growth ------------------------------------------


def test_element_orders(groups):
    b = groups("burnside3:2")
    assert element_order(b.identity()) == 1
    assert all(element_order(x) == 3 for x in enumerate_elements(b) if not x.is_identity())
    assert element_order(groups("heisenberg").gen(0)) == INFINITY
    assert element_order(groups("heisenberg").gen(2)) == INFINITY


def test_enumeration_counts(groups):
    assert sum(1 for _ in enumerate_elements(groups("S3"))) == 6
    assert sum(1 for _ in enumerate_elements(groups("burnside3:2"))) == 27
    with pytest.raises(InfiniteGroupError):
        next(enumerate_elements(groups("heisenberg")))


def test_growth(groups):
    b = groups("burnside3:2")
    gens = [b.gen(0), b.gen(1)]
    assert growth_ball(b, gens, 0)[0] == 1
    assert growth_ball(b, gens, 1)[0] == 5
    sizes, _ = growth_curve(b, gens, 8)
    assert all(s <= t for s, t in zip(sizes, sizes[1:]))
    assert sizes[-1] == 27
    h = groups("heisenberg")
    hs, _ = growth_curve(h, [h.gen(0), h.gen(1)], 6)
    assert all(s < t for s, t in zip(hs, hs[1:]))


def test_random_element_uniform_and_reproducible(groups):
    b = groups("burnside3:2")
    rng = random.Random(5)
    counts = {}
    for _ in range(100_000):
        x = random_element(b, rng)
        counts[x] = counts.get(x, 0) + 1
    assert len(counts) == 27
    assert chisquare(list(counts.values())).pvalue > 0.01
    a = [random_element(b, random.Random(9)).exps for _ in range(3)]
    assert len(set(a)) == 1
    trivial = PcPresentation([], label="trivial")
    assert random_element(trivial, rng).is_identity()
    assert trivial.order() == 1


# -- properties per catalog group -------------------------------------------------


@pytest.mark.parametrize("name", PROPERTY_GROUPS)
def test_collection_homomorphism_and_idempotence(groups, name):
    p = groups(name)
    rng = random.Random(hash(name) % 1000)
    for _ in range(1000):
        w1, w2 = _random_word(p, rng), _random_word(p, rng)
        x, y = collect(p, w1), collect(p, w2)
        assert collect(p, w1 + w2) == x * y
        assert collect(p, x.word()) == x


@pytest.mark.parametrize("name", PROPERTY_GROUPS)
def test_associativity(groups, name):
    p = groups(name)
    rng = random.Random(11)
    for _ in range(10_000 if p.ngens <= 6 else 2_000):
        x, y, z = (p.element(p._sample(rng, 8)) for _ in range(3))
        assert (x * y) * z == x * (y * z)


@pytest.mark.parametrize("name", SMALL)
def test_cayley_table_matches_coset_enumeration(groups, name):
    # the regular representation from Todd-Coxeter on the pc relators
    p = groups(name)
    table = coset_table(p.ngens, pc_relators_as_ints(p))
    assert len(table) == p.order()
    els = list(enumerate_elements(p))
    coset = {x: trace(table, 0, x.word().letters) for x in els}
    assert len(set(coset.values())) == len(els)
    for x in els:
        for y in els:
            assert coset[x * y] == trace(table, coset[x], y.word().letters)


def test_heisenberg_matrix_products(groups):
    h = groups("heisenberg")
    rng = random.Random(12)
    for _ in range(2000):
        x = h.element([rng.randint(-30, 30) for _ in range(3)])
        y = h.element([rng.randint(-30, 30) for _ in range(3)])
        assert ut_from_exponents((x * y).exps) == mat_mul(ut_from_exponents(x.exps), ut_from_exponents(y.exps))


def test_big_exponents_stay_exact(groups):
    h = groups("heisenberg")
    x = h.element((10**30, -(10**25), 7))
    assert (x ** 3) * (x ** -3) == h.identity()
    assert (x * ~x).is_identity()


# -- presentations ----------------------------------------------------------------


def test_inverse_tails_are_collected_inverses(groups):
    p = groups("C3wrC3")
    for i in range(p.ngens):
        for j in range(i + 1, p.ngens):
            gi, gj = p.gen(i), p.gen(j)
            assert gj.conj(gi).exps == p.conjugate_image(j, i)
            assert gj.conj(~gi) == gi * gj * ~gi


def test_descending_tail_rejected():
    with pytest.raises(PresentationError):
        PcPresentation([3, 3], conjugates={(1, 0): (1, 1)})


def test_inconsistent_presentation_rejected():
    # g2^g1 = g2^2 with g1 of order 2 and g2 of order 5 is inconsistent
    # (conjugating twice gives g2^4, not g2)
    with pytest.raises(PresentationError):
        PcPresentation([2, 5], conjugates={(1, 0): (0, 2)}, check_triples=200)


def test_free_abelian_presentation():
    p = PcPresentation([None, None])
    x, y = p.gen(0), p.gen(1)
    assert x * y == y * x
    assert p.relators() == [FreeWord(((0, -1), (1, 1), (0, 1), (1, -1)), 2)]


def test_collection_budget():
    p = catalog.build("freenil:2:3")
    w = FreeWord(tuple((k % 2, 1 if k % 3 else -1) for k in range(400)), p.ngens)
    with pytest.raises(CollectionBudgetExceeded):
        collect(p, w, budget=5)


def test_parse_forms(groups):
    b = groups("burnside3:3")
    assert b.parse("ab^2A") == b.parse("a b b a^-1") == b.parse("g1 g2^2 g1^-1")
    with pytest.raises(ValueError):
        FreeWord.parse("g9", 3)


def test_mixed_presentations_rejected(groups):
    with pytest.raises(Exception):
        groups("S3").gen(0) * groups("Q8").gen(0)


def test_orders_of_builds(groups):
    assert groups("expquot:2:2:25").order() == 25 ** 3
    assert catalog.build("expquot:3:2:9").order() == 9 ** 6
    assert groups("burnside3:3").order() == 2187
    assert list(itertools.islice(enumerate_elements(groups("S3")), 1))[0].is_identity()
