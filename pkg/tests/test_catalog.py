import random

import pytest

from engelkit import catalog
from engelkit.analysis import exponent, is_n_engel, nilpotency_class
from engelkit.catalog import (
    MagnusModel,
    abelianization_determinant,
    build_hom,
    hom_is_invertible,
    identity_hom,
)
from engelkit.pc import commutator, enumerate_elements, random_element
from engelkit.wire import emit_presentation, parse_presentation


def _rand(p, rng, spread=6):
    if p.is_finite:
        return random_element(p, rng)
    return p.element([rng.randint(-spread, spread) for _ in range(p.ngens)])


# -- builders ---------------------------------------------------------------------


def test_free_abelian_rank_two():
    p = catalog.build_free_nilpotent(2, 1)
    assert p.ngens == 2
    assert p.conjugate_image(1, 0) == (0, 1)


def test_free_nilpotent_bases():
    assert catalog.build("freenil:2:3").ngens == 5
    assert catalog.build("freenil:3:2").ngens == 6
    assert catalog.build("freenil:3:3").ngens == 14
    with pytest.raises(ValueError):
        catalog.build_free_nilpotent(2, 4)


def test_class3_basis_is_left_normed(groups):
    p = groups("freenil:2:3")
    a, b = p.gen(0), p.gen(1)
    c = commutator([a, b])
    assert c == p.gen(2)
    assert commutator([c, a]) == p.gen(3)
    assert commutator([c, b]) == p.gen(4)


@pytest.mark.parametrize("m,c", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_magnus_oracle(m, c):
    # products in the truncated Magnus algebra against pc multiplication
    p = catalog.build(f"freenil:{m}:{c}")
    model = MagnusModel(m, c)
    rng = random.Random(m * 10 + c)
    for _ in range(200):
        x, y = _rand(p, rng), _rand(p, rng)
        assert model.evaluate((x * y).exps) == model.evaluate(x.exps) * model.evaluate(y.exps)
        assert model.normal_form(model.evaluate(x.exps)) == x.exps


@pytest.mark.parametrize("name", ["freenil:2:3", "expquot:2:3:25", "freenil:3:2"])
def test_polynomial_arithmetic_matches_collection(name):
    fast = catalog.build(name)
    slow = parse_presentation(emit_presentation(fast), check_triples=0)
    rng = random.Random(3)
    for _ in range(500):
        e1 = fast._sample(rng, 50)
        e2 = fast._sample(rng, 50)
        assert (fast.element(e1) * fast.element(e2)).exps == (slow.element(e1) * slow.element(e2)).exps
        assert (~fast.element(e1)).exps == (~slow.element(e1)).exps


def test_hall_witt_identity(groups):
    p = catalog.build("freenil:3:3")
    rng = random.Random(4)
    for _ in range(200):
        x, y, z = (_rand(p, rng) for _ in range(3))
        t = (commutator([commutator([x, ~y]), z]).conj(y)
             * commutator([commutator([y, ~z]), x]).conj(z)
             * commutator([commutator([z, ~x]), y]).conj(x))
        assert t.is_identity()


def test_exponent_quotients():
    assert catalog.build("expquot:2:2:25").order() == 25 ** 3
    assert catalog.build("expquot:2:2:1018081").order() == 1009 ** 6
    assert catalog.build("expquot:3:2:9").ngens == 6
    for bad in ("expquot:2:3:9", "expquot:2:2:2", "expquot:2:2:125", "expquot:2:2:15"):
        with pytest.raises(ValueError):
            catalog.build(bad)


def test_burnside_groups(groups):
    assert catalog.build("burnside3:1").order() == 3
    b2 = groups("burnside3:2")
    assert b2.order() == 27 and nilpotency_class(b2) == 2 and exponent(b2) == 3
    b3 = groups("burnside3:3")
    assert b3.order() == 2187
    b4 = catalog.build("burnside3:4", verify_triples=500)
    assert b4.order() == 3 ** 14
    rng = random.Random(5)
    for _ in range(300):
        assert (random_element(b4, rng) ** 3).is_identity()
    with pytest.raises(ValueError):
        catalog.build("burnside3:5")


def test_burnside3_class_three(groups):
    assert nilpotency_class(groups("burnside3:3")) == 3


def test_classic_groups(groups):
    s3 = groups("S3")
    assert s3.order() == 6 and s3.gen(0) * s3.gen(1) != s3.gen(1) * s3.gen(0)
    w = groups("C3wrC3")
    assert w.order() == 81 and nilpotency_class(w) == 3
    assert not is_n_engel(w, 2)
    for name, order in (("Q8", 8), ("D8", 8), ("D16", 16), ("D32", 32), ("C5", 5), ("D64", 64)):
        assert catalog.build(name).order() == order
    with pytest.raises(KeyError):
        catalog.build("A5")


# -- homomorphisms ------------------------------------------------------------


def test_identity_hom(groups):
    p = groups("burnside3:3")
    phi = identity_hom(p)
    rng = random.Random(6)
    for _ in range(100):
        x = random_element(p, rng)
        assert phi(x) == x
    assert hom_is_invertible(phi)[0]


def test_swap_on_b23_is_an_involution(groups):
    b = groups("burnside3:2")
    a, c = b.gen(0), b.gen(1)
    phi = build_hom(b, b, [c, a])
    assert phi(a) == c
    assert all(phi(phi(x)) == x for x in enumerate_elements(b))


def test_free_nilpotent_transvection(groups):
    h = groups("heisenberg")
    a, b = h.gen(0), h.gen(1)
    phi = build_hom(h, h, [a, a * b])
    assert phi(commutator([a, b])) == commutator([a, a * b]) == commutator([a, b])


@pytest.mark.parametrize("name", ["burnside3:2", "burnside3:3", "heisenberg", "expquot:2:3:25", "C3wrC3"])
def test_hom_is_multiplicative(groups, name):
    p = groups(name)
    rng = random.Random(7)
    gens = catalog.defining_generators(p)
    phi = build_hom(p, p, [_rand(p, rng) for _ in gens]) if p.relatively_free else identity_hom(p)
    assert phi(p.identity()).is_identity()
    for _ in range(1000):
        x, y = _rand(p, rng), _rand(p, rng)
        assert phi(x * y) == phi(x) * phi(y)
    for rel in p.relators():
        assert catalog._evaluate(phi, rel).is_identity()


def test_relation_violation_rejected(groups):
    s3 = groups("S3")
    # the involution cannot go to an element of order 3
    with pytest.raises(ValueError):
        build_hom(s3, s3, [s3.gen(1), s3.gen(1)])


def test_invertibility_by_determinant():
    q9 = catalog.build("expquot:2:2:9")
    a, b = q9.gen(0), q9.gen(1)
    phi = build_hom(q9, q9, [a ** 3, b])
    assert abelianization_determinant(phi) % 9 == 3
    assert hom_is_invertible(phi) == (False, None)
    psi = build_hom(q9, q9, [a * b, b])
    ok, inv = hom_is_invertible(psi)
    assert ok
    rng = random.Random(8)
    for _ in range(200):
        x = random_element(q9, rng)
        assert inv(psi(x)) == x and psi(inv(x)) == x


def test_random_automorphism(groups):
    p = groups("expquot:2:2:1018081")
    phi = catalog.random_automorphism(p, random.Random(9))
    ok, inv = hom_is_invertible(phi)
    assert ok
    x = random_element(p, random.Random(10))
    assert inv(phi(x)) == x


def test_resolve_prefers_catalog_dir(tmp_path, monkeypatch):
    b = catalog.build("burnside3:2")
    doc = emit_presentation(b).replace('"label": "burnside3:2"', '"label": "from-file"')
    (tmp_path / "burnside3_2.json").write_text(doc)
    assert catalog.resolve("burnside3:2", str(tmp_path)).label == "from-file"
    monkeypatch.setenv(catalog.CATALOG_ENV, str(tmp_path))
    assert catalog.resolve("burnside3:2").label == "from-file"
    assert catalog.resolve("S3").order() == 6
