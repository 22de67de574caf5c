import random

import pytest

from stabfold.gf import (
    Field,
    FieldError,
    Poly,
    field_create,
    nth_roots,
    poly_divmod,
    poly_evaluate,
    poly_gcd,
    primitive_root_of_unity,
)


def test_field_create_prime_field():
    f = field_create(5)
    assert f.cardinality == 5
    a, b = f.scalar(3), f.scalar(4)
    assert (a + b).v == 2
    assert (a * b).v == 2
    assert (a - b).v == 4
    assert a.inverse() * a == f.one


def test_field_create_rejects_bad_input():
    with pytest.raises(FieldError):
        field_create(6)
    with pytest.raises(FieldError):
        field_create(7, 0)


def test_field_create_deterministic():
    f1 = field_create(7, 2)
    f2 = field_create(7, 2)
    assert f1 is f2
    assert f1.modulus == field_create(7, 2).modulus


def test_gf49_generator_order():
    f = field_create(7, 2)
    assert f.cardinality == 49
    g = f.primitive_element()
    assert f.element_order(g) == 48


def test_gf9_has_primitive_fourth_root():
    # 4 divides 9 - 1, so GF(9) contains an element of exact order 4
    f = field_create(3, 2)
    w = primitive_root_of_unity(f, 4)
    assert f.element_order(w) == 4


def test_field_axioms_random():
    rng = random.Random(7)
    for p, m in [(5, 1), (7, 2), (3, 3)]:
        f = field_create(p, m)
        elems = list(f.elements())
        for _ in range(40):
            a, b, c = (rng.choice(elems) for _ in range(3))
            assert a * (b + c) == a * b + a * c
            assert (a + b) + c == a + (b + c)
            assert a * b == b * a
            if a:
                assert a * a.inverse() == f.one


def test_frobenius_additive():
    rng = random.Random(11)
    for p, m in [(5, 2), (3, 3), (13, 2)]:
        f = field_create(p, m)
        elems = list(f.elements())
        for _ in range(30):
            a, b = rng.choice(elems), rng.choice(elems)
            assert (a + b).frobenius() == a.frobenius() + b.frobenius()
        # frobenius iterated m times is the identity
        a = rng.choice(elems)
        for _ in range(m):
            a = a.frobenius()
        assert a == a


def test_frobenius_order():
    f = field_create(3, 3)
    for a in f.elements():
        b = a
        for _ in range(3):
            b = b.frobenius()
        assert b == a


def brute_roots(field, a, n):
    return {x for x in field.elements() if x**n == a}


def test_nth_roots_small_cases():
    f5 = field_create(5)
    assert {x.v for x in nth_roots(f5, f5.scalar(1), 2)} == {1, 4}
    f7 = field_create(7)
    assert {x.v for x in nth_roots(f7, f7.scalar(1), 3)} == {1, 2, 4}


def test_nth_roots_gf11_frozen_scan():
    # frozen from an exhaustive scan of GF(11): x^4 = 1 has solutions {1, 10}
    f = field_create(11)
    assert {x.v for x in nth_roots(f, f.scalar(1), 4)} == {1, 10}


def test_nth_roots_against_brute_force():
    rng = random.Random(3)
    for p, m in [(5, 1), (11, 1), (3, 2), (7, 2)]:
        f = field_create(p, m)
        nonzero = [x for x in f.elements() if x]
        for n in (2, 3, 4, 6):
            a = rng.choice(nonzero)
            got = nth_roots(f, a, n)
            assert got == brute_roots(f, a, n)
            for x in got:
                assert x**n == a


def test_nth_roots_rejects_zero():
    f = field_create(5)
    with pytest.raises(FieldError):
        nth_roots(f, f.zero, 2)


def test_primitive_root_of_unity():
    f7 = field_create(7)
    w = primitive_root_of_unity(f7, 3)
    # deterministic: smallest primitive element of GF(7) is 3, and 3^2 = 2
    assert w.v == 2
    assert f7.element_order(w) == 3
    for k in range(1, 3):
        assert w**k != f7.one

    f5 = field_create(5)
    assert primitive_root_of_unity(f5, 2).v == 4
    with pytest.raises(FieldError):
        primitive_root_of_unity(f5, 3)


def test_poly_evaluate():
    f = field_create(5)
    xx = Poly(f, [f.scalar(1), f.zero, f.scalar(1)])  # x^2 + 1
    assert poly_evaluate(xx, f.scalar(2)) == f.zero
    const = Poly.const(f, 3)
    for e in f.elements():
        assert poly_evaluate(const, e).v == 3
    x = Poly.x_power(f, 1)
    for e in f.elements():
        assert poly_evaluate(x, e) == e


def test_poly_evaluate_is_ring_hom():
    rng = random.Random(5)
    f = field_create(7)
    elems = list(f.elements())

    def rand_poly():
        return Poly(f, [rng.choice(elems) for _ in range(rng.randint(0, 5))])

    for _ in range(25):
        a, b, e = rand_poly(), rand_poly(), rng.choice(elems)
        assert poly_evaluate(a * b, e) == poly_evaluate(a, e) * poly_evaluate(b, e)
        assert poly_evaluate(a + b, e) == poly_evaluate(a, e) + poly_evaluate(b, e)


def test_poly_valuation_additive():
    f = field_create(5)
    a = Poly.x_power(f, 2, 3)
    b = Poly.x_power(f, 1) + Poly.x_power(f, 4, 2)
    assert a.valuation() == 2
    assert b.valuation() == 1
    assert (a * b).valuation() == 3
    assert Poly(f, []).valuation() is None


def test_poly_divmod_and_gcd():
    f = field_create(7)
    a = Poly(f, [f.scalar(c) for c in (1, 0, 1)])  # x^2 + 1
    b = Poly(f, [f.scalar(c) for c in (1, 1)])  # x + 1
    q, r = poly_divmod(a, b)
    assert q * b + r == a
    # gcd(x^2 - 1, x - 1) = x - 1
    c = Poly(f, [f.scalar(-1), f.zero, f.scalar(1)])
    d = Poly(f, [f.scalar(-1), f.scalar(1)])
    assert poly_gcd(c, d) == d.monic()


def test_modulus_is_irreducible_by_brute_factoring():
    # degree-2 and degree-3 moduli have no roots in the prime field
    for p, m in [(3, 2), (5, 2), (7, 3)]:
        f = field_create(p, m)
        base = field_create(p)
        mod = Poly(base, [base.scalar(c) for c in f.modulus] + [base.one])
        for e in base.elements():
            assert poly_evaluate(mod, e) != base.zero
