from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeccr.cyclotomic import ONE, ZERO, CyclotomicScalar, cyclotomic_polynomial, euler_phi

from conftest import small_fractions

ORDERS = (1, 2, 3, 4, 6, 8, 12)


@st.composite
def scalars(draw, orders=ORDERS):
    n = draw(st.sampled_from(orders))
    k = draw(st.integers(1, 3))
    z = ZERO
    for _ in range(k):
        z = z + CyclotomicScalar.root_of_unity(n, draw(st.integers(0, n - 1))) * draw(small_fractions(3, 3))
    return z


def close(a: complex, b: complex, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol


def mobius(n: int) -> int:
    out, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


@pytest.mark.parametrize("n", range(1, 25))
def test_cyclotomic_polynomial_degree_and_roots(n):
    poly = cyclotomic_polynomial(n)
    assert len(poly) - 1 == euler_phi(n)
    z = cmath.exp(2j * cmath.pi / n)
    assert abs(sum(float(c) * z ** j for j, c in enumerate(poly))) < 1e-9


@pytest.mark.parametrize("n", range(1, 25))
def test_sum_of_primitive_roots_is_mobius(n):
    total = ZERO
    for k in range(n):
        if gcd(k, n) == 1:
            total = total + CyclotomicScalar.root_of_unity(n, k)
    assert total == mobius(n)


def test_basic_identities():
    i = CyclotomicScalar.i()
    assert i * i == -1
    z8 = CyclotomicScalar.root_of_unity(8)
    assert z8 * z8 == i
    assert CyclotomicScalar.exp_2pi_i(Fraction(1, 2)) == -1
    assert CyclotomicScalar.root_of_unity(6, 6) == ONE
    # zeta_3 + zeta_3^2 = -1
    assert CyclotomicScalar.root_of_unity(3, 1) + CyclotomicScalar.root_of_unity(3, 2) == -1


def test_modulus_exact_and_bounded():
    i = CyclotomicScalar.i()
    assert (i * 3 + 4).modulus() == (Fraction(5), True)
    v, exact = (CyclotomicScalar.rational(1) + i).modulus()
    assert not exact and v * v >= 2 and v < Fraction(1415, 1000)
    w = CyclotomicScalar.root_of_unity(5) + 1
    bound, exact = w.modulus()
    assert not exact and bound >= abs(w.to_complex())


@given(scalars(), scalars(), scalars())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == ZERO


@given(scalars(), scalars())
def test_matches_complex_arithmetic(a, b):
    assert close((a * b).to_complex(), a.to_complex() * b.to_complex())
    assert close((a + b).to_complex(), a.to_complex() + b.to_complex())
    assert close(a.conj().to_complex(), a.to_complex().conjugate())
    assert close(a.abs_squared().to_complex(), abs(a.to_complex()) ** 2)


@given(scalars())
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
        return
    assert a * a.inverse() == ONE
    assert close((ONE / a).to_complex(), 1 / a.to_complex())


@given(scalars(orders=(8, 12)), scalars(orders=(8, 12)), st.sampled_from((5, 7, 11)))
def test_galois_is_a_ring_map(a, b, k):
    assert (a * b).galois(k) == a.galois(k) * b.galois(k)
    assert (a + b).galois(k) == a.galois(k) + b.galois(k)


@given(scalars())
def test_modulus_certificate(a):
    v, exact = a.modulus()
    m = abs(a.to_complex())
    if exact:
        assert close(float(v), m)
    else:
        assert float(v) >= m - 1e-12


@given(scalars())
def test_json_round_trip(a):
    assert CyclotomicScalar.from_json(a.to_json()) == a


def test_embedding_rejects_non_divisor():
    with pytest.raises(ValueError):
        CyclotomicScalar.root_of_unity(3).embed(4)


@given(scalars(orders=(3, 5, 7, 8, 12)))
def test_enclosure_contains_value(a):
    (rlo, rhi), (ilo, ihi) = a.enclosure()
    z = a.to_complex()
    assert float(rlo) <= z.real + 1e-12 and z.real - 1e-12 <= float(rhi)
    assert float(ilo) <= z.imag + 1e-12 and z.imag - 1e-12 <= float(ihi)
    assert rhi - rlo < Fraction(1, 10**25)
    lo, hi = a.modulus_bounds()
    assert lo <= hi and float(lo) <= abs(z) + 1e-12 <= float(hi) + 2e-12
