from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeccr.exact_linear import Matrix
from gaugeccr.library import random_presymplectic_group
from gaugeccr.presymplectic import (
    MixedGroup,
    MorphismError,
    NotQuotientableError,
    PresymplecticGroup,
    center,
    identity,
    image_group,
    is_injective,
    kernel_of_morphism,
    membership,
    quotient,
    quotient_with_section,
    radical,
    validate_morphism,
)

from oracles import DefinitionOracle, window_points

HALF = Fraction(1, 2)
S_HALF = Matrix.from_rows([[0, HALF], [-HALF, 0]])


def pag(free, div, S, n=None):
    n = n or S.rows
    return PresymplecticGroup(MixedGroup.from_generators(n, free, div), S)


def test_membership_examples():
    Z2 = MixedGroup.lattice(2)
    assert membership((1, 0), Z2)
    assert not membership((HALF, 0), Z2)
    mixed = MixedGroup.from_generators(2, [(1, 0)], [(1, 0)])
    assert membership((HALF, 0), mixed)
    with pytest.raises(ValueError):
        membership((1,), Z2)


def test_normal_form_is_canonical():
    a = MixedGroup.from_generators(2, [(1, 1), (0, 2)], [])
    b = MixedGroup.from_generators(2, [(1, -1), (1, 1), (2, 0)], [])
    assert a == b
    c = MixedGroup.from_generators(2, [(1, 5)], [(0, 3)])
    assert c == MixedGroup.from_generators(2, [(1, 0)], [(0, 1)])


def test_radical_examples():
    Z3 = MixedGroup.lattice(3)
    assert radical(PresymplecticGroup(Z3, Matrix.zeros(3, 3))) == Z3
    assert radical(pag([(1, 0), (0, 1)], [], S_HALF)).is_trivial()
    S3 = Matrix.from_rows([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    assert radical(PresymplecticGroup(Z3, S3)).contains((0, 0, 1))


def test_center_examples():
    B = pag([(1, 0), (0, 1)], [], S_HALF)
    assert center(B) == MixedGroup.from_generators(2, [(2, 0), (0, 2)])
    assert center(PresymplecticGroup(MixedGroup.rational(2), S_HALF)).is_trivial()
    Sint = Matrix.from_rows([[0, 3], [-3, 0]])
    assert center(PresymplecticGroup(MixedGroup.lattice(2), Sint)) == MixedGroup.lattice(2)


def test_quotient_examples():
    S3 = Matrix.from_rows([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    B = PresymplecticGroup(MixedGroup.lattice(3), S3)
    Q = MixedGroup.from_generators(3, [(0, 0, 1)])
    target, proj = quotient(B, Q)
    assert target.group == MixedGroup.lattice(2)
    assert target.S == Matrix.from_rows([[0, 1], [-1, 0]])
    assert kernel_of_morphism(proj) == Q
    same, p = quotient(B, MixedGroup.trivial(3))
    assert same.group == B.group and is_injective(p)
    with pytest.raises(NotQuotientableError, match="not in the radical"):
        quotient(pag([(1, 0), (0, 1)], [], S_HALF), MixedGroup.from_generators(2, [(1, 0)]))


def test_quotient_rejects_non_saturated_subgroup():
    B = PresymplecticGroup(MixedGroup.lattice(1), Matrix.zeros(1, 1))
    with pytest.raises(NotQuotientableError, match="torsion"):
        quotient(B, MixedGroup.from_generators(1, [(2,)]))


def test_validate_morphism_examples():
    B = pag([(1, 0), (0, 1)], [], S_HALF)
    assert validate_morphism(Matrix.identity(2), B, B).T == Matrix.identity(2)
    with pytest.raises(MorphismError, match="does not preserve tau"):
        validate_morphism(Matrix.diagonal([2, 2]), B, B)
    trivial = PresymplecticGroup(MixedGroup.trivial(0), Matrix.zeros(0, 0))
    flat = PresymplecticGroup(MixedGroup.lattice(2), Matrix.zeros(2, 2))
    validate_morphism(Matrix.zeros(0, 2), flat, trivial)
    with pytest.raises(MorphismError, match="not a group map"):
        validate_morphism(Matrix.diagonal([HALF, 1]), flat, flat)


def test_kernel_examples():
    flat2 = PresymplecticGroup(MixedGroup.lattice(2), Matrix.zeros(2, 2))
    flat1 = PresymplecticGroup(MixedGroup.lattice(1), Matrix.zeros(1, 1))
    phi = validate_morphism(Matrix.from_rows([[1, 1]]), flat2, flat1)
    assert kernel_of_morphism(phi) == MixedGroup.from_generators(2, [(1, -1)])
    assert kernel_of_morphism(identity(flat2)).is_trivial()
    zero = validate_morphism(Matrix.zeros(1, 2), flat2, flat1)
    assert kernel_of_morphism(zero) == flat2.group


def test_antisymmetry_enforced():
    with pytest.raises(ValueError):
        PresymplecticGroup(MixedGroup.lattice(2), Matrix.from_rows([[0, 1], [1, 0]]))


@given(st.integers(0, 10**6))
def test_center_radical_window_oracle(seed):
    B, free, div = random_presymplectic_group(random.Random(seed))
    C, R = center(B), radical(B)
    assert R.is_subgroup_of(C) and C.is_subgroup_of(B.group)
    oracle = DefinitionOracle(free, div, B.S)
    for coeffs, x in window_points(free, div, window=3):
        in_c, in_r = oracle(coeffs)
        assert C.contains(x) == in_c
        assert R.contains(x) == in_r


@given(st.integers(0, 10**6))
def test_quotient_preserves_pairing(seed):
    rng = random.Random(seed)
    B, free, div = random_presymplectic_group(rng)
    R = radical(B)
    target, proj, section = quotient_with_section(B, R)
    assert kernel_of_morphism(proj) == R
    gens = B.group.generators()

    def element():
        c = [rng.randint(-3, 3) for _ in gens]
        return tuple(sum((a * g[i] for a, g in zip(c, gens)), Fraction(0)) for i in range(B.ambient_dim))

    for _ in range(10):
        x, y = element(), element()
        assert target.pairing(proj(x), proj(y)) == B.pairing(x, y)
        assert target.contains(proj(x))


@given(st.integers(0, 10**6))
def test_composition_and_kernel_monotonicity(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    B = PresymplecticGroup(MixedGroup.lattice(n), Matrix.zeros(n, n))
    mats = [[[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)] for _ in range(2)]
    phi = validate_morphism(Matrix.from_rows(mats[0]), B, B)
    psi = validate_morphism(Matrix.from_rows(mats[1]), B, B)
    both = phi.compose(psi)
    validate_morphism(both.T, B, B)
    assert kernel_of_morphism(phi).is_subgroup_of(kernel_of_morphism(both))
    assert image_group(both).is_subgroup_of(image_group(psi))
