from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeccr.cyclotomic import ONE, CyclotomicScalar
from gaugeccr.exact_linear import Matrix
from gaugeccr.gauge_model import induced_observable_morphism
from gaugeccr.library import random_chain, random_weyl_element, random_weyl_group
from gaugeccr.presymplectic import MixedGroup, PresymplecticGroup, identity, validate_morphism
from gaugeccr.weyl_ccr import (
    ApproxWeylElement,
    WeylElement,
    WeylError,
    banach_norm,
    banach_norm_certified,
    ccr_push,
    commutator_check,
    ideal_unit_certificate,
    is_central_symbol,
    state_norm_bound_holds,
    sum_abs_squared,
    trivial_state_eval,
    weyl_phase,
    weyl_star,
)

I = CyclotomicScalar.i()


def lattice_group(S_rows):
    S = Matrix.from_rows(S_rows)
    return PresymplecticGroup(MixedGroup.lattice(S.rows), S)


Z2_HALF = lattice_group([[0, Fraction(1, 2)], [Fraction(-1, 2), 0]])
Z2_QUARTER = lattice_group([[0, Fraction(1, 4)], [Fraction(-1, 4), 0]])


def W(B, b, c=1):
    return WeylElement.symbol(B, b, c)


def test_weyl_phase_values():
    assert weyl_phase(Fraction(1, 2)) == -I
    assert weyl_phase(1) == -1
    assert weyl_phase(0) == ONE


def test_product_phases():
    # pairing 1/2 in units of 2*pi, so tau = pi and the phase is exp(-i pi/2)
    assert W(Z2_HALF, (1, 0)) * W(Z2_HALF, (0, 1)) == W(Z2_HALF, (1, 1), -I)
    assert W(Z2_HALF, (1, 0)) * W(Z2_HALF, (-1, 0)) == WeylElement.unit(Z2_HALF)


def test_star_examples():
    a = W(Z2_HALF, (1, 0), 2 + I)
    assert weyl_star(a) == W(Z2_HALF, (-1, 0), 2 - I)
    b, c = W(Z2_HALF, (1, 0)), W(Z2_HALF, (0, 1))
    assert weyl_star(b * c) == weyl_star(c) * weyl_star(b)


def test_norm_and_state_examples():
    b, c = W(Z2_HALF, (1, 0)), W(Z2_HALF, (0, 1))
    assert banach_norm(b) == 1
    assert banach_norm(b * 2 - c * (I * 3)) == 5
    s = b + c
    assert banach_norm(s * s) <= 4
    assert trivial_state_eval(b) == 0
    assert trivial_state_eval(WeylElement.unit(Z2_HALF)) == 1
    assert trivial_state_eval(weyl_star(s) * s) == 2
    assert state_norm_bound_holds(s) is True
    collided = WeylElement.from_terms(Z2_HALF, [((1, 0), 1), ((1, 0), CyclotomicScalar.root_of_unity(8))])
    assert state_norm_bound_holds(collided) is True


def test_membership_enforced():
    with pytest.raises(WeylError):
        W(Z2_HALF, (Fraction(1, 2), 0))


def test_centrality_examples():
    assert is_central_symbol(Z2_HALF, (0, 0))
    assert is_central_symbol(Z2_HALF, (2, 0))
    assert not is_central_symbol(Z2_HALF, (1, 0))


def test_push_kills_kernel_difference():
    flat = PresymplecticGroup(MixedGroup.lattice(1), Matrix.zeros(1, 1))
    phi = validate_morphism(Matrix.zeros(1, 1), flat, flat)
    a = W(flat, (3,)) - WeylElement.unit(flat)
    assert ccr_push(phi, a) == WeylElement.zero(flat)
    assert ccr_push(identity(flat), a) == a


def test_ideal_certificate_scalars():
    cert = ideal_unit_certificate(Z2_HALF, (1, 0), (0, 1))
    assert cert.verify() and cert.scalar == -2
    cert = ideal_unit_certificate(Z2_QUARTER, (1, 0), (0, 1))
    assert cert.verify() and cert.scalar == -1 - I
    with pytest.raises(WeylError, match="commute"):
        ideal_unit_certificate(Z2_HALF, (2, 0), (0, 1))


def test_tampered_certificate_fails():
    cert = ideal_unit_certificate(Z2_HALF, (1, 0), (0, 1))
    forged = type(cert)(
        group=cert.group, phi=cert.phi, psi=cert.psi, pairing=cert.pairing,
        generator=cert.generator, steps=cert.steps, final=cert.final, scalar=cert.scalar * 2,
    )
    assert not forged.verify()


@given(st.integers(0, 10**6))
def test_associativity_and_unit(seed):
    rng = random.Random(seed)
    B = random_weyl_group(rng)
    a, b, c = (random_weyl_element(rng, B) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    one = WeylElement.unit(B)
    assert one * a == a == a * one


@given(st.integers(0, 10**6))
def test_star_involution_and_antimultiplicative(seed):
    rng = random.Random(seed)
    B = random_weyl_group(rng)
    a, b = random_weyl_element(rng, B), random_weyl_element(rng, B)
    assert weyl_star(weyl_star(a)) == a
    assert weyl_star(a * b) == weyl_star(b) * weyl_star(a)


@given(st.integers(0, 10**6))
def test_unitarity_of_generators(seed):
    B = random_weyl_group(random.Random(seed))
    for g in B.group.free_gens.columns():
        Wg = W(B, g)
        assert weyl_star(Wg) * Wg == WeylElement.unit(B)


@given(st.integers(0, 10**6))
def test_state_faithfulness_and_norm_bound(seed):
    rng = random.Random(seed)
    B = random_weyl_group(rng)
    a = random_weyl_element(rng, B)
    w = trivial_state_eval(weyl_star(a) * a)
    assert w == sum_abs_squared(a)
    assert state_norm_bound_holds(a) is True
    (lo, hi), _ = w.enclosure()
    norm, _ = banach_norm_certified(a)
    assert hi <= norm * norm + Fraction(1, 10**20)


@given(st.integers(0, 10**6))
def test_centrality_two_ways(seed):
    rng = random.Random(seed)
    B = random_weyl_group(rng)
    from gaugeccr.library import random_group_element

    b = random_group_element(rng, B)
    assert is_central_symbol(B, b) == commutator_check(B, b)


@given(st.integers(0, 10**6))
def test_ccr_functor(seed):
    rng = random.Random(seed)
    f, g = random_chain(rng, rng.choice((2, 3, 4)), 2)
    phi, psi = induced_observable_morphism(f), induced_observable_morphism(g)
    both = induced_observable_morphism(f.compose(g))
    assert both.T == psi.T @ phi.T
    a, b = random_weyl_element(rng, phi.source), random_weyl_element(rng, phi.source)
    assert ccr_push(both, a) == ccr_push(psi, ccr_push(phi, a))
    assert ccr_push(phi, a * b) == ccr_push(phi, a) * ccr_push(phi, b)
    assert ccr_push(phi, weyl_star(a)) == weyl_star(ccr_push(phi, a))


@given(st.integers(0, 10**6))
def test_json_round_trip(seed):
    rng = random.Random(seed)
    B = random_weyl_group(rng)
    a = random_weyl_element(rng, B)
    assert WeylElement.from_json(B, a.to_json()) == a


def test_float_backend_tracks_exact_product():
    rng = random.Random(7)
    B = random_weyl_group(rng, 3)
    a, b = random_weyl_element(rng, B), random_weyl_element(rng, B)
    approx = ApproxWeylElement.from_exact(a) * ApproxWeylElement.from_exact(b)
    assert approx.close_to(a * b)
