from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeccr.cech import SimplicialMap, SpaceModel, SpaceMorphism, circle, disjoint_union, formal_product, identity_morphism, point, pushforward_compact
from gaugeccr.exact_linear import Matrix
from gaugeccr.gauge_model import (
    GAUGE_EQUIVALENT,
    NO_OBSTRUCTION,
    BundleMorphism,
    BundleObject,
    CompatibilityError,
    Configuration,
    HKError,
    ModelError,
    ModelScopeError,
    build_observable_model,
    gauge_equivalent,
    hk_quotient,
    induced_observable_morphism,
    is_gauge_invariant,
    locality_check,
    nogo_run,
    separate_configurations,
    topological_charge,
)
from gaugeccr.library import random_bundle_morphism, random_chain, random_hk_diagram
from gaugeccr.presymplectic import center, kernel_of_morphism, radical
from gaugeccr.scenario import load_scenario
from gaugeccr.weyl_ccr import WeylElement, is_central_symbol

from conftest import small_fractions

TORUS = formal_product(circle(), circle())


def torus_object(q2=1, rho=((0, 1), (1, 0))):
    return BundleObject("torus", SpaceModel(TORUS, 3, compact_cauchy=True), Matrix.from_rows(rho), q2)


def test_minkowski_model_is_trivial():
    M = build_observable_model(BundleObject("mink", SpaceModel(point(), 4), dyn_pairs=1))
    assert (M.b1, M.c, M.s) == (0, 0, 1)
    assert M.pag.S == Matrix.from_rows([[0, 1], [-1, 0]])


def test_torus_center_condition():
    obj = BundleObject("torus", SpaceModel(TORUS, 3, compact_cauchy=True), "pd_default")
    M = build_observable_model(obj)
    assert (M.b1, M.c) == (2, 2)
    assert M.rho == Matrix.from_rows([[0, 1], [1, 0]])
    C = center(M.pag)
    # integral charges are central; AB labels must pair trivially with im(rho)
    assert C.contains(M.vector(charge=(1, -2)))
    assert not C.contains(M.vector(charge=(Fraction(1, 2), 0)))
    assert not C.contains(M.vector(ab=(1, 0), charge=(1, -2)))


def test_zero_rho_strip_pair_radical_is_charge_sector():
    M = build_observable_model(BundleObject("strips", SpaceModel(disjoint_union(point(), point()), 2)))
    assert (M.b1, M.c) == (0, 2)
    assert radical(M.pag) == M.pag.group


def test_rho_policy_errors():
    with pytest.raises(ModelError, match="compact Cauchy"):
        build_observable_model(BundleObject("t", SpaceModel(TORUS, 3), "pd_default"))
    with pytest.raises(ModelError, match="shape"):
        build_observable_model(BundleObject("t", SpaceModel(TORUS, 3), Matrix.identity(3)))
    with pytest.raises(ModelError):
        BundleObject("t", SpaceModel(TORUS, 3), q_squared=0)


def test_s_block_structure():
    obj = torus_object(q2=2, rho=((1, 2), (3, 4)))
    M = build_observable_model(obj)
    S = M.pag.S
    assert S.T == -S
    for i in M.ab_slice:
        for j in M.charge_slice:
            assert S[i, j] == obj.rho[i, j - M.b1] / 2
    for i in M.charge_slice:
        for j in M.charge_slice:
            assert S[i, j] == 0


def test_no_go_morphism_blocks():
    sc = load_scenario("thm410_m3")
    f1, f2 = sc.morphisms["f1"], sc.morphisms["f2"]
    assert f1.ab_block == Matrix.from_rows([[0], [1]])
    assert f1.charge_block == Matrix.from_rows([[0], [1]])
    phi2 = induced_observable_morphism(f2)
    assert phi2.T.rows == 0


def test_compatibility_rejected_with_generator_pair():
    sc = load_scenario("thm410_m3")
    f1 = sc.morphisms["f1"]
    wrong = BundleObject("wedge", f1.source.space, Matrix.from_rows([[1]]))
    with pytest.raises(CompatibilityError, match="AB generator 0 and charge generator 0"):
        BundleMorphism(wrong, f1.target, f1.space_map)


def test_scope_error_for_circle_collapse_in_two_dimensions():
    cyl = BundleObject("cyl", SpaceModel(circle(), 2))
    plane = BundleObject("plane", SpaceModel(point(), 2))
    f = SpaceMorphism(cyl.space, plane.space, SimplicialMap(circle(), point(), (0, 0, 0)))
    with pytest.raises(ModelScopeError):
        BundleMorphism(cyl, plane, f)


def test_locality_fixture_dimensions():
    expected = {"prop48_m2": (2, 1), "prop48_m3": (1, 0), "prop48_m4": (1, 0)}
    for name, dims in expected.items():
        sc = load_scenario(name)
        (f,) = sc.morphisms.values()
        r = locality_check(f)
        assert (r.source_dim, r.target_dim) == dims
        assert r.verdict == "NOT injective" and r.kernel_in_radical


def test_identity_is_local():
    obj = torus_object()
    f = BundleMorphism(obj, obj, identity_morphism(obj.space))
    assert induced_observable_morphism(f).T == Matrix.identity(4)
    assert locality_check(f).verdict == "injective"


def test_gauge_invariance_examples():
    assert is_gauge_invariant((0, 0))
    assert is_gauge_invariant((1, -3))
    assert not is_gauge_invariant((Fraction(1, 2), 0))
    U = Matrix.from_rows([[2, 1], [1, 1]])
    x = U.apply((1, -3))
    assert is_gauge_invariant(x, U)
    assert not is_gauge_invariant(U.apply((Fraction(1, 2), 0)), U)


def test_separation_examples():
    zero = Configuration((0,), (0, 0))
    assert separate_configurations(zero, zero) == GAUGE_EQUIVALENT
    d = separate_configurations(Configuration((0,), (Fraction(1, 3), 2)), zero)
    assert (d.kind, d.index) == ("ab", 0)
    assert d.gap(Configuration((0,), (Fraction(1, 3), 2)), zero) == Fraction(1, 3)
    a = Configuration((2,), (0, 0))
    d = separate_configurations(a, zero)
    assert (d.kind, d.index, d.weight) == ("charge", 0, Fraction(1, 4))
    assert d.gap(a, zero) == Fraction(1, 2)


@given(
    st.lists(small_fractions(3, 4), min_size=2, max_size=2),
    st.lists(small_fractions(3, 4), min_size=2, max_size=2),
    st.lists(st.integers(-2, 2), min_size=2, max_size=2),
    st.booleans(),
)
def test_separation_property(curv, hol, shift, same_curvature):
    a = Configuration(curv, hol)
    b = Configuration(curv if same_curvature else [x + 1 for x in curv], [h + s for h, s in zip(hol, shift)])
    d = separate_configurations(a, b)
    if gauge_equivalent(a, b):
        assert d == GAUGE_EQUIVALENT
    else:
        assert d.gap(a, b).denominator != 1


def test_nogo_fixtures():
    for name in ("thm410_m3", "thm410_m2"):
        sc = load_scenario(name)
        cert = nogo_run(sc.morphisms["f1"], sc.morphisms["f2"])
        assert cert.verify()
        assert cert.kernel_in_radical and not cert.image_in_radical and not cert.image_in_center
        assert cert.lam == Fraction(1, 2)
        assert cert.ideal.scalar == -2


def test_nogo_degenerate_diagram():
    obj = torus_object()
    idm = BundleMorphism(obj, obj, identity_morphism(obj.space))
    assert nogo_run(idm, idm) == NO_OBSTRUCTION


def test_topological_charges_depend_on_charge_constant():
    M1 = build_observable_model(torus_object(q2=1))
    M2 = build_observable_model(torus_object(q2=2))
    assert is_central_symbol(M1.pag, topological_charge(M1, 1).terms[0][0])
    assert not is_central_symbol(M2.pag, topological_charge(M2, 1).terms[0][0])
    W0, W1 = topological_charge(M1, 0), topological_charge(M1, 1)
    assert W0 * W1 == WeylElement.symbol(M1.pag, M1.charge_vector((1, 1)))
    with pytest.raises(IndexError):
        topological_charge(M1, 2)


def test_hk_minkowski_fixture():
    sc = load_scenario("hk_minkowski")
    legs = {}
    others = []
    for f in sc.morphisms.values():
        if f.target.name == sc.terminal:
            legs[f.source.name] = f
        else:
            others.append(f)
    report = hk_quotient(sc.objects, legs, others, sc.terminal)
    assert report.verify() and report.all_injective
    kernels = {e.name: e.kernel for e in report.objects}
    M = build_observable_model(sc.objects["cone_complement"])
    assert kernels["cone_complement"].divisible_rank == M.c == 1
    assert kernels[sc.terminal].is_trivial()


def test_hk_rejects_non_commuting_triangle():
    two = SpaceModel(disjoint_union(point(), point()), 3)
    pt = SpaceModel(point(), 3)
    T, X, Y = BundleObject("T", two), BundleObject("X", pt), BundleObject("Y", pt)
    to = lambda src, v: BundleMorphism(src, T, SpaceMorphism(pt, two, SimplicialMap(point(), two.body, (v,))))
    xy = BundleMorphism(X, Y, identity_morphism(pt))
    objects = {"T": T, "X": X, "Y": Y}
    assert hk_quotient(objects, {"X": to(X, 0), "Y": to(Y, 0)}, [xy], "T").all_injective
    with pytest.raises(HKError, match="does not commute"):
        hk_quotient(objects, {"X": to(X, 0), "Y": to(Y, 1)}, [xy], "T")
    with pytest.raises(HKError, match="no morphism to the terminal"):
        hk_quotient(objects, {"X": to(X, 0)}, [xy], "T")


@given(st.integers(0, 10**6))
def test_kernel_in_radical_and_naturality(seed):
    f = random_bundle_morphism(random.Random(seed))
    phi = induced_observable_morphism(f)
    assert kernel_of_morphism(phi).is_subgroup_of(radical(phi.source))
    M = build_observable_model(f.source)
    C = phi.T.submatrix(
        list(build_observable_model(f.target).charge_slice), list(M.charge_slice)
    )
    assert C == pushforward_compact(f.space_map, 2).matrix
    assert locality_check(f).criterion_agrees


@given(st.integers(0, 10**6), st.sampled_from((2, 3, 4)))
def test_functoriality_of_induced_morphisms(seed, m):
    f, g = random_chain(random.Random(seed), m, 2)
    assert induced_observable_morphism(f.compose(g)).T == induced_observable_morphism(g).T @ induced_observable_morphism(f).T


@given(st.integers(0, 10**6))
def test_connected_two_dimensional_locality(seed):
    f = random_bundle_morphism(random.Random(seed), 2, connected=True)
    assert locality_check(f).verdict == "injective"


@given(st.integers(0, 10**6))
def test_random_hk_diagrams(seed):
    report = hk_quotient(*random_hk_diagram(random.Random(seed)))
    assert report.verify() and report.all_injective and report.all_kernels_radical
