"""Observable groups of Abelian gauge theory on cohomological region models.

The ambient space of a model is ``Q^(b1 + c + 2s)`` ordered as

* Aharonov-Bohm sector ``Z^b1``: integral dual of the lattice ``H^1(M;Z)``,
* charge sector ``Q^c`` with ``c = dim H^2_c(M) = b_(m-2)``,
* a finite symplectic stand-in ``Q^(2s)`` for the dynamical sector.

The pairing between an AB label ``a`` and a charge label ``x`` is
``a^T rho x / q^2`` (in units of ``2*pi``), where the holonomy matrix ``rho``
records the de Rham class of the potential generated by a charge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .cech import (
    SpaceError,
    SpaceModel,
    SpaceMorphism,
    compact_support_group,
    cohomology,
    lattice_in_real,
    pushforward_compact,
)
from .exact_linear import Matrix, as_fraction, format_rational, rank, solve
from .presymplectic import (
    MixedGroup,
    PAGMorphism,
    PresymplecticGroup,
    center,
    constrained_subgroup,
    is_injective,
    kernel_of_morphism,
    quotient_with_section,
    radical,
    validate_morphism,
)
from .weyl_ccr import IdealCertificate, WeylElement, ideal_unit_certificate


class ModelError(ValueError):
    """Object data cannot be turned into an observable model."""


class CompatibilityError(ValueError):
    """A morphism violates the holonomy compatibility equation."""


class ModelScopeError(ValueError):
    """A morphism the sector model cannot represent faithfully.

    The model is only faithful when injectivity on the charge sector implies
    injectivity on the AB sector.
    """


class HKError(ValueError):
    pass


GAUGE_EQUIVALENT = "gauge-equivalent"
NO_OBSTRUCTION = "no obstruction found"


@dataclass(frozen=True)
class BundleObject:
    name: str
    space: SpaceModel
    rho: Union[Matrix, str] = "zero"
    q_squared: Fraction = Fraction(1)
    dyn_pairs: int = 0

    def __post_init__(self):
        q = as_fraction(self.q_squared)
        if q <= 0:
            raise ModelError(f"{self.name}: q_squared must be positive")
        object.__setattr__(self, "q_squared", q)
        if self.dyn_pairs < 0:
            raise ModelError(f"{self.name}: negative number of dynamical pairs")
        if isinstance(self.rho, str) and self.rho not in ("zero", "pd_default"):
            raise ModelError(f"{self.name}: unknown rho policy {self.rho!r}")

    @property
    def b1(self) -> int:
        return cohomology(self.space, 1).rank

    @property
    def charge_dim(self) -> int:
        return compact_support_group(self.space, 2).dimension


def resolve_rho(obj: BundleObject) -> Matrix:
    X = obj.space
    if not X.oriented:
        raise ModelError(f"{obj.name}: space model is not oriented")
    b1, c = obj.b1, obj.charge_dim
    if isinstance(obj.rho, Matrix):
        if obj.rho.shape != (b1, c):
            raise ModelError(f"{obj.name}: rho has shape {obj.rho.shape}, expected {(b1, c)}")
        return obj.rho
    if obj.rho == "zero":
        return Matrix.zeros(b1, c)
    # duality default: reverse the basis order inside every component
    if not X.compact_cauchy:
        raise ModelError(f"{obj.name}: pd_default needs a compact Cauchy surface")
    h1 = cohomology(X, 1).component_ranks
    hc = compact_support_group(X, 2).component_dims
    if h1 != hc:
        raise ModelError(
            f"{obj.name}: pd_default needs matching AB and charge dimensions per component, "
            f"got {list(h1)} and {list(hc)}"
        )
    e = [[0] * c for _ in range(b1)]
    off = 0
    for size in h1:
        for i in range(size):
            e[off + i][off + size - 1 - i] = 1
        off += size
    return Matrix.from_rows(e, c)


@dataclass(frozen=True)
class ObservableModel:
    obj: BundleObject
    pag: PresymplecticGroup
    rho: Matrix
    b1: int
    c: int
    s: int

    @property
    def ambient_dim(self) -> int:
        return self.b1 + self.c + 2 * self.s

    @property
    def ab_slice(self) -> range:
        return range(0, self.b1)

    @property
    def charge_slice(self) -> range:
        return range(self.b1, self.b1 + self.c)

    @property
    def dyn_slice(self) -> range:
        return range(self.b1 + self.c, self.ambient_dim)

    def vector(self, ab=(), charge=(), dyn=()) -> tuple:
        ab = list(ab) or [0] * self.b1
        charge = list(charge) or [0] * self.c
        dyn = list(dyn) or [0] * (2 * self.s)
        return tuple(as_fraction(x) for x in ab + charge + dyn)

    def charge_vector(self, x) -> tuple:
        return self.vector(charge=x)

    @property
    def rho_policy(self) -> str:
        return self.obj.rho if isinstance(self.obj.rho, str) else "explicit"

    def to_json(self) -> dict:
        return {
            "name": self.obj.name,
            "sectors": {"ab": self.b1, "charge": self.c, "dyn_pairs": self.s},
            "rho": self.rho.to_json(),
            "rho_policy": self.rho_policy,
            "q_squared": format_rational(self.obj.q_squared),
            "group": self.pag.to_json(),
        }


def build_observable_model(obj: BundleObject) -> ObservableModel:
    rho = resolve_rho(obj)
    b1, c, s = obj.b1, obj.charge_dim, obj.dyn_pairs
    n = b1 + c + 2 * s
    S = [[Fraction(0)] * n for _ in range(n)]
    for i in range(b1):
        for j in range(c):
            v = rho[i, j] / obj.q_squared
            S[i][b1 + j] = v
            S[b1 + j][i] = -v
    for k in range(s):
        p = b1 + c + 2 * k
        S[p][p + 1] = Fraction(1)
        S[p + 1][p] = Fraction(-1)
    unit = lambda i: [Fraction(int(i == j)) for j in range(n)]
    group = MixedGroup.from_generators(
        n, [unit(i) for i in range(b1)], [unit(i) for i in range(b1, n)]
    )
    return ObservableModel(obj, PresymplecticGroup(group, Matrix.from_rows(S, n)), rho, b1, c, s)


# ----------------------------------------------------------------------
# Morphisms
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BundleMorphism:
    source: BundleObject
    target: BundleObject
    space_map: SpaceMorphism
    name: str = ""

    def __post_init__(self):
        label = self.name or f"{self.source.name}->{self.target.name}"
        f = self.space_map
        if f.source != self.source.space or f.target != self.target.space:
            raise CompatibilityError(f"{label}: space map does not match the objects")
        if self.source.q_squared != self.target.q_squared:
            raise CompatibilityError(f"{label}: charge constants differ")
        if self.source.dyn_pairs or self.target.dyn_pairs:
            raise CompatibilityError(f"{label}: morphisms require objects without dynamical pairs")
        rho1, rho2 = resolve_rho(self.source), resolve_rho(self.target)
        A_pb = self.integral_h1_pullback
        C = self.charge_block
        lhs = A_pb @ rho2 @ C
        if lhs != rho1:
            i, j = next(
                (i, j) for i in range(lhs.rows) for j in range(lhs.cols) if lhs[i, j] != rho1[i, j]
            )
            raise CompatibilityError(
                f"{label}: holonomy compatibility fails for AB generator {i} and charge "
                f"generator {j} ({format_rational(lhs[i, j])} != {format_rational(rho1[i, j])})"
            )
        if rank(C) == C.cols and rank(A_pb.T) < A_pb.rows:
            raise ModelScopeError(
                f"{label}: injective on charges but not on AB labels; outside the model's scope"
            )

    @property
    def integral_h1_pullback(self) -> Matrix:
        return self.space_map.integral_pullback(1)

    @property
    def ab_block(self) -> Matrix:
        return self.integral_h1_pullback.T

    @property
    def charge_block(self) -> Matrix:
        return pushforward_compact(self.space_map, 2).matrix

    def compose(self, after: BundleMorphism) -> BundleMorphism:
        """``after o self``."""
        return BundleMorphism(self.source, after.target, self.space_map.compose(after.space_map))


def _block_diag(A: Matrix, C: Matrix) -> Matrix:
    rows = [list(A.row(i)) + [0] * C.cols for i in range(A.rows)]
    rows += [[0] * A.cols + list(C.row(i)) for i in range(C.rows)]
    return Matrix.from_rows(rows, A.cols + C.cols)


def induced_observable_morphism(f: BundleMorphism) -> PAGMorphism:
    M1, M2 = build_observable_model(f.source), build_observable_model(f.target)
    T = _block_diag(f.ab_block, f.charge_block)
    return validate_morphism(T, M1.pag, M2.pag)


@dataclass(frozen=True)
class LocalityReport:
    source_dim: int
    target_dim: int
    pushforward: Matrix
    pushforward_injective: bool
    model_injective: bool
    kernel: MixedGroup
    kernel_in_radical: bool

    @property
    def verdict(self) -> str:
        return "injective" if self.model_injective else "NOT injective"

    @property
    def criterion_agrees(self) -> bool:
        return self.pushforward_injective == self.model_injective

    def to_json(self) -> dict:
        return {
            "h2c_dims": [self.source_dim, self.target_dim],
            "pushforward": self.pushforward.to_json(),
            "pushforward_injective": self.pushforward_injective,
            "model_injective": self.model_injective,
            "criterion_agrees": self.criterion_agrees,
            "kernel": self.kernel.to_json(),
            "kernel_in_radical": self.kernel_in_radical,
            "verdict": self.verdict,
        }


def locality_check(f: BundleMorphism) -> LocalityReport:
    push = pushforward_compact(f.space_map, 2)
    phi = induced_observable_morphism(f)
    K = kernel_of_morphism(phi)
    report = LocalityReport(
        source_dim=push.matrix.cols,
        target_dim=push.matrix.rows,
        pushforward=push.matrix,
        pushforward_injective=push.is_injective,
        model_injective=K.is_trivial(),
        kernel=K,
        kernel_in_radical=K.is_subgroup_of(radical(phi.source)),
    )
    if not report.criterion_agrees:
        raise AssertionError("locality criterion disagrees with the observable model")
    return report


# ----------------------------------------------------------------------
# Gauge invariance and separation
# ----------------------------------------------------------------------


def is_gauge_invariant(coords, lattice_basis: Optional[Matrix] = None) -> bool:
    """Whether an AB label lies in the integral dual lattice.

    ``lattice_basis`` (columns) expresses the dual lattice in the coordinates
    of ``coords``; by default it is the standard lattice.
    """
    x = tuple(as_fraction(c) for c in coords)
    if lattice_basis is not None:
        x = solve(lattice_basis, x)
        if x is None:
            return False
    return all(v.denominator == 1 for v in x)


@dataclass(frozen=True)
class Configuration:
    """Gauge field data: curvature relative to a reference, and holonomies."""

    curvature: tuple
    holonomy: tuple

    def __post_init__(self):
        object.__setattr__(self, "curvature", tuple(as_fraction(x) for x in self.curvature))
        object.__setattr__(self, "holonomy", tuple(as_fraction(x) for x in self.holonomy))


def gauge_equivalent(a: Configuration, b: Configuration) -> bool:
    return a.curvature == b.curvature and all(
        (x - y).denominator == 1 for x, y in zip(a.holonomy, b.holonomy)
    )


@dataclass(frozen=True)
class SeparatingObservable:
    """``kind`` is ``"charge"`` (weight on a curvature coordinate) or ``"ab"``."""

    kind: str
    index: int
    weight: Fraction

    def pairing(self, cfg: Configuration) -> Fraction:
        src = cfg.curvature if self.kind == "charge" else cfg.holonomy
        return self.weight * src[self.index]

    def gap(self, a: Configuration, b: Configuration) -> Fraction:
        return self.pairing(a) - self.pairing(b)

    def to_json(self) -> dict:
        return {"kind": self.kind, "index": self.index, "weight": format_rational(self.weight)}


def separate_configurations(a: Configuration, b: Configuration):
    if len(a.curvature) != len(b.curvature) or len(a.holonomy) != len(b.holonomy):
        raise ValueError("configurations belong to different scenarios")
    for i, (x, y) in enumerate(zip(a.curvature, b.curvature)):
        if x != y:
            return SeparatingObservable("charge", i, 1 / (2 * (x - y)))
    for i, (x, y) in enumerate(zip(a.holonomy, b.holonomy)):
        if (x - y).denominator != 1:
            return SeparatingObservable("ab", i, Fraction(1))
    return GAUGE_EQUIVALENT


# ----------------------------------------------------------------------
# No-go diagrams
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NoGoCertificate:
    wedge: ObservableModel
    far: ObservableModel  # target of f1
    kernel: MixedGroup
    kernel_in_radical: bool
    k: tuple
    lam: Fraction
    image: tuple  # PS(f1)(lam * k)
    psi: tuple
    pairing: Fraction
    image_in_radical: bool
    image_in_center: bool
    T1: Matrix
    T2: Matrix
    ideal: IdealCertificate

    def verify(self) -> bool:
        W, F = self.wedge.pag, self.far.pag
        n = W.ambient_dim
        for g in self.kernel.generators():
            if any(self.T2.apply(g)) or not W.contains(g):
                return False
        if not self.kernel.is_subgroup_of(radical(W)):
            return False
        lk = tuple(self.lam * x for x in self.k)
        if len(lk) != n or not self.kernel.contains(lk):
            return False
        if self.T1.apply(lk) != self.image or not F.contains(self.psi):
            return False
        r = F.pairing(self.image, self.psi)
        # one non-integral pairing against a member rules out radical and center
        if r != self.pairing or r.denominator == 1:
            return False
        if radical(F).contains(self.image) or center(F).contains(self.image):
            return False
        return self.ideal.verify() and self.ideal.phi == self.image and self.ideal.psi == self.psi

    def to_json(self) -> dict:
        fr = lambda v: [format_rational(x) for x in v]
        return {
            "kernel": self.kernel.to_json(),
            "kernel_in_radical": self.kernel_in_radical,
            "k": fr(self.k),
            "lambda": format_rational(self.lam),
            "image": fr(self.image),
            "image_in_radical": self.image_in_radical,
            "image_in_center": self.image_in_center,
            "psi": fr(self.psi),
            "pairing_over_2pi": format_rational(self.pairing),
            "ideal_certificate": self.ideal.to_json(),
            "T1": self.T1.to_json(),
            "T2": self.T2.to_json(),
        }


def nogo_run(f1: BundleMorphism, f2: BundleMorphism):
    """Look for an element forced into any quotientable subfunctor that breaks it.

    ``f1`` and ``f2`` share their source (the wedge region). Elements of the
    kernel of ``PS(f2)`` must be divided out, yet their images under
    ``PS(f1)`` can fail to be radical, or even central after rescaling.
    """
    if f1.source != f2.source:
        raise ValueError("no-go diagram needs morphisms with a common source")
    phi1, phi2 = induced_observable_morphism(f1), induced_observable_morphism(f2)
    wedge, far = build_observable_model(f1.source), build_observable_model(f1.target)
    K = kernel_of_morphism(phi2)
    k_in_rad = K.is_subgroup_of(radical(wedge.pag))
    F = far.pag
    free_targets = F.group.free_gens.columns()
    div_targets = F.group.divisible_gens.columns()
    candidates = [(v, True) for v in K.divisible_gens.columns()] + [(g, False) for g in K.free_gens.columns()]
    for k, divisible in candidates:
        y = phi1.T.apply(k)
        choice = None
        if divisible:
            for g in free_targets:
                r = F.pairing(y, g)
                if r:
                    choice = (1 / (2 * abs(r)), g)
                    break
            if choice is None:
                for v in div_targets:
                    r = F.pairing(y, v)
                    if r:
                        choice = (Fraction(1), tuple(x / (2 * r) for x in v))
                        break
        else:
            for v in div_targets:
                r = F.pairing(y, v)
                if r:
                    choice = (Fraction(1), tuple(x / (2 * r) for x in v))
                    break
            if choice is None:
                for g in free_targets:
                    if F.pairing(y, g).denominator != 1:
                        choice = (Fraction(1), g)
                        break
        if choice is None:
            continue
        lam, psi = choice
        image = tuple(lam * x for x in y)
        return NoGoCertificate(
            wedge=wedge,
            far=far,
            kernel=K,
            kernel_in_radical=k_in_rad,
            k=tuple(k),
            lam=lam,
            image=image,
            psi=tuple(psi),
            pairing=F.pairing(image, psi),
            image_in_radical=radical(F).contains(image),
            image_in_center=center(F).contains(image),
            T1=phi1.T,
            T2=phi2.T,
            ideal=ideal_unit_certificate(F, image, psi),
        )
    return NO_OBSTRUCTION


# ----------------------------------------------------------------------
# Quotient by the kernel towards a terminal region
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HKObjectEntry:
    name: str
    model: ObservableModel
    kernel: MixedGroup
    kernel_in_radical: bool
    quotient: PresymplecticGroup
    projection: Matrix


@dataclass(frozen=True, eq=False)
class HKMorphismEntry:
    source: str
    target: str
    original_injective: bool
    induced: Matrix
    injective: bool


@dataclass(frozen=True, eq=False)
class HKReport:
    terminal: str
    objects: tuple
    morphisms: tuple

    @property
    def all_injective(self) -> bool:
        return all(m.injective for m in self.morphisms)

    @property
    def all_kernels_radical(self) -> bool:
        return all(o.kernel_in_radical for o in self.objects)

    def verify(self) -> bool:
        by_name = {o.name: o for o in self.objects}
        for o in self.objects:
            if not o.kernel.is_subgroup_of(radical(o.model.pag)):
                return False
            for g in o.kernel.generators():
                if any(o.projection.apply(g)):
                    return False
        for m in self.morphisms:
            try:
                phi = validate_morphism(m.induced, by_name[m.source].quotient, by_name[m.target].quotient)
            except ValueError:
                return False
            if is_injective(phi) != m.injective:
                return False
        return self.all_injective and self.all_kernels_radical

    def to_json(self) -> dict:
        return {
            "terminal": self.terminal,
            "objects": [
                {
                    "name": o.name,
                    "material_charges": o.kernel.to_json(),
                    "kernel_in_radical": o.kernel_in_radical,
                    "quotient": o.quotient.to_json(),
                    "projection": o.projection.to_json(),
                }
                for o in self.objects
            ],
            "morphisms": [
                {
                    "from": m.source,
                    "to": m.target,
                    "original_injective": m.original_injective,
                    "induced": m.induced.to_json(),
                    "injective": m.injective,
                }
                for m in self.morphisms
            ],
            "all_injective": self.all_injective,
        }


def _same_cohomology_maps(f: SpaceMorphism, g: SpaceMorphism) -> bool:
    return all(f.pullback(k) == g.pullback(k) for k in range(f.source.dim_m + 1))


def hk_quotient(objects: dict, to_terminal: dict, morphisms: list, terminal: str) -> HKReport:
    """Divide every region's observables by the kernel of its map to ``terminal``.

    ``to_terminal`` maps each non-terminal object name to its morphism into
    the terminal object; ``morphisms`` are the morphisms among objects.
    """
    if terminal not in objects:
        raise HKError(f"terminal object {terminal!r} is not declared")
    legs = dict(to_terminal)
    for name, obj in objects.items():
        if name == terminal:
            continue
        if name not in legs:
            raise HKError(f"object {name!r} has no morphism to the terminal object")
    for f in morphisms:
        src, tgt = f.source.name, f.target.name
        direct = legs.get(src)
        via = f.space_map if tgt == terminal else f.space_map.compose(legs[tgt].space_map)
        if direct is None:
            raise HKError(f"object {src!r} has no morphism to the terminal object")
        if not _same_cohomology_maps(via, direct.space_map):
            raise HKError(f"triangle {src} -> {tgt} -> {terminal} does not commute")
    entries = {}
    for name in sorted(objects):
        model = build_observable_model(objects[name])
        if name == terminal:
            K = MixedGroup.trivial(model.ambient_dim)
        else:
            K = kernel_of_morphism(induced_observable_morphism(legs[name]))
        rad = radical(model.pag)
        if not K.is_subgroup_of(rad):
            bad = next(g for g in K.generators() if not rad.contains(g))
            raise HKError(f"{name}: kernel generator {[format_rational(x) for x in bad]} is not radical")
        Q, proj, section = quotient_with_section(model.pag, K)
        entries[name] = (HKObjectEntry(name, model, K, True, Q, proj.T), section)
    mentries = []
    for f in [legs[n] for n in sorted(legs)] + list(morphisms):
        s, t = f.source.name, f.target.name
        phi = induced_observable_morphism(f)
        Tq = entries[t][0].projection @ phi.T @ entries[s][1]
        psi = validate_morphism(Tq, entries[s][0].quotient, entries[t][0].quotient)
        mentries.append(HKMorphismEntry(s, t, is_injective(phi), Tq, is_injective(psi)))
    return HKReport(
        terminal=terminal,
        objects=tuple(entries[n][0] for n in sorted(entries)),
        morphisms=tuple(mentries),
    )


def topological_charge(model: ObservableModel, k: int) -> WeylElement:
    """Weyl symbol of the k-th charge basis vector."""
    if not 0 <= k < model.c:
        raise IndexError(f"charge index {k} outside [0, {model.c})")
    x = [0] * model.c
    x[k] = 1
    return WeylElement.symbol(model.pag, model.charge_vector(x))
