"""Presymplectic Abelian groups inside ``Q^n``.

A group is a lattice plus a divisible subspace, ``B = span_Z(F) + span_Q(V)``,
and carries the pairing ``tau(x, y) = 2*pi * x^T S y`` with ``S`` rational
and antisymmetric. All pairings below are returned *in units of 2*pi*, so
``tau(x, y) in 2*pi*Z`` becomes "``pairing(x, y)`` is an integer".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_linear import (
    Matrix,
    annihilator,
    as_fraction,
    common_denominator,
    integer_kernel_basis,
    integral_preimage_lattice,
    lattice_basis,
    rational_kernel,
    rref,
    solve,
)


class MorphismError(ValueError):
    """A matrix fails to define a morphism of presymplectic groups."""


class NotQuotientableError(ValueError):
    """The subgroup cannot be divided out of the presymplectic group."""


def _vec(x) -> tuple:
    return tuple(as_fraction(v) for v in x)


def _reduce(x: Sequence[Fraction], rows: list, pivots: list) -> list:
    x = list(x)
    for row, p in zip(rows, pivots):
        if x[p]:
            c = x[p]
            x = [a - c * b for a, b in zip(x, row)]
    return x


@dataclass(frozen=True)
class MixedGroup:
    """``span_Z(free_gens) + span_Q(divisible_gens)`` in normal form.

    The divisible part is stored as its reduced echelon basis. Lattice
    generators are reduced modulo that subspace and Hermite-normalized, so
    two presentations of the same group compare equal.
    """

    ambient_dim: int
    free_gens: Matrix
    divisible_gens: Matrix

    def __post_init__(self):
        n = self.ambient_dim
        F, V = self.free_gens, self.divisible_gens
        if F.rows != n or V.rows != n:
            raise ValueError("generators live in the wrong ambient space")
        rows, pivots = rref(V.T) if V.cols else ([], [])
        free = [_reduce(v, rows, pivots) for v in F.columns()]
        free = lattice_basis(free, n)
        object.__setattr__(self, "free_gens", Matrix.from_columns(free, n))
        object.__setattr__(self, "divisible_gens", Matrix.from_columns(rows, n))
        object.__setattr__(self, "_pivots", tuple(pivots))
        object.__setattr__(self, "_free_cols", tuple(
            (next(i for i, a in enumerate(g) if a), g) for g in self.free_gens.columns()
        ))

    @classmethod
    def from_generators(cls, n: int, free=(), divisible=()) -> MixedGroup:
        return cls(n, Matrix.from_columns([_vec(v) for v in free], n),
                   Matrix.from_columns([_vec(v) for v in divisible], n))

    @classmethod
    def lattice(cls, n: int) -> MixedGroup:
        return cls(n, Matrix.identity(n), Matrix.zeros(n, 0))

    @classmethod
    def rational(cls, n: int) -> MixedGroup:
        return cls(n, Matrix.zeros(n, 0), Matrix.identity(n))

    @classmethod
    def trivial(cls, n: int) -> MixedGroup:
        return cls(n, Matrix.zeros(n, 0), Matrix.zeros(n, 0))

    @property
    def free_rank(self) -> int:
        return self.free_gens.cols

    @property
    def divisible_rank(self) -> int:
        return self.divisible_gens.cols

    def is_trivial(self) -> bool:
        return not self.free_rank and not self.divisible_rank

    def generators(self) -> list[tuple]:
        """Free generators followed by divisible ones."""
        return self.free_gens.columns() + self.divisible_gens.columns()

    def _reduce(self, x) -> list:
        return _reduce(_vec(x), [self.divisible_gens.col(j) for j in range(self.divisible_rank)], self._pivots)

    def contains(self, x) -> bool:
        x = self._reduce(x)
        for p, g in self._free_cols:
            c = x[p] / g[p]
            if c.denominator != 1:
                return False
            if c:
                x = [a - c * b for a, b in zip(x, g)]
        return not any(x)

    def in_divisible_part(self, x) -> bool:
        return not any(self._reduce(x))

    def is_subgroup_of(self, other: MixedGroup) -> bool:
        return all(other.contains(g) for g in self.free_gens.columns()) and all(
            other.in_divisible_part(v) for v in self.divisible_gens.columns()
        )

    def span_dimension(self) -> int:
        gens = self.generators()
        return len(rref(Matrix.from_rows(gens, self.ambient_dim))[1]) if gens else 0

    def to_json(self) -> dict:
        from .exact_linear import format_rational as fr

        return {
            "ambient_dim": self.ambient_dim,
            "free_gens": [[fr(a) for a in g] for g in self.free_gens.columns()],
            "divisible_gens": [[fr(a) for a in g] for g in self.divisible_gens.columns()],
        }


def membership(x, B: MixedGroup) -> bool:
    if len(x) != B.ambient_dim:
        raise ValueError("vector dimension does not match the ambient space")
    return B.contains(x)


@dataclass(frozen=True)
class PresymplecticGroup:
    group: MixedGroup
    S: Matrix

    def __post_init__(self):
        n = self.group.ambient_dim
        if self.S.shape != (n, n):
            raise ValueError(f"pairing matrix must be {n}x{n}")
        if self.S.T != -self.S:
            raise ValueError("pairing matrix is not antisymmetric")

    @property
    def ambient_dim(self) -> int:
        return self.group.ambient_dim

    def pairing(self, x, y) -> Fraction:
        """``tau(x, y) / (2*pi)``."""
        x, y = _vec(x), _vec(y)
        return sum((a * b for a, b in zip(x, self.S.apply(y)) if a), Fraction(0))

    def contains(self, x) -> bool:
        return self.group.contains(x)

    def to_json(self) -> dict:
        d = self.group.to_json()
        d["S"] = self.S.to_json()
        return d


@dataclass(frozen=True)
class PAGMorphism:
    """Group homomorphism ``x -> T x`` preserving the pairings."""

    source: PresymplecticGroup
    target: PresymplecticGroup
    T: Matrix

    def __call__(self, x) -> tuple:
        return self.T.apply(_vec(x))

    def compose(self, after: PAGMorphism) -> PAGMorphism:
        """``after o self``."""
        if after.source != self.target:
            raise MorphismError("morphisms are not composable")
        return PAGMorphism(self.source, after.target, after.T @ self.T)


def identity(B: PresymplecticGroup) -> PAGMorphism:
    return PAGMorphism(B, B, Matrix.identity(B.ambient_dim))


# ----------------------------------------------------------------------
# Constrained subgroups
# ----------------------------------------------------------------------


def constrained_subgroup(B: MixedGroup, equalities=(), integralities=()) -> MixedGroup:
    """``{x in B : e(x) = 0 for e in equalities, g(x) in Z for g in integralities}``.

    Functionals are row vectors. First the equalities are solved over the
    parametrisation ``x = F a + V q`` (``a`` integral, ``q`` rational); then
    the integrality conditions cut a lattice out of what remains.
    """
    n = B.ambient_dim
    F, V = B.free_gens, B.divisible_gens
    if equalities:
        E = Matrix.from_rows([_vec(e) for e in equalities], n)
        EF, EV = E @ F, E @ V
        div = [V.apply(k) for k in rational_kernel(EV).columns()]
        R = annihilator(EV.columns(), E.rows)  # rows killing im(EV)
        cond = R @ EF
        d = common_denominator(cond.entries)
        lam = integer_kernel_basis(cond.scale(d))
        free = []
        for a in lam.columns():
            q = solve(EV, [-x for x in EF.apply(a)]) if EV.cols else ()
            assert q is not None
            x = F.apply(a)
            if EV.cols:
                x = tuple(s + t for s, t in zip(x, V.apply(q)))
            free.append(x)
        B = MixedGroup.from_generators(n, free, div)
        F, V = B.free_gens, B.divisible_gens
    if not integralities:
        return B
    G = Matrix.from_rows([_vec(g) for g in integralities], n)
    A, Bm = G @ F, G @ V
    div = [V.apply(k) for k in rational_kernel(Bm).columns()]
    _, pivots = rref(Bm)
    Gp = Matrix.from_columns([Bm.col(p) for p in pivots], G.rows)
    W = Matrix.from_columns(
        [[Fraction(int(i == p)) for i in range(V.cols)] for p in pivots], V.cols
    )
    if pivots:
        # left inverse of the full-column-rank block bounds denominators of s
        left = _left_inverse(Gp)
        N = common_denominator(A.entries) * common_denominator(left.entries)
    else:
        N = 1
    f, r = F.cols, len(pivots)
    L = Matrix.diagonal([1] * f + [Fraction(1, N)] * r)
    M = A.hstack(Gp)
    sol = integral_preimage_lattice(M, L)
    VW = V @ W
    free = []
    for col in sol.columns():
        b, s = col[:f], col[f:]
        x = F.apply(b) if f else (Fraction(0),) * n
        if r:
            x = tuple(u + v for u, v in zip(x, VW.apply(s)))
        free.append(x)
    return MixedGroup.from_generators(n, free, div)


def _left_inverse(G: Matrix) -> Matrix:
    from .exact_linear import inverse

    Gt = G.T
    return inverse(Gt @ G) @ Gt


def radical(B: PresymplecticGroup) -> MixedGroup:
    S = B.S
    rows = [S.T.apply(g) for g in B.group.generators()]  # g^T S as a row
    return constrained_subgroup(B.group, equalities=[r for r in rows if any(r)])


def center(B: PresymplecticGroup) -> MixedGroup:
    S = B.S
    eq = [S.T.apply(v) for v in B.group.divisible_gens.columns()]
    integ = [S.T.apply(g) for g in B.group.free_gens.columns()]
    return constrained_subgroup(
        B.group, equalities=[r for r in eq if any(r)], integralities=[r for r in integ if any(r)]
    )


def quotient(B: PresymplecticGroup, Q: MixedGroup) -> tuple[PresymplecticGroup, PAGMorphism]:
    target, proj, _ = quotient_with_section(B, Q)
    return target, proj


def quotient_with_section(B: PresymplecticGroup, Q: MixedGroup):
    """``B / Q`` with the induced pairing and the projection morphism.

    Requires ``Q`` inside the radical of ``B``. The quotient is realised as
    a subgroup of ``Q^(n - dim span Q)`` by dropping the pivot coordinates of
    ``span_Q(Q)``, which needs ``B`` and ``span_Q(Q)`` to meet exactly in
    ``Q``; otherwise the quotient has torsion and cannot be represented.
    """
    n = B.ambient_dim
    if Q.ambient_dim != n:
        raise ValueError("subgroup lives in a different ambient space")
    if not Q.is_subgroup_of(B.group):
        raise NotQuotientableError("not quotientable: subgroup is not contained in the group")
    rad = radical(B)
    if not Q.is_subgroup_of(rad):
        bad = (
            [g for g in Q.free_gens.columns() if not rad.contains(g)]
            + [v for v in Q.divisible_gens.columns() if not rad.in_divisible_part(v)]
        )[0]
        raise NotQuotientableError(
            f"not quotientable: generator {[str(x) for x in bad]} is not in the radical"
        )
    gens = Q.generators()
    rows, pivots = rref(Matrix.from_rows(gens, n)) if gens else ([], [])
    if gens:
        ann = annihilator(gens, n).to_rows()
        hit = constrained_subgroup(B.group, equalities=[r for r in ann if any(r)])
    else:
        hit = Q
    if hit != Q:
        raise NotQuotientableError(
            "not quotientable: quotient would have torsion (subgroup is not saturated)"
        )
    keep = [j for j in range(n) if j not in pivots]
    proj_rows = []
    for j in keep:
        # coordinate j of x reduced modulo span(Q)
        r = [Fraction(int(i == j)) for i in range(n)]
        for row, p in zip(rows, pivots):
            r[p] -= row[j]
        proj_rows.append(r)
    P = Matrix.from_rows(proj_rows, n)
    m = len(keep)
    group = MixedGroup(m, P @ B.group.free_gens, P @ B.group.divisible_gens)
    S2 = B.S.submatrix(keep, keep)
    target = PresymplecticGroup(group, S2)
    section = Matrix.from_columns(
        [[Fraction(int(i == j)) for i in range(n)] for j in keep], n
    )
    return target, PAGMorphism(B, target, P), section


def validate_morphism(T: Matrix, B1: PresymplecticGroup, B2: PresymplecticGroup) -> PAGMorphism:
    if T.shape != (B2.ambient_dim, B1.ambient_dim):
        raise MorphismError(
            f"not a group map into target: matrix shape {T.shape}, expected "
            f"{(B2.ambient_dim, B1.ambient_dim)}"
        )
    for g in B1.group.free_gens.columns():
        if not B2.group.contains(T.apply(g)):
            raise MorphismError(f"not a group map into target: image of generator {_show(g)}")
    for v in B1.group.divisible_gens.columns():
        if not B2.group.in_divisible_part(T.apply(v)):
            raise MorphismError(f"not a group map into target: image of divisible generator {_show(v)}")
    gens = B1.group.generators()
    D = T.T @ B2.S @ T - B1.S
    for i, g in enumerate(gens):
        Dg = D.apply(g)
        for h in gens[i + 1:]:
            if sum((a * b for a, b in zip(h, Dg)), Fraction(0)):
                raise MorphismError(f"does not preserve tau on generator pair ({_show(g)}, {_show(h)})")
    return PAGMorphism(B1, B2, T)


def _show(v) -> str:
    from .exact_linear import format_rational

    return "(" + ", ".join(format_rational(x) for x in v) + ")"


def kernel_of_morphism(phi: PAGMorphism) -> MixedGroup:
    rows = [r for r in (phi.T.row(i) for i in range(phi.T.rows)) if any(r)]
    return constrained_subgroup(phi.source.group, equalities=rows)


def is_injective(phi: PAGMorphism) -> bool:
    return kernel_of_morphism(phi).is_trivial()


def image_group(phi: PAGMorphism) -> MixedGroup:
    T = phi.T
    g = phi.source.group
    return MixedGroup(T.rows, T @ g.free_gens, T @ g.divisible_gens)
