"""Cohomology of finite simplicial complexes (nerves of good covers).

Cohomology bases are computed component by component and concatenated in
component order (components sorted by smallest vertex), so every basis is
block-aligned with the connected components. The rational basis is taken
to be the set of free integral generators, which makes the integral lattice
inside rational cohomology the standard one.

Compactly supported cohomology is modelled through duality: ``H^k_c`` of an
oriented ``m``-dimensional region is the dual of ``H^{m-k}``, and push-forward
along a morphism is the transpose of the pullback in the complementary degree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Optional, Union

from .exact_linear import (
    FgAbelianGroup,
    Matrix,
    integer_kernel_basis,
    rank,
    rational_rank_kernel_image,
    smith_normal_form,
    inverse,
    solve,
)


class SpaceError(ValueError):
    """Malformed space, map or constructor string."""


# ----------------------------------------------------------------------
# Complexes and maps
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SimplicialComplex:
    """Finite abstract simplicial complex given by its maximal simplices.

    Vertices not covered by any listed simplex are isolated points.
    """

    vertex_count: int
    maximal_simplices: tuple

    def __post_init__(self):
        simplices = tuple(tuple(int(v) for v in s) for s in self.maximal_simplices)
        for s in simplices:
            if not s:
                raise SpaceError("empty simplex")
            if any(a >= b for a, b in zip(s, s[1:])):
                raise SpaceError(f"simplex {list(s)} is not strictly increasing")
            if s[0] < 0 or s[-1] >= self.vertex_count:
                raise SpaceError(f"simplex {list(s)} uses a vertex out of range")
        sets = [frozenset(s) for s in simplices]
        for i, a in enumerate(sets):
            for j, b in enumerate(sets):
                if i != j and a <= b:
                    raise SpaceError(
                        f"simplex {list(simplices[i])} is contained in {list(simplices[j])}"
                    )
        object.__setattr__(self, "maximal_simplices", tuple(sorted(simplices)))

    @property
    def dimension(self) -> int:
        if self.vertex_count == 0:
            return -1
        return max([len(s) - 1 for s in self.maximal_simplices] + [0])

    def simplices(self, k: int) -> tuple:
        return _faces(self, k)

    def coboundary(self, k: int) -> Matrix:
        """Matrix of ``C^k -> C^{k+1}``; rows index (k+1)-simplices."""
        return _coboundary(self, k)

    @property
    def components(self) -> tuple:
        return _components(self)

    def restrict(self, vertices) -> tuple[SimplicialComplex, dict]:
        """Full subcomplex on a vertex set, relabelled ``0..len-1``."""
        vertices = sorted(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        simplices = [s for s in self.maximal_simplices if s[0] in index]
        return SimplicialComplex(len(vertices), tuple(tuple(index[v] for v in s) for s in simplices)), index


@lru_cache(maxsize=None)
def _faces(K: SimplicialComplex, k: int) -> tuple:
    if k < 0:
        return ()
    if k == 0:
        return tuple((v,) for v in range(K.vertex_count))
    out = set()
    for s in K.maximal_simplices:
        out.update(combinations(s, k + 1))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _coboundary(K: SimplicialComplex, k: int) -> Matrix:
    rows, cols = _faces(K, k + 1), _faces(K, k)
    if k < 0:
        return Matrix.zeros(len(rows), 0)
    index = {s: j for j, s in enumerate(cols)}
    e = [[0] * len(cols) for _ in rows]
    for i, s in enumerate(rows):
        for t in range(len(s)):
            e[i][index[s[:t] + s[t + 1:]]] += -1 if t % 2 else 1
    return Matrix.from_rows(e, len(cols))


@lru_cache(maxsize=None)
def _components(K: SimplicialComplex) -> tuple:
    parent = list(range(K.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in K.maximal_simplices:
        for v in s[1:]:
            a, b = find(s[0]), find(v)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list] = {}
    for v in range(K.vertex_count):
        groups.setdefault(find(v), []).append(v)
    return tuple(tuple(g) for g in sorted(groups.values()))


@dataclass(frozen=True)
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: tuple

    def __post_init__(self):
        vm = tuple(int(v) for v in self.vertex_map)
        object.__setattr__(self, "vertex_map", vm)
        if len(vm) != self.source.vertex_count:
            raise SpaceError(
                f"vertex map has {len(vm)} entries for {self.source.vertex_count} source vertices"
            )
        if any(v < 0 or v >= self.target.vertex_count for v in vm):
            raise SpaceError("vertex map leaves the target vertex range")
        top = set()
        for s in self.target.maximal_simplices:
            top.add(frozenset(s))
        for s in self.source.maximal_simplices:
            image = frozenset(vm[v] for v in s)
            if len(image) > 1 and not any(image <= t for t in top):
                raise SpaceError(f"image of simplex {list(s)} is not a simplex of the target")

    def compose(self, after: SimplicialMap) -> SimplicialMap:
        """``after o self``."""
        if after.source != self.target:
            raise SpaceError("maps are not composable")
        return SimplicialMap(self.source, after.target, tuple(after.vertex_map[v] for v in self.vertex_map))

    def cochain_pullback(self, k: int) -> Matrix:
        """``C^k(target) -> C^k(source)`` with orientation signs."""
        src, tgt = self.source.simplices(k), self.target.simplices(k)
        index = {s: j for j, s in enumerate(tgt)}
        e = [[0] * len(tgt) for _ in src]
        for i, s in enumerate(src):
            image = [self.vertex_map[v] for v in s]
            if len(set(image)) < len(image):
                continue
            e[i][index[tuple(sorted(image))]] = _permutation_sign(image)
        return Matrix.from_rows(e, len(tgt))


def _permutation_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# ----------------------------------------------------------------------
# Formal descriptors
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FormalCohomology:
    """Betti numbers per connected component, for spaces not triangulated.

    ``blocks[c][k]`` is the k-th Betti number of component ``c``. Integral
    cohomology is assumed torsion free unless ``torsion`` lists invariants
    per degree.
    """

    blocks: tuple
    torsion: tuple = ()

    def __post_init__(self):
        blocks = tuple(tuple(int(b) for b in blk) for blk in self.blocks)
        for blk in blocks:
            if not blk or blk[0] != 1:
                raise SpaceError("each component must have b0 = 1")
            if any(b < 0 for b in blk):
                raise SpaceError("negative Betti number")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "torsion", tuple(tuple(t) for t in self.torsion))

    def betti(self, k: int) -> int:
        return sum(self.component_betti(k))

    def component_betti(self, k: int) -> tuple:
        return tuple(blk[k] if 0 <= k < len(blk) else 0 for blk in self.blocks)

    def torsion_in(self, k: int) -> tuple:
        return self.torsion[k] if k < len(self.torsion) else ()


@dataclass(frozen=True)
class SpaceModel:
    """A region of spacetime reduced to cohomological data.

    ``oriented=False`` is representable so that it can be rejected with a
    clear error by the consumers that need an orientation.
    """

    body: Union[SimplicialComplex, FormalCohomology]
    dim_m: int
    oriented: bool = True
    compact_cauchy: bool = False
    connected_components: Optional[int] = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dim_m < 2:
            raise SpaceError("spacetime dimension must be at least 2")
        n = (
            len(self.body.components)
            if isinstance(self.body, SimplicialComplex)
            else len(self.body.blocks)
        )
        if self.connected_components is None:
            object.__setattr__(self, "connected_components", n)
        elif self.connected_components != n:
            raise SpaceError(f"declared {self.connected_components} components, body has {n}")
        if isinstance(self.body, SimplicialComplex) and self.body.dimension >= self.dim_m:
            raise SpaceError("complex dimension exceeds the spacetime dimension")

    @property
    def is_formal(self) -> bool:
        return isinstance(self.body, FormalCohomology)

    def betti(self, k: int) -> int:
        return cohomology(self, k).rank

    def component_betti(self, k: int) -> tuple:
        return cohomology(self, k).component_ranks


# ----------------------------------------------------------------------
# Cohomology
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CohomologyGroup:
    """``H^k`` with a fixed basis.

    ``representatives`` holds the basis cocycles as columns (``None`` for
    formal spaces). The same basis serves over Z (free part) and Q.
    """

    degree: int
    ring: str
    rank: int
    torsion: tuple
    component_ranks: tuple
    representatives: Optional[Matrix] = None
    torsion_representatives: Optional[Matrix] = None
    coboundary_image: Optional[Matrix] = None

    @property
    def presentation(self):
        if self.ring == "Z":
            return FgAbelianGroup(self.rank, self.torsion)
        return self.rank

    def coordinates(self, cocycle) -> tuple:
        """Rational coordinates of the class of ``cocycle`` in the stored basis."""
        if self.representatives is None:
            raise SpaceError("formal cohomology has no cochain-level representatives")
        basis = self.representatives.hstack(self.coboundary_image)
        x = solve(basis, cocycle)
        if x is None:
            raise SpaceError("cochain is not a cocycle in the expected degree")
        return x[: self.rank]


def _complex_cohomology(K: SimplicialComplex, k: int):
    """Integral free generators, torsion data and coboundary image of a complex."""
    n = len(K.simplices(k))
    dk = K.coboundary(k)
    dprev = K.coboundary(k - 1)
    Z = integer_kernel_basis(dk)  # n x z
    if Z.cols == 0:
        return Matrix.zeros(n, 0), (), Matrix.zeros(n, 0), dprev
    # express the previous coboundaries in the cocycle basis
    coeff_cols = []
    for j in range(dprev.cols):
        c = solve(Z, dprev.col(j))
        assert c is not None and all(x.denominator == 1 for x in c), "coboundary not a cocycle"
        coeff_cols.append(c)
    C = Matrix.from_columns(coeff_cols, Z.cols)
    snf = smith_normal_form(C)
    gens = Z @ inverse(snf.U)
    inv = snf.invariants
    r = snf.rank
    free = [gens.col(i) for i in range(r, Z.cols)]
    tors_idx = [i for i in range(r) if inv[i] > 1]
    torsion = tuple(inv[i] for i in tors_idx)
    return (
        Matrix.from_columns(free, n),
        torsion,
        Matrix.from_columns([gens.col(i) for i in tors_idx], n),
        dprev,
    )


def _embed_columns(M: Matrix, index: list, n: int) -> list:
    out = []
    for col in M.columns():
        v = [0] * n
        for i, x in zip(index, col):
            v[i] = x
        out.append(v)
    return out


@lru_cache(maxsize=None)
def _cohomology_of_complex(K: SimplicialComplex, k: int) -> CohomologyGroup:
    n = len(K.simplices(k))
    glob = {s: i for i, s in enumerate(K.simplices(k))}
    free, tors, ranks, torsion = [], [], [], []
    for comp in K.components:
        sub, index = K.restrict(comp)
        back = {i: v for v, i in index.items()}
        pos = [glob[tuple(back[v] for v in s)] for s in sub.simplices(k)]
        F, T, Tg, _ = _complex_cohomology(sub, k)
        free += _embed_columns(F, pos, n)
        tors += _embed_columns(Tg, pos, n)
        torsion += list(T)
        ranks.append(F.cols)
    reps = Matrix.from_columns(free, n)
    # rank-nullity cross-check of the rational dimension
    dim_q = (n - rank(K.coboundary(k))) - rank(K.coboundary(k - 1))
    assert dim_q == reps.cols, "free rank disagrees with rational Betti number"
    dk, dprev = K.coboundary(k), K.coboundary(k - 1)
    assert (dk @ dprev).is_zero(), "coboundary does not square to zero"
    _, _, image = rational_rank_kernel_image(dprev)
    torsion.sort()
    return CohomologyGroup(
        degree=k,
        ring="Z",
        rank=reps.cols,
        torsion=tuple(torsion),
        component_ranks=tuple(ranks),
        representatives=reps,
        torsion_representatives=Matrix.from_columns(tors, n),
        coboundary_image=image,
    )


def cohomology(X, k: int, ring: str = "Z") -> CohomologyGroup:
    """``H^k(X)`` for a complex or space model, over ``"Z"`` or ``"Q"``."""
    if k < 0:
        raise SpaceError("negative degree")
    if ring not in ("Z", "Q"):
        raise SpaceError(f"unknown coefficient ring {ring!r}")
    body = X.body if isinstance(X, SpaceModel) else X
    if isinstance(body, FormalCohomology):
        ranks = body.component_betti(k)
        group = CohomologyGroup(k, "Z", sum(ranks), tuple(body.torsion_in(k)), ranks)
    else:
        group = _cohomology_of_complex(body, k)
    if ring == "Q":
        group = CohomologyGroup(
            k, "Q", group.rank, (), group.component_ranks,
            group.representatives, None, group.coboundary_image,
        )
    return group


def betti_numbers(X, top: int | None = None) -> tuple:
    body = X.body if isinstance(X, SpaceModel) else X
    if top is None:
        top = body.dimension if isinstance(body, SimplicialComplex) else max(len(b) for b in body.blocks) - 1
    return tuple(cohomology(X, k).rank for k in range(top + 1))


def lattice_in_real(X, k: int) -> Matrix:
    """Image of ``H^k(X;Z)`` in ``H^k(X;Q)``, as columns in the rational basis.

    The rational basis is chosen among the free integral generators, so
    this is always the identity of size ``b_k``; it is still returned as an
    explicit basis so callers never rely on that convention.
    """
    return Matrix.identity(cohomology(X, k).rank)


# ----------------------------------------------------------------------
# Morphisms of space models
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CohomologyMap:
    degree: int
    ring: str
    matrix: Matrix
    direction: str  # "pullback" or "compact_pushforward"

    @property
    def is_injective(self) -> bool:
        return rank(self.matrix) == self.matrix.cols

    @property
    def is_surjective(self) -> bool:
        return rank(self.matrix) == self.matrix.rows


@dataclass(frozen=True)
class SpaceMorphism:
    """A map of regions, backed by a simplicial map or explicit pullbacks.

    ``pullbacks`` maps a degree to the matrix of ``f^*: H^k(target) ->
    H^k(source)`` in the stored bases, so it has shape ``b_k(source) x
    b_k(target)``. Degrees where either side vanishes need no matrix.
    """

    source: SpaceModel
    target: SpaceModel
    simplicial: Optional[SimplicialMap] = None
    pullbacks: tuple = ()

    def __post_init__(self):
        if self.source.dim_m != self.target.dim_m:
            raise SpaceError(
                f"dimension mismatch: {self.source.dim_m} vs {self.target.dim_m}"
            )
        pb = dict(self.pullbacks)
        object.__setattr__(self, "pullbacks", tuple(sorted(pb.items())))
        if self.simplicial is not None:
            if self.source.is_formal or self.target.is_formal:
                raise SpaceError("a simplicial map needs triangulated source and target")
            if self.simplicial.source != self.source.body or self.simplicial.target != self.target.body:
                raise SpaceError("simplicial map does not match the space models")
        for k, M in pb.items():
            shape = (self.source.betti(k), self.target.betti(k))
            if M.shape != shape:
                raise SpaceError(f"degree {k} pullback has shape {M.shape}, expected {shape}")
            if not M.is_integral():
                raise SpaceError(f"degree {k} pullback is not integral")
            if self.simplicial is not None and M != _simplicial_pullback(self.simplicial, k):
                raise SpaceError(f"degree {k} pullback disagrees with the simplicial map")
        if self.simplicial is None:
            # components must go somewhere coherent
            for k in range(self.source.dim_m + 1):
                self.pullback(k)

    def pullback(self, k: int) -> Matrix:
        pb = dict(self.pullbacks)
        if k in pb:
            return pb[k]
        if self.simplicial is not None:
            return _simplicial_pullback(self.simplicial, k)
        rows, cols = self.source.betti(k), self.target.betti(k)
        if rows and cols:
            raise SpaceError(f"no pullback supplied in degree {k}")
        return Matrix.zeros(rows, cols)

    def integral_pullback(self, k: int) -> Matrix:
        """Pullback on the integral lattices, ``L_src^-1 M L_tgt``."""
        M = inverse(lattice_in_real(self.source, k)) @ self.pullback(k) @ lattice_in_real(self.target, k)
        assert M.is_integral(), "pullback does not preserve integral classes"
        return M

    def compose(self, after: SpaceMorphism) -> SpaceMorphism:
        """``after o self``; pullbacks compose contravariantly."""
        if after.source != self.target:
            raise SpaceError("morphisms are not composable")
        if self.simplicial is not None and after.simplicial is not None:
            return SpaceMorphism(self.source, after.target, self.simplicial.compose(after.simplicial))
        degrees = range(self.source.dim_m + 1)
        return SpaceMorphism(
            self.source,
            after.target,
            pullbacks=tuple((k, self.pullback(k) @ after.pullback(k)) for k in degrees),
        )


def identity_morphism(X: SpaceModel) -> SpaceMorphism:
    if X.is_formal:
        return SpaceMorphism(X, X, pullbacks=tuple(
            (k, Matrix.identity(X.betti(k))) for k in range(X.dim_m + 1)
        ))
    K = X.body
    return SpaceMorphism(X, X, SimplicialMap(K, K, tuple(range(K.vertex_count))))


@lru_cache(maxsize=None)
def _simplicial_pullback(f: SimplicialMap, k: int) -> Matrix:
    src = cohomology(f.source, k)
    tgt = cohomology(f.target, k)
    cochain = f.cochain_pullback(k)
    cols = [src.coordinates(cochain.apply(z)) for z in tgt.representatives.columns()]
    M = Matrix.from_columns(cols, src.rank)
    assert M.is_integral()
    return M


def induced_pullback(f, k: int, ring: str = "Q") -> CohomologyMap:
    """Pullback ``H^k(target) -> H^k(source)`` of a simplicial map or morphism."""
    if isinstance(f, SimplicialMap):
        M = _simplicial_pullback(f, k)
    elif ring == "Z":
        M = f.integral_pullback(k)
    else:
        M = f.pullback(k)
    return CohomologyMap(k, ring, M, "pullback")


@dataclass(frozen=True)
class CompactSupportSpace:
    """``H^k_c`` as the dual of ``H^{m-k}``, with the dual basis."""

    space: SpaceModel
    degree: int
    dimension: int
    component_dims: tuple


def _require_oriented(X: SpaceModel):
    if not X.oriented:
        raise SpaceError("space model is not oriented")


def compact_support_group(X: SpaceModel, k: int) -> CompactSupportSpace:
    _require_oriented(X)
    if not 0 <= k <= X.dim_m:
        raise SpaceError(f"degree {k} outside [0, {X.dim_m}]")
    H = cohomology(X, X.dim_m - k, "Q")
    return CompactSupportSpace(X, k, H.rank, H.component_ranks)


def pushforward_compact(f: SpaceMorphism, k: int) -> CohomologyMap:
    """``H^k_c(source) -> H^k_c(target)``: transpose of the complementary pullback."""
    _require_oriented(f.source)
    _require_oriented(f.target)
    if f.source.dim_m != f.target.dim_m:
        raise SpaceError("dimension mismatch")
    return CohomologyMap(k, "Q", f.pullback(f.source.dim_m - k).T, "compact_pushforward")


# ----------------------------------------------------------------------
# Builtin constructors
# ----------------------------------------------------------------------


def point() -> SimplicialComplex:
    return SimplicialComplex(1, ((0,),))


def interval() -> SimplicialComplex:
    return SimplicialComplex(2, ((0, 1),))


def circle() -> SimplicialComplex:
    return SimplicialComplex(3, ((0, 1), (0, 2), (1, 2)))


def sphere(k: int) -> SimplicialComplex:
    """Boundary of the (k+1)-simplex."""
    if k < 0:
        raise SpaceError("sphere dimension must be non-negative")
    return SimplicialComplex(k + 2, tuple(combinations(range(k + 2), k + 1)))


def disjoint_union(*parts):
    if any(isinstance(p, FormalCohomology) for p in parts):
        blocks, torsion = [], []
        for p in parts:
            f = as_formal(p)
            blocks += list(f.blocks)
            for k, t in enumerate(f.torsion):
                while len(torsion) <= k:
                    torsion.append([])
                torsion[k] += list(t)
        return FormalCohomology(tuple(blocks), tuple(tuple(sorted(t)) for t in torsion))
    offset, simplices = 0, []
    for p in parts:
        simplices += [tuple(v + offset for v in s) for s in p.maximal_simplices]
        simplices += [(v + offset,) for v in range(p.vertex_count) if not any(v in s for s in p.maximal_simplices)]
        offset += p.vertex_count
    return SimplicialComplex(offset, tuple(simplices))


def as_formal(X) -> FormalCohomology:
    if isinstance(X, FormalCohomology):
        return X
    top = max(X.dimension, 0)
    blocks = []
    for comp in X.components:
        sub, _ = X.restrict(comp)
        blocks.append(tuple(cohomology(sub, k).rank for k in range(top + 1)))
    torsion = tuple(cohomology(X, k).torsion for k in range(top + 1))
    if not any(torsion):
        torsion = ()
    return FormalCohomology(tuple(blocks), torsion)


def formal_product(*parts) -> FormalCohomology:
    """Kunneth product, component by component (lexicographic order)."""
    result = FormalCohomology(((1,),))
    for p in parts:
        f = as_formal(p)
        if any(f.torsion) or any(result.torsion):
            raise SpaceError("formal products of spaces with torsion are not supported")
        blocks = []
        for a in result.blocks:
            for b in f.blocks:
                c = [0] * (len(a) + len(b) - 1)
                for i, x in enumerate(a):
                    for j, y in enumerate(b):
                        c[i + j] += x * y
                while len(c) > 1 and c[-1] == 0:
                    c.pop()
                blocks.append(tuple(c))
        result = FormalCohomology(tuple(blocks))
    return result


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "[({":
            depth += 1
        elif ch in "])}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur)
    return [p.strip() for p in parts]


_COMPLEX_RE = re.compile(r"^complex\{\s*vertices\s*=\s*(\d+)\s*,\s*simplices\s*=\s*(\[.*\])\s*\}$", re.S)


def parse_space(text: str):
    """Build a complex or formal descriptor from a constructor string.

    Grammar: ``point``, ``circle``, ``interval``, ``sphere(k)``,
    ``disjoint_union[a, b, ...]``, ``formal_product[a, b, ...]`` and
    ``complex{vertices=n, simplices=[[...], ...]}``.
    """
    import json

    t = text.strip()
    if t == "point":
        return point()
    if t == "circle":
        return circle()
    if t == "interval":
        return interval()
    m = re.fullmatch(r"sphere\(\s*(\d+)\s*\)", t)
    if m:
        return sphere(int(m.group(1)))
    for name, fn in (("disjoint_union", disjoint_union), ("formal_product", formal_product)):
        if t.startswith(name + "[") and t.endswith("]"):
            inner = t[len(name) + 1:-1]
            args = _split_top_level(inner)
            if not args:
                raise SpaceError(f"{name} needs at least one argument")
            return fn(*[parse_space(a) for a in args])
    m = _COMPLEX_RE.match(t)
    if m:
        try:
            simplices = json.loads(m.group(2))
        except ValueError as exc:
            raise SpaceError(f"bad simplex list in {t!r}") from exc
        return SimplicialComplex(int(m.group(1)), tuple(tuple(s) for s in simplices))
    raise SpaceError(f"unknown space constructor {t!r}")
