"""Random regions, morphisms and presymplectic groups for experiments and tests.

Regions are disjoint unions of connected *pieces*; a morphism sends every
source piece into one target piece through a piece map drawn from a small
catalogue per spacetime dimension. The catalogue leaves out maps the sector
model cannot represent (injective on charges but not on AB labels), such as
a cylinder collapsing into a two-dimensional plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .cech import (
    FormalCohomology,
    SimplicialMap,
    SpaceModel,
    SpaceMorphism,
    _simplicial_pullback,
    as_formal,
    circle,
    disjoint_union,
    formal_product,
    point,
    sphere,
)
from .cyclotomic import CyclotomicScalar
from .exact_linear import Matrix
from .gauge_model import BundleMorphism, BundleObject, ModelScopeError
from .presymplectic import MixedGroup, PresymplecticGroup
from .weyl_ccr import WeylElement

PIECES = {
    "point": point(),
    "circle": circle(),
    "sphere2": sphere(2),
    "torus": formal_product(circle(), circle()),
}

PIECE_TYPES = {
    2: ("point", "circle"),
    3: ("point", "circle", "torus"),
    4: ("point", "circle", "sphere2"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs shared by the random generators."""

    max_pieces: int = 3
    rho_entry_bound: int = 2
    q_squared_choices: tuple = (Fraction(1), Fraction(2), Fraction(1, 2))


def _allowed(m: int, src: str, tgt: str) -> bool:
    if src == tgt or src == "point":
        return True
    if m == 2:
        return False  # circles only go to circles
    if m == 3:
        return (src, tgt) in {("circle", "point"), ("circle", "torus"), ("torus", "point"), ("torus", "circle")}
    return (src, tgt) == ("sphere2", "point")


def _rand_vertex_map(rng, src: str, tgt: str):
    if tgt == "point":
        return (0,) * PIECES[src].vertex_count
    if src == "point":
        return (rng.randrange(PIECES[tgt].vertex_count),)
    n = PIECES[src].vertex_count
    return tuple(rng.choice(list(permutations(range(n)))))


def _rand_unimodular2(rng) -> list:
    M = [[1, 0], [0, 1]]
    for _ in range(rng.randrange(4)):
        i = rng.randrange(2)
        c = rng.choice((-1, 1))
        M[i] = [a + c * b for a, b in zip(M[i], M[1 - i])]
    if rng.random() < 0.5:
        M = [M[1], M[0]]
    return M


def _piece_pullbacks(rng, m: int, src: str, tgt: str) -> dict:
    """Per-degree pullback matrices ``H^k(tgt) -> H^k(src)`` of one piece map."""
    if src != "torus" and tgt != "torus":
        f = SimplicialMap(PIECES[src], PIECES[tgt], _rand_vertex_map(rng, src, tgt))
        return {k: _simplicial_pullback(f, k) for k in range(m + 1)}, f
    bs = as_formal(PIECES[src]).blocks[0]
    bt = as_formal(PIECES[tgt]).blocks[0]
    b = lambda blk, k: blk[k] if k < len(blk) else 0
    pb = {k: Matrix.zeros(b(bs, k), b(bt, k)) for k in range(m + 1)}
    pb[0] = Matrix.identity(1)
    if src == "torus" and tgt == "torus":
        M = _rand_unimodular2(rng)
        pb[1] = Matrix.from_rows(M)
        pb[2] = Matrix.from_rows([[M[0][0] * M[1][1] - M[0][1] * M[1][0]]])
    elif src == "circle" and tgt == "torus":
        pb[1] = Matrix.from_rows([_primitive(rng)])
    elif src == "torus" and tgt == "circle":
        pb[1] = Matrix.from_rows([[x] for x in _primitive(rng)])
    return pb, None


def _primitive(rng) -> list:
    while True:
        a, b = rng.randint(-2, 2), rng.randint(-2, 2)
        if (a, b) != (0, 0) and abs(a) + abs(b) <= 3 and _gcd(a, b) == 1:
            return [a, b]


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def _assemble_body(types: list):
    parts = [PIECES[t] for t in types]
    return disjoint_union(*parts)


@dataclass(frozen=True)
class PiecewiseMap:
    src_types: tuple
    tgt_types: tuple
    assignment: tuple  # source piece -> target piece index
    piece_maps: tuple  # (pullbacks dict, SimplicialMap or None) per source piece


def _offsets(types) -> list:
    out, off = [], 0
    for t in types:
        out.append(off)
        off += PIECES[t].vertex_count if t != "torus" else 0
    return out


def realize(pm: PiecewiseMap, m: int, compact=False) -> SpaceMorphism:
    src_body, tgt_body = _assemble_body(pm.src_types), _assemble_body(pm.tgt_types)
    X = SpaceModel(src_body, m, compact_cauchy=compact)
    Y = SpaceModel(tgt_body, m, compact_cauchy=compact)
    formal = isinstance(src_body, FormalCohomology) or isinstance(tgt_body, FormalCohomology)
    if not formal:
        so, to = _offsets(pm.src_types), _offsets(pm.tgt_types)
        vm = []
        for i, (t, (_, f)) in enumerate(zip(pm.src_types, pm.piece_maps)):
            j = pm.assignment[i]
            vm += [to[j] + v for v in f.vertex_map]
        return SpaceMorphism(X, Y, SimplicialMap(src_body, tgt_body, tuple(vm)))
    pullbacks = []
    for k in range(m + 1):
        rs = [as_formal(PIECES[t]).component_betti(k)[0] for t in pm.src_types]
        cs = [as_formal(PIECES[t]).component_betti(k)[0] for t in pm.tgt_types]
        rows = [[0] * sum(cs) for _ in range(sum(rs))]
        for i, (pb, _) in enumerate(pm.piece_maps):
            j = pm.assignment[i]
            r0, c0 = sum(rs[:i]), sum(cs[:j])
            B = pb[k]
            for a in range(B.rows):
                for b in range(B.cols):
                    rows[r0 + a][c0 + b] = B[a, b]
        pullbacks.append((k, Matrix.from_rows(rows, sum(cs))))
    return SpaceMorphism(X, Y, pullbacks=tuple(pullbacks))


def random_piecewise_map(rng, m: int, src_types=None, tgt_types=None, cfg=ExperimentConfig()) -> PiecewiseMap:
    types = PIECE_TYPES[m]
    if tgt_types is None:
        tgt_types = tuple(rng.choice(types) for _ in range(rng.randint(1, cfg.max_pieces)))
    if src_types is None:
        src_types = []
        for _ in range(rng.randint(1, cfg.max_pieces)):
            j = rng.randrange(len(tgt_types))
            src_types.append(rng.choice([t for t in types if _allowed(m, t, tgt_types[j])]))
        src_types = tuple(src_types)
    assignment, maps = [], []
    for s in src_types:
        options = [j for j, t in enumerate(tgt_types) if _allowed(m, s, t)]
        if not options:
            raise ValueError(f"piece {s} has no admissible target")
        j = rng.choice(options)
        assignment.append(j)
        maps.append(_piece_pullbacks(rng, m, s, tgt_types[j]))
    return PiecewiseMap(tuple(src_types), tuple(tgt_types), tuple(assignment), tuple(maps))


def random_rho(rng, obj_space: SpaceModel, cfg=ExperimentConfig()) -> Matrix:
    from .cech import cohomology, compact_support_group

    b1 = cohomology(obj_space, 1).rank
    c = compact_support_group(obj_space, 2).dimension
    e = cfg.rho_entry_bound
    return Matrix.from_rows([[rng.randint(-e, e) for _ in range(c)] for _ in range(b1)], c)


def pulled_back_rho(f: SpaceMorphism, rho_target: Matrix) -> Matrix:
    """The unique source holonomy matrix compatible with ``rho_target``."""
    from .cech import pushforward_compact

    return f.integral_pullback(1) @ rho_target @ pushforward_compact(f, 2).matrix


def _retry(draw, attempts: int = 200):
    # rejection sampling: discard draws the sector model cannot represent
    for _ in range(attempts):
        try:
            return draw()
        except ModelScopeError:
            continue
    raise RuntimeError("no in-scope sample found")


def random_bundle_morphism(rng, m: int | None = None, connected: bool = False, cfg=ExperimentConfig()) -> BundleMorphism:
    m = m or rng.choice((2, 3, 4))
    return _retry(lambda: _draw_bundle_morphism(rng, m, connected, cfg))


def _draw_bundle_morphism(rng, m, connected, cfg) -> BundleMorphism:
    if connected:
        t = rng.choice(PIECE_TYPES[m])
        s = rng.choice([x for x in PIECE_TYPES[m] if _allowed(m, x, t)])
        pm = random_piecewise_map(rng, m, (s,), (t,), cfg)
    else:
        pm = random_piecewise_map(rng, m, cfg=cfg)
    f = realize(pm, m)
    q2 = rng.choice(cfg.q_squared_choices)
    rho_t = random_rho(rng, f.target, cfg)
    tgt = BundleObject("target", f.target, rho_t, q2)
    src = BundleObject("source", f.source, pulled_back_rho(f, rho_t), q2)
    return BundleMorphism(src, tgt, f)


def random_chain(rng, m: int, length: int = 2, cfg=ExperimentConfig()) -> list:
    """Composable bundle morphisms ``X0 -> X1 -> ... -> X_length``.

    Every composite of consecutive maps is also in scope.
    """
    def draw():
        chain = _draw_chain(rng, m, length, cfg)
        for i in range(length):
            acc = chain[i]
            for g in chain[i + 1 :]:
                acc = acc.compose(g)
        return chain

    return _retry(draw)


def _draw_chain(rng, m, length, cfg) -> list:
    types = tuple(rng.choice(PIECE_TYPES[m]) for _ in range(rng.randint(1, cfg.max_pieces)))
    maps = []
    tgt = types
    for _ in range(length):
        pm = random_piecewise_map(rng, m, tgt_types=tgt, cfg=cfg)
        maps.append(realize(pm, m))
        tgt = pm.src_types
    maps.reverse()  # maps[0]: X0 -> X1
    q2 = rng.choice(cfg.q_squared_choices)
    rho = random_rho(rng, maps[-1].target, cfg)
    objs = [None] * (length + 1)
    objs[length] = BundleObject(f"X{length}", maps[-1].target, rho, q2)
    for i in range(length - 1, -1, -1):
        rho = pulled_back_rho(maps[i], rho)
        objs[i] = BundleObject(f"X{i}", maps[i].source, rho, q2)
    return [BundleMorphism(objs[i], objs[i + 1], maps[i]) for i in range(length)]


def random_hk_diagram(rng, m: int | None = None, cfg=ExperimentConfig()):
    """``(objects, legs, morphisms, terminal)`` with commuting triangles by construction."""
    m = m or rng.choice((3, 4))
    chain = random_chain(rng, m, 2, cfg)
    f01, f12 = chain
    x0, x1, x2 = f01.source, f01.target, f12.target
    objects = {x0.name: x0, x1.name: x1, x2.name: x2}
    legs = {x1.name: f12, x0.name: f01.compose(f12)}
    return objects, legs, [f01], x2.name


def random_presymplectic_group(rng, n: int | None = None, max_den: int = 4):
    """Random mixed group in ``Q^n`` (``n <= 3``) with small denominators.

    Returns ``(group, free_generators, divisible_generators)``.
    """
    n = n or rng.randint(1, 3)

    def rat():
        return Fraction(rng.randint(-4, 4), rng.randint(1, max_den))

    def vec():
        return [rat() for _ in range(n)]

    k = rng.randint(0, 3)
    n_div = rng.randint(0, min(k, 2)) if k else 0
    free = [vec() for _ in range(k - n_div)]
    div = [vec() for _ in range(n_div)]
    S = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = rat()
            S[i][j], S[j][i] = v, -v
    return PresymplecticGroup(MixedGroup.from_generators(n, free, div), Matrix.from_rows(S, n)), free, div


def random_weyl_group(rng, n: int | None = None) -> PresymplecticGroup:
    """Lattice or mixed group with pairings of denominator at most 4."""
    n = n or rng.randint(1, 3)
    S = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(rng.randint(-3, 3), rng.choice((1, 2, 4)))
            S[i][j], S[j][i] = v, -v
    unit = lambda i: [int(i == j) for j in range(n)]
    n_div = rng.randint(0, n - 1) if n > 1 else 0
    return PresymplecticGroup(
        MixedGroup.from_generators(n, [unit(i) for i in range(n_div, n)], [unit(i) for i in range(n_div)]),
        Matrix.from_rows(S, n),
    )


def random_group_element(rng, B: PresymplecticGroup, bound: int = 2, div_den: int = 4) -> tuple:
    """Integer combination of lattice generators plus ``k/div_den`` multiples of divisible ones."""
    x = [Fraction(0)] * B.ambient_dim
    for g in B.group.free_gens.columns():
        c = rng.randint(-bound, bound)
        x = [a + c * b for a, b in zip(x, g)]
    for v in B.group.divisible_gens.columns():
        c = Fraction(rng.randint(-bound * div_den, bound * div_den), div_den)
        x = [a + c * b for a, b in zip(x, v)]
    return tuple(x)


def random_coefficient(rng, orders=(1, 2, 4, 8)) -> CyclotomicScalar:
    """A small rational times a root of unity."""
    n = rng.choice(orders)
    r = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return CyclotomicScalar.root_of_unity(n, rng.randrange(n)) * r


def random_weyl_element(rng, B: PresymplecticGroup, max_terms: int = 3, orders=(1, 2, 4, 8)) -> WeylElement:
    terms = [(random_group_element(rng, B), random_coefficient(rng, orders)) for _ in range(rng.randint(1, max_terms))]
    return WeylElement.from_terms(B, terms, check=False)
