"""Exact integer and rational linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`, so
entry growth is never an issue. Matrices are small immutable row-major
containers; zero-dimensional shapes are legal and show up constantly
(trivial cohomology groups, empty sectors).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def format_rational(x) -> str:
    """``p/q`` form, with ``q`` omitted when it is 1."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def common_denominator(values: Iterable) -> int:
    d = 1
    for v in values:
        d = _lcm(d, as_fraction(v).denominator)
    return d


@dataclass(frozen=True)
class Matrix:
    """Dense rational matrix; integer matrices are the ones with integral entries."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        if not all(type(e) is Fraction for e in self.entries):
            object.__setattr__(self, "entries", tuple(as_fraction(e) for e in self.entries))

    # construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> Matrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(as_fraction(e) for r in rows for e in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> Matrix:
        columns = [list(c) for c in columns]
        if any(len(c) != rows for c in columns):
            raise ValueError("column length mismatch")
        return cls(
            rows,
            len(columns),
            tuple(as_fraction(columns[j][i]) for i in range(rows) for j in range(len(columns))),
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence, rows: int | None = None, cols: int | None = None) -> Matrix:
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        e = [Fraction(0)] * (rows * cols)
        for i, v in enumerate(values):
            e[i * cols + i] = as_fraction(v)
        return cls(rows, cols, tuple(e))

    # access -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    def to_int_rows(self) -> list[list[int]]:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return [[e.numerator for e in self.row(i)] for i in range(self.rows)]

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    # arithmetic -------------------------------------------------------

    @property
    def T(self) -> Matrix:
        return Matrix(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return Matrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), v) if a and b), Fraction(0))
            for i in range(self.rows)
        )

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> Matrix:
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> Matrix:
        c = as_fraction(c)
        return Matrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def hstack(self, other: Matrix) -> Matrix:
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return Matrix.from_rows(
            [list(self.row(i)) + list(other.row(i)) for i in range(self.rows)],
            self.cols + other.cols,
        )

    def vstack(self, other: Matrix) -> Matrix:
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return Matrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix.from_rows([[self[i, j] for j in cols] for i in rows], len(cols))

    def to_json(self) -> list[list[str]]:
        return [[format_rational(e) for e in self.row(i)] for i in range(self.rows)]

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.to_json()})"


def matrix_from_json(data, rows: int | None = None, cols: int | None = None) -> Matrix:
    """Inverse of :meth:`Matrix.to_json`; empty lists need explicit shapes."""
    if not data:
        return Matrix.zeros(rows or 0, cols or 0)
    m = Matrix.from_rows(data)
    if (rows is not None and m.rows != rows) or (cols is not None and m.cols != cols):
        raise ValueError(f"expected {rows}x{cols} matrix, got {m.rows}x{m.cols}")
    return m


# ----------------------------------------------------------------------
# Smith normal form
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ source @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: Matrix
    D: Matrix
    V: Matrix
    source: Matrix

    @property
    def invariants(self) -> list[int]:
        return [self.D[i, i].numerator for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariants if d)


def smith_normal_form(A: Matrix) -> SmithDecomposition:
    m, n = A.rows, A.cols
    a = A.to_int_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for r in a:
            r[dst] -= q * r[src]
        for r in V:
            r[dst] -= q * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            # divisibility chain: fold an offending row into row t and retry
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
            U[t] = [x + y for x, y in zip(U[t], U[bad])]
        if best is None:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]

    return SmithDecomposition(
        U=Matrix.from_rows(U, m),
        D=Matrix.from_rows(a, n),
        V=Matrix.from_rows(V, n),
        source=A,
    )


def determinant(A: Matrix) -> Fraction:
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    a = A.to_rows()
    n = A.rows
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


# ----------------------------------------------------------------------
# Hermite normal form of lattices spanned by row vectors
# ----------------------------------------------------------------------


def hermite_rows(vectors: Iterable[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row-style HNF basis of the Z-span of integer ``vectors``.

    Pivots are positive and strictly increasing; entries above a pivot are
    reduced into ``[0, pivot)``. The result is a canonical basis.
    """
    rows = [list(v) for v in vectors if any(v)]
    r = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(rows[i][col]), i))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    done = done and rows[i][col] == 0
            if done:
                break
        if r < len(rows) and rows[r][col]:
            if rows[r][col] < 0:
                rows[r] = [-x for x in rows[r]]
            p = rows[r][col]
            for i in range(r):
                q = rows[i][col] // p
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
            r += 1
        rows = rows[:r] + [row for row in rows[r:] if any(row)]
    return rows[:r]


def lattice_basis(vectors: Iterable[Sequence], ncols: int) -> list[Vector]:
    """Canonical Z-basis (HNF rows) of the group generated by rational vectors."""
    vectors = [tuple(as_fraction(x) for x in v) for v in vectors]
    d = common_denominator(x for v in vectors for x in v)
    ints = [[(x * d).numerator for x in v] for v in vectors]
    return [tuple(Fraction(x, d) for x in row) for row in hermite_rows(ints, ncols)]


# ----------------------------------------------------------------------
# Rational row reduction
# ----------------------------------------------------------------------


def rref(A: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = A.to_rows()
    pivots = []
    r = 0
    for c in range(A.cols):
        p = next((i for i in range(r, A.rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(A.rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == A.rows:
            break
    return a[:r], pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1])


def _normalize_sign(v: list[Fraction]) -> tuple:
    lead = next((x for x in v if x), None)
    if lead is not None and lead < 0:
        v = [-x for x in v]
    return tuple(v)


def rational_kernel(A: Matrix) -> Matrix:
    """Columns spanning ``{x : A x = 0}`` over Q, one per free column of the RREF."""
    rows, pivots = rref(A)
    free = [c for c in range(A.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * A.cols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(_normalize_sign(v))
    return Matrix.from_columns(basis, A.cols)


def rational_rank_kernel_image(A: Matrix) -> tuple[int, Matrix, Matrix]:
    """Rank, kernel basis and image basis (pivot columns of ``A``)."""
    _, pivots = rref(A)
    image = Matrix.from_columns([A.col(p) for p in pivots], A.rows)
    return len(pivots), rational_kernel(A), image


def solve(A: Matrix, b: Sequence) -> Vector | None:
    """One rational solution of ``A x = b`` (free variables set to 0), or None."""
    b = [as_fraction(x) for x in b]
    if len(b) != A.rows:
        raise ValueError("right-hand side length mismatch")
    aug = A.hstack(Matrix.from_columns([b], A.rows)) if A.rows else Matrix.zeros(0, A.cols + 1)
    rows, pivots = rref(aug)
    if A.cols in pivots:
        return None
    x = [Fraction(0)] * A.cols
    for row, p in zip(rows, pivots):
        x[p] = row[A.cols]
    return tuple(x)


def inverse(A: Matrix) -> Matrix:
    n = A.rows
    if A.cols != n:
        raise ValueError("inverse of a non-square matrix")
    rows, pivots = rref(A.hstack(Matrix.identity(n)))
    if pivots[:n] != list(range(n)) or len([p for p in pivots if p < n]) < n:
        raise ValueError("matrix is singular")
    return Matrix.from_rows([r[n:] for r in rows], n)


def annihilator(vectors: Sequence[Sequence], n: int) -> Matrix:
    """Rows spanning the functionals vanishing on ``span(vectors)``."""
    if not vectors:
        return Matrix.identity(n)
    return rational_kernel(Matrix.from_rows(vectors, n)).T


# ----------------------------------------------------------------------
# Integer linear algebra built on SNF
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FgAbelianGroup:
    """``Z^free_rank + Z/t1 + Z/t2 + ...`` with ``t1 | t2 | ...``."""

    free_rank: int
    torsion_invariants: tuple = ()

    def __post_init__(self):
        t = tuple(int(x) for x in self.torsion_invariants)
        if any(x < 2 for x in t):
            raise ValueError("torsion invariants must be >= 2")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("torsion invariants must form a divisibility chain")
        object.__setattr__(self, "torsion_invariants", t)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion_invariants

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion_invariants]
        return " + ".join(parts) or "0"


def integer_kernel_basis(A: Matrix) -> Matrix:
    """Saturated Z-basis of ``{x in Z^n : A x = 0}`` as columns, HNF-canonical."""
    snf = smith_normal_form(A)
    r = snf.rank
    vecs = [snf.V.col(j) for j in range(r, A.cols)]
    ints = [[x.numerator for x in v] for v in vecs]
    return Matrix.from_columns(hermite_rows(ints, A.cols), A.cols)


def cokernel_invariants(A: Matrix) -> FgAbelianGroup:
    """Normal form of ``Z^rows / A Z^cols``."""
    snf = smith_normal_form(A)
    nonzero = [d for d in snf.invariants if d]
    return FgAbelianGroup(A.rows - len(nonzero), tuple(d for d in nonzero if d > 1))


def integral_preimage_lattice(M: Matrix, L: Matrix) -> Matrix:
    """Basis of ``{x in span_Z(L) : M x integral}``.

    Writing ``x = L y`` the condition is ``(M L) y`` integral. With
    ``M L = P / d`` for an integer matrix ``P`` and ``P = U^-1 D V^-1``,
    the substitution ``y = V w`` decouples it into ``d_i w_i = 0 mod d``.
    """
    if M.cols != L.rows:
        raise ValueError("M and L live in different ambient spaces")
    if rank(L) != L.cols:
        raise ValueError("lattice generators are linearly dependent")
    N = M @ L
    d = common_denominator(N.entries)
    P = N.scale(d)
    snf = smith_normal_form(P)
    inv = snf.invariants
    cols = []
    for j in range(L.cols):
        dj = inv[j] if j < len(inv) else 0
        step = d // gcd(d, dj)
        cols.append([step * x.numerator for x in snf.V.col(j)])
    Y = hermite_rows(cols, L.cols)
    return Matrix.from_columns([L.apply(y) for y in Y], L.rows)
