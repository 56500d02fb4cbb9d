"""Exact arithmetic in cyclotomic fields ``Q(zeta_N)``.

Elements are stored as rational coefficient vectors in the power basis
``1, zeta, ..., zeta^(phi(N)-1)``. Binary operations first embed both
operands into ``Q(zeta_lcm)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .exact_linear import as_fraction, format_rational


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _poly_divmod_int(num: list, den: list) -> tuple[list, list]:
    """Division of integer polynomials (low degree first) by a monic divisor."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        if c:
            q[i] = c
            for j, d in enumerate(den):
                num[i + j] -= c * d
    return q, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple:
    """Integer coefficients of the n-th cyclotomic polynomial, low degree first."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    p = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            p, rem = _poly_divmod_int(p, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def _power_table(n: int, top: int) -> tuple:
    """Reduced coordinates of ``zeta^j`` for ``j < top``."""
    phi = cyclotomic_polynomial(n)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(top):
        rows.append(tuple(cur))
        # multiply by zeta: shift up and fold the overflow back
        over = cur[-1]
        cur = [0] + cur[:-1]
        if over:
            cur = [c - over * p for c, p in zip(cur, phi[:d])]
    return tuple(rows)


def _reduce(coeffs: list, n: int) -> tuple:
    d = euler_phi(n)
    if len(coeffs) <= d:
        return tuple(as_fraction(c) for c in coeffs) + (Fraction(0),) * (d - len(coeffs))
    table = _power_table(n, len(coeffs))
    out = [Fraction(0)] * d
    for j, c in enumerate(coeffs):
        if c:
            for i, t in enumerate(table[j]):
                if t:
                    out[i] += c * t
    return tuple(out)


@dataclass(frozen=True, eq=False)
class CyclotomicScalar:
    order: int
    coeffs: tuple

    def __post_init__(self):
        c = _reduce(list(self.coeffs), self.order)
        if not any(c[1:]):
            # rationals always live in Q(zeta_1) so their serialization is canonical
            object.__setattr__(self, "order", 1)
            c = c[:1] or (Fraction(0),)
        object.__setattr__(self, "coeffs", c)

    # constructors ------------------------------------------------------

    @classmethod
    def rational(cls, x) -> CyclotomicScalar:
        return cls(1, (as_fraction(x),))

    @classmethod
    def root_of_unity(cls, n: int, k: int = 1) -> CyclotomicScalar:
        """``zeta_n^k = exp(2*pi*i*k/n)``."""
        k %= n
        c = [0] * (k + 1)
        c[k] = 1
        return cls(n, tuple(c))

    @classmethod
    def i(cls) -> CyclotomicScalar:
        return cls.root_of_unity(4, 1)

    @classmethod
    def exp_2pi_i(cls, r) -> CyclotomicScalar:
        """``exp(2*pi*i*r)`` for rational ``r``."""
        r = as_fraction(r)
        return cls.root_of_unity(r.denominator, r.numerator)

    # field plumbing ---------------------------------------------------

    def _coeffs_in(self, m: int) -> tuple:
        """Reduced coefficients of ``self`` inside ``Q(zeta_m)``."""
        if m % self.order:
            raise ValueError(f"Q(zeta_{self.order}) does not embed in Q(zeta_{m})")
        step = m // self.order
        c = [Fraction(0)] * (step * (len(self.coeffs) - 1) + 1)
        for j, x in enumerate(self.coeffs):
            c[j * step] = x
        return _reduce(c, m)

    def embed(self, m: int) -> CyclotomicScalar:
        """The same number written over ``Q(zeta_m)`` (rationals stay at order 1)."""
        return CyclotomicScalar(m, self._coeffs_in(m))

    def _common(self, other) -> tuple[int, tuple, tuple]:
        if not isinstance(other, CyclotomicScalar):
            other = CyclotomicScalar.rational(other)
        m = _lcm(self.order, other.order)
        return m, self._coeffs_in(m), other._coeffs_in(m)

    # arithmetic -------------------------------------------------------

    def __add__(self, other) -> CyclotomicScalar:
        m, a, b = self._common(other)
        return CyclotomicScalar(m, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> CyclotomicScalar:
        return CyclotomicScalar(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other) -> CyclotomicScalar:
        return self + (-other)

    def __rsub__(self, other) -> CyclotomicScalar:
        return (-self) + other

    def __mul__(self, other) -> CyclotomicScalar:
        if not isinstance(other, CyclotomicScalar):
            x = as_fraction(other)
            return CyclotomicScalar(self.order, tuple(x * c for c in self.coeffs))
        if other.order == 1:
            return self * other.coeffs[0]
        if self.order == 1:
            return other * self.coeffs[0]
        m, a, b = self._common(other)
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CyclotomicScalar(m, tuple(prod))

    __rmul__ = __mul__

    def times_root(self, n: int, k: int) -> CyclotomicScalar:
        """Multiply by ``zeta_n^k`` by shifting powers instead of a full product."""
        m = _lcm(self.order, n)
        a = self._coeffs_in(m)
        shift = (k * (m // n)) % m
        c = [Fraction(0)] * (shift + len(a))
        for j, x in enumerate(a):
            c[j + shift] = x
        return CyclotomicScalar(m, tuple(c))

    def conj(self) -> CyclotomicScalar:
        """Complex conjugation ``zeta -> zeta^(N-1)``."""
        n = self.order
        c = [Fraction(0)] * n
        for j, x in enumerate(self.coeffs):
            c[(-j) % n] += x
        return CyclotomicScalar(n, tuple(c))

    def inverse(self) -> CyclotomicScalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.order == 1:
            return CyclotomicScalar.rational(1 / self.coeffs[0])
        # norm trick: multiply by all non-trivial Galois conjugates
        n = self.order
        prod = CyclotomicScalar.rational(1)
        for k in range(2, n):
            if gcd(k, n) == 1:
                prod = prod * self.galois(k)
        norm = self * prod
        assert norm.is_rational()
        return prod * (1 / norm.to_rational())

    def galois(self, k: int) -> CyclotomicScalar:
        n = self.order
        c = [Fraction(0)] * n
        for j, x in enumerate(self.coeffs):
            c[(j * k) % n] += x
        return CyclotomicScalar(n, tuple(c))

    def __truediv__(self, other) -> CyclotomicScalar:
        if not isinstance(other, CyclotomicScalar):
            return self * (1 / as_fraction(other))
        return self * other.inverse()

    # predicates and conversions ---------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("scalar is not rational")
        return self.coeffs[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclotomicScalar):
            try:
                other = CyclotomicScalar.rational(other)
            except (TypeError, ValueError):
                return NotImplemented
        _, a, b = self._common(other)
        return a == b

    __hash__ = None

    def __bool__(self) -> bool:
        return not self.is_zero()

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        return sum(float(c) * z ** j for j, c in enumerate(self.coeffs) if c)

    def abs_squared(self) -> CyclotomicScalar:
        return self * self.conj()

    def enclosure(self, digits: int = 30) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """Rational intervals certified to contain the real and imaginary parts."""
        re_lo = re_hi = im_lo = im_hi = Fraction(0)
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            (clo, chi), (slo, shi) = _cos_sin_enclosure(self.order, j, digits)
            a, b = sorted((c * clo, c * chi))
            re_lo, re_hi = re_lo + a, re_hi + b
            a, b = sorted((c * slo, c * shi))
            im_lo, im_hi = im_lo + a, im_hi + b
        return (re_lo, re_hi), (im_lo, im_hi)

    def modulus_bounds(self, digits: int = 30) -> tuple[Fraction, Fraction]:
        """Rationals ``lo <= |x| <= hi``; they coincide when ``|x|`` is rational."""
        sq = self.abs_squared()
        if sq.is_rational():
            exact = _rational_sqrt(sq.to_rational())
            if exact is not None:
                return exact, exact
        (lo, hi), _ = sq.enclosure(digits)
        return _sqrt_lower(max(lo, Fraction(0)), digits), _sqrt_upper(hi, digits)

    def modulus(self) -> tuple[Fraction, bool]:
        """``(value, exact)``: ``|x|`` when it is rational, else a certified upper bound."""
        lo, hi = self.modulus_bounds(12)
        if lo == hi:
            return lo, True
        triangle = sum((abs(c) for c in self.coeffs), Fraction(0))
        return min(triangle, hi), False

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, d: dict) -> CyclotomicScalar:
        return cls(int(d["order"]), tuple(as_fraction(c) for c in d["coeffs"]))

    def __repr__(self) -> str:
        if self.is_rational():
            return f"CyclotomicScalar({format_rational(self.coeffs[0])})"
        terms = [f"{format_rational(c)}*z{self.order}^{j}" for j, c in enumerate(self.coeffs) if c]
        return "CyclotomicScalar(" + " + ".join(terms) + ")"


def _rational_sqrt(r: Fraction) -> Fraction | None:
    if r < 0:
        return None
    a, b = isqrt(r.numerator), isqrt(r.denominator)
    if a * a == r.numerator and b * b == r.denominator:
        return Fraction(a, b)
    return None


def _sqrt_upper(r: Fraction, digits: int = 12) -> Fraction:
    """A rational ``u >= sqrt(r)`` within ``10^-digits``."""
    scale = 10 ** digits
    return Fraction(isqrt(int(r * scale * scale)) + 1, scale)


def _sqrt_lower(r: Fraction, digits: int = 12) -> Fraction:
    """A rational ``l <= sqrt(r)`` within ``10^-digits``."""
    scale = 10 ** digits
    return Fraction(isqrt(int(r * scale * scale)), scale)


# pi to 36 decimals, truncated; pi lies in [_PI_LO, _PI_LO + 10^-36]
_PI_LO = Fraction(3141592653589793238462643383279502884, 10**36)
_PI_ERR = Fraction(1, 10**36)


@lru_cache(maxsize=None)
def _cos_sin_enclosure(n: int, j: int, digits: int):
    """Certified rational intervals for ``cos`` and ``sin`` of ``2*pi*j/n``.

    Taylor series at a truncated angle; the error budget covers the
    truncation of pi, of the angle, and the Lagrange remainder (all
    derivatives of sin and cos are bounded by 1).
    """
    j %= n
    flip = j * 2 > n  # use the angle in [0, pi] and mirror sin
    if flip:
        j = n - j
    work = digits + 10
    scale = 10**work
    theta = 2 * _PI_LO * j / n
    x = Fraction(int(theta * scale), scale)
    err = 2 * _PI_ERR * j / n + Fraction(1, scale)
    tol = Fraction(1, 10**digits)
    cos_t, sin_t = Fraction(0), Fraction(0)
    term, k = Fraction(1), 0  # term = x^k / k!
    while True:
        if k % 4 == 0:
            cos_t += term
        elif k % 4 == 1:
            sin_t += term
        elif k % 4 == 2:
            cos_t -= term
        else:
            sin_t -= term
        k += 1
        term = term * x / k
        if term < tol and k > 1:
            break
    err += term  # x^k / k! bounds the remainder of both partial sums
    out_scale = 10 ** (digits + 2)

    def interval(v):
        lo = Fraction(int((v - err) * out_scale) - 1, out_scale)
        hi = Fraction(int((v + err) * out_scale) + 1, out_scale)
        return lo, hi

    c, sn = interval(cos_t), interval(sin_t)
    if flip:
        sn = (-sn[1], -sn[0])
    return c, sn


ZERO = CyclotomicScalar.rational(0)
ONE = CyclotomicScalar.rational(1)
