"""Exact Weyl algebra of a presymplectic group.

Elements are finite sums ``sum_i alpha_i W(b_i)`` with cyclotomic
coefficients and the product

    W(b) W(c) = exp(-i tau(b, c) / 2) W(b + c) = exp(-i*pi*r) W(b + c),

where ``r = b^T S c``. Since ``r`` is rational, every phase is a root of
unity of order ``2 * denominator(r)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .cyclotomic import ONE, ZERO, CyclotomicScalar
from .exact_linear import as_fraction, format_rational
from .presymplectic import PAGMorphism, PresymplecticGroup, center


class WeylError(ValueError):
    pass


def _key(b) -> tuple:
    return tuple(as_fraction(x) for x in b)


def _scalar(x) -> CyclotomicScalar:
    return x if isinstance(x, CyclotomicScalar) else CyclotomicScalar.rational(x)


def weyl_phase(r) -> CyclotomicScalar:
    """``exp(-i*pi*r)`` as a root of unity of order ``2 * den(r)``."""
    r = as_fraction(r)
    return CyclotomicScalar.root_of_unity(2 * r.denominator, -r.numerator)


@dataclass(frozen=True, eq=False)
class WeylElement:
    group: PresymplecticGroup
    terms: tuple = ()  # sorted ((key, coeff), ...), no zero coefficients

    @classmethod
    def from_terms(cls, group: PresymplecticGroup, terms: Iterable, check: bool = True) -> WeylElement:
        acc: dict = {}
        n = group.ambient_dim
        for b, alpha in terms:
            k = _key(b)
            if len(k) != n:
                raise WeylError(f"group element of length {len(k)} in ambient dimension {n}")
            if check and not group.contains(k):
                raise WeylError(f"{[format_rational(x) for x in k]} is not a member of the group")
            acc[k] = acc[k] + _scalar(alpha) if k in acc else _scalar(alpha)
        return cls(group, tuple(sorted((k, v) for k, v in acc.items() if not v.is_zero())))

    @classmethod
    def symbol(cls, group: PresymplecticGroup, b, coeff=1) -> WeylElement:
        return cls.from_terms(group, [(b, coeff)])

    @classmethod
    def unit(cls, group: PresymplecticGroup) -> WeylElement:
        return cls.from_terms(group, [((0,) * group.ambient_dim, 1)], check=False)

    @classmethod
    def zero(cls, group: PresymplecticGroup) -> WeylElement:
        return cls(group, ())

    def coefficient(self, b) -> CyclotomicScalar:
        k = _key(b)
        for key, v in self.terms:
            if key == k:
                return v
        return ZERO

    def _same(self, other: WeylElement):
        if not isinstance(other, WeylElement) or other.group != self.group:
            raise WeylError("Weyl elements over different groups")

    def __add__(self, other) -> WeylElement:
        if not isinstance(other, WeylElement):
            other = WeylElement.unit(self.group) * other
        self._same(other)
        return WeylElement.from_terms(self.group, self.terms + other.terms, check=False)

    __radd__ = __add__

    def __neg__(self) -> WeylElement:
        return WeylElement(self.group, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other) -> WeylElement:
        return self + (-other)

    def __rsub__(self, other) -> WeylElement:
        return (-self) + other

    def __mul__(self, other) -> WeylElement:
        if not isinstance(other, WeylElement):
            c = _scalar(other)
            return WeylElement.from_terms(self.group, [(k, v * c) for k, v in self.terms], check=False)
        return weyl_product(self, other)

    def __rmul__(self, other) -> WeylElement:
        return self * other

    def star(self) -> WeylElement:
        return weyl_star(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        if other.group != self.group or len(self.terms) != len(other.terms):
            return False
        return all(k1 == k2 and v1 == v2 for (k1, v1), (k2, v2) in zip(self.terms, other.terms))

    __hash__ = None

    def is_scalar(self) -> bool:
        return all(not any(k) for k, _ in self.terms)

    def scalar_part(self) -> CyclotomicScalar:
        return self.coefficient((0,) * self.group.ambient_dim)

    def to_json(self) -> list:
        return [
            {"group_element": [format_rational(x) for x in k], "coeff": v.to_json()}
            for k, v in self.terms
        ]

    @classmethod
    def from_json(cls, group: PresymplecticGroup, data: list) -> WeylElement:
        return cls.from_terms(
            group, [(t["group_element"], CyclotomicScalar.from_json(t["coeff"])) for t in data]
        )


def weyl_product(a: WeylElement, b: WeylElement) -> WeylElement:
    a._same(b)
    B = a.group
    acc: dict = {}
    Sb = {k: B.S.apply(k) for k, _ in b.terms}
    for x, alpha in a.terms:
        for y, beta in b.terms:
            r = sum((p * q for p, q in zip(x, Sb[y]) if p), Fraction(0))
            c = alpha * beta
            if r:
                c = c.times_root(2 * r.denominator, -r.numerator)
            k = tuple(p + q for p, q in zip(x, y))
            acc[k] = acc[k] + c if k in acc else c
    return WeylElement(B, tuple(sorted((k, v) for k, v in acc.items() if not v.is_zero())))


def weyl_star(a: WeylElement) -> WeylElement:
    return WeylElement(
        a.group, tuple(sorted((tuple(-x for x in k), v.conj()) for k, v in a.terms))
    )


def banach_norm_certified(a: WeylElement) -> tuple[Fraction, bool]:
    """``(value, exact)`` for the l1 norm ``sum |alpha_i|``.

    The value is exact when every coefficient has rational modulus and is a
    certified upper bound otherwise.
    """
    total, exact = Fraction(0), True
    for _, v in a.terms:
        m, e = v.modulus()
        total += m
        exact = exact and e
    return total, exact


def banach_norm(a: WeylElement) -> Fraction:
    return banach_norm_certified(a)[0]


def trivial_state_eval(a: WeylElement) -> CyclotomicScalar:
    """The state with ``omega(W(b)) = 0`` for ``b != 0`` and ``omega(1) = 1``."""
    return a.scalar_part()


def sum_abs_squared(a: WeylElement) -> CyclotomicScalar:
    total = ZERO
    for _, v in a.terms:
        total = total + v.abs_squared()
    return total


def state_norm_bound_holds(a: WeylElement) -> bool | None:
    """Decide ``omega(a* a)^(1/2) <= ||a||_1`` exactly.

    With at most one term both sides agree, which is an exact cyclotomic
    identity. Otherwise the gap is ``2 sum_{i<j} |alpha_i||alpha_j| > 0``,
    so refining certified enclosures always settles it; ``None`` is only
    returned if the precision schedule runs out.
    """
    w = trivial_state_eval(weyl_star(a) * a)
    if len(a.terms) <= 1:
        return w == sum_abs_squared(a)
    for digits in (30, 60, 120):
        (w_lo, w_hi), (i_lo, i_hi) = w.enclosure(digits)
        if i_lo > 0 or i_hi < 0:
            return False  # not even real
        bounds = [v.modulus_bounds(digits) for _, v in a.terms]
        lower = sum((lo for lo, _ in bounds), Fraction(0))
        upper = sum((hi for _, hi in bounds), Fraction(0))
        if w_hi <= lower * lower:
            return True
        if w_lo > upper * upper:
            return False
    return None


def is_central_symbol(group: PresymplecticGroup, b) -> bool:
    """Whether ``W(b)`` commutes with every Weyl symbol."""
    if not group.contains(b):
        raise WeylError("element is not a member of the group")
    return center(group).contains(b)


def commutator_check(group: PresymplecticGroup, b) -> bool:
    """Centrality of ``W(b)`` decided by evaluating group commutators.

    Free generators ``g`` are tested directly. A divisible generator ``v``
    contributes all its rational multiples, and if ``v^T S b = p/q`` is non
    zero then the multiple ``v / (2|p|)`` already gives a non-trivial phase.
    """
    Wb = WeylElement.symbol(group, b)
    one = WeylElement.unit(group)
    probes = list(group.group.free_gens.columns())
    for v in group.group.divisible_gens.columns():
        r = group.pairing(v, b)
        t = Fraction(1, 2 * abs(r.numerator)) if r else Fraction(1)
        probes.append(tuple(t * x for x in v))
    for g in probes:
        Wg = WeylElement.symbol(group, g)
        if Wg * Wb * weyl_star(Wg) * weyl_star(Wb) != one:
            return False
    return True


def ccr_push(phi: PAGMorphism, a: WeylElement) -> WeylElement:
    """``sum alpha_i W(b_i) -> sum alpha_i W(T b_i)``, summing colliding terms."""
    if a.group != phi.source:
        raise WeylError("element does not live over the morphism's source")
    return WeylElement.from_terms(phi.target, [(phi.T.apply(k), v) for k, v in a.terms], check=False)


# ----------------------------------------------------------------------
# Ideal certificate
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CertificateStep:
    description: str
    computed: WeylElement
    claimed: WeylElement

    def holds(self) -> bool:
        return self.computed == self.claimed


@dataclass(frozen=True, eq=False)
class IdealCertificate:
    """Derivation of a non-zero multiple of the unit from ``W(phi) - 1``.

    Every step records an element computed from the previous ones together
    with its claimed closed form; :meth:`verify` re-evaluates both.
    """

    group: PresymplecticGroup
    phi: tuple
    psi: tuple
    pairing: Fraction
    generator: WeylElement
    steps: tuple = field(default=())
    final: WeylElement = None
    scalar: CyclotomicScalar = None

    def verify(self) -> bool:
        B = self.group
        Wphi = WeylElement.symbol(B, self.phi)
        Wpsi = WeylElement.symbol(B, self.psi)
        one = WeylElement.unit(B)
        gen = Wphi - one
        if gen != self.generator or B.pairing(self.phi, self.psi) != self.pairing:
            return False
        phase = CyclotomicScalar.exp_2pi_i(-self.pairing)
        conj = weyl_star(Wpsi) * gen * Wpsi
        if conj != Wphi * phase - one:
            return False
        reduced = conj - gen * phase
        if reduced != one * (phase - 1) or reduced != self.final:
            return False
        if not all(s.holds() for s in self.steps):
            return False
        return self.final.is_scalar() and self.scalar == phase - 1 and not self.scalar.is_zero()

    def to_json(self) -> dict:
        return {
            "phi": [format_rational(x) for x in self.phi],
            "psi": [format_rational(x) for x in self.psi],
            "pairing_over_2pi": format_rational(self.pairing),
            "generator": self.generator.to_json(),
            "steps": [
                {"description": s.description, "result": s.computed.to_json(), "holds": s.holds()}
                for s in self.steps
            ],
            "final": self.final.to_json(),
            "scalar": self.scalar.to_json(),
            "scalar_approx": _fmt_complex(self.scalar.to_complex()),
        }


def _fmt_complex(z: complex) -> str:
    re_, im_ = round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0
    return f"{re_:.12g}{im_:+.12g}i"


def ideal_unit_certificate(group: PresymplecticGroup, phi, psi) -> IdealCertificate:
    """Show that a two-sided ideal containing ``W(phi) - 1`` contains the unit.

    Needs ``tau(phi, psi)`` outside ``2*pi*Z``.
    """
    phi, psi = _key(phi), _key(psi)
    for x in (phi, psi):
        if not group.contains(x):
            raise WeylError("certificate elements must belong to the group")
    r = group.pairing(phi, psi)
    if r.denominator == 1:
        raise WeylError("elements commute; no certificate")
    one = WeylElement.unit(group)
    Wphi = WeylElement.symbol(group, phi)
    Wpsi = WeylElement.symbol(group, psi)
    gen = Wphi - one
    phase = CyclotomicScalar.exp_2pi_i(-r)  # exp(-i tau)
    conj = WeylElement.symbol(group, tuple(-x for x in psi)) * gen * Wpsi
    step1 = CertificateStep("W(-psi) (W(phi) - 1) W(psi) = exp(-i tau) W(phi) - 1", conj, Wphi * phase - one)
    reduced = conj - gen * phase
    step2 = CertificateStep(
        "subtract exp(-i tau) (W(phi) - 1): result is (exp(-i tau) - 1) 1", reduced, one * (phase - 1)
    )
    return IdealCertificate(
        group=group, phi=phi, psi=psi, pairing=r, generator=gen,
        steps=(step1, step2), final=reduced, scalar=phase - 1,
    )


# ----------------------------------------------------------------------
# Floating-point backend for experiments
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ApproxWeylElement:
    """Complex-float shadow of a Weyl element; not used for any verdict."""

    S: tuple
    terms: tuple  # ((key, complex), ...)

    @classmethod
    def from_exact(cls, a: WeylElement) -> ApproxWeylElement:
        S = tuple(tuple(float(x) for x in a.group.S.row(i)) for i in range(a.group.S.rows))
        return cls(S, tuple((k, v.to_complex()) for k, v in a.terms))

    def __mul__(self, other: ApproxWeylElement) -> ApproxWeylElement:
        acc: dict = {}
        for x, a in self.terms:
            for y, b in other.terms:
                r = sum(float(x[i]) * self.S[i][j] * float(y[j]) for i in range(len(x)) for j in range(len(y)))
                k = tuple(p + q for p, q in zip(x, y))
                acc[k] = acc.get(k, 0) + a * b * cmath.exp(-1j * cmath.pi * r)
        return ApproxWeylElement(self.S, tuple(sorted(acc.items())))

    def close_to(self, exact: WeylElement, tol: float = 1e-9) -> bool:
        mine = dict(self.terms)
        theirs = {k: v.to_complex() for k, v in exact.terms}
        return all(abs(mine.get(k, 0) - theirs.get(k, 0)) <= tol for k in set(mine) | set(theirs))
