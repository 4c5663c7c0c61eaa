"""Finite and truncated-infinite Blaschke products of the unit disc.

Finite products are a phase times Mobius factors through zeros inside the
disc; a zero at the origin contributes the bare factor z. The truncated
infinite products carry a certified bound on the relative error of the
dropped tail, valid on a working disc |z| <= r < 1.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.optimize import brentq

from .errors import AccuracyUnreachable, DomainError
from .numerics import newton_holomorphic, RootSolveConfig

# Margin keeping zeros strictly inside the disc.
_ZERO_MODULUS_CAP = 1.0 - 1e-15
# Switch the finite product to log-space past this degree to dodge underflow.
_LOG_EVAL_DEGREE = 64


def _zero_sort_key(a: complex):
    return (abs(a), cmath.phase(a))


@dataclass(frozen=True)
class FiniteBlaschke:
    """e^{i phase} times the Blaschke factors through ``zeros``.

    Zeros are stored sorted by increasing modulus (ties by argument) so that
    serialisation and zero indexing are deterministic.
    """

    phase: float
    zeros: tuple[complex, ...] = ()

    def __post_init__(self):
        zs = tuple(sorted((complex(a) for a in self.zeros), key=_zero_sort_key))
        for a in zs:
            if abs(a) >= _ZERO_MODULUS_CAP:
                raise DomainError(f"zero {a} is not strictly inside the unit disc")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "phase", float(self.phase))

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def __call__(self, z: complex) -> complex:
        return eval_finite(self, z)

    def derivative(self, z: complex) -> complex:
        return eval_finite_deriv(self, z)

    def to_json(self) -> str:
        return json.dumps(
            {
                "type": "finite_blaschke",
                "phase": self.phase,
                "zeros": [[a.real, a.imag] for a in self.zeros],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FiniteBlaschke":
        d = json.loads(text)
        if d.get("type") != "finite_blaschke":
            raise DomainError("not a finite_blaschke record")
        return cls(d["phase"], tuple(complex(x, y) for x, y in d["zeros"]))


def _factor(a: complex, z: complex) -> complex:
    if a == 0:
        return z
    return (abs(a) / a) * (a - z) / (1.0 - a.conjugate() * z)


def _factor_deriv(a: complex, z: complex) -> complex:
    if a == 0:
        return 1.0 + 0.0j
    return (abs(a) / a) * (abs(a) ** 2 - 1.0) / (1.0 - a.conjugate() * z) ** 2


def eval_finite(B: FiniteBlaschke, z: complex) -> complex:
    z = complex(z)
    if B.degree <= _LOG_EVAL_DEGREE:
        out = cmath.exp(1j * B.phase)
        for a in B.zeros:
            out *= _factor(a, z)
        return out
    # log-space: prod |a_n| underflows for large degree
    acc = 1j * B.phase
    for a in B.zeros:
        f = _factor(a, z)
        if f == 0:
            return 0.0 + 0.0j
        acc += cmath.log(f)
    return cmath.exp(acc)


def eval_finite_deriv(B: FiniteBlaschke, z: complex) -> complex:
    """B'(z) by logarithmic differentiation, with a product-rule fallback near zeros."""
    z = complex(z)
    gap = min((abs(z - a) for a in B.zeros), default=1.0)
    if gap > 1e-8:
        val = eval_finite(B, z)
        s = 0.0 + 0.0j
        for a in B.zeros:
            s += _factor_deriv(a, z) / _factor(a, z)
        return val * s
    out = 0.0 + 0.0j
    for k in range(B.degree):
        term = cmath.exp(1j * B.phase) * _factor_deriv(B.zeros[k], z)
        for n, a in enumerate(B.zeros):
            if n != k:
                term *= _factor(a, z)
        out += term
    return out


# --- truncated infinite products -------------------------------------------


@dataclass(frozen=True)
class TruncatedInfiniteBlaschke:
    """First ``n_terms`` factors of an infinite Blaschke product.

    ``zero_rule`` generates the n-th zero (1-based); ``tail_bound`` is a
    certified sup over |z| <= radius of the relative error of the dropped
    factors, supplied by whoever builds the instance.
    """

    zero_rule: Callable[[int], complex]
    n_terms: int
    tail_bound: float
    radius: float = 0.999

    def __post_init__(self):
        if self.n_terms < 1:
            raise DomainError("n_terms must be positive")
        if not 0.0 < self.radius < 1.0:
            raise DomainError("working radius must lie in (0, 1)")
        if self.tail_bound < 0.0:
            raise DomainError("tail_bound must be nonnegative")

    def zeros(self) -> list[complex]:
        return [complex(self.zero_rule(n)) for n in range(1, self.n_terms + 1)]

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        out = 1.0 + 0.0j
        for a in self.zeros():
            out *= _factor(a, z)
        return out


# --- the sine-family product ------------------------------------------------

_SINE_TERM_CAP = 200000


def sine_zero(tau: float, n: int) -> float:
    """n-th positive zero (tau^n - 1)/(tau^n + 1), computed as tanh(n log(tau)/2)."""
    return math.tanh(0.5 * n * math.log(tau))


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not tau > 1.0 + 1e-9:
        raise DomainError(f"tau must exceed 1 + 1e-9, got {tau}")
    return tau


def sine_tail_bound(tau: float, n_terms: int, radius: float) -> float:
    """Certified relative error of dropping factors n > n_terms on |z| <= radius.

    Each dropped factor differs from 1 by at most (1 - a_n^2)(1 + r^2)/(1 - r^2)
    and 1 - a_n^2 <= 4/(tau^n + 1), so the summed log deviation is at most
    (1 + r^2)/(1 - r^2) * 4/(tau^N (tau - 1)).
    """
    tau = _check_tau(tau)
    geom = 4.0 / (tau**n_terms * (tau - 1.0)) if n_terms * math.log(tau) < 700 else 0.0
    t = (1.0 + radius**2) / (1.0 - radius**2) * geom
    return math.expm1(t) if t < 700 else math.inf


def _sine_terms_for(tau: float, accuracy: float, radius: float, cap: int = _SINE_TERM_CAP) -> int:
    n = 1
    while sine_tail_bound(tau, n, radius) > accuracy:
        n = n * 2 if n < 64 else n + 32
        if n > cap:
            raise AccuracyUnreachable(
                f"sine product needs more than {cap} terms for accuracy {accuracy} at tau={tau}"
            )
    return n


@dataclass(frozen=True)
class SineFamilyProduct:
    """Odd infinite Blaschke product z * prod (a_n^2 - z^2)/(1 - a_n^2 z^2), a_n = (tau^n-1)/(tau^n+1)."""

    tau: float
    n_terms: int
    tail_bound: float
    radius: float = 0.999

    @classmethod
    def build(cls, tau: float, accuracy: float = 1e-12, radius: float = 0.999) -> "SineFamilyProduct":
        tau = _check_tau(tau)
        n = _sine_terms_for(tau, accuracy, radius)
        return cls(tau=tau, n_terms=n, tail_bound=sine_tail_bound(tau, n, radius), radius=radius)

    def zeros(self) -> list[float]:
        return [sine_zero(self.tau, n) for n in range(1, self.n_terms + 1)]

    def as_truncated_blaschke(self) -> TruncatedInfiniteBlaschke:
        """Same function as a plain one-zero-per-factor truncation: 0, a_1, -a_1, a_2, ..."""

        def rule(n: int) -> complex:
            if n == 1:
                return 0.0 + 0.0j
            k, sign = divmod(n - 2, 2)
            a = sine_zero(self.tau, k + 1)
            return complex(a if sign == 0 else -a)

        return TruncatedInfiniteBlaschke(
            zero_rule=rule,
            n_terms=2 * self.n_terms + 1,
            tail_bound=self.tail_bound,
            radius=self.radius,
        )

    def __call__(self, z: complex) -> complex:
        return eval_sine_product(self, z)

    def derivative(self, z: complex) -> complex:
        return sine_product_deriv(self, z)

    def to_json(self) -> str:
        return json.dumps(
            {
                "type": "sine_product",
                "tau": self.tau,
                "n_terms": self.n_terms,
                "tail_bound": self.tail_bound,
                "radius": self.radius,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SineFamilyProduct":
        d = json.loads(text)
        if d.get("type") != "sine_product":
            raise DomainError("not a sine_product record")
        return cls(d["tau"], d["n_terms"], d["tail_bound"], d["radius"])


def eval_sine_product(g: SineFamilyProduct, z: complex, accuracy: float | None = None) -> complex:
    """Value of the truncated product; within tail_bound of the infinite one.

    Passing ``accuracy`` below the stored ``tail_bound`` extends the
    truncation on the fly (the instance itself is immutable).
    """
    z = complex(z)
    if abs(z) > g.radius:
        raise DomainError(f"|z|={abs(z):.6f} outside the working radius {g.radius}")
    n = g.n_terms
    if accuracy is not None and accuracy < g.tail_bound:
        n = _sine_terms_for(g.tau, accuracy, g.radius)
    out = z
    z2 = z * z
    for k in range(1, n + 1):
        a2 = sine_zero(g.tau, k) ** 2
        out *= (a2 - z2) / (1.0 - a2 * z2)
    return out


def sine_product_deriv(g: SineFamilyProduct, z: complex) -> complex:
    """Derivative of the truncated product by logarithmic differentiation.

    Valid away from the zeros {0, +/-a_n}; at z = 0 the derivative is the
    product of the a_n^2 and is returned directly.
    """
    z = complex(z)
    if z == 0:
        out = 1.0
        for k in range(1, g.n_terms + 1):
            out *= sine_zero(g.tau, k) ** 2
        return complex(out)
    val = eval_sine_product(g, z)
    s = 1.0 / z
    z2 = z * z
    for k in range(1, g.n_terms + 1):
        a2 = sine_zero(g.tau, k) ** 2
        s += -2.0 * z / (a2 - z2) + 2.0 * a2 * z / (1.0 - a2 * z2)
    return val * s


# --- multiplier <-> parameter maps ------------------------------------------


def lambda_of_tau(tau: float, accuracy: float = 1e-12) -> float:
    """prod a_n(tau)^2, with absolute error below ``accuracy`` via a log tail bound.

    The dropped tail satisfies -2 sum log a_n <= 8/(tau^N (tau-1)) once
    a_N >= 1/2, and the value is below 1, so the log bound transfers.
    """
    tau = _check_tau(tau)
    log_tau = math.log(tau)
    # tail of -2 sum log a_n drops below accuracy/2 once n log(tau) clears this
    need = math.log(8.0 / (0.5 * accuracy * (tau - 1.0)))
    acc = 0.0
    n = 0
    while True:
        n += 1
        a = math.tanh(0.5 * n * log_tau)
        acc += 2.0 * math.log(a)
        if acc < -745.0:
            # partial products only decrease; the true value is below double range
            return 0.0
        if a >= 0.5 and n * log_tau > need:
            break
        if n > _SINE_TERM_CAP:
            raise AccuracyUnreachable(f"lambda_of_tau needs too many terms at tau={tau}")
    return math.exp(acc)


def tau_of_lambda(lam: float) -> float:
    """The unique tau > 1 with lambda_of_tau(tau) = lam, by bracketed root finding."""
    lam = float(lam)
    if not 1e-12 < lam < 1.0 - 1e-12:
        raise DomainError(f"lambda must lie in (1e-12, 1-1e-12), got {lam}")
    # lambda ~ 1 - 4/tau for large tau, so the domain edge needs tau ~ 4e12
    lo, hi = 1.0 + 1e-8, 2.0
    while lambda_of_tau(hi) < lam:
        hi *= 2.0
        if hi > 1e14:
            raise AccuracyUnreachable("tau bracket expansion failed")
    while lambda_of_tau(lo) > lam:
        lo = 1.0 + (lo - 1.0) / 4.0
        if lo - 1.0 < 2e-9:
            raise AccuracyUnreachable("tau bracket shrink hit the domain edge")
    return float(brentq(lambda t: lambda_of_tau(t) - lam, lo, hi, xtol=1e-15, rtol=8.9e-16))


# --- degree-2 parabolic rational forms ---------------------------------------


def topfer_value(k: float, z: complex) -> complex:
    """(z^2 + k)/(k z^2 + 1)."""
    z2 = z * z
    return (z2 + k) / (k * z2 + 1.0)


def topfer_deriv(k: float, z: complex) -> complex:
    z2 = z * z
    return 2.0 * z * (1.0 - k * k) / (k * z2 + 1.0) ** 2


def topfer_deriv2(k: float, z: complex) -> complex:
    z2 = z * z
    return 2.0 * (1.0 - k * k) * (1.0 - 3.0 * k * z2) / (k * z2 + 1.0) ** 3


def solve_topfer_k() -> float:
    """The k in (0,1) making (z^2+k)/(kz^2+1) parabolic at z = 1.

    z = 1 is fixed for every k, so the solve is on the derivative condition
    g_k'(1) = 1; the second derivative is asserted to vanish there (the
    fixed point is triple).
    """
    k = newton_holomorphic(
        lambda k: topfer_deriv(k.real, 1.0) - 1.0,
        None,
        0.5 + 0.0j,
        RootSolveConfig(tol_residual=1e-15, max_iter=60, fd_step=1e-7),
    ).real
    assert abs(topfer_value(k, 1.0) - 1.0) < 1e-14
    assert abs(topfer_deriv2(k, 1.0)) < 1e-12, "fixed point at 1 should be triple"
    return k


def parabolic_degree2_blaschke() -> FiniteBlaschke:
    """(3z^2+1)/(3+z^2) in phase/zero form: zeros +/- i/sqrt(3), phase 0."""
    a = 1j / math.sqrt(3.0)
    return FiniteBlaschke(0.0, (a, -a))


# --- uniform distance on the closed disc --------------------------------------


def uniform_circle_distance(
    B1: Callable[[complex], complex],
    B2: Callable[[complex], complex],
    n_coarse: int = 4096,
    refine_rounds: int = 40,
) -> float:
    """sup |B1 - B2| over the unit circle, by a dense grid refined near maxima.

    By the maximum principle this equals the sup over the closed disc when
    both arguments are analytic on it.
    """

    def d(t: float) -> float:
        z = cmath.exp(2j * math.pi * t)
        return abs(B1(z) - B2(z))

    ts = [i / n_coarse for i in range(n_coarse)]
    vals = [d(t) for t in ts]
    best = 0.0
    order = sorted(range(n_coarse), key=lambda i: -vals[i])[:8]
    for i in order:
        lo = (i - 1) / n_coarse
        hi = (i + 1) / n_coarse
        # golden-section ascent on the bracket around the grid maximum
        gr = (math.sqrt(5.0) - 1.0) / 2.0
        a_, b_ = lo, hi
        c_ = b_ - gr * (b_ - a_)
        e_ = a_ + gr * (b_ - a_)
        fc, fe = d(c_), d(e_)
        for _ in range(refine_rounds):
            if fc > fe:
                b_, e_, fe = e_, c_, fc
                c_ = b_ - gr * (b_ - a_)
                fc = d(c_)
            else:
                a_, c_, fc = c_, e_, fe
                e_ = a_ + gr * (b_ - a_)
                fe = d(e_)
        best = max(best, fc, fe, vals[i])
    return best
