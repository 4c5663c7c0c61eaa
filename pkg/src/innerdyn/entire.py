"""Transcendental entire families, their fixed points, critical points, and
Koenigs linearizers.

Each family exposes ``value`` and ``deriv`` accepting scalars or numpy
arrays, a ``tag``, and a parameter dict for serialisation. Derivatives are
closed forms throughout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DomainError,
    NoConvergence,
    NotInBasin,
    WindowBoundaryZero,
)
from .numerics import (
    RootSolveConfig,
    central_diff,
    circle_contour,
    count_zeros,
    newton_holomorphic,
    orbit,
    rect_contour,
)

Z = Union[complex, np.ndarray]


@dataclass(frozen=True)
class ExpLambda:
    """f(z) = lam * e^z."""

    lam: complex
    tag = "exp"

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("lam must be nonzero")

    def value(self, z: Z) -> Z:
        return self.lam * np.exp(z)

    def deriv(self, z: Z) -> Z:
        return self.lam * np.exp(z)

    def deriv2(self, z: Z) -> Z:
        return self.lam * np.exp(z)

    def params(self) -> dict:
        return {"lam": _num(self.lam)}

    def __call__(self, z):
        return self.value(z)


@dataclass(frozen=True)
class SineLambda:
    """f(z) = lam * sin z for lam in (0, 1): both critical values in the basin of 0."""

    lam: float
    tag = "sine"

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise DomainError("lam must lie in (0, 1)")

    def value(self, z: Z) -> Z:
        return self.lam * np.sin(z)

    def deriv(self, z: Z) -> Z:
        return self.lam * np.cos(z)

    def deriv2(self, z: Z) -> Z:
        return -self.lam * np.sin(z)

    def params(self) -> dict:
        return {"lam": self.lam}

    def __call__(self, z):
        return self.value(z)


@dataclass(frozen=True)
class FatouLambda:
    """f(z) = lam + z + e^{-z} for lam > 0; commutes with z -> z + 2 pi i."""

    lam: float
    tag = "fatou"

    def __post_init__(self):
        if not self.lam > 0.0:
            raise DomainError("lam must be positive")

    def value(self, z: Z) -> Z:
        return self.lam + z + np.exp(-z)

    def deriv(self, z: Z) -> Z:
        return 1.0 - np.exp(-z)

    def deriv2(self, z: Z) -> Z:
        return np.exp(-z)

    def params(self) -> dict:
        return {"lam": self.lam}

    def __call__(self, z):
        return self.value(z)

    def fixed_point(self, n: int) -> complex:
        """-log(lam) + (2n+1) pi i; the full fixed-point lattice over n."""
        return complex(-math.log(self.lam), (2 * n + 1) * math.pi)


@dataclass(frozen=True)
class ZExp:
    """f(z) = lam * z * e^z."""

    lam: complex
    tag = "zexp"

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("lam must be nonzero")

    def value(self, z: Z) -> Z:
        return self.lam * z * np.exp(z)

    def deriv(self, z: Z) -> Z:
        return self.lam * (1.0 + z) * np.exp(z)

    def deriv2(self, z: Z) -> Z:
        return self.lam * (2.0 + z) * np.exp(z)

    def params(self) -> dict:
        return {"lam": _num(self.lam)}

    def __call__(self, z):
        return self.value(z)


@dataclass(frozen=True)
class PowerExp:
    """f(z) = lam * e^{z^q}."""

    lam: complex
    q: int
    tag = "powerexp"

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("lam must be nonzero")
        if self.q < 1:
            raise DomainError("q must be a positive integer")

    def value(self, z: Z) -> Z:
        return self.lam * np.exp(z**self.q)

    def deriv(self, z: Z) -> Z:
        return self.lam * self.q * z ** (self.q - 1) * np.exp(z**self.q)

    def deriv2(self, z: Z) -> Z:
        q = self.q
        return self.lam * q * z ** (q - 2) * (q - 1 + q * z**q) * np.exp(z**q)

    def params(self) -> dict:
        return {"lam": _num(self.lam), "q": self.q}

    def __call__(self, z):
        return self.value(z)


def _cos_sqrt(z: Z) -> Z:
    """cos(pi sqrt(z)) as an entire function of z.

    cos is even, so the value does not depend on the square-root branch and
    the composite has no cut; a short series handles the neighbourhood of 0.
    """
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    w = np.sqrt(np.where(small, 1.0, z))
    out = np.cos(np.pi * w)
    p2 = math.pi**2
    series = 1.0 - p2 * z / 2.0 + p2 * p2 * z * z / 24.0
    out = np.where(small, series, out)
    return out if out.shape else complex(out)


def _sinc_sqrt(z: Z) -> Z:
    """sin(pi sqrt(z)) / sqrt(z), again branch-free (odd/odd)."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    w = np.sqrt(np.where(small, 1.0, z))
    out = np.sin(np.pi * w) / w
    p2 = math.pi**2
    series = math.pi * (1.0 - p2 * z / 6.0 + p2 * p2 * z * z / 120.0)
    out = np.where(small, series, out)
    return out if out.shape else complex(out)


@dataclass(frozen=True)
class AlphaD:
    """f(z) = ((1 - cos(pi sqrt z))/2)^d: superattracting fixed points 0 and 1."""

    d: int
    tag = "alpha"

    def __post_init__(self):
        if self.d < 2:
            raise DomainError("d must be an integer >= 2")

    def base(self, z: Z) -> Z:
        return (1.0 - _cos_sqrt(z)) / 2.0

    def base_deriv(self, z: Z) -> Z:
        return math.pi * _sinc_sqrt(z) / 4.0

    def value(self, z: Z) -> Z:
        return self.base(z) ** self.d

    def deriv(self, z: Z) -> Z:
        return self.d * self.base(z) ** (self.d - 1) * self.base_deriv(z)

    def params(self) -> dict:
        return {"d": self.d}

    def __call__(self, z):
        return self.value(z)


@dataclass(frozen=True)
class RhoD:
    """f(z) = (alpha_d(z) + lam)/(1 + lam); parabolic on [0,1] at the bifurcation lam."""

    d: int
    lam: float
    tag = "rho"

    def __post_init__(self):
        if self.d < 2:
            raise DomainError("d must be an integer >= 2")
        if not self.lam >= 0.0:
            raise DomainError("lam must be nonnegative")

    def value(self, z: Z) -> Z:
        return (AlphaD(self.d).value(z) + self.lam) / (1.0 + self.lam)

    def deriv(self, z: Z) -> Z:
        return AlphaD(self.d).deriv(z) / (1.0 + self.lam)

    def params(self) -> dict:
        return {"d": self.d, "lam": self.lam}

    def __call__(self, z):
        return self.value(z)


def cstar_poly_coeffs(d: int) -> list[float]:
    """Coefficients 2*binom(d-1, j)/j of p for j = 1..d-1."""
    return [2.0 * math.comb(d - 1, j) / j for j in range(1, d)]


@dataclass(frozen=True)
class CstarMap:
    """f(z) = -z^2 exp(p(z) - c), p(z) = 2 sum binom(d-1,j) z^j / j, c = p(-1).

    Superattracting fixed points at 0 and -1 and no other critical points;
    0 is the only asymptotic value, and f^{-1}(0) = {0}.
    """

    d: int
    tag = "cstar"

    def __post_init__(self):
        if self.d < 2:
            raise DomainError("d must be an integer >= 2")

    def p(self, z: Z) -> Z:
        out = 0.0 * np.asarray(z, dtype=complex)
        for j, coef in enumerate(cstar_poly_coeffs(self.d), start=1):
            out = out + coef * np.asarray(z, dtype=complex) ** j
        return out if np.ndim(z) else complex(out)

    @property
    def c(self) -> float:
        return sum(
            coef * (-1.0) ** j for j, coef in enumerate(cstar_poly_coeffs(self.d), start=1)
        )

    def value(self, z: Z) -> Z:
        return -(np.asarray(z, dtype=complex) ** 2) * np.exp(self.p(z) - self.c)

    def deriv(self, z: Z) -> Z:
        z = np.asarray(z, dtype=complex)
        return -np.exp(self.p(z) - self.c) * 2.0 * z * (z + 1.0) ** (self.d - 1)

    def params(self) -> dict:
        return {"d": self.d}

    def __call__(self, z):
        return self.value(z)


@dataclass(frozen=True)
class CstarLift:
    """h(w) = 2w + p(e^w) - c + pi i, the exponential lift of the matching CstarMap.

    exp(h(w)) = f(exp(w)), and h((2k-1) pi i) = (4k-1) pi i.
    """

    d: int
    tag = "cstar-lift"

    def __post_init__(self):
        if self.d < 2:
            raise DomainError("d must be an integer >= 2")

    def value(self, w: Z) -> Z:
        base = CstarMap(self.d)
        return 2.0 * w + base.p(np.exp(w)) - base.c + 1j * math.pi

    def deriv(self, w: Z) -> Z:
        z = np.exp(w)
        out = 2.0 + 0.0 * np.asarray(w, dtype=complex)
        for j, coef in enumerate(cstar_poly_coeffs(self.d), start=1):
            out = out + coef * j * z**j
        return out if np.ndim(w) else complex(out)

    def params(self) -> dict:
        return {"d": self.d}

    def __call__(self, w):
        return self.value(w)


FAMILIES = {
    "exp": ExpLambda,
    "sine": SineLambda,
    "fatou": FatouLambda,
    "zexp": ZExp,
    "powerexp": PowerExp,
    "alpha": AlphaD,
    "rho": RhoD,
    "cstar": CstarMap,
    "cstar-lift": CstarLift,
}


def _num(x):
    x = complex(x)
    return x.real if x.imag == 0.0 else [x.real, x.imag]


def serialize_family(F) -> dict:
    return {"tag": F.tag, **F.params()}


def family_from_spec(spec: dict):
    spec = dict(spec)
    tag = spec.pop("tag")
    if tag not in FAMILIES:
        raise DomainError(f"unknown family tag {tag!r}")
    if "lam" in spec and isinstance(spec["lam"], list):
        spec["lam"] = complex(*spec["lam"])
    return FAMILIES[tag](**spec)


def eval_family(F, z: complex) -> tuple[complex, complex]:
    """Value and analytic derivative at z."""
    return F.value(z), F.deriv(z)


# --- fixed points and multipliers ----------------------------------------------


def exp_multiplier_map(tau: complex) -> complex:
    """lam = tau e^{-tau}: the exponential with a fixed point of multiplier tau at z = tau."""
    tau = complex(tau)
    if tau == 0:
        raise DomainError("tau must be nonzero")
    lam = tau * cmath.exp(-tau)
    f = ExpLambda(lam)
    assert abs(f.value(tau) - tau) <= 1e-13 * max(1.0, abs(tau))
    assert abs(f.deriv(tau) - tau) <= 1e-13 * max(1.0, abs(tau))
    return lam


def attracting_fixed_point(F, seed: complex, cfg: Optional[RootSolveConfig] = None) -> complex:
    """Fixed point reached from the seed: orbit until the step settles, then Newton polish.

    The pre-iteration keeps Newton inside its convergence basin even when
    the multiplier is close to 1.
    """
    cfg = cfg or RootSolveConfig(tol_residual=1e-13, max_iter=80)
    z = complex(seed)
    prev_step = math.inf
    for _ in range(200000):
        w = F.value(z)
        step = abs(w - z)
        z = w
        if step < 1e-8:
            break
        if not math.isfinite(step):
            raise NotInBasin(f"orbit from {seed} escaped")
        prev_step = step
    return newton_holomorphic(lambda u: F.value(u) - u, lambda u: F.deriv(u) - 1.0, z, cfg)


# --- critical points -------------------------------------------------------------


def _polish_deriv_zero(F, z0: complex) -> complex:
    """Newton on f'/f'' which has a simple zero at any zero of f'."""

    def h(z):
        d2 = F.deriv2(z) if hasattr(F, "deriv2") else central_diff(F.deriv, z)
        if abs(d2) < 1e-300:
            raise NoConvergence("second derivative vanished while polishing")
        return F.deriv(z) / d2

    return newton_holomorphic(h, None, z0, RootSolveConfig(tol_residual=1e-12, max_iter=80))


def critical_points(
    F,
    re0: float,
    re1: float,
    im0: float,
    im1: float,
    min_box: float = 1e-4,
) -> list[tuple[complex, int]]:
    """Zeros of f' in the window, with multiplicities, by argument-principle subdivision.

    Rectangles are split while they contain zeros and exceed ``min_box``;
    each terminal box is Newton-polished and the multiplicity read off a
    small counting circle. A zero within ~1e-9 of the window edge raises
    WindowBoundaryZero (the boundary count is then meaningless).
    """

    try:
        total = count_zeros(F.deriv, rect_contour(re0, re1, im0, im1))
    except NoConvergence as exc:
        raise WindowBoundaryZero(
            f"derivative vanishes on or near the window boundary "
            f"[{re0},{re1}]x[{im0},{im1}]: {exc}"
        ) from exc

    def split_counts(r0, r1, i0, i1, cnt, horizontal):
        # jitter the split line off any zero it happens to hit
        for frac in (0.5, 0.53, 0.47, 0.51, 0.49, 0.57):
            try:
                if horizontal:
                    rm = r0 + frac * (r1 - r0)
                    c = count_zeros(F.deriv, rect_contour(r0, rm, i0, i1))
                    return (r0, rm, i0, i1, c), (rm, r1, i0, i1, cnt - c)
                im_ = i0 + frac * (i1 - i0)
                c = count_zeros(F.deriv, rect_contour(r0, r1, i0, im_))
                return (r0, r1, i0, im_, c), (r0, r1, im_, i1, cnt - c)
            except NoConvergence:
                continue
        raise NoConvergence(
            f"could not place a zero-free split in [{r0},{r1}]x[{i0},{i1}]"
        )

    found: list[tuple[complex, int]] = []
    stack = [(re0, re1, im0, im1, total)]
    while stack:
        r0, r1, i0, i1, cnt = stack.pop()
        if cnt == 0:
            continue
        if max(r1 - r0, i1 - i0) < min_box:
            center = complex(0.5 * (r0 + r1), 0.5 * (i0 + i1))
            z = _polish_deriv_zero(F, center)
            radius = 2.0 * max(r1 - r0, i1 - i0)
            mult = count_zeros(F.deriv, circle_contour(z, radius))
            found.append((z, mult))
            continue
        horizontal = r1 - r0 >= i1 - i0
        lo_box, hi_box = split_counts(r0, r1, i0, i1, cnt, horizontal)
        stack.append(lo_box)
        stack.append(hi_box)

    # merge polished duplicates from adjacent boxes
    merged: list[tuple[complex, int]] = []
    for z, m in sorted(found, key=lambda t: (t[0].real, t[0].imag)):
        if merged and abs(z - merged[-1][0]) < 10 * min_box:
            merged[-1] = (merged[-1][0], merged[-1][1])
            continue
        merged.append((z, m))
    if sum(m for _, m in merged) != total:
        raise NoConvergence(
            f"critical point bookkeeping lost zeros: window count {total}, found {merged}"
        )
    return merged


# --- Koenigs linearisation --------------------------------------------------------


@dataclass
class KoenigsChart:
    """kappa with kappa(f(z)) = tau kappa(z), kappa(z*) = 0, kappa'(z*) = 1."""

    value: Callable[[complex], complex]
    fixed_point: complex
    multiplier: complex
    tol: float
    max_depth: int

    def __call__(self, z: complex) -> complex:
        return self.kappa(z)

    def kappa(self, z: complex) -> complex:
        """lim tau^{-n} (f^n(z) - z*), stopped when successive estimates settle."""
        return self.value(z)

    def functional_residual(self, f, points) -> float:
        return max(abs(self.kappa(f(p)) - self.multiplier * self.kappa(p)) for p in points)


def koenigs_chart(
    F,
    z_star: complex,
    tau: complex,
    tol: float = 1e-12,
    max_depth: int = 10000,
) -> KoenigsChart:
    """Linearising chart at a verified attracting fixed point with multiplier tau."""
    z_star = complex(z_star)
    tau = complex(tau)
    if not 0.0 < abs(tau) < 1.0:
        raise DomainError("koenigs chart needs an attracting multiplier, 0 < |tau| < 1")
    fval = F.value if hasattr(F, "value") else F
    if abs(fval(z_star) - z_star) > 1e-8:
        raise DomainError(f"{z_star} is not a fixed point (residual {abs(fval(z_star) - z_star):.2e})")

    def kappa(z: complex) -> complex:
        z = complex(z)
        w = z
        scale = 1.0 + 0.0j
        est_prev = None
        for n in range(1, max_depth + 1):
            w = fval(w)
            scale /= tau
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                raise NotInBasin(f"orbit of {z} left the plane while linearising")
            est = scale * (w - z_star)
            if est_prev is not None and abs(est - est_prev) <= tol * max(1.0, abs(est)):
                return est
            est_prev = est
        if abs(w - z_star) > 1e-6:
            raise NotInBasin(f"orbit of {z} does not converge to {z_star}")
        raise NoConvergence(f"koenigs estimates did not settle within {max_depth} iterations")

    return KoenigsChart(value=kappa, fixed_point=z_star, multiplier=tau, tol=tol, max_depth=max_depth)


# --- the bifurcation parameter of the parabolic family -----------------------------


def rho_bifurcation_point(d: int) -> tuple[float, float]:
    """(lam0, x0): parameter and abscissa where (alpha_d + lam)/(1 + lam) is
    tangent to the diagonal on (0, 1).

    Solved from the tangency system f(x) = x, f'(x) = 1, eliminated to a
    single equation (alpha'(x) - 1)(1 - x) + alpha(x) - x = 0 with
    lam = alpha'(x) - 1.
    """
    if d < 2:
        raise DomainError("d must be an integer >= 2")
    alpha = AlphaD(d)

    def phi(x: float) -> float:
        return (alpha.deriv(x).real - 1.0) * (1.0 - x) + alpha.value(x).real - x

    xs = np.linspace(1e-3, 0.999, 400)
    vals = [phi(float(x)) for x in xs]
    for i in range(len(xs) - 1):
        if vals[i] == 0.0 or (vals[i] < 0.0) != (vals[i + 1] < 0.0):
            x = brentq(phi, float(xs[i]), float(xs[i + 1]), xtol=1e-15, rtol=8.9e-16)
            lam = alpha.deriv(x).real - 1.0
            if 0.0 < lam < 1.0:
                return lam, x
    raise NoConvergence(f"no tangency with positive lam found for d={d}")


def rho_bifurcation_lambda0(d: int) -> float:
    """The lam > 0 separating orbits of 0 converging to an interior fixed
    point from orbits converging to 1; the tangency parameter of the family."""
    return rho_bifurcation_point(d)[0]


def rho_lambda0_by_orbit(d: int, tol: float = 1e-8, max_steps: int = 200000) -> float:
    """Independent cross-check: bisect lam on whether the orbit of 0 reaches 1.

    Below the bifurcation the orbit of the critical point 0 stalls at an
    interior attracting point; above it the orbit passes through and
    converges to 1.
    """
    if d < 2:
        raise DomainError("d must be an integer >= 2")
    alpha = AlphaD(d)

    def goes_to_one(lam: float) -> bool:
        x = 0.0
        prev = -1.0
        for _ in range(max_steps):
            x = (alpha.value(x).real + lam) / (1.0 + lam)
            if x > 0.999:
                return True
            if abs(x - prev) < 1e-15:
                return False
            prev = x
        return x > 0.999

    lo, hi = 1e-4, 0.5
    if goes_to_one(lo) or not goes_to_one(hi):
        raise NoConvergence("orbit bisection bracket invalid")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if goes_to_one(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def cstar_lift_value(d: int, w: complex) -> complex:
    """Lift value 2w + p(e^w) - c + pi i; exp of it equals the base map at e^w."""
    return complex(CstarLift(d).value(complex(w)))
