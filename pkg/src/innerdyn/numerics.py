"""Stable complex special functions, orbits, root finding, and derivative utilities.

Conventions: points of the plane are ``complex`` values; maps are callables
``complex -> complex`` unless stated otherwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DerivativeVanishes,
    NoConvergence,
    PoleHit,
    PoleProximity,
)

# Below this plane distance to a pole, double-precision tan/cot has no digits left.
POLE_TOL = 1e-9
# Escape bailout, far beyond any attracting dynamics in scope.
ESCAPE_BAILOUT = 1e10
# Central-difference step balancing truncation against rounding.
FD_STEP = 1e-6
# |Im z| above which tan/cot switch to the exponential asymptotic form.
_ASYMPTOTIC_IM = 20.0


@dataclass(frozen=True)
class RootSolveConfig:
    tol_residual: float = 1e-12
    max_iter: int = 100
    fd_step: float = FD_STEP

    def __post_init__(self):
        if not 0.0 < self.tol_residual < 1.0:
            raise ValueError("tol_residual must lie in (0, 1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not 0.0 < self.fd_step < 1e-3:
            raise ValueError("fd_step must lie in (0, 1e-3)")


def tan_pole_distance(z: complex) -> float:
    """Plane distance from z to the nearest pole pi/2 + k*pi of tan."""
    z = complex(z)
    k = round((z.real - math.pi / 2) / math.pi)
    return math.hypot(z.real - (math.pi / 2 + k * math.pi), z.imag)


def cot_pole_distance(z: complex) -> float:
    """Plane distance from z to the nearest pole k*pi of cot."""
    z = complex(z)
    k = round(z.real / math.pi)
    return math.hypot(z.real - k * math.pi, z.imag)


def stable_tan(z: complex, pole_tol: float = POLE_TOL) -> complex:
    """tan(z) with overflow-free asymptotics for |Im z| > 20.

    In the asymptotic range the value is +/- i (1 + r) with the correction
    r built from the exponentially small q = exp(-/+ 2iz), so no
    intermediate cosh/sinh can overflow.
    """
    z = complex(z)
    if tan_pole_distance(z) < pole_tol:
        raise PoleProximity(f"tan evaluated {tan_pole_distance(z):.3e} from a pole at z={z}")
    if z.imag > _ASYMPTOTIC_IM:
        q = cmath.exp(2j * z)
        return 1j * (1.0 - q) / (1.0 + q)
    if z.imag < -_ASYMPTOTIC_IM:
        q = cmath.exp(-2j * z)
        return -1j * (1.0 - q) / (1.0 + q)
    return cmath.tan(z)


def stable_cot(z: complex, pole_tol: float = POLE_TOL) -> complex:
    """cot(z) with the same asymptotic treatment as :func:`stable_tan`."""
    z = complex(z)
    if cot_pole_distance(z) < pole_tol:
        raise PoleProximity(f"cot evaluated {cot_pole_distance(z):.3e} from a pole at z={z}")
    if z.imag > _ASYMPTOTIC_IM:
        q = cmath.exp(2j * z)
        return -1j * (1.0 + q) / (1.0 - q)
    if z.imag < -_ASYMPTOTIC_IM:
        q = cmath.exp(-2j * z)
        return 1j * (1.0 + q) / (1.0 - q)
    return cmath.cos(z) / cmath.sin(z)


def tan_array(z: np.ndarray) -> np.ndarray:
    """Vectorised tan with the asymptotic branch; no pole guard (callers mask)."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    big_up = z.imag > _ASYMPTOTIC_IM
    big_dn = z.imag < -_ASYMPTOTIC_IM
    mid = ~(big_up | big_dn)
    with np.errstate(all="ignore"):
        out[mid] = np.tan(z[mid])
        if big_up.any():
            q = np.exp(2j * z[big_up])
            out[big_up] = 1j * (1.0 - q) / (1.0 + q)
        if big_dn.any():
            q = np.exp(-2j * z[big_dn])
            out[big_dn] = -1j * (1.0 - q) / (1.0 + q)
    return out


def central_diff(f: Callable[[complex], complex], z: complex, h: float = FD_STEP) -> complex:
    return (f(z + h) - f(z - h)) / (2.0 * h)


def cauchy_derivatives(
    f: Callable[[complex], complex],
    center: complex,
    order: int,
    radius: float,
    samples: int = 128,
) -> list[complex]:
    """Derivatives f^(k)(center), k = 0..order, via trapezoid Cauchy integrals.

    Spectrally accurate provided f is analytic on |z - center| <= radius;
    the radius must stay clear of any singularity.
    """
    nodes = np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = np.array([f(center + radius * w) for w in nodes])
    coeffs = np.fft.fft(vals) / samples  # coeffs[k] ~ a_k * radius^k
    out = []
    fact = 1.0
    for k in range(order + 1):
        if k > 0:
            fact *= k
        out.append(complex(coeffs[k]) * fact / radius**k)
    return out


def newton_holomorphic(
    f: Callable[[complex], complex],
    fprime: Optional[Callable[[complex], complex]],
    z0: complex,
    cfg: RootSolveConfig = RootSolveConfig(),
) -> complex:
    """Damped Newton iteration for a holomorphic map; returns z with |f(z)| <= tol.

    A ``None`` derivative handle means central finite differences with
    ``cfg.fd_step``. Steps are halved while the residual fails to decrease.
    """
    z = complex(z0)
    fz = f(z)
    deriv_tol = 1e-14
    for _ in range(cfg.max_iter):
        if abs(fz) <= cfg.tol_residual:
            return z
        dz = fprime(z) if fprime is not None else central_diff(f, z, cfg.fd_step)
        if abs(dz) < deriv_tol:
            raise DerivativeVanishes(f"|f'|={abs(dz):.3e} at iterate z={z}")
        step = -fz / dz
        for _ in range(60):
            z_new = z + step
            f_new = f(z_new)
            if abs(f_new) < abs(fz) or abs(f_new) <= cfg.tol_residual:
                break
            step *= 0.5
        else:
            raise NoConvergence(f"newton stalled at z={z}, |f|={abs(fz):.3e}")
        z, fz = z_new, f_new
    if abs(fz) <= cfg.tol_residual:
        return z
    raise NoConvergence(f"newton: |f|={abs(fz):.3e} after {cfg.max_iter} iterations at z={z}")


@dataclass
class OrbitResult:
    points: list[complex]
    escaped: bool = False

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def orbit(
    f: Callable[[complex], complex],
    z0: complex,
    n: int,
    bailout: float = ESCAPE_BAILOUT,
) -> OrbitResult:
    """(z0, f(z0), ..., f^n(z0)), truncated with escaped=True past the bailout.

    A ``PoleProximity`` raised by the map is converted to ``PoleHit`` with the
    iterate index.
    """
    pts = [complex(z0)]
    z = complex(z0)
    for k in range(n):
        try:
            z = f(z)
        except PoleProximity as exc:
            raise PoleHit(f"iterate {k + 1} of orbit from {z0}: {exc}") from exc
        pts.append(complex(z))
        if abs(z) > bailout or not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return OrbitResult(pts, escaped=True)
    return OrbitResult(pts, escaped=False)


# --- argument-principle zero counting ------------------------------------


class _ContourZero(Exception):
    pass


def _winding(f, gamma, n0: int, zero_tol: float, max_nodes: int) -> float:
    """Total winding of f along the closed parametric contour gamma: [0,1] -> C.

    Parameter intervals are bisected until every phase increment is below
    pi/2, which pins the branch of the argument.
    """
    ts = list(np.linspace(0.0, 1.0, n0, endpoint=False)) + [1.0]
    vals = {}

    def val(t):
        if t not in vals:
            w = f(gamma(t))
            if abs(w) < zero_tol:
                raise _ContourZero(t)
            vals[t] = w
        return vals[t]

    total = 0.0
    stack = [(ts[i], ts[i + 1]) for i in range(len(ts) - 1)]
    while stack:
        t0, t1 = stack.pop()
        d = cmath.phase(val(t1) / val(t0))
        if abs(d) <= math.pi / 2:
            total += d
        else:
            if len(vals) > max_nodes:
                raise NoConvergence("winding number refinement exceeded node budget")
            tm = 0.5 * (t0 + t1)
            stack.append((t0, tm))
            stack.append((tm, t1))
    return total / (2.0 * math.pi)


def rect_contour(re0: float, re1: float, im0: float, im1: float):
    c = [complex(re0, im0), complex(re1, im0), complex(re1, im1), complex(re0, im1)]

    def gamma(t: float) -> complex:
        s = (t % 1.0) * 4.0
        i = min(int(s), 3)
        return c[i] + (s - i) * (c[(i + 1) % 4] - c[i])

    return gamma


def circle_contour(center: complex, radius: float):
    def gamma(t: float) -> complex:
        return center + radius * cmath.exp(2j * math.pi * t)

    return gamma


def count_zeros(
    f: Callable[[complex], complex],
    gamma,
    n0: int = 256,
    zero_tol: float = 1e-13,
    max_nodes: int = 200000,
) -> int:
    """Number of zeros of f (with multiplicity) enclosed by the contour.

    Requires f analytic on and inside the contour. Raises ``_ContourZero``
    wrapped as NoConvergence if f vanishes on the contour itself.
    """
    try:
        w = _winding(f, gamma, n0, zero_tol, max_nodes)
    except _ContourZero as exc:
        raise NoConvergence(f"zero on counting contour near t={exc.args[0]}") from exc
    n = round(w)
    if abs(w - n) > 0.25:
        raise NoConvergence(f"winding number {w:.4f} is not close to an integer")
    return int(n)


# --- hyperbolic metrics ----------------------------------------------------


def disc_distance(z: complex, w: complex) -> float:
    """Hyperbolic distance in the unit disc (curvature -1): 2 artanh of the Mobius quotient."""
    num = abs(z - w)
    den = abs(1.0 - w.conjugate() * z)
    if num >= den:
        return math.inf
    return math.log((den + num) / (den - num))


def halfplane_distance(z: complex, w: complex) -> float:
    """Hyperbolic distance in the upper half-plane (curvature -1)."""
    if z.imag <= 0.0 or w.imag <= 0.0:
        raise ValueError("both points must lie in the open upper half-plane")
    t = 1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    return math.acosh(t)
