"""Inner functions of the upper half-plane: a tan z + b and z - (lam/2) cot z.

Covers evaluation, fixed-point classification, the boundary curve of the
attracting region, the multiplier -> (a, b) solver, Denjoy-Wolff estimates,
and a vectorised classifier for parameter-plane grids.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DomainError,
    Inconclusive,
    NoConvergence,
    OutsideRegion,
    PoleHit,
)
from .numerics import (
    halfplane_distance,
    orbit,
    stable_cot,
    stable_tan,
    tan_array,
)

# |multiplier - 1| below this classifies as parabolic: Newton near a double
# root cannot resolve finer in double precision.
PARABOLIC_BAND = 1e-6
# Hyperbolic step below this after ~1e4 iterations marks zero hyperbolic step.
ZERO_STEP_THRESHOLD = 1e-3


@dataclass(frozen=True)
class TanFamily:
    """g(z) = a tan z + b with a > 0 and the canonical b in (-pi/2, pi/2]."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a > 0.0:
            raise DomainError("a must be positive")
        if not -math.pi / 2 < self.b <= math.pi / 2:
            raise DomainError("b must lie in (-pi/2, pi/2]")

    def __call__(self, z: complex) -> complex:
        return eval_tan_family(self, z)

    def derivative(self, z: complex) -> complex:
        t = stable_tan(z)
        return self.a * (1.0 + t * t)


@dataclass(frozen=True)
class CotFamily:
    """g(z) = z - lam * cot(z) / 2 for lam > 0; poles at the integer multiples of pi."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0.0:
            raise DomainError("lam must be positive")

    @property
    def nu(self) -> float:
        return self.lam / 2.0

    def __call__(self, z: complex) -> complex:
        return eval_cot_family(self, z)

    def derivative(self, z: complex) -> complex:
        s = cmath.sin(z)
        return 1.0 + self.nu / (s * s)


@dataclass(frozen=True)
class FixedPointRecord:
    location: complex
    multiplier: complex
    kind: str  # attracting-interior | attracting-boundary | parabolic | repelling
    residual: float
    multiplicity: int = 1

    def __post_init__(self):
        if self.kind not in {
            "attracting-interior",
            "attracting-boundary",
            "parabolic",
            "repelling",
        }:
            raise DomainError(f"unknown fixed point kind {self.kind!r}")


def eval_tan_family(fam: TanFamily, z: complex) -> complex:
    return fam.a * stable_tan(z) + fam.b


def eval_cot_family(fam: CotFamily, z: complex) -> complex:
    return z - fam.nu * stable_cot(z)


def boundary_curve_theta(a: float) -> float:
    """theta(a) = arccos(sqrt a) - sqrt(a) sqrt(1-a) on (0, 1]; the parabolic curve."""
    if not 0.0 < a <= 1.0:
        raise DomainError(f"a must lie in (0, 1], got {a}")
    r = math.sqrt(a)
    return math.acos(r) - r * math.sqrt(1.0 - a)


def region_sign_test(a, b):
    """True where a tan z + b has an interior attracting fixed point: a > 1 or |b| > theta(a)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    r = np.sqrt(np.clip(a, 0.0, 1.0))
    theta = np.arccos(r) - r * np.sqrt(np.clip(1.0 - a, 0.0, None))
    out = (a > 1.0) | (np.abs(b) > theta)
    return out if out.shape else bool(out)


def mu_from_ab(fam: TanFamily) -> complex:
    """The upper half-plane parameter 2(b + ai) of the conjugate exponential-type model."""
    return 2.0 * complex(fam.b, fam.a)


# --- scalar classification ----------------------------------------------------


def _interior_newton(fam: TanFamily, z0: complex, max_iter: int = 200) -> complex:
    """Damped Newton for g(z) = z keeping iterates in the open upper half-plane."""
    a, b = fam.a, fam.b
    z = complex(z0)
    t = cmath.tan(z)
    fz = a * t + b - z
    for _ in range(max_iter):
        if abs(fz) <= 1e-13:
            return z
        dz = a * (1.0 + t * t) - 1.0
        if abs(dz) < 1e-18:
            dz = 1e-18
        step = -fz / dz
        for _ in range(60):
            z_new = z + step
            if z_new.imag > 0.0:
                t_new = cmath.tan(z_new)
                f_new = a * t_new + b - z_new
                if abs(f_new) < abs(fz) or abs(f_new) <= 1e-13:
                    break
            step *= 0.5
        else:
            raise NoConvergence(f"interior newton stalled at z={z}, |F|={abs(fz):.2e}")
        z, t, fz = z_new, t_new, f_new
    if abs(fz) <= 1e-13:
        return z
    raise NoConvergence(f"interior newton: |F|={abs(fz):.2e} after {max_iter} iterations")


def _record_from_point(fam: TanFamily, z: complex, band: float) -> FixedPointRecord:
    t = cmath.tan(z)
    mult = fam.a * (1.0 + t * t)
    residual = abs(fam.a * t + fam.b - z)
    second = 2.0 * fam.a * t * (1.0 + t * t)  # g'' = 2a tan sec^2
    if abs(mult - 1.0) <= band:
        multiplicity = 3 if abs(second) <= 1e-3 else 2
        return FixedPointRecord(z, mult, "parabolic", residual, multiplicity)
    if abs(mult) < 1.0:
        kind = "attracting-interior" if z.imag > 1e-9 else "attracting-boundary"
        return FixedPointRecord(z, mult, kind, residual)
    return FixedPointRecord(z, mult, "repelling", residual)


def classify_tan_family(
    fam: TanFamily,
    parabolic_band: float = PARABOLIC_BAND,
    cross_check: bool = True,
) -> FixedPointRecord:
    """Locate and classify the distinguished (Denjoy-Wolff) fixed point.

    For a <= 1 the decreasing branch of a tan x + b - x between the critical
    abscissae +/- arccos(sqrt a) is probed for a sign change; its root is the
    attracting or parabolic real fixed point. Otherwise damped Newton from
    the asymptotic value b + ai finds the interior fixed point, with an
    orbit-seeded retry if Newton strays to a repelling real root.
    """
    a, b = fam.a, fam.b

    record: Optional[FixedPointRecord] = None
    if a <= 1.0:
        x_c = math.acos(math.sqrt(a))

        def F(x: float) -> float:
            return a * math.tan(x) + b - x

        f_hi = F(-x_c) if x_c > 0 else b  # equals b + theta(a) up to rounding
        f_lo = F(x_c) if x_c > 0 else b  # equals b - theta(a)
        if f_hi > 0.0 > f_lo:
            alpha = brentq(F, -x_c, x_c, xtol=1e-15, rtol=8.9e-16)
            record = _record_from_point(fam, complex(alpha), parabolic_band)

    if record is None:
        seed = complex(b, a)
        z = _interior_newton(fam, seed)
        record = _record_from_point(fam, z, parabolic_band)
        if record.kind == "repelling":
            # Newton strayed to a repelling real root; pull the seed along the orbit first
            z = _interior_newton(fam, orbit(fam, seed, 50).points[-1])
            record = _record_from_point(fam, z, parabolic_band)
        if record.kind == "repelling":
            raise NoConvergence(
                f"classification failed for (a,b)=({a},{b}): newton found repelling point "
                f"{record.location} with multiplier {record.multiplier}"
            )

    if cross_check and record.kind.startswith("attracting"):
        seed = complex(b, a)
        n = 4000
        try:
            tail = orbit(fam, seed, n).points[-1]
        except PoleHit as exc:
            raise NoConvergence(
                f"iteration cross-check hit a pole for (a,b)=({a},{b}); solved point was "
                f"{record.location} with multiplier {record.multiplier}"
            ) from exc
        # near-parabolic multipliers have not settled after n steps; the bound degrades gracefully
        slack = 2.0 * abs(seed - record.location) * abs(record.multiplier) ** n
        if abs(tail - record.location) > 1e-3 + slack:
            raise NoConvergence(
                f"solve/iteration disagreement for (a,b)=({a},{b}): "
                f"solved {record.location}, orbit tail {tail}"
            )
    return record


# --- multiplier -> (a, b) -----------------------------------------------------


def _axis_seed(m: float) -> complex:
    """Fixed point iy of g_{a,0} with real multiplier m in (0,1); a = y/tanh(y) > 1."""

    def kappa(y: float) -> float:
        th = math.tanh(y)
        return y * (1.0 - th * th) / th - m

    hi = 1.0
    while kappa(hi) > 0.0:
        hi *= 2.0
        if hi > 1e3:
            raise NoConvergence("axis seed bracketing failed")
    y = brentq(kappa, 1e-12, hi, xtol=1e-15, rtol=8.9e-16)
    return complex(0.0, y)


def _pin_newton(tau: complex, z0: complex, max_iter: int = 60, trust: float = 0.2) -> tuple[complex, bool]:
    """Solve Im(tau cos^2 z) = 0 and Im(z - (tau/2) sin 2z) = 0 for z in H.

    These pin a = tau cos^2 z and b = z - (tau/2) sin 2z to the real axis
    (the fixed-point and multiplier equations then hold identically). The
    2x2 real Newton uses the holomorphic derivatives of both pins; steps are
    trust-capped because the whole real axis is a degenerate solution
    manifold that uncontrolled steps can collapse onto.
    """
    z = complex(z0)
    for _ in range(max_iter):
        f1 = tau * cmath.cos(z) ** 2
        f2 = z - 0.5 * tau * cmath.sin(2.0 * z)
        g = np.array([f1.imag, f2.imag])
        if abs(g[0]) < 1e-13 * max(1.0, abs(f1)) and abs(g[1]) < 1e-13 * max(1.0, abs(f2)):
            return z, True
        d1 = -tau * cmath.sin(2.0 * z)
        d2 = 1.0 - tau * cmath.cos(2.0 * z)
        jac = np.array([[d1.imag, d1.real], [d2.imag, d2.real]])
        try:
            dx, dy = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            return z, False
        dz = complex(dx, dy)
        if abs(dz) > trust:
            dz *= trust / abs(dz)
        if z.imag + dz.imag <= 0.0:
            scale = 1.0
            while z.imag + scale * dz.imag <= 0.0 and scale > 1e-8:
                scale *= 0.5
            dz *= scale
        z += dz
    return z, False


def solve_ab_from_multiplier(tau: complex) -> tuple[TanFamily, FixedPointRecord]:
    """The unique (a, b) whose interior attracting fixed point has multiplier tau.

    Solved via the reduced system on the fixed point alone (a and b are real
    combinations of it), with adaptive continuation in arg(tau) from the
    purely imaginary-axis solution at real |tau|. A continuation stage is
    accepted only if Newton converged without collapsing toward the real
    axis; otherwise the stage is halved.
    """
    tau = complex(tau)
    if not 0.0 < abs(tau) < 1.0:
        raise DomainError(f"multiplier must satisfy 0 < |tau| < 1, got {tau}")
    m = abs(tau)
    phi = cmath.phase(tau)
    z = _axis_seed(m)
    s = 0.0
    step = min(0.05 / max(abs(phi), 1e-9), 0.25)
    stages = 0
    while s < 1.0:
        stages += 1
        if stages > 10000:
            raise NoConvergence(f"continuation exhausted for tau={tau}")
        s_next = min(1.0, s + step)
        z_new, ok = _pin_newton(m * cmath.exp(1j * phi * s_next), z)
        accepted = (
            ok
            and z_new.imag > 0.0
            and (z_new.imag > 0.3 * z.imag or z_new.imag > 0.05)
            and abs(z_new - z) < 0.8
        )
        if accepted:
            z, s = z_new, s_next
            step = min(step * 1.6, 0.25)
        else:
            step *= 0.5
            if step < 1e-7:
                raise NoConvergence(f"continuation stalled for tau={tau} at s={s}")

    a_c = tau * cmath.cos(z) ** 2
    b_c = z - 0.5 * tau * cmath.sin(2.0 * z)
    if abs(a_c.imag) > 1e-10 or abs(b_c.imag) > 1e-10:
        raise NoConvergence(f"pins not real: a={a_c}, b={b_c}")
    a, b = a_c.real, b_c.real
    if a <= 0.0:
        raise NoConvergence(f"solver produced nonpositive a={a}")
    # normalise b into (-pi/2, pi/2] by integer-pi translation conjugacy
    k = round(b / math.pi)
    if b - k * math.pi <= -math.pi / 2:
        k -= 1
    elif b - k * math.pi > math.pi / 2:
        k += 1
    b -= k * math.pi
    z -= k * math.pi

    fam = TanFamily(a, b)
    if not region_sign_test(a, b):
        raise OutsideRegion(
            f"solution (a,b)=({a},{b}) violates the attracting region for tau={tau}"
        )
    t = cmath.tan(z)
    record = FixedPointRecord(
        location=z,
        multiplier=a * (1.0 + t * t),
        kind="attracting-interior",
        residual=abs(a * t + b - z),
    )
    return fam, record


# --- Denjoy-Wolff estimation ---------------------------------------------------


@dataclass
class DenjoyWolffEstimate:
    kind: str  # interior | boundary | infinity
    point: Optional[complex]
    hyperbolic_step: float
    zero_step: bool
    iterations: int


def denjoy_wolff_estimate(
    g: Callable[[complex], complex],
    samples: Sequence[complex],
    n: int,
    zero_step_threshold: float = ZERO_STEP_THRESHOLD,
) -> DenjoyWolffEstimate:
    """Iterate the samples and report their common limit with a hyperbolic-step tag.

    Orbits that converge within budget are classified by the limit's
    imaginary part. Orbits still moving at the cap are classified by trend:
    persistently rising imaginary part means the Denjoy-Wolff point is
    infinity; a decaying imaginary part marks slow (parabolic-type)
    convergence to a boundary point, estimated by the final real part.

    The step tag implements the zero-hyperbolic-step criterion: the distance
    between consecutive iterates, measured at iteration n, below the
    threshold (meaningful for n around 1e4, where O(1/k) decay has reached
    ~1e-4 while boundary-attracting orbits plateau at log(1/multiplier)).
    """
    kinds = []
    points = []
    steps = []
    for z0 in samples:
        z = complex(z0)
        if z.imag <= 0.0:
            raise DomainError("samples must lie in the open upper half-plane")
        im_start = z.imag
        im_mid = z.imag
        step_h = math.inf
        rising = 0
        converged = False
        for k in range(1, n + 1):
            w = g(z)
            if w.imag > 0.0 and z.imag > 0.0:
                step_h = halfplane_distance(z, w)
            rising = rising + 1 if w.imag > z.imag else 0
            # baseline early enough that even O(k^-1/2) parabolic decay halves by the cap
            if k == n // 10:
                im_mid = w.imag
            moved = abs(w - z)
            z = w
            if moved < 1e-14:
                converged = True
                break
        steps.append(step_h)
        if converged:
            if z.imag > 1e-6:
                kinds.append("interior")
                points.append(z)
            else:
                kinds.append("boundary")
                points.append(complex(z.real))
        elif rising > min(50, n // 2) and z.imag > im_start + 10.0:
            kinds.append("infinity")
            points.append(None)
        elif z.imag < 0.5 * im_mid:
            kinds.append("boundary")
            points.append(complex(z.real))
        else:
            kinds.append("interior")
            points.append(z)

    if len(set(kinds)) != 1:
        raise Inconclusive(f"samples disagree after {n} iterations: kinds {kinds}")
    kind = kinds[0]
    if kind == "infinity":
        return DenjoyWolffEstimate(kind, None, steps[0], steps[0] < zero_step_threshold, n)
    spread = max(abs(p - points[0]) for p in points)
    if spread > 0.05:
        raise Inconclusive(f"samples disagree after {n} iterations: spread {spread:.2e}")
    return DenjoyWolffEstimate(kind, points[0], steps[0], steps[0] < zero_step_threshold, n)


# --- vectorised parameter-plane classification ---------------------------------


@dataclass
class RegionGridResult:
    a_values: np.ndarray
    b_values: np.ndarray
    interior_solve: np.ndarray  # bool (len(b), len(a))
    interior_iter: np.ndarray  # bool
    multiplier: np.ndarray  # complex at the solved fixed point
    sign_test: np.ndarray  # bool
    boundary_band: np.ndarray  # bool: within band of the parabolic curve
    iterations_used: int


def _grid_interior_newton(a, b, z, iters=60):
    """Vectorised damped Newton for a*tan(z)+b = z on flat arrays; stays in H."""
    for _ in range(iters):
        t = tan_array(z)
        fz = a * t + b - z
        fp = a * (1.0 + t * t) - 1.0
        fp = np.where(np.abs(fp) < 1e-18, 1e-18, fp)
        step = -fz / fp
        znew = z + step
        bad = ~np.isfinite(znew) | (znew.imag <= 0.0)
        for _ in range(30):
            if not bad.any():
                break
            step = np.where(bad, 0.5 * step, step)
            znew = z + step
            bad = ~np.isfinite(znew) | (znew.imag <= 0.0)
        z = np.where(bad, z, znew)
    return z


def region_grid(
    a_values: Sequence[float],
    b_values: Sequence[float],
    parabolic_band: float = PARABOLIC_BAND,
    iter_cap: int = 30000,
) -> RegionGridResult:
    """Classify an (a, b) grid twice: by fixed-point solves and by orbit iteration.

    The solve side finds the attracting real fixed point where the decreasing
    branch of a tan x + b - x changes sign, and otherwise Newton-solves for
    the interior fixed point (orbit-seeded retry on the stragglers). The
    iteration side runs the orbit of b + ai to its limit and thresholds the
    limit's imaginary part.
    """
    a_values = np.asarray(a_values, dtype=float)
    b_values = np.asarray(b_values, dtype=float)
    A, B = np.meshgrid(a_values, b_values)
    shape = A.shape

    sign_test = region_sign_test(A, B)
    theta = np.arccos(np.sqrt(np.clip(A, 0.0, 1.0)))
    theta = theta - np.sqrt(np.clip(A, 0.0, 1.0)) * np.sqrt(np.clip(1.0 - A, 0.0, None))
    boundary_band = (A <= 1.0 + parabolic_band) & (
        np.abs(np.abs(B) - theta) <= parabolic_band
    )

    # -- solve classifier
    interior_solve = np.zeros(shape, dtype=bool)
    multiplier = np.full(shape, np.nan, dtype=complex)

    small = A <= 1.0
    with np.errstate(all="ignore"):
        x_c = np.arccos(np.sqrt(np.where(small, A, 1.0)))
        f_hi = A * np.tan(-x_c) + B + x_c
        f_lo = A * np.tan(x_c) + B - x_c
    has_real = small & (f_hi > 0.0) & (f_lo < 0.0)

    if has_real.any():
        a_ = A[has_real]
        b_ = B[has_real]
        lo = -x_c[has_real]
        hi = x_c[has_real]
        for _ in range(80):  # bisection on the decreasing branch
            mid = 0.5 * (lo + hi)
            fm = a_ * np.tan(mid) + b_ - mid
            take_lo = fm > 0.0
            lo = np.where(take_lo, mid, lo)
            hi = np.where(take_lo, hi, mid)
        alpha = 0.5 * (lo + hi)
        multiplier[has_real] = a_ / np.cos(alpha) ** 2

    rest = ~has_real
    if rest.any():
        a_ = A[rest]
        b_ = B[rest]
        z = b_ + 1j * a_
        z = _grid_interior_newton(a_, b_, z)
        t = tan_array(z)
        res = np.abs(a_ * t + b_ - z)
        m = a_ * (1.0 + t * t)
        ok = (res < 1e-9) & (z.imag > 1e-8) & (np.abs(m) < 1.0)
        retry = ~ok
        if retry.any():
            # pull the stragglers along the orbit before a second Newton pass
            zr = b_[retry] + 1j * a_[retry]
            for _ in range(60):
                zr = a_[retry] * tan_array(zr) + b_[retry]
            zr = _grid_interior_newton(a_[retry], b_[retry], zr)
            tr = tan_array(zr)
            rr = np.abs(a_[retry] * tr + b_[retry] - zr)
            mr = a_[retry] * (1.0 + tr * tr)
            okr = (rr < 1e-9) & (zr.imag > 1e-8) & (np.abs(mr) < 1.0)
            z[retry] = np.where(okr, zr, z[retry])
            t = tan_array(z)
            m = a_ * (1.0 + t * t)
            res = np.abs(a_ * t + b_ - z)
            ok = (res < 1e-9) & (z.imag > 1e-8) & (np.abs(m) < 1.0)
        interior_solve[rest] = ok
        multiplier[rest] = m

    # -- iteration classifier
    interior_iter = np.zeros(shape, dtype=bool)
    flat_a = A.ravel()
    flat_b = B.ravel()
    z = flat_b + 1j * flat_a
    idx = np.arange(z.size)
    final = np.empty_like(z)
    final[:] = z
    used = 0
    block = 16
    while idx.size and used < iter_cap:
        za = z[idx]
        prev = za.copy()
        aa = flat_a[idx]
        bb = flat_b[idx]
        for _ in range(block):
            za = aa * tan_array(za) + bb
        used += block
        done = np.abs(za - prev) < 1e-11
        z[idx] = za
        final[idx] = za
        idx = idx[~done]
    final = final.reshape(shape)
    interior_iter = final.imag > 1e-5

    return RegionGridResult(
        a_values=a_values,
        b_values=b_values,
        interior_solve=interior_solve,
        interior_iter=interior_iter,
        multiplier=multiplier,
        sign_test=sign_test,
        boundary_band=boundary_band,
        iterations_used=used,
    )
