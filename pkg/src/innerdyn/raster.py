"""Escape/attraction rasterisation and connected-component counting.

Pixels are classified deterministically from their centre points. Component
counting uses 4-connectivity flood fill (conservative: no joins across pixel
corners), and "unbounded" is proxied by contact with the window frame.
"""

from __future__ import annotations

import csv
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import DomainError, ResolutionWarning

LABEL_UNDECIDED = 0
LABEL_BASIN = 1
LABEL_ESCAPING = 2
LABEL_IN_PREIMAGE = 3

LABEL_NAMES = {
    LABEL_UNDECIDED: "undecided",
    LABEL_BASIN: "basin",
    LABEL_ESCAPING: "escaping",
    LABEL_IN_PREIMAGE: "in-preimage",
}

MAX_PIXELS = 10**8


@dataclass(frozen=True)
class GridSpec:
    re0: float
    re1: float
    im0: float
    im1: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.re1 > self.re0 and self.im1 > self.im0):
            raise DomainError("window must have positive extent")
        if self.width < 1 or self.height < 1:
            raise DomainError("resolution must be positive")
        if self.width * self.height > MAX_PIXELS:
            raise DomainError("resolution exceeds the pixel budget")

    def centers(self) -> np.ndarray:
        """Complex pixel centres, row 0 at the top (im1 side)."""
        dx = (self.re1 - self.re0) / self.width
        dy = (self.im1 - self.im0) / self.height
        re = self.re0 + dx * (np.arange(self.width) + 0.5)
        im = self.im1 - dy * (np.arange(self.height) + 0.5)
        return re[np.newaxis, :] + 1j * im[:, np.newaxis]

    def scaled(self, res_factor: float = 1.0, window_factor: float = 1.0) -> "GridSpec":
        cx = 0.5 * (self.re0 + self.re1)
        cy = 0.5 * (self.im0 + self.im1)
        hw = 0.5 * (self.re1 - self.re0) * window_factor
        hh = 0.5 * (self.im1 - self.im0) * window_factor
        return GridSpec(
            cx - hw,
            cx + hw,
            cy - hh,
            cy + hh,
            int(round(self.width * res_factor)),
            int(round(self.height * res_factor)),
        )


@dataclass(frozen=True)
class ClassifyCriteria:
    """What to label: attraction targets, escape, and disc-preimage membership.

    ``preimage_center``/``preimage_radius`` label pixels z with
    |f(z) - center| <= radius (one application of the map); this takes
    priority over the basin label so that basin-minus-preimage regions are
    exactly the pixels labelled basin.
    """

    target: Optional[complex] = None
    attraction_radius: float = 1e-6
    max_iter: int = 256
    bailout: float = 1e10
    preimage_center: Optional[complex] = None
    preimage_radius: Optional[float] = None
    initial_exp: bool = False  # classify exp(pixel) instead of the pixel (lift renders)


@dataclass
class Grid:
    spec: GridSpec
    labels: np.ndarray  # uint8, shape (height, width)
    meta: dict = field(default_factory=dict)


def classify_grid(F, spec: GridSpec, criteria: ClassifyCriteria) -> Grid:
    """Deterministic per-pixel labelling by vectorised masked iteration."""
    z0 = spec.centers()
    if criteria.initial_exp:
        z0 = np.exp(z0)
    labels = np.zeros(z0.shape, dtype=np.uint8)

    with np.errstate(all="ignore"):
        if criteria.preimage_center is not None:
            if criteria.preimage_radius is None:
                raise DomainError("preimage criterion needs both center and radius")
            fz = F.value(z0)
            pre = np.abs(fz - criteria.preimage_center) <= criteria.preimage_radius
            pre &= np.isfinite(fz)
            labels[pre] = LABEL_IN_PREIMAGE

        active = labels == LABEL_UNDECIDED
        if criteria.target is not None or criteria.bailout:
            flat = z0[active].ravel()
            index = np.flatnonzero(active.ravel())
            out = labels.ravel()
            z = flat
            for _ in range(criteria.max_iter):
                if index.size == 0:
                    break
                z = F.value(z)
                bad = ~np.isfinite(z) | (np.abs(z) > criteria.bailout)
                out[index[bad]] = LABEL_ESCAPING
                if criteria.target is not None:
                    close = ~bad & (np.abs(z - criteria.target) < criteria.attraction_radius)
                    out[index[close]] = LABEL_BASIN
                    settled = bad | close
                else:
                    settled = bad
                if settled.any():
                    keep = ~settled
                    z = z[keep]
                    index = index[keep]
            labels = out.reshape(z0.shape)

    return Grid(spec=spec, labels=labels, meta={"criteria": criteria})


@dataclass
class ComponentCount:
    count: int
    sizes: list[int]  # pixel counts of the unbounded components
    bounded_sizes: list[int]
    label: int


def count_unbounded_components(grid: Grid, label: int, invert: bool = False) -> ComponentCount:
    """Flood-fill (4-connectivity) components of the label; count frame-touching ones.

    With ``invert`` the complement of the label is counted instead (used for
    tract regions, which are the complement of a disc preimage).
    """
    mask = grid.labels != label if invert else grid.labels == label
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
    comp, n = ndimage.label(mask, structure=structure)
    if n == 0:
        return ComponentCount(0, [], [], label)
    frame = np.zeros_like(mask)
    frame[0, :] = frame[-1, :] = True
    frame[:, 0] = frame[:, -1] = True
    touching = np.unique(comp[frame & mask])
    touching = touching[touching > 0]
    sizes = ndimage.sum_labels(np.ones_like(comp), comp, index=np.arange(1, n + 1)).astype(int)
    unbounded = sorted((int(sizes[i - 1]) for i in touching), reverse=True)
    bounded = sorted(
        (int(sizes[i - 1]) for i in range(1, n + 1) if i not in set(touching)), reverse=True
    )
    if sizes.min() < 10:
        warnings.warn(
            f"component of only {int(sizes.min())} pixels; grid may be undersampled",
            ResolutionWarning,
        )
    return ComponentCount(len(unbounded), unbounded, bounded, label)


def tract_grid(F, spec: GridSpec, center: complex, radius: float) -> Grid:
    """Label only the preimage of the disc D(center, radius); no iteration.

    The complement of the labelled set is the union of the tracts over D
    (components of the preimage of the disc's exterior), which is smooth and
    therefore resolution- and window-stable, unlike basin labels whose
    boundary hairs disconnect at the pixel lattice.
    """
    crit = ClassifyCriteria(
        target=None, max_iter=0, preimage_center=center, preimage_radius=radius
    )
    return classify_grid(F, spec, crit)


def count_tracts(F, spec: GridSpec, center: complex, radius: float) -> ComponentCount:
    """Unbounded components of the complement of f^{-1}(D(center, radius))."""
    g = tract_grid(F, spec, center, radius)
    return count_unbounded_components(g, LABEL_IN_PREIMAGE, invert=True)


# --- output ------------------------------------------------------------------


def _atomic_write(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_pgm(path: str, gray: np.ndarray) -> None:
    """Binary PGM (magic P5), one byte per pixel, row 0 first."""
    gray = np.asarray(gray, dtype=np.uint8)
    h, w = gray.shape
    _atomic_write(path, b"P5\n%d %d\n255\n" % (w, h) + gray.tobytes())


def write_ppm(path: str, rgb: np.ndarray) -> None:
    """Binary PPM (magic P6), one byte per channel."""
    rgb = np.asarray(rgb, dtype=np.uint8)
    h, w, c = rgb.shape
    if c != 3:
        raise DomainError("ppm needs an RGB array")
    _atomic_write(path, b"P6\n%d %d\n255\n" % (w, h) + rgb.tobytes())


_GRAYS = {
    LABEL_UNDECIDED: 0,
    LABEL_BASIN: 160,
    LABEL_ESCAPING: 255,
    LABEL_IN_PREIMAGE: 96,
}

_COLORS = {
    LABEL_UNDECIDED: (0, 0, 0),
    LABEL_BASIN: (170, 170, 170),
    LABEL_ESCAPING: (255, 255, 255),
    LABEL_IN_PREIMAGE: (70, 90, 160),
}


def labels_to_gray(labels: np.ndarray) -> np.ndarray:
    out = np.zeros(labels.shape, dtype=np.uint8)
    for lab, g in _GRAYS.items():
        out[labels == lab] = g
    return out


def labels_to_rgb(labels: np.ndarray) -> np.ndarray:
    out = np.zeros(labels.shape + (3,), dtype=np.uint8)
    for lab, c in _COLORS.items():
        out[labels == lab] = c
    return out


def component_stats_csv(path: str, grid: Grid, counts: Sequence[ComponentCount], meta: dict) -> None:
    """CSV of per-label component statistics, with run parameters as comment lines."""
    import io

    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf)
    w.writerow(["label", "label_name", "unbounded_components", "unbounded_sizes", "bounded_sizes"])
    for c in counts:
        w.writerow(
            [
                c.label,
                LABEL_NAMES.get(c.label, str(c.label)),
                c.count,
                ";".join(map(str, c.sizes)),
                ";".join(map(str, c.bounded_sizes)),
            ]
        )
    _atomic_write(path, buf.getvalue().encode())
