"""Command-line front end: basin/tract rendering, the tan-family atlas, and
pairing verification.

Exit codes: 0 success, 1 failed verification rows, 2 configuration error,
3 numeric failure. All file output is atomic (temp + rename).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import correspondence as co
from . import entire as en
from . import halfplane as hp
from . import raster as ra
from .errors import DomainError, NumericsError


class CliConfigError(Exception):
    pass


# family tag -> (window, resolution, iteration budget)
RENDER_DEFAULTS = {
    "exp": ((-4.0, 16.0, -10.0, 10.0), (800, 800), 512),
    "sine": ((-4 * math.pi, 4 * math.pi, -2 * math.pi, 2 * math.pi), (800, 400), 512),
    "zexp": ((-8.0, 8.0, -8.0, 8.0), (800, 800), 512),
    "powerexp": ((-2.0, 2.0, -2.0, 2.0), (800, 800), 512),
    "fatou": ((-8.0, 20.0, -14.0, 14.0), (800, 800), 2000),
    "alpha": ((-1.0, 2.0, -1.5, 1.5), (800, 800), 512),
    "rho": ((-1.0, 2.0, -1.5, 1.5), (800, 800), 4000),
    "cstar": ((-2.5, 1.5, -2.0, 2.0), (800, 800), 512),
    "cstar-lift": ((-4.0, 3.0, -2.0, 12.0), (700, 1400), 512),
}

# family tag -> default tract disc radius (centre is the located fixed point)
TRACT_RADIUS = {"exp": 0.8, "sine": 0.8, "powerexp": 0.6, "zexp": 0.8}

VERIFY_NAMES = ("exp", "parabolic-tan", "sine", "fatou", "topfer", "lambda0", "unisingular-forms")


def _parse_window(text: str) -> tuple[float, float, float, float]:
    parts = text.split(":")
    if len(parts) != 4:
        raise CliConfigError(f"window must be re0:re1:im0:im1, got {text!r}")
    try:
        re0, re1, im0, im1 = map(float, parts)
    except ValueError as exc:
        raise CliConfigError(f"window components must be numbers: {text!r}") from exc
    if re1 <= re0 or im1 <= im0:
        raise CliConfigError("window must have positive extent")
    return re0, re1, im0, im1


def _parse_res(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        w, h = int(w), int(h)
    except ValueError as exc:
        raise CliConfigError(f"resolution must be WIDTHxHEIGHT, got {text!r}") from exc
    if w < 1 or h < 1:
        raise CliConfigError("resolution must be positive")
    return w, h


def _parse_complex(text: str, flag: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise CliConfigError(f"{flag} must be a real or complex number, got {text!r}") from exc


def _build_family(args) -> object:
    tag = args.family
    lam = args.lam
    if tag == "exp":
        if args.tau is not None:
            return en.ExpLambda(en.exp_multiplier_map(_parse_complex(args.tau, "--tau")))
        if lam is None:
            raise CliConfigError("exp needs --lambda or --tau")
        return en.ExpLambda(_parse_complex(lam, "--lambda"))
    if tag == "sine":
        return en.SineLambda(float(_parse_complex(lam or "0.5", "--lambda").real))
    if tag == "fatou":
        return en.FatouLambda(float(_parse_complex(lam or "1.0", "--lambda").real))
    if tag == "zexp":
        if lam is None:
            raise CliConfigError("zexp needs --lambda")
        return en.ZExp(_parse_complex(lam, "--lambda"))
    if tag == "powerexp":
        return en.PowerExp(_parse_complex(lam or "0.1", "--lambda"), args.d or 3)
    if tag == "alpha":
        return en.AlphaD(args.d or 2)
    if tag == "rho":
        d = args.d or 2
        if lam is None or lam == "auto":
            return en.RhoD(d, en.rho_bifurcation_lambda0(d))
        return en.RhoD(d, float(_parse_complex(lam, "--lambda").real))
    if tag == "cstar":
        return en.CstarMap(args.d or 2)
    if tag == "cstar-lift":
        return en.CstarLift(args.d or 2)
    raise CliConfigError(f"unknown family {tag!r}")


def _default_target(F) -> complex | None:
    """The natural attraction target used when the user does not give one."""
    tag = F.tag
    if tag == "exp":
        return en.attracting_fixed_point(F, 0.0)
    if tag in ("sine", "zexp", "alpha"):
        return 0.0
    if tag == "powerexp":
        return en.attracting_fixed_point(F, F.lam)
    if tag == "rho":
        return en.attracting_fixed_point(F, 0.0)
    if tag == "cstar":
        return -1.0
    if tag == "cstar-lift":
        return -1.0  # target of the projected orbit under the base map
    return None  # fatou: escaping dynamics


def cmd_render(args) -> int:
    F = _build_family(args)
    window, res, budget = RENDER_DEFAULTS[F.tag]
    if args.window:
        window = _parse_window(args.window)
    if args.res:
        res = _parse_res(args.res)
    if args.max_iter:
        budget = args.max_iter
    spec = ra.GridSpec(*window, *res)

    target = _parse_complex(args.target, "--target") if args.target else _default_target(F)
    disc_center = _parse_complex(args.disc_center, "--disc-center") if args.disc_center else target
    disc_radius = args.disc_radius

    mode = args.criteria
    if mode == "tract" and disc_radius is None:
        disc_radius = TRACT_RADIUS.get(F.tag, 0.8)

    classified = F
    initial_exp = False
    if F.tag == "cstar-lift":
        classified = en.CstarMap(F.d)
        initial_exp = True

    if mode == "tract":
        if disc_center is None:
            raise CliConfigError("tract rendering needs a disc (no default target for this family)")
        crit = ra.ClassifyCriteria(
            target=None,
            max_iter=0,
            preimage_center=disc_center,
            preimage_radius=disc_radius,
            initial_exp=initial_exp,
        )
        grid = ra.classify_grid(classified, spec, crit)
        counts = [ra.count_unbounded_components(grid, ra.LABEL_IN_PREIMAGE, invert=True)]
    else:
        crit = ra.ClassifyCriteria(
            target=target,
            attraction_radius=args.attraction_radius,
            max_iter=budget,
            bailout=args.bailout,
            preimage_center=disc_center if mode == "both" else None,
            preimage_radius=(disc_radius or TRACT_RADIUS.get(F.tag, 0.8)) if mode == "both" else None,
            initial_exp=initial_exp,
        )
        grid = ra.classify_grid(classified, spec, crit)
        counts = [ra.count_unbounded_components(grid, ra.LABEL_BASIN)]

    stem = args.out
    if args.color:
        ra.write_ppm(stem + ".ppm", ra.labels_to_rgb(grid.labels))
        image = stem + ".ppm"
    else:
        ra.write_pgm(stem + ".pgm", ra.labels_to_gray(grid.labels))
        image = stem + ".pgm"
    meta = {
        "family": json.dumps(en.serialize_family(F)),
        "window": f"{window[0]}:{window[1]}:{window[2]}:{window[3]}",
        "resolution": f"{res[0]}x{res[1]}",
        "criteria": mode,
        "max_iter": crit.max_iter,
        "target": target,
        "disc_center": disc_center if mode != "basin" else None,
        "disc_radius": crit.preimage_radius,
    }
    ra.component_stats_csv(stem + "_stats.csv", grid, counts, meta)
    print(f"wrote {image} and {stem}_stats.csv")
    for c in counts:
        name = ra.LABEL_NAMES.get(c.label, str(c.label))
        kind = "tract" if mode == "tract" else name
        print(f"unbounded {kind} components: {c.count} (sizes {c.sizes[:6]})")
    return 0


def cmd_atlas(args) -> int:
    window = _parse_window(args.window) if args.window else (0.02, math.pi, -math.pi / 2 + 0.01, math.pi / 2)
    res = _parse_res(args.res) if args.res else (200, 200)
    a0, a1, b0, b1 = window
    if a0 <= 0:
        raise CliConfigError("atlas needs a > 0")
    a_vals = np.linspace(a0, a1, res[0])
    b_vals = np.linspace(b0, b1, res[1])
    result = hp.region_grid(a_vals, b_vals)

    # grey region = interior attracting; boundary curve overlaid in black
    img = np.where(result.interior_solve, 170, 255).astype(np.uint8)
    A, B = np.meshgrid(a_vals, b_vals)
    with np.errstate(invalid="ignore"):
        r = np.sqrt(np.clip(A, 0.0, 1.0))
        theta = np.arccos(r) - r * np.sqrt(np.clip(1.0 - A, 0.0, None))
    da = (a1 - a0) / max(res[0] - 1, 1)
    db = (b1 - b0) / max(res[1] - 1, 1)
    on_curve = (A <= 1.0) & (np.abs(np.abs(B) - theta) < max(da, db))
    img[on_curve] = 0
    ra.write_pgm(args.out + ".pgm", img[::-1, :])  # b increasing upward in the image

    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["a", "b", "class", "multiplier_re", "multiplier_im"])
    for i, b in enumerate(b_vals):
        for j, a in enumerate(a_vals):
            cls = "attracting-interior" if result.interior_solve[i, j] else "attracting-boundary"
            m = result.multiplier[i, j]
            w.writerow([f"{a:.10g}", f"{b:.10g}", cls, f"{m.real:.12g}", f"{m.imag:.12g}"])
    ra._atomic_write(args.out + ".csv", buf.getvalue().encode())
    agree = (result.interior_solve == result.interior_iter).mean()
    print(f"wrote {args.out}.pgm and {args.out}.csv")
    print(f"solve/iteration classifier agreement: {agree:.4%}")
    return 0


def cmd_verify(args) -> int:
    name = args.name
    if name == "exp":
        tau = _parse_complex(args.tau or "0.5", "--tau")
        report = co.verify_exp_pairing(tau)
    elif name == "parabolic-tan":
        report = co.verify_parabolic_tan()
    elif name == "sine":
        lam = float(_parse_complex(args.lam or "0.5", "--lambda").real)
        report = co.verify_sine_pairing(lam)
    elif name == "fatou":
        lam = float(_parse_complex(args.lam or "1.0", "--lambda").real)
        report = co.verify_fatou_pairing(lam)
    elif name == "topfer":
        report = co.topfer_report()
    elif name == "lambda0":
        report = co.lambda0_report(args.d or 2)
    elif name == "unisingular-forms":
        report = co.unisingular_forms_report()
    else:
        raise CliConfigError(f"unknown verification {name!r}; choose from {VERIFY_NAMES}")

    print(report.table())
    out = args.out or f"verify_{name}.json"
    ra._atomic_write(out, report.to_json().encode())
    print(f"wrote {out}")
    return 0 if report.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="innerdyn",
        description="Basin/tract rasters, the tan-family parameter atlas, and "
        "inner-function pairing verification for entire maps.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="rasterise basins, tracts, or both")
    render.add_argument("--family", required=True, choices=sorted(RENDER_DEFAULTS),
                        help="entire family to rasterise")
    render.add_argument("--lambda", dest="lam", default=None,
                        help="family parameter; 'auto' solves the bifurcation value for rho")
    render.add_argument("--tau", default=None, help="exp only: multiplier; sets lambda = tau e^{-tau}")
    render.add_argument("--d", type=int, default=None, help="integer degree parameter (alpha/rho/cstar)")
    render.add_argument("--q", dest="d", type=int, help="alias for --d (powerexp exponent)")
    render.add_argument("--window", default=None, help="re0:re1:im0:im1 (family default otherwise)")
    render.add_argument("--res", default=None, help="WIDTHxHEIGHT pixels (family default otherwise)")
    render.add_argument("--criteria", choices=("basin", "tract", "both"), default="basin",
                        help="basin attraction, tract region (disc-preimage complement), or both")
    render.add_argument("--target", default=None, help="attraction target (default: solved per family)")
    render.add_argument("--disc-center", default=None, help="tract disc centre (default: target)")
    render.add_argument("--disc-radius", type=float, default=None, help="tract disc radius")
    render.add_argument("--attraction-radius", type=float, default=1e-6,
                        help="distance at which a pixel counts as attracted")
    render.add_argument("--max-iter", type=int, default=None, help="iteration budget per pixel")
    render.add_argument("--bailout", type=float, default=1e10, help="escape modulus")
    render.add_argument("--color", action="store_true", help="write PPM instead of PGM")
    render.add_argument("--out", default="render", help="output stem for .pgm/.ppm and _stats.csv")
    render.set_defaults(func=cmd_render)

    atlas = sub.add_parser("atlas", help="classify the a*tan(z)+b parameter plane")
    atlas.add_argument("--window", default=None, help="a0:a1:b0:b1 (default 0.02:pi:-pi/2:pi/2)")
    atlas.add_argument("--res", default=None, help="WIDTHxHEIGHT samples (default 200x200)")
    atlas.add_argument("--out", default="atlas", help="output stem for .pgm and .csv")
    atlas.set_defaults(func=cmd_atlas)

    verify = sub.add_parser("verify", help="run a pairing verification and print its table")
    verify.add_argument("name", choices=VERIFY_NAMES)
    verify.add_argument("--tau", default=None, help="multiplier for the exp pairing")
    verify.add_argument("--lambda", dest="lam", default=None, help="parameter for sine/fatou pairings")
    verify.add_argument("--d", type=int, default=None, help="degree for lambda0")
    verify.add_argument("--out", default=None, help="JSON report path (default verify_<name>.json)")
    verify.set_defaults(func=cmd_verify)
    return p


_NEGATIVE_VALUE_FLAGS = ("--window", "--target", "--disc-center", "--lambda", "--tau")


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Join flag/value pairs whose value starts with '-' (e.g. --window -12:12:-6:6)."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if (
            a in _NEGATIVE_VALUE_FLAGS
            and i + 1 < len(argv)
            and argv[i + 1].startswith("-")
            and any(ch.isdigit() for ch in argv[i + 1])
        ):
            out.append(a + "=" + argv[i + 1])
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_negative_values(list(argv)))
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except CliConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericsError, DomainError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
