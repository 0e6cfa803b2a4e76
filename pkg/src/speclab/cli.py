"""Command-line surface: one subcommand per experiment.

Configuration comes from an optional key=value file plus flag overrides
(flags win).  Reports are deterministic for a fixed config and seed up to
the timestamp field.  Exit codes: 0 success, 1 certified-inequality
violation (a bug by definition), 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import math
import sys

from ._util import NumericalError, canonical_json, jsonable
from . import __version__
from . import manifolds as mf
from . import restriction as rn
from . import spectra as sp
from . import suites
from . import weyl as wl
from .uncertainty import InequalityViolation

MANIFOLD_CHOICES = ("circle", "torus2-flat", "torus2-warped", "sphere")


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    table = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                table[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return table


class Settings:
    """Merged view of config-file values and flag overrides; flags win."""

    def __init__(self, args: argparse.Namespace, known_keys):
        self.args = args
        self.config = load_config(args.config) if args.config else {}
        unknown = set(self.config) - set(known_keys)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        self.echo = dict(self.config)

    def get(self, key: str, default, cast=str):
        flag = getattr(self.args, key.replace("-", "_"), None)
        if flag is not None:
            self.echo[key] = str(flag)
            return flag
        if key in self.config:
            try:
                return cast(self.config[key])
            except ValueError as exc:
                raise ConfigError(f"config key {key}: {exc}") from exc
        self.echo.setdefault(key, str(default))
        return default


def _provenance(settings: Settings, extra: dict | None = None) -> dict:
    # the output path is not experiment configuration; reports must be
    # byte-identical for identical config + seed regardless of destination
    config = {k: v for k, v in sorted(settings.echo.items()) if k != "out"}
    block = {
        "tool": "speclab",
        "version": __version__,
        "config": config,
    }
    if extra:
        block.update(extra)
    return block


def _write_json(path: str, payload: dict) -> None:
    payload = dict(payload)
    payload["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(jsonable(payload)))


def _build_manifold(kind: str, metric: str, resolution: int | None = None):
    resolution = resolution or mf.DEFAULT_CIRCLE_RESOLUTION
    if kind == "circle":
        return mf.Circle1D(mf.profile_from_expression(metric), resolution)
    if kind == "torus2-flat":
        return mf.FlatTorus2D()
    if kind == "torus2-warped":
        return mf.WarpedTorus2D(mf.profile_from_expression(metric), resolution)
    if kind == "sphere":
        return mf.Sphere2()
    raise ConfigError(f"unknown manifold {kind!r}")


# ---------------------------------------------------------------------------
# subcommands


SPECTRUM_KEYS = ("manifold", "metric", "nmax", "lmax", "resolution", "out")


def cmd_spectrum(args) -> int:
    settings = Settings(args, SPECTRUM_KEYS)
    kind = settings.get("manifold", "circle")
    metric = settings.get("metric", "2+sin")
    out = settings.get("out", "spectrum.csv")
    resolution = settings.get("resolution", mf.DEFAULT_CIRCLE_RESOLUTION, int)
    if kind == "circle":
        manifold = _build_manifold(kind, metric, resolution)
        basis = sp.circle_basis(manifold, settings.get("nmax", 20, int))
    elif kind in ("torus2-flat", "torus2-warped"):
        manifold = _build_manifold(kind, metric, resolution)
        basis = sp.torus_basis(manifold, float(settings.get("lmax", 5, float)))
    elif kind == "sphere":
        basis = sp.sphere_basis(int(settings.get("lmax", 8, float)))
    else:
        raise ConfigError(f"unknown manifold {kind!r}")
    basis.to_csv(out)
    print(f"spectrum: wrote {basis.size} rows to {out}")
    return 0


UNCERTAINTY_KEYS = ("manifold", "draws", "seed", "out", "keep-certificates")


def cmd_uncertainty(args) -> int:
    settings = Settings(args, UNCERTAINTY_KEYS)
    kind = settings.get("manifold", "all")
    kinds = MANIFOLD_CHOICES if kind == "all" else (kind,)
    for k in kinds:
        if k not in MANIFOLD_CHOICES:
            raise ConfigError(f"unknown manifold {k!r}")
    draws = settings.get("draws", 100, int)
    seed = settings.get("seed", 0, int)
    keep = settings.get("keep-certificates", 1, int)
    report = suites.randomized_certificate_suite(kinds, draws=draws, seed=seed,
                                                 keep_certificates=bool(keep))
    report["provenance"] = _provenance(settings)
    out = settings.get("out", "uncertainty.json")
    _write_json(out, report)
    print(f"uncertainty: {report['valid']} valid draws, "
          f"{len(report['violations'])} violations -> {out}")
    if report["violations"]:
        for v in report["violations"]:
            print(f"VIOLATION draw={v['draw']} kind={v['kind']} window={v['window']} "
                  f"region={v['region']} lhs={v['lhs']:.12g} rhs={v['rhs_quant']:.12g}",
                  file=sys.stderr)
        raise InequalityViolation("quantitative uncertainty bound failed")
    return 0


SPHERE_KEYS = ("degrees", "band-constant", "reference-degree", "out")


def cmd_sphere_sharp(args) -> int:
    from . import sphere_sharp as ss

    settings = Settings(args, SPHERE_KEYS)
    degrees = [int(v) for v in str(settings.get("degrees", "4,16,64,256")).split(",")]
    const = settings.get("band-constant", None, float)
    ref = settings.get("reference-degree", 16, int)
    rows = ss.sharpness_sweep(degrees, band_constant=const, reference_degree=ref)
    out = settings.get("out", "sphere_sharp.csv")
    ss.sweep_to_csv(rows, out)
    products = [r.product for r in rows]
    print(f"sphere-sharp: degrees {degrees}, product spread "
          f"{max(products) / min(products):.4g} -> {out}")
    return 0


WEYL_KEYS = ("manifold", "metric", "lambda-max", "points", "out")


def cmd_weyl(args) -> int:
    settings = Settings(args, WEYL_KEYS)
    kind = settings.get("manifold", "torus2-flat")
    metric = settings.get("metric", "2+sin")
    lam_max = settings.get("lambda-max", 200.0, float)
    points = settings.get("points", 40, int)
    if kind == "circle":
        manifold = _build_manifold(kind, metric)
        n_max = int(math.ceil(lam_max * manifold.length / mf.TWO_PI)) + 1
        basis = sp.circle_basis(manifold, n_max)
    elif kind in ("torus2-flat", "torus2-warped"):
        basis = sp.torus_basis(_build_manifold(kind, metric), lam_max)
    elif kind == "sphere":
        l_max = int((-1 + math.sqrt(1 + 4 * lam_max ** 2)) / 2)
        basis = sp.sphere_basis(min(l_max, sp.MAX_SPHERE_DEGREE))
        lam_max = basis.lam_max
    else:
        raise ConfigError(f"unknown manifold {kind!r}")
    lo = max(2.0, lam_max / 32.0)
    scan = [lo + i * (lam_max - lo) / (points - 1) for i in range(points)]
    report = wl.counting_scan(basis, scan)
    exponent = wl.remainder_fit(report)
    out = settings.get("out", "weyl.csv")
    report.to_csv(out)
    print(f"weyl: {kind}, fitted remainder exponent {exponent:.4f} -> {out}")
    return 0


FOURIER_KEYS = ("kmin", "kmax", "out")


def cmd_fourier_ratio(args) -> int:
    from ._util import write_csv

    settings = Settings(args, FOURIER_KEYS)
    k_min = settings.get("kmin", 3, int)
    k_max = settings.get("kmax", 7, int)
    report = suites.bump_fourier_sweep(k_min, k_max)
    out = settings.get("out", "fourier_ratio.csv")
    write_csv(out, ("k", "R", "width", "neighborhood_measure", "fourier_ratio", "ratio"),
              [(r["k"], r["R"], r["width"], r["neighborhood_measure"],
                r["fourier_ratio"], r["ratio"]) for r in report["rows"]])
    print(f"fourier-ratio: min product {report['min_ratio']:.6g} -> {out}")
    return 0


RESTRICTION_KEYS = ("mode", "lambda-min", "lambda-max", "radii", "offset-scale",
                    "seed", "resolution", "out")


def cmd_restriction(args) -> int:
    settings = Settings(args, RESTRICTION_KEYS)
    mode = settings.get("mode", "tubular")
    seed = settings.get("seed", 0, int)
    out = settings.get("out", "restriction.json")
    if mode == "tubular":
        radii = [float(v) for v in str(settings.get("radii", "8,16,32")).split(",")]
        report = suites.tubular_sweep(
            lam_lo=settings.get("lambda-min", 20.0, float),
            lam_hi=settings.get("lambda-max", 60.0, float),
            radii=radii, grid_resolution=settings.get("resolution", 256, int), seed=seed)
        csv_path = str(out)
        csv_path = csv_path[:-5] + ".csv" if csv_path.endswith(".json") else csv_path + ".csv"
        from ._util import write_csv

        write_csv(csv_path,
                  ("lambda", "R", "window_distinct", "tube_measure", "lhs", "rhs", "ratio"),
                  [(t["lambda"], t["R"], t["window_distinct"], t["tube_measure"],
                    t["lhs"], t["rhs"], t["ratio"]) for t in report["reports"]])
        summary = (f"min ratio {report['min_ratio']:.6g}, "
                   f"max fitted exponent {report['max_fitted_exponent']:.4f}, "
                   f"sweep CSV {csv_path}")
    elif mode == "scan":
        report = suites.curve_offset_scan(
            lam_lo=settings.get("lambda-min", 10.0, float),
            lam_hi=settings.get("lambda-max", 50.0, float),
            offset_scale=settings.get("offset-scale", 32.0, float), seed=seed)
        summary = (f"ratio interval [{report['min_ratio']:.6g}, {report['max_ratio']:.6g}], "
                   f"widening {report['widening']:.4f}")
    else:
        raise ConfigError(f"unknown restriction mode {mode!r}")
    report["provenance"] = _provenance(settings)
    _write_json(out, report)
    print(f"restriction[{mode}]: {summary} -> {out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speclab",
        description="Spectral concentration and uncertainty experiments on model manifolds")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, keys, flags):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value configuration file")
        for flag, kwargs in flags.items():
            p.add_argument(flag, **kwargs)
        p.set_defaults(func=fn, known_keys=keys)
        return p

    add("spectrum", cmd_spectrum, SPECTRUM_KEYS, {
        "--manifold": dict(choices=MANIFOLD_CHOICES),
        "--metric": dict(),
        "--nmax": dict(type=int),
        "--lmax": dict(type=float),
        "--resolution": dict(type=int),
        "--out": dict(),
    })
    add("uncertainty", cmd_uncertainty, UNCERTAINTY_KEYS, {
        "--manifold": dict(choices=MANIFOLD_CHOICES + ("all",)),
        "--draws": dict(type=int),
        "--seed": dict(type=int),
        "--keep-certificates": dict(type=int),
        "--out": dict(),
    })
    add("sphere-sharp", cmd_sphere_sharp, SPHERE_KEYS, {
        "--degrees": dict(),
        "--band-constant": dict(type=float),
        "--reference-degree": dict(type=int),
        "--out": dict(),
    })
    add("weyl", cmd_weyl, WEYL_KEYS, {
        "--manifold": dict(choices=MANIFOLD_CHOICES),
        "--metric": dict(),
        "--lambda-max": dict(type=float),
        "--points": dict(type=int),
        "--out": dict(),
    })
    add("fourier-ratio", cmd_fourier_ratio, FOURIER_KEYS, {
        "--kmin": dict(type=int),
        "--kmax": dict(type=int),
        "--out": dict(),
    })
    add("restriction", cmd_restriction, RESTRICTION_KEYS, {
        "--mode": dict(choices=("tubular", "scan")),
        "--lambda-min": dict(type=float),
        "--lambda-max": dict(type=float),
        "--radii": dict(),
        "--offset-scale": dict(type=float),
        "--seed": dict(type=int),
        "--resolution": dict(type=int),
        "--out": dict(),
    })
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InequalityViolation as exc:
        print(f"inequality violation: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
