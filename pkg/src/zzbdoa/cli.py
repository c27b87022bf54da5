"""Command line front end: ``zzbdoa {bound,sweep,figure}``.

Exit codes: 0 success, 2 configuration error, 3 numerical degeneracy above
threshold, 4 I/O failure.
"""

import argparse
import copy
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import BoundInputs, zzb
from .config import ConfigError, build_config, read_document
from .fisher import DegenerateGeometryError, crb_matrix
from .montecarlo import BoundCurve, CurvePoint, InfeasibleSamplingError, snr_sweep

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_IO = 0, 2, 3, 4

CSV_HEADER = ("snr_db,zzb_deg,zzb_gen_deg,crb_deg,apb_deg,rmse_music_deg,"
              "coef_2pl,coef_gamma,degenerate_frac")

_ULA20 = {"type": "ula", "num_sensors": 20, "spacing": 1.0}
_PRIOR = {"min_deg": -60.0, "max_deg": 60.0, "min_separation_deg": 10.0}
_SWEEP = {"snapshots": 40, "snr_db": {"start": -40, "stop": 30, "step": 2},
          "trials": 1000, "seed": 20240101, "estimator": True, "grid_step_deg": 0.01}


def _preset(num_sources, sweep=None, prior=None, geometry=_ULA20, **ensemble):
    ens = {"num_sources": num_sources}
    ens.update(ensemble)
    return {
        "geometry": dict(geometry),
        "ensemble": ens,
        "prior": dict(_PRIOR, **(prior or {})),
        "sweep": dict(_SWEEP, **(sweep or {})),
    }


def figure_presets(name):
    """Ordered ``{tag: config document}`` for a built-in figure; first tag is primary."""
    bounds_only = {"estimator": False}
    if name == "fig3":
        return {"K1": _preset(1, prior={"min_separation_deg": 0.0})}
    if name == "fig4":
        return {"K5": _preset(5)}
    if name == "fig5":
        return {f"T{T}": _preset(5, sweep=dict(bounds_only, snapshots=T)) for T in (40, 20, 80)}
    if name == "fig6":
        return {f"K{K}": _preset(K, prior=None if K > 1 else {"min_separation_deg": 0.0})
                for K in (5, 1, 3, 7)}
    if name == "fig7":
        coherent = _preset(5, sweep=bounds_only, coherent_count=3,
                           beta_magnitude=[1.0, 0.9, 0.8], beta_phase_deg=[0.0, 0.0, 0.0],
                           random_coherent_phases=True, powers=[1.0, 1.0, 1.0])
        incoherent = _preset(5, sweep=bounds_only, powers=[1.0, 0.81, 0.64, 1.0, 1.0])
        return {"coherent": coherent, "incoherent": incoherent}
    if name == "fig8":
        return {"K11": _preset(11, geometry={"type": "coprime", "m": 3, "n": 5},
                               prior={"min_separation_deg": 5.0}, sweep=bounds_only)}
    raise ConfigError(f"figure: unknown figure {name!r} (expected fig3..fig8)")


FIGURES = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig8")


def config_digest(doc) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _fmt(x):
    if x is None:
        return ""
    return f"{x:.9g}"


def format_csv(curve: BoundCurve) -> str:
    lines = [CSV_HEADER]
    for p in curve:
        lines.append(",".join(_fmt(v) for v in (
            p.snr_db, p.zzb_deg, p.zzb_generalized_deg, p.crb_deg, p.apb_deg, p.rmse_deg,
            p.coef_pl_mean, p.coef_gamma_mean, p.degenerate_fraction)))
    return "\n".join(lines) + "\n"


def format_manifest(doc, curve, seed, wall_clock, extra=None) -> str:
    items = [
        ("config_digest", config_digest(doc)),
        ("tool_version", __version__),
        ("master_seed", str(seed)),
        ("wall_clock_s", f"{wall_clock:.3f}"),
    ]
    for p in curve:
        items.append((f"degenerate_fraction[{_fmt(p.snr_db)}]", _fmt(p.degenerate_fraction)))
    items.extend((extra or {}).items())
    return "".join(f"{k}={v}\n" for k, v in items)


def render_svg(curve: BoundCurve, title="") -> str:
    """Minimal log-scale line chart of the RMSE columns (no plotting dependency)."""
    width, height, pad = 640, 420, 60
    series = [("zzb_deg", "ZZB", "#1f77b4"), ("zzb_generalized_deg", "generalized ZZB", "#ff7f0e"),
              ("crb_deg", "CRB", "#2ca02c"), ("apb_deg", "APB", "#7f7f7f"),
              ("rmse_deg", "MUSIC", "#d62728")]
    x = curve.snr_db
    cols = {key: curve.column(key) for key, _, _ in series}
    finite = np.concatenate([v[np.isfinite(v) & (v > 0)] for v in cols.values()])
    if x.size == 0 or finite.size == 0:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"></svg>\n'
    ylo, yhi = np.floor(np.log10(finite.min())), np.ceil(np.log10(finite.max()))
    yhi = max(yhi, ylo + 1)
    xlo, xhi = x.min(), max(x.max(), x.min() + 1)

    def sx(v):
        return pad + (v - xlo) / (xhi - xlo) * (width - 2 * pad)

    def sy(v):
        return height - pad - (np.log10(v) - ylo) / (yhi - ylo) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="black"/>',
           f'<text x="{width / 2}" y="{pad / 2}" text-anchor="middle">{title}</text>',
           f'<text x="{width / 2}" y="{height - 15}" text-anchor="middle">SNR (dB)</text>',
           f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" '
           'text-anchor="middle">RMSE (deg)</text>']
    for e in range(int(ylo), int(yhi) + 1):
        out.append(f'<text x="{pad - 5}" y="{sy(10.0 ** e) + 4:.1f}" text-anchor="end">1e{e}</text>')
    for i, (key, label, color) in enumerate(series):
        y = cols[key]
        ok = np.isfinite(y) & (y > 0)
        if not ok.any():
            continue
        pts = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in zip(x[ok], y[ok]))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = pad + 15 + 14 * i
        out.append(f'<line x1="{width - pad - 110}" y1="{ly}" x2="{width - pad - 90}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{width - pad - 85}" y="{ly + 4}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(path: Path, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _apply_overrides(doc, args):
    doc = copy.deepcopy(doc)
    if args.trials is not None:
        doc["sweep"]["trials"] = args.trials
    if args.seed is not None:
        doc["sweep"]["seed"] = args.seed
    if args.no_estimator:
        doc["sweep"]["estimator"] = False
    return doc


def _run_sweep_docs(docs: dict, out: Path, threads: int, title: str) -> int:
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for i, (tag, doc) in enumerate(docs.items()):
        config, _ = build_config(doc)
        start = time.perf_counter()
        curve = snr_sweep(config, threads=threads)
        elapsed = time.perf_counter() - start
        csv = format_csv(curve)
        names = [f"results_{tag}"] if len(docs) > 1 else []
        if i == 0:
            names.insert(0, "results")
        for name in names:
            _write(out / f"{name}.csv", csv)
            _write(out / f"{name.replace('results', 'manifest')}.txt",
                   format_manifest(doc, curve, config.master_seed, elapsed, {"variant": tag}))
            _write(out / f"{name.replace('results', 'plot')}.svg", render_svg(curve, f"{title} {tag}"))
        if any(p.unreliable for p in curve):
            print(f"warning: {tag}: degenerate Fisher information in more than 1% of trials",
                  file=sys.stderr)
            status = EXIT_DEGENERATE
    return status


def _default_doas(config):
    sc = config.scenario
    K = sc.ensemble.num_sources
    edges = np.linspace(sc.prior_min, sc.prior_max, K + 1)
    return 0.5 * (edges[:-1] + edges[1:])


def _run_bound(doc, out: Path) -> int:
    config, point = build_config(doc)
    point = point or {}
    sc = config.scenario
    snr_db = point.get("snr_db", 0.0)
    snr_db = -np.inf if snr_db in (None, "-inf") else float(snr_db)
    if "doas_deg" in point:
        thetas = np.deg2rad(np.asarray(point["doas_deg"], float))
        if thetas.size != sc.ensemble.num_sources:
            raise ConfigError("point.doas_deg: length differs from ensemble.num_sources")
    else:
        thetas = _default_doas(config)
    if np.isneginf(snr_db):
        # zero SNR: no information at all, only the prior term survives
        ens, fisher = sc.ensemble, None
        snrs = np.zeros_like(ens.snrs)
    else:
        ens = sc.ensemble.with_snr_db(snr_db)
        snrs = ens.snrs
        try:
            fisher = crb_matrix(sc.geometry, ens, thetas, sc.snapshots, config.fim_method)
        except DegenerateGeometryError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
    value = zzb(BoundInputs(sc.geometry.num_sensors, sc.snapshots, snrs, ens.beta,
                            sc.prior_width, fisher))
    deg = lambda v: float(np.rad2deg(np.sqrt(v)))  # noqa: E731
    point_row = CurvePoint(snr_db, deg(value.zzb), deg(value.zzb_generalized), deg(value.crb),
                           deg(value.apb), None, value.coef_pl, value.coef_gamma, 0.0)
    curve = BoundCurve([point_row])
    out.mkdir(parents=True, exist_ok=True)
    csv = format_csv(curve)
    _write(out / "results.csv", csv)
    _write(out / "manifest.txt", format_manifest(doc, curve, config.master_seed, 0.0))
    print(f"zzb_rad2={value.zzb:.17g} apb_rad2={value.apb:.17g} crb_rad2={value.crb:.17g}")
    sys.stdout.write(csv)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="zzbdoa", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--trials", type=int, help="override trials per SNR point")
    common.add_argument("--seed", type=int, help="override master seed")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--no-estimator", action="store_true", help="skip MUSIC")
    p = sub.add_parser("bound", parents=[common], help="closed-form bounds at one point")
    p.add_argument("--config", required=True)
    p = sub.add_parser("sweep", parents=[common], help="Monte-Carlo SNR sweep")
    p.add_argument("--config", required=True)
    p = sub.add_parser("figure", parents=[common], help="built-in figure scenario")
    p.add_argument("name", choices=FIGURES)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        if args.command == "figure":
            docs = {tag: _apply_overrides(doc, args) for tag, doc in figure_presets(args.name).items()}
            return _run_sweep_docs(docs, out, args.threads, args.name)
        doc = _apply_overrides(read_document(args.config), args)
        if args.command == "bound":
            return _run_bound(doc, out)
        return _run_sweep_docs({"sweep": doc}, out, args.threads, "sweep")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleSamplingError as exc:
        print(f"config error: prior.min_separation_deg: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run())
