"""JSON scenario configuration (user-facing angles in degrees).

Example::

    {
      "geometry": {"type": "ula", "num_sensors": 20, "spacing": 1.0},
      "ensemble": {"num_sources": 5, "coherent_count": 3,
                   "beta_magnitude": [1.0, 0.9, 0.8], "beta_phase_deg": [0, 0, 0],
                   "random_coherent_phases": true, "powers": [1, 1, 1]},
      "prior": {"min_deg": -60, "max_deg": 60, "min_separation_deg": 10},
      "sweep": {"snapshots": 40, "snr_db": {"start": -40, "stop": 30, "step": 5},
                "trials": 1000, "seed": 1, "estimator": true, "grid_step_deg": 0.01},
      "point": {"snr_db": 0.0, "doas_deg": [-40, -20, 0, 20, 40]}
    }

``point`` is only used by the ``bound`` subcommand.
"""

import json
from pathlib import Path

import numpy as np

from .arrays import coprime, ula
from .fisher import TRACE_FORM, VEC_FORM
from .montecarlo import SweepConfig
from .signals import Scenario, SourceEnsemble

SCHEMA = {
    "geometry": {"type", "num_sensors", "spacing", "m", "n"},
    "ensemble": {"num_sources", "coherent_count", "beta_magnitude", "beta_phase_deg",
                 "random_coherent_phases", "powers"},
    "prior": {"min_deg", "max_deg", "min_separation_deg"},
    "sweep": {"snapshots", "snr_db", "trials", "seed", "estimator", "grid_step_deg", "fim_method"},
    "point": {"snr_db", "doas_deg"},
}
REQUIRED = ("geometry", "ensemble", "prior", "sweep")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""


def _get(section, key, path, default=None, required=False):
    if key in section:
        return section[key]
    if required:
        raise ConfigError(f"{path}.{key}: missing required field")
    return default


def _check_keys(doc):
    if not isinstance(doc, dict):
        raise ConfigError("<root>: expected an object")
    for name in doc:
        if name not in SCHEMA:
            raise ConfigError(f"{name}: unknown section")
    for name in REQUIRED:
        if name not in doc:
            raise ConfigError(f"{name}: missing required section")
    for name, section in doc.items():
        if not isinstance(section, dict):
            raise ConfigError(f"{name}: expected an object")
        for key in section:
            if key not in SCHEMA[name]:
                raise ConfigError(f"{name}.{key}: unknown field")


def _geometry(sec):
    kind = _get(sec, "type", "geometry", required=True)
    try:
        if kind == "ula":
            return ula(int(_get(sec, "num_sensors", "geometry", required=True)),
                       float(_get(sec, "spacing", "geometry", 1.0)))
        if kind == "coprime":
            return coprime(int(_get(sec, "m", "geometry", required=True)),
                           int(_get(sec, "n", "geometry", required=True)))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        field = "geometry.m" if kind == "coprime" else "geometry.num_sensors"
        raise ConfigError(f"{field}: {exc}") from exc
    raise ConfigError(f"geometry.type: unknown geometry {kind!r}")


def _ensemble(sec):
    K = int(_get(sec, "num_sources", "ensemble", required=True))
    L = int(_get(sec, "coherent_count", "ensemble", 1))
    mags = np.asarray(_get(sec, "beta_magnitude", "ensemble", [1.0] * L), float)
    phases = np.deg2rad(np.asarray(_get(sec, "beta_phase_deg", "ensemble", [0.0] * mags.size), float))
    if mags.shape != phases.shape:
        raise ConfigError("ensemble.beta_phase_deg: length differs from beta_magnitude")
    powers = _get(sec, "powers", "ensemble", [1.0] * (K - L + 1))
    try:
        return SourceEnsemble(K, L, mags * np.exp(1j * phases), powers)
    except ValueError as exc:
        raise ConfigError(f"ensemble: {exc}") from exc


def _snr_grid(spec):
    if isinstance(spec, dict):
        unknown = set(spec) - {"start", "stop", "step"}
        if unknown:
            raise ConfigError(f"sweep.snr_db.{sorted(unknown)[0]}: unknown field")
        try:
            start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
        except KeyError as exc:
            raise ConfigError(f"sweep.snr_db.{exc.args[0]}: missing required field") from exc
        if step <= 0:
            raise ConfigError("sweep.snr_db.step: must be positive")
        return start + step * np.arange(int(np.floor((stop - start) / step + 1e-9)) + 1)
    return np.asarray(spec, float)


def build_config(doc: dict) -> tuple[SweepConfig, dict | None]:
    """Validate a parsed document. Returns the sweep config and the optional point."""
    _check_keys(doc)
    geom = _geometry(doc["geometry"])
    ens = _ensemble(doc["ensemble"])
    prior, sweep = doc["prior"], doc["sweep"]
    try:
        lo = float(_get(prior, "min_deg", "prior", required=True))
        hi = float(_get(prior, "max_deg", "prior", required=True))
        sep = float(_get(prior, "min_separation_deg", "prior", 0.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"prior: {exc}") from exc
    if not (-90 < lo and hi < 90):
        raise ConfigError("prior: support must lie inside (-90, 90) degrees")
    method = _get(sweep, "fim_method", "sweep")
    if method not in (None, TRACE_FORM, VEC_FORM):
        raise ConfigError(f"sweep.fim_method: expected {TRACE_FORM!r} or {VEC_FORM!r}")
    try:
        scenario = Scenario(geom, ens, int(_get(sweep, "snapshots", "sweep", 40)),
                            np.deg2rad(lo), np.deg2rad(hi), np.deg2rad(sep))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"prior: {exc}") from exc
    try:
        config = SweepConfig(
            scenario,
            _snr_grid(_get(sweep, "snr_db", "sweep", required=True)),
            trials_per_point=int(_get(sweep, "trials", "sweep", 1000)),
            master_seed=int(_get(sweep, "seed", "sweep", 0)),
            estimator_enabled=bool(_get(sweep, "estimator", "sweep", True)),
            random_coherent_phases=bool(_get(doc["ensemble"], "random_coherent_phases", "ensemble", False)),
            grid_step=np.deg2rad(float(_get(sweep, "grid_step_deg", "sweep", 0.01))),
            fim_method=method,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sweep: {exc}") from exc
    return config, doc.get("point")


def config_document(config: SweepConfig, point=None) -> dict:
    """Inverse of ``build_config``: a document that parses back to ``config``."""
    sc = config.scenario
    geom, ens = sc.geometry, sc.ensemble
    if geom.label.startswith("coprime"):
        m, n = (int(v) for v in geom.label[len("coprime("):-1].split(","))
        geometry = {"type": "coprime", "m": m, "n": n}
    elif geom.label == "ula":
        spacing = float(geom.positions[1] - geom.positions[0])
        geometry = {"type": "ula", "num_sensors": geom.num_sensors, "spacing": spacing}
    else:
        raise ValueError(f"geometry {geom.label!r} has no config representation")
    grid = config.snr_grid_db
    doc = {
        "geometry": geometry,
        "ensemble": {
            "num_sources": ens.num_sources,
            "coherent_count": ens.coherent_count,
            "beta_magnitude": np.abs(ens.beta).tolist(),
            "beta_phase_deg": np.rad2deg(np.angle(ens.beta)).tolist(),
            "random_coherent_phases": config.random_coherent_phases,
            "powers": ens.powers.tolist(),
        },
        "prior": {
            "min_deg": float(np.rad2deg(sc.prior_min)),
            "max_deg": float(np.rad2deg(sc.prior_max)),
            "min_separation_deg": float(np.rad2deg(sc.min_separation)),
        },
        "sweep": {
            "snapshots": sc.snapshots,
            "snr_db": grid.tolist(),
            "trials": config.trials_per_point,
            "seed": int(config.master_seed),
            "estimator": config.estimator_enabled,
            "grid_step_deg": float(np.rad2deg(config.grid_step)),
        },
    }
    if config.fim_method is not None:
        doc["sweep"]["fim_method"] = config.fim_method
    if point is not None:
        doc["point"] = dict(point)
    return doc


def read_document(path) -> dict:
    """Load a JSON document. Malformed JSON is a ConfigError; OSError propagates."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<file>: invalid JSON ({exc})") from exc


def load_config(path):
    """Read and validate a JSON config file; returns ``(SweepConfig, point)``."""
    return build_config(read_document(path))


def parse_config(path) -> SweepConfig:
    return load_config(path)[0]
