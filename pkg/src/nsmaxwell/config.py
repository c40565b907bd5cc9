"""Experiment configuration: flat ``key = value`` text files.

Lines are ``key = value`` with ``#`` comments; values are parsed as int,
float, bool (``true``/``false``) or bare string.  Unknown keys are hard
errors so experiment definitions cannot rot silently.  The full schema is
the ``SCHEMA`` table below (also documented in the README); keys irrelevant
to the selected mode are accepted but ignored, so one file can drive
several modes.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np


class ConfigError(ValueError):
    """Malformed experiment configuration."""


MODES = ("linear-decay", "nonlinear-run", "bound-check", "energy-monitor", "fit")
FAMILIES = ("compatible", "m1-contrast", "transverse-em", "em-contrast", "combined")


def _bool(text):
    if text.lower() in ("true", "yes", "1"):
        return True
    if text.lower() in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    mode: str = ""
    # model coefficients
    mu: float = 1.0
    mu_prime: float = 0.0
    kappa: float = 1.0
    c_nu: float = 1.5
    pressure: str = "ideal"
    virial_b: float = 0.3
    # linear decay studies
    family: str = "compatible"
    u0_scale: float = 0.5
    e0_scale: float = 0.5
    b0_scale: float = 1.0
    v0_scale: float = 1.0
    s0_scale: float = 1.0
    t_start: float = 50.0
    t_end: float = 1000.0
    t_count: int = 400
    fit_start: float = -1.0  # <= 0: use t_start
    fit_end: float = -1.0    # <= 0: use t_end
    fit_model: str = "power"
    quad_cutoff: float = 8.0
    quad_base_panels: int = 24
    quad_tol: float = 1e-8
    # nonlinear box runs
    resolution: int = 32
    box_length: float = 2.0 * np.pi
    dt: float = 0.01
    run_t_end: float = 50.0
    amplitude: float = 1e-2
    spectrum_decay: float = 0.5
    snapshot_stride: int = 25
    dealias_fraction: float = 2.0 / 3.0
    min_density: float = 0.1
    energy_order: int = 4
    kappa1: float = 0.05
    kappa2: float = 0.5
    c_trial: float = 0.05
    # symbol bound checks
    r1: float = 1.0
    em_eps: float = 0.1
    em_big: float = 10.0
    # fit mode
    csv_path: str = ""

    def __post_init__(self):
        if self.mode and self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.mode == "linear-decay":
            if self.t_count < 20:
                raise ConfigError(
                    f"decay fits need >= 20 log-spaced samples, got t_count={self.t_count}")
            if not 0 < self.t_start < self.t_end:
                raise ConfigError("need 0 < t_start < t_end for a log time grid")
            lo, hi = self.fit_window()
            if not (self.t_start <= lo < hi <= self.t_end):
                raise ConfigError(
                    f"fit window [{lo}, {hi}] must lie inside the time grid "
                    f"[{self.t_start}, {self.t_end}]")
        if self.mode == "fit" and not self.csv_path:
            raise ConfigError("fit mode requires csv_path")

    def fit_window(self):
        lo = self.fit_start if self.fit_start > 0 else self.t_start
        hi = self.fit_end if self.fit_end > 0 else self.t_end
        return (lo, hi)

    def model_params(self):
        from .params import PRESSURE_LAWS, ModelParams

        if self.pressure not in PRESSURE_LAWS:
            raise ConfigError(f"unknown pressure law {self.pressure!r}")
        law = (PRESSURE_LAWS[self.pressure](self.virial_b)
               if self.pressure == "virial" else PRESSURE_LAWS[self.pressure]())
        return ModelParams(mu=self.mu, mu_prime=self.mu_prime, kappa=self.kappa,
                           c_nu=self.c_nu, pressure=law)

    def times(self):
        return np.geomspace(self.t_start, self.t_end, self.t_count)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_CASTERS = {"str": str, "float": float, "int": int, "bool": _bool}


def parse_config_text(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        caster = _CASTERS[_FIELD_TYPES[key]]
        try:
            values[key] = caster(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    if "mode" not in values:
        raise ConfigError("config must set mode")
    try:
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())
