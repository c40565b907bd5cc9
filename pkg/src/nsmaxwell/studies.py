"""Study drivers behind the command line: decay fits, bound reports,
nonlinear runs, and dissipation monitoring, with CSV/markdown emission.

Each driver returns a ``StudyResult`` whose ``ok`` flag feeds the process
exit code: 0 clean, 2 when any pass/fail table contains a failure.
Identical configuration and seed produce bit-identical output files (all
floats are emitted through ``repr``).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .energy import monitor_dissipation
from .fitting import fit_decay
from .params import params_hash
from .semigroup import (
    EMFamily,
    FluidFamily,
    decay_curve,
    em_bound_check,
    em_slowest_rate,
    fluid_bound_check,
)
from .solver import SolverConfig, run, random_state
from .spectral import SpectralGrid


@dataclass
class CheckRow:
    study: str
    quantity: str
    measured: float
    target: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.measured - self.target) <= self.tolerance

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] {self.study}: {self.quantity} = {self.measured:+.4f} "
                f"(target {self.target:+.4f} +/- {self.tolerance:.2f})")


@dataclass
class StudyResult:
    name: str
    checks: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _emit_summary(result: StudyResult, out_dir: Path):
    lines = [f"# {result.name}", ""]
    lines += [c.line() for c in result.checks]
    if result.notes:
        lines.append("")
        lines.extend(result.notes)
    lines.append("")
    lines.append("Outputs: " + ", ".join(str(p) for p in result.outputs))
    path = out_dir / "summary.md"
    path.write_text("\n".join(lines) + "\n")
    result.outputs.append(path)


# exponent targets per family: component -> (target, tolerance)
_FLUID_TARGETS = {
    "n": (-1.25, 0.10),
    "u_par": (-0.75, 0.10),
    "sigma": (-0.75, 0.10),
    "E_par": (-0.75, 0.10),
}
_EM_TARGETS_WITH_B = {"u_perp": (-0.625, 0.08), "E_perp": (-0.75, 0.10),
                      "B": (-0.375, 0.08)}
_EM_TARGETS_NO_B = {"u_perp": (-0.75, 0.10), "E_perp": (-0.75, 0.10),
                    "B": (-0.625, 0.08)}
_COMBINED_TARGETS = {
    "n": (-1.25, 0.10),
    "u": (-0.625, 0.08),
    "sigma": (-0.75, 0.10),
    "E": (-0.75, 0.10),
    "B": (-0.375, 0.08),
}


def _family_cases(config: ExperimentConfig):
    """(label, fluid family, em family, targets) per study case."""
    em = EMFamily.transverse(config.u0_scale, config.e0_scale, config.b0_scale)
    em_no_b = EMFamily.transverse(config.u0_scale, config.e0_scale, 0.0)
    fluid = FluidFamily.compatible(v_scale=config.v0_scale, s_scale=config.s0_scale)
    if config.family == "compatible":
        return [("compatible", fluid, None, _FLUID_TARGETS)]
    if config.family == "m1-contrast":
        return [
            ("m1-generic", FluidFamily.density_only_generic(), None,
             {"u_par_from_n": (-0.25, 0.08)}),
            ("m1-compatible", FluidFamily.density_only_compatible(), None,
             {"u_par_from_n": (-0.75, 0.10)}),
        ]
    if config.family == "transverse-em":
        targets = _EM_TARGETS_WITH_B if config.b0_scale != 0 else _EM_TARGETS_NO_B
        return [(em.name, None, em, targets)]
    if config.family == "em-contrast":
        return [
            (em.name, None, em, _EM_TARGETS_WITH_B),
            (em_no_b.name, None, em_no_b, _EM_TARGETS_NO_B),
        ]
    if config.family == "combined":
        return [("combined", fluid, em, _COMBINED_TARGETS)]
    raise ValueError(f"unhandled family {config.family!r}")


def run_linear_study(config: ExperimentConfig, out_dir, quiet: bool = False) -> StudyResult:
    """Whole-space decay curves per component, fitted against the expected
    exponents; emits the decay CSV and an exponent table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = config.model_params()
    phash = params_hash(params)
    times = config.times()
    window = config.fit_window()
    result = StudyResult(name=f"linear decay study ({config.family})")

    curve_rows = []
    exponent_rows = []
    for label, fluid, em, targets in _family_cases(config):
        curves = decay_curve(times, params, fluid=fluid, em=em,
                             components=tuple(targets), cutoff=config.quad_cutoff,
                             base_panels=config.quad_base_panels, qtol=config.quad_tol)
        for comp, values in curves.items():
            for t, v in zip(times, values):
                curve_rows.append([repr(float(t)), repr(float(v)), comp, label, phash])
            fit = fit_decay(times, values, model=config.fit_model, window=window)
            target, tol = targets[comp]
            check = CheckRow(label, comp, fit.exponent, target, tol)
            result.checks.append(check)
            exponent_rows.append([label, comp, repr(fit.exponent), repr(target),
                                  repr(tol), check.passed, repr(fit.residual),
                                  repr(window[0]), repr(window[1]), fit.model])
            if not quiet:
                print(check.line())

    decay_path = out_dir / "decay_curves.csv"
    _write_rows(decay_path, ["t", "value", "component", "family", "params_hash"],
                curve_rows)
    exp_path = out_dir / "exponents.csv"
    _write_rows(exp_path, ["family", "component", "fitted", "target", "tolerance",
                           "passed", "fit_residual", "window_lo", "window_hi", "model"],
                exponent_rows)
    result.outputs += [decay_path, exp_path]
    _emit_summary(result, out_dir)
    return result


_RATE_CHECKS = (
    # (label, block, r_pair, expected ratio, tolerance)
    ("regularity-loss slow mode (E<-E)", (1, 1), (10.0, 20.0), 4.0, 1.0),
    ("low-frequency magnetic mode (B<-B)", (2, 2), (0.05, 0.1), 16.0, 4.0),
)


def run_bound_check(config: ExperimentConfig, out_dir, quiet: bool = False) -> StudyResult:
    """Weighted symbol-envelope suprema plus the two rate-scaling laws."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = config.model_params()
    result = StudyResult(name="symbol bound check")

    fluid_report = fluid_bound_check(params, r1=config.r1)
    fluid_path = out_dir / "fluid_bounds.csv"
    fluid_report.to_csv(fluid_path)
    em_report = em_bound_check(params, eps=config.em_eps, L=config.em_big)
    em_path = out_dir / "em_bounds.csv"
    em_report.to_csv(em_path)
    result.outputs += [fluid_path, em_path]

    flagged = [r for rep in (fluid_report, em_report) for r in rep.rows if r.edge_flag]
    result.checks.append(CheckRow("bound suprema", "flagged envelope count",
                                  float(len(flagged)), 0.0, 0.0))
    for row in flagged:
        result.notes.append(f"FLAGGED: {row.block} over {row.domain} still grows at the "
                            f"time edge (sup {row.empirical_sup:.3e})")

    ratios = fluid_report.extras["m1_decade_ratios"]
    for i, ratio in enumerate(ratios):
        result.checks.append(CheckRow("velocity-from-density singularity",
                                      f"sup ratio per decade #{i}", float(ratio),
                                      10.0, 2.0))

    rate_rows = []
    for label, block, (ra, rb), expect, tol in _RATE_CHECKS:
        rate_a = em_slowest_rate(ra, params, block=block)
        rate_b = em_slowest_rate(rb, params, block=block)
        ratio = rate_a / rate_b
        result.checks.append(CheckRow("EM rate scaling", label, ratio, expect, tol))
        rate_rows.append([label, repr(ra), repr(rb), repr(rate_a), repr(rate_b),
                          repr(ratio), repr(expect), repr(tol)])
    rate_path = out_dir / "rate_checks.csv"
    _write_rows(rate_path, ["check", "r_a", "r_b", "rate_a", "rate_b", "ratio",
                            "expected", "tolerance"], rate_rows)
    result.outputs.append(rate_path)

    if not quiet:
        for c in result.checks:
            print(c.line())
    _emit_summary(result, out_dir)
    return result


def _solver_setup(config: ExperimentConfig, seed: int):
    from .energy import EnergyWeights

    grid = SpectralGrid(box_length=config.box_length, resolution=config.resolution)
    weights = EnergyWeights(order=config.energy_order, kappa1=config.kappa1,
                            kappa2=config.kappa2)
    solver_config = SolverConfig(
        grid=grid, dt=config.dt, t_end=config.run_t_end,
        dealias_fraction=config.dealias_fraction,
        snapshot_stride=config.snapshot_stride, energy_weights=weights,
        min_density=config.min_density,
    )
    rng = np.random.default_rng(seed)
    U0 = random_state(grid, rng, amplitude=config.amplitude,
                      decay=config.spectrum_decay)
    return grid, solver_config, U0


def run_nonlinear_study(config: ExperimentConfig, out_dir, seed: int = 0,
                        quiet: bool = False) -> StudyResult:
    """Small-data box run: trajectory CSV, dissipation monitor, and the
    boundedness/constraint verdicts."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = config.model_params()
    _, solver_config, U0 = _solver_setup(config, seed)
    traj = run(U0, solver_config, params)

    traj_path = out_dir / "trajectory.csv"
    traj.to_csv(traj_path)
    result = StudyResult(name="nonlinear small-data run")
    result.outputs.append(traj_path)

    E = traj.columns["energy_EN"]
    max_rel_increase = float(np.max(np.diff(E) / E[:-1])) if len(E) > 1 else 0.0
    result.checks.append(CheckRow("energy", "max relative E_N increase per record",
                                  max_rel_increase, 0.0, 1e-10))
    field_scale = float(np.max(traj.columns["hN_total"]))
    for col in ("res_divE", "res_divB"):
        worst = float(np.max(traj.columns[col]) / field_scale)
        result.checks.append(CheckRow("constraints", f"max {col} / ||U||_N",
                                      worst, 0.0, 1e-8))

    report = monitor_dissipation(traj.times, E, traj.columns["dissipation_DN"],
                                 c_trial=config.c_trial)
    mon_path = out_dir / "monitor.csv"
    report.to_csv(mon_path)
    result.outputs.append(mon_path)
    result.notes.append(
        f"dissipation monitor: violation fraction {report.violation_fraction:.3f} at "
        f"c_trial={config.c_trial:g}; largest admissible c = "
        f"{report.largest_admissible_c:.4g}")
    result.notes.append(f"steps: {traj.meta['steps']}, dt: {traj.meta['dt']!r}, "
                        f"params: {traj.meta['params_hash']}")

    if not quiet:
        for c in result.checks:
            print(c.line())
        for nline in result.notes:
            print(nline)
    _emit_summary(result, out_dir)
    return result


def run_energy_monitor(config: ExperimentConfig, out_dir, seed: int = 0,
                       quiet: bool = False) -> StudyResult:
    """Dissipation-inequality monitor along a fresh run, plus the weight
    equivalence constants on a probe set."""
    from .energy import equivalence_report

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = config.model_params()
    grid, solver_config, U0 = _solver_setup(config, seed)
    traj = run(U0, solver_config, params)
    report = monitor_dissipation(traj.times, traj.columns["energy_EN"],
                                 traj.columns["dissipation_DN"], c_trial=config.c_trial)
    mon_path = out_dir / "monitor.csv"
    report.to_csv(mon_path)

    rng = np.random.default_rng(seed + 1)
    probes = [random_state(grid, rng, amplitude=1.0) for _ in range(6)]
    c_low, c_high = equivalence_report(solver_config.energy_weights, probes)

    result = StudyResult(name="energy monitor")
    result.outputs.append(mon_path)
    result.checks.append(CheckRow("dissipation inequality",
                                  f"violation fraction at c={config.c_trial:g}",
                                  report.violation_fraction, 0.0, 0.0))
    result.notes.append(f"largest admissible c on this trajectory: "
                        f"{report.largest_admissible_c:.4g}")
    result.notes.append(f"equivalence constants on probe set: c_low={c_low:.4f}, "
                        f"c_high={c_high:.4f}")
    if not quiet:
        for c in result.checks:
            print(c.line())
        for nline in result.notes:
            print(nline)
    _emit_summary(result, out_dir)
    return result


def run_fit(config: ExperimentConfig, out_dir, quiet: bool = False) -> StudyResult:
    """Fit a stored decay curve (CSV with t and value columns)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(config.csv_path) as fh:
        reader = csv.DictReader(fh)
        if "t" not in reader.fieldnames or "value" not in reader.fieldnames:
            raise ValueError(f"{config.csv_path} must have 't' and 'value' columns")
        t, v = [], []
        for row in reader:
            t.append(float(row["t"]))
            v.append(float(row["value"]))
    fit = fit_decay(np.asarray(t), np.asarray(v), model=config.fit_model,
                    window=config.fit_window() if config.fit_start > 0 else None)
    result = StudyResult(name=f"decay fit of {config.csv_path}")
    result.notes.append(
        f"exponent {fit.exponent:+.6f}, amplitude {fit.amplitude:.6g}, residual "
        f"{fit.residual:.3e}, model {fit.model}, window {fit.window}, "
        f"{fit.npoints} points")
    fit_path = out_dir / "fit.csv"
    _write_rows(fit_path, ["exponent", "amplitude", "residual", "model",
                           "window_lo", "window_hi", "npoints"],
                [[repr(fit.exponent), repr(fit.amplitude), repr(fit.residual),
                  fit.model, repr(fit.window[0]), repr(fit.window[1]), fit.npoints]])
    result.outputs.append(fit_path)
    if not quiet:
        for nline in result.notes:
            print(nline)
    _emit_summary(result, out_dir)
    return result
