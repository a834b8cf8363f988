#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Experiment registry and orchestration.

Each experiment turns a RunConfig into artifact files and a set of named
verdicts. `run` wraps one experiment with the exit-code contract and always
leaves a summary.json behind; `sweep` runs one experiment per parameter
value on a thread pool and aggregates the headline metrics.

Exit codes: 0 all verdicts pass, 1 a verdict failed (or an unexpected
error), 2 usage or configuration error, 3 numerical blow-up.
"""

import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.commutator_lab import (
    SuiteParams,
    algebra_suite,
    bernstein_suite,
    oracle_errors,
    ratio_suite,
)
from ..core.errors import BlowUpError, ConfigError, ParameterError
from ..core.integrator import (
    Integrator,
    TrajectoryRecord,
    lifespan_probe,
    random_initial_data,
)
from ..core.model import CAPILLARY_ALPHA, GRAVITY_ALPHA, ModelParams
from .config import RunConfig, emit_config, resolve_key, thread_count
from .serialization import read_json, write_cutoff, write_json, write_report, write_table_csv, write_trajectory

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3

L2_SLACK = 1e-9
SOBOLEV_SLACK = 1e-8
IDENTITY_TOLERANCE = 1e-4
GRONWALL_FACTOR = 1.05
GRONWALL_SLACK = 1e-3
UNIFORMITY_FACTOR = 2.0
BASELINE_TOLERANCE = 0.25
LIFESPAN_SLOPE = -0.9
ORACLE_TOLERANCE = 1e-10

_baseline_lock = threading.Lock()


@dataclass
class ExperimentResult:
    """Verdicts and metrics of one experiment run."""

    verdicts: Dict[str, bool] = field(default_factory=dict)
    metrics: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


class ExperimentContext:
    """
    Everything a runner needs: the config, its output directory and the
    regression baselines.
    """

    def __init__(self, config: RunConfig, out_dir: str, record_baselines: bool = False):
        self.config = config
        self.out_dir = out_dir
        self.record_baselines = record_baselines
        self.baselines = self._load_baselines()
        self.candidates: Dict[str, Dict[str, float]] = {}
        # run name -> relative change of the diagnostics under dt halving
        self.halving: Dict[str, float] = {}

    def _load_baselines(self) -> Dict[str, Dict[str, float]]:
        path = self.config.values["run.baselines"]
        if not os.path.exists(path):
            logger.info("No baseline file at %s", path)
            return {}
        return read_json(path)

    def subdir(self, name: str) -> str:
        target = os.path.join(self.out_dir, name)
        os.makedirs(target, exist_ok=True)
        return target

    def path(self, *parts: str) -> str:
        target = os.path.join(self.out_dir, *parts)
        os.makedirs(os.path.dirname(target), exist_ok=True)
        return target

    def check_band(self, name: str, low: float, high: float) -> bool:
        """
        Compare a measured [low, high] band with the committed one at 25%.

        The band is always written as a candidate. A missing baseline fails
        unless baselines are being recorded, in which case the measured band
        becomes the baseline.
        """
        self.candidates[name] = {"low": low, "high": high}
        if self.record_baselines:
            return True
        baseline = self.baselines.get(name)
        if baseline is None:
            logger.warning("No baseline for %s in %s; rerun with --record-baselines to commit [%.6g, %.6g]",
                           name, self.config.values["run.baselines"], low, high)
            return False
        inside = (low >= (1.0 - BASELINE_TOLERANCE) * baseline["low"]
                  and high <= (1.0 + BASELINE_TOLERANCE) * baseline["high"])
        if not inside:
            logger.warning("%s band [%.6g, %.6g] outside baseline [%.6g, %.6g] +-25%%",
                           name, low, high, baseline["low"], baseline["high"])
        return inside

    def flush_baselines(self):
        if not self.candidates:
            return
        write_json(self.path("baseline_candidates.json"), self.candidates)
        if self.record_baselines:
            path = self.config.values["run.baselines"]
            with _baseline_lock:
                merged = read_json(path) if os.path.exists(path) else {}
                merged.update(self.candidates)
                os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
                write_json(path, merged)
            logger.info("Recorded %d baselines in %s", len(self.candidates), path)


@dataclass(frozen=True)
class Experiment:
    """
    A registry entry.

    Attributes:
        name: Name used in configs and on the command line.
        description: One-line description.
        runner: Callable producing the ExperimentResult.
        metric: Headline metric reported by sweeps.
        fits_slope: Whether sweeps fit log(metric) against log(parameter).
    """

    name: str
    description: str
    runner: Callable[[ExperimentContext], ExperimentResult]
    metric: str
    fits_slope: bool = False


def _fmt(value: float) -> str:
    return f"{value:g}"


def _check_blowup(record: TrajectoryRecord):
    if record.termination.cause == "nonfinite":
        raise BlowUpError("trajectory became non-finite", time=record.termination.time)


HALVING_COLUMNS = ("l2_norm", "sob_sigma_norm", "energy")


def _halving_change(coarse: TrajectoryRecord, fine: TrajectoryRecord) -> float:
    """Largest relative change of the core diagnostics between two runs sampled at the same times."""
    n = min(len(coarse.times), len(fine.times))
    change = 0.0
    for name in HALVING_COLUMNS:
        a, b = coarse.column(name)[:n], fine.column(name)[:n]
        scale = float(np.max(np.abs(b), initial=0.0))
        if scale > 0.0:
            change = max(change, float(np.max(np.abs(a - b))) / scale)
    return change


def _simulate(ctx: ExperimentContext, params: ModelParams, name: str,
              K: Optional[int] = None, check: bool = False) -> TrajectoryRecord:
    """
    Run one rescaled trajectory from the configured random data and write it.

    With `check` (and stepper.self_check on) the run is repeated at half the
    step and the relative change of the diagnostics is kept in ctx.halving.
    """
    config = ctx.config
    K = K or config.values["model.resolution"]
    rng = np.random.default_rng(config.seed)
    v0 = random_initial_data(K, params.sigma, rng)
    stepper = config.stepper()
    integrator = Integrator(params, stepper, K)
    record = integrator.simulate(v0)
    sidecar = {
        "params": {
            "alpha": params.alpha,
            "epsilon": params.epsilon,
            "smoothing_order": params.smoothing_order,
            "sigma": params.sigma,
            "flavor": params.flavor,
            "transport": params.transport,
            "dealias": params.dealias,
            "cutoff": params.cutoff.to_dict() if params.cutoff is not None else None,
            "K": K,
        },
        "seed": config.seed,
        "scheme": stepper.scheme,
        "dt": stepper.dt,
        "dt_eff": integrator.h,
        "steps": integrator.steps,
    }
    write_trajectory(ctx.subdir("trajectories"), name, record, sidecar)
    _check_blowup(record)
    if check and config.values["stepper.self_check"]:
        fine = Integrator(params, stepper, K, extras=(), refinement=2).simulate(v0)
        _check_blowup(fine)
        ctx.halving[name] = _halving_change(record, fine)
        logger.info("%s: halving the step changes the diagnostics by %.3g", name, ctx.halving[name])
    return record


def _max_increase(series: np.ndarray) -> float:
    return float(np.max(np.diff(series))) if series.size > 1 else 0.0


def _linear_runs(ctx: ExperimentContext) -> List[Tuple[float, TrajectoryRecord]]:
    config = ctx.config
    runs = []
    for alpha in config.values["run.alphas"]:
        params = config.model_params(alpha=alpha, transport=False)
        runs.append((alpha, _simulate(ctx, params, f"linear_alpha{_fmt(alpha)}", check=True)))
    return runs


def run_linear_decay(ctx: ExperimentContext) -> ExperimentResult:
    """L2 norm non-increasing and the dissipation identity exact for W off."""
    result = ExperimentResult()
    increases = []
    for alpha, record in _linear_runs(ctx):
        increase = _max_increase(record.column("l2_norm"))
        increases.append(increase)
        scale = max(float(np.max(np.abs(record.column("dissipation")), initial=0.0)), 1e-300)
        residual = float(np.max(record.column("identity_residual"))) / scale
        result.verdicts[f"l2_monotone_alpha{_fmt(alpha)}"] = increase <= L2_SLACK
        result.verdicts[f"identity_alpha{_fmt(alpha)}"] = residual <= IDENTITY_TOLERANCE
        result.metrics[f"identity_residual_alpha{_fmt(alpha)}"] = residual
        result.metrics[f"fd_residual_alpha{_fmt(alpha)}"] = float(
            np.max(record.column("fd_residual")) / scale)
    result.metrics["max_step_increase"] = max(increases, default=0.0)
    return result


def run_sobolev_decay(ctx: ExperimentContext) -> ExperimentResult:
    """||P_L^k v||_0 non-increasing; ||v||_{k alpha} bounded by the measured equivalence."""
    result = ExperimentResult()
    increases = []
    for alpha, record in _linear_runs(ctx):
        for k in (1, 2):
            tag = f"k{k}_alpha{_fmt(alpha)}"
            pl = record.column(f"pl_norm_{k}")
            sob = record.column(f"sob_alpha_norm_{k}")
            increase = _max_increase(pl)
            increases.append(increase)
            result.verdicts[f"pl_monotone_{tag}"] = increase <= SOBOLEV_SLACK
            with np.errstate(divide="ignore", invalid="ignore"):
                upper = np.nanmax(np.where(pl > 0, sob / pl, 0.0))
                lower = np.nanmax(np.where(sob > 0, pl / sob, 0.0))
            growth = float(np.max(sob) / sob[0]) if sob[0] > 0 else 0.0
            result.verdicts[f"sobolev_bounded_{tag}"] = growth <= upper * lower * (1.0 + SOBOLEV_SLACK)
            result.metrics[f"sobolev_growth_{tag}"] = growth
            result.metrics[f"sobolev_monotone_{tag}"] = float(_max_increase(sob) <= SOBOLEV_SLACK)
    result.metrics["max_pl_increase"] = max(increases, default=0.0)
    return result


def _quotient(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    if times.size < 2:
        return np.zeros_like(values)
    return np.gradient(values, times) / values


def uniformity_spread(quotients: Sequence[float], scales: Sequence[float], floor: float) -> float:
    """
    max / min of growth quotients across epsilon.

    Each quotient is first raised to floor * scale, the scale being the
    sup |d/dx W| of the same run, so decaying runs compare at the size of
    their own nonlinear growth rate.
    """
    values = [max(q, floor * c) for q, c in zip(quotients, scales)]
    top = max(values)
    if top <= 0.0:
        return 1.0
    bottom = min(values)
    return top / bottom if bottom > 0.0 else float("inf")


def run_nonlinear_l2(ctx: ExperimentContext) -> ExperimentResult:
    """Finite-difference Gronwall quotient against sup |d/dx W| across epsilon."""
    result = ExperimentResult()
    epsilons = ctx.config.values["run.epsilons"]
    quotients, constants = [], []
    for eps in epsilons:
        params = ctx.config.model_params(epsilon=eps, transport=True)
        record = _simulate(ctx, params, f"nonlinear_eps{_fmt(eps)}", check=eps == max(epsilons))
        squared = record.column("l2_norm") ** 2
        quotient = float(np.max(_quotient(squared, record.column("t"))))
        constant = float(np.max(record.column("dxw_sup")))
        quotients.append(quotient)
        constants.append(constant)
        result.verdicts[f"gronwall_eps{_fmt(eps)}"] = quotient <= GRONWALL_FACTOR * constant + GRONWALL_SLACK
        result.metrics[f"quotient_eps{_fmt(eps)}"] = quotient
        result.metrics[f"constant_eps{_fmt(eps)}"] = constant
    result.metrics["constant_spread"] = max(constants) / max(min(constants), 1e-300)
    spread = uniformity_spread(quotients, constants, ctx.config.values["run.quotient_floor"])
    result.metrics["quotient_spread"] = spread
    if len(quotients) > 1:
        result.verdicts["quotient_uniform"] = spread < UNIFORMITY_FACTOR
    return result


def _energy_experiment(ctx: ExperimentContext, flavor: str, alpha: float, sigma: float,
                       band_name: str) -> ExperimentResult:
    result = ExperimentResult()
    epsilons = ctx.config.values["run.epsilons"]
    sups, scales = [], []
    ratios = []
    for eps in epsilons:
        params = ctx.config.model_params(alpha=alpha, sigma=sigma, flavor=flavor, epsilon=eps)
        record = _simulate(ctx, params, f"{flavor}_eps{_fmt(eps)}", check=eps == max(epsilons))
        energy = record.column("energy")
        sup = float(np.max(_quotient(energy, record.column("t"))))
        sups.append(sup)
        scales.append(float(np.max(record.column("dxw_sup"))))
        ratios.append(energy / record.column("sob_sigma_norm") ** 2)
        result.metrics[f"quotient_eps{_fmt(eps)}"] = sup
    if all(sup <= 0.0 for sup in sups):
        result.notes.append("energy decays in every run; quotients compared at their floors")
    spread = uniformity_spread(sups, scales, ctx.config.values["run.quotient_floor"])
    result.metrics["quotient_spread"] = spread
    result.verdicts["quotient_uniform"] = spread < UNIFORMITY_FACTOR
    ratios = np.concatenate(ratios)
    low, high = float(ratios.min()), float(ratios.max())
    result.metrics["energy_ratio_low"] = low
    result.metrics["energy_ratio_high"] = high
    result.verdicts["energy_equivalence"] = ctx.check_band(band_name, low, high)
    return result


def run_energy_cap(ctx: ExperimentContext) -> ExperimentResult:
    """Capillary energy with Z = eps d/dt."""
    return _energy_experiment(ctx, "cap_time", CAPILLARY_ALPHA, 3.0, "energy-cap.ratio")


def run_energy_cap_alt(ctx: ExperimentContext) -> ExperimentResult:
    """Capillary energy with Z = P_L."""
    return _energy_experiment(ctx, "cap_PL", CAPILLARY_ALPHA, 3.0, "energy-cap-alt.ratio")


def run_energy_grav(ctx: ExperimentContext) -> ExperimentResult:
    """Gravity energy with Z = P_L up to the fourth power."""
    return _energy_experiment(ctx, "grav_PL", GRAVITY_ALPHA, 2.0, "energy-grav.ratio")


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def run_lifespan_sweep(ctx: ExperimentContext) -> ExperimentResult:
    """
    Doubling time of the unscaled equation against the data size.

    A run that reaches the horizon is censored: its lifespan is a lower
    bound T >= horizon / eps. Every run must support T * eps >= min_scaled,
    either by crossing late enough or through its censoring bound. The
    slope of the crossing runs is checked once at least two cross.
    """
    values = ctx.config.values
    result = ExperimentResult()
    cutoff = ctx.config.cutoff() if values["lifespan.damping"] else None
    params = ctx.config.model_params(cutoff=cutoff)
    stepper = ctx.config.stepper(dt=values["lifespan.dt"])
    horizon, min_scaled = values["lifespan.horizon"], values["lifespan.min_scaled"]
    rows = []
    crossings = []
    unsupported = []
    for eps in values["lifespan.epsilons"]:
        run = lifespan_probe(
            eps, params, stepper,
            max_wavenumber=values["lifespan.resolution"],
            data_scale=values["lifespan.data_scale"],
            generator=values["lifespan.generator"],
            theta=values["lifespan.theta"],
            t_max=horizon / eps,
            seed=ctx.config.seed,
        )
        if run.cause == "nonfinite":
            raise BlowUpError("lifespan run blew up before the threshold", time=run.lifespan)
        rows.append([eps, run.lifespan, run.scaled_lifespan, float(not run.censored)])
        if not run.censored:
            crossings.append(run)
        bound = horizon if run.censored else run.scaled_lifespan
        if bound < min_scaled:
            unsupported.append(_fmt(eps))
        result.metrics[f"lifespan_eps{_fmt(eps)}"] = run.lifespan
        result.metrics[f"scaled_lifespan_eps{_fmt(eps)}"] = run.scaled_lifespan
    write_table_csv(ctx.path("lifespan.csv"), ["epsilon", "lifespan", "scaled_lifespan", "crossed"],
                    np.asarray(rows))
    result.metrics["min_scaled_lifespan"] = min(row[2] for row in rows)
    result.metrics["censored_runs"] = float(len(rows) - len(crossings))
    result.verdicts["lower_bound"] = not unsupported
    if unsupported:
        result.notes.append(f"T * eps below {min_scaled:g} for eps = {', '.join(unsupported)}")
    if len(values["lifespan.epsilons"]) == 1:
        result.metrics["lifespan"] = rows[0][1]
        return result
    if len(crossings) < 2:
        result.notes.append(f"{len(rows) - len(crossings)} runs censored at T = {horizon:g} / eps; "
                            "their lifespans are lower bounds and no slope is fitted")
        return result
    slope = fit_slope([p.epsilon for p in crossings], [p.lifespan for p in crossings])
    result.metrics["slope"] = slope
    # Reported only; the quadratic lifespan is not asserted.
    result.metrics["quadratic_like"] = float(slope <= -1.9)
    result.verdicts["slope"] = slope <= LIFESPAN_SLOPE
    return result


def _auto_r(lemma: str, s: float, k: int, alpha: float, r: Optional[float]) -> float:
    if r is not None:
        return r
    order = k * alpha if lemma == "L3.2" else alpha
    return max(2.0, s + order)


def run_commutator_suite(ctx: ExperimentContext) -> ExperimentResult:
    """Ratio suites for the configured lemmas over (k, alpha)."""
    values = ctx.config.values
    result = ExperimentResult()
    resolutions = ctx.config.resolutions
    def sponge(K: int):
        return ctx.config.cutoff(max_wavenumber=2 * K)

    overall = 0.0
    for lemma in values["suite.lemmas"]:
        if lemma == "A.2":
            instances = [SuiteParams(s=values["suite.algebra_s"])]
        elif lemma == "L3.4":
            instances = [SuiteParams(alpha=alpha, s=values["suite.s"],
                                     r=_auto_r(lemma, values["suite.s"], 1, alpha, values["suite.r"]),
                                     low_pass=values["suite.low_pass"])
                         for alpha in values["run.alphas"]]
        elif lemma in ("L3.1", "L3.2"):
            instances = [SuiteParams(k=k, alpha=alpha, s=values["suite.s"],
                                     r=_auto_r(lemma, values["suite.s"], k, alpha, values["suite.r"]))
                         for alpha in values["run.alphas"] for k in values["suite.ks"]]
        else:
            raise ParameterError(f"lemma {lemma!r} is not a commutator-suite lemma (L3.1, L3.2, L3.4, A.2)")
        for params in instances:
            report = ratio_suite(lemma, params, values["suite.ensemble"], ctx.config.seed, resolutions,
                                 cutoff_factory=sponge)
            tag = f"{lemma}_k{params.k}_alpha{_fmt(params.alpha)}_s{_fmt(params.s)}_r{_fmt(params.r)}"
            write_report(ctx.subdir("reports"), tag, report)
            result.verdicts[tag] = report.verdict
            result.metrics[f"max_ratio_{tag}"] = report.overall_max
            overall = max(overall, report.overall_max)
            if lemma != "L3.1":
                ctx.check_band(f"commutator-suite.{tag}", 0.0, report.overall_max)
    result.metrics["max_ratio"] = overall
    return result


def run_bernstein_suite(ctx: ExperimentContext) -> ExperimentResult:
    """Bernstein annulus/ball ratios and the Sobolev algebra constant."""
    values = ctx.config.values
    result = ExperimentResult()
    levels = range(values["suite.p_min"], values["suite.p_max"] + 1)
    reports_dir = ctx.subdir("reports")
    bernstein = bernstein_suite(levels, values["suite.ensemble"], ctx.config.seed)
    write_report(reports_dir, "A.4", bernstein)
    result.verdicts["bernstein"] = bernstein.verdict
    result.metrics["annulus_max"] = bernstein.overall_max
    result.metrics["annulus_min"] = min(bernstein.diagnostics["annulus_min"].values())
    result.metrics["ball_max"] = max(bernstein.diagnostics["ball_max"].values())
    algebra = algebra_suite(values["suite.algebra_s"], values["suite.ensemble"], ctx.config.seed,
                            ctx.config.resolutions)
    write_report(reports_dir, "A.2", algebra)
    result.verdicts["algebra"] = algebra.verdict
    result.metrics["algebra_max"] = algebra.overall_max
    return result


def run_oracle_check(ctx: ExperimentContext) -> ExperimentResult:
    """Spectral operators against their dense matrices."""
    values = ctx.config.values
    K = values["suite.oracle_resolution"]
    cutoff = ctx.config.cutoff(max_wavenumber=2 * K)
    if cutoff is None:
        raise ConfigError("oracle-check needs the cutoff enabled", "cutoff.enabled")
    params = ctx.config.model_params(cutoff=cutoff)
    errors = oracle_errors(K, values["suite.oracle_trials"], ctx.config.seed, params)
    write_cutoff(ctx.path("cutoff.json"), cutoff)
    names = sorted(errors)
    with open(ctx.path("oracle.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("operator,max_relative_error\n")
        for name in names:
            f.write(f"{name},{errors[name]:.17g}\n")
    result = ExperimentResult()
    for name in names:
        result.verdicts[f"oracle_{name}"] = errors[name] <= ORACLE_TOLERANCE
    result.metrics["max_error"] = max(errors.values())
    return result


EXPERIMENTS: Dict[str, Experiment] = {
    experiment.name: experiment
    for experiment in (
        Experiment("linear-decay", "L2 damping with transport off", run_linear_decay, "max_step_increase"),
        Experiment("sobolev-decay", "Higher-norm damping with transport off", run_sobolev_decay,
                   "max_pl_increase"),
        Experiment("nonlinear-l2", "Gronwall bound on the L2 norm", run_nonlinear_l2, "quotient_spread"),
        Experiment("energy-cap", "Capillary energy, Z = eps d/dt", run_energy_cap, "quotient_spread"),
        Experiment("energy-cap-alt", "Capillary energy, Z = P_L", run_energy_cap_alt, "quotient_spread"),
        Experiment("energy-grav", "Gravity energy, Z = P_L", run_energy_grav, "quotient_spread"),
        Experiment("lifespan-sweep", "Doubling time against data size", run_lifespan_sweep, "lifespan",
                   fits_slope=True),
        Experiment("commutator-suite", "Commutator ratio suites", run_commutator_suite, "max_ratio"),
        Experiment("bernstein-suite", "Bernstein and algebra ratios", run_bernstein_suite, "annulus_max"),
        Experiment("oracle-check", "Spectral versus dense operators", run_oracle_check, "max_error"),
    )
}


def execute(config: RunConfig, out_dir: Optional[str] = None,
            record_baselines: bool = False) -> Tuple[int, Dict]:
    """
    Run the configured experiment and write summary.json.

    Runs checked by halving the step add a resolved_<run> verdict each.

    Returns:
        The exit code and the summary written to disk (when the output
        directory is writable).
    """
    out_dir = out_dir or config.output
    experiment = EXPERIMENTS[config.experiment]
    summary: Dict = {
        "experiment": experiment.name,
        "seed": config.seed,
        "defaulted": sorted(config.defaulted),
    }
    exit_code = EXIT_FAILED
    ctx = None
    try:
        try:
            os.makedirs(out_dir, exist_ok=True)
            with open(os.path.join(out_dir, "config.ini"), "w", encoding="utf-8", newline="\n") as f:
                f.write(emit_config(config))
        except OSError as exc:
            raise ConfigError(f"cannot write into output directory {out_dir}: {exc}", "run.output") from exc
        logger.info("Running %s into %s", experiment.name, out_dir)
        ctx = ExperimentContext(config, out_dir, record_baselines)
        result = experiment.runner(ctx)
        tolerance = config.values["stepper.halving_tolerance"]
        for name, change in sorted(ctx.halving.items()):
            result.verdicts[f"resolved_{name}"] = change <= tolerance
            result.metrics[f"halving_change_{name}"] = change
        summary["verdicts"] = result.verdicts
        summary["metrics"] = result.metrics
        summary["notes"] = result.notes
        summary["headline"] = result.metrics.get(experiment.metric)
        exit_code = EXIT_OK if result.passed else EXIT_FAILED
        if not result.passed:
            failed = sorted(name for name, ok in result.verdicts.items() if not ok)
            summary["failure"] = f"verdicts failed: {', '.join(failed)}"
    except (ConfigError, ParameterError) as exc:
        logger.error("Usage error: %s", exc)
        summary["failure"] = f"usage error: {exc}"
        exit_code = EXIT_USAGE
    except BlowUpError as exc:
        logger.error("Blow-up: %s", exc)
        summary["failure"] = f"blow-up: {exc}"
        exit_code = EXIT_BLOWUP
    except Exception as exc:
        logger.exception("Experiment %s crashed", experiment.name)
        summary["failure"] = f"error: {exc!r}"
        exit_code = EXIT_FAILED
    finally:
        if ctx is not None:
            ctx.flush_baselines()
        summary["exit_code"] = exit_code
        try:
            write_json(os.path.join(out_dir, "summary.json"), summary)
        except OSError as exc:
            logger.error("Cannot write summary.json into %s: %s", out_dir, exc)
    return exit_code, summary


def run(config: RunConfig, out_dir: Optional[str] = None, record_baselines: bool = False) -> int:
    """Run one experiment; returns the exit code."""
    return execute(config, out_dir, record_baselines)[0]


@dataclass
class SweepResult:
    exit_code: int
    rows: List[Tuple[int, str, int, Optional[float]]]
    slope: Optional[float] = None


def sweep(config: RunConfig, parameter: str, values: Sequence[str], out_dir: Optional[str] = None,
          workers: Optional[int] = None) -> SweepResult:
    """
    Run the configured experiment once per value of `parameter`.

    Member i uses seed (base seed XOR i) unless the seed itself is swept,
    and writes into member_<i>. Members run concurrently.

    Args:
        config: Template configuration.
        parameter: Key to vary (full or unique bare name).
        values: Values as config text.
        out_dir: Output directory; the config's output by default.
        workers: Thread count; TOYWAVES_THREADS by default.

    Returns:
        SweepResult with the maximum member exit code.
    """
    key = resolve_key(parameter)
    if not values:
        raise ConfigError("no values to sweep", key)
    out_dir = out_dir or config.output
    os.makedirs(out_dir, exist_ok=True)
    experiment = EXPERIMENTS[config.experiment]
    members = []
    for index, value in enumerate(values):
        overrides = {key: value}
        if key != "run.seed":
            overrides["run.seed"] = str(config.seed ^ index)
        members.append((index, value, config.with_overrides(overrides)))

    def run_member(member):
        index, value, member_config = member
        code, summary = execute(member_config, os.path.join(out_dir, f"member_{index:03d}"))
        return index, value, code, summary.get("headline")

    workers = workers or thread_count()
    logger.info("Sweeping %s over %d values with %d workers", key, len(values), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = sorted(pool.map(run_member, members))

    with open(os.path.join(out_dir, "sweep.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write(f"member,{key},exit_code,{experiment.metric}\n")
        for index, value, code, metric in rows:
            metric_text = "" if metric is None else f"{metric:.17g}"
            f.write(f"{index},{value},{code},{metric_text}\n")

    slope = None
    if experiment.fits_slope:
        points = []
        for _, value, _, metric in rows:
            try:
                x = float(value)
            except ValueError:
                continue
            if metric is not None and x > 0 and metric > 0:
                points.append((x, metric))
        if len(points) >= 2:
            slope = fit_slope([p[0] for p in points], [p[1] for p in points])
    exit_code = max(code for _, _, code, _ in rows)
    write_json(os.path.join(out_dir, "sweep.json"),
               {"parameter": key, "values": list(values), "slope": slope, "exit_code": exit_code})
    return SweepResult(exit_code, [(i, v, c, m) for i, v, c, m in rows], slope)
