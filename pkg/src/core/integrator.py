#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Time integration of the damped toy model.

This module provides the exact linear propagators, the Lawson (integrating
factor) RK4 and dense Strang-splitting steppers, the Integrator class that
records trajectory diagnostics, and the lifespan search for the unscaled
equation.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .commutator_lab import P_L, dense_operator
from .errors import BlowUpError, ParameterError
from .model import (
    ModelParams,
    damp,
    dissipation_rate,
    dx_w_sup,
    energy,
    transport_flux,
    transport_term,
    z_pl_power,
)
from .spectral_field import (
    SpectralField,
    analyze,
    grid,
    l2_norm,
    normalized,
    random_field,
    sobolev_norm,
)

logger = logging.getLogger(__name__)

SCHEMES = ("lawson_rk4", "dense_splitting")
PROPAGATOR_MODES = ("multiplier_only", "full_dense")
BLOW_UP_NORM = 1e6
AUTO_SAMPLES = 512
# W = Re <D>^-N v is concentrated on the first few modes for N >= 2.
TRANSPORT_BANDWIDTH = 4

COLUMNS = ("t", "l2_norm", "sob_sigma_norm", "energy", "dissipation", "identity_residual")
EXTRA_COLUMNS = (
    "transport_flux",
    "fd_residual",
    "pl_norm_1",
    "pl_norm_2",
    "sob_alpha_norm_1",
    "sob_alpha_norm_2",
    "dxw_sup",
)


@dataclass(frozen=True)
class StepperConfig:
    """
    Time-stepping parameters.

    Attributes:
        scheme: lawson_rk4 or dense_splitting.
        dt: Base step.
        safety: Safety factor c_s in (0, 1].
        t_end: Final time.
        stride: Record a sample every `stride` steps; 0 picks a stride that
            gives about AUTO_SAMPLES samples.
        dealias: Whether products use the padded grid.
        dispersive_safety: Largest h * s * Omega allowed, Omega the highest
            dispersion frequency the explicit part couples.
    """

    scheme: str = "lawson_rk4"
    dt: float = 0.01
    safety: float = 0.1
    t_end: float = 1.0
    stride: int = 1
    dealias: bool = True
    dispersive_safety: float = 0.5

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}; expected one of {', '.join(SCHEMES)}")
        if not self.dt > 0.0:
            raise ParameterError(f"dt={self.dt} violates dt > 0")
        if not 0.0 < self.safety <= 1.0:
            raise ParameterError(f"safety={self.safety} violates 0 < c_s <= 1")
        if not self.dispersive_safety > 0.0:
            raise ParameterError(f"dispersive_safety={self.dispersive_safety} violates value > 0")
        if self.t_end < 0.0:
            raise ParameterError(f"t_end={self.t_end} violates t_end >= 0")
        if int(self.stride) != self.stride or self.stride < 0:
            raise ParameterError(f"stride={self.stride} must be a non-negative integer")

    def effective_dt(self, linear_scale: float, coupling: float = 0.0) -> float:
        """
        min(dt, c_s / s), tightened to dispersive_safety / (s * coupling) for
        a positive coupling frequency.
        """
        dt = min(self.dt, self.safety / linear_scale)
        if coupling > 0.0:
            dt = min(dt, self.dispersive_safety / (linear_scale * coupling))
        return dt

    def replace(self, **changes) -> "StepperConfig":
        return replace(self, **changes)


def coupling_frequency(params: ModelParams, max_wavenumber: int, scheme: str = "lawson_rk4") -> float:
    """
    Largest dispersion frequency gap bridged by the explicitly treated terms.

    A non-uniform cutoff couples every pair of modes, so under lawson_rk4
    the gap is K^alpha. The transport coefficient couples modes at most
    TRANSPORT_BANDWIDTH apart. Zero means the explicit part commutes with
    the dispersion and no dispersive restriction applies.
    """
    K = max_wavenumber
    if K == 0:
        return 0.0
    alpha = params.alpha
    frequency = 0.0
    cutoff = params.cutoff
    if scheme == "lawson_rk4" and cutoff is not None and not cutoff.is_uniform:
        frequency = float(K) ** alpha
    if params.transport:
        m = min(TRANSPORT_BANDWIDTH, K)
        gap = max(float(K) ** alpha - float(K - m) ** alpha, float(m) ** alpha)
        frequency = max(frequency, gap)
    return frequency


@dataclass(frozen=True, eq=False)
class LinearPropagator:
    """
    Exact evolution over `dt` of the linear part.

    `operator` is a phase vector for multiplier_only and a dense matrix for
    full_dense.
    """

    mode: str
    dt: float
    max_wavenumber: int
    operator: np.ndarray

    def apply(self, v: SpectralField) -> SpectralField:
        if self.operator.ndim == 1:
            return SpectralField(self.operator * v.coefficients)
        return SpectralField(self.operator @ v.coefficients)


def linear_propagator(dt: float, params: ModelParams, max_wavenumber: int,
                      mode: str = "multiplier_only", scaled: bool = True) -> LinearPropagator:
    """
    Build the linear evolution operator over one step.

    Args:
        dt: Step length.
        params: Model parameters (alpha, epsilon, cutoff).
        max_wavenumber: Band limit K.
        mode: multiplier_only (dispersion phase only) or full_dense
            (exp of -dt s (i diag |k|^alpha + Toeplitz(chi)), K <= 64).
        scaled: Use s = 1/eps (rescaled equation) or s = 1 (unscaled).

    Returns:
        The LinearPropagator.
    """
    if mode not in PROPAGATOR_MODES:
        raise ParameterError(f"unknown propagator mode {mode!r}")
    scale = 1.0 / params.epsilon if scaled else 1.0
    K = max_wavenumber
    if mode == "multiplier_only":
        k = np.abs(np.arange(-K, K + 1)).astype(float)
        return LinearPropagator(mode, dt, K, np.exp(-1j * dt * scale * k ** params.alpha))
    chi = params.cutoff.spectrum(2 * K) if params.cutoff is not None else SpectralField.zeros(0)
    generator = dense_operator(P_L(params.alpha), K, {"chi": chi}).matrix
    return LinearPropagator(mode, dt, K, expm(-dt * scale * generator))


class Termination(NamedTuple):
    cause: str
    time: Optional[float] = None

    def __str__(self):
        return self.cause if self.time is None else f"{self.cause}({self.time:.17g})"


@dataclass
class TrajectoryRecord:
    """
    Sampled diagnostics of one run.

    Attributes:
        times: Strictly increasing sample times.
        columns: Required diagnostic series keyed by column name.
        extras: Auxiliary series written after the required columns.
        termination: completed, norm_doubled(T) or nonfinite(T).
        final_state: Last finite state.
    """

    times: List[float] = field(default_factory=list)
    columns: Dict[str, List[float]] = field(
        default_factory=lambda: {name: [] for name in COLUMNS[1:]}
    )
    extras: Dict[str, List[float]] = field(default_factory=dict)
    termination: Termination = Termination("completed")
    final_state: Optional[SpectralField] = None

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return np.asarray(self.times)
        if name in self.columns:
            return np.asarray(self.columns[name])
        return np.asarray(self.extras[name])

    @property
    def header(self) -> List[str]:
        return list(COLUMNS) + [name for name in EXTRA_COLUMNS if name in self.extras]

    def table(self) -> np.ndarray:
        """Samples as rows in header order."""
        return np.column_stack([self.column(name) for name in self.header]) if self.times else \
            np.empty((0, len(self.header)))

    def finalize(self):
        """Fill the finite-difference identity residual once sampling is done."""
        if "fd_residual" not in self.extras:
            return
        times = np.asarray(self.times)
        squared = np.asarray(self.columns["l2_norm"]) ** 2
        if times.size < 2:
            self.extras["fd_residual"] = [0.0] * times.size
            return
        predicted = np.asarray(self.columns["dissipation"]) + np.asarray(self.extras["transport_flux"])
        self.extras["fd_residual"] = list(np.abs(np.gradient(squared, times) - predicted))


def random_initial_data(max_wavenumber: int, sigma: float, rng: np.random.Generator,
                        scale: float = 1.0) -> SpectralField:
    """Random coefficients <k>^(-sigma - 0.55) times Gaussians, with ||v||_sigma = scale."""
    return normalized(random_field(max_wavenumber, -sigma - 0.55, rng), sigma, scale)


def wave_packet(max_wavenumber: int, sigma: float, rng: Optional[np.random.Generator] = None,
                scale: float = 1.0, center: float = 0.0, width: float = 0.3,
                wavenumber: int = 4) -> SpectralField:
    """
    Gaussian packet exp(-d^2 / 2w^2) e^{i k0 x}, d the periodic distance to `center`.

    The default center sits outside the default sponge [pi/2, 3pi/2], so the
    packet has to travel into the damping region.
    """
    samples = 8 * (2 * max_wavenumber + 1)
    x = grid(samples)
    distance = np.angle(np.exp(1j * (x - center)))
    values = np.exp(-distance ** 2 / (2.0 * width ** 2)) * np.exp(1j * wavenumber * x)
    return normalized(analyze(values, max_wavenumber), sigma, scale)


GENERATORS: Dict[str, Callable[..., SpectralField]] = {
    "random": random_initial_data,
    "packet": wave_packet,
}


class Integrator:
    """
    Advances the toy model and records diagnostics.

    Step size, stride and the dense propagator of the splitting scheme are
    fixed at construction; the integrator then serves any number of runs at
    the same resolution.
    """

    def __init__(self, params: ModelParams, stepper: StepperConfig, max_wavenumber: int,
                 scaled: bool = True, extras: Sequence[str] = EXTRA_COLUMNS, refinement: int = 1):
        """
        Initialize the Integrator.

        Args:
            params: Model parameters.
            stepper: Time-stepping parameters.
            max_wavenumber: Band limit K of the states.
            scaled: Integrate the rescaled (True) or unscaled (False) equation.
            extras: Auxiliary diagnostics to record.
            refinement: Split every step into this many; the sample times
                stay those of the unrefined run.
        """
        unknown = set(extras) - set(EXTRA_COLUMNS)
        if unknown:
            raise ParameterError(f"unknown diagnostics: {', '.join(sorted(unknown))}")
        if int(refinement) != refinement or refinement < 1:
            raise ParameterError(f"refinement={refinement} must be a positive integer")
        self.params = params.replace(dealias=stepper.dealias)
        self.stepper = stepper
        self.max_wavenumber = max_wavenumber
        self.scaled = scaled
        self.extras = tuple(name for name in EXTRA_COLUMNS if name in extras)
        self.linear_scale = 1.0 / params.epsilon if scaled else 1.0
        self.refinement = refinement

        coupling = coupling_frequency(self.params, max_wavenumber, stepper.scheme)
        dt_eff = stepper.effective_dt(self.linear_scale, coupling)
        base_steps = max(1, math.ceil(stepper.t_end / dt_eff - 1e-9)) if stepper.t_end > 0 else 0
        base_stride = stepper.stride or max(1, base_steps // AUTO_SAMPLES)
        self.steps = base_steps * refinement
        self.stride = base_stride * refinement
        self.h = stepper.t_end / self.steps if self.steps else 0.0

        # Callbacks
        self.on_sample: Optional[Callable[[float, SpectralField], None]] = None

        k = np.abs(np.arange(-max_wavenumber, max_wavenumber + 1)).astype(float)
        self._frequencies = self.linear_scale * k ** self.params.alpha
        self._half = None
        if stepper.scheme == "dense_splitting":
            self._half = linear_propagator(self.h / 2, self.params, max_wavenumber, "full_dense", scaled)
        logger.debug("integrator %s K=%d: %d steps of %.3e (coupling %.4g)", stepper.scheme,
                     max_wavenumber, self.steps, self.h, coupling)

    def _nonlinear(self, v: SpectralField) -> SpectralField:
        """Explicit part: -W(v) v_x - s chi v."""
        return -transport_term(v, self.params) - self.linear_scale * damp(
            v, self.params.cutoff, self.params.dealias)

    def _phase(self, t: float) -> np.ndarray:
        """Dispersion phase exp(-i s t |k|^alpha) at absolute time t."""
        return np.exp(-1j * t * self._frequencies)

    def _lawson_rk4(self, v: SpectralField, t: float) -> SpectralField:
        # RK4 on w = E(-t) v with phases taken at absolute times, so the
        # rounding of |E| does not repeat from step to step.
        h = self.h
        start, middle, end = self._phase(t), self._phase(t + h / 2), self._phase(t + h)

        def velocity(phase: np.ndarray, w: np.ndarray) -> np.ndarray:
            return np.conj(phase) * self._nonlinear(SpectralField(phase * w)).coefficients

        w = np.conj(start) * v.coefficients
        k1 = velocity(start, w)
        k2 = velocity(middle, w + (h / 2) * k1)
        k3 = velocity(middle, w + (h / 2) * k2)
        k4 = velocity(end, w + h * k3)
        return SpectralField(end * (w + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)))

    def _transport_rk4(self, v: SpectralField) -> SpectralField:
        h = self.h

        def velocity(u):
            return -transport_term(u, self.params)

        k1 = velocity(v)
        k2 = velocity(v + (h / 2) * k1)
        k3 = velocity(v + (h / 2) * k2)
        k4 = velocity(v + h * k3)
        return v + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def _dense_splitting(self, v: SpectralField) -> SpectralField:
        v = self._half.apply(v)
        if self.params.transport:
            v = self._transport_rk4(v)
        return self._half.apply(v)

    def step(self, v: SpectralField, t: float = 0.0) -> SpectralField:
        """
        Advance one step of length self.h.

        Raises:
            BlowUpError: if the new state is non-finite or its L2 norm exceeds 1e6.
        """
        try:
            if self.stepper.scheme == "lawson_rk4":
                result = self._lawson_rk4(v, t)
            else:
                result = self._dense_splitting(v)
        except BlowUpError as exc:
            raise BlowUpError("non-finite state", time=t + self.h, state=v) from exc
        coeffs = result.coefficients
        if not np.all(np.isfinite(coeffs)):
            raise BlowUpError("non-finite state", time=t + self.h, state=v)
        if sobolev_norm(result, 0.0) > BLOW_UP_NORM:
            raise BlowUpError(f"L2 norm above {BLOW_UP_NORM:g}", time=t + self.h, state=result)
        return result

    def _predicted_rate(self, v: SpectralField) -> float:
        """Model value of d/dt ||v||^2: transport flux plus dissipation."""
        return transport_flux(v, self.params) + dissipation_rate(v, self.params, self.linear_scale)

    def _sample(self, record: TrajectoryRecord, t: float, v: SpectralField, residual: float):
        params = self.params
        dissipation = dissipation_rate(v, params, self.linear_scale)
        flux = transport_flux(v, params)
        record.times.append(t)
        record.columns["l2_norm"].append(l2_norm(v))
        record.columns["sob_sigma_norm"].append(sobolev_norm(v, params.sigma))
        record.columns["energy"].append(energy(v, params))
        record.columns["dissipation"].append(dissipation)
        record.columns["identity_residual"].append(residual)
        for name in self.extras:
            if name == "transport_flux":
                value = flux
            elif name == "fd_residual":
                value = 0.0
            elif name.startswith("pl_norm_"):
                value = sobolev_norm(z_pl_power(v, params.cutoff, params.alpha, int(name[-1]),
                                                params.dealias), 0.0)
            elif name.startswith("sob_alpha_norm_"):
                value = sobolev_norm(v, int(name[-1]) * params.alpha)
            else:
                value = dx_w_sup(v, params)
            record.extras.setdefault(name, []).append(value)
        if self.on_sample:
            self.on_sample(t, v)

    def simulate(self, v0: SpectralField, threshold: Optional[float] = None) -> TrajectoryRecord:
        """
        Integrate from v0 to t_end, sampling every `stride` steps and at the end.

        The identity_residual column holds the largest discrepancy, since the
        previous sample, between the stepped change of ||v||^2 over two steps
        and the Simpson integral of the predicted rate over the same steps,
        divided by the elapsed time.

        Args:
            v0: Initial state at resolution max_wavenumber.
            threshold: Stop with norm_doubled(T) once ||v||_sigma >= threshold.

        Returns:
            The TrajectoryRecord. Blow-up is reported in its termination field.
        """
        if v0.max_wavenumber != self.max_wavenumber:
            raise ParameterError(
                f"initial state has K={v0.max_wavenumber}, integrator has K={self.max_wavenumber}"
            )
        v0.check_finite()
        record = TrajectoryRecord()
        v = v0
        self._sample(record, 0.0, v, 0.0)
        track = threshold is None
        # (||v||^2, predicted rate) at the last two step boundaries
        history = deque([(l2_norm(v) ** 2, self._predicted_rate(v))], maxlen=3) if track else None
        worst = 0.0
        for n in range(1, self.steps + 1):
            t = n * self.h
            try:
                v = self.step(v, (n - 1) * self.h)
            except BlowUpError as exc:
                logger.warning("blow-up: %s", exc)
                record.termination = Termination("nonfinite", exc.time)
                break
            if track:
                history.append((l2_norm(v) ** 2, self._predicted_rate(v)))
                if len(history) == 3:
                    (n0, r0), (_, r1), (n2, r2) = history
                    simpson = (self.h / 3.0) * (r0 + 4.0 * r1 + r2)
                    worst = max(worst, abs(n2 - n0 - simpson) / (2.0 * self.h))
            if threshold is not None and threshold > 0.0 and sobolev_norm(v, self.params.sigma) >= threshold:
                self._sample(record, t, v, worst)
                record.termination = Termination("norm_doubled", t)
                break
            if n % self.stride == 0 or n == self.steps:
                self._sample(record, t, v, worst)
                worst = 0.0
        record.final_state = v
        record.finalize()
        logger.info("run finished: %s after %d samples", record.termination, len(record.times))
        return record


def step(v: SpectralField, params: ModelParams, stepper: StepperConfig) -> SpectralField:
    """One step of length dt_eff of the rescaled equation at the resolution of v."""
    coupling = coupling_frequency(params, v.max_wavenumber, stepper.scheme)
    single = stepper.replace(t_end=stepper.effective_dt(1.0 / params.epsilon, coupling))
    return Integrator(params, single, v.max_wavenumber, extras=()).step(v)


def simulate(v0: SpectralField, params: ModelParams, stepper: StepperConfig,
             on_sample: Optional[Callable[[float, SpectralField], None]] = None) -> TrajectoryRecord:
    """Run the rescaled equation from v0 and record every diagnostic."""
    integrator = Integrator(params, stepper, v0.max_wavenumber)
    integrator.on_sample = on_sample
    return integrator.simulate(v0)


class LifespanResult(NamedTuple):
    epsilon: float
    lifespan: float
    cause: str

    @property
    def censored(self) -> bool:
        return self.cause == "completed"

    @property
    def scaled_lifespan(self) -> float:
        """T * eps; at least of order one when lifespans scale like 1/eps."""
        return self.lifespan * self.epsilon


def lifespan_probe(epsilon: float, params: ModelParams, stepper: StepperConfig,
                   max_wavenumber: int = 32, data_scale: float = 1.0,
                   generator: str = "random", theta: float = 2.0,
                   t_max: float = 40.0, seed: int = 0) -> LifespanResult:
    """
    First time the unscaled solution's sigma-norm reaches theta times its size.

    The data satisfy ||U_0||_sigma = data_scale * eps.

    Args:
        epsilon: Data size.
        params: Model parameters; epsilon inside them is ignored.
        stepper: Time-stepping parameters; t_end is replaced by t_max.
        max_wavenumber: Band limit K.
        data_scale: Multiplier on eps for the data size.
        generator: random or packet.
        theta: Growth factor that ends the run, > 1.
        t_max: Time budget.
        seed: Seed of the data.

    Returns:
        LifespanResult with cause completed, norm_doubled or nonfinite.
    """
    if not theta > 1.0:
        raise ParameterError(f"theta={theta} violates theta > 1")
    if generator not in GENERATORS:
        raise ParameterError(f"unknown generator {generator!r}")
    rng = np.random.default_rng(seed)
    size = data_scale * epsilon
    U0 = GENERATORS[generator](max_wavenumber, params.sigma, rng, scale=size)
    integrator = Integrator(params, stepper.replace(t_end=t_max),
                            max_wavenumber, scaled=False, extras=())
    record = integrator.simulate(U0, threshold=theta * size)
    termination = record.termination
    lifespan = t_max if termination.time is None else termination.time
    logger.info("lifespan eps=%g: T=%.6g (%s)", epsilon, lifespan, termination.cause)
    return LifespanResult(epsilon, lifespan, termination.cause)
