#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for the time integrator: propagators, steppers, trajectories and the
lifespan search.
"""

import os
import sys

import numpy as np
import pytest
from scipy.linalg import expm

# Add the parent directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.commutator_lab import Mul, default_sponge, dense_operator
from src.core.errors import BlowUpError, ParameterError
from src.core.integrator import (
    AUTO_SAMPLES,
    COLUMNS,
    Integrator,
    StepperConfig,
    coupling_frequency,
    lifespan_probe,
    linear_propagator,
    random_initial_data,
    simulate,
    step,
    wave_packet,
)
from src.core.model import ModelParams, uniform_cutoff, z_time_power
from src.core.spectral_field import SpectralField, l2_norm, sobolev_norm


def test_stepper_config_is_validated():
    with pytest.raises(ParameterError):
        StepperConfig(scheme="euler")
    with pytest.raises(ParameterError):
        StepperConfig(dt=0.0)
    with pytest.raises(ParameterError):
        StepperConfig(safety=1.5)
    with pytest.raises(ParameterError):
        StepperConfig(stride=-1)
    with pytest.raises(ParameterError):
        StepperConfig(dispersive_safety=0.0)


def test_effective_step_resolves_the_damping_scale():
    stepper = StepperConfig(dt=0.01, safety=0.1)
    assert stepper.effective_dt(1.0 / 0.05) == pytest.approx(0.005)
    assert stepper.effective_dt(1.0) == pytest.approx(0.01)
    assert stepper.effective_dt(1.0 / 0.1, coupling=100.0) == pytest.approx(0.5 * 0.1 / 100.0)


def test_coupling_frequency_follows_the_explicit_terms():
    sponge = default_sponge(16)
    assert coupling_frequency(ModelParams(cutoff=None, transport=False), 16) == 0.0
    assert coupling_frequency(ModelParams(cutoff=uniform_cutoff(0.5), transport=False), 16) == 0.0
    assert coupling_frequency(ModelParams(cutoff=sponge, transport=False), 16) == pytest.approx(64.0)
    # the splitting scheme treats the cutoff exactly
    assert coupling_frequency(ModelParams(cutoff=sponge, transport=False), 16, "dense_splitting") == 0.0
    transport_only = coupling_frequency(ModelParams(cutoff=None), 16)
    assert transport_only == pytest.approx(64.0 - 12.0 ** 1.5)


def test_step_is_tied_to_the_dispersive_scale():
    params = ModelParams(cutoff=default_sponge(32), transport=False, epsilon=0.1)
    integrator = Integrator(params, StepperConfig(), 32, extras=())
    assert integrator.h <= 0.5 * 0.1 / 32 ** 1.5
    assert integrator.stride == 1

    auto = Integrator(params, StepperConfig(stride=0), 32, extras=())
    assert auto.steps // auto.stride <= 2 * AUTO_SAMPLES
    refined = Integrator(params, StepperConfig(stride=0), 32, extras=(), refinement=2)
    assert refined.steps == 2 * auto.steps
    assert refined.stride == 2 * auto.stride


def test_propagator_modes_agree_without_damping():
    params = ModelParams(cutoff=None)
    phase = linear_propagator(0.01, params, 6, "multiplier_only")
    dense = linear_propagator(0.01, params, 6, "full_dense")
    v = random_initial_data(6, 1.0, np.random.default_rng(0))
    assert phase.apply(v).allclose(dense.apply(v), rtol=1e-12, atol=1e-13)
    assert sobolev_norm(phase.apply(v), 0.0) == pytest.approx(sobolev_norm(v, 0.0), rel=1e-14)


def test_uniform_damping_decays_exponentially():
    """
    chi = c commutes with L, so the dense propagator shrinks the norm by e^{-c dt/eps}.
    """
    params = ModelParams(cutoff=uniform_cutoff(0.4), epsilon=0.1)
    dense = linear_propagator(0.02, params, 6, "full_dense")
    v = random_initial_data(6, 1.0, np.random.default_rng(1))
    expected = np.exp(-0.4 * 0.02 / 0.1) * sobolev_norm(v, 0.0)
    assert sobolev_norm(dense.apply(v), 0.0) == pytest.approx(expected, rel=1e-12)


def test_dense_propagator_matches_fine_splitting():
    """
    The matrix exponential agrees with many Strang sub-steps of phase and damping.
    """
    params = ModelParams(cutoff=default_sponge(6), epsilon=0.1)
    dt = 0.01
    n = 1000
    dense = linear_propagator(dt, params, 6, "full_dense")
    half_phase = linear_propagator(dt / n / 2, params, 6, "multiplier_only")
    chi = dense_operator(Mul("chi"), 6, {"chi": params.cutoff.spectrum(12)}).matrix
    damping = expm(-(dt / n) / params.epsilon * chi)
    v = random_initial_data(6, 1.0, np.random.default_rng(2))
    u = v
    for _ in range(n):
        u = half_phase.apply(u)
        u = SpectralField(damping @ u.coefficients)
        u = half_phase.apply(u)
    assert sobolev_norm(u - dense.apply(v), 0.0) < 1e-6 * sobolev_norm(v, 0.0)


def test_dense_propagator_is_limited_to_small_bands():
    with pytest.raises(ParameterError):
        linear_propagator(0.01, ModelParams(), 65, "full_dense")


def test_lawson_step_is_exact_on_plane_waves():
    params = ModelParams(cutoff=None, transport=False, epsilon=0.1)
    stepper = StepperConfig(dt=0.005)
    v = SpectralField.from_modes(4, {3: 1.0})
    result = step(v, params, stepper)
    expected = np.exp(-1j * 0.005 * 3 ** 1.5 / 0.1)
    assert abs(result.mode(3) - expected) < 1e-14


def test_unitary_evolution_conserves_the_norm():
    params = ModelParams(cutoff=None, transport=False, epsilon=0.1)
    stepper = StepperConfig(dt=0.01, t_end=100.0, stride=2000)
    v0 = random_initial_data(8, 1.0, np.random.default_rng(3))
    integrator = Integrator(params, stepper, 8, extras=())
    record = integrator.simulate(v0)
    assert integrator.steps == 10_000
    norms = record.column("l2_norm")
    assert np.max(np.abs(norms - norms[0])) <= 1e-13 * norms[0]
    assert record.termination.cause == "completed"


def test_zero_data_stays_zero():
    params = ModelParams(cutoff=default_sponge(8))
    record = simulate(SpectralField.zeros(8), params, StepperConfig(t_end=0.05))
    assert record.termination.cause == "completed"
    assert np.all(record.column("l2_norm") == 0.0)
    assert record.header[:len(COLUMNS)] == list(COLUMNS)


def test_linear_damped_run_is_monotone():
    """
    With transport off the L2 norm never grows and the stepped change of
    ||v||^2 matches the integrated dissipation.
    """
    params = ModelParams(cutoff=default_sponge(16), transport=False, epsilon=0.1)
    v0 = random_initial_data(16, 3.0, np.random.default_rng(4))
    record = simulate(v0, params, StepperConfig(t_end=0.3))
    norms = record.column("l2_norm")
    assert np.all(np.diff(norms) <= 1e-9)
    assert norms[-1] < norms[0]
    scale = np.max(np.abs(record.column("dissipation")))
    assert np.max(record.column("identity_residual")) <= 1e-4 * scale
    pl = record.column("pl_norm_1")
    assert np.all(np.diff(pl) <= 1e-8)


def test_commuting_damping_decreases_sobolev_norms():
    params = ModelParams(cutoff=uniform_cutoff(0.5), transport=False, epsilon=0.1)
    v0 = random_initial_data(16, 3.0, np.random.default_rng(5))
    record = simulate(v0, params, StepperConfig(t_end=0.2))
    for k in (1, 2):
        assert np.all(np.diff(record.column(f"sob_alpha_norm_{k}")) <= 1e-8)


def test_schemes_agree_without_transport():
    params = ModelParams(cutoff=default_sponge(8), transport=False, epsilon=0.1)
    v0 = random_initial_data(8, 1.0, np.random.default_rng(6))
    lawson = simulate(v0, params, StepperConfig(t_end=0.5))
    split = simulate(v0, params, StepperConfig(scheme="dense_splitting", t_end=0.5))
    difference = lawson.final_state - split.final_state
    assert sobolev_norm(difference, 0.0) < 1e-6 * sobolev_norm(v0, 0.0)


def _final_state(params, v0, dt, t_end, scheme="lawson_rk4"):
    stepper = StepperConfig(scheme=scheme, dt=dt, safety=1.0, dispersive_safety=1e9, t_end=t_end)
    return Integrator(params, stepper, v0.max_wavenumber, extras=()).simulate(v0).final_state


def test_lawson_converges_at_fourth_order():
    params = ModelParams(cutoff=default_sponge(16), epsilon=0.1)
    v0 = random_initial_data(16, 3.0, np.random.default_rng(10))
    states = [_final_state(params, v0, dt, 0.1) for dt in (0.002, 0.001, 0.0005)]
    coarse = sobolev_norm(states[0] - states[1], 0.0)
    fine = sobolev_norm(states[1] - states[2], 0.0)
    assert np.log2(coarse / fine) >= 3.7


def test_schemes_agree_with_transport():
    params = ModelParams(cutoff=default_sponge(16), epsilon=0.1)
    v0 = random_initial_data(16, 3.0, np.random.default_rng(11))
    lawson = _final_state(params, v0, 0.0005, 0.2)
    split = _final_state(params, v0, 0.0005, 0.2, scheme="dense_splitting")
    assert sobolev_norm(lawson - split, 0.0) < 1e-6 * sobolev_norm(v0, 0.0)


def test_time_vector_field_matches_central_differences():
    """
    eps d/dt along a computed trajectory agrees with Z v and Z^2 v from the equation.
    """
    params = ModelParams(cutoff=default_sponge(4), epsilon=0.5)
    v0 = random_initial_data(4, 3.0, np.random.default_rng(12))
    tau = 1e-4
    states = []
    simulate(v0, params, StepperConfig(dt=tau / 10, safety=1.0, t_end=2 * tau, stride=10),
             on_sample=lambda t, v: states.append(v))
    assert len(states) == 3
    eps = params.epsilon

    first = eps * (states[2] - states[0]) * (1.0 / (2 * tau))
    expected = z_time_power(states[1], params, 1)
    assert sobolev_norm(first - expected, 0.0) <= 1e-5 * sobolev_norm(expected, 0.0)

    z_first = [z_time_power(v, params, 1) for v in states]
    second = eps * (z_first[2] - z_first[0]) * (1.0 / (2 * tau))
    expected = z_time_power(states[1], params, 2)
    assert sobolev_norm(second - expected, 0.0) <= 1e-4 * sobolev_norm(expected, 0.0)


def test_halved_step_samples_the_same_times():
    params = ModelParams(cutoff=default_sponge(8), epsilon=0.1)
    v0 = random_initial_data(8, 3.0, np.random.default_rng(13))
    stepper = StepperConfig(t_end=0.1, stride=3)
    coarse = Integrator(params, stepper, 8, extras=()).simulate(v0)
    fine = Integrator(params, stepper, 8, extras=(), refinement=2).simulate(v0)
    assert np.allclose(coarse.times, fine.times, rtol=0.0, atol=1e-12)
    change = np.max(np.abs(coarse.column("energy") - fine.column("energy")))
    assert change <= 1e-6 * np.max(fine.column("energy"))


def test_nonlinear_run_and_callback():
    params = ModelParams(cutoff=default_sponge(8), epsilon=0.1)
    v0 = random_initial_data(8, 3.0, np.random.default_rng(7))
    seen = []
    record = simulate(v0, params, StepperConfig(t_end=0.1, stride=2), on_sample=lambda t, v: seen.append(t))
    assert seen == record.times
    assert np.all(np.diff(record.times) > 0)
    assert record.times[-1] == pytest.approx(0.1)
    assert np.all(np.isfinite(record.table()))


def test_blow_up_is_reported():
    params = ModelParams(cutoff=None, transport=False)
    v0 = SpectralField.from_modes(4, {1: 1e7})
    with pytest.raises(BlowUpError) as info:
        step(v0, params, StepperConfig())
    assert info.value.time is not None
    record = simulate(v0, params, StepperConfig(t_end=0.05))
    assert record.termination.cause == "nonfinite"
    assert record.termination.time > 0


def test_threshold_stops_the_run():
    params = ModelParams(cutoff=None, transport=False)
    v0 = random_initial_data(6, 3.0, np.random.default_rng(8))
    integrator = Integrator(params, StepperConfig(t_end=1.0), 6, extras=())
    record = integrator.simulate(v0, threshold=0.5)
    assert record.termination.cause == "norm_doubled"
    assert record.termination.time == pytest.approx(integrator.h)
    assert str(record.termination).startswith("norm_doubled(")


def test_lifespan_probe_without_growth():
    """
    Zero data and unitary evolution never reach the threshold.
    """
    params = ModelParams(cutoff=None, transport=False)
    stepper = StepperConfig(dt=0.05)
    result = lifespan_probe(0.1, params, stepper, max_wavenumber=8, data_scale=0.0, t_max=1.0)
    assert (result.lifespan, result.cause) == (1.0, "completed")
    result = lifespan_probe(0.1, params, stepper, max_wavenumber=8, t_max=1.0)
    assert (result.lifespan, result.cause) == (1.0, "completed")
    assert result.censored
    with pytest.raises(ParameterError):
        lifespan_probe(0.1, params, stepper, theta=1.0)


def test_generators_are_normalized():
    rng = np.random.default_rng(9)
    assert sobolev_norm(random_initial_data(16, 3.0, rng, scale=0.2), 3.0) == pytest.approx(0.2)
    packet = wave_packet(16, 2.0, scale=0.5)
    assert sobolev_norm(packet, 2.0) == pytest.approx(0.5)
    assert l2_norm(packet) > 0
