#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for the damped toy model: cutoff, right-hand sides, energies and the
L2 identity.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.errors import BlowUpError, ParameterError
from src.core.model import (
    ModelParams,
    build_cutoff,
    damp,
    dissipation_rate,
    dx_w_sup,
    energy,
    energy_terms,
    l2_rate,
    rhs,
    rhs_unscaled,
    transport_flux,
    uniform_cutoff,
    w_eps,
    z_pl_power,
    z_time_power,
)
from src.core.spectral_field import SpectralField, grid, l2_norm, random_field, synthesize


@pytest.fixture(scope="module")
def sponge():
    return build_cutoff(np.pi / 2, 3 * np.pi / 2, np.pi / 8, max_wavenumber=64)


def test_cutoff_geometry_is_validated():
    with pytest.raises(ParameterError):
        build_cutoff(2.0, 1.0, 0.1)
    with pytest.raises(ParameterError):
        build_cutoff(1.0, 2.0, 0.6)
    with pytest.raises(ParameterError):
        build_cutoff(1.0, 7.0, 0.1)
    with pytest.raises(ParameterError):
        uniform_cutoff(-1.0)


def test_cutoff_shape(sponge):
    """
    chi is 1 on the plateau, 0 outside [a, b] and its spectrum reproduces it.
    """
    assert sponge.values(np.array([np.pi]))[0] == pytest.approx(1.0)
    assert sponge.values(np.array([0.2, 6.0])).tolist() == [0.0, 0.0]
    assert sponge.plateau_measure == pytest.approx(np.pi - np.pi / 4)
    assert sponge.field.is_real()
    fine = build_cutoff(np.pi / 2, 3 * np.pi / 2, np.pi / 8)
    x = grid(1025)
    assert np.max(np.abs(synthesize(fine.field, 1025).real - fine.values(x))) < 1e-6


def test_cutoff_spectrum_decays_faster_than_any_power():
    """
    The local decay exponent of |chi_k|, measured between dyadic windows,
    keeps growing with k.
    """
    fine = build_cutoff(np.pi / 2, 3 * np.pi / 2, np.pi / 8, max_wavenumber=256)
    magnitudes = np.abs(fine.field.coefficients[256:])
    envelope = {k: np.max(magnitudes[k:2 * k]) for k in (16, 32, 64, 128)}
    exponents = [np.log2(envelope[k] / envelope[2 * k]) for k in (16, 32, 64)]
    assert np.all(np.diff(exponents) > 0)
    assert exponents[-1] > 3.0
    assert np.max(magnitudes[128:]) < 1e-3 * magnitudes[0]


def test_params_are_validated():
    with pytest.raises(ParameterError):
        ModelParams(alpha=0.0)
    with pytest.raises(ParameterError):
        ModelParams(epsilon=0.0)
    with pytest.raises(ParameterError):
        ModelParams(epsilon=1.5)
    with pytest.raises(ParameterError):
        ModelParams(flavor="grav_PL", sigma=1.5)
    with pytest.raises(ParameterError):
        ModelParams(flavor="unknown")
    assert ModelParams.gravity().alpha == 0.5
    assert ModelParams.capillary().flavor == "cap_time"


def test_transport_coefficient_is_real_and_linear():
    v = random_field(8, -1.0, np.random.default_rng(0))
    params = ModelParams()
    w = w_eps(v, params)
    assert w.is_real()
    assert w_eps(2.0 * v, params).allclose(2.0 * w)
    assert np.max(np.abs(w_eps(v, params.replace(transport=False)).coefficients)) == 0.0


def test_linear_rhs_on_plane_wave():
    """
    Without damping and transport, rhs(e^{ikx}) = -(i/eps)|k|^alpha e^{ikx}.
    """
    params = ModelParams(alpha=1.5, epsilon=0.1, transport=False)
    v = SpectralField.from_modes(4, {3: 1.0})
    assert rhs(v, params).mode(3) == pytest.approx(-1j * 3 ** 1.5 / 0.1)
    assert rhs_unscaled(v, params).mode(3) == pytest.approx(-1j * 3 ** 1.5)


def test_rhs_of_zero_is_zero(sponge):
    params = ModelParams(cutoff=sponge)
    assert np.all(rhs(SpectralField.zeros(6), params).coefficients == 0)


def test_rhs_reports_blow_up():
    params = ModelParams()
    v = SpectralField(np.array([0.0, 1e308, 0.0]))
    with pytest.raises(BlowUpError):
        rhs(v, params)


def test_uniform_damping_is_a_multiple():
    v = random_field(6, -1.0, np.random.default_rng(1))
    assert damp(v, uniform_cutoff(0.7)).allclose(0.7 * v)
    assert np.all(damp(v, None).coefficients == 0)


def test_time_and_PL_energies_agree_without_transport(sponge):
    """
    With W off, eps d/dt = -P_L, so both capillary energies coincide.
    """
    v = random_field(16, -3.5, np.random.default_rng(2))
    time_params = ModelParams(cutoff=sponge, transport=False, flavor="cap_time")
    pl_params = time_params.replace(flavor="cap_PL")
    assert energy(v, time_params) == pytest.approx(energy(v, pl_params), rel=1e-10)
    assert z_time_power(v, time_params, 2).allclose(
        z_pl_power(v, sponge, 1.5, 2), rtol=1e-10, atol=1e-10)


def test_energy_of_plane_wave_without_damping():
    params = ModelParams(cutoff=None, transport=False, flavor="cap_PL")
    v = SpectralField.from_modes(4, {2: 1.0})
    expected = [1.0, 2 ** 3.0, 2 ** 6.0]
    assert energy_terms(v, params) == pytest.approx(expected)
    grav = ModelParams.gravity(cutoff=None, transport=False)
    assert len(energy_terms(v, grav)) == 5
    assert energy(SpectralField.zeros(3), params) == 0.0


def test_vector_field_powers_are_bounded():
    v = SpectralField.zeros(2)
    with pytest.raises(ParameterError):
        z_time_power(v, ModelParams(), 3)
    with pytest.raises(ParameterError):
        z_pl_power(v, None, 1.5, 5)


def test_l2_identity_is_exact(sponge):
    """
    d/dt ||v||^2 equals the transport flux plus the dissipation.
    """
    v = random_field(16, -2.0, np.random.default_rng(3))
    params = ModelParams(cutoff=sponge, epsilon=0.05)
    rate = l2_rate(v, params)
    predicted = transport_flux(v, params) + dissipation_rate(v, params)
    assert rate == pytest.approx(predicted, rel=1e-9, abs=1e-9)


def test_dissipation_sign_and_uniform_value(sponge):
    v = random_field(12, -1.0, np.random.default_rng(4))
    params = ModelParams(cutoff=sponge, epsilon=0.1)
    assert dissipation_rate(v, params) <= 0.0
    assert dissipation_rate(v, params.replace(cutoff=None)) == 0.0
    uniform = params.replace(cutoff=uniform_cutoff(0.5))
    assert dissipation_rate(v, uniform) == pytest.approx(-2 * 0.5 / 0.1 * l2_norm(v) ** 2)


def test_transport_terms_vanish_when_off():
    v = random_field(8, -1.0, np.random.default_rng(5))
    params = ModelParams(transport=False)
    assert transport_flux(v, params) == 0.0
    assert dx_w_sup(v, params) == 0.0
    assert dx_w_sup(v, ModelParams()) > 0.0
