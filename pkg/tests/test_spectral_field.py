#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for the band-limited field type and its spectral operations.
"""

import os
import sys
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import complex_numbers, composite, floats, integers, lists

# Add the parent directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.errors import AliasingError, InvalidFieldError, ParameterError, ZeroMeanWarning
from src.core.spectral_field import (
    MultiplierSpec,
    SpectralField,
    analyze,
    antiderivative,
    apply_multiplier,
    bessel_potential,
    derivative,
    evaluate,
    fractional_derivative,
    grid,
    l2_norm,
    low_pass,
    normalized,
    pointwise_product,
    random_field,
    smooth_step,
    sobolev_norm,
    sup_norm,
    synthesize,
)


@composite
def fields(draw, max_k=6):
    K = draw(integers(0, max_k))
    coeffs = draw(lists(
        complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False),
        min_size=2 * K + 1, max_size=2 * K + 1,
    ))
    return SpectralField(np.array(coeffs, dtype=complex))


def test_analyze_recovers_coefficients():
    """
    Sampling a random field on more than 2K+1 points and analyzing gives it back.
    """
    field = random_field(8, -1.0, np.random.default_rng(1))
    for M in (17, 40):
        assert analyze(synthesize(field, M), 8).allclose(field)


def test_analyze_refuses_too_few_samples():
    with pytest.raises(AliasingError):
        analyze(np.ones(8), max_wavenumber=4)
    with pytest.raises(AliasingError):
        synthesize(SpectralField.zeros(4), 8)


def test_analyze_rejects_non_finite_samples():
    samples = np.ones(9)
    samples[3] = np.nan
    with pytest.raises(InvalidFieldError):
        analyze(samples)


def test_even_coefficient_count_is_rejected():
    with pytest.raises(ParameterError):
        SpectralField(np.zeros(4))


def test_plane_wave_has_single_coefficient():
    """
    e^{3ix} sampled on 11 points has exactly one unit coefficient at k=3.
    """
    x = grid(11)
    field = analyze(np.exp(3j * x))
    assert field.max_wavenumber == 5
    assert field.mode(3) == pytest.approx(1.0)
    others = np.delete(field.coefficients, 3 + 5)
    assert np.max(np.abs(others)) < 1e-14


def test_derivative_of_plane_wave():
    field = SpectralField.from_modes(4, {3: 1.0})
    assert derivative(field).mode(3) == pytest.approx(3j)


def test_fractional_derivative_of_order_two_is_minus_second_derivative():
    field = random_field(6, 0.0, np.random.default_rng(2))
    assert fractional_derivative(field, 2.0).allclose(-derivative(derivative(field)))


def test_fractional_derivative_rejects_bad_order():
    with pytest.raises(ParameterError):
        MultiplierSpec.fractional_derivative(0.0)
    with pytest.raises(ParameterError):
        MultiplierSpec.fractional_derivative(2.5)


def test_antiderivative_drops_mean():
    """
    The antiderivative zeroes k=0, reports it, and inverts the derivative otherwise.
    """
    field = SpectralField.from_modes(3, {0: 2.0, 1: 1.0, -2: 0.5j})
    result, dropped = antiderivative(field)
    assert dropped
    assert result.mode(0) == 0
    assert derivative(result).allclose(field - SpectralField.from_modes(3, {0: 2.0}))

    with pytest.warns(ZeroMeanWarning):
        apply_multiplier(field, MultiplierSpec.antiderivative())


def test_antiderivative_of_zero_mean_field_is_silent():
    field = SpectralField.from_modes(2, {1: 1.0, -1: 1.0})
    _, dropped = antiderivative(field)
    assert not dropped
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        apply_multiplier(field, MultiplierSpec.antiderivative())


def test_bessel_potential_of_order_zero_is_identity():
    field = random_field(5, -1.0, np.random.default_rng(3))
    assert bessel_potential(field, 0.0).allclose(field)


def test_low_pass_keeps_low_and_removes_high_modes():
    field = SpectralField(np.ones(2 * 10 + 1))
    result = low_pass(field, 4.0)
    for k in range(-10, 11):
        if abs(k) <= 2:
            assert result.mode(k) == pytest.approx(1.0)
        elif abs(k) >= 4:
            assert result.mode(k) == 0


def test_smooth_step_values():
    assert smooth_step(0.0) == 0.0
    assert smooth_step(-1.0) == 0.0
    assert smooth_step(1.0) == 1.0
    assert smooth_step(0.5) == pytest.approx(0.5)
    t = np.linspace(0.01, 0.99, 25)
    assert np.allclose(smooth_step(t) + smooth_step(1.0 - t), 1.0)


def test_sobolev_norm_of_plane_wave():
    field = SpectralField.from_modes(5, {3: 1.0})
    assert sobolev_norm(field, 0.0) == pytest.approx(1.0)
    assert sobolev_norm(field, 2.0) == pytest.approx(10.0)
    assert sobolev_norm(field, 1.5) == pytest.approx(10.0 ** 0.75)


def test_l2_norm_of_constant():
    assert l2_norm(SpectralField.from_modes(0, {0: 1.0})) == pytest.approx(np.sqrt(2 * np.pi))


def test_sup_norm():
    """
    2cos(x) + 0.5 e^{2ix} peaks at x = 0 with modulus 2.5.
    """
    field = SpectralField.from_modes(3, {1: 1.0, -1: 1.0, 2: 0.5})
    assert sup_norm(field) == pytest.approx(2.5, abs=1e-9)
    assert sup_norm(SpectralField.from_modes(0, {0: -3.0})) == pytest.approx(3.0)


def test_dealiased_product_is_exact():
    """
    e^{2ix} * e^{2ix} = e^{4ix} lies outside K=2: dealiased it vanishes,
    aliased on 5 points it folds onto k=-1.
    """
    f = SpectralField.from_modes(2, {2: 1.0})
    assert np.max(np.abs(pointwise_product(f, f).coefficients)) < 1e-14
    aliased = pointwise_product(f, f, dealias=False)
    assert aliased.mode(-1) == pytest.approx(1.0)

    wide = pointwise_product(f, f, max_wavenumber=4)
    assert wide.mode(4) == pytest.approx(1.0)


def test_product_matches_pointwise_values():
    rng = np.random.default_rng(4)
    f = random_field(4, -1.0, rng)
    g = random_field(5, -1.0, rng)
    product = pointwise_product(f, g, max_wavenumber=9)
    x = np.linspace(0.0, 2 * np.pi, 13)
    assert np.allclose(evaluate(product, x), evaluate(f, x) * evaluate(g, x))


def test_random_real_field_is_real():
    field = random_field(7, -2.0, np.random.default_rng(5), real=True)
    assert field.is_real()
    assert np.max(np.abs(synthesize(field, 31).imag)) < 1e-13


def test_normalized_hits_target():
    field = random_field(7, -2.0, np.random.default_rng(6))
    assert sobolev_norm(normalized(field, 3.0, 0.25), 3.0) == pytest.approx(0.25)
    zero = SpectralField.zeros(3)
    assert normalized(zero, 1.0) is zero


def test_restricted_pads_and_truncates():
    field = SpectralField.from_modes(2, {2: 1.0, -1: 2.0})
    padded = field.restricted(4)
    assert padded.max_wavenumber == 4
    assert padded.mode(2) == 1.0
    assert padded.restricted(1).mode(-1) == 2.0
    assert padded.restricted(1).mode(2) == 0


def test_check_finite():
    with pytest.raises(InvalidFieldError):
        SpectralField(np.array([1.0, np.inf, 0.0])).check_finite()


@given(fields(), fields(), floats(-3.0, 3.0))
@settings(max_examples=50, deadline=None)
def test_multipliers_are_linear(u, v, scale):
    """
    Every multiplier is linear on fields of mixed band limits.
    """
    for spec in (MultiplierSpec.fractional_derivative(1.5), MultiplierSpec.derivative(),
                 MultiplierSpec.bessel(-2.0), MultiplierSpec.low_pass(3.0)):
        left = apply_multiplier(u + scale * v, spec)
        right = apply_multiplier(u, spec) + scale * apply_multiplier(v, spec)
        assert left.allclose(right, rtol=1e-10, atol=1e-9)


@given(fields())
@settings(max_examples=50, deadline=None)
def test_conjugation_commutes_with_derivative(u):
    """
    (conj u)' = conj(u') for the field of the complex-conjugate function.
    """
    assert derivative(u.conj()).allclose(derivative(u).conj(), atol=1e-12)
    assert derivative(u.real_part()).is_real()
