#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
The damped toy water-wave model.

This module instantiates the sponge-layer cutoff chi, the transport
coefficient W, the operator P_L = iL + chi, the rescaled and unscaled
right-hand sides, the vector fields Z used by the energies, and the
dissipation functional of the L2 identity.

Rescaled equation:

    dv/dt + W(v) dv/dx + (i/eps) |D|^alpha v + (1/eps) chi v = 0

W is the linear representative Re <D>^{-N}, so W_eps = W for every eps.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import BlowUpError, InvalidFieldError, ParameterError
from .spectral_field import (
    SpectralField,
    analyze,
    bessel_potential,
    derivative,
    fractional_derivative,
    grid,
    pointwise_product,
    smooth_step,
    sobolev_norm,
    sup_norm,
    synthesize,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# flavor -> (vector field, highest power J)
FLAVORS: Dict[str, Tuple[str, int]] = {
    "cap_time": ("time", 2),
    "cap_PL": ("PL", 2),
    "grav_PL": ("PL", 4),
}

# Regularity each energy needs from the data.
MIN_SIGMA: Dict[str, float] = {"cap_time": 3.0, "cap_PL": 3.0, "grav_PL": 2.0}

CAPILLARY_ALPHA = 1.5
GRAVITY_ALPHA = 0.5


@dataclass(frozen=True, eq=False)
class CutoffChi:
    """
    Smooth non-negative damping cutoff supported on [a, b].

    Attributes:
        field: Spectral representation at the cutoff's own band limit.
        a: Left end of the support (None for a uniform cutoff).
        b: Right end of the support.
        delta: Width of each transition layer.
        amplitude: Peak value on the plateau.
        level: Constant value of a uniform cutoff.
    """

    field: SpectralField
    a: Optional[float] = None
    b: Optional[float] = None
    delta: Optional[float] = None
    amplitude: float = 1.0
    level: Optional[float] = None

    @property
    def max_wavenumber(self) -> int:
        return self.field.max_wavenumber

    @property
    def is_uniform(self) -> bool:
        return self.level is not None

    @property
    def plateau(self) -> Tuple[float, float]:
        if self.is_uniform:
            return 0.0, TWO_PI
        return self.a + self.delta, self.b - self.delta

    @property
    def plateau_measure(self) -> float:
        lo, hi = self.plateau
        return hi - lo

    def values(self, x: np.ndarray) -> np.ndarray:
        """
        Evaluate chi from its defining formula (not from the spectrum).

        Args:
            x: Points on the circle; reduced modulo 2*pi.

        Returns:
            chi(x) with the same shape as x.
        """
        x = np.mod(np.asarray(x, dtype=float), TWO_PI)
        if self.is_uniform:
            return np.full(x.shape, self.level)
        rising = smooth_step((x - self.a) / self.delta)
        falling = smooth_step((self.b - x) / self.delta)
        return self.amplitude * rising * falling

    def spectrum(self, max_wavenumber: int) -> SpectralField:
        """Coefficients restricted (or zero-padded) to the requested band."""
        return self.field.restricted(max_wavenumber)

    def to_dict(self) -> Dict:
        return {
            "a": self.a,
            "b": self.b,
            "delta": self.delta,
            "K": self.max_wavenumber,
            "amplitude": self.amplitude,
            "level": self.level,
        }


def build_cutoff(a: float, b: float, delta: float, max_wavenumber: int = 256,
                 amplitude: float = 1.0, oversample: int = 8) -> CutoffChi:
    """
    Build the sponge cutoff chi(x) = rho((x-a)/delta) * rho((b-x)/delta).

    Args:
        a: Left end of the support, 0 <= a < b.
        b: Right end of the support, b < 2*pi.
        delta: Transition width, 0 < 2*delta < b - a.
        max_wavenumber: Band limit of the stored spectrum.
        amplitude: Peak value (1 by default).
        oversample: Quadrature points per 2K+1 coefficients.

    Returns:
        The CutoffChi with its spectral representation.
    """
    if not 0.0 <= a < b < TWO_PI:
        raise ParameterError(f"support [{a}, {b}] violates 0 <= a < b < 2*pi")
    if not 0.0 < 2.0 * delta < b - a:
        raise ParameterError(f"delta={delta} violates 0 < 2*delta < b - a = {b - a}")
    if amplitude <= 0.0:
        raise ParameterError(f"amplitude={amplitude} violates amplitude > 0")
    shape = CutoffChi(SpectralField.zeros(0), a=a, b=b, delta=delta, amplitude=amplitude)
    M = oversample * (2 * max_wavenumber + 1)
    spectrum = analyze(shape.values(grid(M)), max_wavenumber).real_part()
    logger.debug("built cutoff on [%.4f, %.4f], delta=%.4f, K=%d", a, b, delta, max_wavenumber)
    return replace(shape, field=spectrum)


def uniform_cutoff(level: float, max_wavenumber: int = 0) -> CutoffChi:
    """Spatially constant cutoff chi == level."""
    if level < 0.0:
        raise ParameterError(f"level={level} violates level >= 0")
    return CutoffChi(SpectralField.from_modes(max_wavenumber, {0: level}), level=level)


@dataclass(frozen=True)
class ModelParams:
    """
    Everything that determines the right-hand side and the energy.

    Attributes:
        alpha: Dispersion order, 0 < alpha <= 2.
        epsilon: Small parameter, 0 < eps <= 1.
        smoothing_order: N in W = Re <D>^{-N}.
        cutoff: Damping cutoff, or None for no damping.
        flavor: Energy flavor, one of cap_time, cap_PL, grav_PL.
        sigma: Regularity of generated data.
        transport: Whether the W(v) dv/dx term is on.
        dealias: Whether products use the padded grid.
    """

    alpha: float = CAPILLARY_ALPHA
    epsilon: float = 0.1
    smoothing_order: int = 4
    cutoff: Optional[CutoffChi] = None
    flavor: str = "cap_time"
    sigma: float = 3.0
    transport: bool = True
    dealias: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha={self.alpha} violates 0 < alpha <= 2")
        if not 0.0 < self.epsilon <= 1.0:
            raise ParameterError(f"epsilon={self.epsilon} violates 0 < epsilon <= 1")
        if int(self.smoothing_order) != self.smoothing_order or self.smoothing_order < 1:
            raise ParameterError(f"smoothing_order={self.smoothing_order} must be a positive integer")
        if self.flavor not in FLAVORS:
            raise ParameterError(f"unknown energy flavor {self.flavor!r}")
        if self.sigma < MIN_SIGMA[self.flavor]:
            raise ParameterError(
                f"flavor {self.flavor} requires sigma >= {MIN_SIGMA[self.flavor]:g}, got {self.sigma:g}"
            )

    @classmethod
    def capillary(cls, **kwargs) -> "ModelParams":
        kwargs.setdefault("flavor", "cap_time")
        kwargs.setdefault("sigma", 3.0)
        return cls(alpha=CAPILLARY_ALPHA, **kwargs)

    @classmethod
    def gravity(cls, **kwargs) -> "ModelParams":
        kwargs.setdefault("flavor", "grav_PL")
        kwargs.setdefault("sigma", 2.0)
        return cls(alpha=GRAVITY_ALPHA, **kwargs)

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def damp(v: SpectralField, cutoff: Optional[CutoffChi], dealias: bool = True) -> SpectralField:
    """
    Multiply by chi.

    The cutoff spectrum is taken up to 2K so that the result agrees with the
    frequency-Toeplitz matrix of chi on the band |k| <= K.
    """
    K = v.max_wavenumber
    if cutoff is None:
        return SpectralField.zeros(K)
    return pointwise_product(cutoff.spectrum(2 * K), v, dealias=dealias, max_wavenumber=K)


def w_eps(v: SpectralField, params: ModelParams) -> SpectralField:
    """
    Transport coefficient W_eps(v) = Re(<D>^{-N} v).

    Args:
        v: The state.
        params: Model parameters; W is zero when transport is off.

    Returns:
        A real-valued field.
    """
    if not params.transport:
        return SpectralField.zeros(v.max_wavenumber)
    return bessel_potential(v, -float(params.smoothing_order)).real_part()


def apply_PL(v: SpectralField, cutoff: Optional[CutoffChi], alpha: float,
             dealias: bool = True) -> SpectralField:
    """P_L v = i |D|^alpha v + chi v."""
    return 1j * fractional_derivative(v, alpha) + damp(v, cutoff, dealias)


def transport_term(v: SpectralField, params: ModelParams) -> SpectralField:
    """W_eps(v) dv/dx."""
    if not params.transport:
        return SpectralField.zeros(v.max_wavenumber)
    return pointwise_product(w_eps(v, params), derivative(v), dealias=params.dealias)


def _right_hand_side(v: SpectralField, params: ModelParams, linear_scale: float) -> SpectralField:
    try:
        linear = apply_PL(v, params.cutoff, params.alpha, params.dealias)
        result = -transport_term(v, params) - linear_scale * linear
        return result.check_finite()
    except InvalidFieldError as exc:
        raise BlowUpError(f"non-finite right-hand side: {exc}", state=v) from exc


def rhs(v: SpectralField, params: ModelParams) -> SpectralField:
    """
    Rescaled right-hand side -W(v) v_x - (i/eps) L v - (1/eps) chi v.
    """
    return _right_hand_side(v, params, 1.0 / params.epsilon)


def rhs_unscaled(U: SpectralField, params: ModelParams) -> SpectralField:
    """
    Unscaled right-hand side -W(U) U_x - i L U - chi U.

    Epsilon only enters through the size of the data.
    """
    return _right_hand_side(U, params, 1.0)


def z_time_powers(v: SpectralField, params: ModelParams, j: int = 2) -> List[SpectralField]:
    """
    [v, Zv, ..., Z^j v] for Z = eps d/dt, obtained by substituting the equation.

    Z^2 v uses eps d/dt W(v) = W(Zv):

        Z^2 v = -eps (W(Zv) v_x + W(v) (Zv)_x) - i L Zv - chi Zv
    """
    if not 0 <= j <= 2:
        raise ParameterError(f"time vector field power j={j} violates 0 <= j <= 2")
    powers = [v]
    if j >= 1:
        powers.append(params.epsilon * rhs(v, params))
    if j >= 2:
        zv = powers[1]
        eps = params.epsilon
        transport = SpectralField.zeros(v.max_wavenumber)
        if params.transport:
            transport = (
                pointwise_product(w_eps(zv, params), derivative(v), dealias=params.dealias)
                + pointwise_product(w_eps(v, params), derivative(zv), dealias=params.dealias)
            )
        powers.append(-eps * transport - apply_PL(zv, params.cutoff, params.alpha, params.dealias))
    return powers


def z_time_power(v: SpectralField, params: ModelParams, j: int) -> SpectralField:
    """Z^j v for Z = eps d/dt, j in {0, 1, 2}."""
    return z_time_powers(v, params, j)[j]


def z_pl_powers(v: SpectralField, cutoff: Optional[CutoffChi], alpha: float, j: int,
                dealias: bool = True) -> List[SpectralField]:
    """[v, P_L v, ..., P_L^j v]."""
    if not 0 <= j <= 4:
        raise ParameterError(f"P_L power j={j} violates 0 <= j <= 4")
    powers = [v]
    for _ in range(j):
        powers.append(apply_PL(powers[-1], cutoff, alpha, dealias))
    return powers


def z_pl_power(v: SpectralField, cutoff: Optional[CutoffChi], alpha: float, j: int,
               dealias: bool = True) -> SpectralField:
    """P_L^j v, j in 0..4."""
    return z_pl_powers(v, cutoff, alpha, j, dealias)[j]


def energy_terms(v: SpectralField, params: ModelParams) -> List[float]:
    """The summands ||Z^j v||_0^2 of the configured energy."""
    vector_field, top = FLAVORS[params.flavor]
    if vector_field == "time":
        powers = z_time_powers(v, params, top)
    else:
        powers = z_pl_powers(v, params.cutoff, params.alpha, top, params.dealias)
    return [sobolev_norm(p, 0.0) ** 2 for p in powers]


def energy(v: SpectralField, params: ModelParams) -> float:
    """
    Vector-field energy E = sum_{j=0}^{J} ||Z^j v||_0^2.

    cap_time uses Z = eps d/dt with J=2, cap_PL uses Z = P_L with J=2 and
    grav_PL uses Z = P_L with J=4.
    """
    return float(sum(energy_terms(v, params)))


def _quadrature_samples(v: SpectralField) -> int:
    return 4 * v.max_wavenumber + 1


def dissipation_rate(v: SpectralField, params: ModelParams,
                     linear_scale: Optional[float] = None) -> float:
    """
    Damping contribution -(2/eps) * integral of chi |v|^2 over [0, 2*pi).

    The trapezoid rule on 4K+1 points is exact here: chi enters through its
    spectrum up to 2K and |v|^2 is band-limited to 2K.

    Args:
        v: The state.
        params: Model parameters.
        linear_scale: Factor in front of chi; 1/eps by default, 1 for the
            unscaled equation.

    Returns:
        A non-positive number.
    """
    if params.cutoff is None:
        return 0.0
    scale = 1.0 / params.epsilon if linear_scale is None else linear_scale
    M = _quadrature_samples(v)
    chi = synthesize(params.cutoff.spectrum(2 * v.max_wavenumber), M).real
    density = np.abs(synthesize(v, M)) ** 2
    return float(-2.0 * scale * TWO_PI * np.mean(chi * density))


def transport_flux(v: SpectralField, params: ModelParams) -> float:
    """
    Transport contribution -integral of W_eps(v) d/dx |v|^2 over [0, 2*pi).
    """
    if not params.transport:
        return 0.0
    M = _quadrature_samples(v)
    w = synthesize(w_eps(v, params), M).real
    values = synthesize(v, M)
    slope = 2.0 * np.real(np.conj(values) * synthesize(derivative(v), M))
    return float(-TWO_PI * np.mean(w * slope))


def l2_rate(v: SpectralField, params: ModelParams, scaled: bool = True) -> float:
    """
    Exact semi-discrete d/dt of the squared L2 norm, 2 Re <v, rhs(v)>.
    """
    velocity = rhs(v, params) if scaled else rhs_unscaled(v, params)
    return float(2.0 * TWO_PI * np.real(np.vdot(v.coefficients, velocity.coefficients)))


def dx_w_sup(v: SpectralField, params: ModelParams) -> float:
    """||d/dx W_eps(v)||_inf, the constant of the nonlinear L2 bound."""
    if not params.transport:
        return 0.0
    return sup_norm(derivative(w_eps(v, params)))
