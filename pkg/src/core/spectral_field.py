#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Periodic spectral representation on the circle of circumference 2*pi.

This module provides the SpectralField value type together with the
transforms between collocation samples and Fourier coefficients, the
Fourier multipliers used by the model, Sobolev and sup norms, and dealiased
pointwise products.

Coefficient convention: u_hat[k] = (1/M) * sum_j u(x_j) exp(-i k x_j) with
x_j = 2*pi*j/M, so that sum_j |u(x_j)|^2 / M = sum_k |u_hat[k]|^2.
"""

import warnings
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AliasingError, InvalidFieldError, ParameterError, ZeroMeanWarning

Scalar = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    A complex periodic function stored as Fourier coefficients.

    Coefficients are ordered k = -K..K. The array is copied on construction
    and frozen, so instances can be shared freely between threads.
    """

    coefficients: np.ndarray

    # Let numpy scalars defer to __rmul__.
    __array_ufunc__ = None

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=np.complex128).ravel()
        if coeffs.size % 2 == 0:
            raise ParameterError(
                f"coefficient vector length must be odd (2K+1), got {coeffs.size}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zeros(cls, max_wavenumber: int) -> "SpectralField":
        return cls(np.zeros(2 * max_wavenumber + 1, dtype=np.complex128))

    @classmethod
    def from_modes(cls, max_wavenumber: int, modes: Mapping[int, Scalar]) -> "SpectralField":
        """
        Build a field from a sparse {wavenumber: amplitude} mapping.

        Args:
            max_wavenumber: The band limit K.
            modes: Amplitudes for selected wavenumbers, |k| <= K.

        Returns:
            The corresponding SpectralField.
        """
        coeffs = np.zeros(2 * max_wavenumber + 1, dtype=np.complex128)
        for k, amplitude in modes.items():
            if abs(k) > max_wavenumber:
                raise ParameterError(f"|k|={abs(k)} exceeds K={max_wavenumber}")
            coeffs[k + max_wavenumber] = amplitude
        return cls(coeffs)

    @property
    def max_wavenumber(self) -> int:
        return (self.coefficients.size - 1) // 2

    @property
    def wavenumbers(self) -> np.ndarray:
        K = self.max_wavenumber
        return np.arange(-K, K + 1)

    def mode(self, k: int) -> complex:
        if abs(k) > self.max_wavenumber:
            return 0j
        return complex(self.coefficients[k + self.max_wavenumber])

    def check_finite(self) -> "SpectralField":
        """
        Raise InvalidFieldError unless every coefficient is finite.

        Returns:
            The field itself, so the call can be chained.
        """
        if not np.all(np.isfinite(self.coefficients)):
            raise InvalidFieldError(
                f"field with K={self.max_wavenumber} has non-finite coefficients"
            )
        return self

    def restricted(self, max_wavenumber: int) -> "SpectralField":
        """Truncate to, or zero-pad up to, a new band limit."""
        K = self.max_wavenumber
        if max_wavenumber == K:
            return self
        if max_wavenumber < K:
            return SpectralField(self.coefficients[K - max_wavenumber:K + max_wavenumber + 1])
        coeffs = np.zeros(2 * max_wavenumber + 1, dtype=np.complex128)
        coeffs[max_wavenumber - K:max_wavenumber + K + 1] = self.coefficients
        return SpectralField(coeffs)

    def conj(self) -> "SpectralField":
        """Field of the complex-conjugate function: c'_k = conj(c_{-k})."""
        return SpectralField(np.conj(self.coefficients[::-1]))

    def real_part(self) -> "SpectralField":
        return SpectralField(0.5 * (self.coefficients + np.conj(self.coefficients[::-1])))

    def is_real(self, tol: float = 1e-12) -> bool:
        """True when c_{-k} = conj(c_k) within tol relative to the largest coefficient."""
        scale = max(1.0, float(np.max(np.abs(self.coefficients), initial=0.0)))
        defect = np.max(np.abs(self.coefficients - np.conj(self.coefficients[::-1])), initial=0.0)
        return bool(defect <= tol * scale)

    def allclose(self, other: "SpectralField", rtol: float = 1e-12, atol: float = 1e-14) -> bool:
        K = max(self.max_wavenumber, other.max_wavenumber)
        return bool(np.allclose(
            self.restricted(K).coefficients, other.restricted(K).coefficients, rtol=rtol, atol=atol
        ))

    def _aligned(self, other: "SpectralField") -> Tuple[np.ndarray, np.ndarray]:
        K = max(self.max_wavenumber, other.max_wavenumber)
        return self.restricted(K).coefficients, other.restricted(K).coefficients

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b = self._aligned(other)
        return SpectralField(a + b)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b = self._aligned(other)
        return SpectralField(a - b)

    def __neg__(self) -> "SpectralField":
        return SpectralField(-self.coefficients)

    def __mul__(self, scalar: Scalar) -> "SpectralField":
        if isinstance(scalar, SpectralField):
            return NotImplemented
        return SpectralField(scalar * self.coefficients)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "SpectralField":
        return SpectralField(self.coefficients / scalar)

    def __repr__(self):
        return f"SpectralField(K={self.max_wavenumber}, l2={sobolev_norm(self, 0.0):.6g})"


def grid(samples: int) -> np.ndarray:
    """Uniform collocation points x_j = 2*pi*j/M."""
    return 2.0 * np.pi * np.arange(samples) / samples


def _fft_index(max_wavenumber: int, samples: int) -> np.ndarray:
    return np.arange(-max_wavenumber, max_wavenumber + 1) % samples


def analyze(samples: np.ndarray, max_wavenumber: Optional[int] = None) -> SpectralField:
    """
    Compute Fourier coefficients from uniform samples.

    Args:
        samples: M complex values at x_j = 2*pi*j/M.
        max_wavenumber: Target band limit K; defaults to (M-1)//2.

    Returns:
        The SpectralField with coefficients for |k| <= K.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    M = samples.size
    K = (M - 1) // 2 if max_wavenumber is None else max_wavenumber
    if M < 2 * K + 1:
        raise AliasingError(K, M)
    if not np.all(np.isfinite(samples)):
        raise InvalidFieldError("cannot analyze non-finite samples")
    spectrum = np.fft.fft(samples) / M
    return SpectralField(spectrum[_fft_index(K, M)])


def synthesize(field: SpectralField, samples: Optional[int] = None) -> np.ndarray:
    """
    Evaluate a field on M uniform grid points.

    Args:
        field: The field to evaluate.
        samples: Number of grid points M; defaults to 2K+1.

    Returns:
        The M complex samples.
    """
    K = field.max_wavenumber
    M = 2 * K + 1 if samples is None else samples
    if M < 2 * K + 1:
        raise AliasingError(K, M)
    buffer = np.zeros(M, dtype=np.complex128)
    buffer[_fft_index(K, M)] = field.coefficients
    return np.fft.ifft(buffer) * M


def evaluate(field: SpectralField, x: Union[float, np.ndarray]) -> np.ndarray:
    """Evaluate the trigonometric polynomial at arbitrary points."""
    x = np.asarray(x, dtype=float)
    phases = np.exp(1j * np.multiply.outer(x, field.wavenumbers))
    return phases @ field.coefficients


def smooth_step(t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    C-infinity step: 0 for t <= 0, 1 for t >= 1, exp(-1/t) blend in between.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.where(t_arr >= 1.0, 1.0, 0.0)
    inner = (t_arr > 0.0) & (t_arr < 1.0)
    ti = t_arr[inner]
    left = np.exp(-1.0 / ti)
    right = np.exp(-1.0 / (1.0 - ti))
    out[inner] = left / (left + right)
    if np.ndim(t) == 0:
        return float(out[0])
    return out.reshape(np.shape(t))


def littlewood_paley_bump(xi: np.ndarray) -> np.ndarray:
    """Radial bump: 1 for |xi| <= 1/2, 0 for |xi| >= 1."""
    return smooth_step(2.0 * (1.0 - np.abs(xi)))


def _antiderivative_symbol(k: np.ndarray, _parameter: float) -> np.ndarray:
    symbol = np.zeros(k.shape, dtype=np.complex128)
    nonzero = k != 0
    symbol[nonzero] = 1.0 / (1j * k[nonzero])
    return symbol


# Registry of symbols m(k; parameter). New multipliers (e.g. a
# gravity-capillary symbol) only need an entry here and in _VALIDATORS.
SYMBOLS: Dict[str, Callable[[np.ndarray, float], np.ndarray]] = {
    "fractional_derivative": lambda k, alpha: np.abs(k).astype(float) ** alpha,
    "derivative": lambda k, _p: 1j * k.astype(float),
    "antiderivative": _antiderivative_symbol,
    "bessel": lambda k, s: (1.0 + k.astype(float) ** 2) ** (s / 2.0),
    "low_pass": lambda k, cutoff: littlewood_paley_bump(k / cutoff),
}

_VALIDATORS: Dict[str, Callable[[float], Optional[str]]] = {
    "fractional_derivative": lambda a: None if 0.0 < a <= 2.0 else f"alpha={a} violates 0 < alpha <= 2",
    "derivative": lambda _p: None,
    "antiderivative": lambda _p: None,
    "bessel": lambda s: None if np.isfinite(s) else f"s={s} must be finite",
    "low_pass": lambda c: None if c > 0.0 else f"cutoff={c} violates cutoff > 0",
}


@dataclass(frozen=True)
class MultiplierSpec:
    """
    A Fourier multiplier u_hat[k] -> m(k) u_hat[k].

    Use the named constructors rather than the raw kind strings.
    """

    kind: str
    parameter: float = 0.0

    def __post_init__(self):
        if self.kind not in SYMBOLS:
            raise ParameterError(f"unknown multiplier kind {self.kind!r}")
        problem = _VALIDATORS[self.kind](float(self.parameter))
        if problem:
            raise ParameterError(problem)

    @classmethod
    def fractional_derivative(cls, alpha: float) -> "MultiplierSpec":
        return cls("fractional_derivative", alpha)

    @classmethod
    def derivative(cls) -> "MultiplierSpec":
        return cls("derivative")

    @classmethod
    def antiderivative(cls) -> "MultiplierSpec":
        return cls("antiderivative")

    @classmethod
    def bessel(cls, s: float) -> "MultiplierSpec":
        return cls("bessel", s)

    @classmethod
    def low_pass(cls, cutoff: float) -> "MultiplierSpec":
        return cls("low_pass", cutoff)

    def symbol(self, k: np.ndarray) -> np.ndarray:
        return np.asarray(SYMBOLS[self.kind](np.asarray(k), float(self.parameter)), dtype=np.complex128)


def apply_multiplier(field: SpectralField, spec: MultiplierSpec) -> SpectralField:
    """
    Apply a Fourier multiplier.

    The antiderivative zeroes the k=0 coefficient; a ZeroMeanWarning is
    emitted when that coefficient was non-zero (see antiderivative() for
    the flag-returning form).
    """
    if spec.kind == "antiderivative" and field.mode(0) != 0:
        warnings.warn(
            f"antiderivative dropped mean {field.mode(0):.3g}", ZeroMeanWarning, stacklevel=2
        )
    result = SpectralField(spec.symbol(field.wavenumbers) * field.coefficients)
    return result.check_finite()


def antiderivative(field: SpectralField) -> Tuple[SpectralField, bool]:
    """
    Zero-mean antiderivative.

    Returns:
        A tuple of (antiderivative, mean_dropped).
    """
    spec = MultiplierSpec.antiderivative()
    result = SpectralField(spec.symbol(field.wavenumbers) * field.coefficients).check_finite()
    return result, field.mode(0) != 0


def derivative(field: SpectralField) -> SpectralField:
    return apply_multiplier(field, MultiplierSpec.derivative())


def fractional_derivative(field: SpectralField, alpha: float) -> SpectralField:
    return apply_multiplier(field, MultiplierSpec.fractional_derivative(alpha))


def bessel_potential(field: SpectralField, s: float) -> SpectralField:
    return apply_multiplier(field, MultiplierSpec.bessel(s))


def low_pass(field: SpectralField, cutoff: float) -> SpectralField:
    return apply_multiplier(field, MultiplierSpec.low_pass(cutoff))


def sobolev_norm(field: SpectralField, s: float) -> float:
    """
    Sobolev norm with the Japanese bracket weight (1 + k^2)^s.

    Args:
        field: The field to measure.
        s: Sobolev index; s=0 gives the coefficient l2 norm.

    Returns:
        (sum_k (1+k^2)^s |u_hat[k]|^2)^(1/2)
    """
    weights = (1.0 + field.wavenumbers.astype(float) ** 2) ** s
    return float(np.sqrt(np.sum(weights * np.abs(field.coefficients) ** 2)))


def l2_norm(field: SpectralField) -> float:
    """L2 norm over [0, 2*pi): sqrt(2*pi) times the coefficient norm."""
    return float(np.sqrt(2.0 * np.pi)) * sobolev_norm(field, 0.0)


def sup_norm(field: SpectralField, oversample: int = 8, candidates: int = 4) -> float:
    """
    Maximum modulus of the field.

    The field is sampled on a grid of at least 4K+1 points and the largest
    grid peaks are refined by bounded scalar optimisation of the exact
    trigonometric polynomial. The value is a lower bound of the true
    supremum, accurate to the optimiser tolerance.

    Args:
        field: The field to measure.
        oversample: Grid points per 2K+1 coefficients.
        candidates: How many grid peaks are refined.

    Returns:
        The maximum of |u(x)|.
    """
    K = field.max_wavenumber
    if K == 0:
        return abs(field.mode(0))
    M = max(4 * K + 1, oversample * (2 * K + 1))
    modulus = np.abs(synthesize(field, M))
    best = float(modulus.max())
    peaks = np.flatnonzero((modulus >= np.roll(modulus, 1)) & (modulus >= np.roll(modulus, -1)))
    peaks = peaks[np.argsort(-modulus[peaks])][:candidates]
    h = 2.0 * np.pi / M
    x = grid(M)
    for j in peaks:
        result = minimize_scalar(
            lambda y: -abs(complex(evaluate(field, y))),
            bounds=(x[j] - h, x[j] + h),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -float(result.fun))
    return best


def pointwise_product(f: SpectralField, g: SpectralField, dealias: bool = True,
                      max_wavenumber: Optional[int] = None) -> SpectralField:
    """
    Product of two fields by synthesize-multiply-analyze.

    With dealiasing the padded grid has at least K_f + K_g + K_out + 1
    points (the 2/3 rule when all band limits agree), which makes every
    retained coefficient exact. Without it the grid has 2K+1 points and
    high products alias back into the band.

    Args:
        f: First factor.
        g: Second factor.
        dealias: Whether to pad the grid.
        max_wavenumber: Band limit of the result; defaults to max(K_f, K_g).

    Returns:
        The product truncated to the result band.
    """
    K_out = max(f.max_wavenumber, g.max_wavenumber) if max_wavenumber is None else max_wavenumber
    if dealias:
        M = max(f.max_wavenumber + g.max_wavenumber + K_out + 1, 2 * K_out + 1)
    else:
        M = 2 * max(f.max_wavenumber, g.max_wavenumber, K_out) + 1
    product = synthesize(f, M) * synthesize(g, M)
    return analyze(product, K_out).check_finite()


def random_field(max_wavenumber: int, exponent: float, rng: np.random.Generator,
                 real: bool = False) -> SpectralField:
    """
    Random field with spectral profile <k>^exponent times complex Gaussians.

    Args:
        max_wavenumber: Band limit K.
        exponent: Decay exponent of the amplitude profile.
        rng: Source of randomness.
        real: Project onto real-valued functions.

    Returns:
        The random field.
    """
    k = np.arange(-max_wavenumber, max_wavenumber + 1).astype(float)
    profile = (1.0 + k ** 2) ** (exponent / 2.0)
    size = k.size
    amplitudes = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    result = SpectralField(profile * amplitudes)
    return result.real_part() if real else result


def normalized(field: SpectralField, s: float, target: float = 1.0) -> SpectralField:
    """Rescale so that sobolev_norm(field, s) == target (zero stays zero)."""
    norm = sobolev_norm(field, s)
    if norm == 0.0:
        return field
    return field * (target / norm)
