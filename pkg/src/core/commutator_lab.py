#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Commutator laboratory.

This module realizes the commutators [P_L^k, d/dx], [P_L^k, f] and [L, f],
measures the operator-norm ratios they are expected to keep bounded, and
provides the dense-matrix oracle used to cross-check every spectral
operator in the package.

Commutator convention: [A, B] u = A(B u) - B(A u).

The ratio suites test the conclusions of the commutator estimates on
random ensembles. Their symbol-class hypotheses have no finite-lattice
analogue and are not checked.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy.linalg import toeplitz

from .errors import ParameterError, UndefinedFunctionError
from .model import (
    CutoffChi,
    ModelParams,
    apply_PL,
    build_cutoff,
    rhs,
    w_eps,
    z_pl_power,
)
from .spectral_field import (
    MultiplierSpec,
    SpectralField,
    apply_multiplier,
    derivative,
    fractional_derivative,
    low_pass,
    normalized,
    pointwise_product,
    random_field,
    sobolev_norm,
)

logger = logging.getLogger(__name__)

LEMMAS = ("L3.1", "L3.2", "L3.4", "A.2", "A.4")
DENSE_MAX_WAVENUMBER = 64
# Amount by which the random profiles sit inside the required Sobolev class.
PROFILE_MARGIN = 0.55

Environment = Mapping[str, SpectralField]


def multiply(f: SpectralField, u: SpectralField, dealias: bool = True) -> SpectralField:
    """f * u on the band of u; f only contributes through |k| <= 2K."""
    K = u.max_wavenumber
    return pointwise_product(f.restricted(2 * K), u, dealias=dealias, max_wavenumber=K)


def _toeplitz(f: SpectralField, max_wavenumber: int) -> np.ndarray:
    """Frequency-Toeplitz matrix M[j, k] = f_hat[j - k] on |j|, |k| <= K."""
    K = max_wavenumber
    coeffs = f.restricted(2 * K).coefficients
    return toeplitz(coeffs[2 * K:], coeffs[2 * K::-1])


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """
    Explicit matrix acting on coefficient vectors ordered k = -K..K.
    """

    max_wavenumber: int
    matrix: np.ndarray

    __array_ufunc__ = None

    def apply(self, u: SpectralField) -> SpectralField:
        if u.max_wavenumber != self.max_wavenumber:
            raise ParameterError(
                f"operator has K={self.max_wavenumber}, field has K={u.max_wavenumber}"
            )
        return SpectralField(self.matrix @ u.coefficients)

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.max_wavenumber, self.matrix @ other.matrix)

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.max_wavenumber, self.matrix + other.matrix)

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.max_wavenumber, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "DenseOperator":
        return DenseOperator(self.max_wavenumber, scalar * self.matrix)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "DenseOperator":
        return DenseOperator(self.max_wavenumber, np.linalg.matrix_power(self.matrix, power))


class OperatorExpr:
    """
    An operator expression evaluable spectrally or as a dense matrix.

    Expressions compose with @, add with + and -, scale by numbers and take
    non-negative integer powers with **.
    """

    __array_ufunc__ = None

    def apply(self, u: SpectralField, env: Environment) -> SpectralField:
        raise NotImplementedError

    def dense(self, max_wavenumber: int, env: Environment) -> np.ndarray:
        raise NotImplementedError

    def __matmul__(self, other: "OperatorExpr") -> "OperatorExpr":
        return Compose(self, other)

    def __add__(self, other: "OperatorExpr") -> "OperatorExpr":
        return Sum(self, other)

    def __sub__(self, other: "OperatorExpr") -> "OperatorExpr":
        return Sum(self, Scaled(-1.0, other))

    def __neg__(self) -> "OperatorExpr":
        return Scaled(-1.0, self)

    def __mul__(self, scalar: complex) -> "OperatorExpr":
        return Scaled(scalar, self)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "OperatorExpr":
        if int(power) != power or power < 0:
            raise ParameterError(f"operator power {power} must be a non-negative integer")
        return Power(self, int(power))


class Identity(OperatorExpr):
    def apply(self, u, env):
        return u

    def dense(self, max_wavenumber, env):
        return np.eye(2 * max_wavenumber + 1, dtype=np.complex128)


class Multiplier(OperatorExpr):
    def __init__(self, spec: MultiplierSpec):
        self.spec = spec

    def apply(self, u, env):
        return apply_multiplier(u, self.spec)

    def dense(self, max_wavenumber, env):
        k = np.arange(-max_wavenumber, max_wavenumber + 1)
        return np.diag(self.spec.symbol(k))


class Mul(OperatorExpr):
    """Multiplication by the function bound to `name` in the environment."""

    def __init__(self, name: str):
        self.name = name

    def _lookup(self, env: Environment) -> SpectralField:
        if self.name not in env:
            raise UndefinedFunctionError(self.name)
        return env[self.name]

    def apply(self, u, env):
        return multiply(self._lookup(env), u)

    def dense(self, max_wavenumber, env):
        return _toeplitz(self._lookup(env), max_wavenumber)


class Compose(OperatorExpr):
    def __init__(self, outer: OperatorExpr, inner: OperatorExpr):
        self.outer = outer
        self.inner = inner

    def apply(self, u, env):
        return self.outer.apply(self.inner.apply(u, env), env)

    def dense(self, max_wavenumber, env):
        return self.outer.dense(max_wavenumber, env) @ self.inner.dense(max_wavenumber, env)


class Sum(OperatorExpr):
    def __init__(self, left: OperatorExpr, right: OperatorExpr):
        self.left = left
        self.right = right

    def apply(self, u, env):
        return self.left.apply(u, env) + self.right.apply(u, env)

    def dense(self, max_wavenumber, env):
        return self.left.dense(max_wavenumber, env) + self.right.dense(max_wavenumber, env)


class Scaled(OperatorExpr):
    def __init__(self, scalar: complex, expr: OperatorExpr):
        self.scalar = scalar
        self.expr = expr

    def apply(self, u, env):
        return self.scalar * self.expr.apply(u, env)

    def dense(self, max_wavenumber, env):
        return self.scalar * self.expr.dense(max_wavenumber, env)


class Power(OperatorExpr):
    def __init__(self, expr: OperatorExpr, power: int):
        self.expr = expr
        self.power = power

    def apply(self, u, env):
        for _ in range(self.power):
            u = self.expr.apply(u, env)
        return u

    def dense(self, max_wavenumber, env):
        return np.linalg.matrix_power(self.expr.dense(max_wavenumber, env), self.power)


def L(alpha: float) -> OperatorExpr:
    return Multiplier(MultiplierSpec.fractional_derivative(alpha))


def Dx() -> OperatorExpr:
    return Multiplier(MultiplierSpec.derivative())


def Bessel(s: float) -> OperatorExpr:
    return Multiplier(MultiplierSpec.bessel(s))


def LowPass(cutoff: float) -> OperatorExpr:
    return Multiplier(MultiplierSpec.low_pass(cutoff))


def P_L(alpha: float, chi: str = "chi") -> OperatorExpr:
    """i L + chi, with chi looked up by name."""
    return 1j * L(alpha) + Mul(chi)


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return a @ b - b @ a


def dense_operator(expr: OperatorExpr, max_wavenumber: int,
                   env: Optional[Environment] = None) -> DenseOperator:
    """
    Assemble the dense matrix of an operator expression.

    Multipliers become diagonal matrices, multiplications become
    frequency-Toeplitz matrices and compositions become matrix products.
    Functions in `env` should be resolved to at least 2K so that truncation,
    not aliasing, is the only difference from the continuous operator.

    Args:
        expr: The operator expression.
        max_wavenumber: Band limit K (at most 64).
        env: Functions referenced by Mul nodes.

    Returns:
        The DenseOperator.
    """
    if max_wavenumber > DENSE_MAX_WAVENUMBER:
        raise ParameterError(
            f"dense oracle K={max_wavenumber} violates K <= {DENSE_MAX_WAVENUMBER}"
        )
    return DenseOperator(max_wavenumber, expr.dense(max_wavenumber, env or {}))


def _check_power(k: int):
    if not 1 <= k <= 4:
        raise ParameterError(f"commutator power k={k} violates 1 <= k <= 4")


def commutator_PL_dx(u: SpectralField, cutoff: Optional[CutoffChi], alpha: float,
                     k: int) -> SpectralField:
    """P_L^k(u_x) - d/dx(P_L^k u)."""
    _check_power(k)
    return z_pl_power(derivative(u), cutoff, alpha, k) - derivative(z_pl_power(u, cutoff, alpha, k))


def commutator_PL_f(u: SpectralField, f: SpectralField, cutoff: Optional[CutoffChi],
                    alpha: float, k: int) -> SpectralField:
    """P_L^k(f u) - f P_L^k u for real f."""
    _check_power(k)
    if not f.is_real():
        raise ParameterError("commutator with f requires a real-valued f")
    return z_pl_power(multiply(f, u), cutoff, alpha, k) - multiply(f, z_pl_power(u, cutoff, alpha, k))


def commutator_L_f(u: SpectralField, f: SpectralField, alpha: float) -> SpectralField:
    """L(f u) - f L u for real f."""
    if not f.is_real():
        raise ParameterError("commutator with f requires a real-valued f")
    return fractional_derivative(multiply(f, u), alpha) - multiply(f, fractional_derivative(u, alpha))


class SplitCommutator(NamedTuple):
    total: SpectralField
    low: SpectralField
    high: SpectralField


def commutator_L_f_split(u: SpectralField, f: SpectralField, alpha: float,
                         cutoff: float = 1.0) -> SplitCommutator:
    """
    [L, f]u split into [S L, f]u and [(1 - S) L, f]u with S the low-pass at `cutoff`.
    """
    fu = multiply(f, u)
    lu = fractional_derivative(u, alpha)
    lfu = fractional_derivative(fu, alpha)
    low_lfu = low_pass(lfu, cutoff)
    low_lu = low_pass(lu, cutoff)
    low = low_lfu - multiply(f, low_lu)
    high = (lfu - low_lfu) - multiply(f, lu - low_lu)
    return SplitCommutator(commutator_L_f(u, f, alpha), low, high)


@dataclass(frozen=True)
class SuiteParams:
    """Lemma-instance parameters (k, alpha, s, r) and the split threshold."""

    k: int = 1
    alpha: float = 1.5
    s: float = 0.0
    r: float = 2.0
    low_pass: float = 1.0

    def as_dict(self) -> Dict[str, float]:
        return {"k": self.k, "alpha": self.alpha, "s": self.s, "r": self.r, "low_pass": self.low_pass}


@dataclass
class CommutatorReport:
    """
    Measured operator-norm ratios for one lemma instance.

    Attributes:
        lemma: Lemma id, one of L3.1, L3.2, L3.4, A.2, A.4.
        params: Lemma parameters.
        ensemble_size: Number of random members per level.
        seed: Seed of the ensemble.
        level_name: "K" for resolution sweeps, "p" for dyadic bands.
        max_ratios: Largest ratio per level.
        samples: Every ratio per level.
        verdict: Whether the ratios stayed bounded.
        diagnostics: Extra per-level series (e.g. split contributions).
    """

    lemma: str
    params: Dict[str, float]
    ensemble_size: int
    seed: int
    level_name: str = "K"
    max_ratios: Dict[int, float] = field(default_factory=dict)
    samples: Dict[int, np.ndarray] = field(default_factory=dict)
    verdict: bool = False
    diagnostics: Dict[str, Dict[int, float]] = field(default_factory=dict)

    @property
    def overall_max(self) -> float:
        return max(self.max_ratios.values(), default=0.0)

    def to_dict(self) -> Dict:
        return {
            "lemma": self.lemma,
            "params": dict(self.params),
            "ensemble_size": self.ensemble_size,
            "seed": self.seed,
            "level_name": self.level_name,
            "max_ratios": {str(level): value for level, value in sorted(self.max_ratios.items())},
            "diagnostics": {
                name: {str(level): value for level, value in sorted(series.items())}
                for name, series in self.diagnostics.items()
            },
            "verdict": "bounded" if self.verdict else "unbounded",
        }


def check_admissible(lemma: str, params: SuiteParams):
    """
    Refuse lemma instances outside the estimate's hypotheses.

    Raises:
        ParameterError: naming the violated inequality.
    """
    if lemma not in LEMMAS:
        raise ParameterError(f"unknown lemma id {lemma!r}; expected one of {', '.join(LEMMAS)}")
    k, alpha, s, r = params.k, params.alpha, params.s, params.r
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha={alpha} violates 0 < alpha <= 2")
    if lemma in ("L3.1", "L3.2"):
        _check_power(k)
    if lemma in ("L3.1", "L3.2", "L3.4") and s < 0.0:
        raise ParameterError(f"s={s} violates s >= 0")
    if lemma in ("L3.2", "L3.4") and not r > 1.5:
        raise ParameterError(f"r={r} violates r > 3/2")
    if lemma == "L3.2" and s + k * alpha > r:
        raise ParameterError(f"s + k*alpha = {s + k * alpha:g} violates s + k*alpha <= r = {r:g}")
    if lemma == "L3.4" and s + alpha > r:
        raise ParameterError(f"s + alpha = {s + alpha:g} violates s + alpha <= r = {r:g}")
    if lemma == "A.2" and not s > 0.5:
        raise ParameterError(f"s={s} violates s > 1/2")
    if params.low_pass <= 0.0:
        raise ParameterError(f"low_pass={params.low_pass} violates low_pass > 0")


def bounded_growth(max_by_level: Mapping[int, float], tolerance: float = 0.10,
                   floor: float = 1e-13) -> bool:
    """
    True when no level's maximum exceeds the previous one by more than `tolerance`.
    """
    values = [max_by_level[level] for level in sorted(max_by_level)]
    if not all(np.isfinite(values)):
        return False
    for previous, current in zip(values, values[1:]):
        if current <= floor:
            continue
        if current > (1.0 + tolerance) * max(previous, floor):
            return False
    return True


def default_sponge(max_wavenumber: int) -> CutoffChi:
    """The default sponge on [pi/2, 3pi/2] with delta = pi/8, resolved to 2K."""
    return build_cutoff(np.pi / 2, 3 * np.pi / 2, np.pi / 8, max_wavenumber=2 * max_wavenumber)


FieldSampler = Callable[[np.random.Generator, int], SpectralField]


def _profile_sampler(exponent: float, real: bool = False, norm_index: Optional[float] = None) -> FieldSampler:
    def sample(rng: np.random.Generator, max_wavenumber: int) -> SpectralField:
        result = random_field(max_wavenumber, exponent, rng, real=real)
        return normalized(result, norm_index) if norm_index is not None else result
    return sample


def _u_exponent(lemma: str, params: SuiteParams) -> float:
    if lemma == "L3.4":
        return -(params.s + params.alpha) - PROFILE_MARGIN
    if lemma == "A.2":
        return -params.s - PROFILE_MARGIN
    return -(params.s + params.k * params.alpha) - PROFILE_MARGIN


def _ratio(numerator: float, denominator: float) -> float:
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else float("inf")
    return numerator / denominator


def ratio_suite(lemma: str, params: SuiteParams, ensemble: int = 100, seed: int = 0,
                resolutions: Sequence[int] = (32, 64, 128, 256),
                cutoff_factory: Callable[[int], Optional[CutoffChi]] = default_sponge,
                u_sampler: Optional[FieldSampler] = None,
                f_sampler: Optional[FieldSampler] = None,
                growth_tolerance: float = 0.10) -> CommutatorReport:
    """
    Measure a commutator (or product) estimate on a random ensemble.

    The ensemble is drawn once at the largest resolution and truncated to
    each K, so the per-K maxima form a convergent sequence and the
    boundedness verdict is a test of K-independence.

    Args:
        lemma: One of L3.1, L3.2, L3.4, A.2.
        params: Lemma parameters.
        ensemble: Number of members.
        seed: Seed of the ensemble.
        resolutions: Band limits to sweep.
        cutoff_factory: Builds the sponge for a given K.
        u_sampler: Overrides the random u (and the second factor for A.2).
        f_sampler: Overrides the random real f.
        growth_tolerance: Allowed growth of the max ratio per resolution step.

    Returns:
        The CommutatorReport.
    """
    check_admissible(lemma, params)
    if lemma == "A.4":
        raise ParameterError("A.4 is measured by bernstein_suite")
    resolutions = sorted(resolutions)
    K_max = resolutions[-1]
    rng = np.random.default_rng(seed)
    u_sampler = u_sampler or _profile_sampler(_u_exponent(lemma, params))
    if lemma == "A.2":
        f_sampler = f_sampler or _profile_sampler(_u_exponent(lemma, params))
    else:
        f_sampler = f_sampler or _profile_sampler(-params.r - PROFILE_MARGIN, real=True, norm_index=params.r)
    members = [(u_sampler(rng, K_max), f_sampler(rng, K_max)) for _ in range(ensemble)]

    report = CommutatorReport(lemma, params.as_dict(), ensemble, seed)
    if lemma == "L3.4":
        report.diagnostics = {"low_max": {}, "high_max": {}}
    k, alpha, s, r = params.k, params.alpha, params.s, params.r

    for K in resolutions:
        cutoff = cutoff_factory(K) if lemma in ("L3.1", "L3.2") else None
        ratios = np.empty(ensemble)
        low_max = high_max = 0.0
        for i, (u_full, f_full) in enumerate(members):
            u = u_full.restricted(K)
            f = f_full.restricted(K)
            if lemma == "L3.1":
                numerator = sobolev_norm(commutator_PL_dx(u, cutoff, alpha, k), s)
                denominator = sobolev_norm(u, s + k * alpha - alpha)
            elif lemma == "L3.2":
                numerator = sobolev_norm(commutator_PL_f(u, f, cutoff, alpha, k), s)
                denominator = sobolev_norm(f, r) * sobolev_norm(u, s + k * alpha - 1.0)
            elif lemma == "L3.4":
                split = commutator_L_f_split(u, f, alpha, params.low_pass)
                numerator = sobolev_norm(split.total, s)
                denominator = sobolev_norm(f, r) * sobolev_norm(u, s + alpha - 1.0)
                low_max = max(low_max, _ratio(sobolev_norm(split.low, s), denominator))
                high_max = max(high_max, _ratio(sobolev_norm(split.high, s), denominator))
            else:
                product = pointwise_product(u, f, max_wavenumber=2 * K)
                numerator = sobolev_norm(product, s)
                denominator = sobolev_norm(u, s) * sobolev_norm(f, s)
            ratios[i] = _ratio(numerator, denominator)
        report.samples[K] = ratios
        report.max_ratios[K] = float(ratios.max(initial=0.0))
        if lemma == "L3.4":
            report.diagnostics["low_max"][K] = low_max
            report.diagnostics["high_max"][K] = high_max
        logger.info("%s %s K=%d: max ratio %.6g", lemma, params.as_dict(), K, report.max_ratios[K])

    report.verdict = bounded_growth(report.max_ratios, growth_tolerance)
    return report


def algebra_suite(s: float = 1.0, ensemble: int = 100, seed: int = 0,
                  resolutions: Sequence[int] = (32, 64, 128, 256)) -> CommutatorReport:
    """Sobolev algebra constant ||uv||_s / (||u||_s ||v||_s) across resolutions."""
    return ratio_suite("A.2", SuiteParams(s=s), ensemble, seed, resolutions)


def _band_field(rng: np.random.Generator, max_wavenumber: int, low: int, high: int) -> SpectralField:
    k = np.arange(-max_wavenumber, max_wavenumber + 1)
    support = (np.abs(k) >= low) & (np.abs(k) <= high)
    amplitudes = rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)
    return SpectralField(np.where(support, amplitudes, 0.0))


def bernstein_suite(p_values: Sequence[int], ensemble: int = 100, seed: int = 0,
                    max_wavenumber: Optional[int] = None) -> CommutatorReport:
    """
    Bernstein ratios ||u_x||_0 / (2^p ||u||_0) on dyadic annuli and balls.

    Annulus members (support 2^p [1/2, 2]) must land in [1/2, 2]; ball
    members (support |k| <= 2^p) must stay at or below 1.

    Args:
        p_values: Dyadic levels.
        ensemble: Members per level and shape.
        seed: Seed of the ensemble.
        max_wavenumber: Band limit; defaults to 2^(max p + 1).

    Returns:
        A CommutatorReport with level_name "p".
    """
    p_values = sorted(p_values)
    K = max_wavenumber if max_wavenumber is not None else 2 ** (p_values[-1] + 1)
    for p in p_values:
        if p < 0 or 2 ** (p + 1) > K:
            raise ParameterError(f"band 2^(p+1) = {2 ** (p + 1)} violates 2^(p+1) <= K = {K}")
    rng = np.random.default_rng(seed)
    report = CommutatorReport("A.4", {"K": K}, ensemble, seed, level_name="p")
    report.diagnostics = {"annulus_min": {}, "ball_max": {}}
    inside = True
    for p in p_values:
        scale = 2.0 ** p
        annulus = np.empty(ensemble)
        ball = np.empty(ensemble)
        low = int(np.ceil(scale / 2.0))
        for i in range(ensemble):
            u = _band_field(rng, K, low, 2 ** (p + 1))
            annulus[i] = sobolev_norm(derivative(u), 0.0) / (scale * sobolev_norm(u, 0.0))
            w = _band_field(rng, K, 0, 2 ** p)
            ball[i] = sobolev_norm(derivative(w), 0.0) / (scale * sobolev_norm(w, 0.0))
        report.samples[p] = annulus
        report.max_ratios[p] = float(annulus.max())
        report.diagnostics["annulus_min"][p] = float(annulus.min())
        report.diagnostics["ball_max"][p] = float(ball.max())
        inside &= bool(annulus.min() >= 0.5 - 1e-12 and annulus.max() <= 2.0 + 1e-12)
        inside &= bool(ball.max() <= 1.0 + 1e-12)
        logger.info("A.4 p=%d: annulus [%.4f, %.4f], ball max %.4f",
                    p, annulus.min(), annulus.max(), ball.max())
    report.verdict = inside
    return report


def _relative_error(spectral: SpectralField, dense: SpectralField) -> float:
    scale = max(1.0, float(np.max(np.abs(dense.coefficients))))
    return float(np.max(np.abs(spectral.coefficients - dense.coefficients)) / scale)


def oracle_errors(max_wavenumber: int = 16, trials: int = 50, seed: int = 0,
                  params: Optional[ModelParams] = None) -> Dict[str, float]:
    """
    Largest relative spectral-vs-dense discrepancy per operator.

    Covers L, chi, P_L, P_L^k (k = 2..4), the rescaled right-hand side and
    every commutator, each on `trials` random inputs.

    Args:
        max_wavenumber: Band limit K of the inputs.
        trials: Random inputs per operator.
        seed: Seed of the inputs.
        params: Model parameters; defaults to capillary with the default sponge.

    Returns:
        Mapping from operator name to the worst relative error.
    """
    K = max_wavenumber
    params = params or ModelParams(cutoff=default_sponge(K))
    cutoff = params.cutoff
    alpha = params.alpha
    rng = np.random.default_rng(seed)
    env: Dict[str, SpectralField] = {"chi": cutoff.spectrum(2 * K)}

    chi_f_expressions: Dict[str, OperatorExpr] = {
        "L": L(alpha),
        "chi": Mul("chi"),
        "P_L": P_L(alpha),
    }
    for k in range(2, 5):
        chi_f_expressions[f"P_L^{k}"] = P_L(alpha) ** k
    for k in range(1, 5):
        chi_f_expressions[f"[P_L^{k},dx]"] = commutator(P_L(alpha) ** k, Dx())
        chi_f_expressions[f"[P_L^{k},f]"] = commutator(P_L(alpha) ** k, Mul("f"))
    chi_f_expressions["[L,f]"] = commutator(L(alpha), Mul("f"))
    dense = {name: dense_operator(expr, K, {**env, "f": SpectralField.zeros(0)})
             for name, expr in chi_f_expressions.items() if "f" not in name}

    errors = {name: 0.0 for name in chi_f_expressions}
    errors["rhs"] = 0.0
    linear = (-1.0 / params.epsilon) * dense_operator(P_L(alpha), K, env).matrix
    for _ in range(trials):
        u = random_field(K, -1.0, rng)
        f = random_field(K, -2.0, rng, real=True)
        trial_env = {**env, "f": f}
        for name, expr in chi_f_expressions.items():
            matrix = dense[name] if name in dense else dense_operator(expr, K, trial_env)
            reference = matrix.apply(u)
            if name.startswith("[P_L^") and name.endswith(",dx]"):
                spectral = commutator_PL_dx(u, cutoff, alpha, int(name[5]))
            elif name.startswith("[P_L^") and name.endswith(",f]"):
                spectral = commutator_PL_f(u, f, cutoff, alpha, int(name[5]))
            elif name == "[L,f]":
                spectral = commutator_L_f(u, f, alpha)
            elif name == "chi":
                spectral = multiply(env["chi"], u)
            elif name == "L":
                spectral = fractional_derivative(u, alpha)
            elif name == "P_L":
                spectral = apply_PL(u, cutoff, alpha)
            else:
                spectral = z_pl_power(u, cutoff, alpha, int(name[-1]))
            errors[name] = max(errors[name], _relative_error(spectral, reference))
        transport = _toeplitz(w_eps(u, params), K) @ Dx().dense(K, {})
        reference = SpectralField((linear - transport) @ u.coefficients)
        errors["rhs"] = max(errors["rhs"], _relative_error(rhs(u, params), reference))
    for name, value in errors.items():
        logger.debug("oracle %s: %.3e", name, value)
    return errors
