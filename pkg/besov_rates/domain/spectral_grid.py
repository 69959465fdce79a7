"""Discrete Fourier analysis on the grid of 2n points.

Frequencies are always stored in the order k = -n, ..., n-1. The coefficient of a grid function is
``<f, δe_k>_n = (2n)^-1 sum_x f(x) exp(-2 pi i k x)``. Above ``FAST_TRANSFORM_MIN_N``, scipy's FFT
computes it. Below that, a cached dense matrix does.
"""

from functools import lru_cache

import numpy as np
import scipy.fft
from essentials.exceptions import InvalidArgument

from besov_rates.core.exceptions import ConfigurationError, FrequencyRangeError
from besov_rates.core.logging import logger
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.spectral import Spectrum, TruncatedSeries

FAST_TRANSFORM_MIN_N = 64


def frequencies(n: int) -> np.ndarray:
    return np.arange(-n, n)


def basis_function(grid: GridSpec, k: int) -> GridFunction:
    """Sample e_k(x) = exp(2 pi i k x) on the grid."""
    return GridFunction(grid, np.exp(2j * np.pi * k * grid.points))


@lru_cache(maxsize=16)
def _dft_matrix(n: int) -> np.ndarray:
    x = np.arange(2 * n) / (2 * n)
    matrix = np.exp(-2j * np.pi * np.multiply.outer(frequencies(n), x)) / (2 * n)
    matrix.setflags(write=False)
    return matrix


def forward_values(values: np.ndarray, n: int) -> np.ndarray:
    """Coefficients along the last axis, ordered k = -n..n-1."""
    if n < FAST_TRANSFORM_MIN_N:
        return values @ _dft_matrix(n).T
    return scipy.fft.fftshift(scipy.fft.fft(values, axis=-1), axes=-1) / (2 * n)


def inverse_values(coeffs: np.ndarray, n: int) -> np.ndarray:
    if n < FAST_TRANSFORM_MIN_N:
        return coeffs @ np.conj(_dft_matrix(n)) * (2 * n)
    return scipy.fft.ifft(scipy.fft.ifftshift(coeffs, axes=-1), axis=-1) * (2 * n)


def forward_transform(f: GridFunction) -> Spectrum:
    return Spectrum(f.grid, forward_values(f.values, f.grid.n))


def inverse_transform(s: Spectrum, *, real: bool = False) -> GridFunction:
    """Rebuild f = sum_k coeff(k) δe_k; ``real=True`` drops the imaginary part for real-valued data."""
    values = inverse_values(s.coeffs, s.grid.n)
    return GridFunction(s.grid, values.real if real else values)


def apply_multiplier(f: GridFunction, multiplier: np.ndarray) -> GridFunction:
    """Multiply mode k of f by multiplier[k + n]; real input stays real for even real multipliers."""
    values = inverse_values(forward_values(f.values, f.grid.n) * multiplier, f.grid.n)
    return GridFunction(f.grid, values.real if f.is_real else values)


def laplacian_values(values: np.ndarray, n: int) -> np.ndarray:
    """Periodic second difference (2n)^2 (f(x+) - 2 f(x) + f(x-)) along the last axis."""
    out = np.empty_like(values)
    out[..., 1:-1] = values[..., 2:] + values[..., :-2]
    out[..., 0] = values[..., 1] + values[..., -1]
    out[..., -1] = values[..., 0] + values[..., -2]
    out -= 2.0 * values
    out *= (2 * n) ** 2
    return out


def discrete_laplacian(f: GridFunction) -> GridFunction:
    return GridFunction(f.grid, laplacian_values(f.values, f.grid.n))


def _check_frequency(n: int, j: int) -> None:
    if abs(j) > n:
        raise FrequencyRangeError(f"j={j} outside [-{n}, {n}]")


def eigenvalue(n: int, j: int) -> float:
    """λ^n_j = -16 n^2 sin^2(j pi / 2n)."""
    _check_frequency(n, j)
    return float(-16.0 * n**2 * np.sin(j * np.pi / (2 * n)) ** 2)


def eigenvalues(n: int) -> np.ndarray:
    return -16.0 * n**2 * np.sin(frequencies(n) * np.pi / (2 * n)) ** 2


def continuous_eigenvalue(k: int | np.ndarray) -> np.ndarray | float:
    return -4.0 * np.pi**2 * np.square(k)


def gamma_ratio(n: int, j: int) -> float:
    """Ratio λ^n_j / λ_j of discrete to continuous eigenvalue, with value 1 at j = 0."""
    _check_frequency(n, j)
    if j == 0:
        return 1.0
    x = j * np.pi / (2 * n)
    return float((np.sin(x) / x) ** 2)


def step_factors(grid: GridSpec) -> np.ndarray:
    """1 + h λ^n_k for k = -n..n-1; these lie in [1/2, 1] whenever c <= 1/8."""
    return 1.0 + grid.h * eigenvalues(grid.n)


def heat_multipliers(grid: GridSpec, steps: int) -> np.ndarray:
    return np.power(step_factors(grid), steps)


def heat_step_multiplier(grid: GridSpec, j: int, t: float) -> float:
    """(1 + h λ^n_j)^(t/h), the mode-j multiplier of the discrete heat semigroup."""
    _check_frequency(grid.n, j)
    steps = grid.step_of(t)
    return float((1.0 + grid.h * eigenvalue(grid.n, j)) ** steps)


def discrete_semigroup_apply(grid: GridSpec, t: float, f: GridFunction) -> GridFunction:
    return discrete_semigroup_steps(grid, grid.step_of(t), f)


def discrete_semigroup_steps(grid: GridSpec, steps: int, f: GridFunction) -> GridFunction:
    return apply_multiplier(f, heat_multipliers(grid, steps))


def continuous_semigroup_apply(coeffs: TruncatedSeries, t: float) -> TruncatedSeries:
    """Apply the heat semigroup on the torus: mode k is multiplied by exp(-4 pi^2 k^2 t)."""
    if t < 0:
        raise InvalidArgument(f"Heat semigroup time must be non-negative, got {t!r}")
    return TruncatedSeries(coeffs.frequencies, coeffs.coeffs * np.exp(continuous_eigenvalue(coeffs.frequencies) * t))


def extend_iota(f: GridFunction) -> TruncatedSeries:
    """ιf = sum_{j=-n}^{n-1} <f, δe_j>_n e_j; complex valued in general because mode -n is unpaired."""
    return TruncatedSeries(frequencies(f.grid.n), forward_values(f.values, f.grid.n))


def extend_iota_real(f: GridFunction) -> TruncatedSeries:
    """Real-preserving extension: the coefficient of mode -n is split evenly between modes -n and n."""
    n = f.grid.n
    coeffs = forward_values(f.values, n)
    split = np.append(coeffs, coeffs[0] / 2)
    split[0] /= 2
    return TruncatedSeries(np.arange(-n, n + 1), split)


def restrict_delta(series: TruncatedSeries, target: GridSpec) -> GridFunction:
    """Evaluate a trigonometric polynomial at the points of the target grid."""
    return GridFunction(target, series.evaluate(target.points))


def oversample(series: TruncatedSeries, size: int) -> np.ndarray:
    """Values of the series at x = i/size, i < size; exact when size exceeds twice the bandwidth."""
    if size <= 2 * series.bandwidth:
        return series.evaluate(np.arange(size) / size)
    padded = np.zeros(size, dtype=np.complex128)
    np.add.at(padded, series.frequencies % size, series.coeffs)
    return scipy.fft.ifft(padded) * size


def calibrate_kappa(grid: GridSpec) -> float:
    """Largest κ with |1 + h λ^n_j|^(t/h) <= exp(-κ t j^2) for all j and t on the time grid."""
    j = frequencies(grid.n)
    j = j[j != 0]
    factors = 1.0 + grid.h * eigenvalues(grid.n)[grid.n + j]
    kappa = float(np.min(-np.log(np.abs(factors)) / (grid.h * j.astype(np.float64) ** 2)))
    if not kappa > 0:
        raise ConfigurationError(f"No positive decay constant for n={grid.n}, c={grid.c}")
    logger.debug(f"Calibrated decay constant kappa={kappa:.6f} for n={grid.n}, c={grid.c}")
    return kappa
