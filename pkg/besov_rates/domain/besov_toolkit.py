"""Discrete Littlewood-Paley blocks, Besov, Lebesgue and Hölder norms, and paraproducts."""

from functools import lru_cache

import numpy as np
from essentials.exceptions import InvalidArgument

from besov_rates.core.exceptions import ConfigurationError, ShapeError
from besov_rates.domain.spectral_grid import forward_values, frequencies, inverse_values
from besov_rates.domain.types.besov import BesovParams, FilterBank, Infinity, Paraproducts
from besov_rates.domain.types.grid import GridFunction

DEFAULT_EPS0 = 0.05

Exponent = float | Infinity


def _transition(s: np.ndarray) -> np.ndarray:
    """exp(-1/s) for s > 0 and 0 otherwise."""
    positive = s > 0
    return np.where(positive, np.exp(-1.0 / np.where(positive, s, 1.0)), 0.0)


def smooth_bump(x: np.ndarray, eps0: float = DEFAULT_EPS0) -> np.ndarray:
    """Even C^∞ bump: 1 on [-(1-eps0), 1-eps0], 0 outside (-1, 1), monotone in |x| in between."""
    s = (1.0 - np.abs(np.asarray(x, dtype=np.float64))) / eps0
    rising = _transition(s)
    return rising / (rising + _transition(1.0 - s))


@lru_cache(maxsize=64)
def build_filter_bank(n: int, eps0: float = DEFAULT_EPS0) -> FilterBank:
    if not 0.0 < eps0 < 0.1:
        raise ConfigurationError(f"eps0 must lie in (0, 1/10), got {eps0!r}")
    if n < 2:
        raise ConfigurationError(f"A filter bank needs n >= 2, got {n}")

    J_n = n.bit_length() - 1
    rho_n = n / 2**J_n
    rho0 = (3.0 - 2.0 * eps0) / 2.0
    k = frequencies(n).astype(np.float64)

    def phi0(x: np.ndarray) -> np.ndarray:
        return smooth_bump((rho0 / rho_n) * x, eps0)

    weights = np.empty((J_n + 2, 2 * n))
    weights[0] = phi0(k)
    for j in range(1, J_n + 2):
        weights[j] = phi0(k / 2**j) - phi0(k / 2 ** (j - 1))
    weights.setflags(write=False)

    return FilterBank(n=n, eps0=eps0, rho0=rho0, rho_n=rho_n, J_n=J_n, weights=weights)


def _check_bank(f: GridFunction, bank: FilterBank) -> None:
    if bank.n != f.grid.n:
        raise ShapeError(f"Filter bank for n={bank.n} used on a grid with n={f.grid.n}")


def block_values(values: np.ndarray, bank: FilterBank) -> np.ndarray:
    """All Littlewood-Paley blocks of the last axis of ``values``, stacked on a new second-to-last axis."""
    coeffs = forward_values(values, bank.n)[..., np.newaxis, :] * bank.weights
    blocks = inverse_values(coeffs, bank.n)
    return blocks if np.iscomplexobj(values) else blocks.real


def lp_blocks(f: GridFunction, bank: FilterBank) -> np.ndarray:
    _check_bank(f, bank)
    return block_values(f.values, bank)


def lp_block(f: GridFunction, j: int, bank: FilterBank) -> GridFunction:
    if not 0 <= j < bank.block_count:
        raise InvalidArgument(f"Block index j={j} outside [0, {bank.J_n + 1}]")
    _check_bank(f, bank)
    blocks = inverse_values(forward_values(f.values, bank.n) * bank.weights[j], bank.n)
    return GridFunction(f.grid, blocks.real if f.is_real else blocks)


def _check_exponent(p: Exponent) -> None:
    if not isinstance(p, Infinity) and not p >= 1.0:
        raise InvalidArgument(f"Lebesgue exponent must be >= 1, got {p!r}")


def _power_mean(magnitudes: np.ndarray, p: Exponent, *, normalized: bool) -> np.ndarray:
    """(mean or sum of |v|^p)^(1/p) over the last axis, rescaled by the peak to keep large p finite."""
    if isinstance(p, Infinity) or np.isinf(p):
        return magnitudes.max(axis=-1)
    peak = magnitudes.max(axis=-1, keepdims=True)
    scale = np.where(peak > 0, peak, 1.0)
    reduce = np.mean if normalized else np.sum
    return reduce((magnitudes / scale) ** p, axis=-1) ** (1.0 / p) * scale[..., 0]


def lp_norm_values(values: np.ndarray, p: Exponent) -> np.ndarray:
    """Discrete L^p norm with normalized counting measure along the last axis."""
    _check_exponent(p)
    return _power_mean(np.abs(values), p, normalized=True)


def lp_norm(f: GridFunction, p: Exponent) -> float:
    return float(lp_norm_values(f.values, p))


def besov_norm_values(values: np.ndarray, params: BesovParams, bank: FilterBank) -> np.ndarray:
    """Besov norms of a stack of grid functions held along the last axis."""
    block_norms = lp_norm_values(block_values(values, bank), params.p)
    weights = 2.0 ** (params.alpha * np.arange(bank.block_count))
    return _power_mean(weights * block_norms, params.q, normalized=False)


def besov_norm(f: GridFunction, params: BesovParams, bank: FilterBank) -> float:
    _check_bank(f, bank)
    return float(besov_norm_values(f.values, params, bank))


def holder_norm(f: GridFunction, alpha: float) -> float:
    """sup|f| plus the Hölder seminorm taken over all pairs with the periodic distance."""
    if not 0.0 < alpha < 1.0:
        raise InvalidArgument(f"Hölder exponent must lie in (0, 1), got {alpha!r}")
    size = f.grid.size
    seminorm = max(
        (
            float(np.max(np.abs(f.values - np.roll(f.values, shift)))) / (shift / size) ** alpha
            for shift in range(1, f.grid.n + 1)
        ),
        default=0.0,
    )
    return f.sup_norm + seminorm


def paraproducts(f: GridFunction, g: GridFunction, bank: FilterBank) -> Paraproducts:
    """Split f g into low-high, resonant and high-low parts; lo_hi pairs each block of f with the low part of g."""
    if f.grid != g.grid:
        raise ShapeError(f"Grid mismatch: n={f.grid.n} and n={g.grid.n}")
    _check_bank(f, bank)

    f_blocks = block_values(f.values, bank)
    g_blocks = block_values(g.values, bank)
    f_low = np.cumsum(f_blocks, axis=0)
    g_low = np.cumsum(g_blocks, axis=0)

    lo_hi = np.sum(f_blocks[2:] * g_low[:-2], axis=0)
    hi_lo = np.sum(g_blocks[2:] * f_low[:-2], axis=0)
    neighbours = g_blocks.copy()
    neighbours[1:] += g_blocks[:-1]
    neighbours[:-1] += g_blocks[1:]
    resonant = np.sum(f_blocks * neighbours, axis=0)

    return Paraproducts(
        lo_hi=GridFunction(f.grid, lo_hi),
        resonant=GridFunction(f.grid, resonant),
        hi_lo=GridFunction(f.grid, hi_lo),
    )
