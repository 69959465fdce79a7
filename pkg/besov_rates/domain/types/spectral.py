"""Types for discrete and continuous Fourier coefficients."""

from dataclasses import dataclass

import numpy as np

from besov_rates.core.exceptions import FrequencyRangeError, ShapeError
from besov_rates.domain.types.grid import GridSpec


@dataclass(frozen=True, slots=True)
class Spectrum:
    """Coefficients <f, δe_k>_n of a grid function, stored for k = -n, ..., n-1 in that order."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if coeffs.shape != (self.grid.size,):
            raise ShapeError(f"Expected {self.grid.size} coefficients for n={self.grid.n}, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.grid.n, self.grid.n)

    def coeff(self, k: int) -> complex:
        if not -self.grid.n <= k < self.grid.n:
            raise FrequencyRangeError(f"k={k} outside [-{self.grid.n}, {self.grid.n})")
        return complex(self.coeffs[k + self.grid.n])


@dataclass(frozen=True, slots=True)
class TruncatedSeries:
    """A trigonometric polynomial on the torus, sum of coeffs[i] * exp(2 pi i frequencies[i] x)."""

    frequencies: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        frequencies = np.array(self.frequencies, dtype=np.int64, copy=True)
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if frequencies.ndim != 1 or frequencies.shape != coeffs.shape:
            raise ShapeError(f"Frequencies {frequencies.shape} and coefficients {coeffs.shape} do not match")
        if np.unique(frequencies).size != frequencies.size:
            raise ShapeError("Repeated frequencies in a truncated series")
        frequencies.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_terms(cls, terms: dict[int, complex]) -> "TruncatedSeries":
        ordered = sorted(terms)
        return cls(np.array(ordered, dtype=np.int64), np.array([terms[k] for k in ordered], dtype=np.complex128))

    @classmethod
    def single_mode(cls, k: int, amplitude: complex = 1.0) -> "TruncatedSeries":
        return cls.from_terms({k: amplitude})

    def coeff(self, k: int) -> complex:
        (where,) = np.nonzero(self.frequencies == k)
        return complex(self.coeffs[where[0]]) if where.size else 0j

    @property
    def bandwidth(self) -> int:
        return int(np.max(np.abs(self.frequencies))) if self.frequencies.size else 0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the series at arbitrary points of the torus."""
        x = np.asarray(x, dtype=np.float64)
        phases = np.exp(2j * np.pi * np.multiply.outer(x, self.frequencies))
        return phases @ self.coeffs
