"""Property suite run by ``besov-rates verify``.

There are three kinds of checks:
- exact identities, asserted to rounding;
- inequalities with an unknown constant, where the constant is fitted at the smallest grid and must not
  grow by more than ``GROWTH_FACTOR`` on finer grids;
- oracle checks on the exact linear-case mode variances.

Sups over t in the time grid are taken over a geometric subset of step counts.
"""

from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

import numpy as np

from besov_rates.core.logging import logger
from besov_rates.core.utils import geometric_steps
from besov_rates.domain.besov_toolkit import (
    DEFAULT_EPS0,
    besov_norm,
    build_filter_bank,
    lp_blocks,
    lp_norm,
    lp_norm_values,
    paraproducts,
)
from besov_rates.domain.error_lab import (
    geometric_sum,
    heat_kernel_error_probe,
    kolmogorov_scan,
    lower_bound_scan,
    rate_fit,
    uniform_mode_bound,
)
from besov_rates.domain.spde_scheme import ZERO, euler_values
from besov_rates.domain.spectral_grid import (
    apply_multiplier,
    calibrate_kappa,
    discrete_semigroup_steps,
    extend_iota,
    forward_transform,
    frequencies,
    heat_multipliers,
    inverse_transform,
    inverse_values,
    oversample,
    restrict_delta,
    step_factors,
)
from besov_rates.domain.types.besov import INF, BesovParams
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.report import CheckResult
from besov_rates.domain.types.scheme import InitialCondition

GROWTH_FACTOR = 2.0
EXACT_TOLERANCE = 1e-10
ROUND_TRIP_TOLERANCE = 1e-12

Check = Callable[["VerificationSuite"], CheckResult]
CHECKS: dict[str, Check] = {}


def check(name: str) -> Callable[[Check], Check]:
    def register(method: Check) -> Check:
        CHECKS[name] = method
        return method

    return register


def no_growth(name: str, ratios: dict[int, float], factor: float = GROWTH_FACTOR) -> CheckResult:
    """Pass when no ratio exceeds ``factor`` times the one at the smallest n."""
    baseline = ratios[min(ratios)]
    worst = max(ratio / baseline for ratio in ratios.values()) if baseline > 0 else 1.0
    return CheckResult(
        name=name,
        passed=bool(worst <= factor),
        detail=f"constant fitted at n={min(ratios)}: {baseline:.4g}, largest growth {worst:.3f}",
        measurements={str(n): ratio for n, ratio in sorted(ratios.items())},
    )


def log_decay_excess(multipliers: np.ndarray, decay: np.ndarray) -> np.ndarray:
    """(log|m| + decay) / max(1, decay): positive where |m| > exp(-decay), -inf where m vanishes."""
    with np.errstate(divide="ignore"):
        log_magnitude = np.log(np.abs(multipliers))
    return (log_magnitude + decay) / np.maximum(1.0, decay)


def exact(name: str, errors: dict[int, float], tolerance: float) -> CheckResult:
    worst = max(errors.values())
    return CheckResult(
        name=name,
        passed=bool(worst <= tolerance),
        detail=f"largest deviation {worst:.3e} (tolerance {tolerance:.0e})",
        measurements={str(n): error for n, error in sorted(errors.items())},
    )


@dataclass
class VerificationSuite:
    max_n: int = 256
    samples: int = 20
    bernstein_samples: int = 1000
    seed: int = 0
    eps0: float = DEFAULT_EPS0
    c: float = 0.125
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._rng = np.random.Generator(np.random.Philox(key=self.seed))

    def grids(self, smallest: int = 4, largest: int | None = None) -> list[GridSpec]:
        largest = min(largest or self.max_n, self.max_n)
        return [GridSpec.of(2**m, self.c) for m in range(smallest.bit_length() - 1, largest.bit_length())]

    def random_functions(self, grid: GridSpec, count: int | None = None) -> Iterator[GridFunction]:
        for _ in range(count or self.samples):
            yield GridFunction(grid, self._rng.standard_normal(grid.size))

    def run(self, names: list[str] | None = None) -> list[CheckResult]:
        results = []
        for name in names or list(CHECKS):
            logger.debug(f"Running check {name}")
            try:
                result = CHECKS[name](self)
            except Exception as exc:  # a crashing check is a failing check
                logger.exception(f"Check {name} raised")
                result = CheckResult(name=name, passed=False, detail=f"{type(exc).__name__}: {exc}")
            logger.info(f"{'PASS' if result.passed else 'FAIL'} {name}: {result.detail}")
            results.append(result)
        return results

    @check("parseval")
    def parseval(self) -> CheckResult:
        errors = {}
        for grid in self.grids():
            errors[grid.n] = max(
                abs(np.sum(np.abs(forward_transform(f).coeffs) ** 2) / lp_norm(f, 2) ** 2 - 1.0)
                for f in self.random_functions(grid)
            )
        return exact("parseval", errors, EXACT_TOLERANCE)

    @check("round_trip")
    def round_trip(self) -> CheckResult:
        errors = {}
        for grid in self.grids():
            errors[grid.n] = max(
                float(np.max(np.abs(inverse_transform(forward_transform(f)).values - f.values))) / f.sup_norm
                for f in self.random_functions(grid)
            )
        return exact("round_trip", errors, ROUND_TRIP_TOLERANCE)

    @check("delta_iota")
    def delta_iota(self) -> CheckResult:
        errors = {}
        for grid in self.grids():
            errors[grid.n] = max(
                float(np.max(np.abs(restrict_delta(extend_iota(f), grid).values - f.values))) / f.sup_norm
                for f in self.random_functions(grid)
            )
        return exact("delta_iota", errors, EXACT_TOLERANCE)

    @check("lp_reconstruction")
    def lp_reconstruction(self) -> CheckResult:
        errors = {}
        for grid in self.grids():
            bank = build_filter_bank(grid.n, self.eps0)
            errors[grid.n] = max(
                float(np.max(np.abs(lp_blocks(f, bank).sum(axis=0) - f.values))) / f.sup_norm
                for f in self.random_functions(grid)
            )
        return exact("lp_reconstruction", errors, EXACT_TOLERANCE)

    @check("paraproduct_sum")
    def paraproduct_sum(self) -> CheckResult:
        errors = {}
        for grid in self.grids():
            bank = build_filter_bank(grid.n, self.eps0)
            worst = 0.0
            for f, g in zip(self.random_functions(grid), self.random_functions(grid), strict=True):
                product = f.values * g.values
                total = sum(part.values for part in paraproducts(f, g, bank))
                worst = max(worst, float(np.max(np.abs(total - product)) / np.max(np.abs(product))))
            errors[grid.n] = worst
        return exact("paraproduct_sum", errors, EXACT_TOLERANCE)

    @check("semigroup")
    def semigroup(self) -> CheckResult:
        errors = {}
        for grid in self.grids():
            s, t = grid.steps_per_unit // 16, grid.steps_per_unit // 4
            errors[grid.n] = max(
                float(
                    np.max(
                        np.abs(
                            discrete_semigroup_steps(grid, s, discrete_semigroup_steps(grid, t, f)).values
                            - discrete_semigroup_steps(grid, s + t, f).values
                        )
                    )
                )
                / f.sup_norm
                for f in self.random_functions(grid)
            )
        return exact("semigroup", errors, ROUND_TRIP_TOLERANCE)

    @check("stencil_spectral")
    def stencil_spectral(self) -> CheckResult:
        errors = {}
        for grid in self.grids():
            steps = 200
            (f,) = self.random_functions(grid, 1)
            values, eta = f.values, np.zeros(grid.size)
            for _ in range(steps):
                values = euler_values(values, eta, ZERO, grid)
            expected = discrete_semigroup_steps(grid, steps, f).values
            errors[grid.n] = float(np.max(np.abs(values - expected))) / f.sup_norm
        return exact("stencil_spectral", errors, EXACT_TOLERANCE)

    @check("stability_interval")
    def stability_interval(self) -> CheckResult:
        outside = {}
        for grid in self.grids(smallest=1):
            factors = step_factors(grid)
            outside[grid.n] = float(np.sum((factors < 0.5) | (factors > 1.0)))
        return exact("stability_interval", outside, 0.0)

    @check("bernstein")
    def bernstein(self) -> CheckResult:
        grid = GridSpec.of(min(32, self.max_n), self.c)
        violations = {}
        pairs: list[tuple[float, float]] = [(1.0, np.inf), (2.0, np.inf), (1.0, 2.0)]
        for p, q in pairs:
            count = 0
            for _ in range(self.bernstein_samples):
                m = int(self._rng.integers(1, grid.n + 1))
                coeffs = np.zeros(grid.size, dtype=np.complex128)
                band = np.abs(frequencies(grid.n)) < m
                coeffs[band] = self._rng.standard_normal(band.sum()) + 1j * self._rng.standard_normal(band.sum())
                values = inverse_values(coeffs, grid.n)
                lhs = float(lp_norm_values(values, INF if np.isinf(q) else q))
                rhs = (2 * m) ** (1 / p - 1 / q) * float(lp_norm_values(values, p))
                count += lhs > rhs * (1 + 1e-12)
            violations[f"{p:g},{q:g}"] = count
        return CheckResult(
            name="bernstein",
            passed=not any(violations.values()),
            detail=f"{sum(violations.values())} violation(s) in {3 * self.bernstein_samples} samples",
            measurements=violations,
        )

    @check("decay_bound")
    def decay_bound(self) -> CheckResult:
        kappa = calibrate_kappa(GridSpec.of(4, self.c))
        excess = {}
        for grid in self.grids():
            j = frequencies(grid.n).astype(np.float64)
            worst = 0.0
            for steps in geometric_steps(grid.steps_per_unit):
                decay = kappa * grid.time_of(steps) * j**2
                excess_of = log_decay_excess(heat_multipliers(grid, steps), decay)
                worst = max(worst, float(np.max(excess_of)))
            excess[grid.n] = max(worst, 0.0)
        result = exact("decay_bound", excess, 1e-12)
        result.measurements["kappa"] = kappa
        return result

    @check("lp_sandwich")
    def lp_sandwich(self) -> CheckResult:
        ratios, violations = {}, 0
        for grid in self.grids(smallest=8):
            bank = build_filter_bank(grid.n, self.eps0)
            worst = 0.0
            for f in self.random_functions(grid):
                for p in (2.0, INF):
                    norm = lp_norm(f, p)
                    worst = max(worst, besov_norm(f, BesovParams(alpha=0.0, p=p, q=INF), bank) / norm)
                    violations += norm > besov_norm(f, BesovParams(alpha=0.0, p=p, q=1.0), bank) * (1 + 1e-12)
            ratios[grid.n] = worst
        result = no_growth("lp_sandwich", ratios)
        return result.model_copy(
            update={
                "passed": result.passed and violations == 0,
                "detail": f"{result.detail}; {violations} violation(s) of |f|_Lp <= |f|_B0p1",
            }
        )

    def _ratio_check(
        self, name: str, ratio: Callable[[GridFunction, GridSpec], float], smallest: int = 8
    ) -> CheckResult:
        ratios = {}
        for grid in self.grids(smallest=smallest, largest=128):
            ratios[grid.n] = max(ratio(f, grid) for f in self.random_functions(grid))
        return no_growth(name, ratios)

    @check("besov_embedding")
    def besov_embedding(self) -> CheckResult:
        alpha = 0.3

        def ratio(f: GridFunction, grid: GridSpec) -> float:
            bank = build_filter_bank(grid.n, self.eps0)
            weak = besov_norm(f, BesovParams(alpha=alpha - 0.5, p=INF, q=INF), bank)
            return weak / besov_norm(f, BesovParams(alpha=alpha, p=2.0, q=INF), bank)

        return self._ratio_check("besov_embedding", ratio)

    @check("product")
    def product(self) -> CheckResult:
        params = BesovParams(alpha=0.4)

        def ratio(f: GridFunction, grid: GridSpec) -> float:
            bank = build_filter_bank(grid.n, self.eps0)
            (g,) = self.random_functions(grid, 1)
            return besov_norm(f * g, params, bank) / (besov_norm(f, params, bank) * besov_norm(g, params, bank))

        return self._ratio_check("product", ratio)

    @check("smoothing")
    def smoothing(self) -> CheckResult:
        def ratio(f: GridFunction, grid: GridSpec) -> float:
            bank = build_filter_bank(grid.n, self.eps0)
            base = besov_norm(f, BesovParams(alpha=0.0), bank)
            return max(
                np.sqrt(grid.time_of(steps))
                * besov_norm(discrete_semigroup_steps(grid, steps, f), BesovParams(alpha=1.0), bank)
                / base
                for steps in geometric_steps(grid.steps_per_unit)
            )

        return self._ratio_check("smoothing", ratio)

    @check("strong_continuity")
    def strong_continuity(self) -> CheckResult:
        def ratio(f: GridFunction, grid: GridSpec) -> float:
            bank = build_filter_bank(grid.n, self.eps0)
            base = besov_norm(f, BesovParams(alpha=1.0), bank)
            return max(
                besov_norm(discrete_semigroup_steps(grid, steps, f) - f, BesovParams(alpha=0.0), bank)
                / (np.sqrt(grid.time_of(steps)) * base)
                for steps in geometric_steps(grid.steps_per_unit)
            )

        return self._ratio_check("strong_continuity", ratio)

    @check("schauder")
    def schauder(self) -> CheckResult:
        alpha = -0.5

        def ratio(g: GridFunction, grid: GridSpec) -> float:
            bank = build_filter_bank(grid.n, self.eps0)
            base = besov_norm(g, BesovParams(alpha=alpha), bank)
            log_factors = np.log(step_factors(grid))
            worst = 0.0
            for steps in geometric_steps(grid.steps_per_unit):
                # h Σ_{i<steps} (1 + hλ)^i, the multiplier of the discrete time integral of P^n g
                integral = apply_multiplier(g, grid.h * geometric_sum(log_factors, steps))
                worst = max(worst, besov_norm(integral, BesovParams(alpha=alpha + 2.0), bank) / base)
            return worst

        return self._ratio_check("schauder", ratio)

    @check("det_rate")
    def det_rate(self) -> CheckResult:
        ratios = {}
        for grid in self.grids(smallest=16):
            ratios[grid.n] = max(
                grid.n * heat_kernel_error_probe(grid.n, 1.0, t, InitialCondition.SIN, self.c).point_error
                for t in (1 / 16, 1 / 4, 1.0)
            )
        return no_growth("det_rate", ratios)

    @check("pn_p")
    def pn_p(self) -> CheckResult:
        ratios = {}
        for grid in self.grids(smallest=16):
            ratios[grid.n] = max(
                heat_kernel_error_probe(grid.n, 1.0, grid.time_of(steps), InitialCondition.SIN, self.c).kernel_ratio
                for steps in geometric_steps(grid.steps_per_unit, count=8)
            )
        return no_growth("pn_p", ratios)

    @check("iota_norm")
    def iota_norm(self) -> CheckResult:
        ratios, parseval = {}, {}
        for grid in self.grids(smallest=8, largest=128):
            worst, deviation = 0.0, 0.0
            for f in self.random_functions(grid):
                continuous = oversample(extend_iota(f), 16 * grid.size)
                worst = max(worst, float(lp_norm_values(continuous, 4.0)) / lp_norm(f, 4.0))
                deviation = max(deviation, abs(float(lp_norm_values(continuous, 2.0)) / lp_norm(f, 2.0) - 1.0))
            ratios[grid.n], parseval[grid.n] = worst, deviation
        result = no_growth("iota_norm", ratios)
        exact_part = max(parseval.values())
        return result.model_copy(
            update={
                "passed": result.passed and exact_part <= EXACT_TOLERANCE,
                "detail": f"{result.detail}; L2 deviation {exact_part:.2e}",
            }
        )

    def _oracle_levels(self) -> list[int]:
        return [grid.n for grid in self.grids(smallest=16)]

    @check("kolmogorov_slopes")
    def kolmogorov_slopes(self) -> CheckResult:
        levels = self._oracle_levels()
        shallow = rate_fit(kolmogorov_scan(levels, 1.0, -0.4, 64.0, self.eps0, self.c)).slope
        steep = rate_fit(kolmogorov_scan(levels, 1.0, -0.45, 256.0, self.eps0, self.c)).slope
        return CheckResult(
            name="kolmogorov_slopes",
            passed=-1.0 <= shallow <= -0.78 and -1.05 <= steep <= -0.85,
            detail=f"slope {shallow:.3f} at (alpha, q) = (-0.4, 64), {steep:.3f} at (-0.45, 256)",
            measurements={"alpha=-0.4,q=64": shallow, "alpha=-0.45,q=256": steep},
        )

    @check("rate_one_saturation")
    def rate_one_saturation(self) -> CheckResult:
        scan = dict(lower_bound_scan(self._oracle_levels(), 0.25, self.c))
        low, high = min(scan.values()), max(scan.values())
        return CheckResult(
            name="rate_one_saturation",
            passed=low > 0 and high <= 10 * low,
            detail=f"n^2 a_1^2 ranges over [{low:.4g}, {high:.4g}]",
            measurements={str(n): value for n, value in scan.items()},
        )

    @check("uniform_mode_bound")
    def mode_bound(self) -> CheckResult:
        return no_growth(
            "uniform_mode_bound",
            {n: uniform_mode_bound(n, 1.0, self.c) for n in self._oracle_levels()},
        )


def run_verification(
    *,
    max_n: int = 256,
    samples: int = 20,
    bernstein_samples: int = 1000,
    seed: int = 0,
    eps0: float = DEFAULT_EPS0,
    c: float = 0.125,
    names: list[str] | None = None,
) -> list[CheckResult]:
    suite = VerificationSuite(
        max_n=max_n,
        samples=samples,
        bernstein_samples=bernstein_samples,
        seed=seed,
        eps0=eps0,
        c=c,
    )
    return suite.run(names)
