"""Errors between coupled levels, the exact linear-case mode variances, Kolmogorov bounds and rate fits.

In the linear case the error in one discrete mode ℓ is a Wiener integral. Its second moment is a sum
over the continuous modes k ≡ ℓ (mod 2n) that alias onto ℓ. Every piece of that sum is an elementary
integral of exponentials in time, taken exactly step by step. The infinite alias tails are summed in
closed form, using csc^2 for the squared terms and Hurwitz zeta functions for the cross terms.
"""

from collections.abc import Sequence

import numpy as np
from essentials.exceptions import InvalidArgument
from scipy import special, stats

from besov_rates.core.exceptions import ConfigurationError, FrequencyRangeError, ShapeError
from besov_rates.core.logging import logger
from besov_rates.domain.besov_toolkit import DEFAULT_EPS0, besov_norm_values, build_filter_bank
from besov_rates.domain.spde_scheme import ZERO, coupled_solve_batch
from besov_rates.domain.spectral_grid import (
    continuous_eigenvalue,
    continuous_semigroup_apply,
    discrete_semigroup_steps,
    eigenvalue,
    eigenvalues,
    forward_values,
    heat_multipliers,
    restrict_delta,
)
from besov_rates.domain.types.besov import BesovParams, FilterBank
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.report import (
    LINF,
    ErrorReport,
    HeatKernelComparison,
    LevelSummary,
    ModeVariance,
    MonteCarloEstimate,
    NormSample,
    RateFit,
    theta_label,
)
from besov_rates.domain.types.scheme import AprioriReport, InitialCondition, PathRecord
from besov_rates.domain.types.spectral import TruncatedSeries

# modes decayed by more than exp(-40) are dropped from exact sums
DECAY_CUTOFF = 40.0
# exp(-x) underflows to zero beyond this
UNDERFLOW_EXPONENT = 745.0
CONFIDENCE = 0.95


def error_field(fine: PathRecord, coarse: PathRecord, t: float) -> GridFunction:
    """δu_t - u^n_t on the coarse grid, sampling the fine snapshot at the coarse points."""
    m = coarse.grid.refinement_exponent(fine.grid)
    fine_values = fine.snapshot(t).values[:: 2**m]
    return GridFunction(coarse.grid, fine_values - coarse.snapshot(t).values)


def geometric_sum(log_ratio: np.ndarray, count: int) -> np.ndarray:
    """sum_{m < count} exp(m L) for each L <= 0, stable near L = 0 and for very negative L."""
    log_ratio = np.asarray(log_ratio, dtype=np.float64)
    safe = np.where(log_ratio == 0, -1.0, log_ratio)
    return np.where(log_ratio == 0, float(count), np.expm1(count * safe) / np.expm1(safe))


def _exp_integral(rate: np.ndarray, h: float) -> np.ndarray:
    """∫_0^h exp(rate s) ds."""
    safe = np.where(rate == 0, 1.0, rate)
    return np.where(rate == 0, h, np.expm1(safe * h) / safe)


def _cell_average(n: int, ell: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Re ∫ conj(e_k(y)) e_ℓ(ρ_n(y)) dy for k ≡ ℓ (mod 2n), with ρ_n rounding down to the grid."""
    k = np.asarray(k, dtype=np.float64)
    safe = np.where(k == 0, 1.0, k)
    return np.where(k == 0, 1.0, n * np.sin(np.pi * np.asarray(ell) / n) / (np.pi * safe))


def _csc_excess(x: np.ndarray) -> np.ndarray:
    """csc^2 x - 1/x^2, by its Taylor series near the origin."""
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < 0.1
    x2 = x * x
    series = 1 / 3 + x2 * (1 / 15 + x2 * (2 / 189 + x2 * (1 / 675 + x2 * 2 / 10395)))
    safe = np.where(small, 1.0, x)
    return np.where(small, series, 1.0 / np.sin(safe) ** 2 - 1.0 / safe**2)


def _nonzero_range(bound: int) -> np.ndarray:
    j = np.arange(-bound, bound + 1)
    return j[j != 0]


def _mode_variance_parts(n: int, ells: np.ndarray, t: float, c: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    grid = GridSpec.of(n, c)
    steps = grid.step_of(t)
    ells = np.asarray(ells, dtype=np.int64)
    if steps == 0:
        zeros = np.zeros(ells.shape)
        return zeros, zeros, zeros
    h = grid.h

    lam_n = eigenvalues(n)[ells + n]
    log_G = np.log1p(h * lam_n)

    def a_squared(k: np.ndarray) -> np.ndarray:
        rate = 2.0 * continuous_eigenvalue(k)
        return _exp_integral(rate, t)

    def a_times_b(k: np.ndarray, log_step: np.ndarray) -> np.ndarray:
        lam_k = continuous_eigenvalue(k)
        return _exp_integral(lam_k, h) * geometric_sum(lam_k * h + log_step, steps)

    safe_lam = np.where(lam_n == 0, -1.0, lam_n)
    b_squared = np.where(lam_n == 0, t, np.expm1(2 * steps * log_G) / (safe_lam * (2.0 + h * safe_lam)))
    direct = a_squared(ells) + b_squared - 2.0 * _cell_average(n, ells, ells) * a_times_b(ells, log_G)

    # Σ_{j≠0} (1 - exp(-8π²k²t)) / (8π²k²) with k = ℓ + 2jn
    alias = _csc_excess(np.pi * ells / (2 * n)) / (32.0 * n**2)
    j_decay = int(np.ceil(np.sqrt(UNDERFLOW_EXPONENT / (8 * np.pi**2 * t)) / (2 * n))) + 1
    k = ells[:, np.newaxis] + 2 * n * _nonzero_range(j_decay)
    rate = 8 * np.pi**2 * np.square(k, dtype=np.float64)
    alias = alias - np.sum(np.exp(-rate * t) / rate, axis=-1)

    # past j0 the cross integrand is 1/(4π²k²) to within exp(-40)
    j0 = int(np.ceil(np.sqrt(DECAY_CUTOFF / (4 * np.pi**2 * c)))) + 1
    k = ells[:, np.newaxis] + 2 * n * _nonzero_range(j0)
    near = np.sum(_cell_average(n, ells[:, np.newaxis], k) * a_times_b(k, log_G[:, np.newaxis]), axis=-1)
    shift = ells / (2 * n)
    tail = (
        n
        * np.sin(np.pi * ells / n)
        / (4 * np.pi**3 * (2 * n) ** 3)
        * (special.zeta(3, j0 + 1 + shift) - special.zeta(3, j0 + 1 - shift))
    )
    return direct, alias, -2.0 * (near + tail)


def exact_mode_variance(n: int, ell: int, t: float, c: float = 0.125) -> ModeVariance:
    if not -n < ell < n:
        raise FrequencyRangeError(f"ell={ell} outside [-{n - 1}, {n - 1}]")
    direct, alias, cross = (float(part[0]) for part in _mode_variance_parts(n, np.array([ell]), t, c))
    return ModeVariance(
        n=n,
        ell=ell,
        t=t,
        value=max(direct + alias + cross, 0.0),
        direct=direct,
        alias=alias,
        alias_cross=cross,
    )


def mode_variances(n: int, t: float, c: float = 0.125) -> np.ndarray:
    """a_ℓ^2(t) for every ℓ = -n..n-1, in frequency order."""
    direct, alias, cross = _mode_variance_parts(n, np.arange(-n, n), t, c)
    return np.maximum(direct + alias + cross, 0.0)


def uniform_mode_bound(n: int, t: float, c: float = 0.125) -> float:
    """n^2 max_{|ℓ|<n} a_ℓ^2(t)."""
    return float(n**2 * np.max(mode_variances(n, t, c)[1:]))


def exact_level_mode_variance(n: int, N: int, ell: int, t: float, c: float = 0.125) -> float:
    """E|<δ_n O^N_t - O^n_t, δe_ℓ>_n|^2 for two discrete levels driven by the same noise."""
    coarse, fine = GridSpec.of(n, c), GridSpec.of(N, c)
    m = coarse.refinement_exponent(fine)
    if not -n <= ell < n:
        raise FrequencyRangeError(f"ell={ell} outside [-{n}, {n})")
    steps = coarse.step_of(t)
    if steps == 0:
        return 0.0

    r = 2**m
    k = np.arange(-N, N)
    k = k[(k - ell) % (2 * n) == 0]
    log_g = np.log1p(fine.h * eigenvalues(N)[k + N])
    log_G = float(np.log1p(coarse.h * eigenvalue(n, ell)))

    fine_part = fine.h * np.sum(geometric_sum(2 * log_g, steps * r**2))
    coarse_part = coarse.h * float(geometric_sum(np.array(2 * log_G), steps))
    overlap = fine.h * geometric_sum(log_G + r**2 * log_g, steps) * geometric_sum(log_g, r**2)
    cell_mean = np.mean(np.exp(-2j * np.pi * np.multiply.outer(k, np.arange(r)) / (2 * N)), axis=-1)
    return max(float(fine_part + coarse_part - 2.0 * np.sum(overlap * cell_mean.real)), 0.0)


def monte_carlo_mode_variance(
    n: int,
    N: int,
    ell: int,
    t: float,
    seeds: Sequence[int],
    c: float = 0.125,
    batch: int = 64,
) -> MonteCarloEstimate:
    """Average |<δ_n O^N_t - O^n_t, δe_ℓ>_n|^2 over coupled linear paths, one per seed."""
    if len(seeds) < 2:
        raise ConfigurationError("A Monte Carlo estimate needs at least two seeds")
    if not -n <= ell < n:
        raise FrequencyRangeError(f"ell={ell} outside [-{n}, {n})")
    levels = [GridSpec.of(n, c), GridSpec.of(N, c)]
    samples = []
    for first in range(0, len(seeds), batch):
        chunk = list(seeds[first : first + batch])
        records = coupled_solve_batch(levels, ZERO, InitialCondition.ZERO, chunk, [t], horizon=t, track_linear=False)
        for coarse, fine in records:
            error = error_field(fine, coarse, t)
            samples.append(abs(forward_values(error.values, n)[ell + n]) ** 2)
        logger.debug(f"Monte Carlo n={n}, N={N}: {len(samples)}/{len(seeds)} paths")
    values = np.asarray(samples)
    return MonteCarloEstimate(
        n=n,
        reference_n=N,
        ell=ell,
        t=t,
        mean=float(values.mean()),
        stderr=float(values.std(ddof=1) / np.sqrt(values.size)),
        paths=values.size,
    )


def kolmogorov_bound(variances: np.ndarray, alpha: float, q: float, bank: FilterBank) -> float:
    """(Σ_j 2^j (Σ_k (2^{αj} φ^j(k) a_k)^2)^{q/2})^{1/q}, summed in log space so large q stays finite."""
    variances = np.asarray(variances, dtype=np.float64)
    if variances.shape != (2 * bank.n,):
        raise ShapeError(f"Expected {2 * bank.n} variances for n={bank.n}, got shape {variances.shape}")
    if not 1.0 <= q < np.inf:
        raise InvalidArgument(f"q must lie in [1, inf), got {q!r}")
    if np.any(variances < 0):
        raise InvalidArgument("Mode variances must be non-negative")

    energy = np.square(bank.weights) @ variances
    j = np.flatnonzero(energy > 0)
    if not j.size:
        return 0.0
    log_terms = j * np.log(2) + (q / 2) * (2 * alpha * j * np.log(2) + np.log(energy[j]))
    return float(np.exp(special.logsumexp(log_terms) / q))


def kolmogorov_scan(
    n_list: Sequence[int],
    t: float,
    alpha: float,
    q: float,
    eps0: float = DEFAULT_EPS0,
    c: float = 0.125,
) -> list[tuple[int, float]]:
    return [(n, kolmogorov_bound(mode_variances(n, t, c), alpha, q, build_filter_bank(n, eps0))) for n in n_list]


def lower_bound_scan(n_list: Sequence[int], t: float, c: float = 0.125) -> list[tuple[int, float]]:
    """n^2 a_1^2(t) for each n; bounded above and away from zero when mode 1 converges at rate exactly 1."""
    if t == 0:
        return [(n, 0.0) for n in n_list]
    return [(n, n**2 * exact_mode_variance(n, 1, t, c).value) for n in n_list]


def rate_fit(points: Sequence[tuple[int, float]]) -> RateFit:
    if len(points) < 3:
        raise InvalidArgument(f"A rate fit needs at least 3 points, got {len(points)}")
    ns = np.array([n for n, _ in points], dtype=np.float64)
    errors = np.array([error for _, error in points], dtype=np.float64)
    if not np.all(np.isfinite(errors)) or np.any(errors <= 0):
        raise InvalidArgument("Rate fits need finite, positive error values")
    if np.unique(ns).size < 2:
        raise InvalidArgument("Rate fits need at least two distinct n")

    fit = stats.linregress(np.log(ns), np.log(errors))
    half_width = float(stats.t.ppf(0.5 + CONFIDENCE / 2, ns.size - 2) * fit.stderr)
    return RateFit(
        points=[(int(n), float(error)) for n, error in points],
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        slope_ci=(float(fit.slope) - half_width, float(fit.slope) + half_width),
    )


def _series_of(psi: InitialCondition | TruncatedSeries) -> TruncatedSeries:
    if isinstance(psi, TruncatedSeries):
        return psi
    series = psi.series()
    if series is None:
        raise ConfigurationError(f"Initial condition {psi.value!r} has no finite Fourier series")
    return series


def heat_kernel_error_probe(
    n: int,
    beta: float,
    t: float,
    psi: InitialCondition | TruncatedSeries,
    c: float = 0.125,
) -> HeatKernelComparison:
    """Compare the discrete and continuous heat semigroups at time t.

    The point error is sup_x |P^n_t ψ(x) - P_t ψ(x)| on the grid. The kernel distance is the squared
    L^2(dy) distance between p_t(x, y) and the piecewise constant p^n_t(x, ρ_n(y)). It does not depend
    on x or ψ.
    """
    grid = GridSpec.of(n, c)
    steps = grid.step_of(t)
    if steps == 0:
        raise InvalidArgument("The kernel distance is only measured for t >= h")
    series = _series_of(psi)

    exact = restrict_delta(continuous_semigroup_apply(series, t), grid).values
    discrete = discrete_semigroup_steps(grid, steps, restrict_delta(series, grid)).values
    point_error = float(np.max(np.abs(exact - discrete)))

    multipliers = heat_multipliers(grid, steps)
    k_max = int(np.ceil(np.sqrt(DECAY_CUTOFF / (4 * np.pi**2 * t))))
    k = np.arange(-k_max, k_max + 1)
    decay = np.exp(continuous_eigenvalue(k) * t)
    folded = (k + n) % (2 * n) - n
    overlap = np.sum(decay * multipliers[folded + n] * _cell_average(n, folded, k))
    distance_sq = max(float(np.sum(decay**2) + np.sum(multipliers**2) - 2.0 * overlap), 0.0)

    return HeatKernelComparison(
        n=n,
        beta=beta,
        t=t,
        point_error=point_error,
        kernel_distance_sq=distance_sq,
        kernel_ratio=distance_sq * n**beta * t ** ((beta + 1) / 2),
    )


def measure_seed_errors(
    records: Sequence[PathRecord],
    thetas: Sequence[float],
    eps0: float = DEFAULT_EPS0,
) -> list[NormSample]:
    """Sup and B^θ_{∞,∞} norms of the error of every level against the last (reference) record."""
    *levels, reference = records
    times = reference.times
    samples = []
    for record in levels:
        errors = np.stack([error_field(reference, record, t).values for t in times])
        norms = {LINF: np.max(np.abs(errors), axis=-1)}
        bank = build_filter_bank(record.grid.n, eps0)
        for theta in thetas:
            norms[theta_label(theta)] = besov_norm_values(errors, BesovParams(alpha=theta), bank)
        samples.extend(
            NormSample(seed=record.seed, n=record.grid.n, t=t, theta=label, value=float(value))
            for label, values in norms.items()
            for t, value in zip(times, values, strict=True)
        )
    return samples


def _try_fit(points: list[tuple[int, float]]) -> RateFit | None:
    try:
        return rate_fit(points)
    except InvalidArgument as exc:
        logger.debug(f"No rate fit for {points}: {exc}")
        return None


def build_error_report(
    samples: Sequence[NormSample],
    *,
    levels: Sequence[int],
    reference_n: int,
    seeds: Sequence[int],
    excluded: dict[int, str] | None = None,
    apriori: Sequence[AprioriReport] = (),
) -> ErrorReport:
    """Aggregate per-seed norm samples: sup over checkpoints per seed, then median, mean and stderr per level."""
    excluded = dict(excluded or {})
    kept = [sample for sample in samples if sample.seed not in excluded]
    labels = list(dict.fromkeys(sample.theta for sample in kept))

    norms: dict[str, list[LevelSummary]] = {}
    fits: dict[str, RateFit | None] = {}
    mean_fits: dict[str, RateFit | None] = {}
    for label in labels:
        summaries = []
        for n in levels:
            by_seed: dict[int | None, float] = {}
            by_time: dict[float, list[float]] = {}
            for sample in kept:
                if sample.theta == label and sample.n == n:
                    by_seed[sample.seed] = max(by_seed.get(sample.seed, 0.0), sample.value)
                    by_time.setdefault(sample.t, []).append(sample.value)
            if not by_seed:
                continue
            sups = np.array(list(by_seed.values()))
            summaries.append(
                LevelSummary(
                    n=n,
                    sup_median=float(np.median(sups)),
                    sup_mean=float(np.mean(sups)),
                    sup_stderr=float(np.std(sups, ddof=1) / np.sqrt(sups.size)) if sups.size > 1 else 0.0,
                    checkpoint_medians=[float(np.median(by_time[t])) for t in sorted(by_time)],
                )
            )
        norms[label] = summaries
        fits[label] = _try_fit([(summary.n, summary.sup_median) for summary in summaries])
        mean_fits[label] = _try_fit([(summary.n, summary.sup_mean) for summary in summaries])

    return ErrorReport(
        levels=list(levels),
        reference_n=reference_n,
        checkpoints=sorted({sample.t for sample in kept}),
        seeds=[seed for seed in seeds if seed not in excluded],
        excluded_seeds=excluded,
        norms=norms,
        fits=fits,
        mean_fits=mean_fits,
        apriori=list(apriori),
    )
