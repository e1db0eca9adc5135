"""Ranking, contour grids, boundary comparisons, and property verification.

Ranks are competition ranks: rank 1 is the deepest realization, exact ties
share the smallest rank of their block, and the next rank skips by the
block size. Boundary realizations all have depth exactly 0, so with any
interior realization present they form the trailing tied block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .depth import (
    DepthParams,
    conditional_depth,
    hpp_conditional_depth,
    mahalanobis_depth,
    marginal_depth_d1,
    marginal_factor,
    product_depth,
)
from .errors import DataError
from .estimation import fit_mahalanobis, fit_params
from .sequences import EventSequence, SampleSet

METHODS = ("product", "marginal", "conditional", "hpp-conditional", "mahalanobis")

PROPERTY_NAMES = (
    "P1-boundary",
    "P1-infinity",
    "P2",
    "P3",
    "P4",
    "hpp-consistency",
    "young-range",
    "weighted-fraction",
)

INFINITY_DEPTH_TOL = 1e-6
SCALE_SHIFT_RTOL = 1e-10
RAY_SLACK = 1e-9
HPP_CONSISTENCY_RTOL = 1e-12
FRACTION_SLACK = 1e-9
DEFAULT_RAYS = 1000
ALPHA_GRID_POINTS = 101


@dataclass(frozen=True)
class RankEntry:
    index: int
    depth: float
    rank: int


@dataclass(frozen=True)
class RankTable:
    """Realizations ordered deepest first, with competition ranks."""

    method: str
    entries: tuple[RankEntry, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def ranks_by_index(self) -> np.ndarray:
        out = np.empty(self.n, dtype=int)
        for e in self.entries:
            out[e.index] = e.rank
        return out

    def depths_by_index(self) -> np.ndarray:
        out = np.empty(self.n, dtype=float)
        for e in self.entries:
            out[e.index] = e.depth
        return out

    def top(self, count: int) -> tuple[RankEntry, ...]:
        return self.entries[:count]


@dataclass(frozen=True)
class ContourGrid:
    """Dense depth evaluation over a rectangle of (s1, s2) nodes.

    ``values[i, j]`` is the depth at ``(axis1[i], axis2[j])``. Nodes that
    violate ``start <= s1 <= s2`` hold 0 by convention for the gap-based
    methods; the Mahalanobis baseline is evaluated everywhere.
    """

    method: str
    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class NearBoundarySummary:
    """Mean ranks of the near-boundary subset under both depths."""

    threshold: float
    sample_size: int
    indices: tuple[int, ...]
    mean_product_rank: float
    mean_mahalanobis_rank: float

    @property
    def subset_size(self) -> int:
        return len(self.indices)

    @property
    def empty(self) -> bool:
        return not self.indices


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of one randomized property check.

    ``worst_margin`` is the largest observed excess over what the property
    allows; any positive margin is a violation, so a passing check has
    ``violations == 0`` and a nonpositive worst margin.
    """

    name: str
    trials: int
    violations: int
    worst_margin: float


@dataclass(frozen=True)
class PropertyReport:
    """Results of the full randomized property suite."""

    seed: int
    trials: int
    rays: int
    checks: tuple[PropertyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.violations == 0 for c in self.checks)

    def check(self, name: str) -> PropertyCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _competition_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(values.size, dtype=int)
    current = 1
    previous = None
    for position, idx in enumerate(order, start=1):
        v = values[idx]
        if previous is None or v != previous:
            current = position
            previous = v
        ranks[idx] = current
    return ranks


def depth_values(
    sample: SampleSet,
    params: DepthParams | None,
    method: str,
    baseline: tuple | None = None,
) -> np.ndarray:
    """Depth of every realization in the sample under one method.

    The ``marginal`` method is the marginal factor of the product (the
    normalized last-event depth raised to its distance exponent); it
    orders realizations identically to the unexponentiated form.
    ``mahalanobis`` fits its mean and covariance on the sample itself
    when no baseline is supplied.
    """
    if method not in METHODS:
        raise DataError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "mahalanobis":
        mean, cov = baseline if baseline is not None else fit_mahalanobis(sample)
        return np.array([mahalanobis_depth(row, mean, cov) for row in sample.times])
    if method == "hpp-conditional":
        return np.array([hpp_conditional_depth(seq) for seq in sample])
    if params is None:
        raise DataError(f"method {method!r} needs fitted parameters")
    if sample.k != params.k:
        raise DataError(f"sample has k={sample.k} but parameters expect k={params.k}")
    if sample.start != params.start:
        raise DataError(f"sample start {sample.start} differs from parameter start {params.start}")
    if method == "product":
        return np.array([product_depth(seq, params).product for seq in sample])
    if method == "marginal":
        return np.array([marginal_factor(seq.last, params) for seq in sample])
    return np.array([conditional_depth(seq, params) for seq in sample])


def rank(
    sample: SampleSet,
    params: DepthParams | None,
    method: str,
    baseline: tuple | None = None,
) -> RankTable:
    """Rank the sample deepest first under the chosen method."""
    values = depth_values(sample, params, method, baseline)
    ranks = _competition_ranks(values)
    order = np.argsort(-values, kind="stable")
    entries = tuple(
        RankEntry(index=int(i), depth=float(values[i]), rank=int(ranks[i])) for i in order
    )
    return RankTable(method=method, entries=entries)


def contour_grid(
    params: DepthParams,
    method: str,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    resolution: int,
    baseline: tuple | None = None,
) -> ContourGrid:
    """Evaluate a depth on a k=2 rectangle of (s1, s2) nodes."""
    if method not in METHODS:
        raise DataError(f"unknown method {method!r}; expected one of {METHODS}")
    if resolution < 2:
        raise DataError("resolution must be at least 2")
    xmin, xmax = (float(v) for v in x_range)
    ymin, ymax = (float(v) for v in y_range)
    if not (math.isfinite(xmin) and math.isfinite(xmax) and xmin < xmax):
        raise DataError(f"bad s1 range ({xmin}, {xmax})")
    if not (math.isfinite(ymin) and math.isfinite(ymax) and ymin < ymax):
        raise DataError(f"bad s2 range ({ymin}, {ymax})")
    axis1 = np.linspace(xmin, xmax, resolution)
    axis2 = np.linspace(ymin, ymax, resolution)
    values = np.zeros((resolution, resolution))
    if method == "mahalanobis":
        if baseline is None:
            raise DataError("mahalanobis contours need a fitted (mean, covariance) baseline")
        mean, cov = baseline
        if np.asarray(mean).reshape(-1).size != 2:
            raise DataError("contour grids are two-dimensional; the baseline mean must have length 2")
        for i, x in enumerate(axis1):
            for j, y in enumerate(axis2):
                values[i, j] = mahalanobis_depth((x, y), mean, cov)
        return ContourGrid(method=method, axis1=axis1, axis2=axis2, values=values)
    if params.k != 2:
        raise DataError(f"contour grids for method {method!r} need k=2 parameters, got k={params.k}")
    start = params.start
    for i, x in enumerate(axis1):
        for j, y in enumerate(axis2):
            if not (start <= x <= y):
                continue
            seq = EventSequence(start, (x, y))
            if method == "product":
                values[i, j] = product_depth(seq, params).product
            elif method == "marginal":
                values[i, j] = marginal_factor(y, params)
            elif method == "conditional":
                values[i, j] = conditional_depth(seq, params)
            else:
                values[i, j] = hpp_conditional_depth(seq)
    return ContourGrid(method=method, axis1=axis1, axis2=axis2, values=values)


def near_boundary_comparison(
    sample: SampleSet,
    params: DepthParams,
    threshold: float,
) -> NearBoundarySummary:
    """Compare mean ranks of near-boundary realizations under both depths.

    A realization is near the boundary when its smallest normalized gap
    (first gap measured from the start) falls below the threshold; a
    zero-duration realization counts as fully on the boundary. The
    Mahalanobis ranks use a mean and covariance fitted on this sample.
    An empty subset is reported with NaN mean ranks rather than an error.
    """
    if not 0 < threshold <= 1:
        raise DataError(f"threshold must be in (0, 1], got {threshold}")
    product_ranks = rank(sample, params, "product").ranks_by_index()
    mahalanobis_ranks = rank(sample, params, "mahalanobis").ranks_by_index()
    durations = sample.durations()
    gaps = sample.gaps()
    with np.errstate(divide="ignore", invalid="ignore"):
        fractions = np.where(durations[:, None] > 0, gaps / durations[:, None], 0.0)
    min_fraction = fractions.min(axis=1)
    indices = tuple(int(i) for i in np.nonzero(min_fraction < threshold)[0])
    if indices:
        sel = list(indices)
        mean_p = float(product_ranks[sel].mean())
        mean_m = float(mahalanobis_ranks[sel].mean())
    else:
        mean_p = math.nan
        mean_m = math.nan
    return NearBoundarySummary(
        threshold=float(threshold),
        sample_size=sample.n,
        indices=indices,
        mean_product_rank=mean_p,
        mean_mahalanobis_rank=mean_m,
    )


def weighted_fraction_gap(a, b, alpha) -> np.ndarray:
    """Left minus right side of the weighted-fraction inequality, per row.

    For nonnegative rows a, b (b strictly positive) and mixing weight
    alpha in [0, 1]:

        sum_i (a_i - b_i) / ((1-alpha) + alpha * a_i/b_i)
            <= (sum a - sum b) / ((1-alpha) + alpha * sum(a)/sum(b))

    Returns the gap (LHS - RHS); values above a small slack are
    violations. This is the inequality that makes the log-depth
    nonincreasing along center rays.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if a.shape != b.shape or alpha.size != a.shape[0]:
        raise DataError(f"shape mismatch: a {a.shape}, b {b.shape}, alpha {alpha.shape}")
    if np.any(a < 0) or np.any(b <= 0):
        raise DataError("requires a >= 0 and b > 0")
    if np.any(alpha < 0) or np.any(alpha > 1):
        raise DataError("alpha must lie in [0, 1]")
    al = alpha[:, None]
    lhs = ((a - b) / ((1.0 - al) + al * (a / b))).sum(axis=1)
    sa = a.sum(axis=1)
    sb = b.sum(axis=1)
    rhs = (sa - sb) / ((1.0 - alpha) + alpha * (sa / sb))
    return lhs - rhs


def _dirichlet_proportions(rng: np.random.Generator, k: int) -> np.ndarray:
    # Uniform on the simplex via normalized exponentials.
    e = rng.exponential(1.0, size=k)
    total = e.sum()
    if total == 0.0:
        e[:] = 1.0
        total = float(k)
    return e / total


def _moderated_proportions(rng: np.random.Generator, k: int) -> np.ndarray:
    # Bounded away from the simplex boundary, for identity checks where a
    # vanishing gap would amplify cancellation far beyond the tolerance.
    e = rng.exponential(1.0, size=k) + 0.5
    return e / e.sum()


def _times_from(params: DepthParams, duration: float, proportions: np.ndarray) -> tuple[float, ...]:
    cum = np.cumsum(proportions)
    cum[-1] = 1.0
    return tuple(float(params.start + duration * c) for c in cum)


def _interior_sequence(rng: np.random.Generator, params: DepthParams, moderate: bool = False) -> EventSequence:
    if moderate:
        proportions = _moderated_proportions(rng, params.k)
        duration = params.mu_last * rng.uniform(0.3, 3.0)
    else:
        proportions = _dirichlet_proportions(rng, params.k)
        duration = params.mu_last * rng.uniform(0.05, 5.0)
    return EventSequence(params.start, _times_from(params, duration, proportions))


def _boundary_sequence(rng: np.random.Generator, params: DepthParams) -> EventSequence:
    times = list(_interior_sequence(rng, params).times)
    j = int(rng.integers(0, params.k))
    if j == 0:
        times[0] = params.start
    else:
        times[j] = times[j - 1]
    return EventSequence(params.start, tuple(times))


def _check_boundary_vanishing(rng, params, trials) -> PropertyCheck:
    worst = -math.inf
    violations = 0
    for _ in range(trials):
        depth = product_depth(_boundary_sequence(rng, params), params).product
        worst = max(worst, depth)
        if depth != 0.0:
            violations += 1
    return PropertyCheck("P1-boundary", trials, violations, worst)


def _check_vanishing_at_infinity(rng, params, trials) -> PropertyCheck:
    far_duration = params.mu_last + 100.0 * math.sqrt(params.var_last)
    worst = -math.inf
    violations = 0
    for _ in range(trials):
        proportions = _dirichlet_proportions(rng, params.k)
        seq = EventSequence(params.start, _times_from(params, far_duration, proportions))
        margin = product_depth(seq, params).product - INFINITY_DEPTH_TOL
        worst = max(worst, margin)
        if margin > 0:
            violations += 1
    return PropertyCheck("P1-infinity", trials, violations, worst)


def _check_maximality(rng, params, trials) -> PropertyCheck:
    center_depth = product_depth(params.center_sequence, params).product
    worst = abs(center_depth - 1.0)
    violations = 0 if center_depth == 1.0 else 1
    # The marginal depth must peak at exactly 1 at eta, which is what
    # licenses the unit normalizer.
    peak = marginal_depth_d1(params.eta, params)
    worst = max(worst, abs(peak - 1.0))
    if peak != 1.0:
        violations += 1
    for i in range(trials):
        if i % 10 == 0:
            seq = _boundary_sequence(rng, params)
        else:
            seq = _interior_sequence(rng, params)
        margin = product_depth(seq, params).product - center_depth
        worst = max(worst, margin)
        if margin > 0:
            violations += 1
    return PropertyCheck("P2", trials, violations, worst)


def _check_scale_shift(rng, params, trials, sample) -> PropertyCheck:
    worst = -math.inf
    violations = 0
    for _ in range(trials):
        a = rng.uniform(0.1, 10.0)
        b = rng.uniform(-10.0, 10.0)
        seq = _interior_sequence(rng, params, moderate=True)
        reference = product_depth(seq, params).product
        if sample is not None:
            transformed_params = fit_params(sample.affine(a, b))
        else:
            transformed_params = params.affine(a, b)
        moved = product_depth(seq.affine(a, b), transformed_params).product
        margin = abs(moved - reference) / reference - SCALE_SHIFT_RTOL
        worst = max(worst, margin)
        if margin > 0:
            violations += 1
    return PropertyCheck("P3", trials, violations, worst)


def _check_ray_monotonicity(rng, params, rays) -> PropertyCheck:
    center = params.center
    start = params.start
    alphas = np.linspace(0.0, 1.0, ALPHA_GRID_POINTS)
    worst = -math.inf
    violations = 0
    for i in range(rays):
        if i % 10 == 0:
            target = _boundary_sequence(rng, params).times
        else:
            target = _interior_sequence(rng, params).times
        previous = math.inf
        smallest = math.inf
        last_value = math.nan
        ray_margin = -math.inf
        for alpha in alphas:
            # Convex form: rounding is monotone, so ordering survives.
            times = tuple(
                max(start, (1.0 - alpha) * c + alpha * t) for c, t in zip(center, target)
            )
            value = product_depth(EventSequence(start, times), params).product
            ray_margin = max(ray_margin, value - previous - RAY_SLACK)
            previous = value
            smallest = min(smallest, value)
            last_value = value
        # The ray minimum must sit at the far end (alpha = 1).
        ray_margin = max(ray_margin, last_value - smallest - RAY_SLACK)
        worst = max(worst, ray_margin)
        if ray_margin > 0:
            violations += 1
    return PropertyCheck("P4", rays, violations, worst)


def _check_hpp_consistency(rng, params, trials) -> PropertyCheck:
    k = params.k
    uniform = DepthParams.from_moments(
        start=params.start,
        mu_last=params.mu_last,
        var_last=params.var_last,
        u_bar=(1.0 / k,) * k,
    )
    worst = -math.inf
    violations = 0
    for _ in range(trials):
        seq = _interior_sequence(rng, params)
        closed_form = hpp_conditional_depth(seq)
        general = conditional_depth(seq, uniform)
        scale = max(closed_form, general)
        relative = abs(closed_form - general) / scale if scale > 0 else 0.0
        margin = relative - HPP_CONSISTENCY_RTOL
        worst = max(worst, margin)
        if margin > 0:
            violations += 1
    return PropertyCheck("hpp-consistency", trials, violations, worst)


def _check_young_range(rng, params, trials) -> PropertyCheck:
    worst = -math.inf
    violations = 0
    for i in range(trials):
        if i % 10 == 0:
            seq = _boundary_sequence(rng, params)
        else:
            seq = _interior_sequence(rng, params)
        breakdown = product_depth(seq, params)
        cond = breakdown.conditional
        prod = breakdown.product
        margin = max(cond - 1.0, -cond, prod - 1.0, -prod)
        worst = max(worst, margin)
        if margin > 0:
            violations += 1
    return PropertyCheck("young-range", trials, violations, worst)


def _check_weighted_fraction(rng, trials) -> PropertyCheck:
    sizes = rng.integers(1, 11, size=trials)
    worst = -math.inf
    violations = 0
    for k in range(1, 11):
        count = int(np.count_nonzero(sizes == k))
        if count == 0:
            continue
        a = 10.0 * (1.0 - rng.random((count, k)))
        b = 10.0 * (1.0 - rng.random((count, k)))
        alpha = rng.random(count)
        margins = weighted_fraction_gap(a, b, alpha) - FRACTION_SLACK
        worst = max(worst, float(margins.max()))
        violations += int(np.count_nonzero(margins > 0))
    return PropertyCheck("weighted-fraction", trials, violations, worst)


def verify_properties(
    params: DepthParams,
    trials: int,
    seed: int,
    rays: int = DEFAULT_RAYS,
    sample: SampleSet | None = None,
) -> PropertyReport:
    """Randomized verification of the depth's structural properties.

    Runs ``trials`` random checks per property (``rays`` rays of 101
    points for the monotonicity check) and reports violation counts with
    worst margins; the report is a pure function of the inputs. When
    ``sample`` is given, the scale-shift check refits on the transformed
    sample; otherwise it transforms the fitted parameters directly, which
    is the same mapping the estimator applies.
    """
    if trials < 1:
        raise DataError("trials must be at least 1")
    if rays < 1:
        raise DataError("rays must be at least 1")
    if sample is not None and (sample.k != params.k or sample.start != params.start):
        raise DataError(
            f"sample (k={sample.k}, start={sample.start}) does not match "
            f"parameters (k={params.k}, start={params.start})"
        )
    rng = np.random.Generator(np.random.Philox(key=seed))
    checks = (
        _check_boundary_vanishing(rng, params, trials),
        _check_vanishing_at_infinity(rng, params, trials),
        _check_maximality(rng, params, trials),
        _check_scale_shift(rng, params, trials, sample),
        _check_ray_monotonicity(rng, params, rays),
        _check_hpp_consistency(rng, params, trials),
        _check_young_range(rng, params, trials),
        _check_weighted_fraction(rng, trials),
    )
    return PropertyReport(seed=int(seed), trials=int(trials), rays=int(rays), checks=checks)
