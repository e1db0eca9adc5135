"""Depth evaluation for first-k-event realizations.

The depth of a realization factors into two pieces:

* a marginal factor ``omega(s_k) ** (|s_k - eta| / (big_m - start))`` built
  from the normalized one-dimensional Mahalanobis depth of the last event
  time, and
* a conditional factor, the weighted geometric mean of the realization's
  normalized gaps measured against their expected proportions ``u_bar``.

Both factors live in [0, 1]; their product is 1 exactly at the central
event-time vector and 0 on the boundary (any zero gap). A multivariate
Mahalanobis depth on the raw event-time vector is included as the
comparison baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .sequences import EventSequence

U_BAR_SUM_TOL = 1e-12
_PARAM_CONSISTENCY_TOL = 1e-9
_RIDGE = 1e-10


def center_times(start: float, mu_last: float, u_bar) -> tuple[float, ...]:
    """Central event-time vector from mean duration and mean gap proportions.

    Entry i is ``start + mu_last * (u_bar[0] + ... + u_bar[i])``. The final
    cumulative proportion is pinned to exactly 1 so the last entry equals
    ``start + mu_last`` bitwise; ``u_bar`` must already sum to 1 within
    1e-12 for this to be a no-op beyond rounding.
    """
    u = np.asarray(u_bar, dtype=float)
    if u.ndim != 1 or u.size < 1:
        raise DataError("gap proportions must be a nonempty vector")
    if not np.all(np.isfinite(u)) or np.any(u <= 0):
        raise DataError("every gap proportion must be positive and finite")
    if abs(float(u.sum()) - 1.0) > U_BAR_SUM_TOL:
        raise DataError(f"gap proportions must sum to 1 within {U_BAR_SUM_TOL}, got {u.sum()!r}")
    if not (mu_last > 0) or not math.isfinite(mu_last):
        raise DataError("mean duration must be positive and finite")
    cum = np.cumsum(u)
    cum[-1] = 1.0
    center = start + mu_last * cum
    if np.any(np.diff(center) <= 0) or not center[0] > start:
        raise DataError("central event times must be strictly increasing")
    return tuple(float(c) for c in center)


@dataclass(frozen=True)
class DepthParams:
    """Fitted quantities needed to evaluate depths for one population.

    ``eta`` is where the marginal depth peaks (the mean last event time,
    because the one-dimensional Mahalanobis depth is maximal at the mean,
    with maximum 1, so no numerical normalization is needed). ``big_m``
    sets the horizon of the marginal exponent and defaults to the mean
    last event time as well.
    """

    k: int
    start: float
    mu_last: float
    var_last: float
    u_bar: tuple[float, ...]
    eta: float
    big_m: float
    center: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "mu_last", float(self.mu_last))
        object.__setattr__(self, "var_last", float(self.var_last))
        object.__setattr__(self, "u_bar", tuple(float(u) for u in self.u_bar))
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "big_m", float(self.big_m))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.k < 1:
            raise DataError("event count must be at least 1")
        if len(self.u_bar) != self.k or len(self.center) != self.k:
            raise DataError("gap proportions and center must have one entry per event")
        values = (self.start, self.mu_last, self.var_last, self.eta, self.big_m)
        if not all(math.isfinite(v) for v in values):
            raise DataError("parameters must be finite")
        if not self.var_last > 0:
            raise DataError(f"degenerate variance of the last event time: {self.var_last}")
        if not self.mu_last > 0:
            raise DataError(f"mean duration must be positive, got {self.mu_last}")
        if not self.big_m - self.start > 0:
            raise DataError(f"degenerate horizon: big_m {self.big_m} does not exceed start {self.start}")
        scale = max(1.0, abs(self.start) + self.mu_last)
        if abs(self.eta - (self.start + self.mu_last)) > _PARAM_CONSISTENCY_TOL * scale:
            raise DataError("eta must equal start + mu_last (the marginal depth peaks at the mean)")
        expected = center_times(self.start, self.mu_last, self.u_bar)
        if max(abs(c - e) for c, e in zip(self.center, expected)) > _PARAM_CONSISTENCY_TOL * scale:
            raise DataError("center is inconsistent with start, mu_last and u_bar")

    @classmethod
    def from_moments(
        cls,
        start: float,
        mu_last: float,
        var_last: float,
        u_bar,
        big_m: float | None = None,
    ) -> "DepthParams":
        """Build params from the fitted moments, deriving eta and the center."""
        u = tuple(float(v) for v in u_bar)
        eta = float(start) + float(mu_last)
        if big_m is None:
            big_m = eta
        return cls(
            k=len(u),
            start=start,
            mu_last=mu_last,
            var_last=var_last,
            u_bar=u,
            eta=eta,
            big_m=big_m,
            center=center_times(float(start), float(mu_last), u),
        )

    @property
    def center_sequence(self) -> EventSequence:
        return EventSequence(self.start, self.center)

    def affine(self, a: float, b: float) -> "DepthParams":
        """Parameters of the population transformed by t -> a*t + b, a > 0.

        Matches what refitting on the transformed sample produces:
        mu scales by a, the variance by a**2, the proportions are
        untouched, and every time-valued field maps through a*t + b.
        """
        if a <= 0:
            raise DataError("scale factor must be positive")
        return DepthParams.from_moments(
            start=a * self.start + b,
            mu_last=a * self.mu_last,
            var_last=a * a * self.var_last,
            u_bar=self.u_bar,
            big_m=a * self.big_m + b,
        )


@dataclass(frozen=True)
class DepthBreakdown:
    """Per-realization depth decomposition.

    ``product == marginal_factor * conditional`` by construction. All
    depth-valued fields lie in [0, 1]; ``exponent`` is the nonnegative
    distance ratio and may exceed 1.
    """

    omega: float
    exponent: float
    marginal_factor: float
    conditional: float
    product: float
    baseline_mahalanobis: float | None = None


def marginal_depth_d1(last_time: float, params: DepthParams) -> float:
    """One-dimensional Mahalanobis depth of the last event time.

    ``1 / (1 + (last_time - start - mu_last)**2 / var_last)``; equals 1
    exactly when the duration matches the mean duration.
    """
    if not params.var_last > 0:
        raise DataError(f"degenerate variance: {params.var_last}")
    dev = last_time - params.start - params.mu_last
    return 1.0 / (1.0 + (dev * dev) / params.var_last)


def omega(last_time: float, params: DepthParams) -> float:
    """Marginal depth normalized by its maximum.

    The one-dimensional Mahalanobis depth peaks at exactly 1, so the
    normalizer is 1 and this coincides with :func:`marginal_depth_d1`.
    The function exists to keep the normalization contract explicit.
    """
    return marginal_depth_d1(last_time, params)


def marginal_factor(last_time: float, params: DepthParams) -> float:
    """``omega(last_time) ** (|last_time - eta| / (big_m - start))``.

    The exponent is computed first; when it is 0 the factor is 1
    regardless of the base, which keeps the factor continuous at eta.
    """
    horizon = params.big_m - params.start
    if not horizon > 0:
        raise DataError(f"degenerate horizon: big_m {params.big_m} does not exceed start {params.start}")
    exponent = abs(last_time - params.eta) / horizon
    if exponent == 0.0:
        return 1.0
    w = omega(last_time, params)
    if w == 0.0:
        return 0.0
    return min(math.pow(w, exponent), 1.0)


def _conditional_from_gaps(gaps, total: float, u_bar) -> float:
    # Log-space product with an exact early-exit zero on the boundary.
    if total <= 0.0:
        return 0.0
    log_sum = 0.0
    for g, u in zip(gaps, u_bar):
        if g <= 0.0:
            return 0.0
        log_sum += u * (math.log(g) - math.log(total * u))
    return min(math.exp(log_sum), 1.0)


def conditional_depth(seq: EventSequence, params: DepthParams) -> float:
    """Weighted geometric mean of normalized gaps against ``u_bar``.

    ``prod(((s_i - s_{i-1}) / ((s_k - s_0) * u_bar[i])) ** u_bar[i])``,
    evaluated in log space. Exactly 0 when any gap is zero; at most 1 by
    the weighted AM-GM bound, with equality only when the normalized gaps
    match ``u_bar``.
    """
    if seq.k != params.k:
        raise DataError(f"realization has {seq.k} events but parameters expect {params.k}")
    return _conditional_from_gaps(seq.gaps, seq.duration, params.u_bar)


def hpp_conditional_depth(seq: EventSequence) -> float:
    """Conditional depth under uniform expected proportions.

    ``k * prod(((s_i - s_{i-1}) / (s_k - s_0)) ** (1/k))``, the closed
    form the general conditional depth reduces to when every expected
    proportion is 1/k (constant-rate gaps). Agrees with
    :func:`conditional_depth` at uniform ``u_bar`` to rounding error.
    """
    total = seq.duration
    if total <= 0.0:
        return 0.0
    k = seq.k
    log_sum = 0.0
    for g in seq.gaps:
        if g <= 0.0:
            return 0.0
        log_sum += math.log(g)
    value = math.exp(math.log(k) + log_sum / k - math.log(total))
    return min(value, 1.0)


def product_depth(
    seq: EventSequence,
    params: DepthParams,
    baseline: tuple | None = None,
) -> DepthBreakdown:
    """Full depth of a realization: marginal factor times conditional depth.

    When ``baseline`` (mean vector, covariance matrix) is given, the
    multivariate Mahalanobis depth of the raw event-time vector is filled
    in for comparison.

    The central event-time vector is the unique maximizer with depth
    exactly 1; it is recognized by equality so rounding in the fitted
    cumulative proportions cannot push the maximum below 1.
    """
    if seq.k != params.k:
        raise DataError(f"realization has {seq.k} events but parameters expect {params.k}")
    if seq.start != params.start:
        raise DataError(f"realization start {seq.start} differs from parameter start {params.start}")
    base = None
    if baseline is not None:
        base = mahalanobis_depth(seq.times, baseline[0], baseline[1])
    if seq.times == params.center:
        return DepthBreakdown(
            omega=1.0,
            exponent=0.0,
            marginal_factor=1.0,
            conditional=1.0,
            product=1.0,
            baseline_mahalanobis=base,
        )
    w = omega(seq.last, params)
    horizon = params.big_m - params.start
    exponent = abs(seq.last - params.eta) / horizon
    if exponent == 0.0:
        factor = 1.0
    elif w == 0.0:
        factor = 0.0
    else:
        factor = min(math.pow(w, exponent), 1.0)
    cond = _conditional_from_gaps(seq.gaps, seq.duration, params.u_bar)
    return DepthBreakdown(
        omega=w,
        exponent=exponent,
        marginal_factor=factor,
        conditional=cond,
        product=factor * cond,
        baseline_mahalanobis=base,
    )


def mahalanobis_depth(times, mean, covariance) -> float:
    """Multivariate Mahalanobis depth ``1 / (1 + (s-m)' C^-1 (s-m))``.

    The covariance is symmetrized and, if its Cholesky factorization
    fails, ridged once with ``1e-10 * trace(C)/k`` on the diagonal; if it
    is still not positive definite a :class:`DataError` is raised.
    """
    x = np.asarray(times, dtype=float).reshape(-1)
    m = np.asarray(mean, dtype=float).reshape(-1)
    c = np.asarray(covariance, dtype=float)
    k = x.size
    if m.size != k or c.shape != (k, k):
        raise DataError(
            f"shape mismatch: times {x.shape}, mean {m.shape}, covariance {c.shape}"
        )
    c = 0.5 * (c + c.T)
    try:
        chol = np.linalg.cholesky(c)
    except np.linalg.LinAlgError:
        ridge = _RIDGE * float(np.trace(c)) / k
        try:
            chol = np.linalg.cholesky(c + ridge * np.eye(k))
        except np.linalg.LinAlgError:
            raise DataError("covariance matrix is singular even after ridge regularization") from None
    dev = x - m
    y = np.linalg.solve(chol, dev)
    d2 = float(y @ y)
    return 1.0 / (1.0 + d2)
