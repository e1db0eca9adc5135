"""Event-time containers: single realizations and homogeneous samples.

A realization is an ordered vector of k event times together with a shared
start time. Ties are allowed (they place the realization on the boundary,
where every depth in this package is zero), but decreasing times are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class EventSequence:
    """One realization: start time and k nondecreasing event times."""

    start: float
    times: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if len(self.times) == 0:
            raise DataError("an event sequence needs at least one event")
        if not math.isfinite(self.start) or not all(math.isfinite(t) for t in self.times):
            raise DataError("event times must be finite")
        prev = self.start
        for i, t in enumerate(self.times):
            if t < prev:
                raise DataError(
                    f"event times must be nondecreasing from the start: "
                    f"position {i + 1} has {t} after {prev}"
                )
            prev = t

    @property
    def k(self) -> int:
        return len(self.times)

    @property
    def last(self) -> float:
        return self.times[-1]

    @property
    def duration(self) -> float:
        """Elapsed time from the start to the last event."""
        return self.times[-1] - self.start

    @property
    def gaps(self) -> tuple[float, ...]:
        """Inter-event gaps, the first one measured from the start."""
        prev = self.start
        out = []
        for t in self.times:
            out.append(t - prev)
            prev = t
        return tuple(out)

    @property
    def on_boundary(self) -> bool:
        """True when any gap is exactly zero."""
        return any(g == 0.0 for g in self.gaps)

    def affine(self, a: float, b: float) -> "EventSequence":
        """Return the realization under t -> a*t + b with a > 0."""
        if a <= 0:
            raise DataError("scale factor must be positive")
        return EventSequence(a * self.start + b, tuple(a * t + b for t in self.times))


class SampleSet:
    """A homogeneous collection of realizations sharing k and the start time.

    Stores the event times as an (n, k) float matrix; row order is
    preserved and meaningful (realization indices refer to rows).
    """

    def __init__(self, start: float, times):
        self.start = float(start)
        arr = np.array(times, dtype=float)
        if arr.ndim != 2:
            raise DataError(f"sample times must form an (n, k) matrix, got shape {arr.shape}")
        n, k = arr.shape
        if n < 1 or k < 1:
            raise DataError(f"sample must contain at least one realization and one event, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or not math.isfinite(self.start):
            raise DataError("sample times must be finite")
        if np.any(arr[:, 0] < self.start):
            row = int(np.nonzero(arr[:, 0] < self.start)[0][0])
            raise DataError(f"realization {row}: first event {arr[row, 0]} precedes start {self.start}")
        if k > 1 and np.any(np.diff(arr, axis=1) < 0):
            row = int(np.nonzero(np.any(np.diff(arr, axis=1) < 0, axis=1))[0][0])
            raise DataError(f"realization {row}: event times decrease")
        arr.setflags(write=False)
        self.times = arr

    @classmethod
    def from_sequences(cls, sequences) -> "SampleSet":
        seqs = list(sequences)
        if not seqs:
            raise DataError("cannot build a sample from zero realizations")
        start = seqs[0].start
        k = seqs[0].k
        for i, s in enumerate(seqs):
            if s.start != start:
                raise DataError(f"realization {i}: start {s.start} differs from {start}")
            if s.k != k:
                raise DataError(f"realization {i}: {s.k} events, expected {k}")
        return cls(start, [s.times for s in seqs])

    @property
    def n(self) -> int:
        return self.times.shape[0]

    @property
    def k(self) -> int:
        return self.times.shape[1]

    def __len__(self) -> int:
        return self.n

    def sequence(self, i: int) -> EventSequence:
        return EventSequence(self.start, tuple(self.times[i]))

    def __iter__(self):
        for i in range(self.n):
            yield self.sequence(i)

    def durations(self) -> np.ndarray:
        """Last event time minus start, per realization."""
        return self.times[:, -1] - self.start

    def gaps(self) -> np.ndarray:
        """(n, k) matrix of inter-event gaps, first column from the start."""
        lead = np.full((self.n, 1), self.start)
        return np.diff(np.concatenate([lead, self.times], axis=1), axis=1)

    def affine(self, a: float, b: float) -> "SampleSet":
        """Return the sample under t -> a*t + b with a > 0."""
        if a <= 0:
            raise DataError("scale factor must be positive")
        return SampleSet(a * self.start + b, a * self.times + b)
