"""Convergence metrics, per-run traces and cross-run aggregation."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import fidelity, linear_overlap

log = logging.getLogger(__name__)

TRACE_FIELDS = ("f_plus", "f_minus", "g_k", "alpha_k", "beta_k", "n_plus", "n_minus")


def infidelity(truth, estimate) -> float:
    return 1.0 - fidelity(truth, estimate)


def image_error(obj, estimate) -> float:
    """1 - <O|estimate/|estimate|>. A zero estimate carries no information and scores 1."""
    norm = np.linalg.norm(estimate)
    if norm == 0.0:
        log.debug("image_error on a zero estimate; returning 1")
        return 1.0
    return 1.0 - linear_overlap(obj, estimate) / norm


@dataclass
class RunTrace:
    """Per-iteration record of one run.

    Row 0 is the initial estimate, so a run of K iterations has K + 1 rows.
    Columns that do not apply to a variant hold NaN.
    """

    run_id: int
    seed: int
    variant: str
    k: list = field(default_factory=list)
    metric: list = field(default_factory=list)
    f_plus: list = field(default_factory=list)
    f_minus: list = field(default_factory=list)
    g_k: list = field(default_factory=list)
    alpha_k: list = field(default_factory=list)
    beta_k: list = field(default_factory=list)
    n_plus: list = field(default_factory=list)
    n_minus: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    estimate: object = field(default=None, repr=False)

    def append(self, metric, **values):
        k = len(self.k)
        if not math.isfinite(metric):
            raise ValueError(f"non-finite metric at k={k}")
        self.k.append(k)
        self.metric.append(float(metric))
        for name in TRACE_FIELDS:
            v = values.pop(name, None)
            getattr(self, name).append(math.nan if v is None else float(v))
        if values:
            raise TypeError(f"unknown trace fields {sorted(values)}")

    def __len__(self):
        return len(self.k)

    @property
    def metrics(self) -> np.ndarray:
        return np.asarray(self.metric)

    @property
    def final(self) -> float:
        return self.metric[-1]


@dataclass(frozen=True)
class Aggregate:
    mean: np.ndarray
    std: np.ndarray
    se: np.ndarray
    n: int

    def __len__(self):
        return len(self.mean)


def aggregate(traces) -> Aggregate:
    """Per-iteration mean, sample std (n-1 denominator) and standard error."""
    traces = list(traces)
    if not traces:
        raise ValueError("nothing to aggregate")
    rows = [t.metrics if isinstance(t, RunTrace) else np.asarray(t, dtype=float) for t in traces]
    if len({len(r) for r in rows}) != 1:
        raise ValueError("traces have different lengths")
    variants = {t.variant for t in traces if isinstance(t, RunTrace)}
    if len(variants) > 1:
        raise ValueError(f"cannot aggregate mixed variants {sorted(variants)}")
    data = np.vstack(rows)
    n = data.shape[0]
    mean = data.mean(axis=0)
    std = data.std(axis=0, ddof=1) if n > 1 else np.zeros_like(mean)
    return Aggregate(mean=mean, std=std, se=std / math.sqrt(n), n=n)


def threshold_crossing(aggregated, threshold):
    """First k whose mean metric is below ``threshold``, or None."""
    mean = aggregated.mean if isinstance(aggregated, Aggregate) else np.asarray(aggregated)
    hits = np.flatnonzero(mean < threshold)
    return int(hits[0]) if hits.size else None
