"""Probe projection and nearest-neighbour identification.

Distances are squared Euclidean distances. The square root is never taken:
it is monotone on non-negative numbers, so the arg-min is unchanged.
"""

from __future__ import annotations

import csv
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ecg_data import EcgRecord
from .enrollment import EnrollmentModel
from .errors import DataError


@dataclass(frozen=True)
class MatchResult:
    subject_id: int
    gallery_index: int
    distance_sq: float
    ranking: tuple[tuple[int, float], ...]  # (gallery_index, distance_sq), ascending


def _samples(probe) -> np.ndarray:
    if isinstance(probe, EcgRecord):
        return probe.samples.astype(np.float64)
    return np.asarray(probe, dtype=np.float64).reshape(-1)


def project(model: EnrollmentModel, probe) -> np.ndarray:
    """Feature vector of ``probe``: each eigen-ECG row dotted with probe - mean."""
    x = _samples(probe)
    if x.shape[0] != model.n:
        raise DataError("DIMENSION_MISMATCH", f"probe has {x.shape[0]} samples, model expects {model.n}")
    return model.eigen_ecg @ (x - model.mean)


def _accumulate(diff: np.ndarray) -> np.ndarray:
    # in-order sum over the feature axis (last), one running total per row
    diff = np.atleast_2d(diff)
    acc = np.zeros(diff.shape[0])
    for j in range(diff.shape[1]):
        acc += diff[:, j] * diff[:, j]
    return acc


def distance_sq(p, q) -> float:
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    q = np.asarray(q, dtype=np.float64).reshape(-1)
    if p.shape != q.shape:
        raise DataError("DIMENSION_MISMATCH", f"vector lengths differ: {p.shape[0]} vs {q.shape[0]}")
    return float(_accumulate(p - q)[0])


def gallery_distances(model: EnrollmentModel, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if p.shape[0] != model.m_feat:
        raise DataError("DIMENSION_MISMATCH", f"feature vector has {p.shape[0]} entries, model has {model.m_feat}")
    return _accumulate(model.gallery - p)


def identify(model: EnrollmentModel, probe) -> MatchResult:
    if model.k == 0:
        raise DataError("EMPTY_GALLERY", "model has no gallery vectors")
    d = gallery_distances(model, project(model, probe))
    order = np.argsort(d, kind="stable")  # equal distances keep lowest index first
    best = int(order[0])
    return MatchResult(
        subject_id=model.subject_ids[best],
        gallery_index=best,
        distance_sq=float(d[best]),
        ranking=tuple((int(i), float(d[i])) for i in order),
    )


@dataclass(frozen=True)
class EvaluationReport:
    true_ids: tuple[int, ...]
    results: tuple[MatchResult, ...]

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def correct(self) -> int:
        return sum(t == r.subject_id for t, r in zip(self.true_ids, self.results))

    @property
    def recognition_rate(self) -> float:
        return self.correct / self.total

    @property
    def confusion(self) -> Counter:
        """Counts keyed by (true_id, predicted_id)."""
        return Counter((t, r.subject_id) for t, r in zip(self.true_ids, self.results))

    def rows(self):
        for i, (t, r) in enumerate(zip(self.true_ids, self.results)):
            yield i, t, r.subject_id, r.distance_sq

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["probe_index", "true_id", "predicted_id", "distance_sq"])
        for i, t, pred, d in self.rows():
            w.writerow([i, t, pred, repr(d)])

    def summary(self) -> str:
        return f"recognition_rate={self.recognition_rate:.6f} correct={self.correct} total={self.total}"


def evaluate(model: EnrollmentModel, test_set: Sequence[EcgRecord], threads: Optional[int] = None) -> EvaluationReport:
    """Identify every labelled test record and tally the recognition rate."""
    if len(test_set) == 0:
        raise DataError("EMPTY_TEST", "no test records")
    for i, r in enumerate(test_set):
        if r.subject_id is None:
            raise DataError("BAD_SUBJECT_ID", f"test record {i} is unlabelled")
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = tuple(pool.map(lambda r: identify(model, r), test_set))
    else:
        results = tuple(identify(model, r) for r in test_set)
    return EvaluationReport(tuple(r.subject_id for r in test_set), results)
