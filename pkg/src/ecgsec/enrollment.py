"""Eigen-ECG enrollment.

Training signals are mean-centred into the columns of a deviation matrix
``A`` (n x k). Instead of the n x n covariance ``A @ A.T`` we diagonalise the
k x k surrogate ``A.T @ A`` with cyclic Jacobi rotations, drop eigenpairs
whose eigenvalue is below a threshold, and map each kept eigenvector ``v``
back to signal space as ``A @ v`` (normalised). The model keeps the mean, the
eigen-ECG rows and every training record projected onto them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .ecg_data import EcgRecord
from .errors import DataError

log = logging.getLogger(__name__)

MAGIC = "ECGMODEL"
VERSION = "v1"
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray


@dataclass(frozen=True, eq=False)
class EnrollmentModel:
    """mean (n,), eigen_ecg (m_feat, n), gallery (k, m_feat), subject_ids (k,)."""

    mean: np.ndarray
    eigen_ecg: np.ndarray
    gallery: np.ndarray
    subject_ids: tuple[int, ...]

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        eig = np.asarray(self.eigen_ecg, dtype=np.float64).reshape(-1, mean.shape[0])
        gal = np.asarray(self.gallery, dtype=np.float64).reshape(-1, eig.shape[0])
        ids = tuple(int(s) for s in self.subject_ids)
        if gal.shape[0] != len(ids):
            raise DataError("DIMENSION_MISMATCH", f"{gal.shape[0]} gallery vectors but {len(ids)} subject ids")
        if eig.shape[0] > len(ids):
            raise DataError("DIMENSION_MISMATCH", f"m_feat={eig.shape[0]} exceeds k={len(ids)}")
        for name, arr in (("mean", mean), ("eigen_ecg", eig), ("gallery", gal)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "subject_ids", ids)

    @property
    def n(self) -> int:
        return self.mean.shape[0]

    @property
    def k(self) -> int:
        return len(self.subject_ids)

    @property
    def m_feat(self) -> int:
        return self.eigen_ecg.shape[0]

    def __eq__(self, other):
        if not isinstance(other, EnrollmentModel):
            return NotImplemented
        return (
            self.subject_ids == other.subject_ids
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.eigen_ecg, other.eigen_ecg)
            and np.array_equal(self.gallery, other.gallery)
        )

    __hash__ = None


def _training_matrix(training: Sequence[EcgRecord]) -> np.ndarray:
    if len(training) == 0:
        raise DataError("EMPTY_TRAINING", "no training records")
    n = training[0].n
    for i, r in enumerate(training):
        if r.n != n:
            raise DataError("DIMENSION_MISMATCH", f"training record {i} has {r.n} samples, expected {n}")
    return np.stack([r.samples.astype(np.float64) for r in training])


def compute_mean(training: Sequence[EcgRecord]) -> np.ndarray:
    return _training_matrix(training).mean(axis=0)


def build_deviation_matrix(training: Sequence[EcgRecord], mean: np.ndarray) -> np.ndarray:
    """Column j is training record j minus the mean (shape n x k)."""
    t = _training_matrix(training)
    mean = np.asarray(mean, dtype=np.float64)
    if mean.shape != (t.shape[1],):
        raise DataError("DIMENSION_MISMATCH", f"mean has shape {mean.shape}, records have {t.shape[1]} samples")
    return (t - mean).T


def jacobi_eigh(L: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi for a real symmetric matrix.

    Returns ``(values, vectors)`` in the solver's diagonal order, with
    eigenvectors as columns. Converged once the off-diagonal Frobenius norm
    is at most ``tol * ||L||_F``.
    """
    a = np.array(L, dtype=np.float64)
    k = a.shape[0]
    if a.shape != (k, k):
        raise DataError("DIMENSION_MISMATCH", f"matrix must be square, got {a.shape}")
    v = np.eye(k)
    target = tol * np.linalg.norm(a)

    def off(m):
        return float(np.linalg.norm(m - np.diag(np.diag(m))))

    residual = off(a)
    sweeps = 0
    while residual > target:
        if sweeps == max_sweeps:
            raise DataError("NO_CONVERGENCE", f"{max_sweeps} sweeps, off-diagonal norm {residual:.3e} > {target:.3e}")
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                app, aqq = a[p, p], a[q, q]
                # negligible against both diagonals: rotating would not change them
                if abs(apq) <= 1e-18 * min(abs(app), abs(aqq)) or apq == 0.0:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweeps += 1
        residual = off(a)
    log.debug("jacobi converged in %d sweeps (k=%d)", sweeps, k)
    return np.diag(a).copy(), v


def surrogate_eigen(A: np.ndarray, tol: float = JACOBI_TOL) -> list[EigenPair]:
    """Eigenpairs of ``A.T @ A``, sorted by descending eigenvalue (stable)."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[1] < 2:
        raise DataError("DIMENSION_MISMATCH", f"need at least 2 columns, got shape {A.shape}")
    L = A.T @ A
    L = 0.5 * (L + L.T)
    values, vectors = jacobi_eigh(L, tol=tol)
    order = np.argsort(-values, kind="stable")
    return [EigenPair(float(values[i]), vectors[:, i].copy()) for i in order]


def _fix_sign(u: np.ndarray) -> np.ndarray:
    # first component that is not rounding noise becomes positive
    big = np.flatnonzero(np.abs(u) > 1e-12 * np.max(np.abs(u)))
    return -u if big.size and u[big[0]] < 0 else u


def select_and_recover(A: np.ndarray, pairs: Sequence[EigenPair], threshold: float = 1.0) -> np.ndarray:
    """Keep eigenpairs with value >= threshold and map them to unit eigen-ECGs.

    Returns an (m_feat x n) matrix, one eigen-ECG per row, in the order of
    ``pairs``.
    """
    A = np.asarray(A, dtype=np.float64)
    rows = []
    for pair in pairs:
        if pair.value < threshold:
            continue
        u = A @ pair.vector
        norm = np.linalg.norm(u)
        if norm == 0.0:
            continue
        rows.append(_fix_sign(u / norm))
    if not rows:
        top = max((p.value for p in pairs), default=0.0)
        raise DataError("NO_FEATURES", f"no eigenvalue reaches threshold {threshold:g} (largest {top:.6g})")
    return np.array(rows)


def project_matrix(eigen_ecg: np.ndarray, mean: np.ndarray, signals: np.ndarray) -> np.ndarray:
    """Project rows of ``signals`` onto the eigen-ECG rows after mean removal."""
    return (np.atleast_2d(signals) - mean) @ eigen_ecg.T


def enroll(training: Sequence[EcgRecord], threshold: float = 1.0) -> EnrollmentModel:
    if len(training) < 2:
        raise DataError("EMPTY_TRAINING" if not training else "TOO_FEW_TRAINING",
                        f"need at least 2 training records, got {len(training)}")
    for r in training:
        if r.subject_id is None:
            raise DataError("BAD_SUBJECT_ID", "training records must be labelled")
    mean = compute_mean(training)
    A = build_deviation_matrix(training, mean)
    eigen_ecg = select_and_recover(A, surrogate_eigen(A), threshold)
    gallery = project_matrix(eigen_ecg, mean, _training_matrix(training))
    log.info("enrolled k=%d n=%d m_feat=%d", A.shape[1], A.shape[0], eigen_ecg.shape[0])
    return EnrollmentModel(mean, eigen_ecg, gallery, tuple(r.subject_id for r in training))


# model file ---------------------------------------------------------------

def _fmt(values) -> str:
    return " ".join(f"{float(x):.17g}" for x in values)


def dumps_model(model: EnrollmentModel) -> str:
    lines = [f"{MAGIC} {VERSION}", f"{model.n} {model.k} {model.m_feat}", _fmt(model.mean)]
    lines += [_fmt(row) for row in model.eigen_ecg]
    lines += [f"{sid} {_fmt(vec)}".rstrip() for sid, vec in zip(model.subject_ids, model.gallery)]
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> EnrollmentModel:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DataError("TRUNCATED", "empty model file")
    header = lines[0].split()
    if not header or header[0] != MAGIC:
        raise DataError("BAD_MAGIC", f"expected {MAGIC!r} header")
    if len(header) != 2 or header[1] != VERSION:
        raise DataError("VERSION_MISMATCH", f"unsupported model version {' '.join(header[1:])!r}")
    if len(lines) < 2:
        raise DataError("TRUNCATED", "missing dimension line")
    try:
        n, k, m = (int(x) for x in lines[1].split())
    except ValueError:
        raise DataError("PARSE_ERROR", "line 2: expected 'n k m_feat'") from None
    expected = 3 + m + k
    if len(lines) < expected:
        raise DataError("TRUNCATED", f"expected {expected} lines, found {len(lines)}")
    if len(lines) > expected:
        raise DataError("PARSE_ERROR", f"unexpected content after line {expected}")

    def row(i, width, tokens=None):
        try:
            vals = [float(x) for x in (tokens if tokens is not None else lines[i].split())]
        except ValueError:
            raise DataError("PARSE_ERROR", f"line {i + 1}: not a number") from None
        if len(vals) < width:
            raise DataError("TRUNCATED", f"line {i + 1}: expected {width} values, found {len(vals)}")
        if len(vals) > width:
            raise DataError("PARSE_ERROR", f"line {i + 1}: expected {width} values, found {len(vals)}")
        return vals

    mean = row(2, n)
    eig = [row(3 + j, n) for j in range(m)]
    ids, gal = [], []
    for i in range(k):
        tokens = lines[3 + m + i].split()
        if not tokens:
            raise DataError("TRUNCATED", f"line {4 + m + i}: empty gallery line")
        try:
            sid = int(tokens[0])
        except ValueError:
            raise DataError("PARSE_ERROR", f"line {4 + m + i}: bad subject id {tokens[0]!r}") from None
        if sid < 0:
            raise DataError("PARSE_ERROR", f"line {4 + m + i}: negative subject id")
        ids.append(sid)
        gal.append(row(3 + m + i, m, tokens[1:]))
    return EnrollmentModel(np.array(mean), np.array(eig).reshape(m, n), np.array(gal).reshape(k, m), tuple(ids))


def save_model(model: EnrollmentModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path) -> EnrollmentModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError("IO_ERROR", f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise DataError("BAD_MAGIC", f"{path}: not a text model file") from None
    return loads_model(text)
