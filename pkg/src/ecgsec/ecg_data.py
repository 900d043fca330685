"""ECG record files, manifests, train/test datasets and the plaintext byte format.

A record file is UTF-8 text with one decimal sample per line. A manifest is
a CSV file with header ``path,subject_id,split``; relative paths resolve
against the manifest's directory.

Samples are held as float32, the precision of the on-wire format, so that
serialize/deserialize is exact for every loaded record.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DataError

DEFAULT_N = 300
TRAIN = "TRAIN"
TEST = "TEST"
SAMPLE_DTYPE = np.dtype("<f4")


@dataclass(frozen=True, eq=False)
class EcgRecord:
    """One ECG signal. ``subject_id`` is None for an unlabeled probe."""

    subject_id: Optional[int]
    samples: np.ndarray

    def __post_init__(self):
        if self.subject_id is not None and (int(self.subject_id) != self.subject_id or self.subject_id < 0):
            raise DataError("BAD_SUBJECT_ID", f"subject id must be a non-negative integer, got {self.subject_id!r}")
        with np.errstate(over="ignore", invalid="ignore"):
            samples = np.asarray(self.samples, dtype=np.float32).reshape(-1)
        if not np.all(np.isfinite(samples)):
            bad = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise DataError("NON_FINITE", f"sample {bad} is not finite in single precision")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    def __eq__(self, other):
        if not isinstance(other, EcgRecord):
            return NotImplemented
        return self.subject_id == other.subject_id and np.array_equal(self.samples, other.samples)

    __hash__ = None


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    subject_id: int
    split: str


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.split not in (TRAIN, TEST):
                raise DataError("BAD_MANIFEST", f"split must be TRAIN or TEST, got {e.split!r}")
            if e.path in seen:
                raise DataError("DUPLICATE_PATH", f"{e.path} listed more than once")
            seen.add(e.path)


@dataclass(frozen=True)
class Dataset:
    """Records with their split designation; closed-set by construction."""

    records: tuple[EcgRecord, ...]
    split: tuple[str, ...]
    paths: tuple[Optional[Path], ...] = field(default=())

    def __post_init__(self):
        if len(self.records) != len(self.split):
            raise ValueError("records and split must have equal length")
        if not self.paths:
            object.__setattr__(self, "paths", (None,) * len(self.records))
        train_ids = {r.subject_id for r in self.train}
        if len(self.train) < 2:
            raise DataError("TOO_FEW_TRAINING", f"need at least 2 training records, got {len(self.train)}")
        for r in self.test:
            if r.subject_id not in train_ids:
                raise DataError("OPEN_SET_SUBJECT", f"test subject {r.subject_id} has no training record")

    def _select(self, which: str) -> tuple:
        return tuple(r for r, s in zip(self.records, self.split) if s == which)

    @property
    def train(self) -> tuple[EcgRecord, ...]:
        return self._select(TRAIN)

    @property
    def test(self) -> tuple[EcgRecord, ...]:
        return self._select(TEST)

    def paths_for(self, which: str) -> tuple[Optional[Path], ...]:
        return tuple(p for p, s in zip(self.paths, self.split) if s == which)


def parse_samples(lines: Iterable[str], n: int, source: str = "<record>") -> np.ndarray:
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        try:
            values.append(float(text))
        except ValueError:
            raise DataError("PARSE_ERROR", f"{source}: line {lineno}: not a number: {text!r}") from None
    if len(values) != n:
        raise DataError("WRONG_LENGTH", f"{source}: expected {n} samples, found {len(values)}")
    with np.errstate(over="ignore", invalid="ignore"):
        samples = np.array(values, dtype=np.float32)
    bad = np.flatnonzero(~np.isfinite(samples))
    if bad.size:
        raise DataError("NON_FINITE", f"{source}: line {bad[0] + 1}: value is not finite")
    return samples


def load_record(path, subject_id: Optional[int] = None, n: int = DEFAULT_N) -> EcgRecord:
    """Read a one-sample-per-line text file holding exactly ``n`` samples."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError("IO_ERROR", f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise DataError("PARSE_ERROR", f"{path}: not UTF-8 text") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # optional trailing newline
    return EcgRecord(subject_id, parse_samples(lines, n, str(path)))


def write_record(path, record: EcgRecord) -> None:
    # repr of the float32 value parses back to the same single-precision number
    Path(path).write_text("".join(f"{float(v)!r}\n" for v in record.samples), encoding="utf-8")


def read_manifest(path) -> Manifest:
    path = Path(path)
    base = path.parent
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["path", "subject_id", "split"]:
                raise DataError("BAD_MANIFEST", f"{path}: header must be path,subject_id,split")
            entries = []
            for row in reader:
                lineno = reader.line_num
                try:
                    sid = int(row["subject_id"])
                except (TypeError, ValueError):
                    raise DataError("BAD_MANIFEST", f"{path}: line {lineno}: bad subject_id") from None
                if sid < 0:
                    raise DataError("BAD_MANIFEST", f"{path}: line {lineno}: negative subject_id")
                p = Path(row["path"].strip())
                entries.append(ManifestEntry(p if p.is_absolute() else base / p, sid, (row["split"] or "").strip().upper()))
    except OSError as exc:
        raise DataError("IO_ERROR", f"{path}: {exc.strerror or exc}") from None
    return Manifest(tuple(entries))


def write_manifest(path, entries: Sequence[ManifestEntry]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "subject_id", "split"])
        for e in entries:
            w.writerow([str(e.path), e.subject_id, e.split])


def load_dataset(manifest: Manifest | str | Path, n: int = DEFAULT_N) -> Dataset:
    if not isinstance(manifest, Manifest):
        manifest = read_manifest(manifest)
    records = tuple(load_record(e.path, e.subject_id, n) for e in manifest.entries)
    return Dataset(records, tuple(e.split for e in manifest.entries), tuple(e.path for e in manifest.entries))


def serialize_record(record: EcgRecord) -> bytes:
    """Canonical plaintext: n little-endian IEEE-754 float32 values, no label."""
    return record.samples.astype(SAMPLE_DTYPE).tobytes()


def deserialize_record(data: bytes, subject_id: Optional[int] = None) -> EcgRecord:
    if len(data) % SAMPLE_DTYPE.itemsize:
        raise DataError("WRONG_LENGTH", f"{len(data)} bytes is not a whole number of float32 samples")
    return EcgRecord(subject_id, np.frombuffer(data, dtype=SAMPLE_DTYPE).astype(np.float32))


def synthetic_dataset(
    n_subjects: int,
    train_per_subject: int,
    test_per_subject: int,
    n: int = DEFAULT_N,
    noise: float = 0.01,
    separation: float = 1.0,
    seed=0,
) -> Dataset:
    """Subjects with smooth random templates plus Gaussian noise.

    Each template is a sum of a few Gaussian bumps (a crude heartbeat shape)
    scaled so that any two templates differ by at least ``separation`` in
    RMS; ``noise`` is the per-sample standard deviation.
    """
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n)
    templates = []
    while len(templates) < n_subjects:
        centers = rng.uniform(0.1, 0.9, size=5)
        widths = rng.uniform(0.01, 0.08, size=5)
        amps = rng.normal(0.0, 1.0, size=5)
        tpl = (amps[:, None] * np.exp(-0.5 * ((t[None, :] - centers[:, None]) / widths[:, None]) ** 2)).sum(axis=0)
        tpl *= 4.0 * separation / max(np.sqrt(np.mean(tpl**2)), 1e-12)
        if all(np.sqrt(np.mean((tpl - o) ** 2)) >= separation for o in templates):
            templates.append(tpl)
    records, split = [], []
    for sid, tpl in enumerate(templates):
        for which, count in ((TRAIN, train_per_subject), (TEST, test_per_subject)):
            for _ in range(count):
                records.append(EcgRecord(sid, tpl + rng.normal(0.0, noise, size=n)))
                split.append(which)
    return Dataset(tuple(records), tuple(split))
