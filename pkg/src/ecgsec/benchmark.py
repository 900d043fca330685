"""Throughput measurement for the cipher, decipher and identification blocks.

Execution frequency is ``f = 1 / t`` for a mean per-invocation time ``t``;
throughput is ``T = B * f`` for a block of ``B`` bits (128 for AES, ``32 * n``
for one ECG record through identification).
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import aes
from .ecg_data import DEFAULT_N, synthetic_dataset
from .enrollment import EnrollmentModel, enroll
from .identification import identify

SEED = 0xEC6
OPS = ("cipher", "decipher", "identify")
AES_MIN_ITERATIONS = 1000
DEFAULT_WARMUP = 100


@dataclass(frozen=True)
class BenchReport:
    op_name: str
    block_bits: int
    mean_exec_time: float  # seconds
    exec_frequency: float  # Hz
    throughput: float  # bit/s
    iterations: int
    time_source_resolution: float  # seconds

    @classmethod
    def from_time(cls, op_name: str, block_bits: int, t: float, iterations: int = 1, resolution: float = 0.0):
        if t <= 0:
            raise ValueError(f"execution time must be positive, got {t}")
        f = 1.0 / t
        return cls(op_name, block_bits, t, f, block_bits * f, iterations, resolution)

    def as_dict(self) -> dict:
        return asdict(self)

    def format(self) -> str:
        return (
            f"{self.op_name}: B={self.block_bits} bit, t={self.mean_exec_time * 1e6:.3f} us, "
            f"f={format_frequency(self.exec_frequency)}, T={format_throughput(self.throughput)}, "
            f"iterations={self.iterations}, clock resolution={self.time_source_resolution:.3g} s"
        )


def _scaled(value: float, unit: str) -> str:
    for prefix, scale in (("G", 1e9), ("M", 1e6), ("k", 1e3)):
        if abs(value) >= scale:
            return f"{value / scale:.3f} {prefix}{unit}"
    return f"{value:.3f} {unit}"


def format_frequency(hz: float) -> str:
    return _scaled(hz, "Hz")


def format_throughput(bits_per_s: float) -> str:
    return _scaled(bits_per_s, "bit/s")


def _demo_model(seed: int) -> EnrollmentModel:
    data = synthetic_dataset(5, 4, 0, n=DEFAULT_N, noise=0.05, seed=seed)
    return enroll(data.train)


def bench(
    op: str,
    iterations: int,
    warmup: int = DEFAULT_WARMUP,
    model: Optional[EnrollmentModel] = None,
    seed: int = SEED,
) -> BenchReport:
    """Time ``iterations`` single-block invocations of ``op`` after ``warmup`` discarded ones.

    Inputs are random but drawn from a fixed seed, so repeated runs process
    the same data.
    """
    if op not in OPS:
        raise ValueError(f"unknown op {op!r}; choose from {', '.join(OPS)}")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if op != "identify" and iterations < AES_MIN_ITERATIONS:
        raise ValueError(f"AES benchmarks need at least {AES_MIN_ITERATIONS} iterations")
    if warmup < 0:
        raise ValueError("warmup must be >= 0")

    rng = np.random.default_rng(seed)
    total = warmup + iterations
    if op == "identify":
        model = model if model is not None else _demo_model(seed)
        inputs = list(model.mean + rng.normal(0.0, 1.0, size=(total, model.n)))
        block_bits = model.n * 32

        def call(x):
            identify(model, x)

    else:
        ks = aes.expand_key(rng.integers(0, 256, 16, dtype=np.uint8).tobytes())
        inputs = [rng.integers(0, 256, 16, dtype=np.uint8).tobytes() for _ in range(total)]
        block_bits = 8 * aes.BLOCK_SIZE
        fn = aes.encrypt_block if op == "cipher" else aes.decrypt_block

        def call(x):
            fn(x, ks)

    for x in inputs[:warmup]:
        call(x)
    clock = time.perf_counter
    start = clock()
    for x in inputs[warmup:]:
        call(x)
    elapsed = clock() - start
    resolution = time.get_clock_info("perf_counter").resolution
    # a run faster than the clock can resolve still reports a positive time
    t = max(elapsed, resolution) / iterations
    return BenchReport.from_time(op, block_bits, t, iterations, resolution)
