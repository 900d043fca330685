import math

import pytest

from ecgsec.benchmark import BenchReport, bench, format_throughput
from ecgsec.ecg_data import synthetic_dataset
from ecgsec.enrollment import enroll


def check_equations(r):
    assert math.isclose(r.exec_frequency * r.mean_exec_time, 1.0, rel_tol=1e-9)
    assert math.isclose(r.throughput, r.block_bits * r.exec_frequency, rel_tol=1e-9)


def test_unit_case():
    r = BenchReport.from_time("cipher", 128, 1.0)
    assert r.exec_frequency == 1.0 and r.throughput == 128.0


def test_table_vii_frequency():
    # 25.1 us per 128-bit block
    r = BenchReport.from_time("cipher", 128, 25.1e-6)
    assert 39.8e3 <= r.exec_frequency <= 39.9e3
    assert round(r.exec_frequency / 1e3, 1) == 39.8
    assert round(r.throughput / 1e6, 1) == 5.1


@pytest.mark.parametrize("t,f_khz", [(41.0e-6, 24.4), (40.8e-6, 24.5), (213e-6, 4.7), (57.9e-6, 17.3)])
def test_other_table_vii_columns(t, f_khz):
    assert round(BenchReport.from_time("x", 128, t).exec_frequency / 1e3, 1) == f_khz


@pytest.mark.parametrize("op", ["cipher", "decipher"])
def test_aes_bench(op):
    r = bench(op, 1000, warmup=10)
    assert r.block_bits == 128 and r.iterations == 1000
    assert r.mean_exec_time > 0 and r.time_source_resolution > 0
    check_equations(r)


def test_identify_bench_uses_record_bits():
    model = enroll(synthetic_dataset(3, 2, 0, n=120, noise=0.05, seed=1).train)
    r = bench("identify", 20, warmup=2, model=model)
    assert r.block_bits == 120 * 32
    check_equations(r)


def test_bench_argument_checks():
    with pytest.raises(ValueError):
        bench("cipher", 999)
    with pytest.raises(ValueError):
        bench("hash", 1000)
    with pytest.raises(ValueError):
        bench("identify", 0)
    with pytest.raises(ValueError):
        BenchReport.from_time("x", 128, 0.0)


def test_units_are_explicit():
    assert format_throughput(5.1e6) == "5.100 Mbit/s"
    assert format_throughput(3.1e9) == "3.100 Gbit/s"
    assert format_throughput(12.0) == "12.000 bit/s"
    assert "bit/s" in BenchReport.from_time("cipher", 128, 25.1e-6).format()
