import os

import pytest
from hypothesis import given, settings, strategies as st

from ecgsec import aes
import oracles

FIPS_KEY = bytes(range(16))
FIPS_PT = bytes.fromhex("00112233445566778899aabbccddeeff")
FIPS_CT = bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")

block = st.binary(min_size=16, max_size=16)


def test_known_answer_matches_reference_library():
    # the frozen vector is itself re-checked against an independent AES
    assert oracles.aes_ecb_encrypt(FIPS_KEY, FIPS_PT) == FIPS_CT
    ks = aes.expand_key(FIPS_KEY)
    assert aes.encrypt_block(FIPS_PT, ks) == FIPS_CT
    assert aes.decrypt_block(FIPS_CT, ks) == FIPS_PT


def test_appendix_a_key_expansion():
    key = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")
    ks = aes.expand_key(key)
    assert ks.round_keys[-1] == bytes.fromhex("d014f9a8c9ee2589e13f0cc8b6630ca6")
    assert list(ks.round_keys) == oracles.key_expansion(key)


def test_zero_key_schedule_starts_with_key():
    ks = aes.expand_key(bytes(16))
    assert ks.round_keys[0] == bytes(16)
    assert len(ks.round_keys) == 11
    assert all(len(rk) == 16 for rk in ks.round_keys)


@settings(max_examples=200)
@given(key=block)
def test_key_expansion_matches_oracle(key):
    assert list(aes.expand_key(key).round_keys) == oracles.key_expansion(key)


@settings(max_examples=300)
@given(key=block, pt=block)
def test_encrypt_matches_reference_library(key, pt):
    assert aes.encrypt_block(pt, aes.expand_key(key)) == oracles.aes_ecb_encrypt(key, pt)


@settings(max_examples=300)
@given(key=block, pt=block)
def test_round_trip(key, pt):
    ks = aes.expand_key(key)
    assert aes.decrypt_block(aes.encrypt_block(pt, ks), ks) == pt


def test_zero_block_round_trip():
    ks = aes.expand_key(os.urandom(16))
    assert aes.decrypt_block(aes.encrypt_block(bytes(16), ks), ks) == bytes(16)


def test_distinct_plaintexts_give_distinct_ciphertexts(rng):
    ks = aes.expand_key(rng.bytes(16))
    pts = {rng.bytes(16) for _ in range(2000)}
    cts = {aes.encrypt_block(p, ks) for p in pts}
    assert len(cts) == len(pts)


def test_sbox_tables_are_inverse():
    assert sorted(aes.SBOX) == list(range(256))
    for b in range(256):
        assert aes.INV_SBOX[aes.SBOX[b]] == b
        assert aes.SBOX[aes.INV_SBOX[b]] == b
    assert list(aes.SBOX) == oracles.SBOX


def test_mix_columns_fips_round1():
    # FIPS-197 Appendix B, round 1: after ShiftRows -> after MixColumns
    before = bytes.fromhex("d4bf5d30e0b452aeb84111f11e2798e5")
    after = bytes.fromhex("046681e5e0cb199a48f8d37a2806264c")
    assert aes.mix_columns(before) == after
    assert aes.inv_mix_columns(after) == before


@given(col=block)
def test_inv_mix_columns_undoes_mix_columns(col):
    assert aes.inv_mix_columns(aes.mix_columns(col)) == col


def test_batched_path_matches_single_block(rng):
    ks = aes.expand_key(rng.bytes(16))
    data = rng.bytes(16 * 37)
    ct = aes.encrypt_blocks(data, ks)
    assert ct == b"".join(aes.encrypt_block(data[i : i + 16], ks) for i in range(0, len(data), 16))
    assert aes.decrypt_blocks(ct, ks) == data
    assert aes.encrypt_blocks(b"", ks) == b""


def test_batched_rejects_partial_block():
    with pytest.raises(ValueError):
        aes.encrypt_blocks(bytes(17), aes.expand_key(bytes(16)))


@pytest.mark.parametrize("size", [0, 15, 17, 24, 32])
def test_other_key_sizes_rejected(size):
    with pytest.raises(ValueError):
        aes.AesKey128(bytes(size))
    with pytest.raises(ValueError):
        aes.expand_key(bytes(size))


def test_key_from_hex():
    assert aes.AesKey128.from_hex("000102030405060708090a0b0c0d0e0f").key == FIPS_KEY
    for bad in ("00", "zz0102030405060708090a0b0c0d0e0f", "000102030405060708090a0b0c0d0e0f00"):
        with pytest.raises(ValueError):
            aes.AesKey128.from_hex(bad)
    assert "00010203" not in repr(aes.AesKey128(FIPS_KEY))


def test_wrong_block_length_rejected():
    ks = aes.expand_key(FIPS_KEY)
    with pytest.raises(ValueError):
        aes.encrypt_block(bytes(15), ks)
    with pytest.raises(ValueError):
        aes.decrypt_block(bytes(17), ks)


@settings(max_examples=100)
@given(key=block, data=st.binary(max_size=16 * 40).map(lambda b: b[: len(b) // 16 * 16]))
def test_batched_path_matches_reference_library(key, data):
    ks = aes.expand_key(key)
    ct = aes.encrypt_blocks(data, ks)
    assert ct == oracles.aes_ecb_encrypt(key, data)
    assert aes.decrypt_blocks(ct, ks) == data
