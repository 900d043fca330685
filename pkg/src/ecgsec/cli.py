"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 data/format error, 3 crypto error.
Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import aes, benchmark
from .ecg_data import DEFAULT_N, TRAIN, load_dataset, load_record, read_manifest
from .enrollment import enroll, load_model, save_model
from .errors import DataError, EcgSecError
from .identification import evaluate, identify
from .pipeline import ECB_WARNING, EncryptedContainer, decrypt_bytes, encrypt_bytes, secure_identify

PROG = "ecgsec"
KEY_ENV = "ECGSEC_KEY"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CRYPTO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _key(args) -> aes.AesKey128:
    text = args.key if args.key is not None else os.environ.get(KEY_ENV)
    if not text:
        raise UsageError(f"no key given; pass --key HEX32 or set {KEY_ENV}")
    try:
        return aes.AesKey128.from_hex(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise DataError("IO_ERROR", f"{path}: {exc.strerror or exc}") from None


def _write(path, data) -> None:
    try:
        if isinstance(data, bytes):
            Path(path).write_bytes(data)
        else:
            Path(path).write_text(data, encoding="utf-8")
    except OSError as exc:
        raise DataError("IO_ERROR", f"{path}: {exc.strerror or exc}") from None


def _print_match(result, top=3):
    print(f"predicted_id {result.subject_id}")
    print(f"distance_sq {result.distance_sq!r}")
    for rank, (idx, d) in enumerate(result.ranking[:top], start=1):
        print(f"rank {rank} gallery_index {idx} distance_sq {d!r}")


def cmd_enroll(args):
    data = load_dataset(read_manifest(args.manifest), n=args.n)
    model = enroll(data.train, threshold=args.threshold)
    save_model(model, args.out)
    print(f"enrolled k={model.k} n={model.n} m_feat={model.m_feat} -> {args.out}")


def cmd_identify(args):
    model = load_model(args.model)
    probe = load_record(args.probe, None, n=model.n)
    result = identify(model, probe)
    _print_match(result)
    if args.manifest:
        train_paths = [e.path for e in read_manifest(args.manifest).entries if e.split == TRAIN]
        print(f"probe_path {args.probe}")
        if result.gallery_index < len(train_paths):
            print(f"identified_path {train_paths[result.gallery_index]}")
        same = [p for p, sid in zip(train_paths, model.subject_ids) if sid == result.subject_id]
        if same:
            print(f"subject_first_training_path {same[0]}")


def cmd_evaluate(args):
    model = load_model(args.model)
    data = load_dataset(read_manifest(args.manifest), n=model.n)
    report = evaluate(model, data.test, threads=args.threads)
    if args.report:
        try:
            with open(args.report, "w", newline="", encoding="utf-8") as fh:
                report.write_csv(fh)
        except OSError as exc:
            raise DataError("IO_ERROR", f"{args.report}: {exc.strerror or exc}") from None
    else:
        report.write_csv(sys.stdout)
    print(report.summary())


def cmd_encrypt(args):
    key = _key(args)
    print(ECB_WARNING, file=sys.stderr)
    _write(args.out, encrypt_bytes(_read_bytes(args.inp), key).to_bytes())


def cmd_decrypt(args):
    key = _key(args)
    _write(args.out, decrypt_bytes(_read_bytes(args.inp), key))


def cmd_secure_identify(args):
    key = _key(args)
    model = load_model(args.model)
    _print_match(secure_identify(EncryptedContainer.from_bytes(_read_bytes(args.inp)), key, model))


def cmd_bench(args):
    model = load_model(args.model) if args.model else None
    try:
        report = benchmark.bench(args.op, args.iters, warmup=args.warmup, model=model)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(report.format())
    if args.csv:
        row = report.as_dict()
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
            w.writeheader()
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="AES-128 protection and eigen-ECG identification of ECG records.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enroll", help="build a model from the TRAIN records of a manifest")
    s.add_argument("--manifest", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--threshold", type=float, default=1.0, help="drop eigenpairs below this eigenvalue")
    s.add_argument("--n", type=int, default=DEFAULT_N, help="samples per record")
    s.set_defaults(func=cmd_enroll)

    s = sub.add_parser("identify", help="identify one probe record")
    s.add_argument("--model", required=True)
    s.add_argument("--probe", required=True)
    s.add_argument("--manifest", help="enrollment manifest, to print training file paths")
    s.set_defaults(func=cmd_identify)

    s = sub.add_parser("evaluate", help="recognition rate over the TEST records of a manifest")
    s.add_argument("--model", required=True)
    s.add_argument("--manifest", required=True)
    s.add_argument("--report", help="CSV output path (default: stdout)")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_evaluate)

    for name, func, helptext in (
        ("encrypt", cmd_encrypt, "encrypt a file into an ECGS container"),
        ("decrypt", cmd_decrypt, "decrypt an ECGS container"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--key", help=f"32 hex characters (default: ${KEY_ENV})")
        s.add_argument("--in", dest="inp", required=True)
        s.add_argument("--out", required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("secure-identify", help="decrypt a container holding one record and identify it")
    s.add_argument("--key", help=f"32 hex characters (default: ${KEY_ENV})")
    s.add_argument("--model", required=True)
    s.add_argument("--in", dest="inp", required=True)
    s.set_defaults(func=cmd_secure_identify)

    s = sub.add_parser("bench", help="time one block operation")
    s.add_argument("--op", choices=benchmark.OPS, required=True)
    s.add_argument("--iters", type=int, default=10000)
    s.add_argument("--warmup", type=int, default=benchmark.DEFAULT_WARMUP)
    s.add_argument("--model", help="model for --op identify (default: synthetic)")
    s.add_argument("--csv", help="write the report as CSV")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EcgSecError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return exc.exit_status
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
