"""AES-128 protection and eigen-ECG subject identification for ECG records."""

from .aes import AesKey128, KeySchedule, decrypt_block, encrypt_block, expand_key
from .benchmark import BenchReport, bench
from .ecg_data import (
    Dataset,
    EcgRecord,
    Manifest,
    deserialize_record,
    load_dataset,
    load_record,
    serialize_record,
)
from .enrollment import EnrollmentModel, enroll, load_model, save_model
from .errors import CryptoError, DataError, EcgSecError
from .identification import MatchResult, distance_sq, evaluate, identify, project
from .pipeline import EncryptedContainer, decrypt_bytes, encrypt_bytes, secure_identify

__version__ = "0.1.0"
