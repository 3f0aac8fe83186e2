"""Delimited-text readers and writers for recordings, manifests and feature tables."""
from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nldmarkers.stats import FeatureRow, FeatureTable

__all__ = [
    "ManifestEntry",
    "Manifest",
    "ManifestError",
    "read_frame",
    "write_frame",
    "read_manifest",
    "read_feature_table",
    "sha256_file",
    "FEATURE_COLUMNS",
]

FEATURE_COLUMNS = ("Subject", "Session", "S", "H", "D", "Age", "Driving Experience")


class ManifestError(ValueError):
    pass


def _delimiter(header: str) -> str | None:
    if "\t" in header:
        return "\t"
    if "," in header:
        return ","
    if ";" in header:
        return ";"
    return None  # whitespace


def _data_lines(path: Path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [ln for ln in fh.read().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_frame(path) -> dict[str, np.ndarray]:
    """Read a recording: first row holds channel names, one column per channel."""
    lines = _data_lines(Path(path))
    if not lines:
        raise ValueError(f"{path}: empty recording")
    delim = _delimiter(lines[0])
    names = [n.strip() for n in (lines[0].split(delim) if delim else lines[0].split())]
    if len(set(names)) != len(names) or any(not n for n in names):
        raise ValueError(f"{path}: channel names must be unique and non-empty")
    if len(lines) < 2:
        raise ValueError(f"{path}: no samples after the header")
    try:
        data = np.loadtxt(lines[1:], delimiter=delim, dtype=float, ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{path}: cannot parse samples ({exc})") from None
    if data.shape[1] != len(names):
        raise ValueError(f"{path}: {len(names)} channel names but {data.shape[1]} columns")
    return {name: data[:, i] for i, name in enumerate(names)}


def write_frame(path, frame: dict[str, np.ndarray], header_lines=()) -> None:
    names = list(frame)
    cols = np.column_stack([np.asarray(frame[n], dtype=float) for n in names])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for row in cols:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class ManifestEntry:
    file_path: Path
    subject_id: int
    session_label: str
    age: float
    experience: float
    channel: str = "F4"


@dataclass(frozen=True)
class Manifest:
    entries: list[ManifestEntry]

    def __post_init__(self):
        keys = [(e.subject_id, e.session_label) for e in self.entries]
        dup = {k for k in keys if keys.count(k) > 1}
        if dup:
            raise ManifestError(f"duplicate (subject_id, session_label) entries: {sorted(dup)}")


_REQUIRED = ("file_path", "subject_id", "session_label", "age", "experience")


def read_manifest(path, default_channel: str = "F4") -> Manifest:
    """CSV manifest; relative ``file_path`` values resolve against the manifest's directory."""
    path = Path(path)
    base = path.parent
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(ln for ln in fh if not ln.lstrip().startswith("#"))
        missing = [c for c in _REQUIRED if c not in (reader.fieldnames or [])]
        if reader.fieldnames is None:
            return Manifest([])
        if missing:
            raise ManifestError(f"{path}: missing manifest columns {missing}")
        entries = []
        for lineno, row in enumerate(reader, start=2):
            try:
                fp = Path(row["file_path"].strip())
                entries.append(ManifestEntry(
                    fp if fp.is_absolute() else base / fp,
                    int(row["subject_id"]),
                    row["session_label"].strip(),
                    float(row["age"]),
                    float(row["experience"]),
                    (row.get("channel") or "").strip() or default_channel,
                ))
            except (TypeError, ValueError) as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from None
    return Manifest(entries)


def read_feature_table(path) -> FeatureTable:
    """Read ``features.csv`` or ``features_full.csv`` (extra columns are ignored)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(ln for ln in fh if not ln.lstrip().startswith("#"))
        missing = [c for c in FEATURE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        rows = [
            FeatureRow(int(r["Subject"]), r["Session"], float(r["S"]), float(r["H"]), float(r["D"]),
                       float(r["Age"]), float(r["Driving Experience"]))
            for r in reader
        ]
    return FeatureTable(rows)
