"""Newline-delimited JSON candidate files and the per-step CSV report."""
from __future__ import annotations

import csv
import json
import math
import os
from typing import Iterable, TextIO

from .core import InputError, ItemCandidate, RerankReport
from .preprocess import RawPool

REPORT_COLUMNS = ("step", "chosen_id", "quality_term", "diversity_term", "log_volume")


def _parse_record(line: str, lineno: int) -> dict:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {lineno}: malformed JSON ({exc.msg})") from None
    if not isinstance(rec, dict):
        raise InputError(f"line {lineno}: expected a JSON object")
    for key in ("id", "quality", "embedding"):
        if key not in rec:
            raise InputError(f"line {lineno}: missing field {key!r}")
    if not isinstance(rec["id"], str):
        raise InputError(f"line {lineno}: id must be a string")
    if isinstance(rec["quality"], bool) or not isinstance(rec["quality"], (int, float)):
        raise InputError(f"line {lineno}: quality must be a number")
    emb = rec["embedding"]
    if not isinstance(emb, list) or not emb or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in emb):
        raise InputError(f"line {lineno}: embedding must be a non-empty array of numbers")
    if not all(math.isfinite(x) for x in emb) or not math.isfinite(rec["quality"]):
        raise InputError(f"line {lineno}: non-finite number")
    tax = rec.get("taxonomy")
    if tax is not None and not isinstance(tax, str):
        raise InputError(f"line {lineno}: taxonomy must be a string")
    blocked = rec.get("blocked", False)
    if not isinstance(blocked, bool):
        raise InputError(f"line {lineno}: blocked must be a boolean")
    return rec


def read_candidates(stream: Iterable[str]) -> RawPool:
    items, seen, dim = [], {}, None
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        rec = _parse_record(line, lineno)
        emb = rec["embedding"]
        if dim is None:
            dim = len(emb)
        elif len(emb) != dim:
            raise InputError(f"line {lineno}: embedding length {len(emb)} differs from {dim} on earlier lines")
        if rec["id"] in seen:
            raise InputError(f"line {lineno}: duplicate id {rec['id']!r} (first on line {seen[rec['id']]})")
        seen[rec["id"]] = lineno
        items.append(ItemCandidate(rec["id"], float(rec["quality"]), [float(x) for x in emb],
                                   rec.get("taxonomy"), rec.get("blocked", False)))
    if not items:
        raise InputError("candidate file is empty")
    return RawPool(items)


def load_candidates(path: str | os.PathLike) -> RawPool:
    try:
        with open(path, encoding="utf-8") as fh:
            return read_candidates(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not valid UTF-8") from None


def candidate_record(item: ItemCandidate) -> dict:
    rec = {"id": item.id, "quality": item.quality, "embedding": item.raw_embedding.tolist()}
    if item.taxonomy is not None:
        rec["taxonomy"] = item.taxonomy
    if item.blocked:
        rec["blocked"] = True
    return rec


def write_candidates(items: Iterable[ItemCandidate], stream: TextIO) -> None:
    for item in items:
        stream.write(json.dumps(candidate_record(item)) + "\n")


def save_candidates(items: Iterable[ItemCandidate], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_candidates(items, fh)


def write_sequence(ids: Iterable[str], stream: TextIO) -> None:
    for i in ids:
        stream.write(f"{i}\n")


def write_step_report(report: RerankReport, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for s in report.per_step:
        writer.writerow([s.step, s.item_id, repr(s.quality_term), repr(s.diversity_term), repr(s.log_volume)])
