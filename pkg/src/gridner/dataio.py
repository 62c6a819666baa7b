"""JSONL record formats and span-to-token-index mapping.

One record per line, UTF-8, ids mandatory.  Classification records are
{"id","text","label"}; annotated records add "entities" with codepoint
character spans; prediction lines are {"id","prob"}.
"""

from __future__ import annotations

import json

from .ensemble import LabeledDataset, Record
from .errors import DataError
from .grid import EntityMention
from .textnorm import Token

__all__ = [
    "read_jsonl",
    "write_jsonl",
    "load_labeled_dataset",
    "dataset_to_lines",
    "load_predictions",
    "spans_to_token_indices",
    "entities_from_record",
    "mentions_to_obj",
    "mentions_from_obj",
]


def read_jsonl(path):
    """Yield (line_number, parsed_object) for every non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            if not isinstance(obj, dict):
                raise DataError("record is not a JSON object", line=lineno)
            yield lineno, obj


def write_jsonl(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, ensure_ascii=False))
            fh.write("\n")


def _require(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise DataError(f"record missing {key!r} field", line=lineno)
    return obj[key]


def load_labeled_dataset(path, require_label: bool = True) -> LabeledDataset:
    """Read {"id","text","label"} lines; label may be omitted (scored later)."""
    records = []
    for lineno, obj in read_jsonl(path):
        rid = str(_require(obj, "id", lineno))
        text = str(_require(obj, "text", lineno))
        if require_label:
            label = _require(obj, "label", lineno)
            if label not in (0, 1):
                raise DataError(f"label must be 0 or 1, got {label!r}", record_id=rid)
        else:
            label = obj.get("label", 0)
        records.append(Record(rid, text, label))
    return LabeledDataset(records)


def dataset_to_lines(ds: LabeledDataset):
    for rec in ds.records:
        yield {"id": rec.id, "text": rec.text, "label": rec.label}


def load_predictions(path) -> dict[str, float]:
    """Read {"id","prob"} lines into an id -> probability map."""
    probs: dict[str, float] = {}
    for lineno, obj in read_jsonl(path):
        rid = str(_require(obj, "id", lineno))
        prob = _require(obj, "prob", lineno)
        if rid in probs:
            raise DataError("duplicate prediction id", record_id=rid)
        probs[rid] = float(prob)
    return probs


def spans_to_token_indices(tokens: list[Token], spans, record_id=None) -> list[int]:
    """Map character spans onto token indices.

    Every token overlapping a span must lie entirely inside it; a span
    boundary that cuts through a token is a data error.
    """
    indices: set[int] = set()
    for span in spans:
        if len(span) != 2 or span[0] >= span[1]:
            raise DataError(f"bad span {span!r}", record_id=record_id)
        start, end = span
        covered = False
        for i, tok in enumerate(tokens):
            if tok.end <= start or tok.start >= end:
                continue
            if tok.start < start or tok.end > end:
                raise DataError(
                    f"span [{start}, {end}) cuts token {tok.surface!r} "
                    f"at [{tok.start}, {tok.end})",
                    record_id=record_id,
                )
            indices.add(i)
            covered = True
        if not covered:
            raise DataError(f"span [{start}, {end}) covers no token", record_id=record_id)
    return sorted(indices)


def entities_from_record(obj: dict, tokens: list[Token], lineno: int) -> list[EntityMention]:
    """Parse the annotated-record "entities" list into token-index mentions."""
    rid = str(obj.get("id", lineno))
    mentions = []
    for ent in obj.get("entities", ()):
        if "type" not in ent or "spans" not in ent:
            raise DataError("entity needs 'type' and 'spans'", record_id=rid)
        indices = spans_to_token_indices(tokens, ent["spans"], record_id=rid)
        mentions.append(EntityMention(str(ent["type"]), indices))
    return mentions


def mentions_to_obj(mentions) -> list[dict]:
    return [
        {"type": m.type_label, "token_indices": list(m.token_indices)}
        for m in mentions
    ]


def mentions_from_obj(entities, record_id=None) -> list[EntityMention]:
    mentions = []
    for ent in entities:
        if "type" not in ent or "token_indices" not in ent:
            raise DataError(
                "entity needs 'type' and 'token_indices'", record_id=record_id
            )
        mentions.append(EntityMention(str(ent["type"]), ent["token_indices"]))
    return mentions
