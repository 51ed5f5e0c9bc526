"""JSON reading and writing of structures.

Document layout::

    {"signature": [{"name": "E", "arity": 2}],
     "universe": ["0", "1"],
     "kind": "crisp",
     "relations": {"E": [["0", "1"], ["1", "0"]]}}

Valued relations are ``{"default": v, "entries": [{"tuple": [...], "value": v}]}``
with values written as ``"p/q"``, integer strings or ``"inf"``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from ..errors import ValidationError
from .ext import format_value, parse_value
from .structure import CRISP, VALUED, Signature, Structure, ValuedRelation, element_name


def _value(v):
    if isinstance(v, bool):
        raise ValidationError(f"bad value {v!r}")
    if isinstance(v, int):
        return parse_value(str(v))
    if not isinstance(v, str):
        raise ValidationError(f"values must be strings or integers, got {v!r}")
    try:
        return parse_value(v)
    except ValueError as e:
        raise ValidationError(str(e)) from None


def structure_from_dict(doc: dict, allow_empty: bool = False) -> Structure:
    try:
        sig = Signature(tuple((s["name"], s["arity"]) for s in doc["signature"]))
        universe = [str(a) for a in doc["universe"]]
        kind = doc["kind"]
        rels_doc = doc["relations"]
    except (KeyError, TypeError) as e:
        raise ValidationError(f"malformed structure document: {e}") from None
    if kind not in (CRISP, VALUED):
        raise ValidationError(f"unknown kind {kind!r}")
    if set(rels_doc) != set(sig.names):
        raise ValidationError("relations do not match the signature")
    rels = {}
    for name in sig.names:
        body = rels_doc[name]
        if kind == CRISP:
            if not isinstance(body, list):
                raise ValidationError(f"crisp relation {name} must be a list of tuples")
            tuples = [tuple(str(a) for a in t) for t in body]
            if len(set(tuples)) != len(tuples):
                raise ValidationError(f"relation {name} repeats a tuple")
            rels[name] = tuples
        else:
            if not isinstance(body, dict) or "default" not in body:
                raise ValidationError(f"valued relation {name} needs a default")
            entries = {}
            for e in body.get("entries", []):
                t = tuple(str(a) for a in e["tuple"])
                if t in entries:
                    raise ValidationError(f"relation {name} repeats tuple {t}")
                entries[t] = _value(e["value"])
            rels[name] = ValuedRelation(_value(body["default"]), entries)
    return Structure(sig, tuple(universe), kind, rels, allow_empty)


def load_structure(source: Union[str, Path, dict], allow_empty: bool = False) -> Structure:
    """Load from a path, a JSON string, or an already parsed document."""
    if isinstance(source, dict):
        return structure_from_dict(source, allow_empty)
    text = str(source)
    if isinstance(source, Path) or not text.lstrip().startswith("{"):
        text = Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"not JSON: {e}") from None
    return structure_from_dict(doc, allow_empty)


def structure_to_dict(A: Structure) -> dict:
    name = element_name
    doc = {
        "signature": [{"name": n, "arity": r} for n, r in A.signature],
        "universe": [name(a) for a in A.universe],
        "kind": A.kind,
        "relations": {},
    }
    for n in A.signature.names:
        if A.kind == CRISP:
            doc["relations"][n] = [[name(a) for a in t] for t in A.tuples(n)]
        else:
            rel = A.relations[n]
            entries = sorted(rel.entries.items(), key=lambda kv: A.tuple_key(kv[0]))
            doc["relations"][n] = {
                "default": format_value(rel.default),
                "entries": [{"tuple": [name(a) for a in t], "value": format_value(v)} for t, v in entries],
            }
    return doc


def dump_structure(A: Structure) -> str:
    return json.dumps(structure_to_dict(A), indent=1, sort_keys=False)
