"""JSON poset/rule documents and deterministic output formatting.

A document looks like::

    {
      "levels": [["b"], ["l", "r"], ["a", "m", "c"]],
      "min_rank": 0,
      "covers": [["b", "l"], ...],
      "up_rule": [{"from": "b", "to": "l", "p": "7/10"}, ...],
      "down_rule": [{"from": "l", "to": "b", "p": 1}, ...],
      "sequence": [{"b": 1}, {"l": "7/10", "r": "3/10"}, ...]
    }

Only ``levels`` is required.  ``min_rank`` defaults to 0.  When ``covers``
is absent the cover relation is the union of the up-rule edges and the
reversed down-rule edges.  Probabilities may be numbers, decimal strings or
``"a/b"`` rational strings.
"""

from __future__ import annotations

import io
import json
import math
from fractions import Fraction
from pathlib import Path

from .errors import PosetChainError
from .poset import Direction, FinitePoset, TransitionRule, build_finite_poset


class DocumentError(PosetChainError):
    """Malformed poset/rule document."""


def parse_probability(p) -> float:
    if isinstance(p, bool):
        raise DocumentError(f"bad probability {p!r}")
    if isinstance(p, (int, float)):
        return float(p)
    if isinstance(p, str):
        try:
            return float(Fraction(p.strip()))
        except (ValueError, ZeroDivisionError):
            raise DocumentError(f"bad probability {p!r}") from None
    raise DocumentError(f"bad probability {p!r}")


def _entries(doc, field):
    out = []
    for item in doc.get(field) or []:
        try:
            out.append((str(item["from"]), str(item["to"]), parse_probability(item["p"])))
        except (KeyError, TypeError):
            raise DocumentError(f"{field} entries need from/to/p, got {item!r}") from None
    return out


def poset_from_document(doc: dict):
    """Returns ``(poset, up_rule_or_None, down_rule_or_None)``."""
    if not isinstance(doc, dict) or "levels" not in doc:
        raise DocumentError("document must be an object with a 'levels' field")
    levels = doc["levels"]
    if not isinstance(levels, list) or not all(isinstance(lv, list) for lv in levels):
        raise DocumentError("'levels' must be an array of arrays of labels")
    levels = [[str(x) for x in lv] for lv in levels]
    up_entries = _entries(doc, "up_rule")
    down_entries = _entries(doc, "down_rule")
    if "covers" in doc:
        covers = [(str(a), str(b)) for a, b in doc["covers"]]
    else:
        seen = {}
        for a, b, _ in up_entries:
            seen[(a, b)] = None
        for a, b, _ in down_entries:
            seen[(b, a)] = None
        covers = list(seen)
    poset = build_finite_poset(levels, covers, min_rank=int(doc.get("min_rank", 0)))
    up = TransitionRule.from_entries(poset, Direction.UP, up_entries) if "up_rule" in doc else None
    down = (
        TransitionRule.from_entries(poset, Direction.DOWN, down_entries) if "down_rule" in doc else None
    )
    return poset, up, down


def load_document(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def rule_entries(rule: TransitionRule) -> list[dict]:
    P = rule.poset
    out = []
    for u in sorted(rule.table, key=P.sort_key):
        for v, p in sorted(rule.table[u], key=lambda vp: P.sort_key(vp[0])):
            out.append({"from": P.labels[u], "to": P.labels[v], "p": p})
    return out


def poset_to_document(poset: FinitePoset, up=None, down=None, sequence=None) -> dict:
    doc = {
        "levels": [poset.level_labels(r) for r in poset.ranks],
        "min_rank": poset.min_rank,
        "covers": [
            [poset.labels[u], poset.labels[v]]
            for u, v in sorted(poset.covers(), key=lambda uv: (poset.sort_key(uv[0]), poset.sort_key(uv[1])))
        ],
    }
    if up is not None:
        doc["up_rule"] = rule_entries(up)
    if down is not None:
        doc["down_rule"] = rule_entries(down)
    if sequence is not None:
        doc["sequence"] = [d.to_dict() for d in sequence]
    return doc


def fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite float in output")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def dumps(obj, indent: int = 2) -> str:
    """JSON with sorted keys and floats fixed at 17 significant digits."""
    buf = io.StringIO()
    _write(buf, obj, indent, 0)
    buf.write("\n")
    return buf.getvalue()


def _write(buf, obj, indent, depth):
    pad = " " * (indent * (depth + 1))
    end = " " * (indent * depth)
    if isinstance(obj, bool) or obj is None:
        buf.write(json.dumps(obj))
    elif isinstance(obj, int):
        buf.write(str(obj))
    elif isinstance(obj, float):
        buf.write(fmt_float(obj))
    elif isinstance(obj, str):
        buf.write(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            buf.write("{}")
            return
        buf.write("{\n")
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        for k, (key, val) in enumerate(items):
            buf.write(pad + json.dumps(str(key)) + ": ")
            _write(buf, val, indent, depth + 1)
            buf.write(",\n" if k < len(items) - 1 else "\n")
        buf.write(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            buf.write("[]")
            return
        buf.write("[\n")
        for k, val in enumerate(obj):
            buf.write(pad)
            _write(buf, val, indent, depth + 1)
            buf.write(",\n" if k < len(obj) - 1 else "\n")
        buf.write(end + "]")
    elif hasattr(obj, "item"):
        _write(buf, obj.item(), indent, depth)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_csv(rows, header, out=None) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is not None:
        Path(out).write_text(text)
    return text
