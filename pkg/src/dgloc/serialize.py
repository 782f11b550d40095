"""JSON forms of complexes (``.cplx.json``) and suite reports (``.report.json``).

Scalars are written as exact strings (``"-3/7"``, ``"2 mod 5"``).  Reports
are dumped with sorted keys so two runs differ only in ``timestamp``.
"""

from __future__ import annotations

import datetime as _dt
import json
from typing import Mapping

from . import __version__
from .complexes import ChainComplex, ChainMap
from .fields import Field
from .linalg import zeros

COMPLEX_SCHEMA = "dgloc.complexes/1"
REPORT_SCHEMA = 1


def _matrix_out(field: Field, m) -> list[list[str]]:
    return [[field.format(m[i, j]) for j in range(m.shape[1])] for i in range(m.shape[0])]


def _matrix_in(field: Field, rows: list, shape: tuple[int, int]):
    m = zeros(field, *shape)
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise ValueError(f"matrix does not have shape {shape}")
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            m[i, j] = field.parse(x)
    return m


def complex_to_dict(X: ChainComplex) -> dict:
    return {
        "ranks": {str(n): r for n, r in sorted(X.ranks.items())},
        "d": {str(n): _matrix_out(X.field, m) for n, m in sorted(X.diffs.items())},
    }


def complex_from_dict(field: Field, data: Mapping) -> ChainComplex:
    ranks = {int(n): int(r) for n, r in data.get("ranks", {}).items()}
    diffs = {int(n): _matrix_in(field, rows, (ranks.get(int(n) - 1, 0), ranks.get(int(n), 0)))
             for n, rows in data.get("d", {}).items()}
    return ChainComplex(field, ranks, diffs)


def map_to_dict(f: ChainMap, source: str, target: str) -> dict:
    return {"source": source, "target": target, "degree": f.degree,
            "blocks": {str(n): _matrix_out(f.field, m) for n, m in sorted(f.blocks.items())}}


def complexes_to_json(complexes: Mapping[str, ChainComplex], maps: Mapping[str, tuple[ChainMap, str, str]] | None = None) -> dict:
    """``maps`` sends a name to ``(map, source name, target name)``."""
    field = next(iter(complexes.values())).field
    return {
        "schema": COMPLEX_SCHEMA,
        "field": field.name,
        "complexes": {k: complex_to_dict(X) for k, X in complexes.items()},
        "maps": {k: map_to_dict(f, s, t) for k, (f, s, t) in (maps or {}).items()},
    }


def complexes_from_json(data: Mapping) -> tuple[dict[str, ChainComplex], dict[str, ChainMap]]:
    if data.get("schema") != COMPLEX_SCHEMA:
        raise ValueError(f"expected schema {COMPLEX_SCHEMA!r}")
    field = Field.from_name(data["field"])
    cx = {k: complex_from_dict(field, v) for k, v in data["complexes"].items()}
    maps = {}
    for k, m in data.get("maps", {}).items():
        X, Y = cx[m["source"]], cx[m["target"]]
        r = int(m["degree"])
        blocks = {int(n): _matrix_in(field, rows, (Y.rank(int(n) + r), X.rank(int(n))))
                  for n, rows in m["blocks"].items()}
        maps[k] = ChainMap(X, Y, r, blocks)
    return cx, maps


def make_report(command: str, config: Mapping, records: list[dict], timestamp: str | None = None) -> dict:
    passed = sum(r["status"] == "pass" for r in records)
    return {
        "schema_version": REPORT_SCHEMA,
        "tool": {"name": "dgloc", "version": __version__},
        "command": command,
        "config": dict(config),
        "summary": {"total": len(records), "passed": passed, "failed": len(records) - passed,
                    "ok": passed == len(records)},
        "records": records,
        "timestamp": timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"
