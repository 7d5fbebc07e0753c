"""Plain-text file formats: edge lists, DRN node sidecars, CSV summary rows."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .graph_core import Graph


class FormatError(ValueError):
    pass


def _fmt_float(x: float) -> str:
    if float(x).is_integer():
        return str(int(x)) if abs(x) < 1e15 else repr(float(x))
    return repr(float(x))


def dumps_edgelist(g: Graph) -> str:
    lines = [f"n={g.n}"]
    lines += [f"{u} {v} {_fmt_float(c)}" for (u, v), c in zip(g.edges, g.capacities)]
    return "\n".join(lines) + "\n"


def loads_edgelist(text: str) -> Graph:
    """Parse ``n=<count>`` followed by ``u v capacity`` lines.

    Blank lines and ``#`` comments are ignored; the capacity column may be
    omitted (defaults to 1).
    """
    n = None
    edges, caps = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            if not line.startswith("n="):
                raise FormatError(f"line {lineno}: expected header 'n=<count>'")
            try:
                n = int(line[2:])
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad node count {line[2:]!r}") from exc
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"line {lineno}: expected 'u v capacity', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            c = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        edges.append((u, v))
        caps.append(c)
    if n is None:
        raise FormatError("missing header 'n=<count>'")
    try:
        return Graph.from_edges(n, edges, caps)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def write_edgelist(g: Graph, path: str | Path) -> None:
    Path(path).write_text(dumps_edgelist(g))


def read_edgelist(path: str | Path) -> Graph:
    return loads_edgelist(Path(path).read_text())


def dumps_sidecar(positions: np.ndarray, in_vl: np.ndarray) -> str:
    rows = [
        f"{i} {float(x)!r} {float(y)!r} {int(bool(b))}"
        for i, ((x, y), b) in enumerate(zip(positions, in_vl))
    ]
    return "\n".join(rows) + "\n"


def loads_sidecar(text: str) -> tuple[np.ndarray, np.ndarray]:
    pos, vl = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4 or int(parts[0]) != len(pos) or parts[3] not in ("0", "1"):
            raise FormatError(f"line {lineno}: expected 'index x y inVL(0|1)', got {raw!r}")
        pos.append((float(parts[1]), float(parts[2])))
        vl.append(parts[3] == "1")
    return np.array(pos, dtype=float).reshape(-1, 2), np.array(vl, dtype=bool)


def to_jsonable(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, Mapping):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)


def dumps_csv(rows: Iterable[Mapping], fields: list[str] | None = None) -> str:
    rows = list(rows)
    if fields is None:
        fields = []
        for row in rows:
            fields += [k for k in row if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: to_jsonable(v) for k, v in row.items()})
    return buf.getvalue()
