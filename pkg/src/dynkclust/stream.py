"""Update-stream files.

An optional ``matrix <n>`` header followed by ``n`` rows of distances puts the
stream in matrix mode; otherwise points carry coordinates. Event lines are
``insert <id> <weight> [coords...]`` and ``delete <id>``. Blank lines and
anything after ``#`` are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import ParseError
from .metric import WeightedMetricSpace


@dataclass(frozen=True)
class Event:
    op: str
    id: int
    weight: float = 1.0
    coords: tuple[float, ...] = ()
    line: int = 0


@dataclass
class Stream:
    events: list[Event]
    matrix: list[list[float]] | None = None

    def new_space(self, metric: str = "euclidean") -> WeightedMetricSpace:
        if self.matrix is not None:
            return WeightedMetricSpace.from_matrix(self.matrix)
        return WeightedMetricSpace(metric)


def _int(tok: str, what: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r}", line) from None


def _float(tok: str, what: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r}", line) from None


def parse_lines(lines: Iterable[str]) -> Stream:
    rows = [(no, raw.split("#", 1)[0].split()) for no, raw in enumerate(lines, 1)]
    rows = [(no, toks) for no, toks in rows if toks]
    matrix = None
    pos = 0
    if rows and rows[0][1][0] == "matrix":
        no, toks = rows[0]
        if len(toks) != 2:
            raise ParseError("expected 'matrix <n>'", no)
        n = _int(toks[1], "matrix size", no)
        if n < 1:
            raise ParseError("matrix size must be positive", no)
        body = rows[1:1 + n]
        if len(body) < n:
            raise ParseError(f"matrix needs {n} rows, found {len(body)}", no)
        matrix = []
        for rno, toks in body:
            if len(toks) != n:
                raise ParseError(f"matrix row has {len(toks)} entries, expected {n}", rno)
            matrix.append([_float(t, "distance", rno) for t in toks])
        pos = 1 + n

    events = []
    for no, toks in rows[pos:]:
        op = toks[0]
        if op == "insert":
            if len(toks) < 3:
                raise ParseError("expected 'insert <id> <weight> [coords...]'", no)
            coords = tuple(_float(t, "coordinate", no) for t in toks[3:])
            if matrix is not None and coords:
                raise ParseError("matrix streams take no coordinates", no)
            if matrix is None and not coords:
                raise ParseError("insert needs coordinates without a matrix header", no)
            events.append(Event("insert", _int(toks[1], "id", no),
                                _float(toks[2], "weight", no), coords, no))
        elif op == "delete":
            if len(toks) != 2:
                raise ParseError("expected 'delete <id>'", no)
            events.append(Event("delete", _int(toks[1], "id", no), line=no))
        elif op == "matrix":
            raise ParseError("matrix header must come first", no)
        else:
            raise ParseError(f"unknown operation {op!r}", no)
    return Stream(events, matrix)


def parse_stream(path: str | Path) -> Stream:
    with open(path, encoding="utf-8") as fh:
        return parse_lines(fh)


def format_stream(stream: Stream) -> str:
    out = []
    if stream.matrix is not None:
        out.append(f"matrix {len(stream.matrix)}")
        out.extend(" ".join(repr(v) for v in row) for row in stream.matrix)
    for ev in stream.events:
        if ev.op == "insert":
            out.append(" ".join(["insert", str(ev.id), repr(ev.weight), *map(repr, ev.coords)]))
        else:
            out.append(f"delete {ev.id}")
    return "\n".join(out) + "\n"
