"""Text formats: ``.hgs`` update streams and ``.hgw`` weighted sparsifiers.

Stream::

    H n=<n> r=<r> k=<k>
    + 0 3 5
    - 0 3 5      # comments run to end of line

Sparsifier::

    W n=<n>
    4 0 3 5
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

from .core import MAX_ARITY, MAX_VERTICES, StreamUpdate, WeightedHypergraph, make_edge
from .errors import InvalidEdge, MalformedInput

_FIELD = re.compile(r"^(\w+)=(\d+)$")


@dataclass(frozen=True)
class StreamHeader:
    n: int
    r: int
    k: int = 0


def _content(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_header(text: str, tag: str, required: tuple, lineno: int) -> dict:
    parts = text.split()
    if not parts or parts[0] != tag:
        raise MalformedInput(f"expected header starting with {tag!r}", lineno)
    out = {}
    for p in parts[1:]:
        m = _FIELD.match(p)
        if not m:
            raise MalformedInput(f"bad header field {p!r}", lineno)
        out[m.group(1)] = int(m.group(2))
    missing = [f for f in required if f not in out]
    if missing:
        raise MalformedInput(f"header lacks {', '.join(missing)}", lineno)
    return out


def _first_content(lines: Iterator[tuple[int, str]]):
    for lineno, raw in lines:
        text = _content(raw)
        if text:
            return lineno, text
    raise MalformedInput("empty input: no header", 1)


class LabelMap:
    """Assigns dense ids to opaque vertex labels in order of first appearance."""

    def __init__(self, n: int):
        self.n = n
        self.ids: dict[str, int] = {}

    def __call__(self, token: str) -> int:
        v = self.ids.get(token)
        if v is None:
            if len(self.ids) >= self.n:
                raise InvalidEdge(f"more than n={self.n} distinct labels")
            v = self.ids[token] = len(self.ids)
        return v


def read_stream(fh: TextIO, labels: bool = False) -> tuple[StreamHeader, Iterator[StreamUpdate]]:
    """Parse the header eagerly and the updates lazily (one pass, no buffering).

    With ``labels`` every vertex token is an opaque label mapped to ids in
    order of first appearance; otherwise tokens must be decimal ids.
    """
    lines = enumerate(fh, start=1)
    lineno, text = _first_content(lines)
    h = _parse_header(text, "H", ("n", "r"), lineno)
    header = StreamHeader(h["n"], h["r"], h.get("k", 0))
    if not 1 <= header.n <= MAX_VERTICES or not 1 <= header.r <= MAX_ARITY:
        raise MalformedInput(f"header needs 1 <= n <= {MAX_VERTICES} and 1 <= r <= {MAX_ARITY}",
                             lineno)
    to_id = LabelMap(header.n) if labels else None

    def updates():
        for lineno, raw in lines:
            text = _content(raw)
            if not text:
                continue
            sign, *tokens = text.split()
            if sign not in ("+", "-"):
                raise MalformedInput(f"update must start with + or -, got {sign!r}", lineno)
            try:
                if to_id is not None:
                    vs = [to_id(t) for t in tokens]
                else:
                    vs = [int(t) for t in tokens]
                edge = make_edge(vs, header.n, header.r)
            except (ValueError, InvalidEdge) as exc:
                raise MalformedInput(str(exc), lineno) from None
            yield StreamUpdate(edge, 1 if sign == "+" else -1)

    return header, updates()


def write_stream(fh: TextIO, header: StreamHeader, updates: Iterable) -> None:
    fh.write(f"H n={header.n} r={header.r} k={header.k}\n")
    for edge, delta in updates:
        fh.write(("+ " if delta > 0 else "- ") + " ".join(map(str, edge)) + "\n")


def read_weighted(fh: TextIO) -> WeightedHypergraph:
    lines = enumerate(fh, start=1)
    lineno, text = _first_content(lines)
    n = _parse_header(text, "W", ("n",), lineno)["n"]
    if not 1 <= n <= MAX_VERTICES:
        raise MalformedInput(f"header needs 1 <= n <= {MAX_VERTICES}", lineno)
    weights = {}
    for lineno, raw in lines:
        text = _content(raw)
        if not text:
            continue
        w, *tokens = text.split()
        try:
            weight = int(w)
            if weight <= 0:
                raise ValueError(f"weight must be positive, got {w}")
            edge = make_edge((int(t) for t in tokens), n)
        except (ValueError, InvalidEdge) as exc:
            raise MalformedInput(str(exc), lineno) from None
        if edge in weights:
            raise MalformedInput(f"edge {edge} listed twice", lineno)
        weights[edge] = weight
    r = max((len(e) for e in weights), default=1)
    return WeightedHypergraph(n, r, weights)


def write_weighted(fh: TextIO, S: WeightedHypergraph) -> None:
    fh.write(f"W n={S.n}\n")
    for edge in sorted(S.weights):
        fh.write(f"{S.weights[edge]} " + " ".join(map(str, edge)) + "\n")


def materialize(updates: Iterable, strict: bool = True) -> set:
    """Replay updates into an explicit edge set, checking 0/1 multiplicities."""
    live: set = set()
    for i, (edge, delta) in enumerate(updates, start=1):
        if delta > 0:
            if edge in live and strict:
                raise MalformedInput(f"update {i}: edge {edge} inserted twice")
            live.add(edge)
        else:
            if edge not in live and strict:
                raise MalformedInput(f"update {i}: edge {edge} deleted while absent")
            live.discard(edge)
    return live
