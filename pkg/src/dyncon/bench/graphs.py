"""Graph sources: SNAP-style edge lists, DIMACS challenge files and generators.

Every loader returns a :class:`Graph` whose edges are canonical ``(u, v)``
pairs with ``u < v``, free of loops and duplicates, in first-seen order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

MAX_VERTEX_ID = (1 << 31) - 1

Edge = Tuple[int, int]


class GraphFormatError(ValueError):
    """Malformed input; the message names the file and line."""


@dataclass
class Graph:
    n: int
    edges: List[Edge]
    name: str = ""

    @property
    def m(self) -> int:
        return len(self.edges)


def _canonical(pairs: Iterable[Edge]) -> List[Edge]:
    seen = set()
    out = []
    for a, b in pairs:
        if a == b:
            continue
        e = (a, b) if a < b else (b, a)
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def _vertex(tok: str, where: str) -> int:
    try:
        x = int(tok)
    except ValueError:
        raise GraphFormatError(f"{where}: vertex id {tok!r} is not an integer") from None
    if x < 0 or x > MAX_VERTEX_ID:
        raise GraphFormatError(f"{where}: vertex id {x} is outside 0..{MAX_VERTEX_ID}")
    return x


def parse_edge_list(lines: Iterable[str], name: str = "<edges>") -> Graph:
    """Whitespace-separated ``u v`` per line; ``#`` and ``%`` start comments."""
    pairs = []
    n = 0
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        toks = s.split()
        where = f"{name}:{lineno}"
        if len(toks) < 2:
            raise GraphFormatError(f"{where}: expected two vertex ids, got {s!r}")
        a, b = _vertex(toks[0], where), _vertex(toks[1], where)
        n = max(n, a + 1, b + 1)
        pairs.append((a, b))
    return Graph(max(n, 1), _canonical(pairs), name)


def parse_dimacs(lines: Iterable[str], name: str = "<dimacs>") -> Graph:
    """``p <kind> n m`` header and ``a u v w`` arcs with 1-based ids; weights ignored."""
    pairs = []
    n: Optional[int] = None
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s[0] == "c":
            continue
        toks = s.split()
        where = f"{name}:{lineno}"
        if toks[0] == "p":
            if len(toks) < 4:
                raise GraphFormatError(f"{where}: malformed problem line {s!r}")
            n = _vertex(toks[2], where)
        elif toks[0] in ("a", "e"):
            if n is None:
                raise GraphFormatError(f"{where}: arc before the problem line")
            if len(toks) < 3:
                raise GraphFormatError(f"{where}: malformed arc line {s!r}")
            a, b = _vertex(toks[1], where), _vertex(toks[2], where)
            if not (1 <= a <= n and 1 <= b <= n):
                raise GraphFormatError(f"{where}: vertex id outside 1..{n}")
            pairs.append((a - 1, b - 1))
        else:
            raise GraphFormatError(f"{where}: unknown line type {toks[0]!r}")
    if n is None:
        raise GraphFormatError(f"{name}: missing problem line")
    return Graph(max(n, 1), _canonical(pairs), name)


def _spec_params(spec: str) -> Tuple[str, Dict[str, str]]:
    parts = spec.split(":")
    if len(parts) < 2 or parts[0] != "gen":
        raise GraphFormatError(f"generator spec must look like gen:<kind>:k=v:..., got {spec!r}")
    params = {}
    for p in parts[2:]:
        if "=" not in p:
            raise GraphFormatError(f"{spec}: parameter {p!r} is not key=value")
        k, v = p.split("=", 1)
        params[k] = v
    return parts[1], params


def erdos_renyi(n: int, m: int, seed: int) -> List[Edge]:
    """Exactly ``m`` distinct uniform random edges on ``n`` vertices."""
    limit = n * (n - 1) // 2
    if m > limit:
        raise GraphFormatError(f"cannot place {m} distinct edges on {n} vertices")
    rng = random.Random(seed)
    seen = set()
    out = []
    while len(out) < m:
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b:
            continue
        e = (a, b) if a < b else (b, a)
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def road_grid(rows: int, cols: int, keep: float, seed: int) -> List[Edge]:
    """Planar grid with each edge kept independently; a road-network stand-in."""
    rng = random.Random(seed)
    out = []
    for r in range(rows):
        for c in range(cols):
            x = r * cols + c
            if c + 1 < cols and rng.random() < keep:
                out.append((x, x + 1))
            if r + 1 < rows and rng.random() < keep:
                out.append((x, x + cols))
    return out


def generate(spec: str) -> Graph:
    """``gen:erdos:n=..:m=..:seed=..`` or ``gen:grid:rows=..:cols=..:keep=..:seed=..``."""
    kind, p = _spec_params(spec)
    try:
        seed = int(p.get("seed", 0))
        if kind == "erdos":
            n, m = int(p["n"]), int(p["m"])
            return Graph(n, erdos_renyi(n, m, seed), spec)
        if kind == "grid":
            rows, cols = int(p["rows"]), int(p.get("cols", p["rows"]))
            keep = float(p.get("keep", 0.6))
            return Graph(rows * cols, road_grid(rows, cols, keep, seed), spec)
    except KeyError as exc:
        raise GraphFormatError(f"{spec}: missing parameter {exc.args[0]!r}") from None
    except ValueError as exc:
        raise GraphFormatError(f"{spec}: {exc}") from None
    raise GraphFormatError(f"{spec}: unknown generator {kind!r}")


def load_graph(source: str, fmt: Optional[str] = None) -> Graph:
    """Load a file (edge list or DIMACS, sniffed by default) or a generator spec."""
    if source.startswith("gen:"):
        return generate(source)
    with open(source, encoding="utf-8") as fh:
        lines = fh.readlines()
    if fmt is None:
        fmt = "edges"
        for line in lines:
            s = line.strip()
            if not s or s[0] in "#%":
                continue
            if s[0] in "cpa" and not s[0].isdigit():
                fmt = "dimacs"
            break
    if fmt == "dimacs":
        return parse_dimacs(lines, source)
    if fmt == "edges":
        return parse_edge_list(lines, source)
    raise ValueError(f"unknown graph format {fmt!r}")
