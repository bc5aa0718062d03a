"""Read and write parity-check matrices in MacKay's alist text format.

Layout::

    n m
    max_var_degree max_check_degree
    <n variable degrees>
    <m check degrees>
    <n lines: 1-indexed check neighbours of each variable>
    <m lines: 1-indexed variable neighbours of each check>

Zero entries used as padding are ignored on read.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .ldpc_code import TannerGraph


class AlistFormatError(ValueError):
    pass


def _ints(line, lineno):
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise AlistFormatError(f"line {lineno}: {exc}") from None


def parse_alist(text: str) -> TannerGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise AlistFormatError("truncated alist header")
    header = _ints(lines[0], 1)
    if len(header) != 2:
        raise AlistFormatError("line 1 must hold 'n m'")
    n, m = header
    if len(lines) < 4 + n:
        raise AlistFormatError(f"expected {n} variable lines, file has {len(lines) - 4}")
    var_deg = _ints(lines[2], 3)
    if len(var_deg) < n:
        raise AlistFormatError("variable degree line too short")
    checks, variables = [], []
    for v in range(n):
        nbrs = [x for x in _ints(lines[4 + v], 5 + v) if x != 0]
        if len(nbrs) != var_deg[v]:
            raise AlistFormatError(f"variable {v + 1}: degree {var_deg[v]} but {len(nbrs)} neighbours")
        for c in nbrs:
            if not 1 <= c <= m:
                raise AlistFormatError(f"variable {v + 1}: check index {c} out of range")
            checks.append(c - 1)
            variables.append(v)
    graph = TannerGraph(n, m, np.array(checks, dtype=np.int64), np.array(variables, dtype=np.int64))
    # check-side lines are redundant; verify them when present
    if len(lines) >= 4 + n + m:
        for c in range(m):
            nbrs = sorted(x - 1 for x in _ints(lines[4 + n + c], 5 + n + c) if x != 0)
            if nbrs != graph.check_neighbors(c).tolist():
                raise AlistFormatError(f"check {c + 1}: neighbour list disagrees with variable lines")
    return graph


def format_alist(graph: TannerGraph) -> str:
    vd, cd = graph.var_degrees, graph.chk_degrees
    out = [f"{graph.n} {graph.m}",
           f"{int(vd.max()) if graph.n else 0} {int(cd.max()) if graph.m else 0}",
           " ".join(map(str, vd)),
           " ".join(map(str, cd))]
    for v in range(graph.n):
        out.append(" ".join(str(c + 1) for c in sorted(graph.var_neighbors(v).tolist())))
    for c in range(graph.m):
        out.append(" ".join(str(v + 1) for v in graph.check_neighbors(c).tolist()))
    return "\n".join(out) + "\n"


def read_alist(path) -> TannerGraph:
    path = Path(path)
    try:
        return parse_alist(path.read_text())
    except AlistFormatError as exc:
        raise AlistFormatError(f"{path}: {exc}") from None


def write_alist(graph: TannerGraph, path) -> None:
    Path(path).write_text(format_alist(graph))
