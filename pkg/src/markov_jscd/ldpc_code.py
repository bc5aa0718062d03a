"""Irregular LDPC codes: degree distributions, PEG construction and systematic encoding.

Parity-check matrices are held as :class:`TannerGraph` objects with
adjacency stored in both directions.  Edges are numbered in check-major
order (check 0's neighbours first, each check's neighbours by ascending
variable index); every per-edge message array in the decoder uses that
numbering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from numba import njit
from scipy import sparse


class ConstructionError(RuntimeError):
    """PEG could not place all requested edges."""


class InfeasibleRateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# degree distributions


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective degree distribution, e.g. lambda(x) = sum_i l_i x^(i-1).

    ``degrees`` and ``fractions`` are parallel tuples; fraction ``f`` for
    degree ``d`` is the fraction of edges attached to degree-``d`` nodes.
    """

    degrees: tuple
    fractions: tuple

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        fractions = tuple(float(f) for f in self.fractions)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "fractions", fractions)
        if len(degrees) != len(fractions) or not degrees:
            raise ValueError("degrees and fractions must be non-empty and of equal length")
        if len(set(degrees)) != len(degrees):
            raise ValueError("degrees must be distinct")
        if any(d < 1 for d in degrees):
            raise ValueError("degrees must be >= 1")
        if any(not (0.0 < f <= 1.0) for f in fractions):
            raise ValueError("fractions must lie in (0, 1]")
        if abs(sum(fractions) - 1.0) > 1e-9:
            raise ValueError(f"fractions sum to {sum(fractions)!r}, expected 1")

    @classmethod
    def from_dict(cls, mapping) -> DegreeDistribution:
        items = sorted(mapping.items())
        return cls(tuple(d for d, _ in items), tuple(f for _, f in items))

    def as_dict(self) -> dict:
        return dict(zip(self.degrees, self.fractions))

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    @property
    def inverse_mean(self) -> float:
        """sum_i f_i / i, the reciprocal of the average node degree."""
        return sum(f / d for d, f in zip(self.degrees, self.fractions))

    @property
    def average_node_degree(self) -> float:
        return 1.0 / self.inverse_mean

    def node_fractions(self) -> dict:
        """Node-perspective fractions (f_i / i normalised)."""
        inv = self.inverse_mean
        return {d: (f / d) / inv for d, f in zip(self.degrees, self.fractions)}


def lambda_A() -> DegreeDistribution:
    """Rate-1/2 AWGN-optimised variable-node distribution, max degree 10."""
    return DegreeDistribution((2, 3, 4, 10), (0.25105, 0.30938, 0.00104, 0.43853))


def lambda_B() -> DegreeDistribution:
    """Rate-0.32 variable-node distribution, max degree 10."""
    return DegreeDistribution((2, 3, 7, 10), (0.3127, 0.3582, 0.04, 0.2891))


def derive_check_distribution(lam: DegreeDistribution, rate: float) -> DegreeDistribution:
    """Check-node distribution on degrees {d, d+1} matching the design rate.

    Solves sum_i rho_i / i = (1 - rate) * sum_i lambda_i / i.
    """
    if not (0.0 < rate < 1.0):
        raise ValueError("rate must lie in (0, 1)")
    target = (1.0 - rate) * lam.inverse_mean
    avg = 1.0 / target
    if avg < 2.0:
        raise InfeasibleRateError(f"average check degree {avg:.4f} < 2 at rate {rate}")
    d = math.floor(avg)
    if abs(avg - round(avg)) < 1e-9:
        return DegreeDistribution((int(round(avg)),), (1.0,))
    rho_d = (target - 1.0 / (d + 1)) * d * (d + 1)
    return DegreeDistribution((d, d + 1), (rho_d, 1.0 - rho_d))


def quantize_degrees(lam: DegreeDistribution, n: int) -> np.ndarray:
    """Integer variable-node degree sequence (ascending) of length ``n``.

    Node-perspective targets ``n * f_i`` are floored, then the remaining
    nodes go to the classes with the largest fractional remainders.
    """
    fr = lam.node_fractions()
    degrees = sorted(fr)
    targets = np.array([n * fr[d] for d in degrees])
    counts = np.floor(targets).astype(np.int64)
    short = n - int(counts.sum())
    order = np.argsort(-(targets - counts), kind="stable")
    counts[order[:short]] += 1
    return np.repeat(np.array(degrees, dtype=np.int64), counts)


def degree_targets(lam: DegreeDistribution, n: int) -> dict:
    """Rounded node count per degree class, as used by :func:`quantize_degrees`."""
    seq = quantize_degrees(lam, n)
    return {int(d): int(np.sum(seq == d)) for d in lam.degrees}


# ---------------------------------------------------------------------------
# Tanner graph


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Sparse bipartite graph of an m x n parity-check matrix.

    Built from parallel arrays ``edge_check`` / ``edge_var``; the
    constructor sorts them into check-major order and rejects parallel
    edges.
    """

    n: int
    m: int
    edge_check: np.ndarray
    edge_var: np.ndarray
    chk_ptr: np.ndarray = field(init=False, repr=False)
    var_ptr: np.ndarray = field(init=False, repr=False)
    var_edges: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ec = np.asarray(self.edge_check, dtype=np.int64)
        ev = np.asarray(self.edge_var, dtype=np.int64)
        if ec.shape != ev.shape or ec.ndim != 1:
            raise ValueError("edge arrays must be 1-D and of equal length")
        if ec.size and (ec.min() < 0 or ec.max() >= self.m or ev.min() < 0 or ev.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        order = np.lexsort((ev, ec))
        ec, ev = ec[order], ev[order]
        if ec.size > 1:
            dup = (np.diff(ec) == 0) & (np.diff(ev) == 0)
            if dup.any():
                raise ValueError("parallel edges are not allowed")
        chk_ptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(np.bincount(ec, minlength=self.m), out=chk_ptr[1:])
        var_ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(ev, minlength=self.n), out=var_ptr[1:])
        var_edges = np.argsort(ev, kind="stable").astype(np.int64)
        for name, arr in (("edge_check", ec), ("edge_var", ev), ("chk_ptr", chk_ptr),
                          ("var_ptr", var_ptr), ("var_edges", var_edges)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_dense(cls, H) -> TannerGraph:
        H = np.asarray(H)
        if H.ndim != 2:
            raise ValueError("H must be 2-D")
        rows, cols = np.nonzero(H % 2)
        return cls(n=H.shape[1], m=H.shape[0], edge_check=rows, edge_var=cols)

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        H[self.edge_check, self.edge_var] = 1
        return H

    @property
    def num_edges(self) -> int:
        return int(self.edge_check.size)

    @property
    def var_degrees(self) -> np.ndarray:
        return np.diff(self.var_ptr)

    @property
    def chk_degrees(self) -> np.ndarray:
        return np.diff(self.chk_ptr)

    def check_neighbors(self, c: int) -> np.ndarray:
        return self.edge_var[self.chk_ptr[c]:self.chk_ptr[c + 1]]

    def var_neighbors(self, v: int) -> np.ndarray:
        return self.edge_check[self.var_edges[self.var_ptr[v]:self.var_ptr[v + 1]]]

    def is_well_formed(self) -> bool:
        """Every variable node has degree >= 2 and every check node degree >= 1."""
        return bool(np.all(self.var_degrees >= 2) and np.all(self.chk_degrees >= 1))

    def permute_columns(self, perm) -> TannerGraph:
        """Relabel variable ``v`` as ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return TannerGraph(self.n, self.m, self.edge_check, perm[self.edge_var])


# ---------------------------------------------------------------------------
# progressive edge growth


@njit(cache=True)
def _peg_kernel(m, degrees, cap):
    n = degrees.size
    dvmax = 0
    for v in range(n):
        if degrees[v] > dvmax:
            dvmax = degrees[v]
    var_adj = np.full((n, max(dvmax, 1)), -1, np.int64)
    var_cnt = np.zeros(n, np.int64)
    chk_adj = np.full((m, cap), -1, np.int64)
    chk_cnt = np.zeros(m, np.int64)
    chk_seen = np.zeros(m, np.int64)
    var_seen = np.zeros(n, np.int64)
    cur = np.empty(m, np.int64)
    nxt = np.empty(m, np.int64)
    cand = np.empty(m, np.int64)
    stamp = 0
    for v in range(n):
        for k in range(degrees[v]):
            ncand = 0
            if k == 0:
                for c in range(m):
                    cand[ncand] = c
                    ncand += 1
            else:
                stamp += 1
                var_seen[v] = stamp
                ncur = 0
                for i in range(var_cnt[v]):
                    c = var_adj[v, i]
                    chk_seen[c] = stamp
                    cur[ncur] = c
                    ncur += 1
                reached = ncur
                while True:
                    nnxt = 0
                    for i in range(ncur):
                        c = cur[i]
                        for j in range(chk_cnt[c]):
                            u = chk_adj[c, j]
                            if var_seen[u] == stamp:
                                continue
                            var_seen[u] = stamp
                            for t in range(var_cnt[u]):
                                c2 = var_adj[u, t]
                                if chk_seen[c2] != stamp:
                                    chk_seen[c2] = stamp
                                    nxt[nnxt] = c2
                                    nnxt += 1
                    if nnxt == 0:
                        # subtree stopped growing: everything unseen is a candidate
                        for c in range(m):
                            if chk_seen[c] != stamp:
                                cand[ncand] = c
                                ncand += 1
                        break
                    reached += nnxt
                    if reached == m:
                        # the deepest level just completed the cover
                        for i in range(nnxt):
                            cand[ncand] = nxt[i]
                            ncand += 1
                        break
                    for i in range(nnxt):
                        cur[i] = nxt[i]
                    ncur = nnxt
            if ncand == 0:
                return var_adj, var_cnt, chk_cnt, v
            best = -1
            for i in range(ncand):
                c = cand[i]
                if best < 0 or chk_cnt[c] < chk_cnt[best] or (chk_cnt[c] == chk_cnt[best] and c < best):
                    best = c
            if chk_cnt[best] >= cap:
                return var_adj, var_cnt, chk_cnt, -2
            var_adj[v, var_cnt[v]] = best
            var_cnt[v] += 1
            chk_adj[best, chk_cnt[best]] = v
            chk_cnt[best] += 1
    return var_adj, var_cnt, chk_cnt, -1


def peg_construct(n: int, m: int, lam: DegreeDistribution, rho: DegreeDistribution | None,
                  rng: np.random.Generator) -> TannerGraph:
    """Build an m x n Tanner graph with progressive edge growth.

    Variable nodes are processed in ascending degree order.  Each edge of a
    node goes to a check outside (or deepest in) the node's current BFS
    subtree; ties go to the lowest current check degree, then lowest index.
    ``rng`` only draws the final column labelling, so two seeds give
    isomorphic graphs with different variable orderings.

    ``rho`` is used to sanity-check the edge budget; check degrees come out
    near-uniform by construction.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    degrees = quantize_degrees(lam, n)
    if degrees.max() > m:
        raise ConstructionError(f"variable degree {degrees.max()} exceeds m={m}")
    edges = int(degrees.sum())
    if rho is not None:
        expected = m * rho.average_node_degree
        if abs(edges - expected) > max(rho.degrees) + lam.max_degree:
            raise ValueError(f"edge budget mismatch: {edges} variable-side vs {expected:.1f} check-side")
    cap = 2 * math.ceil(edges / m) + 16
    while True:
        var_adj, var_cnt, _, status = _peg_kernel(m, degrees, cap)
        if status == -1:
            break
        if status == -2:
            cap *= 2
            continue
        raise ConstructionError(f"no admissible check for variable node {status}")
    ev = np.repeat(np.arange(n), var_cnt)
    ec = np.concatenate([var_adj[v, :var_cnt[v]] for v in range(n)])
    perm = rng.permutation(n)
    return TannerGraph(n, m, ec, perm[ev])


def girth(graph: TannerGraph) -> float:
    """Length of the shortest cycle (inf for a forest), by BFS from every variable."""
    best = math.inf
    adj_v = [graph.var_neighbors(v) for v in range(graph.n)]
    adj_c = [graph.check_neighbors(c) for c in range(graph.m)]
    for root in range(graph.n):
        # nodes encoded as ("v", i) -> i, ("c", j) -> n + j
        dist = {root: 0}
        parent = {root: -1}
        frontier = [root]
        while frontier:
            nxt = []
            for node in frontier:
                nbrs = adj_v[node] + graph.n if node < graph.n else adj_c[node - graph.n]
                for nb in nbrs:
                    nb = int(nb)
                    if nb == parent[node]:
                        continue
                    if nb in dist:
                        best = min(best, dist[node] + dist[nb] + 1)
                    else:
                        dist[nb] = dist[node] + 1
                        parent[nb] = node
                        nxt.append(nb)
            frontier = nxt
    return best


# ---------------------------------------------------------------------------
# GF(2) elimination and systematic encoding


@njit(cache=True)
def _gf2_reduce(words, col_order):
    """In-place Gauss-Jordan over packed rows; returns pivot columns by row."""
    m = words.shape[0]
    nw = words.shape[1]
    pivots = np.full(m, -1, np.int64)
    r = 0
    one = np.uint64(1)
    for col in col_order:
        if r == m:
            break
        w = col >> 6
        bit = one << np.uint64(col & 63)
        piv = -1
        for i in range(r, m):
            if words[i, w] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for t in range(nw):
                tmp = words[r, t]
                words[r, t] = words[piv, t]
                words[piv, t] = tmp
        for j in range(m):
            if j != r and (words[j, w] & bit):
                for t in range(nw):
                    words[j, t] ^= words[r, t]
        pivots[r] = col
        r += 1
    return r, pivots


def _pack_rows(H: np.ndarray) -> np.ndarray:
    m, n = H.shape
    nw = (n + 63) // 64
    padded = np.zeros((m, nw * 64), dtype=np.uint8)
    padded[:, :n] = H
    # little-endian bit order so that column c sits at bit c % 64 of word c // 64
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).copy()


def _unpack_rows(words: np.ndarray, n: int) -> np.ndarray:
    bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :n]


def gf2_eliminate(H, col_order=None):
    """Reduced row-echelon form of H over GF(2).

    Returns ``(R, rank, pivot_cols)``.  Pivots are searched in
    ``col_order`` (default: right to left) so that for ``H = [P | I]`` the
    identity columns become the pivots.
    """
    H = np.asarray(H, dtype=np.uint8) % 2
    m, n = H.shape
    if col_order is None:
        col_order = np.arange(n - 1, -1, -1, dtype=np.int64)
    if m == 0:
        return H.copy(), 0, np.zeros(0, dtype=np.int64)
    words = _pack_rows(H)
    rank, pivots = _gf2_reduce(words, np.asarray(col_order, dtype=np.int64))
    return _unpack_rows(words, n), int(rank), pivots[:rank].copy()


def gf2_rank(H) -> int:
    return gf2_eliminate(H)[1]


@dataclass(frozen=True, eq=False)
class SystematicCode:
    """A Tanner graph plus the encoder derived from its eliminated form.

    ``info_positions`` are the k columns carrying source bits (ascending);
    ``parity_positions`` are the pivot columns, one per row of
    ``parity_map``.  Parity bit ``parity_positions[i]`` equals
    ``parity_map[i] @ u mod 2``.  Codewords are in the column order of the
    original H; the decoder always runs on that sparse H.
    """

    graph: TannerGraph
    info_positions: np.ndarray
    parity_positions: np.ndarray
    parity_map: np.ndarray
    rank: int

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def k(self) -> int:
        return int(self.info_positions.size)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def permutation(self) -> np.ndarray:
        """Column order placing the information positions first."""
        return np.concatenate([self.info_positions, self.parity_positions])

    @property
    def full_rank(self) -> bool:
        return self.rank == self.graph.m


def make_systematic(graph: TannerGraph) -> SystematicCode:
    R, rank, pivots = gf2_eliminate(graph.to_dense())
    is_pivot = np.zeros(graph.n, dtype=bool)
    is_pivot[pivots] = True
    info = np.flatnonzero(~is_pivot)
    parity_map = R[:rank][:, info].astype(np.float32)
    for arr in (info, pivots, parity_map):
        arr.setflags(write=False)
    return SystematicCode(graph, info, pivots, parity_map, rank)


def encode(code: SystematicCode, info) -> np.ndarray:
    """Encode one word (shape (k,)) or a batch (shape (B, k)) into codewords."""
    u = np.asarray(info, dtype=np.uint8)
    if u.shape[-1] != code.k:
        raise ValueError(f"info length {u.shape[-1]} != k={code.k}")
    batch = u.reshape(-1, code.k)
    words = np.zeros((batch.shape[0], code.n), dtype=np.uint8)
    words[:, code.info_positions] = batch
    if code.rank:
        # float32 sums are exact up to 2**24 terms
        par = batch.astype(np.float32) @ code.parity_map.T
        words[:, code.parity_positions] = (par.astype(np.int64) & 1).astype(np.uint8)
    return words.reshape(u.shape[:-1] + (code.n,))


def code_rate(graph: TannerGraph) -> float:
    """1 - rank(H)/n over GF(2)."""
    if graph.m == 0:
        return 1.0
    return 1.0 - gf2_rank(graph.to_dense()) / graph.n


def syndrome(graph: TannerGraph, word) -> np.ndarray:
    w = np.asarray(word, dtype=np.int64)
    if w.shape[-1] != graph.n:
        raise ValueError(f"word length {w.shape[-1]} != n={graph.n}")
    if w.ndim == 1:
        return (np.bincount(graph.edge_check, weights=w[graph.edge_var], minlength=graph.m)
                .astype(np.int64) & 1).astype(np.uint8)
    H = sparse.csr_matrix((np.ones(graph.num_edges, dtype=np.int64),
                           (graph.edge_check, graph.edge_var)), shape=(graph.m, graph.n))
    flat = w.reshape(-1, graph.n)
    sums = np.asarray((H @ flat.T).T)
    return (sums & 1).astype(np.uint8).reshape(w.shape[:-1] + (graph.m,))


def build_code(n: int, rate: float, lam: DegreeDistribution, seed) -> SystematicCode:
    """PEG code of length n and design rate ``rate`` with a derived check side."""
    m = int(round(n * (1.0 - rate)))
    rho = derive_check_distribution(lam, rate)
    graph = peg_construct(n, m, lam, rho, np.random.default_rng(seed))
    return make_systematic(graph)
