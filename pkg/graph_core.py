# graph_core.py
"""
Graph representation, construction, validation and data ingestion.

Vertex ids are 0-based: a vertex numbered v in 1-based notation is v - 1 here.
Graphs are undirected, simple (no self-loops, no multi-edges) and carry
strictly positive edge weights (1.0 for unweighted input).
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _csgraph_components

from graph_errors import (
    AsymmetricInput,
    EventOutOfRange,
    InvalidParams,
    NonpositiveWeight,
    ParseError,
    SelfLoop,
    VertexOutOfRange,
)

logger = logging.getLogger(__name__)

CORRELATION_SYMMETRY_TOL = 1e-12

# "n=<count>" header of the edge-list text format
HEADER_RE = re.compile(r"^n\s*=\s*(\d+)$")
EDGE_FILE_RE = re.compile(r"^(\d{4,})\.edges$")


class Graph:
    """
    Immutable undirected weighted graph on vertices {0, ..., n-1}.

    Neighbors live in one dict per vertex, so iteration is O(degree) and edge
    lookup is O(1). The sparse adjacency matrix is built on first use.
    Build instances with build_graph(); the constructor trusts its input.
    """

    def __init__(self, n, neighbor_maps):
        self._n = n
        self._adj = tuple(neighbor_maps)

    @property
    def n(self):
        return self._n

    @cached_property
    def m(self):
        return sum(len(nbrs) for nbrs in self._adj) // 2

    @property
    def edges(self):
        """Sorted tuple of (i, j, w) with i < j"""
        return self._edges

    @cached_property
    def _edges(self):
        out = []
        for i, nbrs in enumerate(self._adj):
            for j, w in nbrs.items():
                if i < j:
                    out.append((i, j, w))
        out.sort()
        return tuple(out)

    def edge_list(self):
        return list(self.edges)

    def neighbors(self, i):
        return self._adj[i].keys()

    def has_edge(self, i, j):
        return 0 <= i < self._n and j in self._adj[i]

    def weight(self, i, j):
        return self._adj[i].get(j, 0.0)

    @cached_property
    def is_weighted(self):
        return any(w != 1.0 for _, _, w in self.edges)

    def degrees(self):
        """Weighted degrees d_i = sum_j w_ij"""
        return np.array([math.fsum(nbrs.values()) for nbrs in self._adj], dtype=float)

    def unweighted_degrees(self):
        return np.array([len(nbrs) for nbrs in self._adj], dtype=np.int64)

    @cached_property
    def csr(self):
        rows, cols, vals = [], [], []
        for i, j, w in self.edges:
            rows.extend((i, j))
            cols.extend((j, i))
            vals.extend((w, w))
        return sp.csr_matrix(
            (
                np.asarray(vals, dtype=float),
                (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)),
            ),
            shape=(self._n, self._n),
        )

    def is_connected(self):
        return len(connected_components(self)) <= 1

    def fingerprint(self):
        """SHA-1 of the vertex count and sorted weighted edge list"""
        digest = hashlib.sha1(f"n={self._n}".encode("ascii"))
        for i, j, w in self.edges:
            digest.update(f";{i},{j},{w!r}".encode("ascii"))
        return digest.hexdigest()

    def permuted(self, perm):
        """Relabel vertex i as perm[i]"""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self._n)):
            raise InvalidParams("perm must be a permutation of 0..n-1")
        return build_graph(self._n, [(perm[i], perm[j], w) for i, j, w in self.edges])

    def with_vertex_count(self, n):
        """Same edges on a larger vertex set (new vertices are isolated)"""
        if n < self._n:
            raise InvalidParams(f"cannot shrink a graph from {self._n} to {n} vertices")
        return Graph(n, list(self._adj) + [{} for _ in range(n - self._n)])

    def __eq__(self, other):
        return isinstance(other, Graph) and self._n == other._n and self.edges == other.edges

    def __hash__(self):
        return hash((self._n, self.edges))

    def __repr__(self):
        return f"Graph(n={self._n}, m={self.m})"


@dataclass(frozen=True)
class DegreeSequence:
    """Vertex degrees in vertex order (D is diag(degrees))"""

    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        if any(d < 0 for d in self.degrees):
            raise InvalidParams("degrees must be non-negative")

    def __len__(self):
        return len(self.degrees)

    @property
    def total(self):
        return sum(self.degrees)

    def is_graphical(self):
        """Erdős–Gallai test; only integer sequences can be graphical"""
        if any(int(d) != d for d in self.degrees):
            return False
        return nx.is_graphical([int(d) for d in self.degrees], method="eg")


@dataclass(frozen=True)
class ContactEvent:
    """Face-to-face contact between u and v at time t (seconds)"""

    t: float
    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise SelfLoop(self.u)
        if not math.isfinite(self.t):
            raise InvalidParams(f"contact time must be finite, got {self.t}")


def build_graph(n, edge_list):
    """
    Build a Graph from (i, j) or (i, j, w) entries.

    Duplicate entries collapse last-wins; (i, j) and (j, i) are the same edge.
    """
    if n < 0:
        raise InvalidParams(f"vertex count must be non-negative, got {n}")
    adj = [dict() for _ in range(n)]
    for entry in edge_list:
        if len(entry) == 2:
            i, j = entry
            w = 1.0
        elif len(entry) == 3:
            i, j, w = entry
            w = float(w)
        else:
            raise InvalidParams(f"edge entries are (i, j) or (i, j, w), got {entry!r}")
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise VertexOutOfRange(f"edge ({i}, {j}) outside vertex range 0..{n - 1}")
        if i == j:
            raise SelfLoop(i)
        if not w > 0 or not math.isfinite(w):
            raise NonpositiveWeight(f"edge ({i}, {j}) has weight {w}")
        adj[i][j] = w
        adj[j][i] = w
    return Graph(n, adj)


def empty_graph(n):
    return Graph(n, [dict() for _ in range(n)])


def adjacency_matrix(g):
    """Sparse symmetric A with A[i, j] = w_ij and zero diagonal"""
    return g.csr.copy()


def laplacian_matrix(g, normalized=False):
    """
    L = D - A, or the normalized D^-1/2 L D^-1/2 when normalized is set.

    Isolated vertices get D^-1/2 = 0, so their rows and columns are all zero.
    """
    A = g.csr
    d = g.degrees()
    if not normalized:
        return (sp.diags(d) - A).tocsr()
    A = A.tocoo()
    # w_ij / sqrt(d_i d_j): the product commutes, so the result is exactly symmetric
    scaled = A.data / np.sqrt(d[A.row] * d[A.col])
    off = sp.csr_matrix((scaled, (A.row, A.col)), shape=A.shape)
    return (sp.diags((d > 0).astype(float)) - off).tocsr()


def connected_components(g):
    """Components as sorted vertex tuples, ordered by smallest member"""
    if g.n == 0:
        return []
    _, labels = _csgraph_components(g.csr, directed=False)
    groups = {}
    for v, label in enumerate(labels):
        groups.setdefault(int(label), []).append(v)
    return sorted((tuple(members) for members in groups.values()), key=lambda c: c[0])


def graph_from_correlation(P, T, binarize=False):
    """
    Threshold a correlation matrix: edge (u, v) iff |P[u, v]| >= T and > 0.

    Weights are |P[u, v]|, or 1 in binarize mode. The diagonal is ignored.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise AsymmetricInput(f"correlation matrix must be square, got shape {P.shape}")
    if not 0.0 <= T <= 1.0:
        raise InvalidParams(f"threshold must lie in [0, 1], got {T}")
    if P.size and np.max(np.abs(P - P.T)) > CORRELATION_SYMMETRY_TOL:
        raise AsymmetricInput("correlation matrix is not symmetric")
    n = P.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    mags = np.abs(P[iu, ju])
    keep = (mags >= T) & (mags > 0)
    if binarize:
        edges = [(int(i), int(j)) for i, j in zip(iu[keep], ju[keep])]
    else:
        edges = [(int(i), int(j), float(w)) for i, j, w in zip(iu[keep], ju[keep], mags[keep])]
    return build_graph(n, edges)


def interval_width(t_start, t_end, N):
    return (t_end - t_start) / N


def bucket_contacts(events, t_start, t_end, N, n):
    """
    Split [t_start, t_end) into N equal half-open intervals and build one
    unweighted graph per interval from the contacts that fall in it.
    """
    if not t_start < t_end:
        raise InvalidParams(f"need t_start < t_end, got [{t_start}, {t_end})")
    if N < 1:
        raise InvalidParams(f"interval count must be >= 1, got {N}")
    width = interval_width(t_start, t_end, N)
    buckets = [set() for _ in range(N)]
    for ev in events:
        if not t_start <= ev.t < t_end:
            raise EventOutOfRange(f"event at t={ev.t} outside [{t_start}, {t_end})")
        idx = min(int((ev.t - t_start) // width), N - 1)
        u, v = (ev.u, ev.v) if ev.u < ev.v else (ev.v, ev.u)
        buckets[idx].add((u, v))
    return [build_graph(n, sorted(pairs)) for pairs in buckets]


# ---------------------------------------------------------------- file formats

def parse_edge_list(text, source="<string>"):
    """Parse the edge-list text format ('i j [w]' lines, optional leading 'n=<count>')"""
    n_header = None
    edges = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = HEADER_RE.match(line)
        if header:
            if seen_content:
                raise ParseError(f"{source}:{lineno}: 'n=' header must come first")
            n_header = int(header.group(1))
            seen_content = True
            continue
        seen_content = True
        parts = line.split()
        try:
            if len(parts) == 2:
                edges.append((int(parts[0]), int(parts[1])))
            elif len(parts) == 3:
                edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
            else:
                raise ValueError(f"expected 2 or 3 fields, got {len(parts)}")
        except ValueError as e:
            raise ParseError(f"{source}:{lineno}: bad edge line {raw!r} ({e})") from None
        if edges[-1][0] < 0 or edges[-1][1] < 0:
            raise ParseError(f"{source}:{lineno}: negative vertex id")
    if n_header is None:
        n_header = 1 + max((max(e[0], e[1]) for e in edges), default=-1)
    return build_graph(n_header, edges)


def read_edge_list(path):
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read edge list {path}: {e}") from None
    return parse_edge_list(text, source=str(path))


def format_edge_list(g):
    """
    Render g in the edge-list format. The 'n=' header is written only when
    max id + 1 would not recover the vertex count.
    """
    lines = []
    max_id = max((j for _, j, _ in g.edges), default=-1)
    if max_id + 1 != g.n:
        lines.append(f"n={g.n}")
    weighted = g.is_weighted
    for i, j, w in g.edges:
        lines.append(f"{i} {j} {w!r}" if weighted else f"{i} {j}")
    return "\n".join(lines) + ("\n" if lines else "")


def write_edge_list(g, path):
    Path(path).write_text(format_edge_list(g))


def read_edge_list_dir(path):
    """Read 0000.edges, 0001.edges, ... in index order, lifted to a common vertex count"""
    entries = []
    for name in os.listdir(path):
        match = EDGE_FILE_RE.match(name)
        if match:
            entries.append((int(match.group(1)), name))
    if not entries:
        raise ParseError(f"no NNNN.edges files in {path}")
    entries.sort()
    graphs = [read_edge_list(Path(path) / name) for _, name in entries]
    n = max(g.n for g in graphs)
    return [g.with_vertex_count(n) for g in graphs]


def read_contact_events(path):
    """Contact CSV with header 't,u,v'"""
    events = []
    try:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None:
                return events
            reader.fieldnames = [h.strip() for h in reader.fieldnames]
            if reader.fieldnames != ["t", "u", "v"]:
                raise ParseError(f"{path}: expected header 't,u,v', got {reader.fieldnames}")
            for lineno, row in enumerate(reader, start=2):
                try:
                    events.append(ContactEvent(float(row["t"]), int(row["u"]), int(row["v"])))
                except (TypeError, ValueError, SelfLoop, InvalidParams) as e:
                    raise ParseError(f"{path}:{lineno}: bad contact row {row} ({e})") from None
    except OSError as e:
        raise ParseError(f"cannot read contact file {path}: {e}") from None
    return events


def read_correlation_matrix(path):
    """Dense CSV of n rows with n comma-separated reals"""
    try:
        P = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as e:
        raise ParseError(f"cannot read correlation matrix {path}: {e}") from None
    if P.shape[0] != P.shape[1]:
        raise ParseError(f"{path}: correlation matrix is {P.shape[0]}x{P.shape[1]}, not square")
    return P
