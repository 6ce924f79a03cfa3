# graph_generators.py
"""
Seeded samplers for the random-graph ensembles used as null and alternative
populations, plus volume-matching helpers.

Every draw is a pure function of (EnsembleSpec, Seed). Random numbers come
from numpy's counter-based Philox generator keyed by
SeedSequence(master, spawn_key=(stream, role, attempt)), so each sample index,
role and connectivity retry has its own independent stream.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from graph_core import DegreeSequence, build_graph
from graph_errors import InvalidParams, RetriesExhausted, UnsupportedModel

logger = logging.getLogger(__name__)

GNP = "gnp"
SBM2 = "sbm2"
PREFERENTIAL_ATTACHMENT = "preferential_attachment"
WATTS_STROGATZ = "watts_strogatz"
RANDOM_DEGREE_SEQUENCE = "random_degree_sequence"
LATTICE2D = "lattice2d"

MODELS = (GNP, SBM2, PREFERENTIAL_ATTACHMENT, WATTS_STROGATZ, RANDOM_DEGREE_SEQUENCE, LATTICE2D)
MODEL_ALIASES = {
    "er": GNP,
    "sbm": SBM2,
    "pa": PREFERENTIAL_ATTACHMENT,
    "ws": WATTS_STROGATZ,
    "rds": RANDOM_DEGREE_SEQUENCE,
    "rddg": RANDOM_DEGREE_SEQUENCE,
    "lattice": LATTICE2D,
}

# degree sequence taken from the same sample index's alternative draw
MATCH_ALTERNATIVE = "alternative"
SWAPS_PER_EDGE = 10
MASTER_SEED_LIMIT = 2 ** 64


def canonical_model(name):
    name = MODEL_ALIASES.get(name, name)
    if name not in MODELS:
        raise InvalidParams(f"unknown model {name!r}; choose from {', '.join(MODELS)}")
    return name


@dataclass(frozen=True)
class Seed:
    """master 64-bit seed, sample stream index, and role within the sample"""

    master: int
    stream: int = 0
    role: int = 0

    def __post_init__(self):
        for name in ("master", "stream", "role"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise InvalidParams(f"seed {name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.master >= MASTER_SEED_LIMIT:
            raise InvalidParams(f"master seed must fit in 64 bits, got {self.master}")

    def for_role(self, role):
        return Seed(self.master, self.stream, role)

    def rng(self, attempt=0):
        seq = np.random.SeedSequence(self.master, spawn_key=(self.stream, self.role, attempt))
        return np.random.Generator(np.random.Philox(seq))


def _number(params, key, model):
    if key not in params:
        raise InvalidParams(f"{model} needs parameter {key!r}")
    try:
        return float(params[key])
    except (TypeError, ValueError):
        raise InvalidParams(f"{model} parameter {key}={params[key]!r} is not a number") from None


def _integer(params, key, model):
    value = _number(params, key, model)
    if not value.is_integer():
        raise InvalidParams(f"{model} parameter {key}={params[key]!r} must be an integer")
    return int(value)


def _probability(params, key, model):
    value = _number(params, key, model)
    if not 0.0 <= value <= 1.0:
        raise InvalidParams(f"{model} parameter {key}={value} outside [0, 1]")
    return value


@dataclass(frozen=True)
class EnsembleSpec:
    """
    One random-graph ensemble.

    params by model:
      gnp: p | sbm2: p, q | preferential_attachment: l
      watts_strogatz: k_ring (even), beta | lattice2d: rows, cols
      random_degree_sequence: degrees (list) or "alternative"
    """

    model: str
    n: int
    params: dict = field(default_factory=dict)
    require_connected: bool = True
    max_retries: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "model", canonical_model(self.model))
        object.__setattr__(self, "params", dict(self.params))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidParams(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if int(self.max_retries) < 1:
            raise InvalidParams(f"max_retries must be >= 1, got {self.max_retries}")
        self._validate()

    def _validate(self):
        model, n, params = self.model, self.n, self.params
        if model == GNP:
            _probability(params, "p", model)
        elif model == SBM2:
            _probability(params, "p", model)
            _probability(params, "q", model)
        elif model == PREFERENTIAL_ATTACHMENT:
            l = _integer(params, "l", model)
            if not 1 <= l < n:
                raise InvalidParams(f"preferential attachment needs 1 <= l < n, got l={l}, n={n}")
        elif model == WATTS_STROGATZ:
            k_ring = _integer(params, "k_ring", model)
            if k_ring < 2 or k_ring % 2 or k_ring >= n:
                raise InvalidParams(f"watts_strogatz needs even 2 <= k_ring < n, got {k_ring}")
            _probability(params, "beta", model)
        elif model == LATTICE2D:
            rows = _integer(params, "rows", model)
            cols = _integer(params, "cols", model)
            if rows < 1 or cols < 1 or rows * cols != n:
                raise InvalidParams(f"lattice2d needs rows * cols == n, got {rows} x {cols} vs n={n}")
        elif model == RANDOM_DEGREE_SEQUENCE:
            degrees = params.get("degrees")
            if degrees == MATCH_ALTERNATIVE:
                return
            if not isinstance(degrees, (list, tuple)):
                raise InvalidParams("random_degree_sequence needs a 'degrees' list or 'alternative'")
            try:
                seq = DegreeSequence(tuple(float(d) for d in degrees))
            except (TypeError, ValueError):
                raise InvalidParams("degree sequence entries must be numbers") from None
            if len(seq) != n:
                raise InvalidParams(f"degree sequence has {len(seq)} entries for n={n}")
            if not seq.is_graphical():
                raise InvalidParams("degree sequence is not graphical")

    @property
    def matches_alternative(self):
        return self.model == RANDOM_DEGREE_SEQUENCE and self.params.get("degrees") == MATCH_ALTERNATIVE

    def with_degrees(self, degrees):
        params = dict(self.params, degrees=[int(d) for d in degrees])
        return EnsembleSpec(self.model, self.n, params, self.require_connected, self.max_retries)

    def with_params(self, **changes):
        return EnsembleSpec(self.model, self.n, dict(self.params, **changes),
                            self.require_connected, self.max_retries)

    def to_dict(self):
        params = dict(self.params)
        if isinstance(params.get("degrees"), (list, tuple)):
            params["degrees"] = [int(d) for d in params["degrees"]]
        return {
            "model": self.model,
            "n": self.n,
            "params": params,
            "require_connected": self.require_connected,
            "max_retries": self.max_retries,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                model=data["model"],
                n=data["n"],
                params=data.get("params", {}),
                require_connected=bool(data.get("require_connected", True)),
                max_retries=int(data.get("max_retries", 1000)),
            )
        except (KeyError, TypeError) as e:
            raise InvalidParams(f"bad ensemble spec {data!r}: {e}") from None

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise InvalidParams(f"ensemble spec is not valid JSON: {e}") from None


# ------------------------------------------------------------------ samplers

def _gnp(n, p, rng):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return build_graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def _sbm2(n, p, q, rng):
    # communities {0..ceil(n/2)-1} and the rest
    block = np.arange(n) >= (n + 1) // 2
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(block[iu] == block[ju], p, q)
    keep = rng.random(len(iu)) < prob
    return build_graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def _preferential_attachment(n, l, rng):
    # star on l + 1 vertices with hub l, then each arrival attaches to l
    # distinct vertices drawn by pre-arrival degree
    degree = np.zeros(n)
    edges = [(leaf, l) for leaf in range(l)]
    degree[:l] = 1.0
    degree[l] = l
    for v in range(l + 1, n):
        weights = degree[:v].copy()
        targets = []
        for _ in range(l):
            cdf = np.cumsum(weights)
            pick = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
            pick = min(pick, v - 1)
            while weights[pick] == 0:
                pick -= 1
            targets.append(pick)
            weights[pick] = 0.0
        for t in targets:
            edges.append((t, v))
            degree[t] += 1
        degree[v] = l
    return build_graph(n, edges)


def _ring_lattice_edges(n, k_ring):
    edges = set()
    for i in range(n):
        for step in range(1, k_ring // 2 + 1):
            j = (i + step) % n
            edges.add((min(i, j), max(i, j)))
    return sorted(edges)


def _watts_strogatz(n, k_ring, beta, rng):
    edges = _ring_lattice_edges(n, k_ring)
    adj = [set() for _ in range(n)]
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    for i, j in edges:
        if rng.random() >= beta:
            continue
        targets = [t for t in range(n) if t != i and t not in adj[i]]
        if not targets:
            continue
        t = targets[int(rng.integers(len(targets)))]
        adj[i].discard(j)
        adj[j].discard(i)
        adj[i].add(t)
        adj[t].add(i)
    return build_graph(n, [(i, j) for i in range(n) for j in adj[i] if i < j])


def _random_degree_sequence(n, degrees, rng):
    """Havel–Hakimi realization mixed by SWAPS_PER_EDGE * m double-edge swaps"""
    seed_graph = nx.havel_hakimi_graph([int(d) for d in degrees])
    edges = [tuple(sorted(e)) for e in seed_graph.edges()]
    m = len(edges)
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    if m >= 2:
        for _ in range(SWAPS_PER_EDGE * m):
            a, b = rng.integers(m, size=2)
            flip = rng.random() < 0.5
            if a == b:
                continue
            u, v = edges[a]
            x, y = edges[b]
            if flip:
                x, y = y, x
            # u-v, x-y  ->  u-x, v-y
            if u == x or v == y or x in adj[u] or y in adj[v]:
                continue
            adj[u].discard(v)
            adj[v].discard(u)
            adj[x].discard(y)
            adj[y].discard(x)
            adj[u].add(x)
            adj[x].add(u)
            adj[v].add(y)
            adj[y].add(v)
            edges[a] = (min(u, x), max(u, x))
            edges[b] = (min(v, y), max(v, y))
    return build_graph(n, edges)


def _lattice2d(rows, cols):
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return build_graph(rows * cols, edges)


def draw(spec, rng):
    """One unconditioned draw from the ensemble"""
    params = spec.params
    if spec.model == GNP:
        return _gnp(spec.n, float(params["p"]), rng)
    if spec.model == SBM2:
        return _sbm2(spec.n, float(params["p"]), float(params["q"]), rng)
    if spec.model == PREFERENTIAL_ATTACHMENT:
        return _preferential_attachment(spec.n, int(params["l"]), rng)
    if spec.model == WATTS_STROGATZ:
        return _watts_strogatz(spec.n, int(params["k_ring"]), float(params["beta"]), rng)
    if spec.model == LATTICE2D:
        return _lattice2d(int(params["rows"]), int(params["cols"]))
    if spec.matches_alternative:
        raise InvalidParams("degree sequence 'alternative' must be resolved before sampling")
    return _random_degree_sequence(spec.n, params["degrees"], rng)


def sample(spec, seed):
    """
    Draw one graph; when require_connected is set, redraw on a fresh substream
    until connected, giving up after max_retries rejections.
    """
    for attempt in range(spec.max_retries):
        g = draw(spec, seed.rng(attempt))
        if not spec.require_connected or g.is_connected():
            return g
        logger.debug("rejected disconnected %s draw (stream %d, role %d, attempt %d)",
                     spec.model, seed.stream, seed.role, attempt)
    raise RetriesExhausted(
        f"{spec.model} produced {spec.max_retries} disconnected draws in a row (stream {seed.stream})"
    )


def degree_sequence_of(g):
    return DegreeSequence(tuple(int(d) for d in g.unweighted_degrees()))


def expected_edge_count(spec):
    n, params = spec.n, spec.params
    pairs = math.comb(n, 2)
    if spec.model == GNP:
        return pairs * float(params["p"])
    if spec.model == SBM2:
        a, b = (n + 1) // 2, n // 2
        within = math.comb(a, 2) + math.comb(b, 2)
        return within * float(params["p"]) + a * b * float(params["q"])
    if spec.model == PREFERENTIAL_ATTACHMENT:
        l = int(params["l"])
        return float(l * (n - l))
    if spec.model == WATTS_STROGATZ:
        return n * int(params["k_ring"]) / 2.0
    if spec.model == LATTICE2D:
        rows, cols = int(params["rows"]), int(params["cols"])
        return float(rows * (cols - 1) + cols * (rows - 1))
    if spec.matches_alternative:
        raise UnsupportedModel("edge count of an unresolved 'alternative' degree sequence")
    return sum(params["degrees"]) / 2.0


def volume_match_gnp(alt):
    """G(n, p) edge probability whose expected edge count equals the alternative's"""
    if alt.model not in (PREFERENTIAL_ATTACHMENT, SBM2):
        raise UnsupportedModel(f"volume matching is defined for pa and sbm2, not {alt.model}")
    return expected_edge_count(alt) / math.comb(alt.n, 2)
