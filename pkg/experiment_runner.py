# experiment_runner.py
"""
Null-vs-alternative population experiments.

For each sample index i three graphs are drawn on independent substreams of
(master_seed, i, role): G0 and G0' from the null ensemble and G1 from the
alternative. D0[i] = d(G0, G0') and D1[i] = d(G0, G1) for every distance in
the config, reusing the same draws across distances. D1 is then scaled by the
null population: d1_hat = (D1 - mu0) / sigma0.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from graph_distances import SPECTRAL_KINDS, DistanceSpec, GraphCache, compute_distance
from graph_errors import DegenerateNull, EmptySample, InvalidParams, KOutOfRange
from graph_generators import EnsembleSpec, Seed, degree_sequence_of, sample
from sample_workers import IndexRecord, SampleWorkerPool
from spectral_linalg import ADJACENCY, REPRESENTATIONS, graph_spectrum

logger = logging.getLogger(__name__)

ROLE_NULL = 0
ROLE_NULL_PRIME = 1
ROLE_ALT = 2

DEGENERATE_SIGMA = 1e-14
PERCENTILES = (5, 25, 50, 75, 95)
BOXSTATS_HEADER = ("distance_id", "k", "median", "q1", "q3", "p5", "p95")

_KIND_FOR_REPRESENTATION = {rep: kind for kind, rep in SPECTRAL_KINDS.items()}


@dataclass(frozen=True)
class BoxStats:
    median: float
    q1: float
    q3: float
    p5: float
    p95: float
    mean: float

    def to_dict(self):
        return {"median": self.median, "q1": self.q1, "q3": self.q3,
                "p5": self.p5, "p95": self.p95, "mean": self.mean}


def box_stats(samples):
    """
    Median, quartiles and 5th/95th percentiles by linear interpolation
    between order statistics (numpy's default rule), plus the mean.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptySample("box_stats needs at least one sample")
    p5, q1, median, q3, p95 = (float(v) for v in np.percentile(x, PERCENTILES))
    return BoxStats(median=median, q1=q1, q3=q3, p5=p5, p95=p95, mean=float(x.mean()))


@dataclass(frozen=True)
class ExperimentConfig:
    null_spec: EnsembleSpec
    alt_spec: EnsembleSpec
    distances: tuple
    n_samples: int = 500
    master_seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "distances", tuple(self.distances))
        if not self.distances:
            raise InvalidParams("experiment needs at least one distance")
        if isinstance(self.n_samples, bool) or int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise InvalidParams(f"n_samples must be an integer >= 2, got {self.n_samples!r}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        Seed(self.master_seed)
        object.__setattr__(self, "master_seed", int(self.master_seed))
        n_null, n_alt = self.null_spec.n, self.alt_spec.n
        if n_null != n_alt:
            if any(d.needs_correspondence for d in self.distances):
                raise InvalidParams(
                    f"matrix distances need equal sizes, null has n={n_null} and alternative n={n_alt}"
                )
            if self.null_spec.matches_alternative:
                raise InvalidParams("a degree sequence matched to the alternative needs equal sizes")
        for d in self.distances:
            if d.is_spectral and d.k != "all" and d.k > min(n_null, n_alt):
                raise KOutOfRange(f"{d.distance_id}: k exceeds graph size {min(n_null, n_alt)}")

    @property
    def distance_ids(self):
        return [d.distance_id for d in self.distances]

    def to_dict(self):
        return {
            "name": self.name,
            "null": self.null_spec.to_dict(),
            "alternative": self.alt_spec.to_dict(),
            "distances": [d.to_dict() for d in self.distances],
            "n_samples": self.n_samples,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                null_spec=EnsembleSpec.from_dict(data["null"]),
                alt_spec=EnsembleSpec.from_dict(data["alternative"]),
                distances=[DistanceSpec.from_dict(d) for d in data["distances"]],
                n_samples=data.get("n_samples", 500),
                master_seed=data.get("master_seed", 0),
                name=data.get("name", "custom"),
            )
        except (KeyError, TypeError) as e:
            raise InvalidParams(f"bad experiment config: {e!r}") from None


@dataclass(frozen=True)
class ScaledSampleSet:
    distance_id: str
    d0: np.ndarray
    d1: np.ndarray
    mu0: float
    sigma0: float
    d1_hat: np.ndarray
    fingerprints: tuple = field(default=(), repr=False)

    @property
    def box(self):
        return box_stats(self.d1_hat)

    def to_dict(self):
        return {
            "distance_id": self.distance_id,
            "d0": self.d0.tolist(),
            "d1": self.d1.tolist(),
            "d1_hat": self.d1_hat.tolist(),
            "mu0": self.mu0,
            "sigma0": self.sigma0,
            "box": self.box.to_dict(),
        }


def scale_samples(distance_id, d0, d1, fingerprints=()):
    d0 = np.asarray(d0, dtype=float)
    d1 = np.asarray(d1, dtype=float)
    mu0 = float(np.mean(d0))
    sigma0 = float(np.std(d0, ddof=1))
    if not sigma0 >= DEGENERATE_SIGMA:
        raise DegenerateNull(f"{distance_id}: null distances have standard deviation {sigma0:.3g}")
    d1_hat = (d1 - mu0) / sigma0
    return ScaledSampleSet(distance_id, d0, d1, mu0, sigma0, d1_hat, tuple(fingerprints))


def sample_index(cfg, index):
    """Draw the three graphs of one sample index and evaluate every distance on them"""
    seed = Seed(cfg.master_seed, index)
    g1 = sample(cfg.alt_spec, seed.for_role(ROLE_ALT))
    null = cfg.null_spec
    if null.matches_alternative:
        null = null.with_degrees(degree_sequence_of(g1).degrees)
    g0 = sample(null, seed.for_role(ROLE_NULL))
    g0_prime = sample(null, seed.for_role(ROLE_NULL_PRIME))

    cache = GraphCache()
    d0 = tuple(compute_distance(g0, g0_prime, d, cache) for d in cfg.distances)
    d1 = tuple(compute_distance(g0, g1, d, cache) for d in cfg.distances)
    return IndexRecord(index, d0, d1, g0.fingerprint())


def _collect(cfg, threads):
    logger.info("experiment %s: %d samples, %d distances, %d thread(s)",
                cfg.name, cfg.n_samples, len(cfg.distances), threads)
    pool = SampleWorkerPool(partial(sample_index, cfg), threads=threads)
    records = pool.run(cfg.n_samples)
    D0 = np.array([r.d0 for r in records], dtype=float)
    D1 = np.array([r.d1 for r in records], dtype=float)
    return D0, D1, tuple(r.fingerprint for r in records)


def run_experiment(cfg, threads=1):
    """One ScaledSampleSet per distance, in config order"""
    D0, D1, fingerprints = _collect(cfg, threads)
    sets = []
    for j, spec in enumerate(cfg.distances):
        scaled = scale_samples(spec.distance_id, D0[:, j], D1[:, j], fingerprints)
        logger.debug("%s: mu0=%.6g sigma0=%.6g median d1_hat=%.4g",
                     spec.distance_id, scaled.mu0, scaled.sigma0, scaled.box.median)
        sets.append(scaled)
    return sets


def sweep_k_values(representation, n):
    """Default k for a sweep: 1..n, or 2..n for the Laplacians whose smallest eigenvalue is always 0"""
    start = 1 if representation == ADJACENCY else 2
    return list(range(start, n + 1))


def lambda_k_sweep(cfg, representation, k_values, threads=1):
    """
    Box statistics of d1_hat for the lambda_k distance at each k.

    All k share the same graph draws; each graph is decomposed once and the
    prefixes are read off the cached spectrum. A k whose null distances are
    constant gets None instead of BoxStats; DegenerateNull is raised only when
    every k is degenerate.
    """
    if representation not in REPRESENTATIONS:
        raise InvalidParams(f"unknown representation {representation!r}")
    k_values = [int(k) for k in k_values]
    if not k_values:
        raise InvalidParams("k_values is empty")
    n = min(cfg.null_spec.n, cfg.alt_spec.n)
    for k in k_values:
        if not 1 <= k <= n:
            raise KOutOfRange(f"k={k} outside [1, {n}]")

    kind = _KIND_FOR_REPRESENTATION[representation]
    p_norm = next((d.p_norm for d in cfg.distances if d.kind == kind), 2.0)
    specs = [DistanceSpec(kind, k=k, p_norm=p_norm) for k in k_values]
    D0, D1, _ = _collect(replace(cfg, distances=specs), threads)
    rows, degenerate = [], []
    for j, (k, spec) in enumerate(zip(k_values, specs)):
        try:
            rows.append((k, scale_samples(spec.distance_id, D0[:, j], D1[:, j]).box))
        except DegenerateNull as e:
            logger.warning("%s; sweep row left empty", e)
            degenerate.append(str(e))
            rows.append((k, None))
    if len(degenerate) == len(rows):
        raise DegenerateNull("; ".join(degenerate))
    return rows


def ensemble_spectral_density(spec, representation, n_graphs, bins=50, seed=0):
    """Histogram density of eigenvalues pooled over n_graphs draws from one ensemble"""
    if n_graphs < 1:
        raise InvalidParams(f"n_graphs must be positive, got {n_graphs}")
    if spec.matches_alternative:
        raise InvalidParams("spectral density needs an explicit degree sequence")
    values = [graph_spectrum(sample(spec, Seed(seed, i)), representation).values for i in range(n_graphs)]
    density, edges = np.histogram(np.concatenate(values), bins=bins, density=True)
    return edges, density


# ------------------------------------------------------------------ output

def results_payload(cfg, sets, sweeps=None):
    payload = {
        "config": cfg.to_dict(),
        "g0_fingerprints": list(sets[0].fingerprints) if sets else [],
        "results": [s.to_dict() for s in sets],
    }
    if sweeps:
        payload["sweeps"] = {
            rep: [{"k": k, "box": None if box is None else box.to_dict()} for k, box in rows] for rep, rows in sweeps.items()
        }
    return payload


def results_to_json(cfg, sets, sweeps=None):
    return json.dumps(results_payload(cfg, sets, sweeps), sort_keys=True, indent=1) + "\n"


def _row(distance_id, k, box):
    if box is None:
        return [distance_id, k, "", "", "", "", ""]
    return [distance_id, k, repr(box.median), repr(box.q1), repr(box.q3), repr(box.p5), repr(box.p95)]


def boxstats_csv(cfg, sets, sweeps=None):
    """distance_id,k,median,q1,q3,p5,p95 per distance, then one row per swept k"""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BOXSTATS_HEADER)
    for spec, s in zip(cfg.distances, sets):
        writer.writerow(_row(s.distance_id, spec.k if spec.is_spectral else "", s.box))
    for rep, rows in (sweeps or {}).items():
        kind = _KIND_FOR_REPRESENTATION[rep]
        p_norm = next((d.p_norm for d in cfg.distances if d.kind == kind), 2.0)
        for k, box in rows:
            writer.writerow(_row(DistanceSpec(kind, k=k, p_norm=p_norm).distance_id, k, box))
    return out.getvalue()
