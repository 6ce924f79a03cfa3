# graph_distances.py
"""
Graph distance measures.

Spectral distances (adjacency, Laplacian, normalized Laplacian) compare sorted
eigenvalues and work across graph sizes. Matrix distances (edit, resistance,
DeltaCon) compare vertex-affinity matrices entrywise and need node
correspondence, i.e. equal vertex counts with vertices matched by id.
NetSimile compares moment signatures of per-vertex features.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
import scipy.stats
from scipy.spatial.distance import canberra

from graph_errors import InvalidParams, NegativeAffinity, SizeMismatch
from spectral_linalg import (
    ADJACENCY,
    DENSE_EIGEN_LIMIT,
    LAPLACIAN,
    NORMALIZED_LAPLACIAN,
    default_deltacon_eps,
    fbp_matrix,
    graph_spectrum,
    renormalized_resistance_matrix,
    resistance_matrix,
)

logger = logging.getLogger(__name__)

SPECTRAL_ADJACENCY = "spectral_adjacency"
SPECTRAL_LAPLACIAN = "spectral_laplacian"
SPECTRAL_NORMALIZED_LAPLACIAN = "spectral_normalized_laplacian"
EDIT = "edit"
RESISTANCE = "resistance"
RESISTANCE_RENORMALIZED = "resistance_renormalized"
DELTACON = "deltacon"
NETSIMILE = "netsimile"

ALL_DISTANCES = (
    SPECTRAL_ADJACENCY,
    SPECTRAL_LAPLACIAN,
    SPECTRAL_NORMALIZED_LAPLACIAN,
    EDIT,
    RESISTANCE,
    RESISTANCE_RENORMALIZED,
    DELTACON,
    NETSIMILE,
)
SPECTRAL_KINDS = {
    SPECTRAL_ADJACENCY: ADJACENCY,
    SPECTRAL_LAPLACIAN: LAPLACIAN,
    SPECTRAL_NORMALIZED_LAPLACIAN: NORMALIZED_LAPLACIAN,
}
MATRIX_KINDS = (EDIT, RESISTANCE, RESISTANCE_RENORMALIZED, DELTACON)

NEGATIVE_AFFINITY_TOL = 1e-12

FEATURE_NAMES = (
    "degree",
    "clustering",
    "mean_neighbor_degree",
    "mean_neighbor_clustering",
    "egonet_edges",
    "egonet_out_edges",
    "egonet_neighbors",
)
AGGREGATE_NAMES = ("mean", "median", "std", "skewness", "kurtosis")
SIGNATURE_LENGTH = len(FEATURE_NAMES) * len(AGGREGATE_NAMES)


def _format_number(x):
    if x == math.inf:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class DistanceSpec:
    """
    Which distance to compute and its hyperparameters.

    k:       eigenvalue count or "all" (spectral kinds only)
    p_norm:  l_p exponent for spectral comparison, 1 <= p <= inf
    eps:     DeltaCon parameter or "auto" (1 / (1 + max degree of the pair))
    penalty: cross-component resistance for the renormalized variant, or "auto" (= n)
    """

    kind: str
    k: object = "all"
    p_norm: float = 2.0
    eps: object = "auto"
    penalty: object = "auto"

    def __post_init__(self):
        if self.kind not in ALL_DISTANCES:
            raise InvalidParams(f"unknown distance kind {self.kind!r}")
        if self.k != "all":
            if isinstance(self.k, (bool, str)) or int(self.k) != self.k or self.k < 1:
                raise InvalidParams(f"k must be a positive integer or 'all', got {self.k!r}")
            object.__setattr__(self, "k", int(self.k))
        try:
            p = float(self.p_norm)
            eps_ok = self.eps == "auto" or float(self.eps) > 0
            penalty_ok = self.penalty == "auto" or float(self.penalty) > 0
        except (TypeError, ValueError):
            raise InvalidParams(f"bad numeric parameter in {self!r}") from None
        if not p >= 1:
            raise InvalidParams(f"p_norm must be >= 1, got {self.p_norm}")
        object.__setattr__(self, "p_norm", p)
        if not eps_ok:
            raise InvalidParams(f"eps must be positive or 'auto', got {self.eps!r}")
        if not penalty_ok:
            raise InvalidParams(f"penalty must be positive or 'auto', got {self.penalty!r}")
        if self.eps != "auto":
            object.__setattr__(self, "eps", float(self.eps))
        if self.penalty != "auto":
            object.__setattr__(self, "penalty", float(self.penalty))

    @property
    def is_spectral(self):
        return self.kind in SPECTRAL_KINDS

    @property
    def needs_correspondence(self):
        return self.kind in MATRIX_KINDS

    @property
    def distance_id(self):
        if self.is_spectral:
            return f"{self.kind}[k={self.k},p={_format_number(self.p_norm)}]"
        if self.kind == DELTACON:
            eps = self.eps if self.eps == "auto" else _format_number(self.eps)
            return f"{self.kind}[eps={eps}]"
        if self.kind == RESISTANCE_RENORMALIZED:
            pen = self.penalty if self.penalty == "auto" else _format_number(self.penalty)
            return f"{self.kind}[penalty={pen}]"
        return self.kind

    def with_k(self, k):
        return DistanceSpec(self.kind, k, self.p_norm, self.eps, self.penalty)

    def to_dict(self):
        out = asdict(self)
        if out["p_norm"] == math.inf:
            out["p_norm"] = "inf"
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if data.get("p_norm") == "inf":
            data["p_norm"] = math.inf
        return cls(**data)


@dataclass(frozen=True)
class Signature:
    """NetSimile signature: 7 features x (mean, median, std, skewness, kurtosis), feature-major"""

    values: np.ndarray
    weighted_input: bool = False

    @staticmethod
    def labels():
        return [f"{f}.{a}" for f in FEATURE_NAMES for a in AGGREGATE_NAMES]


class GraphCache:
    """
    Per-graph memo of spectra, affinity matrices and signatures.

    Lets several distances (or several lambda_k prefixes) share one
    decomposition of the same graph. Holds a reference to each graph so ids
    stay unique for the cache's lifetime.
    """

    def __init__(self):
        self._store = {}

    def get(self, g, key, compute):
        slot = (id(g), key)
        hit = self._store.get(slot)
        if hit is not None and hit[0] is g:
            return hit[1]
        value = compute()
        self._store[slot] = (g, value)
        return value


def _cached(cache, g, key, compute):
    return compute() if cache is None else cache.get(g, key, compute)


def _require_same_size(g1, g2):
    if g1.n != g2.n:
        raise SizeMismatch(g1.n, g2.n)


# ------------------------------------------------------------------ spectral

def _spectrum_values(g, representation, k, cache):
    # full decomposition unless the graph is large enough for the Lanczos path
    if k != "all" and g.n > DENSE_EIGEN_LIMIT and k < g.n:
        return _cached(cache, g, ("spectrum", representation, k),
                       lambda: graph_spectrum(g, representation, k).values)
    return _cached(cache, g, ("spectrum", representation, "all"),
                   lambda: graph_spectrum(g, representation).values)


def lp_norm(diff, p):
    if diff.size == 0:
        return 0.0
    a = np.abs(diff)
    if p == math.inf:
        return float(a.max())
    if p == 2.0:
        return float(np.sqrt(np.sum(a * a)))
    if p == 1.0:
        return float(np.sum(a))
    return float(np.sum(a ** p) ** (1.0 / p))


def spectral_distance(g1, g2, spec, cache=None):
    """
    l_p distance between the k-prefixes of two sorted spectra.

    Adjacency compares the k largest eigenvalues, the Laplacians the k
    smallest. A shorter spectrum is zero-padded at the end away from the
    compared prefix.
    """
    representation = SPECTRAL_KINDS[spec.kind]
    s1 = _spectrum_values(g1, representation, spec.k, cache)
    s2 = _spectrum_values(g2, representation, spec.k, cache)
    size = max(len(s1), len(s2))
    k = size if spec.k == "all" else spec.k
    size = max(size, k)
    a = np.zeros(size)
    b = np.zeros(size)
    a[: len(s1)] = s1
    b[: len(s2)] = s2
    return lp_norm(a[:k] - b[:k], spec.p_norm)


# -------------------------------------------------------------------- matrix

def edit_distance(g1, g2):
    """Sum over all ordered (i, j) of |A_ij - A'_ij|; each differing edge counts twice"""
    _require_same_size(g1, g2)
    return float(abs(g1.csr - g2.csr).sum())


def _resistance(g, renormalized, penalty, cache):
    if renormalized:
        return _cached(cache, g, ("renormalized_resistance", penalty),
                       lambda: renormalized_resistance_matrix(g, penalty=penalty))
    return _cached(cache, g, ("resistance",), lambda: resistance_matrix(g))


def resistance_distance(g1, g2, renormalized=False, penalty=None, cache=None):
    """Entrywise l1 difference of the effective-resistance matrices (both triangles)"""
    _require_same_size(g1, g2)
    R1 = _resistance(g1, renormalized, penalty, cache)
    R2 = _resistance(g2, renormalized, penalty, cache)
    return float(np.abs(R1 - R2).sum())


def _affinity_root(S):
    """Entrywise sqrt, clamping round-off negatives (>= -1e-12) to zero"""
    low = S.min() if S.size else 0.0
    if low < -NEGATIVE_AFFINITY_TOL:
        raise NegativeAffinity(f"belief-propagation matrix has entry {low:.3g}")
    clamped = int(np.count_nonzero(S < 0))
    if clamped:
        logger.debug("clamped %d tiny negative affinity entries to 0", clamped)
    return np.sqrt(np.maximum(S, 0.0))


def resolve_eps(eps, g1, g2):
    return default_deltacon_eps(g1, g2) if eps == "auto" else float(eps)


def matusita_difference(S1, S2):
    diff = _affinity_root(S1) - _affinity_root(S2)
    return float(np.sqrt(np.sum(diff * diff)))


def deltacon_distance(g1, g2, eps="auto", cache=None):
    """Matusita difference of the two fast-belief-propagation matrices, one shared eps"""
    _require_same_size(g1, g2)
    eps = resolve_eps(eps, g1, g2)
    S1 = _cached(cache, g1, ("fbp", eps), lambda: fbp_matrix(g1, eps))
    S2 = _cached(cache, g2, ("fbp", eps), lambda: fbp_matrix(g2, eps))
    return matusita_difference(S1, S2)


def deltacon_similarity(g1, g2, eps="auto", cache=None):
    """Similarity in (0, 1]: 1 / (1 + DeltaCon distance)"""
    return 1.0 / (1.0 + deltacon_distance(g1, g2, eps, cache))


# ----------------------------------------------------------------- netsimile

def netsimile_features(g):
    """n x 7 feature matrix, columns in FEATURE_NAMES order (edge weights ignored)"""
    n = g.n
    if n == 0:
        return np.zeros((0, len(FEATURE_NAMES)))
    A = g.csr.copy()
    A.data[:] = 1.0
    d = np.asarray(A.sum(axis=1)).ravel()
    triangles = np.asarray((A @ A).multiply(A).sum(axis=1)).ravel() / 2.0

    has_pair = d >= 2
    clustering = np.zeros(n)
    clustering[has_pair] = 2.0 * triangles[has_pair] / (d[has_pair] * (d[has_pair] - 1.0))

    has_nbr = d > 0
    nbr_degree = np.zeros(n)
    nbr_clustering = np.zeros(n)
    nbr_degree[has_nbr] = (A @ d)[has_nbr] / d[has_nbr]
    nbr_clustering[has_nbr] = (A @ clustering)[has_nbr] / d[has_nbr]

    ego_edges = d + triangles
    ego_degree_sum = d + A @ d
    ego_out = ego_degree_sum - 2.0 * ego_edges

    # vertices within two hops, minus the egonet itself
    B = (A + sp.identity(n, format="csr")).tocsr()
    reach = (B @ B).tocsr()
    ego_nbrs = np.diff(reach.indptr).astype(float) - (d + 1.0)

    return np.column_stack(
        [d, clustering, nbr_degree, nbr_clustering, ego_edges, ego_out, ego_nbrs]
    )


def _aggregate(col):
    n = len(col)
    if n == 0:
        return [0.0] * len(AGGREGATE_NAMES)
    mean = float(np.mean(col))
    median = float(np.median(col))
    std = float(np.std(col, ddof=1)) if n > 1 else 0.0
    if n < 2 or np.ptp(col) == 0:
        skew = kurt = 0.0
    else:
        skew = float(scipy.stats.skew(col))
        kurt = float(scipy.stats.kurtosis(col))
    return [mean, median, std, skew, kurt]


def netsimile_signature(g):
    """Aggregate the per-vertex feature columns into a 35-entry signature"""
    if g.is_weighted:
        logger.warning("NetSimile ignores edge weights; treating %r as unweighted", g)
    feats = netsimile_features(g)
    values = []
    for j in range(len(FEATURE_NAMES)):
        values.extend(_aggregate(feats[:, j]))
    values = np.nan_to_num(np.asarray(values, dtype=float), nan=0.0, posinf=0.0, neginf=0.0)
    return Signature(values, weighted_input=g.is_weighted)


def netsimile_distance(g1, g2, cache=None):
    """Canberra distance between signatures; 0/0 terms contribute nothing"""
    s1 = _cached(cache, g1, ("signature",), lambda: netsimile_signature(g1)).values
    s2 = _cached(cache, g2, ("signature",), lambda: netsimile_signature(g2)).values
    return float(canberra(s1, s2))


# ------------------------------------------------------------------ dispatch

def compute_distance(g1, g2, spec, cache=None):
    kind = spec.kind
    if spec.is_spectral:
        return spectral_distance(g1, g2, spec, cache)
    if kind == EDIT:
        return edit_distance(g1, g2)
    if kind == RESISTANCE:
        return resistance_distance(g1, g2, cache=cache)
    if kind == RESISTANCE_RENORMALIZED:
        penalty = None if spec.penalty == "auto" else float(spec.penalty)
        return resistance_distance(g1, g2, renormalized=True, penalty=penalty, cache=cache)
    if kind == DELTACON:
        return deltacon_distance(g1, g2, spec.eps, cache)
    return netsimile_distance(g1, g2, cache)


def _parse_number(text, convert, what):
    try:
        return convert(text)
    except (TypeError, ValueError):
        raise InvalidParams(f"{what} must be a number, got {text!r}") from None


def parse_k(text):
    if text in (None, "all"):
        return "all"
    return _parse_number(text, int, "k")


def parse_p_norm(text):
    if text in ("inf", "infinity", math.inf):
        return math.inf
    return _parse_number(text, float, "p_norm")


def parse_eps(text):
    if text in (None, "auto"):
        return "auto"
    return _parse_number(text, float, "eps")


def parse_distance_list(text, k="all", p_norm=2.0, eps="auto", penalty="auto"):
    """'edit,deltacon' -> DistanceSpecs; 'all' expands to every kind"""
    names = [name.strip() for name in text.split(",") if name.strip()]
    if not names:
        raise InvalidParams("empty distance list")
    kinds = []
    for name in names:
        for kind in ALL_DISTANCES if name == "all" else (name,):
            if kind not in kinds:
                kinds.append(kind)
    return [DistanceSpec(kind, k=k if kind in SPECTRAL_KINDS else "all",
                         p_norm=p_norm, eps=eps, penalty=penalty) for kind in kinds]
