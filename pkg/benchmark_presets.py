# benchmark_presets.py
"""
Named benchmark scenarios: which null ensemble is compared against which
alternative, at n=100 with 500 samples unless overridden.

    sbm          G(n, 0.12) vs two-community SBM (p=0.228, q=0.012)
    sbm-matched  as sbm, null p volume-matched exactly (0.1189...)
    sbm-dense    volume-matched G(n, p) vs SBM (p=0.495, q=0.005)
    pa           G(n, 0.12) vs preferential attachment (l=6)
    pa-vs-rddg   degree-matched random graph vs preferential attachment
    ws           volume-matched G(n, p) vs Watts-Strogatz (k_ring=4, beta=0.1)
    lattice      degree-matched random graph vs 10x10 grid
"""

import logging

from experiment_runner import ExperimentConfig
from graph_distances import (
    ALL_DISTANCES,
    RESISTANCE,
    RESISTANCE_RENORMALIZED,
    SPECTRAL_ADJACENCY,
    SPECTRAL_NORMALIZED_LAPLACIAN,
    DistanceSpec,
)
from graph_errors import InvalidParams
from graph_generators import (
    GNP,
    LATTICE2D,
    MATCH_ALTERNATIVE,
    PREFERENTIAL_ATTACHMENT,
    RANDOM_DEGREE_SEQUENCE,
    SBM2,
    WATTS_STROGATZ,
    EnsembleSpec,
    degree_sequence_of,
    draw,
    volume_match_gnp,
)

logger = logging.getLogger(__name__)

DEFAULT_N = 100
DEFAULT_SAMPLES = 500
NULL_P = 0.12
SBM_P, SBM_Q = 0.228, 0.012
DENSE_SBM_P, DENSE_SBM_Q = 0.495, 0.005
PA_L = 6
WS_K_RING, WS_BETA = 4, 0.1
LATTICE_SIDE = 10


def default_distances(renormalized_only=False):
    """All eight kinds at k=all; plain resistance is dropped when the null may be disconnected"""
    kinds = [k for k in ALL_DISTANCES if not (renormalized_only and k == RESISTANCE)]
    return [DistanceSpec(kind) for kind in kinds]


def _sbm():
    alt = EnsembleSpec(SBM2, DEFAULT_N, {"p": SBM_P, "q": SBM_Q})
    null = EnsembleSpec(GNP, DEFAULT_N, {"p": NULL_P})
    # the community signal sits in the second eigenvalue
    distances = default_distances() + [
        DistanceSpec(SPECTRAL_ADJACENCY, k=2),
        DistanceSpec(SPECTRAL_NORMALIZED_LAPLACIAN, k=2),
    ]
    return null, alt, distances


def _sbm_matched():
    null, alt, distances = _sbm()
    return null.with_params(p=volume_match_gnp(alt)), alt, distances


def _sbm_dense():
    alt = EnsembleSpec(SBM2, DEFAULT_N, {"p": DENSE_SBM_P, "q": DENSE_SBM_Q})
    null = EnsembleSpec(GNP, DEFAULT_N, {"p": volume_match_gnp(alt)})
    return null, alt, _sbm()[2]


def _pa():
    alt = EnsembleSpec(PREFERENTIAL_ATTACHMENT, DEFAULT_N, {"l": PA_L})
    null = EnsembleSpec(GNP, DEFAULT_N, {"p": NULL_P})
    return null, alt, default_distances()


def _pa_vs_rddg():
    alt = EnsembleSpec(PREFERENTIAL_ATTACHMENT, DEFAULT_N, {"l": PA_L})
    null = EnsembleSpec(RANDOM_DEGREE_SEQUENCE, DEFAULT_N, {"degrees": MATCH_ALTERNATIVE})
    return null, alt, default_distances()


def _ws():
    alt = EnsembleSpec(WATTS_STROGATZ, DEFAULT_N, {"k_ring": WS_K_RING, "beta": WS_BETA})
    p = DEFAULT_N * WS_K_RING / 2 / (DEFAULT_N * (DEFAULT_N - 1) / 2)
    null = EnsembleSpec(GNP, DEFAULT_N, {"p": p}, require_connected=False)
    return null, alt, default_distances(renormalized_only=True)


def _lattice():
    params = {"rows": LATTICE_SIDE, "cols": LATTICE_SIDE}
    alt = EnsembleSpec(LATTICE2D, LATTICE_SIDE * LATTICE_SIDE, params)
    # the grid is deterministic, so any rng works
    degrees = degree_sequence_of(draw(alt, rng=None)).degrees
    null = EnsembleSpec(RANDOM_DEGREE_SEQUENCE, alt.n, {"degrees": list(degrees)})
    return null, alt, default_distances()


PRESETS = {
    "sbm": _sbm,
    "sbm-matched": _sbm_matched,
    "sbm-dense": _sbm_dense,
    "pa": _pa,
    "pa-vs-rddg": _pa_vs_rddg,
    "ws": _ws,
    "lattice": _lattice,
}
PRESET_NAMES = tuple(PRESETS)


def preset_config(name, n_samples=DEFAULT_SAMPLES, master_seed=0, distances=None):
    """ExperimentConfig for a named scenario; `distances` replaces the preset's list"""
    if name not in PRESETS:
        raise InvalidParams(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    null, alt, preset_distances = PRESETS[name]()
    if distances is None:
        distances = preset_distances
    elif name == "ws":
        # sparse null draws are often disconnected
        distances = [DistanceSpec(RESISTANCE_RENORMALIZED, penalty=d.penalty) if d.kind == RESISTANCE else d
                     for d in distances]
    logger.debug("preset %s: null %s, alternative %s", name, null.to_json(), alt.to_json())
    return ExperimentConfig(null, alt, distances, n_samples=n_samples, master_seed=master_seed, name=name)
