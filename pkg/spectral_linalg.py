# spectral_linalg.py
"""
Symmetric eigenvalues, Laplacian pseudoinverse, effective resistance and the
fast-belief-propagation matrix. Everything here is a pure function of its
inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from graph_core import adjacency_matrix, connected_components, laplacian_matrix
from graph_errors import Disconnected, InvalidParams, KOutOfRange, NotSymmetric, SingularSystem

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
DISCONNECTED_TOL = 1e-10
PSD_TOL = 1e-8
# Laplacian eigenvalues within this fraction of max(1, max|lambda|) are exactly 0
ZERO_EIGEN_TOL = 1e-10
# above this size (and for k well below n) use the sparse Lanczos path
DENSE_EIGEN_LIMIT = 2048

ADJACENCY = "adjacency"
LAPLACIAN = "laplacian"
NORMALIZED_LAPLACIAN = "normalized_laplacian"
REPRESENTATIONS = (ADJACENCY, LAPLACIAN, NORMALIZED_LAPLACIAN)


@dataclass(frozen=True)
class Spectrum:
    """
    Sorted eigenvalues of one matrix representation of a graph.

    Adjacency spectra are descending (largest first); both Laplacian spectra
    are ascending (smallest first).
    """

    values: np.ndarray
    representation: str

    @property
    def order(self):
        return "descending" if self.representation == ADJACENCY else "ascending"

    def __len__(self):
        return len(self.values)


def representation_matrix(g, representation):
    if representation == ADJACENCY:
        return adjacency_matrix(g)
    if representation == LAPLACIAN:
        return laplacian_matrix(g)
    if representation == NORMALIZED_LAPLACIAN:
        return laplacian_matrix(g, normalized=True)
    raise InvalidParams(f"unknown representation {representation!r}")


def _check_symmetric(M):
    if M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"matrix is {M.shape[0]}x{M.shape[1]}")
    asym = abs(M - M.T)
    worst = asym.max() if asym.size else 0.0
    if worst > SYMMETRY_TOL:
        raise NotSymmetric(f"max |M - M^T| = {worst:.3g}")


def sym_eigenvalues(M, k="all", which="largest"):
    """
    The k largest (descending) or smallest (ascending) eigenvalues of a
    symmetric matrix. M may be dense or scipy-sparse.
    """
    if which not in ("largest", "smallest"):
        raise InvalidParams(f"which must be 'largest' or 'smallest', got {which!r}")
    n = M.shape[0]
    _check_symmetric(M)
    if k == "all":
        k = n
    k = int(k)
    if not 1 <= k <= n:
        raise KOutOfRange(f"k={k} outside [1, {n}]")

    if n > DENSE_EIGEN_LIMIT and k < n // 4:
        # implicitly restarted Lanczos; fixed start vector keeps it deterministic
        v0 = np.random.default_rng(0).standard_normal(n)
        vals = spla.eigsh(
            sp.csr_matrix(M, dtype=float), k=k, which="LA" if which == "largest" else "SA",
            v0=v0, return_eigenvectors=False,
        )
        vals = np.sort(vals)
    else:
        dense = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        # LAPACK syevr: tridiagonal reduction followed by MRRR, ascending output
        if which == "largest":
            vals = sla.eigvalsh(dense, subset_by_index=[n - k, n - 1])
        else:
            vals = sla.eigvalsh(dense, subset_by_index=[0, k - 1])
    return vals[::-1].copy() if which == "largest" else vals


def graph_spectrum(g, representation, k="all"):
    """Spectrum of A (largest k) or of L / normalized L (smallest k)"""
    M = representation_matrix(g, representation)
    if g.n == 0:
        return Spectrum(np.zeros(0), representation)
    which = "largest" if representation == ADJACENCY else "smallest"
    vals = sym_eigenvalues(M, k=k, which=which)
    if representation != ADJACENCY and vals.size:
        if vals[0] < -PSD_TOL:
            logger.warning("Laplacian eigenvalue %.3g below PSD tolerance", vals[0])
        scale = max(1.0, float(np.abs(vals).max()))
        zero = ((vals < 0) & (vals >= -PSD_TOL)) | (np.abs(vals) <= ZERO_EIGEN_TOL * scale)
        vals = np.where(zero, 0.0, vals)
    return Spectrum(vals, representation)


def _pinv_connected(L):
    n = L.shape[0]
    J = np.full((n, n), 1.0 / n)
    try:
        inv = sla.inv(L + J, check_finite=False)
    except sla.LinAlgError as e:
        raise SingularSystem(f"L + J/n is singular: {e}") from None
    P = inv - J
    return (P + P.T) / 2.0


def laplacian_pseudoinverse(L):
    """
    L+ = (L + J/n)^-1 - J/n for the Laplacian of a connected graph.

    A second-smallest eigenvalue below 1e-10 means the nullspace has more
    than one dimension and the graph is disconnected.
    """
    L = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=float)
    n = L.shape[0]
    _check_symmetric(L)
    if n >= 2:
        lam = sla.eigvalsh(L, subset_by_index=[0, 1])
        if lam[1] < DISCONNECTED_TOL:
            raise Disconnected(f"Laplacian nullspace has dimension > 1 (lambda_2 = {lam[1]:.3g})")
    return _pinv_connected(L)


def _resistance_from_pinv(P):
    diag = np.diag(P)
    R = diag[:, None] + diag[None, :] - 2.0 * P
    np.fill_diagonal(R, 0.0)
    # round-off can leave tiny negatives between strongly coupled vertices
    return np.maximum(R, 0.0)


def resistance_matrix(g):
    """Effective resistance R_uv = L+_uu + L+_vv - 2 L+_uv of a connected graph"""
    comps = connected_components(g)
    if len(comps) > 1:
        raise Disconnected(f"graph has {len(comps)} connected components")
    if g.n == 0:
        return np.zeros((0, 0))
    L = laplacian_matrix(g).toarray()
    return _resistance_from_pinv(_pinv_connected(L))


def renormalized_resistance_matrix(g, penalty=None, beta=None):
    """
    Effective resistance extended to disconnected graphs.

    Pairs in the same component get their within-component resistance; pairs
    in different components get `penalty` (default n). When `beta` is given
    the within-component values are mapped through R / (R + beta) instead and
    cross-component pairs get 1.
    """
    n = g.n
    if penalty is None:
        penalty = float(n)
    if penalty <= 0:
        raise InvalidParams(f"penalty must be positive, got {penalty}")
    if beta is not None and beta <= 0:
        raise InvalidParams(f"beta must be positive, got {beta}")
    cross = 1.0 if beta is not None else float(penalty)
    R = np.full((n, n), cross)
    L = laplacian_matrix(g).toarray()
    for comp in connected_components(g):
        idx = np.asarray(comp)
        if len(idx) == 1:
            R[idx[0], idx[0]] = 0.0
            continue
        block = _resistance_from_pinv(_pinv_connected(L[np.ix_(idx, idx)]))
        if beta is not None:
            block = block / (block + beta)
        R[np.ix_(idx, idx)] = block
    np.fill_diagonal(R, 0.0)
    return R


def default_deltacon_eps(*graphs):
    """1 / (1 + max degree) over all graphs; keeps I + eps^2 D - eps A positive definite"""
    dmax = max((float(g.degrees().max()) if g.n else 0.0) for g in graphs)
    return 1.0 / (1.0 + dmax)


def fbp_matrix(g, eps):
    """Exact dense inverse S = [I + eps^2 D - eps A]^-1 via Cholesky"""
    if not eps > 0:
        raise InvalidParams(f"eps must be positive, got {eps}")
    n = g.n
    A = adjacency_matrix(g).toarray()
    M = np.eye(n) + eps * eps * np.diag(g.degrees()) - eps * A
    try:
        factor = sla.cho_factor(M, lower=True, check_finite=False)
    except sla.LinAlgError as e:
        raise SingularSystem(f"I + eps^2 D - eps A is not positive definite at eps={eps}: {e}") from None
    S = sla.cho_solve(factor, np.eye(n), check_finite=False)
    return (S + S.T) / 2.0
