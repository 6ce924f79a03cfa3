#!/usr/bin/env python3
"""
Oracle tests for eigenvalues, pseudoinverse, resistance and the
belief-propagation matrix
"""

import itertools
import math

import networkx as nx
import numpy as np

from graph_core import adjacency_matrix, build_graph, empty_graph, laplacian_matrix
from graph_errors import Disconnected, InvalidParams, KOutOfRange, NotSymmetric
from spectral_linalg import (
    ADJACENCY,
    LAPLACIAN,
    NORMALIZED_LAPLACIAN,
    default_deltacon_eps,
    fbp_matrix,
    graph_spectrum,
    laplacian_pseudoinverse,
    renormalized_resistance_matrix,
    resistance_matrix,
    sym_eigenvalues,
)

K3 = [(0, 1), (1, 2), (0, 2)]


def expect_error(error, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except error as e:
        return e
    raise AssertionError(f"expected {error.__name__}")


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def random_connected_graph(n, p, seed):
    while True:
        g = random_graph(n, p, seed)
        if g.is_connected():
            return g
        seed += 1000


def from_networkx(G):
    return build_graph(G.number_of_nodes(), list(G.edges()))


def small_graphs(max_n):
    """Every unlabeled simple graph on 1..max_n vertices"""
    return [G for G in nx.graph_atlas_g() if 1 <= G.number_of_nodes() <= max_n]


def charpoly(M):
    """Faddeev-LeVerrier in exact integer arithmetic, highest degree first"""
    A = np.asarray(M, dtype=np.int64)
    n = len(A)
    coeffs = [1]
    B = np.zeros((n, n), dtype=np.int64)
    for k in range(1, n + 1):
        B = A @ B + coeffs[-1] * np.eye(n, dtype=np.int64)
        trace = -int(np.trace(A @ B))
        assert trace % k == 0
        coeffs.append(trace // k)
    return coeffs


def test_sym_eigenvalues_examples():
    assert np.allclose(sym_eigenvalues(np.eye(3)), [1, 1, 1])
    K3_A = adjacency_matrix(build_graph(3, K3))
    assert np.allclose(sym_eigenvalues(K3_A), [2, -1, -1], atol=1e-12)
    P3_A = adjacency_matrix(build_graph(3, [(0, 1), (1, 2)]))
    assert np.allclose(sym_eigenvalues(P3_A), [math.sqrt(2), 0, -math.sqrt(2)], atol=1e-12)

    assert np.allclose(sym_eigenvalues(K3_A, k=1), [2])
    assert np.allclose(sym_eigenvalues(K3_A, k=2, which="smallest"), [-1, -1])

    expect_error(KOutOfRange, sym_eigenvalues, np.eye(3), k=0)
    expect_error(KOutOfRange, sym_eigenvalues, np.eye(3), k=4)
    expect_error(NotSymmetric, sym_eigenvalues, np.array([[0.0, 1.0], [0.0, 0.0]]))
    expect_error(InvalidParams, sym_eigenvalues, np.eye(2), which="middle")
    print("✓ sym_eigenvalues examples")


def test_spectra_match_characteristic_polynomial():
    graphs = small_graphs(4)
    assert sum(1 for G in graphs if G.number_of_nodes() == 4) == 11
    for G in graphs:
        g = from_networkx(G)
        for M in (adjacency_matrix(g).toarray(), laplacian_matrix(g).toarray()):
            vals = sym_eigenvalues(M)
            assert np.allclose(np.poly(vals), charpoly(M), atol=1e-8)
    print("✓ spectra match characteristic polynomials on all graphs with n <= 4")


def test_trace_identities():
    rng = np.random.default_rng(11)
    for seed in range(100):
        n = int(rng.integers(5, 60))
        g = random_graph(n, float(rng.uniform(0.05, 0.5)), seed)
        A = graph_spectrum(g, ADJACENCY).values
        L = graph_spectrum(g, LAPLACIAN).values
        triangles = sum(nx.triangles(nx.from_scipy_sparse_array(g.csr)).values()) / 3
        assert abs(A.sum()) < 1e-6
        assert abs(L.sum() - 2 * g.m) < 1e-6
        assert abs(np.sum(A ** 3) - 6 * triangles) < 1e-6
    print("✓ trace identities")


def test_spectrum_order_and_ranges():
    g = build_graph(6, [(0, 1), (1, 2), (3, 4)])
    A = graph_spectrum(g, ADJACENCY)
    L = graph_spectrum(g, LAPLACIAN)
    N = graph_spectrum(g, NORMALIZED_LAPLACIAN)
    assert A.order == "descending" and L.order == "ascending"
    assert (np.diff(A.values) <= 0).all()
    assert (np.diff(L.values) >= 0).all() and (np.diff(N.values) >= 0).all()
    # three components: 0 has multiplicity 3
    assert int(np.sum(L.values < 1e-10)) == 3
    assert L.values[0] >= 0 and N.values[0] >= 0
    assert N.values[-1] <= 2 + 1e-8
    assert len(graph_spectrum(g, LAPLACIAN, k=2)) == 2

    for seed in range(20):
        h = random_graph(15, 0.3, seed)
        vals = graph_spectrum(h, NORMALIZED_LAPLACIAN).values
        assert vals.min() >= -1e-8 and vals.max() <= 2 + 1e-8
        perm = np.random.default_rng(seed).permutation(h.n)
        assert np.allclose(graph_spectrum(h.permuted(perm), ADJACENCY).values,
                           graph_spectrum(h, ADJACENCY).values, atol=1e-8)
    print("✓ spectrum order and ranges")


def test_laplacian_zero_eigenvalues_are_exact():
    g = build_graph(6, [(0, 1), (1, 2), (3, 4)])
    vals = graph_spectrum(g, LAPLACIAN).values
    assert list(vals[:3]) == [0.0, 0.0, 0.0] and vals[3] > 0

    for seed in range(20):
        h = random_connected_graph(40, 0.2, seed)
        for rep in (LAPLACIAN, NORMALIZED_LAPLACIAN):
            vals = graph_spectrum(h, rep).values
            assert vals[0] == 0.0 and vals[1] > 1e-6, (rep, seed)
            assert graph_spectrum(h, rep, k=1).values[0] == 0.0
    print("✓ Laplacian zero eigenvalues are exact")


def test_regular_graph_spectra():
    # 4-regular circulant: L eigenvalues are 4 - adjacency eigenvalues
    n = 12
    g = build_graph(n, [(i, (i + s) % n) for i in range(n) for s in (1, 2)])
    A = graph_spectrum(g, ADJACENCY).values
    L = graph_spectrum(g, LAPLACIAN).values
    assert np.allclose(L, 4 - A, atol=1e-10)
    print("✓ regular graph spectra")


def test_sparse_lanczos_path():
    n = 2100
    g = random_graph(n, 0.004, 5)
    A = adjacency_matrix(g)
    top = sym_eigenvalues(A, k=4)
    dense = np.linalg.eigvalsh(A.toarray())[::-1][:4]
    assert np.allclose(top, dense, atol=1e-6)
    print("✓ sparse Lanczos path")


def test_laplacian_pseudoinverse():
    K2 = laplacian_matrix(build_graph(2, [(0, 1)]))
    assert np.allclose(laplacian_pseudoinverse(K2), [[0.25, -0.25], [-0.25, 0.25]], atol=1e-12)

    L = laplacian_matrix(build_graph(3, K3)).toarray()
    P = laplacian_pseudoinverse(L)
    assert np.abs(L @ P @ L - L).max() < 1e-8
    assert np.allclose(P, np.linalg.pinv(L), atol=1e-10)

    expect_error(Disconnected, laplacian_pseudoinverse, laplacian_matrix(build_graph(4, [(0, 1), (2, 3)])))
    print("✓ laplacian_pseudoinverse")


def test_resistance_examples():
    R = resistance_matrix(build_graph(3, [(0, 1), (1, 2)]))
    assert abs(R[0, 2] - 2) < 1e-12 and abs(R[0, 1] - 1) < 1e-12
    R = resistance_matrix(build_graph(3, K3))
    assert np.allclose(R[~np.eye(3, dtype=bool)], 2 / 3)
    R = resistance_matrix(build_graph(4, [(0, 1), (0, 2), (0, 3)]))
    assert abs(R[1, 2] - 2) < 1e-12
    # weights act as conductances
    R = resistance_matrix(build_graph(2, [(0, 1, 3.0)]))
    assert abs(R[0, 1] - 1 / 3) < 1e-12
    expect_error(Disconnected, resistance_matrix, build_graph(4, [(0, 1), (2, 3)]))
    print("✓ resistance examples")


def test_resistance_kirchhoff_oracle():
    """R_uv = det(L without rows/cols u, v) / det(L without row/col u)"""
    checked = 0
    for G in small_graphs(5):
        if G.number_of_nodes() < 2 or not nx.is_connected(G):
            continue
        g = from_networkx(G)
        L = laplacian_matrix(g).toarray()
        R = resistance_matrix(g)
        trees = np.linalg.det(L[1:, 1:])
        for u, v in itertools.combinations(range(g.n), 2):
            keep = [w for w in range(g.n) if w not in (u, v)]
            expected = np.linalg.det(L[np.ix_(keep, keep)]) / trees
            assert abs(R[u, v] - expected) < 1e-8
        checked += 1
    assert checked == 1 + 2 + 6 + 21
    print(f"✓ Kirchhoff oracle on {checked} connected graphs")


def test_resistance_is_a_metric():
    for seed in range(20):
        g = random_connected_graph(int(4 + seed % 9), 0.4, seed)
        R = resistance_matrix(g)
        assert np.allclose(R, R.T) and (np.diag(R) == 0).all() and (R >= 0).all()
        n = g.n
        for u, v, w in itertools.permutations(range(n), 3):
            assert R[u, w] <= R[u, v] + R[v, w] + 1e-10
    print("✓ resistance triangle inequality")


def test_renormalized_resistance():
    g = random_connected_graph(10, 0.3, 2)
    assert np.allclose(renormalized_resistance_matrix(g), resistance_matrix(g), atol=1e-12)

    two = build_graph(4, [(0, 1), (2, 3)])
    R = renormalized_resistance_matrix(two, penalty=4)
    assert abs(R[0, 1] - 1) < 1e-12 and R[0, 2] == 4 and R[1, 3] == 4
    assert (renormalized_resistance_matrix(two) == R).all()

    assert renormalized_resistance_matrix(empty_graph(2), penalty=2)[0, 1] == 2

    bounded = renormalized_resistance_matrix(two, beta=1.0)
    assert abs(bounded[0, 1] - 0.5) < 1e-12 and bounded[0, 2] == 1.0
    assert (np.diag(bounded) == 0).all()
    expect_error(InvalidParams, renormalized_resistance_matrix, two, penalty=0)
    print("✓ renormalized resistance")


def test_fbp_matrix():
    assert np.allclose(fbp_matrix(empty_graph(2), 0.3), np.eye(2))

    S = fbp_matrix(build_graph(2, [(0, 1)]), 0.5)
    expected = np.array([[1.25, 0.5], [0.5, 1.25]]) / 1.3125
    assert np.abs(S - expected).max() < 1e-12
    assert abs(S[0, 0] - 0.95238) < 1e-5 and abs(S[0, 1] - 0.38095) < 1e-5

    rng = np.random.default_rng(3)
    for seed in range(20):
        g = random_graph(int(rng.integers(2, 51)), float(rng.uniform(0.05, 0.5)), seed)
        eps = default_deltacon_eps(g)
        M = np.eye(g.n) + eps ** 2 * np.diag(g.degrees()) - eps * adjacency_matrix(g).toarray()
        S = fbp_matrix(g, eps)
        assert np.abs(S - np.linalg.solve(M, np.eye(g.n))).max() <= 1e-8
        assert np.abs(M @ S - np.eye(g.n)).max() <= 1e-8
    expect_error(InvalidParams, fbp_matrix, empty_graph(2), 0.0)
    print("✓ fbp_matrix")


def test_fbp_power_series_truncation():
    g = build_graph(3, K3)
    A = adjacency_matrix(g).toarray()
    D = np.diag(g.degrees())

    def truncation_error(eps):
        series = np.eye(3) + eps * A + eps ** 2 * (A @ A - D)
        return np.abs(fbp_matrix(g, eps) - series).max()

    ratio = truncation_error(1e-2) / truncation_error(1e-3)
    assert 300 <= ratio <= 3000, ratio
    print(f"✓ power-series truncation ratio {ratio:.0f}")
