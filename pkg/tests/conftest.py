import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_two_step(rng, n_gens=4, n_center=3, density=0.5, scale=1.0):
    """Random 2-step bracket: generators hit only central directions, so the
    Jacobi identity holds identically."""
    from nilsoliton import Bracket

    n = n_gens + n_center
    entries = {}
    for i in range(1, n_gens + 1):
        for j in range(i + 1, n_gens + 1):
            if rng.random() < density:
                k = n_gens + 1 + int(rng.integers(0, n_center))
                c = float(rng.normal(0, scale))
                if c != 0.0:
                    entries[(i, j, k)] = c
    if not entries:
        entries[(1, 2, n_gens + 1)] = 1.0
    return Bracket(n, entries)


def random_sparse_bracket(rng, n=6, n_entries=5, scale=1.0):
    """Random sparse bracket, not necessarily Jacobi."""
    from nilsoliton import Bracket

    entries = {}
    while len(entries) < n_entries:
        i, j = sorted(rng.integers(1, n + 1, size=2))
        if i == j:
            continue
        k = int(rng.integers(1, n + 1))
        c = float(rng.normal(0, scale))
        if c != 0.0:
            entries[(int(i), int(j), k)] = c
    return Bracket(n, entries)


def random_fisica_bracket(rng, n_pairs=3, extra_targets=1):
    """Random bracket satisfying the structural diagonal-Ricci conditions:
    index pairs are disjoint, and each pair feeds a single target."""
    from nilsoliton import Bracket

    n = 2 * n_pairs + n_pairs + extra_targets
    entries = {}
    targets = list(range(2 * n_pairs + 1, n + 1))
    perm = rng.permutation(targets)
    for p in range(n_pairs):
        i, j = 2 * p + 1, 2 * p + 2
        k = int(perm[p])
        entries[(i, j, k)] = float(rng.uniform(0.3, 2.0))
    return Bracket(n, entries)
