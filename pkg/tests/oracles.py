"""Independent oracles the fast implementations are checked against.

These deliberately avoid the algorithms under test: the min-norm point is
found by exhaustive active-set enumeration (exact) and by brute force over
simplex grids (refined until the lattice step is below the target); the
gradient by central differences.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import numpy as np

from nilsoliton import Bracket, inner
from nilsoliton.rational import solve as exact_solve


def affine_min_norm_exact(points):
    """Min-norm point of the affine hull, exact; None if degenerate."""
    m = len(points)
    G = [[sum(a * b for a, b in zip(points[r], points[c])) for c in range(m)] for r in range(m)]
    A = [G[r] + [Fraction(1)] for r in range(m)]
    A.append([Fraction(1)] * m + [Fraction(0)])
    rhs = [Fraction(0)] * m + [Fraction(1)]
    try:
        sol = exact_solve(A, rhs)
    except Exception:
        return None
    return sol[:m]


def mcc_enumeration(points):
    """Exact min-norm point in the convex hull by checking every subset's
    affine minimizer for feasibility and global optimality."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    m = len(pts)
    best = None
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(m), size):
            lam = affine_min_norm_exact([pts[i] for i in subset])
            if lam is None or any(l < 0 for l in lam):
                continue
            x = [
                sum(lam[s] * pts[subset[s]][d] for s in range(size))
                for d in range(len(pts[0]))
            ]
            nsq = sum(v * v for v in x)
            if best is None or nsq < best[0]:
                if all(sum(a * b for a, b in zip(x, p)) >= nsq for p in pts):
                    best = (nsq, x, subset, lam)
    assert best is not None
    return best  # (norm_sq, point, active subset, weights)


def _compositions(m, total, lows, highs):
    """Integer vectors v with sum(v) = total and lows <= v <= highs."""
    out = []
    v = [0] * m

    def rec(i, remaining):
        if i == m - 1:
            if lows[i] <= remaining <= highs[i]:
                v[i] = remaining
                out.append(tuple(v))
            return
        tail_low = sum(lows[i + 1 :])
        tail_high = sum(highs[i + 1 :])
        lo = max(lows[i], remaining - tail_high)
        hi = min(highs[i], remaining - tail_low)
        for x in range(lo, hi + 1):
            v[i] = x
            rec(i + 1, remaining - x)

    rec(0, total)
    return out


def mcc_simplex_grid(points, final_denominator: int = 51200, budget: int = 150_000):
    """Brute-force simplex-grid search for the min-norm point.

    Starts from the densest full grid within the node budget and doubles the
    resolution inside a window around the incumbent until the lattice step is
    1/final_denominator; passes through step 1/200 on the way for supports too
    large to enumerate at 1/200 directly.
    """
    P = np.array(points, dtype=float)
    m = P.shape[0]
    if m == 1:
        return P[0], 1

    total = 1
    while comb(total + 1 + m - 1, m - 1) <= budget and total < 200:
        total += 1
    grid = _compositions(m, total, [0] * m, [total] * m)
    W = np.array(grid, dtype=float) / total
    X = W @ P
    best = int(np.argmin(np.einsum("ij,ij->i", X, X)))
    center = np.array(grid[best])

    while total < final_denominator:
        total *= 2
        center = center * 2
        lows = [max(0, int(c) - 4) for c in center]
        highs = [min(total, int(c) + 4) for c in center]
        grid = _compositions(m, total, lows, highs)
        W = np.array(grid, dtype=float) / total
        X = W @ P
        best = int(np.argmin(np.einsum("ij,ij->i", X, X)))
        center = np.array(grid[best])
    return (np.asarray(center, float) / total) @ P, total


def directional_derivative_fd(F, b: Bracket, h: Bracket, eps: float = 1e-5) -> float:
    """Central difference (F(b + eps h) - F(b - eps h)) / (2 eps)."""

    def shift(sign):
        entries = dict(b.coeffs)
        for key, c in h.coeffs.items():
            entries[key] = entries.get(key, 0.0) + sign * eps * c
        return Bracket(b.dim, {k: v for k, v in entries.items() if v != 0.0})

    return (F(shift(+1)) - F(shift(-1))) / (2 * eps)


def bracket_inner(a: Bracket, h: Bracket) -> float:
    return inner(a, h)
