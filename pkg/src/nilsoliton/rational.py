"""Exact linear algebra over the rationals (fractions.Fraction).

Small dense systems only: graph weightings, Payne solution sets and the
exact branch of the min-norm-point solver all go through here, so that
sign decisions never depend on floating tolerances.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Row = list[Fraction]


class InconsistentSystemError(ValueError):
    """The linear system has no solution."""


def _as_fraction_matrix(A) -> list[Row]:
    return [[Fraction(x) for x in row] for row in A]


def rref(M: list[Row]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form in place; returns (matrix, pivot columns)."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def solve(A, b) -> list[Fraction]:
    """Solve the square system A x = b exactly; raises if singular/inconsistent."""
    M = _as_fraction_matrix(A)
    n = len(M)
    bvec = [Fraction(x) for x in b]
    aug = [M[i] + [bvec[i]] for i in range(n)]
    aug, pivots = rref(aug)
    if len(pivots) < n or pivots[-1] == n:
        raise InconsistentSystemError("singular or inconsistent square system")
    return [aug[i][n] for i in range(n)]


def solve_affine(A, b) -> tuple[list[Fraction], list[list[Fraction]]]:
    """General exact solve of A x = b (A rectangular).

    Returns (particular solution, nullspace basis); raises
    InconsistentSystemError when no solution exists.
    """
    M = _as_fraction_matrix(A)
    rows = len(M)
    cols = len(M[0]) if rows else 0
    bvec = [Fraction(x) for x in b]
    aug = [M[i] + [bvec[i]] for i in range(rows)]
    aug, pivots = rref(aug)
    if cols in pivots:
        raise InconsistentSystemError("no solution")
    particular = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        particular[c] = aug[r][cols]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -aug[r][fc]
        basis.append(v)
    return particular, basis


def nullspace(A) -> list[list[Fraction]]:
    _, basis = solve_affine(A, [0] * len(A))
    return basis


def integer_normalized(values) -> tuple[list[int], Fraction]:
    """Scale a rational vector by the least positive rational making all
    entries coprime integers; returns (integers, scale factor used)."""
    fracs = [Fraction(v) for v in values]
    nonzero = [f for f in fracs if f != 0]
    if not nonzero:
        return [0] * len(fracs), Fraction(1)
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    ints = [x // g for x in ints]
    return ints, Fraction(denom_lcm, g)
