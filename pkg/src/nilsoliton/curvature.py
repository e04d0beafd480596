"""Ricci operator, scalar curvature, moment map and the square-norm
functional F for a nilpotent bracket with the canonical inner product."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .brackets import Bracket, ZeroBracketError, center, derived, validate, weight_support


@dataclass(frozen=True)
class RicciData:
    ric: np.ndarray
    scalar_curv: float
    moment: np.ndarray
    F_value: float


def ricci(b: Bracket) -> RicciData:
    """Ricci operator of the nilmanifold metric attached to b:

        <Ric X, Y> = -1/2 sum <mu(X,e_i),e_j><mu(Y,e_i),e_j>
                     +1/4 sum <mu(e_i,e_j),X><mu(e_i,e_j),Y>

    together with scalar curvature tr Ric = -||mu||^2/4, the moment map
    value 4 Ric / ||mu||^2 and F = ||moment||^2 = 16 tr(Ric^2)/||mu||^4.
    """
    if b.is_zero:
        raise ZeroBracketError("moment map is undefined at the zero bracket")
    T = b.tensor()
    M1 = np.einsum("xij,yij->xy", T, T)
    M2 = np.einsum("ijx,ijy->xy", T, T)
    ric = -0.5 * M1 + 0.25 * M2
    nsq = b.norm_sq()
    moment = (4.0 / nsq) * ric
    return RicciData(
        ric=ric,
        scalar_curv=float(np.trace(ric)),
        moment=moment,
        F_value=float(np.sum(moment * moment)),
    )


def diagonal_moment_projection(b: Bracket) -> np.ndarray:
    """Diagonal part of the moment map as the convex combination
    (2/||mu||^2) sum (mu_ij^k)^2 alpha_ij^k of the support weights."""
    support = weight_support(b)
    W = support.weight_arrays()
    sq = np.array(support.squared_coefficients)
    return (2.0 / b.norm_sq()) * (sq @ W)


def ricci_diagonal_sufficient(b: Bracket) -> bool:
    """Structural test forcing a diagonal Ricci operator: every index pair
    carries at most one target, and entries sharing a target have equal or
    disjoint index pairs."""
    pairs_seen: dict[tuple[int, int], int] = {}
    by_target: dict[int, list[tuple[int, int]]] = {}
    for (i, j, k) in b.keys():
        if (i, j) in pairs_seen:
            return False
        pairs_seen[(i, j)] = k
        by_target.setdefault(k, []).append((i, j))
    for pairs in by_target.values():
        for a in range(len(pairs)):
            for c in range(a + 1, len(pairs)):
                sa, sc = set(pairs[a]), set(pairs[c])
                if sa != sc and sa & sc:
                    return False
    return True


def two_step_center_check(b: Bracket, tol: float = 1e-8) -> bool:
    """For a 2-step nilpotent bracket: True iff all Ricci eigenvalues are
    nonzero, equivalently the center equals the derived algebra.  The two
    characterizations are computed independently and must agree."""
    report = validate(b, tol=max(tol, 1e-8))
    if not report.nilpotent or (report.nilpotency_step or 0) > 2:
        raise ValueError("bracket is not 2-step nilpotent")
    eigs = np.linalg.eigvalsh(ricci(b).ric)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    by_spectrum = bool(np.all(np.abs(eigs) > tol * scale))
    by_subspaces = center(b).shape[1] == derived(b).shape[1]
    if by_spectrum != by_subspaces:
        raise ArithmeticError(
            "Ricci spectrum and center/derived comparison disagree; "
            "input is too close to the degenerate boundary for the tolerance"
        )
    return by_spectrum
