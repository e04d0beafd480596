"""Nilsoliton detection: distinguished symmetric derivation, the linear
Einstein criterion Ric - c I in Der(mu), eigenvalue types, and the exact
linear test on the weight Gram matrix."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import rational
from .brackets import (
    Bracket,
    WeightSupport,
    ZeroBracketError,
    pi_action,
    validate,
    weight_support,
)
from .curvature import ricci, ricci_diagonal_sufficient

RANK_RTOL = 1e-10
EINSTEIN_TOL = 1e-8
CLUSTER_TOL = 1e-7
MAX_DENOMINATOR = 10**6


class RationalizationError(ValueError):
    """Eigenvalues could not be scaled to coprime integers under the cap."""


class NotDiagonalRicciError(ValueError):
    """The linear Einstein test requires a diagonal Ricci operator."""


# -- derivation spaces -------------------------------------------------------


def _tangent_rows(b: Bracket):
    n = b.dim
    iu = np.triu_indices(n, k=1)

    def flatten(T: np.ndarray) -> np.ndarray:
        return T[iu].reshape(-1)

    return flatten


def derivation_space(b: Bracket, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal (Frobenius) basis of Der(mu) = ker(alpha -> pi(alpha)mu),
    returned as a stack of n x n matrices."""
    n = b.dim
    flatten = _tangent_rows(b)
    cols = []
    for p in range(n):
        for q in range(n):
            E = np.zeros((n, n))
            E[p, q] = 1.0
            cols.append(flatten(pi_action(E, b)))
    M = np.array(cols).T
    if not np.any(M):
        basis = np.eye(n * n)
    else:
        _, s, Vt = np.linalg.svd(M)
        rank = int(np.sum(s > rtol * s[0]))
        basis = Vt[rank:].T
    return np.array([v.reshape(n, n) for v in basis.T])


def _symmetric_basis(n: int) -> list[np.ndarray]:
    basis = []
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1.0
        basis.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(E)
    return basis


def symmetric_derivation_space(b: Bracket, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of Der(mu) intersected with the symmetric matrices."""
    n = b.dim
    flatten = _tangent_rows(b)
    sym = _symmetric_basis(n)
    M = np.array([flatten(pi_action(E, b)) for E in sym]).T
    if not np.any(M):
        coeff_basis = np.eye(len(sym))
    else:
        _, s, Vt = np.linalg.svd(M)
        rank = int(np.sum(s > rtol * s[0]))
        coeff_basis = Vt[rank:].T
    stack = np.stack(sym)
    return np.einsum("lk,lij->kij", coeff_basis, stack)


def soliton_derivation(b: Bracket, tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """The distinguished symmetric derivation D (tr D >= 0) with
    c I + tr(D) D orthogonal to Der(mu) cap sym(n), and c = tr(Ric^2)/tr(Ric).

    Obtained by projecting the identity onto the symmetric derivations:
    with P that projection, D = sqrt(-c tr P) P / tr P, and D = 0 in the
    degenerate case tr P ~ 0.
    """
    data = ricci(b)
    c = float(np.trace(data.ric @ data.ric) / np.trace(data.ric))
    basis = symmetric_derivation_space(b)
    n = b.dim
    P = np.zeros((n, n))
    for E in basis:
        P += np.trace(E) * E
    trP = float(np.trace(P))
    if trP <= tol:
        return np.zeros((n, n)), c
    D = np.sqrt(max(-c * trP, 0.0)) * P / trP
    return D, c


# -- eigenvalue types --------------------------------------------------------


@dataclass(frozen=True)
class EigenvalueType:
    values: tuple[int, ...]
    multiplicities: tuple[int, ...]

    def __str__(self) -> str:
        ks = "<".join(str(v) for v in self.values)
        ds = ",".join(str(d) for d in self.multiplicities)
        return f"({ks}; {ds})"


def eigenvalue_type(
    eigenvalues: np.ndarray,
    cluster_tol: float = CLUSTER_TOL,
    max_denominator: int = MAX_DENOMINATOR,
) -> EigenvalueType:
    """Cluster eigenvalues and rescale by the smallest positive rational that
    turns them into coprime positive integers (continued fractions with a
    denominator cap).  Raises RationalizationError when that is impossible."""
    eigs = np.sort(np.asarray(eigenvalues, dtype=float))
    if eigs.size == 0:
        raise RationalizationError("no eigenvalues")
    scale = max(1.0, float(np.max(np.abs(eigs))))
    clusters: list[list[float]] = [[eigs[0]]]
    for x in eigs[1:]:
        if x - clusters[-1][-1] <= cluster_tol * scale:
            clusters[-1].append(x)
        else:
            clusters.append([x])
    means = [float(np.mean(c)) for c in clusters]
    mults = [len(c) for c in clusters]
    if means[0] <= cluster_tol * scale:
        raise RationalizationError(f"smallest eigenvalue {means[0]:g} is not positive")
    ratios = [m / means[0] for m in means]
    fracs = [Fraction(r).limit_denominator(max_denominator) for r in ratios]
    for r, f in zip(ratios, fracs):
        if abs(r - float(f)) > 1e-9 * max(1.0, r):
            raise RationalizationError(
                f"ratio {r!r} has no rational approximation under denominator cap"
            )
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    return EigenvalueType(values=tuple(ints), multiplicities=tuple(mults))


# -- the Einstein decision ---------------------------------------------------


@dataclass(frozen=True)
class SolitonReport:
    is_einstein: bool
    c_mu: float
    D_mu: np.ndarray
    residual: float
    eigenvalue_type: EigenvalueType | None = None
    eigenvalue_type_error: str | None = None

    def __str__(self) -> str:
        if not self.is_einstein:
            return f"not Einstein (derivation residual {self.residual:.3e})"
        t = str(self.eigenvalue_type) if self.eigenvalue_type else "unavailable"
        return f"Einstein, eigenvalue type {t}"


def is_einstein(
    b: Bracket,
    tol: float = EINSTEIN_TOL,
    jacobi_tol: float = 1e-6,
    require_valid: bool = True,
) -> SolitonReport:
    """Decide whether the solvable extension S_mu is Einstein: with
    c = tr(Ric^2)/tr(Ric), the candidate D = Ric - c I must be a derivation,
    tested as ||pi(D)mu|| <= tol ||mu|| after normalizing to ||mu|| = 2."""
    if b.is_zero:
        raise ZeroBracketError("Einstein test undefined at the zero bracket")
    if require_valid:
        report = validate(b, tol=jacobi_tol)
        if not report.jacobi_ok or not report.nilpotent:
            raise ValueError("input must be a nilpotent Lie bracket")
    # the decision is made on the sphere ||mu|| = 2 (scale-invariant); the
    # reported c and candidate derivation keep the input's scale
    bn = b.unit_sphere(2.0)
    ric_n = ricci(bn).ric
    c_n = float(np.trace(ric_n @ ric_n) / np.trace(ric_n))
    D_n = ric_n - c_n * np.eye(b.dim)
    resid = float(np.sqrt(np.sum(pi_action(D_n, bn) ** 2))) / bn.norm()
    einstein = resid <= tol
    scale = b.norm_sq() / 4.0  # Ric is quadratic in the bracket
    c = c_n * scale
    D = D_n * scale
    etype = None
    etype_error = None
    if einstein:
        try:
            etype = eigenvalue_type(np.linalg.eigvalsh(D))
        except RationalizationError as exc:
            etype_error = str(exc)
    return SolitonReport(
        is_einstein=einstein,
        c_mu=c,
        D_mu=D,
        residual=resid,
        eigenvalue_type=etype,
        eigenvalue_type_error=etype_error,
    )


# -- the linear test on the weight Gram matrix -------------------------------


def payne_matrix(source: Bracket | WeightSupport) -> np.ndarray:
    """Exact integer Gram matrix U of the support weights."""
    support = weight_support(source) if isinstance(source, Bracket) else source
    if len(support) == 0:
        raise ValueError("empty weight support")
    return support.gram()


@dataclass(frozen=True)
class PayneResult:
    is_einstein: bool
    nu: float
    residual: float


def payne_test(b: Bracket, tol: float = EINSTEIN_TOL) -> PayneResult:
    """Linear Einstein test for brackets with diagonal Ricci operator:
    U [squared coefficients] must be a constant vector nu [1,...,1]."""
    if not ricci_diagonal_sufficient(b):
        ric = ricci(b).ric
        offdiag = ric - np.diag(np.diag(ric))
        if np.max(np.abs(offdiag)) > tol * max(1.0, float(np.linalg.norm(ric))):
            raise NotDiagonalRicciError("Ricci operator is not diagonal")
    support = weight_support(b)
    U = support.gram()
    s = np.array(support.squared_coefficients)
    lhs = U @ s
    nu = float(np.mean(lhs))
    resid = float(np.max(np.abs(lhs - nu)))
    return PayneResult(
        is_einstein=resid <= tol * max(1.0, abs(nu)),
        nu=nu,
        residual=resid,
    )


@dataclass(frozen=True)
class PayneSolution:
    """Exact solution set of U c = nu [1] with sum(c) = 1: a particular
    solution plus a basis of coefficient directions (each with its nu shift)."""

    coefficients: tuple[Fraction, ...]
    nu: Fraction
    nullspace: tuple[tuple[Fraction, ...], ...]

    @property
    def unique(self) -> bool:
        return not self.nullspace


def payne_solve(support: WeightSupport) -> PayneSolution:
    """Solve U c = nu [1], sum(c) = 1 in exact rationals.  The unknown nu is
    eliminated by appending it as an extra variable; a singular Gram matrix
    yields a parametrized affine solution set."""
    if len(support) == 0:
        raise ValueError("empty weight support")
    U = support.gram()
    q = U.shape[0]
    A = [[Fraction(int(U[i][j])) for j in range(q)] + [Fraction(-1)] for i in range(q)]
    A.append([Fraction(1)] * q + [Fraction(0)])
    rhs = [Fraction(0)] * q + [Fraction(1)]
    particular, basis = rational.solve_affine(A, rhs)
    return PayneSolution(
        coefficients=tuple(particular[:q]),
        nu=particular[q],
        nullspace=tuple(tuple(v[:q]) for v in basis),
    )
