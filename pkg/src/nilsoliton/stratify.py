"""Minimal convex combinations of support weights, Weyl chamber transport,
diagonal degenerations, and stratum membership certificates.

The min-norm point of the convex hull is computed with Wolfe's algorithm,
run in exact rational arithmetic whenever every input coordinate is an
integer or a Fraction (which covers all weight supports) and in floating
point otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import rational
from .brackets import Bracket, ZeroBracketError, weight_support
from .curvature import ricci

WOLFE_TOL = 1e-12
CERT_TOL = 1e-6


class LimitDivergesError(ValueError):
    """A diagonal one-parameter degeneration has entries blowing up."""

    def __init__(self, keys):
        self.keys = tuple(keys)
        super().__init__(f"diagonal limit diverges on entries {self.keys}")


# -- min-norm point in a convex hull -----------------------------------------


@dataclass(frozen=True)
class MccResult:
    point: np.ndarray
    coefficients: np.ndarray
    active_set: tuple[int, ...]
    norm_sq: float
    exact_point: tuple[Fraction, ...] | None = None
    exact_coefficients: tuple[Fraction, ...] | None = None
    exact_norm_sq: Fraction | None = None

    @property
    def exact(self) -> bool:
        return self.exact_point is not None


def _is_exact_scalar(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, float)


def _affine_minimizer_exact(points):
    m = len(points)
    G = [[sum(a * b for a, b in zip(points[r], points[c])) for c in range(m)] for r in range(m)]
    A = [G[r] + [Fraction(1)] for r in range(m)]
    A.append([Fraction(1)] * m + [Fraction(0)])
    rhs = [Fraction(0)] * m + [Fraction(1)]
    sol = rational.solve(A, rhs)
    return sol[:m]


def _affine_minimizer_float(points):
    m = len(points)
    P = np.array(points, dtype=float)
    G = P @ P.T
    A = np.zeros((m + 1, m + 1))
    A[:m, :m] = G
    A[:m, m] = 1.0
    A[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return list(sol[:m])


def _wolfe(points, exact: bool):
    """Wolfe's min-norm-point algorithm over the convex hull of `points`.

    Ties in the linear minimization step break to the lowest index.  In
    exact mode every comparison is exact and the algorithm terminates
    finitely; in float mode small tolerances guard the stopping tests.
    """
    m = len(points)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    norms = [dot(p, p) for p in points]
    scale = max(norms) if norms else one
    tol = zero if exact else WOLFE_TOL * max(1.0, float(scale))

    best = min(range(m), key=lambda i: (norms[i], i))
    S = [best]
    w = [one]
    x = list(points[best])
    minimizer = _affine_minimizer_exact if exact else _affine_minimizer_float

    for _ in range(40 * m + 200):
        xx = dot(x, x)
        scores = [dot(x, p) for p in points]
        j = min(range(m), key=lambda i: (scores[i], i))
        if scores[j] >= xx - tol or j in S:
            break
        S.append(j)
        w.append(zero)
        while True:
            v = minimizer([points[i] for i in S])
            if all(vi > tol for vi in v):
                w = list(v)
                break
            theta = one
            for wi, vi in zip(w, v):
                if vi <= tol and wi > vi:
                    theta = min(theta, wi / (wi - vi))
            w = [wi + theta * (vi - wi) for wi, vi in zip(w, v)]
            drop_tol = zero if exact else WOLFE_TOL
            kept = [(i, wi) for i, wi in zip(S, w) if wi > drop_tol]
            if not kept:
                kept = [(S[0], one)]
            S = [i for i, _ in kept]
            w = [wi for _, wi in kept]
        total = sum(w)
        w = [wi / total for wi in w]
        dim = len(points[0])
        x = [sum(w[s] * points[S[s]][d] for s in range(len(S))) for d in range(dim)]

    coeffs = [zero] * m
    for i, wi in zip(S, w):
        coeffs[i] += wi
    return x, coeffs


def mcc(points) -> MccResult:
    """Min-norm point of the convex hull of finitely many vectors."""
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("mcc of an empty point set")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points have mixed dimensions")
    exact = all(_is_exact_scalar(x) for p in pts for x in p)
    if exact:
        pts = [tuple(Fraction(x) for x in p) for p in pts]
    x, coeffs = _wolfe(pts, exact)
    active = tuple(i for i, c in enumerate(coeffs) if c > 0)
    point = np.array([float(v) for v in x])
    coefficients = np.array([float(c) for c in coeffs])
    if exact:
        nsq = sum(v * v for v in x)
        return MccResult(
            point=point,
            coefficients=coefficients,
            active_set=active,
            norm_sq=float(nsq),
            exact_point=tuple(x),
            exact_coefficients=tuple(coeffs),
            exact_norm_sq=nsq,
        )
    return MccResult(
        point=point,
        coefficients=coefficients,
        active_set=active,
        norm_sq=float(point @ point),
    )


def beta_of(b: Bracket) -> MccResult:
    """Min-norm point of the convex hull of the support weights."""
    support = weight_support(b)
    result = mcc(support.weights)
    assert result.exact_point is not None
    assert sum(result.exact_point) == -1, "support weights all have trace -1"
    assert any(v != 0 for v in result.exact_point), "min-norm weight combination is never zero"
    return result


# -- chamber transport --------------------------------------------------------


def to_chamber(v) -> tuple[np.ndarray, tuple[int, ...]]:
    """Stable ascending sort with the permutation used: sorted[i] = v[perm[i]]."""
    arr = np.asarray(v, dtype=float)
    perm = np.argsort(arr, kind="stable")
    return arr[perm], tuple(int(p) for p in perm)


def in_W_beta(b: Bracket, beta, tol: float = 1e-9) -> bool:
    """True iff <beta, alpha> >= ||beta||^2 - tol for every support weight."""
    beta = np.asarray(beta, dtype=float)
    bsq = float(beta @ beta)
    W = weight_support(b).weight_arrays()
    return bool(np.all(W @ beta >= bsq - tol))


# -- diagonal one-parameter degenerations -------------------------------------


def diagonal_limit(b: Bracket, exponents, scales=None) -> Bracket:
    """Limit of act_diagonal(d(t), b) as t -> infinity for d_i(t) = s_i t^{r_i}.

    Entry (i,j,k) picks up the factor (s_k / s_i s_j) t^{r_k - r_i - r_j};
    the limit exists iff no entry has positive exponent, entries with
    negative exponent vanish, and exponent arithmetic is exact.
    """
    r = [int(e) for e in exponents]
    if len(r) != b.dim:
        raise ValueError("exponent vector length does not match dim")
    if scales is None:
        scales = [1] * b.dim
    s = list(scales)
    if len(s) != b.dim or any(not (x > 0) for x in s):
        raise ValueError("scales must be positive and match dim")
    divergent = []
    entries = {}
    for (i, j, k), c in b.coeffs.items():
        e = r[k - 1] - r[i - 1] - r[j - 1]
        if e > 0:
            divergent.append((i, j, k))
        elif e == 0:
            entries[(i, j, k)] = c * s[k - 1] / (s[i - 1] * s[j - 1])
    if divergent:
        raise LimitDivergesError(divergent)
    return Bracket(b.dim, entries)


# -- stratum certificates ------------------------------------------------------


@dataclass(frozen=True)
class StratumReport:
    status: str  # "certified" | "candidate"
    certificate: str | None
    beta: MccResult
    beta_plus: np.ndarray
    permutation: tuple[int, ...]
    F_lower_bound: float

    def __str__(self) -> str:
        entries = ", ".join(f"{x:.6g}" for x in self.beta_plus)
        tag = f" via {self.certificate}" if self.certificate else ""
        return f"{self.status}{tag}: beta+ = ({entries}), F >= {self.F_lower_bound:.6g}"


def _moment_if_diagonal(bracket: Bracket, tol: float):
    moment = ricci(bracket).moment
    off = moment - np.diag(np.diag(moment))
    if np.max(np.abs(off)) > tol * max(1.0, float(np.linalg.norm(moment))):
        return None
    return np.diag(moment)


def _brackets_close(a: Bracket, b: Bracket, tol: float) -> bool:
    if a.dim != b.dim:
        return False
    keys = set(a.keys()) | set(b.keys())
    scale = max(1.0, a.norm(), b.norm())
    return all(abs(a.coeff(*k) - b.coeff(*k)) <= tol * scale for k in keys)


def certify_stratum(
    b: Bracket,
    witness: Bracket | None = None,
    exponents=None,
    scales=None,
    flow_limit: Bracket | None = None,
    tol: float = CERT_TOL,
) -> StratumReport:
    """Certify stratum membership by one of the implemented sufficient
    conditions; otherwise report the min-norm weight combination as a
    candidate only.

    Certificates, tried in order:
      * critical value: F(b) equals ||beta||^2 (then b itself is a critical
        point and the stratum is read off directly);
      * diagonal degeneration: a witness with diagonal moment, reached from b
        by a verified diagonal limit, whose F value equals ||beta||^2, with b
        in the half-space set W_beta of the witness moment;
      * flow limit: a supplied critical limit with diagonal moment whose
        W_beta set contains b.
    """
    if b.is_zero:
        raise ZeroBracketError("stratum of the zero bracket is undefined")
    beta = beta_of(b)
    beta_plus, perm = to_chamber(beta.point)
    bound = beta.norm_sq
    F_b = ricci(b).F_value

    certificate = None
    if abs(F_b - bound) <= tol * max(1.0, F_b):
        certificate = "einstein-critical"
    if certificate is None and witness is not None and exponents is not None:
        try:
            lim = diagonal_limit(b, exponents, scales)
        except LimitDivergesError:
            lim = None
        if lim is not None and _brackets_close(lim, witness, tol):
            wdiag = _moment_if_diagonal(witness, tol)
            if (
                wdiag is not None
                and abs(ricci(witness).F_value - bound) <= tol * max(1.0, bound)
                and in_W_beta(b, wdiag, tol)
            ):
                certificate = "diagonal-degeneration"
    if certificate is None and flow_limit is not None:
        ldiag = _moment_if_diagonal(flow_limit, tol)
        if ldiag is not None and in_W_beta(b, ldiag, tol):
            from .flow import grad_F  # local import to avoid a cycle

            if grad_F(flow_limit).norm() <= max(tol, 1e-6):
                certificate = "flow-limit"

    return StratumReport(
        status="certified" if certificate else "candidate",
        certificate=certificate,
        beta=beta,
        beta_plus=beta_plus,
        permutation=perm,
        F_lower_bound=bound,
    )
