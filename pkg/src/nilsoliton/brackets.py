"""Sparse antisymmetric brackets on R^n and the basic operations on them.

A bracket is stored as a finite map (i, j, k) -> coefficient with
1 <= i < j <= n and 1 <= k <= n (1-based, matching the usual structure
constant conventions); the antisymmetric completion mu(e_j, e_i) =
-mu(e_i, e_j) is implicit.  Brackets are immutable value objects: every
operation returns a new bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
import scipy.linalg

Key = tuple[int, int, int]

RANK_RTOL = 1e-10  # relative tolerance for all rank decisions


class BracketError(ValueError):
    """Malformed bracket data (bad indices, zero coefficients, ...)."""


class ZeroBracketError(BracketError):
    """Operation undefined for the zero bracket."""


def _normalize_entries(dim: int, entries) -> dict[Key, float]:
    if isinstance(entries, Mapping):
        items = entries.items()
    else:
        items = [((i, j, k), c) for (i, j, k, c) in entries]
    out: dict[Key, float] = {}
    for (i, j, k), c in items:
        if not (1 <= i < j <= dim) or not (1 <= k <= dim):
            raise BracketError(f"index out of range: ({i},{j},{k}) for dim {dim}")
        if (i, j, k) in out:
            raise BracketError(f"duplicate key ({i},{j},{k})")
        c = float(c)
        if not np.isfinite(c):
            raise BracketError(f"non-finite coefficient at ({i},{j},{k})")
        if c == 0.0:
            raise BracketError(f"stored coefficient must be nonzero at ({i},{j},{k})")
        out[(i, j, k)] = c
    return dict(sorted(out.items()))


class Bracket:
    """Antisymmetric bilinear map on R^n given by sparse structure constants."""

    __slots__ = ("dim", "_coeffs")

    def __init__(self, dim: int, entries=()):
        if dim < 1:
            raise BracketError("dimension must be positive")
        self.dim = int(dim)
        self._coeffs = _normalize_entries(self.dim, entries)

    # -- basic accessors -------------------------------------------------

    @property
    def coeffs(self) -> dict[Key, float]:
        return dict(self._coeffs)

    def keys(self) -> tuple[Key, ...]:
        return tuple(self._coeffs)

    def coeff(self, i: int, j: int, k: int) -> float:
        if i == j:
            return 0.0
        if i < j:
            return self._coeffs.get((i, j, k), 0.0)
        return -self._coeffs.get((j, i, k), 0.0)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Bracket)
            and self.dim == other.dim
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self.dim, tuple(self._coeffs.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"({i},{j},{k}): {c:g}" for (i, j, k), c in self._coeffs.items())
        return f"Bracket(dim={self.dim}, {{{body}}})"

    # -- conversions -----------------------------------------------------

    def tensor(self) -> np.ndarray:
        """Dense antisymmetric tensor T[a,b,c] = <mu(e_a, e_b), e_c> (0-based)."""
        n = self.dim
        T = np.zeros((n, n, n))
        for (i, j, k), c in self._coeffs.items():
            T[i - 1, j - 1, k - 1] = c
            T[j - 1, i - 1, k - 1] = -c
        return T

    @classmethod
    def from_tensor(cls, T: np.ndarray, drop_tol: float = 0.0) -> "Bracket":
        n = T.shape[0]
        entries = {}
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    c = T[i, j, k]
                    if abs(c) > drop_tol and c != 0.0:
                        entries[(i + 1, j + 1, k + 1)] = c
        return cls(n, entries)

    def prune(self, drop_tol: float) -> "Bracket":
        kept = {key: c for key, c in self._coeffs.items() if abs(c) > drop_tol}
        return Bracket(self.dim, kept)

    def scaled(self, factor: float) -> "Bracket":
        if factor == 0:
            return Bracket(self.dim, {})
        return Bracket(self.dim, {key: factor * c for key, c in self._coeffs.items()})

    def apply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Evaluate mu(x, y) for coordinate vectors x, y."""
        return np.einsum("abc,a,b->c", self.tensor(), x, y)

    # -- norms -----------------------------------------------------------

    def norm_sq(self) -> float:
        # ordered-pair double count: ||mu||^2 = 2 * sum_{i<j} (mu_ij^k)^2
        return 2.0 * sum(c * c for c in self._coeffs.values())

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def unit_sphere(self, radius: float = 2.0) -> "Bracket":
        """Rescale to the sphere ||mu|| = radius."""
        nrm = self.norm()
        if nrm == 0:
            raise ZeroBracketError("cannot normalize the zero bracket")
        return self.scaled(radius / nrm)


def inner(b1: Bracket, b2: Bracket) -> float:
    """O(n)-invariant inner product, summed over ordered index pairs."""
    if b1.dim != b2.dim:
        raise BracketError(f"dimension mismatch: {b1.dim} vs {b2.dim}")
    acc = 0.0
    small, large = (b1, b2) if len(b1) <= len(b2) else (b2, b1)
    other = large._coeffs
    for key, c in small._coeffs.items():
        d = other.get(key)
        if d is not None:
            acc += c * d
    return 2.0 * acc


# -- group actions --------------------------------------------------------


def act(g: np.ndarray, b: Bracket, drop_tol: float | None = None) -> Bracket:
    """Change of basis: (g.mu)(x, y) = g mu(g^-1 x, g^-1 y)."""
    g = np.asarray(g, dtype=float)
    if g.shape != (b.dim, b.dim):
        raise BracketError(f"matrix shape {g.shape} does not match dim {b.dim}")
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise BracketError("singular change of basis") from exc
    T = np.einsum("ai,bj,mc,abc->ijm", ginv, ginv, g, b.tensor(), optimize=True)
    if drop_tol is None:
        drop_tol = 1e-12 * b.norm()
    return Bracket.from_tensor(T, drop_tol=drop_tol)


def act_diagonal(d, b: Bracket) -> Bracket:
    """Diagonal change of basis: coefficient (i,j,k) scales by d_k / (d_i d_j)."""
    d = list(d)
    if len(d) != b.dim:
        raise BracketError("diagonal length does not match dim")
    if any(x == 0 for x in d):
        raise BracketError("diagonal entries must be nonzero")
    entries = {}
    for (i, j, k), c in b.coeffs.items():
        entries[(i, j, k)] = c * d[k - 1] / (d[i - 1] * d[j - 1])
    return Bracket(b.dim, entries)


def pi_action(alpha: np.ndarray, b: Bracket) -> np.ndarray:
    """Infinitesimal action pi(alpha)mu = alpha mu(.,.) - mu(alpha., .) - mu(., alpha.),
    returned as a dense tensor."""
    T = b.tensor()
    return (
        np.einsum("mc,ijc->ijm", alpha, T)
        - np.einsum("ai,ajm->ijm", alpha, T)
        - np.einsum("bj,ibm->ijm", alpha, T)
    )


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    jacobi_ok: bool
    jacobi_residual: float
    nilpotent: bool
    nilpotency_step: int | None
    series_dims: tuple[int, ...]


def jacobi_residual(b: Bracket) -> float:
    """Max-abs of mu(mu(x,y),z) + mu(mu(y,z),x) + mu(mu(z,x),y) over basis triples."""
    T = b.tensor()
    J = (
        np.einsum("ijl,lkm->ijkm", T, T)
        + np.einsum("jkl,lim->ijkm", T, T)
        + np.einsum("kil,ljm->ijkm", T, T)
    )
    return float(np.max(np.abs(J))) if J.size else 0.0


def validate(b: Bracket, tol: float = 1e-8) -> ValidationReport:
    """Check the Jacobi identity (threshold tol * max(1, ||b||^2), the residual
    being quadratic in b) and nilpotency via the descending central series."""
    resid = jacobi_residual(b)
    scale = max(1.0, b.norm_sq())
    dims = central_series(b)
    nilpotent = dims[-1] == 0
    step = len(dims) - 1 if nilpotent else None
    return ValidationReport(
        jacobi_ok=resid <= tol * scale,
        jacobi_residual=resid,
        nilpotent=nilpotent,
        nilpotency_step=step,
        series_dims=dims,
    )


# -- subspace computations --------------------------------------------------


def _column_space(M: np.ndarray, rtol: float = RANK_RTOL, floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the column space via pivoted QR.  `floor` is an
    absolute scale below which pivots count as zero (rank decisions on
    residual noise must not use the noise itself as reference)."""
    if M.size == 0 or not np.any(M):
        return np.zeros((M.shape[0], 0))
    Q, R, _ = scipy.linalg.qr(M, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0:
        return np.zeros((M.shape[0], 0))
    rank = int(np.sum(diag > max(rtol * diag[0], floor)))
    return Q[:, :rank]


def _null_space(M: np.ndarray, rtol: float = RANK_RTOL, floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the kernel (columns), via SVD."""
    if M.size == 0:
        return np.eye(M.shape[1])
    _, s, Vt = np.linalg.svd(M)
    if s.size == 0 or s[0] == 0:
        return Vt.T
    rank = int(np.sum(s > max(rtol * s[0], floor)))
    return Vt[rank:].T


def central_series(b: Bracket, rtol: float = RANK_RTOL) -> tuple[int, ...]:
    """Dims of C_0 >= C_1 >= ... with C_0 = R^n, C_{k+1} = mu(R^n, C_k);
    stops at zero, at stabilization, or after n terms (non-nilpotent)."""
    n = b.dim
    T = b.tensor()
    floor = rtol * float(np.sqrt(np.sum(T * T)))
    dims = [n]
    basis = np.eye(n)
    for _ in range(n):
        # columns mu(e_i, v) for all i and basis vectors v of the current term
        M = np.einsum("ibm,bd->mid", T, basis).reshape(n, -1)
        basis = _column_space(M, rtol, floor)
        d = basis.shape[1]
        dims.append(d)
        if d == 0 or d == dims[-2]:
            break
    return tuple(dims)


def derived(b: Bracket, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the derived algebra mu(R^n, R^n)."""
    n = b.dim
    T = b.tensor()
    floor = rtol * float(np.sqrt(np.sum(T * T)))
    M = T.reshape(n * n, n).T  # columns mu(e_a, e_b), all ordered pairs
    return _column_space(M, rtol, floor)


def center(b: Bracket, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of {x : mu(x, .) = 0}."""
    n = b.dim
    T = b.tensor()
    floor = rtol * float(np.sqrt(np.sum(T * T)))
    M = T.transpose(1, 2, 0).reshape(n * n, n)  # rows (j,m), columns a
    return _null_space(M, rtol, floor)


# -- weight supports ---------------------------------------------------------


@dataclass(frozen=True)
class WeightSupport:
    """Distinct diagonal weights E_kk - E_ii - E_jj attached to the nonzero
    structure constants, with squared coefficients aggregated per weight."""

    dim: int
    weights: tuple[tuple[int, ...], ...]
    squared_coefficients: tuple[float, ...]
    keys_by_weight: tuple[tuple[Key, ...], ...]

    def __len__(self) -> int:
        return len(self.weights)

    def weight_arrays(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)

    def gram(self) -> np.ndarray:
        """Exact integer Gram matrix U of the weights."""
        W = np.array(self.weights, dtype=np.int64)
        return W @ W.T


def weight_key_vector(dim: int, key: Key) -> tuple[int, ...]:
    i, j, k = key
    v = [0] * dim
    v[i - 1] -= 1
    v[j - 1] -= 1
    v[k - 1] += 1
    return tuple(v)


def weight_support(b: Bracket) -> WeightSupport:
    """Ordered distinct support weights with their squared coefficients; the
    order is first occurrence in canonical (sorted) key order."""
    if b.is_zero:
        raise ZeroBracketError("zero bracket has no weight support")
    weights: list[tuple[int, ...]] = []
    squares: list[float] = []
    keys: list[list[Key]] = []
    index: dict[tuple[int, ...], int] = {}
    for key, c in b.coeffs.items():
        w = weight_key_vector(b.dim, key)
        pos = index.get(w)
        if pos is None:
            index[w] = len(weights)
            weights.append(w)
            squares.append(c * c)
            keys.append([key])
        else:
            squares[pos] += c * c
            keys[pos].append(key)
    return WeightSupport(
        dim=b.dim,
        weights=tuple(weights),
        squared_coefficients=tuple(squares),
        keys_by_weight=tuple(tuple(ks) for ks in keys),
    )
