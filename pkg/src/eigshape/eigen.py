"""Smallest eigenpairs of the symmetric pencil (K, M) and small enclosures.

Discrete eigenvalues are computed in floating point and then inflated to
intervals [lambda (1 - kappa), lambda (1 + kappa)] with
kappa = safety * residual / gap, where gap is the distance to the nearest
computed eigenvalue outside the same numerical cluster.  This makes the
usual "the discrete solve is exact" assumption explicit and quantified; a
fully verified sparse eigensolve is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceFailure
from .intervals import Interval, IntervalSymMatrix

DENSE_CUTOFF = 2000
DEFAULT_SAFETY = 10.0
_CLUSTER_RELTOL = 1e-8


@dataclass(frozen=True)
class DiscreteEigenSystem:
    kind: str
    eigenvalues: np.ndarray     # ascending, positive
    vectors: np.ndarray         # (n, k), M-orthonormal columns
    residual_norms: np.ndarray  # ||K x - lambda M x|| / ||M x|| per pair
    mass_gram: np.ndarray       # vectors^T M vectors

    @property
    def k(self) -> int:
        return len(self.eigenvalues)


def _mass_orthonormalize(x: np.ndarray, m: sp.spmatrix) -> np.ndarray:
    """Modified Gram-Schmidt in the M inner product, two passes."""
    x = np.array(x, dtype=float, order="F")
    for _ in range(2):
        for i in range(x.shape[1]):
            mi = m @ x[:, i]
            for j in range(i):
                x[:, i] -= (x[:, j] @ mi) * x[:, j]
                mi = m @ x[:, i]
            x[:, i] /= np.sqrt(x[:, i] @ mi)
    return x


def _fix_signs(x: np.ndarray) -> np.ndarray:
    """Largest-magnitude coefficient positive, deterministically."""
    for i in range(x.shape[1]):
        jmax = int(np.argmax(np.abs(x[:, i])))
        if x[jmax, i] < 0:
            x[:, i] = -x[:, i]
    return x


def smallest_eigenpairs(
    k_mat: sp.spmatrix,
    m_mat: sp.spmatrix,
    k: int,
    *,
    kind: str = "",
    tol: float = 1e-10,
) -> DiscreteEigenSystem:
    """k smallest eigenpairs of K x = lambda M x (both SPD).

    Dense solve below dimension DENSE_CUTOFF, shift-invert Lanczos above;
    identical output contract either way.  Eigenvectors are returned
    M-orthonormalized with a deterministic sign convention.
    """
    n = k_mat.shape[0]
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    if n < DENSE_CUTOFF:
        w, x = scipy.linalg.eigh(
            np.asarray(k_mat.todense()),
            np.asarray(m_mat.todense()),
            subset_by_index=[0, k - 1],
        )
    else:
        v0 = np.full(n, 1.0 / np.sqrt(n))
        try:
            w, x = spla.eigsh(
                k_mat.tocsc(), k=k, M=m_mat.tocsc(), sigma=0.0, which="LM", v0=v0
            )
        except spla.ArpackNoConvergence as exc:  # pragma: no cover
            raise ConvergenceFailure(f"shift-invert iteration failed: {exc}") from exc
        order = np.argsort(w)
        w, x = w[order], x[:, order]

    x = _fix_signs(_mass_orthonormalize(x, m_mat))
    mx = m_mat @ x
    residuals = np.array(
        [
            np.linalg.norm(k_mat @ x[:, i] - w[i] * mx[:, i]) / np.linalg.norm(mx[:, i])
            for i in range(k)
        ]
    )
    rel = residuals / np.maximum(w, 1e-300)
    if np.any(rel > 1e4 * tol):
        raise ConvergenceFailure(
            f"residuals {rel.max():.3e} above tolerance {tol:.1e}", residuals=residuals
        )
    gram = x.T @ mx
    return DiscreteEigenSystem(kind, w, x, residuals, gram)


def eigenvalue_intervals(
    system: DiscreteEigenSystem, safety: float = DEFAULT_SAFETY
) -> list[Interval]:
    """Residual-inflated enclosures of the computed discrete eigenvalues.

    The gap for eigenvalue i is measured to the nearest computed eigenvalue
    not in the same numerical cluster (relative difference > 1e-8); for the
    extreme indices, where no outer neighbour is known, the eigenvalue itself
    is used as the gap scale.
    """
    w = system.eigenvalues
    out = []
    for i, lam in enumerate(w):
        gaps = [
            abs(w[j] - lam)
            for j in range(len(w))
            if abs(w[j] - lam) > _CLUSTER_RELTOL * max(abs(lam), 1.0)
        ]
        gap = min(gaps) if gaps else abs(lam)
        kappa = safety * system.residual_norms[i] / gap if gap > 0 else np.inf
        kappa = max(kappa, 4.0 * np.finfo(float).eps)
        lo = lam * (1.0 - kappa)
        hi = lam * (1.0 + kappa)
        out.append(Interval(min(lo, hi), max(lo, hi)))
    return out


def sym2_interval_eig(a: IntervalSymMatrix) -> tuple[Interval, Interval]:
    """Enclosures of both eigenvalues of every symmetric point matrix in a."""
    return a.eig_bounds()
