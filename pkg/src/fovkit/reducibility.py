"""Unitary reducibility through the commutant of ``{A, A*}``.

``A`` is unitarily reducible exactly when some non-scalar matrix commutes
with both ``A`` and ``A*``; the spectral projectors of a Hermitian element
of that commutant split ``A`` into a direct sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import NoReduction

NULL_RTOL = 1e-9


@dataclass
class CommutantBasis:
    dimension: int
    basis: list


def commutant_dimension(A, rtol=NULL_RTOL) -> CommutantBasis:
    """Null space of ``X -> (XA - AX, XA* - A*X)`` over complex ``X``."""
    A = matcore.as_matrix(A)
    n = A.shape[0]
    I = np.eye(n)
    Ah = A.conj().T
    # row-major vec: vec(XA) = (I kron A^T) vec(X), vec(AX) = (A kron I) vec(X)
    M = np.vstack([np.kron(I, A.T) - np.kron(A, I), np.kron(I, Ah.T) - np.kron(Ah, I)])
    _, S, Vh = np.linalg.svd(M)
    cut = rtol * S[0] if S[0] > 0 else np.inf
    null = np.flatnonzero(S <= cut)
    basis = [Vh[k].conj().reshape(n, n) for k in null]
    return CommutantBasis(len(basis), basis)


def is_unitarily_irreducible(A) -> bool:
    return commutant_dimension(A).dimension == 1


def invariant_projection(A, basis: CommutantBasis | None = None):
    """Orthogonal projector onto a reducing subspace of ``A``.

    A fixed real combination of the Hermitian parts of the commutant basis
    is diagonalized; the eigenvalue group of largest rank (first on ties)
    gives the projector.
    """
    A = matcore.as_matrix(A)
    n = A.shape[0]
    if basis is None:
        basis = commutant_dimension(A)
    if basis.dimension <= 1:
        raise NoReduction("commutant is trivial; A is unitarily irreducible")
    weights = np.random.default_rng(12345).uniform(0.5, 1.5, size=2 * basis.dimension)
    Y = np.zeros((n, n), dtype=complex)
    for k, X in enumerate(basis.basis):
        Y += weights[2 * k] * (X + X.conj().T) + weights[2 * k + 1] * 1j * (X - X.conj().T)
    Y -= np.trace(Y) / n * np.eye(n)
    if np.linalg.norm(Y) < 1e-10:
        raise NoReduction("commutant contains only scalars")
    vals, vecs = np.linalg.eigh(Y)
    tol = 1e-6 * max(1.0, np.abs(vals).max())
    groups, start = [], 0
    for k in range(1, n + 1):
        if k == n or vals[k] - vals[k - 1] > tol:
            groups.append(list(range(start, k)))
            start = k
    chosen = max(groups, key=len)
    Q = vecs[:, chosen]
    return Q @ Q.conj().T


def reduction_residual(A, P):
    """``||A - (PAP + QAQ)||_F`` with ``Q = I - P``."""
    A = np.asarray(A, dtype=complex)
    Q = np.eye(A.shape[0]) - P
    return float(np.linalg.norm(A - (P @ A @ P + Q @ A @ Q)))
