"""Dense complex matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Unit vectors
stand for points of complex projective space; every derived quantity here
is invariant under multiplying a representative by a unimodular scalar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InvalidMatrix,
    NonConvergence,
    NonOrthonormalBasis,
)

MAX_DIM = 16
CANON_ZERO = 1e-13


def as_matrix(A, max_dim=MAX_DIM) -> np.ndarray:
    """Validate and convert ``A`` to a square complex128 array."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] < 1 or M.shape[0] > max_dim:
        raise InvalidMatrix(f"dimension {M.shape[0]} outside [1, {max_dim}]")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix("matrix has non-finite entries")
    return M


def is_hermitian(M, rtol=1e-12) -> bool:
    M = np.asarray(M, dtype=complex)
    return np.linalg.norm(M - M.conj().T) <= rtol * max(1.0, np.linalg.norm(M))


def cartesian_decompose(A):
    """Return Hermitian ``(H, K)`` with ``A = H + iK``."""
    A = as_matrix(A)
    Ah = A.conj().T
    return (A + Ah) / 2, (A - Ah) / 2j


def rotated_hermitian(A, theta):
    """Hermitian part of ``exp(-i theta) A``, whose top eigenvalue is the
    support function of the field of values in direction ``theta``."""
    B = np.exp(-1j * theta) * np.asarray(A, dtype=complex)
    return (B + B.conj().T) / 2


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray  # real, descending
    vectors: np.ndarray  # orthonormal columns


def hermitian_eig(M, tol=1e-14, max_sweeps=100) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for a small dense Hermitian matrix.

    Each rotation first removes the phase of the pivot ``M[p, q]`` and then
    applies a real Jacobi rotation.  Sweeps run in fixed row-major pivot
    order, so results are deterministic.
    """
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {M.shape}")
    if not is_hermitian(M):
        raise InvalidMatrix("matrix is not Hermitian")
    n = M.shape[0]
    M = (M + M.conj().T) / 2
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(M)
    target = tol * scale

    def off(M):
        return np.linalg.norm(M - np.diag(np.diag(M)))

    for _ in range(max_sweeps):
        if off(M) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                mag = abs(apq)
                if mag == 0.0 or mag < 1e-300:
                    continue
                phase = apq / mag
                app, aqq = M[p, p].real, M[q, q].real
                tau = (aqq - app) / (2 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                G = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                M[:, idx] = M[:, idx] @ G
                M[idx, :] = G.conj().T @ M[idx, :]
                M[p, q] = M[q, p] = 0.0
                V[:, idx] = V[:, idx] @ G
    else:
        if off(M) > target:
            raise NonConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(M).real.copy()
    order = np.argsort(-vals, kind="stable")
    return EigenDecomposition(vals[order], V[:, order])


def fov_value(A, x) -> complex:
    """Evaluate ``x* A x`` for a unit vector ``x``."""
    A = np.asarray(A, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if x.shape != (A.shape[0],):
        raise DimensionMismatch(f"vector of shape {x.shape} for a {A.shape[0]}x{A.shape[0]} matrix")
    return complex(np.vdot(x, A @ x))


def compress(A, V, tol=1e-12) -> np.ndarray:
    """Compression ``V* A V`` onto the span of the orthonormal columns of ``V``."""
    A = np.asarray(A, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != A.shape[0]:
        raise DimensionMismatch("basis and matrix dimensions differ")
    G = V.conj().T @ V
    if np.linalg.norm(G - np.eye(V.shape[1])) > tol:
        raise NonOrthonormalBasis("columns of V are not orthonormal")
    return V.conj().T @ A @ V


def normalize(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return x / nrm


def canonical(x, zero=CANON_ZERO) -> np.ndarray:
    """Unit representative whose first non-negligible coordinate is real positive."""
    x = normalize(x)
    nz = np.flatnonzero(np.abs(x) > zero)
    if nz.size:
        c = x[nz[0]]
        x = x * (abs(c) / c)
    return x


def projective_distance(x, y) -> float:
    """Chordal distance ``||xx* - yy*||_F = sqrt(2 - 2|<x,y>|^2)``.

    Evaluated as ``sqrt(2) * ||y - <x,y> x||`` to avoid cancellation when the
    classes are close.
    """
    x = normalize(x)
    y = normalize(y)
    if x.shape != y.shape:
        raise DimensionMismatch("vectors of different dimension")
    r = y - np.vdot(x, y) * x
    return float(min(np.sqrt(2.0) * np.linalg.norm(r), np.sqrt(2.0)))


def operator_distance(x, y) -> float:
    """Spectral-norm distance ``||xx* - yy*||_2 = sqrt(1 - |<x,y>|^2)``."""
    return projective_distance(x, y) / np.sqrt(2.0)


def rank_of_set(vectors, tol=1e-6) -> int:
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    if not vecs:
        raise EmptyInput("rank of an empty set")
    S = np.linalg.svd(np.column_stack(vecs), compute_uv=False)
    if S[0] == 0:
        return 0
    return int(np.sum(S > tol * S[0]))


def smallest_singular_value(vectors) -> float:
    """``sigma_n`` of the stacked unit vectors (0 if fewer than n of them)."""
    X = np.column_stack([normalize(v) for v in vectors])
    n = X.shape[0]
    S = np.linalg.svd(X, compute_uv=False)
    return float(S[n - 1]) if S.size >= n else 0.0


def random_unitary(n, rng) -> np.ndarray:
    """Modified Gram-Schmidt on a complex Gaussian matrix."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q = np.zeros_like(Z)
    for j in range(n):
        v = Z[:, j].copy()
        for i in range(j):
            v -= np.vdot(Q[:, i], v) * Q[:, i]
        Q[:, j] = v / np.linalg.norm(v)
    return Q


def random_unit(n, rng) -> np.ndarray:
    return normalize(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def orthonormal_basis(vectors, tol=1e-10) -> np.ndarray:
    """Gram-Schmidt basis (as columns) of the span of ``vectors``."""
    basis = []
    for v in vectors:
        w = np.asarray(v, dtype=complex).copy()
        for _ in range(2):
            for b in basis:
                w -= np.vdot(b, w) * b
        nrm = np.linalg.norm(w)
        if nrm > tol:
            basis.append(w / nrm)
    return np.column_stack(basis) if basis else np.zeros((len(vectors[0]), 0), complex)


def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"n": int(A.shape[0]), "re": A.real.tolist(), "im": A.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise InvalidMatrix(f"re/im must both be {n}x{n}")
    return as_matrix(re + 1j * im)


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(json.loads(Path(path).read_text()))


def save_matrix(A, path):
    Path(path).write_text(json.dumps(matrix_to_json(A)) + "\n")
