"""Symplectic linear algebra shared by the flow, spectral and index packages

Phase states are stored as position-velocity vectors ``[x, y, z, vx, vy, vz]``.
Canonical coordinates ``(q, p)`` use ``p1 = vx - y``, ``p2 = vy + x``,
``p3 = vz``; the change of variables is linear and constant, so state-transition
matrices are moved between the two frames by conjugation.
"""
import numpy as np
from numpy.typing import NDArray

# position-velocity -> canonical: p = v + W q
_W = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
_I3 = np.eye(3)
_O3 = np.zeros((3, 3))

TO_CANONICAL = np.block([[_I3, _O3], [_W, _I3]])
TO_VELOCITY = np.block([[_I3, _O3], [-_W, _I3]])


def standard_j(n: int = 3) -> NDArray:
    """Standard symplectic matrix [[0, I], [-I, 0]] of size 2n"""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


J6 = standard_j(3)
J4 = standard_j(2)
J2 = standard_j(1)


def omega(u: NDArray, v: NDArray, j: NDArray = J6) -> float:
    """Symplectic pairing omega(u, v) = u^T J v"""
    return float(u @ j @ v)


def to_canonical(state: NDArray) -> NDArray:
    """Position-velocity state to canonical (q, p)"""
    return TO_CANONICAL @ np.asarray(state, dtype=float)


def to_velocity(canonical: NDArray) -> NDArray:
    """Canonical (q, p) to position-velocity state"""
    return TO_VELOCITY @ np.asarray(canonical, dtype=float)


def stm_to_canonical(stm: NDArray) -> NDArray:
    """Conjugate a position-velocity state-transition matrix into canonical coordinates"""
    return TO_CANONICAL @ stm @ TO_VELOCITY


def symplectic_error(matrix: NDArray) -> float:
    """Max-norm of M^T J M - J for a square matrix of even size"""
    n = matrix.shape[0] // 2
    j = standard_j(n)
    return float(np.max(np.abs(matrix.T @ j @ matrix - j)))


def symplectic_inverse(matrix: NDArray) -> NDArray:
    """-J M^T J, the inverse of a symplectic matrix"""
    j = standard_j(matrix.shape[0] // 2)
    return -j @ matrix.T @ j


def scaled_symplectic_error(matrix: NDArray) -> float:
    """Symplectic error relative to the squared size of the entries"""
    return symplectic_error(matrix) / max(1.0, float(np.max(np.abs(matrix))) ** 2)


def symplectic_gram_schmidt(candidates: NDArray, j: NDArray, rank: int) -> NDArray:
    """Extract a symplectic basis from candidate columns.

    Returns a matrix whose columns are ``[e_1..e_r, f_1..f_r]`` with
    ``omega(e_i, f_j) = delta_ij`` and all other pairings zero, where
    ``r = rank // 2``. Pivoting picks the largest remaining candidate and its
    strongest symplectic partner.
    """
    pool = [np.array(c, dtype=float) for c in np.asarray(candidates).T]
    es, fs = [], []
    for _ in range(rank // 2):
        norms = [np.linalg.norm(c) for c in pool]
        if not pool or max(norms) < 1e-12:
            raise ValueError("candidate set does not span a symplectic subspace")
        i = int(np.argmax(norms))
        e = pool.pop(i)
        e = e / np.linalg.norm(e)
        pairings = [abs(e @ j @ c) for c in pool]
        if not pool or max(pairings) < 1e-12:
            raise ValueError("no symplectic partner for candidate")
        k = int(np.argmax(pairings))
        f = pool.pop(k)
        f = f / (e @ j @ f)
        es.append(e)
        fs.append(f)
        # project the remaining candidates onto the complement of span{e, f}
        pool = [c - (c @ j @ f) * e + (c @ j @ e) * f for c in pool]
    return np.column_stack(es + fs)
