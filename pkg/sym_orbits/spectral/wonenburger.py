"""Wonenburger block form of the reduced monodromy at symmetric points"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import qr

from sym_orbits.core.errors import BasisConstructionFailed, NotSymmetric, SignUndefined, StructureViolation
from sym_orbits.core.symplectic import J6
from sym_orbits.dynamics.symmetry import get_symmetry
from sym_orbits.flows.propagator import Propagator
from sym_orbits.shooting.orbit import PeriodicOrbit, is_planar_state
from sym_orbits.spectral.monodromy import STRUCTURE_TOL, SymmetricMonodromy, symmetric_monodromy
from sym_orbits.spectral.reduction import coordinates, flow_frame, projector

logger = logging.getLogger(__name__)

DEGENERATE_BAND = 1e-8
PLANAR_COORDS = (0, 1, 3, 4)


@dataclass
class WonenburgerBlocks:
    """Reduced monodromy [[A, B], [C, A^T]] in a basis adapted to the involution"""
    A: NDArray
    B: NDArray
    C: NDArray
    point_index: int = 0
    basis: Optional[NDArray] = None
    split: bool = False

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> NDArray:
        return np.block([[self.A, self.B], [self.C, self.A.T]])

    @classmethod
    def from_matrix(cls, matrix: NDArray, point_index: int = 0) -> 'WonenburgerBlocks':
        """Split a 2n x 2n matrix into its blocks"""
        n = matrix.shape[0] // 2
        return cls(A=matrix[:n, :n], B=matrix[:n, n:], C=matrix[n:, :n], point_index=point_index)

    @classmethod
    def synthesize(cls, B: NDArray, S: NDArray) -> 'WonenburgerBlocks':
        """Blocks with A = B S and C = B^-1 (A^2 - I) for symmetric B, S"""
        B = np.atleast_2d(B).astype(float)
        S = np.atleast_2d(S).astype(float)
        A = B @ S
        C = np.linalg.solve(B, A @ A - np.eye(A.shape[0]))
        return cls(A=A, B=B, C=0.5 * (C + C.T))

    def relation_errors(self) -> dict:
        """Max-norm of each defining relation"""
        A, B, C = self.A, self.B, self.C
        eye = np.eye(self.n)
        return {
            "B_symmetric": float(np.max(np.abs(B - B.T))),
            "C_symmetric": float(np.max(np.abs(C - C.T))),
            "AB_BAt": float(np.max(np.abs(A @ B - B @ A.T))),
            "AtC_CA": float(np.max(np.abs(A.T @ C - C @ A))),
            "A2_BC": float(np.max(np.abs(A @ A - B @ C - eye))),
        }

    def max_relation_error(self) -> float:
        return max(self.relation_errors().values())

    def scaled_relation_error(self) -> float:
        """Relation error relative to the squared size of the blocks; the relations are quadratic"""
        size = max(float(np.max(np.abs(m))) for m in (self.A, self.B, self.C))
        return self.max_relation_error() / max(1.0, size) ** 2

    def block(self, which: str) -> 'WonenburgerBlocks':
        """Planar (index 0) or spatial (index 1) 1x1 blocks of a split 2x2 form"""
        if not self.split:
            raise ValueError("blocks are not split into planar and spatial parts")
        i = {"planar": 0, "spatial": 1}[which]
        sub = np.ix_([i], [i])
        return WonenburgerBlocks(A=self.A[sub], B=self.B[sub], C=self.C[sub], point_index=self.point_index)


def _lagrangian_basis(candidates: NDArray, rank: int) -> NDArray:
    """Orthonormal basis of the span of the candidate columns, by pivoted QR"""
    q, r, _ = qr(candidates, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size < rank or diag[rank - 1] < 1e-10 * max(diag[0], 1.0):
        raise BasisConstructionFailed(f"eigenspace of the involution has rank < {rank}", rank=rank)
    return q[:, :rank]


def adapted_basis(orbit: PeriodicOrbit, state: NDArray, symmetry: str) -> Tuple[NDArray, bool]:
    """Symplectic basis (e, f) with e in Fix(d rho) and f in its (-1)-eigenspace.

    Returns the 6 x 2n basis matrix and whether it splits into planar and
    spatial pairs.
    """
    sym = get_symmetry(symmetry)
    x_field, y_dir = flow_frame(orbit.model, state)
    proj = projector(x_field, y_dir)
    plus = [i for i, s in enumerate(sym.signs) if s > 0]
    minus = [i for i, s in enumerate(sym.signs) if s < 0]

    split = orbit.planar and is_planar_state(state, 1e-12)
    if split:
        e_planar = _lagrangian_basis(proj[:, [i for i in plus if i in PLANAR_COORDS]], 1)
        f_planar = _lagrangian_basis(proj[:, [i for i in minus if i in PLANAR_COORDS]], 1)
        e_spatial = _lagrangian_basis(proj[:, [i for i in plus if i not in PLANAR_COORDS]], 1)
        f_spatial = _lagrangian_basis(proj[:, [i for i in minus if i not in PLANAR_COORDS]], 1)
        e = np.column_stack((e_planar, e_spatial))
        f0 = np.column_stack((f_planar, f_spatial))
    else:
        e = _lagrangian_basis(proj[:, plus], 2)
        f0 = _lagrangian_basis(proj[:, minus], 2)

    # f = F0 G^-1 with G_ij = omega(e_i, F0_j) gives omega(e_i, f_j) = delta_ij
    gram = e.T @ J6 @ f0
    if abs(np.linalg.det(gram)) < 1e-12:
        raise BasisConstructionFailed("involution eigenspaces are not symplectically paired")
    f = f0 @ np.linalg.inv(gram)
    return np.column_stack((e, f)), split


def wonenburger_at(
    orbit: PeriodicOrbit,
    point_index: int = 0,
    propagator: Optional[Propagator] = None,
    symmetry: Optional[str] = None,
    monodromies: Optional[SymmetricMonodromy] = None,
    tol: float = STRUCTURE_TOL,
) -> WonenburgerBlocks:
    """Blocks of the reduced monodromy at symmetric point 0 or 1.

    Both points share the monodromies built from one half-period STM; pass
    ``monodromies`` to reuse them. Raises StructureViolation when the blocks
    break the Wonenburger relations by more than ``tol`` (scaled).
    """
    if point_index not in (0, 1):
        raise ValueError(f"point_index must be 0 or 1, got {point_index}")
    symmetry = symmetry or orbit.symmetries[0]
    if not get_symmetry(symmetry).antisymplectic:
        raise NotSymmetric(f"{symmetry} is not an anti-symplectic involution")
    if monodromies is None or monodromies.symmetry != symmetry:
        monodromies = symmetric_monodromy(orbit, propagator, symmetry)
    state = orbit.state0 if point_index == 0 else monodromies.half_state
    matrix = monodromies.at(point_index)

    basis, split = adapted_basis(orbit, state, symmetry)
    # (e, -f): a forward-turning elliptic block has B < 0 for angles in (0, pi)
    n = basis.shape[1] // 2
    orient = np.diag([1.0] * n + [-1.0] * n)
    reduced = orient @ coordinates(matrix @ basis, basis) @ orient
    basis = basis @ orient
    blocks = WonenburgerBlocks.from_matrix(reduced, point_index)
    blocks.basis = basis
    blocks.split = split
    error = blocks.scaled_relation_error()
    if error > tol:
        raise StructureViolation("Wonenburger relation", error, tol, point=point_index, gamma=orbit.gamma)
    logger.debug(f"Wonenburger relations at point {point_index} hold to {error:.2e}")
    return blocks


def _eigenvector(matrix: NDArray, a: float) -> NDArray:
    values, vectors = np.linalg.eig(matrix)
    i = int(np.argmin(np.abs(values - a)))
    if abs(values[i].imag) > 1e-10 or abs(values[i] - a) > 1e-6 * max(1.0, abs(a)):
        raise SignUndefined(f"{a} is not a real eigenvalue of A", a=a)
    others = np.delete(values, i)
    if others.size and np.min(np.abs(others - values[i])) < DEGENERATE_BAND:
        raise SignUndefined(f"eigenvalue {a} of A is not simple", a=a)
    return np.real(vectors[:, i])


def _check_index(a) -> float:
    if np.iscomplexobj(a) and abs(np.imag(a)) > 1e-12:
        raise SignUndefined(f"stability index {a} is not real", a=complex(a))
    a = float(np.real(a))
    if abs(abs(a) - 1.0) < DEGENERATE_BAND:
        raise SignUndefined(f"stability index {a} is trivial (|a| = 1)", a=a)
    return a


def b_sign(blocks: WonenburgerBlocks, a: float) -> int:
    """sign(v^T B v) for A^T v = a v"""
    a = _check_index(a)
    v = _eigenvector(blocks.A.T, a)
    value = float(v @ blocks.B @ v)
    if value == 0.0:
        raise SignUndefined(f"v^T B v vanishes for a={a}", a=a)
    return 1 if value > 0 else -1


def c_sign(blocks: WonenburgerBlocks, a: float) -> int:
    """sign(v^T C v) for A v = a v"""
    a = _check_index(a)
    v = _eigenvector(blocks.A, a)
    value = float(v @ blocks.C @ v)
    if value == 0.0:
        raise SignUndefined(f"v^T C v vanishes for a={a}", a=a)
    return 1 if value > 0 else -1


def sign_symbol(sign: Optional[int]) -> str:
    return {1: "+", -1: "-"}.get(sign, "?")


@dataclass
class SignEntry:
    """B- and C-sign of one real stability index at one symmetric point"""
    point: int
    a: float
    b_sign: int
    c_sign: int
    block: Optional[str] = None

    def to_dict(self) -> dict:
        data = {"point": self.point, "a": self.a, "b_sign": sign_symbol(self.b_sign), "c_sign": sign_symbol(self.c_sign)}
        if self.block:
            data["block"] = self.block
        return data

    @property
    def pair(self) -> str:
        """(C/B) notation"""
        return f"({sign_symbol(self.c_sign)}/{sign_symbol(self.b_sign)})"


@dataclass
class SignRecord:
    """Signs at both symmetric points; indices with undefined signs are absent"""
    entries: List[SignEntry] = field(default_factory=list)

    def at(self, point: int, block: Optional[str] = None) -> List[SignEntry]:
        return [e for e in self.entries if e.point == point and (block is None or e.block == block)]

    def to_list(self) -> List[dict]:
        return [e.to_dict() for e in self.entries]


def signs_of(blocks: WonenburgerBlocks) -> List[SignEntry]:
    """Signs for every real, simple, nontrivial eigenvalue of A"""
    entries = []
    if blocks.split:
        parts = [("planar", blocks.block("planar")), ("spatial", blocks.block("spatial"))]
    else:
        parts = [(None, blocks)]
    for name, part in parts:
        for a in np.linalg.eigvals(part.A):
            try:
                entries.append(SignEntry(blocks.point_index, float(np.real(a)), b_sign(part, a), c_sign(part, a), name))
            except SignUndefined as e:
                logger.debug(f"No sign at point {blocks.point_index}: {e}")
    return entries


def sign_record(blocks_list: List[WonenburgerBlocks]) -> SignRecord:
    """Collect signs over the given symmetric points"""
    record = SignRecord()
    for blocks in blocks_list:
        record.entries.extend(signs_of(blocks))
    return record


def period_doubling_site(before: SignRecord, after: SignRecord, block: str = "planar") -> int:
    """Symmetric point hosting the period-doubled family.

    At a crossing of -1 the B-sign jumps at one symmetric point and the
    C-sign at the other; the new family leaves from the point whose B-sign
    is unchanged.
    """
    for point in (0, 1):
        old = before.at(point, block)
        new = after.at(point, block)
        if old and new and old[0].b_sign == new[0].b_sign:
            return point
    raise SignUndefined("no symmetric point keeps its B-sign across the crossing")
