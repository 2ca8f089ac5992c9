"""Random density matrices, negativity, and the two-copy collective state."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .qlinalg import (
    complex_normals,
    haar_from_ginibre,
    hermitian_eigenvalues,
    jacobi_eigenvalues_stack,
    make_rng,
    swap_operator,
)

#: Negativity above this labels a state entangled. Far above eigensolver
#: noise (~1e-12), far below any physically meaningful negativity.
ENTANGLE_EPS = 1e-7


class SystemKind(enum.Enum):
    """Bipartite system layout; subsystem 1 is the qubit sent to the Bell projection."""

    TWO_QUBIT = "two-qubit"
    QUBIT_QUTRIT = "qubit-qutrit"

    @property
    def dims(self) -> tuple[int, int]:
        return (2, 2) if self is SystemKind.TWO_QUBIT else (2, 3)

    @property
    def dim(self) -> int:
        d1, d2 = self.dims
        return d1 * d2


@dataclass(frozen=True)
class DensityMatrix:
    kind: SystemKind
    mat: np.ndarray


@dataclass(frozen=True)
class CollectiveState:
    """Two-copy state with subsystems ordered (local, Bell, Bell, local).

    Positions 2 and 3 are the qubits of the two copies, adjacent so the
    singlet projection acts on a contiguous 4-dimensional block.
    """

    kind: SystemKind
    mat: np.ndarray


def _draw_state_inputs(rng: np.random.Generator, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Spectrum and Ginibre matrix for one sample, in a fixed draw order."""
    # Exponential spacings give the flat (uniform) distribution on the
    # probability simplex; normalizing raw uniforms by their sum does not,
    # and visibly skews the separable fraction away from 0.63/0.38.
    u = rng.random(dim)
    w = -np.log1p(-u)
    diag = w / w.sum()
    ginibre = complex_normals(rng, (dim, dim))
    return diag, ginibre


def sample_density(kind: SystemKind, rng: np.random.Generator) -> DensityMatrix:
    """Random state: flat simplex spectrum conjugated by a Haar unitary."""
    diag, ginibre = _draw_state_inputs(rng, kind.dim)
    u = haar_from_ginibre(ginibre[None])[0]
    mat = np.einsum('ji,j,jk->ik', u.conj(), diag, u)
    return DensityMatrix(kind, mat)


def sample_density_stack(kind: SystemKind, seed: int, start_stream: int, count: int) -> np.ndarray:
    """Matrices for streams [start_stream, start_stream + count), shape (count, d, d).

    Each sample consumes only its own stream, so any contiguous block can
    be regenerated independently of the rest of a run.
    """
    dim = kind.dim
    diags = np.empty((count, dim))
    ginibre = np.empty((count, dim, dim), dtype=np.complex128)
    for k in range(count):
        rng = make_rng(seed, start_stream + k)
        diags[k], ginibre[k] = _draw_state_inputs(rng, dim)
    u = haar_from_ginibre(ginibre)
    return np.einsum('mji,mj,mjk->mik', u.conj(), diags, u)


def partial_transpose(rho: DensityMatrix, subsystem: int = 2) -> np.ndarray:
    """Transpose the indices of one subsystem only."""
    d1, d2 = rho.kind.dims
    return partial_transpose_stack(rho.mat[None], d1, d2, subsystem)[0]


def partial_transpose_stack(mats: np.ndarray, d1: int, d2: int, subsystem: int = 2) -> np.ndarray:
    if subsystem not in (1, 2):
        raise ValueError("subsystem must be 1 or 2")
    m = mats.shape[0]
    t = mats.reshape(m, d1, d2, d1, d2)
    t = t.transpose(0, 3, 2, 1, 4) if subsystem == 1 else t.transpose(0, 1, 4, 3, 2)
    return t.reshape(m, d1 * d2, d1 * d2)


def negativity(rho: DensityMatrix) -> float:
    """Absolute sum of the negative partial-transpose eigenvalues, in [0, 0.5]."""
    ev = hermitian_eigenvalues(partial_transpose(rho))
    return float(-np.minimum(ev, 0.0).sum())


def negativity_stack(mats: np.ndarray, kind: SystemKind) -> np.ndarray:
    d1, d2 = kind.dims
    ev = jacobi_eigenvalues_stack(partial_transpose_stack(mats, d1, d2))
    return -np.minimum(ev, 0.0).sum(axis=1)


def is_entangled(rho: DensityMatrix, eps: float = ENTANGLE_EPS) -> bool:
    """Exact for these dimensions: positivity of the partial transpose decides."""
    return negativity(rho) > eps


def collective_state(rho: DensityMatrix) -> CollectiveState:
    """Two copies with the first copy's subsystems interchanged.

    The swap puts both qubits destined for the Bell projection in the
    middle of the tensor-product ordering.
    """
    d1, d2 = rho.kind.dims
    return CollectiveState(rho.kind, collective_state_stack(rho.mat[None], d1, d2)[0])


def collective_state_stack(mats: np.ndarray, d1: int, d2: int) -> np.ndarray:
    m = mats.shape[0]
    d = d1 * d2
    w = swap_operator(d1, d2)
    swapped = np.matmul(np.matmul(w, mats), w.T)
    return np.einsum('mab,mcd->macbd', swapped, mats).reshape(m, d * d, d * d)
