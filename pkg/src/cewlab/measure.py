"""Local projector sets, the singlet projection, and feature extraction.

A feature is the conditional probability of projecting the two middle
qubits of the collective state onto the singlet, given that both local
measurements succeeded. A preset names which (x, y) local pairs to use.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateConditioning, DimensionMismatch, UnknownPreset
from .states import (
    ENTANGLE_EPS,
    CollectiveState,
    DensityMatrix,
    SystemKind,
    collective_state,
    negativity,
)

#: Denominators below this mean the local projections almost never fire.
DENOM_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

_TETRA_SIGNS = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


@dataclass(frozen=True)
class LocalEffect:
    index: int  # 1-based, matching the preset tables
    mat: np.ndarray


@dataclass(frozen=True)
class MeasurementPreset:
    kind: SystemKind
    name: str
    pairs: tuple[tuple[int, int], ...]

    @property
    def b(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class FeatureVector:
    preset: MeasurementPreset
    values: np.ndarray
    negativity: float
    entangled: bool


def qubit_tetrahedron() -> tuple[LocalEffect, ...]:
    """Four subnormalized effects whose Bloch vectors form a regular tetrahedron.

    Kept at trace 1/2 exactly as defined; the conditional-probability ratio
    cancels the normalization anyway.
    """
    effects = []
    for i, (s1, s2, s3) in enumerate(_TETRA_SIGNS, start=1):
        mat = (np.eye(2) + (s1 * SIGMA_X + s2 * SIGMA_Y + s3 * SIGMA_Z) / np.sqrt(3)) / 4.0
        effects.append(LocalEffect(i, mat))
    return tuple(effects)


def qutrit_nine() -> tuple[LocalEffect, ...]:
    """Nine rank-1 projectors covering the three 2-dimensional subspaces.

    Each subspace pair carries the three relative phase patterns built from
    the cube roots of unity; together the projectors sum to 3I.
    """
    omega = np.exp(2j * np.pi / 3)
    subspaces = ((0, 2), (1, 0), (2, 1))
    phases = ((1.0, 1.0), (omega, omega.conjugate()), (omega.conjugate(), omega))
    effects = []
    index = 1
    for u, v in subspaces:
        for alpha, beta in phases:
            ket = np.zeros(3, dtype=np.complex128)
            ket[u] = alpha
            ket[v] = beta
            ket /= np.sqrt(2.0)
            effects.append(LocalEffect(index, np.outer(ket, ket.conj())))
            index += 1
    return tuple(effects)


def bell_singlet() -> np.ndarray:
    """Projector onto (|01> - |10>)/sqrt(2)."""
    ket = np.zeros(4, dtype=np.complex128)
    ket[1] = 1.0 / np.sqrt(2.0)
    ket[2] = -1.0 / np.sqrt(2.0)
    return np.outer(ket, ket.conj())


@lru_cache(maxsize=None)
def local_effects(kind: SystemKind) -> tuple[LocalEffect, ...]:
    """The local-measurement set for the kind's second (non-Bell) subsystem."""
    if kind is SystemKind.TWO_QUBIT:
        return qubit_tetrahedron()
    return qutrit_nine()


_TWO_QUBIT_TABLE = (
    ("B1", ((1, 1),)),
    ("B3", ((1, 1), (2, 2), (3, 3))),
    ("B5", ((1, 1), (2, 2), (3, 3), (4, 4), (1, 3))),
    ("B7", ((1, 1), (2, 2), (3, 3), (4, 4), (1, 3), (1, 4), (2, 4))),
    ("B10", ((1, 1), (2, 2), (3, 3), (4, 4), (1, 3), (1, 4), (2, 4), (1, 2), (2, 3), (3, 4))),
)

_QUBIT_QUTRIT_TABLE = (
    ("B1", ((1, 1),)),
    ("B5", ((1, 1), (3, 3), (5, 5), (8, 8), (9, 9))),
    ("B9", ((1, 1), (3, 3), (5, 5), (8, 8), (9, 9), (2, 2), (4, 4), (6, 6), (7, 7))),
    ("B13", ((1, 1), (3, 3), (5, 5), (8, 8), (9, 9), (2, 2), (4, 4), (6, 6), (7, 7),
             (1, 2), (3, 4), (4, 5), (8, 9))),
    ("B45", tuple((i, j) for i in range(1, 10) for j in range(i, 10))),
)


def builtin_presets(kind: SystemKind) -> tuple[MeasurementPreset, ...]:
    table = _TWO_QUBIT_TABLE if kind is SystemKind.TWO_QUBIT else _QUBIT_QUTRIT_TABLE
    return tuple(MeasurementPreset(kind, name, pairs) for name, pairs in table)


def preset_by_name(kind: SystemKind, name: str) -> MeasurementPreset:
    for preset in builtin_presets(kind):
        if preset.name == name:
            return preset
    raise UnknownPreset(f"unknown preset {name!r} for {kind.value}")


def p_xy(rho_t: CollectiveState, x: LocalEffect, y: LocalEffect) -> float:
    """Conditional singlet probability for one local pair.

    Numerator projects the middle qubit pair onto the singlet; the
    denominator conditions on the local outcomes alone.
    """
    d2 = rho_t.kind.dims[1]
    if x.mat.shape != (d2, d2) or y.mat.shape != (d2, d2):
        raise DimensionMismatch(
            f"local effects must be {d2}x{d2} for {rho_t.kind.value}")
    numerator_op = np.kron(x.mat, np.kron(bell_singlet(), y.mat))
    denominator_op = np.kron(x.mat, np.kron(np.eye(4), y.mat))
    numerator = np.einsum('ij,ji->', rho_t.mat, numerator_op).real
    denominator = np.einsum('ij,ji->', rho_t.mat, denominator_op).real
    if denominator < DENOM_TOL:
        raise DegenerateConditioning(
            f"local projection probability {denominator:.3e} below {DENOM_TOL:.0e}")
    return float(np.clip(numerator / denominator, 0.0, 1.0))


@lru_cache(maxsize=None)
def _preset_operators(kind: SystemKind, pairs: tuple[tuple[int, int], ...]) -> tuple[np.ndarray, np.ndarray]:
    """Flattened trace kernels for every pair: rows are op.T.ravel().

    With these, Tr[rho_T . op] for a whole stack of collective states is a
    single matrix product.
    """
    effects = {e.index: e.mat for e in local_effects(kind)}
    bell = bell_singlet()
    eye4 = np.eye(4)
    num_rows = []
    den_rows = []
    for ix, iy in pairs:
        if ix not in effects or iy not in effects:
            raise DimensionMismatch(f"effect index pair ({ix},{iy}) invalid for {kind.value}")
        num_rows.append(np.kron(effects[ix], np.kron(bell, effects[iy])).T.ravel())
        den_rows.append(np.kron(effects[ix], np.kron(eye4, effects[iy])).T.ravel())
    return np.array(num_rows), np.array(den_rows)


def feature_traces_stack(collective_mats: np.ndarray, kind: SystemKind,
                         pairs: tuple[tuple[int, int], ...]) -> tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator traces, shapes (m, B) each."""
    num_ops, den_ops = _preset_operators(kind, pairs)
    flat = collective_mats.reshape(collective_mats.shape[0], -1)
    return (flat @ num_ops.T).real, (flat @ den_ops.T).real


def features(rho: DensityMatrix, preset: MeasurementPreset) -> FeatureVector:
    """Feature vector plus negativity labels for one state."""
    if preset.kind is not rho.kind:
        raise DimensionMismatch(
            f"preset is for {preset.kind.value}, state is {rho.kind.value}")
    state = collective_state(rho)
    num, den = feature_traces_stack(state.mat[None], rho.kind, preset.pairs)
    if (den < DENOM_TOL).any():
        raise DegenerateConditioning("a local projection probability vanished")
    values = np.clip(num[0] / den[0], 0.0, 1.0)
    neg = negativity(rho)
    return FeatureVector(preset, values, neg, neg > ENTANGLE_EPS)
