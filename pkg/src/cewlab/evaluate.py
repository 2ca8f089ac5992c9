"""ROC analysis for entanglement scores and closed-form witness baselines."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, regenerate_states
from .errors import DegenerateLabels, DimensionMismatch, EmptyDataset
from .measure import SIGMA_X, SIGMA_Y, SIGMA_Z
from .qlinalg import hermitian_eigenvalues, jacobi_eigenvalues_stack
from .states import ENTANGLE_EPS, DensityMatrix, SystemKind


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))


def roc_curve(scores, labels) -> RocCurve:
    """ROC of the rule "score >= threshold means entangled".

    One point per distinct score (threshold swept from +inf down), with
    (0, 0) prepended. The area uses the trapezoid rule, which equals the
    Mann-Whitney statistic with ties counted half.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).astype(bool).ravel()
    if len(scores) == 0:
        raise EmptyDataset("ROC needs at least one scored sample")
    if len(scores) != len(labels):
        raise DimensionMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("ROC needs both entangled and separable samples")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    hits = labels[order]
    tp = np.cumsum(hits)
    fp = np.cumsum(~hits)
    # keep only the last index of each tie group so equal scores move together
    last = np.nonzero(np.append(s[1:] != s[:-1], True))[0]
    fpr = np.concatenate(([0.0], fp[last] / n_neg))
    tpr = np.concatenate(([0.0], tp[last] / n_pos))
    thresholds = np.concatenate(([np.inf], s[last]))
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1])) / 2.0)
    return RocCurve(fpr, tpr, thresholds, auc)


def tpr_at_fpr(curve: RocCurve, fpr_cap: float) -> float:
    """Best TPR among realized operating points with FPR <= cap (no interpolation)."""
    if not 0.0 <= fpr_cap <= 1.0:
        raise ValueError("fpr_cap must lie in [0, 1]")
    ok = curve.fpr <= fpr_cap
    return float(curve.tpr[ok].max()) if ok.any() else 0.0


def write_roc(curve: RocCurve, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("fpr,tpr,threshold\n")
        for f, t, th in zip(curve.fpr, curve.tpr, curve.thresholds):
            fh.write(f"{float(f)!r},{float(t)!r},{float(th)!r}\n")
        fh.write(f"# auc={curve.auc!r}\n")


class Witness(enum.Enum):
    NEGATIVITY = "negativity"
    CHSH = "chsh"
    FEF = "fef"


def _two_qubit_matrix(rho, what: str) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        if rho.kind is not SystemKind.TWO_QUBIT:
            raise DimensionMismatch(f"{what} is defined for two-qubit states only")
        return rho.mat
    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise DimensionMismatch(f"{what} is defined for two-qubit states only")
    return mat


def _pauli_correlations(mats: np.ndarray) -> np.ndarray:
    """T[k, i, j] = Tr[rho_k sigma_i x sigma_j] for a stack of 4x4 states."""
    paulis = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
    ops = np.einsum("iab,jcd->ijacbd", paulis, paulis).reshape(3, 3, 4, 4)
    return np.einsum("kba,ijab->kij", mats, ops).real


def chsh_m_value_stack(mats: np.ndarray) -> np.ndarray:
    """Horodecki criterion: sum of the two largest eigenvalues of T^T T."""
    t = _pauli_correlations(mats)
    m = np.einsum("kji,kjl->kil", t, t)
    m = 0.5 * (m + m.transpose(0, 2, 1))
    eigs = jacobi_eigenvalues_stack(m.astype(complex))
    return eigs[:, -1] + eigs[:, -2]


def chsh_violation(rho) -> tuple[bool, float]:
    """(violated, M) where M > 1 certifies a CHSH violation."""
    mat = _two_qubit_matrix(rho, "the CHSH criterion")
    m_value = float(chsh_m_value_stack(mat[None])[0])
    return m_value > 1.0, m_value


# Magic basis columns; the real part of rho in this basis carries the
# maximal overlap with maximally entangled states as its top eigenvalue.
_SQ2 = 1.0 / np.sqrt(2.0)
_MAGIC = np.array([
    [_SQ2, 1j * _SQ2, 0, 0],
    [0, 0, 1j * _SQ2, _SQ2],
    [0, 0, 1j * _SQ2, -_SQ2],
    [_SQ2, -1j * _SQ2, 0, 0],
])


def fef_stack(mats: np.ndarray) -> np.ndarray:
    m = np.einsum("ab,kbc,cd->kad", _MAGIC.conj().T, mats, _MAGIC).real
    m = 0.5 * (m + m.transpose(0, 2, 1))
    eigs = jacobi_eigenvalues_stack(m.astype(complex))
    return eigs[:, -1]


def fef(rho) -> float:
    """Fully entangled fraction: largest overlap with any maximally entangled state."""
    mat = _two_qubit_matrix(rho, "the fully entangled fraction")
    m = (_MAGIC.conj().T @ mat @ _MAGIC).real
    return float(hermitian_eigenvalues((0.5 * (m + m.T)).astype(complex))[-1])


def witness_scores(ds: Dataset, witness: Witness) -> np.ndarray:
    """Score every sample of a dataset with one closed-form witness.

    CHSH and FEF need density matrices, which are regenerated from the
    dataset's seed and per-sample stream indices, so loaded, split, and
    restricted datasets all work.
    """
    if witness is Witness.NEGATIVITY:
        return ds.negativities
    if ds.kind is not SystemKind.TWO_QUBIT:
        raise DimensionMismatch(f"the {witness.value} witness is defined for two-qubit states only")
    mats = regenerate_states(ds)
    if witness is Witness.CHSH:
        return chsh_m_value_stack(mats)
    return fef_stack(mats)


def witness_threshold(witness: Witness) -> float:
    """Score above which the witness flags entanglement."""
    if witness is Witness.NEGATIVITY:
        return ENTANGLE_EPS
    if witness is Witness.CHSH:
        return 1.0
    return 0.5


def baseline_sensitivity(test: Dataset, witness: Witness, rng_seed: int | None = None) -> float:
    """TPR of a witness at its own threshold; the analytic criteria admit no
    false positives, so a nonzero FPR is raised as an error, not returned.

    `rng_seed`, when given, must match the seed the dataset records; state
    regeneration follows the dataset itself.
    """
    sensitivity, fpr = baseline_rates(test, witness, rng_seed)
    if fpr != 0.0:
        raise AssertionError(
            f"the {witness.value} witness flagged separable states (FPR {fpr})")
    return sensitivity


def baseline_rates(ds: Dataset, witness: Witness, rng_seed: int | None = None) -> tuple[float, float]:
    """(sensitivity, false positive rate) of a witness at its own threshold."""
    if rng_seed is not None and rng_seed != ds.seed:
        raise ValueError(f"rng_seed {rng_seed} does not match the dataset seed {ds.seed}")
    if len(ds.labels) == 0:
        raise EmptyDataset("baseline rates need a non-empty dataset")
    scores = witness_scores(ds, witness)
    flagged = scores > witness_threshold(witness)
    n_pos = int(ds.labels.sum())
    n_neg = len(ds.labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("baseline rates need both entangled and separable samples")
    sensitivity = float(np.sum(flagged & ds.labels) / n_pos)
    fpr = float(np.sum(flagged & ~ds.labels) / n_neg)
    return sensitivity, fpr
