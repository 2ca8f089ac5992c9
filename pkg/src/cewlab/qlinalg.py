"""Seeded randomness and dense Hermitian linear algebra on small complex matrices.

Matrices are plain complex numpy arrays (nothing here exceeds 36 x 36).
Eigenvalues come from a cyclic Jacobi solver that operates on stacks of
matrices; a converged matrix in a stack is frozen, so the result for any
single matrix is bit-identical whether it is solved alone or batched with
others. Dataset regeneration relies on that.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EigenNoConvergence, NotHermitian

HERMITICITY_TOL = 1e-10
JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream).

    Identical (seed, stream) pairs reproduce identical sequences bit for
    bit; distinct streams are statistically independent, which lets the
    dataset layer hand one stream to every sample index.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    if not 0 <= stream < 2**64:
        raise ValueError("stream must fit in an unsigned 64-bit integer")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normal draws via Box-Muller on the uniform stream."""
    u1 = 1.0 - rng.random(shape)  # (0, 1], keeps the log finite
    u2 = rng.random(shape)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def complex_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian draws (E|z|^2 = 1), polar Box-Muller form."""
    u1 = 1.0 - rng.random(shape)
    u2 = rng.random(shape)
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    if dim < 1:
        raise ValueError("dim must be positive")
    z = complex_normals(rng, (dim, dim))
    return haar_from_ginibre(z[None])[0]


def haar_from_ginibre(z: np.ndarray) -> np.ndarray:
    """QR-orthonormalize a stack of Ginibre matrices with phase correction.

    The raw QR factor is only Haar up to the sign/phase ambiguity of the
    decomposition; rescaling each column by R_kk/|R_kk| removes it.
    """
    q, r = np.linalg.qr(z)
    d = np.einsum('...ii->...i', r)
    return q * (d / np.abs(d))[..., None, :]


def swap_operator(dim_a: int, dim_b: int) -> np.ndarray:
    """Permutation matrix S with S(|a> tensor |b>) = |b> tensor |a>."""
    s = np.zeros((dim_a * dim_b, dim_a * dim_b))
    for a in range(dim_a):
        for b in range(dim_b):
            s[b * dim_a + a, a * dim_b + b] = 1.0
    return s


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending.

    Raises NotHermitian when max|M - M^dag| exceeds 1e-10 and
    EigenNoConvergence if the sweep budget runs out.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    deviation = np.abs(m - m.conj().T).max() if m.size else 0.0
    if deviation > HERMITICITY_TOL:
        raise NotHermitian(f"max|M - M^dag| = {deviation:.3e} exceeds {HERMITICITY_TOL:.0e}")
    # exact identity for exactly-Hermitian input, regularizes borderline ones
    sym = 0.5 * (m + m.conj().T)
    return jacobi_eigenvalues_stack(sym[None])[0]


def _offdiag_sq(a: np.ndarray) -> np.ndarray:
    # summed directly, not total minus trace: that subtraction cancels to
    # ~1e-16 even when every off-diagonal entry is exactly zero
    sq = a.real**2 + a.imag**2
    idx = np.arange(a.shape[1])
    sq[:, idx, idx] = 0.0
    return sq.sum(axis=(1, 2))


def jacobi_eigenvalues_stack(mats: np.ndarray) -> np.ndarray:
    """Cyclic Jacobi eigenvalues for a stack of Hermitian matrices.

    Input shape (m, n, n), output shape (m, n) with each row ascending.
    Inputs are trusted to be Hermitian; use hermitian_eigenvalues for the
    checked single-matrix form. Frozen-when-converged semantics make each
    row independent of the rest of the stack, bit for bit.
    """
    a = np.array(mats, dtype=np.complex128)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise DimensionMismatch(f"expected a stack of square matrices, got shape {a.shape}")
    m, n, _ = a.shape
    if n == 1:
        return a[:, :, 0].real.copy()

    tol_sq = JACOBI_OFF_TOL**2
    converged = False
    for _ in range(JACOBI_MAX_SWEEPS):
        active = _offdiag_sq(a) >= tol_sq
        if not active.any():
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                rot = active & (mag > 0.0)
                safe_mag = np.where(rot, mag, 1.0)
                u = np.where(rot, apq / safe_mag, 1.0)  # pivot phase e^{i phi}
                tau = np.where(rot, (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe_mag), 0.0)
                # smaller root of t^2 + 2 tau t - 1 = 0 for a bounded rotation angle
                t = np.where(rot, np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(tau * tau + 1.0)), 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                su_conj = s * u.conj()
                su = s * u

                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * colp - su_conj[:, None] * colq
                a[:, :, q] = s[:, None] * colp + (c * u.conj())[:, None] * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rowp - su[:, None] * rowq
                a[:, q, :] = s[:, None] * rowp + (c * u)[:, None] * rowq
                # the rotation is constructed to null the pivot exactly
                a[:, p, q] = np.where(rot, 0.0, a[:, p, q])
                a[:, q, p] = np.where(rot, 0.0, a[:, q, p])
    if not converged and (_offdiag_sq(a) >= tol_sq).any():
        raise EigenNoConvergence(f"off-diagonal norm above {JACOBI_OFF_TOL:.0e} after {JACOBI_MAX_SWEEPS} sweeps")
    return np.sort(np.einsum('mii->mi', a).real, axis=1)
