"""
linalg.py
Dense linear-algebra substrate for the subspaces app.

Every matrix is a 2-D numpy array of dtype complex128; real inputs carry exact
zero imaginary parts. The functions here are pure and never mutate their inputs.

Contents:
    - as_matrix, is_orthonormal_columns, is_spd, is_hermitian: validation helpers.
    - jacobi_svd: one-sided cyclic Jacobi SVD.
    - sym_eig, matrix_exp_unitary, psd_power: spectral routines for Hermitian matrices.
    - condition_number, varah_bound: conditioning diagnostics.
    - orthonormal_complement, complete_unitary: basis extension used by the encodings.
    - random_orthonormal, random_spd, random_diagonally_dominant: seeded instance generators.
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .exceptions import InvalidInputError

logger = logging.getLogger(__name__)

Matrix = npt.NDArray[np.complex128]

ORTHONORMAL_TOL = 1e-10
SPD_SYMMETRY_TOL = 1e-12
HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60
SINGULAR_CUTOFF = 1e-14


def as_matrix(a, name='matrix') -> Matrix:
    """
    Convert array-like input to a complex128 matrix.
    Args:
        a: Array-like with two dimensions (a 1-D input is read as a column).
        name: Label used in error messages.
    Returns:
        A fresh complex128 array.
    Raises:
        InvalidInputError: on non-finite entries or more than two dimensions.
    """
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f'{name} must be a non-empty 2-D array, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f'{name} has non-finite entries')
    return arr


def is_hermitian(a: Matrix, tol: float = HERMITIAN_TOL) -> bool:
    return a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_orthonormal_columns(a: Matrix, tol: float = ORTHONORMAL_TOL) -> bool:
    gram = a.conj().T @ a
    return bool(np.max(np.abs(gram - np.eye(a.shape[1]))) <= tol)


def is_spd(a: Matrix) -> bool:
    if not is_hermitian(a, SPD_SYMMETRY_TOL):
        return False
    return bool(np.min(scipy.linalg.eigvalsh(_hermitian_part(a))) > 0)


def _hermitian_part(a: Matrix) -> Matrix:
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class SvdResult:
    """
    Thin singular value decomposition a = left @ diag(singulars) @ right^H.
    `singulars` is sorted descending; `left` and `right` have orthonormal columns.
    """
    left: Matrix
    singulars: np.ndarray
    right: Matrix

    def reconstruct(self) -> Matrix:
        return (self.left * self.singulars) @ self.right.conj().T


def jacobi_svd(a) -> SvdResult:
    """
    One-sided cyclic Jacobi SVD (Hestenes).

    Columns of a working copy are orthogonalized pairwise in a fixed cyclic order
    until no pair has a relative Gram off-diagonal above JACOBI_TOL. The
    accumulated rotations form the right singular vectors.

    Args:
        a: Matrix with rows >= cols.
    Returns:
        SvdResult with singular values in descending order.
    Raises:
        InvalidInputError: on non-finite entries or rows < cols.
    """
    work = as_matrix(a)
    rows, cols = work.shape
    if rows < cols:
        raise InvalidInputError(f'jacobi_svd needs rows >= cols, got {rows}x{cols}; transpose first')
    right = np.eye(cols, dtype=np.complex128)
    frobenius = np.linalg.norm(work)

    sweeps = 0
    rotated = cols > 1
    while rotated and sweeps < JACOBI_MAX_SWEEPS:
        rotated = False
        sweeps += 1
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                alpha = np.vdot(work[:, p], work[:, p]).real
                beta = np.vdot(work[:, q], work[:, q]).real
                gamma = np.vdot(work[:, p], work[:, q])
                magnitude = abs(gamma)
                if magnitude <= JACOBI_TOL * np.sqrt(alpha * beta) or magnitude == 0.0:
                    continue
                rotated = True
                phase = gamma / magnitude
                zeta = (beta - alpha) / (2.0 * magnitude)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for mat in (work, right):
                    col_p = mat[:, p].copy()
                    mat[:, p] = c * col_p - s * np.conj(phase) * mat[:, q]
                    mat[:, q] = s * phase * col_p + c * mat[:, q]
    if rotated:
        logger.warning(f'jacobi_svd stopped at the sweep cap ({JACOBI_MAX_SWEEPS}) for a {rows}x{cols} input')
    else:
        logger.debug(f'jacobi_svd converged in {sweeps} sweeps for a {rows}x{cols} input')

    singulars = np.linalg.norm(work, axis=0)
    order = np.argsort(-singulars, kind='stable')
    singulars = singulars[order]
    work = work[:, order]
    right = right[:, order]

    nonzero = singulars > SINGULAR_CUTOFF * max(frobenius, np.finfo(float).tiny)
    left = np.zeros((rows, cols), dtype=np.complex128)
    left[:, nonzero] = work[:, nonzero] / singulars[nonzero]
    missing = int(np.count_nonzero(~nonzero))
    if missing:
        left[:, ~nonzero] = orthonormal_complement(left[:, nonzero], rows)[:, :missing]
        singulars[~nonzero] = 0.0
    return SvdResult(left=left, singulars=singulars, right=right)


def sym_eig(a):
    """
    Spectral decomposition of a Hermitian matrix.
    Returns:
        (eigvals, eigvecs): ascending real eigenvalues and orthonormal eigenvector columns.
    Raises:
        InvalidInputError: if a is not Hermitian to HERMITIAN_TOL.
    """
    mat = as_matrix(a)
    if not is_hermitian(mat):
        raise InvalidInputError('sym_eig needs a symmetric (Hermitian) matrix')
    eigvals, eigvecs = scipy.linalg.eigh(_hermitian_part(mat))
    return eigvals, eigvecs.astype(np.complex128)


def matrix_exp_unitary(h, t: float) -> Matrix:
    """exp(-i h t) through the spectral decomposition of h."""
    eigvals, eigvecs = sym_eig(h)
    return (eigvecs * np.exp(-1j * eigvals * t)) @ eigvecs.conj().T


def psd_power(a, power: float, floor: float = 0.0) -> Matrix:
    """
    a**power for a Hermitian positive semidefinite matrix.
    Eigenvalues below `floor` are raised to it first, so tiny negative
    round-off never reaches a fractional power.
    """
    eigvals, eigvecs = sym_eig(a)
    eigvals = np.maximum(eigvals, floor)
    return (eigvecs * eigvals ** power) @ eigvecs.conj().T


def condition_number(a) -> float:
    """
    sigma_max / sigma_min from jacobi_svd.
    Returns +inf when sigma_min < SINGULAR_CUTOFF * sigma_max.
    Raises:
        InvalidInputError: for the zero matrix.
    """
    mat = as_matrix(a)
    if not np.any(mat):
        raise InvalidInputError('condition number of the zero matrix is undefined')
    if mat.shape[0] < mat.shape[1]:
        mat = mat.conj().T
    singulars = jacobi_svd(mat).singulars
    if singulars[-1] < SINGULAR_CUTOFF * singulars[0]:
        return float('inf')
    return float(singulars[0] / singulars[-1])


def varah_bound(a):
    """
    Varah's lower bound on the smallest singular value.

    For a matrix that is strictly diagonally dominant by rows,
    sigma_min(a) >= min_k(|a_kk| - sum_{j != k} |a_kj|).

    Returns:
        (alpha, dominant): the bound and whether it is positive.
    """
    mat = as_matrix(a)
    if mat.shape[0] != mat.shape[1]:
        raise InvalidInputError(f'varah_bound needs a square matrix, got {mat.shape}')
    diagonal = np.abs(np.diag(mat))
    off_diagonal = np.abs(mat).sum(axis=1) - diagonal
    alpha = float(np.min(diagonal - off_diagonal))
    return alpha, alpha > 0


def orthonormal_complement(q: Matrix, dim: int) -> Matrix:
    """
    Orthonormal basis of the complement of span(q) in C^dim.
    Args:
        q: dim x r matrix with orthonormal columns (r may be 0).
        dim: Ambient dimension.
    Returns:
        dim x (dim - r) matrix whose columns are orthonormal and orthogonal to q.
    """
    rank = q.shape[1] if q.size else 0
    projector = np.eye(dim, dtype=np.complex128)
    if rank:
        projector = projector - q @ q.conj().T
    basis, _, _ = scipy.linalg.qr(projector, pivoting=True)
    complement = basis[:, :dim - rank]
    if rank:
        # one re-orthogonalization pass against q
        complement = complement - q @ (q.conj().T @ complement)
        complement, _ = scipy.linalg.qr(complement, mode='economic')
    return complement.astype(np.complex128)


def complete_unitary(columns: Matrix) -> Matrix:
    """
    Extend orthonormal columns to a square unitary whose leading columns are `columns`.
    """
    dim, rank = columns.shape
    if rank == dim:
        return columns.astype(np.complex128)
    return np.hstack([columns, orthonormal_complement(columns, dim)])


def random_orthonormal(n: int, k: int, seed: int) -> Matrix:
    """
    n x k matrix with orthonormal columns, drawn from Gaussian QR with a sign fix.
    Deterministic per seed.
    """
    if not 1 <= k <= n:
        raise InvalidInputError(f'random_orthonormal needs 1 <= k <= n, got n={n}, k={k}')
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((n, k))
    q, r = scipy.linalg.qr(gaussian, mode='economic')
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return as_matrix(q * signs)


def random_spd(n: int, kappa: float, seed: int) -> Matrix:
    """
    n x n symmetric positive definite matrix with spectrum inside [1/kappa, 1].

    For n >= 2 both endpoints are attained, so the condition number is exactly kappa.
    """
    if n < 1:
        raise InvalidInputError(f'random_spd needs n >= 1, got {n}')
    if kappa < 1:
        raise InvalidInputError(f'random_spd needs kappa >= 1, got {kappa}')
    rng = np.random.default_rng(seed)
    if n == 1:
        eigvals = rng.uniform(1.0 / kappa, 1.0, size=1)
    else:
        eigvals = np.concatenate([[1.0 / kappa, 1.0], rng.uniform(1.0 / kappa, 1.0, size=n - 2)])
    q, r = scipy.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    spd = (q * eigvals) @ q.T
    return as_matrix((spd + spd.T) / 2)


def random_diagonally_dominant(n: int, seed: int, margin: float = 0.1) -> Matrix:
    """
    n x n real symmetric matrix, strictly diagonally dominant by rows.
    Each diagonal entry exceeds its row's off-diagonal absolute sum by a
    random amount in [margin, 1 + margin], with a random sign.

    Symmetry puts every eigenvalue inside a Gershgorin disc that excludes
    [-alpha, alpha], so sigma_min > varah_bound(mat)[0]. Row dominance alone
    only gives sigma_min >= alpha / sqrt(n).
    """
    if n < 1:
        raise InvalidInputError(f'random_diagonally_dominant needs n >= 1, got {n}')
    if margin <= 0:
        raise InvalidInputError('margin must be positive')
    rng = np.random.default_rng(seed)
    mat = rng.standard_normal((n, n))
    mat = (mat + mat.T) / 2
    np.fill_diagonal(mat, 0.0)
    excess = rng.uniform(margin, 1.0 + margin, size=n)
    signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    np.fill_diagonal(mat, signs * (np.abs(mat).sum(axis=1) + excess))
    return as_matrix(mat)
