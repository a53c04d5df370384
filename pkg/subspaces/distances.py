"""
distances.py
Exact classical subspace distances. These are the reference values every
simulated pipeline is checked against.

Distances:
    - grassmann_distance: sqrt(sum theta_i^2) over all principal angles.
    - asimov_distance: the largest principal angle.
    - projection_distance: sine of the largest principal angle.
    - chordal_distance: sqrt(k - sum sigma_i^2).
    - ellipsoid_distance: sqrt(sum log^2 lambda_i(M^-1 N)) on the SPD cone.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError
from .linalg import (
    Matrix, as_matrix, is_orthonormal_columns, is_spd, jacobi_svd, psd_power, sym_eig,
)

CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class PrincipalAngles:
    """
    thetas ascending in [0, pi/2]; sigmas descending in [0, 1]; cos(thetas) == sigmas.
    """
    thetas: np.ndarray
    sigmas: np.ndarray

    @property
    def k(self) -> int:
        return len(self.thetas)


def _check_bases(m, n):
    m = as_matrix(m, 'm')
    n = as_matrix(n, 'n')
    if m.shape != n.shape:
        raise InvalidInputError(f'bases must share a shape, got {m.shape} and {n.shape}')
    if m.shape[0] < m.shape[1]:
        raise InvalidInputError(f'bases must be tall (n >= k), got {m.shape}')
    if not is_orthonormal_columns(m) or not is_orthonormal_columns(n):
        raise InvalidInputError('bases must have orthonormal columns')
    return m, n


def principal_angles(m, n) -> PrincipalAngles:
    """
    Principal angles between span(m) and span(n) from the SVD of m^T n.
    Raises:
        InvalidInputError: on shape mismatch, non-orthonormal columns, or a
            singular value above 1 + CLAMP_TOL.
    """
    m, n = _check_bases(m, n)
    sigmas = jacobi_svd(m.conj().T @ n).singulars
    if sigmas[0] > 1.0 + CLAMP_TOL:
        raise InvalidInputError(f'singular value {sigmas[0]:.3e} of m^T n exceeds 1')
    sigmas = np.clip(sigmas, 0.0, 1.0)
    return PrincipalAngles(thetas=np.arccos(sigmas), sigmas=sigmas)


def grassmann_distance(m, n) -> float:
    angles = principal_angles(m, n)
    return float(np.sqrt(np.sum(angles.thetas ** 2)))


def asimov_distance(m, n) -> float:
    return float(principal_angles(m, n).thetas[-1])


def projection_distance(m, n) -> float:
    return float(np.sin(principal_angles(m, n).thetas[-1]))


def chordal_distance(m, n) -> float:
    angles = principal_angles(m, n)
    return float(np.sqrt(max(angles.k - np.sum(angles.sigmas ** 2), 0.0)))


def ellipsoid_spectrum(m, n) -> np.ndarray:
    """
    Eigenvalues of M^-1 N, ascending, through the similar SPD matrix M^-1/2 N M^-1/2.
    Raises:
        InvalidInputError: if either input is not SPD or the sizes differ.
    """
    m = as_matrix(m, 'm')
    n = as_matrix(n, 'n')
    if m.shape != n.shape:
        raise InvalidInputError(f'ellipsoid inputs must share a shape, got {m.shape} and {n.shape}')
    if not is_spd(m) or not is_spd(n):
        raise InvalidInputError('ellipsoid inputs must be symmetric positive definite')
    m_inv_half = psd_power(m, -0.5)
    similar: Matrix = m_inv_half @ n @ m_inv_half
    eigvals, _ = sym_eig((similar + similar.conj().T) / 2)
    return eigvals


def ellipsoid_distance(m, n) -> float:
    return float(np.sqrt(np.sum(np.log(ellipsoid_spectrum(m, n)) ** 2)))
