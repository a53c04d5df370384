"""
block_encoding.py
Block encodings and the transforms applied to them.

A BlockEncoding holds a unitary U on (ancilla ⊗ system) whose top-left
system_dim x system_dim block (ancilla in |0>) equals A / alpha. Register
layouts are fixed here and documented per constructor; garbage content
outside the zero-ancilla block is never relied on.

Constructors:
    - column_application_unitary: a Hermitian matrix, by unitary completion.
    - spectral_block_encoding, inverse_block_encoding, inverse_sqrt_block_encoding:
      functions of an SPD matrix.
    - compose, flagged_product, adjoint: products and adjoints of encodings.
    - gram_from_encoding: the two-flag construction of A^H A from an encoding of A.
    - gram_block_encoding: (M^T N)^T M^T N from two orthonormal bases.
    - ellipsoid_gram_encoding: P^T P for P = M^-1/2 N M^-1/2, or the direct P = M^-1 N.
    - log_block_encoding: log of a positive definite encoded block.

Transforms:
    - chebyshev_block: T_d of the encoded block by qubitization.
    - evolution_operator: exp(-i A t), exactly or by a truncated Jacobi-Anger series.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import jv

from .exceptions import InvalidInputError, InvariantError, PreconditionError
from .linalg import (
    Matrix, as_matrix, complete_unitary, is_hermitian, is_orthonormal_columns, is_spd,
    matrix_exp_unitary, psd_power, sym_eig,
)

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-9
NORM_SLACK = 1e-9
EVOLUTION_MODES = ('exact', 'jacobi_anger')


def next_power_of_two(value: int) -> int:
    return 1 << max(int(value) - 1, 0).bit_length()


@dataclass(frozen=True)
class BlockEncoding:
    """
    Unitary block encoding of A with subnormalization alpha.

    unitary: total_dim x total_dim, indexed as (ancilla, system) with the
        system register least significant.
    logical_dim: size of A before any zero padding of the system register.
    """
    unitary: Matrix
    alpha: float
    system_dim: int
    total_dim: int
    logical_dim: Optional[int] = None

    @property
    def ancilla_dim(self) -> int:
        return self.total_dim // self.system_dim

    @property
    def logical(self) -> int:
        return self.logical_dim or self.system_dim

    def block(self) -> Matrix:
        return extract_block(self)

    def encoded(self) -> Matrix:
        """alpha times the top-left block, i.e. the encoded matrix itself."""
        return self.alpha * extract_block(self)

    def check(self) -> 'BlockEncoding':
        """
        Verify the encoding invariants and return self.
        Raises:
            InvariantError: if the unitary is not unitary or the block norm exceeds 1.
        """
        if self.unitary.shape != (self.total_dim, self.total_dim) or self.total_dim % self.system_dim:
            raise InvariantError(f'inconsistent encoding shape {self.unitary.shape} for system {self.system_dim}')
        deviation = np.max(np.abs(self.unitary.conj().T @ self.unitary - np.eye(self.total_dim)))
        if deviation > UNITARY_TOL:
            raise InvariantError(f'encoding is not unitary (deviation {deviation:.2e})')
        if np.linalg.norm(extract_block(self), 2) > 1 + UNITARY_TOL:
            raise InvariantError('encoded block has operator norm above 1')
        return self


def extract_block(be: BlockEncoding) -> Matrix:
    d = be.system_dim
    return be.unitary[:d, :d].copy()


def hermitian_embed(m) -> Matrix:
    """
    [[0, M], [M^H, 0]] for an n x k matrix M, zero-padded to the next power of two.
    """
    m = as_matrix(m)
    rows, cols = m.shape
    size = rows + cols
    dim = next_power_of_two(size)
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[:rows, rows:size] = m
    out[rows:size, :rows] = m.conj().T
    return out


def _dilate(block: Matrix) -> Matrix:
    """
    Unitary on (one qubit ⊗ system) with `block` in its top-left corner.

    The first columns [B; sqrt(I - B^H B)] are orthonormal whenever ||B|| <= 1;
    the rest come from orthonormal-basis extension.
    """
    dim = block.shape[0]
    norm = np.linalg.norm(block, 2)
    if norm > 1 + NORM_SLACK:
        raise InvariantError(f'cannot dilate a block of norm {norm:.6f} > 1')
    defect = psd_power(np.eye(dim) - block.conj().T @ block, 0.5)
    return complete_unitary(np.vstack([block, defect]))


def column_application_unitary(m) -> BlockEncoding:
    """
    Encoding of a Hermitian matrix with alpha = max(s, ||M||_2 (1 + 1e-9)),
    s being the largest number of nonzeros in a row.
    Layout: (one qubit ⊗ system).
    """
    m = as_matrix(m)
    if not is_hermitian(m):
        raise InvalidInputError('column_application_unitary needs a Hermitian matrix; embed it first')
    sparsity = int(np.max(np.count_nonzero(m, axis=1)))
    alpha = max(float(sparsity), float(np.linalg.norm(m, 2)) * (1 + NORM_SLACK)) or 1.0
    dim = m.shape[0]
    return BlockEncoding(_dilate(m / alpha), alpha, dim, 2 * dim).check()


def spectral_block_encoding(m, func: Callable[[np.ndarray], np.ndarray], alpha: float) -> BlockEncoding:
    """Encoding of func(M) / alpha for Hermitian M. Layout: (one qubit ⊗ system)."""
    eigvals, eigvecs = sym_eig(m)
    transformed = (eigvecs * func(eigvals)) @ eigvecs.conj().T
    dim = transformed.shape[0]
    return BlockEncoding(_dilate(transformed / alpha), float(alpha), dim, 2 * dim).check()


def check_spectrum(m, kappa: float) -> np.ndarray:
    """
    Eigenvalues of an SPD matrix, verified to lie in [1/kappa, 1] up to 1e-9 relative slack.
    Raises:
        InvalidInputError: if m is not symmetric or kappa < 1.
        PreconditionError: if an eigenvalue is out of range.
    """
    if kappa < 1:
        raise InvalidInputError(f'kappa must be >= 1, got {kappa}')
    eigvals, _ = sym_eig(m)
    if eigvals[0] < (1 - NORM_SLACK) / kappa or eigvals[-1] > 1 + NORM_SLACK:
        raise PreconditionError(
            f'spectrum [{eigvals[0]:.6g}, {eigvals[-1]:.6g}] is outside [1/kappa, 1] for kappa={kappa:.6g}'
        )
    return eigvals


def inverse_block_encoding(m, kappa: float) -> BlockEncoding:
    """
    Encoding of M^-1 with alpha = kappa. The zero ancilla is the success flag:
    U|0>|b> = |0> (M^-1 / kappa)|b> + |1>|garbage>.
    """
    check_spectrum(m, kappa)
    return spectral_block_encoding(m, lambda x: 1.0 / x, kappa)


def inverse_sqrt_block_encoding(m, kappa: float) -> BlockEncoding:
    """Encoding of M^-1/2 with alpha = sqrt(kappa)."""
    check_spectrum(m, kappa)
    return spectral_block_encoding(m, lambda x: x ** -0.5, np.sqrt(kappa))


def adjoint(be: BlockEncoding) -> BlockEncoding:
    return replace(be, unitary=be.unitary.conj().T.copy())


def _lift(unitary: Matrix, ancilla: int, system: int, middle: int) -> Matrix:
    """Act with `unitary` on (ancilla ⊗ system) of (ancilla ⊗ middle ⊗ system)."""
    tensor = unitary.reshape(ancilla, system, ancilla, system)
    lifted = np.einsum('xsyt,bc->xbsyct', tensor, np.eye(middle))
    dim = ancilla * middle * system
    return lifted.reshape(dim, dim)


def _same_system(first: BlockEncoding, second: BlockEncoding):
    if first.system_dim != second.system_dim:
        raise InvalidInputError(f'system sizes differ: {first.system_dim} vs {second.system_dim}')


def compose(outer: BlockEncoding, inner: BlockEncoding) -> BlockEncoding:
    """
    Encoding of outer·inner, applying `inner` first.
    Layout: (outer ancilla ⊗ inner ancilla ⊗ system); alpha multiplies.
    """
    _same_system(outer, inner)
    a_out, a_in, dim = outer.ancilla_dim, inner.ancilla_dim, outer.system_dim
    unitary = _lift(outer.unitary, a_out, dim, a_in) @ np.kron(np.eye(a_out), inner.unitary)
    return BlockEncoding(
        unitary, outer.alpha * inner.alpha, dim, a_out * a_in * dim,
        logical_dim=inner.logical_dim or outer.logical_dim,
    ).check()


def apply_permutation(perm: np.ndarray, mat: Matrix) -> Matrix:
    """Rows of mat moved by the basis permutation |i> -> |perm[i]>."""
    out = np.empty_like(mat)
    out[perm] = mat
    return out


def flagged_product(first: BlockEncoding, second: BlockEncoding) -> BlockEncoding:
    """
    Encoding of second·first with one flag qubit.

    Apply `first`; flip the flag where the ancilla of `first` is zero; apply
    `second` controlled on the flag; flip the flag back on the same condition.
    Layout: (flag ⊗ second ancilla ⊗ first ancilla ⊗ system).
    """
    _same_system(first, second)
    a1, a2, dim = first.ancilla_dim, second.ancilla_dim, first.system_dim
    inner = a2 * a1 * dim
    total = 2 * inner

    index = np.arange(total)
    flag = index // inner
    first_anc = (index // dim) % a1
    flip = np.where(first_anc == 0, index + np.where(flag == 0, inner, -inner), index)

    controlled = np.eye(total, dtype=np.complex128)
    controlled[inner:, inner:] = _lift(second.unitary, a2, dim, a1)

    unitary = np.kron(np.eye(2 * a2), first.unitary)
    unitary = apply_permutation(flip, unitary)
    unitary = controlled @ unitary
    unitary = apply_permutation(flip, unitary)
    return BlockEncoding(
        unitary, first.alpha * second.alpha, dim, total,
        logical_dim=first.logical_dim or second.logical_dim,
    ).check()


def gram_from_encoding(be: BlockEncoding) -> BlockEncoding:
    """
    Encoding of A^H A / alpha^2 from an encoding of A / alpha, as U_{K,2}^H U_{K,1}.

    U_{K,1}: apply the encoding, set the last flag, then flip the next-to-last
    flag where the encoding's ancilla is nonzero (good branch |01>, garbage |11>).
    U_{K,2}: U_{K,1} followed by a CNOT from the next-to-last flag onto the last
    (garbage moves to |10>). Only the good branches overlap.
    Layout: (two flags ⊗ encoding ancilla ⊗ system).
    """
    inner = be.total_dim
    total = 4 * inner
    index = np.arange(total)
    flags = index // inner
    garbage = (index % inner) >= be.system_dim

    marked = flags ^ 1
    marked = np.where((marked & 1).astype(bool) & garbage, marked ^ 2, marked)
    mark = marked * inner + index % inner
    cnot_flags = np.where(flags & 2, flags ^ 1, flags)
    cnot = cnot_flags * inner + index % inner

    first = apply_permutation(mark, np.kron(np.eye(4), be.unitary))
    second = apply_permutation(cnot, first)
    return BlockEncoding(
        second.conj().T @ first, be.alpha ** 2, be.system_dim, total, logical_dim=be.logical_dim,
    ).check()


def _pad_columns(m: Matrix, cols: int) -> Matrix:
    out = np.zeros((m.shape[0], cols), dtype=np.complex128)
    out[:, :m.shape[1]] = m
    return out


def gram_block_encoding(m, n) -> BlockEncoding:
    """
    Encoding of K = (M^T N)^T M^T N with alpha = (s_M s_N)^2.

    k is padded to a power of two. M^T and N^T are embedded so that the
    product of the embeddings carries M^T N in its top-left block; the
    remaining part of the embedded register joins the ancilla.
    """
    m = as_matrix(m, 'm')
    n = as_matrix(n, 'n')
    if m.shape != n.shape:
        raise InvalidInputError(f'bases must share a shape, got {m.shape} and {n.shape}')
    if not is_orthonormal_columns(m) or not is_orthonormal_columns(n):
        raise InvalidInputError('gram_block_encoding needs orthonormal columns')
    k = m.shape[1]
    k_pad = next_power_of_two(k)
    apply_m = column_application_unitary(hermitian_embed(_pad_columns(m, k_pad).conj().T))
    apply_n = column_application_unitary(hermitian_embed(_pad_columns(n, k_pad).conj().T))
    product = compose(apply_m, apply_n)
    cross = BlockEncoding(product.unitary, product.alpha, k_pad, product.total_dim, logical_dim=k)
    return gram_from_encoding(cross)


def ellipsoid_gram_from_parts(
    apply_n: BlockEncoding,
    inverse_power: Callable[[float], BlockEncoding],
    route: str,
    logical_dim: int,
) -> BlockEncoding:
    """
    Gram encoding for the ellipsoid pipeline from an encoding of N and a
    factory returning encodings of M^-power.

    route 'direct': P = M^-1 N.
    route 'symmetric': P = M^-1/2 N M^-1/2, similar to M^-1 N and SPD.
    """
    if route == 'direct':
        product = flagged_product(apply_n, inverse_power(1.0))
    elif route == 'symmetric':
        half = inverse_power(0.5)
        product = flagged_product(flagged_product(half, apply_n), half)
    else:
        raise InvalidInputError(f"unknown ellipsoid route '{route}'")
    return gram_from_encoding(replace(product, logical_dim=logical_dim))


def _pad_spd(m: Matrix, dim: int, fill: float) -> Matrix:
    out = np.zeros((dim, dim), dtype=np.complex128)
    size = m.shape[0]
    out[:size, :size] = m
    out[range(size, dim), range(size, dim)] = fill
    return out


def ellipsoid_gram_encoding(m, n, kappa_m: float, route: str = 'symmetric') -> BlockEncoding:
    """
    Encoding of P^T P with alpha = (kappa_m s_N)^2.
    M is padded with unit eigenvalues and N with zeros, so padded directions
    of P are exactly zero.
    """
    m = as_matrix(m, 'm')
    n = as_matrix(n, 'n')
    if m.shape != n.shape or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f'ellipsoid inputs must be square of one size, got {m.shape} and {n.shape}')
    if not is_spd(n):
        raise InvalidInputError('n must be symmetric positive definite')
    check_spectrum(m, kappa_m)
    size = m.shape[0]
    dim = next_power_of_two(size)
    m_pad = _pad_spd(m, dim, 1.0)
    apply_n = column_application_unitary(_pad_spd(n, dim, 0.0))

    def inverse_power(power):
        return spectral_block_encoding(m_pad, lambda x: x ** -power, kappa_m ** power)

    return ellipsoid_gram_from_parts(apply_n, inverse_power, route, size)


def log_block_encoding(be: BlockEncoding, scale: float) -> BlockEncoding:
    """
    Encoding of log(K) / scale with alpha = scale, K the logical block of
    a positive definite encoding. Layout: (one qubit ⊗ logical system).
    Raises:
        InvalidInputError: if K is not positive definite or scale does not cover its log spectrum.
    """
    logical = be.logical
    block = be.encoded()[:logical, :logical]
    block = (block + block.conj().T) / 2
    eigvals = sym_eig(block)[0]
    if eigvals[0] <= 0:
        raise InvalidInputError(f'log encoding needs a positive definite block, smallest eigenvalue {eigvals[0]:.3e}')
    widest = float(np.max(np.abs(np.log(eigvals))))
    if widest > scale * (1 + NORM_SLACK):
        raise InvalidInputError(f'log spectrum reaches {widest:.4g}, beyond scale {scale:.4g}')
    return spectral_block_encoding(block, np.log, scale)


def _reflection(be: BlockEncoding) -> np.ndarray:
    signs = -np.ones(be.total_dim)
    signs[:be.system_dim] = 1.0
    return signs


def _walk(be: BlockEncoding, columns: Optional[int] = None):
    """
    Yield the qubitization iterates W_0, W_1, ... restricted to their first
    `columns` columns. W_{j+1} = R U W_j for even j and R U^H W_j for odd j,
    R being the reflection about the zero-ancilla subspace. The top-left
    block of W_d is T_d(A / alpha).
    """
    width = be.total_dim if columns is None else columns
    signs = _reflection(be)
    dagger = be.unitary.conj().T
    walk = np.eye(be.total_dim, dtype=np.complex128)[:, :width]
    step = 0
    yield walk
    while True:
        walk = signs[:, None] * ((be.unitary if step % 2 == 0 else dagger) @ walk)
        step += 1
        yield walk


def _require_hermitian_block(be: BlockEncoding):
    if not is_hermitian(extract_block(be), UNITARY_TOL):
        raise InvalidInputError('the encoded block must be Hermitian')


def chebyshev_block(be: BlockEncoding, d: int) -> BlockEncoding:
    """Encoding of T_d(A / alpha) with alpha = 1, using d applications of the encoding."""
    if d < 0:
        raise InvalidInputError(f'Chebyshev degree must be >= 0, got {d}')
    _require_hermitian_block(be)
    for degree, walk in enumerate(_walk(be)):
        if degree == d:
            return BlockEncoding(walk, 1.0, be.system_dim, be.total_dim, be.logical_dim).check()


def jacobi_anger_degree(tau: float, eps: float) -> int:
    """
    Smallest degree whose series remainder 2 * sum_{k > degree} |J_k(tau)| is <= eps / 2.
    """
    limit = int(np.ceil(abs(tau) + 10 * abs(tau) ** (1 / 3) + 60))
    magnitudes = np.abs(jv(np.arange(limit + 2), tau))
    remainder = 2 * np.cumsum(magnitudes[::-1])[::-1]
    below = np.nonzero(remainder[1:] <= eps / 2)[0]
    return int(below[0]) if below.size else limit


def evolution_operator(be: BlockEncoding, t: float, eps: float, mode: str = 'exact') -> Matrix:
    """
    System-block operator approximating exp(-i A t), A = alpha * block.

    mode 'exact': spectral exponential.
    mode 'jacobi_anger': exp(-i tau x) = J_0(tau) + 2 sum_k (-i)^k J_k(tau) T_k(x)
        with tau = alpha t, summed over qubitization iterates up to the
        remainder-bound degree and extended until it is within eps of exact.
    Raises:
        InvalidInputError: for eps outside (0, 1), an unknown mode or a non-Hermitian block.
        InvariantError: if the series cannot reach eps.
    """
    if not 0 < eps < 1:
        raise InvalidInputError(f'eps must lie in (0, 1), got {eps}')
    if mode not in EVOLUTION_MODES:
        raise InvalidInputError(f"unknown evolution mode '{mode}'")
    _require_hermitian_block(be)
    block = extract_block(be)
    hamiltonian = be.alpha * (block + block.conj().T) / 2
    exact = matrix_exp_unitary(hamiltonian, t)
    if mode == 'exact':
        return exact

    tau = be.alpha * t
    degree = jacobi_anger_degree(tau, eps)
    limit = int(np.ceil(abs(tau) + 10 * abs(tau) ** (1 / 3) + 60)) + 40
    d = be.system_dim
    series = np.zeros((d, d), dtype=np.complex128)
    error = np.inf
    for order, walk in enumerate(_walk(be, columns=d)):
        weight = jv(order, tau) * (1.0 if order == 0 else 2 * (-1j) ** order)
        series = series + weight * walk[:d, :]
        if order >= degree:
            error = np.linalg.norm(series - exact, 2)
            if error <= eps:
                break
        if order >= limit:
            raise InvariantError(f'Jacobi-Anger series did not reach eps={eps:g} by degree {order}')
    if order > degree:
        logger.debug(f'Jacobi-Anger degree raised from {degree} to {order} (tau={tau:.4g})')
    else:
        logger.debug(f'Jacobi-Anger degree {degree} (tau={tau:.4g}, error {error:.2e})')
    return series
