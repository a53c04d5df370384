"""
memory_model.py
Static binary-tree memory structure over a real matrix and the block
encodings built from its state-preparation unitaries.

Each row keeps a tree whose leaves hold squared entries (signs stored
beside them) and whose internal nodes hold the sum of their children; a
second tree does the same over the squared row norms. Descending a tree
from the root with sqrt(child / parent) ratios yields the amplitudes the
preparation unitaries load.

Register convention: a matrix is padded to a square of side D (a power of
two); every unitary here acts on (first register ⊗ second register), each
of dimension D, with the second register least significant.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from .block_encoding import (
    BlockEncoding, apply_permutation, check_spectrum, ellipsoid_gram_from_parts,
    gram_from_encoding, next_power_of_two, spectral_block_encoding,
)
from .exceptions import InvalidInputError, PreconditionError
from .linalg import Matrix, as_matrix, complete_unitary, is_spd

logger = logging.getLogger(__name__)


def _sum_levels(squares: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Levels from root to leaves for a batch of trees; squares has shape (batch, width)."""
    levels = [squares]
    while levels[0].shape[1] > 1:
        child = levels[0]
        levels.insert(0, child.reshape(child.shape[0], -1, 2).sum(axis=2))
    return tuple(levels)


def _descend(levels: Tuple[np.ndarray, ...], signs: np.ndarray) -> np.ndarray:
    """Leaf amplitudes: the product of sqrt(child / parent) along each root-to-leaf path, times the leaf sign."""
    amplitude = (levels[0] > 0).astype(float)
    for depth in range(1, len(levels)):
        child = levels[depth]
        parent = np.repeat(levels[depth - 1], 2, axis=1)
        ratio = np.divide(child, parent, out=np.zeros_like(child), where=parent > 0)
        amplitude = np.repeat(amplitude, 2, axis=1) * np.sqrt(ratio)
    return amplitude * signs


@dataclass(frozen=True)
class MemoryTree:
    """
    Binary-tree memory over a rows x cols real matrix padded to dim x dim.

    row_levels[d] has shape (dim, 2**d): level d of every row tree, with
    row_levels[-1] the squared entries. norm_levels[d] has shape (1, 2**d)
    and sums squared row norms the same way.
    """
    rows: int
    cols: int
    dim: int
    values: np.ndarray
    signs: np.ndarray
    row_levels: Tuple[np.ndarray, ...]
    norm_levels: Tuple[np.ndarray, ...]

    @property
    def row_norms(self) -> np.ndarray:
        return np.sqrt(self.row_levels[0][:self.rows, 0])

    @property
    def frobenius(self) -> float:
        return float(np.sqrt(self.norm_levels[0][0, 0]))

    @property
    def degenerate(self) -> bool:
        return self.frobenius == 0.0

    @property
    def zero_rows(self) -> np.ndarray:
        return self.row_levels[0][:, 0] == 0.0

    def entries(self) -> np.ndarray:
        """The stored matrix, unpadded."""
        return self.values[:self.rows, :self.cols].copy()

    def row_amplitudes(self) -> np.ndarray:
        """(dim, dim) array; row i holds A_i / ||A_i|| (zeros for a zero row)."""
        return _descend(self.row_levels, self.signs)

    def norm_amplitudes(self) -> np.ndarray:
        """Length-dim vector ||A_i|| / ||A||_F."""
        return _descend(self.norm_levels, np.ones((1, self.dim)))[0]


def build_tree(a) -> MemoryTree:
    """
    Build the memory tree of a real matrix.
    Raises:
        InvalidInputError: on non-finite or complex entries.
    """
    mat = as_matrix(a, 'memory input')
    if np.any(mat.imag != 0):
        raise InvalidInputError('the memory model stores real matrices only')
    rows, cols = mat.shape
    dim = next_power_of_two(max(rows, cols))
    values = np.zeros((dim, dim))
    values[:rows, :cols] = mat.real
    row_levels = _sum_levels(values ** 2)
    norm_levels = _sum_levels(row_levels[0].T.copy())
    tree = MemoryTree(rows, cols, dim, values, np.sign(values), row_levels, norm_levels)
    if tree.degenerate:
        logger.warning(f'memory tree over a {rows}x{cols} zero matrix is degenerate')
    return tree


def _require_nondegenerate(tree: MemoryTree):
    if tree.degenerate:
        raise PreconditionError('memory tree has zero Frobenius norm')


def row_prep_unitary(tree: MemoryTree) -> Matrix:
    """
    U_M |i>|0> = |i> ⊗ sum_j (A_ij / ||A_i||) |j>, block diagonal in i.
    Zero rows load |0> on the second register.
    """
    _require_nondegenerate(tree)
    amplitudes = tree.row_amplitudes()
    blocks = []
    for i in range(tree.dim):
        column = amplitudes[i] if not tree.zero_rows[i] else np.eye(tree.dim)[0]
        blocks.append(complete_unitary(column.astype(np.complex128).reshape(-1, 1)))
    return scipy.linalg.block_diag(*blocks).astype(np.complex128)


def norm_prep_unitary(tree: MemoryTree) -> Matrix:
    """U_N |0>|j> = sum_i (||A_i|| / ||A||_F) |i>|j>."""
    _require_nondegenerate(tree)
    loader = complete_unitary(tree.norm_amplitudes().astype(np.complex128).reshape(-1, 1))
    return np.kron(loader, np.eye(tree.dim))


def prep_overlap(tree: MemoryTree) -> Matrix:
    """
    Matrix whose (i, j) entry is <0, j| U_N^H U_M |i, 0>; equals A / ||A||_F
    on the logical range.
    """
    dim = tree.dim
    overlap = norm_prep_unitary(tree).conj().T @ row_prep_unitary(tree)
    # bra index 0*dim + j, ket index i*dim + 0
    return overlap[:dim, ::dim].T[:tree.rows, :tree.cols]


def _swap(dim: int) -> np.ndarray:
    index = np.arange(dim * dim)
    return (index % dim) * dim + index // dim


def memory_block_encoding(tree: MemoryTree) -> BlockEncoding:
    """
    Encoding of A with alpha = ||A||_F as SWAP · U_M^H · U_N.
    Layout: (ancilla of dim D ⊗ system of dim D).
    """
    _require_nondegenerate(tree)
    unitary = apply_permutation(
        _swap(tree.dim), row_prep_unitary(tree).conj().T @ norm_prep_unitary(tree),
    )
    return BlockEncoding(unitary, tree.frobenius, tree.dim, tree.dim ** 2).check()


def _same_shape(tree_m: MemoryTree, tree_n: MemoryTree):
    if (tree_m.rows, tree_m.cols) != (tree_n.rows, tree_n.cols):
        raise InvalidInputError(
            f'memory trees must share a shape, got {tree_m.rows}x{tree_m.cols} and {tree_n.rows}x{tree_n.cols}'
        )


def memory_cross_encoding(tree_m: MemoryTree, tree_n: MemoryTree) -> BlockEncoding:
    """
    Encoding of M^T N with alpha = ||M||_F ||N||_F.

    P_N applies the encoding of N, sets the flag, and clears it again where
    the ancilla is zero; the adjoint encoding of M then acts on both flag
    branches, and only the flag-zero branch reaches the top-left block.
    Layout: (flag ⊗ ancilla ⊗ system).
    """
    _same_shape(tree_m, tree_n)
    enc_m = memory_block_encoding(tree_m)
    enc_n = memory_block_encoding(tree_n)
    inner = enc_n.total_dim
    index = np.arange(2 * inner)
    flipped = index ^ inner
    unflip = np.where((index % inner) < enc_n.system_dim, flipped, index)

    p_n = apply_permutation(unflip, apply_permutation(flipped, np.kron(np.eye(2), enc_n.unitary)))
    unitary = np.kron(np.eye(2), enc_m.unitary.conj().T) @ p_n
    return BlockEncoding(
        unitary, enc_m.alpha * enc_n.alpha, tree_m.dim, 2 * inner, logical_dim=tree_m.cols,
    ).check()


def memory_gram_encoding(tree_m: MemoryTree, tree_n: MemoryTree) -> BlockEncoding:
    """Encoding of (M^T N)^T M^T N with alpha = (||M||_F ||N||_F)^2."""
    return gram_from_encoding(memory_cross_encoding(tree_m, tree_n))


def _square_entries(tree: MemoryTree) -> np.ndarray:
    if tree.rows != tree.cols:
        raise InvalidInputError(f'inversion needs a square matrix, got {tree.rows}x{tree.cols}')
    return tree.entries()


def memory_inverse_encoding(tree: MemoryTree, kappa: float, power: float = 1.0) -> BlockEncoding:
    """
    Encoding of M^-power with alpha = kappa**power for the SPD matrix held by
    the tree. Padded directions carry eigenvalue 1.
    Raises:
        PreconditionError: if the spectrum is outside [1/kappa, 1].
    """
    _require_nondegenerate(tree)
    mat = _square_entries(tree)
    check_spectrum(mat, kappa)
    padded = np.eye(tree.dim, dtype=np.complex128)
    padded[:tree.rows, :tree.cols] = mat
    return spectral_block_encoding(padded, lambda x: x ** -power, kappa ** power)


def memory_inverse_apply(tree_m: MemoryTree, kappa_m: float, state) -> Tuple[np.ndarray, float]:
    """
    Apply the inversion encoding to |0>|state> and keep the flag-zero branch.
    Returns:
        (C M^-1 state, ||C M^-1 state||) with C = 1 / kappa_m.
    """
    vector = np.asarray(state, dtype=np.complex128).reshape(-1)
    if vector.shape[0] != tree_m.rows or not np.all(np.isfinite(vector)):
        raise InvalidInputError(f'state must be a finite vector of length {tree_m.rows}')
    encoding = memory_inverse_encoding(tree_m, kappa_m)
    register = np.zeros(encoding.total_dim, dtype=np.complex128)
    register[:tree_m.rows] = vector
    branch = (encoding.unitary @ register)[:tree_m.rows]
    return branch, float(np.linalg.norm(branch))


def memory_ellipsoid_encoding(tree_m: MemoryTree, tree_n: MemoryTree, kappa_m: float,
                              route: str = 'symmetric') -> BlockEncoding:
    """Ellipsoid Gram encoding with both inputs read from memory trees."""
    _same_shape(tree_m, tree_n)
    if not is_spd(as_matrix(_square_entries(tree_n))):
        raise InvalidInputError('n must be symmetric positive definite')
    return ellipsoid_gram_from_parts(
        memory_block_encoding(tree_n),
        lambda power: memory_inverse_encoding(tree_m, kappa_m, power),
        route,
        tree_m.rows,
    )
