"""
runtime.py
Density-matrix register machine for the distance pipelines.

States are kept as a factor F with rho = F F^H, so unitaries act as U F and
register probabilities are squared norms of factor slices. Registers are
listed most significant first: QPE puts the phase register in front of the
system, and rotations append a one-qubit ancilla at the back.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import InvalidInputError, InvariantError, PreconditionError
from .linalg import Matrix, as_matrix, is_hermitian

logger = logging.getLogger(__name__)

STATE_TOL = 1e-10
EVOLUTION_UNITARY_TOL = 1e-6
CLAMP_REPORT_LEVEL = 1e-3
PHASE_WINDOW = 0.75
POWER_PILOT_ITERS = 20
POWER_MAX_ITERS = 100_000
POWER_GAP_RANGE = (1e-3, 1.0)


@dataclass(frozen=True)
class DensityState:
    """
    rho = factor @ factor^H over the tensor product of `registers`.
    clamped_mass accumulates probability moved by rotation clamping.
    """
    factor: Matrix
    registers: Tuple[Tuple[str, int], ...]
    clamped_mass: float = 0.0

    @property
    def dim(self) -> int:
        return self.factor.shape[0]

    @property
    def rho(self) -> Matrix:
        return self.factor @ self.factor.conj().T

    @property
    def trace(self) -> float:
        return float(np.sum(np.abs(self.factor) ** 2))

    def register_names(self):
        return [name for name, _ in self.registers]

    def split(self, name: str) -> Tuple[int, int, int]:
        """(before, size, after) dimensions around the named register."""
        names = self.register_names()
        if name not in names:
            raise InvalidInputError(f"state has no '{name}' register (registers: {names})")
        position = names.index(name)
        dims = [size for _, size in self.registers]
        return int(np.prod(dims[:position])), dims[position], int(np.prod(dims[position + 1:]))

    def distribution(self, name: str) -> np.ndarray:
        """Measurement probabilities of the named register."""
        before, size, after = self.split(name)
        tensor = self.factor.reshape(before, size, after, -1)
        return np.sum(np.abs(tensor) ** 2, axis=(0, 2, 3))

    def validate(self) -> 'DensityState':
        expected = int(np.prod([size for _, size in self.registers]))
        if self.dim != expected:
            raise InvariantError(f'factor has {self.dim} rows for registers {self.registers}')
        if abs(self.trace - 1.0) > STATE_TOL:
            raise InvariantError(f'density state trace is {self.trace:.12f}')
        return self


@dataclass(frozen=True)
class ShotRecord:
    shots: int
    zeros: int
    p_hat: float
    seed: int


def uniform_mixed_state(k: int, dim: Optional[int] = None) -> DensityState:
    """
    rho = I/k on the first k basis states of a system register of size dim
    (default k).
    """
    dim = k if dim is None else dim
    if k <= 0 or dim < k:
        raise InvalidInputError(f'uniform_mixed_state needs 1 <= k <= dim, got k={k}, dim={dim}')
    factor = np.eye(dim, k, dtype=np.complex128) / np.sqrt(k)
    return DensityState(factor, (('system', dim),)).validate()


def _require_unitary(unitary: Matrix, tol: float, label: str) -> float:
    deviation = float(np.max(np.abs(unitary.conj().T @ unitary - np.eye(unitary.shape[0]))))
    if deviation > tol:
        raise PreconditionError(f'{label} is not unitary (deviation {deviation:.2e})')
    return deviation


def register_amplitudes(bits: int, window: str = 'uniform') -> np.ndarray:
    """
    Initial phase-register amplitudes. 'uniform' is 1/sqrt(T) on every value;
    'sine' is sqrt(2/T) sin(pi (tau + 1/2) / T), whose read-out error has zero
    mean and a second moment of a quarter bin squared for any phase.
    """
    size = 2 ** bits
    if window == 'uniform':
        return np.full(size, 1.0 / np.sqrt(size))
    if window == 'sine':
        return np.sqrt(2.0 / size) * np.sin(np.pi * (np.arange(size) + 0.5) / size)
    raise InvalidInputError(f"register window must be 'uniform' or 'sine', got '{window}'")


def qpe(evolution: Callable[[float], Matrix], state: DensityState, bits: int, t0: float = 1.0,
        unitary_tol: float = EVOLUTION_UNITARY_TOL, window: str = 'uniform') -> DensityState:
    """
    Phase estimation with a 2**bits register placed in front of the state.

    The register is prepared with register_amplitudes(bits, window), the
    evolution is applied for time tau * t0 controlled on register value tau,
    and an exact inverse Fourier transform follows. With the uniform window an
    eigenvector with evolution(t0) u = exp(2 pi i phi) u and phi = j / 2**bits
    reads out j with certainty.

    Args:
        evolution: callable t -> unitary on the full state.
        state: input density state.
        bits: register size, at least 1.
        t0: base evolution time.
        unitary_tol: max entrywise deviation accepted from unitarity.
        window: 'uniform' or 'sine' register preparation.
    Raises:
        InvalidInputError: for bits < 1 or an unknown window.
        PreconditionError: if an evolution is not unitary or has the wrong size.
    """
    if bits < 1:
        raise InvalidInputError(f'qpe needs at least one bit, got {bits}')
    size = 2 ** bits
    dim = state.dim
    amplitudes = register_amplitudes(bits, window)
    logger.debug(f'qpe: {window} phase register {size}, state dimension {dim}, rank {state.factor.shape[1]}')

    tensor = np.broadcast_to(state.factor, (size,) + state.factor.shape) * amplitudes[:, None, None]
    tensor = tensor.astype(np.complex128)
    taus = np.arange(size)
    worst = 0.0
    for bit in range(bits):
        power = as_matrix(evolution((2 ** bit) * t0), 'evolution')
        if power.shape != (dim, dim):
            raise PreconditionError(f'evolution has shape {power.shape}, expected {(dim, dim)}')
        worst = max(worst, _require_unitary(power, unitary_tol, f'evolution at t={(2 ** bit) * t0:g}'))
        mask = ((taus >> bit) & 1).astype(bool)
        tensor[mask] = np.einsum('ab,tbr->tar', power, tensor[mask])
    tensor = np.fft.fft(tensor, axis=0, norm='ortho')
    result = DensityState(
        tensor.reshape(size * dim, -1), (('phase', size),) + state.registers, state.clamped_mass,
    )
    # approximately unitary evolutions leave the trace for the caller to renormalize
    return result.validate() if worst <= 1e-12 else result


def renormalized(state: DensityState) -> DensityState:
    """Rescale the trace to 1 after an approximately unitary step."""
    trace = state.trace
    if trace <= 0:
        raise InvariantError('cannot renormalize a state with zero trace')
    return replace(state, factor=state.factor / np.sqrt(trace)).validate()


def phase_grid(bits: int, threshold: float = PHASE_WINDOW) -> np.ndarray:
    """Signed phase of each register bin: j/T below threshold, j/T - 1 from it on."""
    fractions = np.arange(2 ** bits) / 2 ** bits
    return np.where(fractions < threshold, fractions, fractions - 1.0)


@dataclass(frozen=True)
class DecodedBins:
    """Per-bin eigenvalue estimates and which bins lie outside [0, bound]."""
    values: np.ndarray
    raw: np.ndarray
    out_of_range: np.ndarray


def decode_bins(bits: int, bound: float, signed: bool = False) -> DecodedBins:
    """
    Map phase bins to eigenvalues lambda = 2 * bound * phi, for phases
    phi = lambda / (2 * bound). Values outside [0, bound] are clamped.

    With signed=True the spectrum lies in [-bound, bound], the bins are read
    over the symmetric window [-1/2, 1/2) and no bin is out of range.
    """
    if signed:
        raw = 2.0 * bound * phase_grid(bits, threshold=0.5)
        return DecodedBins(raw, raw, np.zeros(raw.shape, dtype=bool))
    raw = 2.0 * bound * phase_grid(bits)
    out_of_range = (raw < 0) | (raw > bound)
    return DecodedBins(np.clip(raw, 0.0, bound), raw, out_of_range)


def _rotate(state: DensityState, zero_amplitude: np.ndarray, clamped: np.ndarray, label: str) -> DensityState:
    before, size, after = state.split('phase')
    if zero_amplitude.shape != (size,):
        raise InvalidInputError(f'{label} needs {size} per-bin values, got {zero_amplitude.shape}')
    one_amplitude = np.sqrt(np.clip(1.0 - zero_amplitude ** 2, 0.0, None))
    tensor = state.factor.reshape(before, size, after, -1)
    rotated = np.stack([
        zero_amplitude[None, :, None, None] * tensor,
        one_amplitude[None, :, None, None] * tensor,
    ], axis=3)
    mass = float(np.sum(state.distribution('phase')[clamped]))
    if mass > CLAMP_REPORT_LEVEL:
        logger.warning(f'{label}: clamped probability mass {mass:.3e}')
    return DensityState(
        rotated.reshape(state.dim * 2, -1), state.registers + (('ancilla', 2),), state.clamped_mass + mass,
    ).validate()


def _default_values(state: DensityState) -> np.ndarray:
    _, size, _ = state.split('phase')
    return np.arange(size) / size


def rotate_arccos(state: DensityState, values: Optional[np.ndarray] = None) -> DensityState:
    """
    Append an ancilla with amplitude arccos(sqrt(v)) / (pi/2) on |0> for
    phase bin value v (default j / 2**bits). Values outside [0, 1] are clamped.
    """
    values = _default_values(state) if values is None else np.asarray(values, dtype=float)
    clamped = (values < 0) | (values > 1)
    amplitude = np.arccos(np.sqrt(np.clip(values, 0.0, 1.0))) / (np.pi / 2)
    return _rotate(state, amplitude, clamped, 'rotate_arccos')


def rotate_log(state: DensityState, values: np.ndarray, log_scale: float) -> DensityState:
    """
    Append an ancilla with amplitude log(v) / log_scale on |0>.
    Amplitudes beyond +-1, and non-positive values, are clamped.
    """
    if log_scale <= 0:
        raise InvalidInputError(f'log_scale must be positive, got {log_scale}')
    values = np.asarray(values, dtype=float)
    positive = values > 0
    logs = np.log(np.where(positive, values, 1.0)) / log_scale
    logs = np.where(positive, logs, -np.inf)
    clamped = np.abs(logs) > 1
    return _rotate(state, np.clip(logs, -1.0, 1.0), clamped, 'rotate_log')


def rotate_sqrt(state: DensityState, values: np.ndarray) -> DensityState:
    """Append an ancilla with amplitude sqrt(v) on |0>, v clamped to [0, 1]."""
    values = np.asarray(values, dtype=float)
    clamped = (values < 0) | (values > 1)
    return _rotate(state, np.sqrt(np.clip(values, 0.0, 1.0)), clamped, 'rotate_sqrt')


def ancilla_zero_probability(state: DensityState) -> float:
    return float(state.distribution('ancilla')[0])


def sample_probability(p0: float, shots: int, seed: int) -> ShotRecord:
    """Count zeros in `shots` independent Bernoulli(p0) outcomes, seeded."""
    if shots < 1:
        raise InvalidInputError(f'shots must be >= 1, got {shots}')
    rng = np.random.default_rng(seed)
    zeros = int(rng.binomial(shots, float(np.clip(p0, 0.0, 1.0))))
    return ShotRecord(shots=shots, zeros=zeros, p_hat=zeros / shots, seed=seed)


def sample_ancilla(state: DensityState, shots: int, seed: int) -> ShotRecord:
    return sample_probability(ancilla_zero_probability(state), shots, seed)


def _rayleigh_run(shifted: Matrix, start: np.ndarray, iters: int):
    vector = start
    quotients = []
    for _ in range(iters):
        image = shifted @ vector
        norm = np.linalg.norm(image)
        if norm == 0.0:
            return None, quotients
        vector = image / norm
        quotients.append(float(np.vdot(vector, shifted @ vector).real))
    return vector, quotients


def _pilot_iterations(quotients, dim: int) -> int:
    steps = np.abs(np.diff(quotients))
    ratios = steps[1:][steps[:-1] > 0] / steps[:-1][steps[:-1] > 0]
    ratio = float(np.median(ratios)) if ratios.size else 0.0
    gap = float(np.clip(1.0 - np.sqrt(min(ratio, 1.0)), *POWER_GAP_RANGE))
    return int(min(np.ceil(10 * np.log(max(dim, 2)) / gap), POWER_MAX_ITERS))


def power_method_min_eig(a, iters: Optional[int] = None, seed: int = 0) -> float:
    """
    Smallest eigenvalue of a symmetric PSD matrix with norm <= 1, by power
    iteration on I - a from a random unit start.

    With iters=None the count is ceil(10 ln(dim) / gap), the gap being read
    off the convergence ratio of a short pilot run.
    Raises:
        InvalidInputError: for iters <= 0 or a non-symmetric input.
    """
    if iters is not None and iters <= 0:
        raise InvalidInputError(f'iters must be positive, got {iters}')
    mat = as_matrix(a)
    if not is_hermitian(mat):
        raise InvalidInputError('power_method_min_eig needs a symmetric matrix')
    dim = mat.shape[0]
    shifted = np.eye(dim) - (mat + mat.conj().T) / 2
    rng = np.random.default_rng(seed)
    start = rng.standard_normal(dim).astype(np.complex128)
    start /= np.linalg.norm(start)

    if iters is None:
        vector, quotients = _rayleigh_run(shifted, start, POWER_PILOT_ITERS)
        if vector is None:
            return 1.0
        iters = _pilot_iterations(quotients, dim)
        logger.debug(f'power method: {iters} iterations from the pilot gap estimate')
    vector, quotients = _rayleigh_run(shifted, start, iters)
    if vector is None:
        return 1.0
    return 1.0 - quotients[-1]


def eigen_bin_distributions(state: DensityState, eigvecs: Matrix) -> np.ndarray:
    """
    Phase-register distribution conditioned on each eigenvector.
    Row i is P_i(j): the mass on bin j after projecting the system onto
    eigvecs[:, i], normalized to sum 1 (zero rows stay zero).
    """
    _, size, after = state.split('phase')
    tensor = state.factor.reshape(size, after, -1)
    vectors = np.zeros((after, eigvecs.shape[1]), dtype=np.complex128)
    vectors[:eigvecs.shape[0]] = eigvecs
    projected = np.einsum('si,jsr->ijr', vectors.conj(), tensor)
    mass = np.sum(np.abs(projected) ** 2, axis=2)
    totals = mass.sum(axis=1, keepdims=True)
    return np.divide(mass, totals, out=np.zeros_like(mass), where=totals > 0)


@dataclass(frozen=True)
class LeakageDiagnostics:
    """
    Branch i reads x~_i = sqrt(E_i[x~^2]), the amplitude that reproduces its
    share of p~0, against the exact |x_i|.

    epsilon_p: sqrt(mean_i (x~_i - |x_i|)^2).
    constants: D_i = x~_i + |x_i|.
    bound: max D_i * epsilon_p, an upper bound on |p~0 - p0|.
    """
    epsilon_p: float
    constants: np.ndarray = field(repr=False)
    constant: float
    bound: float


def leakage_diagnostics(distributions: np.ndarray, exact_amplitudes: np.ndarray,
                        bin_amplitudes: np.ndarray) -> LeakageDiagnostics:
    """
    Finite-register error ledger for a rotation whose |0> amplitude is x.
    For the arccos rotation x = arccos(sqrt(lambda)) / (pi/2), and
    epsilon_p^2 equals (4 / (pi^2 k)) sum_i (arccos sqrt(lambda~_i) - arccos sqrt(lambda_i))^2
    with lambda~_i the effective eigenvalue of branch i. Since
    p~0 - p0 = mean_i (x~_i - |x_i|)(x~_i + |x_i|), Cauchy-Schwarz gives the bound.
    """
    k = distributions.shape[0]
    effective = np.sqrt(np.sum(distributions * bin_amplitudes[None, :] ** 2, axis=1))
    exact = np.abs(np.asarray(exact_amplitudes, dtype=float))
    constants = effective + exact
    epsilon_p = float(np.sqrt(np.mean((effective - exact) ** 2))) if k else 0.0
    constant = float(np.max(constants)) if k else 0.0
    return LeakageDiagnostics(epsilon_p, constants, constant, constant * epsilon_p)
