"""
pipelines.py
End-to-end distance estimation: encode, phase-estimate, rotate, sample.

Classes:
    - RunConfig: one run's parameters, validated on construction.
    - PipelineReport: every reported quantity of one run, in schema order.

Functions:
    - run_grassmann, run_ellipsoid, run_extension: the pipelines.
    - run: dispatch on RunConfig.distance_kind.
    - error_sweep, trend_checks: error-versus-resource tables and their trend tests.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import distances
from .block_encoding import (
    BlockEncoding, check_spectrum, ellipsoid_gram_encoding, evolution_operator, gram_block_encoding,
    log_block_encoding,
)
from .exceptions import InvalidInputError
from .linalg import (
    Matrix, condition_number, is_orthonormal_columns, is_spd, random_orthonormal, random_spd,
    sym_eig, varah_bound,
)
from .matrix_io import SWEEP_COLUMNS, read_matrix
from .memory_model import (
    build_tree, memory_ellipsoid_encoding, memory_gram_encoding, memory_inverse_apply,
)
from .runtime import (
    EVOLUTION_UNITARY_TOL, DecodedBins, ShotRecord, ancilla_zero_probability, decode_bins,
    eigen_bin_distributions, leakage_diagnostics, power_method_min_eig, qpe, renormalized,
    rotate_arccos, rotate_log, rotate_sqrt, sample_probability, uniform_mixed_state,
)

logger = logging.getLogger(__name__)

DISTANCE_KINDS = ('grassmann', 'ellipsoid', 'asimov', 'projection', 'chordal')
INPUT_MODELS = ('blackbox', 'memory')
EVOLUTION_MODES = ('exact', 'jacobi_anger')
PHASE_NORMALIZATIONS = ('bound', 'alpha')
QPE_WINDOWS = ('auto', 'uniform', 'sine')
ELLIPSOID_ROUTES = ('symmetric', 'direct')
MAX_QPE_BITS = 16
GENERATED_KAPPA = 4.0
EXACT_PHASE_TOL = 1e-7
LEAK_REPORT_LEVEL = 1e-3


@dataclass(frozen=True)
class RunConfig:
    """
    Parameters of one pipeline run. Inputs come from m_path/n_path when both
    are set, otherwise they are generated from (n, k, kappa, seed): M from
    seed and N from seed + 1.

    qpe_window 'auto' prepares a uniform phase register when every phase
    sits on the register grid and the sine-tapered register otherwise.
    """
    distance_kind: str = 'grassmann'
    input_model: str = 'blackbox'
    qpe_bits: int = 10
    shots: int = 100_000
    seed: int = 0
    evolution_mode: str = 'exact'
    eps_h: float = 1e-8
    m_path: Optional[str] = None
    n_path: Optional[str] = None
    n: Optional[int] = None
    k: Optional[int] = None
    kappa: Optional[float] = None
    exact_sampling: bool = False
    phase_normalization: str = 'bound'
    ellipsoid_route: str = 'symmetric'
    qpe_window: str = 'auto'

    def __post_init__(self):
        choices = (
            ('distance_kind', DISTANCE_KINDS), ('input_model', INPUT_MODELS),
            ('evolution_mode', EVOLUTION_MODES), ('phase_normalization', PHASE_NORMALIZATIONS),
            ('ellipsoid_route', ELLIPSOID_ROUTES), ('qpe_window', QPE_WINDOWS),
        )
        for name, allowed in choices:
            if getattr(self, name) not in allowed:
                raise InvalidInputError(f"{name} must be one of {', '.join(allowed)}, got '{getattr(self, name)}'")
        if not 1 <= self.qpe_bits <= MAX_QPE_BITS:
            raise InvalidInputError(f'qpe_bits must lie in [1, {MAX_QPE_BITS}], got {self.qpe_bits}')
        if self.shots < 1 and not self.exact_sampling:
            raise InvalidInputError(f'shots must be >= 1, got {self.shots}')
        if not 0 < self.eps_h < 1:
            raise InvalidInputError(f'eps_h must lie in (0, 1), got {self.eps_h}')
        if (self.m_path is None) != (self.n_path is None):
            raise InvalidInputError('m_path and n_path must be given together')
        if self.m_path is None:
            if self.n is None or self.n < 1:
                raise InvalidInputError('generated inputs need n >= 1')
            if self.distance_kind != 'ellipsoid' and (self.k is None or not 1 <= self.k <= self.n):
                raise InvalidInputError(f'generated subspaces need 1 <= k <= n, got k={self.k}')
        if self.kappa is not None and self.kappa < 1:
            raise InvalidInputError(f'kappa must be >= 1, got {self.kappa}')

    @property
    def uses_files(self) -> bool:
        return self.m_path is not None


@dataclass(frozen=True)
class EigenRow:
    index: int
    value: float
    estimate: Optional[float] = None
    bin_mass: Optional[float] = None


@dataclass(frozen=True)
class PipelineReport:
    config: RunConfig
    n: int
    k: int
    classical_value: float
    quantum_estimate: float
    exact_estimate: Optional[float] = None
    ideal_p0: Optional[float] = None
    exact_p0: Optional[float] = None
    sampled_p0: Optional[float] = None
    epsilon_p: Optional[float] = None
    leakage_constant: Optional[float] = None
    leakage_bound: Optional[float] = None
    leaked_mass: Optional[float] = None
    alpha_total: Optional[float] = None
    phase_scale: Optional[float] = None
    log_scale: Optional[float] = None
    exact_phase: Optional[bool] = None
    register_window: Optional[str] = None
    condition_number: Optional[float] = None
    varah_alpha: Optional[float] = None
    varah_dominant: Optional[bool] = None
    eigenvalues: Tuple[EigenRow, ...] = ()
    timings: Dict[str, float] = field(default_factory=dict, compare=False)
    shot_record: Optional[ShotRecord] = None

    @property
    def abs_error(self) -> float:
        return abs(self.quantum_estimate - self.classical_value)

    def fields(self) -> List[Tuple[str, object]]:
        """Key/value pairs in report order, timings excluded."""
        cfg = self.config
        return [
            ('distance', cfg.distance_kind), ('model', cfg.input_model),
            ('evolution', cfg.evolution_mode), ('phase_normalization', cfg.phase_normalization),
            ('route', cfg.ellipsoid_route if cfg.distance_kind == 'ellipsoid' else None),
            ('bits', cfg.qpe_bits), ('shots', None if cfg.exact_sampling else cfg.shots),
            ('seed', cfg.seed), ('exact_sampling', cfg.exact_sampling),
            ('n', self.n), ('k', self.k),
            ('classical_value', self.classical_value), ('quantum_estimate', self.quantum_estimate),
            ('exact_estimate', self.exact_estimate), ('abs_error', self.abs_error),
            ('ideal_p0', self.ideal_p0), ('exact_p0', self.exact_p0), ('sampled_p0', self.sampled_p0),
            ('epsilon_p', self.epsilon_p), ('leakage_constant', self.leakage_constant),
            ('leakage_bound', self.leakage_bound), ('leaked_mass', self.leaked_mass),
            ('alpha_total', self.alpha_total), ('phase_scale', self.phase_scale),
            ('log_scale', self.log_scale), ('exact_phase', self.exact_phase),
            ('register_window', self.register_window),
            ('condition_number', self.condition_number), ('varah_alpha', self.varah_alpha),
            ('varah_dominant', self.varah_dominant),
        ]


class _Stopwatch:
    def __init__(self):
        self.timings: Dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        yield
        self.timings[name] = time.perf_counter() - start
        logger.info(f'stage {name}: {self.timings[name]:.3f}s')


def _load_subspaces(cfg: RunConfig) -> Tuple[Matrix, Matrix]:
    if cfg.uses_files:
        m, n = read_matrix(cfg.m_path), read_matrix(cfg.n_path)
    else:
        m, n = random_orthonormal(cfg.n, cfg.k, cfg.seed), random_orthonormal(cfg.n, cfg.k, cfg.seed + 1)
    if m.shape != n.shape or not is_orthonormal_columns(m) or not is_orthonormal_columns(n):
        raise InvalidInputError('subspace inputs must be n x k matrices with orthonormal columns')
    return m, n


def _load_spd_pair(cfg: RunConfig) -> Tuple[Matrix, Matrix, float]:
    if cfg.uses_files:
        m, n = read_matrix(cfg.m_path), read_matrix(cfg.n_path)
    else:
        kappa = cfg.kappa or GENERATED_KAPPA
        m, n = random_spd(cfg.n, kappa, cfg.seed), random_spd(cfg.n, kappa, cfg.seed + 1)
    if m.shape != n.shape or not is_spd(m) or not is_spd(n):
        raise InvalidInputError('ellipsoid inputs must be symmetric positive definite of one size')
    kappa = cfg.kappa or max(1.0, 1.0 / min(sym_eig(m)[0][0], sym_eig(n)[0][0]))
    check_spectrum(m, kappa)
    check_spectrum(n, kappa)
    return m, n, float(kappa)


def _conditioning(mat: Matrix) -> Tuple[Optional[float], float, bool]:
    try:
        cond = condition_number(mat)
    except InvalidInputError:
        cond = None
    alpha, dominant = varah_bound(mat)
    return cond, alpha, dominant


@dataclass(frozen=True)
class _PhaseRun:
    state: object
    decoded: DecodedBins
    eigvals: np.ndarray
    distributions: np.ndarray
    leaked_mass: float
    exact_phase: bool
    window: str


def _phase_estimate(be: BlockEncoding, cfg: RunConfig, bound: float, watch: _Stopwatch,
                    signed: bool = False) -> _PhaseRun:
    """
    QPE of exp(+i K t) on the uniform state over the logical range, with
    t0 = pi / bound, so eigenvalue lambda of K reads out at phase lambda / (2 bound).
    A signed spectrum in [-bound, bound] is decoded over the symmetric window.
    """
    logical = be.logical
    gram = be.encoded()[:logical, :logical]
    eigvals, eigvecs = sym_eig((gram + gram.conj().T) / 2)
    phases = eigvals / (2.0 * bound) * 2 ** cfg.qpe_bits
    exact_phase = bool(np.all(np.abs(phases - np.round(phases)) <= EXACT_PHASE_TOL))
    window = cfg.qpe_window
    if window == 'auto':
        window = 'uniform' if exact_phase else 'sine'
    t0 = np.pi / bound
    with watch.stage('evolution'):
        if cfg.evolution_mode == 'exact':
            unitary_tol = EVOLUTION_UNITARY_TOL

            def evolution(t):
                return evolution_operator(be, -t, cfg.eps_h, 'exact')
        else:
            base = evolution_operator(be, -t0, cfg.eps_h, 'jacobi_anger')
            unitary_tol = max(EVOLUTION_UNITARY_TOL, 4.0 * 2 ** cfg.qpe_bits * cfg.eps_h)

            def evolution(t):
                return np.linalg.matrix_power(base, int(round(t / t0)))
    with watch.stage('qpe'):
        state = qpe(
            evolution, uniform_mixed_state(logical, be.system_dim), cfg.qpe_bits, t0, unitary_tol, window,
        )
        if cfg.evolution_mode != 'exact':
            state = renormalized(state)

    decoded = decode_bins(cfg.qpe_bits, bound, signed=signed)
    leaked = float(np.sum(state.distribution('phase')[decoded.out_of_range]))
    if leaked > LEAK_REPORT_LEVEL:
        span = f'[-{bound:g}, {bound:g})' if signed else f'[0, {bound:g}]'
        logger.warning(f'{leaked:.3e} of the phase-register mass fell outside {span}')
    return _PhaseRun(
        state, decoded, eigvals, eigen_bin_distributions(state, eigvecs), leaked, exact_phase, window,
    )


def _eigen_rows(run: _PhaseRun, shown_scale) -> Tuple[EigenRow, ...]:
    peaks = np.argmax(run.distributions, axis=1)
    values = shown_scale(run.eigvals)
    shown = shown_scale(run.decoded.values)
    return tuple(
        EigenRow(i, float(values[i]), float(shown[peaks[i]]), float(run.distributions[i, peaks[i]]))
        for i in range(len(run.eigvals))
    )


def estimate_from_p0(kind: str, p0: float, k: int, log_scale: Optional[float] = None) -> float:
    """Distance from the ancilla zero probability, per pipeline."""
    p0 = max(p0, 0.0)
    if kind == 'grassmann':
        return float(np.pi / 2 * np.sqrt(k) * np.sqrt(p0))
    if kind == 'chordal':
        return float(np.sqrt(max(k - k * p0, 0.0)))
    if kind == 'ellipsoid':
        return float(np.sqrt(k * p0) * log_scale)
    raise InvalidInputError(f"'{kind}' has no ancilla-probability estimator")


def with_sampling(report: PipelineReport, cfg: RunConfig) -> PipelineReport:
    """Fill sampled_p0 and quantum_estimate for cfg's shots (or exact sampling)."""
    if cfg.exact_sampling:
        record, sampled = None, report.exact_p0
    else:
        record = sample_probability(report.exact_p0, cfg.shots, cfg.seed)
        sampled = record.p_hat
    estimate = estimate_from_p0(cfg.distance_kind, sampled, report.k, report.log_scale)
    return replace(report, config=cfg, sampled_p0=sampled, quantum_estimate=estimate, shot_record=record)


def _rotation_pipeline(cfg: RunConfig, be: BlockEncoding, bound: float, classical: float,
                       amplitude: Callable[[np.ndarray], np.ndarray], rotate, shown_scale,
                       conditioning, watch: _Stopwatch, n: int, log_scale: Optional[float] = None,
                       signed: bool = False) -> PipelineReport:
    run = _phase_estimate(be, cfg, bound, watch, signed=signed)
    bin_values = shown_scale(run.decoded.values)
    with watch.stage('rotate'):
        rotated = rotate(run.state, bin_values)
        exact_p0 = ancilla_zero_probability(rotated)
    with watch.stage('diagnostics'):
        exact_amplitudes = amplitude(shown_scale(run.eigvals))
        ledger = leakage_diagnostics(run.distributions, exact_amplitudes, amplitude(bin_values))
        ideal_p0 = float(np.mean(exact_amplitudes ** 2))
    k = be.logical
    report = PipelineReport(
        config=cfg, n=n, k=k, classical_value=classical,
        quantum_estimate=estimate_from_p0(cfg.distance_kind, exact_p0, k, log_scale),
        exact_estimate=estimate_from_p0(cfg.distance_kind, exact_p0, k, log_scale),
        ideal_p0=ideal_p0, exact_p0=exact_p0,
        epsilon_p=ledger.epsilon_p, leakage_constant=ledger.constant, leakage_bound=ledger.bound,
        leaked_mass=run.leaked_mass + rotated.clamped_mass,
        alpha_total=be.alpha, phase_scale=1.0 / (2.0 * bound), log_scale=log_scale,
        exact_phase=run.exact_phase, register_window=run.window,
        condition_number=conditioning[0], varah_alpha=conditioning[1], varah_dominant=conditioning[2],
        eigenvalues=_eigen_rows(run, shown_scale),
    )
    with watch.stage('sample'):
        report = with_sampling(report, cfg)
    return replace(report, timings=dict(watch.timings))


def _subspace_encoding(cfg: RunConfig, m: Matrix, n: Matrix) -> BlockEncoding:
    if cfg.input_model == 'memory':
        return memory_gram_encoding(build_tree(m), build_tree(n))
    return gram_block_encoding(m, n)


def _phase_bound(cfg: RunConfig, be: BlockEncoding, natural: float) -> float:
    return be.alpha if cfg.phase_normalization == 'alpha' else natural


def _arccos_amplitude(values):
    return np.arccos(np.sqrt(np.clip(values, 0.0, 1.0))) / (np.pi / 2)


def _sqrt_amplitude(values):
    return np.sqrt(np.clip(values, 0.0, 1.0))


def _identity(values):
    return values


def run_grassmann(cfg: RunConfig) -> PipelineReport:
    """
    Grassmann distance from p0 = (4 / (pi^2 k)) sum_i arccos^2(sqrt(lambda_i)),
    lambda_i the eigenvalues of (M^T N)^T M^T N.
    """
    watch = _Stopwatch()
    with watch.stage('load'):
        m, n = _load_subspaces(cfg)
    with watch.stage('classical'):
        classical = distances.grassmann_distance(m, n)
    with watch.stage('encode'):
        be = _subspace_encoding(cfg, m, n)
    return _rotation_pipeline(
        cfg, be, _phase_bound(cfg, be, 1.0), classical, _arccos_amplitude, rotate_arccos, _identity,
        _conditioning(m.conj().T @ n), watch, m.shape[0],
    )


def _log_amplitude(log_scale: float):
    def amplitude(values):
        values = np.asarray(values, dtype=float)
        positive = values > 0
        logs = np.log(np.where(positive, values, 1.0)) / log_scale
        return np.clip(np.where(positive, logs, -np.inf), -1.0, 1.0)
    return amplitude


def _half_exp(values):
    return np.exp(np.asarray(values, dtype=float) / 2.0)


def run_ellipsoid(cfg: RunConfig) -> PipelineReport:
    """
    Ellipsoid distance from p = (1/n) sum_i (log lambda_i / log_scale)^2.

    The Gram matrix of P is log-encoded with scale 2 log_scale, so QPE reads
    log mu over a symmetric window; the rotation is fed exp(log mu / 2). With
    the symmetric route the Gram eigenvalues are exactly lambda_i(M^-1 N)^2.
    """
    watch = _Stopwatch()
    with watch.stage('load'):
        m, n, kappa = _load_spd_pair(cfg)
    with watch.stage('classical'):
        classical = distances.ellipsoid_distance(m, n)
    with watch.stage('encode'):
        if cfg.input_model == 'memory':
            tree_m = build_tree(m)
            be = memory_ellipsoid_encoding(tree_m, build_tree(n), kappa, cfg.ellipsoid_route)
            # P = M^-1 N through the memory inverse; only the conditioning fields read it
            p = kappa * np.column_stack([memory_inverse_apply(tree_m, kappa, n[:, j])[0] for j in range(n.shape[1])])
        else:
            be = ellipsoid_gram_encoding(m, n, kappa, cfg.ellipsoid_route)
            p = np.linalg.solve(m, n)
        log_scale = float(np.log(kappa) + 1.0)
        be = log_block_encoding(be, 2.0 * log_scale)
    return _rotation_pipeline(
        cfg, be, _phase_bound(cfg, be, 2.0 * log_scale), classical, _log_amplitude(log_scale),
        lambda state, values: rotate_log(state, values, log_scale), _half_exp,
        _conditioning(p), watch, m.shape[0], log_scale=log_scale, signed=True,
    )


def run_extension(cfg: RunConfig) -> PipelineReport:
    """
    Asimov and projection distances from the power-method minimum eigenvalue
    of the encoded Gram matrix; chordal distance from the Grassmann pipeline
    with a sqrt(lambda) rotation, chordal = sqrt(k - k p).
    """
    if cfg.distance_kind not in ('asimov', 'projection', 'chordal'):
        raise InvalidInputError(f"run_extension does not handle '{cfg.distance_kind}'")
    watch = _Stopwatch()
    with watch.stage('load'):
        m, n = _load_subspaces(cfg)
    with watch.stage('classical'):
        classical = {
            'asimov': distances.asimov_distance,
            'projection': distances.projection_distance,
            'chordal': distances.chordal_distance,
        }[cfg.distance_kind](m, n)
    with watch.stage('encode'):
        be = _subspace_encoding(cfg, m, n)
    conditioning = _conditioning(m.conj().T @ n)
    if cfg.distance_kind == 'chordal':
        return _rotation_pipeline(
            cfg, be, _phase_bound(cfg, be, 1.0), classical, _sqrt_amplitude, rotate_sqrt, _identity,
            conditioning, watch, m.shape[0],
        )

    k = be.logical
    with watch.stage('power_method'):
        gram = be.encoded()[:k, :k]
        smallest = power_method_min_eig((gram + gram.conj().T) / 2, seed=cfg.seed)
        theta = float(np.arccos(np.sqrt(np.clip(smallest, 0.0, 1.0))))
    eigvals, _ = sym_eig((gram + gram.conj().T) / 2)
    return PipelineReport(
        config=cfg, n=m.shape[0], k=k, classical_value=classical,
        quantum_estimate=theta if cfg.distance_kind == 'asimov' else float(np.sin(theta)),
        alpha_total=be.alpha,
        condition_number=conditioning[0], varah_alpha=conditioning[1], varah_dominant=conditioning[2],
        eigenvalues=tuple(EigenRow(i, float(value)) for i, value in enumerate(eigvals)),
        timings=dict(watch.timings),
    )


def run(cfg: RunConfig) -> PipelineReport:
    logger.info(f'running {cfg.distance_kind} ({cfg.input_model}, {cfg.qpe_bits} bits, {cfg.evolution_mode})')
    if cfg.distance_kind == 'grassmann':
        report = run_grassmann(cfg)
    elif cfg.distance_kind == 'ellipsoid':
        report = run_ellipsoid(cfg)
    else:
        report = run_extension(cfg)
    if report.classical_value <= 1e-7:
        logger.info(f'degenerate instance: classical distance {report.classical_value:.3g}')
    return report


def _sweep_row(report: PipelineReport, shots: int) -> Dict[str, object]:
    def gap(a, b):
        return None if a is None or b is None else abs(a - b)
    row = {
        'bits': report.config.qpe_bits,
        'shots': shots,
        'classical_value': report.classical_value,
        'quantum_estimate': report.quantum_estimate,
        'abs_error': report.abs_error,
        'ideal_p0': report.ideal_p0,
        'exact_p0': report.exact_p0,
        'sampled_p0': report.sampled_p0,
        'phase_error': gap(report.exact_p0, report.ideal_p0),
        'sampling_error': gap(report.sampled_p0, report.exact_p0),
        'epsilon_p': report.epsilon_p,
        'leakage_bound': report.leakage_bound,
        'leaked_mass': report.leaked_mass,
    }
    return {column: row[column] for column in SWEEP_COLUMNS}


def _sweep_bits(cfg: RunConfig, shots_range: Sequence[int]) -> List[Dict[str, object]]:
    base = run(replace(cfg, exact_sampling=True))
    rows = []
    for shots in shots_range:
        cell = replace(cfg, shots=shots if shots else cfg.shots, exact_sampling=shots == 0)
        report = with_sampling(base, cell) if base.exact_p0 is not None else replace(base, config=cell)
        rows.append(_sweep_row(report, shots))
    return rows


def error_sweep(cfg: RunConfig, bits_range: Sequence[int], shots_range: Sequence[int],
                workers: int = 1) -> List[Dict[str, object]]:
    """
    One row per (bits, shots) cell, bits-major. Shots 0 is exact sampling.
    Each bits value runs once; shot counts resample its exact p0 with cfg.seed,
    so rows do not depend on the worker count.
    """
    bits_range = list(bits_range)
    shots_range = list(shots_range)
    if not bits_range or not shots_range:
        raise InvalidInputError('sweep ranges must not be empty')
    if any(shots < 0 for shots in shots_range):
        raise InvalidInputError('sweep shot counts must be >= 0')
    cells = [replace(cfg, qpe_bits=bits) for bits in bits_range]
    results: Dict[int, List[Dict[str, object]]] = {}
    with ThreadPoolExecutor(max_workers=max(workers, 1), thread_name_prefix='sweep_cell') as executor:
        future_to_index = {executor.submit(_sweep_bits, cell, shots_range): i for i, cell in enumerate(cells)}
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            results[index] = future.result()
            logger.info(f'sweep: finished bits={cells[index].qpe_bits} ({len(results)}/{len(cells)})')
    return [row for index in range(len(cells)) for row in results[index]]


def trend_checks(rows: Sequence[Dict[str, object]]) -> Dict[str, Optional[object]]:
    """
    Monotone-trend checks over sweep rows.

    phase_error_non_increasing: across exact-sampling rows ordered by bits,
        each |p~0 - p0| is at most twice the previous one.
    sampling_error_slope: log-log slope of |p_hat - p~0| against shots at the
        largest swept bits.
    sampling_error_within_band: every |p_hat - p~0| is within 3 sqrt(p(1-p)/shots).
    Checks without enough rows report None.
    """
    checks: Dict[str, Optional[object]] = {
        'phase_error_non_increasing': None,
        'sampling_error_slope': None,
        'sampling_error_within_band': None,
    }
    exact_rows = sorted(
        (row for row in rows if row['shots'] == 0 and row['phase_error'] is not None), key=lambda row: row['bits'],
    )
    if len(exact_rows) >= 2:
        errors = [row['phase_error'] for row in exact_rows]
        checks['phase_error_non_increasing'] = all(
            later <= 2.0 * earlier + 1e-12 for earlier, later in zip(errors, errors[1:])
        )
    sampled = [row for row in rows if row['shots'] and row['sampling_error'] is not None]
    if sampled:
        top = max(row['bits'] for row in sampled)
        sampled = [row for row in sampled if row['bits'] == top]
        checks['sampling_error_within_band'] = all(
            row['sampling_error'] <= 3.0 * np.sqrt(row['exact_p0'] * (1 - row['exact_p0']) / row['shots']) + 1e-12
            for row in sampled
        )
        positive = [row for row in sampled if row['sampling_error'] > 0]
        if len({row['shots'] for row in positive}) >= 2:
            slope, _ = np.polyfit(
                np.log([row['shots'] for row in positive]), np.log([row['sampling_error'] for row in positive]), 1,
            )
            checks['sampling_error_slope'] = float(slope)
    return checks
