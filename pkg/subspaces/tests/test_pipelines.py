import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from subspaces.distances import grassmann_distance
from subspaces.exceptions import InvalidInputError, PreconditionError
from subspaces.linalg import random_orthonormal, random_spd
from subspaces.matrix_io import SWEEP_COLUMNS, render_report, write_matrix
from subspaces.pipelines import (
    RunConfig, error_sweep, estimate_from_p0, run, run_ellipsoid, run_extension, run_grassmann, trend_checks,
    with_sampling,
)

ANALYTIC_M = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
ANALYTIC_N = np.array([[1.0, 0.0], [0.0, 1 / np.sqrt(2)], [0.0, 1 / np.sqrt(2)]])


def principal_angle_pair(n, lambdas, rng):
    """Bases of two k-dim subspaces of R^n whose principal angles have cos^2 = lambdas; needs n >= 2k."""
    k = len(lambdas)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    cosines = np.sqrt(lambdas)
    other = q[:, :k] * cosines + q[:, k:2 * k] * np.sqrt(1 - lambdas)
    return q[:, :k], other


class MatrixFilesMixin:
    def setUp(self):
        super().setUp()
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = Path(tmp.name)

    def pair(self, m, n, name='pair'):
        m_path, n_path = self.tmp / f'{name}_m.txt', self.tmp / f'{name}_n.txt'
        write_matrix(m_path, m)
        write_matrix(n_path, n)
        return str(m_path), str(n_path)


class RunConfigTests(SimpleTestCase):
    def test_defaults(self):
        cfg = RunConfig(n=4, k=2)
        self.assertEqual((cfg.qpe_bits, cfg.shots, cfg.evolution_mode), (10, 100_000, 'exact'))
        self.assertFalse(cfg.uses_files)

    def test_rejects_invalid_fields(self):
        invalid = [
            dict(n=4, k=2, qpe_bits=0),
            dict(n=4, k=2, qpe_bits=17),
            dict(n=4, k=2, shots=0),
            dict(n=4, k=2, eps_h=1.0),
            dict(n=4, k=2, distance_kind='hausdorff'),
            dict(n=4, k=2, input_model='cloud'),
            dict(n=4, k=5),
            dict(k=2),
            dict(m_path='m.txt'),
            dict(n=4, kappa=0.5, distance_kind='ellipsoid'),
        ]
        for kwargs in invalid:
            with self.subTest(**kwargs), self.assertRaises(InvalidInputError):
                RunConfig(**kwargs)

    def test_exact_sampling_allows_zero_shots(self):
        self.assertTrue(RunConfig(n=4, k=2, shots=0, exact_sampling=True).exact_sampling)

    def test_ellipsoid_needs_no_k(self):
        self.assertIsNone(RunConfig(distance_kind='ellipsoid', n=3).k)


class GrassmannPipelineTests(MatrixFilesMixin, SimpleTestCase):
    def test_analytic_instance(self):
        m_path, n_path = self.pair(ANALYTIC_M, ANALYTIC_N)
        for model in ('blackbox', 'memory'):
            with self.subTest(model=model):
                cfg = RunConfig(m_path=m_path, n_path=n_path, input_model=model, qpe_bits=3, exact_sampling=True)
                report = run_grassmann(cfg)
                self.assertTrue(report.exact_phase)
                self.assertAlmostEqual(report.classical_value, np.pi / 4, places=12)
                self.assertAlmostEqual(report.exact_p0, 1 / 8, places=9)
                self.assertAlmostEqual(report.ideal_p0, 1 / 8, places=9)
                self.assertAlmostEqual(report.quantum_estimate, np.pi / 4, places=8)
                self.assertAlmostEqual(report.epsilon_p, 0.0, places=9)
                self.assertAlmostEqual(report.alpha_total, 4.0, places=6)
                self.assertEqual((report.n, report.k), (3, 2))

    def test_identical_subspaces(self):
        m = random_orthonormal(6, 2, seed=3)
        m_path, n_path = self.pair(m.real, m.real)
        report = run(RunConfig(m_path=m_path, n_path=n_path, qpe_bits=4, exact_sampling=True))
        self.assertAlmostEqual(report.classical_value, 0.0, places=6)
        self.assertAlmostEqual(report.quantum_estimate, 0.0, places=6)

    def test_random_instance(self):
        cfg = RunConfig(n=8, k=3, seed=13, qpe_bits=12, exact_sampling=True)
        report = run(cfg)
        expected = grassmann_distance(random_orthonormal(8, 3, 13), random_orthonormal(8, 3, 14))
        self.assertAlmostEqual(report.classical_value, expected, places=12)
        self.assertLess(report.abs_error, 0.01)

    def test_models_agree(self):
        cfg = RunConfig(n=8, k=3, seed=13, qpe_bits=10, exact_sampling=True)
        blackbox = run(cfg)
        memory = run(replace(cfg, input_model='memory'))
        self.assertLessEqual(
            abs(blackbox.quantum_estimate - memory.quantum_estimate),
            2 * max(blackbox.abs_error, memory.abs_error) + 1e-9,
        )

    def test_sampled_estimate_follows_p0(self):
        report = run(RunConfig(n=6, k=2, seed=5, qpe_bits=8, shots=10_000))
        self.assertEqual(report.shot_record.shots, 10_000)
        self.assertAlmostEqual(report.sampled_p0, report.shot_record.p_hat)
        self.assertAlmostEqual(report.quantum_estimate, np.pi / 2 * np.sqrt(2) * np.sqrt(report.sampled_p0))

    def test_leakage_bound_covers_phase_error(self):
        cfg = RunConfig(n=8, k=3, seed=13, exact_sampling=True)
        for bits in range(4, 9):
            report = run(replace(cfg, qpe_bits=bits))
            self.assertLessEqual(abs(report.exact_p0 - report.ideal_p0), report.leakage_bound + 1e-12)

    def test_jacobi_anger_matches_exact(self):
        cfg = RunConfig(n=4, k=2, seed=3, qpe_bits=5, exact_sampling=True, eps_h=1e-10)
        exact = run(cfg)
        series = run(replace(cfg, evolution_mode='jacobi_anger'))
        self.assertAlmostEqual(series.exact_p0, exact.exact_p0, places=6)
        self.assertAlmostEqual(series.quantum_estimate, exact.quantum_estimate, places=6)
        self.assertAlmostEqual(series.epsilon_p, exact.epsilon_p, places=6)

    def test_alpha_normalization_runs(self):
        report = run(RunConfig(n=4, k=2, seed=2, qpe_bits=10, exact_sampling=True, phase_normalization='alpha'))
        self.assertAlmostEqual(report.phase_scale, 1 / (2 * report.alpha_total))

    def test_constructed_exact_phase_instances(self):
        bits = 4
        for seed in range(20):
            with self.subTest(seed=seed):
                rng = np.random.default_rng(seed)
                k = int(rng.integers(1, 4))
                n = 2 * k + int(rng.integers(0, 3))
                # lambda = 2 j / 2**bits puts phase lambda / 2 on bin j
                lambdas = 2 * rng.integers(0, 2 ** (bits - 1) + 1, size=k) / 2 ** bits
                m, other = principal_angle_pair(n, lambdas, rng)
                m_path, n_path = self.pair(m, other, name=f'exact{seed}')
                model = 'memory' if seed % 2 else 'blackbox'
                report = run(RunConfig(m_path=m_path, n_path=n_path, input_model=model, qpe_bits=bits,
                                       exact_sampling=True))
                expected = 4 / (np.pi ** 2 * k) * np.sum(np.arccos(np.sqrt(lambdas)) ** 2)
                self.assertTrue(report.exact_phase)
                self.assertLess(abs(report.exact_p0 - expected), 1e-9)

    def test_random_instances(self):
        for seed in range(10):
            with self.subTest(seed=seed):
                report = run(RunConfig(n=8, k=3, seed=100 + 2 * seed, qpe_bits=12, exact_sampling=True))
                self.assertEqual(report.register_window, 'sine')
                self.assertLess(report.abs_error, 0.01)

    def test_sampled_p0_within_three_sigma(self):
        base = run(RunConfig(n=8, k=3, seed=13, qpe_bits=10, exact_sampling=True))
        shots = 1_000_000
        sigma = np.sqrt(base.exact_p0 * (1 - base.exact_p0) / shots)
        inside = 0
        for seed in range(40):
            report = with_sampling(base, replace(base.config, shots=shots, seed=seed, exact_sampling=False))
            inside += abs(report.sampled_p0 - base.exact_p0) <= 3 * sigma
        self.assertGreaterEqual(inside, 38)

    def test_phase_error_tracks_epsilon_over_bits(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                rows = error_sweep(RunConfig(n=8, k=3, seed=seed), range(4, 13), [0])
                errors = np.array([row['phase_error'] for row in rows])
                epsilons = np.array([row['epsilon_p'] for row in rows])
                ratios = errors / epsilons
                self.assertLessEqual(ratios.max(), 4 * np.median(ratios))
                self.assertTrue(trend_checks(rows)['phase_error_non_increasing'])
                for row in rows:
                    self.assertLessEqual(row['phase_error'], row['leakage_bound'] + 1e-12)
                # two more bits never grow epsilon_p by more than 10%
                self.assertTrue(np.all(epsilons[2:] <= 1.1 * epsilons[:-2]))

    def test_deterministic(self):
        cfg = RunConfig(n=6, k=2, seed=7, qpe_bits=6, shots=5000)
        first, second = run(cfg), run(cfg)
        self.assertEqual(first, second)
        self.assertEqual(render_report(first, include_timings=False), render_report(second, include_timings=False))


class EllipsoidPipelineTests(MatrixFilesMixin, SimpleTestCase):
    def test_exact_phase_instance(self):
        m_path, n_path = self.pair(np.eye(2), np.exp(-1.0) * np.eye(2))
        for model in ('blackbox', 'memory'):
            for route in ('symmetric', 'direct'):
                with self.subTest(model=model, route=route):
                    cfg = RunConfig(
                        distance_kind='ellipsoid', input_model=model, m_path=m_path, n_path=n_path, qpe_bits=12,
                        exact_sampling=True, ellipsoid_route=route,
                    )
                    report = run_ellipsoid(cfg)
                    self.assertTrue(report.exact_phase)
                    self.assertEqual(report.register_window, 'uniform')
                    self.assertAlmostEqual(report.log_scale, 2.0, places=12)
                    self.assertAlmostEqual(report.classical_value, np.sqrt(2), places=12)
                    self.assertLess(abs(report.quantum_estimate - np.sqrt(2)), 1e-6)
                    self.assertAlmostEqual(report.exact_p0, 0.25, places=9)
                    self.assertAlmostEqual(report.epsilon_p, 0.0, places=9)
                    self.assertAlmostEqual(report.leaked_mass, 0.0, places=9)

    def test_eigen_rows_show_generalized_eigenvalues(self):
        m_path, n_path = self.pair(np.eye(2), np.exp(-1.0) * np.eye(2))
        report = run(RunConfig(distance_kind='ellipsoid', m_path=m_path, n_path=n_path, qpe_bits=6,
                               exact_sampling=True))
        for row in report.eigenvalues:
            self.assertAlmostEqual(row.value, np.exp(-1.0), places=9)
            self.assertAlmostEqual(row.estimate, np.exp(-1.0), places=9)
            self.assertAlmostEqual(row.bin_mass, 1.0, places=9)

    def test_identical_matrices(self):
        m = random_spd(3, 5.0, seed=6).real
        m_path, n_path = self.pair(m, m)
        for model in ('blackbox', 'memory'):
            with self.subTest(model=model):
                report = run(RunConfig(distance_kind='ellipsoid', input_model=model, m_path=m_path, n_path=n_path,
                                       kappa=5.0, qpe_bits=12, exact_sampling=True))
                self.assertTrue(report.exact_phase)
                self.assertAlmostEqual(report.classical_value, 0.0, places=9)
                self.assertAlmostEqual(report.quantum_estimate, 0.0, places=6)

    def test_off_grid_instance(self):
        m_path, n_path = self.pair(np.eye(2), 0.5 * np.eye(2))
        cfg = RunConfig(distance_kind='ellipsoid', m_path=m_path, n_path=n_path, kappa=2.0, qpe_bits=12,
                        exact_sampling=True)
        report = run_ellipsoid(cfg)
        self.assertFalse(report.exact_phase)
        self.assertEqual(report.register_window, 'sine')
        self.assertAlmostEqual(report.log_scale, np.log(2) + 1)
        self.assertAlmostEqual(report.ideal_p0, (np.log(2) / (np.log(2) + 1)) ** 2, places=12)
        self.assertLess(report.abs_error, 1e-4)
        self.assertLessEqual(abs(report.exact_p0 - report.ideal_p0), report.leakage_bound + 1e-12)

    def test_random_pairs(self):
        for seed in range(10):
            with self.subTest(seed=seed):
                report = run(RunConfig(distance_kind='ellipsoid', n=4, kappa=10.0, seed=seed, qpe_bits=12,
                                       exact_sampling=True))
                self.assertEqual(report.k, 4)
                self.assertAlmostEqual(report.leaked_mass, 0.0, places=9)
                self.assertLess(report.abs_error, 0.02)

    def test_small_random_pairs(self):
        for n in (2, 3):
            with self.subTest(n=n):
                report = run(RunConfig(distance_kind='ellipsoid', n=n, kappa=10.0, seed=20 + n, qpe_bits=12,
                                       exact_sampling=True))
                self.assertLess(report.abs_error, 0.02)

    def test_memory_model_random_pair(self):
        cfg = RunConfig(distance_kind='ellipsoid', n=3, seed=4, qpe_bits=12, exact_sampling=True)
        blackbox = run(cfg)
        memory = run(replace(cfg, input_model='memory'))
        self.assertAlmostEqual(memory.quantum_estimate, blackbox.quantum_estimate, places=6)
        self.assertAlmostEqual(memory.condition_number, blackbox.condition_number, places=6)
        self.assertAlmostEqual(memory.varah_alpha, blackbox.varah_alpha, places=6)

    def test_jacobi_anger_matches_exact(self):
        cfg = RunConfig(distance_kind='ellipsoid', n=2, seed=1, qpe_bits=6, exact_sampling=True, eps_h=1e-10)
        exact = run(cfg)
        series = run(replace(cfg, evolution_mode='jacobi_anger'))
        self.assertAlmostEqual(series.exact_p0, exact.exact_p0, places=6)

    def test_spectrum_outside_kappa(self):
        m_path, n_path = self.pair(np.diag([1.0, 0.1]), np.eye(2))
        with self.assertRaises(PreconditionError):
            run(RunConfig(distance_kind='ellipsoid', m_path=m_path, n_path=n_path, kappa=2.0))

    def test_non_spd_input(self):
        m_path, n_path = self.pair(np.diag([1.0, -1.0]), np.eye(2))
        with self.assertRaises(InvalidInputError):
            run(RunConfig(distance_kind='ellipsoid', m_path=m_path, n_path=n_path))


class ExtensionPipelineTests(MatrixFilesMixin, SimpleTestCase):
    def test_analytic_instance(self):
        m_path, n_path = self.pair(ANALYTIC_M, ANALYTIC_N)
        expected = {'asimov': np.pi / 4, 'projection': 1 / np.sqrt(2), 'chordal': np.sqrt(0.5)}
        for kind, value in expected.items():
            with self.subTest(kind=kind):
                cfg = RunConfig(distance_kind=kind, m_path=m_path, n_path=n_path, qpe_bits=3, exact_sampling=True)
                report = run_extension(cfg)
                self.assertAlmostEqual(report.classical_value, value, places=12)
                self.assertAlmostEqual(report.quantum_estimate, value, places=7)

    def test_power_method_reports_have_no_p0(self):
        report = run(RunConfig(distance_kind='asimov', n=5, k=2, seed=1))
        self.assertIsNone(report.exact_p0)
        self.assertEqual(len(report.eigenvalues), 2)
        self.assertIsNone(report.eigenvalues[0].estimate)

    def test_identical_subspaces(self):
        m = random_orthonormal(5, 2, seed=8).real
        m_path, n_path = self.pair(m, m)
        for kind in ('asimov', 'projection', 'chordal'):
            with self.subTest(kind=kind):
                report = run(RunConfig(distance_kind=kind, m_path=m_path, n_path=n_path, qpe_bits=4,
                                       exact_sampling=True))
                # sqrt of encoding round-off near lambda = 1
                self.assertAlmostEqual(report.quantum_estimate, 0.0, places=5)

    def test_random_instance(self):
        for kind in ('asimov', 'projection', 'chordal'):
            with self.subTest(kind=kind):
                report = run(RunConfig(distance_kind=kind, n=8, k=3, seed=13, qpe_bits=12, exact_sampling=True))
                self.assertLess(report.abs_error, 0.02)

    def test_chordal_identity(self):
        m_path, n_path = self.pair(ANALYTIC_M, ANALYTIC_N)
        report = run(RunConfig(distance_kind='chordal', m_path=m_path, n_path=n_path, qpe_bits=3,
                               exact_sampling=True))
        self.assertAlmostEqual(report.quantum_estimate ** 2, report.k * (1 - report.exact_p0), places=12)

    def test_wrong_kind(self):
        with self.assertRaises(InvalidInputError):
            run_extension(RunConfig(n=4, k=2))


class EstimatorTests(SimpleTestCase):
    def test_estimates(self):
        self.assertAlmostEqual(estimate_from_p0('grassmann', 1 / 8, 2), np.pi / 4)
        self.assertAlmostEqual(estimate_from_p0('chordal', 0.75, 2), np.sqrt(0.5))
        self.assertAlmostEqual(estimate_from_p0('ellipsoid', 0.25, 4, log_scale=2.0), 2.0)
        self.assertEqual(estimate_from_p0('grassmann', -1e-18, 2), 0.0)

    def test_unknown_kind(self):
        with self.assertRaises(InvalidInputError):
            estimate_from_p0('asimov', 0.5, 2)


def sweep_row(bits, shots, phase_error=None, sampling_error=None, exact_p0=0.5):
    row = {column: None for column in SWEEP_COLUMNS}
    row.update(bits=bits, shots=shots, phase_error=phase_error, sampling_error=sampling_error, exact_p0=exact_p0)
    return row


class SweepTests(SimpleTestCase):
    def test_rows_match_single_runs(self):
        cfg = RunConfig(n=6, k=2, seed=5)
        rows = error_sweep(cfg, [3, 5], [0, 1000])
        self.assertEqual([(row['bits'], row['shots']) for row in rows], [(3, 0), (3, 1000), (5, 0), (5, 1000)])
        self.assertEqual(list(rows[0]), list(SWEEP_COLUMNS))
        single = run(replace(cfg, qpe_bits=5, shots=1000))
        self.assertEqual(rows[3]['quantum_estimate'], single.quantum_estimate)
        self.assertEqual(rows[2]['sampling_error'], 0.0)

    def test_worker_count_does_not_change_rows(self):
        cfg = RunConfig(n=6, k=2, seed=9)
        self.assertEqual(error_sweep(cfg, [3, 4, 5], [0, 500]), error_sweep(cfg, [3, 4, 5], [0, 500], workers=3))

    def test_phase_error_shrinks(self):
        rows = error_sweep(RunConfig(n=8, k=3, seed=13), [4, 10], [0])
        self.assertLess(rows[1]['epsilon_p'], rows[0]['epsilon_p'])
        for row in rows:
            self.assertLessEqual(row['phase_error'], row['leakage_bound'] + 1e-12)

    def test_power_method_rows(self):
        rows = error_sweep(RunConfig(distance_kind='asimov', n=4, k=2, seed=1), [3], [0, 100])
        self.assertIsNone(rows[0]['exact_p0'])
        self.assertEqual(trend_checks(rows)['phase_error_non_increasing'], None)

    def test_empty_ranges(self):
        with self.assertRaises(InvalidInputError):
            error_sweep(RunConfig(n=4, k=2), [], [0])
        with self.assertRaises(InvalidInputError):
            error_sweep(RunConfig(n=4, k=2), [3], [-5])

    def test_trend_checks(self):
        rows = [
            sweep_row(4, 0, phase_error=0.1), sweep_row(5, 0, phase_error=0.05), sweep_row(6, 0, phase_error=0.06),
            sweep_row(6, 100, sampling_error=0.01), sweep_row(6, 10_000, sampling_error=0.001),
        ]
        checks = trend_checks(rows)
        self.assertTrue(checks['phase_error_non_increasing'])
        self.assertAlmostEqual(checks['sampling_error_slope'], -0.5)
        self.assertTrue(checks['sampling_error_within_band'])

    def test_trend_checks_flag_growth(self):
        checks = trend_checks([sweep_row(4, 0, phase_error=0.01), sweep_row(5, 0, phase_error=0.05)])
        self.assertFalse(checks['phase_error_non_increasing'])
        self.assertIsNone(checks['sampling_error_slope'])
