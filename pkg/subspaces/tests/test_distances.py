import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from subspaces.distances import (
    asimov_distance, chordal_distance, ellipsoid_distance, ellipsoid_spectrum, grassmann_distance,
    principal_angles, projection_distance,
)
from subspaces.exceptions import InvalidInputError
from subspaces.linalg import random_orthonormal, random_spd


def analytic_pair():
    """Two planes in R^3 sharing e1, tilted by pi/4 in the second direction."""
    m = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    n = np.array([[1.0, 0.0], [0.0, 1 / np.sqrt(2)], [0.0, 1 / np.sqrt(2)]])
    return m, n


class PrincipalAngleTests(SimpleTestCase):
    def test_analytic_pair(self):
        angles = principal_angles(*analytic_pair())
        assert_allclose(angles.thetas, [0.0, np.pi / 4], atol=1e-12)
        assert_allclose(np.cos(angles.thetas), angles.sigmas, atol=1e-12)
        self.assertEqual(angles.k, 2)

    def test_identical_subspaces(self):
        m = random_orthonormal(6, 3, seed=4)
        assert_allclose(principal_angles(m, m).thetas, 0.0, atol=1e-7)

    def test_rotated_basis_same_span(self):
        m = random_orthonormal(5, 2, seed=1)
        c, s = np.cos(0.3), np.sin(0.3)
        self.assertAlmostEqual(grassmann_distance(m, m @ np.array([[c, -s], [s, c]])), 0.0, places=7)

    def test_shape_mismatch(self):
        with self.assertRaises(InvalidInputError):
            principal_angles(random_orthonormal(4, 2, 0), random_orthonormal(4, 3, 1))

    def test_non_orthonormal(self):
        with self.assertRaises(InvalidInputError):
            principal_angles(2 * np.eye(3)[:, :2], np.eye(3)[:, :2])


class SubspaceDistanceTests(SimpleTestCase):
    def test_analytic_values(self):
        m, n = analytic_pair()
        self.assertAlmostEqual(grassmann_distance(m, n), np.pi / 4, places=12)
        self.assertAlmostEqual(asimov_distance(m, n), np.pi / 4, places=12)
        self.assertAlmostEqual(projection_distance(m, n), 1 / np.sqrt(2), places=12)
        self.assertAlmostEqual(chordal_distance(m, n), np.sqrt(0.5), places=12)

    def test_orthogonal_lines(self):
        m = np.array([[1.0], [0.0]])
        n = np.array([[0.0], [1.0]])
        self.assertAlmostEqual(grassmann_distance(m, n), np.pi / 2, places=12)
        self.assertAlmostEqual(projection_distance(m, n), 1.0, places=12)
        self.assertAlmostEqual(chordal_distance(m, n), 1.0, places=12)

    def test_symmetry_and_ordering(self):
        for seed in range(10):
            m = random_orthonormal(7, 3, seed)
            n = random_orthonormal(7, 3, seed + 100)
            self.assertAlmostEqual(grassmann_distance(m, n), grassmann_distance(n, m), places=9)
            self.assertLessEqual(asimov_distance(m, n), grassmann_distance(m, n) + 1e-12)
            self.assertLessEqual(projection_distance(m, n), asimov_distance(m, n) + 1e-12)
            self.assertLessEqual(grassmann_distance(m, n), np.sqrt(3) * np.pi / 2 + 1e-12)
            self.assertLessEqual(grassmann_distance(m, n), np.sqrt(3) * asimov_distance(m, n) + 1e-12)

    def test_angles_from_gram_eigenvalues(self):
        m = random_orthonormal(8, 3, seed=13)
        n = random_orthonormal(8, 3, seed=14)
        cross = m.conj().T @ n
        lambdas = np.linalg.eigvalsh(cross.conj().T @ cross)
        expected = np.sort(np.arccos(np.sqrt(np.clip(lambdas, 0.0, 1.0))))
        assert_allclose(np.sort(principal_angles(m, n).thetas), expected, atol=1e-7)
        self.assertAlmostEqual(grassmann_distance(m, n), np.linalg.norm(expected), places=7)

    def test_basis_invariance(self):
        rng = np.random.default_rng(5)
        for seed in range(5):
            m = random_orthonormal(6, 3, seed)
            n = random_orthonormal(6, 3, seed + 50)
            q_m, _ = np.linalg.qr(rng.standard_normal((3, 3)))
            q_n, _ = np.linalg.qr(rng.standard_normal((3, 3)))
            for distance in (grassmann_distance, asimov_distance, projection_distance, chordal_distance):
                with self.subTest(seed=seed, distance=distance.__name__):
                    self.assertAlmostEqual(distance(m @ q_m, n @ q_n), distance(m, n), places=7)

    def test_chordal_from_angles(self):
        for seed in range(5):
            m = random_orthonormal(7, 3, seed)
            n = random_orthonormal(7, 3, seed + 200)
            thetas = principal_angles(m, n).thetas
            self.assertAlmostEqual(chordal_distance(m, n) ** 2, np.sum(np.sin(thetas) ** 2), places=9)
            self.assertAlmostEqual(projection_distance(m, n), np.sin(np.max(thetas)), places=9)


class EllipsoidDistanceTests(SimpleTestCase):
    def test_scaled_identity(self):
        m = np.eye(2)
        n = np.exp(-1.0) * np.eye(2)
        self.assertAlmostEqual(ellipsoid_distance(m, n), np.sqrt(2), places=12)

    def test_same_matrix(self):
        m = random_spd(4, 6.0, seed=3)
        self.assertAlmostEqual(ellipsoid_distance(m, m), 0.0, places=7)

    def test_symmetry(self):
        m = random_spd(4, 4.0, seed=1)
        n = random_spd(4, 4.0, seed=2)
        self.assertAlmostEqual(ellipsoid_distance(m, n), ellipsoid_distance(n, m), places=9)

    def test_spectrum_matches_generalized_eigenvalues(self):
        m = random_spd(3, 5.0, seed=7)
        n = random_spd(3, 5.0, seed=8)
        expected = np.sort(np.linalg.eigvals(np.linalg.solve(m, n)).real)
        assert_allclose(ellipsoid_spectrum(m, n), expected, atol=1e-10)

    def test_rejects_non_spd(self):
        with self.assertRaises(InvalidInputError):
            ellipsoid_distance(np.eye(2), np.diag([1.0, -1.0]))
        with self.assertRaises(InvalidInputError):
            ellipsoid_distance(np.eye(2), np.eye(3))
