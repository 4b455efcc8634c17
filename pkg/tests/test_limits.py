"""Characteristic functions, KS and Lévy distances, moments, and the sweep driver."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk.lattice import LatticeDistribution
from qwalk.limits import (
    as_atoms,
    cf_distance,
    characteristic_function,
    convergence_sweep,
    default_zeta_grid,
    ks_distance,
    ks_distance_to_cdf,
    levy_distance,
    measure_dim,
    moments,
)
from qwalk.measures import DensityOnGrid, EmpiricalMeasure


def _delta(v=0.0):
    return EmpiricalMeasure(np.array([v]), np.array([1.0]))


def _uniform_atoms(a, b, m=2000):
    """Exact atomization of Unif[a, b): m midpoint cells of equal weight."""
    h = (b - a) / m
    pts = a + (np.arange(m) + 0.5) * h
    return EmpiricalMeasure(pts, np.full(m, 1.0 / m))


def _grid_gaussian(L=16.0, N=512, var=0.5):
    x = (np.arange(N) - N // 2) * (2 * L / N)
    vals = np.exp(-(x**2) / (2 * var)) / np.sqrt(2 * np.pi * var)
    return DensityOnGrid(d=1, L=L, N=N, values=vals)


@st.composite
def small_empirical(draw):
    m = draw(st.integers(1, 8))
    atoms = draw(
        st.lists(
            st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False),
            min_size=m,
            max_size=m,
        )
    )
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=m, max_size=m))
    w = np.asarray(raw)
    return EmpiricalMeasure(np.asarray(atoms), w / w.sum())


class TestAtomView:
    def test_empirical_passthrough(self):
        m = EmpiricalMeasure(np.array([1.0, 2.0]), np.array([0.25, 0.75]))
        pts, w = as_atoms(m)
        assert pts.shape == (2, 1)
        assert np.array_equal(w, m.weights)

    def test_density_cells(self):
        dens = _grid_gaussian(N=64)
        pts, w = as_atoms(dens)
        assert pts.shape == (64, 1)
        assert abs(w.sum() - dens.integral()) < 1e-14

    def test_lattice_sites(self):
        dist = LatticeDistribution(-1, np.array([0.25, 0.5, 0.25]))
        pts, w = as_atoms(dist)
        assert np.array_equal(pts[:, 0], [-1.0, 0.0, 1.0])
        assert np.array_equal(w, dist.probs)

    def test_rejects_foreign_objects(self):
        with pytest.raises(TypeError):
            as_atoms([1, 2, 3])

    def test_dimension_helper(self):
        assert measure_dim(_delta()) == 1
        two = EmpiricalMeasure(np.zeros((3, 2)), np.full(3, 1 / 3))
        assert measure_dim(two) == 2


class TestCharacteristicFunction:
    def test_value_at_zero_is_total_mass(self):
        zg = np.array([0.0])
        for m in (
            _delta(0.7),
            _grid_gaussian(),
            LatticeDistribution(0, np.array([0.5, 0.5])),
        ):
            phi = characteristic_function(m, zg)
            pts, w = as_atoms(m)
            assert abs(phi[0] - w.sum()) < 1e-12

    def test_point_mass_is_pure_phase(self):
        v = 1.3
        zg = np.linspace(-4, 4, 41)
        phi = characteristic_function(_delta(v), zg)
        assert np.max(np.abs(phi - np.exp(1j * zg * v))) < 1e-14

    def test_symmetric_pair_is_cosine(self):
        m = EmpiricalMeasure(np.array([-2.0, 2.0]), np.array([0.5, 0.5]))
        zg = np.linspace(-3, 3, 31)
        phi = characteristic_function(m, zg)
        assert np.max(np.abs(phi - np.cos(2 * zg))) < 1e-14

    def test_gaussian_grid_closed_form(self):
        # variance 1/2 gives phi(z) = exp(-z^2/4); the grid sum is
        # spectrally accurate for a well-resolved, well-contained density
        zg = np.linspace(-8, 8, 33)
        phi = characteristic_function(_grid_gaussian(var=0.5), zg)
        assert np.max(np.abs(phi - np.exp(-(zg**2) / 4))) < 1e-12

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            characteristic_function(_delta(), np.zeros((4, 2)))

    def test_two_dimensional_product(self):
        pts = np.array([[0.0, 0.0], [1.0, 2.0]])
        m = EmpiricalMeasure(pts, np.array([0.5, 0.5]))
        zg = np.array([[0.5, -0.5]])
        phi = characteristic_function(m, zg)
        expect = 0.5 + 0.5 * np.exp(1j * (0.5 * 1.0 - 0.5 * 2.0))
        assert abs(phi[0] - expect) < 1e-14


class TestZetaGrid:
    def test_shapes_and_center(self):
        g1 = default_zeta_grid(1)
        assert g1.shape == (257,)
        assert g1[128] == 0.0
        g2 = default_zeta_grid(2, points=9)
        assert g2.shape == (81, 2)

    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            default_zeta_grid(1, window=0.0)


class TestCfDistance:
    def test_separated_deltas(self):
        # |e^{i z a} - 1| reaches 2 once the window covers pi/a
        dist = cf_distance(_delta(0.0), _delta(1.0), window=8.0)
        assert abs(dist - 2.0) < 1e-3

    def test_rejects_dimension_mismatch(self):
        two = EmpiricalMeasure(np.zeros((3, 2)), np.full(3, 1 / 3))
        with pytest.raises(ValueError):
            cf_distance(_delta(), two)

    @settings(max_examples=40, deadline=None)
    @given(small_empirical(), small_empirical())
    def test_symmetric(self, m1, m2):
        assert cf_distance(m1, m2) == cf_distance(m2, m1)

    @settings(max_examples=40, deadline=None)
    @given(small_empirical())
    def test_self_distance_zero(self, m):
        assert cf_distance(m, m) == 0.0

    @settings(max_examples=40, deadline=None)
    @given(small_empirical(), small_empirical(), small_empirical())
    def test_triangle(self, a, b, c):
        assert cf_distance(a, c) <= cf_distance(a, b) + cf_distance(b, c) + 1e-9


class TestKsDistance:
    def test_point_mass_against_centered_uniform(self):
        m = _uniform_atoms(-0.5, 0.5, m=1000)
        assert abs(ks_distance(_delta(0.0), m) - 0.5) < 1e-3

    def test_identical_measures(self):
        m = _uniform_atoms(0, 1, m=50)
        assert ks_distance(m, m) == 0.0

    def test_rejects_high_dimension(self):
        m3 = EmpiricalMeasure(np.zeros((4, 3)), np.full(4, 0.25))
        with pytest.raises(ValueError):
            ks_distance(m3, m3)

    def test_two_dimensional_marginals(self):
        a = EmpiricalMeasure(np.array([[0.0, 0.0]]), np.array([1.0]))
        b = EmpiricalMeasure(np.array([[0.0, 3.0]]), np.array([1.0]))
        assert ks_distance(a, b) == 1.0  # y marginals disagree completely

    @settings(max_examples=40, deadline=None)
    @given(small_empirical(), small_empirical())
    def test_bounded_and_symmetric(self, m1, m2):
        d = ks_distance(m1, m2)
        assert 0.0 <= d <= 1.0
        assert d == ks_distance(m2, m1)

    @settings(max_examples=40, deadline=None)
    @given(small_empirical(), small_empirical(), small_empirical())
    def test_triangle(self, a, b, c):
        assert ks_distance(a, c) <= ks_distance(a, b) + ks_distance(b, c) + 1e-12

    def test_against_scipy_one_sample(self):
        from scipy import stats

        rng = np.random.default_rng(30)
        x = rng.normal(size=400)
        m = EmpiricalMeasure(x, np.full(400, 1 / 400))
        ours = ks_distance_to_cdf(m, stats.norm.cdf)
        ref = stats.kstest(x, "norm").statistic
        assert abs(ours - ref) < 1e-12

    def test_to_cdf_rejects_2d(self):
        two = EmpiricalMeasure(np.zeros((3, 2)), np.full(3, 1 / 3))
        with pytest.raises(ValueError):
            ks_distance_to_cdf(two, lambda x: x)


class TestLevyDistance:
    def test_separated_point_masses(self):
        # levy(delta_0, delta_a) = min(a, 1)
        for a in (0.25, 0.8, 1.0, 3.0):
            got = levy_distance(_delta(0.0), _delta(a))
            assert abs(got - min(a, 1.0)) < 1e-9

    def test_point_mass_against_wide_uniform(self):
        # levy(delta_0, Unif[-1,1]) = 1/3
        m = _uniform_atoms(-1.0, 1.0, m=3000)
        assert abs(levy_distance(_delta(0.0), m) - 1.0 / 3.0) < 1e-3

    def test_detects_concentration_where_ks_saturates(self):
        # laws Unif[v, v + 1/n] concentrate on delta_v: the Lévy distance
        # decays like 1/(n+1) while the KS distance stays at 1
        v = 0.4
        for n in (4, 8, 16, 32):
            m = _uniform_atoms(v, v + 1.0 / n, m=1000)
            lev = levy_distance(m, _delta(v))
            assert abs(lev - 1.0 / (n + 1)) < 2e-3
            assert ks_distance(m, _delta(v)) > 0.99

    def test_never_exceeds_ks(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            m1 = EmpiricalMeasure(rng.normal(size=20), np.full(20, 0.05))
            m2 = EmpiricalMeasure(rng.normal(1, 2, size=10), np.full(10, 0.1))
            assert levy_distance(m1, m2) <= ks_distance(m1, m2) + 1e-9

    @settings(max_examples=25, deadline=None)
    @given(small_empirical(), small_empirical())
    def test_symmetric_and_bounded(self, m1, m2):
        d = levy_distance(m1, m2)
        assert 0.0 <= d <= 1.0
        assert d == levy_distance(m2, m1)

    def test_self_distance_zero(self):
        m = _uniform_atoms(0, 1, m=17)
        assert levy_distance(m, m) == 0.0


class TestMoments:
    def test_point_mass_powers(self):
        v = -1.5
        got = moments(_delta(v), 4)
        assert np.allclose(got[:, 0], [1.0, v, v**2, v**3, v**4], atol=1e-14)

    def test_ballistic_limit_variance(self):
        # the Gaussian limit profile (2/sqrt(pi)) e^{-4x^2} has variance 1/8
        L, N = 4.0, 1024
        x = (np.arange(N) - N // 2) * (2 * L / N)
        dens = DensityOnGrid(d=1, L=L, N=N, values=(2 / np.sqrt(np.pi)) * np.exp(-4 * x**2))
        got = moments(dens, 4)
        assert abs(got[0, 0] - 1.0) < 1e-10
        assert abs(got[1, 0]) < 1e-12
        assert abs(got[2, 0] - 0.125) < 1e-10
        assert abs(got[4, 0] - 3.0 / 64.0) < 1e-10

    def test_order_validation(self):
        for bad in (0, 9, -2):
            with pytest.raises(ValueError):
                moments(_delta(), bad)

    def test_two_dimensional_columns(self):
        pts = np.array([[1.0, 2.0], [3.0, 4.0]])
        m = EmpiricalMeasure(pts, np.array([0.5, 0.5]))
        got = moments(m, 2)
        assert np.allclose(got[1], [2.0, 3.0])
        assert np.allclose(got[2], [5.0, 10.0])


class TestConvergenceSweep:
    @staticmethod
    def _shrinking_walk(n):
        return _uniform_atoms(0.0, 1.0 / n, m=400)

    def test_records_distances_and_moments(self):
        report = convergence_sweep(
            self._shrinking_walk, [1, 2, 4, 8], _delta(0.0), walk_name="demo"
        )
        assert [e.n for e in report.entries] == [1, 2, 4, 8]
        cfs = [e.cf_distance for e in report.entries]
        assert report.cf_nonincreasing
        assert cfs[-1] < cfs[0]
        # every law here sits strictly right of the limit atom, KS = 1
        assert all(abs(e.ks_distance - 1.0) < 1e-12 for e in report.entries)
        assert report.ks_nonincreasing
        assert report.entries[0].moments.shape == (5, 1)

    def test_to_dict_is_json_ready(self):
        report = convergence_sweep(self._shrinking_walk, [1, 2], _delta(0.0))
        blob = json.dumps(report.to_dict())
        back = json.loads(blob)
        assert back["entries"][0]["n"] == 1
        assert back["cf_nonincreasing"] is True

    def test_warning_metadata_is_surfaced(self):
        def noisy(n):
            m = self._shrinking_walk(n)
            m.meta["warnings"] = [f"w{n}"]
            return m

        report = convergence_sweep(noisy, [1, 2], _delta(0.0))
        assert report.entries[0].warnings == ["w1"]
        assert report.entries[1].warnings == ["w2"]

    def test_rejects_bad_n_lists(self):
        for bad in ([], [0, 1], [2, 2], [4, 2]):
            with pytest.raises(ValueError):
                convergence_sweep(self._shrinking_walk, bad, _delta(0.0))

    def test_ks_optional(self):
        report = convergence_sweep(
            self._shrinking_walk, [1, 2], _delta(0.0), with_ks=False
        )
        assert report.entries[0].ks_distance is None
        assert report.ks_nonincreasing is None
