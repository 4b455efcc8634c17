"""Grid geometry, the unitary centered DFT, the exact index shear, and CSV IO."""

import numpy as np
import pytest

from qwalk.grids import (
    BOUNDARY_GUARD,
    GridSpec,
    GridWavefunction,
    boundary_mass,
    dft,
    random_wavefunction,
    shear,
    wavefunction_from_csv,
    wavefunction_to_csv,
)


def _spec(d=1, L=8.0, N=64):
    return GridSpec(d=d, L=L, N=N)


class TestGridSpec:
    def test_rejects_bad_dimensions(self):
        for bad in (0, 3, -1):
            with pytest.raises(ValueError):
                GridSpec(d=bad, L=4.0, N=16)

    def test_rejects_bad_box(self):
        with pytest.raises(ValueError):
            GridSpec(d=1, L=0.0, N=16)
        with pytest.raises(ValueError):
            GridSpec(d=1, L=-2.0, N=16)

    def test_rejects_non_power_of_two(self):
        for bad in (6, 12, 100, 4):
            with pytest.raises(ValueError):
                GridSpec(d=1, L=4.0, N=bad)

    def test_coords_center_and_spacing(self):
        spec = _spec(N=64)
        x = spec.axis_coords()
        assert x[64 // 2] == 0.0
        assert np.allclose(np.diff(x), spec.dx)
        assert x[0] == -spec.L
        z = spec.axis_coords(dual=True)
        assert z[64 // 2] == 0.0
        assert np.allclose(np.diff(z), spec.dual_dx)
        # the dual of the dual grid is the primal grid
        dual_spacing = 2 * np.pi / (64 * spec.dual_dx)
        assert abs(dual_spacing - spec.dx) < 1e-15


class TestDft:
    def test_norm_preserved(self):
        rng = np.random.default_rng(0)
        spec = _spec()
        for axes in ("x", "y", "both"):
            psi = random_wavefunction(spec, rng)
            out = dft(psi, axes=axes)
            assert abs(out.norm() - 1.0) < 1e-12
            assert out.x_dual == (axes in ("x", "both"))
            assert out.y_dual == (axes in ("y", "both"))

    def test_roundtrip_is_identity(self):
        rng = np.random.default_rng(1)
        psi = random_wavefunction(_spec(), rng)
        back = dft(dft(psi, axes="both"), axes="both", direction="inverse")
        assert np.max(np.abs(back.values - psi.values)) < 1e-13
        assert not back.x_dual and not back.y_dual

    def test_factorizes_over_axis_groups(self):
        rng = np.random.default_rng(2)
        psi = random_wavefunction(_spec(), rng)
        both = dft(psi, axes="both")
        xy = dft(dft(psi, axes="x"), axes="y")
        assert np.max(np.abs(both.values - xy.values)) < 1e-13

    def test_gaussian_closed_form(self):
        # e^{-x^2/2} is a fixed point of the unitary transform
        spec = _spec(L=16.0, N=256)
        x = spec.axis_coords()
        g = np.exp(-(x**2) / 2)
        vals = np.multiply.outer(g, np.exp(-(x**2) / 2)).astype(np.complex128)
        psi = GridWavefunction(spec, vals)
        out = dft(psi, axes="x")
        z = spec.axis_coords(dual=True)
        expect = np.multiply.outer(np.exp(-(z**2) / 2), np.exp(-(x**2) / 2))
        assert np.max(np.abs(out.values - expect)) < 1e-8

    def test_two_dimensional_unitarity(self):
        rng = np.random.default_rng(3)
        spec = _spec(d=2, L=4.0, N=8)
        psi = random_wavefunction(spec, rng)
        assert psi.values.shape == (8, 8, 8, 8)
        out = dft(psi, axes="both")
        assert abs(out.norm() - 1.0) < 1e-12
        back = dft(out, axes="both", direction="inverse")
        assert np.max(np.abs(back.values - psi.values)) < 1e-13


class TestShear:
    def test_moves_delta_by_its_coin_value(self):
        spec = _spec(L=4.0, N=8)
        x = spec.axis_coords()
        i, j = 5, 6  # x=1, y=2
        vals = np.zeros((8, 8), dtype=np.complex128)
        vals[i, j] = 1.0
        out = shear(GridWavefunction(spec, vals))
        target_x = x[i] + x[j]  # 3.0
        ti = int(np.argmin(np.abs(x - target_x)))
        assert out.values[ti, j] == 1.0
        assert np.count_nonzero(out.values) == 1

    def test_wraps_periodically(self):
        spec = _spec(L=4.0, N=8)
        vals = np.zeros((8, 8), dtype=np.complex128)
        vals[7, 7] = 1.0  # x=3, y=3 -> x+y=6 wraps to -2
        out = shear(GridWavefunction(spec, vals))
        x = spec.axis_coords()
        ti = int(np.argmin(np.abs(x - (-2.0))))
        assert out.values[ti, 7] == 1.0

    def test_inverse_restores_exactly(self):
        rng = np.random.default_rng(4)
        psi = random_wavefunction(_spec(), rng)
        back = shear(shear(psi), inverse=True)
        assert np.array_equal(back.values, psi.values)

    def test_norm_preserved(self):
        rng = np.random.default_rng(5)
        psi = random_wavefunction(_spec(), rng)
        assert abs(shear(psi).norm() - psi.norm()) < 1e-12

    def test_requires_matching_grids(self):
        rng = np.random.default_rng(6)
        psi = dft(random_wavefunction(_spec(), rng), axes="y")
        with pytest.raises(ValueError):
            shear(psi)

    def test_two_dimensional_delta(self):
        spec = _spec(d=2, L=4.0, N=8)
        vals = np.zeros((8,) * 4, dtype=np.complex128)
        vals[5, 4, 6, 4] = 1.0  # x=(1,0), y=(2,0) -> x+y=(3,0)
        out = shear(GridWavefunction(spec, vals))
        assert out.values[7, 4, 6, 4] == 1.0
        assert np.count_nonzero(out.values) == 1


class TestBoundaryMass:
    def test_uniform_state_counting_oracle(self):
        spec = _spec(L=4.0, N=16)
        vals = np.full((16, 16), 1.0, dtype=np.complex128)
        psi = GridWavefunction(spec, vals)
        frame_cells = 16 * 16 - 12 * 12
        expect = frame_cells * spec.dx**2
        assert abs(boundary_mass(psi) - expect) < 1e-12

    def test_interior_state_is_clean(self):
        spec = _spec(L=4.0, N=16)
        vals = np.zeros((16, 16), dtype=np.complex128)
        vals[8, 8] = 1.0
        assert boundary_mass(GridWavefunction(spec, vals)) == 0.0

    def test_never_negative(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            psi = random_wavefunction(_spec(N=16), rng)
            assert boundary_mass(psi) >= 0.0

    def test_guard_threshold_is_small(self):
        assert 0 < BOUNDARY_GUARD < 1e-3


class TestCsvRoundTrip:
    def test_values_and_flags_survive(self, tmp_path):
        rng = np.random.default_rng(8)
        psi = dft(random_wavefunction(_spec(N=16), rng), axes="y")
        path = tmp_path / "w.csv"
        wavefunction_to_csv(psi, path)
        back = wavefunction_from_csv(path)
        assert back.spec == psi.spec
        assert back.x_dual == psi.x_dual
        assert back.y_dual == psi.y_dual
        assert np.array_equal(back.values, psi.values)

    def test_two_dimensional_roundtrip(self, tmp_path):
        rng = np.random.default_rng(9)
        psi = random_wavefunction(_spec(d=2, L=2.0, N=8), rng)
        path = tmp_path / "w.csv"
        wavefunction_to_csv(psi, path)
        back = wavefunction_from_csv(path)
        assert back.spec == psi.spec
        assert np.array_equal(back.values, psi.values)
