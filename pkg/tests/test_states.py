"""Factor profiles and product-state assembly."""

import numpy as np
import pytest

from qwalk.grids import GridSpec
from qwalk.states import BoxProfile, GaussianProfile, product_state


class TestProfiles:
    def test_gaussian_rejects_bad_width(self):
        with pytest.raises(ValueError):
            GaussianProfile(width=0.0)
        with pytest.raises(ValueError):
            GaussianProfile(width=-1.0)

    def test_box_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            BoxProfile(2.0, 2.0)

    def test_gaussian_is_l2_normalized(self):
        x = np.linspace(-30, 30, 20001)
        dx = x[1] - x[0]
        for p in (GaussianProfile(), GaussianProfile(center=1.0, width=2.3, momentum=0.7)):
            mass = np.sum(np.abs(p(x)) ** 2) * dx
            assert abs(mass - 1.0) < 1e-10

    def test_momentum_only_rotates_phase(self):
        x = np.linspace(-5, 5, 101)
        flat = GaussianProfile()
        boosted = GaussianProfile(momentum=2.0)
        assert np.allclose(np.abs(flat(x)), np.abs(boosted(x)), atol=1e-14)
        assert not np.allclose(flat(x), boosted(x))

    def test_box_values(self):
        p = BoxProfile(-1.0, 3.0)
        x = np.array([-1.5, -1.0, 0.0, 2.999, 3.0])
        vals = p(x)
        assert vals[0] == 0.0 and vals[4] == 0.0
        assert np.allclose(vals[1:4], 0.5)  # (b - a)^(-1/2) = 1/2

    def test_gaussian_sampling_law(self):
        rng = np.random.default_rng(70)
        p = GaussianProfile(center=1.5, width=2.0)
        draws = p.sample_position(rng, 50_000)
        assert abs(draws.mean() - 1.5) < 0.03
        assert abs(draws.std() - 2.0 / np.sqrt(2)) < 0.03

    def test_box_sampling_law(self):
        rng = np.random.default_rng(71)
        p = BoxProfile(0.5, 0.75)
        draws = p.sample_position(rng, 10_000)
        assert draws.min() >= 0.5 and draws.max() < 0.75
        assert abs(draws.mean() - 0.625) < 0.01


class TestProductState:
    def test_contained_state_has_unit_raw_norm(self):
        spec = GridSpec(d=1, L=12.0, N=256)
        psi, raw = product_state(spec, GaussianProfile(), GaussianProfile())
        assert abs(raw - 1.0) < 1e-10
        assert abs(psi.norm() - 1.0) < 1e-13

    def test_normalize_false_keeps_raw_sampling(self):
        spec = GridSpec(d=1, L=2.0, N=32)  # truncates the tails
        psi, raw = product_state(spec, GaussianProfile(), GaussianProfile(), normalize=False)
        assert abs(psi.norm() - raw) < 1e-13
        assert raw < 1.0

    def test_profile_list_per_axis(self):
        spec = GridSpec(d=2, L=6.0, N=16)
        psi, _ = product_state(
            spec,
            [GaussianProfile(center=0.5), GaussianProfile(center=-0.5)],
            [GaussianProfile(), GaussianProfile()],
        )
        assert psi.values.shape == (16,) * 4
        assert abs(psi.norm() - 1.0) < 1e-12

    def test_wrong_profile_count_raises(self):
        spec = GridSpec(d=2, L=6.0, N=16)
        with pytest.raises(ValueError):
            product_state(spec, [GaussianProfile()], GaussianProfile())

    def test_factorization_matches_outer_product(self):
        spec = GridSpec(d=1, L=8.0, N=64)
        phi = GaussianProfile(center=0.3)
        chi = BoxProfile(-1.0, 1.0)
        psi, _ = product_state(spec, phi, chi, normalize=False)
        x = spec.axis_coords()
        assert np.allclose(psi.values, np.multiply.outer(phi(x), chi(x)), atol=1e-15)