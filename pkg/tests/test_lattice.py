"""Hadamard walk on the integer lattice: exact small cases and support facts."""

import numpy as np
import pytest

from qwalk.lattice import (
    LatticeState,
    basis_state,
    evolve,
    hadamard_step,
    lattice_distribution,
    mass_outside,
    rescaled_lattice_measure,
)

_S2 = np.sqrt(2.0)


def _amp_at(state, site, coin):
    i = site - state.offset
    if not 0 <= i < state.width:
        return 0.0 + 0.0j
    vec = state.amps_h if coin == "H" else state.amps_t
    return complex(vec[i])


class TestSingleSteps:
    def test_one_step_from_heads(self):
        s = hadamard_step(basis_state(0, "H"))
        assert abs(_amp_at(s, 1, "H") - 1 / _S2) < 1e-15
        assert abs(_amp_at(s, -1, "T") - 1 / _S2) < 1e-15
        assert abs(_amp_at(s, 1, "T")) == 0.0
        assert abs(_amp_at(s, -1, "H")) == 0.0

    def test_one_step_from_tails(self):
        s = hadamard_step(basis_state(0, "T"))
        assert abs(_amp_at(s, 1, "H") - 1 / _S2) < 1e-15
        assert abs(_amp_at(s, -1, "T") + 1 / _S2) < 1e-15

    def test_two_step_distribution(self):
        # P(-2) = 1/4, P(0) = 1/2, P(2) = 1/4 from |0, H>
        dist = lattice_distribution(evolve(basis_state(0, "H"), 2))
        probs = dict(zip(dist.sites().tolist(), dist.probs.tolist()))
        assert abs(probs[-2] - 0.25) < 1e-15
        assert abs(probs[0] - 0.5) < 1e-15
        assert abs(probs[2] - 0.25) < 1e-15

    def test_three_step_asymmetry(self):
        # the H-started walk drifts right: P(3) = 1/8 but P(-3) = 1/8,
        # asymmetry shows up at the interior sites
        dist = lattice_distribution(evolve(basis_state(0, "H"), 3))
        probs = dict(zip(dist.sites().tolist(), dist.probs.tolist()))
        assert abs(probs[3] - 1 / 8) < 1e-15
        assert abs(probs[-3] - 1 / 8) < 1e-15
        assert abs(probs[1] - 5 / 8) < 1e-15
        assert abs(probs[-1] - 1 / 8) < 1e-15

    def test_norm_preserved_on_random_states(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            w = int(rng.integers(1, 9))
            s = LatticeState(
                int(rng.integers(-5, 5)),
                rng.normal(size=w) + 1j * rng.normal(size=w),
                rng.normal(size=w) + 1j * rng.normal(size=w),
            ).normalized()
            out = evolve(s, int(rng.integers(1, 6)))
            assert abs(out.norm() - 1.0) < 1e-12


class TestDenseOracle:
    def _dense_step(self, half):
        """Step operator as an explicit matrix on sites -half..half, coins (H, T)."""
        n_sites = 2 * half + 1
        dim = 2 * n_sites
        U = np.zeros((dim, dim))
        for j in range(n_sites):
            site = j - half
            if site + 1 <= half:
                dst = 2 * (j + 1)
                U[dst, 2 * j] += 1 / _S2  # H component of the flip, shifted up
                U[dst, 2 * j + 1] += 1 / _S2
            if site - 1 >= -half:
                dst = 2 * (j - 1) + 1
                U[dst, 2 * j] += 1 / _S2  # T component, shifted down
                U[dst, 2 * j + 1] -= 1 / _S2
        return U

    def test_matches_matrix_power(self):
        half = 10
        n = 8
        U = self._dense_step(half)
        vec = np.zeros(2 * (2 * half + 1), dtype=np.complex128)
        rng = np.random.default_rng(11)
        amp = rng.normal(size=4) + 1j * rng.normal(size=4)
        amp /= np.linalg.norm(amp)
        vec[2 * half] = amp[0]  # site 0 heads
        vec[2 * half + 1] = amp[1]  # site 0 tails
        vec[2 * (half + 1)] = amp[2]  # site 1 heads
        vec[2 * (half + 1) + 1] = amp[3]
        state = LatticeState(0, [amp[0], amp[2]], [amp[1], amp[3]])

        out_vec = np.linalg.matrix_power(U, n) @ vec
        out = evolve(state, n)
        worst = 0.0
        for site in range(-half, half + 1):
            j = site + half
            worst = max(worst, abs(_amp_at(out, site, "H") - out_vec[2 * j]))
            worst = max(worst, abs(_amp_at(out, site, "T") - out_vec[2 * j + 1]))
        assert worst < 1e-12


class TestSupport:
    def test_amplitudes_vanish_beyond_n(self):
        out = evolve(basis_state(0, "H"), 12)
        sites = out.sites()
        off = (np.abs(sites) > 12)
        assert np.all(out.amps_h[off] == 0)
        assert np.all(out.amps_t[off] == 0)

    def test_parity_sites_are_dark(self):
        # after n steps only sites of parity n carry mass
        for n in (5, 8):
            dist = lattice_distribution(evolve(basis_state(0, "H"), n))
            sites = dist.sites()
            wrong = (sites + n) % 2 == 1
            assert np.all(dist.probs[wrong] == 0)

    def test_evolve_zero_is_identity(self):
        s = basis_state(3, "T")
        out = evolve(s, 0)
        assert out.offset == s.offset
        assert np.array_equal(out.amps_h, s.amps_h)

    def test_evolve_rejects_negative(self):
        with pytest.raises(ValueError):
            evolve(basis_state(), -1)


class TestRescaledMeasure:
    def test_atoms_are_sites_over_n(self):
        n = 6
        dist = lattice_distribution(evolve(basis_state(0, "H"), n))
        m = rescaled_lattice_measure(dist, n)
        assert np.allclose(m.atoms * n, dist.sites())
        assert abs(m.weights.sum() - 1.0) < 1e-12
        assert m.meta["n"] == n

    def test_rejects_unnormalized(self):
        from qwalk.lattice import LatticeDistribution

        with pytest.raises(ValueError):
            rescaled_lattice_measure(LatticeDistribution(0, np.array([0.5])), 4)

    def test_mass_outside_hand_case(self):
        from qwalk.measures import EmpiricalMeasure

        m = EmpiricalMeasure(np.array([-0.9, -0.5, 0.0, 0.5, 0.9]), np.full(5, 0.2))
        assert abs(mass_outside(m, -0.5, 0.5) - 0.4) < 1e-15
        assert mass_outside(m, -1.0, 1.0) == 0.0

    def test_mass_concentrates_inside_the_ballistic_interval(self):
        # rescaled law concentrates on [-1/sqrt(2), 1/sqrt(2)]
        lo, hi = -1 / _S2 - 0.05, 1 / _S2 + 0.05
        n_small, n_big = 40, 160
        out_small = mass_outside(
            rescaled_lattice_measure(
                lattice_distribution(evolve(basis_state(0, "H"), n_small)), n_small
            ),
            lo,
            hi,
        )
        out_big = mass_outside(
            rescaled_lattice_measure(
                lattice_distribution(evolve(basis_state(0, "H"), n_big)), n_big
            ),
            lo,
            hi,
        )
        assert out_big < out_small < 0.05
