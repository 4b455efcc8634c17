"""Acceptance gate: every verification criterion runs here, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
pass/fail lines; the same checks back the `qwalk verify` command.
"""

import pytest

from qwalk.acceptance import CRITERIA


def _check(cid):
    res = CRITERIA[cid]()
    print(res.line())
    assert res.passed, "\n".join(res.details)


def test_criterion_1_unitarity_and_mass_conservation():
    _check("1")


def test_criterion_2_four_step_phase_identity():
    _check("2")


def test_criterion_3_gaussian_limit_law():
    _check("3")


def test_criterion_4_coin_factor_independence():
    _check("4")


def test_criterion_5_step_invariance_of_limit():
    _check("5")


@pytest.mark.slow
def test_criterion_6_orbit_average_limits():
    _check("6")


def test_criterion_7_estimator_cross_validation():
    _check("7")


def test_criterion_8_lattice_support():
    _check("8")


def test_criterion_9_determinism_across_runs():
    _check("9")
