"""Orbit-composition coins on the circle: where the walk ends up ballistically.

The rescaled position after n steps is an ergodic average of the step
function h along the rotation orbit.  For an irrational rotation and
h = cos the averages collapse onto 0 at rate 1/n (the limit law is a point
mass).  For the half rotation with the doubled harmonic cos(4 pi t), h is
invariant, nothing averages out, and the limit law is the arcsine
distribution of cos(4 pi U) on [-1, 1].
"""

import numpy as np

from qwalk.birkhoff import (
    CircleRotation,
    CoinDensity,
    ProductSampler,
    TrigPolynomial,
    birkhoff_average,
    limit_pushforward,
    sample_rescaled_position,
)
from qwalk.limits import cf_distance, ks_distance_to_cdf, moments
from qwalk.states import GaussianProfile

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def main():
    print(__doc__)
    rng = np.random.default_rng(7)
    rot = CircleRotation(alpha=GOLDEN, h=(TrigPolynomial(cos=(1.0,)),))
    omegas = rng.random(4096)
    print("golden rotation, h = cos(2 pi t): max |time average| over 4096 starts")
    for n in (10, 100, 1000, 10000):
        worst = float(np.max(np.abs(birkhoff_average(rot, omegas, n))))
        print(f"    n = {n:6d}   {worst:.3e}   (1/n = {1/n:.3e})")

    print()
    print("rescaled walk law against the point-mass limit (cf distance):")
    sampler = ProductSampler((GaussianProfile(),), CoinDensity(), rot)
    lim = limit_pushforward(rot, CoinDensity(), n_avg=5_000, samples=10_000, seed=11)
    for n in (100, 1000, 10000):
        emp = sample_rescaled_position(rot, sampler, n=n, samples=10_000, seed=11)
        print(f"    n = {n:6d}   {cf_distance(emp, lim):.3e}")

    print()
    half = CircleRotation(alpha=0.5, h=(TrigPolynomial(cos=(0.0, 1.0)),))
    lim_arc = limit_pushforward(half, CoinDensity(), n_avg=1000, samples=100_000, seed=13)
    arcsine_cdf = lambda x: np.arccos(np.clip(-np.asarray(x, dtype=float), -1, 1)) / np.pi
    m = moments(lim_arc, 2)
    print("half rotation, h = cos(4 pi t): limit law is the arcsine distribution")
    print(f"    KS distance to arcsine CDF: {ks_distance_to_cdf(lim_arc, arcsine_cdf):.4f}")
    print(f"    second moment {m[2, 0]:.4f} (arcsine: 0.5)")


if __name__ == "__main__":
    main()
