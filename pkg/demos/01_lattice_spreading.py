"""Hadamard walk on the integers: ballistic spreading of the rescaled law.

The position distribution after n steps, rescaled by 1/n, piles up inside
[-1/sqrt(2), 1/sqrt(2)] with sharp peaks near the edges, quite unlike the
diffusive Gaussian of the classical random walk.
"""

import numpy as np

from qwalk.lattice import (
    basis_state,
    evolve,
    lattice_distribution,
    mass_outside,
    rescaled_lattice_measure,
)
from qwalk.limits import moments

EDGE = 1 / np.sqrt(2)


def sketch(measure, bins=61, width=50):
    """Coarse text histogram of a rescaled lattice measure on [-1, 1]."""
    edges = np.linspace(-1.0, 1.0, bins + 1)
    pts = measure.atoms
    hist = np.zeros(bins)
    idx = np.clip(np.digitize(pts, edges) - 1, 0, bins - 1)
    np.add.at(hist, idx, measure.weights)
    top = hist.max()
    lines = []
    for k in range(bins):
        bar = "#" * int(round(width * hist[k] / top)) if top > 0 else ""
        lines.append(f"{edges[k]:+.2f} |{bar}")
    return "\n".join(lines)


def main():
    print(__doc__)
    state = basis_state(0, "H")
    done = 0
    for n in (10, 40, 160, 640):
        state = evolve(state, n - done)
        done = n
        q = rescaled_lattice_measure(lattice_distribution(state), n)
        inside = 1.0 - mass_outside(q, -EDGE - 0.05, EDGE + 0.05)
        m = moments(q, 2)
        print(
            f"n = {n:4d}   mass within the ballistic interval (+5% slack): {inside:.6f}"
            f"   mean {m[1, 0]:+.4f}   second moment {m[2, 0]:.4f}"
        )
    print()
    print(f"rescaled distribution at n = {done}:")
    print(sketch(rescaled_lattice_measure(lattice_distribution(state), done)))


if __name__ == "__main__":
    main()
