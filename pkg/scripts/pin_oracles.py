"""Recompute the frozen regression constants used by the test-suite.

Each value comes from a route independent of the production code path:
power series for K, a dense measurement grid (no refinement) for discord,
hand-enumerated 2x2 torus sums for the Ising numbers.
"""

import math

import numpy as np

from toricdiscord.quantum import grid_discord


def elliptic_series(k, terms=200):
    total, coef = 0.0, 1.0
    for n in range(terms):
        if n:
            coef *= (2 * n - 1) / (2 * n)
        total += coef**2 * k ** (2 * n)
    return math.pi / 2 * total


def separable_example():
    z = np.array([1.0, 0.0])
    p = np.array([1.0, 1.0]) / math.sqrt(2)
    zz, pp = np.kron(z, z), np.kron(p, p)
    return (np.outer(zz, zz) + np.outer(pp, pp)) / 2


def main():
    beta_c = 0.5 * math.log(1 + math.sqrt(2))
    e = math.exp(8 * beta_c)
    nn_2x2 = (e - 1 / e) / (e + 6 + 1 / e)
    print(f"K(0.5) series             = {elliptic_series(0.5)!r}")
    print(f"2x2 nn moment at beta_c   = {nn_2x2!r}")
    print(f"a^2 on L=2 at beta_c      = {(1 + nn_2x2) / 2!r}")
    print(f"discord oracle 512x512    = {grid_discord(separable_example(), 512)!r}")


if __name__ == "__main__":
    main()
