#!/usr/bin/env python3
"""Random-matrix statistics behind the uninformed-perturbation model."""

import numpy as np

from dyncool import cooling_probability, sample_gue, transition_matrix

DRAWS = 5000
N = 8


def moments(rng):
    traces = np.empty(DRAWS)
    extremes = np.empty(DRAWS)
    for i in range(DRAWS):
        G = sample_gue(rng, N)
        traces[i] = np.real(np.trace(G @ G)) / N
        extremes[i] = np.linalg.norm(G, 2)
    print(f"GUE at N={N}, {DRAWS} draws:")
    print(f"  Tr(A^2)/N: mean {traces.mean():.4f}  (expected 1)")
    print(f"  spectral norm: mean {extremes.mean():.4f}  (semicircle edge -> 2)")


def downhill(rng):
    # with GUE coupling, the mean downhill probability from state j counts
    # the states below it, each contributing E|A_ij|^2 / 4 = 1/(4N)
    lam = np.linspace(-1.0, 1.0, N)
    print("\ndownhill step probability vs count/(4N):")
    for j in (1, 4, 7):
        probs = [cooling_probability(lam, sample_gue(rng, N), j) for _ in range(DRAWS)]
        print(f"  j={j}: mean {np.mean(probs):.4f}, predicted {j / (4 * N):.4f}")


def markov_column(rng):
    lam = np.sort(rng.uniform(-1, 1, 5))
    A = sample_gue(rng, 5)
    A = A / max(1.0, np.linalg.norm(A, 2))
    T = transition_matrix(lam, 0.4 * A)
    print("\none-step outcome distribution from the top state (column 4):")
    for i, (value, p) in enumerate(zip(lam, T[:, 4])):
        print(f"  -> state {i} (lambda={value:+.3f}): {p:.4f}")


def main():
    rng = np.random.default_rng(77)
    moments(rng)
    downhill(rng)
    markov_column(rng)


if __name__ == "__main__":
    main()
