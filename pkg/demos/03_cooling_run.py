#!/usr/bin/env python3
"""Cool a random Hamiltonian toward its ground state and watch the energy."""

import numpy as np

from dyncool import CoolingConfig, HermitianOperator, run, sample_gue

TRIALS = 200
STEPS = 16
EPSILON = 0.25
SEED = 6


def main():
    setup = np.random.default_rng(SEED)
    H = sample_gue(setup, 8)
    H = HermitianOperator(H / np.linalg.norm(H, 2))
    A = sample_gue(setup, 8)
    A = A / max(1.0, np.linalg.norm(A, 2))

    config = CoolingConfig(epsilon=EPSILON, steps=STEPS)
    trajectories = [
        run(H, A, config, np.random.default_rng((SEED, t))) for t in range(TRIALS)
    ]

    ground = np.linalg.eigvalsh(H.entries)[0]
    print(f"dim 8 random H, ground energy {ground:.4f}, "
          f"{TRIALS} trajectories of {STEPS} steps at eps={EPSILON}")

    energies = np.array([[s.true_energy for s in t.steps] for t in trajectories])
    overlaps = np.array([[s.ground_overlap for s in t.steps] for t in trajectories])
    print(f"\n{'step':>5} {'mean energy':>12} {'mean overlap':>13}")
    init_e = np.mean([t.initial_energy for t in trajectories])
    init_o = np.mean([t.initial_ground_overlap for t in trajectories])
    print(f"{'init':>5} {init_e:>12.4f} {init_o:>13.4f}")
    for s in range(STEPS):
        print(f"{s:>5} {energies[:, s].mean():>12.4f} {overlaps[:, s].mean():>13.4f}")

    success = np.mean([t.success for t in trajectories])
    final_q = trajectories[0].steps[-1]
    print(f"\nzero-leak fraction: {success:.3f}")
    print(f"queries per trajectory: {final_q.queries_eiH} evolution, "
          f"{final_q.queries_UA} perturbation")


if __name__ == "__main__":
    main()
