#!/usr/bin/env python3
"""Check the weak-coupling step contracts against their proven bounds."""

import numpy as np

from dyncool import (
    Projector,
    default_time,
    dyson_term,
    effective_error,
    leakage,
    leakage_term_bound,
    per_term_leakage,
    sample_gue,
)


def random_instance(rng, dim):
    A = sample_gue(rng, dim)
    A = A / max(1.0, np.linalg.norm(A, 2))
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    basis = (q * (np.diag(r) / np.abs(np.diag(r))))[:, : dim // 2]
    return A, Projector(basis @ basis.conj().T)


def contract_table(rng):
    print("step contracts on random dim-8 instances (bound is delta)")
    print(f"{'delta':>7} {'leakage':>11} {'effective err':>14} {'step time':>10}")
    for delta in (0.25, 0.09, 0.01):
        A, P = random_instance(rng, 8)
        print(
            f"{delta:>7} {leakage(A, P, delta):>11.3e} "
            f"{effective_error(A, P, delta):>14.3e} {default_time(delta):>10.3f}"
        )


def expansion_table(rng):
    A, P = random_instance(rng, 4)
    delta = 0.04
    print(f"\nexpansion terms at delta={delta}, t={default_time(delta):.3f}:")
    print(f"{'order':>6} {'|term|':>11} {'bound':>11} {'cross block':>12} {'cross bound':>12}")
    comp = np.eye(4) - P.entries
    for order in (1, 2, 3, 4):
        term = dyson_term(A, P, delta, order)
        cross = np.linalg.norm(comp @ term.matrix @ P.entries, 2)
        print(
            f"{order:>6} {np.linalg.norm(term.matrix, 2):>11.3e} {term.bound:>11.3e} "
            f"{cross:>12.3e} {leakage_term_bound(order, term.time, delta):>12.3e}"
        )

    # the first-order cross block carries a pure e^{2is} phase, so its
    # integral vanishes whenever t is a multiple of pi
    print("\nfirst-order cross block at multiples of pi:")
    for mult in (1, 2, 3):
        val = per_term_leakage(A, P, delta, 1, t=mult * np.pi, n_steps=4096)
        print(f"  t = {mult}*pi: {val:.3e}")


def main():
    rng = np.random.default_rng(15)
    contract_table(rng)
    expansion_table(rng)


if __name__ == "__main__":
    main()
