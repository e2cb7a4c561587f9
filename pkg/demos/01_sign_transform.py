#!/usr/bin/env python3
"""Build certified sign approximants and apply one to a small Hamiltonian."""

import numpy as np

from dyncool import apply_spectral, eval_fourier, fourier_sign
from dyncool.operators import HermitianOperator


def certification_table():
    print("sign approximants on the circle (degree and certified errors)")
    print(f"{'eps':>6} {'delta':>8} {'degree':>7} {'max |S|':>12} {'band error':>12}")
    grid = np.linspace(-np.pi, np.pi, 100_001)
    for eps in (0.5, 0.3, 0.1):
        for delta in (0.1, 0.01):
            S = fourier_sign(eps, delta)
            vals = eval_fourier(S, grid).real
            band = (np.abs(grid) >= eps / 2) & (np.abs(grid) <= np.pi - eps / 2)
            band_err = np.max(np.abs(vals[band] - np.sign(grid[band])))
            print(
                f"{eps:>6} {delta:>8} {S.degree:>7} "
                f"{np.max(np.abs(vals)):>12.9f} {band_err:>12.3e}"
            )


def spectral_application():
    # eigenvalues straddling a cutoff at 0.1, all at distance >= eps/2 from it
    lam = np.array([-0.8, -0.35, -0.1, 0.45, 0.7])
    H = HermitianOperator(np.diag(lam))
    S = fourier_sign(0.3, 0.01)
    hsign = apply_spectral(S, H, shift=0.1)
    print("\nspectral application, cutoff 0.1:")
    for value, transformed in zip(lam, np.diag(hsign.entries).real):
        marker = "below" if value < 0.1 else "above"
        print(f"  lambda={value:+.2f} ({marker})  ->  {transformed:+.6f}")


def main():
    certification_table()
    spectral_application()


if __name__ == "__main__":
    main()
