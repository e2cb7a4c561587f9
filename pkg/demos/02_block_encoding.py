#!/usr/bin/env python3
"""Encode a Laurent polynomial of a unitary as the corner block of a circuit."""

import numpy as np

from dyncool import (
    FourierPolynomial,
    assemble_and_extract,
    eval_fourier,
    fourier_sign,
    synthesize_angles,
)


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def laurent_sum(P, U):
    acc = np.zeros_like(U)
    for idx, a in enumerate(P.coeffs):
        n = idx - P.k
        acc += a * np.linalg.matrix_power(U if n >= 0 else U.conj().T, abs(n))
    return acc


def random_polynomial_demo(rng):
    k, m, dim = 3, 5, 4
    coeffs = rng.normal(size=k + m + 1) + 1j * rng.normal(size=k + m + 1)
    probe = np.linspace(-np.pi, np.pi, 2048)
    peak = np.max(np.abs(eval_fourier(FourierPolynomial(coeffs, k, m), probe)))
    P = FourierPolynomial(coeffs * 0.9 / peak, k, m)

    angles, pair, scale = synthesize_angles(P)
    U = random_unitary(rng, dim)
    result = assemble_and_extract(angles, U)
    residual = np.linalg.norm(result.block - scale * laurent_sum(P, U), 2)

    print(f"random Laurent polynomial, k={k}, m={m}, unitary dim {dim}")
    print(f"  completion identity residual: {pair.identity_residual:.3e}")
    print(f"  angle recursion residual:     {angles.peel_residual:.3e}")
    print(f"  block reconstruction error:   {residual:.3e}")
    print(f"  controlled-U uses: {result.cu_applications} forward, "
          f"{result.cu_dag_applications} adjoint")


def sign_polynomial_demo(rng):
    # the production case: the degree-99 sign approximant as a circuit
    S = fourier_sign(0.1, 0.1)
    angles, pair, scale = synthesize_angles(S, margin=1e-6)
    U = random_unitary(rng, 6)
    block = assemble_and_extract(angles, U).block
    residual = np.linalg.norm(block - scale * laurent_sum(S, U), 2)
    print(f"\nsign approximant eps=0.1 delta=0.1 (degree {S.degree}):")
    print(f"  rescale factor {scale:.10f}, block error {residual:.3e}")


def main():
    rng = np.random.default_rng(8)
    random_polynomial_demo(rng)
    sign_polynomial_demo(rng)


if __name__ == "__main__":
    main()
