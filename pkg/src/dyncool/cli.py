"""Command-line front end: run, certify, gqsp, signpoly.

Determinism contract: everything random is drawn from named substreams of
the user's seed (setup from default_rng(seed), trial t from
default_rng((seed, t))), and output files contain no timestamps, so a rerun
with the same config and seed is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .cooling import CoolingConfig, StoppingRule, run
from .dyson import effective_error, leakage, sample_gue
from .errors import (
    CertificationError,
    DyncoolError,
    ResourceError,
    ValidationError,
)
from .gqsp import assemble_and_extract, synthesize_angles
from .operators import (
    HermitianOperator,
    Projector,
    check_subnormalized,
    spectral_norm,
)
from .signfun import SIGN_GRID_POINTS, eval_fourier, fourier_sign
from .serialization import (
    angles_document,
    canonical_hash,
    certification_document,
    matrix_from_document,
    polynomial_document,
    polynomial_from_document,
    read_json,
    run_record,
    to_json,
    trajectory_csv_text,
    write_json,
    write_text_atomic,
)

__all__ = [
    "main",
    "generate_hamiltonian",
    "generate_perturbation",
    "run_experiment",
]

MAX_SITES = 12

_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def _require(doc: dict, key: str):
    if key not in doc:
        raise ValidationError(f"config is missing required key {key!r}")
    return doc[key]


def _site_product(ops: dict, sites: int) -> np.ndarray:
    out = np.eye(1)
    for i in range(sites):
        out = np.kron(out, ops.get(i, np.eye(2)))
    return out


def _tfim_matrix(sites: int, coupling: float, field: float) -> np.ndarray:
    """-J sum Z_i Z_{i+1} - h sum X_i on an open chain."""
    if sites < 2:
        raise ValidationError(f"chain needs at least 2 sites, got {sites}")
    if sites > MAX_SITES:
        raise ResourceError(f"chain of {sites} sites exceeds the {MAX_SITES}-site cap")
    dim = 2**sites
    H = np.zeros((dim, dim))
    for i in range(sites - 1):
        H -= coupling * _site_product({i: _PAULI_Z, i + 1: _PAULI_Z}, sites)
    for i in range(sites):
        H -= field * _site_product({i: _PAULI_X}, sites)
    return H


def generate_hamiltonian(source: dict, rng: np.random.Generator) -> np.ndarray:
    """Build the system Hamiltonian from its config block.

    random:  Gaussian Hermitian draw rescaled to spectral norm 1.
    tfim:    transverse-field Ising chain, rescaled only if its norm
             exceeds 1 (weak couplings keep their physical scale).
    file:    matrix document from disk, rejected unless already
             subnormalized.
    """
    kind = _require(source, "type")
    if kind == "random":
        dim = int(_require(source, "dim"))
        mat = sample_gue(rng, dim)
        return mat / spectral_norm(mat)
    if kind == "tfim":
        H = _tfim_matrix(
            int(_require(source, "sites")),
            float(source.get("coupling", 1.0)),
            float(source.get("field", 1.0)),
        )
        return H / max(1.0, spectral_norm(H))
    if kind == "file":
        mat = matrix_from_document(read_json(_require(source, "path")))
        check_subnormalized(HermitianOperator(mat), "hamiltonian file")
        return mat
    raise ValidationError(f"unknown hamiltonian type {kind!r}")


def generate_perturbation(source: dict, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Build the coupling operator; norms above 1 are scaled back to 1."""
    kind = _require(source, "type")
    if kind == "gue":
        mat = sample_gue(rng, dim)
    elif kind == "file":
        mat = matrix_from_document(read_json(_require(source, "path")))
        if mat.shape != (dim, dim):
            raise ValidationError(
                f"perturbation shape {mat.shape} does not match dimension {dim}"
            )
        mat = (mat + mat.conj().T) / 2.0
    elif kind == "zero":
        return np.zeros((dim, dim))
    else:
        raise ValidationError(f"unknown perturbation type {kind!r}")
    return mat / max(1.0, spectral_norm(mat))


def run_experiment(H, A, config: CoolingConfig, seed: int, trials: int, stopping=None):
    """Run ``trials`` independent trajectories on per-trial substreams."""
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}")
    return [
        run(H, A, config, np.random.default_rng((seed, t)), stopping=stopping)
        for t in range(trials)
    ]


def _parse_run_config(doc: dict):
    config = CoolingConfig(
        epsilon=float(_require(doc, "epsilon")),
        steps=int(_require(doc, "steps")),
        delta=None if doc.get("delta") is None else float(doc["delta"]),
        mode=doc.get("mode", "exact_spectral"),
        margin=float(doc.get("margin", 1e-6)),
    )
    target = doc.get("target_estimate")
    stopping = None if target is None else StoppingRule(float(target))
    return config, stopping


def cmd_run(args) -> int:
    doc = read_json(args.config)
    seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
    trials = args.trials if args.trials is not None else int(doc.get("trials", 1))
    config, stopping = _parse_run_config(doc)

    setup_rng = np.random.default_rng(seed)
    H = generate_hamiltonian(_require(doc, "hamiltonian"), setup_rng)
    A = generate_perturbation(
        doc.get("perturbation", {"type": "zero"}), H.shape[0], setup_rng
    )
    trajectories = run_experiment(H, A, config, seed, trials, stopping)

    source = {k: doc[k] for k in sorted(doc)}
    source["seed"] = seed
    source["trials"] = trials
    if args.format == "csv":
        text = trajectory_csv_text(trajectories, config)
    else:
        text = to_json(run_record(config, seed, H, A, trajectories, source)) + "\n"

    if args.out is None:
        sys.stdout.write(text)
    else:
        write_text_atomic(args.out, text)

    success = np.mean([t.success for t in trajectories])
    overlap = np.mean([t.final_ground_overlap for t in trajectories])
    estimate = np.mean([t.final_energy_estimate for t in trajectories])
    print(
        f"run: trials={trials} steps={config.steps} mode={config.mode} "
        f"success={success:.4f} final_overlap={overlap:.4f} "
        f"final_estimate={estimate:.4f} config_hash={canonical_hash(source)[:12]}",
        file=sys.stderr if args.out is None else sys.stdout,
    )
    return 0


def _sign_bounds(S) -> tuple[float, float]:
    grid = np.linspace(-np.pi, np.pi, SIGN_GRID_POINTS)
    vals = eval_fourier(S, grid).real
    band = (np.abs(grid) >= S.epsilon / 2.0) & (np.abs(grid) <= np.pi - S.epsilon / 2.0)
    max_abs = float(np.max(np.abs(vals)))
    band_error = float(np.max(np.abs(vals[band] - np.sign(grid[band]))))
    return max_abs, band_error


def _random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(raw)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _laurent_sum(P, U: np.ndarray) -> np.ndarray:
    dim = U.shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    Ud = U.conj().T
    for idx, a in enumerate(P.coeffs):
        n = idx - P.k
        power = np.linalg.matrix_power(U if n >= 0 else Ud, abs(n))
        acc += a * power
    return acc


def cmd_signpoly(args) -> int:
    S = fourier_sign(args.epsilon, args.delta)
    max_abs, band_error = _sign_bounds(S)
    print(
        f"signpoly: epsilon={args.epsilon} delta={args.delta} degree={S.degree} "
        f"max_abs={max_abs:.9f} band_error={band_error:.3e}"
    )
    if args.out is not None:
        write_json(args.out, certification_document(S, max_abs, band_error))
        print(f"wrote {args.out}")
    return 0


def cmd_gqsp(args) -> int:
    if args.poly is not None:
        doc = read_json(args.poly)
        # accept a bare polynomial document or one nested in a certification
        P = polynomial_from_document(doc.get("polynomial", doc))
    elif args.epsilon is not None and args.delta is not None:
        P = fourier_sign(args.epsilon, args.delta)
    else:
        raise ValidationError("gqsp needs either --poly or both --epsilon and --delta")

    angles, pair, scale = synthesize_angles(P, margin=args.margin)
    rng = np.random.default_rng(args.seed)
    U = _random_unitary(rng, args.check_dim)
    result = assemble_and_extract(angles, U)
    residual = spectral_norm(result.block - scale * _laurent_sum(P, U))
    print(
        f"gqsp: k={angles.k} m={angles.m} scale={scale:.12f} "
        f"peel_residual={angles.peel_residual:.3e} "
        f"completion_residual={pair.identity_residual:.3e} "
        f"block_residual={residual:.3e} (dim {args.check_dim}) "
        f"queries: U={result.cu_applications} U_dag={result.cu_dag_applications}"
    )
    if args.out is not None:
        write_json(
            args.out,
            {
                "format_version": 1,
                "kind": "gqsp_angles",
                "margin": float(args.margin),
                "scale": float(scale),
                "peel_residual": float(angles.peel_residual),
                "polynomial": polynomial_document(P),
                "angles": angles_document(angles),
            },
        )
        print(f"wrote {args.out}")
    if residual > 1e-7:
        print(f"gqsp: FAIL block residual {residual:.3e} > 1e-07", file=sys.stderr)
        return 1
    return 0


def _certify_checks(epsilons, deltas, seed):
    """Yield (name, passed, detail) for every certification target."""
    rng = np.random.default_rng(seed)
    polys = []
    for eps in epsilons:
        for delta in deltas:
            name = f"sign epsilon={eps} delta={delta}"
            try:
                S = fourier_sign(eps, delta)
                max_abs, band_error = _sign_bounds(S)
                polys.append(S)
                yield name, True, (
                    f"degree={S.degree} max_abs={max_abs:.9f} "
                    f"band_error={band_error:.3e}"
                )
            except DyncoolError as exc:
                yield name, False, str(exc)

    for S in polys:
        name = f"gqsp round trip epsilon={S.epsilon} delta={S.delta}"
        try:
            angles, pair, scale = synthesize_angles(S, margin=1e-6)
            U = _random_unitary(rng, 4)
            block = assemble_and_extract(angles, U).block
            residual = spectral_norm(block - scale * _laurent_sum(S, U))
            ok = residual <= 1e-7
            yield name, ok, f"block_residual={residual:.3e}"
        except DyncoolError as exc:
            yield name, False, str(exc)

    for dim in (4, 8):
        for delta in (0.25, 0.04):
            basis = _random_unitary(rng, dim)[:, : dim // 2]
            P = Projector(basis @ basis.conj().T)
            A = sample_gue(rng, dim)
            A = A / max(1.0, spectral_norm(A))
            leak = leakage(A, P, delta)
            err = effective_error(A, P, delta)
            yield (
                f"two-sector leakage dim={dim} delta={delta}",
                leak <= delta,
                f"{leak:.3e} <= {delta}",
            )
            yield (
                f"two-sector effective evolution dim={dim} delta={delta}",
                err <= delta,
                f"{err:.3e} <= {delta}",
            )


def cmd_certify(args) -> int:
    checks = []
    for name, passed, detail in _certify_checks(args.epsilon, args.delta, args.seed):
        print(f"[{'ok' if passed else 'FAIL'}] {name}: {detail}")
        checks.append({"name": name, "passed": passed, "detail": detail})
    n_pass = sum(c["passed"] for c in checks)
    all_pass = n_pass == len(checks)
    print(f"certification: {n_pass}/{len(checks)} passed")
    if args.out is not None:
        write_json(
            args.out,
            {
                "format_version": 1,
                "kind": "certification_report",
                "seed": int(args.seed),
                "passed": all_pass,
                "checks": checks,
            },
        )
        print(f"wrote {args.out}")
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyncool",
        description="Simulate and certify dissipative ground-state cooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate cooling trajectories from a config file")
    p.add_argument("--config", required=True, help="JSON experiment description")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--trials", type=int, default=None, help="override trial count")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "structured"), default="csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("certify", help="run the certification suite")
    p.add_argument("--epsilon", type=float, nargs="*", default=[0.3, 0.1])
    p.add_argument("--delta", type=float, nargs="*", default=[0.1, 0.01])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write a JSON report here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("gqsp", help="synthesize rotation angles for a polynomial")
    p.add_argument("--poly", default=None, help="polynomial document (JSON)")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--margin", type=float, default=1e-6)
    p.add_argument("--check-dim", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the angle document here")
    p.set_defaults(func=cmd_gqsp)

    p = sub.add_parser("signpoly", help="build and certify a sign polynomial")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", default=None, help="write the certification here")
    p.set_defaults(func=cmd_signpoly)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return 1
    except DyncoolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
