"""File formats: deterministic JSON documents and the trajectory CSV.

Floats are emitted with %.17g so every float64 survives a round trip
through the standard json parser bit-exactly, and two runs with the same
inputs produce byte-identical files. Writes go through a temp file in the
target directory followed by os.replace, so readers never observe a
half-written document.
"""

from __future__ import annotations

import json
import os
import tempfile
from hashlib import sha256

import numpy as np

from .cooling import CoolingConfig, StepResult, Trajectory
from .errors import ValidationError
from .gqsp import AngleSequence
from .signfun import FourierPolynomial

__all__ = [
    "FORMAT_VERSION",
    "CSV_COLUMNS",
    "to_json",
    "canonical_hash",
    "write_text_atomic",
    "write_json",
    "read_json",
    "matrix_document",
    "matrix_from_document",
    "polynomial_document",
    "polynomial_from_document",
    "angles_document",
    "angles_from_document",
    "config_document",
    "trajectory_document",
    "run_record",
    "certification_document",
    "trajectory_csv_text",
    "write_trajectory_csv",
]

FORMAT_VERSION = 1

CSV_COLUMNS = (
    "trial",
    "step",
    "energy_estimate",
    "true_energy",
    "ground_overlap",
    "leakage_weight",
    "queries_eiH",
    "queries_UA",
    "success",
)


def _fmt_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite value {x}")
    text = "%.17g" % x
    # keep the token a float so parsing preserves type and the sign of zero
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def to_json(obj) -> str:
    """Serialize dicts/lists/scalars with %.17g floats, insertion order."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    raise ValidationError(f"cannot serialize {type(obj).__name__}")


def canonical_hash(obj) -> str:
    """sha256 of the serialized document with sorted keys (order-insensitive)."""

    def sort_keys(x):
        if isinstance(x, dict):
            return {k: sort_keys(x[k]) for k in sorted(x)}
        if isinstance(x, (list, tuple)):
            return [sort_keys(v) for v in x]
        return x

    return sha256(to_json(sort_keys(obj)).encode()).hexdigest()


def write_text_atomic(path: str, text: str):
    """Write via a sibling temp file and rename over the target."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, doc):
    write_text_atomic(path, to_json(doc) + "\n")


def read_json(path: str):
    with open(path) as handle:
        return json.load(handle)


def _complex_pairs(values) -> list:
    out = []
    for z in np.asarray(values, dtype=complex).ravel():
        out.append([float(z.real), float(z.imag)])
    return out


def _pairs_to_complex(pairs, count: int, what: str) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.shape != (count, 2):
        raise ValidationError(f"{what} must be {count} [re, im] pairs, got {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def matrix_document(M) -> dict:
    """Row-major [re, im] pairs with an explicit dimension."""
    arr = M.entries if hasattr(M, "entries") else np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"matrix document needs a square matrix, got {arr.shape}")
    return {"dim": int(arr.shape[0]), "entries": _complex_pairs(arr)}


def matrix_from_document(doc: dict) -> np.ndarray:
    dim = int(doc["dim"])
    flat = _pairs_to_complex(doc["entries"], dim * dim, "matrix entries")
    return flat.reshape(dim, dim)


def polynomial_document(S: FourierPolynomial) -> dict:
    """Coefficients ascending from power -k."""
    return {
        "epsilon": S.epsilon,
        "delta": S.delta,
        "k": int(S.k),
        "m": int(S.m),
        "degree": int(S.degree),
        "coefficients": _complex_pairs(S.coeffs),
    }


def polynomial_from_document(doc: dict) -> FourierPolynomial:
    k, m = int(doc["k"]), int(doc["m"])
    coeffs = _pairs_to_complex(doc["coefficients"], k + m + 1, "coefficients")
    eps = doc.get("epsilon")
    delta = doc.get("delta")
    return FourierPolynomial(
        coeffs,
        k,
        m,
        None if eps is None else float(eps),
        None if delta is None else float(delta),
    )


def angles_document(angles: AngleSequence) -> dict:
    return {
        "theta": [float(x) for x in angles.theta],
        "phi": [float(x) for x in angles.phi],
        "lambda": float(angles.lam),
        "k": int(angles.k),
        "m": int(angles.m),
    }


def angles_from_document(doc: dict) -> AngleSequence:
    return AngleSequence(
        np.asarray(doc["theta"], dtype=np.float64),
        np.asarray(doc["phi"], dtype=np.float64),
        float(doc["lambda"]),
        k=int(doc["k"]),
        m=int(doc["m"]),
    )


def config_document(config: CoolingConfig) -> dict:
    return {
        "epsilon": float(config.epsilon),
        "steps": int(config.steps),
        "delta": float(config.delta),
        "mode": config.mode,
        "margin": float(config.margin),
    }


def _step_document(step: StepResult) -> dict:
    return {
        "step": int(step.step),
        "bin_index": int(step.bin_index),
        "energy_estimate": float(step.energy_estimate),
        "true_energy": float(step.true_energy),
        "ground_overlap": float(step.ground_overlap),
        "leakage_weight": float(step.leakage_weight),
        "queries_eiH": int(step.queries_eiH),
        "queries_UA": int(step.queries_UA),
        "leak_event": bool(step.leak_event),
    }


def trajectory_document(traj: Trajectory) -> dict:
    return {
        "initial_energy": float(traj.initial_energy),
        "initial_ground_overlap": float(traj.initial_ground_overlap),
        "final_bin": int(traj.final_bin),
        "final_energy_estimate": float(traj.final_energy_estimate),
        "final_true_energy": float(traj.final_true_energy),
        "final_ground_overlap": float(traj.final_ground_overlap),
        "leak_events": int(traj.leak_events),
        "success": bool(traj.success),
        "steps": [_step_document(s) for s in traj.steps],
    }


def run_record(config: CoolingConfig, seed: int, H, A, trajectories, source=None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "run_record",
        "seed": int(seed),
        "trials": len(trajectories),
        "config": config_document(config),
        "hamiltonian": matrix_document(H),
        "perturbation": matrix_document(A),
        "trajectories": [trajectory_document(t) for t in trajectories],
    }
    hashed = {"config": doc["config"], "seed": doc["seed"], "trials": doc["trials"]}
    if source is not None:
        doc["source"] = source
        hashed["source"] = source
    doc["config_hash"] = canonical_hash(hashed)
    return doc


def certification_document(
    S: FourierPolynomial,
    max_abs: float | None = None,
    band_error: float | None = None,
) -> dict:
    """Provenance of a certified sign polynomial (bounds it was checked to)."""
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "certification",
        "epsilon": S.epsilon,
        "delta": S.delta,
        "degree": int(S.degree),
        "polynomial": polynomial_document(S),
    }
    if max_abs is not None:
        doc["max_abs"] = float(max_abs)
    if band_error is not None:
        doc["band_error"] = float(band_error)
    return doc


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return _fmt_float(float(value))


def trajectory_csv_text(trajectories, config: CoolingConfig) -> str:
    """One row per (trial, step); success repeats the trial's flag."""
    lines = [
        f"# dyncool-trajectories v{FORMAT_VERSION} epsilon={_fmt_float(config.epsilon)}"
        f" delta={_fmt_float(config.delta)} steps={config.steps} mode={config.mode}",
        ",".join(CSV_COLUMNS),
    ]
    for trial, traj in enumerate(trajectories):
        for s in traj.steps:
            row = (
                trial,
                s.step,
                s.energy_estimate,
                s.true_energy,
                s.ground_overlap,
                s.leakage_weight,
                s.queries_eiH,
                s.queries_UA,
                traj.success,
            )
            lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_trajectory_csv(path: str, trajectories, config: CoolingConfig):
    write_text_atomic(path, trajectory_csv_text(trajectories, config))
