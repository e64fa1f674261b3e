"""JSON formats for circuits, observables, experiment configs and reports.

Circuit file::

    {"layers": [{"gates": [{"name": "T", "params": [], "targets": [0]}],
                 "width_in": 1, "width_out": 1}]}

A layer may instead carry ``"kraus"`` or ``"unitary"`` (acting on the whole
register, the only way to change width), and a gate may carry ``"kraus"`` or
``"unitary"`` with ``"targets"`` in place of ``"name"``.  ``"width"`` is
shorthand for equal ``width_in``/``width_out``.  Complex matrices are nested
arrays whose entries are ``[re, im]`` pairs or plain reals.

A gate given as a bare string names a catalog gate: a one-qubit gate is
applied to every qubit of the layer, a ``k``-qubit gate in a ``k``-qubit
layer to all qubits in order.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping

import numpy as np

from .channels import (
    GATES,
    DensePTM,
    PauliVec,
    canonical_gate_name,
    compose_ptm,
    embed_ptm,
    identity_ptm,
    observable_vec,
    ptm_from_kraus,
    ptm_from_unitary,
    ptm_named,
)
from .errors import ValidationError
from .measures import LayeredCircuit
from .pauli import PauliIndex, pauli_matrix

SCHEMA_PTM = "qcomplexity/ptm@1"
SCHEMA_REPORT = "qcomplexity/experiment-report@1"
SCHEMA_RESULT = "qcomplexity/result@1"

__all__ = [
    "SCHEMA_PTM",
    "SCHEMA_REPORT",
    "SCHEMA_RESULT",
    "decode_matrix",
    "encode_matrix",
    "parse_float",
    "format_float",
    "gate_ptm",
    "layer_ptm",
    "circuit_from_dict",
    "load_circuit",
    "observable_from_spec",
    "ptm_to_dict",
    "dumps",
    "load_json",
]


def parse_float(x) -> float:
    """Accept numbers and the strings ``"inf"``/``"infinity"``."""
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity", "+infinity"):
            return math.inf
        try:
            return float(s)
        except ValueError:
            raise ValidationError(f"not a number: {x!r}") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(f"not a number: {x!r}")
    return float(x)


def format_float(x: float):
    """JSON value for a float: shortest round-trip repr, ``"inf"`` for infinity."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def decode_matrix(data) -> np.ndarray:
    try:
        rows = [[complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in row] for row in data]
        return np.array(rows, dtype=complex)
    except (TypeError, IndexError, ValueError):
        raise ValidationError("matrix must be a nested list of numbers or [re, im] pairs") from None


def encode_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _raw_channel_ptm(entry: Mapping[str, Any]) -> DensePTM:
    if "unitary" in entry:
        return ptm_from_unitary(decode_matrix(entry["unitary"]))
    return ptm_from_kraus([decode_matrix(k) for k in entry["kraus"]])


def gate_ptm(gate, width: int, params_env: Mapping[str, float] | None = None) -> DensePTM:
    """PTM of one gate entry inside a ``width``-qubit layer."""
    if isinstance(gate, str):
        key = canonical_gate_name(gate)
        k, n_params = GATES[key]
        if n_params:
            raise ValidationError(f"gate {key} needs parameters; use the object form")
        if k == 1:
            single = ptm_named(key)
            total = identity_ptm(width)
            for q in range(width):
                total = compose_ptm(embed_ptm(single, [q], width), total)
            return total
        if k != width:
            raise ValidationError(f"gate {key} acts on {k} qubits; give explicit targets in a {width}-qubit layer")
        return ptm_named(key, (), list(range(k)), width)
    if not isinstance(gate, Mapping):
        raise ValidationError(f"gate entry must be a string or object, got {gate!r}")
    targets = gate.get("targets")
    if "unitary" in gate or "kraus" in gate:
        sub = _raw_channel_ptm(gate)
        return embed_ptm(sub, targets if targets is not None else list(range(sub.n_in)), width)
    params = []
    for x in gate.get("params", []):
        if isinstance(x, str) and params_env is not None and x in params_env:
            params.append(params_env[x])
        elif isinstance(x, str) and x.lower() not in ("inf", "-inf"):
            raise ValidationError(f"unbound parameter {x!r}")
        else:
            params.append(parse_float(x))
    name = gate.get("name")
    if name is None:
        raise ValidationError(f"gate entry needs a name, unitary or kraus: {gate!r}")
    if targets is None:
        targets = list(range(GATES[canonical_gate_name(name)][0]))
    return ptm_named(name, params, targets, width)


def layer_ptm(layer, params_env=None) -> DensePTM:
    if not isinstance(layer, Mapping):
        raise ValidationError("each layer must be an object")
    w_in = layer.get("width_in", layer.get("width"))
    w_out = layer.get("width_out", layer.get("width", w_in))
    if "unitary" in layer or "kraus" in layer:
        M = _raw_channel_ptm(layer)
        if (w_in is not None and M.n_in != w_in) or (w_out is not None and M.n_out != w_out):
            raise ValidationError(f"layer matrices map {M.n_in} -> {M.n_out} qubits, declared {w_in} -> {w_out}")
        return M
    if w_in is None:
        raise ValidationError("a gate layer needs width_in (or width)")
    if w_out != w_in:
        raise ValidationError("width-changing layers must be given as a whole-layer kraus set")
    total = identity_ptm(int(w_in))
    for gate in layer.get("gates", []):
        total = compose_ptm(gate_ptm(gate, int(w_in), params_env), total)
    return total


def circuit_from_dict(data, params_env=None) -> LayeredCircuit:
    if isinstance(data, Mapping):
        layers = data.get("layers")
    else:
        layers = data
    if not layers:
        raise ValidationError("circuit needs a nonempty 'layers' list")
    return LayeredCircuit(tuple(layer_ptm(L, params_env) for L in layers))


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def load_circuit(path) -> LayeredCircuit:
    return circuit_from_dict(load_json(path))


def observable_from_spec(spec, n: int | None = None) -> PauliVec:
    """Observable from a Pauli label (``"ZI"``), ``{label: coeff}`` or ``{"matrix": ...}``."""
    if isinstance(spec, str):
        spec = {spec: 1.0}
    if isinstance(spec, Mapping) and "matrix" in spec:
        return observable_vec(decode_matrix(spec["matrix"]), n)
    if not isinstance(spec, Mapping) or not spec:
        raise ValidationError(f"cannot interpret observable {spec!r}")
    labels = list(spec)
    width = len(labels[0])
    if any(len(lbl) != width for lbl in labels):
        raise ValidationError("observable Pauli labels must share a length")
    H = sum(parse_float(c) * pauli_matrix(PauliIndex.from_label(lbl)) for lbl, c in spec.items())
    return observable_vec(H, n)


def ptm_to_dict(M: DensePTM) -> dict:
    return {
        "schema": SCHEMA_PTM,
        "n_in": M.n_in,
        "n_out": M.n_out,
        "entries": [[float(x) for x in row] for row in M.entries],
    }


def dumps(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, shortest round-trip floats."""
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
