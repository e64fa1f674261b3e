"""Empirical Rademacher complexity of finite circuit families.

``R_S = E_eps (1/m) max_C |sum_i eps_i f_C(x_i)|``.  The exact estimator
enumerates sign vectors with the last sign pinned to ``+1``: the objective is
invariant under ``eps -> -eps``, so half the patterns suffice.  The Monte
Carlo estimator draws signs from Philox4x32-10 (see ``sign_words``).

Both split their work into fixed-size blocks that may run on worker threads.
Blocks are identical whatever the worker count, and the final average uses
``math.fsum`` (correctly rounded, hence order independent), so results are
bit-stable across schedules and backends.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from . import kernels
from .bounds import UNITAL_VARIANTS, VARIANTS, BoundRequest, k_factor, rad_bound
from .channels import ASSERT_TOL, ENCODINGS, PauliVec, is_unital, modified_ptm, state_vec_from_features
from .errors import ResourceLimitError, ValidationError
from .measures import LayeredCircuit, gamma_measure, mu_measure, nu_measure
from .norms import check_exponent, group_norm
from .serialization import (
    SCHEMA_REPORT,
    circuit_from_dict,
    format_float,
    layer_ptm,
    observable_from_spec,
    parse_float,
)

__all__ = [
    "RNG_NAME",
    "FAMILY_CAP",
    "EXACT_CAP",
    "CircuitFamily",
    "FValueTable",
    "RadEstimate",
    "ReportRow",
    "ExperimentReport",
    "enumerate_family",
    "f_value_table",
    "rademacher_exact",
    "rademacher_mc",
    "rademacher",
    "sign_words",
    "family_resource",
    "verify_bounds",
    "run_experiment",
]

RNG_NAME = "philox4x32-10/key=(seed,block)/v1"
FAMILY_CAP = 100_000
EXACT_CAP = 20
EXACT_BLOCK = 1 << 14
MC_BLOCK = 4096
DEFAULT_DRAWS = 100_000


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QCOMPLEXITY_WORKERS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# families


@dataclass(frozen=True, eq=False)
class CircuitFamily:
    members: tuple[LayeredCircuit, ...]
    spec: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValidationError("circuit family is empty")
        shape = members[0].widths
        for c in members[1:]:
            if c.widths != shape:
                raise ValidationError(f"family members disagree on (depth, widths): {shape} vs {c.widths}")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    @property
    def widths(self):
        return self.members[0].widths

    @property
    def depth(self):
        return self.members[0].depth


def _grid_values(values):
    if isinstance(values, Mapping) and "linspace" in values:
        a, b, k = values["linspace"]
        return [float(v) for v in np.linspace(parse_float(a), parse_float(b), int(k))]
    return [parse_float(v) for v in values]


def enumerate_family(spec: Mapping[str, Any], cap: int = FAMILY_CAP) -> CircuitFamily:
    """Build a finite family from a spec.

    ``{"kind": "gateset", "gates": [...], "depth": l, "width": w}``
        every word of ``l`` gate choices, one choice per layer; members are
        ordered lexicographically with layer 1 as the leading symbol.  A
        choice is a gate entry or a list of gate entries forming one layer.
    ``{"kind": "grid", "width": w, "template": [[gates], ...], "grids": {...}}``
        the template layers with named parameters swept over the cartesian
        product of the grids (first grid varies slowest).
    ``{"kind": "explicit", "members": [circuit, ...]}``
        circuits in circuit-file format.
    """
    kind = spec.get("kind", "gateset")
    if kind == "explicit":
        members = spec.get("members", [])
        if len(members) > cap:
            raise ResourceLimitError(f"family of {len(members)} members exceeds the cap {cap}")
        return CircuitFamily(tuple(circuit_from_dict(c) for c in members), spec)
    width = int(spec.get("width", 1))
    if kind == "gateset":
        gates = list(spec.get("gates", []))
        depth = int(spec.get("depth", 1))
        if not gates or depth < 1:
            raise ValidationError("gateset family needs gates and depth >= 1")
        size = len(gates) ** depth
        if size > cap:
            raise ResourceLimitError(f"{len(gates)}^{depth} = {size} members exceeds the cap {cap}")
        choices = []
        for g in gates:
            layer = {"width": width, "gates": g if isinstance(g, list) else [g]}
            choices.append(layer_ptm(layer))
        members = tuple(LayeredCircuit(word) for word in itertools.product(choices, repeat=depth))
        return CircuitFamily(members, spec)
    if kind == "grid":
        template = spec.get("template", [])
        grids = {name: _grid_values(vals) for name, vals in spec.get("grids", {}).items()}
        if not template:
            raise ValidationError("grid family needs a template")
        size = math.prod(len(v) for v in grids.values())
        if size > cap:
            raise ResourceLimitError(f"grid of {size} members exceeds the cap {cap}")
        names = list(grids)
        members = []
        for point in itertools.product(*(grids[n] for n in names)):
            env = dict(zip(names, point))
            layers = []
            for layer in template:
                if isinstance(layer, Mapping):
                    layers.append(layer_ptm(layer, env))
                else:
                    layers.append(layer_ptm({"width": width, "gates": layer}, env))
            members.append(LayeredCircuit(tuple(layers)))
        return CircuitFamily(tuple(members), spec)
    raise ValidationError(f"unknown family kind {kind!r}")


# --------------------------------------------------------------------------
# f-value tables


@dataclass(frozen=True, eq=False)
class FValueTable:
    """``values[i, c] = f_C(x_i)``: rows are samples, columns family members."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValidationError("f-value table must be a nonempty 2-D array")
        v.setflags(write=False)
        object.__setattr__(self, "values", np.ascontiguousarray(v))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def family_size(self) -> int:
        return self.values.shape[1]


def _propagate(c: LayeredCircuit, F: np.ndarray) -> np.ndarray:
    for L in c.layers:
        F = L.entries @ F
        if L.n_out != L.n_in:
            F = F * 2.0 ** (L.n_out - L.n_in)
    return F


def f_value_table(family, S: Sequence[PauliVec], alpha: PauliVec) -> FValueTable:
    members = list(getattr(family, "members", family))
    if not S:
        raise ValidationError("no samples")
    n0, nl = members[0].widths[-1], members[0].widths[0]
    if any(f.n != n0 for f in S):
        raise ValidationError(f"samples must be {n0}-qubit states")
    if alpha.n != nl:
        raise ValidationError(f"observable acts on {alpha.n} qubits but circuits output {nl}")
    Fin = np.stack([f.entries for f in S], axis=1)
    cols = [alpha.entries @ _propagate(c, Fin) for c in members]
    return FValueTable(np.stack(cols, axis=1))


# --------------------------------------------------------------------------
# Rademacher estimates


@dataclass(frozen=True)
class RadEstimate:
    value: float
    method: str
    draws: int | None = None
    stderr: float | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        d = {"value": format_float(self.value), "method": self.method}
        if self.method == "monte-carlo":
            d.update(draws=self.draws, stderr=format_float(self.stderr), seed=self.seed, rng=RNG_NAME)
        return d


def _table(F) -> np.ndarray:
    return F.values if isinstance(F, FValueTable) else FValueTable(F).values


def _run_blocks(fn, blocks, workers):
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def rademacher_exact(F, workers: int | None = None, cap: int = EXACT_CAP) -> RadEstimate:
    V = _table(F)
    m = V.shape[0]
    if m > cap:
        raise ResourceLimitError(f"exact enumeration is capped at m={cap} (got m={m}); use rademacher_mc")
    total = 1 << (m - 1)
    blocks = [(s, min(EXACT_BLOCK, total - s)) for s in range(0, total, EXACT_BLOCK)]
    parts = _run_blocks(lambda b: kernels.sup_abs_exact(V, b[0], b[1]), blocks, workers or default_workers())
    sums = np.concatenate(parts)
    return RadEstimate(math.fsum(sums.tolist()) / total / m, "exact")


def sign_words(seed: int, block: int, count: int, m: int) -> np.ndarray:
    """Random words for ``count`` sign vectors of block ``block``.

    Philox4x32-10 keyed with ``(seed, block)``; counter from zero.  Draw ``d``
    of the block takes ``ceil(m / 64)`` consecutive 64-bit outputs, and bit
    ``i % 64`` of word ``i // 64`` set means ``eps_i = -1``.
    """
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must lie in [0, 2^64), got {seed}")
    width = -(-m // 64)
    bitgen = np.random.Philox(key=np.array([seed, block], dtype=np.uint64))
    return bitgen.random_raw(count * width).reshape(count, width)


def rademacher_mc(F, draws: int = DEFAULT_DRAWS, seed: int = 0, workers: int | None = None) -> RadEstimate:
    V = _table(F)
    m = V.shape[0]
    draws = int(draws)
    if draws < 100:
        raise ValidationError(f"Monte Carlo needs at least 100 draws, got {draws}")
    blocks = [(b, min(MC_BLOCK, draws - b * MC_BLOCK)) for b in range(-(-draws // MC_BLOCK))]

    def run(block):
        b, count = block
        return kernels.sup_abs_words(V, sign_words(seed, b, count, m)) / m

    vals = np.concatenate(_run_blocks(run, blocks, workers or default_workers()))
    mean = math.fsum(vals.tolist()) / draws
    var = math.fsum(((vals - mean) ** 2).tolist()) / (draws - 1)
    return RadEstimate(mean, "monte-carlo", draws, math.sqrt(var / draws), seed)


def rademacher(F, draws=DEFAULT_DRAWS, seed=0, workers=None, method="auto") -> RadEstimate:
    V = _table(F)
    if method == "exact" or (method == "auto" and V.shape[0] <= EXACT_CAP):
        return rademacher_exact(V, workers)
    if method not in ("auto", "mc", "monte-carlo"):
        raise ValidationError(f"unknown estimation method {method!r}")
    return rademacher_mc(V, draws, seed, workers)


# --------------------------------------------------------------------------
# bound verification


def _require_unital(family, whole: bool):
    for idx, c in enumerate(family.members):
        layers = [c.end_to_end()] if whole else c.layers
        for j, L in enumerate(layers):
            if not is_unital(L):
                where = "end-to-end channel" if whole else f"layer {j + 1}"
                raise ValidationError(f"unital variant requested but member {idx} has a non-unital {where}")


def family_resource(family: CircuitFamily, variant: str, p, q) -> float:
    """Largest resource value in the family, so every member satisfies the constraint."""
    if variant in ("single", "single_unital"):
        def value(c):
            M = c.end_to_end()
            return group_norm(modified_ptm(M) if variant == "single_unital" else M, p, q)
    else:
        modified = variant in UNITAL_VARIANTS
        base = variant.removesuffix("_unital")
        fn = {"depth_mu": mu_measure, "depth_nu": nu_measure, "depth_gamma": gamma_measure}[base]
        def value(c):
            return fn(c, p, q, modified=modified)
    return max(value(c) for c in family.members)


@dataclass(frozen=True)
class ReportRow:
    variant: str
    p: float
    q: float
    resource: float
    k: float
    bound: float
    empirical: float
    stderr: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "p": format_float(self.p),
            "q": format_float(self.q),
            "resource": format_float(self.resource),
            "k": format_float(self.k),
            "bound": format_float(self.bound),
            "empirical": format_float(self.empirical),
            "stderr": format_float(self.stderr),
            "satisfied": self.satisfied,
        }


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ReportRow, ...]
    estimate: RadEstimate | None
    m: int
    family_size: int
    widths: tuple[int, ...]
    meta: Mapping[str, Any] = field(default_factory=dict)

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_REPORT,
            **dict(self.meta),
            "m": self.m,
            "family_size": self.family_size,
            "widths": list(self.widths),
            "empirical": self.estimate.to_dict() if self.estimate else None,
            "all_satisfied": self.all_satisfied,
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = ["seed", *ReportRow.__dataclass_fields__]
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({"seed": self.meta.get("seed", ""), **r.to_dict()})
        return buf.getvalue()


def verify_bounds(
    family: CircuitFamily,
    S: Sequence[PauliVec],
    alpha: PauliVec,
    norms: Sequence[tuple[float, float]],
    variants: Sequence[str],
    *,
    draws: int = DEFAULT_DRAWS,
    seed: int = 0,
    workers: int | None = None,
    meta: Mapping[str, Any] | None = None,
) -> ExperimentReport:
    """Compare the empirical complexity of ``family`` against each requested bound.

    A row is satisfied when ``bound >= empirical - 3 * stderr`` (``stderr`` is
    zero for the exact estimator).
    """
    variants = list(variants)
    for v in variants:
        if v not in VARIANTS:
            raise ValidationError(f"unknown bound variant {v!r}")
    unital = [v for v in variants if v in UNITAL_VARIANTS]
    traceless = abs(alpha.entries[0]) <= ASSERT_TOL
    if unital and not traceless:
        raise ValidationError(f"variants {unital} require a traceless observable")
    if "single_unital" in unital:
        _require_unital(family, whole=True)
    if any(v != "single_unital" for v in unital):
        _require_unital(family, whole=False)
    table = f_value_table(family, S, alpha)
    estimate = rademacher(table, draws, seed, workers) if variants else None
    stderr = (estimate.stderr or 0.0) if estimate else 0.0
    w = family.widths
    rows = []
    for p, q in norms:
        p, q = check_exponent(p), check_exponent(q, "q")
        for v in variants:
            widths = (w[0], w[-1]) if v.startswith("single") else w
            resource = family_resource(family, v, p, q)
            k = k_factor(S, alpha, p, hat=v in UNITAL_VARIANTS)
            req = BoundRequest(v, p, q, resource, widths, table.m, traceless=traceless)
            bound = rad_bound(req, k)
            rows.append(
                ReportRow(v, p, q, resource, k.value, bound, estimate.value, stderr, bound >= estimate.value - 3 * stderr)
            )
    return ExperimentReport(tuple(rows), estimate, table.m, len(family), w, dict(meta or {}))


def run_experiment(config: Mapping[str, Any], workers: int | None = None, seed: int | None = None) -> ExperimentReport:
    """Run a full experiment config (see README for the schema)."""
    try:
        family_spec = config["family"]
        samples = config["samples"]
        observable = config["observable"]
    except KeyError as exc:
        raise ValidationError(f"experiment config is missing {exc.args[0]!r}") from None
    encoding = config.get("encoding", "angle-y")
    if encoding.lower() not in ENCODINGS:
        raise ValidationError(f"unknown encoding {encoding!r}")
    m = int(config.get("m", len(samples)))
    if m < 1 or m > len(samples):
        raise ValidationError(f"config asks for m={m} but lists {len(samples)} samples")
    seed = int(config.get("seed", 0) if seed is None else seed)
    draws = int(config.get("draws", DEFAULT_DRAWS))
    norms = [(parse_float(n["p"]), parse_float(n["q"])) for n in config.get("norms", [{"p": 1, "q": "inf"}])]
    variants = list(config.get("variants", []))
    family = enumerate_family(family_spec)
    S = [state_vec_from_features([parse_float(x) for x in s], encoding) for s in samples[:m]]
    alpha = observable_from_spec(observable)
    meta = {
        "name": config.get("name", ""),
        "seed": seed,
        "encoding": encoding,
        "observable": observable,
        "family": family_spec,
    }
    return verify_bounds(family, S, alpha, norms, variants, draws=draws, seed=seed, workers=workers, meta=meta)
