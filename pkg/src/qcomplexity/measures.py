"""Resource measures of layered circuits.

A depth-``l`` circuit is a sequence of layer PTMs ``(Phi_1, ..., Phi_l)``
applied in that order, with widths ``(n_l, ..., n_1, n_0)``.

* ``mu``    product of per-layer group norms,
* ``nu``    generalised ``r``-mean of per-layer group norms,
* ``gamma`` path norm: ``l_p`` aggregate over all Pauli paths, ``q``-averaged
  over output Paulis.

Each has a modified variant computed from the identity-stripped layer
matrices, defined for unital layers only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ASSERT_TOL, DensePTM, compose_ptm, identity_ptm, is_unital, modified_ptm, tensor_ptm
from .errors import PreconditionError, ValidationError
from .norms import check_exponent, group_norm, mean_power

__all__ = [
    "LayeredCircuit",
    "MeasureKind",
    "mu_measure",
    "nu_measure",
    "gamma_per_output",
    "gamma_measure",
    "measure",
    "min_realization_resource",
    "REALIZATION_TOL",
]

REALIZATION_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LayeredCircuit:
    layers: tuple[DensePTM, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValidationError("a layered circuit needs depth >= 1")
        for i in range(1, len(layers)):
            if layers[i].n_in != layers[i - 1].n_out:
                raise ValidationError(
                    f"layer {i + 1} expects {layers[i].n_in} qubits but layer {i} outputs {layers[i - 1].n_out}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def widths(self) -> tuple[int, ...]:
        """``(n_l, ..., n_1, n_0)``."""
        return tuple(L.n_out for L in reversed(self.layers)) + (self.layers[0].n_in,)

    def end_to_end(self) -> DensePTM:
        total = self.layers[0]
        for L in self.layers[1:]:
            total = compose_ptm(L, total)
        return total

    def then(self, outer: "LayeredCircuit") -> "LayeredCircuit":
        """``outer o self``: this circuit's layers first, then ``outer``'s."""
        return LayeredCircuit(self.layers + outer.layers)

    def tensor(self, other: "LayeredCircuit") -> "LayeredCircuit":
        if self.depth != other.depth:
            raise ValidationError("layerwise tensor product needs equal depths")
        return LayeredCircuit(tuple(tensor_ptm(a, b) for a, b in zip(self.layers, other.layers)))

    def is_unital(self, tol=ASSERT_TOL) -> bool:
        return all(is_unital(L, tol) for L in self.layers)

    @classmethod
    def identity(cls, n: int, depth: int = 1) -> "LayeredCircuit":
        return cls((identity_ptm(n),) * depth)


@dataclass(frozen=True)
class MeasureKind:
    variant: str
    modified: bool = False
    r: float = 1.0

    def __post_init__(self):
        if self.variant not in ("mu", "nu", "gamma"):
            raise ValidationError(f"unknown measure {self.variant!r}; choose mu, nu or gamma")
        check_exponent(self.r, "r")


def _layer_matrices(c: LayeredCircuit, modified: bool) -> list[np.ndarray]:
    if not modified:
        return [L.entries for L in c.layers]
    out = []
    for i, L in enumerate(c.layers):
        try:
            out.append(modified_ptm(L).entries)
        except PreconditionError as exc:
            raise PreconditionError(f"layer {i + 1}: {exc}") from None
    return out


def _layer_norms(c, p, q, modified):
    return [group_norm(M, p, q) for M in _layer_matrices(c, modified)]


def mu_measure(c: LayeredCircuit, p, q, modified: bool = False) -> float:
    return math.prod(_layer_norms(c, p, q, modified))


def nu_measure(c: LayeredCircuit, p, q, r=1.0, modified: bool = False) -> float:
    return mean_power(_layer_norms(c, p, q, modified), r)


def gamma_per_output(c: LayeredCircuit, p, modified: bool = False) -> np.ndarray:
    """Path norm ``gamma_p^{(z)}`` for every output Pauli ``z``.

    The sum of ``|product|^p`` over paths ending at ``z`` is the row sum of the
    product of entrywise-powered layer matrices, so this is an iterated
    matrix-vector product rather than a path enumeration.  For ``modified``
    the identity index is excluded and outputs are indexed by ``z != 0``.
    """
    p = check_exponent(p)
    mats = _layer_matrices(c, modified)
    v = np.ones(mats[0].shape[1])
    if math.isinf(p):
        for M in mats:
            v = (np.abs(M) * v[None, :]).max(axis=1)
        return v
    for M in mats:
        v = (np.abs(M) ** p) @ v
    return v ** (1.0 / p)


def gamma_measure(c: LayeredCircuit, p, q, modified: bool = False) -> float:
    return mean_power(gamma_per_output(c, p, modified), q)


def measure(c: LayeredCircuit, kind: MeasureKind, p, q) -> float:
    if kind.variant == "mu":
        return mu_measure(c, p, q, kind.modified)
    if kind.variant == "nu":
        return nu_measure(c, p, q, kind.r, kind.modified)
    return gamma_measure(c, p, q, kind.modified)


def min_realization_resource(target: DensePTM, family, kind: MeasureKind, p, q):
    """Smallest measure over family members realising ``target``, or ``None``.

    Members are scanned in family order; the first minimiser wins ties.  A
    member realises the target when the end-to-end PTMs agree entrywise
    within ``REALIZATION_TOL``.
    """
    members = list(getattr(family, "members", family))
    if not members:
        raise ValidationError("empty circuit family")
    best = None
    for c in members:
        total = c.end_to_end()
        if total.shape != target.shape:
            continue
        if np.abs(total.entries - target.entries).max() > REALIZATION_TOL:
            continue
        value = measure(c, kind, p, q)
        if best is None or value < best:
            best = value
    return best

