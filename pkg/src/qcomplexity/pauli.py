"""Pauli-string indexing and explicit Pauli operator matrices.

Digits follow ``0 <-> I, 1 <-> X, 2 <-> Y, 3 <-> Z``.  Qubit 0 is the most
significant digit of the linear index and the leftmost Kronecker factor, so
``PauliIndex.from_label("XZ").linear == 1 * 4 + 3``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ResourceLimitError, ValidationError

__all__ = [
    "PAULI_LABELS",
    "PAULIS",
    "PauliIndex",
    "HARD_MAX_QUBITS",
    "check_qubits",
    "pauli_matrix",
    "pauli_stack",
    "pauli_coefficients",
    "qubit_cap",
    "set_qubit_cap",
]

PAULI_LABELS = "IXYZ"

PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
PAULIS.setflags(write=False)

DEFAULT_MAX_QUBITS = 6
HARD_MAX_QUBITS = 8

_cap = int(os.environ.get("QCOMPLEXITY_MAX_QUBITS", DEFAULT_MAX_QUBITS))


def qubit_cap() -> int:
    return _cap


def set_qubit_cap(n: int) -> int:
    """Set the qubit cap used by dense constructions; returns the previous cap."""
    global _cap
    if not 1 <= n <= HARD_MAX_QUBITS:
        raise ResourceLimitError(f"qubit cap must lie in [1, {HARD_MAX_QUBITS}], got {n}")
    previous, _cap = _cap, int(n)
    return previous


def check_qubits(n: int) -> None:
    if n > min(_cap, HARD_MAX_QUBITS):
        raise ResourceLimitError(f"{n} qubits exceeds the configured cap of {_cap}")


@dataclass(frozen=True)
class PauliIndex:
    digits: tuple[int, ...]

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        if not digits:
            raise ValidationError("a Pauli index needs at least one qubit")
        if any(d not in (0, 1, 2, 3) for d in digits):
            raise ValidationError(f"Pauli digits must be in {{0,1,2,3}}, got {digits}")
        object.__setattr__(self, "digits", digits)

    @property
    def n(self) -> int:
        return len(self.digits)

    @property
    def linear(self) -> int:
        return reduce(lambda acc, d: 4 * acc + d, self.digits, 0)

    @property
    def label(self) -> str:
        return "".join(PAULI_LABELS[d] for d in self.digits)

    @classmethod
    def from_linear(cls, k: int, n: int) -> "PauliIndex":
        if not 0 <= k < 4**n:
            raise ValidationError(f"linear index {k} out of range for {n} qubits")
        digits = []
        for _ in range(n):
            k, d = divmod(k, 4)
            digits.append(d)
        return cls(tuple(reversed(digits)))

    @classmethod
    def from_label(cls, label: str) -> "PauliIndex":
        try:
            return cls(tuple(PAULI_LABELS.index(ch) for ch in label.upper()))
        except ValueError:
            raise ValidationError(f"invalid Pauli string {label!r}") from None

    def __str__(self) -> str:
        return self.label


def pauli_matrix(idx: PauliIndex | str) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of a Pauli string (Kronecker product in digit order)."""
    if isinstance(idx, str):
        idx = PauliIndex.from_label(idx)
    check_qubits(idx.n)
    return reduce(np.kron, (PAULIS[d] for d in idx.digits))


def _masks(k: np.ndarray, n: int):
    """Bit masks (qubit 0 = MSB) of X-support, Z-support and the Y count."""
    xmask = np.zeros_like(k)
    zmask = np.zeros_like(k)
    ycount = np.zeros_like(k)
    for q in range(n):
        d = (k >> (2 * (n - 1 - q))) & 3
        bit = 1 << (n - 1 - q)
        xmask |= np.where((d == 1) | (d == 2), bit, 0)
        zmask |= np.where((d == 2) | (d == 3), bit, 0)
        ycount += d == 2
    return xmask, zmask, ycount


def pauli_stack(indices, n: int) -> np.ndarray:
    """Matrices of several Pauli strings given by linear index, shape ``(K, 2^n, 2^n)``.

    Uses the monomial form ``P[c ^ x, c] = i^{#Y} (-1)^{|z & c|}`` instead of
    Kronecker products.
    """
    check_qubits(n)
    k = np.asarray(indices, dtype=np.int64).reshape(-1)
    d = 2**n
    xmask, zmask, ycount = _masks(k, n)
    cols = np.arange(d, dtype=np.int64)
    parity = np.zeros((k.size, d), dtype=np.int64)
    anded = zmask[:, None] & cols[None, :]
    for q in range(n):
        parity ^= (anded >> q) & 1
    phase = (1j) ** ycount
    values = phase[:, None] * (1 - 2 * parity)
    out = np.zeros((k.size, d, d), dtype=complex)
    rows = cols[None, :] ^ xmask[:, None]
    out[np.arange(k.size)[:, None], rows, cols[None, :]] = values
    return out


def pauli_coefficients(ops: np.ndarray, n: int) -> np.ndarray:
    """``Tr[P_z A]`` for every Pauli string ``z``, batched over leading axes.

    ``ops`` has shape ``(..., 2^n, 2^n)``; the result has shape ``(..., 4^n)``
    in linear Pauli order.  Contracts one qubit at a time, costing
    ``O(n 4^n)`` per operator.
    """
    ops = np.asarray(ops, dtype=complex)
    lead = ops.shape[:-2]
    t = ops.reshape((-1,) + (2,) * (2 * n))
    # Tr[P A] = sum_{r,c} P[c, r] A[r, c].  Before step q the layout is
    # (K, d_0..d_{q-1}, r_q..r_{n-1}, c_q..c_{n-1}): r_q at 1+q, c_q at 1+n.
    for q in range(n):
        t = np.moveaxis(t, (1 + q, 1 + n), (-2, -1))
        t = np.einsum("...rc,kcr->...k", t, PAULIS)
        t = np.moveaxis(t, -1, 1 + q)
    return t.reshape(lead + (4**n,))
