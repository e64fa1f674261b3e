"""Pauli-basis representation matrices of channels and Pauli vectors.

For a channel ``Phi`` from ``n_in`` to ``n_out`` qubits the representation
matrix is ``M[z, x] = 2^{-n_out} Tr[P_z Phi(P_x)]``.  Observables are stored
as ``alpha_z = 2^{-n} Tr[P_z H]`` and states as ``f_x = Tr[P_x rho]`` (no
normalisation), so that for equal widths ``Tr[Phi(rho) H] = alpha . (M f)``.
A layer changing the width from ``n_{i-1}`` to ``n_i`` rescales the
propagated state vector by ``2^{n_i - n_{i-1}}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PreconditionError, ResourceLimitError, ValidationError
from .pauli import check_qubits, pauli_coefficients, pauli_stack, qubit_cap

VALIDATION_TOL = 1e-8
ASSERT_TOL = 1e-10
# construction round-off below this is set to exact zero; quasi-norms (p < 1)
# would otherwise amplify 1e-17 residue to ~1e-9
ZERO_SNAP = 1e-14

__all__ = [
    "DensePTM",
    "ModPTM",
    "PauliVec",
    "GATES",
    "canonical_gate_name",
    "gate_kraus",
    "ptm_from_unitary",
    "ptm_from_kraus",
    "ptm_named",
    "compose_ptm",
    "tensor_ptm",
    "embed_ptm",
    "identity_ptm",
    "is_unital",
    "modified_ptm",
    "is_clifford_ptm",
    "observable_vec",
    "state_vec",
    "state_vec_from_features",
    "ENCODINGS",
    "expectation",
]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensePTM:
    """Real ``4^n_out x 4^n_in`` representation matrix; rows are output Paulis."""

    entries: np.ndarray
    n_in: int
    n_out: int

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.shape != (4**self.n_out, 4**self.n_in):
            raise ValidationError(
                f"PTM shape {entries.shape} does not match n_in={self.n_in}, n_out={self.n_out}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other: "DensePTM") -> "DensePTM":
        return compose_ptm(self, other)

    def __repr__(self):
        return f"DensePTM(n_in={self.n_in}, n_out={self.n_out})"


@dataclass(frozen=True, eq=False)
class ModPTM:
    """Bottom-right block of a unital PTM with the identity row and column removed."""

    entries: np.ndarray
    n_in: int
    n_out: int

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.shape != (4**self.n_out - 1, 4**self.n_in - 1):
            raise ValidationError(f"modified PTM has inconsistent shape {entries.shape}")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True, eq=False)
class PauliVec:
    entries: np.ndarray
    kind: str
    n: int = field(default=-1)

    def __post_init__(self):
        entries = _frozen(self.entries)
        if self.kind not in ("observable", "state"):
            raise ValidationError(f"unknown PauliVec kind {self.kind!r}")
        n = round(math.log(entries.size, 4)) if entries.size > 0 else -1
        if entries.ndim != 1 or n < 1 or 4**n != entries.size:
            raise ValidationError(f"Pauli vector length {entries.size} is not a power of 4")
        if self.n not in (-1, n):
            raise ValidationError(f"Pauli vector length {entries.size} does not match n={self.n}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "n", n)

    @property
    def hat(self) -> np.ndarray:
        """Entries with the identity component dropped."""
        return self.entries[1:]


# --------------------------------------------------------------------------
# construction


def _check_square_dims(mat, what):
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2:
        raise ValidationError(f"{what} must be a matrix")
    return mat


def _qubits_of(dim, what):
    n = int(round(math.log2(dim))) if dim > 0 else -1
    if n < 1 or 2**n != dim:
        raise ValidationError(f"{what} dimension {dim} is not a power of two")
    return n


def _ptm_columns(apply, n_in, n_out, chunk=256):
    """Assemble a PTM from ``apply(P_stack) -> Phi(P_stack)`` in column chunks."""
    check_qubits(max(n_in, n_out))
    cols = []
    for start in range(0, 4**n_in, chunk):
        idx = np.arange(start, min(start + chunk, 4**n_in))
        images = apply(pauli_stack(idx, n_in))
        coeffs = pauli_coefficients(images, n_out) / 2**n_out
        if np.abs(coeffs.imag).max(initial=0.0) > ASSERT_TOL:
            raise ValidationError("channel image has non-real Pauli coefficients (not Hermiticity preserving)")
        cols.append(coeffs.real)
    M = np.concatenate(cols, axis=0).T
    M[np.abs(M) < ZERO_SNAP] = 0.0
    return M


def ptm_from_unitary(U, n: int | None = None) -> DensePTM:
    U = _check_square_dims(U, "unitary")
    n_q = _qubits_of(U.shape[0], "unitary")
    if n is not None and n != n_q:
        raise ValidationError(f"unitary acts on {n_q} qubits, not {n}")
    if U.shape[0] != U.shape[1]:
        raise ValidationError("unitary must be square")
    check_qubits(n_q)
    if np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > VALIDATION_TOL:
        raise ValidationError("matrix is not unitary within 1e-8")
    Ud = U.conj().T
    entries = _ptm_columns(lambda P: U @ P @ Ud, n_q, n_q)
    return DensePTM(entries, n_q, n_q)


def ptm_from_kraus(ks: Sequence, n_in: int | None = None, n_out: int | None = None) -> DensePTM:
    ks = [_check_square_dims(k, "Kraus operator") for k in ks]
    if not ks:
        raise ValidationError("empty Kraus set")
    shape = ks[0].shape
    if any(k.shape != shape for k in ks):
        raise ValidationError("Kraus operators must share a shape")
    q_out, q_in = _qubits_of(shape[0], "Kraus output"), _qubits_of(shape[1], "Kraus input")
    if (n_in is not None and n_in != q_in) or (n_out is not None and n_out != q_out):
        raise ValidationError(f"Kraus operators map {q_in} -> {q_out} qubits")
    check_qubits(max(q_in, q_out))
    stack = np.array(ks)
    completeness = np.einsum("kab,kac->bc", stack.conj(), stack)
    if np.abs(completeness - np.eye(shape[1])).max() > VALIDATION_TOL:
        raise ValidationError("Kraus set is not trace preserving within 1e-8")
    stack_d = stack.conj().transpose(0, 2, 1)

    def apply(P):
        return np.einsum("kab,jbc,kcd->jad", stack, P, stack_d, optimize=True)

    return DensePTM(_ptm_columns(apply, q_in, q_out), q_in, q_out)


def identity_ptm(n: int) -> DensePTM:
    check_qubits(n)
    return DensePTM(np.eye(4**n), n, n)


def compose_ptm(M2: DensePTM, M1: DensePTM) -> DensePTM:
    """PTM of ``Phi_2 o Phi_1`` (``M1`` applied first)."""
    if M2.n_in != M1.n_out:
        raise ValidationError(f"cannot compose: outer takes {M2.n_in} qubits, inner yields {M1.n_out}")
    return DensePTM(M2.entries @ M1.entries, M1.n_in, M2.n_out)


def tensor_ptm(M1: DensePTM, M2: DensePTM) -> DensePTM:
    """PTM of ``Phi_1 (x) Phi_2``; ``M1`` occupies the leading (most significant) qubits."""
    n_in, n_out = M1.n_in + M2.n_in, M1.n_out + M2.n_out
    if max(n_in, n_out) > qubit_cap():
        raise ResourceLimitError(f"tensor product on {max(n_in, n_out)} qubits exceeds the cap")
    return DensePTM(np.kron(M1.entries, M2.entries), n_in, n_out)


def embed_ptm(M: DensePTM, targets: Sequence[int], width: int) -> DensePTM:
    """Embed a width-preserving PTM on ``targets`` of a ``width``-qubit register."""
    targets = [int(t) for t in targets]
    k = M.n_in
    if M.n_out != k:
        raise ValidationError("only width-preserving gates can be embedded")
    if len(targets) != k:
        raise ValidationError(f"gate acts on {k} qubits but {len(targets)} targets were given")
    if len(set(targets)) != k:
        raise ValidationError(f"target collision in {targets}")
    if any(not 0 <= t < width for t in targets):
        raise ValidationError(f"targets {targets} out of range for width {width}")
    check_qubits(width)
    full = np.kron(M.entries, np.eye(4 ** (width - k))) if width > k else np.array(M.entries)
    rest = [q for q in range(width) if q not in targets]
    # axis a of `full` (per side) holds qubit order[a]
    order = targets + rest
    perm = [order.index(q) for q in range(width)]
    t = full.reshape((4,) * (2 * width))
    t = t.transpose(perm + [width + a for a in perm])
    return DensePTM(t.reshape(4**width, 4**width), width, width)


# --------------------------------------------------------------------------
# gate catalog


def _rot(pauli, theta):
    return math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * pauli


_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_FIXED = {
    "I": np.eye(2, dtype=complex),
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}

# name -> (qubits, number of real parameters)
GATES = {
    **{name: (int(math.log2(u.shape[0])), 0) for name, u in _FIXED.items()},
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "DEPOLARIZING": (1, 1),
    "AMPLITUDE_DAMPING": (1, 1),
}
_ALIASES = {"CX": "CNOT", "DEPOL": "DEPOLARIZING", "AD": "AMPLITUDE_DAMPING"}


def canonical_gate_name(name: str) -> str:
    key = name.upper().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in GATES:
        raise ValidationError(f"unknown gate {name!r}; catalog: {sorted(GATES)}")
    return key


def gate_kraus(name: str, params: Sequence[float] = ()) -> list[np.ndarray]:
    """Kraus operators of a catalog gate (a single operator for unitaries)."""
    key = canonical_gate_name(name)
    params = [float(x) for x in params]
    if len(params) != GATES[key][1]:
        raise ValidationError(f"gate {key} takes {GATES[key][1]} parameter(s), got {len(params)}")
    if key in _FIXED:
        return [_FIXED[key]]
    (theta,) = params
    if key in ("RX", "RY", "RZ"):
        return [_rot({"RX": _X, "RY": _Y, "RZ": _Z}[key], theta)]
    if key == "DEPOLARIZING":
        # rho -> lam rho + (1 - lam) I/2 ; completely positive for lam in [-1/3, 1]
        if not -1 / 3 - 1e-12 <= theta <= 1 + 1e-12:
            raise ValidationError(f"depolarizing parameter {theta} outside [-1/3, 1]")
        w = (1 - theta) / 4
        return [math.sqrt(max(1 - 3 * w, 0.0)) * np.eye(2)] + [math.sqrt(w) * P for P in (_X, _Y, _Z)]
    if not 0.0 <= theta <= 1.0:
        raise ValidationError(f"damping rate {theta} outside [0, 1]")
    return [
        np.array([[1, 0], [0, math.sqrt(1 - theta)]], dtype=complex),
        np.array([[0, math.sqrt(theta)], [0, 0]], dtype=complex),
    ]


def _gate_ptm(key, params):
    ks = gate_kraus(key, params)
    return ptm_from_unitary(ks[0]) if len(ks) == 1 else ptm_from_kraus(ks)


def ptm_named(name: str, params: Sequence[float] = (), targets: Sequence[int] = (0,), width: int = 1) -> DensePTM:
    """PTM of a catalog gate placed on ``targets`` inside a ``width``-qubit layer."""
    key = canonical_gate_name(name)
    return embed_ptm(_gate_ptm(key, tuple(params)), targets, width)


# --------------------------------------------------------------------------
# predicates and derived objects


def is_unital(M: DensePTM, tol: float = ASSERT_TOL) -> bool:
    e = M.entries
    col = e[:, 0].copy()
    row = e[0, :].copy()
    col[0] -= 1.0
    row[0] -= 1.0
    return bool(np.abs(col).max() <= tol and np.abs(row).max() <= tol)


def modified_ptm(M: DensePTM, tol: float = ASSERT_TOL) -> ModPTM:
    e = M.entries
    for label, vec in (("column", e[:, 0]), ("row", e[0, :])):
        dev = vec.copy()
        dev[0] -= 1.0
        worst = int(np.argmax(np.abs(dev)))
        if abs(dev[worst]) > tol:
            where = (worst, 0) if label == "column" else (0, worst)
            raise PreconditionError(
                f"channel is not unital: entry {where} of the identity {label} is {vec[worst]:.6g}"
            )
    return ModPTM(e[1:, 1:], M.n_in, M.n_out)


def is_clifford_ptm(M: DensePTM, tol: float = ASSERT_TOL) -> bool:
    """True iff ``M`` is a signed permutation matrix within ``tol``."""
    e = M.entries
    if e.shape[0] != e.shape[1]:
        return False
    a = np.abs(e)
    ones = np.abs(a - 1.0) <= tol
    zeros = a <= tol
    if not np.all(ones | zeros):
        return False
    return bool(np.all(ones.sum(axis=1) == 1) and np.all(ones.sum(axis=0) == 1))


def observable_vec(H, n: int | None = None) -> PauliVec:
    H = _check_square_dims(H, "observable")
    n_q = _qubits_of(H.shape[0], "observable")
    if n is not None and n != n_q:
        raise ValidationError(f"observable acts on {n_q} qubits, not {n}")
    if np.abs(H - H.conj().T).max(initial=0.0) > VALIDATION_TOL:
        raise ValidationError("observable is not Hermitian within 1e-8")
    check_qubits(n_q)
    coeffs = pauli_coefficients(H, n_q) / 2**n_q
    return PauliVec(coeffs.real, "observable", n_q)


def state_vec(rho) -> PauliVec:
    """State vector ``f_x = Tr[P_x rho]`` of a density matrix."""
    rho = _check_square_dims(rho, "density matrix")
    n_q = _qubits_of(rho.shape[0], "density matrix")
    check_qubits(n_q)
    return PauliVec(pauli_coefficients(rho, n_q).real, "state", n_q)


def _bloch_angle_y(x):
    return np.array([1.0, math.sin(x), 0.0, math.cos(x)])


def _bloch_angle_zy(x):
    # Rz(x) Ry(x) |0>
    return np.array([1.0, math.sin(x) * math.cos(x), math.sin(x) * math.sin(x), math.cos(x)])


def _bloch_basis(x):
    if x not in (0, 1):
        raise ValidationError(f"computational-basis encoding needs bits, got {x}")
    return np.array([1.0, 0.0, 0.0, 1.0 if x == 0 else -1.0])


ENCODINGS = {
    "angle-y": _bloch_angle_y,
    "angle-zy": _bloch_angle_zy,
    "basis": _bloch_basis,
}


def state_vec_from_features(x: Sequence[float], encoding: str = "angle-y") -> PauliVec:
    """Product-state encoding, one qubit per feature.

    ``angle-y`` prepares ``Ry(x_j)|0>``, ``angle-zy`` prepares
    ``Rz(x_j) Ry(x_j)|0>`` and ``basis`` prepares ``|x_j>`` for bits ``x_j``.
    """
    try:
        per_qubit = ENCODINGS[encoding.lower()]
    except KeyError:
        raise ValidationError(f"unknown encoding {encoding!r}; choose from {sorted(ENCODINGS)}") from None
    x = list(x)
    if not x:
        raise ValidationError("feature vector must be nonempty")
    check_qubits(len(x))
    vec = np.ones(1)
    for xj in x:
        vec = np.kron(vec, per_qubit(xj))
    return PauliVec(vec, "state", len(x))


def expectation(alpha: PauliVec, ptms: Sequence[DensePTM], f_in: PauliVec) -> float:
    """``Tr[C(rho) H]`` for the circuit whose layers ``ptms`` are applied in order."""
    f = f_in.entries
    width = f_in.n
    for i, M in enumerate(ptms):
        if M.n_in != width:
            raise ValidationError(f"layer {i + 1} expects {M.n_in} qubits but receives {width}")
        f = M.entries @ f
        if M.n_out != M.n_in:
            f = f * 2.0 ** (M.n_out - M.n_in)
        width = M.n_out
    if alpha.n != width:
        raise ValidationError(f"observable acts on {alpha.n} qubits but the circuit outputs {width}")
    return float(alpha.entries @ f)
