import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qcomplexity.errors import ResourceLimitError, ValidationError
from qcomplexity.pauli import (
    PauliIndex,
    check_qubits,
    pauli_coefficients,
    pauli_matrix,
    pauli_stack,
    qubit_cap,
    set_qubit_cap,
)


def test_identity_and_z():
    assert np.array_equal(pauli_matrix(PauliIndex((0,))), np.eye(2))
    assert np.array_equal(pauli_matrix(PauliIndex((3,))), np.diag([1, -1]))


def test_x_kron_z_matches_explicit_product():
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
    assert np.array_equal(pauli_matrix(PauliIndex((1, 3))), expected)
    assert np.array_equal(pauli_matrix("XZ"), oracles.pauli("XZ"))


def test_digit_order_and_labels():
    idx = PauliIndex.from_label("IXZ")
    assert idx.digits == (0, 1, 3)
    assert idx.linear == 0 * 16 + 1 * 4 + 3
    assert PauliIndex.from_linear(idx.linear, 3) == idx
    assert str(idx) == "IXZ"


@pytest.mark.parametrize("bad", [(), (4,), (-1, 0)])
def test_invalid_digits(bad):
    with pytest.raises(ValidationError):
        PauliIndex(bad)


def test_invalid_label_and_linear():
    with pytest.raises(ValidationError):
        PauliIndex.from_label("XQ")
    with pytest.raises(ValidationError):
        PauliIndex.from_linear(16, 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_stack_matches_kronecker(n):
    stack = pauli_stack(np.arange(4**n), n)
    for k, lbl in enumerate(oracles.labels(n)):
        assert np.array_equal(stack[k], oracles.pauli(lbl))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orthogonality_and_involution(n):
    mats = [pauli_matrix(lbl) for lbl in oracles.labels(n)]
    d = 2**n
    for a, b in itertools.product(range(len(mats)), repeat=2):
        tr = np.trace(mats[a] @ mats[b])
        assert abs(tr - (d if a == b else 0)) <= 1e-10
    for M in mats:
        assert np.abs(M @ M - np.eye(d)).max() <= 1e-12
    traces = [abs(np.trace(M)) > 0 for M in mats]
    assert traces.count(True) == 1 and traces[0]


@given(st.integers(1, 3), st.data())
def test_coefficients_match_traces(n, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    A = rng.standard_normal((2**n, 2**n)) + 1j * rng.standard_normal((2**n, 2**n))
    coeffs = pauli_coefficients(A, n)
    ref = [np.trace(oracles.pauli(lbl) @ A) for lbl in oracles.labels(n)]
    assert np.abs(coeffs - ref).max() <= 1e-10


def test_qubit_cap():
    previous = qubit_cap()
    try:
        set_qubit_cap(2)
        with pytest.raises(ResourceLimitError):
            check_qubits(3)
        with pytest.raises(ResourceLimitError):
            pauli_matrix("XXX")
    finally:
        set_qubit_cap(previous)
    with pytest.raises(ResourceLimitError):
        set_qubit_cap(9)
