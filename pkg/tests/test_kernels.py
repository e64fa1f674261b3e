import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcomplexity import _kernels_py as py
from qcomplexity import kernels

compiled = pytest.importorskip("qcomplexity._kernels")


def test_backend_selected():
    forced = os.environ.get("QCOMPLEXITY_PURE_PYTHON", "") not in ("", "0")
    assert kernels.BACKEND == ("python" if forced else "compiled")


def test_env_forces_fallback():
    code = "from qcomplexity import kernels; print(kernels.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], env={"QCOMPLEXITY_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True
    )
    assert out.stdout.strip() == "python"


@given(st.integers(1, 12), st.integers(1, 40), st.sampled_from([1.0, 2.0]), st.integers(0, 2**31))
def test_row_sums_bit_identical_for_p1_p2(rows, cols, p, seed):
    M = np.random.default_rng(seed).standard_normal((rows, cols))
    assert np.array_equal(compiled.row_power_sums(M, p), py.row_power_sums(M, p))


@given(st.integers(1, 12), st.integers(1, 40), st.sampled_from([0.5, 1.5, 3.0, 7.0]), st.integers(0, 2**31))
def test_row_sums_close_for_general_p(rows, cols, p, seed):
    M = np.random.default_rng(seed).standard_normal((rows, cols))
    a, b = compiled.row_power_sums(M, p), py.row_power_sums(M, p)
    assert np.abs(a - b).max() <= 1e-13 * np.abs(b).max()


@given(st.integers(1, 12), st.integers(1, 6), st.integers(0, 2**31))
def test_exact_sweep_bit_identical(m, c, seed):
    F = np.random.default_rng(seed).standard_normal((m, c))
    total = 1 << (m - 1)
    start = total // 3
    count = total - start
    assert np.array_equal(compiled.sup_abs_exact(F, start, count), py.sup_abs_exact(F, start, count))


@given(st.integers(1, 150), st.integers(1, 5), st.integers(1, 64), st.integers(0, 2**31))
def test_word_sweep_bit_identical(m, c, draws, seed):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((m, c))
    words = rng.integers(0, 2**64, size=(draws, -(-m // 64)), dtype=np.uint64)
    assert np.array_equal(compiled.sup_abs_words(F, words), py.sup_abs_words(F, words))


def test_sign_convention():
    F = np.array([[1.0], [2.0], [4.0]])
    # index k: bit i set means eps_i = -1; last sign pinned to +1
    got = py.sup_abs_exact(F, 0, 4)
    assert got.tolist() == [7.0, 5.0, 3.0, 1.0]
    assert compiled.sup_abs_exact(F, 0, 4).tolist() == got.tolist()
    words = np.array([[0b101], [0b000]], dtype=np.uint64)
    assert compiled.sup_abs_words(F, words).tolist() == [abs(-1 + 2 - 4), 7.0]


def test_fallback_reproduces_experiment(experiments_dir):
    import json

    from qcomplexity.estimator import run_experiment

    cfg_path = experiments_dir / "hst_cnot_2q_z_m8.json"
    code = (
        "import json, sys; from qcomplexity.estimator import run_experiment; "
        "from qcomplexity import kernels; assert kernels.BACKEND == 'python'; "
        f"print(json.dumps(run_experiment(json.load(open({str(cfg_path)!r}))).to_dict()))"
    )
    env = dict(os.environ, QCOMPLEXITY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    py_rows = json.loads(out.stdout)["rows"]
    c_rows = run_experiment(json.loads(cfg_path.read_text())).to_dict()["rows"]
    assert len(py_rows) == len(c_rows)
    for a, b in zip(py_rows, c_rows):
        assert a["variant"] == b["variant"] and a["satisfied"] == b["satisfied"]
        assert a["empirical"] == b["empirical"]  # sign kernels agree bit for bit
        for key in ("resource", "k", "bound"):
            assert abs(a[key] - b[key]) <= 1e-12 * max(1.0, abs(b[key]))
