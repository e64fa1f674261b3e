"""(p, q) group norms of real matrices.

``||M||_{p,q} = ((1/N) sum_i ||M_i||_p^q)^{1/q}`` over the ``N`` rows ``M_i``.
``p`` and ``q`` may be any positive value or ``math.inf``; values below one give
quasi-norms.  Row sums use compensated summation.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import ValidationError

__all__ = ["check_exponent", "lp_norm", "row_norms", "group_norm", "modified_group_norm", "mean_power"]


def check_exponent(p, name="p") -> float:
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a positive number or inf, got {p!r}") from None
    if not p > 0:  # also rejects nan
        raise ValidationError(f"{name} must be > 0, got {p}")
    return p


def _as_matrix(M) -> np.ndarray:
    a = np.asarray(getattr(M, "entries", M), dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.size == 0:
        raise ValidationError("group norm needs a nonempty matrix")
    return np.ascontiguousarray(a)


def row_norms(M, p) -> np.ndarray:
    """l_p norm of every row."""
    p = check_exponent(p)
    a = _as_matrix(M)
    if math.isinf(p):
        return np.abs(a).max(axis=1)
    sums = kernels.row_power_sums(a, p)
    if p == 1.0:
        return sums
    if p == 2.0:
        return np.sqrt(sums)
    return sums ** (1.0 / p)


def lp_norm(v, p) -> float:
    p = check_exponent(p)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size == 0:
        return 0.0
    return float(row_norms(v[None, :], p)[0])


def mean_power(values, q) -> float:
    """``((1/N) sum v^q)^{1/q}`` for nonnegative ``values``; the max at ``q = inf``."""
    q = check_exponent(q, "q")
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValidationError("mean of an empty set")
    if math.isinf(q):
        return float(v.max())
    mean = math.fsum((v**q).tolist()) / v.size
    return mean ** (1.0 / q)


def group_norm(M, p, q) -> float:
    """(p, q) group norm; accepts arrays, ``DensePTM`` and ``ModPTM``."""
    q = check_exponent(q, "q")
    return mean_power(row_norms(M, p), q)


def modified_group_norm(Mhat, p, q) -> float:
    """Group norm of a modified representation matrix (``4^n - 1`` rows).

    Accepts a ``ModPTM`` directly, or a unital ``DensePTM``, whose identity row
    and column are stripped first.
    """
    from .channels import DensePTM, modified_ptm

    if isinstance(Mhat, DensePTM):
        Mhat = modified_ptm(Mhat)
    return group_norm(Mhat, p, q)
