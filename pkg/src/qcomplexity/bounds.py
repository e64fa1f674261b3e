"""Rademacher-complexity upper bounds for norm-constrained circuit classes.

All bounds have the shape ``resource * width_factor * rate(m) * K`` where

* ``rate(m) = sqrt(min(p*, 8 n_0)) / sqrt(m)`` for ``1 <= p <= 2`` and
  ``sqrt(p*) / m^{1/p}`` for ``2 < p < inf``;
* ``K = ||alpha||_p max_i ||f(x_i)||_{p*}`` (identity components dropped for
  the unital variants);
* the width factor depends on the variant, with exponent
  ``e = max(1/p*, 1/q)`` and ``N_i = 4^{n_i} - 1``:

  ==================  ============================================
  single              ``4^{n_1 e}``
  single_unital       ``N_1^e``
  depth_mu, depth_nu  ``4^{(n_1 + ... + n_l) e}``
  ``*_unital``        ``prod_i N_i^e``
  depth_gamma         ``4^{n_l e} prod_{i<l} 4^{n_i / p*}``
  depth_gamma_unital  ``N_l^e prod_{i<l} N_i^{1/p*}``
  ==================  ============================================

  ``depth_nu`` bounds use ``nu^l`` as the resource term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import ASSERT_TOL, PauliVec
from .errors import ValidationError
from .norms import lp_norm

__all__ = [
    "VARIANTS",
    "UNITAL_VARIANTS",
    "KFactor",
    "BoundRequest",
    "holder_conjugate",
    "k_factor",
    "rad_bound",
    "rate_factor",
    "width_factor",
    "massart_bound",
]

VARIANTS = (
    "single",
    "single_unital",
    "depth_nu",
    "depth_nu_unital",
    "depth_mu",
    "depth_mu_unital",
    "depth_gamma",
    "depth_gamma_unital",
)
UNITAL_VARIANTS = frozenset(v for v in VARIANTS if v.endswith("_unital"))


def holder_conjugate(p) -> float:
    p = float(p)
    if not p >= 1:
        raise ValidationError(f"Holder conjugate needs p >= 1, got {p}")
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _inv(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


@dataclass(frozen=True)
class KFactor:
    value: float
    kind: str = "plain"

    def __post_init__(self):
        if self.kind not in ("plain", "hat"):
            raise ValidationError(f"unknown K kind {self.kind!r}")
        if not self.value >= 0:
            raise ValidationError(f"K must be nonnegative, got {self.value}")


def k_factor(S: Sequence[PauliVec], alpha: PauliVec, p, hat: bool = False) -> KFactor:
    """``||alpha||_p * max_i ||f_i||_{p*}``, identity entries dropped when ``hat``."""
    if not S:
        raise ValidationError("K needs at least one sample")
    ps = holder_conjugate(p)
    if hat:
        if abs(alpha.entries[0]) > ASSERT_TOL:
            raise ValidationError("hat K requires a traceless observable")
        a, fs = alpha.hat, [f.hat for f in S]
    else:
        a, fs = alpha.entries, [f.entries for f in S]
    value = lp_norm(a, p) * max(lp_norm(f, ps) for f in fs)
    return KFactor(value, "hat" if hat else "plain")


@dataclass(frozen=True)
class BoundRequest:
    """Parameters of one bound evaluation.

    ``widths`` is ``(n_l, ..., n_1, n_0)``; single-channel variants take
    ``(n_1, n_0)``.  ``resource`` is mu, nu or gamma according to the variant.
    """

    variant: str
    p: float
    q: float
    resource: float
    widths: tuple[int, ...]
    m: int
    traceless: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown bound variant {self.variant!r}; choose from {VARIANTS}")
        p, q = float(self.p), float(self.q)
        if not (1 <= p < math.inf):
            raise ValidationError(f"bounds require 1 <= p < inf, got p={p}")
        if not q > 0:
            raise ValidationError(f"q must be > 0, got {q}")
        widths = tuple(int(n) for n in self.widths)
        if len(widths) < 2 or any(n < 1 for n in widths):
            raise ValidationError(f"widths must list at least n_1 and n_0 (all >= 1), got {widths}")
        if self.variant.startswith("single") and len(widths) != 2:
            raise ValidationError(f"variant {self.variant} takes widths (n_1, n_0), got {widths}")
        if int(self.m) < 1:
            raise ValidationError(f"sample count must be >= 1, got {self.m}")
        if not self.resource >= 0:
            raise ValidationError(f"resource value must be nonnegative, got {self.resource}")
        if self.variant in UNITAL_VARIANTS and not self.traceless:
            raise ValidationError(f"variant {self.variant} requires a traceless observable")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "m", int(self.m))

    @property
    def depth(self) -> int:
        return len(self.widths) - 1

    @property
    def n0(self) -> int:
        return self.widths[-1]

    @property
    def hat(self) -> bool:
        return self.variant in UNITAL_VARIANTS


def rate_factor(p: float, n0: int, m: int) -> float:
    ps = holder_conjugate(p)
    if p <= 2:
        return math.sqrt(min(ps, 8 * n0)) / math.sqrt(m)
    return math.sqrt(ps) / m ** (1.0 / p)


def width_factor(variant: str, p: float, q: float, widths: Sequence[int]) -> float:
    inv_ps = _inv(holder_conjugate(p))
    e = max(inv_ps, _inv(float(q)))
    layers = list(widths[:-1])  # n_l, ..., n_1
    unital = variant in UNITAL_VARIANTS

    def base(n):
        return 4.0**n - 1.0 if unital else 4.0**n

    if variant.startswith("single") or variant.startswith("depth_mu") or variant.startswith("depth_nu"):
        if not unital:
            return 4.0 ** (sum(layers) * e)
        return math.prod(base(n) ** e for n in layers)
    # path norm: outermost layer uses e, the others 1/p*
    outer, inner = layers[0], layers[1:]
    return base(outer) ** e * math.prod(base(n) ** inv_ps for n in inner)


def rad_bound(req: BoundRequest, k: KFactor) -> float:
    if (k.kind == "hat") != req.hat:
        raise ValidationError(f"variant {req.variant} needs a {'hat' if req.hat else 'plain'} K factor")
    resource = req.resource ** req.depth if req.variant.startswith("depth_nu") else req.resource
    return resource * width_factor(req.variant, req.p, req.q, req.widths) * rate_factor(req.p, req.n0, req.m) * k.value


def massart_bound(A) -> float:
    """Finite-class bound ``max ||v - mean||_2 sqrt(2 log |A'|) / m``.

    ``A`` holds one length-``m`` vector per hypothesis.  It is symmetrised to
    ``A' = A u (-A)`` (duplicates removed) first, so the result dominates the
    absolute-value Rademacher average.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] == 0:
        raise ValidationError("Massart bound needs a nonempty set of equal-length vectors")
    m = A.shape[1]
    sym = np.unique(np.concatenate([A, -A]), axis=0)
    if sym.shape[0] == 1:
        return 0.0
    centered = sym - sym.mean(axis=0)
    radius = float(np.sqrt((centered**2).sum(axis=1)).max())
    return radius * math.sqrt(2.0 * math.log(sym.shape[0])) / m
