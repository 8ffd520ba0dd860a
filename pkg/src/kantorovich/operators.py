"""Sampling Kantorovich series, generalized sampling series and causal prediction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import DEFAULT_TRUNCATION, KernelError, Truncation, choose_radius, window

__all__ = [
    "OperatorParams", "SeriesEvaluation", "CausalPrediction", "CausalityError",
    "lattice_argument", "kantorovich_series", "kantorovich_eval", "kantorovich_grid",
    "generalized_sampling_eval", "predict_causal",
]

# cap on lattice points added to reach constant end pieces
_EXTENSION_CAP = 1 << 20


class CausalityError(ValueError):
    """The kernel/lattice combination cannot predict from past means only."""


@dataclass(frozen=True)
class OperatorParams:
    w: float
    truncation: Truncation = DEFAULT_TRUNCATION
    lattice_tol: float = 1e-9

    def __post_init__(self):
        if not (self.w > 0 and math.isfinite(self.w)):
            raise ValueError("w must be a positive finite number")
        if not (0 < self.lattice_tol <= 1e-6):
            raise ValueError("lattice tolerance must lie in (0, 1e-6]")

    def with_w(self, w):
        return OperatorParams(float(w), self.truncation, self.lattice_tol)


@dataclass(frozen=True)
class SeriesEvaluation:
    value: float
    k_lo: int
    k_hi: int
    radius: int
    tail_bound: float
    integer_lattice: bool
    tail_corrected: bool


def lattice_argument(w, t, tol=1e-9):
    """Return (w t, is_integer); integer arguments are snapped exactly."""
    x = w * t
    n = round(x)
    if abs(x - n) < tol * max(1.0, abs(x)):
        return float(n), True
    return x, False


def _series(kernel, signal, x, w, params, weights):
    if kernel.is_compact:
        k_lo, k_hi = window(kernel, x, 0)
        ks = np.arange(k_lo, k_hi + 1)
        value = float(np.sum(kernel(x - ks) * weights(ks))) if ks.size else 0.0
        return value, k_lo, k_hi, 0, 0.0, False

    radius, bound = choose_radius(kernel, params.truncation, weighted=True)
    k_lo, k_hi = window(kernel, x, radius)
    left_c, right_c = signal.constant_ends
    corrected = False
    tails = None
    if (left_c is not None or right_c is not None) and kernel.tail_sums(x, k_lo, k_hi) is not None:
        if signal.breakpoints:
            lo = min(k_lo, math.floor(signal.breakpoints[0] * w))
            hi = max(k_hi, math.ceil(signal.breakpoints[-1] * w))
        else:
            lo, hi = k_lo, k_hi
        if hi - lo <= _EXTENSION_CAP:
            k_lo, k_hi = lo, hi
            tails = kernel.tail_sums(x, k_lo, k_hi)
    ks = np.arange(k_lo, k_hi + 1)
    value = float(np.sum(kernel(x - ks) * weights(ks)))
    if tails is not None:
        uncorrected = 0
        if left_c is not None:
            value += left_c * tails[0]
        else:
            uncorrected += 1
        if right_c is not None:
            value += right_c * tails[1]
        else:
            uncorrected += 1
        corrected = True
        bound = 0.0 if uncorrected == 0 else signal.sup_norm * kernel.abs_tail_bound(radius)
    else:
        bound = signal.sup_norm * bound
    return value, k_lo, k_hi, radius, bound, corrected


def kantorovich_series(kernel, signal, t, params):
    """Evaluate (S_w f)(t) = sum_k chi(wt - k) [w int_{k/w}^{(k+1)/w} f] with bookkeeping."""
    w = params.w
    x, is_int = lattice_argument(w, t, params.lattice_tol)
    if not kernel.is_compact and kernel.support.exponent <= 1.0:
        raise KernelError("kernel tail is not summable (decay exponent <= 1)")
    value, k_lo, k_hi, radius, bound, corrected = _series(
        kernel, signal, x, w, params, lambda ks: signal.cell_means(ks, w))
    return SeriesEvaluation(value, k_lo, k_hi, radius, bound, is_int, corrected)


def kantorovich_eval(kernel, signal, t, params):
    """(S_w f)(t)."""
    return kantorovich_series(kernel, signal, t, params).value


def kantorovich_grid(kernel, signal, grid, params):
    """Elementwise :func:`kantorovich_eval` over ``grid``."""
    return [kantorovich_eval(kernel, signal, float(t), params) for t in grid]


def generalized_sampling_eval(kernel, signal, t, params):
    """(G_w f)(t) = sum_k f(k/w) chi(wt - k), using declared values at jumps."""
    w = params.w
    x, _ = lattice_argument(w, t, params.lattice_tol)
    value, *_ = _series(kernel, signal, x, w, params,
                        lambda ks: np.atleast_1d(signal(np.asarray(ks, dtype=float) / w)))
    return value


@dataclass(frozen=True)
class CausalPrediction:
    value: float
    k_lo: int
    k_hi: int
    causal: bool

    @property
    def used_indices(self):
        return range(self.k_lo, self.k_hi + 1)


def predict_causal(kernel, signal, t, params):
    """(S_w f)(t) for a kernel supported in (0, inf), using means from before t only.

    Kernels supported in [1, inf) work for every w; kernels whose support
    reaches into (0, 1) need wt to be an integer.
    """
    if not kernel.is_compact:
        raise CausalityError(f"{kernel.name}: causal prediction needs a compactly supported kernel")
    lo = kernel.support.lo
    if lo <= 0.0:
        raise CausalityError(f"{kernel.name}: support [{lo:g}, ...] meets (-inf, 0]")
    x, is_int = lattice_argument(params.w, t, params.lattice_tol)
    if lo < 1.0 and not is_int:
        raise CausalityError("support meets (0, 1): wt must be an integer")
    ev = kantorovich_series(kernel, signal, t, params)
    causal = ev.k_hi < x
    if not causal:
        raise CausalityError(f"lattice index {ev.k_hi} reaches time t={t!r}")
    return CausalPrediction(ev.value, ev.k_lo, ev.k_hi, causal)
