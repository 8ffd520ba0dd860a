"""Jump analysis, error bounds and convergence-rate experiments.

The central object is the jump decomposition: at a fixed time t the series
splits into the series of the auxiliary signal g_t (which is continuous at
t with g_t(t) = 0), a term carried by the jump f(t+0) - f(t-0) through
Psi^- and the kernel value at the fractional part of wt, and the left
limit. Evaluating both sides independently gives an exact equality check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .kernels import (DEFAULT_TRUNCATION, KernelError, MOMENT_RADII, classify_jump_behavior,
                      discrete_moment, psi_minus)
from .operators import OperatorParams, kantorovich_eval, kantorovich_series, lattice_argument
from .signals import modulus_of_continuity

__all__ = [
    "JumpDecomposition", "jump_decompose", "NON_CONVERGENT", "jump_limit_value",
    "ScanRow", "ScanReport", "ScanError", "jump_convergence_scan", "divergence_experiment",
    "ErrorBound", "error_bound", "RateRow", "RateReport", "rate_experiment",
    "half_line_fourier", "fractional_limit",
]


class ScanError(ValueError):
    pass


class _NonConvergent:
    def __repr__(self):
        return "NonConvergent"

    def __str__(self):
        return "NonConvergent"


NON_CONVERGENT = _NonConvergent()


@dataclass(frozen=True)
class JumpDecomposition:
    t: float
    w: float
    integer_case: bool
    floor_wt: int
    frac: float
    psi_minus_at_wt: float
    chi_at_frac: float
    jump: float
    left: float
    g_term: float
    reconstructed: float
    direct: float

    @property
    def defect(self):
        return abs(self.reconstructed - self.direct)


def jump_decompose(kernel, signal, t, params):
    """Split (S_w f)(t) into the g_t series, the jump term and the left limit."""
    x, is_int = lattice_argument(params.w, t, params.lattice_tol)
    left, right = signal.limits(t)
    jump = right - left
    g_term = kantorovich_eval(kernel, signal.shifted_about(t), t, params)
    direct = kantorovich_eval(kernel, signal, t, params)
    fl = math.floor(x)
    trunc = params.truncation
    if is_int:
        frac = 0.0
        psi = psi_minus(kernel, x, trunc)
        chi = float(kernel(0.0))
        recon = g_term + jump * (psi + chi) + left
    else:
        frac = x - fl
        psi = psi_minus(kernel, x, trunc)
        chi = float(kernel(frac))
        recon = g_term + jump * (psi + chi) + left - chi * frac * jump
    return JumpDecomposition(float(t), params.w, is_int, int(fl), frac, psi, chi, jump, left,
                             g_term, recon, direct)


def fractional_limit(kernel, left, right, frac, truncation=DEFAULT_TRUNCATION):
    """Limit of S_w f(t) along w with wt - floor(wt) = frac in (0, 1)."""
    psi = psi_minus(kernel, frac, truncation)
    chi = float(kernel(frac))
    return left + (right - left) * (psi + chi * (1.0 - frac))


def jump_limit_value(kernel, left, right, mode="unrestricted", classification=None,
                     truncation=DEFAULT_TRUNCATION):
    """Predicted limit of S_w f(t) at a jump, or ``NON_CONVERGENT``.

    ``mode`` is ``"integer"`` (wt in Z), ``"unrestricted"`` or a float x in
    (0, 1) selecting the subsequence with fractional part of wt pinned at x.
    """
    if left == right:
        return left
    cls = classification or classify_jump_behavior(kernel, truncation=truncation)
    jump = right - left
    if cls.kind == "Irregular":
        return NON_CONVERGENT
    if cls.kind == "ConstantAlpha":
        return left + cls.alpha * jump
    if mode == "integer":
        alpha0 = psi_minus(kernel, 0.0, truncation)
        return left + (alpha0 + float(kernel(0.0))) * jump
    if isinstance(mode, (int, float)) and not isinstance(mode, bool):
        if not 0.0 < mode < 1.0:
            raise ValueError("fractional mode needs x in (0, 1)")
        return fractional_limit(kernel, left, right, float(mode), truncation)
    return NON_CONVERGENT


def _mode_label(mode):
    return mode if isinstance(mode, str) else f"fractional={mode:g}"


@dataclass(frozen=True)
class ScanRow:
    w: float
    wt: float
    value: float
    reconstructed: float
    distance: float | None
    tail_bound: float


@dataclass
class ScanReport:
    kernel: str
    signal: str
    t: float
    mode: str
    classification: str
    predicted: object
    rows: list = field(default_factory=list)
    tolerance: float = 1e-6
    radius: int = 0

    @property
    def empirical_limit(self):
        return self.rows[-1].value if self.rows else math.nan

    @property
    def converged(self):
        if self.predicted is NON_CONVERGENT or not self.rows:
            return False
        return abs(self.empirical_limit - self.predicted) <= self.tolerance

    @property
    def max_decomposition_defect(self):
        return max(abs(r.value - r.reconstructed) for r in self.rows) if self.rows else 0.0


def _ladder_ws(t, ladder, mode):
    if mode == "integer":
        if t == 0:
            raise ScanError("integer mode at t = 0 is trivial: wt = 0 for every w")
        q = Fraction(t).limit_denominator(10**6).denominator
        return [float(q * int(m)) for m in ladder]
    if mode == "unrestricted":
        return [float(m) for m in ladder]
    x = float(mode)
    if t == 0:
        raise ScanError("fractional mode needs t != 0")
    if t > 0:
        return [(int(m) + x) / t for m in ladder]
    return [(int(m) - x) / (-t) for m in ladder]


def jump_convergence_scan(kernel, signal, t, ladder, mode="unrestricted", params=None,
                          tolerance=1e-6, classification=None):
    """Evaluate S_w f(t) and its jump decomposition along a w ladder."""
    t = float(t)
    if not any(j.t == t for j in signal.jumps()):
        raise ScanError(f"t={t!r} is not a declared discontinuity of {signal.name}")
    base = params or OperatorParams(1.0)
    cls = classification or classify_jump_behavior(kernel, truncation=base.truncation)
    left, right = signal.limits(t)
    predicted = jump_limit_value(kernel, left, right, mode, cls, base.truncation)
    report = ScanReport(kernel.name, signal.name, t, _mode_label(mode), str(cls), predicted,
                        tolerance=tolerance)
    for w in _ladder_ws(t, ladder, mode):
        p = base.with_w(w)
        dec = jump_decompose(kernel, signal, t, p)
        ev = kantorovich_series(kernel, signal, t, p)
        dist = None if predicted is NON_CONVERGENT else abs(dec.direct - predicted)
        report.rows.append(ScanRow(w, w * t, dec.direct, dec.reconstructed, dist, ev.tail_bound))
        report.radius = max(report.radius, ev.radius)
    return report


@dataclass
class DivergenceReport:
    kernel: str
    classification: str
    fracs: tuple
    limits: tuple
    closed_forms: tuple
    difference: float
    scans: list

    @property
    def max_closed_form_gap(self):
        return max(abs(a - b) for a, b in zip(self.limits, self.closed_forms))


def divergence_experiment(kernel, signal, t, ladder, fracs=(0.25, 0.75), params=None):
    """Two fractional-mode scans whose limits differ when the kernel is not null on (0, 1)."""
    scans = [jump_convergence_scan(kernel, signal, t, ladder, x, params) for x in fracs]
    left, right = signal.limits(t)
    trunc = (params or OperatorParams(1.0)).truncation
    closed = tuple(fractional_limit(kernel, left, right, x, trunc) for x in fracs)
    limits = tuple(s.empirical_limit for s in scans)
    return DivergenceReport(kernel.name, scans[0].classification, tuple(fracs), limits, closed,
                            abs(limits[0] - limits[1]), scans)


# ---------------------------------------------------------------------------
# error bound and rates


@dataclass(frozen=True)
class ErrorBound:
    beta: float
    w: float
    omega: float
    omega_exact: bool
    m_beta: float
    m_zero: float
    sup_norm: float
    value: float
    moment_radius: int


def error_bound(kernel, signal, w, beta, radii=MOMENT_RADII, grid=1024, seed=0):
    """omega(f, w^-beta) [m_beta + 2 m_0] + 2^(beta+1) ||f|| m_beta w^-beta, 0 < beta < 1."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    mb = discrete_moment(kernel, float(beta), tuple(radii), grid)
    if mb.diverging:
        raise KernelError(f"m_{beta:g}({kernel.name}) diverges")
    m0 = discrete_moment(kernel, 0.0, tuple(radii), grid)
    scale = w ** (-beta)
    om = modulus_of_continuity(signal, scale, seed=seed)
    value = om.value * (mb.value + 2.0 * m0.value) + 2.0 ** (beta + 1.0) * signal.sup_norm * mb.value * scale
    return ErrorBound(float(beta), float(w), om.value, om.exact, mb.value, m0.value,
                      signal.sup_norm, value, mb.radius)


@dataclass(frozen=True)
class RateRow:
    w: float
    sup_error: float
    bound: float | None
    order: float | None
    tail_bound: float


@dataclass
class RateReport:
    kernel: str
    signal: str
    beta: float | None
    grid: tuple
    rows: list
    fitted_order: float
    bound_threshold: float | None

    @property
    def strictly_decreasing(self):
        errs = [r.sup_error for r in self.rows]
        return all(b < a for a, b in zip(errs, errs[1:]))

    @property
    def bound_ok(self):
        if self.beta is None:
            return None
        return all(r.sup_error <= r.bound for r in self.rows
                   if r.bound is not None and r.w >= self.bound_threshold)


def fit_order(ws, errors):
    """Least-squares slope of -log(error) against log(w) over the top half."""
    ws, errors = np.asarray(ws, float), np.asarray(errors, float)
    half = len(ws) // 2
    ws, errors = ws[half:], errors[half:]
    keep = errors > 0
    if keep.sum() < 2:
        return math.inf
    slope = np.polyfit(np.log(ws[keep]), np.log(errors[keep]), 1)[0]
    return float(-slope)


def rate_experiment(kernel, signal, ladder, grid, beta=None, params=None,
                    radii=MOMENT_RADII, moment_grid=1024, seed=0):
    """Sup-grid error of S_w f along a w ladder, with the beta-bound when requested."""
    if not signal.uniformly_continuous:
        raise ValueError("rate experiments need a uniformly continuous signal")
    base = params or OperatorParams(1.0)
    grid = np.asarray(grid, dtype=float)
    truth = np.asarray(signal(grid), dtype=float)
    rows = []
    prev = None
    for w in ladder:
        p = base.with_w(float(w))
        evs = [kantorovich_series(kernel, signal, float(t), p) for t in grid]
        err = float(np.max(np.abs(np.array([e.value for e in evs]) - truth)))
        tail = max(e.tail_bound for e in evs)
        bound = None
        if beta is not None and w >= 2:
            bound = error_bound(kernel, signal, float(w), beta, radii, moment_grid, seed).value
        order = None
        if prev is not None and prev[1] > 0 and err > 0:
            order = math.log(prev[1] / err) / math.log(float(w) / prev[0])
        rows.append(RateRow(float(w), err, bound, order, tail))
        prev = (float(w), err)
    fitted = fit_order([r.w for r in rows], [r.sup_error for r in rows])
    threshold = 2.0 if beta is not None else None
    return RateReport(kernel.name, signal.name, beta, tuple(grid.tolist()), rows, fitted, threshold)


# ---------------------------------------------------------------------------
# half-line Fourier conditions


def half_line_fourier(kernel, k, side="negative"):
    """int over (-inf, 0) (or (0, inf)) of chi(u) exp(-2 pi i k u) du, compact kernels."""
    if not kernel.is_compact:
        raise KernelError("half-line Fourier integrals are computed for compact kernels only")
    lo, hi = kernel.support.lo, kernel.support.hi
    a, b = (lo, min(hi, 0.0)) if side == "negative" else (max(lo, 0.0), hi)
    if b <= a:
        return 0j
    pts = np.unique(np.concatenate([[a, b], kernel.knots()]))
    pts = pts[(pts >= a) & (pts <= b)]
    v = 2.0 * math.pi * k
    re = im = 0.0
    for c0, c1 in zip(pts[:-1], pts[1:]):
        if v == 0:
            re += integrate.quad(kernel, c0, c1, epsabs=1e-13)[0]
        else:
            re += integrate.quad(kernel, c0, c1, weight="cos", wvar=v, epsabs=1e-13)[0]
            im -= integrate.quad(kernel, c0, c1, weight="sin", wvar=v, epsabs=1e-13)[0]
    return complex(re, im)
