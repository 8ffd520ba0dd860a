"""Bounded piecewise signals with exact one-sided limits and cell means.

A :class:`Signal` is a finite list of breakpoints with one :class:`Piece`
per open interval between them. Pieces are a polynomial (ascending
coefficients in the absolute variable) plus a finite sum of sinusoids, so
means over lattice cells ``[k/w, (k+1)/w]`` have closed forms. The two
unbounded end pieces must have constant polynomial part.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Piece", "Signal", "MeanValue", "JumpPoint", "ModulusValue", "SignalError",
    "constant", "sinusoid", "step", "clamped_ramp", "removable", "piecewise_constant",
    "from_csv", "mean_value", "one_sided_limits", "modulus_of_continuity",
]


class SignalError(ValueError):
    pass


@dataclass(frozen=True)
class Piece:
    """poly(x) + sum_i A_i sin(nu_i x + phase_i) on one interval."""

    poly: tuple = (0.0,)
    sinusoids: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(float(c) for c in self.poly) or (0.0,))
        object.__setattr__(self, "sinusoids", tuple(
            (float(a), float(nu), float(ph)) for a, nu, ph in self.sinusoids if a != 0.0))

    @property
    def is_constant(self):
        return not self.sinusoids and all(c == 0.0 for c in self.poly[1:])

    @property
    def degree(self):
        nz = [i for i, c in enumerate(self.poly) if c != 0.0]
        return nz[-1] if nz else 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.polynomial.polynomial.polyval(x, self.poly)
        for a, nu, ph in self.sinusoids:
            out = out + a * np.sin(nu * x + ph)
        return out

    def plus(self, c):
        poly = list(self.poly)
        poly[0] += c
        return Piece(tuple(poly), self.sinusoids)

    def mean(self, a, b):
        """Mean over [a, b] (vectorized), from closed-form antiderivatives.

        The polynomial part uses (b^(j+1) - a^(j+1)) / ((j+1)(b-a)) expanded
        as sum_i a^i b^(j-i) / (j+1), which avoids the cancellation of
        differencing an antiderivative over a short cell.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = np.full(np.broadcast(a, b).shape, self.poly[0])
        for j, c in enumerate(self.poly[1:], start=1):
            if c == 0.0:
                continue
            acc = np.zeros_like(out)
            for i in range(j + 1):
                acc = acc + a**i * b ** (j - i)
            out = out + c * acc / (j + 1)
        if self.sinusoids:
            mid = 0.5 * (a + b)
            half = 0.5 * (b - a)
            for amp, nu, ph in self.sinusoids:
                # [cos(nu a + ph) - cos(nu b + ph)] / (nu (b - a)) as a product
                out = out + amp * np.sin(nu * mid + ph) * np.sinc(nu * half / np.pi)
        return out

    def bound_on(self, lo, hi):
        """Upper bound of |piece| on [lo, hi] (finite interval) or on a half line."""
        sin_part = sum(abs(a) for a, _, _ in self.sinusoids)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            if not all(c == 0.0 for c in self.poly[1:]):
                raise SignalError("unbounded end piece: only constants and sinusoids may extend to infinity")
            return abs(self.poly[0]) + sin_part
        poly = np.polynomial.Polynomial(self.poly)
        cands = [lo, hi]
        if self.degree >= 2:
            for r in poly.deriv().roots():
                if abs(r.imag) < 1e-12 and lo <= r.real <= hi:
                    cands.append(r.real)
        poly_max = max(abs(poly(c)) for c in cands)
        return float(poly_max) + sin_part


@dataclass(frozen=True)
class JumpPoint:
    t: float
    left: float
    right: float
    value: float

    @property
    def jump(self):
        return self.right - self.left

    @property
    def removable(self):
        return self.left == self.right


@dataclass(frozen=True)
class MeanValue:
    k: int
    w: float
    value: float
    method: str = "exact"


@dataclass(frozen=True)
class ModulusValue:
    delta: float
    value: float
    exact: bool
    samples: int = 0


@dataclass(frozen=True, eq=False)
class Signal:
    """Piecewise closed-form signal.

    ``pieces[i]`` covers the open interval between ``breakpoints[i-1]`` and
    ``breakpoints[i]``. At a breakpoint the value is the override from
    ``point_values`` when present, otherwise the right limit.
    """

    breakpoints: tuple = ()
    pieces: tuple = (Piece(),)
    point_values: tuple = ()
    name: str = "signal"
    modulus: object = None
    method: str = "exact"
    sup_norm: float = field(init=False, default=0.0)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise SignalError("breakpoints must be strictly increasing")
        if len(self.pieces) != len(bps) + 1:
            raise SignalError("need exactly one more piece than breakpoints")
        object.__setattr__(self, "breakpoints", bps)
        pv = tuple(sorted((float(t), float(v)) for t, v in dict(self.point_values).items()))
        for t, _ in pv:
            if t not in bps:
                raise SignalError(f"point value at {t} is not on a breakpoint")
        object.__setattr__(self, "point_values", pv)
        object.__setattr__(self, "_bp_array", np.array(bps))
        edges = (-math.inf,) + bps + (math.inf,)
        bound = max(p.bound_on(lo, hi) for p, lo, hi in zip(self.pieces, edges[:-1], edges[1:]))
        bound = max([bound] + [abs(v) for _, v in pv])
        object.__setattr__(self, "sup_norm", float(bound))

    # evaluation ------------------------------------------------------------
    def piece_index(self, x):
        """Index of the piece whose open interval (or left-closed) contains x."""
        return np.searchsorted(self._bp_array, x, side="right")

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr)
        idx = self.piece_index(flat)
        out = np.empty_like(flat)
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = self.pieces[i](flat[sel])
        for t, v in self.point_values:
            out[flat == t] = v
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def limits(self, t):
        """(f(t-0), f(t+0)) read from the piecewise description."""
        t = float(t)
        right_idx = int(np.searchsorted(self._bp_array, t, side="right"))
        left_idx = int(np.searchsorted(self._bp_array, t, side="left"))
        return float(self.pieces[left_idx](t)), float(self.pieces[right_idx](t))

    def jumps(self):
        """Breakpoints where the signal is discontinuous (jump or removable)."""
        pv = dict(self.point_values)
        out = []
        for i, t in enumerate(self.breakpoints):
            left = float(self.pieces[i](t))
            right = float(self.pieces[i + 1](t))
            value = pv.get(t, right)
            if left != right or value != right:
                out.append(JumpPoint(t, left, right, value))
        return out

    @property
    def uniformly_continuous(self):
        return not self.jumps()

    @property
    def constant_ends(self):
        """(left constant, right constant) of the end pieces, or None for each."""
        first, last = self.pieces[0], self.pieces[-1]
        return (first.poly[0] if first.is_constant else None,
                last.poly[0] if last.is_constant else None)

    # cell means ------------------------------------------------------------
    def interval_mean(self, a, b):
        """Exact means over intervals [a_i, b_i] (arrays), splitting at breakpoints."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        ia = self.piece_index(a)
        ib = np.searchsorted(self._bp_array, b, side="left")
        out = np.empty_like(a)
        whole = ia == ib
        for i in np.unique(ia[whole]):
            sel = whole & (ia == i)
            out[sel] = self.pieces[i].mean(a[sel], b[sel])
        for j in np.flatnonzero(~whole):
            lo, hi = a[j], b[j]
            cuts = [lo] + [c for c in self.breakpoints if lo < c < hi] + [hi]
            total = 0.0
            for c0, c1 in zip(cuts[:-1], cuts[1:]):
                piece = self.pieces[int(self.piece_index(0.5 * (c0 + c1)))]
                total += (c1 - c0) * float(piece.mean(c0, c1))
            out[j] = total / (hi - lo)
        return out

    def cell_means(self, ks, w):
        """w * int_{k/w}^{(k+1)/w} f for an integer array ``ks``."""
        ks = np.asarray(ks, dtype=float)
        return self.interval_mean(ks / w, (ks + 1.0) / w)

    # constructions -----------------------------------------------------------
    def splice(self, t, other):
        """Signal equal to self on (-inf, t) and to ``other`` on [t, inf)."""
        t = float(t)
        bps_l = [b for b in self.breakpoints if b < t]
        pieces_l = list(self.pieces[:len(bps_l) + 1])
        bps_r = [b for b in other.breakpoints if b > t]
        pieces_r = list(other.pieces[len(other.breakpoints) - len(bps_r):])
        pv = {b: v for b, v in self.point_values if b < t}
        pv.update({b: v for b, v in other.point_values if b > t})
        pv[t] = other(t)
        return Signal(tuple(bps_l) + (t,) + tuple(bps_r), tuple(pieces_l) + tuple(pieces_r),
                      tuple(pv.items()), name=f"{self.name}|{other.name}@{t:g}")

    def shifted_about(self, t):
        """The auxiliary g_t: f - f(t-0) left of t, 0 at t, f - f(t+0) right of t."""
        t = float(t)
        left, right = self.limits(t)
        bps = list(self.breakpoints)
        pieces = list(self.pieces)
        if t not in bps:
            i = int(self.piece_index(t))
            bps.insert(i, t)
            pieces.insert(i, pieces[i])
        pos = bps.index(t)
        new_pieces = [p.plus(-left) if i <= pos else p.plus(-right) for i, p in enumerate(pieces)]
        pv = {b: v - (left if b < t else right) for b, v in self.point_values if b != t}
        pv[t] = 0.0
        return Signal(tuple(bps), tuple(new_pieces), tuple(pv.items()), name=f"g_{t:g}[{self.name}]")

    def with_value(self, t, value):
        """Same signal with the value at t overridden (adds a breakpoint if needed)."""
        t = float(t)
        bps = list(self.breakpoints)
        pieces = list(self.pieces)
        if t not in bps:
            i = int(self.piece_index(t))
            bps.insert(i, t)
            pieces.insert(i, pieces[i])
        pv = dict(self.point_values)
        pv[t] = float(value)
        return Signal(tuple(bps), tuple(pieces), tuple(pv.items()), name=self.name)


# ---------------------------------------------------------------------------
# built-in signals


def constant(c):
    c = float(c)
    return Signal((), (Piece((c,)),), name=f"const({c:g})", modulus=lambda d: 0.0)


def sinusoid(amplitude=1.0, frequency=1.0, phase=0.0):
    a, nu = float(amplitude), float(frequency)

    def omega(d):
        return 2.0 * abs(a) * math.sin(min(abs(nu) * d, math.pi) / 2.0)

    name = "sin" if (a, nu, phase) == (1.0, 1.0, 0.0) else f"{a:g}*sin({nu:g}x{phase:+g})"
    return Signal((), (Piece((0.0,), ((a, nu, phase),)),), name=name, modulus=omega)


def step(t=0.0, left=0.0, right=1.0, value=None):
    """Two-level step at t; the value at t defaults to the right level."""
    pv = () if value is None else ((t, value),)
    return Signal((float(t),), (Piece((left,)), Piece((right,))), pv,
                  name=f"step({t:g})")


def clamped_ramp(lo=0.0, hi=1.0):
    """min(max(x, lo), hi): slope 1 between lo and hi."""
    lo, hi = float(lo), float(hi)
    height = hi - lo
    return Signal((lo, hi), (Piece((lo,)), Piece((0.0, 1.0)), Piece((hi,))),
                  name=f"ramp({lo:g},{hi:g})", modulus=lambda d: min(d, height))


def removable(t=math.pi, value=5.0, base=None):
    """``base`` (default sin) with its value at t overridden."""
    base = sinusoid() if base is None else base
    sig = base.with_value(t, value)
    return Signal(sig.breakpoints, sig.pieces, sig.point_values, name=f"{base.name}!{t:g}")


def piecewise_constant(ts, values):
    """Piecewise-constant signal: values[i] on [ts[i], ts[i+1]); the first
    value is held before ts[0] and the last one after ts[-1]."""
    ts = [float(t) for t in ts]
    values = [float(v) for v in values]
    if len(ts) != len(values) or not ts:
        raise SignalError("need matching, non-empty t and value columns")
    pieces = [Piece((values[0],))] + [Piece((v,)) for v in values]
    bps, keep = [], [pieces[0]]
    for t, p in zip(ts, pieces[1:]):
        bps.append(t)
        keep.append(p)
    return Signal(tuple(bps), tuple(keep), name="sampled")


def from_csv(path):
    """Read ``t,value`` rows (header optional) as a piecewise-constant signal."""
    ts, vals = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                t, v = float(row[0]), float(row[1])
            except ValueError:
                if not ts:
                    continue
                raise SignalError(f"bad CSV row {row!r}") from None
            ts.append(t)
            vals.append(v)
    order = np.argsort(ts, kind="stable")
    sig = piecewise_constant(np.asarray(ts)[order], np.asarray(vals)[order])
    return Signal(sig.breakpoints, sig.pieces, name=str(path), method="sampled")


# ---------------------------------------------------------------------------
# operations


def one_sided_limits(signal, t):
    """(f(t-0), f(t+0))."""
    return signal.limits(t)


def mean_value(signal, k, w):
    if w <= 0:
        raise SignalError("w must be positive")
    value = float(signal.cell_means(np.array([k]), w)[0])
    return MeanValue(int(k), float(w), value, signal.method)


def modulus_of_continuity(signal, delta, budget=200_000, seed=0):
    """omega(f, delta) = sup |f(x) - f(y)| over |x - y| <= delta.

    Closed form when the signal carries one; otherwise a lower estimate from
    a dense scan at separation delta plus random pairs with |x - y| <= delta.
    """
    if delta <= 0:
        raise SignalError("delta must be positive")
    if not signal.uniformly_continuous:
        raise SignalError("modulus of continuity needs a uniformly continuous signal")
    if signal.modulus is not None:
        return ModulusValue(delta, float(signal.modulus(delta)), True)
    bps = signal.breakpoints
    freqs = [abs(nu) for p in signal.pieces for _, nu, _ in p.sinusoids if nu]
    period = 2.0 * math.pi / min(freqs) if freqs else 1.0
    lo = (bps[0] if bps else 0.0) - delta - period
    hi = (bps[-1] if bps else 0.0) + delta + period
    rng = np.random.default_rng(seed)
    n_dense = budget // 2
    xs = np.linspace(lo, hi, n_dense)
    best = float(np.max(np.abs(signal(xs + delta) - signal(xs))))
    x = rng.uniform(lo, hi, budget - n_dense)
    h = rng.uniform(-delta, delta, x.size)
    best = max(best, float(np.max(np.abs(signal(x + h) - signal(x)))))
    return ModulusValue(delta, best, False, budget)
