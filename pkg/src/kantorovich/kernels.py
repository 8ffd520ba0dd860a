"""Approximation kernels for sampling Kantorovich series.

Every kernel family used by the package lives here: the band-limited
sinc-type kernels (Fejér, de la Vallée Poussin, mixed sinc), central
B-splines and the duration-limited compounds built from them, the
discontinuous C2/S/D2 family, and the sigmoidal kernel phi_gamma.

Besides pointwise evaluation a kernel knows how to bound (or sum exactly)
the lattice tails ``sum_{k > K} chi(x - k)`` that unbounded kernels leave
behind after truncation. The lattice functionals built on top of that
(``psi_minus``, ``psi_plus``, ``discrete_moment``, ``validate_kernel``,
``classify_jump_behavior``) are defined at the bottom of the module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

__all__ = [
    "KernelSpec", "CompactSupport", "DecaySupport", "Truncation", "Kernel",
    "make_kernel", "psi_minus", "psi_plus", "lattice_sum", "discrete_moment",
    "MomentEstimate", "validate_kernel", "ValidationReport",
    "classify_jump_behavior", "JumpClass", "fourier_transform", "u_grid",
    "kernel_table",
]

FAMILIES = (
    "fejer", "vallee-poussin", "mixed-sinc", "bspline", "compound-bspline",
    "c2", "steps", "d2", "sigmoidal-phi", "compound",
)


class KernelError(ValueError):
    """Raised for invalid kernel specifications or infeasible truncations."""


# ---------------------------------------------------------------------------
# specifications


@dataclass(frozen=True)
class KernelSpec:
    """Declarative description of a kernel.

    ``parts`` is only used by the generic ``compound`` family and holds
    ``(weight, inner_spec, offset)`` triples meaning ``weight * inner(x + offset)``.
    ``shift`` translates the finished kernel: ``chi(x - shift)``.
    """

    family: str
    n: int | None = None
    alpha: float | None = None
    gamma: float | None = None
    shift: float = 0.0
    parts: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise KernelError(f"unknown kernel family {self.family!r}")
        if self.family in ("bspline", "compound-bspline"):
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise KernelError("B-spline order n must be a positive integer")
        if self.family in ("compound-bspline", "compound") and self.alpha is None:
            raise KernelError(f"{self.family} needs alpha")
        if self.family == "sigmoidal-phi":
            if self.gamma is None or not (1.0 < self.gamma <= 2.0):
                raise KernelError("sigmoidal-phi needs gamma in (1, 2]")

    # convenience constructors
    @classmethod
    def fejer(cls):
        return cls("fejer")

    @classmethod
    def vallee_poussin(cls):
        return cls("vallee-poussin")

    @classmethod
    def mixed_sinc(cls):
        return cls("mixed-sinc")

    @classmethod
    def bspline(cls, n, shift=0.0):
        return cls("bspline", n=n, shift=shift)

    @classmethod
    def compound_bspline(cls, n, alpha):
        return cls("compound-bspline", n=n, alpha=float(alpha))

    @classmethod
    def sigmoidal(cls, gamma):
        return cls("sigmoidal-phi", gamma=float(gamma))

    @classmethod
    def compound(cls, alpha, inner_a, inner_b):
        """(1 - alpha) chi_a(x - a - 1) + alpha chi_b(x + b) for compact chi_a, chi_b."""
        a = _support_radius(make_kernel(inner_a))
        b = _support_radius(make_kernel(inner_b))
        parts = ((1.0 - alpha, inner_a, -(a + 1.0)), (float(alpha), inner_b, b))
        return cls("compound", alpha=float(alpha), parts=parts)

    def label(self):
        keys = []
        for name in ("n", "alpha", "gamma"):
            value = getattr(self, name)
            if value is not None:
                keys.append(f"{name}={value:g}" if isinstance(value, float) else f"{name}={value}")
        if self.shift:
            keys.append(f"shift={self.shift:g}")
        if self.parts:
            keys.append("parts=" + "+".join(f"{w:g}*[{s.label()}](x{o:+g})" for w, s, o in self.parts))
        return self.family + (":" + ",".join(keys) if keys else "")


@dataclass(frozen=True)
class CompactSupport:
    lo: float
    hi: float


@dataclass(frozen=True)
class DecaySupport:
    exponent: float


@dataclass(frozen=True)
class Truncation:
    """Truncation policy for lattice sums of unbounded kernels.

    ``tol`` is the absolute tail tolerance; ``None`` picks the default for the
    kernel's decay (1e-8 for exponent >= 2, 1e-6 otherwise). Radii are powers
    of two between ``min_radius`` and ``max_radius``.
    """

    tol: float | None = None
    min_radius: int = 16
    max_radius: int = 1 << 16

    def tolerance_for(self, kernel):
        if self.tol is not None:
            return self.tol
        if isinstance(kernel.support, DecaySupport) and kernel.support.exponent < 2:
            return 1e-6
        return 1e-8


DEFAULT_TRUNCATION = Truncation()


# ---------------------------------------------------------------------------
# kernel classes


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


class Kernel:
    """A kernel function chi with support metadata.

    Subclasses implement ``_eval`` on float arrays. Calling the kernel accepts
    scalars or arrays and returns the same shape.
    """

    support: CompactSupport | DecaySupport
    continuous: bool = True
    known_alpha: float | None = None

    def __init__(self, spec):
        self.spec = spec

    def __call__(self, x):
        arr, scalar = _as_array(x)
        a = arr.reshape(-1)
        out = self._eval(a)
        if isinstance(self.support, CompactSupport):
            out = np.where((a < self.support.lo) | (a > self.support.hi), 0.0, out)
        return float(out[0]) if scalar else out.reshape(arr.shape)

    def _eval(self, x):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Kernel) and other.spec == self.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"Kernel({self.spec.label()})"

    @property
    def name(self):
        return self.spec.label()

    @property
    def is_compact(self):
        return isinstance(self.support, CompactSupport)

    def knots(self):
        """Points where the kernel may fail to be smooth (compact kernels)."""
        return np.array([], dtype=float)

    # tails -----------------------------------------------------------------
    def tail_sums(self, x, k_lo, k_hi):
        """Exact ``(sum_{k<k_lo} chi(x-k), sum_{k>k_hi} chi(x-k))`` or ``None``."""
        if self.is_compact:
            return 0.0, 0.0
        return None

    def signed_tail_bound(self, radius):
        """Bound on the uncorrected signed tail beyond a window of ``radius``."""
        return 0.0

    def abs_tail_bound(self, radius):
        """Bound on sum |chi(x-k)| over lattice points farther than ``radius``."""
        return 0.0

    def even(self):
        return False


def _support_radius(kernel):
    if not kernel.is_compact:
        raise KernelError("compound construction needs compactly supported inner kernels")
    return max(abs(kernel.support.lo), abs(kernel.support.hi))


_ABEL_HEAD = 256
_ABEL_ORDER = 8


def _oscillating_tail(w, s):
    """sum_{m>=0} cos(w (m + s)) / (m + s)**2 for w not in 2 pi Z.

    The first terms are summed directly; the rest follows from repeated
    summation by parts, S(f) = [f(0) + z S(delta f)] / (1 - z) with
    z = exp(i w), truncated after a few orders (remainder below 1e-16).
    """
    m = np.arange(_ABEL_HEAD)
    head = float(np.sum(np.cos(w * (m + s)) / (m + s) ** 2))
    s0 = s + _ABEL_HEAD
    z = complex(math.cos(w), math.sin(w))
    f = 1.0 / (s0 + np.arange(_ABEL_ORDER + 1)) ** 2
    acc = 0j
    for j in range(_ABEL_ORDER):
        acc += z**j * f[0] / (1.0 - z) ** (j + 1)
        f = np.diff(f)
    phase = complex(math.cos(w * s0), math.sin(w * s0))
    return head + (phase * acc).real


class TrigRationalKernel(Kernel):
    """Even band-limited kernels of the form sum_j a_j cos(w_j y) / y**2.

    ``terms`` lists ``(a_j, w_j, q_j)`` where ``q_j`` is the lattice period of
    ``cos(w_j (y + k))`` in ``k`` (``None`` when it is not periodic). The
    trigonometric form is used only for tails and for the value at zero;
    pointwise evaluation goes through the product-of-sinc forms.
    """

    support = DecaySupport(2.0)
    terms: tuple = ()

    def even(self):
        return True

    def value_at_zero(self):
        # sum a_j = 0, so the limit is -sum a_j w_j^2 / 2
        return -0.5 * sum(a * w * w for a, w, _ in self.terms)

    def _series_tail(self, s):
        # sum_{m>=0} chi(m + s) for s > 0
        total = 0.0
        for a, w, q in self.terms:
            if q is None:
                total += a * _oscillating_tail(w, s)
            else:
                # cos(w (m + s)) repeats with period q: one trigamma per residue
                r = np.arange(q)
                total += a * float(np.sum(np.cos(w * (r + s)) * special.polygamma(1, (r + s) / q))) / q**2
        return total

    def tail_sums(self, x, k_lo, k_hi):
        return self._series_tail(x - k_lo + 1.0), self._series_tail(k_hi + 1.0 - x)

    def signed_tail_bound(self, radius):
        return 0.0

    def abs_tail_bound(self, radius):
        c = sum(abs(a) for a, _, _ in self.terms)
        return 2.0 * c * (1.0 / radius + 1.0 / radius**2)

    def fourier_tail(self, v, L):
        """int_L^inf chi(u) cos(v u) du, in closed form via sine integrals."""
        total = 0.0
        for a, w, _ in self.terms:
            for c in (w + v, w - v):
                c = abs(c)
                if c == 0.0:
                    part = 1.0 / L
                else:
                    si, _ = special.sici(c * L)
                    part = math.cos(c * L) / L - c * (math.pi / 2.0 - si)
                total += 0.5 * a * part
        return total


class FejerKernel(TrigRationalKernel):
    known_alpha = None
    terms = ((1.0 / math.pi**2, 0.0, 1), (-1.0 / math.pi**2, math.pi, 2))

    def _eval(self, x):
        return 0.5 * np.sinc(x / 2.0) ** 2


class ValleePoussinKernel(TrigRationalKernel):
    terms = ((1.0 / math.pi, 1.0, None), (-1.0 / math.pi, 2.0, None))

    def _eval(self, x):
        return 3.0 / (2.0 * math.pi) * np.sinc(x / (2.0 * math.pi)) * np.sinc(3.0 * x / (2.0 * math.pi))


class MixedSincKernel(TrigRationalKernel):
    terms = ((1.0 / math.pi**2, math.pi / 2.0, 4), (-1.0 / math.pi**2, 1.5 * math.pi, 4))

    def _eval(self, x):
        return np.sinc(x / 2.0) * np.sinc(x)


class BSplineKernel(Kernel):
    """Central B-spline M_n supported on [-n/2, n/2]."""

    def __init__(self, spec):
        super().__init__(spec)
        self.n = int(spec.n)
        self.support = CompactSupport(-self.n / 2.0, self.n / 2.0)
        self.continuous = self.n >= 2
        self._binom = np.array([(-1) ** i * math.comb(self.n, i) for i in range(self.n + 1)], dtype=float)

    def knots(self):
        return np.arange(self.n + 1) - self.n / 2.0

    def even(self):
        return self.n >= 2

    def _eval(self, x):
        n = self.n
        if n == 1:
            return np.where((x >= -0.5) & (x < 0.5), 1.0, 0.0)
        # evaluate on the left half where the truncated powers are small
        y = -np.abs(x)
        shifted = n / 2.0 + y[:, None] - np.arange(n + 1)[None, :]
        powers = np.maximum(shifted, 0.0) ** (n - 1)
        return powers @ self._binom / math.factorial(n - 1)


class StepSKernel(Kernel):
    """S(x) = 1/2 at |x| = 1, -1/2 at |x| = 2, 0 elsewhere."""

    support = CompactSupport(-2.0, 2.0)
    continuous = False

    def knots(self):
        return np.array([-2.0, -1.0, 0.0, 1.0, 2.0])

    def _eval(self, x):
        ax = np.abs(x)
        return np.where(ax == 1.0, 0.5, np.where(ax == 2.0, -0.5, 0.0))


class MixtureKernel(Kernel):
    """Finite combination sum_i w_i inner_i(x + off_i)."""

    def __init__(self, spec, parts, known_alpha=None):
        super().__init__(spec)
        self.parts = tuple((float(w), k, float(o)) for w, k, o in parts)
        self.known_alpha = known_alpha
        self.continuous = all(k.continuous for _, k, _ in self.parts)
        if all(k.is_compact for _, k, _ in self.parts):
            lo = min(k.support.lo - o for w, k, o in self.parts if w != 0.0)
            hi = max(k.support.hi - o for w, k, o in self.parts if w != 0.0)
            self.support = CompactSupport(lo, hi)
        else:
            self.support = DecaySupport(min(
                k.support.exponent for _, k, _ in self.parts if not k.is_compact))

    def _eval(self, x):
        out = np.zeros_like(x)
        for w, k, o in self.parts:
            if w != 0.0:
                out += w * k(x + o)
        return out

    def knots(self):
        pts = [k.knots() - o for w, k, o in self.parts if w != 0.0 and k.is_compact]
        return np.unique(np.concatenate(pts)) if pts else np.array([], dtype=float)

    def _offset_radius(self):
        return max(abs(o) for _, _, o in self.parts)

    def tail_sums(self, x, k_lo, k_hi):
        if self.is_compact:
            return 0.0, 0.0
        left = right = 0.0
        for w, k, o in self.parts:
            if w == 0.0:
                continue
            t = k.tail_sums(x + o, k_lo, k_hi)
            if t is None:
                return None
            left += w * t[0]
            right += w * t[1]
        return left, right

    def signed_tail_bound(self, radius):
        r = max(radius - self._offset_radius(), 1.0)
        return sum(abs(w) * k.signed_tail_bound(r) for w, k, _ in self.parts)

    def abs_tail_bound(self, radius):
        r = max(radius - self._offset_radius(), 1.0)
        return sum(abs(w) * k.abs_tail_bound(r) for w, k, _ in self.parts)


class SigmoidalPhiKernel(Kernel):
    """phi_gamma(u) = [sigma_gamma(u + 1) - sigma_gamma(u - 1)] / 2.

    For large |u| the kernel behaves like gamma |u|^(-gamma-1), which is the
    decay exponent declared here.
    """

    continuous = True

    def __init__(self, spec):
        super().__init__(spec)
        self.gamma = float(spec.gamma)
        self.corner = 2.0 ** (1.0 / self.gamma)
        self.slope = 2.0 ** (-1.0 / self.gamma - 2.0)
        self.support = DecaySupport(self.gamma + 1.0)

    def even(self):
        return True

    def sigma(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 - self.rho(x)

    def rho(self, x):
        """1 - sigma(x) = sigma(-x), evaluated without cancellation for large x."""
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            far = 1.0 / (ax**self.gamma + 2.0)
        mid = 0.5 - self.slope * x
        return np.where(x > self.corner, far, np.where(x < -self.corner, 1.0 - far, mid))

    def knots(self):
        c = self.corner
        return np.array([-c - 1.0, -c + 1.0, c - 1.0, c + 1.0])

    def _eval(self, x):
        ax = np.abs(x)
        g = self.gamma
        # both rho arguments beyond the corner: closed rational form
        out = 0.5 * (1.0 / (np.abs(ax - 1.0) ** g + 2.0) - 1.0 / ((ax + 1.0) ** g + 2.0))
        near = ax <= self.corner + 1.0
        if near.any():
            an = ax[near]
            out[near] = 0.5 * (self.rho(an - 1.0) - self.rho(an + 1.0))
        return out

    def tail_sums(self, x, k_lo, k_hi):
        # the lattice sum telescopes
        right = 0.5 * float(self.rho(k_hi - x) + self.rho(k_hi + 1.0 - x))
        left = 0.5 * float(self.rho(x - k_lo + 1.0) + self.rho(x - k_lo))
        return left, right

    def abs_tail_bound(self, radius):
        g = self.gamma
        r = max(radius - 1.0, 1.0)
        return 2.0 * g * (r ** (-g - 1.0) + r ** (-g) / g)


@lru_cache(maxsize=None)
def make_kernel(spec):
    """Build the kernel described by ``spec``."""
    if spec.shift:
        inner = make_kernel(KernelSpec(spec.family, spec.n, spec.alpha, spec.gamma, 0.0, spec.parts))
        kernel = MixtureKernel(spec, [(1.0, inner, -spec.shift)])
        kernel.continuous = inner.continuous
        return kernel
    fam = spec.family
    if fam == "fejer":
        return FejerKernel(spec)
    if fam == "vallee-poussin":
        return ValleePoussinKernel(spec)
    if fam == "mixed-sinc":
        return MixedSincKernel(spec)
    if fam == "bspline":
        return BSplineKernel(spec)
    if fam == "steps":
        return StepSKernel(spec)
    if fam == "sigmoidal-phi":
        return SigmoidalPhiKernel(spec)
    if fam == "compound-bspline":
        n, alpha = int(spec.n), float(spec.alpha)
        m = make_kernel(KernelSpec.bspline(n))
        return MixtureKernel(spec, [(1.0 - alpha, m, -(n + 1.0)), (alpha, m, float(n))], known_alpha=alpha)
    if fam == "c2":
        m2 = make_kernel(KernelSpec.bspline(2))
        return MixtureKernel(spec, [(0.5, m2, 2.0), (0.5, m2, -2.0)], known_alpha=0.5)
    if fam == "d2":
        kernel = MixtureKernel(spec, [(1.0, make_kernel(KernelSpec("c2")), 0.0),
                                      (1.0, make_kernel(KernelSpec("steps")), 0.0)], known_alpha=0.5)
        return kernel
    if fam == "compound":
        if len(spec.parts) != 2:
            raise KernelError("compound needs exactly two parts")
        (wa, sa, oa), (wb, sb, ob) = spec.parts
        if not (math.isclose(wa, 1.0 - spec.alpha) and math.isclose(wb, spec.alpha)):
            raise KernelError("compound weights must be (1 - alpha, alpha)")
        parts = [(wa, make_kernel(sa), oa), (wb, make_kernel(sb), ob)]
        return MixtureKernel(spec, parts, known_alpha=float(spec.alpha))
    raise KernelError(f"unknown kernel family {fam!r}")


# ---------------------------------------------------------------------------
# lattice sums


def choose_radius(kernel, truncation=DEFAULT_TRUNCATION, weighted=False):
    """Smallest power-of-two radius meeting the tail tolerance (capped).

    Returns ``(radius, bound)`` where ``bound`` is the tail bound actually
    achieved. ``weighted`` selects the absolute bound used for sums whose
    weights are not constant (Kantorovich means).
    """
    if kernel.is_compact:
        return 0, 0.0
    tol = truncation.tolerance_for(kernel)
    bound_of = kernel.abs_tail_bound if weighted else kernel.signed_tail_bound
    radius = truncation.min_radius
    while bound_of(radius) > tol and radius < truncation.max_radius:
        radius *= 2
    return radius, bound_of(radius)


def window(kernel, x, radius):
    """Integer range [k_lo, k_hi] of lattice points kept for argument ``x``."""
    if kernel.is_compact:
        sup = kernel.support
        return math.ceil(x - sup.hi), math.floor(x - sup.lo)
    fl = math.floor(x)
    return fl - radius, fl + radius


def lattice_sum(kernel, x, truncation=DEFAULT_TRUNCATION):
    """sum_k chi(x - k) with exact or bounded tails."""
    radius, _ = choose_radius(kernel, truncation)
    k_lo, k_hi = window(kernel, x, radius)
    ks = np.arange(k_lo, k_hi + 1)
    total = float(np.sum(kernel(x - ks)))
    tails = kernel.tail_sums(x, k_lo, k_hi)
    if tails is not None:
        total += tails[0] + tails[1]
    return total


def _check_summable(kernel):
    if not kernel.is_compact and kernel.support.exponent <= 1.0:
        raise KernelError("kernel tail is not summable (decay exponent <= 1)")


def psi_minus(kernel, x, truncation=DEFAULT_TRUNCATION):
    """Psi^-(x) = sum over k > x of chi(x - k)."""
    _check_summable(kernel)
    radius, _ = choose_radius(kernel, truncation)
    k_lo, k_hi = window(kernel, x, radius)
    start = math.floor(x) + 1
    ks = np.arange(max(start, k_lo), k_hi + 1)
    total = float(np.sum(kernel(x - ks)))
    tails = kernel.tail_sums(x, k_lo, k_hi)
    if tails is not None:
        total += tails[1]
    return total


def psi_plus(kernel, x, truncation=DEFAULT_TRUNCATION):
    """Psi^+(x) = sum over k < x of chi(x - k)."""
    _check_summable(kernel)
    radius, _ = choose_radius(kernel, truncation)
    k_lo, k_hi = window(kernel, x, radius)
    stop = math.ceil(x) - 1
    ks = np.arange(k_lo, min(stop, k_hi) + 1)
    total = float(np.sum(kernel(x - ks)))
    tails = kernel.tail_sums(x, k_lo, k_hi)
    if tails is not None:
        total += tails[0]
    return total


def u_grid(points=1024):
    """Equispaced points of [0, 1) plus the one-sided probe 1 - 2**-20."""
    return np.concatenate([np.arange(points) / points, [1.0 - 2.0**-20]])


# ---------------------------------------------------------------------------
# discrete absolute moments

MOMENT_RADII = (100, 1_000, 10_000, 100_000)
DIVERGENCE_RATIO = 1.2


@dataclass
class MomentEstimate:
    beta: float
    value: float
    radius: int
    grid: int
    diverging: bool
    ladder: list = field(default_factory=list)

    @property
    def finite(self):
        return not self.diverging

    def last_ratio(self):
        if len(self.ladder) < 2 or self.ladder[-2][1] == 0.0:
            return 1.0
        return self.ladder[-1][1] / self.ladder[-2][1]


def _moment_shell(kernel, u, ks, beta):
    y = u[:, None] - ks[None, :]
    vals = np.abs(kernel(y))
    if beta:
        vals = vals * np.abs(y) ** beta
    return vals.sum(axis=1)


@lru_cache(maxsize=256)
def discrete_moment(kernel, beta, radii=MOMENT_RADII, grid=1024):
    """Grid supremum over u in [0, 1) of sum_k |chi(u - k)| |u - k|**beta.

    Compact kernels are summed exactly. For unbounded kernels partial sums
    over |k| <= R are accumulated shell by shell along ``radii``; the result
    is flagged diverging when the last ratio of partial suprema exceeds 1.2.
    """
    if beta < 0:
        raise KernelError("beta must be non-negative")
    u = u_grid(grid)
    if kernel.is_compact:
        sup = kernel.support
        ks = np.arange(math.floor(-sup.hi) - 1, math.ceil(1 - sup.lo) + 2)
        value = float(_moment_shell(kernel, u, ks, beta).max())
        radius = int(ks[-1] - ks[0])
        return MomentEstimate(beta, value, radius, grid, False, [(radius, value)])

    sums = np.zeros_like(u)
    done = -1
    ladder = []
    chunk = max(1, (1 << 21) // len(u))
    for radius in radii:
        ks_all = np.concatenate([np.arange(-radius, -done), np.arange(done + 1, radius + 1)]) \
            if done >= 0 else np.arange(-radius, radius + 1)
        for i in range(0, len(ks_all), chunk):
            sums += _moment_shell(kernel, u, ks_all[i:i + chunk], beta)
        done = radius
        ladder.append((radius, float(sums.max())))
    ratios = [b / a for (_, a), (_, b) in zip(ladder, ladder[1:]) if a > 0]
    diverging = bool(ratios and ratios[-1] > DIVERGENCE_RATIO)
    value = math.inf if diverging else ladder[-1][1]
    return MomentEstimate(beta, value, radii[-1], grid, diverging, ladder)


# ---------------------------------------------------------------------------
# Fourier transform by quadrature


def fourier_transform(kernel, v, L=64.0):
    """chi_hat(v) = int chi(u) exp(-i u v) du, by adaptive quadrature."""
    v = float(v)
    if kernel.is_compact:
        pts = np.unique(np.concatenate([[kernel.support.lo, kernel.support.hi], kernel.knots()]))
        pts = pts[(pts >= kernel.support.lo) & (pts <= kernel.support.hi)]
        re = im = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            if v == 0.0:
                re += integrate.quad(kernel, a, b, epsabs=1e-13, epsrel=1e-12)[0]
            else:
                re += integrate.quad(kernel, a, b, weight="cos", wvar=v, epsabs=1e-13)[0]
                im -= integrate.quad(kernel, a, b, weight="sin", wvar=v, epsabs=1e-13)[0]
        return complex(re, im)
    if not kernel.even():
        raise KernelError("quadrature Fourier transform needs an even kernel or compact support")
    pts = np.concatenate([np.arange(0.0, L + 1.0), kernel.knots()])
    pts = np.unique(pts[(pts >= 0.0) & (pts <= L)])
    head = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if v == 0.0:
            head += integrate.quad(kernel, a, b, epsabs=1e-14)[0]
        else:
            head += integrate.quad(kernel, a, b, weight="cos", wvar=v, epsabs=1e-14)[0]
    if isinstance(kernel, TrigRationalKernel):
        tail = kernel.fourier_tail(v, L)
    elif v == 0.0:
        tail = integrate.quad(kernel, L, np.inf, epsabs=1e-12)[0]
    else:
        tail = integrate.quad(kernel, L, np.inf, weight="cos", wvar=abs(v), epsabs=1e-12, limlst=200)[0]
    return complex(2.0 * (head + tail), 0.0)


def _abs_integral(kernel):
    if kernel.is_compact:
        pts = np.unique(np.concatenate([[kernel.support.lo, kernel.support.hi], kernel.knots()]))
        pts = pts[(pts >= kernel.support.lo) & (pts <= kernel.support.hi)]
        return sum(integrate.quad(lambda u: abs(kernel(u)), a, b)[0] for a, b in zip(pts[:-1], pts[1:]))
    # Gauss-Legendre on unit cells of [-L, L]; beyond L the declared decay
    # |chi(u)| <= C u^-g bounds the rest, with C read off the last cells
    L = 4096
    nodes, weights = np.polynomial.legendre.leggauss(24)
    cells = np.arange(L)[:, None] + 0.5 * (nodes[None, :] + 1.0)
    vals = np.abs(kernel(cells)) + np.abs(kernel(-cells))
    head = float(0.5 * (vals @ weights).sum())
    g = kernel.support.exponent
    far = cells[L // 2:]
    c = float(np.max(np.abs(kernel(far)) * far**g + np.abs(kernel(-far)) * far**g))
    return head + c * L ** (1.0 - g) / (g - 1.0)


# ---------------------------------------------------------------------------
# validation and classification


@dataclass
class ValidationReport:
    kernel: str
    tolerance: float
    partition_defect: float
    partition_ok: bool
    radius: int
    tail_bound: float
    bounded_max: float
    bounded_ok: bool
    abs_integral: float
    integrable_ok: bool
    moment: MomentEstimate | None
    moment_ok: bool
    fourier: dict | None
    fourier_ok: bool | None
    grid: int

    @property
    def passed(self):
        checks = [self.partition_ok, self.bounded_ok, self.integrable_ok, self.moment_ok]
        if self.fourier_ok is not None:
            checks.append(self.fourier_ok)
        return all(checks)

    def as_dict(self):
        out = {
            "kernel": self.kernel,
            "tolerance": self.tolerance,
            "grid": self.grid,
            "chi1_bounded_max": self.bounded_max,
            "chi1_bounded": self.bounded_ok,
            "chi1_abs_integral": self.abs_integral,
            "chi1_integrable": self.integrable_ok,
            "chi1": self.bounded_ok and self.integrable_ok,
            "chi2_partition_defect": self.partition_defect,
            "chi2": self.partition_ok,
            "truncation_radius": self.radius,
            "tail_bound": self.tail_bound,
            "chi3": self.moment_ok,
            "passed": self.passed,
        }
        if self.moment is not None:
            out.update({
                "chi3_beta": self.moment.beta,
                "chi3_value": None if self.moment.diverging else self.moment.value,
                "chi3_diverging": self.moment.diverging,
                "chi3_radius": self.moment.radius,
            })
        if self.fourier is not None:
            out["fourier_ok"] = self.fourier_ok
            for k, val in self.fourier.items():
                out[f"fourier_hat_2pi_{k}"] = val
        return out


def validate_kernel(kernel, tolerance=1e-10, truncation=DEFAULT_TRUNCATION, grid=1024,
                    fourier_terms=3, fourier_tolerance=1e-6, moment_beta=0.25,
                    moment_radii=MOMENT_RADII):
    """Numeric check of the kernel conditions: boundedness and integrability,
    lattice partition of unity, a finite discrete moment and, for continuous
    kernels, the Fourier samples at 2 pi k."""
    u = u_grid(grid)
    sums = np.array([lattice_sum(kernel, float(x), truncation) for x in u])
    defect = float(np.max(np.abs(sums - 1.0)))
    radius, bound = choose_radius(kernel, truncation)

    xs = np.linspace(-1.0, 1.0, 2001)
    vals = np.abs(kernel(xs))
    bounded_max = float(vals.max())
    bounded_ok = bool(np.isfinite(bounded_max))
    abs_int = _abs_integral(kernel)
    integrable_ok = bool(np.isfinite(abs_int))

    moment = discrete_moment(kernel, moment_beta, tuple(moment_radii), grid) if moment_beta is not None else None
    moment_ok = moment is None or moment.finite

    fourier = fourier_ok = None
    if kernel.continuous:
        fourier = {}
        worst = 0.0
        for k in range(-fourier_terms, fourier_terms + 1):
            val = fourier_transform(kernel, 2.0 * math.pi * k)
            target = 1.0 if k == 0 else 0.0
            fourier[k] = [val.real, val.imag]
            worst = max(worst, abs(val - target))
        fourier_ok = worst <= fourier_tolerance

    return ValidationReport(
        kernel=kernel.name, tolerance=tolerance, partition_defect=defect,
        partition_ok=defect <= tolerance + bound, radius=radius, tail_bound=bound,
        bounded_max=bounded_max, bounded_ok=bounded_ok, abs_integral=abs_int,
        integrable_ok=integrable_ok, moment=moment, moment_ok=moment_ok,
        fourier=fourier, fourier_ok=fourier_ok, grid=grid,
    )


@dataclass(frozen=True)
class JumpClass:
    """Jump behaviour of a kernel.

    kind is one of ``ConstantAlpha``, ``IntegerLatticeOnly``,
    ``NonConvergent`` or ``Irregular``.
    """

    kind: str
    alpha: float | None = None
    chi0: float | None = None
    psi_spread: float = 0.0

    def __str__(self):
        if self.kind == "ConstantAlpha":
            return f"ConstantAlpha({self.alpha:.12g})"
        if self.kind == "IntegerLatticeOnly":
            return f"IntegerLatticeOnly(alpha0={self.alpha:.12g}, chi0={self.chi0:.12g})"
        return self.kind


def classify_jump_behavior(kernel, grid=1024, tolerance=1e-9, truncation=DEFAULT_TRUNCATION):
    """Classify how S_w f behaves at jumps for this kernel.

    * ``ConstantAlpha``: Psi^- constant on [0, 1) and chi null on [0, 1);
      converges to alpha f(t+0) + (1 - alpha) f(t-0) along every w.
    * ``NonConvergent``: Psi^- constant on (0, 1) but chi not null there.
    * ``IntegerLatticeOnly``: only the wt in Z limit is available.
    * ``Irregular``: the lattice partition of unity fails.
    """
    if grid < 2:
        raise KernelError("grid must have at least two points")
    u = u_grid(grid)
    pou = max(abs(lattice_sum(kernel, float(x), truncation) - 1.0) for x in u)
    if pou > max(tolerance, 1e-6):
        return JumpClass("Irregular")
    psi = np.array([psi_minus(kernel, float(x), truncation) for x in u])
    chi = np.abs(kernel(u))
    alpha0 = float(psi[0])
    chi0 = float(kernel(0.0))
    interior = psi[1:]
    spread_closed = float(psi.max() - psi.min())
    spread_open = float(interior.max() - interior.min())
    if spread_closed <= tolerance and chi.max() <= tolerance:
        return JumpClass("ConstantAlpha", alpha=float(psi.mean()), chi0=chi0, psi_spread=spread_closed)
    if spread_open <= tolerance and chi[1:].max() > tolerance:
        return JumpClass("NonConvergent", alpha=float(interior.mean()), chi0=chi0, psi_spread=spread_open)
    return JumpClass("IntegerLatticeOnly", alpha=alpha0, chi0=chi0, psi_spread=spread_closed)


def kernel_table(kernel, xs, truncation=DEFAULT_TRUNCATION):
    """Rows (x, chi(x), Psi^-(x), Psi^+(x))."""
    return [(float(x), float(kernel(float(x))), psi_minus(kernel, float(x), truncation),
             psi_plus(kernel, float(x), truncation)) for x in xs]
