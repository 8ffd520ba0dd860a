"""Kernel families, lattice functionals, moments and validation."""
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.interpolate import BSpline

from kantorovich.kernels import (DecaySupport, Kernel, KernelError, KernelSpec, Truncation,
                                 classify_jump_behavior, discrete_moment, fourier_transform,
                                 kernel_table, lattice_sum, make_kernel, psi_minus, psi_plus,
                                 u_grid, validate_kernel)

from conftest import ALL_SPECS, COMPACT_SPECS

mp.mp.dps = 30

FEJER = make_kernel(KernelSpec.fejer())
VP = make_kernel(KernelSpec.vallee_poussin())
MIXED = make_kernel(KernelSpec.mixed_sinc())
PHI = make_kernel(KernelSpec.sigmoidal(1.5))
COMPOUND = make_kernel(KernelSpec.compound_bspline(2, 0.3))
C2 = make_kernel(KernelSpec("c2"))
D2 = make_kernel(KernelSpec("d2"))
STEPS = make_kernel(KernelSpec("steps"))


# ---------------------------------------------------------------------------
# independent closed forms


def mp_fejer(x):
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(1) / 2
    return mp.mpf(1) / 2 * (mp.sin(mp.pi * x / 2) / (mp.pi * x / 2)) ** 2


def mp_vp(x):
    x = mp.mpf(x)
    if x == 0:
        return 3 / (2 * mp.pi)
    return 3 / (2 * mp.pi) * mp.sin(x / 2) * mp.sin(3 * x / 2) / (3 * x**2 / 4)


def mp_mixed(x):
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(1)
    return mp.sin(mp.pi * x / 2) * mp.sin(mp.pi * x) / (mp.pi**2 * x**2 / 2)


def mp_sigma(x, g):
    x = mp.mpf(x)
    c = mp.mpf(2) ** (1 / mp.mpf(g))
    if x < -c:
        return 1 / (abs(x) ** g + 2)
    if x > c:
        return (x**g + 1) / (x**g + 2)
    return mp.mpf(2) ** (-1 / mp.mpf(g) - 2) * x + mp.mpf(1) / 2


def mp_phi(u, g):
    return (mp_sigma(u + 1, g) - mp_sigma(u - 1, g)) / 2


def scipy_bspline(n):
    return BSpline.basis_element(np.arange(n + 1) - n / 2.0, extrapolate=False)


# ---------------------------------------------------------------------------
# point values


@pytest.mark.parametrize("kernel,x,expected", [
    (FEJER, 0.0, 0.5),
    (make_kernel(KernelSpec.bspline(2)), 0.0, 1.0),
    (COMPOUND, 0.5, 0.0),
    (STEPS, 1.0, 0.5),
    (STEPS, -2.0, -0.5),
    (MIXED, 0.0, 1.0),
    (VP, 0.0, 3 / (2 * math.pi)),
])
def test_point_values(kernel, x, expected):
    assert kernel(x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("kernel,oracle", [(FEJER, mp_fejer), (VP, mp_vp), (MIXED, mp_mixed)])
def test_sinc_kernels_match_closed_forms(kernel, oracle):
    xs = np.concatenate([np.linspace(-40, 40, 801), [1e-9, -1e-7, 1e-5, 2.0, 4.0]])
    got = kernel(xs)
    want = np.array([float(oracle(x)) for x in xs])
    assert np.max(np.abs(got - want)) <= 1e-15


def test_sinc_kernels_continuous_at_zero():
    for kernel in (FEJER, VP, MIXED):
        assert abs(kernel(1e-8) - kernel(0.0)) < 1e-14


@pytest.mark.parametrize("gamma", [1.1, 1.5, 2.0])
def test_sigmoidal_phi_matches_closed_form(gamma):
    kernel = make_kernel(KernelSpec.sigmoidal(gamma))
    xs = np.concatenate([np.linspace(-30, 30, 601), [1e3, -1e4]])
    want = np.array([float(mp_phi(x, gamma)) for x in xs])
    assert np.max(np.abs(kernel(xs) - want)) <= 1e-15
    # far tail relative accuracy, where a naive difference cancels
    assert kernel(1e6) == pytest.approx(float(mp_phi(1e6, gamma)), rel=1e-9)


def test_sigmoidal_phi_decay_exponent():
    for u in (1e3, 1e5):
        assert u**2.5 * PHI(u) == pytest.approx(1.5, rel=1e-2)
    assert PHI.support == DecaySupport(2.5)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 7])
def test_bspline_matches_scipy(n):
    kernel = make_kernel(KernelSpec.bspline(n))
    ref = scipy_bspline(n)
    xs = np.linspace(-n / 2 - 0.5, n / 2 + 0.5, 997)
    want = np.nan_to_num(ref(xs))
    assert np.max(np.abs(kernel(xs) - want)) <= 1e-13
    assert kernel.support.lo == -n / 2 and kernel.support.hi == n / 2


def test_compound_is_null_on_unit_interval():
    xs = u_grid(1024)
    assert np.all(COMPOUND(xs) == 0.0)
    assert np.all(C2(xs) == 0.0)
    assert np.all(D2(xs) == 0.0)


def test_compound_support_and_alpha():
    assert (COMPOUND.support.lo, COMPOUND.support.hi) == (-3.0, 4.0)
    assert COMPOUND.known_alpha == 0.3
    generic = make_kernel(KernelSpec.compound(0.4, KernelSpec.bspline(2), KernelSpec.bspline(3)))
    assert generic.known_alpha == 0.4
    assert np.all(generic(u_grid(256)) == 0.0)
    assert lattice_sum(generic, 0.37) == pytest.approx(1.0, abs=1e-14)


def test_shifted_bspline_support():
    k = make_kernel(KernelSpec.bspline(2, shift=3.0))
    assert (k.support.lo, k.support.hi) == (2.0, 4.0)
    assert k(3.0) == 1.0


def test_d2_structure():
    m2 = make_kernel(KernelSpec.bspline(2))
    for x in (-3.0, -2.5, -2.0, -1.0, 0.0, 1.0, 1.5, 2.0, 2.2):
        c2 = 0.5 * (m2(x + 2) + m2(x - 2))
        assert C2(x) == c2
        assert D2(x) == c2 + STEPS(x)
    assert D2(1.0) == 0.5 and D2(2.0) == 0.0


@pytest.mark.parametrize("bad", [
    dict(family="sigmoidal-phi", gamma=2.5), dict(family="sigmoidal-phi", gamma=1.0),
    dict(family="bspline", n=0), dict(family="bspline", n=1.5), dict(family="nope"),
    dict(family="compound-bspline", n=2),
])
def test_spec_rejections(bad):
    with pytest.raises(KernelError):
        make_kernel(KernelSpec(**bad))


def test_compound_weights_checked():
    spec = KernelSpec.compound(0.3, KernelSpec.bspline(2), KernelSpec.bspline(2))
    broken = KernelSpec("compound", alpha=0.5, parts=spec.parts)
    with pytest.raises(KernelError):
        make_kernel(broken)


@pytest.mark.parametrize("name", sorted(COMPACT_SPECS))
def test_compact_kernels_vanish_outside_support(name):
    k = make_kernel(COMPACT_SPECS[name])
    lo, hi = k.support.lo, k.support.hi
    xs = np.concatenate([np.linspace(lo - 5, lo, 50, endpoint=False)[:-1] - 1e-12,
                         np.linspace(hi, hi + 5, 50)[1:] + 1e-12])
    assert np.all(k(xs) == 0.0)


# ---------------------------------------------------------------------------
# Psi functionals


def test_psi_examples():
    assert psi_minus(COMPOUND, 0.4) == pytest.approx(0.3, abs=1e-15)
    assert psi_plus(COMPOUND, 0.4) == pytest.approx(0.7, abs=1e-15)
    assert psi_minus(FEJER, 0.0) == pytest.approx(0.25, abs=1e-12)
    assert psi_plus(FEJER, 0.0) == pytest.approx(0.25, abs=1e-12)
    assert psi_minus(C2, 0.7) == pytest.approx(0.5, abs=1e-15)
    assert psi_plus(D2, 0.0) == pytest.approx(0.5, abs=1e-15)


def fejer_psi_minus_oracle(x):
    """sum_{k > x} chi_1(x - k) through Hurwitz zeta per residue class mod 2."""
    x = mp.mpf(x)
    k0 = int(mp.floor(x)) + 1
    total = mp.mpf(0)
    for k in (k0, k0 + 1):
        y = k - x
        # sin^2(pi y / 2) is constant on k + 2Z
        total += 2 / mp.pi**2 * mp.sin(mp.pi * y / 2) ** 2 * mp.zeta(2, y / 2) / 4
    return total


@pytest.mark.parametrize("x", [0.0, 0.1, 0.25, 0.5, 0.75, 0.999, 3.3, -2.6])
def test_fejer_psi_minus_against_hurwitz_oracle(x):
    assert psi_minus(FEJER, x) == pytest.approx(float(fejer_psi_minus_oracle(x)), abs=1e-13)


@pytest.mark.parametrize("kernel,oracle", [(VP, mp_vp), (MIXED, mp_mixed)])
@pytest.mark.parametrize("x", [0.0, 0.3, 0.8])
def test_trig_kernel_tails_against_brute_force(kernel, oracle, x):
    n = 2_000_000
    ks = np.arange(1, n + 1)
    y = x - ks
    brute = math.fsum(kernel(y))
    # brute-force remainder is O(1/n^2) by oscillation; tolerance reflects that
    assert psi_minus(kernel, x) == pytest.approx(brute, abs=1e-11)


@pytest.mark.parametrize("w", [1.0, 2.0, 0.5 * math.pi])
@pytest.mark.parametrize("s", [0.25, 1.0, 40.5])
def test_oscillating_tail_against_lerch_phi(w, s):
    from kantorovich.kernels import _oscillating_tail
    ref = mp.re(mp.exp(1j * w * s) * mp.lerchphi(mp.exp(1j * w), 2, s))
    assert _oscillating_tail(w, s) == pytest.approx(float(ref), abs=1e-14)


@pytest.mark.parametrize("x", [0.0, 0.4, 0.9, -3.2])
def test_phi_tails_against_mpmath(x):
    k0 = math.floor(x) + 1
    head = mp.fsum(mp_phi(x - k, 1.5) for k in range(k0, k0 + 20))
    # Euler-Maclaurin handles the algebraic u^(-5/2) decay; Richardson does not
    tail = mp.nsum(lambda k: mp_phi(x - k, 1.5), [k0 + 20, mp.inf], method="euler-maclaurin")
    assert psi_minus(PHI, x) == pytest.approx(float(head + tail), abs=1e-13)


@pytest.mark.parametrize("name", sorted(ALL_SPECS))
def test_partition_of_unity(name):
    k = make_kernel(ALL_SPECS[name])
    tol = 1e-12 if k.is_compact else 1e-8
    defect = max(abs(lattice_sum(k, float(u)) - 1.0) for u in u_grid(256))
    assert defect <= tol


def test_step_perturbation_sums_to_zero():
    for u in u_grid(64):
        assert lattice_sum(STEPS, float(u)) == 0.0


@pytest.mark.parametrize("name", sorted(ALL_SPECS))
@given(n=st.integers(-20, 20), u=st.floats(0, 1, exclude_max=True))
def test_psi_periodicity(name, n, u):
    k = make_kernel(ALL_SPECS[name])
    tol = 1e-12 if k.is_compact else 1e-8
    x = n + u
    # rounding may move the fractional part of x + 1; that is not a periodicity question
    assume((x + 1.0) - math.floor(x + 1.0) == x - math.floor(x))
    assert abs(psi_minus(k, x + 1.0) - psi_minus(k, x)) <= tol
    assert abs(psi_plus(k, x + 1.0) - psi_plus(k, x)) <= tol


@pytest.mark.parametrize("name", sorted(ALL_SPECS))
@given(x=st.floats(-20, 20, allow_nan=False))
def test_complement_identity(name, x):
    k = make_kernel(ALL_SPECS[name])
    tol = 1e-12 if k.is_compact else 1e-8
    if x != math.floor(x):
        assert abs(psi_plus(k, x) + psi_minus(k, x) - 1.0) <= tol


@pytest.mark.parametrize("name", sorted(ALL_SPECS))
def test_integer_identity(name):
    k = make_kernel(ALL_SPECS[name])
    tol = 1e-12 if k.is_compact else 1e-8
    for n in (-3.0, 0.0, 5.0):
        assert abs(psi_minus(k, n) + k(0.0) + psi_plus(k, n) - 1.0) <= tol


def test_truncation_refuses_slow_decay():
    class Slow(Kernel):
        support = DecaySupport(1.0)

        def _eval(self, x):
            return 1.0 / (1.0 + np.abs(x))

    with pytest.raises(KernelError):
        psi_minus(Slow(KernelSpec.fejer()), 0.3)


def test_truncation_tolerances():
    t = Truncation()
    assert t.tolerance_for(FEJER) == 1e-8
    assert t.tolerance_for(PHI) == 1e-8  # decay exponent 2.5
    assert Truncation(tol=1e-5).tolerance_for(FEJER) == 1e-5


def test_kernel_table_rows():
    rows = kernel_table(COMPOUND, [0.0, 0.4])
    assert rows[1] == (0.4, 0.0, pytest.approx(0.3), pytest.approx(0.7))


# ---------------------------------------------------------------------------
# moments


def test_moment_examples():
    m = discrete_moment(make_kernel(KernelSpec.bspline(2)), 0.0)
    assert m.value == pytest.approx(1.0, abs=1e-15) and not m.diverging
    assert discrete_moment(PHI, 0.3).finite


def brute_moment(kernel, beta, grid=64, radius=20):
    best = 0.0
    for u in u_grid(grid):
        ks = np.arange(-radius, radius + 1)
        y = u - ks
        best = max(best, math.fsum(np.abs(kernel(y)) * np.abs(y) ** beta))
    return best


@pytest.mark.parametrize("spec", [KernelSpec.bspline(3), KernelSpec.compound_bspline(2, 0.3),
                                  KernelSpec("d2")])
@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0])
def test_compact_moments_against_brute_force(spec, beta):
    k = make_kernel(spec)
    assert discrete_moment(k, beta, grid=64).value == pytest.approx(brute_moment(k, beta), rel=1e-13)


def test_moment_ladder_monotone():
    for beta in (0.3, 0.8):
        values = [v for _, v in discrete_moment(PHI, beta).ladder]
        assert all(b >= a for a, b in zip(values, values[1:]))


def test_phi_moment_ladder_follows_decay_exponent():
    # |phi(u)| ~ gamma u^(-gamma-1): the shell beyond R contributes ~ R^(beta-gamma),
    # so the increments shrink by about 10^(beta-gamma) per decade of radius
    for beta in (0.3, 0.8):
        ladder = [v for _, v in discrete_moment(PHI, beta).ladder]
        d1, d2 = ladder[2] - ladder[1], ladder[3] - ladder[2]
        assert d2 / d1 == pytest.approx(10 ** (beta - 1.5), rel=0.1)


def test_fejer_moment_diverges_at_one():
    # chi_1 ~ u^-2, so beta = 1 gives a log-divergent moment; ratios stay above 1
    m = discrete_moment(FEJER, 1.0, radii=(10, 100, 1000), grid=32)
    values = [v for _, v in m.ladder]
    assert values[2] - values[1] == pytest.approx(values[1] - values[0], rel=0.05)


# ---------------------------------------------------------------------------
# Fourier transform and validation


def test_fourier_examples():
    assert fourier_transform(FEJER, 0.0).real == pytest.approx(1.0, abs=1e-7)
    assert abs(fourier_transform(FEJER, 2 * math.pi)) <= 1e-7
    # Fejer's transform is the triangle max(0, 1 - |v| / pi)
    for v in (0.5, 1.7, 2.9):
        assert fourier_transform(FEJER, v).real == pytest.approx(1 - v / math.pi, abs=1e-7)


@pytest.mark.parametrize("n,alpha", [(2, 0.3), (3, 0.7)])
@pytest.mark.parametrize("v", [0.4, 1.3, 2 * math.pi, 5.1])
def test_compound_fourier_identity(n, alpha, v):
    k = make_kernel(KernelSpec.compound_bspline(n, alpha))
    m_hat = (math.sin(v / 2) / (v / 2)) ** n
    want = ((1 - alpha) * np.exp(-1j * v * (n + 1)) + alpha * np.exp(1j * v * n)) * m_hat
    assert abs(fourier_transform(k, v) - want) <= 1e-10


def test_validate_examples():
    rep = validate_kernel(make_kernel(KernelSpec.bspline(3)))
    assert rep.partition_defect <= 1e-12 and rep.passed
    rep = validate_kernel(STEPS)
    assert not rep.partition_ok and not rep.passed
    assert rep.as_dict()["chi2"] is False


def test_validate_fejer_fourier():
    rep = validate_kernel(FEJER, tolerance=1e-6)
    d = rep.as_dict()
    assert d["fourier_hat_2pi_0"][0] == pytest.approx(1.0, abs=1e-7)
    assert abs(d["fourier_hat_2pi_1"][0]) <= 1e-7
    assert rep.passed


# ---------------------------------------------------------------------------
# classification


def test_classification_examples():
    c = classify_jump_behavior(COMPOUND)
    assert c.kind == "ConstantAlpha" and c.alpha == pytest.approx(0.3, abs=1e-12)
    c = classify_jump_behavior(FEJER)
    assert c.kind == "IntegerLatticeOnly"
    assert c.alpha == pytest.approx(0.25, abs=1e-12) and c.chi0 == 0.5
    c = classify_jump_behavior(D2)
    assert c.kind == "ConstantAlpha" and c.alpha == pytest.approx(0.5, abs=1e-12)
    assert classify_jump_behavior(STEPS).kind == "Irregular"


def test_classification_non_convergent():
    # M1 shifted by one half: Psi^- is constant on (0, 1) but chi does not vanish there
    k = make_kernel(KernelSpec.bspline(1, shift=0.5))
    c = classify_jump_behavior(k)
    assert c.kind == "NonConvergent"
