from __future__ import annotations

import io
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import chi2_ref, chi8_ref, gamma_double_sum, spectrum_brute_order8
from qudecay.errors import RegimeError, ResourceLimit
from qudecay.params import DriveParams, ModelOrder, derive
from qudecay.rates import (
    HarmonicSpectrum,
    TruncationPolicy,
    chi_order2,
    chi_order8,
    dump_spectrum,
    gamma_bar,
    gamma_t,
    harmonic_amplitudes,
    select_truncation,
)

FIG1 = DriveParams(omega0=1000.0, omega=0.05, rabi=400.0)
SEC3A = DriveParams(omega0=8000.0, omega=1.0, rabi=40.0)
SMALLX = DriveParams(omega0=8000.0, omega=1.0, rabi=400.0)  # x = 0.1


def spectrum(p, order, policy=None):
    return harmonic_amplitudes(derive(p, order), p, order, policy)


# ---------------------------------------------------------------- truncation

def test_select_truncation_frozen():
    pol = TruncationPolicy(tail_tol=1e-8)
    assert select_truncation(0.1, SEC3A, pol) == 5
    n0 = select_truncation(1600.0, FIG1, pol)
    assert n0 == 1673  # 1600 + O(1600^(1/3)) margin
    assert n0 < FIG1.omega0 / (2 * FIG1.omega)  # inside the regime cap
    assert select_truncation(1392.128, FIG1, pol) == 1462


def test_select_truncation_tail_really_below_tol():
    from qudecay.bessel import bessel_jn_all

    pol = TruncationPolicy(tail_tol=1e-8)
    for arg in (0.1, 23.808, 1392.128):
        n0 = select_truncation(arg, FIG1, pol)
        vals = bessel_jn_all(n0 + 12, arg)
        assert np.all(np.abs(vals[n0:]) < pol.tail_tol)
        assert abs(vals[n0 - 1]) >= pol.tail_tol * 1e-4  # not wastefully large


def test_truncation_hard_cap_clamps():
    pol = TruncationPolicy(tail_tol=1e-8, hard_cap=3)
    assert select_truncation(1600.0, FIG1, pol) == 3
    assert select_truncation(0.01, FIG1, pol) <= 3


def test_truncation_policy_validation():
    with pytest.raises(ValueError):
        TruncationPolicy(tail_tol=0.0)
    with pytest.raises(ValueError):
        TruncationPolicy(guard=0)
    with pytest.raises(ValueError):
        TruncationPolicy(hard_cap=0)


# ------------------------------------------------------------- chi amplitudes

def test_chi_order2_matches_direct_formula():
    d = derive(SEC3A, ModelOrder.ORDER2)
    for n in range(-6, 7):
        assert chi_order2(n, d) == pytest.approx(chi2_ref(n, d), rel=1e-13, abs=1e-300)


def test_chi_order8_matches_direct_formula():
    d = derive(SMALLX, ModelOrder.ORDER8)
    rng = np.random.default_rng(7)
    for _ in range(200):
        n, m, s, r = rng.integers(-6, 7, size=4)
        got = chi_order8(int(n), int(m), int(s), int(r), d)
        want = chi8_ref(int(n), int(m), int(s), int(r), d)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-280), (n, m, s, r)


def test_chi_order8_turning_point_finite():
    # near-turning-point indices at the strongest drive stay finite
    d = derive(FIG1, ModelOrder.ORDER8)
    val = chi_order8(1600, 32, 1, 0, d)
    assert np.isfinite(val)
    want = chi8_ref(1600, 32, 1, 0, d)
    assert val == pytest.approx(want, rel=1e-10, abs=1e-300)


# ------------------------------------------------------------------ spectrum

def test_order2_spectrum_is_chi_ladder():
    pol = TruncationPolicy(tail_tol=1e-8)
    spec = spectrum(SEC3A, ModelOrder.ORDER2, pol)
    d = derive(SEC3A, ModelOrder.ORDER2)
    n0 = select_truncation(d.eta, SEC3A, pol)
    assert spec.k_min == -(n0 - 1)
    for k in spec.ks:
        assert spec.amplitude(int(k)) == pytest.approx(chi2_ref(int(k), d), rel=1e-13)


def test_order8_spectrum_matches_brute_force():
    pol = TruncationPolicy(tail_tol=1e-10)
    spec = spectrum(SMALLX, ModelOrder.ORDER8, pol)
    d = derive(SMALLX, ModelOrder.ORDER8)
    truncs = tuple(
        select_truncation(a, SMALLX, pol)
        for a in (d.eta_bar, d.xi_bar, abs(d.beta_bar), d.rho)
    )
    brute = spectrum_brute_order8(d, truncs)
    for k, a in zip(spec.ks, spec.a):
        assert a == pytest.approx(brute.get(int(k), 0.0), abs=5e-13), f"k={k}"


def test_b_coefficients_are_cubed_shift():
    spec = spectrum(FIG1, ModelOrder.ORDER8)
    shift = spec.meta["shift"]
    ks = spec.ks
    expected = spec.a * (shift + 2.0 * ks * FIG1.omega / FIG1.omega0) ** 3
    np.testing.assert_allclose(spec.b, expected, rtol=1e-13)
    assert shift == pytest.approx(1.144128)


def test_spectrum_immutable_and_lookup():
    spec = spectrum(SEC3A, ModelOrder.ORDER2)
    with pytest.raises((ValueError, RuntimeError)):
        spec.a[0] = 99.0
    assert spec.amplitude(10**6) == 0.0
    with pytest.raises(ValueError):
        HarmonicSpectrum(k_min=0, a=np.array([]), b=np.array([]),
                         order=ModelOrder.ORDER2, meta={})


def test_regime_edge_zeroing_logs_discarded_weight(caplog):
    # fast drive (relaxed slow-drive bound): the strided support crosses
    # |2 k omega/omega0| = 1 and the tail must be zeroed, not folded back
    p = DriveParams(omega0=1000.0, omega=20.0, rabi=400.0, ratio_max=0.05)
    with caplog.at_level(logging.WARNING, logger="qudecay.rates"):
        spec = spectrum(p, ModelOrder.ORDER8)
    assert spec.meta["discarded_weight"] > 0.0
    assert np.all(np.abs(2.0 * spec.ks * p.omega / p.omega0) < 1.0)
    assert any("discard" in r.getMessage() for r in caplog.records)


def test_resource_limit_on_absurd_support():
    pol = TruncationPolicy(tail_tol=1e-8, max_support=100)
    with pytest.raises(ResourceLimit):
        spectrum(FIG1, ModelOrder.ORDER8, pol)


def test_dump_spectrum_format():
    spec = spectrum(SEC3A, ModelOrder.ORDER2)
    fh = io.StringIO()
    dump_spectrum(spec, fh)
    lines = fh.getvalue().strip().splitlines()
    assert lines[0] == "k,A,B"
    assert len(lines) == 1 + len(spec.a)
    k, a, b = lines[1].split(",")
    assert int(k) == spec.k_min
    assert float(a) == pytest.approx(spec.a[0], rel=1e-15)


# ---------------------------------------------------------------------- rate

def test_gamma_factorized_equals_double_sum():
    spec = spectrum(SMALLX, ModelOrder.ORDER8)
    ts = np.linspace(0.0, np.pi / SMALLX.omega, 32)
    fast = gamma_t(ts, spec, SMALLX)
    slow = gamma_double_sum(ts, spec, SMALLX)
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-15)


def test_gamma_undriven_is_half():
    p = DriveParams(omega0=1000.0, omega=0.05, rabi=0.0, gamma=2.0)
    spec = spectrum(p, ModelOrder.ORDER8)
    g = gamma_t(np.linspace(0, 10, 7), spec, p)
    np.testing.assert_allclose(g, 1.0 + 0j, rtol=0, atol=1e-14)  # gamma/2
    np.testing.assert_allclose(gamma_bar(0.3, spec, p), 2.0, rtol=1e-14)


def test_gamma_periodicity_and_reality():
    spec = spectrum(FIG1, ModelOrder.ORDER8)
    period = np.pi / FIG1.omega
    ts = np.linspace(0.0, period, 97)
    g0 = gamma_t(ts, spec, FIG1)
    g1 = gamma_t(ts + period, spec, FIG1)
    np.testing.assert_allclose(g0, g1, rtol=1e-12)
    gb = gamma_bar(ts, spec, FIG1)
    assert np.all(gb > 0.0)
    # physical rate is even in the drive field: gbar(t) = gbar(period - t)
    np.testing.assert_allclose(gb, gamma_bar(period - ts, spec, FIG1), rtol=1e-10)


def test_gamma_bar_frozen_value():
    spec = spectrum(FIG1, ModelOrder.ORDER8)
    assert gamma_bar(0.0, spec, FIG1) == pytest.approx(1.3297088080280104, rel=1e-12)


@given(
    delta=st.floats(min_value=-50.0, max_value=50.0),
    t=st.floats(min_value=0.0, max_value=20.0),
)
@settings(max_examples=60, deadline=None)
def test_phase_shift_covariance(delta, t):
    # shifting the drive phase by delta equals shifting time by delta/omega
    base = DriveParams(omega0=8000.0, omega=1.0, rabi=400.0, phase=0.2)
    shifted = DriveParams(omega0=8000.0, omega=1.0, rabi=400.0, phase=0.2 + delta)
    spec_b = spectrum(base, ModelOrder.ORDER8)
    spec_s = spectrum(shifted, ModelOrder.ORDER8)
    g_roll = gamma_t(t + delta / base.omega, spec_b, base)
    g_shift = gamma_t(t, spec_s, shifted)
    assert g_roll == pytest.approx(g_shift, rel=1e-9, abs=1e-12)


def test_order_consistency_scales_as_x4():
    # order-8 and order-2 rates agree to O(x^4): slope of the max difference
    # across a decade of x sits near 4
    pol = TruncationPolicy(tail_tol=1e-12)
    xs = [0.4, 0.2, 0.1, 0.05]
    diffs = []
    ts = np.linspace(0.0, np.pi, 257)
    for x in xs:
        p = DriveParams(omega0=8000.0, omega=1.0, rabi=4000.0 * x)
        g2 = gamma_t(ts, spectrum(p, ModelOrder.ORDER2, pol), p)
        g8 = gamma_t(ts, spectrum(p, ModelOrder.ORDER8, pol), p)
        diffs.append(np.abs(g8 - g2).max())
    slope = np.polyfit(np.log(xs), np.log(diffs), 1)[0]
    assert 3.5 < slope < 4.5, f"slope={slope}, diffs={diffs}"


def test_standard_order_has_no_spectrum():
    with pytest.raises((RegimeError, ValueError)):
        spectrum(FIG1, ModelOrder.STANDARD)
