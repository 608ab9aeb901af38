"""End-to-end acceptance suite.

Each test exercises one shipped promise at its stated tolerance, then
appends a one-line PASS/FAIL verdict — with the measured value and wall
time — to the summary pytest prints after the run (see conftest).

Execution order matters in one place: the state-invariant audit walks
every trajectory collected by the earlier tests, so it is *defined* last
(pytest runs tests within a file in definition order).
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, ACCEPTANCE_TRAJECTORIES
from _oracles import (
    bessel_ref,
    gamma_double_sum,
    heisenberg_rhs,
    random_density,
    spectrum_brute_order8,
)
from qudecay.bessel import bessel_jn_all
from qudecay.dynamics import QubitState, evolve, exponential_law, lindblad_rhs
from qudecay.params import DriveParams, ModelOrder, derive, drive_phase
from qudecay.rates import (
    TruncationPolicy,
    gamma_bar,
    gamma_t,
    harmonic_amplitudes,
    select_truncation,
)
from qudecay.scenarios import compare, dominant_frequency, preset, run
from dataclasses import replace


def _verdict(num, name: str, ok: bool, detail: str, wall: float, cap: float) -> None:
    status = "PASS" if ok and wall < cap else "FAIL"
    ACCEPTANCE_LINES.append(
        f"{status} [{num:>2}] {name}: {detail}; wall {wall:.2f}s (cap {cap:g}s)"
    )
    assert ok, f"criterion {num} ({name}): {detail}"
    assert wall < cap, f"criterion {num} ({name}) exceeded its time budget: {wall:.2f}s"


def test_01_undriven_exponential_limit():
    # with the drive off, every model must reproduce -1/2 + e^{-t}
    p = DriveParams(omega0=1000.0, omega=0.05, rabi=0.0)
    t0 = time.perf_counter()
    worst = 0.0
    for order in (ModelOrder.ORDER2, ModelOrder.ORDER8, ModelOrder.STANDARD):
        traj = evolve(p, order, t_end=5.0, n_points=500)
        ACCEPTANCE_TRAJECTORIES[f"undriven-{order.value}"] = traj
        worst = max(worst, float(np.abs(traj.sz - exponential_law(traj.grid)).max()))
    wall = time.perf_counter() - t0
    _verdict(1, "undriven exponential limit", worst <= 1e-6,
             f"max dev {worst:.3g} <= 1e-06 across all three models", wall, 1.0)


def test_02_weak_drive_keeps_exponential_law():
    # x = 0.01, eta = 0.1: the decay law must stay within 1% of undriven
    t0 = time.perf_counter()
    traj = run(preset("sec3a"))
    ACCEPTANCE_TRAJECTORIES["sec3a"] = traj
    dev = float(np.abs(traj.sz - exponential_law(traj.grid)).max())
    wall = time.perf_counter() - t0
    _verdict(2, "weak-drive regime keeps the exponential law", dev < 0.01,
             f"max |sz - undriven| = {dev:.3g} < 0.01", wall, 10.0)


def test_03_weak_drive_rate_closed_form():
    # lowest-order truncation of the rate against its closed form
    # (gamma/2)(1 - (eta^2/2) cos 4phi), bound 10*gamma*eta^4
    p = preset("sec3a").params
    t0 = time.perf_counter()
    d = derive(p, ModelOrder.ORDER2)
    spec = harmonic_amplitudes(d, p, ModelOrder.ORDER2, TruncationPolicy(hard_cap=2))
    ts = np.linspace(0.0, np.pi / p.omega, 256, endpoint=False)
    phi = drive_phase(p, ts)
    closed = 0.5 * p.gamma * (1.0 - 0.5 * d.eta**2 * np.cos(4.0 * phi))
    dev = float(np.abs(gamma_t(ts, spec, p) - closed).max())
    bound = 10.0 * p.gamma * d.eta**4
    wall = time.perf_counter() - t0
    _verdict(3, "weak-drive rate closed form", dev < bound,
             f"max |gamma(t) - closed form| = {dev:.3g} < {bound:.1g} over 256 phases",
             wall, 1.0)


def test_04_harmonic_collapse_oracle():
    # the convolution build of the order-8 spectrum against literal 4-index
    # enumeration (every axis truncated at n0 = 3), then the factorized
    # rate against the literal double sum
    p = DriveParams(omega0=1000.0, omega=2.5, rabi=400.0)
    t0 = time.perf_counter()
    d = derive(p, ModelOrder.ORDER8)
    pol = TruncationPolicy(hard_cap=3)
    n0s = [select_truncation(a, p, pol)
           for a in (d.eta_bar, d.xi_bar, abs(d.beta_bar), d.rho)]
    assert n0s == [3, 3, 3, 3]  # the clamp pins every axis
    spec = harmonic_amplitudes(d, p, ModelOrder.ORDER8, pol)
    brute = spectrum_brute_order8(d, (3, 3, 3, 3))
    amax = float(np.abs(spec.a).max())
    ks = sorted(set(brute) | set(int(k) for k in spec.ks))
    rel = max(
        abs(spec.amplitude(k) - brute.get(k, 0.0))
        / max(abs(brute.get(k, 0.0)), 1e-12 * amax)
        for k in ks
    )

    spec_full = harmonic_amplitudes(d, p, ModelOrder.ORDER8)
    ts = np.linspace(0.0, np.pi / p.omega, 32, endpoint=False)
    fact = gamma_t(ts, spec_full, p)
    direct = gamma_double_sum(ts, spec_full, p)
    rel_rate = float(np.max(np.abs(fact - direct) / np.abs(direct)))
    wall = time.perf_counter() - t0
    _verdict(4, "harmonic-collapse oracle", rel <= 1e-12 and rel_rate <= 1e-12,
             f"spectrum vs enumeration rel {rel:.3g}, factorized rate vs "
             f"double sum rel {rel_rate:.3g}, both <= 1e-12", wall, 10.0)


def test_05_adjoint_duality(rng):
    # Schroedinger-picture generator against the adjoint (Heisenberg) form,
    # trace by trace, for random states, observables and complex rates
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        rho = random_density(rng)
        q = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        g = complex(rng.normal(), rng.normal())
        lhs = np.trace(lindblad_rhs(QubitState(rho=rho, t=0.0), g) @ q)
        worst = max(worst, abs(lhs - heisenberg_rhs(rho, q, g)))
    wall = time.perf_counter() - t0
    _verdict(5, "adjoint duality", worst <= 1e-12,
             f"max trace mismatch {worst:.3g} <= 1e-12 over 1000 random triples",
             wall, 5.0)


def test_06_strong_slow_drive_departure():
    # fig1a working point: the decay law departs visibly from undriven
    t0 = time.perf_counter()
    traj = run(preset("fig1a"))
    ACCEPTANCE_TRAJECTORIES["fig1a"] = traj
    early = traj.grid <= 2.0
    dep = float(np.abs(traj.sz - exponential_law(traj.grid))[early].max())
    wall = time.perf_counter() - t0
    _verdict(6, "strong slow drive departs from undriven decay", dep > 0.05,
             f"max departure {dep:.3g} > 0.05 within t <= 2", wall, 300.0)


def test_07_late_time_drive_following():
    # fig1b horizon: late in the decay the signal locks to the drive; the
    # dominant nonzero Fourier bin of the final quarter sits at 2*omega
    # to within one bin
    t0 = time.perf_counter()
    traj = run(preset("fig1b"))
    ACCEPTANCE_TRAJECTORIES["fig1b"] = traj
    freq, bin_width = dominant_frequency(traj.grid, traj.sz)
    target = 2.0 * preset("fig1b").params.omega
    wall = time.perf_counter() - t0
    _verdict(7, "late-time tail follows the drive",
             freq > 0.0 and abs(freq - target) <= bin_width,
             f"dominant bin at {freq:.3g} rad/t, |{freq:.3g} - 2*omega={target:.3g}| "
             f"<= bin {bin_width:.3g}", wall, 600.0)


def test_08_rate_periodic_and_enhanced():
    # scaled physical rate at the fig4 working point: exactly pi/omega
    # periodic, and on average above the undriven rate
    p = preset("fig4").params
    t0 = time.perf_counter()
    d = derive(p, ModelOrder.ORDER8)
    spec = harmonic_amplitudes(d, p, ModelOrder.ORDER8)
    period = np.pi / p.omega
    ts = np.linspace(0.0, period, 1024, endpoint=False)
    one = gamma_bar(ts, spec, p)
    two = gamma_bar(ts + period, spec, p)
    rel = float(np.max(np.abs(one - two) / np.abs(one)))
    mean = float(one.mean()) / p.gamma
    wall = time.perf_counter() - t0
    _verdict(8, "rate is pi/omega-periodic and enhanced",
             rel <= 1e-8 and mean > 1.0,
             f"two periods match to rel {rel:.3g} <= 1e-08; period-average "
             f"gbar/gamma = {mean:.4f} > 1", wall, 60.0)


def test_09a_model_comparison_moderate_frequency():
    # omega comparable to gamma: the transformed model decays faster early
    t0 = time.perf_counter()
    rep = compare(preset("fig3a"), preset("fig3b"))
    ACCEPTANCE_TRAJECTORIES["fig3a-sz"] = rep.series["fig3a"]
    ACCEPTANCE_TRAJECTORIES["fig3b-sz"] = rep.series["fig3b"]
    m = rep.metrics
    hl = m["half_life"]
    ok = (
        m["max_abs_diff"] > 0.0
        and m["early_mean_diff"] < 0.0
        and hl["fig3a"] < hl["fig3b"]
    )
    wall = time.perf_counter() - t0
    _verdict("9a", "transformed model decays faster at omega ~ gamma", ok,
             f"early mean diff {m['early_mean_diff']:.3g} < 0; envelope "
             f"half-lives {hl['fig3a']:.3f} < {hl['fig3b']:.3f}; max |diff| "
             f"{m['max_abs_diff']:.3g} > 0", wall, 300.0)


def test_09b_model_comparison_slow_drive_similarity():
    # omega = 0.05*gamma: both models give closely similar decay curves.
    # The reference model also carries optical-carrier ringing (frequency
    # ~omega0, amplitude ~0.2-0.4 early on) that no figure-scale grid
    # resolves; curve similarity is therefore measured between the
    # drive-cycle-averaged curves, and the raw grid-sample difference is
    # reported alongside.
    t0 = time.perf_counter()
    a = preset("fig1a")
    b = replace(a, name="fig1a-standard", order=ModelOrder.STANDARD)
    rep = compare(a, b)
    ACCEPTANCE_TRAJECTORIES["fig1a-cmp-sz"] = rep.series["fig1a"]
    ACCEPTANCE_TRAJECTORIES["fig1a-standard-sz"] = rep.series["fig1a-standard"]
    env = rep.metrics["envelope_max_diff"]
    raw = rep.metrics["max_abs_diff"]
    wall = time.perf_counter() - t0
    _verdict("9b", "models agree at slow drive (cycle-averaged curves)", env < 0.1,
             f"max envelope diff {env:.3g} < 0.1 (raw grid samples up to "
             f"{raw:.3g} from unresolved carrier ringing)", wall, 300.0)


def test_10_bessel_core_identities():
    t0 = time.perf_counter()
    # normalization: J_0 + 2 sum J_2m = 1, summed well past the turning point
    worst_norm = 0.0
    for z in (0.5, 32.0, 250.0, 1600.0):
        nmax = int(z) + 80 + int(10.0 * z ** (1.0 / 3.0))
        j = bessel_jn_all(nmax, z)
        worst_norm = max(worst_norm, abs(j[0] + 2.0 * j[2::2].sum() - 1.0))

    # three-term recurrence at the fig1 drive argument, orders up to 2000
    z = 1600.0
    j = bessel_jn_all(2001, z)
    n = np.arange(1, 2000)
    worst_rec = float(np.abs(j[n - 1] + j[n + 1] - (2.0 * n / z) * j[n]).max())

    # Jacobi-Anger closure at z = 32 over 64 phases
    z = 32.0
    nmax = int(z) + 80 + int(10.0 * z ** (1.0 / 3.0))
    j = bessel_jn_all(nmax, z)
    psi = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    orders = np.arange(-nmax, nmax + 1)
    jn = np.where(orders < 0, np.where(orders % 2 == 0, 1.0, -1.0), 1.0) * j[np.abs(orders)]
    series = np.exp(1j * np.outer(psi, orders)) @ jn
    worst_ja = float(np.abs(series - np.exp(1j * z * np.sin(psi))).max())

    ok = worst_norm <= 1e-10 and worst_rec <= 1e-10 and worst_ja <= 1e-8
    wall = time.perf_counter() - t0
    _verdict(10, "Bessel core identities", ok,
             f"normalization {worst_norm:.3g} <= 1e-10, recurrence "
             f"{worst_rec:.3g} <= 1e-10, Jacobi-Anger {worst_ja:.3g} <= 1e-8",
             wall, 10.0)
    # spot-check one library value while we are here
    assert j[1] == pytest.approx(bessel_ref(1, 32.0), rel=1e-12)


def test_11_state_invariants_audit():
    # walks every trajectory the earlier tests produced; must be defined
    # after all of them
    t0 = time.perf_counter()
    assert len(ACCEPTANCE_TRAJECTORIES) >= 8, "earlier criteria did not run"
    worst = {"trace": 0.0, "herm": 0.0, "eig": 0.0, "sz": 0.0}
    n_pts = 0
    for label, obj in ACCEPTANCE_TRAJECTORIES.items():
        if hasattr(obj, "diagnostics"):
            diag = obj.diagnostics
            worst["trace"] = max(worst["trace"], float(diag["trace"].max()))
            worst["herm"] = max(worst["herm"], float(diag["herm"].max()))
            worst["eig"] = max(worst["eig"], float(-diag["eig_min"].min()))
            sz = obj.sz
        else:
            sz = np.asarray(obj)
        worst["sz"] = max(worst["sz"], float(np.abs(sz).max()))
        n_pts += len(sz)
    ok = (
        worst["trace"] <= 1e-9
        and worst["herm"] <= 1e-9
        and worst["eig"] <= 1e-8
        and worst["sz"] <= 0.5 + 1e-6
    )
    wall = time.perf_counter() - t0
    _verdict(11, "state invariants across all runs", ok,
             f"{n_pts} states from {len(ACCEPTANCE_TRAJECTORIES)} runs: trace dev "
             f"{worst['trace']:.2g} <= 1e-9, herm {worst['herm']:.2g} <= 1e-9, "
             f"negativity {worst['eig']:.2g} <= 1e-8, max |sz| "
             f"{worst['sz']:.7f} <= 0.5+1e-6", wall, 60.0)
