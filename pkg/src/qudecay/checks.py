"""Self-contained invariant suite behind ``qudecay check``.

Quick structural checks (a few seconds, no long integrations): operator
algebra, Bessel identities, rate reality/periodicity, adjoint duality of
the dissipator, and frame round-trips.  Each check returns its name, a
pass flag, and a one-line detail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_jn_all
from .dynamics import QubitState, SpinOps, initial_state, lindblad_rhs, sz_lab
from .params import DriveParams, ModelOrder, derive
from .rates import TruncationPolicy, gamma_t, harmonic_amplitudes, select_truncation


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_rho(rng) -> np.ndarray:
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def check_su2_algebra(n_angles: int = 100, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for angle in rng.uniform(-np.pi, np.pi, n_angles):
        rp, rm, rz = SpinOps.Rplus(angle), SpinOps.Rminus(angle), SpinOps.Rz(angle)
        worst = max(
            worst,
            float(np.abs(rp @ rm - rm @ rp - 2.0 * rz).max()),
            float(np.abs(rz @ rp - rp @ rz - rp).max()),
            float(np.abs(rz @ rm - rm @ rz + rm).max()),
        )
    at_zero = max(
        float(np.abs(SpinOps.Rz(0.0) - SpinOps.Sz).max()),
        float(np.abs(SpinOps.Rplus(0.0) - SpinOps.Splus).max()),
    )
    ok = worst < 1e-14 and at_zero == 0.0
    return CheckResult("su2-algebra", ok, f"max commutator residual {worst:.2e}")


def check_bessel_normalization() -> CheckResult:
    worst = 0.0
    for z in (0.1, 1.0, 32.0, 1600.0):
        top = int(z + 10.0 * z ** (1.0 / 3.0) + 60)
        j = bessel_jn_all(top, z)
        worst = max(worst, abs(j[0] + 2.0 * j[2::2].sum() - 1.0))
    return CheckResult("bessel-normalization", worst < 1e-10, f"worst |sum - 1| = {worst:.2e}")


def check_jacobi_anger(z: float = 32.0) -> CheckResult:
    p = DriveParams(omega0=1000.0, omega=0.05, rabi=400.0)
    n0 = select_truncation(z, p, TruncationPolicy())
    j = bessel_jn_all(n0, z)
    worst = 0.0
    for phi in np.linspace(0.0, np.pi, 64):
        total = j[0] + 0.0j
        for n in range(1, n0 + 1):
            term = j[n] * np.exp(2j * n * phi)
            total += term + (-1) ** n * np.conj(term)
        worst = max(worst, abs(total - np.exp(1j * z * math.sin(2.0 * phi))))
    return CheckResult("jacobi-anger-closure", worst < 1e-8, f"worst residual {worst:.2e}")


def check_adjoint_duality(n_triples: int = 200, seed: int = 11) -> CheckResult:
    rng = np.random.default_rng(seed)
    rp, rm = SpinOps.Splus, SpinOps.Sminus
    worst = 0.0
    for _ in range(n_triples):
        rho = _random_rho(rng)
        q = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q = q + q.conj().T
        g = complex(rng.normal(), rng.normal())
        rhodot = lindblad_rhs(QubitState(rho=rho, t=0.0), g)
        lhs = np.trace(rhodot @ q)
        rhs = -g * np.trace(rho @ (rp @ (rm @ q - q @ rm))) - np.conj(g) * np.trace(
            rho @ ((q @ rp - rp @ q) @ rm)
        )
        worst = max(worst, abs(lhs - rhs), abs(np.trace(rhodot)))
    return CheckResult("adjoint-duality", worst < 1e-12, f"worst trace mismatch {worst:.2e}")


def check_rate_structure() -> CheckResult:
    p = DriveParams(omega0=8000.0, omega=1.0, rabi=40.0)
    d = derive(p, ModelOrder.ORDER2)
    spec = harmonic_amplitudes(d, p, ModelOrder.ORDER2)
    t = np.linspace(0.0, 2.0 * np.pi / p.omega, 37)
    g = gamma_t(t, spec, p)
    gbar = 2.0 * np.real(g)
    period = np.pi / p.omega
    g2 = gamma_t(t + period, spec, p)
    periodic = float(np.abs(g2 - g).max())
    undriven = DriveParams(omega0=8000.0, omega=1.0, rabi=0.0)
    du = derive(undriven, ModelOrder.ORDER2)
    su = harmonic_amplitudes(du, undriven, ModelOrder.ORDER2)
    flat = abs(gamma_t(0.37, su, undriven) - 0.5 * undriven.gamma)
    ok = periodic < 1e-12 and flat < 1e-14 and np.all(gbar > 0.0)
    return CheckResult(
        "rate-structure", ok,
        f"periodicity {periodic:.2e}, undriven offset {flat:.2e}, min gbar {gbar.min():.3g}",
    )


def check_frame_roundtrip() -> CheckResult:
    p = DriveParams(omega0=1000.0, omega=0.05, rabi=400.0)
    s0 = initial_state(p, ModelOrder.ORDER8)
    start = sz_lab(s0, p)
    ok = abs(start - 0.5) < 1e-15
    return CheckResult("frame-roundtrip", ok, f"<S_z>(0) = {start:.15f}")


ALL_CHECKS = (
    check_su2_algebra,
    check_bessel_normalization,
    check_jacobi_anger,
    check_adjoint_duality,
    check_rate_structure,
    check_frame_roundtrip,
)


def run_all() -> list:
    return [fn() for fn in ALL_CHECKS]
