"""Two-level state, rotated-frame operator algebra, and the integrators.

Basis ordering is (excited, ground) everywhere.  The moving frame is the
y-axis SU(2) rotation by theta(t); in that frame the quasi-spin operators
are represented by the standard spin matrices, the initial lab-frame
excited state becomes the theta(0)-rotated projector, and the measured
inversion is rotated back per sample:

    <S_z>_lab = cos(2 theta) <R_z> + sin(2 theta) Re <R^+>.

The master equation is integrated in its Schrodinger-picture dual

    drho/dt = -i [H0, rho] + g(t) (R- rho R+ - rho R+ R-)
                            + g*(t) (R- rho R+ - R+ R- rho),

which is trace-free and Hermiticity-preserving for any complex g; the
imaginary part of g acts as a frequency shift on the coherences.  The
adjoint-duality test suite pins this form against the operator
(Heisenberg) form trace-by-trace.
"""

from __future__ import annotations

import math
import time as _time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp

from . import _kernels
from .errors import InvariantBreach, NumericalFailure
from .params import (
    DerivedParams,
    DriveParams,
    ModelOrder,
    derive,
    drive_phase,
    theta,
)
from .rates import HarmonicSpectrum, TruncationPolicy, gamma_bar, harmonic_amplitudes, select_truncation
from .bessel import bessel_jn_all

# Invariant tolerances on reported states.
TRACE_TOL = 1e-9
HERM_TOL = 1e-9
EIG_FLOOR = -1e-8
SZ_SLACK = 1e-6

DEFAULT_GRID_POINTS = 2000


class SpinOps:
    """Spin-1/2 matrices in the (excited, ground) basis, plus their rotated
    images.  Rz/Rplus/Rminus(theta) reduce to the static set at theta = 0 and
    satisfy the SU(2) algebra for every angle."""

    Sz = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
    Splus = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    Sminus = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

    @staticmethod
    def rotation(angle: float) -> np.ndarray:
        """Real rotation matrix G(theta): the frame map rho_rot = G rho G^T."""
        c, s = math.cos(angle), math.sin(angle)
        return np.array([[c, -s], [s, c]], dtype=complex)

    @classmethod
    def Rz(cls, angle: float) -> np.ndarray:
        g = cls.rotation(angle)
        return g @ cls.Sz @ g.conj().T

    @classmethod
    def Rplus(cls, angle: float) -> np.ndarray:
        g = cls.rotation(angle)
        return g @ cls.Splus @ g.conj().T

    @classmethod
    def Rminus(cls, angle: float) -> np.ndarray:
        g = cls.rotation(angle)
        return g @ cls.Sminus @ g.conj().T


@dataclass
class QubitState:
    """Density matrix in the moving frame at time t (units of 1/gamma)."""

    rho: np.ndarray
    t: float

    def residuals(self) -> tuple[float, float, float]:
        """(|trace-1|, max|rho - rho^dag|, min eigenvalue)."""
        tr = abs(self.rho[0, 0] + self.rho[1, 1] - 1.0)
        herm = float(np.abs(self.rho - self.rho.conj().T).max())
        eig = float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T)).min())
        return float(tr), herm, eig


@dataclass(frozen=True)
class Trajectory:
    """A completed run on a uniform reporting grid (times in 1/gamma)."""

    grid: np.ndarray
    sz: np.ndarray
    gbar: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)


def initial_state(p: DriveParams, order: ModelOrder) -> QubitState:
    """Lab-frame excited state, rotated into the moving frame at t = 0
    (used directly for the standard model)."""
    if order is ModelOrder.STANDARD:
        rho = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    else:
        th = float(theta(p, 0.0))
        c, s = math.cos(th), math.sin(th)
        rho = np.array([[c * c, c * s], [s * c, s * s]], dtype=complex)
    return QubitState(rho=rho, t=0.0)


def sz_lab(state: QubitState, p: DriveParams, order: ModelOrder | None = None) -> float:
    """Lab-frame inversion <S_z> from a moving-frame state.

    For the standard model (order=STANDARD) the state already lives in the
    lab frame and the trace is taken directly.
    """
    rho = state.rho
    rz = float(np.real(rho[0, 0] - rho[1, 1])) * 0.5
    if order is ModelOrder.STANDARD:
        return rz
    th = float(theta(p, state.t))
    rplus = rho[1, 0]  # tr(rho S+)
    return math.cos(2.0 * th) * rz + math.sin(2.0 * th) * float(np.real(rplus))


class _H0Series:
    """Evaluator for the coherent (odd-photon) Hamiltonian in the moving frame.

    Off-resonant at every figure parameter set — its phase runs at the
    shifted transition frequency — so integrations skip it by default; the
    include_h0 flag keeps it falsifiable.
    """

    def __init__(self, d: DerivedParams, p: DriveParams, order: ModelOrder,
                 policy: TruncationPolicy | None = None):
        if order is ModelOrder.STANDARD:
            raise ValueError("the standard model has no moving-frame Hamiltonian")
        policy = policy or TruncationPolicy()
        self.p = p
        self.d = d
        self.order = order
        if order is ModelOrder.ORDER2:
            axes = [(d.eta, -2)]
            self.carrier = d.omega0_bar
        else:
            axes = [(d.eta_bar, -2), (d.xi_bar, 4), (d.beta_bar, -6), (d.rho, 8)]
            self.carrier = d.omega0_tilde
        self.axes = []
        for arg, mult in axes:
            n0 = select_truncation(arg, p, policy)
            top = n0 - 1
            idx = np.arange(-top, top + 1)
            pos = bessel_jn_all(top, arg)
            j = pos[np.abs(idx)].astype(float).copy()
            j[(idx < 0) & (np.abs(idx) % 2 == 1)] *= -1.0
            self.axes.append((idx, j, mult))

    def _amplitude(self, t: float) -> complex:
        p, d = self.p, self.d
        phi = float(drive_phase(p, t))
        x = d.x
        if self.order is ModelOrder.ORDER2:
            alpha = (p.omega * p.rabi / p.omega0) * math.sin(phi)
            dyn = d.eta * math.sin(2.0 * phi)
        else:
            c2 = (x * math.cos(phi)) ** 2
            alpha = 0.5 * x * p.omega * math.sin(phi) * (1.0 - c2 + c2**2 - c2**3)
            dyn = (
                d.eta_bar * math.sin(2.0 * phi)
                - d.xi_bar * math.sin(4.0 * phi)
                + d.beta_bar * math.sin(6.0 * phi)
                - d.rho * math.sin(8.0 * phi)
            )
        series = 1.0 + 0.0j
        for idx, j, mult in self.axes:
            series *= np.dot(j, np.exp(1j * mult * idx * phi))
        return alpha * series * np.exp(-1j * (self.carrier * t - dyn))

    def matrix(self, t: float) -> np.ndarray:
        """H0(t)/hbar = i z(t) R^- + H.c. — Hermitian by construction."""
        z = self._amplitude(t)
        return np.array([[0.0, -1j * np.conj(z)], [1j * z, 0.0]], dtype=complex)


def h0_coherent(
    t: float,
    d: DerivedParams,
    p: DriveParams,
    order: ModelOrder,
    policy: TruncationPolicy | None = None,
) -> np.ndarray:
    """Moving-frame coherent Hamiltonian (over hbar) at time t."""
    return _H0Series(d, p, order, policy).matrix(t)


def lindblad_rhs(state: QubitState, rate: complex, h0: np.ndarray | None = None) -> np.ndarray:
    """Schrodinger-picture dual right-hand side; trace-free for any rate."""
    r = state.rho
    g = complex(rate)
    gbar = 2.0 * g.real
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = -gbar * r[0, 0]
    out[0, 1] = -np.conj(g) * r[0, 1]
    out[1, 0] = -g * r[1, 0]
    out[1, 1] = gbar * r[0, 0]
    if h0 is not None:
        out += -1j * (h0 @ r - r @ h0)
    return out


def _solve(fun, t_span, y0, t_eval, tol, max_step, args=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # DOP853 warns on its own coarse first step
        sol = solve_ivp(
            fun,
            t_span,
            y0,
            method="DOP853",
            t_eval=t_eval,
            rtol=tol,
            atol=1e-12,
            max_step=max_step,
            args=args,
            dense_output=False,
        )
    if not sol.success:
        raise NumericalFailure(f"integrator aborted at t = {sol.t[-1]:.6g}: {sol.message}")
    return sol


def integrate_rotated(
    p: DriveParams,
    spec: HarmonicSpectrum,
    grid: np.ndarray,
    tol: float = 1e-9,
    include_h0: bool = False,
    h0: _H0Series | None = None,
) -> np.ndarray:
    """Integrate the moving-frame master equation; returns rho on the grid
    as an (n, 2, 2) complex array."""
    state0 = initial_state(p, spec.order)
    y0 = state0.rho.reshape(4)
    gpref = 0.5 * p.gamma
    max_step = math.pi / (50.0 * p.omega)
    if include_h0:
        if h0 is None:
            raise ValueError("include_h0 requires a built _H0Series")
        max_step = min(max_step, 0.1 / h0.carrier)

        def fun(t, y):
            g = gpref * _kernels.series_product(
                p.omega * t + p.phase, spec.a, spec.b, spec.k_min
            )
            out = lindblad_rhs(QubitState(rho=y.reshape(2, 2), t=t), g, h0.matrix(t))
            return out.reshape(4)

        sol = _solve(fun, (grid[0], grid[-1]), y0, grid, tol, max_step)
    else:
        sol = _solve(
            _kernels.rotated_rhs,
            (grid[0], grid[-1]),
            y0,
            grid,
            tol,
            max_step,
            args=(p.omega, p.phase, gpref, spec.a, spec.b, spec.k_min),
        )
    return sol.y.T.reshape(-1, 2, 2)


def integrate_standard(
    omega0: float,
    omega: float,
    rabi: float,
    phase: float,
    gamma: float,
    grid: np.ndarray,
    tol: float = 1e-9,
) -> np.ndarray:
    """Integrate the constant-rate reference model in its exact scalar
    (Bloch) closure; returns rho on the grid as (n, 2, 2) complex.

    Takes raw parameters rather than DriveParams so that regime-free
    configurations (e.g. gamma = 0 unitary checks) can be driven directly.
    """
    y0 = np.array([1.0 + 0.0j, 0.0 + 0.0j])
    max_step = min(1.5 / omega0, (grid[-1] - grid[0]) / 16.0)
    sol = _solve(
        _kernels.standard_rhs,
        (grid[0], grid[-1]),
        y0,
        grid,
        tol,
        max_step,
        args=(omega0, omega, phase, rabi, gamma),
    )
    pop = sol.y[0]
    coh = sol.y[1]
    rho = np.empty((len(grid), 2, 2), dtype=complex)
    rho[:, 0, 0] = pop
    rho[:, 0, 1] = coh
    rho[:, 1, 0] = np.conj(coh)
    rho[:, 1, 1] = 1.0 - pop
    return rho


def _diagnose(rhos: np.ndarray, grid: np.ndarray) -> dict:
    tr = np.abs(rhos[:, 0, 0] + rhos[:, 1, 1] - 1.0)
    herm = np.abs(rhos - np.conj(np.transpose(rhos, (0, 2, 1)))).reshape(len(grid), -1).max(axis=1)
    sym = 0.5 * (rhos + np.conj(np.transpose(rhos, (0, 2, 1))))
    eigmin = np.linalg.eigvalsh(sym)[:, 0]
    return {"trace": tr, "herm": herm, "eig_min": eigmin}


def _enforce(diag: dict, sz: np.ndarray, grid: np.ndarray) -> None:
    bad = (
        (diag["trace"] > TRACE_TOL)
        | (diag["herm"] > HERM_TOL)
        | (diag["eig_min"] < EIG_FLOOR)
        | (np.abs(sz) > 0.5 + SZ_SLACK)
    )
    if bad.any():
        i = int(np.argmax(bad))
        raise InvariantBreach(
            f"state invariants breached at t = {grid[i]:.6g}: trace residual "
            f"{diag['trace'][i]:.3g}, hermiticity {diag['herm'][i]:.3g}, min "
            f"eigenvalue {diag['eig_min'][i]:.3g}, sz {sz[i]:.6g}"
        )


def evolve(
    p: DriveParams,
    order: ModelOrder,
    t_end: float,
    tol: float = 1e-9,
    include_h0: bool = False,
    n_points: int = DEFAULT_GRID_POINTS,
    policy: TruncationPolicy | None = None,
) -> Trajectory:
    """Run one trajectory from the excited state to t_end (units of 1/gamma).

    Adaptive integration (DOP853) with local relative error ``tol``;
    reported on a uniform grid of ``n_points`` samples.  Raises
    NumericalFailure if the integrator aborts and InvariantBreach if the
    reported states violate trace/Hermiticity/positivity tolerances.
    """
    if t_end <= 0.0:
        raise ValueError("t_end must be > 0")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    p = p.scaled()
    d = derive(p, order)
    grid = np.linspace(0.0, float(t_end), int(n_points))
    started = _time.perf_counter()

    if order is ModelOrder.STANDARD:
        rhos = integrate_standard(p.omega0, p.omega, p.rabi, p.phase, p.gamma, grid, tol)
        sz = np.real(rhos[:, 0, 0]) - 0.5
        gbar_over_gamma = np.ones_like(grid)
        trunc = {}
        representation = "bloch"
    else:
        spec = harmonic_amplitudes(d, p, order, policy)
        h0 = _H0Series(d, p, order, policy) if include_h0 else None
        rhos = integrate_rotated(p, spec, grid, tol, include_h0, h0)
        th = np.asarray(theta(p, grid))
        rz = 0.5 * np.real(rhos[:, 0, 0] - rhos[:, 1, 1])
        sz = np.cos(2.0 * th) * rz + np.sin(2.0 * th) * np.real(rhos[:, 1, 0])
        gbar_over_gamma = gamma_bar(grid, spec, p) / p.gamma
        trunc = spec.meta["truncation"]
        representation = "density-matrix"

    diag = _diagnose(rhos, grid)
    _enforce(diag, sz, grid)

    meta = {
        "order": order.value,
        "params": {
            "omega0": p.omega0,
            "omega": p.omega,
            "rabi": p.rabi,
            "phase": p.phase,
            "gamma": p.gamma,
        },
        "derived": {k: getattr(d, k) for k in (
            "x", "eta", "xi", "beta", "rho", "eta_bar", "xi_bar", "beta_bar",
            "omega0_bar", "omega0_tilde")},
        "t_end": float(t_end),
        "tol": float(tol),
        "include_h0": bool(include_h0),
        "n_points": int(n_points),
        "truncation": trunc,
        "representation": representation,
        "wall_s": _time.perf_counter() - started,
    }
    return Trajectory(grid=grid, sz=sz, gbar=gbar_over_gamma, diagnostics=diag, meta=meta)


def exponential_law(t, gamma: float = 1.0):
    """The undriven reference -1/2 + exp(-gamma t)."""
    return -0.5 + np.exp(-gamma * np.asarray(t, dtype=float))


def analytic_limit(
    p: DriveParams,
    t: float,
    order: ModelOrder = ModelOrder.ORDER2,
    policy: TruncationPolicy | None = None,
    collapsed: bool = False,
) -> float:
    """Quadrature form of the few-photon decay law,
    -1/2 + exp(-2 int_0^t Re gamma), or the fully collapsed -1/2 + e^{-t}.

    Meant for the eta < 1 regime; warns outside it.
    """
    p = p.scaled()
    if collapsed:
        return float(exponential_law(t, p.gamma))
    d = derive(p, order)
    if d.eta >= 1.0:
        warnings.warn(
            f"analytic_limit called at eta = {d.eta:.3g} >= 1; the closed form "
            "is a few-photon result",
            stacklevel=2,
        )
    spec = harmonic_amplitudes(d, p, order, policy)
    integrand = lambda tau: gamma_bar(tau, spec, p)
    total, _ = quad(integrand, 0.0, float(t), limit=400)
    return -0.5 + math.exp(-total)
