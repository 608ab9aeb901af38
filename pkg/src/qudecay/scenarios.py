"""Named parameter presets, single runs, model comparisons, and sweeps.

The presets encode the figure-scale working points of the model (gamma = 1
units).  Time horizons are not part of the physics; they were chosen as the
smallest windows where the qualitative features are visible and are
recorded per preset in ``notes``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import DEFAULT_GRID_POINTS, Trajectory, evolve, exponential_law
from .errors import QudecayError, RegimeError
from .params import DriveParams, ModelOrder
from .rates import TruncationPolicy

_OUTPUTS = ("sz", "gbar", "residual_exp")


@dataclass(frozen=True)
class ScenarioPreset:
    """An immutable named configuration (gamma = 1 units)."""

    name: str
    params: DriveParams
    order: ModelOrder
    t_end: float
    outputs: tuple = _OUTPUTS
    notes: str = ""


def _build_presets() -> dict:
    fig1 = DriveParams(omega0=1000.0, omega=0.05, rabi=400.0, phase=0.0, gamma=1.0)
    fig3 = DriveParams(omega0=2.2e4, omega=1.1, rabi=8800.0, phase=0.0, gamma=1.0)
    presets = [
        ScenarioPreset(
            "fig1a", fig1, ModelOrder.ORDER8, 4.0,
            notes="x=0.8 working point, slow drive (omega = 0.05 gamma); 4/gamma "
                  "shows the departure from the bare exponential",
        ),
        ScenarioPreset(
            "fig1b", fig1, ModelOrder.ORDER8, 40.0,
            notes="same as fig1a on a 40/gamma horizon: the late-time tail locks "
                  "to the drive (even harmonics of omega)",
        ),
        ScenarioPreset(
            "fig2", DriveParams(omega0=2.0e5, omega=10.0, rabi=8.0e4, phase=0.0, gamma=1.0),
            ModelOrder.ORDER8, 4.0,
            notes="fast drive (omega = 10 gamma) at the same x and omega0/omega",
        ),
        ScenarioPreset(
            "fig3a", fig3, ModelOrder.ORDER8, 4.0,
            notes="omega = 1.1 gamma; transformed model for the side-by-side "
                  "comparison with the constant-rate reference",
        ),
        ScenarioPreset(
            "fig3b", fig3, ModelOrder.STANDARD, 4.0,
            notes="constant-rate reference twin of fig3a",
        ),
        ScenarioPreset(
            "fig4", fig3, ModelOrder.ORDER8, 4.0, outputs=("gbar",),
            notes="scaled physical rate gbar(t)/gamma at the fig3a working point",
        ),
        ScenarioPreset(
            "sec3a", DriveParams(omega0=8000.0, omega=1.0, rabi=40.0, phase=0.0, gamma=1.0),
            ModelOrder.ORDER2, 4.0,
            notes="few-photon regime x=0.01, eta=0.1; omega = 1 gamma chosen so the "
                  "oscillatory residual stays well under 1% of the initial excitation",
        ),
    ]
    return {s.name: s for s in presets}


_PRESETS = _build_presets()


def preset_names() -> list:
    return sorted(_PRESETS)


def preset(name: str) -> ScenarioPreset:
    """Look up an immutable preset by name."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise RegimeError(
            f"unknown preset {name!r}; valid: {', '.join(preset_names())}"
        ) from None


def params_digest(p: DriveParams, order: ModelOrder, t_end: float, tol: float,
                  include_h0: bool, n_points: int) -> str:
    """Stable short hash of a resolved configuration (sweep file naming,
    provenance metadata)."""
    payload = {
        "omega0": p.omega0, "omega": p.omega, "rabi": p.rabi, "phase": p.phase,
        "gamma": p.gamma, "order": order.value, "t_end": t_end, "tol": tol,
        "include_h0": include_h0, "n_points": n_points,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def run(
    sc: ScenarioPreset,
    tol: float = 1e-9,
    include_h0: bool = False,
    n_points: int = DEFAULT_GRID_POINTS,
    policy: TruncationPolicy | None = None,
) -> Trajectory:
    """Evolve a preset and stamp provenance metadata on the result."""
    traj = evolve(sc.params, sc.order, sc.t_end, tol=tol, include_h0=include_h0,
                  n_points=n_points, policy=policy)
    traj.meta["preset"] = sc.name
    traj.meta["outputs"] = list(sc.outputs)
    traj.meta["digest"] = params_digest(
        sc.params.scaled(), sc.order, sc.t_end, tol, include_h0, n_points
    )
    return traj


def dominant_frequency(grid: np.ndarray, series: np.ndarray, window: float = 0.25):
    """Dominant nonzero Fourier component over the trailing ``window``
    fraction of the run.

    The window mean (DC) is removed first.  Returns (frequency, bin_width)
    in angular units per 1/gamma.
    """
    n = len(grid)
    i0 = n - max(int(round(n * window)), 16)
    seg = np.asarray(series[i0:], dtype=float)
    seg = seg - seg.mean()
    spectrum = np.abs(np.fft.rfft(seg))
    j = int(np.argmax(spectrum[1:])) + 1
    dt = grid[1] - grid[0]
    bin_width = 2.0 * np.pi / (len(seg) * dt)
    return j * bin_width, bin_width


def half_life(grid: np.ndarray, sz: np.ndarray) -> float:
    """First time the excitation falls to half its initial value
    (sz crossing 0 from +1/2); nan if it never does."""
    below = np.nonzero(sz <= 0.0)[0]
    if len(below) == 0:
        return float("nan")
    i = int(below[0])
    if i == 0:
        return float(grid[0])
    t0, t1 = grid[i - 1], grid[i]
    s0, s1 = sz[i - 1], sz[i]
    return float(t0 + (0.0 - s0) * (t1 - t0) / (s1 - s0))


_ENVELOPE_WIDTH = 0.3  # smoothing window in units of 1/gamma


def _envelope(grid: np.ndarray, series: np.ndarray) -> np.ndarray:
    """Drive-cycle average of a sampled observable.

    The reference model keeps its optical-carrier ringing (the excited
    state is not an eigenstate of the instantaneous dressed Hamiltonian),
    which a reporting grid of a few thousand points cannot resolve; the
    samples alias into a band around the slow decay envelope.  A boxcar
    much wider than the carrier period but much narrower than 1/gamma
    recovers the envelope that curve-level comparisons are about.
    """
    if len(grid) < 3:
        return series.copy()
    dt = grid[1] - grid[0]
    w = max(1, int(round(_ENVELOPE_WIDTH / dt)))
    if w <= 1:
        return series.copy()
    kernel = np.ones(w) / w
    padded = np.concatenate([
        np.full(w // 2, series[0]), series, np.full(w - 1 - w // 2, series[-1]),
    ])
    return np.convolve(padded, kernel, mode="valid")


@dataclass(frozen=True)
class ComparisonReport:
    """Two trajectories on a shared grid plus figure-level metrics.

    metrics: max_abs_diff (raw pointwise); early_mean_diff (signed mean
    of a-b over t < 2/gamma — negative means the first model decays
    faster); envelope_max_diff (pointwise max between drive-cycle-averaged
    curves, evaluated after the switch-on window so the metric compares
    decay laws rather than carrier ringing); late_frequency and half_life
    per series (half-lives are read off the averaged curves).
    """

    grid: np.ndarray
    series: dict
    metrics: dict


def compare(
    a: ScenarioPreset,
    b: ScenarioPreset,
    tol: float = 1e-9,
    n_points: int = DEFAULT_GRID_POINTS,
    threads: int = 2,
) -> ComparisonReport:
    """Run two presets on a shared grid and compute comparison metrics."""
    pa, pb = a.params.scaled(), b.params.scaled()
    if dataclasses.replace(pa, gamma=1.0) != dataclasses.replace(pb, gamma=1.0):
        raise RegimeError(
            f"presets {a.name!r} and {b.name!r} differ beyond model order; "
            "comparison needs a shared drive configuration"
        )
    t_end = min(a.t_end, b.t_end)
    run_a = replace(a, t_end=t_end)
    run_b = replace(b, t_end=t_end)
    if threads > 1 and a.order is not b.order:
        with ThreadPoolExecutor(max_workers=2) as pool:
            fa = pool.submit(run, run_a, tol, False, n_points)
            fb = pool.submit(run, run_b, tol, False, n_points)
            ta, tb = fa.result(), fb.result()
    else:
        ta = run(run_a, tol, n_points=n_points)
        tb = run(run_b, tol, n_points=n_points)

    grid = ta.grid
    diff = ta.sz - tb.sz
    early = grid < 2.0
    env_a = _envelope(grid, ta.sz)
    env_b = _envelope(grid, tb.sz)
    settled = (grid >= max(0.5, _ENVELOPE_WIDTH)) & (grid <= t_end - 0.5 * _ENVELOPE_WIDTH)
    if not settled.any():
        settled = np.ones_like(grid, dtype=bool)
    fa_late, _ = dominant_frequency(grid, ta.sz)
    fb_late, _ = dominant_frequency(grid, tb.sz)
    metrics = {
        "max_abs_diff": float(np.abs(diff).max()),
        "early_mean_diff": float(diff[early].mean()),
        "envelope_max_diff": float(np.abs(env_a - env_b)[settled].max()),
        "late_frequency": {a.name: float(fa_late), b.name: float(fb_late)},
        "half_life": {
            a.name: half_life(grid, env_a),
            b.name: half_life(grid, env_b),
        },
    }
    return ComparisonReport(grid=grid, series={a.name: ta.sz, b.name: tb.sz}, metrics=metrics)


@dataclass(frozen=True)
class SweepPoint:
    """One sweep configuration: either a trajectory or the error that
    stopped it (per-point failures never abort the sweep)."""

    value: object
    trajectory: Trajectory | None
    error: str | None = None


_SWEEP_AXES = ("rabi", "omega", "phase", "order")


def sweep(
    base: ScenarioPreset,
    axis: str,
    values,
    tol: float = 1e-9,
    n_points: int = DEFAULT_GRID_POINTS,
    threads: int = 4,
) -> list:
    """Run ``base`` once per value of ``axis``, concurrently, order-preserving."""
    if axis not in _SWEEP_AXES:
        raise RegimeError(f"unknown sweep axis {axis!r}; valid: {', '.join(_SWEEP_AXES)}")

    def one(value) -> SweepPoint:
        try:
            if axis == "order":
                sc = replace(base, order=ModelOrder.parse(value))
            else:
                sc = replace(base, params=replace(base.params, **{axis: float(value)}))
            return SweepPoint(value=value, trajectory=run(sc, tol, n_points=n_points))
        except QudecayError as exc:
            return SweepPoint(value=value, trajectory=None, error=f"{type(exc).__name__}: {exc}")

    values = list(values)
    workers = max(1, min(threads, len(values)))
    if workers == 1:
        return [one(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, values))


def departure_metric(traj: Trajectory) -> float:
    """Max |sz - (-1/2 + e^-t)| over the run, in units of the initial
    excitation (which is 1)."""
    return float(np.abs(traj.sz - exponential_law(traj.grid)).max())
