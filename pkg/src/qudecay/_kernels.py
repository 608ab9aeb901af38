"""Hot loops, JIT-compiled when numba is importable.

Import never fails: without numba the pure-NumPy/Python fallbacks are
exported under the same names and signatures, so everything downstream is
oblivious to which variant it got.  Results agree to float rounding.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def series_product(phi, a, b, k_min):
    """(sum_k B_k e^{+2ik phi}) * (sum_k A_k e^{-2ik phi}).

    a, b are float64 coefficient arrays on the consecutive harmonic lattice
    k = k_min + j.  Both sums are Horner polynomials in w = e^{2i phi},
    re-anchored by e^{2i k_min phi}.
    """
    w = np.exp(2j * phi)
    sb = 0.0 + 0.0j
    for j in range(len(b) - 1, -1, -1):
        sb = sb * w + b[j]
    wc = np.conj(w)
    sa = 0.0 + 0.0j
    for j in range(len(a) - 1, -1, -1):
        sa = sa * wc + a[j]
    anchor = np.exp(2j * (k_min * phi))
    return (sb * anchor) * (sa * np.conj(anchor))


@njit(cache=True)
def series_product_many(phis, a, b, k_min):
    out = np.empty(len(phis), np.complex128)
    for i in range(len(phis)):
        out[i] = series_product(phis[i], a, b, k_min)
    return out


@njit(cache=True)
def rotated_rhs(t, y, omega, phase, gpref, a, b, k_min):
    """Right-hand side of the rotated-frame master equation without the
    coherent term: populations decay at 2*Re(g), coherences at g / conj(g).

    y = (rho_ee, rho_eg, rho_ge, rho_gg) flattened complex.
    """
    phi = omega * t + phase
    g = gpref * series_product(phi, a, b, k_min)
    gbar = 2.0 * g.real
    out = np.empty(4, np.complex128)
    out[0] = -gbar * y[0]
    out[1] = -np.conj(g) * y[1]
    out[2] = -g * y[2]
    out[3] = gbar * y[0]
    return out


@njit(cache=True)
def standard_rhs(t, y, omega0, omega, phase, rabi, gamma):
    """Scalar (Bloch) closure of the constant-rate reference model.

    y = (p, c) with p = rho_ee, c = rho_eg; p is carried as complex for a
    uniform state vector but only its real part feeds back.
    """
    oc = rabi * np.cos(omega * t + phase)
    p = y[0].real
    c = y[1]
    out = np.empty(2, np.complex128)
    out[0] = 2.0 * oc * c.imag - gamma * p + 0.0j
    out[1] = -1j * omega0 * c + 1j * oc * (1.0 - 2.0 * p) - 0.5 * gamma * c
    return out


if not HAVE_NUMBA:  # pragma: no cover - exercised only without numba

    def series_product_many(phis, a, b, k_min):  # noqa: F811
        ks = k_min + np.arange(len(a))
        out = np.empty(len(phis), np.complex128)
        step = max(1, 2_000_000 // max(len(a), 1))
        for i0 in range(0, len(phis), step):
            ph = phis[i0 : i0 + step]
            ex = np.exp(2j * np.outer(ph, ks))
            out[i0 : i0 + step] = (ex @ b) * (np.conj(ex) @ a)
        return out


def warmup() -> None:
    """Force JIT compilation of the kernels on tiny inputs (a no-op without
    numba).  Useful before wall-clock–sensitive sections."""
    a = np.array([1.0])
    b = np.array([1.0])
    series_product(0.1, a, b, 0)
    series_product_many(np.array([0.1, 0.2]), a, b, 0)
    rotated_rhs(0.0, np.array([1, 0, 0, 0], np.complex128), 1.0, 0.0, 0.5, a, b, 0)
    standard_rhs(0.0, np.array([1, 0], np.complex128), 1.0, 0.1, 0.0, 0.0, 1.0)
