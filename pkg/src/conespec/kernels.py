"""Propagation kernel for the separated band ODE.

Every spectral computation in the package reduces to integrating

    g'' = -(d-2) cot(theta) g' - (lam - mu / sin^2(theta)) g

along a theta grid: the cone profile is (mu=0, lam=d-1), interior
Sturm-Liouville shots use general (mu, lam), and boundary-mode fundamental
solutions are (mu, lam=0).  Two interchangeable backends are provided:

* ``numba`` -- the plain RK4 loop below compiled with ``@njit`` (default when
  numba imports cleanly);
* ``numpy`` -- the same RK4 update written as a product of 2x2 step matrices
  and evaluated with a logarithmic prefix-product scan.

Select with ``CONESPEC_BACKEND=numba|numpy|auto`` or :func:`set_backend`.
Both implement identical arithmetic (modulo float reassociation in the scan),
so results agree to ~1e-12 and all tolerances are backend-independent.
"""

from __future__ import annotations

import math
import os

import numpy as np

ENV_BACKEND = "CONESPEC_BACKEND"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    numba = None
    HAVE_NUMBA = False


def _rk4_band(dm2, mu, lam, thetas, g0, gp0):
    """Fixed-step RK4 along ``thetas`` (monotone, either direction).

    Returns (g, gp) sampled at every grid point, including the start.
    """
    n = thetas.shape[0]
    g = np.empty(n)
    gp = np.empty(n)
    y0 = g0
    y1 = gp0
    g[0] = y0
    gp[0] = y1
    for i in range(n - 1):
        t = thetas[i]
        h = thetas[i + 1] - t
        # k1
        a1 = y1
        b1 = -dm2 / math.tan(t) * y1 - (lam - mu / math.sin(t) ** 2) * y0
        # k2, k3 share the midpoint coefficients
        tm = t + 0.5 * h
        cot_m = 1.0 / math.tan(tm)
        q_m = lam - mu / math.sin(tm) ** 2
        u0 = y0 + 0.5 * h * a1
        u1 = y1 + 0.5 * h * b1
        a2 = u1
        b2 = -dm2 * cot_m * u1 - q_m * u0
        u0 = y0 + 0.5 * h * a2
        u1 = y1 + 0.5 * h * b2
        a3 = u1
        b3 = -dm2 * cot_m * u1 - q_m * u0
        # k4
        te = t + h
        u0 = y0 + h * a3
        u1 = y1 + h * b3
        a4 = u1
        b4 = -dm2 / math.tan(te) * u1 - (lam - mu / math.sin(te) ** 2) * u0
        y0 = y0 + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        y1 = y1 + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        g[i + 1] = y0
        gp[i + 1] = y1
    return g, gp


if HAVE_NUMBA:
    _rk4_band_numba = numba.njit(cache=True)(_rk4_band)


def _coef_matrices(dm2, mu, lam, t):
    """Companion matrices A(t) of the first-order system at the points t."""
    m = np.zeros((t.size, 2, 2))
    m[:, 0, 1] = 1.0
    m[:, 1, 0] = -(lam - mu / np.sin(t) ** 2)
    m[:, 1, 1] = -dm2 / np.tan(t)
    return m


def _rk4_band_numpy(dm2, mu, lam, thetas, g0, gp0):
    """Vectorized RK4: per-interval 2x2 step matrices + prefix-product scan."""
    n = thetas.shape[0]
    g = np.empty(n)
    gp = np.empty(n)
    g[0] = g0
    gp[0] = gp0
    if n == 1:
        return g, gp
    h = np.diff(thetas)[:, None, None]
    a_lo = _coef_matrices(dm2, mu, lam, thetas[:-1])
    a_mid = _coef_matrices(dm2, mu, lam, thetas[:-1] + 0.5 * np.diff(thetas))
    a_hi = _coef_matrices(dm2, mu, lam, thetas[1:])
    eye = np.eye(2)
    k1 = a_lo
    k2 = a_mid @ (eye + 0.5 * h * k1)
    k3 = a_mid @ (eye + 0.5 * h * k2)
    k4 = a_hi @ (eye + h * k3)
    steps = eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # Hillis-Steele inclusive scan: after the loop, steps[i] = T_i @ ... @ T_0.
    width = 1
    while width < steps.shape[0]:
        steps[width:] = steps[width:] @ steps[:-width]
        width *= 2
    g[1:] = steps[:, 0, 0] * g0 + steps[:, 0, 1] * gp0
    gp[1:] = steps[:, 1, 0] * g0 + steps[:, 1, 1] * gp0
    return g, gp


_active: str | None = None


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def get_backend() -> str:
    """Resolve the active backend (env var once, then sticky)."""
    global _active
    if _active is None:
        choice = os.environ.get(ENV_BACKEND, "auto").lower()
        if choice not in ("auto", "numba", "numpy"):
            raise ValueError(f"{ENV_BACKEND} must be auto|numba|numpy, got {choice!r}")
        if choice == "auto":
            choice = "numba" if HAVE_NUMBA else "numpy"
        if choice == "numba" and not HAVE_NUMBA:
            raise ValueError("numba backend requested but numba is not importable")
        _active = choice
    return _active


def set_backend(name: str | None) -> None:
    """Force a backend ('numba'|'numpy'), or None to re-resolve from the env."""
    global _active
    if name is None:
        _active = None
        return
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not importable")
    _active = name


def propagate_band(dm2: float, mu: float, lam: float, thetas: np.ndarray,
                   g0: float, gp0: float):
    """Integrate the band ODE along ``thetas`` with the active backend."""
    if get_backend() == "numba":
        return _rk4_band_numba(float(dm2), float(mu), float(lam),
                               np.ascontiguousarray(thetas, dtype=np.float64),
                               float(g0), float(gp0))
    return _rk4_band_numpy(float(dm2), float(mu), float(lam),
                           np.asarray(thetas, dtype=np.float64),
                           float(g0), float(gp0))
