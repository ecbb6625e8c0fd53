"""Construction of the axially symmetric cone profile.

The cone is U(r, theta) = r*g(theta) over the latitude band
[pi/2 - theta0, pi/2 + theta0], where g solves

    g'' + (d-2) cot(theta) g' + (d-1) g = 0,   g(pi/2) = 1, g'(pi/2) = 0,

theta0 is the first zero of g past pi/2, and g is rescaled so |g'| = 1 at
both band endpoints (the free-boundary gradient condition).  The boundary
mean curvature is H = (d-2) tan(theta0).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import EvaluationUnstable, NoZeroFound, NonConvergent
from .kernels import propagate_band

# Hunt window for the first zero: stay clear of the cot(theta) pole at pi.
_HUNT_END_MARGIN = 0.01
_BISECT_CAP = 200


@dataclasses.dataclass(frozen=True)
class ConeProfile:
    dim: int
    theta0: float
    grid: np.ndarray
    g: np.ndarray
    g_prime: np.ndarray
    H: float
    norm_c: float

    @property
    def band(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "theta0": self.theta0,
            "H": self.H,
            "norm_c": self.norm_c,
            "grid": self.grid.tolist(),
            "g": self.g.tolist(),
            "g_prime": self.g_prime.tolist(),
        }


def band_points(grid_n: int) -> int:
    """Number of band grid points: smallest 4k+1 >= grid_n+1.

    Both the full band and each half then have an even panel count, so
    composite Simpson applies everywhere without ad hoc end corrections.
    """
    n = grid_n + 1
    rem = (n - 1) % 4
    if rem:
        n += 4 - rem
    return n


def _refined_root(d, lo, y_lo, hi, root_tol):
    """Bisection for the zero of g inside [lo, hi], re-integrating from lo."""

    def g_at(theta):
        sub = np.linspace(lo, theta, 33)
        g, _ = propagate_band(d - 2, 0.0, d - 1, sub, y_lo[0], y_lo[1])
        return g[-1]

    a, b = lo, hi
    for _ in range(_BISECT_CAP):
        mid = 0.5 * (a + b)
        if g_at(mid) > 0.0:
            a = mid
        else:
            b = mid
        if b - a <= root_tol:
            root = 0.5 * (a + b)
            sub = np.linspace(lo, root, 33)
            g, gp = propagate_band(d - 2, 0.0, d - 1, sub, y_lo[0], y_lo[1])
            return root, gp[-1]
    raise NonConvergent(f"aperture bisection did not reach {root_tol} in {_BISECT_CAP} steps")


def solve_profile(d: int, cfg: SolverConfig | None = None) -> ConeProfile:
    """Find the aperture and the normalized profile for dimension d >= 3."""
    cfg = cfg or DEFAULT_CONFIG
    if not (isinstance(d, (int, np.integer)) and d >= 3):
        raise ValueError(f"dimension must be an integer >= 3, got {d!r}")
    d = int(d)

    n_hunt = 4 * cfg.grid_n
    hunt = np.linspace(math.pi / 2, math.pi - _HUNT_END_MARGIN, n_hunt + 1)
    g, gp = propagate_band(d - 2, 0.0, d - 1, hunt, 1.0, 0.0)
    below = np.nonzero(g <= 0.0)[0]
    if below.size == 0:
        raise NoZeroFound(f"profile for d={d} has no zero before theta={hunt[-1]:.4f}")
    i = int(below[0])
    root, slope = _refined_root(d, hunt[i - 1], (g[i - 1], gp[i - 1]), hunt[i], cfg.root_tol)

    theta0 = float(root) - math.pi / 2
    if not (0.0 < theta0 < math.pi / 2 - 1e-9):
        raise NoZeroFound(f"aperture {theta0} outside (0, pi/2)")
    norm_c = 1.0 / abs(slope)

    n = band_points(cfg.grid_n)
    half = (n - 1) // 2
    th_right = np.linspace(math.pi / 2, math.pi / 2 + theta0, half + 1)
    th_left = np.linspace(math.pi / 2, math.pi / 2 - theta0, half + 1)
    g_r, gp_r = propagate_band(d - 2, 0.0, d - 1, th_right, 1.0, 0.0)
    g_l, gp_l = propagate_band(d - 2, 0.0, d - 1, th_left, 1.0, 0.0)

    grid = np.concatenate([th_left[::-1], th_right[1:]])
    g_all = norm_c * np.concatenate([g_l[::-1], g_r[1:]])
    gp_all = norm_c * np.concatenate([gp_l[::-1], gp_r[1:]])

    return ConeProfile(dim=d, theta0=theta0, grid=grid, g=g_all, g_prime=gp_all,
                       H=(d - 2) * math.tan(theta0), norm_c=norm_c)


def jacobi_fields(p: ConeProfile) -> dict[str, np.ndarray]:
    """Theta-profiles of the analytic Jacobi-field families.

    t1: axial translation, cos(theta) g - sin(theta) g'   (sphere degree 0)
    tk: transverse translation, cos(theta) g' + sin(theta) g  (degree 1)
    rot: rotation, g'                                        (degree 1)
    """
    th = p.grid
    return {
        "t1": np.cos(th) * p.g - np.sin(th) * p.g_prime,
        "tk": np.cos(th) * p.g_prime + np.sin(th) * p.g,
        "rot": p.g_prime.copy(),
    }


def _legendre_values(d, x, dps):
    """Closed-form angular factor at x = cos(theta), at mpmath precision dps."""
    import mpmath as mp

    vals = np.empty(x.size)
    with mp.workdps(dps):
        if d % 2 == 1:
            # integer order/degree, second kind
            from scipy.special import lqmn

            m, nu = (d - 3) // 2, (d - 1) // 2
            for j, xx in enumerate(x):
                vals[j] = lqmn(m, nu, float(xx))[0][m][nu]
        else:
            # half-integer order/degree, first kind (Ferrers)
            m, nu = (d - 3) / 2.0, (d - 1) / 2.0
            for j, xx in enumerate(x):
                vals[j] = float(mp.legenp(nu, m, float(xx), type=2))
    return vals


def legendre_crosscheck(p: ConeProfile, stride: int | None = None) -> float:
    """Max relative deviation of the profile from its Legendre closed form.

    The closed form is c * (1-x^2)^{-(d-3)/4} * F(x) with F an associated
    Legendre function (second kind for odd d, Ferrers first kind for even d),
    normalized to match g at theta = pi/2.
    """
    d = p.dim
    if stride is None:
        stride = max(1, (p.grid.size - 1) // 256)
    idx = np.arange(0, p.grid.size, stride)
    mid = p.grid.size // 2
    if mid not in idx:
        idx = np.sort(np.append(idx, mid))
    th = p.grid[idx]
    x = np.cos(th)

    F = _legendre_values(d, x, 30)
    if d % 2 == 0:  # mpmath path: spot-check precision on a small subset
        spot = idx[:: max(1, len(idx) // 8)]
        F_lo = _legendre_values(d, np.cos(p.grid[spot]), 30)
        F_hi = _legendre_values(d, np.cos(p.grid[spot]), 60)
        scale = np.max(np.abs(F_hi)) or 1.0
        if np.max(np.abs(F_lo - F_hi)) > 1e-8 * scale:
            raise EvaluationUnstable("Legendre evaluation unstable between dps=30 and dps=60")

    closed = (1.0 - x ** 2) ** (-(d - 3) / 4.0) * F
    mid_pos = int(np.searchsorted(idx, mid))
    scale = p.g[mid] / closed[mid_pos]
    return float(np.max(np.abs(closed * scale - p.g[idx])) / np.max(np.abs(p.g)))
