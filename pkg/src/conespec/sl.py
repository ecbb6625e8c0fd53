"""Weighted Sturm-Liouville engine on the latitude band.

Solves (sin^{d-2} g')' - mu sin^{d-4} g + lam sin^{d-2} g = 0 on
[pi/2 - theta0, pi/2 + theta0] with Robin (g' + Hg = 0 on the left,
-g' + Hg = 0 on the right) or Dirichlet conditions.

Eigenvalues are isolated by node-count bisection on a shooting trajectory
(the count uses the Pruefer phase of the endpoint state, so no phase ODE is
integrated) and refined with Brent's method on a matching defect.  For mu=0
the problem is parity-split at pi/2; otherwise two-sided shooting is matched
at pi/2.  An independent finite-difference discretization
(:func:`eigen_fd_crosscheck`) serves as the oracle for derived eigenvalues.
"""

from __future__ import annotations

import dataclasses
import functools
import math

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import BracketFail, NonConvergent, ZeroDenominator
from .kernels import propagate_band
from .profile import ConeProfile, band_points

_EXPAND_CAP = 60
_BISECT_CAP = 300


@dataclasses.dataclass(frozen=True)
class SLSpec:
    dim: int
    band: tuple[float, float]
    mu: float
    bc: str  # 'robin' | 'dirichlet'
    H: float = 0.0
    grid_n: int = 4096

    def __post_init__(self):
        a, b = self.band
        if not (0.0 < a < b < math.pi):
            raise ValueError(f"band {self.band} must lie strictly inside (0, pi)")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.bc not in ("robin", "dirichlet"):
            raise ValueError(f"bc must be robin|dirichlet, got {self.bc!r}")
        if self.bc == "robin" and not self.H > 0:
            raise ValueError("Robin problems require H > 0")


def band_spec(p: ConeProfile, mu: float, bc: str, grid_n: int | None = None) -> SLSpec:
    """SLSpec on the cone band of ``p`` (H taken from the cone for Robin)."""
    return SLSpec(dim=p.dim, band=p.band, mu=float(mu), bc=bc,
                  H=p.H if bc == "robin" else 0.0,
                  grid_n=grid_n if grid_n is not None else p.grid.size - 1)


@dataclasses.dataclass(frozen=True)
class SLEigenpair:
    k: int
    lam: float
    nodes: int
    fn: np.ndarray
    fn_prime: np.ndarray
    grid: np.ndarray
    bc_residual: tuple[float, float]


@functools.lru_cache(maxsize=128)
def _disc(spec: SLSpec):
    """Grids and endpoint data shared by all shots for one spec."""
    a, b = spec.band
    n = band_points(spec.grid_n)
    th = np.linspace(a, b, n)
    half = (n - 1) // 2
    return {
        "theta": th,
        "left": th[: half + 1],
        "right_desc": th[half:][::-1].copy(),
        "w_a": math.sin(a) ** (spec.dim - 2),
        "w_b": math.sin(b) ** (spec.dim - 2),
    }


def _y_left(spec):
    return (1.0, -spec.H) if spec.bc == "robin" else (0.0, 1.0)


def _y_right(spec):
    return (1.0, spec.H) if spec.bc == "robin" else (0.0, -1.0)


def _nodes(g):
    return int(np.count_nonzero(g[:-1] * g[1:] < 0.0))


def _phase_count(g_end, w_gp_end, nodes, tau):
    """Eigenvalue count from the endpoint Pruefer phase.

    The phase at the far endpoint is nodes*pi + frac with frac in (0, pi];
    the count of eigenvalues strictly below lam is nodes + [frac > tau].
    """
    frac = math.atan2(g_end, w_gp_end)
    if frac <= 0.0:
        frac += math.pi
    return nodes + (1 if frac > tau else 0)


def _count_full(spec, disc, lam):
    g, gp = propagate_band(spec.dim - 2, spec.mu, lam, disc["theta"], *_y_left(spec))
    tau = math.atan2(1.0, spec.H * disc["w_b"]) if spec.bc == "robin" else math.pi
    return _phase_count(g[-1], disc["w_b"] * gp[-1], _nodes(g), tau)


def _count_half(spec, disc, parity, lam):
    g, gp = propagate_band(spec.dim - 2, spec.mu, lam, disc["left"], *_y_left(spec))
    tau = math.pi / 2 if parity == "even" else math.pi  # g'(c)=0 / g(c)=0 target
    return _phase_count(g[-1], gp[-1], _nodes(g), tau)


def _defect_full(spec, disc, lam):
    gl, gpl = propagate_band(spec.dim - 2, spec.mu, lam, disc["left"], *_y_left(spec))
    gr, gpr = propagate_band(spec.dim - 2, spec.mu, lam, disc["right_desc"], *_y_right(spec))
    wr = gl[-1] * gpr[-1] - gpl[-1] * gr[-1]
    return wr / (math.hypot(gl[-1], gpl[-1]) * math.hypot(gr[-1], gpr[-1]))


def _defect_half(spec, disc, parity, lam):
    g, gp = propagate_band(spec.dim - 2, spec.mu, lam, disc["left"], *_y_left(spec))
    val = gp[-1] if parity == "even" else g[-1]
    return val / math.hypot(g[-1], gp[-1])


def _isolate(count_fn, k, lo, hi):
    """Shrink [lo, hi] until it contains exactly the k-th eigenvalue."""
    n_lo = count_fn(lo)
    steps = 0
    while n_lo > k - 1:
        hi, lo = lo, 2.0 * lo if lo < 0 else lo - 10.0
        n_lo = count_fn(lo)
        steps += 1
        if steps > _EXPAND_CAP:
            raise NonConvergent("lower bracket expansion exceeded cap")
    n_hi = count_fn(hi)
    while n_hi < k:
        hi = 2.0 * hi if hi > 0 else 10.0
        n_hi = count_fn(hi)
        steps += 1
        if steps > _EXPAND_CAP:
            raise NonConvergent("upper bracket expansion exceeded cap")
    while n_lo < k - 1 or n_hi > k:
        mid = 0.5 * (lo + hi)
        n_mid = count_fn(mid)
        if n_mid < n_lo or n_mid > n_hi:
            raise BracketFail(
                f"node count not monotone at lam={mid} (got {n_mid} in [{n_lo},{n_hi}])")
        if n_mid >= k:
            hi, n_hi = mid, n_mid
        else:
            lo, n_lo = mid, n_mid
        steps += 1
        if steps > _BISECT_CAP:
            raise NonConvergent("eigenvalue isolation exceeded iteration cap")
    return lo, hi


def _assemble_fn(spec, disc, lam, parity):
    dm2, mu = spec.dim - 2, spec.mu
    if parity is not None:
        g, gp = propagate_band(dm2, mu, lam, disc["left"], *_y_left(spec))
        if parity == "even":
            g_full = np.concatenate([g, g[-2::-1]])
            gp_full = np.concatenate([gp, -gp[-2::-1]])
        else:
            g_full = np.concatenate([g, -g[-2::-1]])
            gp_full = np.concatenate([gp, gp[-2::-1]])
        return g_full, gp_full
    gl, gpl = propagate_band(dm2, mu, lam, disc["left"], *_y_left(spec))
    gr, gpr = propagate_band(dm2, mu, lam, disc["right_desc"], *_y_right(spec))
    # least-squares alignment of the right shot onto the left state at pi/2
    s = (gl[-1] * gr[-1] + gpl[-1] * gpr[-1]) / (gr[-1] ** 2 + gpr[-1] ** 2)
    g_full = np.concatenate([gl, (s * gr)[-2::-1]])
    gp_full = np.concatenate([gpl, (s * gpr)[-2::-1]])
    return g_full, gp_full


def eigen_k(spec: SLSpec, k: int, cfg: SolverConfig | None = None) -> SLEigenpair:
    """k-th eigenpair (k >= 1) of the band problem."""
    cfg = cfg or DEFAULT_CONFIG
    if k < 1:
        raise ValueError("k must be >= 1")
    disc = _disc(spec)

    if spec.mu == 0.0:
        parity = "even" if k % 2 == 1 else "odd"
        idx = (k + 1) // 2
        count_fn = lambda lam: _count_half(spec, disc, parity, lam)
        defect_fn = lambda lam: _defect_half(spec, disc, parity, lam)
    else:
        parity, idx = None, k
        count_fn = lambda lam: _count_full(spec, disc, lam)
        defect_fn = lambda lam: _defect_full(spec, disc, lam)

    lo0 = -10.0 - 2.0 * (spec.dim ** 2 + spec.H ** 2)
    hi0 = float(spec.dim ** 2 + spec.mu + 10.0)
    lo, hi = _isolate(count_fn, idx, lo0, hi0)

    d_lo, d_hi = defect_fn(lo), defect_fn(hi)
    shrink = 0
    while d_lo * d_hi > 0.0:
        # The defect is entire with a single simple zero inside; a same-sign
        # bracket means an endpoint sits numerically on the zero - tighten.
        mid = 0.5 * (lo + hi)
        if count_fn(mid) >= idx:
            hi, d_hi = mid, defect_fn(mid)
        else:
            lo, d_lo = mid, defect_fn(mid)
        shrink += 1
        if shrink > 80:
            raise NonConvergent("defect refinement could not find a sign change")
    lam = float(brentq(defect_fn, lo, hi, xtol=cfg.lam_tol, rtol=8.9e-16))

    g, gp = _assemble_fn(spec, disc, lam, parity)
    th = disc["theta"]
    w = np.sin(th) ** (spec.dim - 2)
    norm = math.sqrt(simpson(g * g * w, x=th))
    if norm == 0.0:
        raise NonConvergent("assembled eigenfunction has zero norm")
    g, gp = g / norm, gp / norm
    if gp[0] < 0:
        g, gp = -g, -gp

    nodes = _nodes(g)
    if nodes != k - 1:
        raise BracketFail(f"eigenfunction for k={k} has {nodes} nodes (grid too coarse?)")
    if spec.bc == "robin":
        resid = (abs(gp[0] + spec.H * g[0]), abs(-gp[-1] + spec.H * g[-1]))
    else:
        resid = (abs(g[0]), abs(g[-1]))
    return SLEigenpair(k=k, lam=lam, nodes=nodes, fn=g, fn_prime=gp, grid=th,
                       bc_residual=resid)


def _fd_values(spec: SLSpec, count: int, n: int) -> np.ndarray:
    """First eigenvalues of the symmetric finite-volume discretization.

    Fluxes use the weight at half-points; the mu-term and the mass matrix are
    lumped by the trapezoid rule (half cells at the two ends).  Robin data
    enters the endpoint diagonal with the negative sign of the quadratic form
    boundary term.
    """
    d = spec.dim
    a, b = spec.band
    h = (b - a) / n
    th = np.linspace(a, b, n + 1)
    p_half = np.sin(th[:-1] + h / 2) ** (d - 2)
    w = np.sin(th) ** (d - 2)
    s = w / np.sin(th) ** 2  # sin^{d-4}
    if spec.bc == "robin":
        lump = np.full(n + 1, h)
        lump[0] = lump[-1] = h / 2
        diag = np.empty(n + 1)
        diag[1:-1] = (p_half[:-1] + p_half[1:]) / h + spec.mu * s[1:-1] * lump[1:-1]
        diag[0] = p_half[0] / h + spec.mu * s[0] * lump[0] - spec.H * w[0]
        diag[-1] = p_half[-1] / h + spec.mu * s[-1] * lump[-1] - spec.H * w[-1]
        off = -p_half / h
        mass = w * lump
    else:
        lump = np.full(n - 1, h)
        diag = (p_half[:-1] + p_half[1:]) / h + spec.mu * s[1:-1] * lump
        off = -p_half[1:-1] / h
        mass = w[1:-1] * lump
    dd = diag / mass
    ee = off / np.sqrt(mass[:-1] * mass[1:])
    return eigh_tridiagonal(dd, ee, select="i", select_range=(0, count - 1),
                            eigvals_only=True)


def eigen_fd_crosscheck(spec: SLSpec, count: int, richardson: bool = True) -> np.ndarray:
    """Independent finite-difference eigenvalues (the in-repo oracle).

    With ``richardson`` the O(h^2) values on n and 2n cells are extrapolated
    to (4*v_{2n} - v_n)/3.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n = spec.grid_n
    v1 = _fd_values(spec, count, n)
    if not richardson:
        return v1
    v2 = _fd_values(spec, count, 2 * n)
    return (4.0 * v2 - v1) / 3.0


def _derivative(vals: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid."""
    d = np.empty_like(vals)
    d[2:-2] = (-vals[4:] + 8 * vals[3:-1] - 8 * vals[1:-3] + vals[:-4]) / (12 * h)
    for i in (0, 1):
        d[i] = (-25 * vals[i] + 48 * vals[i + 1] - 36 * vals[i + 2]
                + 16 * vals[i + 3] - 3 * vals[i + 4]) / (12 * h)
        d[-1 - i] = (25 * vals[-1 - i] - 48 * vals[-2 - i] + 36 * vals[-3 - i]
                     - 16 * vals[-4 - i] + 3 * vals[-5 - i]) / (12 * h)
    return d


def rayleigh(spec: SLSpec, g: np.ndarray, gp: np.ndarray | None = None) -> float:
    """Rayleigh quotient of a sampled trial function on the spec's grid.

    Numerator: int w g'^2 + mu int sin^{d-4} g^2 - H w(a) g(a)^2 - H w(b) g(b)^2
    (boundary term present for Robin only), denominator int w g^2.
    """
    disc = _disc(spec)
    th = disc["theta"]
    g = np.asarray(g, dtype=float)
    if g.shape != th.shape:
        raise ValueError(f"trial function must be sampled on the {th.size}-point grid")
    if gp is None:
        gp = _derivative(g, th[1] - th[0])
    w = np.sin(th) ** (spec.dim - 2)
    den = simpson(g * g * w, x=th)
    if not den > 0:
        raise ZeroDenominator("trial function has vanishing L^2(w) norm")
    num = simpson(gp * gp * w, x=th)
    if spec.mu:
        num += spec.mu * simpson(g * g * w / np.sin(th) ** 2, x=th)
    if spec.bc == "robin":
        num -= spec.H * (disc["w_a"] * g[0] ** 2 + disc["w_b"] * g[-1] ** 2)
    return float(num / den)
