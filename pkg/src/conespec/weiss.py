"""Weiss-type monotonicity functional for axisymmetric one-phase fields.

Fields are finite sums u = sum_c rho_c(r) q_c(theta) supported on a polar
band; the functional is

    W(u, r) = r^{-d} int_{B_r} (|grad u|^2 + chi) - r^{-d-1} int_{dB_r} u^2,

with chi the indicator of the (conical) support.  All angular pairings
reduce to Gram matrices in the weight sin^{d-2}(theta); radial integrals
use composite Boole quadrature on a uniform grid, with a coarsened re-run
guarding against unresolved integrands.

For the blow-up cone itself W is constant in r and equals the link measure
over d; the derivative identity

    dW/dr = 2 r^{-d-2} int_{dB_r} (x . grad u - u)^2
            - 2 r^{-d-1} int_{B_r} (x . grad u - u) Lap u

is exposed for verification, the first term being the homogeneity deficit.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .boundary import sphere_area
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import GridTooCoarse, MissingCoefficient, NumericalError
from .linkspec import LinkSpectrum
from .profile import ConeProfile
from .sl import SLSpec, band_spec, eigen_k

_N_RADIAL = 513     # Boole-compatible (4k+1) radial point count
_RICHARDSON = 15.0  # halving gain assumed when estimating quadrature error


@dataclasses.dataclass(frozen=True, eq=False)
class Component:
    """One separable term rho(r) * q(theta); derivatives optional (finite
    differences of the callables are used when omitted)."""

    rho: Callable
    q: np.ndarray
    drho: Callable | None = None
    d2rho: Callable | None = None
    q_prime: np.ndarray | None = None


@dataclasses.dataclass(frozen=True, eq=False)
class AxisymField:
    dim: int
    theta: np.ndarray
    components: tuple[Component, ...]
    r_max: float = math.inf

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("dimension must be >= 3")
        th = self.theta
        if th[0] < -1e-14 or th[-1] > math.pi + 1e-14 or np.any(np.diff(th) <= 0):
            raise ValueError("theta grid must increase within [0, pi]")
        for c in self.components:
            if c.q.shape != th.shape:
                raise ValueError("component samples must live on the field grid")
        q0 = self.components[0].q
        if np.min(q0) < -1e-12 * np.max(np.abs(q0)):
            raise ValueError("primary angular profile must be nonnegative")

    @property
    def support(self) -> tuple[float, float]:
        return float(self.theta[0]), float(self.theta[-1])

    def rescaled(self, s: float) -> "AxisymField":
        """The blow-up rescaling u_s(x) = u(s x)/s."""
        comps = []
        for c in self.components:
            rho, drho, d2rho = c.rho, c.drho, c.d2rho
            comps.append(Component(
                rho=(lambda r, _f=rho, _s=s: _f(_s * np.asarray(r, float)) / _s),
                q=c.q,
                drho=None if drho is None else
                     (lambda r, _f=drho, _s=s: _f(_s * np.asarray(r, float))),
                d2rho=None if d2rho is None else
                      (lambda r, _f=d2rho, _s=s: _s * _f(_s * np.asarray(r, float))),
                q_prime=c.q_prime))
        return AxisymField(self.dim, self.theta, tuple(comps), self.r_max / s)


def _fd1(f: Callable) -> Callable:
    def d(r):
        r = np.asarray(r, dtype=float)
        h = 1e-4 * np.maximum(r, 1e-8)
        return (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h)
    return d


def _derivative_callables(c: Component):
    drho = c.drho if c.drho is not None else _fd1(c.rho)
    d2rho = c.d2rho if c.d2rho is not None else _fd1(drho)
    return drho, d2rho


@functools.lru_cache(maxsize=32)
def _grams(u: AxisymField):
    """Angular Gram matrices in the band weight, plus the support measure."""
    th = u.theta
    w = np.sin(th) ** (u.dim - 2)
    qs = [c.q for c in u.components]
    qps = [c.q_prime if c.q_prime is not None else np.gradient(c.q, th, edge_order=2)
           for c in u.components]
    m = len(qs)
    gq = np.empty((m, m))
    gqp = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            gq[i, j] = simpson(qs[i] * qs[j] * w, x=th)
            gqp[i, j] = simpson(qps[i] * qps[j] * w, x=th)
    sw = float(simpson(w, x=th))
    return gq, gqp, sw


def _boole(y: np.ndarray, h: float) -> float:
    n = y.size
    if (n - 1) % 4 != 0:
        raise ValueError("Boole rule needs 4k+1 points")
    wts = np.full(n, 14.0)
    wts[1::2] = 32.0
    wts[2::4] = 12.0
    wts[0] = wts[-1] = 7.0
    return float((2 * h / 45) * np.dot(wts, y))


def _rho_matrices(u: AxisymField, s: np.ndarray, order: int = 1):
    rr = np.empty((len(u.components), s.size))
    rp = np.empty_like(rr)
    rpp = np.empty_like(rr) if order >= 2 else None
    for i, c in enumerate(u.components):
        drho, d2rho = _derivative_callables(c)
        rr[i] = c.rho(s)
        rp[i] = drho(s)
        if order >= 2:
            rpp[i] = d2rho(s)
    return rr, rp, rpp


def _energy_integral(u: AxisymField, r: float, n: int) -> float:
    """int_0^r (rho' Gq rho' s^{d-1} + rho Gq' rho s^{d-3}) ds by Boole."""
    d = u.dim
    gq, gqp, _ = _grams(u)
    s = np.linspace(0.0, r, n)
    rr, rp, _ = _rho_matrices(u, s[1:])
    t1 = np.einsum("is,ij,js->s", rp, gq, rp) * s[1:] ** (d - 1)
    t2 = np.einsum("is,ij,js->s", rr, gqp, rr) * s[1:] ** (d - 3)
    y = np.concatenate(([0.0], t1 + t2))
    return _boole(y, s[1] - s[0])


def weiss(u: AxisymField, r: float, d: int,
          cfg: SolverConfig | None = None) -> float:
    """Evaluate W(u, r); raises GridTooCoarse when the Richardson error
    estimate from a halved radial grid exceeds quad_tol * |W|."""
    cfg = cfg or DEFAULT_CONFIG
    if d != u.dim:
        raise ValueError(f"dimension argument {d} != field dimension {u.dim}")
    if not 0 < r <= u.r_max:
        raise ValueError("radius must lie in (0, r_max of the field]")
    gq, _, sw = _grams(u)
    sd2 = sphere_area(d - 2)
    full = _energy_integral(u, r, _N_RADIAL)
    half = _energy_integral(u, r, (_N_RADIAL - 1) // 2 + 1)
    rr, _, _ = _rho_matrices(u, np.array([r]))
    bnd = float(rr[:, 0] @ gq @ rr[:, 0])
    w_val = sd2 * (full / r ** d + sw / d - bnd / r ** 2)
    est = sd2 * abs(full - half) / (_RICHARDSON * r ** d)
    if est > cfg.quad_tol * max(1.0, abs(w_val)):
        raise GridTooCoarse(
            f"radial quadrature unresolved at r={r:g} (estimate {est:.2e})")
    return w_val


def _deficit(u: AxisymField, r: float) -> float:
    """2 r^{-d-2} int_{dB_r} (x . grad u - u)^2, the homogeneity defect."""
    gq, _, _ = _grams(u)
    rr, rp, _ = _rho_matrices(u, np.array([r]))
    c = r * rp[:, 0] - rr[:, 0]
    return 2.0 * sphere_area(u.dim - 2) * float(c @ gq @ c) / r ** 3


def _harmonic_correction(u: AxisymField, r: float) -> float:
    """-2 r^{-d-1} int_{B_r} (x . grad u - u) Lap u  (vanishes when u is
    harmonic on its support, e.g. for the cone solution itself)."""
    d = u.dim
    gq, gqp, _ = _grams(u)
    n = 513
    s = np.linspace(0.0, r, n)
    rr, rp, rpp = _rho_matrices(u, s[1:], order=2)
    e = s[1:] * rp - rr
    radial = np.einsum("is,ij,js->s", e, gq, rpp + (d - 1) * rp / s[1:])
    angular = -np.einsum("is,ij,js->s", e, gqp, rr)
    y = np.concatenate(([0.0], radial * s[1:] ** (d - 1) + angular * s[1:] ** (d - 3)))
    return -2.0 * sphere_area(d - 2) * _boole(y, s[1] - s[0]) / r ** (d + 1)


def _dw_numeric(u: AxisymField, r: float, cfg: SolverConfig | None) -> float:
    h = 1e-3 * r
    vals = [weiss(u, r + k * h, u.dim, cfg) for k in (-2, -1, 1, 2)]
    return (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)


def weiss_derivative_check(u: AxisymField, r: float,
                           cfg: SolverConfig | None = None):
    """Compare dW/dr (numerical) against deficit + harmonicity correction.

    Returns (lhs, rhs, gap).  For fields harmonic on their support the
    correction vanishes and rhs reduces to the nonnegative deficit.
    """
    cfg = cfg or DEFAULT_CONFIG
    lhs = _dw_numeric(u, r, cfg)
    rhs = _deficit(u, r) + _harmonic_correction(u, r)
    return lhs, rhs, abs(lhs - rhs)


@dataclasses.dataclass(frozen=True)
class WeissReport:
    r_values: np.ndarray
    W: np.ndarray
    dW_lhs: np.ndarray   # numerical dW/dr
    dW_rhs: np.ndarray   # deficit term only
    kappa0: float

    def to_dict(self) -> dict:
        return {"r_values": self.r_values.tolist(), "W": self.W.tolist(),
                "dW_lhs": self.dW_lhs.tolist(), "dW_rhs": self.dW_rhs.tolist(),
                "kappa0": self.kappa0}


def weiss_report(u: AxisymField, radii,
                 cfg: SolverConfig | None = None) -> WeissReport:
    cfg = cfg or DEFAULT_CONFIG
    radii = np.asarray(radii, dtype=float)
    w_vals = np.array([weiss(u, r, u.dim, cfg) for r in radii])
    lhs = np.array([_dw_numeric(u, r, cfg) for r in radii])
    rhs = np.array([_deficit(u, r) for r in radii])
    gq, _, _ = _grams(u)
    kappa0 = math.sqrt(sphere_area(u.dim - 2) * gq[0, 0])
    return WeissReport(radii, w_vals, lhs, rhs, kappa0)


def cone_field(p: ConeProfile) -> AxisymField:
    """The blow-up solution U = r g(theta) itself."""
    comp = Component(
        rho=lambda r: np.asarray(r, dtype=float) * 1.0,
        q=p.g,
        drho=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        d2rho=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        q_prime=p.g_prime)
    return AxisymField(p.dim, p.grid, (comp,))


def halfplane_field(d: int, n_theta: int = 1025) -> AxisymField:
    """The flat one-phase solution (x . e)_+ in polar-band form."""
    th = np.linspace(0.0, math.pi / 2, n_theta)
    comp = Component(
        rho=lambda r: np.asarray(r, dtype=float) * 1.0,
        q=np.cos(th),
        drho=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        d2rho=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        q_prime=-np.sin(th))
    return AxisymField(d, th, (comp,))


def power_field(p: ConeProfile, exponent: float) -> AxisymField:
    """g(theta) carried by the radial power r^exponent (homogeneity probe)."""
    e = float(exponent)
    comp = Component(
        rho=lambda r: np.asarray(r, dtype=float) ** e,
        q=p.g,
        drho=lambda r: e * np.asarray(r, dtype=float) ** (e - 1),
        d2rho=lambda r: e * (e - 1) * np.asarray(r, dtype=float) ** (e - 2),
        q_prime=p.g_prime)
    return AxisymField(p.dim, p.grid, (comp,))


def perturbed_field(p: ConeProfile, eps: float, exponent: float, k: int = 1,
                    cfg: SolverConfig | None = None) -> AxisymField:
    """U plus eps * r^exponent times the k-th interior Robin band mode."""
    cfg = cfg or DEFAULT_CONFIG
    pair = eigen_k(band_spec(p, 0.0, "robin"), k, cfg)
    e = float(exponent)
    base = cone_field(p).components[0]
    bump = Component(
        rho=lambda r: eps * np.asarray(r, dtype=float) ** e,
        q=pair.fn,
        drho=lambda r: eps * e * np.asarray(r, dtype=float) ** (e - 1),
        d2rho=lambda r: eps * e * (e - 1) * np.asarray(r, dtype=float) ** (e - 2),
        q_prime=pair.fn_prime)
    return AxisymField(p.dim, p.grid, (base, bump))


def link_measure_identity(p: ConeProfile,
                          cfg: SolverConfig | None = None):
    """W(U, 1) against H^{d-1}(link)/d; returns (W1, measure_over_d, gap)."""
    if p.theta0 >= math.pi / 2:
        raise ValueError("band half-width must stay below pi/2")
    cfg = cfg or DEFAULT_CONFIG
    w1 = weiss(cone_field(p), 1.0, p.dim, cfg)
    w = np.sin(p.grid) ** (p.dim - 2)
    measure = sphere_area(p.dim - 2) * float(simpson(w, x=p.grid))
    ref = measure / p.dim
    return w1, ref, abs(w1 - ref) / abs(ref)


def F_functional(band_halfwidth: float, p: ConeProfile, d: int,
                 cfg: SolverConfig | None = None) -> float:
    """Aperture functional whose stationary point is the solution band:

        F(theta) = (kappa0^2 (lam1_D(theta) - (d-1)) + H^{d-1}(Sigma_theta)) / d,

    with kappa0 the L^2(S^{d-1}) norm of the reference profile, lam1_D the
    first Dirichlet band eigenvalue at half-width theta, and Sigma_theta the
    two lateral cone sheets in the unit ball.
    """
    cfg = cfg or DEFAULT_CONFIG
    if d != p.dim:
        raise ValueError(f"dimension argument {d} != profile dimension {p.dim}")
    th = float(band_halfwidth)
    if not 0 < th < math.pi / 2:
        raise ValueError("band half-width must lie in (0, pi/2)")
    sd2 = sphere_area(d - 2)
    w = np.sin(p.grid) ** (d - 2)
    kappa0_sq = sd2 * float(simpson(p.g ** 2 * w, x=p.grid))
    spec = SLSpec(dim=d, band=(math.pi / 2 - th, math.pi / 2 + th), mu=0.0,
                  bc="dirichlet", grid_n=p.grid.size - 1)
    lam1 = eigen_k(spec, 1, cfg).lam
    thg = np.linspace(math.pi / 2 - th, math.pi / 2 + th, p.grid.size)
    area = sd2 * float(simpson(np.sin(thg) ** (d - 2), x=thg))
    return (kappa0_sq * (lam1 - (d - 1)) + area) / d


def foliation_leading_term(p: ConeProfile, link: LinkSpectrum, side: str,
                           t: float | None, x,
                           cfg: SolverConfig | None = None) -> np.ndarray:
    """Leading asymptotics U(x) +/- t r^gamma phi_1(theta) of the foliating
    sub/supersolutions, gamma = -(d-2)/2 + sqrt(((d-2)/2)^2 + lam_1).

    ``x`` holds (r, theta) pairs in its last axis; outside the band the
    profile and its perturbation both vanish.
    """
    cfg = cfg or DEFAULT_CONFIG
    if t is None:
        raise MissingCoefficient("foliation requires the leading coefficient t")
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    d = p.dim
    rad = ((d - 2) / 2) ** 2 + link.lambda1
    if rad <= 0:
        raise NumericalError("first interior eigenvalue below the stability floor")
    gamma = -(d - 2) / 2 + math.sqrt(rad)
    pair = eigen_k(band_spec(p, 0.0, "robin"), 1, cfg)
    phi = pair.fn
    w = np.sin(p.grid) ** (d - 2)
    if simpson(phi * w, x=p.grid) < 0:
        phi = -phi
    x = np.asarray(x, dtype=float)
    r, th = x[..., 0], x[..., 1]
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    sgn = 1.0 if side == "upper" else -1.0
    u0 = r * np.interp(th, p.grid, p.g, left=0.0, right=0.0)
    bump = np.interp(th, p.grid, phi, left=0.0, right=0.0)
    return u0 + sgn * t * r ** gamma * bump
