"""Band Sturm-Liouville engine: shooting vs the finite-difference oracle,
oscillation/ordering properties, and frozen d=7 reference eigenvalues."""

import numpy as np
import pytest

from conespec.errors import ZeroDenominator
from conespec.sl import SLSpec, band_spec, eigen_fd_crosscheck, eigen_k, rayleigh

# d=7 interior Robin eigenvalues, frozen after cross-checking against the
# Richardson-extrapolated FD values below (agreement ~1e-9 at grid_n=4096).
# (mu, k): lambda.  mu=5 is the ell=1 sector, mu=12 the ell=2 sector.
FROZEN_D7 = {
    (0.0, 1): -5.698402217765,
    (0.0, 2): 0.0,
    (0.0, 3): 25.636723756989,
    (5.0, 1): 0.0,
    (5.0, 2): 6.0,
    (5.0, 3): 31.223790625059,
    (12.0, 1): 7.947140991418,
}


def test_frozen_d7_robin_values(p7):
    for (mu, k), ref in FROZEN_D7.items():
        pair = eigen_k(band_spec(p7, mu, "robin"), k)
        assert abs(pair.lam - ref) < 1e-8, (mu, k, pair.lam)
        assert pair.nodes == k - 1
        assert max(pair.bc_residual) < 1e-7


@pytest.mark.parametrize("d", [3, 7])
@pytest.mark.parametrize("bc", ["robin", "dirichlet"])
@pytest.mark.parametrize("mu_kind", ["zero", "dm2"])
def test_shooting_agrees_with_fd_oracle(d, bc, mu_kind, p3, p7):
    p = p3 if d == 3 else p7
    mu = 0.0 if mu_kind == "zero" else float(d - 2)
    spec = band_spec(p, mu, bc)
    fd = eigen_fd_crosscheck(spec, 5)
    for k in range(1, 6):
        lam = eigen_k(spec, k).lam
        assert abs(lam - fd[k - 1]) <= 1e-5, (d, bc, mu, k, lam, fd[k - 1])


def test_oscillation_count_random_sector(p3, p7):
    # nodes == k-1 for the k-th eigenfunction, across random (d, mu, k)
    rng = np.random.default_rng(0)
    profiles = {3: p3, 7: p7}
    for _ in range(20):
        d = int(rng.choice([3, 7]))
        mu = float(rng.choice([0.0, 1.0, d - 2.0, 10.0 * rng.random()]))
        k = int(rng.integers(1, 7))
        bc = "robin" if rng.random() < 0.5 else "dirichlet"
        pair = eigen_k(band_spec(profiles[d], mu, bc), k)
        assert pair.nodes == k - 1
        assert pair.fn_prime[0] > 0  # sign convention


def test_eigenvalues_increase_in_k_and_mu(p7):
    for mu in (0.0, 5.0):
        vals = [eigen_k(band_spec(p7, mu, "robin"), k).lam for k in range(1, 6)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
    lo = [eigen_k(band_spec(p7, 0.0, "robin"), k).lam for k in (1, 2, 3)]
    hi = [eigen_k(band_spec(p7, 5.0, "robin"), k).lam for k in (1, 2, 3)]
    assert all(a < b for a, b in zip(lo, hi))


def test_robin_below_dirichlet(p3, p7):
    # dropping the negative boundary term can only raise the quotient
    for p in (p3, p7):
        for mu in (0.0, 2.0):
            lr = eigen_k(band_spec(p, mu, "robin"), 1).lam
            ld = eigen_k(band_spec(p, mu, "dirichlet"), 1).lam
            assert lr < ld


def test_eigenfunction_normalization_and_rayleigh(p7):
    spec = band_spec(p7, 0.0, "robin")
    pair = eigen_k(spec, 3)
    w = np.sin(pair.grid) ** (p7.dim - 2)
    from scipy.integrate import simpson
    assert abs(simpson(pair.fn ** 2 * w, x=pair.grid) - 1.0) < 1e-10
    assert abs(rayleigh(spec, pair.fn, pair.fn_prime) - pair.lam) < 1e-7
    # FD fallback for the derivative stays close
    assert abs(rayleigh(spec, pair.fn) - pair.lam) < 1e-6


def test_rayleigh_is_variational_upper_bound(p7):
    spec = band_spec(p7, 0.0, "robin")
    lam1 = eigen_k(spec, 1).lam
    rng = np.random.default_rng(7)
    th = eigen_k(spec, 1).grid
    for _ in range(5):
        trial = np.cos(th - np.pi / 2) + 0.3 * rng.standard_normal() * \
            np.cos(3 * (th - np.pi / 2))
        assert rayleigh(spec, trial) >= lam1 - 1e-9


def test_rayleigh_rejects_null_trial(p7):
    spec = band_spec(p7, 0.0, "robin")
    n = eigen_k(spec, 1).grid.size
    with pytest.raises(ZeroDenominator):
        rayleigh(spec, np.zeros(n))
    with pytest.raises(ValueError):
        rayleigh(spec, np.ones(17))


def test_spec_validation():
    with pytest.raises(ValueError):
        SLSpec(dim=7, band=(-0.1, 2.0), mu=0.0, bc="dirichlet")
    with pytest.raises(ValueError):
        eigen_k(SLSpec(dim=7, band=(1.0, 2.0), mu=0.0, bc="dirichlet"), 0)
