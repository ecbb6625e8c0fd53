"""Laplace-Beltrami eigenvalues and multiplicities on the factor sphere S^{d-2}.

The link separates as a theta band times S^{d-2}; each spherical harmonic
degree ell contributes mu = ell*(ell+d-3) with the dimension of the space of
degree-ell harmonics in R^{d-1}.  For d=3 the factor sphere is the circle:
mu = ell^2 with multiplicity 2 for ell >= 1 (the binomial count below covers
that case without special-casing).
"""

from __future__ import annotations

import dataclasses
from math import comb


@dataclasses.dataclass(frozen=True)
class SphereMode:
    ell: int
    mu: float
    multiplicity: int


def harmonic_multiplicity(d: int, ell: int) -> int:
    """dim of spherical harmonics of degree ell on S^{d-2} (ambient R^{d-1})."""
    n = d - 1
    if ell == 0:
        return 1
    first = comb(n + ell - 1, n - 1)
    second = comb(n + ell - 3, n - 1) if n + ell - 3 >= n - 1 else 0
    return first - second


def modes_up_to(d: int, mu_max: float) -> list[SphereMode]:
    """All sphere modes with mu = ell(ell+d-3) <= mu_max, in increasing ell."""
    if d < 3:
        raise ValueError(f"d must be >= 3, got {d}")
    out = []
    ell = 0
    while True:
        mu = ell * (ell + d - 3)
        if mu > mu_max:
            break
        out.append(SphereMode(ell=ell, mu=float(mu), multiplicity=harmonic_multiplicity(d, ell)))
        ell += 1
    return out
