"""Cumulants of the normalized tail and the Berry-Esseen bound.

Split Z = X_M + Y_M at a truncation index M, with Y_M = sum_{n>=M}
lambda_n (eta_n - 1) and sigma_M^2 = Var Y_M = (1/r) S_2(M).  The
normalized tail Y_tilde_M = Y_M / sigma_M has cumulants

    kappa_{k,M} = (k-1)! / (r^{k-1} sigma_M^k) * S_k(M),    k >= 2,

with kappa_{2,M} = 1 identically.  Because Y_tilde_M is an infinitely
divisible pure-jump variable, sup_x |P[Y_tilde_M <= x] - Phi(x)| is bounded
by 0.7056 * kappa_{3,M} whenever the Lyapunov-type ratio
S_3(M)/S_2(M)^{3/2} tends to 0 along M.  For exponentially decaying weights
that ratio is constant in M and normality fails: each summand is bounded
below by -lambda_n, so Y_tilde_M never reaches below -S_1(M)/sigma_M (for
lambda_n = 2^-(n+1) this equals -sqrt(3r) for every M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateTailError, DomainError
from .weights import GammaSumSpec, _check_m, tail_power_sum, tail_weight_sum

__all__ = [
    "BERRY_ESSEEN_CONSTANT",
    "MAX_CUMULANT_ORDER",
    "TailCumulants",
    "sigma_M",
    "cumulants",
    "berry_esseen_bound",
    "be_condition_ratio",
    "support_lower_bound",
]

# Best published constant for the Berry-Esseen inequality in this setting.
BERRY_ESSEEN_CONSTANT = 0.7056

# (k-1)! overflows float64 near k = 171; orders beyond 20 are numerically
# useless for Edgeworth work anyway.
MAX_CUMULANT_ORDER = 20


@dataclass(frozen=True)
class TailCumulants:
    """sigma_M plus (kappa_{2,M}, ..., kappa_{K,M}) for one truncation M."""

    M: int
    sigma_M: float
    kappa: tuple

    def kappa_k(self, k: int) -> float:
        """kappa_{k,M} by cumulant order k (k = 2 is the first stored entry)."""
        if not 2 <= k <= self.max_order:
            raise DomainError(
                f"kappa_{k} not available; stored orders are 2..{self.max_order}"
            )
        return self.kappa[k - 2]

    @property
    def max_order(self) -> int:
        return len(self.kappa) + 1


def _tail_s2(spec: GammaSumSpec, m: int) -> float:
    s2 = tail_power_sum(spec, m, 2)
    if s2 <= 0.0:
        raise DegenerateTailError(
            f"weight tail is empty at M = {m}; sigma_M = 0 and the normalized "
            f"tail is undefined"
        )
    return s2


def sigma_M(spec: GammaSumSpec, m: int) -> float:
    """Standard deviation of Y_M: sqrt((1/r) sum_{n>=M} lambda_n^2)."""
    return math.sqrt(_tail_s2(spec, m) / spec.r)


def cumulants(spec: GammaSumSpec, m: int, K: int) -> TailCumulants:
    """kappa_{k,M} for k = 2..K via exact tail power sums.

    K is capped at MAX_CUMULANT_ORDER; kappa_{2,M} = 1 holds by construction
    and is asserted to 1e-10 as an internal consistency check.
    """
    m = _check_m(m)
    if not (isinstance(K, int) and 3 <= K <= MAX_CUMULANT_ORDER):
        raise DomainError(
            f"cumulant order K must be an integer in [3, {MAX_CUMULANT_ORDER}], "
            f"got {K!r}"
        )
    r = spec.r
    sig = sigma_M(spec, m)
    kappa = []
    for k in range(2, K + 1):
        sk = tail_power_sum(spec, m, k)
        kappa.append(math.factorial(k - 1) * sk / (r ** (k - 1) * sig**k))
    if abs(kappa[0] - 1.0) > 1e-10:
        raise DomainError(
            f"internal consistency failure: kappa_2 = {kappa[0]!r}, expected 1"
        )
    return TailCumulants(M=m, sigma_M=sig, kappa=tuple(kappa))


def berry_esseen_bound(spec: GammaSumSpec, m: int) -> float:
    """0.7056 * kappa_{3,M}: certified sup-distance bound to Phi when the
    decay condition holds (reported unconditionally; see be_condition_ratio)."""
    return BERRY_ESSEEN_CONSTANT * cumulants(spec, m, 3).kappa[1]


def be_condition_ratio(spec: GammaSumSpec, m: int) -> float:
    """S_3(M) / S_2(M)^{3/2}; asymptotic normality needs this to tend to 0."""
    s2 = _tail_s2(spec, m)
    return tail_power_sum(spec, m, 3) / s2**1.5


def support_lower_bound(spec: GammaSumSpec, m: int) -> float:
    """inf of the support of Y_tilde_M: -S_1(M)/sigma_M.

    Each summand lambda_n (eta_n - 1) is bounded below by -lambda_n, and the
    gamma variable gets arbitrarily close to 0, so the bound is sharp.
    Returns -inf when sum lambda_n diverges (power law with gamma <= 1).
    """
    s1 = tail_weight_sum(spec, m)
    if math.isinf(s1):
        return -math.inf
    return -s1 / sigma_M(spec, m)
