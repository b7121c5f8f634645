"""The two-variable polynomial family G_k, H_k of the level recursion.

The family is generated by the companion step

    (G_{k+1}, H_{k+1}) = [[-lam - mu, -4], [1, 0]] (G_k, H_k),
    G_1 = mu - lam,  H_1 = 1,

so H_k = G_{k-1} (with G_0 = 1) and G_{k+1} = (-lam - mu) G_k - 4 G_{k-1}.
Three equivalent realizations are provided and cross-checked:

  * closed form      g_value:  G_k / 2^k = U_k(s) + mu U_{k-1}(s),
                     with s = (-lam - mu) / 4;
  * matrix recursion g_value_recursive: the literal companion iteration with
                     a 1/2 rescale per step (oracle, kept independent);
  * angular form     angular_form: sin((k+1)t) + mu sin(kt) after the in-band
                     substitution lam = -mu - 4 cos(t).

A note on scaling: the off-term coefficient in the closed form for G_k is
2^k, not 2^(k+1); the wrong constant fails the recursion already at k = 2,
where the degree-2 member must reduce to lam^2 - mu^2 - 4 (see the negative
control in the test suite and the README).

Zeros of G_k are found through the k x k truncation of J*(mu): by
G_k(lam, mu) = 2^k P_k(-lam/2) they are exactly -2 times the truncation
eigenvalues, all real and simple.  Root-finding on expanded coefficients is
deliberately avoided (exponentially ill-conditioned).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chebyshev import u_pair_scaled
from .errors import DomainError
from .jacobi import jstar_truncation, tridiag_eigs

_LN2 = math.log(2.0)
_BIG = 2.0 ** 512
_BIG_INV = 2.0 ** -512


@dataclass(frozen=True)
class GHValue:
    """Normalized pair (G_k / 2^k, H_k / 2^(k-1)) at one point (lam, mu)."""

    k: int
    lam: float
    mu: float
    g_normalized: float
    h_normalized: float


@dataclass(frozen=True)
class MonicOPValue:
    """P_k(z), the degree-k monic orthogonal polynomial of J*(mu), at z."""

    k: int
    z: float
    mu: float
    value: float


def g_value(k: int, lam: float, mu: float) -> float:
    """G_k(lam, mu) / 2^k via the Chebyshev closed form."""
    if k < 1:
        raise DomainError("index k must be >= 1")
    s = (-lam - mu) / 4.0
    prev, cur, e = u_pair_scaled(k, s)
    try:
        return math.ldexp(cur + mu * prev, e)
    except OverflowError:
        return math.copysign(math.inf, cur + mu * prev)


def g_value_with_scale(k: int, lam: float, mu: float) -> tuple[float, float]:
    """(G_k / 2^k, evaluation scale |U_k(s)| + |mu U_{k-1}(s)|).

    The scale is the natural conditioning reference for residual checks: at
    out-of-band points both Chebyshev terms grow like (|s| + sqrt(s^2-1))^k,
    so only |value| / scale is meaningful there.
    """
    if k < 1:
        raise DomainError("index k must be >= 1")
    s = (-lam - mu) / 4.0
    prev, cur, e = u_pair_scaled(k, s)
    try:
        value = math.ldexp(cur + mu * prev, e)
    except OverflowError:
        value = math.copysign(math.inf, cur + mu * prev)
    try:
        scale = math.ldexp(abs(cur) + abs(mu * prev), e)
    except OverflowError:
        scale = math.inf
    return value, scale


def g_signlog(k: int, lam: float, mu: float) -> tuple[float, float]:
    """(sign, ln|G_k|) of the unnormalized G_k; (0, -inf) at a zero."""
    if k < 1:
        raise DomainError("index k must be >= 1")
    s = (-lam - mu) / 4.0
    prev, cur, e = u_pair_scaled(k, s)
    g = cur + mu * prev
    if g == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, g), (k + e) * _LN2 + math.log(abs(g))


def g_value_recursive(k: int, lam: float, mu: float) -> float:
    """G_k(lam, mu) / 2^k by iterating the companion recursion.

    Each step applies [[-lam - mu, -4], [1, 0]] and rescales by 1/2; kept as
    an independent oracle for the closed form.
    """
    if k < 1:
        raise DomainError("index k must be >= 1")
    g, h = (mu - lam) / 2.0, 0.5  # (G_1, H_1) / 2
    e = 0
    for _ in range(k - 1):
        g, h = ((-lam - mu) * g - 4.0 * h) / 2.0, g / 2.0
        if abs(g) > _BIG or abs(h) > _BIG:
            g *= _BIG_INV
            h *= _BIG_INV
            e += 512
    try:
        return math.ldexp(g, e)
    except OverflowError:
        return math.copysign(math.inf, g)


def gh_value(k: int, lam: float, mu: float) -> GHValue:
    """Both normalized members at (lam, mu); H_k / 2^(k-1) = G_{k-1} / 2^(k-1)."""
    if k < 1:
        raise DomainError("index k must be >= 1")
    h = 1.0 if k == 1 else g_value(k - 1, lam, mu)
    return GHValue(k=k, lam=lam, mu=mu, g_normalized=g_value(k, lam, mu), h_normalized=h)


def monic_op_value(k: int, z: float, mu: float) -> MonicOPValue:
    """P_k(z) = 2^-k G_k(-2z, mu), monic of degree k."""
    return MonicOPValue(k=k, z=z, mu=mu, value=g_value(k, -2.0 * z, mu))


def angular_form(k: int, t: float, mu: float) -> float:
    """sin((k+1)t) + mu sin(kt); equals sin(t) * g_value(k, -mu - 4cos t, mu).

    Its zeros in t on (0, pi) are exactly the in-band zeros of G_k under the
    parametrization lam = -mu - 4 cos(t).
    """
    if k < 1:
        raise DomainError("index k must be >= 1")
    if not 0.0 < t < math.pi:
        raise DomainError("angular parameter must lie strictly inside (0, pi)")
    return math.sin((k + 1) * t) + mu * math.sin(k * t)


def g_zeros(k: int, mu: float, tol: float = 1e-13) -> np.ndarray:
    """The k (real, simple) zeros of G_k(., mu), ascending.

    Computed as -2 times the eigenvalues of the k x k truncation of J*(mu).
    """
    if k < 1:
        raise DomainError("index k must be >= 1")
    eigs = tridiag_eigs(jstar_truncation(mu, k), tol=tol)
    return np.sort(-2.0 * eigs)
