"""Finite-level representation matrices of the lamplighter group.

The generators a, b and the switch c = b^{-1} a act on the 2^n vertices of
level n of the binary rooted tree; in the self-similar block form

    a_n = [[0, a_{n-1}], [b_{n-1}, 0]],
    b_n = [[a_{n-1}, 0], [0, b_{n-1}]],
    c_n = [[0, I], [I, 0]],

with base case a_0 = b_0 = c_0 = [1].  The pencil M_n(mu) = a + a^T + b +
b^T - mu c (a^{-1} = a^T for permutation matrices) is the finite model whose
characteristic determinant

    Phi_n(lam, mu) = det(M_n(mu) - lam I)
                   = (4 - lam - mu) G_1^(2^(n-2)) G_2^(2^(n-3)) ... G_{n-1} G_n

factors through the level polynomials.  Both routes are implemented: an LU
determinant of the assembled matrix and the factored product in
(sign, log-magnitude) form, plus a dense rotation eigensolver as the oracle
for eigenvalue multiplicities.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConvergenceError, DomainError
from .ghpolys import g_signlog

_N_MAX_DEFAULT = 12


def level_cap() -> int:
    """Largest allowed level n; override with the LLSPEC_NMAX env variable."""
    raw = os.environ.get("LLSPEC_NMAX")
    if raw is None:
        return _N_MAX_DEFAULT
    try:
        cap = int(raw)
    except ValueError as exc:
        raise CapacityError(f"LLSPEC_NMAX must be an integer, got {raw!r}") from exc
    if cap < 0:
        raise CapacityError("LLSPEC_NMAX must be nonnegative")
    return cap


def _check_level(n: int):
    cap = level_cap()
    if n < 0:
        raise DomainError("level must be nonnegative")
    if n > cap:
        raise CapacityError(f"level {n} exceeds the configured bound {cap}")


@dataclass(frozen=True)
class LevelRep:
    """Permutation matrices of a, b, c acting on level n of the binary tree."""

    level: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


@dataclass(frozen=True)
class PencilMatrix:
    """The symmetric 2^n x 2^n matrix a + a^T + b + b^T - mu c."""

    level: int
    mu: float
    entries: np.ndarray


def build_level(n: int) -> LevelRep:
    """Assemble the level-n generator matrices by the block recursion."""
    _check_level(n)
    a = b = c = np.ones((1, 1), dtype=np.uint8)
    for k in range(1, n + 1):
        size = 1 << (k - 1)
        zero = np.zeros((size, size), dtype=np.uint8)
        eye = np.eye(size, dtype=np.uint8)
        a, b, c = (
            np.block([[zero, a], [b, zero]]),
            np.block([[a, zero], [zero, b]]),
            np.block([[zero, eye], [eye, zero]]),
        )
    return LevelRep(level=n, a=a, b=b, c=c)


def pencil_matrix(rep: LevelRep, mu: float) -> PencilMatrix:
    a = rep.a.astype(float)
    b = rep.b.astype(float)
    c = rep.c.astype(float)
    m = a + a.T + b + b.T - mu * c
    return PencilMatrix(level=rep.level, mu=float(mu), entries=m)


def phi_det_signlog(n: int, lam: float, mu: float) -> tuple[float, float]:
    """(sign, ln|Phi_n|) from an LU determinant of M_n(mu) - lam I."""
    _check_level(n)
    rep = build_level(n)
    m = pencil_matrix(rep, mu).entries - lam * np.eye(1 << n)
    sign, logabs = np.linalg.slogdet(m)
    return float(sign), float(logabs)


def phi_det(n: int, lam: float, mu: float) -> float:
    sign, logabs = phi_det_signlog(n, lam, mu)
    if sign == 0.0:
        return 0.0
    try:
        return sign * math.exp(logabs)
    except OverflowError:
        return math.copysign(math.inf, sign)


def phi_factorized_signlog(n: int, lam: float, mu: float) -> tuple[float, float]:
    """(sign, ln|Phi_n|) from the factored product over the level polynomials.

    The factor G_k enters with exponent 2^(n-1-k) for k < n and exponent 1
    for k = n; working in log-magnitude keeps exponents of order 2^n exact
    where plain floats would overflow by n around 15.
    """
    if n < 1:
        raise DomainError("factorized form needs n >= 1")
    lead = 4.0 - lam - mu
    if lead == 0.0:
        return 0.0, -math.inf
    sign = math.copysign(1.0, lead)
    logabs = math.log(abs(lead))
    for k in range(1, n + 1):
        exponent = 1 if k == n else 1 << (n - 1 - k)
        gs, gl = g_signlog(k, lam, mu)
        if gs == 0.0:
            return 0.0, -math.inf
        logabs += exponent * gl
        if gs < 0.0 and exponent % 2 == 1:
            sign = -sign
    return sign, logabs


def phi_factorized(n: int, lam: float, mu: float) -> float:
    sign, logabs = phi_factorized_signlog(n, lam, mu)
    if sign == 0.0:
        return 0.0
    try:
        return sign * math.exp(logabs)
    except OverflowError:
        return math.copysign(math.inf, sign)


def dense_eigs(
    m: PencilMatrix, sweep_limit: int = 50, tol_factor: float = 1e-12
) -> np.ndarray:
    """All eigenvalues of the pencil matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below
    tol_factor * ||M||_F.  Rotations are plain plane rotations on a private
    copy; no deflation heuristics are needed even though eigenvalue clusters
    carry multiplicities of order 2^(n-2).
    """
    a = np.array(m.entries, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, atol=0.0):
        raise DomainError("dense eigensolver expects a symmetric matrix")
    if n == 1:
        return a[0].copy()
    fro = float(np.linalg.norm(a))
    if fro == 0.0:
        return np.zeros(n)
    thresh = tol_factor * fro
    skip = thresh / (2.0 * n)

    def offnorm():
        return math.sqrt(max((a * a).sum() - (np.diag(a) ** 2).sum(), 0.0))

    for _ in range(sweep_limit):
        if offnorm() <= thresh:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                cos = 1.0 / math.hypot(1.0, t)
                sin = t * cos
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = cos * col_p - sin * col_q
                a[:, q] = sin * col_p + cos * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = cos * row_p - sin * row_q
                a[q, :] = sin * row_p + cos * row_q
                a[p, q] = a[q, p] = 0.0
    residual = offnorm()
    if residual <= thresh:
        return np.sort(np.diag(a))
    raise ConvergenceError(
        f"rotation sweeps exhausted with off-diagonal residual {residual:.3e}",
        residual=residual,
    )
