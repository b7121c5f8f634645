"""Chebyshev polynomials of the second kind.

Everything downstream (level polynomials, Jacobi truncations, spectral
measures) reduces to evaluations and zeros of U_n, so this module is kept
small and heavily cross-checked.  The primary evaluator is the forward
recurrence

    U_0(x) = 1,  U_1(x) = 2x,  U_{n+1}(x) = 2x U_n(x) - U_{n-1}(x),

which is exact at integer arguments and uniformly accurate on [-1, 1].  The
trigonometric form U_n(cos t) = sin((n+1)t)/sin(t) is kept in the test suite
as an independent oracle; it is singular where sin(t) = 0 and therefore not
used as the primary path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

# Rescaling threshold for the float recurrence.  Values are folded back into
# [2^-512, 2^512) while an integer exponent accumulates, so intermediate
# growth ~ (|x| + sqrt(x^2-1))^n never overflows even for n in the thousands.
_BIG = 2.0 ** 512
_BIG_INV = 2.0 ** -512


@dataclass(frozen=True)
class ChebEval:
    """One evaluation U_degree(argument) = value."""

    degree: int
    argument: float
    value: float


def _u_pair_exact(n, x):
    """(U_{n-1}(x), U_n(x)) in the arithmetic of x (int / Fraction)."""
    prev, cur = 0, 1  # U_{-1}, U_0
    for _ in range(n):
        prev, cur = cur, 2 * x * cur - prev
    return prev, cur


def u_pair_scaled(n: int, x: float) -> tuple[float, float, int]:
    """Return (p, c, e) with U_{n-1}(x) = p * 2^e and U_n(x) = c * 2^e."""
    if n < 0:
        raise DomainError("degree must be nonnegative")
    prev, cur, e = 0.0, 1.0, 0
    for _ in range(n):
        prev, cur = cur, 2.0 * x * cur - prev
        if abs(cur) > _BIG or abs(prev) > _BIG:
            prev *= _BIG_INV
            cur *= _BIG_INV
            e += 512
    return prev, cur, e


def _ldexp_safe(m: float, e: int) -> float:
    try:
        return math.ldexp(m, e)
    except OverflowError:
        return math.inf if m > 0 else -math.inf


def u_eval(n: int, x):
    """Evaluate U_n(x) by forward recurrence.

    Exact (same-type) result for int or Fraction arguments; floats go through
    a scaled recurrence so that large n and |x| > 1 do not overflow
    intermediates.
    """
    if n < 0:
        raise DomainError("degree must be nonnegative")
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return _u_pair_exact(n, x)[1]
    _, cur, e = u_pair_scaled(n, float(x))
    return _ldexp_safe(cur, e)


def cheb_eval(n: int, x: float) -> ChebEval:
    return ChebEval(degree=n, argument=float(x), value=u_eval(n, float(x)))


def u_ratio_limit(x: float) -> float:
    """Limit of U_n(x)/U_{n+1}(x) for |x| > 1, namely 1/(x + sqrt(x^2 - 1)).

    The square root carries the sign of x (analytic continuation off the
    branch cut [-1, 1]), which forces |result| < 1 on both components.
    """
    x = float(x)
    if abs(x) <= 1.0:
        raise DomainError("ratio limit requires |x| > 1")
    return 1.0 / (x + math.copysign(math.sqrt(x * x - 1.0), x))


def u_zeros(n: int) -> list[float]:
    """The n zeros of U_n, i.e. cos(j*pi/(n+1)) for j = 1..n, ascending."""
    if n < 1:
        raise DomainError("need n >= 1")
    return [math.cos(j * math.pi / (n + 1)) for j in range(n, 0, -1)]
