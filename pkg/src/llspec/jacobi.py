"""The one-parameter Jacobi matrix J*(mu) and symmetric tridiagonal spectra.

J*(mu) is the semi-infinite symmetric tridiagonal matrix with diagonal
(-mu/2, mu/2, mu/2, ...) and unit off-diagonals.  Its monic orthogonal
polynomials encode the level polynomials G_k via G_k(lam, mu) =
2^k P_k(-lam/2), so eigenvalues of finite truncations are the backbone of
every zero computation in the library.

Eigenvalues are located by Sturm-sequence bisection (sign counts of the
leading-principal-minor recurrence) rather than QR/QL: the count function
doubles as a guaranteed "how many eigenvalues below x" oracle, which the
spectral-measure and outlier logic need anyway, and the bisection kernel
vectorizes over batches of same-size matrices for the disorder simulator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

_TINY = 2.2250738585072014e-308  # smallest normal double
_MAX_BISECT = 300


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix given by its diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=float))
        object.__setattr__(self, "offdiag", np.asarray(self.offdiag, dtype=float))
        if self.diag.ndim != 1 or self.offdiag.ndim != 1:
            raise DomainError("diag and offdiag must be one-dimensional")
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise DomainError("offdiag must have length len(diag) - 1")

    @property
    def n(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.n > 1:
            idx = np.arange(self.n - 1)
            m[idx, idx + 1] = self.offdiag
            m[idx + 1, idx] = self.offdiag
        return m


@dataclass(frozen=True)
class SpectrumDescription:
    """Band plus (for |mu| > 1) one isolated point and its measure atom."""

    band: tuple[float, float]
    isolated: float | None
    mass_at_isolated: float

    def __post_init__(self):
        if self.isolated is not None:
            lo, hi = self.band
            # the point touches the band as |mu| -> 1, so float dust may
            # land it on the endpoint; only a genuinely interior point is
            # a construction error
            margin = 1e-9 * max(1.0, abs(lo), abs(hi))
            if lo + margin < self.isolated < hi - margin:
                raise DomainError("isolated point must lie outside the band")


def jstar_truncation(mu: float, n: int) -> TridiagonalMatrix:
    """The n x n leading truncation of J*(mu)."""
    if n < 1:
        raise DomainError("truncation size must be >= 1")
    diag = np.full(n, mu / 2.0)
    diag[0] = -mu / 2.0
    return TridiagonalMatrix(diag=diag, offdiag=np.ones(n - 1))


def jstar_band(mu: float) -> tuple[float, float]:
    """Essential spectrum of J*(mu): the band [mu/2 - 2, mu/2 + 2]."""
    return (mu / 2.0 - 2.0, mu / 2.0 + 2.0)


def _sturm_counts(diag2d, off2d, shifts2d):
    """Number of eigenvalues at or below each shift, batched.

    diag2d: (B, s), off2d: (B, s-1), shifts2d: (B, m) -> counts (B, m).
    A zero pivot is counted as negative (the usual "<=" tie convention) and
    then nudged to -tiny; the subsequent +-inf propagation is the standard
    bisection-safe behaviour.
    """
    d = diag2d[:, :1] - shifts2d
    d = np.where(d == 0.0, -_TINY, d)
    counts = (d < 0).astype(np.int64)
    for i in range(1, diag2d.shape[1]):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            d = (diag2d[:, i : i + 1] - shifts2d) - (off2d[:, i - 1 : i] ** 2) / d
        d = np.where(d == 0.0, -_TINY, d)
        counts += d < 0
    return counts


def tridiag_eigs_batch(diag2d, off2d, tol: float = 1e-13) -> np.ndarray:
    """All eigenvalues of a batch of same-size tridiagonals, rows ascending."""
    diag2d = np.atleast_2d(np.asarray(diag2d, dtype=float))
    off2d = np.atleast_2d(np.asarray(off2d, dtype=float))
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    b, s = diag2d.shape
    if s == 1:
        return diag2d.copy()
    radius = np.zeros_like(diag2d)
    ao = np.abs(off2d)
    radius[:, :-1] += ao
    radius[:, 1:] += ao
    lo = np.repeat((diag2d - radius).min(axis=1, keepdims=True), s, axis=1)
    hi = np.repeat((diag2d + radius).max(axis=1, keepdims=True), s, axis=1)
    targets = np.arange(1, s + 1)[None, :]
    for _ in range(_MAX_BISECT):
        if (hi - lo).max() <= tol:
            break
        mid = 0.5 * (lo + hi)
        above = _sturm_counts(diag2d, off2d, mid) >= targets
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def tridiag_eigs(t: TridiagonalMatrix, tol: float = 1e-13) -> np.ndarray:
    """All eigenvalues of one tridiagonal matrix, ascending, to accuracy tol."""
    return tridiag_eigs_batch(t.diag[None, :], t.offdiag[None, :], tol)[0]


def eig_count_below(t: TridiagonalMatrix, x: float) -> int:
    """Sturm count of eigenvalues of t below x.

    Monotone staircase in x; when x hits an eigenvalue of a leading principal
    submatrix exactly, the zero pivot is counted on the "below" side.
    """
    return int(
        _sturm_counts(
            t.diag[None, :], t.offdiag[None, :], np.array([[float(x)]])
        )[0, 0]
    )


def leading_counts_below(t: TridiagonalMatrix, x: float) -> np.ndarray:
    """Eigenvalue counts below x for every leading principal truncation.

    Entry k-1 is the count for the k x k leading submatrix; one pass of the
    pivot recurrence yields all of them, since each truncation shares the
    sequence of leading principal minors.
    """
    x = float(x)
    counts = np.empty(t.n, dtype=np.int64)
    d = t.diag[0] - x
    if d == 0.0:
        d = -_TINY
    acc = 1 if d < 0 else 0
    counts[0] = acc
    for i in range(1, t.n):
        try:
            d = (t.diag[i] - x) - (t.offdiag[i - 1] ** 2) / d
        except (OverflowError, ZeroDivisionError):  # pragma: no cover
            d = -math.inf if d > 0 else math.inf
        if d == 0.0:
            d = -_TINY
        if d < 0:
            acc += 1
        counts[i] = acc
    return counts


def isolated_eigenvalue(mu: float):
    """-mu/2 - 1/mu when |mu| > 1, else None (the band is all there is)."""
    mu = float(mu)
    if abs(mu) <= 1.0:
        return None
    return -mu / 2.0 - 1.0 / mu


def isolated_mass(mu: float) -> float:
    """Mass of the orthogonality measure of J*(mu) at its isolated point.

    The defining expression (mu - 1/mu + sqrt((mu + 1/mu)^2 - 4)) / (2 mu)
    with the square root analytic off [-2, 2] simplifies to 1 - 1/mu^2 on
    both components |mu| > 1; the mass is zero for |mu| <= 1.
    """
    mu = float(mu)
    if abs(mu) <= 1.0:
        return 0.0
    return 1.0 - 1.0 / (mu * mu)


def ac_density(x: float, mu: float) -> float:
    """Density of the absolutely continuous part of the J*(mu) measure.

    sqrt(4 - (x - mu/2)^2) / (2 pi (mu x + mu^2/2 + 1)) on the band, zero
    outside.  The denominator vanishes only at the isolated point, which sits
    outside the band except in the degenerate case |mu| = 1, where the pole
    touches a band endpoint; evaluation exactly there raises.
    """
    x = float(x)
    mu = float(mu)
    lo, hi = jstar_band(mu)
    if x < lo or x > hi:
        return 0.0
    denom = mu * x + mu * mu / 2.0 + 1.0
    if denom == 0.0:
        raise DomainError("density pole touches the band endpoint at |mu| = 1")
    return math.sqrt(max(4.0 - (x - mu / 2.0) ** 2, 0.0)) / (2.0 * math.pi * denom)


def _sqrt_band_branch(w: complex) -> complex:
    """sqrt(w^2 - 4) with cut on [-2, 2], positive to the right of the cut.

    Realized as sqrt(w - 2) * sqrt(w + 2) with principal roots, which behaves
    like +w at +infinity and like -|w| on (-inf, -2).
    """
    return cmath.sqrt(w - 2.0) * cmath.sqrt(w + 2.0)


def m_function(z: complex, mu: float) -> complex:
    """Stieltjes transform of the J*(mu) measure at z off the band.

    Built from the unperturbed band transform m0(z) = (-(z - mu/2) +
    sqrt((z - mu/2)^2 - 4)) / 2 through one step of the continued fraction:
    m(z) = 1 / (-mu/2 - z - m0(z)).  Herglotz branch: Im m > 0 for Im z > 0.
    """
    z = complex(z)
    mu = float(mu)
    lo, hi = jstar_band(mu)
    if z.imag == 0.0 and lo <= z.real <= hi:
        raise DomainError("m-function is not defined on the band")
    w = z - mu / 2.0
    m0 = (-w + _sqrt_band_branch(w)) / 2.0
    denom = -mu / 2.0 - z - m0
    if denom == 0.0:
        raise DomainError("evaluation at the mass point of the measure")
    return 1.0 / denom


def critical_index(mu) -> int:
    """Smallest truncation size whose polynomial acquires an out-of-band zero.

    The unique m with (m+1)/m <= |mu| < m/(m-1) (the right bound read as
    +infinity at m = 1).  Exact for int/Fraction input; floats snap to the
    boundary when within 1e-12 relative.
    """
    if isinstance(mu, (int, Fraction)) and not isinstance(mu, bool):
        a = abs(Fraction(mu))
        if a <= 1:
            raise DomainError("critical index requires |mu| > 1")
        return max(1, math.ceil(1 / (a - 1)))
    a = abs(float(mu))
    if a <= 1.0:
        raise DomainError("critical index requires |mu| > 1")
    r = 1.0 / (a - 1.0)
    nearest = round(r)
    if nearest >= 1 and abs(r - nearest) <= 1e-12 * max(1.0, abs(r)):
        return int(nearest)
    return max(1, math.ceil(r))


def jstar_spectrum(mu: float) -> SpectrumDescription:
    """Spectrum of J*(mu): the band, plus the isolated point when |mu| > 1."""
    mu = float(mu)
    return SpectrumDescription(
        band=jstar_band(mu),
        isolated=isolated_eigenvalue(mu),
        mass_at_isolated=isolated_mass(mu),
    )


def pencil_spectrum(mu: float) -> SpectrumDescription:
    """Spectrum of the convolution pencil, in the lam = -2x coordinates.

    Band [-4 - mu, 4 - mu]; for |mu| > 1 additionally the accumulation point
    mu + 2/mu of eigenvalues outside the band.  mass_at_isolated is the atom
    of the (transported) J* orthogonality measure there; the spectral measure
    of the pencil itself has no atom at the accumulation point.
    """
    mu = float(mu)
    isolated = None
    if abs(mu) > 1.0:
        isolated = mu + 2.0 / mu
    return SpectrumDescription(
        band=(-4.0 - mu, 4.0 - mu),
        isolated=isolated,
        mass_at_isolated=isolated_mass(mu),
    )
