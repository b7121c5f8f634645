"""Atomic spectral measure of the pencil and the exceptional-parameter calculus.

The spectral measure of the pencil at the delta function of the identity is
purely atomic:

    nu_mu = sum_{k >= 1} 2^-(k+1) * (counting measure of the zeros of G_k),

with the k = 1 term contributing the atom 1/4 * delta_mu.  Truncating at
depth K leaves the exact tail bound (K+2) 2^-(K+1), so masses can be kept as
rationals and the truncation always sums to one exactly.

Zero sets of distinct G_k are generically disjoint; they collide only for
exceptional parameter values, handled per atom through the index progression
of the colliding polynomials:

  * in-band collision at lam = -mu - 4 cos(t) with t = p pi / q: the indices
    k with G_k(lam, mu) = 0 form an arithmetic progression of step q whose
    first member n0 lies in 1..q, and the limiting mass is
    2^q / (2^(n0+1) (2^q - 1));
  * collision at lam = mu (equivalently U_k(-mu/2) = 0 for some k, minimal
    k): indices 1, k+2, 2k+3, ... -- the previous rule with n0 = 1 and
    q = k + 1, giving 1/4 + 1/(4 (2^(k+1) - 1));
  * mu = 1 + 1/k: the single zero of G_k sits exactly at the band endpoint
    4 - mu shared with the pencil factor (4 - lam - mu); the factor carries
    no limiting mass, so the atom keeps 2^-(k+1).

The three classes are labelled B1/B2/B3 throughout the API.  Membership is
decided exactly for structured parameter forms and by bounded scans (flagged
as heuristic) for bare floats; B1 is dense in the reals, so no finite
procedure can decide it unconditionally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath as mp
import numpy as np

from .chebyshev import u_eval
from .errors import DomainError
from .ghpolys import g_zeros

__all__ = [
    "FloatMu",
    "RationalMu",
    "B1Mu",
    "B2Mu",
    "MuParam",
    "mu_value",
    "mu_fraction",
    "parse_mu",
    "format_mu",
    "MuClassification",
    "classify_mu",
    "Atom",
    "AtomicMeasure",
    "measure_truncation",
    "atom_mass_exact",
    "multiplicity_in_phi",
    "ids_cdf",
    "measure_cdf_mid",
    "ProgressionIndices",
    "arithmetic_progression_indices",
    "measure_to_json",
]


# ---------------------------------------------------------------------------
# Parameter forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FloatMu:
    """Unstructured real parameter; membership questions become heuristic."""

    x: float


@dataclass(frozen=True)
class RationalMu:
    """Exact rational parameter p/q."""

    p: int
    q: int

    def __post_init__(self):
        if self.q <= 0:
            raise DomainError("denominator must be positive")
        g = math.gcd(self.p, self.q)
        object.__setattr__(self, "p", self.p // g)
        object.__setattr__(self, "q", self.q // g)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class B1Mu:
    """mu = -cos(p pi/q) - sin(p pi/q) cot(n p pi/q): an in-band collision point."""

    p: int
    q: int
    n: int

    def __post_init__(self):
        if not (0 < self.p < self.q):
            raise DomainError("need 0 < p < q")
        if math.gcd(self.p, self.q) != 1:
            raise DomainError("p/q must be in lowest terms")
        if self.n < 1 or self.n % self.q == 0:
            raise DomainError("index n must be >= 1 and not a multiple of q")


@dataclass(frozen=True)
class B2Mu:
    """mu = 2 cos(j pi/(k+1)), a zero of U_k(./2): collision at lam = mu."""

    j: int
    k: int

    def __post_init__(self):
        if not (1 <= self.j <= self.k):
            raise DomainError("need 1 <= j <= k")


MuParam = Union[FloatMu, RationalMu, B1Mu, B2Mu]


def mu_value(mu: MuParam) -> float:
    """Float value of any parameter form."""
    if isinstance(mu, FloatMu):
        return float(mu.x)
    if isinstance(mu, RationalMu):
        return mu.p / mu.q
    if isinstance(mu, B1Mu):
        if (mu.n - 1) % mu.q == 0:
            # collapses to -2cos(p pi/q); snap the rational-cosine angles
            # so the exceptional values 0 and +-1 are exact floats
            if mu.q == 2:
                return 0.0
            if mu.q == 3:
                return -1.0 if mu.p == 1 else 1.0
        t = mu.p * math.pi / mu.q
        return -math.sin((mu.n + 1) * t) / math.sin(mu.n * t)
    if isinstance(mu, B2Mu):
        d = math.gcd(mu.j, mu.k + 1)
        jr, mr = mu.j // d, (mu.k + 1) // d
        if mr == 2:  # 2cos(pi/2)
            return 0.0
        if mr == 3:  # 2cos(pi/3), 2cos(2pi/3)
            return 1.0 if jr == 1 else -1.0
        return 2.0 * math.cos(jr * math.pi / mr)
    raise DomainError(f"not a parameter form: {mu!r}")


def mu_fraction(mu: MuParam):
    """Exact Fraction value when the form carries one, else None."""
    if isinstance(mu, RationalMu):
        return mu.fraction
    return None


def parse_mu(text: str) -> MuParam:
    """Parse a tagged parameter string.

    Accepted forms: "float:0.3", "rat:7/6", "b1:p/q:n", "b2:j/k"; bare
    "7/6" and bare decimals are read as rational and float respectively.
    """
    text = text.strip()
    try:
        if text.startswith("float:"):
            return FloatMu(float(text[6:]))
        if text.startswith("rat:"):
            p, q = text[4:].split("/")
            return RationalMu(int(p), int(q))
        if text.startswith("b1:"):
            frac, n = text[3:].rsplit(":", 1)
            p, q = frac.split("/")
            return B1Mu(int(p), int(q), int(n))
        if text.startswith("b2:"):
            j, k = text[3:].split("/")
            return B2Mu(int(j), int(k))
        if "/" in text:
            p, q = text.split("/")
            return RationalMu(int(p), int(q))
        return FloatMu(float(text))
    except (ValueError, DomainError) as exc:
        raise DomainError(f"cannot parse parameter {text!r}: {exc}") from exc


def format_mu(mu: MuParam) -> str:
    """Tagged string form; round-trips through parse_mu."""
    if isinstance(mu, FloatMu):
        return f"float:{mu.x!r}"
    if isinstance(mu, RationalMu):
        return f"rat:{mu.p}/{mu.q}"
    if isinstance(mu, B1Mu):
        return f"b1:{mu.p}/{mu.q}:{mu.n}"
    if isinstance(mu, B2Mu):
        return f"b2:{mu.j}/{mu.k}"
    raise DomainError(f"not a parameter form: {mu!r}")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuClassification:
    in_b1: bool
    in_b2: bool
    in_b3: bool
    heuristic: bool
    b1_witness: tuple[int, int, int] | None  # (p, q, n0): atom angle p pi/q, first index n0
    b2_witness: int | None  # minimal k with U_k(-mu/2) = 0
    b3_witness: int | None  # k with mu = 1 + 1/k


def _coalesce_tol(x: float) -> float:
    return 1e-9 * max(1.0, abs(4.0 - x) + abs(4.0 + x))


def _group_zeros(x: float, kmax: int, tol: float):
    """All zeros of G_1..G_kmax at parameter x, grouped within tol.

    Returns a list of (position, sorted tuple of contributing indices); the
    position is taken from the smallest contributing index.
    """
    entries = []
    for k in range(1, kmax + 1):
        for z in g_zeros(k, x):
            entries.append((float(z), k))
    entries.sort()
    groups = []
    cur = [entries[0]]
    for item in entries[1:]:
        if item[0] - cur[-1][0] <= tol:
            cur.append(item)
        else:
            groups.append(cur)
            cur = [item]
    groups.append(cur)
    out = []
    for grp in groups:
        ks = sorted(k for _, k in grp)
        pos = min(grp, key=lambda zk: zk[1])[0]
        out.append((pos, tuple(ks)))
    return out


def _progression_of(indices) -> tuple[int, int | None]:
    """(first index, common step or None) of an observed index family."""
    k0 = indices[0]
    if len(indices) == 1:
        return k0, None
    diffs = {b - a for a, b in zip(indices, indices[1:])}
    if len(diffs) != 1:
        raise DomainError(f"collision indices {indices} are not an arithmetic progression")
    return k0, diffs.pop()


def _recover_angle(x: float, pos: float, step: int):
    """Rational angle p/q (of pi) for an in-band collision atom, or None."""
    c = (-pos - x) / 4.0
    if not -1.0 < c < 1.0:
        return None
    t = math.acos(c) / math.pi
    frac = Fraction(t).limit_denominator(step)
    if frac.denominator != step or not 0 < frac.numerator < step:
        return None
    if abs(t - float(frac)) > 1e-6:
        return None
    return frac.numerator, step


def _b1_identity_holds(mu_exact: Fraction, p: int, q: int, n0: int) -> bool:
    """Exact check of sin((n0+1) t) + mu sin(n0 t) = 0 at t = p pi / q.

    Verified at 60 digits; for bounded p, q, n0 and rational mu of moderate
    height a nonzero value of this algebraic number cannot be below 1e-45,
    so the numeric test is conclusive.
    """
    with mp.workdps(60):
        t = mp.pi * p / q
        val = mp.sin((n0 + 1) * t) + mp.mpf(mu_exact.numerator) / mu_exact.denominator * mp.sin(n0 * t)
        return abs(val) < mp.mpf(10) ** -45


# exact rational members of B1/B2 with their witnesses
_RATIONAL_B1 = {
    Fraction(0): (1, 2, 1),
    Fraction(1): (2, 3, 1),
    Fraction(-1): (1, 3, 1),
}
_RATIONAL_B2 = {Fraction(0): 1, Fraction(1): 2, Fraction(-1): 2}


def classify_mu(mu: MuParam, k_max: int = 20, tol: float = 1e-9) -> MuClassification:
    """Decide B1/B2/B3 membership with witnesses.

    Structured forms are decided exactly where possible (B1Mu/B2Mu by
    construction, rationals by consecutive-integer and rational-cosine
    arguments); everything that rests on a bounded numeric scan sets the
    heuristic flag.
    """
    if k_max < 2:
        raise DomainError("need k_max >= 2")
    x = mu_value(mu)
    heuristic = False

    in_b3, b3_w = False, None
    frac = mu_fraction(mu)
    if frac is not None:
        if frac > 1 and (frac - 1).numerator == 1:
            in_b3, b3_w = True, (frac - 1).denominator
    elif isinstance(mu, B2Mu):
        pass  # 2cos(j pi/(k+1)) is rational only for 0, +-1, never 1 + 1/k
    elif x > 1.0 + tol:
        k = round(1.0 / (x - 1.0))
        if 1 <= k <= 10 ** 6 and abs(x - 1.0 - 1.0 / k) < tol:
            in_b3, b3_w = True, k
            heuristic = True

    in_b2, b2_w = False, None
    if isinstance(mu, B2Mu):
        d = math.gcd(mu.j, mu.k + 1)
        in_b2, b2_w = True, (mu.k + 1) // d - 1
    elif isinstance(mu, B1Mu) and (mu.n - 1) % mu.q == 0:
        # n = 1 mod q collapses the value to -2cos(p pi/q), whose lam = mu
        # atom recurs with step q; minimal Chebyshev index is q - 1
        in_b2, b2_w = True, mu.q - 1
    elif frac is not None:
        if frac in _RATIONAL_B2:
            in_b2, b2_w = True, _RATIONAL_B2[frac]
        # other rationals are excluded exactly: a rational cosine of a
        # rational angle is 0, +-1/2 or +-1, and +-1 is never a U-zero
    else:
        heuristic = True  # bounded scan either way
        for k in range(1, k_max + 1):
            if abs(u_eval(k, -x / 2.0)) < tol:
                in_b2, b2_w = True, k
                break

    in_b1, b1_w = False, None
    if isinstance(mu, B1Mu):
        in_b1, b1_w = True, (mu.p, mu.q, (mu.n - 1) % mu.q + 1)
    elif isinstance(mu, B2Mu):
        # the atom at lam = mu recurs: angle pi - j pi/(k+1), first index 1
        d = math.gcd(mu.j, mu.k + 1)
        in_b1, b1_w = True, ((mu.k + 1 - mu.j) // d, (mu.k + 1) // d, 1)
    elif frac is not None and frac in _RATIONAL_B1:
        in_b1, b1_w = True, _RATIONAL_B1[frac]
    else:
        collisions = [
            (pos, ks)
            for pos, ks in _group_zeros(x, k_max, max(tol, _coalesce_tol(x)))
            if len(ks) >= 2
        ]
        witnesses = []
        for pos, ks in collisions:
            k0, step = _progression_of(ks)
            if step is None:
                continue
            angle = _recover_angle(x, pos, step)
            if angle is None:
                continue
            p, q = angle
            if frac is not None and not _b1_identity_holds(frac, p, q, k0):
                continue
            witnesses.append((k0, q, p))
        if witnesses:
            k0, q, p = min(witnesses)
            in_b1, b1_w = True, (p, q, k0)
            if frac is None:
                heuristic = True  # float witnesses rest on tolerance alone
        else:
            heuristic = True  # bounded scan found nothing; not a proof

    return MuClassification(
        in_b1=in_b1,
        in_b2=in_b2,
        in_b3=in_b3,
        heuristic=heuristic,
        b1_witness=b1_w,
        b2_witness=b2_w,
        b3_witness=b3_w,
    )


# ---------------------------------------------------------------------------
# Truncated measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    position: float
    mass: Fraction
    indices: tuple[int, ...]
    kind: str  # generic | delta_mu | B1_merged | B2_merged | B3_endpoint


@dataclass(frozen=True)
class AtomicMeasure:
    mu: MuParam
    depth: int
    atoms: tuple[Atom, ...]
    tail_mass: Fraction

    def total_mass(self) -> Fraction:
        return sum((a.mass for a in self.atoms), Fraction(0)) + self.tail_mass

    def atom_near(self, position: float, tol: float | None = None) -> Atom:
        x = mu_value(self.mu)
        tol = _coalesce_tol(x) if tol is None else tol
        for atom in self.atoms:
            if abs(atom.position - position) <= tol:
                return atom
        raise DomainError(f"no atom within {tol} of {position}")


def tail_mass(depth: int) -> Fraction:
    """Exact mass not collected by a depth-K truncation: (K+2) 2^-(K+1)."""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    return Fraction(depth + 2, 2 ** (depth + 1))


def measure_truncation(mu: MuParam, depth: int, tol: float | None = None) -> AtomicMeasure:
    """Depth-K truncation of the spectral measure with exact rational masses.

    Collects the zeros of G_1..G_K with mass 2^-(k+1) each, coalescing
    positions within the tolerance.  In-band collisions are exact algebraic
    coincidences, so any tolerance well above eigenvalue accuracy and well
    below the zero spacing draws the same groups there.  For |mu| > 1 the
    out-of-band zeros of consecutive polynomials approach the accumulation
    point geometrically (roughly mu^-2k), so at depths where their spacing
    falls under the tolerance they merge into one reported atom; total mass
    stays exact either way.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    x = mu_value(mu)
    coal = _coalesce_tol(x) if tol is None else tol
    atoms = []
    for pos, ks in _group_zeros(x, depth, coal):
        mass = sum((Fraction(1, 2 ** (k + 1)) for k in ks), Fraction(0))
        if abs(pos - x) <= coal:
            kind = "delta_mu" if len(ks) == 1 else "B2_merged"
        elif abs(pos - (4.0 - x)) <= coal:
            kind = "B3_endpoint"
        elif len(ks) > 1:
            kind = "B1_merged"
        else:
            kind = "generic"
        atoms.append(Atom(position=pos, mass=mass, indices=ks, kind=kind))
    return AtomicMeasure(mu=mu, depth=depth, atoms=tuple(atoms), tail_mass=tail_mass(depth))


def atom_mass_exact(mu: MuParam, atom_class: str, **params) -> Fraction:
    """Closed-form limiting mass of one atom, as an exact rational.

    Classes and their parameters:
      generic      index=j     : 2^-(j+1)          (sole zero of G_j)
      delta_mu                 : 1/4               (lam = mu, non-recurring)
      B1_merged    n0=, q=     : 2^q / (2^(n0+1) (2^q - 1))
      B2_merged    k=          : 1/4 + 1/(4 (2^(k+1) - 1))
      B3_endpoint  k=          : 2^-(k+1)          (atom at 4 - mu)

    The parameter must be structured (not FloatMu) and the witnesses must
    match its classification; inconsistent witnesses raise with a diagnostic.
    """
    if isinstance(mu, FloatMu):
        raise DomainError("exact masses require a structured parameter form")
    cls = classify_mu(mu)
    if atom_class == "generic":
        j = params.get("index")
        if j is None or j < 1:
            raise DomainError("generic atom mass needs index=j >= 1")
        return Fraction(1, 2 ** (j + 1))
    if atom_class == "delta_mu":
        if cls.in_b2:
            raise DomainError(
                "the atom at lam = mu recurs for this parameter; use B2_merged"
            )
        return Fraction(1, 4)
    if atom_class == "B1_merged":
        n0, q = params.get("n0"), params.get("q")
        if n0 is None or q is None:
            raise DomainError("B1 atom mass needs witnesses n0= and q=")
        if not cls.in_b1:
            raise DomainError("parameter is not a B1 collision point")
        return Fraction(2 ** q, 2 ** (n0 + 1) * (2 ** q - 1))
    if atom_class == "B2_merged":
        k = params.get("k")
        if k is None:
            raise DomainError("B2 atom mass needs the minimal index k=")
        if not cls.in_b2 or cls.b2_witness != k:
            raise DomainError(
                f"witness k={k} does not match the classification {cls.b2_witness}"
            )
        return Fraction(1, 4) + Fraction(1, 4 * (2 ** (k + 1) - 1))
    if atom_class == "B3_endpoint":
        k = params.get("k")
        if k is None:
            raise DomainError("B3 atom mass needs k= with mu = 1 + 1/k")
        if not cls.in_b3 or cls.b3_witness != k:
            raise DomainError(f"witness k={k} does not match the classification")
        return Fraction(1, 2 ** (k + 1))
    raise DomainError(f"unknown atom class {atom_class!r}")


def multiplicity_in_phi(n: int, lam: float, mu: MuParam, tol: float | None = None) -> int:
    """Multiplicity of lam as a root of the level-n determinant.

    The factorization gives exponent 2^(n-1-k) to a zero of G_k for k < n,
    exponent 1 for k = n, plus 1 if lam is the root 4 - mu of the leading
    factor; collisions simply add exponents.  Contributing indices are found
    by matching lam against each zero set, which realizes the same case rules
    as the exceptional-set classification and is directly checkable against
    the dense eigensolver.
    """
    if n < 1:
        raise DomainError("level must be >= 1")
    x = mu_value(mu)
    pos_tol = _coalesce_tol(x) * 100.0 if tol is None else tol
    contributing = [
        k for k in range(1, n + 1) if np.min(np.abs(g_zeros(k, x) - lam)) <= pos_tol
    ]
    mult = sum(1 << (n - 1 - k) for k in contributing if k < n)
    if n in contributing:
        mult += 1
    if abs(lam - (4.0 - x)) <= pos_tol:
        mult += 1
    if mult == 0:
        raise DomainError(f"{lam} is not a root of the level-{n} determinant")
    return mult


def ids_cdf(measure: AtomicMeasure, x: float) -> tuple[Fraction, Fraction]:
    """Exact bounds [lo, hi] on the distribution function N(x) at depth K.

    lo collects the truncated atoms at positions <= x; the uncollected tail
    could sit anywhere, so hi = lo + tail_mass.
    """
    lo = sum((a.mass for a in measure.atoms if a.position <= x), Fraction(0))
    return lo, lo + measure.tail_mass


def measure_cdf_mid(measure: AtomicMeasure, x: float) -> float:
    lo, hi = ids_cdf(measure, x)
    return float(lo + hi) / 2.0


@dataclass(frozen=True)
class ProgressionIndices:
    k0: int
    step: int | None  # None: the atom belongs to a single polynomial


def arithmetic_progression_indices(
    mu: MuParam, atom, k_max: int = 30, tol: float | None = None
) -> ProgressionIndices:
    """Indices k with G_k vanishing at the atom: first member and step.

    Exact for structured forms (step q for an in-band collision angle p pi/q,
    step k+1 starting at 1 for the atom at lam = mu); otherwise read off a
    bounded scan, returning step None when only one polynomial contributes.
    """
    pos = atom.position if isinstance(atom, Atom) else float(atom)
    x = mu_value(mu)
    coal = _coalesce_tol(x) if tol is None else tol
    cls = classify_mu(mu)
    if cls.in_b2 and cls.b2_witness is not None and abs(pos - x) <= coal:
        return ProgressionIndices(k0=1, step=cls.b2_witness + 1)
    if cls.in_b1 and cls.b1_witness is not None:
        p, q, n0 = cls.b1_witness
        expected = -x - 4.0 * math.cos(p * math.pi / q)
        if abs(pos - expected) <= coal:
            return ProgressionIndices(k0=n0, step=q)
    observed = [
        k for k in range(1, k_max + 1) if np.min(np.abs(g_zeros(k, x) - pos)) <= coal
    ]
    if not observed:
        raise DomainError(f"{pos} is not a zero of any G_k for k <= {k_max}")
    k0, step = _progression_of(observed)
    return ProgressionIndices(k0=k0, step=step)


def measure_to_json(measure: AtomicMeasure) -> dict:
    """JSON-ready dict: rationals as "p/q" strings, positions as floats."""
    return {
        "mu": format_mu(measure.mu),
        "depth": measure.depth,
        "tail_mass": f"{measure.tail_mass.numerator}/{measure.tail_mass.denominator}",
        "atoms": [
            {
                "position": atom.position,
                "mass": f"{atom.mass.numerator}/{atom.mass.denominator}",
                "indices": list(atom.indices),
                "class": atom.kind,
            }
            for atom in measure.atoms
        ],
    }
