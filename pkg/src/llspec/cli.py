"""Command-line interface.

Subcommands cover the full pipeline: characteristic determinants against the
factored closed form (char-poly), dense level eigenvalues (eigs), zeros of
the level polynomials (zeros), band/outlier description (spectrum), the
truncated atomic measure (measure), root multiplicities (multiplicity), the
two-parameter zero chart (joint-spectrum), the disorder-model density of
states (dos), and the gap-decay exponent (ns).

The parameter is passed as a tagged string ("float:0.3", "rat:7/6",
"b1:p/q:n", "b2:j/k") so exact forms survive the CLI boundary; bare numbers
are accepted as floats and bare p/q as rationals.  Reals are printed with 17
significant digits, rationals as "p/q".  With --check, commands exit 3 when
their acceptance threshold is breached (override via --tol); domain and
capacity errors exit 2.  The level cap honors the LLSPEC_NMAX environment
variable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import anderson, ghpolys, jacobi, lamplighter, measure, novikov
from .errors import CapacityError, DomainError, InsufficientDataError

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CHECK = 3


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _parse_grid(spec: str) -> list[float]:
    """Either "lo:hi:count" (inclusive linspace) or a comma list of values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise DomainError(f"grid must be lo:hi:count, got {spec!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise DomainError("grid count must be >= 1")
        return [float(v) for v in np.linspace(lo, hi, count)]
    return [float(v) for v in spec.split(",") if v.strip()]


def _write_text(out_path: str | None, text: str):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(args, header, rows, payload):
    if args.format == "json":
        _write_text(args.out, _json_text(payload))
    else:
        _write_text(args.out, _csv_text(header, rows))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_char_poly(args) -> int:
    mu = measure.mu_value(measure.parse_mu(args.mu))
    grid = _parse_grid(args.grid)
    rows = []
    worst = 0.0
    signs_ok = True
    for lam in grid:
        s_det, l_det = lamplighter.phi_det_signlog(args.level, lam, mu)
        s_fac, l_fac = lamplighter.phi_factorized_signlog(args.level, lam, mu)
        if s_det == 0.0 and s_fac == 0.0:
            rel = 0.0
        elif s_det != s_fac:
            rel = math.inf
            signs_ok = False
        else:
            rel = abs(l_det - l_fac) / max(1.0, abs(l_det), abs(l_fac))
        worst = max(worst, rel)
        rows.append(
            (lam, lamplighter.phi_det(args.level, lam, mu),
             lamplighter.phi_factorized(args.level, lam, mu), rel)
        )
    payload = {
        "mu": args.mu,
        "level": args.level,
        "max_rel_err": worst,
        "rows": [dict(zip(("lam", "phi_det", "phi_factorized", "rel_err"), r)) for r in rows],
    }
    _emit(args, ("lam", "phi_det", "phi_factorized", "rel_err"), rows, payload)
    if args.check:
        bound = args.tol if args.tol is not None else 1e-8
        if not signs_ok or worst > bound:
            return EXIT_CHECK
    return EXIT_OK


def _cmd_eigs(args) -> int:
    mu = measure.mu_value(measure.parse_mu(args.mu))
    rep = lamplighter.build_level(args.level)
    eigs = lamplighter.dense_eigs(lamplighter.pencil_matrix(rep, mu))
    rows = [(i, v) for i, v in enumerate(eigs)]
    payload = {"mu": args.mu, "level": args.level, "eigenvalues": [float(v) for v in eigs]}
    _emit(args, ("index", "eigenvalue"), rows, payload)
    if args.check:
        tol = args.tol if args.tol is not None else 1e-8
        if len(eigs) != 1 << args.level or np.min(np.abs(eigs - (4.0 - mu))) > tol:
            return EXIT_CHECK
    return EXIT_OK


def _cmd_zeros(args) -> int:
    mu = measure.mu_value(measure.parse_mu(args.mu))
    rows = []
    ok = True
    tol_scale = args.tol if args.tol is not None else 1e-8
    for k in range(1, args.depth + 1):
        zs = ghpolys.g_zeros(k, mu)
        for j, z in enumerate(zs):
            value, scale = ghpolys.g_value_with_scale(k, float(z), mu)
            bound = tol_scale * (k + 1) * max(1.0, abs(mu))
            in_band = -4.0 - mu <= z <= 4.0 - mu
            if in_band:
                ok = ok and abs(value) <= bound
            else:
                ok = ok and abs(value) <= bound * max(1.0, scale)
            rows.append((k, j, float(z), value, abs(value) / max(1.0, scale)))
    payload = {
        "mu": args.mu,
        "depth": args.depth,
        "rows": [dict(zip(("k", "index", "zero", "residual", "residual_relative"), r)) for r in rows],
    }
    _emit(args, ("k", "index", "zero", "residual", "residual_relative"), rows, payload)
    if args.check and not ok:
        return EXIT_CHECK
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    mu = measure.mu_value(measure.parse_mu(args.mu))
    pencil = jacobi.pencil_spectrum(mu)
    jstar = jacobi.jstar_spectrum(mu)
    payload = {
        "mu": args.mu,
        "pencil": {
            "band": list(pencil.band),
            "accumulation_point": pencil.isolated,
            "outlier_onset_index": jacobi.critical_index(mu) if abs(mu) > 1 else None,
        },
        "jstar": {
            "band": list(jstar.band),
            "isolated_eigenvalue": jstar.isolated,
            "isolated_mass": jstar.mass_at_isolated,
        },
    }
    rows = [
        (
            pencil.band[0],
            pencil.band[1],
            "" if pencil.isolated is None else pencil.isolated,
            jstar.band[0],
            jstar.band[1],
            "" if jstar.isolated is None else jstar.isolated,
            jstar.mass_at_isolated,
        )
    ]
    header = (
        "pencil_lo", "pencil_hi", "accumulation_point",
        "jstar_lo", "jstar_hi", "isolated_eigenvalue", "isolated_mass",
    )
    _emit(args, header, rows, payload)
    return EXIT_OK


def _cmd_measure(args) -> int:
    mu = measure.parse_mu(args.mu)
    trunc = measure.measure_truncation(mu, args.depth, tol=args.tol)
    payload = measure.measure_to_json(trunc)
    rows = [
        ("atom", a.position, f"{a.mass.numerator}/{a.mass.denominator}",
         ";".join(map(str, a.indices)), a.kind)
        for a in trunc.atoms
    ]
    rows.append(
        ("tail", "", f"{trunc.tail_mass.numerator}/{trunc.tail_mass.denominator}", "", "")
    )
    _emit(args, ("kind", "position", "mass", "indices", "class"), rows, payload)
    if args.check and trunc.total_mass() != 1:
        return EXIT_CHECK
    return EXIT_OK


def _cmd_multiplicity(args) -> int:
    mu = measure.parse_mu(args.mu)
    rows = []
    for lam in _parse_grid(args.grid):
        try:
            mult = measure.multiplicity_in_phi(args.level, lam, mu, tol=args.tol)
            rows.append((lam, mult, 1))
        except DomainError:
            rows.append((lam, 0, 0))
    payload = {
        "mu": args.mu,
        "level": args.level,
        "rows": [dict(zip(("lam", "multiplicity", "is_root"), r)) for r in rows],
    }
    _emit(args, ("lam", "multiplicity", "is_root"), rows, payload)
    if args.check:
        eigs = lamplighter.dense_eigs(
            lamplighter.pencil_matrix(lamplighter.build_level(args.level),
                                      measure.mu_value(mu))
        )
        for lam, mult, is_root in rows:
            cluster = int(np.sum(np.abs(eigs - lam) <= 1e-7))
            if cluster != mult:
                return EXIT_CHECK
    return EXIT_OK


def _cmd_joint_spectrum(args) -> int:
    rows = []
    ok = True
    for mu in _parse_grid(args.grid):
        onset = jacobi.critical_index(mu) if abs(mu) > 1 else None
        for k in range(1, args.depth + 1):
            zs = ghpolys.g_zeros(k, mu)
            outliers = 0
            for z in zs:
                inside = abs(z + mu) <= 4.0 + 1e-10
                if not inside:
                    outliers += 1
                rows.append((mu, k, float(z), int(inside)))
            if args.check:
                expected = 1 if (onset is not None and k >= onset) else 0
                # at the exact onset the zero may sit on the strip boundary
                boundary = onset is not None and k >= onset and outliers == 0 and any(
                    abs(abs(z + mu) - 4.0) <= 1e-7 for z in zs
                )
                if outliers != expected and not boundary:
                    ok = False
    payload = {
        "depth": args.depth,
        "rows": [dict(zip(("mu", "k", "zero", "inside_strip"), r)) for r in rows],
    }
    _emit(args, ("mu", "k", "zero", "inside_strip"), rows, payload)
    if args.check and not ok:
        return EXIT_CHECK
    return EXIT_OK


def _cmd_dos(args) -> int:
    mu_param = measure.parse_mu(args.mu)
    mu = measure.mu_value(mu_param)
    window = anderson.sample_window(args.seed, 0, args.sites)
    sample = anderson.build_jacobi_sample(window, mu)
    ids = anderson.empirical_ids([sample], workers=args.workers)
    trunc = measure.measure_truncation(mu_param, args.depth)
    checkpoints = anderson.default_checkpoints(trunc, count=50)
    report = anderson.compare_ids(ids, trunc, checkpoints)
    weights = np.arange(1, ids.site_count + 1) / ids.site_count
    rows = list(zip((float(v) for v in ids.eigenvalues), (float(w) for w in weights)))
    payload = {
        "mu": args.mu,
        "sites": args.sites,
        "seed": args.seed,
        "depth": args.depth,
        "interior_sites": ids.site_count,
        "sup_deviation": report.sup_deviation,
        "tail_mass": report.tail_mass,
        "checkpoints": list(report.checkpoints),
        "empirical_cdf": list(report.empirical_cdf),
        "theoretical_mid": list(report.theoretical_mid),
    }
    _emit(args, ("eigenvalue", "cumulative_weight"), rows, payload)
    if args.check:
        bound = args.tol if args.tol is not None else 0.02
        if report.sup_deviation >= bound:
            return EXIT_CHECK
    return EXIT_OK


def _cmd_ns(args) -> int:
    mu_param = measure.parse_mu(args.mu)
    frac = measure.mu_fraction(mu_param)
    mu = frac if frac is not None else measure.mu_value(mu_param)
    seq = novikov.gap_sequence(mu, args.depth)
    rate = novikov.decay_rate(seq)
    inv = novikov.ns_invariant(mu, args.depth)
    rows = [(e.m, e.x_m, e.gap, e.log2_gap) for e in seq.entries]
    payload = {
        "mu": args.mu,
        "depth": args.depth,
        "decay_rate": rate,
        "closed_form": inv.closed_form,
        "empirical": inv.empirical,
        "rows": [dict(zip(("m", "x_m", "gap", "log2_gap"), r)) for r in rows],
    }
    _emit(args, ("m", "x_m", "gap", "log2_gap"), rows, payload)
    if args.check:
        muf = float(mu)
        rate_ok = abs(rate * muf * muf - 1.0) <= (args.tol if args.tol is not None else 0.02)
        ns_ok = abs(inv.empirical / inv.closed_form - 1.0) <= 0.05
        if not (rate_ok and ns_ok):
            return EXIT_CHECK
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub, *, mu=False, level=False, depth=None, grid=None, seed=False,
                sites=False, workers=False):
    if mu:
        sub.add_argument("--mu", required=True, help="parameter, e.g. float:0.3 or rat:7/6")
    if level:
        sub.add_argument("--level", type=int, required=True, help="level n (size 2^n)")
    if depth is not None:
        sub.add_argument("--depth", type=int, default=depth, help=f"depth (default {depth})")
    if grid is not None:
        required = grid == "REQUIRED"
        sub.add_argument(
            "--grid",
            required=required,
            default=None if required else grid,
            help="lo:hi:count or comma-separated values",
        )
    if seed:
        sub.add_argument("--seed", type=int, default=0)
    if sites:
        sub.add_argument("--sites", type=int, default=100000)
    if workers:
        sub.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--check", action="store_true", help="exit 3 if the acceptance bound fails")
    sub.add_argument("--tol", type=float, default=None, help="tolerance / check-bound override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llspec",
        description="Spectra and spectral measures of the lamplighter convolution pencil.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("char-poly", help="determinant vs factored closed form on a grid")
    _add_common(sub, mu=True, level=True, grid="-6:6:25")
    sub.set_defaults(func=_cmd_char_poly)

    sub = subs.add_parser("eigs", help="dense eigenvalues of the level matrix")
    _add_common(sub, mu=True, level=True)
    sub.set_defaults(func=_cmd_eigs)

    sub = subs.add_parser("zeros", help="zeros of the level polynomials up to a depth")
    _add_common(sub, mu=True, depth=12)
    sub.set_defaults(func=_cmd_zeros)

    sub = subs.add_parser("spectrum", help="band, accumulation point and isolated mass")
    _add_common(sub, mu=True)
    sub.set_defaults(func=_cmd_spectrum)

    sub = subs.add_parser("measure", help="truncated atomic spectral measure")
    _add_common(sub, mu=True, depth=12)
    sub.set_defaults(func=_cmd_measure)

    sub = subs.add_parser("multiplicity", help="root multiplicities at given lambda values")
    _add_common(sub, mu=True, level=True, grid="REQUIRED")
    sub.set_defaults(func=_cmd_multiplicity)

    sub = subs.add_parser("joint-spectrum", help="zero chart over a parameter grid")
    _add_common(sub, depth=8, grid="-3:3:25")
    sub.set_defaults(func=_cmd_joint_spectrum)

    sub = subs.add_parser("dos", help="empirical density of states vs the measure")
    _add_common(sub, mu=True, depth=12, seed=True, sites=True, workers=True)
    sub.set_defaults(func=_cmd_dos)

    sub = subs.add_parser("ns", help="gap decay and spectral power-law exponent")
    _add_common(sub, mu=True, depth=60)
    sub.set_defaults(func=_cmd_ns)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, CapacityError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
