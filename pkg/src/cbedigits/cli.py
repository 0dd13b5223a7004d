"""Command-line interface: ``cbe-digits <command> [options]``.

Every command writes one table, as JSON (``{"schema": 1, ...}``) or CSV,
to stdout or ``--out``. Exit codes: 0 success, 1 internal error,
2 invalid input, 3 a bound certificate failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .charfn import (EnsembleParams, log_psi_dissected, log_psi_gamma, psi_weierstrass,
                     relative_discrepancy)
from .cumulants import cumulant_vector, t_n, variance_bracket
from .density import build_density, digit_prob_exact, kolmogorov_distance, tv_distance
from .digits import DigitPattern, benford_prob, digit_event_set, single_digit_prob
from .errors import CbeError, DomainError
from .regimes import Status, verify_all
from .sampler import (CounterexampleParams, counterexample_sample, digit_frequencies,
                      sample_eigenvalues_smallN, sample_log_abs_d)

SCHEMA = 1
EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_CERT = 0, 1, 2, 3


class InputError(DomainError):
    """Invalid command-line input."""


def parse_t_grid(spec: str) -> np.ndarray:
    """``"0,1,2"``, ``"lin:a:b:n"`` or ``"log:a:b:n"``."""
    spec = spec.strip()
    try:
        if spec.startswith(("lin:", "log:")):
            kind, a, b, n = spec.split(":")
            a, b, n = float(a), float(b), int(n)
            if n < 1:
                raise ValueError
            if kind == "lin":
                return np.linspace(a, b, n)
            if a <= 0 or b <= 0:
                raise InputError("log grids need positive endpoints")
            return np.geomspace(a, b, n)
        vals = np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError as exc:
        raise InputError(f"cannot parse t grid {spec!r}") from exc
    if not np.all(np.isfinite(vals)):
        raise InputError("t grid must be finite")
    return vals


def parse_leading(spec: str, base: int) -> DigitPattern:
    return DigitPattern.leading(base, tuple(int(v) for v in spec.split(",")))


def parse_positioned(spec: str, base: int) -> DigitPattern:
    """``"m1:k1,m2:k2"``."""
    try:
        pairs = [tuple(int(x) for x in item.split(":")) for item in spec.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse positioned pattern {spec!r}") from exc
    if any(len(pr) != 2 for pr in pairs):
        raise InputError("positioned patterns look like 'm1:k1,m2:k2'")
    return DigitPattern.positioned(base, pairs)


def parse_int_list(spec: str) -> list[int]:
    try:
        return [int(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse integer list {spec!r}") from exc


@dataclass
class Table:
    """Result of one command: column names, rows and extra metadata."""

    command: str
    columns: list[str]
    rows: list[list]
    extra: dict
    exit_code: int = EXIT_OK

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in r])
            return buf.getvalue()
        doc = {"schema": SCHEMA, "command": self.command, **self.extra,
               "columns": self.columns,
               "rows": [dict(zip(self.columns, (_json_safe(v) for v in r))) for r in self.rows]}
        return json.dumps(doc, indent=1, sort_keys=True, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.generic):
        return v.item()
    return v


def _base_digits(v: int, b: int) -> tuple[int, ...]:
    out = []
    while v:
        v, d = divmod(v, b)
        out.append(d)
    return tuple(reversed(out))


def _params(args) -> EnsembleParams:
    if args.n is None:
        raise InputError("--n is required")
    return EnsembleParams(args.n, args.beta)


def _pdict(p: EnsembleParams) -> dict:
    return {"n": p.n, "beta": p.beta,
            "beta_exact": None if p.beta_exact is None else str(p.beta_exact)}


def cmd_charfn(args) -> Table:
    p = _params(args)
    t = parse_t_grid(args.t)
    lg = log_psi_gamma(p, t)
    psi = np.exp(lg)
    cols = ["t", "re", "im", "abs"]
    extra_cols = []
    if args.check_reps:
        ld = log_psi_dissected(p, t)
        lw = psi_weierstrass(p, t, args.n_max).log_value
        disc = np.maximum.reduce([relative_discrepancy(lg, ld), relative_discrepancy(lg, lw),
                                  relative_discrepancy(ld, lw)])
        extra_cols = [np.atleast_1d(disc)]
        cols.append("max_rel_discrepancy")
    rows = []
    for i, tv in enumerate(t.tolist()):
        row = [tv, float(psi[i].real), float(psi[i].imag), float(abs(psi[i]))]
        row += [float(c[i]) for c in extra_cols]
        rows.append(row)
    return Table("charfn", cols, rows, {"params": _pdict(p)})


def cmd_cumulants(args) -> Table:
    p = _params(args)
    cv = cumulant_vector(p, args.k_max, k_cap=max(12, args.k_max))
    lo, hi = variance_bracket(p)
    rows = [[k, cv[k]] for k in range(1, args.k_max + 1)]
    extra = {"params": _pdict(p), "t_n": t_n(p), "variance": cv[2] if args.k_max >= 2 else None,
             "bracket_lower": lo, "bracket_upper": hi}
    return Table("cumulants", ["k", "c_k"], rows, extra)


def cmd_benford(args) -> Table:
    b = args.base
    p = EnsembleParams(args.n, args.beta) if args.n is not None else None
    grid = build_density(p) if p is not None else None
    rows = []
    if args.position is None or args.position == 1:
        ell = args.length
        if ell < 1:
            raise InputError("--length must be >= 1")
        cols = ["digits", "limit"]
        pats = [DigitPattern.leading(b, _base_digits(v, b)) for v in range(b ** (ell - 1), b ** ell)]
        for pat in pats:
            row = ["".join(np.base_repr(d, b) for d in pat.values), benford_prob(pat)]
            if grid is not None:
                pr = digit_prob_exact(p, pat, grid)
                row += [pr, pr - row[1]]
            rows.append(row)
    else:
        cols = ["digit", "limit"]
        for k in range(b):
            pat = DigitPattern.positioned(b, [(args.position, k)])
            row = [k, single_digit_prob(args.position, k, b)]
            if grid is not None:
                pr = digit_prob_exact(p, pat, grid)
                row += [pr, pr - row[1]]
            rows.append(row)
    if grid is not None:
        cols += ["prob", "gap"]
    extra = {"base": b, "params": None if p is None else _pdict(p)}
    if grid is not None:
        extra["max_abs_gap"] = max(abs(r[-1]) for r in rows)
    return Table("benford", cols, rows, extra)


def cmd_verify_bounds(args) -> Table:
    p = _params(args)
    reps = verify_all(p, parse_t_grid(args.t), args.intermediate_form, args.high_form)
    failed = any(r.status is Status.FAIL for r in reps)
    cols = ["t", "psi_abs", "bound", "regime", "holds", "margin", "status",
            "log_psi_abs", "log_bound", "log_margin", "form", "note"]
    rows = [[r.t, r.psi_abs, r.bound, r.regime.value, r.holds, r.margin, r.status.value,
             r.log_psi_abs, r.log_bound, r.log_margin, r.form, r.note] for r in reps]
    counts = {s.value: sum(r.status is s for r in reps) for s in Status}
    return Table("verify-bounds", cols, rows, {"params": _pdict(p), "counts": counts},
                 EXIT_CERT if failed else EXIT_OK)


def _batch(args):
    if args.method == "counterexample":
        cp = CounterexampleParams(args.n if args.n is not None else 100, args.eps, args.variant)
        return counterexample_sample(cp, args.count, args.seed)
    p = _params(args)
    if args.method == "rejection":
        return sample_eigenvalues_smallN(p, args.count, args.seed).as_sample_batch()
    return sample_log_abs_d(p, args.count, args.seed)


def cmd_sample(args) -> Table:
    batch = _batch(args)
    pr = batch.params
    extra = {"seed": batch.seed, "method": batch.method.value,
             "value_kind": batch.value_kind.value,
             "params": _pdict(pr) if isinstance(pr, EnsembleParams) else
             {"n": pr.n, "eps": pr.eps, "variant": pr.variant.value}}
    if batch.acceptance_rate is not None:
        extra["acceptance_rate"] = batch.acceptance_rate
    return Table("sample", ["value"], [[v] for v in batch.values.tolist()], extra)


def _pattern(args) -> DigitPattern:
    if (args.leading is None) == (args.positioned is None):
        raise InputError("give exactly one of --leading or --positioned")
    if args.leading is not None:
        return parse_leading(args.leading, args.base)
    return parse_positioned(args.positioned, args.base)


def cmd_digits(args) -> Table:
    pat = _pattern(args)
    s = digit_event_set(pat)
    # the limit probability is the Lebesgue measure of the event set
    row = [pat.kind.value, args.leading or args.positioned, s.total_length, len(s)]
    cols = ["kind", "pattern", "limit", "intervals"]
    if args.n is not None:
        p = EnsembleParams(args.n, args.beta)
        row.append(digit_prob_exact(p, pat))
        cols.append("prob")
        if args.count:
            f, se = digit_frequencies(sample_log_abs_d(p, args.count, args.seed), pat)
            row += [f, se]
            cols += ["mc_freq", "mc_stderr"]
    return Table("digits", cols, [row], {"base": args.base, "n": args.n, "beta": args.beta})


def cmd_distances(args) -> Table:
    ns = parse_int_list(args.ns) if args.ns else ([args.n] if args.n is not None else [])
    if not ns:
        raise InputError("give --ns or --n")
    rows = []
    for n in ns:
        p = EnsembleParams(n, args.beta)
        g = build_density(p)
        tv = tv_distance(p, g)
        rows.append([n, t_n(p), tv, kolmogorov_distance(p, g), tv * t_n(p) ** 2.5])
    return Table("distances", ["n", "t_n", "tv", "kolmogorov", "tv_scaled"], rows,
                 {"beta": args.beta})


def cmd_density(args) -> Table:
    p = _params(args)
    g = build_density(p, span_sigmas=args.span, points=args.points)
    if args.format == "bin":
        return Table("density", [], [], {"_binary": g.to_bytes()})
    rows = [[a, b, c] for a, b, c in zip(g.x.tolist(), g.rho.tolist(), g.cdf.tolist())]
    meta = {k: v for k, v in g.meta.items()}
    return Table("density", ["x", "rho", "cdf"], rows, {"params": _pdict(p), "meta": meta})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cbe-digits",
                                 description="Digit statistics of |D| for the circular beta ensemble.")
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="matrix size N")
    common.add_argument("--beta", default="2", help="Dyson index, float or 'p/q' (default 2)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("charfn", parents=[common], help="characteristic function on a t grid")
    s.add_argument("--t", default="0", help="t grid: '0,1,2', 'lin:a:b:n' or 'log:a:b:n'")
    s.add_argument("--check-reps", action="store_true", help="add cross-representation discrepancy")
    s.add_argument("--n-max", type=int, default=100_000, help="infinite-product truncation")
    s.set_defaults(func=cmd_charfn)

    s = sub.add_parser("cumulants", parents=[common], help="cumulants, T_N and variance bracket")
    s.add_argument("--k-max", type=int, default=6)
    s.set_defaults(func=cmd_cumulants)

    s = sub.add_parser("benford", parents=[common], help="limit and exact digit probabilities")
    s.add_argument("--base", type=int, default=10)
    s.add_argument("--length", type=int, default=1, help="number of leading digits")
    s.add_argument("--position", type=int, default=None, help="single digit position (>= 2)")
    s.set_defaults(func=cmd_benford)

    s = sub.add_parser("verify-bounds", parents=[common], help="regime certificates on a t grid")
    s.add_argument("--t", default="log:0.1:10000:200")
    s.add_argument("--intermediate-form", choices=("main", "cap"), default="main")
    s.add_argument("--high-form", choices=("full", "simplified"), default="full")
    s.set_defaults(func=cmd_verify_bounds)

    s = sub.add_parser("sample", parents=[common], help="draw samples of log|D|")
    s.add_argument("--count", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--method", choices=("inverse", "rejection", "counterexample"), default="inverse")
    s.add_argument("--eps", type=float, default=0.0, help="counterexample smoothing")
    s.add_argument("--variant", choices=("BINOMIAL_POWER", "SIGN_SUM"), default="BINOMIAL_POWER")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("digits", parents=[common], help="one digit event: limit, exact, Monte Carlo")
    s.add_argument("--base", type=int, default=10)
    s.add_argument("--leading", default=None, help="leading digits, e.g. '1,2'")
    s.add_argument("--positioned", default=None, help="positions and digits, e.g. '3:0,4:1'")
    s.add_argument("--count", type=int, default=0, help="Monte Carlo draws (0 = none)")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_digits)

    s = sub.add_parser("distances", parents=[common], help="TV and Kolmogorov distance to N(0,1)")
    s.add_argument("--ns", default=None, help="comma-separated N values")
    s.set_defaults(func=cmd_distances)

    s = sub.add_parser("density", parents=[common], help="tabulated density and CDF")
    s.add_argument("--span", type=float, default=12.0)
    s.add_argument("--points", type=int, default=1 << 14)
    s.set_defaults(func=cmd_density)
    # binary output only makes sense for the density table
    for action in s._actions:
        if action.dest == "format":
            action.choices = ("json", "csv", "bin")
    return ap


def _write(data, path):
    if path is None:
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
        return
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        table = args.func(args)
    except CbeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - reported as an internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    try:
        if "_binary" in table.extra:
            _write(table.extra["_binary"], args.out)
        else:
            _write(table.render(args.format), args.out)
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return table.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
