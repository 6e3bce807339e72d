"""Command-line front end: coefficient tables, trace tables, densities, verification.

Output is JSON (default) or CSV, to stdout or a file.  Floats are emitted
through Python's repr, i.e. the shortest digit string that round-trips, so
downstream tools can reproduce values bit for bit.  HOFTRACE_THREADS may
bound a thread pool used to fan out independent table entries; results are
always collected in submission order, so output does not depend on the
worker count.

Exit codes: 0 success, 1 invalid arguments, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional

from . import dos as dos_mod
from . import oracle, traces
from .chambers import chambers_nested, chambers_recursive
from .core import Flux, InvalidCoupling, InvalidFlux, lambda_tilde, make_flux
from .traces import TraceKind, TraceMethod, TraceRecord

N_MAX_CAP = 64


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _thread_count() -> int:
    raw = os.environ.get("HOFTRACE_THREADS", "")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pool_map(fn: Callable, items: Iterable) -> list:
    items = list(items)
    workers = _thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _json_safe(value) -> object:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _emit(document: dict, rows: list[dict], fmt: str, output: Optional[str]) -> None:
    """Write the document (json) or its tabular rows (csv)."""
    if fmt == "json":
        text = json.dumps(document, indent=2, default=str)
    else:
        buffer = io.StringIO()
        fieldnames = list(rows[0].keys()) if rows else []
        writer = csv.DictWriter(buffer, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {key: "" if val is None else repr(val) if isinstance(val, float) else val
                 for key, val in row.items()}
            )
        text = buffer.getvalue().rstrip("\n")
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _flux_from_args(args: argparse.Namespace) -> Flux:
    return make_flux(args.p, args.q)


def _check_order(n: int, flag: str) -> None:
    if n < 0:
        raise ValueError(f"{flag} must be nonnegative, got {n}")
    if n > N_MAX_CAP:
        raise ValueError(f"{flag} capped at {N_MAX_CAP}, got {n}")


def _record_rows(records: list[TraceRecord]) -> list[dict]:
    return [record.to_dict() for record in records]


def cmd_coeffs(args: argparse.Namespace) -> int:
    flux = _flux_from_args(args)
    build = chambers_nested if args.method == "nested" else chambers_recursive
    poly = build(flux, args.lam)
    document = {
        "p": flux.p,
        "q": flux.q,
        "lambda": args.lam,
        "method": args.method,
        "a": list(poly.a),
    }
    rows = [{"j": j, "a": aj} for j, aj in enumerate(poly.a)]
    _emit(document, rows, args.format, args.output)
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    flux = _flux_from_args(args)
    if args.n is not None:
        _check_order(args.n, "--n")
        orders = [args.n]
    else:
        _check_order(args.n_max, "--n-max")
        orders = list(range(args.n_max + 1))

    def one(n: int) -> TraceRecord:
        value = traces.almost_mathieu_trace(flux, args.lam, n)
        return TraceRecord(
            flux, args.lam, n, None, TraceKind.FULL, value, TraceMethod.PARTITION_SUM
        )

    records = _pool_map(one, orders)
    rows = _record_rows(records)
    if args.n is not None:
        document = dict(rows[0])
        document["trace"] = document["value"]
    else:
        document = {"records": rows}
    _emit(document, rows, args.format, args.output)
    return 0


def cmd_point_trace(args: argparse.Namespace) -> int:
    flux = _flux_from_args(args)
    _check_order(args.n, "--n")
    poly = traces.cached_polynomial(flux, args.lam)
    bound = 2.0 * (1.0 + lambda_tilde(args.lam, flux.q))
    records = []
    for s in args.s:
        if abs(s) > bound:
            print(
                f"warning: |s| = {abs(s)} exceeds the spectral range {bound}",
                file=sys.stderr,
            )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", traces.SpectralRangeWarning)
            value = traces.pm_s_trace(poly, args.n, s)
        records.append(
            TraceRecord(
                flux,
                args.lam,
                args.n,
                s,
                TraceKind.PLUS_MINUS_S,
                value,
                TraceMethod.PARTITION_SUM,
            )
        )
    rows = _record_rows(records)
    _emit({"records": rows}, rows, args.format, args.output)
    return 0


def cmd_series(args: argparse.Namespace) -> int:
    flux = _flux_from_args(args)
    _check_order(args.n_max, "--n-max")
    kind = TraceKind(args.kind)
    if kind is TraceKind.PLUS_MINUS_S and args.s is None:
        raise ValueError("--kind pm-s needs --s")
    coeffs = traces.trace_series(flux, args.lam, kind, args.s, args.n_max)
    records = [
        TraceRecord(flux, args.lam, n, args.s, kind, value, TraceMethod.SERIES)
        for n, value in enumerate(coeffs)
    ]
    rows = _record_rows(records)
    _emit({"records": rows}, rows, args.format, args.output)
    return 0


def cmd_dos(args: argparse.Namespace) -> int:
    if args.lam_tilde is not None:
        lt = args.lam_tilde
    else:
        lt = lambda_tilde(args.lam, args.q)
    profile = dos_mod.DensityProfile(lt)
    edge = profile.support_half_width
    grid = args.grid
    if grid < 2:
        raise ValueError(f"--grid must be at least 2, got {grid}")
    samples = []
    for i in range(grid):
        s = -edge + 2.0 * edge * i / (grid - 1)
        samples.append({"s": s, "density": profile.density(s)})
    moments = [
        {"k": k, "value": dos_mod.dos_moment_exact(k, lt)} for k in range(6)
    ]
    document = {
        "lambda_tilde": lt,
        "support_half_width": edge,
        "samples": [
            {"s": item["s"], "density": _json_safe(item["density"])}
            for item in samples
        ],
        "moments": moments,
    }
    rows = [{"record": "density", "x": item["s"], "value": item["density"]}
            for item in samples]
    rows += [{"record": "moment", "x": float(m["k"]), "value": m["value"]}
             for m in moments]
    _emit(document, rows, args.format, args.output)
    return 0


def _deviation(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _verify_checks(flux: Flux, lam: float, n_max: int, grid: int) -> list[dict]:
    q = flux.q
    lt = lambda_tilde(lam, q)
    rec = chambers_recursive(flux, lam)
    nst = chambers_nested(flux, lam)
    evens = [n for n in range(2, n_max + 1, 2)]
    checks: list[dict] = []

    def add(name: str, deviation: float, tolerance: float) -> None:
        checks.append(
            {
                "check": name,
                "max_deviation": deviation,
                "tolerance": tolerance,
                "status": "pass" if deviation <= tolerance else "fail",
            }
        )

    add(
        "coefficients-recursive-vs-nested",
        max(_deviation(x, y) for x, y in zip(rec.a, nst.a)),
        1e-9,
    )
    if q >= 2:
        add(
            "a2-identity",
            _deviation(rec.a[1], q * (1.0 + (lam / 2.0) ** 2)),
            1e-9,
        )
    dual = chambers_recursive(flux, 4.0 / lam)
    add(
        "coefficient-aubry-duality",
        max(
            _deviation(aj, (lam / 2.0) ** (2 * j) * dj)
            for j, (aj, dj) in enumerate(zip(rec.a, dual.a))
        ),
        1e-9,
    )

    formula = {n: traces.almost_mathieu_trace(flux, lam, n) for n in evens}
    bz_values = _pool_map(lambda n: oracle.bz_trace(flux, lam, n, grid), evens)
    add(
        "trace-vs-bz",
        max(_deviation(formula[n], v) for n, v in zip(evens, bz_values)) if evens else 0.0,
        1e-8,
    )
    walk_cap = min(n_max, oracle.WALK_LENGTH_CAP)
    walks = oracle.walk_trace_table(flux, lam, walk_cap)
    add(
        "trace-vs-walk",
        max(
            (_deviation(formula[n], walks[n]) for n in evens if n <= walk_cap),
            default=0.0,
        ),
        1e-8,
    )
    add(
        "midband-coincidence",
        max(
            (
                abs(formula[n] - traces.midband_trace(rec, n))
                for n in evens
                if q > n // 2
            ),
            default=0.0,
        ),
        0.0,
    )

    coeffs = rec.energy_coefficients()
    dev = 0.0
    for s in (0.0, 1.0, 2.0 * (1.0 + lt)):
        minus = list(coeffs)
        minus[0] -= s
        plus = list(coeffs)
        plus[0] += s
        p_minus = traces.newton_power_sums(minus, n_max)
        p_plus = traces.newton_power_sums(plus, n_max)
        for n in evens:
            newton = (p_minus[n - 1] + p_plus[n - 1]) / (2.0 * q)
            dev = max(dev, _deviation(newton, traces.pm_s_trace(rec, n, s)))
    add("pm-s-vs-newton", dev, 1e-9)

    dev = 0.0
    for kind, s in (
        (TraceKind.MID_BAND, None),
        (TraceKind.PLUS_MINUS_S, 1.0),
        (TraceKind.FULL, None),
    ):
        stream = traces.trace_series(flux, lam, kind, s, n_max)
        for n, value in enumerate(stream):
            if kind is TraceKind.MID_BAND:
                direct = traces.midband_trace(rec, n)
            elif kind is TraceKind.PLUS_MINUS_S:
                direct = traces.pm_s_trace(rec, n, s)
            else:
                direct = traces.almost_mathieu_trace(flux, lam, n)
            if n == 0:
                direct = 1.0
            dev = max(dev, _deviation(value, direct))
    add("series-vs-direct", dev, 1e-10)

    add(
        "trace-aubry-duality",
        max(
            (
                _deviation(
                    formula[n],
                    (lam / 2.0) ** n * traces.almost_mathieu_trace(flux, 4.0 / lam, n),
                )
                for n in evens
            ),
            default=0.0,
        ),
        1e-9,
    )

    profile = dos_mod.DensityProfile(lt)
    add(
        "dos-moment-quadrature",
        max(
            _deviation(dos_mod.dos_moment(profile, k), dos_mod.dos_moment_exact(k, lt))
            for k in range(4)
        ),
        1e-5,
    )

    add(
        "point-trace-closure-exact",
        max(
            (
                _deviation(dos_mod.integrate_point_traces_exact(flux, lam, n), formula[n])
                for n in evens
            ),
            default=0.0,
        ),
        1e-12,
    )
    add(
        "point-trace-closure-quadrature",
        max(
            (
                _deviation(dos_mod.integrate_point_traces(flux, lam, n), formula[n])
                for n in evens
            ),
            default=0.0,
        ),
        1e-5,
    )

    if lam == 2.0 and q <= 6:
        add(
            "trace-sum-rule",
            max(
                _deviation(traces.trace_sum_rule(flux, k), float(math.comb(2 * k, k) ** 2))
                for k in (1, 2)
            ),
            1e-8,
        )
    return checks


def cmd_verify(args: argparse.Namespace) -> int:
    flux = _flux_from_args(args)
    _check_order(args.n_max, "--n-max")
    grid = args.grid if args.grid is not None else max(8, args.n_max + 1)
    checks = _verify_checks(flux, args.lam, args.n_max, grid)
    failed = [c for c in checks if c["status"] == "fail"]
    document = {
        "p": flux.p,
        "q": flux.q,
        "lambda": args.lam,
        "n_max": args.n_max,
        "checks": checks,
        "status": "fail" if failed else "pass",
    }
    _emit(document, checks, args.format, args.output)
    return 2 if failed else 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="hoftrace",
        description="Spectral moment traces of the Hofstadter and almost "
        "Mathieu operators at rational flux.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, flux: bool = True) -> None:
        if flux:
            p.add_argument("--p", type=int, default=1, help="flux numerator")
            p.add_argument("--q", type=int, required=True, help="flux denominator")
        p.add_argument(
            "--lambda", dest="lam", type=float, default=2.0,
            help="anisotropy coupling (default 2, the isotropic case)",
        )
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", default=None, help="output path (default stdout)")

    p = sub.add_parser("coeffs", help="Chambers polynomial coefficient table")
    common(p)
    p.add_argument("--method", choices=("recursive", "nested"), default="recursive")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("trace", help="full quantum traces")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int, default=None, help="single moment order")
    group.add_argument("--n-max", type=int, default=None, help="table up to this order")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("point-trace", help="point-spectrum traces at given s")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, nargs="+", required=True,
                   help="band parameters; s=0 gives the mid-band trace")
    p.set_defaults(func=cmd_point_trace)

    p = sub.add_parser("series", help="generating-function coefficient stream")
    common(p)
    p.add_argument("--kind", choices=[k.value for k in TraceKind], default="full")
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("dos", help="density of states samples and exact moments")
    p.add_argument("--q", type=int, default=1)
    p.add_argument(
        "--lambda", dest="lam", type=float, default=2.0,
        help="coupling; the density depends on it through (lambda/2)**q",
    )
    p.add_argument("--lambda-tilde", dest="lam_tilde", type=float, default=None,
                   help="set (lambda/2)**q directly, overriding --lambda/--q")
    p.add_argument("--grid", type=int, default=201, help="number of sample points")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_dos)

    p = sub.add_parser("verify", help="run the cross-oracle verification suite")
    common(p)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--grid", type=int, default=None,
                   help="momentum grid for the Brillouin-zone check")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidFlux, InvalidCoupling, ValueError, dos_mod.DomainError) as exc:
        print(f"hoftrace: error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
