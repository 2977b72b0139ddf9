"""Batch command-line front end.

One command per process; every computation is exposed with machine-readable
output (JSON for scalar reports, CSV for traces).  The deterministic payload
lives under "report"; wall-clock metadata lives under "meta" and should be
ignored when comparing runs.

Exit codes: 0 success, 2 input error, 3 budget/convergence failure (a report
with failure fields is still emitted).
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time
from fractions import Fraction

from .fkdet import (
    GroupRingElement,
    NotLopsidedError,
    compare_estimators,
    finite_section_logdet,
    trace_series_logdet,
)
from .fpshift import (
    FpShiftSystem,
    RankBudgetError,
    StabilizationError,
    cylinder_measure,
    ideal_support_search,
    mixing_defect,
    window_count,
    window_entropy_trace,
)
from .laurent import (
    CertificationBudgetError,
    GridBudgetError,
    GridSpec,
    PolySyntaxError,
    RingMismatchError,
    parse_poly,
)
from .local import (
    IntPoly,
    RationalMatrix,
    RootRefinementError,
    mahler_1d_report,
    padic_mahler,
    solenoid_entropy,
)
from .periodic import (
    ConsistencyError,
    growth_rate_trace,
    principal_periodic_count,
    toral_periodic_count,
)
from .torus import (
    AllGridZeroError,
    lawton_slice,
    mahler_nd,
    riemann_mahler,
    torsion_aware_square_grids,
)

INPUT_ERRORS = (
    PolySyntaxError,
    RingMismatchError,
    ValueError,
    KeyError,
    FileNotFoundError,
    json.JSONDecodeError,
)
class OracleDisagreement(RuntimeError):
    """A --compare cross-check between independent routes failed."""


BUDGET_ERRORS: tuple = (
    GridBudgetError,
    CertificationBudgetError,
    StabilizationError,
    RankBudgetError,
    RootRefinementError,
    ConsistencyError,
    AllGridZeroError,
    NotLopsidedError,
    OracleDisagreement,
)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _load_json_arg(arg: str):
    """Inline JSON if it parses, else a path to a JSON file."""
    try:
        return json.loads(arg)
    except json.JSONDecodeError:
        with open(arg) as fh:
            return json.load(fh)


def _parse_matrix(arg: str) -> list[list]:
    """Rational matrix from inline/file JSON, or inline CSV with ';' between
    rows and ',' between entries ("0,-1;1,6/5")."""
    if any(ch in arg for ch in "[{") or arg.endswith(".json"):
        data = _load_json_arg(arg)
        return [[str(x) for x in row] for row in data]
    if arg.endswith(".csv"):
        with open(arg) as fh:
            return [line.strip().split(",") for line in fh if line.strip()]
    return [row.split(",") for row in arg.split(";")]


def _parse_grid(arg: str) -> tuple[int, ...]:
    return tuple(int(x) for x in arg.split(","))


def _parse_schedule(arg: str) -> list[int]:
    a, b, step = (int(x) for x in arg.split(":"))
    return list(range(a, b + 1, step))


def _parse_int_list(arg: str) -> list[int]:
    if ":" in arg:
        return _parse_schedule(arg)
    return [int(x) for x in arg.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="algdyn", description=__doc__)
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--threads", type=int, default=None, help="cap internal parallelism")
    parser.add_argument(
        "--compare",
        action="store_true",
        help="run cross-module oracle checks and fail (exit 3) on disagreement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mahler", help="one-variable logarithmic Mahler measure")
    p.add_argument("--poly", required=True)
    p.add_argument("--p", type=int, default=None, help="prime: compute the p-adic measure instead")

    p = sub.add_parser("local-entropy", help="solenoid entropy of a rational matrix, by place")
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("torus-mahler", help="Riemann-sum Mahler measure on roots-of-unity grids")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--grid", help="n or n1,n2,...")
    p.add_argument("--schedule", help="a:b:step of square grid orders")
    p.add_argument("--no-torsion-filter", action="store_true")
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--lawton", type=int, help="compute m(f(u, u^n)) instead")

    p = sub.add_parser("periodic", help="periodic-point counts and growth rates")
    p.add_argument("--matrix")
    p.add_argument("--poly")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int)
    p.add_argument("--n-list")

    p = sub.add_parser("fp-system", help="window counts and entropy traces of an F_p system")
    p.add_argument("--system", required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--entropy-trace", help="n list or a:b:step")
    p.add_argument("--search-box", type=int)
    p.add_argument("--max-support", type=int, default=3)
    p.add_argument("--cylinder", help='JSON like {"0,0": 0, "2,0": 0}')

    p = sub.add_parser("mixing", help="mixing defects of dilated shapes")
    p.add_argument("--system", required=True)
    p.add_argument("--shape", required=True, help='"0,0;1,0;0,1"')
    p.add_argument("--k", required=True, help="dilation list, e.g. 2,4,8")
    p.add_argument("--value", type=int, default=0, help="cylinder value at the origin coordinate")

    p = sub.add_parser("fkdet", help="Fuglede-Kadison log-determinant estimates")
    p.add_argument("--input", required=True, help="group ring element (JSON inline or file)")
    p.add_argument("--radius", type=int)
    p.add_argument("--order", type=int)

    return parser


def _cmd_mahler(args) -> dict:
    f = parse_poly(args.poly, 1)
    poly, _ = IntPoly.from_laurent(f)
    if args.p is not None:
        res = padic_mahler(poly, args.p)
        return {
            "m_p": res.value,
            "p": res.prime,
            "log_multiplier": _frac(res.multiplier),
            "method": "newton-polygon",
        }
    rep = mahler_1d_report(poly)
    out = {"m": rep.value, "method": "jensen", "error_bound": rep.error_bound}
    if args.compare:
        # independent route: Riemann sum over a large cyclic grid
        grid_value = riemann_mahler(f, GridSpec((4096,))).value
        out["compare"] = {"riemann_4096": grid_value, "gap": abs(grid_value - rep.value)}
        if out["compare"]["gap"] > 5e-2:
            raise OracleDisagreement(
                f"jensen {rep.value:.6f} vs grid {grid_value:.6f} differ beyond 5e-2"
            )
    return out


def _cmd_local_entropy(args) -> dict:
    A = RationalMatrix.from_strings(_parse_matrix(args.matrix))
    rep = solenoid_entropy(A)
    places = [{"p": "inf", "value": rep.archimedean}]
    for prime, res in sorted(rep.finite.items()):
        places.append(
            {"p": str(prime), "log_multiplier": _frac(res.multiplier), "value": res.value}
        )
    return {"places": places, "total": rep.total, "clearing_s": rep.clearing_s}


def _cmd_torus(args, fmt: str):
    f = parse_poly(args.poly, args.d)
    if args.lawton is not None:
        return {"m_slice": lawton_slice(f, args.lawton), "n": args.lawton}
    if args.schedule:
        orders = _parse_schedule(args.schedule)
        if args.no_torsion_filter:
            grids = [GridSpec((n,) * args.d) for n in orders]
        else:
            grids = torsion_aware_square_grids(f, orders)
        trace = mahler_nd(f, grids, tolerance=args.tolerance)
        if fmt == "csv":
            return [("n", "value", "delta")] + trace.rows()
        return {
            "rows": [{"n": n, "value": v, "delta": d} for n, v, d in trace.rows()],
            "final": trace.final_value,
            "non_convergence": trace.non_convergence,
            "tolerance": trace.tolerance,
        }
    if not args.grid:
        raise ValueError("torus-mahler needs --grid, --schedule, or --lawton")
    spec = _parse_grid(args.grid)
    if len(spec) == 1:
        spec = spec * args.d
    res = riemann_mahler(f, GridSpec(spec))
    out = res.to_json()
    if args.compare:
        out["compare"] = _torus_oracle_check(f)
    return out


def _torus_oracle_check(f) -> dict:
    """Cross-module oracle for --compare: Jensen in one variable, the exact
    block-circulant determinant for d >= 2 (its constructor raises on any
    exact/floating disagreement)."""
    if f.d == 1:
        poly, _ = IntPoly.from_laurent(f)
        jensen = mahler_1d_report(poly).value
        grid = riemann_mahler(f, GridSpec((4096,))).value
        gap = abs(jensen - grid)
        if gap > 5e-2:
            raise OracleDisagreement(f"jensen vs 4096-grid gap {gap:.2e} exceeds 5e-2")
        return {"oracle": "jensen", "value": jensen, "gap": gap}
    for n in (5, 7, 4):
        try:
            res = principal_periodic_count(f, n)
        except AllGridZeroError:
            continue
        return {
            "oracle": "exact-circulant-determinant",
            "n": n,
            "exact_product": None if res.exact_product is None else str(res.exact_product),
            "degenerate": res.degenerate,
        }
    raise OracleDisagreement("no oracle grid available: f vanishes on every probe grid")


def _cmd_periodic(args, fmt: str):
    if (args.matrix is None) == (args.poly is None):
        raise ValueError("periodic needs exactly one of --matrix or --poly")
    if args.matrix is not None:
        A = [[int(x) for x in row] for row in _parse_matrix(args.matrix)]
        if args.n is not None:
            res = toral_periodic_count(A, args.n)
            out = {
                "n": res.n,
                "count": str(res.count),
                "infinite_fixed_set": res.infinite_fixed_set,
            }
            if args.compare and not res.infinite_fixed_set:
                out["compare"] = _toral_eigenvalue_check(A, args.n, res.count)
            return out
        rows = growth_rate_trace(A, _parse_int_list(args.n_list))
    else:
        f = parse_poly(args.poly, args.d)
        if args.n is not None:
            # --compare forces the exact determinant route whatever the size
            limit = 1 << 62 if args.compare else 4096
            res = principal_periodic_count(f, args.n, exact_limit=limit)
            return {
                "n": res.n,
                "degenerate": res.degenerate,
                "component_rate": res.component_rate,
                "log_full_product": res.log_full_product,
                "full_product": res.full_product,
                "exact_product": None if res.exact_product is None else str(res.exact_product),
                "excluded": res.excluded_points,
            }
        rows = growth_rate_trace(f, _parse_int_list(args.n_list))
    table = [("n", "count_or_log", "normalized_rate", "target", "gap")] + [
        (r.n, str(r.count_or_log), r.normalized_rate, r.target, r.gap) for r in rows
    ]
    if fmt == "csv":
        return table
    return {
        "rows": [
            {
                "n": r.n,
                "count_or_log": str(r.count_or_log),
                "normalized_rate": r.normalized_rate,
                "target": r.target,
                "gap": r.gap,
            }
            for r in rows
        ]
    }


def _cmd_fp_system(args, fmt: str):
    sys_ = FpShiftSystem.from_json(_load_json_arg(args.system))
    if args.cylinder is not None:
        raw = json.loads(args.cylinder)
        cyl = {tuple(int(x) for x in k.split(",")): int(v) for k, v in raw.items()}
        res = cylinder_measure(sys_, cyl)
        return {"measure": _frac(res.value), "stabilized_at_halo": res.stabilized_at_halo}
    if args.search_box is not None:
        sups = ideal_support_search(sys_, args.search_box, args.max_support)
        return {
            "box": args.search_box,
            "max_support": args.max_support,
            "supports": [[list(pt) for pt in sup] for sup in sups],
        }
    if args.entropy_trace:
        trace = window_entropy_trace(sys_, _parse_int_list(args.entropy_trace))
        if fmt == "csv":
            return [("n", "rate")] + trace.rows
        return {
            "rows": [{"n": n, "rate": v} for n, v in trace.rows],
            "expected_limit": trace.expected_limit,
        }
    if args.window is None:
        raise ValueError("fp-system needs --window, --entropy-trace, --search-box or --cylinder")
    wc = window_count(sys_, args.window)
    return {
        "window": [list(b) for b in wc.window],
        "free_dimension": wc.free_dimension,
        "constraint_rank": wc.constraint_rank,
        "n_constraints": wc.n_constraints,
        "boundary_discrepancy_bound": wc.boundary_discrepancy_bound,
    }


def _cmd_mixing(args) -> dict:
    sys_ = FpShiftSystem.from_json(_load_json_arg(args.system))
    shape = [tuple(int(x) for x in pt.split(",")) for pt in args.shape.split(";")]
    k_list = _parse_int_list(args.k)
    origin = (0,) * sys_.d
    trace = mixing_defect(sys_, shape, {origin: args.value}, k_list)
    return {
        "shape": [list(pt) for pt in trace.shape],
        "k": trace.k_list,
        "measured": [_frac(m) for m in trace.measured],
        "product_target": _frac(trace.product_target),
        "defects": [_frac(d) for d in trace.defects],
    }


def _toral_eigenvalue_check(A, n: int, exact_count: int) -> dict:
    import numpy as np

    lam = np.linalg.eigvals(np.array(A, dtype=float))
    approx = float(abs(np.prod(lam**n - 1)))
    gap = abs(exact_count - approx) / max(approx, 1e-300)
    if gap > 1e-6:
        raise OracleDisagreement(
            f"|det(A^n - I)| = {exact_count} vs eigenvalue product {approx:.6e}"
        )
    return {"oracle": "eigenvalue-product", "value": approx, "relative_gap": gap}


def _cmd_fkdet(args) -> dict:
    f = GroupRingElement.from_json(_load_json_arg(args.input))
    if args.compare:
        if args.radius is None or args.order is None:
            raise ValueError("--compare needs both --radius and --order")
        cmp_ = compare_estimators(f, args.radius, args.order)
        if (
            cmp_.trace_series is not None
            and cmp_.reference is not None
            and abs(cmp_.trace_series.value - cmp_.reference)
            > cmp_.trace_series.error_indicator + 1e-3
        ):
            raise OracleDisagreement(
                f"trace series {cmp_.trace_series.value:.6f} vs torus reference "
                f"{cmp_.reference:.6f} beyond the tail bound"
            )
        out = {
            "finite_section": {
                "value": cmp_.finite_section.value,
                "radius": cmp_.finite_section.radius,
                "ball_size": cmp_.finite_section.ball_size,
                "discarded": cmp_.finite_section.discarded,
                "error_indicator": cmp_.finite_section.error_indicator,
            },
            "gap": cmp_.gap,
            "reference": cmp_.reference,
            "reference_method": cmp_.reference_method,
        }
        if cmp_.trace_series is not None:
            out["trace_series"] = {
                "value": cmp_.trace_series.value,
                "order": cmp_.trace_series.order,
                "tail_bound": cmp_.trace_series.error_indicator,
            }
        else:
            out["trace_series_skipped"] = cmp_.trace_series_skipped
        return out
    if args.radius is not None:
        est = finite_section_logdet(f, args.radius)
        return {
            "method": est.method,
            "value": est.value,
            "radius": est.radius,
            "ball_size": est.ball_size,
            "sigma_floor": est.sigma_floor,
            "discarded": est.discarded,
            "error_indicator": est.error_indicator,
        }
    if args.order is not None:
        est = trace_series_logdet(f, args.order)
        return {
            "method": est.method,
            "value": est.value,
            "order": est.order,
            "tail_bound": est.error_indicator,
            "taus": [_frac(t) for t in est.taus],
        }
    raise ValueError("fkdet needs --radius and/or --order")


def _emit(payload, fmt: str) -> str:
    if isinstance(payload, list):  # CSV table
        buf = io.StringIO()
        for row in payload:
            buf.write(",".join("" if x is None else str(x) for x in row))
            buf.write("\n")
        return buf.getvalue()
    return json.dumps({"report": payload, "meta": {"timestamp": time.time()}}, indent=2) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    limiter = None
    if args.threads is not None:
        import threadpoolctl

        limiter = threadpoolctl.threadpool_limits(args.threads)
    try:
        if args.command == "mahler":
            payload = _cmd_mahler(args)
        elif args.command == "local-entropy":
            payload = _cmd_local_entropy(args)
        elif args.command == "torus-mahler":
            payload = _cmd_torus(args, args.format)
        elif args.command == "periodic":
            payload = _cmd_periodic(args, args.format)
        elif args.command == "fp-system":
            payload = _cmd_fp_system(args, args.format)
        elif args.command == "mixing":
            payload = _cmd_mixing(args)
        elif args.command == "fkdet":
            payload = _cmd_fkdet(args)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValueError(f"unknown command {args.command}")
    except BUDGET_ERRORS as e:
        failure = {"failure": {"type": type(e).__name__, "message": str(e)}}
        sys.stdout.write(_emit(failure, "json"))
        sys.stderr.write(json.dumps({"error": failure["failure"]}) + "\n")
        return 3
    except INPUT_ERRORS as e:
        sys.stderr.write(
            json.dumps({"error": {"type": type(e).__name__, "message": str(e)}}) + "\n"
        )
        return 2
    finally:
        if limiter is not None:
            limiter.unregister()
    sys.stdout.write(_emit(payload, args.format))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
