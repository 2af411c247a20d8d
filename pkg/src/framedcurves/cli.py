"""Command-line interface.

Subcommands::

    catalog     list the curves shipped with the package
    frenet      Frenet apparatus along a curve (CSV)
    evolute     evolute of a curve or framed evolute of a framed curve (CSV)
    involute    involute of a curve or framed involute of a framed curve (CSV)
    mate        any mate construction (CSV, summary JSON on stdout)
    roundtrip   evolute/involute round trip (report JSON)
    verify      named residual checks (report JSON)

Exit status: 0 on success, 1 when a computation fails (the message names the
first failing parameter value), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np
import jsonschema

from . import __version__
from .curvekit import (
    CURVE_CATALOG, CurveSource, SampleGrid, make_curve, read_curve_csv, write_table_csv,
)
from .errors import CurveError, UnknownCheck
from .evolute_involute import (
    DIRECTIONS, EV_THEN_INV, INV_THEN_EV, evolute, framed_evolute, framed_involute, framed_roundtrips,
    involute, roundtrip_ev_of_inv, roundtrip_inv_of_ev,
)
from .framedkit import (
    FRAMED_CATALOG, FRAMED_COLUMNS, CurvatureFramedCurve, FramedCurveSource, FramedState, make_framed,
    read_framed_csv,
)
from .frenet import frenet_on_grid
from .mates import FRAMED_KINDS, MATE_KINDS, NBB, NBT, TNT, N1N2_N2, MUN1_N2, framed_mate, nbb_mate, nbt_mate, tnt_mate
from .verify import available_checks, reports_to_json, run_suite, suite_passed

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

_GRID = {
    "type": "object",
    "properties": {
        "t0": {"type": "number"},
        "t1": {"type": "number"},
        "count": {"type": "integer", "minimum": 2},
    },
    "required": ["t0", "t1", "count"],
    "additionalProperties": False,
}
_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_COEF = {"anyOf": [{"type": "number"}, {"type": "string"}]}

CURVE_SPEC_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["analytic", "sampled", "framed-analytic", "framed-sampled", "curvature"]},
        "name": {"type": "string"},
        "params": {"type": "object"},
        "path": {"type": "string"},
        "init": {
            "type": "object",
            "properties": {"gamma": _VEC3, "nu1": _VEC3, "nu2": _VEC3},
            "additionalProperties": False,
        },
        "grid": _GRID,
    },
    "required": ["kind"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"kind": {"enum": ["analytic", "framed-analytic"]}}},
         "then": {"required": ["name"], "not": {"anyOf": [{"required": ["path"]}, {"required": ["init"]}]}}},
        {"if": {"properties": {"kind": {"enum": ["sampled", "framed-sampled"]}}},
         "then": {"required": ["path"],
                  "not": {"anyOf": [{"required": ["name"]}, {"required": ["params"]}, {"required": ["init"]}]}}},
        {"if": {"properties": {"kind": {"const": "curvature"}}},
         "then": {"required": ["params", "grid"],
                  "properties": {"params": {"type": "object",
                                            "properties": {k: _COEF for k in ("l", "m", "n", "alpha")},
                                            "required": ["l", "m", "n", "alpha"],
                                            "additionalProperties": False}},
                  "not": {"anyOf": [{"required": ["name"]}, {"required": ["path"]}]}}},
    ],
}


class UsageError(Exception):
    """Inconsistent or invalid command-line input (exit status 2)."""


@dataclass
class Target:
    """The object a command works on."""

    curve: CurveSource | None
    framed: FramedCurveSource | None
    grid: SampleGrid
    name: str

    @property
    def is_framed(self) -> bool:
        return self.framed is not None


# --------------------------------------------------------------------------
# curve resolution
# --------------------------------------------------------------------------


def parse_grid(text: str) -> SampleGrid:
    try:
        return SampleGrid.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def validate_spec(spec: dict) -> None:
    """Validate a curve spec; raises :class:`UsageError` with the first problem."""
    try:
        jsonschema.validate(spec, CURVE_SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "spec"
        raise UsageError(f"invalid curve spec ({where}): {exc.message}") from None


def load_spec(text: str) -> dict:
    """Inline JSON or the path of a JSON file."""
    text = text.strip()
    try:
        if text.startswith("{"):
            return json.loads(text)
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read curve spec: {exc}") from None


def coefficient_func(value):
    """A curvature coefficient: a number or an expression in ``t``
    (differentiated symbolically)."""
    from .funcs import Const, Func

    if isinstance(value, (int, float)):
        return Const(float(value))
    import sympy

    t = sympy.Symbol("t")
    try:
        expr = sympy.sympify(value, locals={"t": t})
    except (sympy.SympifyError, TypeError, SyntaxError) as exc:
        raise UsageError(f"cannot parse coefficient {value!r}: {exc}") from None
    extra = expr.free_symbols - {t}
    if extra:
        raise UsageError(f"coefficient {value!r} may only depend on t, found {sorted(map(str, extra))}")
    f = sympy.lambdify(t, expr, "numpy")
    df = sympy.lambdify(t, sympy.diff(expr, t), "numpy")
    return Func(f, df, name=str(expr))


def _analytic(name: str, params: dict):
    if name in FRAMED_CATALOG:
        entry = FRAMED_CATALOG[name]
        return None, make_framed(name, **params), entry.default_grid
    if name in CURVE_CATALOG:
        entry = CURVE_CATALOG[name]
        return make_curve(name, **params), None, entry.default_grid
    known = sorted(CURVE_CATALOG) + sorted(FRAMED_CATALOG)
    raise UsageError(f"unknown curve {name!r}; known: {', '.join(known)}")


def _read_csv(path: str, framed: bool | None):
    try:
        with open(path, encoding="utf-8") as fh:
            header = [h.strip() for h in fh.readline().split(",")]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if framed is None:
        framed = all(c in header for c in FRAMED_COLUMNS)
    try:
        src = read_framed_csv(path) if framed else read_curve_csv(path)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t = src.t
    grid = SampleGrid(float(t[0]), float(t[-1]), len(t))
    return (None, src, grid) if framed else (src, None, grid)


def resolve_target(args) -> Target:
    """Build the curve from ``--curve``/``--spec``/``--csv`` and the grid."""
    given = [x for x in ("curve", "spec", "csv") if getattr(args, x, None)]
    if len(given) != 1:
        raise UsageError("give exactly one of --curve, --spec, --csv")
    params = {k: getattr(args, k) for k in ("a", "b", "c", "r") if getattr(args, k, None) is not None}
    grid_override = getattr(args, "grid", None)
    if args.curve:
        try:
            curve, framed, default = _analytic(args.curve, params)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        grid = SampleGrid(*default)
        name = args.curve
    elif args.csv:
        if params:
            raise UsageError("curve parameters cannot be combined with --csv")
        curve, framed, grid = _read_csv(args.csv, None)
        name = args.csv
    else:
        if params:
            raise UsageError("curve parameters cannot be combined with --spec")
        spec = load_spec(args.spec)
        validate_spec(spec)
        curve, framed, grid, name = _from_spec(spec)
    if grid_override is not None:
        grid = grid_override
    return Target(curve, framed, grid, name)


def _from_spec(spec: dict):
    kind = spec["kind"]
    grid = SampleGrid(**spec["grid"]) if "grid" in spec else None
    if kind in ("analytic", "framed-analytic"):
        name = spec["name"]
        if kind == "analytic" and name not in CURVE_CATALOG:
            raise UsageError(f"unknown analytic curve {name!r}; known: {', '.join(sorted(CURVE_CATALOG))}")
        if kind == "framed-analytic" and name not in FRAMED_CATALOG:
            raise UsageError(f"unknown framed curve {name!r}; known: {', '.join(sorted(FRAMED_CATALOG))}")
        try:
            curve, framed, default = _analytic(name, spec.get("params", {}))
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        return curve, framed, grid or SampleGrid(*default), name
    if kind in ("sampled", "framed-sampled"):
        curve, framed, g = _read_csv(spec["path"], kind == "framed-sampled")
        return curve, framed, grid or g, spec["path"]
    p = spec["params"]
    funcs = [coefficient_func(p[k]) for k in ("l", "m", "n", "alpha")]
    init = spec.get("init", {})
    state = FramedState(np.asarray(grid.t0), np.asarray(init.get("gamma", [0.0, 0.0, 0.0]), dtype=float),
                        np.asarray(init.get("nu1", [1.0, 0.0, 0.0]), dtype=float),
                        np.asarray(init.get("nu2", [0.0, 1.0, 0.0]), dtype=float))
    try:
        state.check_frame()
    except CurveError as exc:
        raise UsageError(f"invalid initial frame: {exc}") from None
    return None, CurvatureFramedCurve(*funcs, init=state, grid=grid), grid, "curvature"


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def emit_csv(args, header, columns) -> None:
    rows = np.column_stack(columns)
    if args.out:
        write_table_csv(args.out, header, rows)
    else:
        write_table_csv(sys.stdout, header, rows)


def _framed_columns(states: FramedState):
    return FRAMED_COLUMNS, [states.t, states.gamma, states.nu1, states.nu2]


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, default=_json_default))


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return str(obj)


def _init(args, required: bool, what: str):
    if args.lambda0 is None and args.eta0 is None:
        if required:
            raise UsageError(f"{what} requires --lambda0 and --eta0")
        return None
    if args.lambda0 is None or args.eta0 is None:
        raise UsageError("--lambda0 and --eta0 must be given together")
    return (args.lambda0, args.eta0)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_catalog(args) -> int:
    entries = []
    for e in CURVE_CATALOG.values():
        entries.append({"name": e.name, "type": "curve", "params": dict(e.params), "description": e.description,
                        "default_grid": list(e.default_grid)})
    for e in FRAMED_CATALOG.values():
        entries.append({"name": e.name, "type": "framed", "params": dict(e.params), "description": e.description,
                        "default_grid": list(e.default_grid)})
    if args.json:
        _print_json({"curves": entries, "spec_schema": CURVE_SPEC_SCHEMA})
        return EXIT_OK
    for e in entries:
        params = ", ".join(f"{k}={v:g}" for k, v in e["params"].items()) or "-"
        t0, t1, n = e["default_grid"]
        print(f"{e['name']:<22} {e['type']:<7} params: {params:<18} grid {t0:g}:{t1:.6g}:{n}  {e['description']}")
    return EXIT_OK


def cmd_frenet(args) -> int:
    tg = resolve_target(args)
    if tg.is_framed:
        raise UsageError("frenet needs a plain curve, not a framed curve")
    fd = frenet_on_grid(tg.curve, tg.grid)
    header = ["t", "kappa", "tau", "speed", "tx", "ty", "tz", "nx", "ny", "nz", "bx", "by", "bz"]
    emit_csv(args, header, [tg.grid.nodes, fd.kappa, fd.tau, fd.speed, fd.tangent, fd.normal, fd.binormal])
    return EXIT_OK


def cmd_evolute(args) -> int:
    tg = resolve_target(args)
    if tg.is_framed:
        if args.theta is None:
            raise UsageError("the framed evolute requires --theta")
        res, data = framed_evolute(tg.framed, args.theta, tg.grid)
        header, cols = _framed_columns(res.mate)
        emit_csv(args, header + ["lambda", "eta"], cols + [data.lambdaE, data.etaE])
        return EXIT_OK
    if args.theta is not None:
        raise UsageError("--theta only applies to framed curves")
    points, data = evolute(tg.curve, tg.grid)
    if data.degenerate_at is not None:
        raise CurveError("h vanishes; the evolute is degenerate", data.degenerate_at)
    emit_csv(args, ["t", "x", "y", "z", "lambda", "eta"], [data.t, points, data.lambdaE, data.etaE])
    return EXIT_OK


def cmd_involute(args) -> int:
    tg = resolve_target(args)
    init = _init(args, required=True, what="involute")
    if tg.is_framed:
        res, data = framed_involute(tg.framed, tg.grid, init=init, theta=args.theta or 0.0)
        header, cols = _framed_columns(res.mate)
        emit_csv(args, header + ["lambda", "eta"], cols + [data.lambdaI, data.etaI])
        return EXIT_OK
    if args.theta is not None:
        raise UsageError("--theta only applies to framed curves")
    points, data = involute(tg.curve, init, tg.grid)
    emit_csv(args, ["t", "x", "y", "z", "lambda", "eta"], [data.t, points, data.lambdaI, data.etaI])
    return EXIT_OK


def cmd_mate(args) -> int:
    tg = resolve_target(args)
    kind = args.kind
    if (kind in FRAMED_KINDS) != tg.is_framed:
        raise UsageError(f"mate kind {kind} needs a {'framed' if kind in FRAMED_KINDS else 'plain'} curve")
    if kind == NBB:
        res = nbb_mate(tg.curve, tg.grid)
    elif kind in (TNT, NBT):
        init = _init(args, required=True, what=f"mate {kind}")
        res = (tnt_mate if kind == TNT else nbt_mate)(tg.curve, init, tg.grid)
    else:
        kw = {}
        if args.theta is not None:
            kw["theta"] = args.theta
        elif kind == N1N2_N2:
            raise UsageError(f"mate {kind} requires --theta")
        if kind == MUN1_N2:
            if (args.lambda0 is None) == (args.eta0 is None):
                raise UsageError(f"mate {kind} requires exactly one of --lambda0 or --eta0 (a constant "
                                 "coefficient; the other follows)")
            if args.lambda0 is not None:
                kw["lam"] = args.lambda0
            else:
                kw["eta"] = args.eta0
        else:
            init = _init(args, required=False, what=f"mate {kind}")
            if init is not None:
                kw["init"] = init
        res = framed_mate(tg.framed, kind, tg.grid, **kw)
    lam, eta = res.coefficients.get("lambda"), res.coefficients.get("eta")
    coef_cols = [np.broadcast_to(np.asarray(c, dtype=float), res.t.shape) for c in (lam, eta)]
    if isinstance(res.mate, FramedState):
        header, cols = _framed_columns(res.mate)
    else:
        header, cols = ["t", "x", "y", "z"], [res.t, res.mate]
    if args.out:
        emit_csv(args, header + ["lambda", "eta"], cols + coef_cols)
    summary = {"kind": kind, "curve": tg.name, "residuals": res.residuals, "oracle": res.oracle,
               "verdict": res.verdict}
    if args.out or args.json:
        _print_json(summary)
    else:
        emit_csv(args, header + ["lambda", "eta"], cols + coef_cols)
    return EXIT_OK if res.verdict else EXIT_FAILURE


def cmd_roundtrip(args) -> int:
    tg = resolve_target(args)
    direction = args.direction
    if tg.is_framed:
        init = _init(args, required=False, what="roundtrip") or (0.0, 0.0)
        rep = framed_roundtrips(tg.framed, tg.grid, direction, init=init, theta=args.theta)
    elif direction == INV_THEN_EV:
        init = _init(args, required=True, what="roundtrip inv-then-ev")
        rep = roundtrip_ev_of_inv(tg.curve, init, tg.grid)
    else:
        rep = roundtrip_inv_of_ev(tg.curve, tg.grid, init=_init(args, required=False, what="roundtrip"))
    text = rep.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    ok = rep.max_position_error <= args.tolerance and rep.max_frame_error <= args.tolerance
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_verify(args) -> int:
    if args.list:
        print("\n".join(available_checks()))
        return EXIT_OK
    try:
        reports = run_suite(args.suite)
    except UnknownCheck as exc:
        raise UsageError(str(exc.args[0])) from None
    text = reports_to_json(reports, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        for r in reports:
            print(f"{'PASS' if r.verdict else 'FAIL'}  {r.name:<34} {r.max_residual:.3e}  (tol {r.tolerance:.0e})")
    return EXIT_OK if suite_passed(reports) else EXIT_FAILURE


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _curve_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("curve")
    g.add_argument("--curve", help="catalog curve name (see `catalog`)")
    g.add_argument("--spec", help="curve spec as inline JSON or a JSON file")
    g.add_argument("--csv", help="sampled curve CSV (t,x,y,z) or framed CSV")
    for k in ("a", "b", "c", "r"):
        g.add_argument(f"--{k}", type=float, help=f"catalog parameter {k}")
    g.add_argument("--grid", type=parse_grid, help="sample grid t0:t1:count")


def _coef_args(p: argparse.ArgumentParser, theta=True) -> None:
    p.add_argument("--lambda0", type=float, help="initial lambda")
    p.add_argument("--eta0", type=float, help="initial eta")
    if theta:
        p.add_argument("--theta", type=float, help="frame angle for framed constructions")


def _mate_kind(text: str) -> str:
    for k in MATE_KINDS:
        if k.lower() == text.lower():
            return k
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="framedcurves", description="Mates, evolutes and involutes of space "
                                     "curves and framed curves.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list catalog curves")
    p.add_argument("--json", action="store_true", help="machine-readable listing including the curve-spec JSON schema")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("frenet", help="Frenet apparatus (CSV)")
    _curve_args(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_frenet)

    p = sub.add_parser("evolute", help="evolute / framed evolute (CSV)")
    _curve_args(p)
    p.add_argument("--theta", type=float, help="frame angle (framed curves)")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_evolute)

    p = sub.add_parser("involute", help="involute / framed involute (CSV)")
    _curve_args(p)
    _coef_args(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_involute)

    p = sub.add_parser("mate", help="mate construction")
    _curve_args(p)
    p.add_argument("--kind", required=True, type=_mate_kind, choices=MATE_KINDS,
                   help="mate kind (case-insensitive)")
    _coef_args(p)
    p.add_argument("--out", help="output CSV; the summary JSON goes to stdout")
    p.add_argument("--json", action="store_true", help="print the summary JSON instead of the CSV")
    p.set_defaults(func=cmd_mate)

    p = sub.add_parser("roundtrip", help="evolute/involute round trip (report JSON)")
    _curve_args(p)
    p.add_argument("--direction", choices=DIRECTIONS, default=INV_THEN_EV,
                   help=f"{INV_THEN_EV}: evolute of an involute; {EV_THEN_INV}: involute of the evolute")
    _coef_args(p)
    p.add_argument("--tolerance", type=float, default=1e-6, help="pass threshold for the errors")
    p.add_argument("--out", help="also write the report JSON here")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("verify", help="run residual checks")
    p.add_argument("--suite", nargs="+", default=["all"], help="check names or 'all'")
    p.add_argument("--list", action="store_true", help="list the check names")
    p.add_argument("--json", action="store_true", help="print the reports as JSON")
    p.add_argument("--out", help="also write the report JSON here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CurveError as exc:
        print(f"{parser.prog} {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"{parser.prog} {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); silence the flush at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
