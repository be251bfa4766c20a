"""Command-line front end; every subcommand prints one JSON report.

Exit codes: 0 all checks passed, 1 some check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import catalog, fileformat
from .algebra import (
    StructureTensor,
    antisymmetrize,
    check_associativity,
    check_jacobi,
    is_antisymmetric,
)
from .coeffring import CoeffError, ExpressionSyntaxError, format_gauss, parse_expr, parse_gauss
from .contraction import LimitDoesNotExist, contract_limit, iterate_deform
from .phasespace import PolySymbol, fresnel_weak_limit, groenewold_eval, moyal_product, set_hbar

SIG_DIGITS = 12


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    exit_code: int = 0
    output: Any = None

    def add(self, name: str, passed: bool, **payload) -> None:
        self.results.append({"name": name, "passed": bool(passed), **payload})

    def finish(self) -> RunReport:
        if self.exit_code != 2:
            self.exit_code = 0 if all(r["passed"] for r in self.results) else 1
        return self

    def to_json(self) -> str:
        body = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "exit_code": self.exit_code,
        }
        if self.output is not None:
            body["output"] = self.output
        return json.dumps(_round(body), sort_keys=True, indent=2)


def _round(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, complex):
        return {"re": _round(obj.real), "im": _round(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcontract", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def algebra_cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--file", required=True)
        s.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
        return s

    algebra_cmd("check", "check associativity of an algebra file")
    s = algebra_cmd("contract", "contract along the file's transform family")
    s.add_argument("--critical")
    s = algebra_cmd("kdeform", "K-deform (repeat --kvector to iterate)")
    s.add_argument("--kvector", action="append", required=True, metavar="C0,C1,...")
    algebra_cmd("classify", "Bianchi type of a 3-dim bracket")

    s = sub.add_parser("moyal", help="Moyal product of two polynomial symbols")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--dofs", type=int, default=1)
    s.add_argument("--hbar", action="append", default=[], metavar="[K=]VALUE")

    s = sub.add_parser("kernel-limit", help="weak hbar -> 0 limit of the kernel on a Gaussian")
    s.add_argument("--hbar", action="append", type=float, default=[])
    s.add_argument("--width", type=float, default=1.0)
    s.add_argument("--csv-out")

    s = sub.add_parser("fock-verify", help="truncated Fock-space checks")
    s.add_argument("--dim", type=int, default=64)
    s.add_argument("--hbar", type=float, default=1.0)
    s.add_argument("--box", type=float, default=3.0)
    s.add_argument("--grid", type=int, default=61)
    s.add_argument("--tolerance", type=float, default=1e-2)
    s.add_argument("--csv-out")

    s = sub.add_parser("catalog", help="list or export fixtures")
    s.add_argument("action", choices=["list", "show"])
    s.add_argument("name", nargs="?")
    s.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    s.add_argument("--out", help="also write the fixture as an algebra file")
    return p


def _assignment(items: Sequence[str]) -> dict[str, object]:
    out = {}
    for it in items:
        if "=" not in it:
            raise UsageError(f"--param expects NAME=VALUE, got {it!r}")
        k, v = it.split("=", 1)
        out[k.strip()] = parse_gauss(v)
    return out


def _load(args, rep: RunReport) -> fileformat.AlgebraFile:
    af = fileformat.load(args.file)
    params = _assignment(args.param)
    rep.inputs["file"] = args.file
    if params:
        rep.inputs["params"] = {k: format_gauss(v) for k, v in params.items()}
        af.tensor = af.tensor.subs(params)
    return af


def _tensor_payload(T: StructureTensor) -> dict:
    return T.to_json()


def _cmd_check(args, rep: RunReport) -> None:
    T = _load(args, rep).tensor
    r = check_associativity(T)
    rep.add("associativity", r.holds, violations=[list(v) for v in r.violations])


def _cmd_contract(args, rep: RunReport) -> None:
    af = _load(args, rep)
    if af.transform is None:
        raise UsageError("the algebra file has no 'transform' section")
    crit = parse_gauss(args.critical) if args.critical is not None else af.critical
    if crit is None:
        raise UsageError("no critical value: pass --critical or set transform.critical")
    rep.inputs["critical"] = format_gauss(crit)
    try:
        res = contract_limit(af.tensor, af.transform, crit)
    except LimitDoesNotExist as exc:
        rep.add(
            "limit_exists",
            False,
            divergent=[{"j": j, "k": k, "l": l, "coeff": str(x)} for j, k, l, x in exc.entries],
        )
        return
    rep.add("limit_exists", True)
    rep.add(
        "associativity",
        res.associative.holds,
        violations=[list(v) for v in res.associative.violations],
    )
    rep.output = _tensor_payload(res.tensor)


def _cmd_kdeform(args, rep: RunReport) -> None:
    T = _load(args, rep).tensor
    seq = []
    for kv in args.kvector:
        parts = [s for s in kv.split(",")]
        if len(parts) != T.dim:
            raise UsageError(f"--kvector needs {T.dim} comma-separated entries, got {len(parts)}")
        seq.append([parse_expr(s.strip(), T.params) for s in parts])
    S = iterate_deform(T, seq)
    r = check_associativity(S)
    rep.add("associativity", r.holds, violations=[list(v) for v in r.violations])
    j = check_jacobi(antisymmetrize(S))
    rep.add("jacobi", j.holds, violations=[list(v) for v in j.violations])
    rep.output = _tensor_payload(S)


def _cmd_classify(args, rep: RunReport) -> None:
    T = _load(args, rep).tensor
    if T.dim != 3 or not is_antisymmetric(T):
        rep.add("lie_bracket", False, reason="need an antisymmetric 3-dim bracket")
        return
    try:
        b = catalog.bianchi_classify(T)
    except catalog.JacobiFails as exc:
        rep.add("lie_bracket", False, reason=str(exc))
        return
    rep.add("lie_bracket", True)
    rep.output = {"type": str(b), "label": b.label, "h": None if b.h is None else str(b.h)}


def _cmd_moyal(args, rep: RunReport) -> None:
    f = PolySymbol.parse(args.f, args.dofs)
    g = PolySymbol.parse(args.g, args.dofs)
    prod = moyal_product(f, g)
    if args.hbar:
        assign = {}
        for item in args.hbar:
            k, v = item.split("=", 1) if "=" in item else (None, item)
            keys = [int(k.lstrip("h"))] if k else range(1, args.dofs + 1)
            for kk in keys:
                assign[kk] = parse_gauss(v)
        prod = set_hbar(prod, assign)
    rep.inputs.update(f=str(f), g=str(g))
    rep.output = {"product": str(prod)}
    rep.add("computed", True)


def _slope(hs, errs) -> float:
    x, y = np.log(np.asarray(hs)), np.log(np.asarray(errs))
    return float(np.polyfit(x, y, 1)[0])


def _cmd_kernel_limit(args, rep: RunReport) -> None:
    hs = args.hbar or [10 ** (-e) for e in (1, 1.5, 2, 2.5, 3)]
    rows = []
    for h in hs:
        v = fresnel_weak_limit(h, args.width)
        rows.append({"hbar": h, "value_re": v.real, "value_im": v.imag, "abs_error": abs(v - 1)})
    rep.inputs.update(hbar=hs, width=args.width)
    if args.csv_out:
        _write_csv(args.csv_out, rows, ["hbar", "value_re", "value_im", "abs_error"])
    rep.output = {"table": rows}
    if len(hs) >= 2:
        s = _slope(hs, [r["abs_error"] for r in rows])
        rep.add("loglog_slope_in_[0.8,1.2]", 0.8 <= s <= 1.2, slope=s)
    dec = all(a["abs_error"] > b["abs_error"] for a, b in zip(rows, rows[1:])
              ) if hs == sorted(hs, reverse=True) else True
    rep.add("error_decreases_with_hbar", dec, abs_errors=[r["abs_error"] for r in rows])


def _write_csv(path: str, rows: list[dict], cols: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in rows:
            w.writerow([f"{r[c]:.{SIG_DIGITS}g}" for c in cols])


def _cmd_fock_verify(args, rep: RunReport) -> None:
    from . import fock
    from .quadrature import PhaseGrid

    N, hbar, tol = args.dim, args.hbar, args.tolerance
    S = fock.FockSpace(N)
    rep.inputs.update(dim=N, hbar=hbar, box=args.box, grid=args.grid, tolerance=tol)
    checks: dict[str, dict] = {}

    def put(name, err, limit, **extra):
        checks[name] = {"pass": bool(err <= limit), "max_error": float(err), **extra}

    # displacement: W(z) W(-z) = 1 on the leading block
    half = N // 2
    err, zworst = 0.0, None
    for z in (0.5, 1 + 1j, -1.2 + 0.8j, 2.0j):
        W = fock.weyl_displacement(S, z) @ fock.weyl_displacement(S, -z)
        e = float(np.max(np.abs(W[:half, :half] - np.eye(half))))
        if zworst is None or e > err:
            err, zworst = e, z
    put("displacement_inverse", err, 1e-8, worst_point=complex(zworst))

    # kernel trace against the closed form, fixed sample
    rng = np.random.default_rng(20240601)
    pts = rng.uniform(-1.5, 1.5, size=(20, 3, 2)) * math.sqrt(hbar)
    rel = 0.0
    worst = None
    for x1, x2, x3 in pts:
        k = fock.kernel_trace(S, x1, x2, x3, hbar)
        g = groenewold_eval(x1, x2, x3, hbar)
        e = abs(k - g) / abs(g)
        if e >= rel:
            rel, worst = e, [x1.tolist(), x2.tolist(), x3.tolist()]
    put("kernel_vs_groenewold", rel, tol, worst_point=worst)

    o = fock.kernel_trace(S, (0, 0), (0, 0), (0, 0), hbar)
    put("kernel_origin", abs(o - 1 / (math.pi * hbar) ** 2) * (math.pi * hbar) ** 2, 1e-3,
        worst_point=[[0, 0], [0, 0], [0, 0]])

    x1, x2, x3 = pts[0]
    a = fock.kernel_trace(S, x1, x2, x3, hbar)
    b = fock.kernel_trace(S, x2, x1, x3, hbar)
    put("kernel_swap_conjugate", abs(b - np.conj(a)), 1e-10,
        worst_point=[x1.tolist(), x2.tolist(), x3.tolist()])

    # biorthogonality: smear Tr(U(x) D(x')) against a Gaussian probe
    grid = PhaseGrid(args.box, args.grid)

    def probe(Q, P):
        return np.exp(-((Q - 0.2) ** 2 + (P + 0.1) ** 2) / hbar)

    err, info = fock.biorthogonality_check(
        S, grid, hbar, probe, [(0, 0), (0.5, -0.5), (1.0, 0.3), (-1.0, 0.8)]
    )
    put("biorthogonality", err, tol, **info)

    # ground-state symbol
    box = S.trusted_box()
    sgrid = PhaseGrid(box, 9)
    sym = fock.symbol_of(S.projector(0), sgrid, hbar, S)
    Q, P = sgrid.mesh()
    dev = np.abs(sym - 2 * np.exp(-(Q**2 + P**2) / hbar))
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    put("ground_state_symbol", float(dev[i, j]), 1e-6, worst_point=[float(Q[i, j]), float(P[i, j])])

    rep.output = checks
    for name, c in checks.items():
        rep.add(name, c["pass"], **{k: v for k, v in c.items() if k != "pass"})
    if args.csv_out:
        rows = [{"check": k, "pass": v["pass"], "max_error": v["max_error"]} for k, v in checks.items()]
        with open(args.csv_out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["check", "pass", "max_error"])
            for r in rows:
                w.writerow([r["check"], r["pass"], f"{r['max_error']:.{SIG_DIGITS}g}"])


def _cmd_catalog(args, rep: RunReport) -> None:
    if args.action == "list":
        rep.output = {
            name: list(catalog.fixture_params(name)) for name in catalog.fixture_names()
        }
        rep.add("listed", True)
        return
    if not args.name:
        raise UsageError("catalog show needs a fixture name")
    obj = catalog.fixture(args.name, _assignment(args.param))
    if isinstance(obj, StructureTensor):
        rep.output = obj.to_json()
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(fileformat.dumps(obj))
            rep.inputs["out"] = args.out
    elif args.out:
        raise UsageError(f"{args.name} is a matrix list, not an algebra")
    else:
        rep.output = {"matrices": [[[str(x) for x in row] for row in M] for M in obj]}
    rep.add("exported", True)


COMMANDS = {
    "check": _cmd_check,
    "contract": _cmd_contract,
    "kdeform": _cmd_kdeform,
    "classify": _cmd_classify,
    "moyal": _cmd_moyal,
    "kernel-limit": _cmd_kernel_limit,
    "fock-verify": _cmd_fock_verify,
    "catalog": _cmd_catalog,
}


def run(argv: Sequence[str]) -> RunReport:
    argv = list(argv)
    try:
        args = _parser().parse_args(argv)
    except UsageError as exc:
        rep = RunReport(argv[0] if argv else "", {"argv": argv}, exit_code=2)
        rep.add("usage", False, message=str(exc))
        return rep
    rep = RunReport(args.command)
    try:
        COMMANDS[args.command](args, rep)
    except fileformat.FileFormatError as exc:
        rep.results.append({"name": "input", "passed": False, "message": str(exc),
                            "line": exc.line, "column": exc.column})
        rep.exit_code = 2
    except (UsageError, OSError, CoeffError, ExpressionSyntaxError, catalog.UnknownFixture,
            KeyError, ValueError) as exc:
        rep.results.append({"name": "input", "passed": False, "message": str(exc)})
        rep.exit_code = 2
    return rep.finish()


def main(argv: Sequence[str] | None = None) -> int:
    rep = run(sys.argv[1:] if argv is None else argv)
    print(rep.to_json())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
