"""Command line interface: ``secantfano <command> --d <n|lo..hi|symbolic>``.

Exit status is 0 when every check passes, 1 when a verification fails and 2
for usage errors (bad flags, d out of range, malformed config).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import chow, cylinder, kstab, ledger
from .errors import ConfigError, DomainError, PoleError
from .expr import ExprError, evaluate
from .report import Report, dumps, render
from .scalar import RatFunc, coerce_d, format_scalar, is_symbolic, split_num_den

COMMANDS = (
    "invariants",
    "lct",
    "zhuang-check",
    "cylinder-verify",
    "chow-eval",
    "higher-secant",
    "ledger-replay",
)


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    command: str
    d_mode: tuple  # ("single", n) | ("range", lo, hi) | ("symbolic",)
    output: str = "table"
    config_path: str | None = None
    k: int = 1
    expr: str | None = None
    boundary: str = "T"
    t: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output not in ("table", "json", "csv"):
            raise UsageError(f"unknown output format {self.output!r}")
        lo = 2 * self.k + 1 if self.command == "higher-secant" else 4
        if self.d_mode[0] == "single" and self.d_mode[1] < lo:
            raise UsageError(_domain_message(self.d_mode[1], lo))
        if self.d_mode[0] == "range":
            _, a, b = self.d_mode
            if a > b:
                raise UsageError(f"empty range {a}..{b}")
            if a < lo:
                raise UsageError(_domain_message(a, lo))

    def d_values(self) -> list:
        if self.d_mode[0] == "symbolic":
            return ["symbolic"]
        if self.d_mode[0] == "single":
            return [self.d_mode[1]]
        return list(range(self.d_mode[1], self.d_mode[2] + 1))


def _domain_message(d, lo) -> str:
    if lo == 4:
        return (
            f"d = {d} is out of range: need d >= 4, where Sigma is a singular "
            "Q-Fano threefold (d = 3 gives P^3)"
        )
    return f"d = {d} is out of range: the k-th secant variety needs d >= 2k+1 = {lo}"


def parse_d(text: str) -> tuple:
    text = text.strip()
    if text.lower() in ("symbolic", "sym", "d"):
        return ("symbolic",)
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return ("range", int(a), int(b))
        return ("single", int(text))
    except ValueError:
        raise UsageError(f"--d expects n, lo..hi or symbolic, got {text!r}") from None


@dataclass
class Result:
    d: object
    values: dict = field(default_factory=dict)
    report: Report | None = None
    ok: bool = True

    def to_tree(self) -> dict:
        tree = {"d": format_scalar(coerce_d(self.d))}
        if self.values:
            tree["values"] = render(self.values)
        if self.report is not None:
            tree["report"] = self.report.to_tree()
        tree["ok"] = self.ok
        return tree


# ---------------------------------------------------------------------------
# commands


def _limit_at_infinity(f):
    if not isinstance(f, RatFunc):
        return f
    if f.num.degree() < f.den.degree():
        return Fraction(0)
    if f.num.degree() == f.den.degree():
        return f.num.lc() / f.den.lc()
    return None


def cmd_invariants(spec: RunSpec, d) -> Result:
    d = coerce_d(d)
    a, b = chow.solve_anticanonical_coeffs(d)
    led = ledger.secant_resolution_ledger(d)
    lct = ledger.lct_from_ledger(led, "T")
    inv_t = kstab.tangent_surface_invariants(d)
    alpha_g = kstab.equivariant_alpha(d)
    factor = kstab.fujita_bound(kstab.FujitaBoundInput(3, alpha_g, Fraction(1)))
    values = {
        "H^3": chow.degree(d),
        "(-K)^3": chow.anticanonical_volume(d),
        "anticanonical_coeff_a": a,
        "discrepancy_coeff_b": b,
        "pullback_coeff_c": chow.solve_pullback_coeff(d),
        "lct(Sigma,T)": lct.value,
        "alpha_G": alpha_g,
        "alpha_upper_bound": kstab.alpha_upper_bound_witness(d)["lct_upper_bound"],
        "S(T)": inv_t.S,
        "A(T)": inv_t.A,
        "tau(T)": inv_t.tau,
        "A(Z)": ledger.log_discrepancy(led, "Z"),
        "A(E1)": ledger.log_discrepancy(led, "E1"),
        "A(E2)": ledger.log_discrepancy(led, "E2"),
        "C_centred_bound_factor": factor,
    }
    if is_symbolic(d):
        values["alpha_G_limit_d_to_infinity"] = _limit_at_infinity(alpha_g)
    return Result(d, values)


def _load_ledger_config(spec: RunSpec, d):
    if spec.config_path:
        return ledger.load_config(spec.config_path, d)
    return ledger.builtin_config(d)


def cmd_lct(spec: RunSpec, d) -> Result:
    d = coerce_d(d)
    led = ledger.replay(_load_ledger_config(spec, d))
    try:
        res = ledger.lct_from_ledger(led, spec.boundary)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    values = {"lct": res.value, "argmin": res.argmin}
    values.update({f"A/ord[{k}]": v for k, v in res.ratios.items()})
    return Result(d, values)


def cmd_zhuang(spec: RunSpec, d) -> Result:
    t = None
    if spec.t is not None:
        try:
            t = evaluate(spec.t, {"d": coerce_d(d)})
        except ExprError as exc:
            raise UsageError(str(exc)) from None
    rep = kstab.zhuang_check(d, t=t)
    return Result(d, {"verdict": rep.data["verdict"]}, rep, rep.passed)


def cmd_cylinder(spec: RunSpec, d) -> Result:
    rep = cylinder.cylinder_full_verify(d)
    return Result(d, {"cylinder": rep.data.get("cylinder", "not certified")}, rep, rep.passed)


def cmd_chow_eval(spec: RunSpec, d) -> Result:
    if not spec.expr:
        raise UsageError("chow-eval needs --expr, e.g. --expr 'H*H*H'")
    d = coerce_d(d)
    names = dict(chow.NamedDivisors(d))
    names["minus_K"] = chow.anticanonical_class(d)
    names["d"] = d
    try:
        value = evaluate(spec.expr, names)
    except (ExprError, ValueError) as exc:
        raise UsageError(f"bad --expr: {exc}") from None
    if isinstance(value, chow.ChowClass):
        if value.degrees() <= {3}:
            return Result(d, {spec.expr: value.degree_number()})
        return Result(d, {spec.expr: repr(value)})
    return Result(d, {spec.expr: value})


def cmd_higher_secant(spec: RunSpec, d) -> Result:
    hs = chow.higher_secant_invariants(spec.k, d)
    values = {"k": Fraction(spec.k)}
    values.update(hs.as_dict())
    return Result(d, values)


def cmd_ledger_replay(spec: RunSpec, d) -> Result:
    d = coerce_d(d)
    led = ledger.replay(_load_ledger_config(spec, d))
    values = {}
    for tracked, vec in led.tracked.items():
        for prime in led.primes:
            if prime in vec:
                values[f"{tracked}[{prime}]"] = vec[prime]
    for prime in led.primes:
        values[f"A({prime})"] = ledger.log_discrepancy(led, prime)
    return Result(d, values)


HANDLERS = {
    "invariants": cmd_invariants,
    "lct": cmd_lct,
    "zhuang-check": cmd_zhuang,
    "cylinder-verify": cmd_cylinder,
    "chow-eval": cmd_chow_eval,
    "higher-secant": cmd_higher_secant,
    "ledger-replay": cmd_ledger_replay,
}


# ---------------------------------------------------------------------------
# output


def _table(spec: RunSpec, results: list) -> str:
    lines = []
    for res in results:
        lines.append(f"== {spec.command}  d = {format_scalar(coerce_d(res.d))}")
        if res.values:
            width = max(len(k) for k in res.values)
            for k, v in res.values.items():
                lines.append(f"  {k.ljust(width)}  {render(v)}")
        if res.report is not None:
            for c in res.report.checks:
                lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}")
                if c.citation:
                    lines.append(f"         {c.citation}")
                for key, val in c.detail.items():
                    if key in ("margin", "margin_factor") or not c.passed:
                        lines.append(f"         {key} = {render(val)}")
            for key, val in res.report.data.items():
                if isinstance(val, (str, int, Fraction, RatFunc)):
                    lines.append(f"  {key}: {render(val)}")
            for note in res.report.notes:
                lines.append(f"  note: {note}")
    return "\n".join(lines) + "\n"


def _csv_rows(res: Result):
    d = format_scalar(coerce_d(res.d))
    for k, v in res.values.items():
        if isinstance(v, (int, Fraction, RatFunc)) and not isinstance(v, bool):
            num, den = split_num_den(v)
            yield d, k, num, den
    if res.report is not None:
        for c in res.report.checks:
            yield d, f"passed:{c.name}", "1" if c.passed else "0", "1"
            for k, v in c.detail.items():
                if isinstance(v, (Fraction, RatFunc)):
                    num, den = split_num_den(v)
                    yield d, f"{c.name}:{k}", num, den


def _csv(results: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["d", "name", "numerator", "denominator"])
    for res in results:
        writer.writerows(_csv_rows(res))
    return buf.getvalue()


def format_results(spec: RunSpec, results: list) -> str:
    if spec.output == "json":
        return dumps({"command": spec.command, "results": [r.to_tree() for r in results]})
    if spec.output == "csv":
        return _csv(results)
    return _table(spec, results)


def run(spec: RunSpec, out=None) -> int:
    """Execute a spec, write its report, and return the exit code."""
    out = sys.stdout if out is None else out
    handler = HANDLERS[spec.command]
    results = [handler(spec, d) for d in spec.d_values()]
    out.write(format_results(spec, results))
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", default="symbolic", help="n, lo..hi, or symbolic (default)")
    common.add_argument("--output", choices=("table", "json", "csv"), default="table")
    common.add_argument("--config", dest="config_path", help="YAML blow-up chain (lct, ledger-replay)")

    parser = argparse.ArgumentParser(
        prog="secantfano",
        description="Exact invariants of the secant variety of a rational normal curve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("invariants", parents=[common], help="intersection numbers, lct, alpha, S(T)")
    p = sub.add_parser("lct", parents=[common], help="lct from a blow-up ledger")
    p.add_argument("--boundary", default="T")
    p = sub.add_parser("zhuang-check", parents=[common], help="equivariant S < A criterion")
    p.add_argument("--t", help="override the lct floor for C-centred divisors, e.g. 1/2")
    sub.add_parser("cylinder-verify", parents=[common], help="polar cylinder certificates")
    p = sub.add_parser("chow-eval", parents=[common], help="evaluate a product of divisor classes")
    p.add_argument("--expr", required=True, help="e.g. 'H*H*H' or 'minus_K^3'")
    p = sub.add_parser("higher-secant", parents=[common], help="closed forms for Sigma_k")
    p.add_argument("--k", type=int, default=1)
    sub.add_parser("ledger-replay", parents=[common], help="replay a blow-up chain")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = RunSpec(
            command=args.command,
            d_mode=parse_d(args.d),
            output=args.output,
            config_path=args.config_path,
            k=getattr(args, "k", 1),
            expr=getattr(args, "expr", None),
            boundary=getattr(args, "boundary", "T"),
            t=getattr(args, "t", None),
        )
        return run(spec)
    except (UsageError, DomainError, ConfigError, PoleError) as exc:
        print(f"secantfano: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
