"""Command line front end.

Subcommands::

    rates     convergence table (CSV, optional log-log SVG) for one law over several n
    check     run the Stein identity suite; exit 3 if any residual is out of tolerance
    solution  tabulate the Stein solution for h = 1(. <= t)

Exit status: 0 success, 1 usage error, 2 numerical non-convergence,
3 identity failure. ``--config FILE`` reads ``key = value`` lines (keys are
the long flag names without dashes); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .attraction import MaxLaw, NormingMode, make_law
from .errors import DomainError
from .frechet import FrechetLaw
from .numerics import QuadConfig
from .rates import McConfig, RateReport, build_report, reports_to_csv
from .stein import run_identity_suite, solve_indicator, stein_op
from .svg import loglog_svg

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IDENTITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--n expects comma-separated integers, got {text!r}") from None


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in {"1", "true", "yes", "on"}


def read_config(path: str | Path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


@dataclass
class ExperimentSpec:
    law: str
    params: dict
    n_list: list[int]
    norming: NormingMode = NormingMode.PAPER
    mc: McConfig = field(default_factory=McConfig)
    quad: QuadConfig | None = None
    output_path: Path = Path("rates.csv")
    emit_svg: bool = False

    def __post_init__(self):
        if not self.n_list:
            raise UsageError("n list is empty")
        if any(n < 2 for n in self.n_list):
            raise UsageError("n must be ≥ 2")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise UsageError("n list must be strictly increasing")

    def build_law(self) -> MaxLaw:
        try:
            return make_law(self.law, **self.params)
        except (DomainError, TypeError) as exc:
            raise UsageError(str(exc)) from None


def _law_params(law: str, opts: dict) -> dict:
    if law in ("pareto", "frechet"):
        if opts.get("alpha") is None:
            raise UsageError(f"--alpha is required for law {law}")
        return {"alpha": float(opts["alpha"])}
    if law == "burr":
        if opts.get("c") is None or opts.get("k") is None:
            raise UsageError("--c and --k are required for law burr")
        return {"c": float(opts["c"]), "k": float(opts["k"])}
    raise UsageError(f"unknown law {law!r} (pareto, burr, frechet)")


def _merged(args: argparse.Namespace) -> dict:
    opts = read_config(args.config) if args.config else {}
    for key, value in vars(args).items():
        if value is not None:
            opts[key] = value
    return opts


def spec_from_options(opts: dict) -> ExperimentSpec:
    law = str(opts.get("law", "pareto"))
    try:
        norm = NormingMode(str(opts.get("norming", "paper")))
        mc = McConfig(
            samples=int(opts.get("samples", 10**6)),
            seed=int(opts.get("seed", 0)),
            workers=int(opts.get("workers", 1)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return ExperimentSpec(
        law=law,
        params=_law_params(law, opts),
        n_list=_int_list(opts.get("n", "")),
        norming=norm,
        mc=mc,
        output_path=Path(opts.get("out", "rates.csv")),
        emit_svg=_bool(opts.get("svg", False)),
    )


def _summary(reports: list[RateReport]) -> str:
    head = f"{'n':>8} {'a_n':>12} {'delta_quad':>12} {'delta_mc':>12} {'kolmogorov':>12} {'bound':>12} {'density_sup':>12} {'r_n':>12}"
    lines = [head]
    for r in reports:
        bound = f"{r.paper_bound:12.6g}" if r.paper_bound is not None else f"{'-':>12}"
        lines.append(
            f"{r.n:>8d} {r.a_n:12.6g} {r.delta_n_quad:12.6g} {r.delta_n_mc:12.6g} "
            f"{r.kolmogorov:12.6g} {bound} {r.density_sup:12.6g} {r.r_n:12.6g}"
        )
    return "\n".join(lines)


def cmd_rates(spec: ExperimentSpec) -> int:
    law = spec.build_law()
    reports = [build_report(law, n, spec.norming, quad=spec.quad, mc=spec.mc) for n in spec.n_list]
    spec.output_path.write_text(reports_to_csv(reports), encoding="utf-8")
    if spec.emit_svg:
        series = {
            "delta_quad": [r.delta_n_quad for r in reports],
            "kolmogorov": [r.kolmogorov for r in reports],
        }
        if law.name == "pareto":
            series["2/(e(n-1))"] = [r.paper_bound for r in reports]
        svg = loglog_svg(spec.n_list, series, title=f"{law.name} {law.params}")
        spec.output_path.with_suffix(".svg").write_text(svg, encoding="utf-8")
    print(_summary(reports))
    status = EXIT_OK
    for r in reports:
        for name, msg in r.errors.items():
            print(f"n={r.n}: {name}: {msg}", file=sys.stderr)
            if msg.startswith("NonConvergence"):
                status = EXIT_NUMERIC
    return status


def _broken_stein_op(law, phi, dphi, x):
    return stein_op(law, phi, dphi, x) - 2 * law.alpha * phi(x)


def cmd_check(alphas: list[float], inject_bug: bool = False) -> int:
    op = _broken_stein_op if inject_bug else stein_op
    results = run_identity_suite(alphas, op=op)
    width = max(len(r.name) for r in results)
    print(f"{'identity':<{width}}  {'max residual':>13}  {'tolerance':>9}  status")
    for r in results:
        print(f"{r.name:<{width}}  {r.max_residual:13.3e}  {r.tol:9.0e}  {'ok' if r.passed else 'FAIL'}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failed identities: " + "; ".join(failed), file=sys.stderr)
        return EXIT_IDENTITY
    return EXIT_OK


def cmd_solution(alpha: float, t: float, xs: list[float], out: Path | None = None) -> int:
    if not t > 0:
        raise UsageError("t must be > 0")
    try:
        sol = solve_indicator(FrechetLaw(alpha), t)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    lines = ["x,phi_h,bound"]
    lines += [f"{x!r},{sol.value(x)!r},{1.0 / alpha!r}" for x in xs]
    text = "\n".join(lines) + "\n"
    if out is not None:
        out.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frechet-stein", description="Stein's method rates towards the Frechet law")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("rates", help="convergence table for one law")
    r.add_argument("--law", choices=["pareto", "burr", "frechet"])
    r.add_argument("--alpha", type=float)
    r.add_argument("--c", type=float)
    r.add_argument("--k", type=float)
    r.add_argument("--n", help="comma-separated sample sizes, e.g. 2,10,100")
    r.add_argument("--norming", choices=[m.value for m in NormingMode])
    r.add_argument("--samples", type=int, help="Monte Carlo draws per n (default 1e6)")
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out", help="CSV path (default rates.csv)")
    r.add_argument("--svg", action="store_const", const=True, help="also write <out>.svg")
    r.add_argument("--config")

    c = sub.add_parser("check", help="run the Stein identity suite")
    c.add_argument("--alpha", help="comma-separated alphas (default 0.5,1,2)")
    c.add_argument("--config")
    c.add_argument("--inject-bug", action="store_const", const=True, help=argparse.SUPPRESS)

    s = sub.add_parser("solution", help="Stein solution for the indicator of (-inf, t]")
    s.add_argument("--alpha", type=float)
    s.add_argument("--t", type=float)
    s.add_argument("--x", help="comma-separated evaluation points ('inf' allowed)")
    s.add_argument("--out")
    s.add_argument("--config")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse: --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        opts = _merged(args)
        if args.command == "rates":
            return cmd_rates(spec_from_options(opts))
        if args.command == "check":
            alphas = _float_list(opts.get("alpha", "0.5,1,2"))
            if not alphas or any(not a > 0 for a in alphas):
                raise UsageError("alphas must be positive")
            return cmd_check(alphas, _bool(opts.get("inject_bug", False)))
        if opts.get("t") is None or opts.get("alpha") is None:
            raise UsageError("solution needs --alpha and --t")
        xs = _float_list(opts.get("x", "0.5,1,2,4,inf"))
        if any(math.isnan(x) or x < 0 for x in xs):
            raise UsageError("x values must be >= 0")
        out = Path(opts["out"]) if opts.get("out") else None
        return cmd_solution(float(opts["alpha"]), float(opts["t"]), xs, out)
    except UsageError as exc:
        print(f"frechet-stein: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
