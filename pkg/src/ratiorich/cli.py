"""Command-line interface.

Subcommands: ``estimate`` (richness estimate for one table), ``fit`` (ladder
diagnostics), ``compare`` (estimate alongside the competitor estimators),
``simulate`` (negative-binomial replication study), and ``ratio-plot``
(fitted-versus-observed ratio data as CSV).

Exit codes: 0 on success, 1 on input or usage errors, 2 when the method can
produce no estimate for a readable table.

Defaults may be placed in a config file of ``key = value`` lines (``#``
comments allowed), pointed to by ``--config`` or the ``RATIORICH_CONFIG``
environment variable; explicit flags override the file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    DomainError,
    NoEstimateError,
    RatiorichError,
    StructureError,
    TableParseError,
)
from .freqtab import check_structure, parse_frequency_table
from .procedure import ProcedureOptions, estimate_richness
from .records import (
    compare_record,
    estimate_record,
    fit_record,
    ratio_plot_csv,
    simulate_record,
)
from .simulate import SimConfig, replication_study
from .solver import DEFAULT_LADDER

CONFIG_ENV_VAR = "RATIORICH_CONFIG"

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NO_ESTIMATE = 2

# Config keys -> argparse dests; values parsed with the same converters.
_CONFIG_KEYS = {
    "format": ("format", str),
    "min-ratios": ("min_ratios", int),
    "max-order": ("max_order", int),
    "tridiagonal": ("tridiagonal", lambda s: s.strip().lower() in {"1", "true", "yes", "on"}),
    "stabilization-tol": ("stabilization_tol", float),
    "max-outer": ("max_outer", int),
    "katz-tol": ("katz_tol", float),
    "tau": ("tau", int),
    "seed": ("seed", int),
    "workers": ("workers", int),
}


def _load_config(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"config {path} line {lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().lower()
            if key not in _CONFIG_KEYS:
                raise DomainError(f"config {path} line {lineno}: unknown key {key!r}")
            dest, convert = _CONFIG_KEYS[key]
            try:
                values[dest] = convert(value.strip())
            except ValueError:
                raise DomainError(
                    f"config {path} line {lineno}: bad value for {key!r}"
                ) from None
    return values


def _add_procedure_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--min-ratios", type=int, default=None,
                     help="contiguous ratios required before estimating (default 3)")
    sub.add_argument("--max-order", type=int, default=None,
                     help="drop ladder models with p+q above this (default 8)")
    sub.add_argument("--tridiagonal", action="store_true", default=None,
                     help="use tridiagonal adaptive weights (diagonal is the default)")
    sub.add_argument("--stabilization-tol", type=float, default=None,
                     help="relative change of f0 that stops re-weighting (default 1e-3)")
    sub.add_argument("--max-outer", type=int, default=None,
                     help="cap on re-weighting passes (default 20)")
    sub.add_argument("--katz-tol", type=float, default=None,
                     help="tolerance for the linear-ratio family check (default 0.05)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratiorich",
        description="Species richness estimation from frequency-count ratios.",
    )
    parser.add_argument("--config", default=None,
                        help=f"key=value defaults file (or set ${CONFIG_ENV_VAR})")
    commands = parser.add_subparsers(dest="command", required=True)

    est = commands.add_parser("estimate", help="estimate total richness for one table")
    est.add_argument("path", help="frequency-table file (j<delim>count per line)")
    est.add_argument("--format", choices=("json", "table"), default=None)
    _add_procedure_flags(est)

    fit = commands.add_parser("fit", help="model-ladder diagnostics under initial weights")
    fit.add_argument("path")
    fit.add_argument("--format", choices=("json", "table"), default=None)
    _add_procedure_flags(fit)

    cmp_ = commands.add_parser("compare", help="compare against the classical estimators")
    cmp_.add_argument("path")
    cmp_.add_argument("--format", choices=("json", "table"), default=None)
    cmp_.add_argument("--tau", type=int, default=None,
                      help="Chao-Bunge frequency cutoff (default 10)")
    cmp_.add_argument("--uniform-wlrm-weights", action="store_true", default=None,
                      help="unweighted linear ratio fits instead of inverse-variance")
    _add_procedure_flags(cmp_)

    sim = commands.add_parser("simulate", help="negative-binomial replication study")
    sim.add_argument("--c", dest="c_true", type=int, required=True, help="true class total")
    sim.add_argument("--prob", type=float, required=True, help="success probability in (0,1)")
    sim.add_argument("--size", type=float, required=True, help="dispersion (size) parameter")
    sim.add_argument("--reps", type=int, required=True, help="number of replications")
    sim.add_argument("--seed", type=int, default=None, help="stream seed (default 0)")
    sim.add_argument("--workers", type=int, default=None, help="parallel workers (default 1)")
    sim.add_argument("--format", choices=("json", "table"), default=None)
    _add_procedure_flags(sim)

    plot = commands.add_parser("ratio-plot", help="fitted-vs-observed ratio data as CSV")
    plot.add_argument("path")
    plot.add_argument("--output", "-o", default="-", help="output file (default stdout)")
    _add_procedure_flags(plot)

    return parser


def _get(args: argparse.Namespace, config: dict, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _procedure_options(args: argparse.Namespace, config: dict) -> ProcedureOptions:
    max_order = _get(args, config, "max_order", 8)
    ladder = tuple(entry for entry in DEFAULT_LADDER if sum(entry) <= max_order)
    if not ladder:
        raise DomainError("--max-order removes every ladder model")
    return ProcedureOptions(
        min_ratios=_get(args, config, "min_ratios", 3),
        ladder=ladder,
        tridiagonal=bool(_get(args, config, "tridiagonal", False)),
        stabilization_tol=_get(args, config, "stabilization_tol", 1e-3),
        max_outer_iterations=_get(args, config, "max_outer", 20),
        katz_tol=_get(args, config, "katz_tol", 0.05),
    )


def _read_table(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_frequency_table(handle.read())


def _emit_json(record: dict) -> None:
    print(json.dumps(record, indent=2, sort_keys=True, allow_nan=False))


def _fmt(value, digits=4) -> str:
    if value is None:
        return "*"
    return format(value, f".{digits}f").rstrip("0").rstrip(".")


def _render_estimate_table(record: dict) -> None:
    print(f"estimated richness : {record['c_hat_rounded']}  ({_fmt(record['c_hat'])})")
    print(f"standard error     : {_fmt(record['se'])}")
    print(f"unobserved classes : {_fmt(record['f0_hat'])}")
    print(f"procedure code     : {record['code']}")
    stats = record["stats"]
    print(f"observed           : c={stats['c']} n={stats['n']} "
          f"tau_max={stats['tau_max']} ratios={stats['num_ratios']}")
    if record["model"] is not None:
        model = record["model"]
        print(f"selected model     : order ({model['p']},{model['q']}), b0={_fmt(model['b0'])}")
    if record["classification"] is not None:
        print(f"classification     : {record['classification']['label']}")
    if record["weights_final"] is not None:
        diag = record["weights_final"]["diagonal"]
        top = max(diag)
        normalized = ", ".join(format(w / top, ".3f") for w in diag[:8])
        suffix = ", ..." if len(diag) > 8 else ""
        print(f"final weights      : {record['weights_final']['kind']} "
              f"(unit max: {normalized}{suffix})")
    for warning in record["warnings"]:
        print(f"warning            : {warning}")


def _render_ladder_table(rows: list[dict]) -> None:
    print("  p q  converged  b0           objective     satisfied  note")
    for row in rows:
        mark = "selected" if row["selected"] else ("seed-only" if row["seed_only"] else "")
        print(
            f"  {row['p']} {row['q']}  {str(row['converged']):9}  "
            f"{_fmt(row['b0'], 6):12} {_fmt(row['objective'], 6):13} "
            f"{str(row['criteria']['satisfied']):9}  {mark}"
        )


def _render_compare_table(record: dict) -> None:
    width = max(len(row["method"]) for row in record["rows"])
    for row in record["rows"]:
        if row["c_hat"] is None:
            cell = "*"
        else:
            cell = f"{row['c_hat']:.0f}"
            if row["se"] is not None:
                cell += f" ({row['se']:.2f})"
        print(f"{row['method']:<{width}}  {cell}")


def _render_simulate_table(record: dict) -> None:
    config = record["config"]
    summary = record["summary"]
    design = f"({config['prob']}, {config['size']})"
    cells = [
        f"{config['c_true']:<7}",
        f"{design:<15}",
        f"{config['replications']:<6}",
        f"{_fmt(summary['pct_inferred_nb'], 2):<7}",
        f"{_fmt(summary['mean_se_hat'], 2):<8}",
        f"{_fmt(summary['empirical_se'], 2):<13}",
        f"{_fmt(summary['mean_c_hat'], 2):<11}",
        str(summary["failures"]),
    ]
    print("C_true  (prob, size)    reps   %NB     mean_se  empirical_se  mean_C_hat  failures")
    print(" ".join(cells))


def _run(args: argparse.Namespace) -> int:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = _load_config(config_path) if config_path else {}
    fmt = _get(args, config, "format", "table")

    if args.command == "estimate":
        table = _read_table(args.path)
        record = estimate_record(estimate_richness(table, _procedure_options(args, config)))
        if fmt == "json":
            _emit_json(record)
        else:
            _render_estimate_table(record)
        return EXIT_OK

    if args.command == "fit":
        table = _read_table(args.path)
        options = _procedure_options(args, config)
        report = check_structure(table, options.min_ratios)
        if not report.ok:
            raise StructureError(f"insufficient structure: {report.reason}")
        record = fit_record(table, options)
        if fmt == "json":
            _emit_json(record)
        else:
            stats = record["stats"]
            print(f"c={stats['c']} n={stats['n']} tau_max={stats['tau_max']} "
                  f"ratios={stats['num_ratios']} jbar={record['jbar']}")
            _render_ladder_table(record["ladder"])
        return EXIT_OK

    if args.command == "compare":
        table = _read_table(args.path)
        record = compare_record(
            table,
            _procedure_options(args, config),
            tau=_get(args, config, "tau", 10),
            uniform_wlrm_weights=bool(_get(args, config, "uniform_wlrm_weights", False)),
        )
        if fmt == "json":
            _emit_json(record)
        else:
            _render_compare_table(record)
        return EXIT_OK

    if args.command == "simulate":
        sim_config = SimConfig(
            c_true=args.c_true,
            prob=args.prob,
            size=args.size,
            replications=args.reps,
            seed=_get(args, config, "seed", 0),
            workers=_get(args, config, "workers", 1),
        )
        summary = replication_study(sim_config, _procedure_options(args, config))
        record = simulate_record(sim_config, summary)
        if fmt == "json":
            _emit_json(record)
        else:
            _render_simulate_table(record)
        return EXIT_OK

    if args.command == "ratio-plot":
        table = _read_table(args.path)
        csv_text = ratio_plot_csv(table, _procedure_options(args, config))
        if args.output == "-":
            sys.stdout.write(csv_text)
        else:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(csv_text)
        return EXIT_OK

    raise DomainError(f"unknown command {args.command!r}")  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return _run(args)
    except (StructureError, NoEstimateError) as exc:
        print(f"no estimate: {exc}", file=sys.stderr)
        return EXIT_NO_ESTIMATE
    except (TableParseError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except RatiorichError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
