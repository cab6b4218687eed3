"""Command-line surface: solve, educate, compare, and init-model.

Machine-readable results (JSON proofs, CSV tables) go to stdout or to
files; diagnostics go to stderr.  Exit codes: 0 when the goal was proved
(or every test stage passed), 1 when not, 2 on usage, parse, or data
errors.  Flags override values from an optional JSON config file given
with --config; there are no environment variables, so a recorded
command line fully determines a run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .curriculum import (
    EducationError,
    educate,
    parse_schedule,
    write_losses_csv,
    write_report_json,
)
from .encoding import EncodingConfig, EncodingError
from .knowledge import (
    Goal,
    ParseError,
    RuleSet,
    SymbolSet,
    parse_goal,
    parse_rule_set,
    parse_symbol_set,
    render_term,
    validate_coverage,
)
from .network import (
    ModelFormatError,
    Network,
    TrainingParams,
    init_network,
    load_network,
    save_network,
)
from .resolver import Exhaustive, Guided, StaticOrder, proof_to_dict, solve, write_trace_file

USAGE_ERROR = 2

_DEFAULTS = {
    "breadth": 2,
    "depth": 2,
    "epochs": 100,
    "lr": 0.5,
    "seed": 0,
    "depth_limit": 10,
    "node_budget": None,
    "policy": "static",
    "mode": None,
    "hidden_dims": "32",
    "activation": "sigmoid",
    "scale": 0.5,
    "occurs_check": True,
    "figures": True,
    "output_dim": None,
}


class CliError(Exception):
    pass


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {what} file {path!r}: {exc}") from exc


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(_read_text(path, "config"))
    except json.JSONDecodeError as exc:
        raise CliError(f"config file {path!r} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise CliError(f"config file {path!r} must hold a JSON object")
    unknown = set(data) - set(_DEFAULTS) - {"kb", "symbols", "model"}
    if unknown:
        raise CliError(f"config file {path!r} has unknown keys: {sorted(unknown)}")
    return data


def _resolve(args: argparse.Namespace, config: dict, key: str):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return _DEFAULTS.get(key)


def _load_kb(args, config) -> tuple[RuleSet, SymbolSet]:
    kb_path = getattr(args, "kb", None) or config.get("kb")
    symbols_path = getattr(args, "symbols", None) or config.get("symbols")
    if not kb_path:
        raise CliError("a rule set file is required (--kb)")
    if not symbols_path:
        raise CliError("a symbol set file is required (--symbols)")
    rule_set = parse_rule_set(_read_text(kb_path, "rule set"))
    symbol_set = parse_symbol_set(_read_text(symbols_path, "symbol set"))
    return rule_set, symbol_set


def _encoding_config(args, config, symbol_set: SymbolSet, output_dim: int) -> EncodingConfig:
    return EncodingConfig(
        depth=int(_resolve(args, config, "depth")),
        breadth=int(_resolve(args, config, "breadth")),
        symbol_set=symbol_set,
        output_dim=output_dim,
    )


def _policy(args, config, rule_set: RuleSet, symbol_set: SymbolSet):
    name = _resolve(args, config, "policy")
    if name == "static":
        return StaticOrder()
    if name == "exhaustive":
        return Exhaustive()
    if name == "guided":
        model_path = getattr(args, "model", None) or config.get("model")
        if not model_path:
            raise CliError("policy 'guided' requires a trained model (--model)")
        network = load_network(model_path)
        cfg = _encoding_config(args, config, symbol_set, network.output_dim)
        return Guided(network, cfg)
    raise CliError(f"unknown policy {name!r}")


def _parse_hidden_dims(text: str) -> list[int]:
    dims = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        dims.append(int(part))
    if any(d < 1 for d in dims):
        raise CliError(f"hidden dimensions must be positive, got {text!r}")
    return dims


def _build_network(args, config, input_length: int, output_dim: int) -> Network:
    hidden = _parse_hidden_dims(_resolve(args, config, "hidden_dims"))
    activation = _resolve(args, config, "activation")
    scale = float(_resolve(args, config, "scale"))
    seed = int(_resolve(args, config, "seed"))
    specs = []
    prev = input_length
    for index, dim in enumerate(hidden, start=1):
        specs.append((f"hidden{index}", prev, dim, activation, scale))
        prev = dim
    specs.append(("output", prev, output_dim, "softmax", scale))
    return init_network(specs, seed)


def cmd_solve(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    rule_set, symbol_set = _load_kb(args, config)
    goal = parse_goal(args.goal)
    missing = validate_coverage(rule_set, symbol_set, goal.literals)
    policy = _policy(args, config, rule_set, symbol_set)
    if isinstance(policy, Guided) and missing:
        raise CliError("symbol set does not cover the input; missing: " + ", ".join(missing))
    depth_limit = int(_resolve(args, config, "depth_limit"))
    node_budget = _resolve(args, config, "node_budget")
    results = solve(
        goal,
        rule_set,
        policy,
        depth_limit,
        mode=_resolve(args, config, "mode"),
        node_budget=None if node_budget is None else int(node_budget),
        occurs_check=bool(_resolve(args, config, "occurs_check")),
    )
    if args.trace_out:
        write_trace_file(args.trace_out, goal, results)
    payload = {
        "goal": [render_term(t) for t in goal.literals],
        "policy": policy.name,
        "depth_limit": depth_limit,
        "results": [proof_to_dict(r) for r in results],
        "proved": any(r.proved for r in results),
    }
    print(json.dumps(payload, indent=2))
    return 0 if payload["proved"] else 1


def cmd_educate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    rule_set, symbol_set = _load_kb(args, config)
    model_path = getattr(args, "model", None) or config.get("model")
    if not model_path:
        raise CliError("educate requires an output model path (--model)")
    if not args.schedule:
        raise CliError("educate requires a schedule file (--schedule)")
    schedule = parse_schedule(_read_text(args.schedule, "schedule"))
    output_dim = _resolve(args, config, "output_dim")
    output_dim = rule_set.max_rule_id if output_dim is None else int(output_dim)
    encoding = _encoding_config(args, config, symbol_set, output_dim)
    if args.resume_from:
        network = load_network(args.resume_from)
    else:
        network = _build_network(args, config, encoding.input_length, output_dim)
    params = TrainingParams(
        epochs=int(_resolve(args, config, "epochs")),
        learning_rate=float(_resolve(args, config, "lr")),
        seed=int(_resolve(args, config, "seed")),
    )
    report = educate(
        schedule,
        rule_set,
        symbol_set,
        network,
        encoding,
        params,
        occurs_check=bool(_resolve(args, config, "occurs_check")),
    )
    model_path = Path(model_path)
    save_network(report.network, model_path)
    report_path = Path(args.report) if args.report else model_path.with_suffix(".report.json")
    losses_path = Path(args.losses_csv) if args.losses_csv else model_path.with_suffix(".losses.csv")
    write_report_json(report_path, report, params, encoding)
    write_losses_csv(losses_path, report)
    if bool(_resolve(args, config, "figures")):
        from .figures import render_loss_curves

        curves = [
            (f"stage {s.index}: {' '.join(s.goal_text) or 'empty goal'}", s.losses)
            for s in report.stages
            if s.losses
        ]
        render_loss_curves(curves, losses_path.with_suffix(".png"))
    print(
        f"model -> {model_path}\nreport -> {report_path}\nlosses -> {losses_path}",
        file=sys.stderr,
    )
    return 0 if report.all_tests_proved else 1


def _read_goals_file(path: str) -> list[Goal]:
    goals = []
    for raw in _read_text(path, "goals").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        goals.append(parse_goal(line.split()))
    return goals


def cmd_compare(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    rule_set, symbol_set = _load_kb(args, config)
    model_path = getattr(args, "model", None) or config.get("model")
    if not model_path:
        raise CliError("compare requires a trained model (--model)")
    network = load_network(model_path)
    encoding = _encoding_config(args, config, symbol_set, network.output_dim)
    goals = _read_goals_file(args.goals)
    depth_limit = int(_resolve(args, config, "depth_limit"))
    node_budget = _resolve(args, config, "node_budget")
    node_budget = None if node_budget is None else int(node_budget)
    occurs = bool(_resolve(args, config, "occurs_check"))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["goal", "policy", "status", "nodes_expanded", "backtracks"])
    rows = []
    for goal in goals:
        goal_text = ";".join(render_term(t) for t in goal.literals)
        for policy in (StaticOrder(), Guided(network, encoding)):
            result = solve(
                goal,
                rule_set,
                policy,
                depth_limit,
                mode="first",
                node_budget=node_budget,
                occurs_check=occurs,
            )[0]
            row = {
                "goal": goal_text,
                "policy": policy.name,
                "status": result.status,
                "nodes_expanded": result.stats.nodes_expanded,
                "backtracks": result.stats.backtracks,
            }
            rows.append(row)
            writer.writerow(list(row.values()))
    output = buffer.getvalue()
    sys.stdout.write(output)
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
        if rows and bool(_resolve(args, config, "figures")):
            from .figures import render_compare_chart

            render_compare_chart(rows, Path(args.out).with_suffix(".png"))
    return 0


def cmd_init_model(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    rule_set, symbol_set = _load_kb(args, config)
    model_path = getattr(args, "model", None) or config.get("model")
    if not model_path:
        raise CliError("init-model requires an output model path (--model)")
    output_dim = _resolve(args, config, "output_dim")
    output_dim = rule_set.max_rule_id if output_dim is None else int(output_dim)
    encoding = _encoding_config(args, config, symbol_set, output_dim)
    network = _build_network(args, config, encoding.input_length, output_dim)
    save_network(network, model_path)
    print(
        f"model -> {model_path} ({network.input_dim} -> {network.output_dim})",
        file=sys.stderr,
    )
    return 0


def _add_kb_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--kb", help="rule set file (JSON lines)")
    parser.add_argument("--symbols", help="symbol set file (JSON lines)")


def _add_encoding_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--breadth", type=int, help="children per tree position")
    parser.add_argument("--depth", type=int, help="tree levels in the encoding")
    parser.add_argument("--output-dim", type=int, dest="output_dim",
                        help="ranking width (defaults to the maximum rule id)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neurosld",
        description="SLD resolution over definite clauses with network-guided rule ranking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="resolve a goal and print the proofs as JSON")
    _add_kb_flags(p_solve)
    _add_encoding_flags(p_solve)
    p_solve.add_argument("--model", help="trained model (required for --policy guided)")
    p_solve.add_argument("--policy", choices=["static", "exhaustive", "guided"])
    p_solve.add_argument("--mode", choices=["first", "all"])
    p_solve.add_argument("--depth-limit", type=int, dest="depth_limit")
    p_solve.add_argument("--node-budget", type=int, dest="node_budget")
    p_solve.add_argument("--no-occurs-check", dest="occurs_check", action="store_false",
                         default=None, help="disable the unification occurs check")
    p_solve.add_argument("--trace-out", dest="trace_out", help="write a JSON-lines trace log")
    p_solve.add_argument("goal", nargs="+", help="goal literals in bracket syntax")
    p_solve.set_defaults(func=cmd_solve)

    p_edu = sub.add_parser("educate", help="run a schedule and train the network")
    _add_kb_flags(p_edu)
    _add_encoding_flags(p_edu)
    p_edu.add_argument("--schedule", help="JSON schedule file")
    p_edu.add_argument("--model", help="output path for the trained model")
    p_edu.add_argument("--resume-from", dest="resume_from",
                       help="start from an existing model instead of a fresh one")
    p_edu.add_argument("--epochs", type=int)
    p_edu.add_argument("--lr", type=float)
    p_edu.add_argument("--seed", type=int)
    p_edu.add_argument("--hidden-dims", dest="hidden_dims",
                       help="comma-separated hidden layer sizes for a fresh model")
    p_edu.add_argument("--activation", choices=["sigmoid", "tanh", "relu", "linear"])
    p_edu.add_argument("--scale", type=float, help="uniform init scale for a fresh model")
    p_edu.add_argument("--report", help="report JSON path (default: beside the model)")
    p_edu.add_argument("--losses-csv", dest="losses_csv",
                       help="loss CSV path (default: beside the model)")
    p_edu.add_argument("--no-occurs-check", dest="occurs_check", action="store_false",
                       default=None)
    p_edu.add_argument("--figures", dest="figures", action="store_true", default=None,
                       help="render loss-curve figures beside the CSV (default)")
    p_edu.add_argument("--no-figures", dest="figures", action="store_false", default=None)
    p_edu.set_defaults(func=cmd_educate)

    p_cmp = sub.add_parser("compare", help="static vs guided search statistics as CSV")
    _add_kb_flags(p_cmp)
    _add_encoding_flags(p_cmp)
    p_cmp.add_argument("--model", help="trained model used by the guided policy")
    p_cmp.add_argument("--goals", required=True, help="file with one goal per line")
    p_cmp.add_argument("--depth-limit", type=int, dest="depth_limit")
    p_cmp.add_argument("--node-budget", type=int, dest="node_budget")
    p_cmp.add_argument("--out", help="also write the CSV (and a chart) to this path")
    p_cmp.add_argument("--no-occurs-check", dest="occurs_check", action="store_false",
                       default=None)
    p_cmp.add_argument("--figures", dest="figures", action="store_true", default=None)
    p_cmp.add_argument("--no-figures", dest="figures", action="store_false", default=None)
    p_cmp.set_defaults(func=cmd_compare)

    p_init = sub.add_parser("init-model", help="write a freshly initialised model")
    _add_kb_flags(p_init)
    _add_encoding_flags(p_init)
    p_init.add_argument("--model", help="output model path")
    p_init.add_argument("--hidden-dims", dest="hidden_dims")
    p_init.add_argument("--activation", choices=["sigmoid", "tanh", "relu", "linear"])
    p_init.add_argument("--scale", type=float)
    p_init.add_argument("--seed", type=int)
    p_init.set_defaults(func=cmd_init_model)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CliError, ParseError, EncodingError, EducationError, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
