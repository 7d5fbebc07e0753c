"""Command-line front end.

Exit codes: 0 success, 1 usage or invalid parameters, 2 ``--assert-bounds``
failure, 3 budget refusal.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path

from . import __version__, bounds
from .experiments import DEFAULT_BUDGET, BudgetExceeded, ExperimentConfig, run_concentration, run_sweep
from .formats import FormatError, dumps_csv, dumps_json, dumps_sidecar, read_edgelist, to_jsonable, write_edgelist
from .generators import sample_drn, sample_swr, sample_sws
from .graph_core import MODES, PAPER, RoleAssignment
from .mincut import sT_capacity, st_capacity
from .models import DRN, SWR, SWS, TORUS, model_from_dict
from .seeding import fresh_seed

EXIT_OK, EXIT_USAGE, EXIT_ASSERT, EXIT_BUDGET = 0, 1, 2, 3

# flag dest -> key used in model dictionaries
MODEL_KEYS = {"n": "n", "k": "k", "p": "p", "rs": "rS", "rl": "rL", "metric": "metric"}
SWEEPABLE = ("n", "k", "p", "rs", "rl", "alpha", "d")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(path: str | None) -> dict[str, str]:
    """Flat ``key=value`` file; ``#`` starts a comment."""
    if not path:
        return {}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().lower().replace("-", "_")] = value.strip()
    return out


def resolve(args: argparse.Namespace) -> dict[str, str]:
    """Config file values overlaid by explicitly given flags."""
    merged = read_config(getattr(args, "config", None))
    for key, value in vars(args).items():
        if key in ("config", "func", "command") or value is None:
            continue
        merged[key] = value
    return merged


def _model_from(values: dict) -> object:
    kind = values.get("model")
    if kind is None:
        raise UsageError("no model given (sws, swr or drn)")
    data = {"model": kind}
    for flag, key in MODEL_KEYS.items():
        if flag in values:
            data[key] = values[flag]
    if str(kind).lower() == "drn":
        data.setdefault("metric", TORUS)
    try:
        return model_from_dict(data)
    except KeyError as exc:
        raise UsageError(f"missing model parameter --{exc.args[0].lower()}") from exc


def _seed(values: dict) -> int:
    seed = values.get("seed")
    return fresh_seed() if seed in (None, "") else int(seed)


def manifest(command: str, params: dict, seed: int | None = None, **extra) -> dict:
    out = {"tool": "cutbounds", "version": __version__, "command": command, "params": params}
    if seed is not None:
        out["seed"] = seed
    out.update(extra)
    return to_jsonable(out)


def _write_manifest(path: Path, man: dict) -> None:
    path.write_text(json.dumps(man, indent=2) + "\n")
    print("manifest: " + json.dumps(man, sort_keys=True))


def cmd_generate(args) -> int:
    values = resolve(args)
    model = _model_from(values)
    seed = _seed(values)
    out = Path(values.get("out") or f"{model.kind}.edges")
    files = [str(out)]
    if isinstance(model, SWS):
        g = sample_sws(model, seed)
    elif isinstance(model, SWR):
        g = sample_swr(model, seed)
    else:
        inst = sample_drn(model, seed)
        g = inst.graph
        side = out.with_name(out.name + ".nodes")
        side.write_text(dumps_sidecar(inst.positions, inst.in_vl))
        files.append(str(side))
    write_edgelist(g, out)
    _write_manifest(
        out.with_name(out.name + ".manifest.json"),
        manifest("generate", model.as_dict(), seed, files=files, edges=g.m),
    )
    return EXIT_OK


def _report(values: dict):
    model = _model_from(values)
    alpha = int(values.get("alpha", 1))
    d = values.get("d")
    return bounds.theorem_report(model, alpha, None if d in (None, "") else float(d))


def cmd_bounds(args) -> int:
    report = _report(resolve(args))
    row = report.as_dict()
    if args.csv:
        sys.stdout.write(dumps_csv([row]))
    else:
        print(dumps_json(row))
    return EXIT_OK


def _terminal_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in str(text).replace(",", " ").split())


def cmd_capacity(args) -> int:
    values = resolve(args)
    try:
        g = read_edgelist(values["graph"])
    except (OSError, FormatError) as exc:
        raise UsageError(f"cannot read graph: {exc}") from exc
    terms = values.get("terminals") or values.get("t")
    if terms is None:
        raise UsageError("give --t or --terminals")
    roles = RoleAssignment(g.n, int(values.get("s", 0)), _terminal_list(terms))
    mode = values.get("mode", PAPER)
    res = sT_capacity(g, roles, mode) if roles.alpha > 1 else st_capacity(g, roles, roles.terminals[0], mode)
    value = int(res.value) if g.is_unit else res.value
    print(f"capacity {value}")
    print(f"terminal {res.terminal}")
    print(f"mode {res.mode}")
    print("witness " + " ".join(str(i) for i in res.witness.sorted_members()))
    return EXIT_OK


def _experiment_config(values: dict, seed: int) -> ExperimentConfig:
    model = _model_from(values)
    policy = values.get("terminals")
    if policy not in (None, "antipodal", "random"):
        policy = _terminal_list(policy)
    d = values.get("d")
    return ExperimentConfig(
        model=model,
        trials=int(values.get("trials", 100)),
        master_seed=seed,
        alpha=int(values.get("alpha", 1)),
        d=None if d in (None, "") else float(d),
        mode=values.get("mode", PAPER),
        terminal_policy=policy,
        source=int(values.get("s", 0)),
        budget=int(values.get("budget", DEFAULT_BUDGET)),
    )


def _outputs(values: dict, default: str) -> Path:
    prefix = Path(values.get("out") or default)
    if prefix.parent and not prefix.parent.exists():
        prefix.parent.mkdir(parents=True)
    return prefix


def _check_assert(values: dict, results) -> int:
    if values.get("assert_bounds") and any(r.exceeds_bounds for r in results):
        print("assert-bounds: violation frequency exceeds the theoretical bound", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def cmd_experiment(args) -> int:
    values = resolve(args)
    seed = _seed(values)
    config = _experiment_config(values, seed)
    result = run_concentration(config, int(values.get("workers", 1)))
    prefix = _outputs(values, "experiment")
    man = manifest("experiment", config.model.as_dict(), seed, trials=config.trials)
    json_path, csv_path = prefix.with_suffix(".json"), prefix.with_suffix(".csv")
    json_path.write_text(dumps_json({"manifest": man, **result.as_dict()}) + "\n")
    csv_path.write_text(dumps_csv([result.summary()]))
    _write_manifest(prefix.with_suffix(".manifest.json"), {**man, "files": [str(json_path), str(csv_path)]})
    print(
        f"trials {result.trials} seed {seed} "
        f"lower_violations {result.lower_violations} upper_violations {result.upper_violations} "
        f"mean_ratio {result.mean_ratio:.6g} d_valid {result.report.d_valid}"
    )
    return _check_assert(values, [result])


def _split_grid(value) -> list[str]:
    return [v for v in str(value).replace(";", ",").split(",") if v.strip()]


def sweep_grid(values: dict) -> list[dict]:
    """Cartesian product over comma-separated values of the sweepable keys."""
    axes = {}
    for key in SWEEPABLE:
        if key in values:
            items = _split_grid(values[key])
            if not items:
                raise UsageError(f"empty sweep grid for --{key}")
            axes[key] = [v.strip() for v in items]
    keys = list(axes)
    points = []
    for combo in itertools.product(*(axes[k] for k in keys)):
        points.append({**values, **dict(zip(keys, combo))})
    return points


def cmd_sweep(args) -> int:
    values = resolve(args)
    seed = _seed(values)
    grid = [_experiment_config(point, seed) for point in sweep_grid(values)]
    if not grid:
        raise UsageError("empty sweep grid")
    rows = run_sweep(grid, seed, int(values.get("workers", 1)))
    prefix = _outputs(values, "sweep")
    man = manifest("sweep", {k: values[k] for k in ("model", *SWEEPABLE, "metric") if k in values}, seed, points=len(rows))
    json_path, csv_path = prefix.with_suffix(".json"), prefix.with_suffix(".csv")
    json_path.write_text(dumps_json({"manifest": man, "points": [r.result.as_dict() for r in rows]}) + "\n")
    csv_path.write_text(dumps_csv([r.summary() for r in rows]))
    _write_manifest(prefix.with_suffix(".manifest.json"), {**man, "files": [str(json_path), str(csv_path)]})
    for r in rows:
        s = r.summary()
        print(
            f"point {r.index} n {s['n']} epsilon {s['epsilon']:.6g} "
            f"lower_violations {s['lower_violations']} upper_violations {s['upper_violations']} "
            f"mean_ratio {s['mean_ratio']:.6g}"
        )
    return _check_assert(values, [r.result for r in rows])


def _model_flags(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    num = str if sweep else None
    p.add_argument("model", nargs="?", choices=("sws", "swr", "drn"), help="network family")
    p.add_argument("--n", type=num or int)
    p.add_argument("--k", type=num or int)
    p.add_argument("--p", type=num or float)
    p.add_argument("--rs", type=num or float, help="short radio range")
    p.add_argument("--rl", type=num or float, help="long radio range")
    p.add_argument("--metric", choices=("torus", "square"))
    p.add_argument("--config", help="flat key=value file; flags override it")


def _experiment_flags(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--trials", type=int)
    p.add_argument("--alpha", type=str if sweep else int)
    p.add_argument("--d", type=str if sweep else float)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--terminals", help="antipodal, random, or a comma-separated list")
    p.add_argument("--s", type=int, help="source for explicit terminals")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--budget", type=int, help="maximum n*trials per point")
    p.add_argument("--out", help="output prefix for .json/.csv/.manifest.json")
    p.add_argument("--assert-bounds", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cutbounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cutbounds {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    gen = sub.add_parser("generate", help="sample a graph and write an edge list")
    _model_flags(gen)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", help="edge-list path (sidecar and manifest are written next to it)")
    gen.set_defaults(func=cmd_generate)

    bnd = sub.add_parser("bounds", help="print the capacity bracket for a model")
    _model_flags(bnd)
    bnd.add_argument("--alpha", type=int)
    bnd.add_argument("--d", type=float)
    bnd.add_argument("--csv", action="store_true")
    bnd.set_defaults(func=cmd_bounds)

    cap = sub.add_parser("capacity", help="exact s-T capacity of an edge-list graph")
    cap.add_argument("graph")
    cap.add_argument("--s", type=int)
    cap.add_argument("--t", type=int)
    cap.add_argument("--terminals")
    cap.add_argument("--mode", choices=MODES)
    cap.set_defaults(func=cmd_capacity)

    exp = sub.add_parser("experiment", help="Monte Carlo check of the capacity bracket")
    _model_flags(exp)
    _experiment_flags(exp)
    exp.set_defaults(func=cmd_experiment)

    swp = sub.add_parser("sweep", help="experiments over a grid (comma-separated values)")
    _model_flags(swp, sweep=True)
    _experiment_flags(swp, sweep=True)
    swp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
