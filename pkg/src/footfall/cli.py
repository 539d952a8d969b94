"""Command-line entry point: ``footfall <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from footfall import experiments as ex
from footfall import storage
from footfall.layout_ga import GAParams, evolve, grid_pool
from footfall.patterns import CorpusConfig, generate_corpus, train_test_split, visitors_for_total_visits
from footfall.recommender import evaluate, evaluate_bounded, exact_match_rate, reconstruct, score
from footfall.transition import train


class ValidationError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def default_threads() -> int:
    env = os.environ.get("FOOTFALL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"FOOTFALL_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _emit(payload: dict, out, timestamp: bool) -> None:
    if out:
        storage.write_json(out, payload, timestamp)
    else:
        print(json.dumps(payload, sort_keys=True))


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> None:
    n_visitors = args.visitors
    if args.total_visits is not None:
        n_visitors = visitors_for_total_visits(args.total_visits, args.walk_min, args.walk_max, args.noise)
    if n_visitors is None:
        raise ValidationError("one of --visitors or --total-visits is required")
    config = CorpusConfig(n_activities=args.activities, n_visitors=n_visitors,
                          walk_length_min=args.walk_min, walk_length_max=args.walk_max,
                          noise_factor=args.noise, seed=args.seed, out_degree=args.out_degree)
    corpus = generate_corpus(config, threads=args.threads)
    storage.save_corpus(corpus, args.out, args.timestamp)


def cmd_train(args) -> None:
    corpus = storage.load_corpus(args.corpus)
    storage.save_model(train(corpus), args.out, args.timestamp)


def _params(args) -> GAParams:
    return GAParams(population_size=args.pop, generations=args.gens,
                    crossover_chance=args.crossover, mutation_chance=args.mutation,
                    elite_count=args.elite, tournament_size=args.tournament, seed=args.seed)


def cmd_optimize(args) -> None:
    model = storage.load_model(args.model)
    pool = grid_pool(model.n, args.grid_side)
    trace = evolve(model.W, pool, _params(args))
    storage.write_json(args.out, storage.layout_to_dict(trace.best_layout, pool, trace.best_fitness),
                       args.timestamp)
    if args.trace:
        ex.write_trace_csv(trace, args.trace)


def cmd_recommend(args) -> None:
    model = storage.load_model(args.model)
    recs = reconstruct(model, args.history, args.cut, args.window, args.ratio, args.exclude_visited)
    running = list(args.history)
    scores = []
    for r in recs:
        context = running[-args.window:] if args.window else []
        scores.append(float(score(model, context, args.ratio)[r]))
        running.append(r)
    _emit({"history": args.history, "recommendations": recs, "scores": scores}, args.out, False)


def cmd_evaluate(args) -> None:
    a, b = args.original, args.recommended
    _emit({"evaluation": evaluate(a, b), "evaluation_bounded": evaluate_bounded(a, b),
           "exact_match": exact_match_rate(a, b)}, args.out, False)


def _load_config(path, allowed: set[str], required: tuple[str, ...]) -> dict:
    cfg = storage.read_json(path)
    cfg.pop("format_version", None)
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ValidationError(f"{path}: missing config key(s): {', '.join(missing)}")
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ValidationError(f"{path}: unknown config key(s): {', '.join(unknown)}")
    base = Path(path).parent
    for key in ("model", "corpus"):
        if key in cfg:
            cfg[key] = str(base / cfg[key])
    return cfg


_GA_KEYS = {f.name for f in fields(GAParams)}


def _ga_from_config(cfg: dict, seed) -> GAParams:
    kwargs = {k: cfg[k] for k in _GA_KEYS if k in cfg}
    if seed is not None:
        kwargs["seed"] = seed
    return GAParams(**kwargs)


def _write_outputs(out_dir: Path, grid: ex.ExperimentGrid, stem: str, timestamp: bool, **extra) -> None:
    ex.export_grid(grid, out_dir / f"{stem}.csv")
    ex.export_grid(grid, out_dir / f"{stem}_stddev.csv", "stddev")
    for name in grid.extras:
        ex.export_grid(grid, out_dir / f"{stem}_{name}.csv", name)
    storage.write_json(out_dir / f"{stem}_summary.json", {**grid.summary(), **extra}, timestamp)


def cmd_sweep_ga(args) -> None:
    cfg = _load_config(args.config, _GA_KEYS | {"model", "crossover_values", "mutation_values",
                                                "repeats", "grid_side"}, ("model",))
    model = storage.load_model(cfg["model"])
    base = _ga_from_config(cfg, args.seed)
    spec = ex.SweepSpec(tuple(cfg.get("crossover_values", ex.DEFAULT_CROSSOVER)),
                        tuple(cfg.get("mutation_values", ex.DEFAULT_MUTATION)),
                        int(cfg.get("repeats", 3)), base)
    pool = grid_pool(model.n, cfg.get("grid_side"))
    grid = ex.run_ga_sweep(spec, model.W, pool, threads=args.threads)
    _write_outputs(Path(args.out_dir), grid, "ga_sweep", args.timestamp)


def cmd_compare_random(args) -> None:
    cfg = _load_config(args.config, _GA_KEYS | {"model", "repeats", "grid_side"}, ("model",))
    model = storage.load_model(cfg["model"])
    params = _ga_from_config(cfg, args.seed)
    pool = grid_pool(model.n, cfg.get("grid_side"))
    pairs = ex.run_ga_vs_random(model.W, pool, params, int(cfg.get("repeats", 10)), threads=args.threads)
    out = Path(args.out_dir)
    for k, pair in enumerate(pairs):
        ex.write_trace_csv(pair.ga, out / f"trace_ga_r{k}.csv")
        ex.write_trace_csv(pair.random, out / f"trace_random_r{k}.csv")
    ga = [p.ga.best_fitness for p in pairs]
    rnd = [p.random.best_fitness for p in pairs]
    storage.write_json(out / "compare_summary.json", {
        "repeats": len(pairs),
        "seeds": [p.seed for p in pairs],
        "ga_final": ga,
        "random_final": rnd,
        "ga_mean": float(np.mean(ga)), "ga_stddev": float(np.std(ga)),
        "random_mean": float(np.mean(rnd)), "random_stddev": float(np.std(rnd)),
        "ga_wins": int(sum(g > r for g, r in zip(ga, rnd))),
    }, args.timestamp)


def cmd_sweep_recommend(args) -> None:
    cfg = _load_config(args.config, {"corpus", "model", "cut_values", "window_values", "ratio",
                                     "test_fraction", "seed"}, ("corpus",))
    corpus = storage.load_corpus(cfg["corpus"])
    patterns = corpus.patterns
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if "model" in cfg:
        model = storage.load_model(cfg["model"])
    elif cfg.get("test_fraction"):
        train_part, test_part = train_test_split(corpus, float(cfg["test_fraction"]), seed)
        model, patterns = train(train_part), test_part.patterns
    else:
        model = train(corpus)
    grid = ex.run_recommendation_grid(patterns, model, list(cfg.get("cut_values", [1, 2, 3])),
                                      list(cfg.get("window_values", [0, 1, 2, 3])),
                                      float(cfg.get("ratio", 2.0)), threads=args.threads)
    _write_outputs(Path(args.out_dir), grid, "recommend_grid", args.timestamp,
                   n_patterns=len(patterns))


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $FOOTFALL_THREADS or CPU count); "
                             "results do not depend on it")
    common.add_argument("--no-timestamp", dest="timestamp", action="store_false",
                        help="omit the 'created' field from JSON outputs")

    parser = argparse.ArgumentParser(prog="footfall", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", parents=[common], help="synthesize a visitor-pattern corpus")
    p.add_argument("--activities", type=int, required=True, help="number of activities")
    p.add_argument("--visitors", type=int, help="number of visitor patterns")
    p.add_argument("--total-visits", type=int, help="pick the visitor count to hit this many visits")
    p.add_argument("--noise", type=float, default=0.1, help="noise factor in [0, 1]")
    p.add_argument("--walk-min", type=int, default=4, help="shortest walk length")
    p.add_argument("--walk-max", type=int, default=12, help="longest walk length")
    p.add_argument("--out-degree", type=int, default=3, help="planted successors per activity")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", required=True, help="corpus JSON path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", parents=[common], help="build W, P and priors from a corpus")
    p.add_argument("--corpus", required=True, help="corpus JSON path")
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("optimize", parents=[common], help="run the layout GA")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--pop", type=int, default=100, help="population size")
    p.add_argument("--gens", type=int, default=5000, help="generations")
    p.add_argument("--crossover", type=float, default=0.1, help="crossover chance")
    p.add_argument("--mutation", type=float, default=0.4, help="mutation chance (<= 0.5)")
    p.add_argument("--elite", type=int, default=2, help="elites copied per generation")
    p.add_argument("--tournament", type=int, default=3, help="tournament size")
    p.add_argument("--grid-side", type=int, default=None, help="grid side (default ceil(sqrt(2n)))")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", required=True, help="best layout JSON path")
    p.add_argument("--trace", help="CSV of generation,best_fitness")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("recommend", parents=[common], help="recommend the next visits")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--history", type=_int_list, required=True, help="comma-separated 0-based ids, oldest first")
    p.add_argument("--cut", type=int, default=1, help="number of visits to recommend")
    p.add_argument("--window", type=int, default=3, help="history entries used per step")
    p.add_argument("--ratio", type=float, default=2.0, help="weight ratio between consecutive visits")
    p.add_argument("--exclude-visited", action="store_true", help="never recommend a visited activity")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("evaluate", parents=[common], help="score a reconstructed tail")
    p.add_argument("--original", type=_int_list, required=True, help="comma-separated 0-based ids")
    p.add_argument("--recommended", type=_int_list, required=True, help="comma-separated 0-based ids")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_evaluate)

    for name, func, helptext in [
        ("sweep-ga", cmd_sweep_ga, "GA crossover x mutation sweep"),
        ("compare-random", cmd_compare_random, "GA vs random-swap baseline"),
        ("sweep-recommend", cmd_sweep_recommend, "recommendation cut x window grid"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out-dir", required=True, help="directory for CSV grids and the JSON summary")
        p.add_argument("--seed", type=int, default=None, help="override the config's master seed")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is None:
            args.threads = default_threads()
        if args.threads < 1:
            raise ValidationError(f"--threads must be >= 1, got {args.threads}")
        args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"footfall {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as exc:
        print(f"footfall {args.command}: invalid input: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
