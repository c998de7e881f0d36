"""Command-line entry points: run experiments, generate tasks, learn, label, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import PredicateVocabulary, parse_dataset
from .dsl import parse_ruleset, print_ruleset
from .evaluate import assign_label
from .harness import ExperimentConfig, load_inputs, metrics_csv, metrics_jsonl, run_loop
from .learn import learn_ruleset
from .synth import GeneratorSpec, write_task


def _load_dataset(path: str, vocab_path: str | None):
    vocab = None
    if vocab_path:
        vocab = PredicateVocabulary.from_json(Path(vocab_path).read_text())
    return parse_dataset(Path(path).read_text(), vocab)


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json(Path(args.config).read_text())
    dataset, gold = load_inputs(config)
    seeds = [args.seed] if args.seed is not None else list(config.seeds)
    out_root = Path(args.out) if args.out else None
    for seed in seeds:
        metrics, rules = run_loop(dataset, gold, config, seed)
        if out_root is not None:
            out = out_root if len(seeds) == 1 else out_root / f"seed-{seed}"
            out.mkdir(parents=True, exist_ok=True)
            (out / "metrics.jsonl").write_text(metrics_jsonl(metrics))
            (out / "summary.csv").write_text(metrics_csv(metrics))
            (out / "rules.dsl").write_text(print_ruleset(rules) + "\n")
        final = metrics[-1]
        acc = "n/a" if final.test_accuracy is None else f"{final.test_accuracy:.4f}"
        print(f"seed {seed}: {len(metrics) - 1} iterations, test accuracy {acc}")
    return 0


def _cmd_gen(args) -> int:
    spec = GeneratorSpec.from_json(Path(args.spec).read_text())
    dataset, _ = write_task(spec, args.out)
    print(f"wrote {len(dataset.records)} records to {args.out}")
    return 0


def _cmd_learn(args) -> int:
    dataset = _load_dataset(args.data, args.vocab)
    rules = learn_ruleset(dataset.records, dataset.labels, vocab=dataset.vocabulary)
    text = print_ruleset(rules) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_label(args) -> int:
    dataset = _load_dataset(args.data, args.vocab)
    rules = parse_ruleset(Path(args.rules).read_text(), dataset.vocabulary)
    lines = []
    for record in dataset.records:
        decision = assign_label(record, rules, dataset.vocabulary)
        lines.append(
            json.dumps(
                {
                    "id": record.id,
                    "label": decision.assigned,
                    "satisfied": list(decision.satisfied_labels),
                    "csr": decision.per_rule_csr,
                    "tie_broken": decision.tie_broken,
                },
                sort_keys=True,
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    app = create_app(args.sessions)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rapid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("gen", help="generate a synthetic task from a generator spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("learn", help="learn rules from a labeled dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--vocab", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("label", help="label a dataset with a rule file")
    p.add_argument("--data", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--vocab", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_label)

    p = sub.add_parser("serve", help="serve the session API")
    p.add_argument("--addr", default="127.0.0.1:8765")
    p.add_argument("--sessions", default="./sessions")
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
