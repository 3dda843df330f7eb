"""``softq`` command line.

Exit codes: 0 success, 2 configuration or usage error, 3 data error,
4 training divergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from softq import analysis
from softq.bench import SUITES, format_suite, run_suite, write_suite_csv
from softq.config import ConfigError, ExperimentConfig, load_config
from softq.data.mnist import MnistFormatError, fetch_mnist
from softq.experiments import DataError, ENGINES, data_root, evaluate, load_datasets, noise_policy, run_experiment
from softq.noise.channels import Channel
from softq.noise.sweep import format_table, noise_sweep, write_sweep_csv
from softq.qcore import EulerUnitary, ry
from softq.training.record import RunRecord, TrainingDiverged

EXIT_CONFIG, EXIT_DATA, EXIT_DIVERGED = 2, 3, 4
log = logging.getLogger("softq")


class UsageError(ValueError):
    pass


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(seed=args.seed, out=args.out)


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _train(cfg: ExperimentConfig, out: Path) -> RunRecord:
    train, test = load_datasets(cfg)
    rec = run_experiment(cfg, train, test)
    rec.save(out)
    return rec


def _checkpoint(cfg: ExperimentConfig, args) -> RunRecord:
    path = Path(args.checkpoint) if getattr(args, "checkpoint", None) else Path(cfg.out) / "run.json"
    if path.exists():
        return RunRecord.load(path)
    if getattr(args, "checkpoint", None):
        raise UsageError(f"checkpoint {path} does not exist")
    print(f"no checkpoint at {path}; training first")
    return _train(cfg, _out_dir(cfg))


def cmd_train(args) -> int:
    cfg = _config(args)
    rec = _train(cfg, _out_dir(cfg))
    print(f"{cfg.task}/{cfg.model} seed {cfg.seed}: train accuracy {rec.final_train_acc:.2%}, "
          f"test accuracy {rec.final_test_acc:.2%}")
    print(f"wrote {cfg.out}/run.json, run_metrics.csv" + (", run_topology.json" if rec.model == "soft" else ""))
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    rec = _checkpoint(cfg, args)
    _, test = load_datasets(cfg)
    seed = cfg.seed if args.seed is None else args.seed
    acc = evaluate(rec, test, engine=args.engine, noise=noise_policy(cfg.eval_noise),
                   shots=args.shots or 10000, seed=seed)
    report = {"engine": args.engine, "shots": (args.shots or 10000) if args.engine == "trajectory" else None,
              "noise": cfg.eval_noise.model_dump(), "test_accuracy": acc, "n_test": len(test)}
    (_out_dir(cfg) / f"eval_{args.engine}.json").write_text(json.dumps(report, indent=1))
    print(f"test accuracy ({args.engine}): {acc:.2%}")
    return 0


def _parse_probs(text: str | None, default):
    if text is None:
        return list(default)
    try:
        probs = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"--probs must be comma-separated numbers, got {text!r}") from None
    if not probs:
        raise UsageError("--probs is empty")
    if any(not 0 <= p <= 0.5 for p in probs):
        raise UsageError("flip probabilities must lie in [0, 0.5]")
    return probs


def cmd_sweep(args) -> int:
    cfg = _config(args)
    sw = cfg.sweep
    probs = _parse_probs(args.probs, sw.probs)
    if args.channel is None or args.channel == "all":
        channels = list(sw.channels)
    else:
        try:
            channels = [Channel.parse(c).value for c in args.channel.split(",")]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if "none" in channels:
            raise UsageError("sweep needs a flip channel, not 'none'")
    rec = _checkpoint(cfg, args)
    if rec.model != "soft":
        raise UsageError("noise sweeps apply to soft quantum networks only")
    net = rec.topology()
    _, test = load_datasets(cfg)
    stochastic = sw.stochastic_realization or args.engine == "trajectory"
    rows = []
    for ch in channels:
        rows += noise_sweep(net, test, ch, probs, sw.repetitions, cfg.seed, sw.injection, stochastic,
                            args.shots or sw.shots, args.threads)
    out = _out_dir(cfg)
    write_sweep_csv(rows, out / "sweep.csv")
    table = format_table(rows)
    (out / "sweep.txt").write_text(table + "\n")
    print(table)
    return 0


def _floats(text: str, n: int, name: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{name} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"{name} must have {n} values, got {len(vals)}")
    return vals


def cmd_analyze(args) -> int:
    if args.what == "discord":
        if not 0 <= args.p1 <= 1:
            raise UsageError("--p1 must lie in [0, 1]")
        psi = ry(args.rho2_theta)[:, 0]
        rho2 = np.outer(psi, psi.conj())
        w = EulerUnitary(*_floats(args.w, 3, "--w"))
        state = analysis.build_cq_state(args.p1, rho2, w)
        desc = {"p1": args.p1, "rho2_theta": args.rho2_theta, "w": list(w.angles())}
        report = analysis.discord_report(state, desc)
    else:
        rng = np.random.default_rng(0 if args.seed is None else args.seed)
        report = analysis.deferred_equivalence_check(*analysis.random_deferred_inputs(rng)).to_dict()
        report["seed"] = 0 if args.seed is None else args.seed
    out = Path(args.out or "runs/analysis")
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(report, indent=1)
    (out / f"{args.what}.json").write_text(text + "\n")
    print(text)
    return 0


def cmd_bench(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown bench suite {args.suite!r}; choose from {', '.join(SUITES)}")
    header, rows = run_suite(args.suite, 0 if args.seed is None else args.seed)
    out = Path(args.out or "runs/bench")
    out.mkdir(parents=True, exist_ok=True)
    write_suite_csv(header, rows, out / f"{args.suite}.csv")
    print(format_suite(header, rows))
    return 0


def cmd_fetch_mnist(args) -> int:
    dest = Path(args.out) if args.out else data_root()
    files = fetch_mnist(dest)
    for name, path in files.items():
        print(f"{name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="softq", description="Train and probe soft quantum neural networks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="config file or bundled name (xor, circles, moons, mnist)")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--engine", choices=ENGINES, default="meanfield")
        sp.add_argument("--shots", type=int, default=None)

    sp = sub.add_parser("train", help="train a model from a config")
    common(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="evaluate a trained model")
    common(sp)
    sp.add_argument("--checkpoint", default=None, help="run.json to evaluate (default: <out>/run.json)")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("sweep", help="accuracy versus flip probability")
    common(sp)
    sp.add_argument("--checkpoint", default=None)
    sp.add_argument("--channel", default=None, help="bit_flip, phase_flip, bit_phase_flip, a comma list, or all")
    sp.add_argument("--probs", default=None, help="comma-separated flip probabilities")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("analyze", help="discord or deferred-measurement reports")
    sp.add_argument("what", choices=("discord", "deferred"))
    common(sp, config=False)
    sp.add_argument("--p1", type=float, default=0.5, help="probability that neuron 1 reads 0")
    sp.add_argument("--rho2-theta", type=float, default=0.0, help="neuron 2 starts in Ry(theta)|0>")
    sp.add_argument("--w", default=f"{np.pi / 2!r},0,0", help="controlled gate as theta,phi,lam")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("bench", help="model-by-dataset accuracy grid")
    sp.add_argument("suite", help="nonlinear or mnist-pairs")
    common(sp, config=False)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("fetch-mnist", help="place MNIST IDX files under $SOFTQ_DATA_DIR")
    common(sp, config=False)
    sp.set_defaults(func=cmd_fetch_mnist)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.shots is not None and args.shots < 1:
        parser.error("--shots must be positive")
    if args.threads < 1:
        parser.error("--threads must be positive")
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, MnistFormatError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TrainingDiverged as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
