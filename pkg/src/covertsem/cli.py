"""Command line entry point: ``covertsem {sweep,train,eval,oracle,bleu-curve}``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .baselines import GridSearchOracle, sweep_csv, sweep_transmit_power
from .config import ConfigError, RunConfig, echo_config, load_config, reference_config
from .env import CovertSemComEnv
from .sac import DeterministicActor, SACPowerController, evaluate
from .semcom import mean_bleu_at_bep

logger = logging.getLogger("covertsem")

COMMANDS = ("sweep", "train", "eval", "oracle", "bleu-curve")


def _header(cfg: RunConfig, seed: int, command: str) -> list[str]:
    return [f"command={command}", f"seed={seed}", f"config_hash={cfg.digest()}"]


def _write_csv(path: Path, header_lines, columns, rows) -> None:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else repr(float(v)) if isinstance(v, float) else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _make_env(cfg: RunConfig, out: Path) -> CovertSemComEnv:
    env_cfg = cfg.env_obj()
    if env_cfg.use_lookup and env_cfg.lookup_cache is None:
        e = cfg.env
        key = hashlib.sha256(repr((e.corpus_path, e.lookup_trials, e.bleu)).encode()).hexdigest()[:12]
        env_cfg = replace(env_cfg, lookup_cache=str(out / f"bleu_lookup_{key}.csv"))
    return CovertSemComEnv(env_cfg)


def cmd_sweep(cfg: RunConfig, seed: int, out: Path) -> int:
    sw = cfg.sweep
    grid = np.arange(sw.p_t_min_dbw, sw.p_t_max_dbw + sw.p_t_step_db / 2, sw.p_t_step_db)
    rows = sweep_transmit_power(_make_env(cfg, out), grid, sw.p_j_dbw, sw.draws, seed)
    (out / "sweep.csv").write_text(sweep_csv(rows, _header(cfg, seed, "sweep")), encoding="utf-8")
    if sw.chart:
        from .plots import sweep_chart

        sweep_chart(rows, out / "sweep.svg")
    print(f"wrote {len(rows)} rows to {out / 'sweep.csv'}")
    return 0


def cmd_oracle(cfg: RunConfig, seed: int, out: Path) -> int:
    env = _make_env(cfg, out)
    c = env.cfg
    step = cfg.oracle.step_db
    pt = np.arange(c.p_t_bounds_dbw[0], c.p_t_bounds_dbw[1] + step / 2, step)
    pj = np.arange(c.p_j_bounds_dbw[0], c.p_j_bounds_dbw[1] + step / 2, step)
    oracle = GridSearchOracle(pt, pj, cfg.oracle.draws, seed).fit(env)
    best = oracle.best_
    header = _header(cfg, seed, "oracle") + [
        f"best_p_t_dbw={best.p_t_dbw!r}", f"best_p_j_dbw={best.p_j_dbw!r}", f"best_reward={best.mean_reward!r}"
    ]
    (out / "oracle.csv").write_text(sweep_csv(oracle.table_, header), encoding="utf-8")
    print(f"best action P_t={best.p_t_dbw} dBW P_j={best.p_j_dbw} dBW reward={best.mean_reward:.6f}")
    return 0


def cmd_bleu_curve(cfg: RunConfig, seed: int, out: Path) -> int:
    env = _make_env(cfg, out)
    bc = cfg.bleu_curve
    rows = []
    for bep in bc.beps:
        rng = np.random.default_rng(seed)
        rows.append((float(bep), mean_bleu_at_bep(bep, env.corpus, bc.trials, env.cfg.bleu, rng, env.codebook)))
    _write_csv(out / "bleu_curve.csv", _header(cfg, seed, "bleu-curve"), ("bep", "mean_bleu"), rows)
    print(f"wrote {len(rows)} rows to {out / 'bleu_curve.csv'}")
    return 0


def _estimator(cfg: RunConfig, seed: int) -> SACPowerController:
    return SACPowerController(
        **cfg.sac.model_dump(),
        episodes=cfg.run.episodes,
        eval_every=cfg.run.eval_every,
        eval_episodes=cfg.run.eval_episodes,
        random_state=seed,
    )


def cmd_train(cfg: RunConfig, seed: int, out: Path) -> int:
    env = _make_env(cfg, out)
    est = _estimator(cfg, seed).fit(env)
    rows = [(p.episode, p.mean_reward, p.eval_reward) for p in est.learning_curve_]
    _write_csv(out / "learning_curve.csv", _header(cfg, seed, "train"), ("episode", "mean_reward", "eval_reward"), rows)
    est.save(out / "checkpoint.npz", meta={"seed": seed, "config_hash": cfg.digest()})
    if rows:
        from .plots import learning_chart

        learning_chart(est.learning_curve_, out / "learning_curve.svg")
        print(f"final eval reward {rows[-1][2]!r}")
    return 0


def cmd_eval(cfg: RunConfig, seed: int, out: Path, checkpoint: Path | None) -> int:
    path = checkpoint if checkpoint is not None else out / "checkpoint.npz"
    if not path.is_file():
        print(f"error: checkpoint not found: {path}", file=sys.stderr)
        return 2
    est = SACPowerController.load(path)
    env = _make_env(cfg, out)
    score = evaluate(DeterministicActor(est.policy_), env, cfg.run.eval_episodes, seed)
    _write_csv(out / "eval.csv", _header(cfg, seed, "eval"), ("episodes", "mean_reward"), [(cfg.run.eval_episodes, score)])
    print(f"mean reward {score!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="covertsem", description=__doc__)
    p.add_argument("command", choices=COMMANDS + ("reference-config",))
    p.add_argument("--config", type=Path, default=None, help="TOML run configuration")
    p.add_argument("--seed", type=int, default=None, help="overrides run.seed")
    p.add_argument("--out", type=Path, default=None, help="overrides run.output_dir")
    p.add_argument("--checkpoint", type=Path, default=None, help="eval only; default <out>/checkpoint.npz")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "reference-config":
        sys.stdout.write(reference_config())
        return 0
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    seed = cfg.run.seed if args.seed is None else args.seed
    if not 0 <= seed < 2**64:
        print("error: seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    out = Path(cfg.run.output_dir) if args.out is None else args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
        echo_config(cfg, out)
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
        return 2
    if args.command == "sweep":
        return cmd_sweep(cfg, seed, out)
    if args.command == "oracle":
        return cmd_oracle(cfg, seed, out)
    if args.command == "bleu-curve":
        return cmd_bleu_curve(cfg, seed, out)
    if args.command == "train":
        return cmd_train(cfg, seed, out)
    return cmd_eval(cfg, seed, out, args.checkpoint)


if __name__ == "__main__":
    raise SystemExit(main())
