"""Static SVG line charts for the sweep and learning-curve artifacts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "covertsem"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def sweep_chart(rows, path) -> None:
    p_t = [r.p_t_dbw for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(p_t, [r.mean_covert_rate for r in rows], "o-", label="covert rate (bit/s/Hz)")
    ax.set_xlabel("transmit power (dBW)")
    ax.set_ylabel("covert rate")
    ax2 = ax.twinx()
    ax2.plot(p_t, [r.mean_dep for r in rows], "s--", color="tab:red", label="DEP")
    ax2.plot(p_t, [r.mean_bep for r in rows], "^:", color="tab:green", label="BEP")
    ax2.set_ylabel("probability")
    ax2.set_ylim(-0.02, 1.02)
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], loc="center left")
    ax.set_title(f"P_j = {rows[0].p_j_dbw:g} dBW")
    _save(fig, path)


def learning_chart(curve, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p.episode for p in curve], [p.mean_reward for p in curve], label="episode mean reward")
    ev = [p for p in curve if p.eval_reward is not None]
    ax.plot([p.episode for p in ev], [p.eval_reward for p in ev], "o-", label="deterministic eval")
    ax.set_xlabel("episode")
    ax.set_ylabel("reward")
    ax.legend()
    _save(fig, path)
