"""Matplotlib figures: configuration diagrams and experiment summaries.

Figures are returned as bytes so callers can write them atomically. SVG
output carries no date and uses a fixed hash salt, so it is reproducible.
"""

from __future__ import annotations

import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Arc  # noqa: E402

from .pingpong import PingPongConfig, validate  # noqa: E402

_SVG_META = {"Date": None, "Creator": "circorder"}


def _save(fig, fmt: str) -> bytes:
    buf = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": "circorder", "svg.fonttype": "none"}):
        meta = _SVG_META if fmt == "svg" else None
        fig.savefig(buf, format=fmt, metadata=meta)
    plt.close(fig)
    return buf.getvalue()


def slot_label(cfg: PingPongConfig, i: int) -> str:
    s = cfg.slots[i]
    if s.is_basepoint:
        return "$x_0$"
    name = s.label(with_index=False)
    if cfg.count(s.letter) > 1:
        tag = f"sheet {s.index}" if cfg.lift is not None else f"#{s.index}"
        return f"{name} {tag}"
    return name


def render_config(cfg: PingPongConfig, fmt: str = "svg") -> bytes:
    """Circle with one labeled arc per component slot, counterclockwise in the
    configuration's order starting at the basepoint (drawn at angle 0)."""
    rep = validate(cfg)
    if not rep.ok:
        raise ValueError(str(rep))
    n = len(cfg.slots)
    b = cfg.basepoint_slot
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, color="0.7", lw=1))
    cmap = plt.get_cmap("tab10")
    for i, s in enumerate(cfg.slots):
        r = (i - b) % n
        center = 360.0 * r / n
        if s.is_basepoint:
            ax.plot([1.0], [0.0], "ko", ms=6)
            ax.annotate("$x_0$", (1.12, 0.0), ha="left", va="center")
            continue
        half = 360.0 / n * 0.3
        color = cmap((abs(s.letter) - 1) % 10)
        style = "-" if s.letter > 0 else "--"
        arc = Arc((0, 0), 2, 2, theta1=center - half, theta2=center + half, color=color, lw=5, ls=style)
        ax.add_patch(arc)
        t = math.radians(center)
        ax.annotate(slot_label(cfg, i), (1.25 * math.cos(t), 1.25 * math.sin(t)), ha="center", va="center", fontsize=9)
    ax.set_xlim(-1.6, 1.6)
    ax.set_ylim(-1.6, 1.6)
    ax.set_aspect("equal")
    ax.axis("off")
    title = cfg.name or "ping-pong configuration"
    ax.set_title(title)
    return _save(fig, fmt)


def render_report(report, fmt: str = "svg") -> bytes:
    """Bar chart of the main arm and every control arm of an experiment."""
    labels = ["main: passed", "main: failed"]
    values = [report.passed, report.failed]
    for name, arm in sorted(report.arms.items()):
        for key in ("disagreements", "changed"):
            if key in arm:
                labels.append(f"{name.split(' ')[0]}: {key}")
                values.append(arm[key])
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.barh(range(len(values)), values, color=["tab:green", "tab:red"] + ["tab:gray"] * (len(values) - 2))
    ax.set_yticks(range(len(values)))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("trials")
    s = report.spec
    ax.set_title(f"{s.experiment} (seed {s.seed}, radius {s.radius})")
    fig.tight_layout()
    return _save(fig, fmt)
