"""Matplotlib figures for homothet solutions and the Davenport comparison.

Figures are built on a bare ``Figure`` (no pyplot state). SVG output is
byte-stable: the hash salt is fixed, text is kept as ``<text>`` elements and
the date/creator metadata is dropped.
"""

import functools
import io
import math

import matplotlib
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
import numpy as np

from .geometry import LinearImage, LpBall, davenport_comparison, gauge

STYLE = {
    "svg.hashsalt": "planks",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
}
METADATA = {"Date": None, "Creator": None}


def _styled(builder):
    @functools.wraps(builder)
    def wrapper(*args, **kwargs):
        with matplotlib.rc_context(STYLE):
            return builder(*args, **kwargs)
    return wrapper


def body_outline(body, samples=720):
    """Closed boundary polygon of a 2-D body (corners of l_1 / l_inf balls included)."""
    if body.dim != 2:
        raise ValueError("outline needs a 2-D body")
    t = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    U = np.stack([np.cos(t), np.sin(t)], axis=1)
    base = body
    while isinstance(base, LinearImage):
        base = base.base
    if not isinstance(base, LpBall):
        raise ValueError(f"unsupported body {body!r}")
    pts = np.array([u / gauge(base, u) for u in U])
    M = np.eye(2)
    b = body
    while isinstance(b, LinearImage):
        M = M @ b.map
        b = b.base
    pts = pts @ M.T
    return np.vstack([pts, pts[:1]])


@_styled
def homothet_figure(body, hyperplanes, result):
    """Body, hyperplanes, the shaded homothet and per-hyperplane margins."""
    outline = body_outline(body)
    half = np.abs(outline).max(axis=0)
    pad = 0.15 * half.max()
    fig = Figure(figsize=(5.0, 5.0))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(outline[:, 0], outline[:, 1], color="black", label="body")
    small = result.center + result.ratio * outline
    ax.fill(small[:, 0], small[:, 1], color="tab:blue", alpha=0.35,
            label=f"x + C/{len(hyperplanes) + 1}")
    ax.plot(small[:, 0], small[:, 1], color="tab:blue", linewidth=0.8)
    ax.plot([result.center[0]], [result.center[1]], marker="o", markersize=3,
            color="tab:blue")
    for i, h in enumerate(hyperplanes):
        nn = h.normal @ h.normal
        p0 = h.offset * h.normal / nn
        direction = np.array([-h.normal[1], h.normal[0]])
        ax.axline(tuple(p0), tuple(p0 + direction), color="tab:red", linewidth=0.9)
        foot = result.center - (h.normal @ result.center - h.offset) * h.normal / nn
        ax.annotate(f"{result.margins[i]:.4f}", xy=tuple(foot), fontsize=7,
                    color="tab:red", xytext=(3, 3), textcoords="offset points")
    ax.set_xlim(-half[0] - pad, half[0] + pad)
    ax.set_ylim(-half[1] - pad, half[1] + pad)
    ax.set_aspect("equal")
    ax.set_title(f"{len(hyperplanes)} hyperplanes, ratio {result.ratio:.6g}")
    # below the axes, so it never hides the homothet
    ax.legend(loc="upper center", bbox_to_anchor=(0.5, -0.07), ncol=2, fontsize=7,
              frameon=False)
    return fig


@_styled
def davenport_figure(k):
    ns = np.arange(0, k + 1)
    pairs = np.array([davenport_comparison(int(n)) for n in ns])
    fig = Figure(figsize=(5.0, 3.5))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(1, 1, 1)
    ax.semilogy(ns, pairs[:, 0], marker="s", markersize=3, label="cube pigeonhole 2^-n")
    ax.semilogy(ns, pairs[:, 1], marker="o", markersize=3, label="homothet 1/(n+1)")
    ax.set_xlabel("number of hyperplanes n")
    ax.set_ylabel("guaranteed scale factor")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(fig, fmt="svg"):
    """Figure bytes in the given format, deterministic for SVG."""
    buf = io.BytesIO()
    with matplotlib.rc_context(STYLE):
        fig.savefig(buf, format=fmt, metadata=METADATA if fmt in ("svg", "pdf") else None)
    return buf.getvalue()


def save(fig, path):
    fmt = str(path).rsplit(".", 1)[-1].lower() if "." in str(path) else "svg"
    with open(path, "wb") as fh:
        fh.write(render(fig, fmt))
