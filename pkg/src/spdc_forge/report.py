"""Figure rendering for CLI artifacts (written alongside the delimited output)."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .profiles import PhaseMatchCurve
from .optimize import ScanTable


def render_curve(curve: PhaseMatchCurve, path, title: str = "",
                 reference: PhaseMatchCurve | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    amp = np.abs(curve.amplitude)
    ax.plot(curve.dkz, amp / amp.max(), label="curve")
    if reference is not None:
        ref = np.abs(reference.amplitude)
        ax.plot(reference.dkz, ref / ref.max(), "--", label="target")
        ax.legend()
    ax.set_xlabel("detuning (rad/um)")
    ax.set_ylabel("|phi| (normalized)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_scan(table: ScanTable, path, title: str = "") -> None:
    names = list(table.axes)
    fig, ax = plt.subplots(figsize=(6, 4))
    if len(names) == 1:
        ax.plot(table.axes[names[0]], table.values, marker="o")
        ax.set_xlabel(names[0])
        ax.set_ylabel(table.metric)
    else:
        x = np.asarray(table.axes[names[1]], dtype=float)
        y = np.asarray(table.axes[names[0]], dtype=float)
        im = ax.pcolormesh(x, y, table.values, shading="auto")
        fig.colorbar(im, ax=ax, label=table.metric)
        ax.set_xlabel(names[1])
        ax.set_ylabel(names[0])
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_mode_distribution(matrix_abs: np.ndarray, path,
                             title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    im = ax.imshow(matrix_abs, origin="lower", cmap="viridis")
    fig.colorbar(im, ax=ax, label="|C|")
    ax.set_xlabel("idler mode index")
    ax.set_ylabel("signal mode index")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
