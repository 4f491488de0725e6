"""Spectrum figures rendered to SVG files.

Rendering goes through a standalone Figure (no pyplot state) and pins the SVG
hashsalt and metadata so that repeated runs emit identical bytes.
"""

from __future__ import annotations

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

SVG_HASHSALT = "covest"


def render_spectra(entries, marker_freq, path, title=None) -> None:
    """Plot one PSD panel per (label, SpectrumGrid) entry and save as SVG.

    A red arrow marks marker_freq in every panel (the true line frequency in
    the benchmark figures).
    """
    entries = list(entries)
    if not entries:
        raise ValueError("nothing to plot")
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "path"}):
        fig = Figure(figsize=(6.4, 2.2 * len(entries)), constrained_layout=True)
        FigureCanvasSVG(fig)
        axes = fig.subplots(nrows=len(entries), sharex=True)
        if len(entries) == 1:
            axes = [axes]
        for ax, (label, grid) in zip(axes, entries):
            ax.semilogy(grid.freqs, grid.psd, lw=1.2)
            top = float(max(grid.psd))
            ax.annotate(
                "",
                xy=(marker_freq, top),
                xytext=(marker_freq, top * 8.0),
                arrowprops={"color": "red", "arrowstyle": "->", "lw": 1.2},
            )
            ax.set_ylabel(label)
            ax.set_xlim(0.0, float(grid.freqs[-1]))
        axes[-1].set_xlabel("frequency (rad)")
        if title:
            axes[0].set_title(title)
        fig.savefig(path, format="svg", metadata={"Date": None})
