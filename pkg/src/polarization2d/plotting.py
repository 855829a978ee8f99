"""Optional matplotlib rendering of plot-data series.

Matplotlib is imported lazily with the non-interactive Agg backend, so the
rest of the package works without it.
"""

from __future__ import annotations

__all__ = ["render_series", "STYLE"]

STYLE = {
    "font.size": 9,
    "axes.spines.right": False,
    "axes.spines.top": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "savefig.dpi": 150,
    # stable bytes for identical input
    "svg.hashsalt": "polarization2d",
    "path.simplify": False,
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return matplotlib, plt


def render_series(series, path, title=None):
    """Draw every series into one axes and save it to ``path``.

    Series sharing the first series' labels are overlaid; the style
    ``stem`` draws vertical lines (spectral masses), ``points`` markers
    only, anything else a polyline.
    """
    matplotlib, plt = _pyplot()
    with matplotlib.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        for i, s in enumerate(series):
            color = f"C{i % 10}"
            if s.style == "stem":
                ax.vlines(s.x, 0.0, s.y, color=color, label=s.name)
                ax.plot(s.x, s.y, "o", ms=3, color=color)
            elif s.style == "points":
                ax.plot(s.x, s.y, "o", ms=3, color=color, label=s.name)
            else:
                ax.plot(s.x, s.y, color=color, label=s.name)
        if series:
            ax.set_xlabel(series[0].xlabel)
            ax.set_ylabel(series[0].ylabel if len(series) == 1 else "value")
        if len(series) > 1:
            ax.legend(frameon=False, fontsize=7)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None} if str(path).endswith((".svg", ".pdf")) else None)
        plt.close(fig)
    return path
