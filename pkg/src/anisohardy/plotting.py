"""Static SVG convergence plots for sharpness sweeps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def sweep_plot(notes, path):
    """Quotient against alpha with the sharp constant as a horizontal line.

    `notes` is the ``notes`` mapping of a sharpness sweep report (keys
    ``alphas``, ``quotients``, ``constant``, ``target``, ``critical_alpha``).
    The SVG carries no timestamp and a fixed hash salt, so reruns give
    identical files.
    """
    path = Path(path)
    alphas, quotients = notes["alphas"], notes["quotients"]
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(alphas, quotients, "o-", color="tab:blue", label="quotient")
    ax.axhline(notes["constant"], color="tab:red", ls="--",
               label=f"sharp constant {notes['constant']:.4g}")
    ac = notes.get("critical_alpha")
    if ac is not None:
        ax.axvline(ac, color="0.6", lw=0.8, ls=":")
    ax.set_xlabel("alpha")
    ax.set_ylabel("quotient")
    ax.set_title(f"{notes.get('target', 'sweep')}: approach to the sharp constant")
    ax.legend(frameon=False)
    fig.tight_layout()
    with matplotlib.rc_context({"svg.hashsalt": "anisohardy"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def write_sweep_plots(reports, out_dir):
    """One SVG per sweep found in the reports' notes; returns the written paths."""
    out_dir = Path(out_dir)
    paths = []
    for rep in reports:
        for notes in rep.notes.get("sweeps", []):
            name = f"sweep_{notes.get('target', rep.suite)}.svg"
            paths.append(sweep_plot(notes, out_dir / name))
    return paths
