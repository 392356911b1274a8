"""Figure rendering for experiment results.

Every function takes a result (or trace) and a target path, draws one
figure, writes it and closes it, so batch runs do not accumulate open
figures.  The CLI calls these when asked for a plot next to the CSV
report; nothing in here is needed for the numbers.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import MEAN_TRIAL, RESONANT_STATES

__all__ = ["plot_distribution", "plot_sweep", "plot_trace", "plot_noise",
           "plot_minimal_time"]

_DPI = 150


def _bar_panel(ax, probabilities, log_scale=False):
    states = np.arange(len(probabilities))
    colors = ["tab:orange" if p in RESONANT_STATES else "tab:blue"
              for p in states]
    floor = 1e-12
    heights = np.maximum(probabilities, floor) if log_scale else probabilities
    ax.bar(states, heights, color=colors)
    if log_scale:
        ax.set_yscale("log")
        ax.set_ylim(bottom=1e-8)
    ax.set_xticks(states)
    ax.set_xticklabels([str(p) for p in states], fontsize=7)
    ax.set_xlabel("basis state p")
    ax.set_ylabel("probability")


def plot_distribution(probabilities, path, log_scale=False, title=""):
    """Bar chart of the sixteen populations, resonant states highlighted."""
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    _bar_panel(ax, np.asarray(probabilities, dtype=float), log_scale)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_sweep(result, path, title=""):
    """Resonant populations and the worst error state along a sweep."""
    x = result.column(result.columns[0])
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for i, p in enumerate(RESONANT_STATES):
        y = [row.probabilities[p] for row in result.rows]
        ax.plot(x, y, marker="o", ms=3.5, label=f"$|{p}\\rangle$")
    ax.plot(x, [row.max_error_prob for row in result.rows],
            marker="x", ms=4, ls="--", color="k", label="worst error state")
    ax.axhline(0.25, color="gray", lw=0.6, zorder=0)
    ax.set_xlabel(result.columns[0])
    ax.set_ylabel("probability")
    ax.legend(fontsize=8, ncol=2)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_trace(trace, path, state=3, title=""):
    """One population against time, with the marker times drawn dashed."""
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    ax.plot(trace.times, trace.probability(state), lw=0.9)
    for mark in trace.markers:
        ax.axvline(mark, color="gray", ls="--", lw=0.7)
    ax.set_xlabel("t")
    ax.set_ylabel(f"$|c_{{{state}}}(t)|^2$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_noise(result, path, title=""):
    """Trial-averaged distributions, one panel per noise amplitude."""
    mean_rows = [row for row in result.rows
                 if row.variables[1] == MEAN_TRIAL]
    n = len(mean_rows)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, squeeze=False,
                             figsize=(4.0 * ncols, 2.6 * nrows))
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    for ax, row in zip(axes.flat, mean_rows):
        _bar_panel(ax, row.probabilities, log_scale=True)
        ax.set_title(f"epsilon = {row.variables[0]:g}", fontsize=9)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_minimal_time(result, path, title=""):
    """Log-scale distributions of the timed runs, duration in the label."""
    fig, axes = plt.subplots(len(result.rows), 1, squeeze=False,
                             figsize=(6.0, 2.4 * len(result.rows)))
    for ax, row in zip(axes.flat, result.rows):
        _bar_panel(ax, row.probabilities, log_scale=True)
        duration = row.variables[result.columns.index("duration")]
        ax.set_title(f"{row.label}: duration {duration:.1f}", fontsize=9)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
