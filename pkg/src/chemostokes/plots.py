"""Static vector-graphic plots of a diagnostics series."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .diagnostics import DiagnosticsSeries
from .errors import ValidationError

LOG_FLOOR = 1e-16


def _floored(values: np.ndarray) -> np.ndarray:
    return np.maximum(np.nan_to_num(values, nan=LOG_FLOOR), LOG_FLOOR)


def emit_plots(series: DiagnosticsSeries, out_dir) -> list:
    """Write three SVG line plots; needs at least two records."""
    if len(series) < 2:
        raise ValidationError("need at least 2 records to plot a series")
    os.makedirs(out_dir, exist_ok=True)
    t = series.t
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    dev1 = series.column("linf_n1_dev")
    dev2 = series.column("linf_n2_dev")
    if np.isnan(dev1).all():
        ax.semilogy(t, _floored(series.column("mass_n1")), label="mass n1")
        ax.semilogy(t, _floored(series.column("mass_n2")), label="mass n2")
        ax.set_ylabel("mass")
    else:
        ax.semilogy(t, _floored(dev1), label=r"$\|n_1 - n_{1,\infty}\|_\infty$")
        ax.semilogy(t, _floored(dev2), label=r"$\|n_2 - n_{2,\infty}\|_\infty$")
        ax.set_ylabel("density deviation")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "deviations.svg")
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, series.column("linf_c"), label=r"$\|c\|_\infty$")
    ax.plot(t, series.column("l2_u"), label=r"$\|u\|_2$")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "signal_velocity.svg")
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(t, _floored(series.column("energy")), label="E")
    ax.semilogy(t, _floored(series.column("dissipation")), label="F")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "energy.svg")
    fig.savefig(path)
    plt.close(fig)
    paths.append(path)
    return paths
