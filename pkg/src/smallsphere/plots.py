"""Figure rendering for the report paths.

Figures are written to files next to the delimited output, never shown
interactively; the JSON/CSV documents remain the machine interface and the
figures are derived from the same data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def mass_expansion_figure(report, path):
    """Static vs Hawking mass curves of one jet, with the report's radii."""
    m_dot = float(report.m_dot)
    m5 = float(report.m_ddot) + float(report.delta_r_coeff)
    h_dot = float(report.hawking_dot)
    h5 = float(report.hawking_ddot)
    r_max = max((row[0] for row in report.radii), default=0.2)
    r = np.linspace(0.0, max(r_max, 1e-3), 256)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(r, m_dot * r ** 3 + m5 * r ** 5, label="static extension")
    ax.plot(r, h_dot * r ** 3 + h5 * r ** 5, "--", label="Hawking")
    if report.radii:
        pts = np.array(report.radii)
        ax.plot(pts[:, 0], pts[:, 1], "o", ms=4, color="C0")
        ax.plot(pts[:, 0], pts[:, 2], "s", ms=4, color="C1")
    ax.set_xlabel("r")
    ax.set_ylabel("mass")
    ax.set_title("small-sphere mass expansion")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def oracle_convergence_figure(result, path):
    """Remainder of each fitted quantity after the exact truncation,
    against radius on log-log axes."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for q in result.quantities:
        radii = sorted({row[1] for row in q.samples}, reverse=True)
        errs = []
        for r in radii:
            errs.append(max(abs(row[4]) for row in q.samples
                            if row[1] == r))
        if max(errs, default=0.0) <= 0.0:
            continue
        ax.loglog(radii, errs, "o-", label=q.name)
    ref = np.array(result.radii)
    if ref.size and ax.lines:
        top = max(line.get_ydata().max() for line in ax.lines)
        ax.loglog(ref, top * (ref / ref.max()) ** 4, ":", color="gray",
                  label="order 4")
    ax.set_xlabel("r")
    ax.set_ylabel("max remainder after exact $r^2$ model")
    ax.set_title("oracle convergence")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def ledger_figure(runs, path):
    """Pass/fail matrix of ledger entries across verification runs."""
    labels = [label for label, _ in runs]
    names = [e.name for e in runs[0][1].ledger]
    grid = np.array([[1.0 if e.passed else 0.0 for e in rep.ledger]
                     for _, rep in runs])
    fig, ax = plt.subplots(
        figsize=(max(6.0, 0.28 * len(names)), max(3.0, 0.22 * len(labels))))
    ax.imshow(grid, aspect="auto", cmap="RdYlGn", vmin=0.0, vmax=1.0)
    ax.set_yticks(range(len(labels)), labels, fontsize=7)
    ax.set_xticks(range(len(names)), names, rotation=90, fontsize=6)
    ax.set_title("verification ledger")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
