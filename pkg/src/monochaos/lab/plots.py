"""Figures written next to the report files. Display only; nothing is computed here."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "figure.figsize": (6.0, 4.5),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def orbit_figure(times, states, path, labels=None, title=""):
    states = np.asarray(states, dtype=float)
    n = states.shape[1]
    labels = labels or [f"x{k + 1}" for k in range(n)]
    with plt.rc_context(_STYLE):
        if n >= 2:
            fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 4))
            a2.plot(states[:, 0], states[:, -1] if n > 2 else states[:, 1], lw=0.4)
            a2.set_xlabel(labels[0])
            a2.set_ylabel(labels[-1] if n > 2 else labels[1])
        else:
            fig, a1 = plt.subplots()
        for k in range(n):
            a1.plot(times, states[:, k], lw=0.6, label=labels[k])
        a1.set_xlabel("t")
        a1.legend(loc="upper right")
        a1.set_title(title)
        _save(fig, path)


def return_map_figure(values, path, title="successive section values"):
    v = np.asarray(values, dtype=float)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(v[:-1], v[1:], ".", ms=2)
        ax.set_xlabel("$v_n$")
        ax.set_ylabel("$v_{n+1}$")
        ax.set_title(title)
        _save(fig, path)


def certificate_figure(leaves, path, title=""):
    """2-D leaf boxes coloured by status."""
    colours = {"ok": "tab:green", "open": "tab:orange", "error": "tab:gray", "refuted": "tab:red"}
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for box, status in leaves:
            (x0, x1), (y0, y1) = [(iv.lo, iv.hi) for iv in box][:2]
            ax.add_patch(plt.Rectangle((x0, y0), x1 - x0, y1 - y0, fc=colours[status],
                                       ec="k", lw=0.5, alpha=0.5))
        ax.autoscale_view()
        ax.set_title(title)
        _save(fig, path)


def uniform_curve_figure(curve, path, eps=None):
    c = np.asarray(curve, dtype=float)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        k = np.arange(len(c))
        finite = np.isfinite(c) & (c > 0)
        ax.semilogy(k[finite], c[finite], "-o", ms=2)
        if eps:
            ax.axhline(eps, color="r", ls="--", lw=0.8, label="cluster eps")
            ax.legend()
        ax.set_xlabel("k")
        ax.set_ylabel("sup over probes of dist($T^k x$, A)")
        _save(fig, path)


def basin_figure(labels, box, path):
    lab = np.asarray(labels)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        if lab.ndim == 1:
            xs = np.linspace(box[0].lo, box[0].hi, len(lab))
            ax.step(xs, lab, where="mid")
            ax.set_yticks([-1, 0, 1])
            ax.set_xlabel("x1")
        else:
            grid = lab.reshape(lab.shape[0], lab.shape[1], -1)[:, :, 0]
            ax.imshow(grid.T, origin="lower", cmap="RdYlGn", vmin=-1, vmax=1, aspect="auto",
                      extent=(box[0].lo, box[0].hi, box[1].lo, box[1].hi))
            ax.set_xlabel("x1")
            ax.set_ylabel("x2")
        ax.set_title("basin sample (1 attracted, 0 not, -1 divergent)")
        _save(fig, path)


def separation_figure(curves, path, dt=1.0):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for c in curves:
            c = np.asarray(c, dtype=float)
            ax.semilogy(np.arange(len(c)) * dt, np.maximum(c, 1e-300), lw=0.6)
        ax.set_xlabel("k" if dt == 1.0 else "t")
        ax.set_ylabel("pair separation")
        _save(fig, path)


def sweep_figure(tally, distances, path):
    with plt.rc_context(_STYLE):
        fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 4))
        names = list(tally)
        a1.bar(range(len(names)), [tally[n] for n in names])
        a1.set_xticks(range(len(names)))
        a1.set_xticklabels([n.replace("-", "\n") for n in names], fontsize=8)
        d = np.array([x for x in distances if x is not None], dtype=float)
        if len(d):
            a2.hist(np.log10(np.maximum(d, 1e-17)), bins=20)
        a2.set_xlabel("log10 distance, attracting set to periodic orbit")
        _save(fig, path)


def graph_figure(graph_dict, path):
    import networkx as nx
    G = nx.MultiDiGraph()
    G.add_nodes_from(range(graph_dict["vertices"]))
    G.add_edges_from(tuple(e) for e in graph_dict["edges"])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        pos = nx.circular_layout(G)
        nx.draw_networkx(G, pos, ax=ax, connectionstyle="arc3,rad=0.15", arrows=True)
        ax.set_axis_off()
        _save(fig, path)
