"""Figure rendering for complexes, window hulls, and obstruction reports.

Everything is rendered headlessly to files.  Complex layouts prefer intrinsic
coordinates (vertex positions read off the product or orbit structure) and
fall back to a spring embedding when the complex has no usable splitting.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .complexes import PALETTE, CubeComplex  # noqa: E402
from .lattices import ObstructionReport  # noqa: E402
from .periodic import WindowHull  # noqa: E402


def _spring_coords(c: CubeComplex):
    import networkx as nx

    g = nx.Graph([(u, v) for u, v, _ in c.edges])
    g.add_nodes_from(range(c.n_vertices))
    pos = nx.spring_layout(g, seed=7)
    return [tuple(pos[v]) for v in range(c.n_vertices)]


def complex_coords(c: CubeComplex):
    """Vertex coordinates from the first two product factors when the complex
    splits, else a spring layout."""
    factors = c.product_decomposition()
    if len(factors) >= 2:
        return [(factors[0].vertex_map[v], factors[1].vertex_map[v])
                for v in range(c.n_vertices)]
    return _spring_coords(c)


def _draw(ax, c: CubeComplex, coords, hyperplane_color):
    for u, v, h in c.edges:
        x = (coords[u][0], coords[v][0])
        y = (coords[u][1], coords[v][1])
        ax.plot(x, y, color=hyperplane_color(h), linewidth=1.2, zorder=1)
    ax.scatter([p[0] for p in coords], [p[1] for p in coords],
               s=12, color="black", zorder=2)
    ax.set_aspect("equal")
    ax.axis("off")


def save_complex_figure(c: CubeComplex, path, title=None, coords=None):
    fig, ax = plt.subplots(figsize=(6, 6))
    coords = coords if coords is not None else complex_coords(c)
    _draw(ax, c, coords, lambda h: PALETTE[h % len(PALETTE)])
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_window_hull_figure(hull: WindowHull, path, title=None):
    """Draw the windowed hull with coordinates counting, per orbit, how many
    of its walls a vertex has on the positive side.  Edges are colored by the
    parallelism class of their wall."""
    orbits = sorted({w.orbit for w in hull.walls})
    masks = []
    for ref in orbits[:2]:
        m = 0
        for i, w in enumerate(hull.walls):
            if w.orbit == ref:
                m |= 1 << i
        masks.append(m)
    if len(masks) == 2:
        coords = [((o & masks[0]).bit_count(), (o & masks[1]).bit_count())
                  for o in hull.orientations]
    elif len(masks) == 1:
        coords = [((o & masks[0]).bit_count(), 0) for o in hull.orientations]
    else:
        coords = _spring_coords(hull.complex)
    fig, ax = plt.subplots(figsize=(6, 6))
    _draw(ax, hull.complex, coords,
          lambda h: PALETTE[hull.walls[h].class_index % len(PALETTE)])
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_obstruction_figure(report: ObstructionReport, path, title=None):
    """Bar of commensurability classes against the firing threshold; for
    rank-1 intersections in the plane, the class directions as arrows."""
    two_d = report.ambient_rank == 2 and report.intersection_rank == 1
    fig, axes = plt.subplots(1, 2 if two_d else 1,
                             figsize=(10 if two_d else 5, 5))
    ax_bar = axes[0] if two_d else axes
    ax_bar.bar(["classes", "threshold"],
               [len(report.classes), report.threshold],
               color=["#d62728" if report.fired else "#2ca02c", "#7f7f7f"])
    ax_bar.set_ylabel("count")
    ax_bar.set_title("fired" if report.fired else "not fired")
    if two_d:
        ax = axes[1]
        for i, rep in enumerate(report.representatives):
            vx, vy = rep.basis[0]
            ax.annotate("", xy=(vx, vy), xytext=(0, 0),
                        arrowprops=dict(arrowstyle="->",
                                        color=PALETTE[i % len(PALETTE)]))
            ax.annotate(f"class {i}", xy=(vx, vy), fontsize=8)
        lim = 1 + max(max(abs(x) for x in rep.basis[0])
                      for rep in report.representatives)
        ax.set_xlim(-lim, lim)
        ax.set_ylim(-lim, lim)
        ax.set_aspect("equal")
        ax.grid(True, linewidth=0.3)
        ax.set_title("class directions")
    if title:
        fig.suptitle(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
