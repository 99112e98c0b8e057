"""Figure rendering for the CLI report path.

Each function takes the same row dictionaries the CSV writers consume and
saves a PNG next to the delimited output.  matplotlib is imported lazily
and forced onto the Agg backend so headless runs never touch a display.
"""

import math
from collections import OrderedDict
from collections.abc import Iterable, Mapping


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _grouped(rows: Iterable[Mapping], *keys: str) -> "OrderedDict":
    groups: OrderedDict = OrderedDict()
    for row in rows:
        groups.setdefault(tuple(row[k] for k in keys), []).append(row)
    return groups


_BASIS_STYLE = {
    "adiabatic": {"linestyle": "-", "color": "tab:blue"},
    "computational": {"linestyle": "--", "color": "tab:orange"},
}


def save_crossing_figure(rows: Iterable[Mapping], path: str) -> str:
    """One panel per coupling, occupation vs scaled time in both bases."""
    plt = _pyplot()
    groups = _grouped(rows, "g", "basis")
    couplings = list(OrderedDict.fromkeys(g for g, _ in groups))
    ncols = 2 if len(couplings) > 1 else 1
    nrows = math.ceil(len(couplings) / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.2 * ncols, 3.0 * nrows), squeeze=False
    )
    for ax in axes.flat[len(couplings) :]:
        ax.set_visible(False)
    for ax, g in zip(axes.flat, couplings):
        for basis, style in _BASIS_STYLE.items():
            block = groups.get((g, basis), [])
            ax.plot(
                [r["t_scaled"] for r in block],
                [r["occupation"] for r in block],
                label=basis,
                linewidth=1.2,
                **style,
            )
        ax.set_title(f"g = {g:g}", fontsize=10)
        ax.set_xlabel("scaled time")
        ax.set_ylabel("occupation")
        ax.grid(alpha=0.3)
    axes.flat[0].legend(fontsize=8, loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_angles_figure(rows: Iterable[Mapping], path: str) -> str:
    """Rotation angle and axis azimuth of the pure-X family vs coupling."""
    plt = _pyplot()
    rows = list(rows)
    grid = [r["g"] for r in rows]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(grid, [r["alpha"] for r in rows], "-", color="tab:blue", label="alpha")
    ax.plot(grid, [r["phi"] for r in rows], "--", color="tab:orange", label="phi")
    ax.axhline(math.pi / 2, color="0.6", linewidth=0.8, linestyle=":")
    ax.axhline(math.pi, color="0.6", linewidth=0.8, linestyle=":")
    ax.set_xlabel("g")
    ax.set_ylabel("angle (rad)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_sweep_figure(rows: Iterable[Mapping], path: str) -> str:
    """Log-log gate error vs offset ratio; solid single, dashed composite."""
    plt = _pyplot()
    groups = _grouped(rows, "g")
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, ((g,), block) in enumerate(groups.items()):
        color = cycle[i % len(cycle)]
        ratios = [r["eps_over_gamma"] for r in block]
        ax.loglog(
            ratios,
            [r["error_single"] for r in block],
            "-",
            color=color,
            label=f"g = {g:g} single",
        )
        ax.loglog(
            ratios,
            [r["error_composite"] for r in block],
            "--",
            color=color,
            label=f"g = {g:g} composite",
        )
    ax.set_xlabel("offset / coupling")
    ax.set_ylabel("gate error")
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
