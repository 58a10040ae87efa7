"""Figure catalog and the renderer.

Trajectory figures take one CSV with header
t,x1,x2,x2_hat,u_ugml,u_uM,r,envelope,pi (extra columns are ignored);
fig4 takes a trajectory CSV plus a counts CSV with header t_hours,value.
Population decay panels use a log y-axis so exponential envelopes read
as straight lines.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # batch rendering, never needs a display

import matplotlib.pyplot as plt
import numpy as np


class FigureInputError(Exception):
    """Bad figure request or unusable input CSV."""


class MissingColumnError(FigureInputError):
    """An input CSV lacks a column the figure id requires."""

    def __init__(self, fig_id: str, column: str, path, have) -> None:
        self.column = column
        super().__init__(
            f"{fig_id} needs column '{column}' but {path} has: "
            f"{', '.join(have)}")


# figure id -> (required trajectory columns, default y-axis scale)
_TRAJ_FIGS = {
    "fig1a": (("t", "x1"), "linear"),
    "fig1b": (("t", "x2"), "linear"),
    "fig2a": (("t", "x1", "envelope"), "log"),
    "fig2b": (("t", "u_uM"), "linear"),
    "fig3a": (("t", "x1", "envelope"), "log"),
    "fig3b": (("t", "x2", "x2_hat", "pi"), "linear"),
    "fig3c": (("t", "x1"), "log"),
    "fig3d": (("t", "u_uM"), "linear"),
}
_COUNTS_COLUMNS = ("t_hours", "value")

FIGURE_IDS = tuple(sorted(_TRAJ_FIGS)) + ("fig4",)

_IMAGE_SUFFIXES = (".png", ".svg")


@dataclass(frozen=True)
class FigureSpec:
    """One rendering request: inputs, figure id, output image path.

    yscale overrides the figure id's default y-axis scale; leave None
    to keep it. fig4 takes two inputs (trajectory, then counts), every
    other id exactly one.
    """

    inputs: tuple
    fig_id: str
    out: Path
    yscale: str | None = None

    def __post_init__(self) -> None:
        if self.fig_id not in FIGURE_IDS:
            raise FigureInputError(
                f"unknown figure id {self.fig_id!r}: valid ids are "
                f"{', '.join(FIGURE_IDS)}")
        if self.yscale not in (None, "linear", "log"):
            raise FigureInputError(
                f"yscale must be 'linear' or 'log', got {self.yscale!r}")
        need = 2 if self.fig_id == "fig4" else 1
        got = len(self.inputs)
        if got != need:
            kind = ("a trajectory CSV and a counts CSV" if need == 2
                    else "one trajectory CSV")
            raise FigureInputError(
                f"{self.fig_id} takes {kind}, got {got} input(s)")
        suffix = Path(self.out).suffix.lower()
        if suffix not in _IMAGE_SUFFIXES:
            raise FigureInputError(
                f"unsupported image format {suffix!r}: use "
                f"{' or '.join(_IMAGE_SUFFIXES)}")


def load_csv(path) -> np.ndarray:
    """Structured array from a headed CSV; empty or ragged files fail."""
    p = Path(path)
    if not p.exists():
        raise FigureInputError(f"input not found: {p}")
    text = p.read_text()
    if not text.strip():
        raise FigureInputError(f"empty CSV: {p}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            data = np.genfromtxt(io.StringIO(text), delimiter=",", names=True)
    except ValueError as e:
        raise FigureInputError(f"unreadable CSV {p}: {e}") from e
    if data.dtype.names is None:
        raise FigureInputError(f"{p} has no header row")
    data = np.atleast_1d(data)
    if data.size == 0:
        raise FigureInputError(f"no data rows in {p}")
    return data


def _require(fig_id: str, data: np.ndarray, columns, path) -> None:
    for c in columns:
        if c not in data.dtype.names:
            raise MissingColumnError(fig_id, c, path, data.dtype.names)


def build_figure(spec: FigureSpec):
    """Load, validate, and draw; the caller owns closing the figure."""
    tables = [load_csv(p) for p in spec.inputs]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        if spec.fig_id == "fig4":
            default = _draw_fig4(spec, ax, tables)
        else:
            columns, default = _TRAJ_FIGS[spec.fig_id]
            _require(spec.fig_id, tables[0], columns, spec.inputs[0])
            _DRAW[spec.fig_id](ax, tables[0])
    except Exception:
        plt.close(fig)
        raise
    ax.set_yscale(spec.yscale or default)
    ax.set_xlabel("t (h)")
    ax.grid(True, alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Write spec.out; on any input error no file is touched."""
    fig = build_figure(spec)
    out = Path(spec.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    return out


def _draw_fig1a(ax, d) -> None:
    ax.plot(d["t"], d["x1"], color="tab:blue")
    ax.set_ylabel("population x1 (cells/ml)")
    ax.set_title("open-loop population")


def _draw_fig1b(ax, d) -> None:
    ax.plot(d["t"], d["x2"], color="tab:orange")
    ax.set_ylabel("mutation state x2")
    ax.set_title("open-loop mutation state")


def _draw_envelope_panel(ax, d, title) -> None:
    ax.plot(d["t"], d["x1"], color="tab:blue", label="x1")
    ax.plot(d["t"], d["envelope"], color="tab:red", linestyle="--",
            label="decay envelope")
    ax.set_ylabel("population (cells/ml)")
    ax.set_title(title)


def _draw_fig2a(ax, d) -> None:
    _draw_envelope_panel(ax, d, "population under constant dose")


def _draw_fig3a(ax, d) -> None:
    _draw_envelope_panel(ax, d, "population under adaptive dose")


def _draw_dose_panel(ax, d, title) -> None:
    ax.plot(d["t"], d["u_uM"], color="tab:green")
    ax.set_ylabel("dose (uM)")
    ax.set_title(title)


def _draw_fig2b(ax, d) -> None:
    _draw_dose_panel(ax, d, "constant dose")


def _draw_fig3d(ax, d) -> None:
    _draw_dose_panel(ax, d, "adaptive dose")


def _draw_fig3b(ax, d) -> None:
    # the certified claim is |x2| <= |x2_hat| + pi, so plot that sum,
    # not the raw estimate
    ax.plot(d["t"], np.abs(d["x2"]), color="tab:orange", label="|x2|")
    ax.plot(d["t"], np.abs(d["x2_hat"]) + d["pi"], color="tab:purple",
            linestyle="--", label="|x2_hat| + pi (certified bound)")
    ax.set_ylabel("mutation state magnitude")
    ax.set_title("observer bound")


def _draw_fig3c(ax, d) -> None:
    y0 = float(d["x1"][0])
    if y0 <= 0:
        raise FigureInputError(
            f"cannot normalize fig3c: first population sample is {y0}")
    ax.plot(d["t"], d["x1"] / y0, color="tab:blue", label="x1/x1(0)")
    ax.axhline(0.10, color="tab:gray", linestyle=":", label="10% line")
    ax.set_ylabel("normalized population")
    ax.set_title("population relative to start")


_DRAW = {
    "fig1a": _draw_fig1a,
    "fig1b": _draw_fig1b,
    "fig2a": _draw_fig2a,
    "fig2b": _draw_fig2b,
    "fig3a": _draw_fig3a,
    "fig3b": _draw_fig3b,
    "fig3c": _draw_fig3c,
    "fig3d": _draw_fig3d,
}


def _draw_fig4(spec: FigureSpec, ax, tables) -> str:
    traj, counts = tables
    _require("fig4", traj, ("t", "x1"), spec.inputs[0])
    _require("fig4", counts, _COUNTS_COLUMNS, spec.inputs[1])
    ax.plot(traj["t"], traj["x1"], color="tab:blue", label="simulated x1")
    ax.scatter(counts["t_hours"], counts["value"], color="tab:red",
               marker="o", zorder=3, label="observed counts")
    ax.set_ylabel("population (cells/ml)")
    ax.set_title("simulation against observed counts")
    return "log"
