"""Charts from forecast-pooling sweep CSVs.

Reads the results schema the sweep runner writes (one row per network
size) and renders up to two panels: the mean bias with a 2-standard-error
band around zero, and the simulated bias variance against the analytic
curve. Output format follows the file extension; vector formats are
rendered deterministically, so identical inputs give identical bytes.
"""

import csv
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be pinned first

SCHEMA = (
    "n",
    "mean_bias",
    "var_bias",
    "se_mean",
    "se_var",
    "analytic_var",
    "replicates_used",
    "seed_base",
)

PANELS = ("mean", "variance", "both")

# pinned style so re-renders are byte-identical; fonttype "none" keeps
# labels as text elements instead of glyph paths
STYLE = {
    "svg.hashsalt": "plotviz",
    "svg.fonttype": "none",
    "font.size": 10.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    output_image: str
    which: str = "both"
    log_x: bool = False
    title: str = None

    def __post_init__(self):
        if self.which not in PANELS:
            raise ValueError(f"which must be one of {PANELS}, got {self.which!r}")


@dataclass(frozen=True)
class SweepData:
    """The columns the charts need, in file row order."""

    n: tuple
    mean_bias: tuple
    se_mean: tuple
    var_bias: tuple
    analytic_var: tuple


def read_sweep(path: str) -> SweepData:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or ()
            missing = [c for c in SCHEMA if c not in header]
            if missing:
                raise ValueError(f"{path}: missing columns: {', '.join(missing)}")
            rows = list(reader)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    try:
        return SweepData(
            n=tuple(int(row["n"]) for row in rows),
            mean_bias=tuple(float(row["mean_bias"]) for row in rows),
            se_mean=tuple(float(row["se_mean"]) for row in rows),
            var_bias=tuple(float(row["var_bias"]) for row in rows),
            analytic_var=tuple(float(row["analytic_var"]) for row in rows),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed row: {exc}") from None


def _mean_panel(ax, data: SweepData) -> None:
    lo = [m - 2.0 * s for m, s in zip(data.mean_bias, data.se_mean)]
    hi = [m + 2.0 * s for m, s in zip(data.mean_bias, data.se_mean)]
    ax.axhline(0.0, color="0.4", linewidth=0.8, linestyle="--")
    ax.fill_between(data.n, lo, hi, color="tab:blue", alpha=0.25,
                    linewidth=0.0, label="mean ± 2 se")
    ax.plot(data.n, data.mean_bias, "o-", color="tab:blue", markersize=4,
            label="empirical mean")
    ax.set_xlabel("n")
    ax.set_ylabel("mean bias")
    ax.legend()


def _variance_panel(ax, data: SweepData) -> None:
    ax.plot(data.n, data.var_bias, "o", color="tab:blue", markersize=5,
            label="empirical")
    finite = [(n, a) for n, a in zip(data.n, data.analytic_var)
              if math.isfinite(a)]
    if finite:
        ax.plot([p[0] for p in finite], [p[1] for p in finite], "-",
                color="tab:orange", label="analytic")
    ax.set_xlabel("n")
    ax.set_ylabel("bias variance")
    ax.legend()


def _save_metadata(path: str):
    # strip the volatile timestamp from vector formats
    lower = path.lower()
    if lower.endswith(".svg"):
        return {"Date": None}
    if lower.endswith(".pdf"):
        return {"CreationDate": None}
    return None


def render(spec: PlotSpec) -> None:
    """Read spec.input_csv and write the chart to spec.output_image."""
    data = read_sweep(spec.input_csv)
    with plt.rc_context(STYLE):
        if spec.which == "both":
            fig, (ax_mean, ax_var) = plt.subplots(1, 2, figsize=(9.0, 3.6),
                                                  layout="constrained")
            used = [ax_mean, ax_var]
        else:
            fig, ax = plt.subplots(figsize=(4.8, 3.6), layout="constrained")
            ax_mean = ax_var = ax
            used = [ax]
        if spec.which in ("mean", "both"):
            _mean_panel(ax_mean, data)
        if spec.which in ("variance", "both"):
            _variance_panel(ax_var, data)
        if spec.log_x:
            for ax in used:
                ax.set_xscale("log")
        if spec.title:
            fig.suptitle(spec.title)
        try:
            fig.savefig(spec.output_image,
                        metadata=_save_metadata(spec.output_image))
        finally:
            plt.close(fig)


__version__ = "0.1.0"

__all__ = [
    "PANELS",
    "PlotSpec",
    "SCHEMA",
    "SweepData",
    "read_sweep",
    "render",
    "__version__",
]
