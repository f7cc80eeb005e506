"""Log-log CCDF figure rendering from experiment output files.

Consumes ccdf.csv (columns ``x,survival``) and fit.json files exactly as
written by the simulation package and renders one log-log axes with a
curve per series and a dashed guide line per reference slope.  Every
image gets a machine-readable JSON sidecar carrying the spec echo and
the raw CSV text of each plotted series, byte for byte, so figures stay
auditable; the plotter never resamples or smooths.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class PlotSpecError(ValueError):
    """Malformed plot spec or input file contents."""


#: guide lines are anchored at the series point nearest this survival level
ANCHOR_SURVIVAL = 1e-2


@dataclass(frozen=True)
class Series:
    path: Path
    label: str


@dataclass(frozen=True)
class ReferenceLine:
    """A dashed guide of the given slope through the anchor point of a series."""

    slope: float
    label: str
    series: int = 0


@dataclass(frozen=True)
class PlotSpec:
    series: tuple[Series, ...]
    references: tuple[ReferenceLine, ...]
    output: Path
    title: str | None
    xlabel: str
    ylabel: str
    xlim: tuple[float, float] | None
    ylim: tuple[float, float] | None
    raw: dict


def _require(cond: bool, msg: str):
    if not cond:
        raise PlotSpecError(msg)


def _reference_slope(entry: dict) -> float:
    """Resolve a reference entry: literal slope or a value out of fit.json."""
    if "slope" in entry:
        _require(
            isinstance(entry["slope"], (int, float)),
            f"reference slope must be a number, got {entry['slope']!r}",
        )
        return float(entry["slope"])
    _require("fit" in entry, "reference needs either 'slope' or 'fit'")
    key = entry.get("use", "reference_slope")
    _require(
        key in ("reference_slope", "slope"),
        f"reference 'use' must be 'reference_slope' or 'slope', got {key!r}",
    )
    try:
        fit = json.loads(Path(entry["fit"]).read_text())
    except json.JSONDecodeError as exc:
        raise PlotSpecError(f"{entry['fit']}: not valid JSON ({exc})")
    _require(
        isinstance(fit.get(key), (int, float)),
        f"{entry['fit']}: no numeric {key!r} field",
    )
    return float(fit[key])


def parse_spec(raw: dict) -> PlotSpec:
    _require(isinstance(raw, dict), f"spec must be an object, got {type(raw).__name__}")
    series_raw = raw.get("series")
    _require(
        isinstance(series_raw, list) and len(series_raw) >= 1,
        "spec needs a non-empty 'series' list",
    )
    series = []
    for i, entry in enumerate(series_raw):
        _require(isinstance(entry, dict), f"series[{i}] must be an object")
        _require("ccdf" in entry, f"series[{i}] needs a 'ccdf' path")
        series.append(
            Series(path=Path(entry["ccdf"]), label=str(entry.get("label", f"series {i}")))
        )

    references = []
    for i, entry in enumerate(raw.get("references", [])):
        _require(isinstance(entry, dict), f"references[{i}] must be an object")
        anchor = int(entry.get("series", 0))
        _require(
            0 <= anchor < len(series),
            f"references[{i}] anchors to series {anchor}, "
            f"but there are {len(series)} series",
        )
        slope = _reference_slope(entry)
        references.append(
            ReferenceLine(
                slope=slope,
                label=str(entry.get("label", f"slope {slope:.3g}")),
                series=anchor,
            )
        )

    _require("output" in raw, "spec needs an 'output' image path")
    output = Path(raw["output"])
    _require(
        output.suffix.lower() in (".png", ".svg"),
        f"output must end in .png or .svg, got {output.name!r}",
    )

    def _lim(key):
        if key not in raw:
            return None
        pair = raw[key]
        _require(
            isinstance(pair, list) and len(pair) == 2 and pair[0] < pair[1],
            f"{key} must be [lo, hi] with lo < hi",
        )
        return (float(pair[0]), float(pair[1]))

    return PlotSpec(
        series=tuple(series),
        references=tuple(references),
        output=output,
        title=raw.get("title"),
        xlabel=str(raw.get("xlabel", "value")),
        ylabel=str(raw.get("ylabel", "survival probability")),
        xlim=_lim("xlim"),
        ylim=_lim("ylim"),
        raw=raw,
    )


def load_spec(path: str | Path) -> PlotSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PlotSpecError(f"{path}: not valid JSON ({exc})")
    return parse_spec(raw)


def read_ccdf(path: Path) -> tuple[np.ndarray, np.ndarray, str]:
    """Parse a ccdf.csv; returns (x, survival, raw file text)."""
    # bytes-faithful read: the sidecar must carry the file exactly, and
    # text mode would silently normalize CRLF line endings
    text = path.read_bytes().decode("utf-8")
    lines = text.splitlines()
    _require(bool(lines) and lines[0] == "x,survival", f"{path}: expected 'x,survival' header")
    _require(len(lines) > 1, f"{path}: no data rows")
    try:
        data = np.array(
            [[float(v) for v in line.split(",")] for line in lines[1:]]
        )
    except ValueError as exc:
        raise PlotSpecError(f"{path}: bad data row ({exc})")
    _require(data.shape[1] == 2, f"{path}: expected exactly two columns")
    return data[:, 0], data[:, 1], text


def guide_line(
    x: np.ndarray, survival: np.ndarray, slope: float
) -> tuple[np.ndarray, np.ndarray]:
    """Power-law guide through the point nearest ANCHOR_SURVIVAL.

    Spans the positive-x extent of the anchoring series.
    """
    pos = (x > 0) & (survival > 0)
    _require(bool(pos.any()), "guide line needs positive (x, survival) points")
    xs, ss = x[pos], survival[pos]
    i = int(np.argmin(np.abs(np.log(ss) - np.log(ANCHOR_SURVIVAL))))
    gx = np.geomspace(xs.min(), xs.max(), 64)
    gy = ss[i] * (gx / xs[i]) ** slope
    return gx, gy


def plot_ccdf(spec: PlotSpec) -> tuple[Path, Path]:
    """Render the figure and its sidecar; returns (image path, sidecar path)."""
    loaded = []
    for s in spec.series:
        if not s.path.exists():
            raise FileNotFoundError(f"{s.path}: no such ccdf file")
        loaded.append(read_ccdf(s.path))

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for s, (x, surv, _) in zip(spec.series, loaded):
        ax.loglog(x, surv, drawstyle="steps-post", linewidth=1.2, label=s.label)
    for ref in spec.references:
        x, surv, _ = loaded[ref.series]
        gx, gy = guide_line(x, surv, ref.slope)
        ax.loglog(gx, gy, linestyle="--", color="black", linewidth=1.0, label=ref.label)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)

    sidecar = spec.output.with_name(spec.output.name + ".json")
    sidecar.write_text(
        json.dumps(
            {
                "spec": spec.raw,
                "series": [
                    {"label": s.label, "path": str(s.path), "csv": text}
                    for s, (_, _, text) in zip(spec.series, loaded)
                ],
            },
            indent=2,
            sort_keys=True,
        )
    )
    return spec.output, sidecar
