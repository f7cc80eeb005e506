"""Log-log CCDF plotting front end for experiment output files."""
from .plotter import (
    ANCHOR_SURVIVAL,
    PlotSpec,
    PlotSpecError,
    ReferenceLine,
    Series,
    guide_line,
    load_spec,
    parse_spec,
    plot_ccdf,
    read_ccdf,
)

__version__ = "1.0.0"
