"""Figure rendering for cloudchan sweep CSVs.

Read-only over the CSV contract of the main package: exponent sweeps
(K, R, achievable, converse, correct_decoding, ...) and capacity sweeps
(K, capacity).  Nothing is recomputed here.
"""

from .render import PlotSpec, render

__all__ = ["PlotSpec", "render"]
