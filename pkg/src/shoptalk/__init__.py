"""Synthetic multimodal shopping-dialog pipeline.

Scene simulation, agenda-based dialog self-play, corpus statistics, benchmark
evaluation, and a paraphrase annotation service.
"""

__version__ = "0.1.0"
