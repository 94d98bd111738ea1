"""Reference-free factual consistency evaluation for code summaries."""

__version__ = "0.1.0"
