"""Performance analysis of mixed RF/FSO two-way relaying with I/Q imbalance."""

__version__ = "0.1.0"
