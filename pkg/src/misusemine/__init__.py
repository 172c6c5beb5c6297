"""Change-based API misuse detection: diff analysis, code search, filtering, pattern mining and detection."""

__version__ = "0.1.0"
