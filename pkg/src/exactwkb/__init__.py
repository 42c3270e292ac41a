"""Exact WKB analysis and the Painleve I tau function from topological recursion."""

__version__ = "0.1.0"
SCHEMA_VERSION = "1.0"
