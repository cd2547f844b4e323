"""Graph-to-text serving backend for the t3/1 wire contract."""

__version__ = "0.1.0"

WIRE_VERSION = "t3/1"
