"""Indoor visible light channel tracing and WDMA resource allocation."""

__version__ = "0.1.0"
