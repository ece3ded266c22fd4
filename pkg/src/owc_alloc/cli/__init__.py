"""Command line surface."""

from owc_alloc.cli.main import build_parser, main

__all__ = ["build_parser", "main"]
