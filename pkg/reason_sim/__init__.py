"""Closed-loop overtaking simulator with human-reason supervision."""
from __future__ import annotations


def main(argv=None) -> int:
    from .cli import main as _main
    return _main(argv)


__all__ = ["main"]
__version__ = "0.1.0"
