#!/usr/bin/env python3
"""Compatibility wrapper for the reason_sim package."""

from reason_sim.cli import main


if __name__ == "__main__":
    raise SystemExit(main())
