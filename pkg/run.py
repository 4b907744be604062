#!/usr/bin/env python
"""Development entry point for the experiment CLI.

Run with: poetry run python run.py axes --preset lps5 --n 4 --L 2
"""

from app.main import cli

if __name__ == "__main__":
    cli()  # pylint: disable=no-value-for-parameter
