"""Module entry point for python -m cryptocast."""

import sys

from cryptocast.cli import main

if __name__ == "__main__":
    sys.exit(main())
