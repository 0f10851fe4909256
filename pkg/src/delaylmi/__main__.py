#!/usr/bin/env python3
"""
delaylmi package main entry point.

Allows running the package directly with: python -m delaylmi
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
