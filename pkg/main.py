#!/usr/bin/env python3
"""
Main entry point for the spectra command line.
Run ``python main.py --help`` for the subcommands.
"""

import sys
import os

# Add current directory to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from tools.cli import main

if __name__ == '__main__':
    sys.exit(main())
