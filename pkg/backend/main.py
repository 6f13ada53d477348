#!/usr/bin/env python3
"""
Autocrat - Main Entry Point

Usage: python backend/main.py <command> [options]
"""

import os
import sys

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from autocrat.commands import main

if __name__ == "__main__":
    sys.exit(main())
