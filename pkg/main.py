"""
PAPC Simulator - Main Entry Point
Simple entry point for the per-antenna power allocation simulator
"""

import sys

from src.core.simulator_app import main

if __name__ == "__main__":
    sys.exit(main())
