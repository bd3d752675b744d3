#!/usr/bin/env python3
"""
WaveGuard adversarial audio detection tool

Main entry point: transforms clips, runs the transcription-consistency
detector, evaluates it on manifests and runs the adaptive-attack sweep.
"""

import os
import sys

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from cli import run


def main() -> int:
    return run(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
