"""
pelflow - command-line entry point.
"""
import sys

from pelflow.app import main

if __name__ == "__main__":
    sys.exit(main())
