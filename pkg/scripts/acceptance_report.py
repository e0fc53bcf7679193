#!/usr/bin/env python3
"""Run the acceptance suite, printing one PASS/FAIL line per criterion."""

import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

if __name__ == "__main__":
    target = os.path.join(ROOT, "tests", "test_acceptance.py")
    sys.exit(pytest.main(["-s", "-q", target, *sys.argv[1:]]))
