"""Benchmarks and trend analysis."""

from ergoalloc.analysis.complexity import *
