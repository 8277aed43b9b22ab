"""Dynamic ergonomic role allocation for human-robot collaborative assembly."""

from ergoalloc import allocation, analysis, core, kwear, search, sim, transforms, utils
from ergoalloc._version import __version__, __version_tuple__
from ergoalloc.allocation import AllocationTrace, CostPolicy, run_collaboration
from ergoalloc.core import AndOrGraph, Configuration, Scenario, load_scenario
from ergoalloc.kwear import CalibrationProfile, KWearParams, KWearState
from ergoalloc.search import AllocationPlan, ao_star, recursive_ao_star
