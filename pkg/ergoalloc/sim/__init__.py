"""Simulated assembly cell."""

from ergoalloc.sim.clock import *
from ergoalloc.sim.executor import *
from ergoalloc.sim.recorder import *
from ergoalloc.sim.synthesis import *
