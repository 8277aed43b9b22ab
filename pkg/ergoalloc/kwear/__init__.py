"""Kinematic Wear ergonomic risk model."""

from ergoalloc.kwear.calibration import *
from ergoalloc.kwear.model import *
from ergoalloc.kwear.rula import *
from ergoalloc.kwear.trajectory import *
