"""A series of transformations to compose codes."""

from ergoalloc.transforms.base import *
from ergoalloc.transforms.trajectory import *
