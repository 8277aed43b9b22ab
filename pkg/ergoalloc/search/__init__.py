"""AO* search and iterative re-planning."""

from ergoalloc.search.aostar import *
from ergoalloc.search.brute_force import *
from ergoalloc.search.recursive import *
