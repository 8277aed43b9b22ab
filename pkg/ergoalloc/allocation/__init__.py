"""Cost model, orchestration and allocation traces."""

from ergoalloc.allocation.baseline import *
from ergoalloc.allocation.costs import *
from ergoalloc.allocation.orchestrator import *
from ergoalloc.allocation.trace import *
