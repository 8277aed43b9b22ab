"""Assembly task model, AND/OR graphs and scenarios."""

from ergoalloc.core.assembly import *
from ergoalloc.core.errors import *
from ergoalloc.core.generators import *
from ergoalloc.core.graph import *
from ergoalloc.core.scenario import *
