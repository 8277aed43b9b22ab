"""Utils."""

from ergoalloc.utils.debug import *
from ergoalloc.utils.file import *
