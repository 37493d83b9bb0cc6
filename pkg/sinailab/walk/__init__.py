from .walk import *  # NOQA
from .corollary import *  # NOQA
from .hitting import *  # NOQA
