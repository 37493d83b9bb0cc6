from .engine import *  # NOQA
from .estimates import *  # NOQA
from .kernels import *  # NOQA
from .montecarlo import *  # NOQA
