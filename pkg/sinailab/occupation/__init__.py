from .step import *  # NOQA
from .measure import *  # NOQA
from .metric import *  # NOQA
from .tightness import *  # NOQA
