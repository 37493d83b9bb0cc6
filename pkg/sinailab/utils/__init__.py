from .random import *  # NOQA
from .utils import *  # NOQA
