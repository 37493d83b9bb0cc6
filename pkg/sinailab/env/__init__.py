from .paths import *  # NOQA
from .potential import *  # NOQA
