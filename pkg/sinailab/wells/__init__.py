from .jumps import *  # NOQA
from .wells import *  # NOQA
