from .rate import *  # NOQA
