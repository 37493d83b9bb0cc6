from .spec import *  # NOQA
from .membership import *  # NOQA
from .profile import *  # NOQA
from .montecarlo import *  # NOQA
