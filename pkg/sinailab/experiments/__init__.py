from .targets import *  # NOQA
from .schema import *  # NOQA
from .base import *  # NOQA
from .env import *  # NOQA
from .wells import *  # NOQA
from .rate import *  # NOQA
from .confinement import *  # NOQA
from .vessel import *  # NOQA
from .walk import *  # NOQA
