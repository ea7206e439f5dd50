from .geometry import *