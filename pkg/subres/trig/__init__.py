from .trig import *