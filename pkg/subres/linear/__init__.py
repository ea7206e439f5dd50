from .linear import *