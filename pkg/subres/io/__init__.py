from .io import *