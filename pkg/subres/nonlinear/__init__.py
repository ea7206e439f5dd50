from .nonlinear import *