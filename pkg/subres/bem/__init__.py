from .bem import *