from .batch import *