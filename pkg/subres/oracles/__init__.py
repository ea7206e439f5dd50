from .oracles import *