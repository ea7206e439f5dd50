from .qc import *