"""
Configuration package for the PAPC power-allocation simulator
"""

from .settings import *
