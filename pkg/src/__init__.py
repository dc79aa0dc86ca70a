"""
PAPC Power Allocation Simulator Source Package
"""

__version__ = "1.0.0"
