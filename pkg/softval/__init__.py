# softval/__init__.py
"""
Validation of soft classifiers: performance measures for soft (partial)
class memberships in reference and prediction.
"""

TOOL_NAME = "softval"
__version__ = "1.0.0"
