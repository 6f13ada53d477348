"""
Autocrat - enforceable values and autocratic strategies for multi-state
discounted games with deterministic transitions.
"""

from autocrat.core.config import settings

__version__ = settings.VERSION
