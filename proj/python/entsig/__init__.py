"""Entity-channel diagnostics for entity-oriented retrieval.

Coverage/discrimination metrics, observable entity relevance scoring,
binary supervision derivation, conditional vs. open-world document
evaluation, and the statistical analysis kernels, all backed by the
C++ core.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
