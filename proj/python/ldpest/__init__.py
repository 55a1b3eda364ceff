"""Locally differentially private estimation: python bindings for the C++ core."""

from ._ldpest import *  # noqa: F401,F403
from ._ldpest import __doc__ as _core_doc

__doc__ = _core_doc
