"""Tail-risk ranking and selection: Python face of the C++ core."""

try:
    from ._tailselect import *  # noqa: F401,F403
    from ._tailselect import __doc__ as _core_doc
except ImportError:  # extension built out-of-tree (plain CMake build)
    from _tailselect import *  # noqa: F401,F403
    from _tailselect import __doc__ as _core_doc

__doc__ = _core_doc or __doc__
