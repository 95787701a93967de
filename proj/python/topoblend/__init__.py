"""Topology-aware blending of implicit porous structures."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # build-tree layout used by the ctest smoke tests
    import os
    import sys

    _dir = os.environ.get("TOPOBLEND_MODULE_DIR")
    if not _dir:
        raise
    sys.path.insert(0, _dir)
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
