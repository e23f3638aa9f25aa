"""Design and simulation toolkit for field-controlled backward retrieval in
optical quantum memories.

The heavy lifting lives in the compiled extension module; this package
re-exports its public surface. Installed wheels carry the extension inside
the package; development builds put it on PYTHONPATH instead.
"""

try:
    from ._gradecho import *  # noqa: F401,F403
except ImportError:
    from _gradecho import *  # noqa: F401,F403

__version__ = "0.1.0"
