"""Numerical laboratory for linear and perturbed toral endomorphisms."""

try:
    from ._endolab import *  # noqa: F401,F403
    from ._endolab import Model  # noqa: F401
except ImportError:  # running against a build tree on PYTHONPATH
    from _endolab import *  # noqa: F401,F403
    from _endolab import Model  # noqa: F401
