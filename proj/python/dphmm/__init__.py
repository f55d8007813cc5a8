"""Differentially private release of per-step query answers over a hidden
Markov model: policy graphs, sensitivity hulls, exposure repair, K-norm and
Laplace mechanisms, release sessions and the experiment harness."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
