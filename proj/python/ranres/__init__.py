"""Disaggregated RAN failure recovery: seeded instances, cascading cloud
failures, an exact recovery optimizer with an independent verifier, radio
level baselines and the experiment grid around them."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
