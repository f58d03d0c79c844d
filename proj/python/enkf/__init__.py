"""Localized ensemble Kalman filters, including the continuous gradient-flow
analysis (cenkf1 / cenkf2), and Lorenz-96 twin experiments."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
