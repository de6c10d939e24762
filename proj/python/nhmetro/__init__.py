"""Generalized quantum Fisher information for non-Hermitian dynamics."""

from ._core import *  # noqa: F401,F403
from ._core import NhmetroError, run_cli


def probe_from_angle(phi):
    """cos(2 phi)|0> + sin(2 phi)|1>"""
    import numpy as np

    return np.array([np.cos(2 * phi), np.sin(2 * phi)], dtype=complex)


__version__ = "0.1.0"
