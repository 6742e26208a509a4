"""Selberg zeta functions of Hecke triangle groups.

Values cross the boundary as decimal strings so that no digits are lost;
``z_value`` and ``partition`` return parsed JSON.
"""

import json

from . import _core
from ._core import MissingDataError, PoleProximityError

__all__ = [
    "MissingDataError",
    "PoleProximityError",
    "euler_product",
    "partition",
    "phi3",
    "psi",
    "run",
    "to_complex",
    "z_value",
]


def _arg(s):
    if isinstance(s, str):
        return s
    s = complex(s)
    return f"{s.real!r}{s.imag:+}i"


def to_complex(pair):
    """(re, im) decimal strings as a Python complex (rounded to double)."""
    return complex(float(pair[0]), float(pair[1]))


def z_value(q, s, **options):
    """Z_q(s) with its diagnostics (N, M, WP, K, tail, ...)."""
    return json.loads(_core.z_value_json(q, _arg(s), **options))


def euler_product(q, s, X, L=40, digits=30):
    """Euler product over primitive classes of norm <= X (Re s > 1)."""
    return _core.euler_product(q, _arg(s), X, L, digits)


def phi3(s, digits=30):
    return _core.phi3(_arg(s), digits)


def psi(q, s, digits=30):
    return _core.psi(q, _arg(s), digits)


def partition(q, digits=30, n_check=50):
    return json.loads(_core.partition_json(q, digits, n_check))


def run(mode, **options):
    """One CLI mode in-process; returns (exit status, artifact text)."""
    if "s" in options:
        options["s"] = _arg(options["s"])
    return _core.run(mode, **options)
