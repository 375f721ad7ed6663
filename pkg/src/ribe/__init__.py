"""Anonymous, adaptively secure revocable identity-based encryption.

``ribe.sxdh`` and ``ribe.dlin`` expose the seven algorithms (``setup``,
``pri_key_gen``, ``key_upd``, ``dec_key_gen``, ``enc``, ``dec``, ``key_rev``)
over 6- and 9-dimensional dual pairing vector spaces respectively.
"""

from . import dlin, sxdh
from .algebra import gen_pairing_groups, sample_dual_bases
from .errors import (
    CapacityError,
    FormatError,
    IntegrityError,
    RibeError,
    ShareVariantError,
    TimeOrderError,
)

__version__ = "0.1.0"

__all__ = [
    "sxdh", "dlin", "gen_pairing_groups", "sample_dual_bases",
    "RibeError", "CapacityError", "TimeOrderError", "ShareVariantError",
    "FormatError", "IntegrityError",
]
