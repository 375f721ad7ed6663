"""Exception hierarchy shared by the library and the authority CLI."""


class RibeError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(RibeError):
    """Every leaf of the revocation tree is already assigned."""


class TimeOrderError(RibeError):
    """A key update or revocation was requested out of epoch order."""


class ShareVariantError(RibeError):
    """Node shares were requested for a different scheme variant than stored."""


class FormatError(RibeError):
    """A serialized artifact or state record could not be decoded."""


class IntegrityError(RibeError):
    """Authenticated decryption of a hybrid payload failed."""
