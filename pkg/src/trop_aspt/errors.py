"""Exception types raised across the package."""

from __future__ import annotations


class TropAsptError(Exception):
    """Base class for all errors raised by :mod:`trop_aspt`."""


class InputError(TropAsptError, ValueError):
    """Malformed input: bad vertex index, wrong label count, unparsable word."""


class CapacityError(TropAsptError):
    """Requested size exceeds the configured desk-scale budget."""


class ContractError(TropAsptError):
    """A contraction was requested on an object that does not admit it."""


class IntegrityError(TropAsptError):
    """An exact check that should hold by construction has failed."""


class SamplingError(TropAsptError):
    """Randomized discovery produced unstable results."""


class UnsupportedClassError(TropAsptError):
    """An ordering outside the supported classes (ASDO/CSDO) was supplied."""
