"""Exceptions and input validation helpers shared by every module."""

import numpy as np


class EMKernelError(ValueError):
    """Base class for errors raised by emkernels."""


class InvalidSpecError(EMKernelError):
    """A kernel specification is malformed (even extent, n < 1, ...)."""


class InvalidInputError(EMKernelError):
    """An image, mask or orientation map violates an operation's precondition."""


class BudgetExceededError(EMKernelError):
    """The reference oracle refuses grids above its size budget."""


class FormatError(EMKernelError):
    """An input file has an unsupported format or bit depth."""


def check_odd_shape(shape):
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    if len(shape) not in (1, 2, 3):
        raise InvalidSpecError(f"kernel rank must be 1, 2 or 3, got {len(shape)}")
    if any(s < 1 or s % 2 == 0 for s in shape):
        raise InvalidSpecError(f"kernel extents must be odd and positive, got {shape}")
    return shape


def check_dimension(n):
    n = float(n)
    if not np.isfinite(n) or n < 1:
        raise InvalidSpecError(f"dimension exponent n must be >= 1, got {n}")
    return n


def check_charge_image(image, *, copy=False):
    """Validate a 2D/3D charge image and return it as a float64 array.

    Values must be finite and lie in [-1, 1].
    """
    arr = np.array(image, dtype=np.float64, copy=copy)
    if arr.ndim not in (2, 3):
        raise InvalidInputError(f"charge image must be 2D or 3D, got {arr.ndim}D")
    if arr.size == 0:
        raise InvalidInputError("charge image is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("charge image contains non-finite values")
    if arr.min() < -1.0 or arr.max() > 1.0:
        raise InvalidInputError("charge image values must lie in [-1, 1]")
    return arr


def check_mask(mask, *, name="mask", allow_border=True):
    arr = np.asarray(mask)
    if arr.ndim not in (2, 3):
        raise InvalidInputError(f"{name} must be 2D or 3D, got {arr.ndim}D")
    arr = arr.astype(bool)
    if not arr.any():
        raise InvalidInputError(f"{name} is empty")
    if not allow_border and touches_border(arr):
        raise InvalidInputError(f"{name} touches the image border")
    return arr


def touches_border(mask):
    mask = np.asarray(mask, dtype=bool)
    for axis in range(mask.ndim):
        if mask.take(0, axis=axis).any() or mask.take(-1, axis=axis).any():
            return True
    return False


def check_same_shape(a, b, names=("a", "b")):
    if np.shape(a) != np.shape(b):
        raise InvalidInputError(
            f"{names[0]} shape {np.shape(a)} does not match {names[1]} shape {np.shape(b)}"
        )
