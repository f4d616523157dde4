"""Direct-summation reference potentials.

Slow on purpose: every output pixel sums the contribution of every charge,
so these functions are capped at 4096 grid points and used only to check
the convolution engines and pin sign conventions.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import BudgetExceededError, InvalidInputError
from .kernels import potential_profile

__all__ = [
    "MAX_GRID_POINTS",
    "PointCharge",
    "Dipole",
    "charges_from_image",
    "brute_force_potential",
    "brute_force_dipole_potential",
]

MAX_GRID_POINTS = 64 * 64


@dataclass(frozen=True)
class PointCharge:
    """A charge at an array index ``(row, col)`` or ``(plane, row, col)``."""

    position: tuple
    charge: float = 1.0


@dataclass(frozen=True)
class Dipole:
    """A pixel dipole; ``theta`` is the placement angle in the x/y plane.

    The dipole is realised as two monopoles of charge ``+strength`` and
    ``-strength`` one pixel away from ``position`` along
    ``(-sin theta, cos theta)`` in x/y, i.e. perpendicular to ``theta``.
    """

    position: tuple
    theta: float = 0.0
    strength: float = 1.0


def _check_budget(shape):
    shape = tuple(int(s) for s in shape)
    if len(shape) not in (2, 3):
        raise InvalidInputError(f"oracle grids must be 2D or 3D, got {shape}")
    if int(np.prod(shape)) > MAX_GRID_POINTS:
        raise BudgetExceededError(
            f"grid {shape} exceeds the oracle budget of {MAX_GRID_POINTS} points"
        )
    return shape


def charges_from_image(image):
    image = np.asarray(image, dtype=np.float64)
    return [PointCharge(tuple(int(i) for i in idx), float(image[idx])) for idx in zip(*np.nonzero(image))]


def _sum_sources(positions, charges, shape, n):
    grid = np.indices(shape, dtype=np.float64).reshape(len(shape), -1).T
    if len(charges) == 0:
        return np.zeros(shape)
    positions = np.asarray(positions, dtype=np.float64)
    charges = np.asarray(charges, dtype=np.float64)
    diff = grid[:, None, :] - positions[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    contrib = charges[None, :] * potential_profile(r, n)
    # order-independent: sort each row by |c| then by value before reducing
    order = np.lexsort((contrib, np.abs(contrib)), axis=-1)
    contrib = np.take_along_axis(contrib, order, axis=-1)
    return contrib.sum(axis=-1).reshape(shape)


def brute_force_potential(charges, shape, n=3.0):
    """Potential ``sum_i q_i f(max(|p - p_i|, 1))`` at every grid point."""
    shape = _check_budget(shape)
    positions, values = [], []
    for c in charges:
        pos = tuple(c.position)
        if len(pos) != len(shape) or any(not 0 <= p < s for p, s in zip(pos, shape)):
            raise InvalidInputError(f"charge position {pos} outside grid {shape}")
        positions.append(pos)
        values.append(float(c.charge))
    return _sum_sources(positions, values, shape, n)


def brute_force_dipole_potential(dipoles, shape, n=2.0):
    shape = _check_budget(shape)
    if len(shape) != 2:
        raise InvalidInputError("dipoles are only defined on 2D grids")
    positions, values = [], []
    for d in dipoles:
        row, col = d.position
        # x/y offset (-sin, cos) written as (row, col)
        off = np.array([np.cos(d.theta), -np.sin(d.theta)])
        base = np.array([row, col], dtype=np.float64)
        positions += [base + off, base - off]
        values += [float(d.strength), -float(d.strength)]
    return _sum_sources(positions, values, shape, n)
