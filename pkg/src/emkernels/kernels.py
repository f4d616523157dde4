"""Potential kernels of single particles sampled on odd grids.

Axis convention used across the package: the last axis is ``x`` (columns),
the one before it is ``y`` (rows, increasing downward) and, for 3D grids,
axis 0 is ``z``.  Offsets are written ``(dx, dy[, dz])``.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import InvalidSpecError, check_dimension, check_odd_shape

__all__ = [
    "KINDS",
    "KernelSpec",
    "PotentialKernel",
    "distance_grid",
    "potential_profile",
    "monopole_kernel",
    "dipole_kernels",
    "complex_dipole_kernel",
    "derivative_kernels",
    "full_kernel_shape",
    "build_kernel",
]

KINDS = ("monopole", "dipole_x", "dipole_y", "complex_dipole")


@dataclass(frozen=True)
class KernelSpec:
    shape: tuple
    n: float = 3.0
    kind: str = "monopole"

    def __post_init__(self):
        object.__setattr__(self, "shape", check_odd_shape(self.shape))
        object.__setattr__(self, "n", check_dimension(self.n))
        if self.kind not in KINDS:
            raise InvalidSpecError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")

    @property
    def center(self):
        return tuple(s // 2 for s in self.shape)


@dataclass(frozen=True, eq=False)
class PotentialKernel:
    """An immutable kernel grid together with the spec that produced it."""

    values: np.ndarray
    spec: KernelSpec

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.shape != self.spec.shape:
            raise InvalidSpecError(
                f"kernel values shape {values.shape} does not match spec shape {self.spec.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape

    @property
    def ndim(self):
        return self.values.ndim

    @property
    def center_value(self):
        return self.values[self.spec.center]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def distance_grid(shape):
    """Euclidean distance of every element from the center of an odd grid."""
    shape = check_odd_shape(shape)
    axes = [np.arange(s, dtype=np.float64) - s // 2 for s in shape]
    grids = np.meshgrid(*axes, indexing="ij")
    sq = np.zeros(shape)
    for g in grids:
        sq += g * g
    return np.sqrt(sq)


def potential_profile(r, n):
    """Potential of a unit charge at distance ``r`` in dimension ``n``.

    The distance is clamped to ``max(r, 1)`` so the value at the particle
    itself stays finite: ``r**(2 - n)`` for ``n != 2`` and ``-ln(r)`` for
    ``n == 2``.
    """
    n = check_dimension(n)
    r = np.maximum(np.asarray(r, dtype=np.float64), 1.0)
    if n == 2.0:
        return -np.log(r)
    return r ** (2.0 - n)


def monopole_kernel(spec):
    if spec.kind != "monopole":
        raise InvalidSpecError(f"monopole_kernel needs kind='monopole', got {spec.kind!r}")
    return PotentialKernel(potential_profile(distance_grid(spec.shape), spec.n), spec)


def _shifted_difference(values, axis):
    # out[i] = values[i + 1] - values[i - 1], zero outside the grid
    out = np.zeros_like(values)
    n = values.shape[axis]
    if n < 3:
        return out
    hi = [slice(None)] * values.ndim
    lo = [slice(None)] * values.ndim
    mid = [slice(None)] * values.ndim
    hi[axis], lo[axis], mid[axis] = slice(2, None), slice(None, -2), slice(1, -1)
    out[tuple(mid)] = values[tuple(hi)] - values[tuple(lo)]
    first = [slice(None)] * values.ndim
    last = [slice(None)] * values.ndim
    first[axis], last[axis] = 0, n - 1
    one = [slice(None)] * values.ndim
    penult = [slice(None)] * values.ndim
    one[axis], penult[axis] = 1, n - 2
    out[tuple(first)] = values[tuple(one)]
    out[tuple(last)] = -values[tuple(penult)]
    return out


def dipole_kernels(mono):
    """Horizontal and vertical dipole kernels derived from a 2D monopole kernel.

    ``dipole_x`` applies the stencil ``[-1, 0, 1]`` along x with zero padding,
    so ``dipole_x(dx, dy) = mono(dx + 1, dy) - mono(dx - 1, dy)``: a positive
    pole one pixel toward -x and a negative pole one pixel toward +x.
    ``dipole_y`` is the negated transpose.  For non-square kernels the same
    relation is evaluated element-wise along y, which keeps the kernel the
    same size as the monopole.
    """
    if mono.spec.kind != "monopole":
        raise InvalidSpecError("dipole_kernels expects a monopole kernel")
    if mono.ndim != 2:
        raise InvalidSpecError("dipole kernels are only defined for 2D kernels")
    vals = mono.values
    kx = _shifted_difference(vals, axis=1)
    if vals.shape[0] == vals.shape[1]:
        ky = -kx.T
    else:
        ky = -_shifted_difference(vals, axis=0)
    spec = mono.spec
    return (
        PotentialKernel(kx, KernelSpec(spec.shape, spec.n, "dipole_x")),
        PotentialKernel(ky, KernelSpec(spec.shape, spec.n, "dipole_y")),
    )


def complex_dipole_kernel(kx, ky):
    """Complex kernel ``kx + i*ky`` used by the magnetic convolution."""
    if kx.shape != ky.shape:
        raise InvalidSpecError(f"dipole kernel shapes differ: {kx.shape} vs {ky.shape}")
    if kx.spec.n != ky.spec.n:
        raise InvalidSpecError("dipole kernels were built with different n")
    values = kx.values + 1j * ky.values
    return PotentialKernel(values, KernelSpec(kx.spec.shape, kx.spec.n, "complex_dipole"))


def derivative_kernels(ndim=2):
    """Second-order central difference stencils ``1/2 [-1, 0, 1]``, one per axis.

    Returned in ``(x, y[, z])`` order, each shaped to broadcast along its axis
    of an ``ndim`` grid (``x`` is a 1x3 row, ``y`` a 3x1 column).
    """
    if ndim not in (2, 3):
        raise InvalidSpecError(f"ndim must be 2 or 3, got {ndim}")
    base = 0.5 * np.array([-1.0, 0.0, 1.0])
    stencils = []
    for axis in reversed(range(ndim)):
        shape = [1] * ndim
        shape[axis] = 3
        stencils.append(base.reshape(shape))
    return tuple(stencils)


def full_kernel_shape(image_shape):
    """Kernel extents ``2N + 1`` per axis, large enough to avoid truncation."""
    return tuple(2 * int(s) + 1 for s in image_shape)


def build_kernel(image_shape, n, kind="monopole", size=None):
    """Build a kernel sized for ``image_shape`` (or ``size`` if given)."""
    if size is None:
        shape = full_kernel_shape(image_shape)
    else:
        shape = tuple(np.broadcast_to(np.asarray(size, dtype=int), (len(image_shape),)))
    mono = monopole_kernel(KernelSpec(shape, n, "monopole"))
    if kind == "monopole":
        return mono
    kx, ky = dipole_kernels(mono)
    if kind == "dipole_x":
        return kx
    if kind == "dipole_y":
        return ky
    if kind == "complex_dipole":
        return complex_dipole_kernel(kx, ky)
    raise InvalidSpecError(f"unknown kernel kind {kind!r}")
