"""Apply potential kernels to charge images.

Convolutions are "same"-sized with zero padding outside the image (empty
space carries no charge).  Two engines are available: a real/complex FFT
path for large kernels and a direct shift-and-add path used for small
kernels and as a cross-check.
"""

from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft
from scipy import ndimage as ndi

from ._validation import (
    InvalidInputError,
    check_charge_image,
    check_dimension,
    check_mask,
    touches_border,
)
from .kernels import (
    PotentialKernel,
    _shifted_difference,
    build_kernel,
)

__all__ = [
    "FieldMap",
    "MagneticResult",
    "GaussReport",
    "convolve_same",
    "electric_potential",
    "field_from_potential",
    "electric_field",
    "density_factor",
    "magnetic_potential",
    "check_gauss_closure",
]

ENGINES = ("auto", "fft", "direct")
DIRECT_MAX_EXTENT = 15


@dataclass(frozen=True, eq=False)
class FieldMap:
    """Potential plus field components, magnitude and (2D only) angle."""

    V: np.ndarray
    components: tuple
    magnitude: np.ndarray
    theta: np.ndarray | None = None

    @property
    def Ex(self):
        return self.components[0]

    @property
    def Ey(self):
        return self.components[1]

    @property
    def Ez(self):
        return self.components[2] if len(self.components) > 2 else None


@dataclass(frozen=True, eq=False)
class MagneticResult:
    V_perp: np.ndarray
    V_par: np.ndarray


@dataclass(frozen=True)
class GaussReport:
    flux: float
    interior_field_max: float


def _kernel_values(kernel):
    if isinstance(kernel, PotentialKernel):
        return kernel.values
    values = np.asarray(kernel)
    if any(s % 2 == 0 for s in values.shape):
        raise InvalidInputError(f"kernel extents must be odd, got {values.shape}")
    return values


def _fft_convolve_same(image, kernel):
    full = [i + k - 1 for i, k in zip(image.shape, kernel.shape)]
    is_real = not (np.iscomplexobj(image) or np.iscomplexobj(kernel))
    fshape = [sp_fft.next_fast_len(s, real=is_real) for s in full]
    axes = tuple(range(image.ndim))
    if is_real:
        spec = sp_fft.rfftn(image, fshape, axes=axes) * sp_fft.rfftn(kernel, fshape, axes=axes)
        out = sp_fft.irfftn(spec, fshape, axes=axes)
    else:
        spec = sp_fft.fftn(image, fshape, axes=axes) * sp_fft.fftn(kernel, fshape, axes=axes)
        out = sp_fft.ifftn(spec, fshape, axes=axes)
    crop = tuple(slice((k - 1) // 2, (k - 1) // 2 + i) for i, k in zip(image.shape, kernel.shape))
    return np.ascontiguousarray(out[crop])


def _direct_convolve_same(image, kernel):
    dtype = np.result_type(image.dtype, kernel.dtype, np.float64)
    out = np.zeros(image.shape, dtype=dtype)
    center = [k // 2 for k in kernel.shape]
    for q in zip(*np.nonzero(image)):
        out_sl, ker_sl = [], []
        for qi, ci, ni, ki in zip(q, center, image.shape, kernel.shape):
            # output p uses kernel index p - q + c
            lo = max(0, qi - ci)
            hi = min(ni, qi - ci + ki)
            if lo >= hi:
                break
            out_sl.append(slice(lo, hi))
            ker_sl.append(slice(lo - qi + ci, hi - qi + ci))
        else:
            out[tuple(out_sl)] += image[q] * kernel[tuple(ker_sl)]
    return out


def convolve_same(image, kernel, engine="auto"):
    """Convolve ``image`` with an odd-sized ``kernel``, keeping the image size.

    ``out[p] = sum_q image[q] * kernel[p - q + center]`` with zero charge
    outside the image.  ``engine`` is ``"fft"``, ``"direct"`` or ``"auto"``
    (direct when every kernel extent is at most 15).
    """
    image = np.asarray(image)
    values = _kernel_values(kernel)
    if image.ndim != values.ndim:
        raise InvalidInputError(
            f"image rank {image.ndim} does not match kernel rank {values.ndim}"
        )
    if engine not in ENGINES:
        raise InvalidInputError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if engine == "auto":
        engine = "direct" if max(values.shape) <= DIRECT_MAX_EXTENT else "fft"
    if not np.iscomplexobj(image):
        image = image.astype(np.float64, copy=False)
    if engine == "fft":
        out = _fft_convolve_same(image, values)
    else:
        out = _direct_convolve_same(image, values)
    if not (np.iscomplexobj(image) or np.iscomplexobj(values)):
        out = np.real(out)
    return out


def electric_potential(image, n=3.0, kernel_size=None, engine="auto"):
    """Potential of a charge image: the image convolved with a monopole kernel.

    The default kernel is ``2N + 1`` per axis, so every pixel sees every
    charge of the image.
    """
    img = check_charge_image(image)
    kernel = build_kernel(img.shape, check_dimension(n), "monopole", size=kernel_size)
    return convolve_same(img, kernel, engine=engine)


def field_from_potential(V):
    """Field ``E = -grad V`` from central differences with zero padding."""
    V = np.asarray(V, dtype=np.float64)
    if V.ndim not in (2, 3):
        raise InvalidInputError(f"potential must be 2D or 3D, got {V.ndim}D")
    if not np.all(np.isfinite(V)):
        raise InvalidInputError("potential contains non-finite values")
    components = tuple(-0.5 * _shifted_difference(V, axis) for axis in reversed(range(V.ndim)))
    magnitude = np.sqrt(sum(c * c for c in components))
    theta = np.arctan2(components[1], components[0]) if V.ndim == 2 else None
    return FieldMap(V=V, components=components, magnitude=magnitude, theta=theta)


def electric_field(image, n=3.0, kernel_size=None, engine="auto"):
    return field_from_potential(electric_potential(image, n, kernel_size, engine))


def density_factor(theta):
    """Pixels-per-length correction ``1 / max(|cos|, |sin|)``, in [1, sqrt(2)]."""
    theta = np.asarray(theta, dtype=np.float64)
    return 1.0 / np.maximum(np.abs(np.cos(theta)), np.abs(np.sin(theta)))


def _orientation_arrays(orient, shape):
    theta = getattr(orient, "theta", orient)
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != shape:
        raise InvalidInputError(f"orientation shape {theta.shape} does not match image {shape}")
    valid = getattr(orient, "valid", None)
    valid = np.isfinite(theta) if valid is None else np.asarray(valid, dtype=bool)
    return theta, valid & np.isfinite(theta)


def magnetic_potential(image, orient, n=2.0, kernel_size=None, engine="auto"):
    """Potential of per-pixel dipoles oriented by ``orient``.

    Each charged pixel becomes the complex charge ``I * F(theta) * exp(i theta)``
    which is convolved with the complex dipole kernel ``kx + i ky``.  With
    this kernel the real part of the product carries dipoles along ``theta``
    and the imaginary part dipoles rotated a quarter turn from it, so the
    result is rotated by ``-i`` before splitting: ``V_perp`` holds the
    potential of dipoles perpendicular to ``theta`` (positive pole on the
    ``(-sin theta, cos theta)`` side) and ``V_par`` that of dipoles along it.
    """
    img = check_charge_image(image)
    if img.ndim != 2:
        raise InvalidInputError("magnetic potentials are only defined for 2D images")
    theta, valid = _orientation_arrays(orient, img.shape)
    charged = img != 0
    if np.any(charged & ~valid):
        raise InvalidInputError("orientation is missing on charged pixels")
    safe_theta = np.where(charged, theta, 0.0)
    charge = np.where(
        charged,
        img * density_factor(safe_theta) * np.exp(1j * safe_theta),
        0.0,
    )
    kernel = build_kernel(img.shape, check_dimension(n), "complex_dipole", size=kernel_size)
    W = -1j * convolve_same(charge, kernel, engine=engine)
    return MagneticResult(V_perp=np.ascontiguousarray(W.real), V_par=np.ascontiguousarray(W.imag))


def _region_interior(region):
    structure = ndi.generate_binary_structure(region.ndim, 1)
    return ndi.binary_erosion(region, structure, border_value=0)


def check_gauss_closure(V, region_mask):
    """Discrete outward flux of ``E = -grad V`` through the boundary of a region.

    ``region_mask`` marks the enclosed pixels.  The flux sums
    ``V[inside] - V[outside]`` over every face between a region pixel and a
    4-connected (6 in 3D) outside neighbour.  ``interior_field_max`` is the
    largest ``|E|`` on region pixels that are not on its boundary.
    """
    V = np.asarray(V, dtype=np.float64)
    region = check_mask(region_mask, name="region_mask")
    if region.shape != V.shape:
        raise InvalidInputError("region mask and potential shapes differ")
    if touches_border(region):
        raise InvalidInputError("region mask touches the image border")
    flux = 0.0
    for axis in range(V.ndim):
        for step in (1, -1):
            neighbour_in = np.roll(region, -step, axis=axis)
            neighbour_V = np.roll(V, -step, axis=axis)
            faces = region & ~neighbour_in
            flux += float(np.sum(V[faces] - neighbour_V[faces]))
    interior = _region_interior(region)
    field = field_from_potential(V)
    interior_max = float(field.magnitude[interior].max()) if interior.any() else 0.0
    return GaussReport(flux=flux, interior_field_max=interior_max)
