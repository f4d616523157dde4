"""scikit-learn style wrappers around the functional API.

The estimators take a single image per call rather than a sample matrix:
``fit`` records the image-derived state, ``transform``/``predict`` return
grids of the same shape.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import InvalidInputError, check_charge_image, check_dimension, check_mask
from .fields import ENGINES, electric_potential, field_from_potential
from .shapes import DEFAULT_THRESHOLDS, classify_regions, contour_fields
from .strokes import (
    magnetize_stroke,
    resolve_repulsion,
    split_substrokes,
    stroke_orientation,
    thin,
)

__all__ = ["ElectricPotential", "ElectricField", "RegionDetector", "StrokeMagnetizer"]


def _check_engine(engine):
    if engine not in ENGINES:
        raise InvalidInputError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    return engine


class ElectricPotential(TransformerMixin, BaseEstimator):
    """Monopole potential ``V = I * P`` of a charge image."""

    def __init__(self, n=3.0, kernel_size=None, engine="auto"):
        self.n = n
        self.kernel_size = kernel_size
        self.engine = engine

    def fit(self, X, y=None):
        X = check_charge_image(X)
        check_dimension(self.n)
        _check_engine(self.engine)
        self.image_shape_ = X.shape
        return self

    def transform(self, X):
        check_is_fitted(self, "image_shape_")
        return electric_potential(X, self.n, kernel_size=self.kernel_size, engine=self.engine)


class ElectricField(ElectricPotential):
    """Returns the :class:`FieldMap` (potential, components, magnitude, angle)."""

    def transform(self, X):
        return field_from_potential(super().transform(X))


class RegionDetector(BaseEstimator):
    """Contour regions of interest of a binary shape.

    After ``fit`` the contour, potential, field magnitude and region set are
    available as ``contour_``, ``potential_``, ``field_`` and ``regions_``.
    ``predict`` returns the :class:`RegionSet` for a new mask.
    """

    def __init__(self, n=3.0, thresholds=None, growth_pct=0.05, kernel_size=None, engine="auto"):
        self.n = n
        self.thresholds = thresholds
        self.growth_pct = growth_pct
        self.kernel_size = kernel_size
        self.engine = engine

    def _detect(self, mask):
        mask = check_mask(mask)
        contour, V, E_mag = contour_fields(mask, self.n, self.kernel_size, _check_engine(self.engine))
        table = DEFAULT_THRESHOLDS if self.thresholds is None else self.thresholds
        return contour, V, E_mag, classify_regions(V, E_mag, contour, table, self.growth_pct)

    def fit(self, X, y=None):
        self.contour_, self.potential_, self.field_, self.regions_ = self._detect(X)
        return self

    def predict(self, X):
        check_is_fitted(self, "regions_")
        return self._detect(X)[3]

    def fit_predict(self, X, y=None):
        return self.fit(X).regions_


class StrokeMagnetizer(TransformerMixin, BaseEstimator):
    """Perpendicular magnetization of a stroke image.

    ``fit`` thins and splits the strokes, estimates their orientation and,
    when ``flips="repulsion"``, picks the repulsive flip assignment.
    ``transform`` returns ``V_perp`` for the fitted strokes.
    """

    def __init__(self, n=2.0, smoothing_radius=1, passes=3, flips="repulsion",
                 kernel_size=None, engine="auto"):
        self.n = n
        self.smoothing_radius = smoothing_radius
        self.passes = passes
        self.flips = flips
        self.kernel_size = kernel_size
        self.engine = engine

    def fit(self, X, y=None):
        mask = check_mask(X)
        if mask.ndim != 2:
            raise InvalidInputError("strokes must be 2D")
        check_dimension(self.n)
        _check_engine(self.engine)
        self.strokes_ = split_substrokes(thin(mask))
        self.orientation_ = stroke_orientation(self.strokes_, self.smoothing_radius, self.passes)
        if isinstance(self.flips, str):
            if self.flips != "repulsion":
                raise InvalidInputError(f"unknown flip strategy {self.flips!r}")
            self.flips_ = resolve_repulsion(
                self.strokes_, self.orientation_, self.n, self.kernel_size, self.engine
            )
        elif self.flips is None:
            self.flips_ = [False] * self.strokes_.count
        else:
            self.flips_ = [bool(f) for f in self.flips]
        return self

    def transform(self, X=None):
        check_is_fitted(self, "strokes_")
        if X is not None and np.shape(X) != self.strokes_.labels.shape:
            raise InvalidInputError("transform input shape differs from the fitted strokes")
        result = magnetize_stroke(
            self.strokes_, self.orientation_, self.flips_, self.n, self.kernel_size, self.engine
        )
        return result.V_perp
