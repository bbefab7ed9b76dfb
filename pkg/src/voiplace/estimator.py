"""Scikit-learn style front end for the region search."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .metrics import ConventionalParams, ProposedParams
from .rotation import rotate_labels
from .search import SearchConfig, search_region
from .volume import as_label_volume


class RegionSearch(TransformerMixin, BaseEstimator):
    """Find the best oriented box region in a binary 3D tumor mask.

    ``fit`` runs the coordinate-descent search on one volume and stores
    the found region as fitted attributes; ``transform`` extracts the
    region's voxels from a volume. Inputs may be LabelVolume instances
    or plain 3D arrays indexed [z, y, x] (then ``spacing_mm`` applies).

    Parameters mirror the search configuration; see SearchConfig and
    the metric parameter classes for semantics. All parameters are
    validated at fit time, per scikit-learn convention.

    Attributes set by fit: ``offset_``, ``size_vox_``, ``size_mm_``,
    ``angles_deg_``, ``tumor_sum_``, ``fraction_``, ``cost_``,
    ``corners_mm_``, ``n_evaluations_``, ``result_``.
    """

    def __init__(
        self,
        metric="proposed",
        target_size_mm=(20.0, 20.0, 20.0),
        f_target=0.9,
        lambda1=1e-6,
        lambda2=0.01,
        beta=0.1,
        sigma_r=1000.0,
        sigma_f=1.0,
        size_min_mm=5.0,
        size_max_mm=50.0,
        size_step_mm=1.0,
        angle_candidates=9,
        angle_step_first_deg=5.0,
        angle_step_rest_deg=5.0 / 9.0,
        iterations=2,
        offset_mode="full3d",
        threads=None,
        spacing_mm=(1.0, 1.0, 1.0),
    ):
        self.metric = metric
        self.target_size_mm = target_size_mm
        self.f_target = f_target
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.beta = beta
        self.sigma_r = sigma_r
        self.sigma_f = sigma_f
        self.size_min_mm = size_min_mm
        self.size_max_mm = size_max_mm
        self.size_step_mm = size_step_mm
        self.angle_candidates = angle_candidates
        self.angle_step_first_deg = angle_step_first_deg
        self.angle_step_rest_deg = angle_step_rest_deg
        self.iterations = iterations
        self.offset_mode = offset_mode
        self.threads = threads
        self.spacing_mm = spacing_mm

    def _build_config(self) -> SearchConfig:
        target = tuple(float(t) for t in self.target_size_mm)
        if self.metric == "proposed":
            params = ProposedParams(
                target_mm=target, f_target=self.f_target, lambda2=self.lambda2, beta=self.beta
            )
        elif self.metric == "conventional":
            params = ConventionalParams(
                target_mm=target,
                f_target=self.f_target,
                lambda1=self.lambda1,
                sigma_r=self.sigma_r,
                sigma_f=self.sigma_f,
            )
        else:
            raise ValueError(f"metric must be 'proposed' or 'conventional', got {self.metric!r}")
        return SearchConfig(
            metric=params,
            size_min_mm=self.size_min_mm,
            size_max_mm=self.size_max_mm,
            size_step_mm=self.size_step_mm,
            angle_candidates=self.angle_candidates,
            angle_step_first_deg=self.angle_step_first_deg,
            angle_step_rest_deg=self.angle_step_rest_deg,
            iterations=self.iterations,
            offset_mode=self.offset_mode,
            threads=self.threads,
        )

    def fit(self, X, y=None):
        vol = as_label_volume(X, self.spacing_mm)
        result = search_region(vol, self._build_config())
        self.result_ = result
        self.dims_ = vol.dims
        self.offset_ = result.region.offset_vox
        self.size_vox_ = result.region.size_vox
        self.size_mm_ = result.size_mm
        self.angles_deg_ = result.region.angles_deg
        self.tumor_sum_ = result.tumor_sum
        self.fraction_ = result.fraction
        self.cost_ = result.cost
        self.corners_mm_ = result.world_corners_mm
        self.n_evaluations_ = result.evaluations
        return self

    def transform(self, X) -> np.ndarray:
        """Crop the fitted region out of a volume.

        The volume is resampled into the fitted orientation and the
        region box is sliced out; returns an array of shape
        (Rz, Ry, Rx).
        """
        if not hasattr(self, "result_"):
            raise NotFittedError("RegionSearch.transform called before fit")
        vol = as_label_volume(X, self.spacing_mm)
        if vol.dims != self.dims_:
            raise ValueError(f"volume dims {vol.dims} differ from fitted dims {self.dims_}")
        rotated = rotate_labels(vol, self.angles_deg_)
        vx, vy, vz = self.offset_
        rx, ry, rz = self.size_vox_
        return np.asarray(rotated.data[vz : vz + rz, vy : vy + ry, vx : vx + rx])
