"""scikit-learn style wrappers.

``X`` is always one clip: an array of shape ``(T, m, n)`` with gray values
in [0, 1] (a :class:`~cdnf.stimuli.FrameSequence` works too).  The detector
learns nothing; ``fit`` only validates the parameters and pins the frame
resolution so later calls can be checked against it.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DimensionError
from .field import SolverSettings
from .model import ModelParams, RunTrace, run_sequence
from .stimuli import RainParams, add_rain
from .validation import check_frames


class CDNFDetector(TransformerMixin, BaseEstimator):
    """Looming detector over ON/OFF-contrast and Summation neural fields.

    ``transform`` returns the integrated signal per frame, ``predict`` the
    binary collision alerts and ``decision_function`` the signal minus the
    alert threshold.

    Parameters
    ----------
    h : float, default=0.2
        Resting level shared by all three fields.
    sigma_c : float, default=1.0
        Spread of the 3x3 excitation kernel of the contrast fields.
    alpha_on, alpha_off : float, default=0.5
        Weights of the ON and OFF fields in the Summation drive.
    sigma1 : float, default=1/3
        Excitatory width of the Summation DoG; the inhibitory width is 3x.
    dog_radius : int, default=3
        Support radius of the DoG kernel.
    epsilon : float, default=0.006
        Alert margin above the resting signal 0.5.
    tol, max_iters, warm_start
        Fixed-point solver settings.
    integration_gate : {"positive", "above_h"}, default="positive"
        Level a Summation neuron must exceed to contribute to the signal.
    store_snapshots : bool, default=False
        Keep per-frame field arrays in ``trace_.snapshots``.
    """

    def __init__(
        self,
        h=0.2,
        sigma_c=1.0,
        alpha_on=0.5,
        alpha_off=0.5,
        sigma1=1.0 / 3.0,
        dog_radius=3,
        epsilon=0.006,
        tol=1e-6,
        max_iters=200,
        warm_start=True,
        integration_gate="positive",
        store_snapshots=False,
    ):
        self.h = h
        self.sigma_c = sigma_c
        self.alpha_on = alpha_on
        self.alpha_off = alpha_off
        self.sigma1 = sigma1
        self.dog_radius = dog_radius
        self.epsilon = epsilon
        self.tol = tol
        self.max_iters = max_iters
        self.warm_start = warm_start
        self.integration_gate = integration_gate
        self.store_snapshots = store_snapshots

    def _params(self) -> ModelParams:
        return ModelParams(
            h=self.h,
            sigma_c=self.sigma_c,
            alpha_on=self.alpha_on,
            alpha_off=self.alpha_off,
            sigma1=self.sigma1,
            dog_radius=self.dog_radius,
            epsilon=self.epsilon,
            solver=SolverSettings(self.tol, self.max_iters, self.warm_start),
            integration_gate=self.integration_gate,
        )

    def fit(self, X, y=None):
        X = check_frames(X)
        self.params_ = self._params()
        self.frame_shape_ = X.shape[1:]
        return self

    def _run(self, X) -> RunTrace:
        check_is_fitted(self, "params_")
        X = check_frames(X, min_frames=2)
        if X.shape[1:] != self.frame_shape_:
            raise DimensionError(f"clip resolution {X.shape[1:]} != fitted {self.frame_shape_}")
        self.trace_ = run_sequence(X, self.params_, snapshots=self.store_snapshots)
        return self.trace_

    def transform(self, X):
        """Integrated signal I_v for every frame, shape ``(T,)``."""
        return self._run(X).iv

    def decision_function(self, X):
        return self.transform(X) - self.params_.i_thre

    def predict(self, X):
        """Collision alert per frame (0/1), shape ``(T,)``."""
        return self._run(X).spikes.astype(int)

    def first_alert(self, X):
        """Frame index of the first alert, or ``None``."""
        return self._run(X).first_spike


class RainAugmenter(TransformerMixin, BaseEstimator):
    """Overlay synthetic rain streaks on every frame of a clip."""

    def __init__(
        self,
        droplets_per_frame=500,
        length_px=8,
        width_px=1,
        angle_jitter=0.1,
        gray_value=0.7,
        blur_sigma=0.8,
        blend_weight=0.5,
        seed=0,
    ):
        self.droplets_per_frame = droplets_per_frame
        self.length_px = length_px
        self.width_px = width_px
        self.angle_jitter = angle_jitter
        self.gray_value = gray_value
        self.blur_sigma = blur_sigma
        self.blend_weight = blend_weight
        self.seed = seed

    def fit(self, X=None, y=None):
        self.params_ = RainParams(**self.get_params())
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        return add_rain(X, self.params_).frames
