"""scikit-learn style facade over the discrete inversion.

``fit`` takes the measured object (a phantom, ball rows, or a sinogram) and
``predict`` evaluates the reconstruction at query points. There is no target
``y``: the estimator reproduces a fixed linear operator rather than learning
parameters, so only the calling convention carries over.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import InputError
from .kernel import build_kernel
from .phantom import Phantom, ball_list
from .reconstruct import AnalyticProvider, Sinogram, TableProvider, reconstruct_points
from .sphere_grid import SphereGrid

__all__ = ["DiscreteRadonInversion"]


class DiscreteRadonInversion(BaseEstimator):
    """Kernel-interpolated inversion of sampled 3-D plane integrals.

    Parameters
    ----------
    n_theta, n_gamma : int
        Longitude and latitude subdivisions of the direction grid.
    eps : float
        Affine sampling step.
    rho : float
        Affine offset in ``[0, 1)``.
    p_min, p_max : float
        Measured range of plane offsets.
    threads : int
        Worker threads; results are bit-identical for any value.

    Attributes
    ----------
    grid_ : SphereGrid
    kernel_ : Kernel
    provider_ : AnalyticProvider or TableProvider
    """

    def __init__(self, n_theta=500, n_gamma=500, eps=0.04, rho=0.0, p_min=-10.0, p_max=10.0, threads=1):
        self.n_theta = n_theta
        self.n_gamma = n_gamma
        self.eps = eps
        self.rho = rho
        self.p_min = p_min
        self.p_max = p_max
        self.threads = threads

    def fit(self, X, y=None):
        """Attach data.

        ``X`` is a :class:`Phantom`, an array of ``(cx, cy, cz, radius,
        density)`` rows, or a :class:`Sinogram` whose grid must match the
        parameters.
        """
        grid = SphereGrid(int(self.n_theta), int(self.n_gamma), float(self.eps), float(self.rho),
                          float(self.p_min), float(self.p_max))
        if isinstance(X, Sinogram):
            if X.grid != grid:
                raise InputError(f"sinogram grid {X.grid} does not match estimator parameters {grid}")
            provider = TableProvider(X)
        else:
            if not isinstance(X, Phantom):
                X = ball_list(check_array(X, ensure_min_features=5).tolist())
            provider = AnalyticProvider(X, grid)
        self.grid_ = grid
        self.kernel_ = build_kernel()
        self.provider_ = provider
        return self

    def predict(self, X) -> np.ndarray:
        """Reconstructed density at each row of ``X`` (shape ``(n, 3)``)."""
        check_is_fitted(self, "provider_")
        pts = check_array(X, dtype=np.float64)
        if pts.shape[1] != 3:
            raise InputError(f"expected points of shape (n, 3), got {pts.shape}")
        return reconstruct_points(self.provider_, self.kernel_, self.grid_, pts, threads=int(self.threads))
