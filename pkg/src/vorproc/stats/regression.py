from dataclasses import dataclass

import numpy as np


@dataclass
class RegressionFit:
    degree: int
    coef: np.ndarray  # increasing powers: c0 + c1 x + ...
    rss: float  # weighted residual sum of squares

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coef)


def weighted_poly_regression(xs, ys, weights, degree=3):
    """Minimise sum w_i (y_i - p(x_i))^2 over polynomials p of the given degree."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    w = np.asarray(weights, dtype=float)
    if not (x.shape == y.shape == w.shape):
        raise ValueError("xs, ys and weights must have the same length")
    if len(x) < degree + 1:
        raise ValueError(f"need at least {degree + 1} points for degree {degree}")
    if np.any(~(w > 0)) or np.any(~np.isfinite(w)):
        raise ValueError("weights must be positive and finite")
    X = np.vander(x, degree + 1, increasing=True)
    sw = np.sqrt(w)
    A = X * sw[:, None]
    coef, _, rank, _ = np.linalg.lstsq(A, y * sw, rcond=None)
    if rank < degree + 1:
        raise np.linalg.LinAlgError("rank-deficient design")
    resid = y - X @ coef
    return RegressionFit(degree, coef, float(np.sum(w * resid ** 2)))


def smooth_ln_j(curve, degree=3):
    """Weighted polynomial fit to ln J-hat on the curve's mask.

    Weights are reciprocal delta-method standard deviations of ln J-hat;
    zero-sd points (e.g. r = 0, where every draw gives J = 1) take the
    smallest positive sd on the curve.
    """
    m = curve.mask & np.isfinite(curve.lnJ)
    sd = curve.sd_lnJ[m]
    pos = sd[sd > 0]
    floor = pos.min() if pos.size else 1.0
    sd = np.where(sd > 0, sd, floor)
    return weighted_poly_regression(curve.r[m], curve.lnJ[m], 1.0 / sd, degree)
