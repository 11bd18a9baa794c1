"""Gamma shape maximum likelihood."""
import numpy as np
from scipy import special


def digamma(x):
    return float(special.digamma(x))


def trigamma(x):
    return float(special.polygamma(1, x))


class GammaFitError(ValueError):
    pass


def gamma_shape_mle(samples, tol=1e-10, max_iter=100):
    """Shape k solving ln k - psi(k) = ln(mean) - mean(ln)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2 or np.any(~(x > 0)):
        raise GammaFitError("need at least two positive samples")
    s = np.log(x.mean()) - np.log(x).mean()
    if not s > 0:
        raise GammaFitError("samples are all equal; shape estimate diverges")
    k = (3.0 - s + np.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        f = np.log(k) - digamma(k) - s
        df = 1.0 / k - trigamma(k)
        # Newton step on 1/k stays positive and converges in a few iterations
        k_new = 1.0 / (1.0 / k + f / (k * k * df))
        if abs(k_new - k) <= tol * k_new:
            return float(k_new)
        k = k_new
    raise GammaFitError("Newton iteration did not converge")
