# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import warnings
from dataclasses import dataclass, field

import numdifftools as nd
import numpy as np
from scipy import stats
from scipy.optimize import minimize
from scipy.special import expit, logit

from q2_ctre.mittag_leffler import MLParams, ml_logpdf
from q2_ctre.utils import positive_array

BETA_FLOOR = 1e-3
METHODS = ("logmoment", "mle")

_CLAMP_TOL = 1e-12
_HESSIAN_STEP = 1e-4
_GRAD_TOL = 1e-8
_BOUNDARY_TOL = 1e-6
_Z95 = stats.norm.ppf(0.975)


@dataclass(frozen=True)
class MLFit:
    params: MLParams
    ci_beta: tuple
    ci_sigma: tuple
    loglik: float
    method: str
    n: int
    cov: np.ndarray = field(default=None, repr=False, compare=False)
    clamped: bool = False
    boundary: bool = False
    converged: bool = True
    message: str = ""
    grad_norm: float = float("nan")

    def to_dict(self):
        def _clean(value):
            value = float(value)
            return value if np.isfinite(value) else None

        cov = None
        if self.cov is not None and np.all(np.isfinite(self.cov)):
            cov = [[float(v) for v in row] for row in np.asarray(self.cov)]
        return {
            "method": self.method,
            "n": int(self.n),
            "beta": self.params.beta,
            "sigma": self.params.sigma,
            "beta_lo": _clean(self.ci_beta[0]),
            "beta_hi": _clean(self.ci_beta[1]),
            "sigma_lo": _clean(self.ci_sigma[0]),
            "sigma_hi": _clean(self.ci_sigma[1]),
            "loglik": _clean(self.loglik),
            "cov_beta_logsigma": cov,
            "clamped": bool(self.clamped),
            "boundary": bool(self.boundary),
            "converged": bool(self.converged),
            "message": self.message,
            "grad_norm": _clean(self.grad_norm),
        }

    @classmethod
    def from_dict(cls, data):
        def _value(key):
            value = data.get(key)
            return float("nan") if value is None else float(value)

        cov = data.get("cov_beta_logsigma")
        return cls(
            params=MLParams(data["beta"], data["sigma"]),
            ci_beta=(_value("beta_lo"), _value("beta_hi")),
            ci_sigma=(_value("sigma_lo"), _value("sigma_hi")),
            loglik=_value("loglik"),
            method=data["method"],
            n=int(data["n"]),
            cov=None if cov is None else np.asarray(cov, dtype=float),
            clamped=bool(data.get("clamped", False)),
            boundary=bool(data.get("boundary", False)),
            converged=bool(data.get("converged", True)),
            message=data.get("message", ""),
            grad_norm=_value("grad_norm"),
        )


@dataclass(frozen=True)
class TailEstimate:
    alpha_hat: float
    cutoff: int
    per_cutoff: tuple


@dataclass(frozen=True)
class LikelihoodRatioTest:
    deviance: float
    p_value: float
    loglik_ml: float
    loglik_exponential: float
    fit: MLFit

    def to_dict(self):
        return {
            "deviance": float(self.deviance),
            "p_value": float(self.p_value),
            "loglik_ml": float(self.loglik_ml),
            "loglik_exponential": float(self.loglik_exponential),
        }


def loglik_ml(sample, params):
    return float(np.sum(ml_logpdf(positive_array(sample, "durations"), params)))


def loglik_exponential(sample):
    """Exponential log-likelihood at the maximum-likelihood scale (the mean)."""
    arr = positive_array(sample, "durations")
    return float(-arr.size * (np.log(arr.mean()) + 1.0))


def _beta_interval(beta, var_beta):
    if not (np.isfinite(var_beta) and var_beta >= 0):
        return (BETA_FLOOR, 1.0)
    half = _Z95 * np.sqrt(var_beta)
    return (max(BETA_FLOOR, beta - half), min(1.0, beta + half))


def _sigma_interval(sigma, var_log_sigma):
    if not (np.isfinite(var_log_sigma) and var_log_sigma >= 0):
        return (float("nan"), float("nan"))
    half = _Z95 * np.sqrt(var_log_sigma)
    return (sigma * np.exp(-half), sigma * np.exp(half))


def logmoment_fit(sample):
    """Method of log-transformed moments.

    With m and s2 the mean and variance of ln T, beta = pi * sqrt(2 / (6 s2 +
    pi**2)) and ln sigma = m + euler_gamma. Intervals use the delta method on
    the asymptotic normal law of (m, s2).
    """
    arr = positive_array(sample, "durations", min_size=2)
    logs = np.log(arr)
    n = logs.size
    mean = logs.mean()
    s2 = logs.var(ddof=1)
    if not s2 > 0:
        raise ValueError(
            "The log-durations have zero variance; the log-moment estimate is "
            "undefined."
        )

    denom = 6.0 * s2 + np.pi**2
    beta_raw = np.pi * np.sqrt(2.0 / denom)
    clamped = beta_raw > 1.0 + _CLAMP_TOL or beta_raw < BETA_FLOOR
    beta = float(np.clip(beta_raw, BETA_FLOOR, 1.0))
    if clamped:
        warnings.warn(
            "The log-moment estimate of beta fell outside (0, 1] and was clamped.",
            UserWarning,
        )
    log_sigma = mean + np.euler_gamma

    centered = logs - mean
    mu3 = np.mean(centered**3)
    mu4 = np.mean(centered**4)
    d_beta = -3.0 * np.pi * np.sqrt(2.0) * denom**-1.5
    var_s2 = max(mu4 - s2**2, 0.0) / n
    var_beta = d_beta**2 * var_s2
    var_log_sigma = s2 / n
    cov_bl = d_beta * mu3 / n
    cov = np.array([[var_beta, cov_bl], [cov_bl, var_log_sigma]])

    params = MLParams(beta, float(np.exp(log_sigma)))
    return MLFit(
        params=params,
        ci_beta=_beta_interval(beta, var_beta),
        ci_sigma=_sigma_interval(params.sigma, var_log_sigma),
        loglik=loglik_ml(arr, params),
        method="logmoment",
        n=n,
        cov=cov,
        clamped=bool(clamped),
        boundary=beta >= 1.0 - _BOUNDARY_TOL,
    )


def _to_params(theta):
    beta = BETA_FLOOR + (1.0 - BETA_FLOOR) * expit(theta[0])
    return MLParams(min(float(beta), 1.0), float(np.exp(theta[1])))


def _to_theta(params):
    beta = min(params.beta, 0.99)
    return np.array(
        [logit((beta - BETA_FLOOR) / (1.0 - BETA_FLOOR)), np.log(params.sigma)]
    )


def _mean_nll(y):
    def func(theta):
        value = -np.mean(ml_logpdf(y, _to_params(theta)))
        return value if np.isfinite(value) else np.inf

    return func


def _total_nll(y):
    def func(x):
        beta = min(float(x[0]), 1.0)
        return -np.sum(ml_logpdf(y, MLParams(beta, float(np.exp(x[1])))))

    return func


def _observed_covariance(y, params):
    beta = min(params.beta, 1.0 - 2 * _HESSIAN_STEP)
    point = np.array([beta, np.log(params.sigma)])
    try:
        hess = nd.Hessian(_total_nll(y), step=_HESSIAN_STEP)(point)
        cov = np.linalg.solve(hess, np.identity(2))
    except (ValueError, np.linalg.LinAlgError):
        return np.full((2, 2), np.nan)
    if not np.all(np.isfinite(cov)) or cov[0, 0] <= 0 or cov[1, 1] <= 0:
        return np.full((2, 2), np.nan)
    return cov


def mle_fit(sample, init=None):
    """Maximum-likelihood fit of ML(beta, sigma).

    The data are standardized by their geometric mean and the mean negative
    log-likelihood is minimized with Nelder-Mead in (logit beta, ln sigma),
    then polished with BFGS on a numerical gradient. The returned estimate is
    the best of the optimizer result, the exponential boundary and the
    starting point.
    """
    arr = positive_array(sample, "durations", min_size=2)
    n = arr.size
    ref = float(np.exp(np.mean(np.log(arr))))
    y = arr / ref

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        start = logmoment_fit(y).params
    if init is not None:
        start = MLParams(init.beta, init.sigma / ref)

    objective = _mean_nll(y)
    theta0 = _to_theta(start)
    simplex = np.vstack([theta0, theta0 + [0.5, 0.0], theta0 + [0.0, 0.25]])
    res = minimize(
        objective,
        theta0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": 1e-10,
            "fatol": 1e-14,
            "maxiter": 4000,
            "maxfev": 8000,
        },
    )
    gradient = nd.Gradient(objective)
    polish = minimize(
        objective, res.x, jac=gradient, method="BFGS", options={"gtol": 1e-10}
    )
    if np.isfinite(polish.fun) and polish.fun <= res.fun:
        res = polish
    grad_norm = float(np.linalg.norm(gradient(res.x)))
    converged = grad_norm < _GRAD_TOL

    candidates = [
        _to_params(res.x),
        MLParams(1.0, float(y.mean())),
        start,
    ]
    logliks = [float(np.sum(ml_logpdf(y, c))) for c in candidates]
    best = int(np.nanargmax(logliks))
    params_y = candidates[best]
    boundary = params_y.beta >= 1.0 - _BOUNDARY_TOL

    if boundary:
        warnings.warn(
            "The maximum-likelihood estimate lies on the exponential boundary "
            "beta = 1.",
            UserWarning,
        )
    if not converged:
        warnings.warn(
            f"Maximum-likelihood optimization did not converge ({res.message}); "
            "the best point found is reported.",
            UserWarning,
        )

    cov = _observed_covariance(y, params_y)
    params = MLParams(params_y.beta, params_y.sigma * ref)
    return MLFit(
        params=params,
        ci_beta=_beta_interval(params.beta, cov[0, 0]),
        ci_sigma=_sigma_interval(params.sigma, cov[1, 1]),
        loglik=logliks[best] - n * np.log(ref),
        method="mle",
        n=n,
        cov=cov,
        clamped=False,
        boundary=bool(boundary),
        converged=converged,
        message=str(res.message),
        grad_norm=grad_norm,
    )


def fit(sample, method="logmoment"):
    if method == "logmoment":
        return logmoment_fit(sample)
    if method == "mle":
        return mle_fit(sample)
    raise ValueError(f"Unknown fit method {method!r}; choose one of {METHODS}.")


def lr_test_exponential(sample):
    """Likelihood-ratio test of ML(beta, sigma) against the exponential law.

    The p-value uses the chi-squared law with one degree of freedom even
    though beta = 1 lies on the boundary of the parameter space.
    """
    arr = positive_array(sample, "durations")
    if arr.size < 10:
        raise ValueError(
            f"The likelihood-ratio test needs at least 10 durations, got {arr.size}."
        )
    ml = mle_fit(arr)
    ll_exp = loglik_exponential(arr)
    deviance = max(2.0 * (ml.loglik - ll_exp), 0.0)
    return LikelihoodRatioTest(
        deviance=deviance,
        p_value=float(stats.chi2.sf(deviance, 1)),
        loglik_ml=ml.loglik,
        loglik_exponential=ll_exp,
        fit=ml,
    )


def qq_tail_estimate(sample, cutoffs):
    """QQ-estimator of a power-law tail exponent.

    For each cutoff c the logarithms of the c largest values are regressed on
    the exponential quantiles -ln(i / (c + 1)); the reciprocal slope is the
    tail exponent. The static estimate is the one at the largest cutoff.
    """
    arr = positive_array(sample, "values")
    cutoffs = sorted({int(c) for c in np.atleast_1d(cutoffs)})
    if not cutoffs:
        raise ValueError("At least one cutoff is required.")
    if cutoffs[0] < 3 or cutoffs[-1] > arr.size:
        raise ValueError(
            f"Cutoffs must lie in [3, {arr.size}], got {cutoffs[0]}..{cutoffs[-1]}."
        )

    descending = np.sort(arr)[::-1]
    per_cutoff = []
    for c in cutoffs:
        i = np.arange(1, c + 1)
        slope = stats.linregress(-np.log(i / (c + 1)), np.log(descending[:c])).slope
        if not slope > 0:
            raise ValueError(
                f"The {c} largest values carry no tail information "
                f"(fitted slope {slope})."
            )
        per_cutoff.append((c, 1.0 / slope))
    return TailEstimate(
        alpha_hat=per_cutoff[-1][1],
        cutoff=per_cutoff[-1][0],
        per_cutoff=tuple(per_cutoff),
    )
