# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, gammaln, hyp1f1, rgamma

from q2_ctre.simulation import stable_rand
from q2_ctre.utils import as_rng

_SERIES_MAX_X = 1.0
_SERIES_MAX_TERMS = 2000
_ASYMPTOTIC_TERMS = 64
_ASYMPTOTIC_RTOL = 1e-14
_CONTOUR_NODES = 40

_QUANTILE_MAX_ITER = 200
_QUANTILE_RTOL = 1e-12
_QUANTILE_UTOL = 1e-13


@dataclass(frozen=True)
class MLParams:
    """Tail parameter ``beta`` in (0, 1] and scale ``sigma`` of ML(beta, sigma)."""

    beta: float
    sigma: float

    def __post_init__(self):
        beta, sigma = float(self.beta), float(self.sigma)
        if not 0 < beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {beta}.")
        if not (np.isfinite(sigma) and sigma > 0):
            raise ValueError(f"sigma must be finite and positive, got {sigma}.")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sigma", sigma)

    def standardized(self):
        return MLParams(self.beta, 1.0)


@dataclass(frozen=True)
class MLFArgs:
    alpha: float
    btilde: float
    z: float

    def __post_init__(self):
        _check_mlf_parameters(self.alpha, self.btilde)


def _check_mlf_parameters(alpha, btilde):
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}.")
    if not (np.isfinite(btilde) and btilde > 0):
        raise ValueError(f"btilde must be finite and positive, got {btilde}.")


def _series(alpha, btilde, x):
    n_terms = int(np.ceil((25.0 - min(btilde, 25.0)) / alpha)) + 2
    k = np.arange(n_terms)
    terms = np.power(-x[:, None], k[None, :]) * rgamma(alpha * k + btilde)[None, :]
    return terms.sum(axis=1)


def _asymptotic(alpha, btilde, x):
    """Optimally truncated large-x expansion.

    Returns the values and a mask of the points where the truncation error
    bound is small enough to trust them.
    """
    k = np.arange(1, _ASYMPTOTIC_TERMS + 1)
    w = btilde - alpha * k
    # |1/Gamma(w)| <= Gamma(1 - w) / pi for w <= 0
    log_coef = np.where(w > 0, -gammaln(np.where(w > 0, w, 1.0)),
                        gammaln(1.0 - np.minimum(w, 0.0)) - np.log(np.pi))
    log_x = np.log(x)[:, None]
    log_env = log_coef[None, :] - k[None, :] * log_x
    with np.errstate(over="ignore", invalid="ignore"):
        terms = (
            np.where(k % 2 == 1, 1.0, -1.0)[None, :]
            * np.exp(-k[None, :] * log_x)
            * rgamma(w)[None, :]
        )
    j = np.argmin(log_env, axis=1)
    keep = k[None, :] <= j[:, None]
    total = np.where(keep, terms, 0.0).sum(axis=1)
    env_min = np.exp(np.take_along_axis(log_env, j[:, None], axis=1)[:, 0])
    ok = (j >= 1) & (env_min <= _ASYMPTOTIC_RTOL * np.abs(total))
    return total, ok


def _contour(alpha, btilde, x):
    # Parabolic contour for the inverse Laplace transform of
    # s**(alpha - btilde) / (s**alpha + x), evaluated at t = 1.
    n = _CONTOUR_NODES
    theta = (2 * np.arange(n // 2) + 1) * np.pi / n
    s = n * (0.1309 - 0.1194 * theta**2 + 0.25j * theta)
    ds = n * (-0.2388 * theta + 0.25j)
    s_alpha = np.power(s, alpha)
    weight = np.exp(s) * np.power(s, alpha - btilde) * ds
    integrand = weight[None, :] / (s_alpha[None, :] + x[:, None])
    return (2.0 / n) * np.imag(integrand.sum(axis=1))


def mlf(alpha, btilde, x):
    """Evaluate E_{alpha,btilde}(-x) for x >= 0, vectorized over ``x``."""
    alpha, btilde = float(alpha), float(btilde)
    _check_mlf_parameters(alpha, btilde)
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_arr)) or np.any(x_arr < 0):
        raise ValueError("mlf is only defined here for arguments -x with x >= 0.")
    flat = x_arr.ravel()
    out = np.empty_like(flat)

    zero = flat == 0
    inf = np.isinf(flat)
    out[zero] = rgamma(btilde)
    out[inf] = 0.0
    rest = ~(zero | inf)

    if alpha == 1.0:
        if btilde == 1.0:
            out[rest] = np.exp(-flat[rest])
        else:
            out[rest] = hyp1f1(1.0, btilde, -flat[rest]) * rgamma(btilde)
        return out.reshape(x_arr.shape) if x_arr.ndim else float(out[0])

    n_series = np.ceil((25.0 - min(btilde, 25.0)) / alpha) + 2
    small = rest & (flat <= _SERIES_MAX_X)
    if n_series <= _SERIES_MAX_TERMS and small.any():
        out[small] = _series(alpha, btilde, flat[small])
    else:
        small[:] = False

    pending = rest & ~small
    if pending.any():
        values, ok = _asymptotic(alpha, btilde, flat[pending])
        idx = np.flatnonzero(pending)
        out[idx[ok]] = values[ok]
        pending[idx[ok]] = False
    if pending.any():
        out[pending] = _contour(alpha, btilde, flat[pending])

    return out.reshape(x_arr.shape) if x_arr.ndim else float(out[0])


def mlf_e(args):
    """E_{alpha,btilde}(z) for z <= 0."""
    if args.z > 0:
        raise ValueError(
            f"Only non-positive arguments are supported, got z = {args.z}."
        )
    return mlf(args.alpha, args.btilde, -args.z)


def _as_output(values, like):
    return values if np.ndim(like) else float(values)


def _power_argument(t, p):
    return np.power(t / p.sigma, p.beta)


def ml_pdf(t, p):
    """Density of ML(beta, sigma) at t > 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise ValueError("The Mittag-Leffler density is defined for t > 0 only.")
    if p.beta == 1.0:
        return _as_output(np.exp(-t_arr / p.sigma) / p.sigma, t)
    x = _power_argument(t_arr, p)
    with np.errstate(invalid="ignore"):
        density = np.where(np.isinf(t_arr), 0.0, x * mlf(p.beta, p.beta, x) / t_arr)
    return _as_output(np.maximum(density, 0.0), t)


def ml_logpdf(t, p):
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise ValueError("The Mittag-Leffler density is defined for t > 0 only.")
    if p.beta == 1.0:
        return _as_output(-t_arr / p.sigma - np.log(p.sigma), t)
    x = _power_argument(t_arr, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.log(np.maximum(mlf(p.beta, p.beta, x), 0.0))
    return _as_output(p.beta * np.log(t_arr / p.sigma) + kernel - np.log(t_arr), t)


def ml_cdf(t, p, complement=False):
    """Distribution function of ML(beta, sigma).

    With ``complement=True`` the survival function E_beta(-(t/sigma)**beta)
    is returned, evaluated directly rather than as 1 - F.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(t_arr)) or np.any(t_arr < 0):
        raise ValueError("The Mittag-Leffler CDF is defined for t >= 0 only.")
    if p.beta == 1.0:
        if complement:
            values = np.exp(-t_arr / p.sigma)
        else:
            values = -np.expm1(-t_arr / p.sigma)
        return _as_output(values, t)

    x = _power_argument(t_arr, p)
    survival = mlf(p.beta, 1.0, x)
    if complement:
        return _as_output(np.clip(survival, 0.0, 1.0), t)
    head = x < 1
    values = np.where(head, 0.0, 1.0 - survival)
    if np.any(head):
        values = np.where(head, x * mlf(p.beta, 1.0 + p.beta, np.where(head, x, 0.0)),
                          values)
    return _as_output(np.clip(values, 0.0, 1.0), t)


def ml_sf(t, p):
    return ml_cdf(t, p, complement=True)


def _standard_objective(u, beta, target, upper):
    p = MLParams(beta, 1.0)
    t = np.exp(u)
    if upper:
        value = target - ml_cdf(t, p, complement=True)
    else:
        value = ml_cdf(t, p) - target
    return value, ml_pdf(t, p) * t


def _initial_bracket(beta, q, s):
    guesses = [-np.log(s)]
    guesses.append(np.power(q * gamma(1.0 + beta), 1.0 / beta))
    if beta < 1:
        guesses.append(np.power(s * gamma(1.0 - beta), -1.0 / beta))
    guesses = np.vstack(guesses)
    lo = np.log(np.min(guesses, axis=0) / 10.0)
    hi = np.log(np.max(guesses, axis=0) * 10.0)
    return lo, hi


def _solve_standard(beta, target, upper):
    """Solve F(t) = target (or S(t) = target when ``upper``) for sigma = 1.

    Safeguarded Newton iteration in u = log t: steps that leave the current
    bracket are replaced by bisection.
    """
    target = np.asarray(target, dtype=float)
    q = 1.0 - target if upper else target
    s = target if upper else 1.0 - target
    lo, hi = _initial_bracket(beta, q, s)

    for _ in range(_QUANTILE_MAX_ITER):
        g_lo, _ = _standard_objective(lo, beta, target, upper)
        low_bad = g_lo > 0
        g_hi, _ = _standard_objective(hi, beta, target, upper)
        high_bad = g_hi < 0
        if not (low_bad.any() or high_bad.any()):
            break
        lo = np.where(low_bad, lo - np.log(100.0), lo)
        hi = np.where(high_bad, hi + np.log(100.0), hi)
    else:
        raise FloatingPointError("Could not bracket the Mittag-Leffler quantile.")

    u = 0.5 * (lo + hi)
    active = np.ones(u.shape, dtype=bool)
    for _ in range(_QUANTILE_MAX_ITER):
        g, dg = _standard_objective(u[active], beta, target[active], upper)
        done = (np.abs(g) <= _QUANTILE_RTOL * target[active]) | (
            hi[active] - lo[active] < _QUANTILE_UTOL
        )
        lo[active] = np.where(g < 0, u[active], lo[active])
        hi[active] = np.where(g > 0, u[active], hi[active])
        with np.errstate(divide="ignore", invalid="ignore"):
            step = u[active] - g / dg
        inside = np.isfinite(step) & (step > lo[active]) & (step < hi[active])
        proposal = np.where(inside, step, 0.5 * (lo[active] + hi[active]))
        u[active] = np.where(done, u[active], proposal)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
    return np.exp(u)


def ml_quantile(q, p):
    """Smallest t with F(t) >= q, for 0 <= q < 1."""
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(np.isnan(q_arr)) or np.any(q_arr < 0) or np.any(q_arr >= 1):
        raise ValueError("Quantile levels must satisfy 0 <= q < 1.")
    out = np.zeros_like(q_arr)
    if p.beta == 1.0:
        out = -np.log1p(-q_arr)
    else:
        lower = (q_arr > 0) & (q_arr <= 0.5)
        upper = q_arr > 0.5
        if lower.any():
            out[lower] = _solve_standard(p.beta, q_arr[lower], upper=False)
        if upper.any():
            out[upper] = _solve_standard(p.beta, 1.0 - q_arr[upper], upper=True)
    out = p.sigma * out
    return out.reshape(np.shape(q)) if np.ndim(q) else float(out[0])


def ml_isf(s, p):
    """Inverse survival function: t with S(t) = s, for 0 < s <= 1."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(np.isnan(s_arr)) or np.any(s_arr <= 0) or np.any(s_arr > 1):
        raise ValueError("Survival levels must satisfy 0 < s <= 1.")
    out = np.zeros_like(s_arr)
    if p.beta == 1.0:
        out = -np.log(s_arr)
    else:
        upper = s_arr <= 0.5
        lower = (s_arr > 0.5) & (s_arr < 1)
        if upper.any():
            out[upper] = _solve_standard(p.beta, s_arr[upper], upper=True)
        if lower.any():
            out[lower] = _solve_standard(p.beta, 1.0 - s_arr[lower], upper=False)
    out = p.sigma * out
    return out.reshape(np.shape(s)) if np.ndim(s) else float(out[0])


def ml_rand(p, n, seed=None):
    """Draw ``n`` i.i.d. ML(beta, sigma) variates as sigma * X**(1/beta) * D."""
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}.")
    rng = as_rng(seed)
    if p.beta == 1.0:
        return p.sigma * rng.standard_exponential(n)
    x = rng.standard_exponential(n)
    d = stable_rand(p.beta, n, rng)
    return p.sigma * np.power(x, 1.0 / p.beta) * d
