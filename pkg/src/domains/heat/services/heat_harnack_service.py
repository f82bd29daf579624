"""
Closed-form heat solutions and finite-difference checks of the matrix,
trace, classical and log-convexity Harnack inequalities.

All evaluations go through log u so far Gaussian tails never underflow.
"""

import logging
from typing import Tuple, Union

import numpy as np
from scipy.special import logsumexp

from src.core.exceptions import InvalidDomainError, NonFiniteEvaluationError
from src.core.models.heat import FundamentalSolution, PointSourceSolution, SymmetricMatrix2, as_point
from src.infrastructure.config.settings import FD_STEP

logger = logging.getLogger(__name__)

Solution = Union[FundamentalSolution, PointSourceSolution]


def _require_positive_time(t: float, name: str = "t") -> float:
    t = float(t)
    if not t > 0:
        raise InvalidDomainError(f"{name} must be positive, got {t}")
    return t


def _finite(value, what: str):
    if not np.all(np.isfinite(value)):
        raise NonFiniteEvaluationError(f"non-finite {what}", {"value": np.asarray(value).tolist()})
    return value


def log_u(sol: Solution, x, t: float) -> float:
    """log u(x, t) = logsumexp_i [log w_i - |x - y_i|^2 / 4 tau] - (n/2) log(4 pi tau)"""
    t = _require_positive_time(t)
    x = as_point(x, sol.dim)
    tau = t + sol.time_shift
    sq = np.sum((x - sol.locations) ** 2, axis=1)
    exponents = sol.log_weights - sq / (4.0 * tau) - 0.5 * sol.dim * np.log(4.0 * np.pi * tau)
    return float(_finite(logsumexp(exponents), "log u"))


def eval_solution(sol: Solution, x, t: float) -> float:
    value = np.exp(log_u(sol, x, t))
    if value <= 0.0:
        raise NonFiniteEvaluationError(
            f"u({x}, {t}) underflows to zero; use log_u in the far tail", {"t": float(t)}
        )
    return float(value)


def _hessian(f, x: np.ndarray, step: float) -> np.ndarray:
    """Central second differences; the mixed term uses the 4-point stencil."""
    dim = x.size
    f0 = f(x)
    hess = np.empty((dim, dim))
    basis = np.eye(dim) * step
    for i in range(dim):
        hess[i, i] = (f(x + basis[i]) - 2.0 * f0 + f(x - basis[i])) / step**2
    if dim == 2:
        e1, e2 = basis
        mixed = (f(x + e1 + e2) - f(x + e1 - e2) - f(x - e1 + e2) + f(x - e1 - e2)) / (4.0 * step**2)
        hess[0, 1] = hess[1, 0] = mixed
    return _finite(hess, "Hessian")


def _gradient(f, x: np.ndarray, step: float) -> np.ndarray:
    basis = np.eye(x.size) * step
    return _finite(np.array([(f(x + e) - f(x - e)) / (2.0 * step) for e in basis]), "gradient")


def hessian_log(sol: Solution, x, t: float, step: float = FD_STEP) -> SymmetricMatrix2:
    return hessian_log_with_error(sol, x, t, step)[0]


def hessian_log_with_error(sol: Solution, x, t: float, step: float = FD_STEP) -> Tuple[SymmetricMatrix2, float]:
    """Richardson-extrapolated Hess(log u) and the truncation estimate max|H_h - H_2h| / 3."""
    t = _require_positive_time(t)
    if not step > 0:
        raise InvalidDomainError(f"finite-difference step must be positive, got {step}")
    x = as_point(x, sol.dim)
    f = lambda p: log_u(sol, p, t)  # noqa: E731
    fine = _hessian(f, x, step)
    coarse = _hessian(f, x, 2.0 * step)
    error = float(np.max(np.abs(fine - coarse)) / 3.0)
    return SymmetricMatrix2.from_array((4.0 * fine - coarse) / 3.0), error


def analytic_hessian_log(sol: Solution, x, t: float) -> SymmetricMatrix2:
    """Exact Hess(log u) = -I/(2 tau) + Cov_p(y) / (4 tau^2), p_i proportional to w_i rho(x - y_i)."""
    t = _require_positive_time(t)
    x = as_point(x, sol.dim)
    tau = t + sol.time_shift
    exponents = sol.log_weights - np.sum((x - sol.locations) ** 2, axis=1) / (4.0 * tau)
    p = np.exp(exponents - logsumexp(exponents))
    mean = p @ sol.locations
    centered = sol.locations - mean
    cov = (centered * p[:, None]).T @ centered
    return SymmetricMatrix2.from_array(-np.eye(sol.dim) / (2.0 * tau) + cov / (4.0 * tau**2))


def gradient_log(sol: Solution, x, t: float, step: float = FD_STEP) -> np.ndarray:
    t = _require_positive_time(t)
    x = as_point(x, sol.dim)
    return _gradient(lambda p: log_u(sol, p, t), x, step)


def time_derivative_log_with_error(sol: Solution, x, t: float, step: float = FD_STEP) -> Tuple[float, float]:
    """d/dt log u by Richardson-extrapolated central differences with relative step `step * t`."""
    t = _require_positive_time(t)
    x = as_point(x, sol.dim)
    h = step * t
    d_h = (log_u(sol, x, t + h) - log_u(sol, x, t - h)) / (2.0 * h)
    d_2h = (log_u(sol, x, t + 2.0 * h) - log_u(sol, x, t - 2.0 * h)) / (4.0 * h)
    value = (4.0 * d_h - d_2h) / 3.0
    return float(_finite(value, "time derivative")), float(abs(d_h - d_2h) / 3.0)


def time_derivative_log(sol: Solution, x, t: float, step: float = FD_STEP) -> float:
    return time_derivative_log_with_error(sol, x, t, step)[0]


def matrix_harnack_defect_with_error(sol: Solution, x, t: float, step: float = FD_STEP) -> Tuple[float, float]:
    hess, error = hessian_log_with_error(sol, x, t, step)
    defect = float(hess.shifted(1.0 / (2.0 * t)).eigenvalues().min())
    return defect, error


def matrix_harnack_defect(sol: Solution, x, t: float, step: float = FD_STEP) -> float:
    """Smallest eigenvalue of Hess(log u) + I/(2t)."""
    return matrix_harnack_defect_with_error(sol, x, t, step)[0]


def trace_defects_with_error(sol: Solution, x, t: float, step: float = FD_STEP) -> Tuple[float, float, float]:
    """(li_yau, trace_harnack, truncation estimate)"""
    hess, hess_error = hessian_log_with_error(sol, x, t, step)
    grad = gradient_log(sol, x, t, step)
    dt_log, dt_error = time_derivative_log_with_error(sol, x, t, step)
    half_n_over_t = sol.dim / (2.0 * t)
    li_yau = hess.trace() + half_n_over_t
    trace_harnack = dt_log - float(grad @ grad) + half_n_over_t
    error = sol.dim * hess_error + dt_error
    return float(li_yau), float(trace_harnack), float(error)


def trace_defects(sol: Solution, x, t: float, step: float = FD_STEP) -> Tuple[float, float]:
    li_yau, trace_harnack, _ = trace_defects_with_error(sol, x, t, step)
    return li_yau, trace_harnack


def classical_harnack_gap(sol: Solution, x1, t1: float, x2, t2: float) -> float:
    """u(x2, t2) - u(x1, t1) (t1/t2)^(n/2) exp(-|x2 - x1|^2 / 4(t2 - t1))"""
    t1 = _require_positive_time(t1, "t1")
    t2 = _require_positive_time(t2, "t2")
    if not t1 < t2:
        raise InvalidDomainError(f"need t1 < t2, got t1 = {t1}, t2 = {t2}")
    x1 = as_point(x1, sol.dim)
    x2 = as_point(x2, sol.dim)
    dist_sq = float(np.sum((x2 - x1) ** 2))
    bound = np.exp(
        log_u(sol, x1, t1) + 0.5 * sol.dim * np.log(t1 / t2) - dist_sq / (4.0 * (t2 - t1))
    )
    return float(np.exp(log_u(sol, x2, t2)) - bound)


def log_ratio(sol: Solution, x, t: float) -> float:
    """log(u/rho)(x, t) summed as a log-sum of log-affine-plus-convex kernels."""
    t = _require_positive_time(t)
    x = as_point(x, sol.dim)
    tau = t + sol.time_shift
    y = sol.locations
    exponents = (
        sol.log_weights
        - 0.5 * sol.dim * np.log(tau / t)
        + (2.0 * (y @ x) - np.sum(y**2, axis=1)) / (4.0 * tau)
        + float(x @ x) * (1.0 / (4.0 * t) - 1.0 / (4.0 * tau))
    )
    return float(_finite(logsumexp(exponents), "log(u/rho)"))


def log_ratio_convexity_defect(sol: Solution, t: float, x, z, alpha: float) -> float:
    """alpha log F(x) + (1 - alpha) log F(z) - log F(alpha x + (1 - alpha) z), F = u/rho"""
    if not 0.0 < alpha < 1.0:
        raise InvalidDomainError(f"alpha must lie in (0, 1), got {alpha}")
    x = as_point(x, sol.dim)
    z = as_point(z, sol.dim)
    mid = alpha * x + (1.0 - alpha) * z
    return float(
        alpha * log_ratio(sol, x, t) + (1.0 - alpha) * log_ratio(sol, z, t) - log_ratio(sol, mid, t)
    )


def log_ratio_hessian_min_eig(sol: Solution, x, t: float, step: float = FD_STEP) -> float:
    t = _require_positive_time(t)
    x = as_point(x, sol.dim)
    f = lambda p: log_ratio(sol, p, t)  # noqa: E731
    hess = (4.0 * _hessian(f, x, step) - _hessian(f, x, 2.0 * step)) / 3.0
    return float(np.linalg.eigvalsh(hess).min())


def straight_line_harnack_integrand(
    sol: Solution, x1, t1: float, x2, t2: float, s: float, step: float = FD_STEP
) -> float:
    """
    Margin d/ds log u(gamma(s), s) + n/(2s) + |gamma'|^2 / 4 along the straight
    path gamma from (x1, t1) to (x2, t2), at an interior time s.

    Integrating this margin over [t1, t2] gives the classical Harnack gap in log form.
    """
    t1 = _require_positive_time(t1, "t1")
    if not t1 < s < t2:
        raise InvalidDomainError(f"need t1 < s < t2, got {t1}, {s}, {t2}")
    x1 = as_point(x1, sol.dim)
    x2 = as_point(x2, sol.dim)
    velocity = (x2 - x1) / (t2 - t1)

    def along(time: float) -> float:
        return log_u(sol, x1 + (time - t1) * velocity, time)

    h = step * min(s - t1, t2 - s, s) / 2.0
    d_h = (along(s + h) - along(s - h)) / (2.0 * h)
    d_2h = (along(s + 2.0 * h) - along(s - 2.0 * h)) / (4.0 * h)
    derivative = (4.0 * d_h - d_2h) / 3.0
    return float(derivative + sol.dim / (2.0 * s) + float(velocity @ velocity) / 4.0)
