"""
Wald-type, ANOVA-type and modified ANOVA-type statistics.

The *_values kernels work on a batch axis: p has shape (B, a*d) and the
covariance inputs (B, a*d, a*d). The observed-data wrappers (wts, ats,
mats) evaluate a batch of one, so observed and bootstrap statistics share
one implementation.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..core.constants import EFFECT_NOISE_TOL, ERROR_DEGENERATE_TRACE, ERROR_ZERO_DIAGONAL
from ..models.reports import StatisticKind, StatValue
from ..utils.errors import DegenerateTraceError, ZeroDiagonalError
from ..utils.numerics import chi2_sf, matrix_rank, pinv

logger = logging.getLogger(__name__)


def _snap_noise(effects: np.ndarray, p: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Zero the entries of a batch of C p that are rounding noise relative to max|C| * max|p|"""
    scale = EFFECT_NOISE_TOL * np.max(np.abs(matrix)) * np.max(np.abs(p), axis=-1, keepdims=True)
    return np.where(np.abs(effects) <= scale, 0.0, effects)


def _wald_form(p: np.ndarray, middle: np.ndarray, contrast: np.ndarray, n: int,
               rtol: Optional[float]) -> np.ndarray:
    """n (Cp)^T [C M C^T]^+ (Cp) for a batch of p and M"""
    cp = _snap_noise(p @ contrast.T, p, contrast)
    studentizer = pinv(contrast @ middle @ contrast.T, rtol)
    values = n * np.einsum("bi,bij,bj->b", cp, studentizer, cp)
    return np.maximum(values, 0.0)


def wts_values(p: np.ndarray, v_n: np.ndarray, contrast: np.ndarray, n: int,
               rtol: Optional[float] = None) -> np.ndarray:
    return _wald_form(p, v_n, contrast, n, rtol)


def ats_values(p: np.ndarray, v_n: np.ndarray, proj: np.ndarray,
               n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    T_A = n p^T T p / tr(T V_n) and f = tr(T V_n)^2 / tr(T V_n T V_n).

    Returns:
        (values, traces, f_hat); entries with tr(T V_n) <= 0 get value 0 and f_hat nan
    """
    tv = proj @ v_n
    traces = np.trace(tv, axis1=-2, axis2=-1)
    squares = np.einsum("bij,bji->b", tv, tv)
    tp = _snap_noise(p @ proj, p, proj)
    quad = np.einsum("bi,bi->b", p, tp)
    ok = traces > 0.0
    values = np.where(ok, n * quad / np.where(ok, traces, 1.0), 0.0)
    f_hat = np.where(ok, traces ** 2 / np.where(ok & (squares > 0.0), squares, 1.0), np.nan)
    return np.maximum(values, 0.0), traces, f_hat


def mats_values(p: np.ndarray, d_n: np.ndarray, contrast: np.ndarray, n: int,
                rtol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    T_M studentized by the diagonal D_n only.

    Returns:
        (values, zero_diagonal); entries with a zero diagonal get value 0
    """
    diagonal = np.diagonal(d_n, axis1=-2, axis2=-1)
    zero = np.any(diagonal <= 0.0, axis=-1)
    values = _wald_form(p, d_n, contrast, n, rtol)
    return np.where(zero, 0.0, values), zero


def wts(p_hat: np.ndarray, v_n: np.ndarray, contrast: np.ndarray, n: int,
        rtol: Optional[float] = None) -> StatValue:
    """Wald-type statistic, asymptotically chi-square with rank(C) dof"""
    value = float(wts_values(p_hat[None, :], v_n[None, :, :], contrast, n, rtol)[0])
    dof = matrix_rank(contrast, rtol)
    return StatValue(
        kind=StatisticKind.WTS,
        value=value,
        dof=float(dof),
        p_asymptotic=chi2_sf(value, dof),
    )


def ats(p_hat: np.ndarray, v_n: np.ndarray, proj: np.ndarray, n: int) -> StatValue:
    """
    ANOVA-type statistic with the Box-type F(f, inf) approximation.

    Raises:
        DegenerateTraceError: tr(T V_n) <= 0
    """
    values, traces, f_hat = ats_values(p_hat[None, :], v_n[None, :, :], proj, n)
    trace = float(traces[0])
    if trace <= 0.0:
        raise DegenerateTraceError(ERROR_DEGENERATE_TRACE.format(trace=trace), trace)
    value = float(values[0])
    dof = float(f_hat[0])
    return StatValue(
        kind=StatisticKind.ATS,
        value=value,
        dof=dof,
        p_asymptotic=chi2_sf(dof * value, dof),
    )


def mats(p_hat: np.ndarray, d_n: np.ndarray, contrast: np.ndarray, n: int,
         rtol: Optional[float] = None) -> StatValue:
    """
    Modified ANOVA-type statistic; no asymptotic p-value (bootstrap only).

    Raises:
        ZeroDiagonalError: some diagonal entry of D_n is 0
    """
    diagonal = np.diag(d_n)
    zero = np.flatnonzero(diagonal <= 0.0)
    if zero.size:
        indices = [int(k) for k in zero]
        raise ZeroDiagonalError(ERROR_ZERO_DIAGONAL.format(indices=indices), indices)
    values, _ = mats_values(p_hat[None, :], d_n[None, :, :], contrast, n, rtol)
    return StatValue(kind=StatisticKind.MATS, value=float(values[0]))
