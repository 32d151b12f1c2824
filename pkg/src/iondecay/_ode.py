"""Adaptive Dormand-Prince 5(4) integrator used by every time-domain evolver.

The integrator lands exactly on each requested output time, so trajectories
are deterministic functions of (rhs, y0, t_grid) and need no interpolation.
"""

import numpy as np

from .errors import StepSizeUnderflow

# Dormand & Prince (1980) tableau, FSAL form
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [np.array(row) for row in (
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
)]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _error_norm(err, y, y_new, rtol, atol):
    # max-norm: components that stay identically zero never change the step
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def integrate(rhs, y0, t_grid, rtol=1e-9, atol=1e-12, h_min=1e-18, h0=None):
    """Integrate ``dy/dt = rhs(t, y)`` and sample ``y`` on ``t_grid``.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y) -> dy/dt`` returning an array shaped like ``y``.
    y0 : array_like
        Initial value at ``t_grid[0]``; real or complex.
    t_grid : array_like
        Strictly increasing output times.
    rtol, atol : float
        Per-component tolerances for the embedded error estimate.
    h_min : float
        Smallest admissible step; a rejected step below it raises.

    Returns
    -------
    ndarray
        Array of shape ``(len(t_grid),) + y0.shape``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a nonempty 1-D array")
    if t_grid.size > 1 and np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")

    y = np.array(y0, dtype=np.result_type(y0, float), copy=True)
    out = np.empty((t_grid.size,) + y.shape, dtype=y.dtype)
    out[0] = y
    if t_grid.size == 1:
        return out

    t = float(t_grid[0])
    span = t_grid[-1] - t_grid[0]
    k = np.empty((7,) + y.shape, dtype=y.dtype)
    k_flat = k.reshape(7, -1)   # view: stage combinations become small matmuls
    k[0] = rhs(t, y)
    if h0 is None:
        d0 = np.max(np.abs(y)) + atol
        d1 = np.max(np.abs(k[0])) + atol
        h = min(0.01 * d0 / d1, span)
    else:
        h = h0

    for i in range(1, t_grid.size):
        t_target = float(t_grid[i])
        while t < t_target:
            last = False
            step = h
            if t + step >= t_target:
                step = t_target - t
                last = True
            for s in range(1, 7):
                dy = (_A[s] @ k_flat[:s]).reshape(y.shape)
                k[s] = rhs(t + _C[s] * step, y + step * dy)
            y_new = y + step * (_B[:6] @ k_flat[:6]).reshape(y.shape)
            k[6] = rhs(t + step, y_new)
            err = step * (_E @ k_flat).reshape(y.shape)
            err_norm = _error_norm(err, y, y_new, rtol, atol)

            if err_norm <= 1.0:
                t = t_target if last else t + step
                y = y_new
                k[0] = k[6]
                if err_norm == 0.0:
                    factor = _MAX_FACTOR
                else:
                    factor = min(_MAX_FACTOR, _SAFETY * err_norm ** -0.2)
                # a truncated final step says nothing about the natural step
                if not last:
                    h = step * factor
                else:
                    h = max(h, step * factor)
            else:
                h = step * max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
                if h < h_min:
                    raise StepSizeUnderflow(
                        f"step {h:.3e} s below floor {h_min:.1e} s at t={t:.6e} s"
                    )
        out[i] = y
    return out
