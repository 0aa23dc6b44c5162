from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def signed_power(x, a: float):
    """|x|^a * sign(x), elementwise."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** a


def derivative_weights(x: np.ndarray, width: int = 5) -> np.ndarray:
    """
    First-derivative weights on a non-uniform 1D grid.

    Each interior node i (half = width // 2 <= i < n - half) gets the weights of
    the interpolating polynomial through its `width` neighbours. Offsets are
    scaled by the local spacing before the Vandermonde solve to keep the
    batched systems well conditioned.

    Returns:
        np.ndarray: shape (n - 2*half, width).
    """
    x = np.asarray(x, dtype=float)
    half = width // 2
    win = sliding_window_view(x, width)
    z = win - x[half:len(x) - half, None]
    scale = 0.5 * (win[:, -1] - win[:, 0])
    zs = z / scale[:, None]

    powers = np.arange(width)
    vander = zs[:, None, :] ** powers[None, :, None]      # (m, k, j)
    rhs = np.zeros((len(zs), width, 1))
    rhs[:, 1, 0] = 1.0
    w = np.linalg.solve(vander, rhs)[..., 0]
    return w / scale[:, None]


def derivative(x, y, width: int = 5, axis: int = -1) -> np.ndarray:
    """
    d y / d x at the interior nodes x[half:-half] along `axis`.

    Args:
        x: strictly increasing 1D abscissae.
        y: samples, with len(x) entries along `axis`.
        width: stencil width (odd).
    """
    y = np.asarray(y, dtype=float)
    w = derivative_weights(x, width)
    ym = np.moveaxis(y, axis, -1)
    windows = sliding_window_view(ym, width, axis=-1)
    d = np.einsum("...mj,mj->...m", windows, w)
    return np.moveaxis(d, -1, axis)


def interior(x, width: int = 5) -> np.ndarray:
    half = width // 2
    return np.asarray(x)[half:len(x) - half]


def radial_operator(r, slope, dim: int, p: float, width: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """
    -(r^(d-1) |w'|^(p-2) w')' / r^(d-1) from tabulated slopes, in flux form.

    Returns:
        (nodes, values): interior nodes and the operator applied there.
    """
    r = np.asarray(r, dtype=float)
    weight = r ** (dim - 1) if dim > 1 else np.ones_like(r)
    flux = weight * signed_power(slope, p - 1.0)
    inner = interior(r, width)
    w_inner = interior(weight, width)
    return inner, -derivative(r, flux, width) / w_inner
