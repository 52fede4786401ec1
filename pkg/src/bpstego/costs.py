"""Embedding costs.

Base distortion is a wavelet-residual (J-UNIWARD style) cost of a unit
coefficient change, computed on the unrounded spatial reconstruction with a
Daubechies-8 directional filter bank. Directional bias multiplies the favored
direction's cost by mu where the reference cover exceeds/falls below the
robust cover. Final per-direction modification costs divide by the
quantization step and scale by the dither-modulation distances.
"""

from dataclasses import dataclass

import numpy as np
import scipy.signal
from numpy.lib.stride_tricks import sliding_window_view

from .jpegmodel import ParameterError, blocks_view, inverse_dct, to_spatial

__all__ = [
    "WET_COST",
    "CostMaps",
    "juniward_costs",
    "asymmetric_costs",
    "modification_costs",
]

# Sentinel cost for positions the embedder must never modify.
WET_COST = 1e13

# Stabilizing constant in the cost denominators.
SIGMA = 2.0 ** -6

# Daubechies-8 high-pass decomposition filter (16 taps).
_HPDF = np.array(
    [
        -0.0544158422, 0.3128715909, -0.6756307363, 0.5853546837,
        0.0158291053, -0.2840155430, -0.0004724846, 0.1287474266,
        0.0173693010, -0.0440882539, -0.0139810279, 0.0087460940,
        0.0048703530, -0.0039134975, -0.0003917404, 0.0006754494,
    ]
)
_LPDF = ((-1.0) ** np.arange(_HPDF.size)) * _HPDF[::-1]

# LH, HL, HH directional kernels.
_KERNELS = [
    np.outer(_LPDF, _HPDF),
    np.outer(_HPDF, _LPDF),
    np.outer(_HPDF, _HPDF),
]

_FOOT = 8 + _HPDF.size - 1  # footprint of one block in a full-mode residual


@dataclass(frozen=True)
class CostMaps:
    """Directional embedding costs as coefficient-plane arrays."""

    rho_plus: np.ndarray
    rho_minus: np.ndarray
    zeta_plus: np.ndarray
    zeta_minus: np.ndarray
    xi_plus: np.ndarray
    xi_minus: np.ndarray
    wet_threshold: float = WET_COST


def _unit_impacts():
    """|wavelet response| of a unit change in each DCT mode, per kernel."""
    tables = []
    for kern in _KERNELS:
        per_mode = np.empty((64, _FOOT * _FOOT))
        for u in range(8):
            for v in range(8):
                basis = np.zeros((8, 8))
                basis[u, v] = 1.0
                impact = scipy.signal.convolve2d(inverse_dct(basis), kern, mode="full")
                per_mode[u * 8 + v] = np.abs(impact).ravel()
        tables.append(per_mode)
    return tables


_IMPACTS = None


def _impacts():
    global _IMPACTS
    if _IMPACTS is None:
        _IMPACTS = _unit_impacts()
    return _IMPACTS


def juniward_costs(c):
    """Base distortion of a unit change for every quantized DCT coefficient."""
    spatial = to_spatial(c).pixels
    by, bx = spatial.shape[0] // 8, spatial.shape[1] // 8
    rho_modes = np.zeros((by, bx, 64))
    for kern, impact in zip(_KERNELS, _impacts()):
        residual = scipy.signal.convolve2d(spatial, kern, mode="full")
        gain = 1.0 / (SIGMA + np.abs(residual))
        windows = sliding_window_view(gain, (_FOOT, _FOOT))[::8, ::8]
        patches = windows.reshape(by, bx, _FOOT * _FOOT)
        rho_modes += patches @ impact.T
    rho_blocks = rho_modes.reshape(by, bx, 8, 8) * c.qtable.entries.astype(np.float64)
    return rho_blocks.swapaxes(1, 2).reshape(by * 8, bx * 8)


def asymmetric_costs(rho, robust, reference, mu):
    """Bias costs toward the direction that moves robust coefficients to the reference."""
    if robust.coeffs.shape != reference.coeffs.shape:
        raise ParameterError("robust and reference covers must have matching grids")
    if rho.shape != robust.coeffs.shape:
        raise ParameterError("cost plane must match the coefficient grid")
    if not 0.0 < mu <= 1.0:
        raise ParameterError("mu must lie in (0, 1]")
    rho_plus = rho.copy()
    rho_minus = rho.copy()
    up = reference.coeffs > robust.coeffs
    down = reference.coeffs < robust.coeffs
    rho_plus[up] *= mu
    rho_minus[down] *= mu
    return rho_plus, rho_minus


def modification_costs(rho_pm, qtable, d_pm, coeffs=None):
    """Turn directional distortions into per-coefficient modification costs.

    ``d_pm`` holds the dither-modulation distances in dequantized units. When
    the coefficient plane is supplied, positions whose +-1 change would leave
    the 16-bit range, and all DC positions, are marked wet.
    """
    rho_plus, rho_minus = rho_pm
    d_plus, d_minus = d_pm
    q = np.tile(qtable.entries.astype(np.float64), np.array(rho_plus.shape) // 8)
    zeta_plus = rho_plus / q
    zeta_minus = rho_minus / q
    xi_plus = zeta_plus * d_plus
    xi_minus = zeta_minus * d_minus
    if coeffs is not None:
        wet_plus = coeffs >= 32767
        wet_minus = coeffs <= -32768
        dc = np.zeros_like(xi_plus, dtype=bool)
        dc[::8, ::8] = True
        xi_plus = np.where(wet_plus | dc, WET_COST, xi_plus)
        xi_minus = np.where(wet_minus | dc, WET_COST, xi_minus)
    return CostMaps(
        rho_plus=rho_plus,
        rho_minus=rho_minus,
        zeta_plus=zeta_plus,
        zeta_minus=zeta_minus,
        xi_plus=xi_plus,
        xi_minus=xi_minus,
    )
