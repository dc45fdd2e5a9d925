"""ULA geometry, angle grids and DFT beamspace transforms.

Indices are 0-based.  A beamspace bin is ``(row, col)`` where ``row`` is the
AoA bin at the UE (``0..N-1``) and ``col`` the AoD bin at the BS
(``0..M-1``).  The ``N x M`` beamspace matrix is vectorised column-major, so
the flat index of ``(row, col)`` is ``col * N + row``.
"""
from __future__ import annotations

import numpy as np

# |sin(pi psi)| below this is treated as the removable singularity psi -> integer
_SINGULAR_TOL = 1e-9


def array_response(size: int, angle: float) -> np.ndarray:
    """Half-wavelength ULA steering vector, entry k = exp(j k pi sin(angle))."""
    _check_size(size)
    return np.exp(1j * np.pi * np.arange(size) * np.sin(angle))


def array_response_sin(size: int, sin_angle: float) -> np.ndarray:
    return np.exp(1j * np.pi * np.arange(size) * sin_angle)


def dft_matrix(size: int) -> np.ndarray:
    """Unitary DFT basis whose k'-th column is the array response at grid angle k'."""
    _check_size(size)
    k = np.arange(size)
    return np.exp(2j * np.pi * np.outer(k, k / size - 0.5)) / np.sqrt(size)


def grid_sines(size: int) -> np.ndarray:
    """sin of the grid angles: 2k/size - 1 for k = 0..size-1."""
    _check_size(size)
    return 2.0 * np.arange(size) / size - 1.0


def grid_angles(size: int) -> np.ndarray:
    return np.arcsin(grid_sines(size))


def beamspace_coeffs(size: int, angle: float) -> np.ndarray:
    return beamspace_coeffs_sin(size, np.sin(angle))


def beamspace_coeffs_sin(size: int, sin_angle: float) -> np.ndarray:
    """Coefficients of the array response in the DFT basis, ``F^H a``.

    Evaluated in closed form as a Dirichlet kernel centred on the (possibly
    off-grid) angle, so on-grid angles give a single entry of ``sqrt(size)``.
    """
    _check_size(size)
    psi = np.arange(size) / size - 0.5 * sin_angle - 0.5
    den = np.sin(np.pi * psi)
    num = np.sin(np.pi * psi * size)
    singular = np.abs(den) < _SINGULAR_TOL
    safe = np.where(singular, 1.0, den)
    # limit of sin(pi psi M)/sin(pi psi) at integer psi is M * (-1)^(psi (M-1))
    limit = size * np.cos(np.pi * np.round(psi) * (size - 1))
    kernel = np.where(singular, limit, num / safe)
    return kernel * np.exp(-1j * np.pi * psi * (size - 1)) / np.sqrt(size)


def kernel_magnitude(size: int, sin_angle: float) -> np.ndarray:
    """|F^H a| from the localized-kernel formula alone (no phase)."""
    psi = np.arange(size) / size - 0.5 * sin_angle - 0.5
    den = np.abs(np.sin(np.pi * psi))
    num = np.abs(np.sin(np.pi * psi * size))
    out = np.full(size, float(size))
    ok = den >= _SINGULAR_TOL
    out[ok] = num[ok] / den[ok]
    return out / np.sqrt(size)


def nearest_grid_index(angle: float, size: int) -> int:
    return nearest_grid_index_sin(np.sin(angle), size)


def nearest_grid_index_sin(sin_angle: float, size: int) -> int:
    """Grid bin closest to ``sin_angle``.

    Distance is measured on the sine circle of period 2, since the DFT
    beamspace wraps around: sin = 1 - eps peaks in bin 0, not bin size-1.
    Ties go to the smaller index.
    """
    d = np.abs(grid_sines(size) - sin_angle)
    d = np.minimum(d, 2.0 - d)
    return int(np.argmin(d))


def flat_index(row: int, col: int, n_rows: int) -> int:
    return col * n_rows + row


def unflat_index(index: int, n_rows: int) -> tuple[int, int]:
    col, row = divmod(int(index), n_rows)
    return row, col


def _check_size(size: int) -> None:
    if int(size) != size or size < 1:
        raise ValueError(f"array size must be a positive integer, got {size!r}")
