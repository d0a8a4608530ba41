"""Steady chemoattractant field on the periodic grid.

Solves -Laplacian(c) + s(y) dc/dx + c = n with the five-point stencil and
centered advection differences, where s(y) is the saturated shear. The
default solver block-diagonalizes the discrete operator with an x-direction
FFT (the stencil is x-translation invariant) and solves one cyclic
tridiagonal system per mode, which is exact to rounding; a matrix-free
BiCGStab path is kept for cross-checking.

Field convention: values[i, j] = f(x = i*h, y = j*h).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.linalg import solve_banded
from scipy.sparse.linalg import LinearOperator, bicgstab

from ._kernels import spline_gradient
from .errors import SolverDiverged
from .params import Point2, SimParams, shear_velocity, wrap_point

log = logging.getLogger(__name__)

#: residual tolerance of solve_chemical, relative to ||n||_inf
R_TOL = 1e-8


class GridField:
    """Periodic scalar field sampled on an n x n grid over [0, L)^2."""

    def __init__(self, values: np.ndarray, L: float):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"expected a square grid, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        self.values = values
        self.L = float(L)
        self.n_side = values.shape[0]
        self.h = self.L / self.n_side
        self._coef: np.ndarray | None = None

    @property
    def spline_coef(self) -> np.ndarray:
        """Periodic bicubic B-spline coefficients (computed on first use)."""
        if self._coef is None:
            self._coef = np.ascontiguousarray(
                ndimage.spline_filter(self.values, order=3, mode="grid-wrap"))
        return self._coef

    def axis(self) -> np.ndarray:
        return np.arange(self.n_side) * self.h

    def integral(self) -> float:
        return float(self.values.sum() * self.h * self.h)


@dataclass
class Profile1D:
    """Periodic 1D profile over y in [0, L)."""

    values: np.ndarray
    h: float

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile contains non-finite values")

    @property
    def n_side(self) -> int:
        return self.values.shape[0]

    @property
    def L(self) -> float:
        return self.n_side * self.h

    def axis(self) -> np.ndarray:
        return np.arange(self.n_side) * self.h


def build_target_density(params: SimParams) -> GridField:
    """Unit-mass target density: disk indicator with a one-cell linear ramp."""
    n = params.grid_n
    h = params.h
    ax = np.arange(n) * h
    d = np.abs(ax - params.L / 2.0)
    np.minimum(d, params.L - d, out=d)
    r = np.hypot(d[:, None], d[None, :])
    w = np.clip((params.delta + h - r) / (2.0 * h), 0.0, 1.0)
    w /= w.sum() * h * h
    return GridField(w, params.L)


def shear_profile(params: SimParams) -> np.ndarray:
    """Saturated shear s(y_j) on the grid."""
    ax = np.arange(params.grid_n) * params.h
    return np.array([shear_velocity(y, params) for y in ax])


def apply_chemical_operator(c: np.ndarray, s: np.ndarray, h: float) -> np.ndarray:
    """(-Laplacian_h + s(y) Dx0 + I) c with periodic stencils."""
    lap = (np.roll(c, 1, axis=0) + np.roll(c, -1, axis=0)
           + np.roll(c, 1, axis=1) + np.roll(c, -1, axis=1) - 4.0 * c) / (h * h)
    adv = s[None, :] * (np.roll(c, -1, axis=0) - np.roll(c, 1, axis=0)) / (2.0 * h)
    return -lap + adv + c


def solve_cyclic_tridiag(diag: np.ndarray, off: float, rhs: np.ndarray) -> np.ndarray:
    """Solve the periodic tridiagonal system diag[j] x[j] + off*(x[j-1]+x[j+1]) = rhs[j].

    Sherman-Morrison reduction to a plain banded solve.
    """
    n = diag.shape[0]
    dtype = np.result_type(diag.dtype, rhs.dtype, np.float64)
    gamma = -diag[0]
    dmod = diag.astype(dtype).copy()
    dmod[0] -= gamma
    dmod[-1] -= off * off / gamma
    ab = np.zeros((3, n), dtype=dtype)
    ab[0, 1:] = off
    ab[1, :] = dmod
    ab[2, :-1] = off
    u = np.zeros(n, dtype=dtype)
    u[0] = gamma
    u[-1] = off
    sol = solve_banded((1, 1), ab, np.column_stack([rhs.astype(dtype), u]))
    yv, zv = sol[:, 0], sol[:, 1]
    vy = yv[0] + (off / gamma) * yv[-1]
    vz = zv[0] + (off / gamma) * zv[-1]
    return yv - zv * (vy / (1.0 + vz))


def _solve_fft(nvals: np.ndarray, s: np.ndarray, h: float) -> np.ndarray:
    n = nvals.shape[0]
    nhat = np.fft.rfft(nvals, axis=0)
    theta = 2.0 * np.pi * np.arange(nhat.shape[0]) / n
    lam = (2.0 - 2.0 * np.cos(theta)) / (h * h)
    adv = np.sin(theta) / h
    off = -1.0 / (h * h)
    chat = np.empty_like(nhat)
    base = lam + 1.0 + 2.0 / (h * h)
    for k in range(nhat.shape[0]):
        diag = base[k] + 1j * s * adv[k]
        chat[k, :] = solve_cyclic_tridiag(diag, off, nhat[k, :])
    return np.fft.irfft(chat, n=n, axis=0)


def _solve_bicgstab(nvals: np.ndarray, s: np.ndarray, h: float) -> np.ndarray:
    n = nvals.shape[0]

    def mv(flat):
        return apply_chemical_operator(flat.reshape(n, n), s, h).ravel()

    op = LinearOperator((n * n, n * n), matvec=mv, dtype=np.float64)
    jacobi = 1.0 / (4.0 / (h * h) + 1.0)
    pre = LinearOperator((n * n, n * n), matvec=lambda v: jacobi * v,
                         dtype=np.float64)
    b = nvals.ravel()
    x = None
    for rtol in (1e-10, 1e-12, 1e-14):
        x, info = bicgstab(op, b, x0=x, rtol=rtol, atol=0.0,
                           maxiter=20 * n, M=pre)
        resid = np.abs(apply_chemical_operator(x.reshape(n, n), s, h) - nvals).max()
        if resid <= R_TOL * np.abs(nvals).max():
            return x.reshape(n, n)
        if info < 0:
            break
    raise SolverDiverged("bicgstab stagnated before reaching the residual tolerance",
                         peclet=float(np.abs(s).max() * h))


def solve_chemical(n: GridField, params: SimParams, method: str = "fft") -> GridField:
    """Solve the steady chemical equation for the given target density."""
    s = shear_profile(params)
    if method == "fft":
        c = _solve_fft(n.values, s, n.h)
    elif method == "bicgstab":
        c = _solve_bicgstab(n.values, s, n.h)
    else:
        raise ValueError(f"unknown method {method!r}")
    resid = np.abs(apply_chemical_operator(c, s, n.h) - n.values).max()
    if not np.isfinite(resid) or resid > R_TOL * np.abs(n.values).max():
        raise SolverDiverged(
            f"residual {resid:.3e} above tolerance after {method} solve",
            peclet=float(np.abs(s).max() * n.h))
    negative = int((c < 0).sum())
    if negative:
        # centered advection is not monotone at large A*h; positivity is a
        # diagnostic, not an invariant
        log.info("chemical field has %d negative cells (min %.3e) at A*h=%.3g",
                 negative, float(c.min()), float(np.abs(s).max() * n.h))
    return GridField(c, n.L)


def x_average(f: GridField) -> Profile1D:
    """Row-wise mean over x for each y."""
    return Profile1D(f.values.mean(axis=0), f.h)


def remainder(f: GridField) -> GridField:
    """f minus its x-average, broadcast back over x."""
    return GridField(f.values - f.values.mean(axis=0)[None, :], f.L)


def homogenization_norms(c: GridField) -> tuple[float, float]:
    """Sup norms of the x-remainder and of its centered y-derivative."""
    rem = c.values - c.values.mean(axis=0)[None, :]
    dy = (np.roll(rem, -1, axis=1) - np.roll(rem, 1, axis=1)) / (2.0 * c.h)
    return float(np.abs(rem).max()), float(np.abs(dy).max())


def gradient_at(c: GridField, p: Point2) -> tuple[float, float]:
    """Gradient of the bicubic interpolant of c at p (wrapped into the torus)."""
    q = wrap_point(p, c.L)
    gx, gy = spline_gradient(c.spline_coef, c.n_side, c.h, q.x, q.y)
    return float(gx), float(gy)


# --- export formats (consumed by plotkit) ---------------------------------
#
# Binary grid layout, little-endian:
#   uint32  n_side
#   float64 L
#   float64 values[n_side*n_side], row-major (x index outer, y index inner)

GRID_MAGIC_DOC = "uint32 n_side, float64 L, float64[n*n] row-major, little-endian"


def write_grid(f: GridField, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(np.uint32(f.n_side).astype("<u4").tobytes())
        fh.write(np.float64(f.L).astype("<f8").tobytes())
        fh.write(f.values.astype("<f8").tobytes())


def read_grid(path: str | Path) -> GridField:
    raw = Path(path).read_bytes()
    n_side = int(np.frombuffer(raw, dtype="<u4", count=1)[0])
    L = float(np.frombuffer(raw, dtype="<f8", count=1, offset=4)[0])
    values = np.frombuffer(raw, dtype="<f8", count=n_side * n_side,
                           offset=12).reshape(n_side, n_side)
    return GridField(values.copy(), L)


def write_field_csv(f: GridField, path: str | Path, header: str = "") -> None:
    """CSV rows (x, y, value), one per grid node."""
    ax = f.axis()
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write("x,y,value\n")
        for i in range(f.n_side):
            for j in range(f.n_side):
                fh.write(f"{ax[i]:.17g},{ax[j]:.17g},{f.values[i, j]:.17g}\n")
