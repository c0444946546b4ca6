"""Graded radial mesh and the conservative operator ``-(1/(y w)) (y w v')'``.

The mesh lives on the rescaled interval ``[0, L]`` with ``L = sqrt(alpha)``
(``L = 1`` in the ``alpha = 0`` oracle mode). The weight is ``w = exp(F)``
with ``F(y) = alpha * Phi_1(y / sqrt(alpha))``; ``F`` is stored, never ``w``.

The operator is a vertex-centred finite-volume scheme with exponentially
fitted fluxes. Inside each cell ``F`` is replaced by its linear interpolant,
which gives the flux coefficient and the weighted dual-cell volumes in closed
form. The dual-cell boundary inside a cell is placed where the fitted flux is
exact for the local equilibrium profile, which keeps the scheme consistent
when ``w`` varies by many orders of magnitude across one cell.
"""

from dataclasses import dataclass, field
from typing import Optional, Union
import math

import numpy as np

from .errors import ResolutionTooCoarse
from .model import ModelSpec

RESOLUTIONS = {
    "coarse": (64, 1.05),
    "default": (512, 1.02),
    "fine": (2048, 1.01),
}
MAX_INTERVALS = 40_000
MIN_INTERVALS = 64


# ---------------------------------------------------------------------------
# Closed-form cell integrals
# ---------------------------------------------------------------------------

def _log_E(x):
    """``log((1 - e^-x)/x)`` for ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1e-8
    out[small] = -0.5 * x[small]
    xb = x[~small]
    out[~small] = np.log(-np.expm1(-xb)) - np.log(xb)
    return out


def _E2(z):
    """``(z - 1 + e^-z)/z^2`` for ``z >= 0``."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 1e-3
    zs = z[small]
    out[small] = 0.5 - zs / 6.0 + zs ** 2 / 24.0 - zs ** 3 / 120.0 + zs ** 4 / 720.0
    zb = z[~small]
    out[~small] = (zb + np.expm1(-zb)) / zb ** 2
    return out


def _theta(x):
    """Relative position of the dual-cell boundary inside a cell."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1e-4
    xs = x[small]
    out[small] = 0.5 - xs / 24.0
    xb = x[~small]
    out[~small] = -_log_E(xb) / xb
    return out


def _log_piece(a, d, Fa, g):
    """``log int_a^{a+d} s exp(Fa + g (s - a)) ds`` for ``d > 0``, ``g >= 0``."""
    z = g * d
    E = np.exp(_log_E(z))
    return Fa + z + np.log(a * d * E + d * d * _E2(z))


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Mesh ``y_0 = 0 < ... < y_N = L`` with profile samples.

    Attributes
    ----------
    alpha : float
    scale : float
        ``sqrt(alpha)``, or 1 in oracle mode; ``r = y / scale``.
    y : ndarray
        Nodes, ``N + 1`` entries.
    log_w : ndarray
        ``F(y_i)``.
    phi, psi, M : ndarray
        ``phi_alpha``, ``psi_alpha`` and ``M_alpha`` at the nodes.
    n_core, y_core, h0, rho : grading descriptor.
    """

    model: ModelSpec = field(repr=False)
    alpha: float
    scale: float
    y: np.ndarray = field(repr=False)
    log_w: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    M: np.ndarray = field(repr=False)
    n_core: int = 0
    y_core: float = 0.0
    h0: float = 0.0
    rho: float = 1.0
    label: str = "custom"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def N(self) -> int:
        """Number of intervals; the unknowns are nodes ``0..N-1``."""
        return len(self.y) - 1

    @property
    def L(self) -> float:
        return float(self.y[-1])

    @property
    def load_scale(self) -> float:
        """Factor turning ``lambda`` into the rescaled load ``lambda / alpha``."""
        return 1.0 / (self.scale * self.scale)

    @property
    def r(self) -> np.ndarray:
        return self.y / self.scale

    def same_as(self, other: "RadialGrid") -> bool:
        return (self is other) or (self.alpha == other.alpha and self.model == other.model
                                   and len(self.y) == len(other.y) and np.array_equal(self.y, other.y))

    def to_csv(self, path):
        data = np.column_stack([self.y, self.log_w, self.psi, self.phi])
        np.savetxt(path, data, delimiter=",", header="y,log_w,psi_alpha,phi_alpha", comments="")


def _resolution(resolution):
    if isinstance(resolution, str):
        if resolution not in RESOLUTIONS:
            raise ValueError(f"unknown resolution {resolution!r}")
        n_core, rho = RESOLUTIONS[resolution]
        return n_core, rho, resolution
    n_core = int(resolution)
    return n_core, RESOLUTIONS["default"][1], str(n_core)


def domain_length(alpha: float) -> float:
    return math.sqrt(alpha) if alpha > 0 else 1.0


def core_length(alpha: float) -> float:
    L = domain_length(alpha)
    return min(L, max(10.0, alpha ** 0.1 if alpha > 0 else 0.0))


def tail_count(L: float, y_core: float, h0: float, rho: float) -> int:
    """Cells in the geometric tail: widths ``h0 rho^k``, ``k >= 1``, covering ``L - y_core``."""
    if L <= y_core:
        return 0
    return int(math.ceil(math.log1p((L - y_core) * (rho - 1.0) / (h0 * rho)) / math.log(rho)))


def _tail_nodes(L, y_core, h0, rho):
    n = tail_count(L, y_core, h0, rho)
    if n == 0:
        return np.empty(0)
    k = np.arange(1, n + 1)
    offsets = h0 * rho * np.expm1(k * math.log(rho)) / (rho - 1.0)
    offsets *= (L - y_core) / offsets[-1]
    nodes = y_core + offsets
    nodes[-1] = L
    return nodes


def build_grid(model: ModelSpec, alpha: float, resolution: Union[str, int] = "default") -> RadialGrid:
    """Composite mesh: uniform core of ``n_core`` cells then a geometric tail.

    Raises
    ------
    ResolutionTooCoarse
        Fewer than 64 intervals.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    n_core, rho, label = _resolution(resolution)
    if n_core < 1:
        raise ResolutionTooCoarse("core needs at least one cell")
    L = domain_length(alpha)
    y_core = core_length(alpha)
    h0 = y_core / n_core
    while n_core + tail_count(L, y_core, h0, rho) > MAX_INTERVALS:
        rho = 1.0 + 1.25 * (rho - 1.0)
    core = np.linspace(0.0, y_core, n_core + 1)
    y = np.concatenate([core, _tail_nodes(L, y_core, h0, rho)])
    y[-1] = L
    return _grid_from_nodes(model, alpha, y, n_core, y_core, h0, rho, label)


def grid_from_nodes(model: ModelSpec, alpha: float, y) -> RadialGrid:
    """Grid on explicit nodes (first 0, last ``sqrt(alpha)``)."""
    y = np.asarray(y, dtype=float)
    L = domain_length(alpha)
    if y[0] != 0.0 or abs(y[-1] - L) > 1e-12 * L or np.any(np.diff(y) <= 0):
        raise ValueError("nodes must increase from 0 to sqrt(alpha)")
    y = y.copy()
    y[-1] = L
    return _grid_from_nodes(model, alpha, y, len(y) - 1, L, float(y[1]), 1.0, "custom")


def refine(grid: RadialGrid) -> RadialGrid:
    """Halve every cell by inserting midpoints."""
    y = grid.y
    mid = 0.5 * (y[:-1] + y[1:])
    fine = np.empty(2 * len(y) - 1)
    fine[0::2] = y
    fine[1::2] = mid
    g = _grid_from_nodes(grid.model, grid.alpha, fine, 2 * grid.n_core, grid.y_core,
                         grid.h0 / 2, math.sqrt(grid.rho), grid.label + "/2")
    return g


def _grid_from_nodes(model, alpha, y, n_core, y_core, h0, rho, label):
    if len(y) - 1 < MIN_INTERVALS:
        raise ResolutionTooCoarse(f"{len(y) - 1} intervals; at least {MIN_INTERVALS} required")
    scale = domain_length(alpha)
    r = np.clip(y / scale, 0.0, 1.0)
    flow = model.flow
    log_w = flow.log_mu(alpha, r) if alpha > 0 else np.zeros_like(y)
    log_w = np.maximum.accumulate(log_w)
    return RadialGrid(model=model, alpha=float(alpha), scale=scale, y=y, log_w=log_w,
                      phi=np.asarray(flow.phi_of(r), dtype=float),
                      psi=np.asarray(flow.psi_of(r), dtype=float),
                      M=np.asarray(flow.M_of(r), dtype=float),
                      n_core=n_core, y_core=y_core, h0=h0, rho=rho, label=label)


# ---------------------------------------------------------------------------
# Operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteOperator:
    """Row-scaled tridiagonal operator on unknowns ``0..N-1``.

    ``(A v)_i = (c_{i+1/2} (v_i - v_{i+1}) + c_{i-1/2} (v_i - v_{i-1})) / V_i``
    where ``c`` are the fitted flux coefficients and ``V`` the weighted
    dual-cell volumes. The Dirichlet node ``N`` enters through ``boundary``,
    the coefficient multiplying ``v_N`` in row ``N - 1``.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    boundary: float
    log_c: np.ndarray
    log_V: np.ndarray
    shift: np.ndarray = None

    @property
    def n(self) -> int:
        return len(self.diag)

    def apply(self, v_full, boundary_value: Optional[float] = None) -> np.ndarray:
        """``A v`` on the unknown rows; ``v_full`` has ``N + 1`` entries.

        Evaluated as a difference of fluxes, which avoids the ``h^-2``
        cancellation of ``diag * v + offdiag * v``.
        """
        v_full = np.array(v_full, dtype=float)
        if boundary_value is not None:
            v_full[-1] = boundary_value
        n = self.n
        v = v_full[:n]
        up = np.empty(n)
        up[:-1] = -self.sup
        up[-1] = -self.boundary
        down = np.zeros(n)
        down[1:] = -self.sub
        out = up * (v - v_full[1:])
        out[1:] += down[1:] * (v[1:] - v[:-1])
        if self.shift is not None:
            out += self.shift * v
        return out

    def symmetric_bands(self):
        """Diagonal and off-diagonal of ``V^{1/2} A V^{-1/2}``."""
        lc = self.log_c[: self.n - 1]
        off = -np.exp(lc - 0.5 * (self.log_V[:-1] + self.log_V[1:]))
        return self.diag.copy(), off

    def shifted(self, extra_diag) -> "DiscreteOperator":
        extra = np.broadcast_to(np.asarray(extra_diag, dtype=float), self.diag.shape)
        total = extra if self.shift is None else self.shift + extra
        return DiscreteOperator(self.sub, self.diag + extra, self.sup, self.boundary,
                                self.log_c, self.log_V, shift=total)


def _geometry(grid: RadialGrid):
    y, F = grid.y, grid.log_w
    h = np.diff(y)
    x = np.maximum(np.diff(F), 0.0)
    ym = 0.5 * (y[:-1] + y[1:])
    log_c = np.log(ym / h) + F[:-1] - _log_E(x)
    th = _theta(x)
    g = x / h
    # right part of each dual cell: [y_i, y_i + h theta] inside cell i
    d_right = h * th
    log_right = _log_piece(y[:-1], d_right, F[:-1], g)
    # left part: [y_i + h theta, y_{i+1}] belongs to node i+1
    b = y[:-1] + d_right
    d_left = h - d_right
    log_left = _log_piece(b, d_left, F[:-1] + x * th, g)
    n = grid.N
    log_V = np.empty(n)
    log_V[0] = log_right[0]
    log_V[1:] = np.logaddexp(log_left[: n - 1], log_right[1:n])
    return log_c, log_V


def assemble(grid: RadialGrid, shift: float = 0.0, load=None) -> DiscreteOperator:
    """Tridiagonal operator with ``shift + load`` added to the diagonal.

    Off-diagonals are ``<= 0`` and each interior row sums to zero before the
    shift, so a non-negative shift and load keep the M-matrix sign pattern.
    """
    log_c, log_V = _geometry(grid)
    n = grid.N
    up = np.exp(log_c - log_V)            # c_{i+1/2} / V_i, rows 0..N-1
    down = np.exp(log_c[: n - 1] - log_V[1:])  # c_{i+1/2} / V_{i+1}
    diag = up.copy()
    diag[1:] += down
    sup = -up[: n - 1]
    sub = -down
    boundary = -float(up[n - 1])
    op = DiscreteOperator(sub=sub, diag=diag, sup=sup, boundary=boundary, log_c=log_c, log_V=log_V)
    extra = np.zeros(n)
    if shift:
        extra += shift
    if load is not None:
        extra += np.asarray(load, dtype=float)[:n]
    return op.shifted(extra) if np.any(extra) else op


def operator(grid: RadialGrid) -> DiscreteOperator:
    """Unshifted operator of ``grid``, assembled once and cached."""
    op = grid._cache.get("op")
    if op is None:
        op = assemble(grid)
        grid._cache["op"] = op
    return op


def dirichlet_eigen_estimate(grid: RadialGrid, k: int = 1):
    """Smallest Dirichlet eigenvalue(s) of the discrete operator.

    On the oracle configuration (``alpha = 0``, ``w = 1``) this approximates
    ``j_{0,1}^2``, the principal eigenvalue of the Laplacian on the unit disk.
    Returns a float for ``k = 1`` and an array otherwise.
    """
    from .numerics import smallest_eigenvalues

    d, e = assemble(grid).symmetric_bands()
    vals = smallest_eigenvalues(d, e, k)
    return float(vals[0]) if k == 1 else vals
