"""Channel matrices and divergence-packed message sets.

A message set is a finite family of output-marginal distributions whose
pairwise KL divergence is at least some radius ``r0`` (bits).  Two
constructions are provided:

* ``DMC_GRID`` -- the uniform grid of resolution 1/grid_n on the output
  simplex, intersected with the channel's achievable marginal set (the
  image of the input simplex under the transition matrix).
* ``BINARY`` -- evenly spaced points on the achievable interval
  [delta1, 1 - delta2] of a binary output alphabet.

Total-variation spacing converts to a KL radius through Pinsker's
inequality, giving grid resolution r = sqrt(r0 / (2 log2 e)) for the grid
construction and r = sqrt(r0 / (2 log2 e)) / xi, xi = 1 - delta1 - delta2,
for the interval construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InfeasibleError,
    InputError,
    ResourceLimitError,
    SingularMatrixError,
)
from .probability import LOG2E, Distribution

#: |det W| at or below this is treated as rank-deficient.
DET_TOL = 1e-9

#: Default nonnegativity tolerance for membership in the achievable set.
MEMBERSHIP_TOL = 1e-10

#: Default cap on grid enumeration size.
GRID_CAP = 10**7

# Relief added before flooring 1/r: guards against a half-ulp shortfall
# when r was produced by sqrt/division and 1/r lands on an integer.
_FLOOR_RELIEF = 1e-9


def _floor_inv(r: float) -> int:
    return int(math.floor(1.0 / r + _FLOOR_RELIEF))


class ChannelMatrix:
    """Row-stochastic transition matrix W(y|x) with positivity metadata."""

    __slots__ = ("_m",)

    def __init__(self, rows: Sequence[Sequence[float]]):
        mat = np.asarray(rows, dtype=float)
        if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 2:
            raise InputError(f"need a 2-D matrix with >= 2 columns, got shape {mat.shape}")
        # Row validation and renormalization share the Distribution contract.
        mat = np.vstack([Distribution(row).probs for row in mat])
        mat.setflags(write=False)
        self._m = mat

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def nx(self) -> int:
        return self._m.shape[0]

    @property
    def ny(self) -> int:
        return self._m.shape[1]

    @property
    def is_square(self) -> bool:
        return self.nx == self.ny

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self._m > 0.0))

    @property
    def det_abs(self) -> float:
        """Absolute determinant (square matrices only)."""
        if not self.is_square:
            raise InputError(f"determinant needs a square matrix, got {self.nx}x{self.ny}")
        return abs(float(np.linalg.det(self._m)))

    @property
    def full_rank(self) -> bool:
        return self.is_square and self.det_abs > DET_TOL

    def row(self, x: int) -> Distribution:
        return Distribution(self._m[x])

    def __repr__(self) -> str:
        return f"ChannelMatrix({self._m.tolist()!r})"

    @staticmethod
    def bsc(delta: float) -> "ChannelMatrix":
        """Binary symmetric channel with crossover probability delta."""
        if not 0.0 < delta < 0.5:
            raise InputError(f"bsc crossover must lie in (0, 0.5), got {delta}")
        return ChannelMatrix([[1.0 - delta, delta], [delta, 1.0 - delta]])

    @staticmethod
    def bec(eta: float) -> "ChannelMatrix":
        """Binary erasure channel (2x3, output alphabet {0, e, 1})."""
        if not 0.0 < eta < 1.0:
            raise InputError(f"bec erasure probability must lie in (0, 1), got {eta}")
        return ChannelMatrix([[1.0 - eta, eta, 0.0], [0.0, eta, 1.0 - eta]])


def _require_full_rank_square(w: ChannelMatrix) -> None:
    if not w.is_square:
        raise SingularMatrixError(f"matrix must be square, got {w.nx}x{w.ny}")
    if w.det_abs <= DET_TOL:
        raise SingularMatrixError(f"|det| = {w.det_abs} <= {DET_TOL}: not full rank")


class SetKind(Enum):
    DMC_GRID = "DMC_GRID"
    BINARY = "BINARY"


@dataclass(frozen=True)
class BinaryParams:
    delta1: float
    delta2: float
    xi: float


@dataclass(frozen=True)
class MessageSet:
    """Ordered packing centers plus construction provenance.

    ``grid_coords`` keeps the integer grid coordinates for DMC_GRID sets
    (one tuple per center); BINARY sets leave it None.
    """

    centers: tuple[Distribution, ...]
    radius_r0: float
    grid_n: int
    kind: SetKind
    binary_params: Optional[BinaryParams] = None
    grid_coords: Optional[tuple[tuple[int, ...], ...]] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.centers)

    @property
    def step(self) -> float:
        """Mass moved between a coordinate pair by one grid step."""
        if self.kind is SetKind.BINARY:
            assert self.binary_params is not None
            return self.binary_params.xi / self.grid_n
        return 1.0 / self.grid_n

    def center_matrix(self) -> np.ndarray:
        return np.vstack([c.probs for c in self.centers])


# ---------------------------------------------------------------------------
# Grid construction
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int):
    """Yield all nonnegative integer compositions, lexicographically."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def grid_simplex(r: float, k: int, cap: int = GRID_CAP) -> list[Distribution]:
    """All points of the uniform grid of resolution 1/floor(1/r) on the
    (k-1)-simplex, in lexicographic coordinate order."""
    if k < 2:
        raise InputError(f"alphabet size must be >= 2, got {k}")
    if not 0.0 < r <= 1.0:
        raise InputError(f"resolution r must lie in (0, 1], got {r}")
    n = _floor_inv(r)
    if n < 1:
        raise InputError(f"floor(1/r) must be >= 1, got r={r}")
    count = math.comb(n + k - 1, k - 1)
    if count > cap:
        raise ResourceLimitError(f"grid would hold {count} points, cap is {cap}")
    return [Distribution(np.asarray(a, dtype=float) / n) for a in _compositions(n, k)]


def marginal_space_contains(w: ChannelMatrix, p: Distribution,
                            tol: float = MEMBERSHIP_TOL) -> bool:
    """Whether p is an achievable output marginal of w.

    Solves x . W = p (unique for full-rank square W) and accepts iff every
    entry of x is >= -tol.
    """
    _require_full_rank_square(w)
    if len(p) != w.ny:
        raise InputError(f"marginal length {len(p)} != output alphabet {w.ny}")
    x = np.linalg.solve(w.matrix.T, p.probs)
    return bool(np.all(x >= -tol))


def build_dmc_message_set(w: ChannelMatrix, r0: float, cap: int = GRID_CAP) -> MessageSet:
    """Grid packing centers of KL radius r0 inside the achievable set of w."""
    _require_full_rank_square(w)
    if not w.strictly_positive:
        raise InputError("channel matrix must be strictly positive")
    if r0 <= 0.0:
        raise InputError(f"packing radius must be positive, got {r0}")
    r = math.sqrt(r0 / (2.0 * LOG2E))
    if r > 1.0:
        raise InfeasibleError(f"radius r0={r0} is too coarse: grid resolution {r} > 1")
    return _dmc_set_from_grid(w, _floor_inv(r), r0, cap)


def build_dmc_message_set_by_grid(w: ChannelMatrix, grid_n: int,
                                  cap: int = GRID_CAP) -> MessageSet:
    """Grid packing centers at resolution 1/grid_n; the recorded radius is
    the KL radius 2 log2(e) / grid_n^2 the resolution guarantees."""
    _require_full_rank_square(w)
    if not w.strictly_positive:
        raise InputError("channel matrix must be strictly positive")
    if grid_n < 1:
        raise InputError(f"grid_n must be >= 1, got {grid_n}")
    r0 = 2.0 * LOG2E / (grid_n * grid_n)
    return _dmc_set_from_grid(w, grid_n, r0, cap)


def _dmc_set_from_grid(w: ChannelMatrix, n: int, r0: float, cap: int) -> MessageSet:
    k = w.ny
    count = math.comb(n + k - 1, k - 1)
    if count > cap:
        raise ResourceLimitError(f"grid would hold {count} points, cap is {cap}")
    centers: list[Distribution] = []
    coords: list[tuple[int, ...]] = []
    for a in _compositions(n, k):
        cand = Distribution(np.asarray(a, dtype=float) / n)
        if marginal_space_contains(w, cand):
            centers.append(cand)
            coords.append(a)
    if not centers:
        raise InfeasibleError(f"no grid point of resolution 1/{n} is achievable")
    return MessageSet(centers=tuple(centers), radius_r0=r0, grid_n=n,
                      kind=SetKind.DMC_GRID, grid_coords=tuple(coords))


# ---------------------------------------------------------------------------
# Binary (interval) construction
# ---------------------------------------------------------------------------


def _check_binary_params(delta1: float, delta2: float) -> float:
    if delta1 <= 0.0 or delta2 <= 0.0:
        raise InputError(f"delta1 and delta2 must be positive, got {delta1}, {delta2}")
    xi = 1.0 - delta1 - delta2
    if xi <= 0.0:
        raise InputError(f"delta1 + delta2 must be < 1, got {delta1 + delta2}")
    return xi


def _binary_set(delta1: float, delta2: float, xi: float, n: int, r0: float) -> MessageSet:
    centers = tuple(
        Distribution((delta1 + xi * a / n, 1.0 - delta1 - xi * a / n))
        for a in range(n + 1)
    )
    return MessageSet(centers=centers, radius_r0=r0, grid_n=n, kind=SetKind.BINARY,
                      binary_params=BinaryParams(delta1, delta2, xi))


def build_binary_message_set(delta1: float, delta2: float, r0: float) -> MessageSet:
    """Evenly spaced centers of KL radius r0 on [delta1, 1 - delta2]."""
    xi = _check_binary_params(delta1, delta2)
    if r0 <= 0.0:
        raise InputError(f"packing radius must be positive, got {r0}")
    r = math.sqrt(r0 / (2.0 * LOG2E)) / xi
    n = _floor_inv(r) if r <= 1.0 else 0
    if n < 1:
        raise InfeasibleError(f"radius r0={r0} is too coarse for width xi={xi}")
    return _binary_set(delta1, delta2, xi, n, r0)


def build_binary_message_set_by_size(delta1: float, delta2: float, m: int) -> MessageSet:
    """Exactly m evenly spaced centers on [delta1, 1 - delta2]; the recorded
    radius is the realized minimum pairwise KL divergence."""
    xi = _check_binary_params(delta1, delta2)
    if m < 2:
        raise InputError(f"message count must be >= 2, got {m}")
    ms = _binary_set(delta1, delta2, xi, m - 1, r0=0.0)
    r0 = min_pairwise_kl(ms)
    return MessageSet(centers=ms.centers, radius_r0=r0, grid_n=m - 1,
                      kind=SetKind.BINARY, binary_params=ms.binary_params)


# ---------------------------------------------------------------------------
# Packing counts and diagnostics
# ---------------------------------------------------------------------------


def packing_count_bounds(r0: float, k: int) -> tuple[float, float, int]:
    """(lower, upper, exact) sizes for the full-simplex grid packing of KL
    radius r0 on a k-letter alphabet.

    exact is the grid count C(floor(1/r)+k-1, k-1); lower/upper bracket it
    through the standard (n/k)^k <= C(n,k) <= (ne/k)^k estimates, written
    in terms of the un-floored resolution 1/r.
    """
    if k < 2:
        raise InputError(f"alphabet size must be >= 2, got {k}")
    if r0 <= 0.0:
        raise InputError(f"packing radius must be positive, got {r0}")
    r = math.sqrt(r0 / (2.0 * LOG2E))
    inv = 1.0 / r
    n = _floor_inv(r)
    exact = math.comb(n + k - 1, k - 1)
    lower = ((inv + k - 2.0) / (k - 1.0)) ** (k - 1)
    upper = ((inv + k - 1.0) * math.e / (k - 1.0)) ** (k - 1)
    return lower, upper, exact


def packing_lower_bound_subspace(r0: float, k: int, lam: float) -> float:
    """Guaranteed packing count on an achievable subset occupying volume
    fraction lam of the simplex, minus the boundary loss term.

    May be negative at coarse radii; the value is informative only when
    positive and is returned unclamped.
    """
    if not 0.0 < lam <= 1.0:
        raise InputError(f"volume fraction must lie in (0, 1], got {lam}")
    if k < 2:
        raise InputError(f"alphabet size must be >= 2, got {k}")
    if r0 <= 0.0:
        raise InputError(f"packing radius must be positive, got {r0}")
    r = math.sqrt(r0 / (2.0 * LOG2E))
    inv = 1.0 / r
    n = _floor_inv(r)
    bulk = lam * ((inv + k - 2.0) / (k - 1.0)) ** (k - 1)
    boundary = 2.0 * k * math.comb(n + k - 2, k - 2)
    return bulk - boundary


def subspace_lower_bound_by_grid(grid_n: int, k: int, lam: float) -> float:
    """packing_lower_bound_subspace with the resolution pinned to exactly
    1/grid_n (the CLI-facing parameterization)."""
    r0 = 2.0 * LOG2E / (grid_n * grid_n)
    return packing_lower_bound_subspace(r0, k, lam)


def volume_ratio(w: ChannelMatrix) -> float:
    """Volume of the achievable marginal set relative to the full simplex.

    For square full-rank W the achievable set is the affine image of the
    simplex, so the ratio is |det W| (1 - 2 delta for a symmetric binary
    channel).
    """
    _require_full_rank_square(w)
    return w.det_abs


def min_pairwise_kl(s: MessageSet) -> float:
    """Minimum of D(P_i || P_j) over ordered pairs i != j, in bits."""
    m = len(s)
    if m < 2:
        raise InputError(f"need at least 2 centers, got {m}")
    pmat = s.center_matrix()
    logs = np.where(pmat > 0.0, np.log2(pmat, where=pmat > 0.0, out=np.zeros_like(pmat)),
                    -np.inf)
    # Entropy-like term sum_y p log2 p with 0 log 0 = 0.
    self_terms = np.where(pmat > 0.0, pmat * logs, 0.0).sum(axis=1)
    # Cross terms sum_y p_i log2 q_j; -inf propagates infeasible support.
    cross = pmat @ np.where(np.isfinite(logs), logs, -1e300).T
    div = self_terms[:, None] - cross
    np.fill_diagonal(div, np.inf)
    return float(div.min())
