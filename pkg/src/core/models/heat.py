"""Positive heat solutions on R^n (n = 1, 2)"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import InvalidDomainError

SUPPORTED_DIMS = (1, 2)


def as_point(x, dim: int) -> np.ndarray:
    """Coerce a scalar or sequence to a float vector of length dim."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.shape != (dim,):
        raise InvalidDomainError(f"expected a point in R^{dim}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class FundamentalSolution:
    """Gaussian heat kernel rho(x, t) = (4 pi t)^(-n/2) exp(-|x|^2 / 4t)"""

    dim: int = 1

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMS:
            raise InvalidDomainError(f"dimension must be 1 or 2, got {self.dim}")

    @property
    def time_shift(self) -> float:
        return 0.0

    @property
    def locations(self) -> np.ndarray:
        return np.zeros((1, self.dim))

    @property
    def log_weights(self) -> np.ndarray:
        return np.zeros(1)


@dataclass(frozen=True)
class PointSourceSolution:
    """u(x, t) = sum_i w_i rho(x - y_i, t + eps)"""

    dim: int
    sources: Tuple[Tuple[Tuple[float, ...], float], ...]
    time_shift: float = 0.0
    _locations: np.ndarray = field(init=False, repr=False, compare=False)
    _log_weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMS:
            raise InvalidDomainError(f"dimension must be 1 or 2, got {self.dim}")
        if not self.sources:
            raise InvalidDomainError("a point-source solution needs at least one source")
        if self.time_shift < 0:
            raise InvalidDomainError(f"time shift must be nonnegative, got {self.time_shift}")

        locations, weights = [], []
        for location, weight in self.sources:
            if not weight > 0:
                raise InvalidDomainError(f"source weights must be positive, got {weight}")
            locations.append(as_point(location, self.dim))
            weights.append(float(weight))

        object.__setattr__(self, "_locations", np.array(locations))
        object.__setattr__(self, "_log_weights", np.log(np.array(weights)))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple], dim: int = 1, time_shift: float = 0.0) -> "PointSourceSolution":
        """Build from [(location, weight), ...] where location may be a scalar when dim = 1."""
        normalized = tuple(
            (tuple(np.atleast_1d(np.asarray(loc, dtype=float)).tolist()), float(w)) for loc, w in pairs
        )
        return cls(dim=dim, sources=normalized, time_shift=time_shift)

    @property
    def locations(self) -> np.ndarray:
        return self._locations

    @property
    def log_weights(self) -> np.ndarray:
        return self._log_weights


@dataclass(frozen=True)
class SymmetricMatrix2:
    """Symmetric n x n matrix (n <= 2) stored as its upper triangle"""

    dim: int
    upper: Tuple[float, ...]  # (a11,) or (a11, a12, a22)

    def __post_init__(self):
        expected = 1 if self.dim == 1 else 3
        if len(self.upper) != expected:
            raise InvalidDomainError(f"expected {expected} upper-triangle entries for dim {self.dim}")

    @classmethod
    def from_array(cls, matrix: np.ndarray) -> "SymmetricMatrix2":
        matrix = np.atleast_2d(matrix)
        if matrix.shape == (1, 1):
            return cls(1, (float(matrix[0, 0]),))
        return cls(2, (float(matrix[0, 0]), float(0.5 * (matrix[0, 1] + matrix[1, 0])), float(matrix[1, 1])))

    def to_array(self) -> np.ndarray:
        if self.dim == 1:
            return np.array([[self.upper[0]]])
        a11, a12, a22 = self.upper
        return np.array([[a11, a12], [a12, a22]])

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.to_array())

    def trace(self) -> float:
        return float(np.trace(self.to_array()))

    def shifted(self, scalar: float) -> "SymmetricMatrix2":
        """Return self + scalar * I."""
        if self.dim == 1:
            return SymmetricMatrix2(1, (self.upper[0] + scalar,))
        a11, a12, a22 = self.upper
        return SymmetricMatrix2(2, (a11 + scalar, a12, a22 + scalar))
