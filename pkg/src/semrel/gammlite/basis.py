"""Penalized B-spline bases for smooth model terms.

A smooth term is represented by a cubic B-spline basis with clamped
(repeated) boundary knots and interior knots at covariate quantiles.
Raw basis rows form a partition of unity.  For use inside a model the
columns are mean-centered and one column is dropped, which removes the
constant direction that the intercept already carries; the roughness
penalty is the squared second difference of the coefficients plus a unit
shrinkage of the remaining linear null direction, so a huge lambda
collapses the term onto the intercept instead of leaving a stray linear
trend unpenalized.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateCovariate


@dataclass(frozen=True)
class SmoothTermSpec:
    covariate: str
    basis_size: int = 10
    degree: int = 3
    penalty_order: int = 2

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if self.penalty_order < 1:
            raise ValueError(f"penalty_order must be >= 1, got {self.penalty_order}")
        if self.basis_size < self.degree + 1:
            raise ValueError(
                f"basis_size must be >= degree + 1 = {self.degree + 1}, got {self.basis_size}")


def _cox_de_boor(x: np.ndarray, knots: np.ndarray, degree: int) -> np.ndarray:
    """Evaluate all B-spline basis functions at x; rows sum to 1.

    x must already lie within [knots[degree], knots[-degree-1]].  The
    right boundary is closed: x at the upper limit lands in the last
    nonempty span.
    """
    n = x.shape[0]
    n_spans = knots.shape[0] - 1
    B = np.zeros((n, n_spans))
    for j in range(n_spans):
        if knots[j] < knots[j + 1]:
            B[:, j] = ((x >= knots[j]) & (x < knots[j + 1])).astype(np.float64)
    upper = knots[knots.shape[0] - degree - 1]
    at_upper = x == upper
    if at_upper.any():
        last = max(j for j in range(n_spans) if knots[j] < knots[j + 1])
        B[at_upper, :] = 0.0
        B[at_upper, last] = 1.0
    for d in range(1, degree + 1):
        cols = knots.shape[0] - 1 - d
        nxt = np.zeros((n, cols))
        for j in range(cols):
            acc = np.zeros(n)
            den_l = knots[j + d] - knots[j]
            if den_l > 0:
                acc += (x - knots[j]) / den_l * B[:, j]
            den_r = knots[j + d + 1] - knots[j + 1]
            if den_r > 0:
                acc += (knots[j + d + 1] - x) / den_r * B[:, j + 1]
            nxt[:, j] = acc
        B = nxt
    return B


class BSplineBasis:
    """A basis fitted to one covariate's observed values.

    Attributes:
        spec: the term specification this basis realizes.
        k: effective basis size after any knot reduction.
        knots: full clamped knot vector.
        col_means: training means of the raw basis columns.
        x_min, x_max: training covariate range; evaluation clamps to it.
        notes: human-readable warnings (e.g. basis size reduced).
    """

    def __init__(self, spec: SmoothTermSpec, knots: np.ndarray, k: int,
                 col_means: np.ndarray, x_min: float, x_max: float, notes: list):
        self.spec = spec
        self.knots = knots
        self.k = k
        self.col_means = col_means
        self.x_min = x_min
        self.x_max = x_max
        self.notes = notes

    @property
    def n_columns(self) -> int:
        """Columns contributed to the model design (one is dropped)."""
        return self.k - 1

    def raw_design(self, x) -> np.ndarray:
        """Uncentered basis values; each row sums to exactly 1."""
        x = np.clip(np.asarray(x, dtype=np.float64), self.x_min, self.x_max)
        return _cox_de_boor(x, self.knots, self.spec.degree)

    def design(self, x) -> np.ndarray:
        """Centered, identifiable design block for the model matrix."""
        return (self.raw_design(x) - self.col_means)[:, : self.k - 1]

    def penalty(self) -> np.ndarray:
        """Roughness penalty on the identifiable coefficient block."""
        D = np.diff(np.eye(self.k), n=self.spec.penalty_order, axis=0)
        S = D.T @ D
        u = np.arange(1, self.k + 1, dtype=np.float64) - (self.k + 1) / 2.0
        u /= np.linalg.norm(u)
        S = S + np.outer(u, u)
        return S[: self.k - 1, : self.k - 1]

    def grid(self, n_points: int = 200) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, n_points)


def bspline_basis(x, spec: SmoothTermSpec) -> BSplineBasis:
    """Build a basis from observed covariate values.

    Interior knots sit at evenly spaced quantiles.  Too few distinct
    quantiles shrink the basis (recorded in notes); a constant covariate
    cannot support any basis and raises DegenerateCovariate.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] == 0:
        raise ValueError("covariate must be a nonempty 1-D array")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"covariate {spec.covariate!r} contains non-finite values")
    x_min = float(np.min(x))
    x_max = float(np.max(x))
    if x_min == x_max:
        raise DegenerateCovariate(
            f"covariate {spec.covariate!r} is constant ({x_min}); no spline basis exists")

    notes = []
    n_interior = spec.basis_size - spec.degree - 1
    if n_interior > 0:
        probs = np.arange(1, n_interior + 1) / (n_interior + 1)
        candidates = np.quantile(x, probs)
        interior = np.unique(candidates)
        interior = interior[(interior > x_min) & (interior < x_max)]
    else:
        interior = np.empty(0)
    k = spec.degree + 1 + interior.shape[0]
    if k < spec.basis_size:
        notes.append(
            f"basis for {spec.covariate!r} reduced from {spec.basis_size} to {k}: "
            "not enough distinct quantile knots")

    knots = np.concatenate([
        np.full(spec.degree + 1, x_min),
        interior,
        np.full(spec.degree + 1, x_max),
    ])
    basis = BSplineBasis(spec, knots, k, np.zeros(k), x_min, x_max, notes)
    raw = basis.raw_design(x)
    basis.col_means = raw.mean(axis=0)
    return basis
