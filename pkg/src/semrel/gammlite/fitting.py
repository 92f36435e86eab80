"""Penalized least squares, GCV smoothing selection, and model fitting.

The solver handles one shape of problem: a design assembled from blocks
(intercept, centered spline blocks, centered dummy blocks), each block
optionally carrying a penalty matrix scaled by its own lambda.  The
penalized normal equations are solved by Cholesky-gated dense solves;
effective degrees of freedom come from the trace of the influence
matrix.  Model quality is summarized with a Gaussian AIC,

    aic = n * ln(rss / n) + 2 * (edf + 1),

where the +1 counts the variance parameter.  Smoothing parameters are
chosen by coordinate descent on GCV over a fixed log-spaced grid: two
full sweeps, ties resolved toward the smaller lambda.  Everything here
is deterministic.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import SingularSystem, TooFewRows
from .basis import BSplineBasis, SmoothTermSpec, bspline_basis

DEFAULT_LAMBDA_GRID = np.logspace(-4.0, 4.0, 41)

# below this fraction of total response energy the residual is treated as
# an exact interpolation and the AIC degenerates to -inf
_DEGENERATE_RSS_RATIO = 1e-14


@dataclass(frozen=True)
class FitResult:
    coefficients: np.ndarray
    lambdas: tuple
    edf_total: float
    edf_per_term: tuple
    rss: float
    n_used: int
    n_dropped: int
    aic: float
    gcv: float
    warnings: tuple


def _check_blocks(design_blocks, penalty_blocks):
    if not design_blocks:
        raise ValueError("at least one design block is required")
    if len(design_blocks) != len(penalty_blocks):
        raise ValueError("design and penalty block lists differ in length")
    n = None
    for i, X in enumerate(design_blocks):
        if X.ndim != 2 or X.shape[1] < 1:
            raise ValueError(f"design block {i} must be 2-D with >= 1 column")
        if n is None:
            n = X.shape[0]
        elif X.shape[0] != n:
            raise ValueError(f"design block {i} has {X.shape[0]} rows, expected {n}")
        S = penalty_blocks[i]
        if S is not None and S.shape != (X.shape[1], X.shape[1]):
            raise ValueError(f"penalty block {i} has shape {S.shape}, "
                             f"expected {(X.shape[1], X.shape[1])}")
    return n


class _NormalEquations:
    """Precomputed cross-products for one design; cheap lambda re-solves."""

    def __init__(self, design_blocks, penalty_blocks, z):
        design_blocks = [np.asarray(X, dtype=np.float64) for X in design_blocks]
        z = np.asarray(z, dtype=np.float64)
        n = _check_blocks(design_blocks, penalty_blocks)
        if z.ndim != 1 or z.shape[0] != n:
            raise ValueError(f"z must be 1-D with {n} entries, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise ValueError("z contains non-finite values")
        self.X = np.hstack(design_blocks)
        self.z = z
        self.n = n
        self.p = self.X.shape[1]
        self.XtX = self.X.T @ self.X
        self.Xtz = self.X.T @ z
        self.ztz = float(z @ z)
        self.slices = []
        start = 0
        for X in design_blocks:
            self.slices.append(slice(start, start + X.shape[1]))
            start += X.shape[1]
        self.penalties = [None if S is None else np.asarray(S, dtype=np.float64)
                          for S in penalty_blocks]

    def _matrix(self, lambdas):
        M = self.XtX.copy()
        for sl, S, lam in zip(self.slices, self.penalties, lambdas):
            if S is None:
                if lam is not None:
                    raise ValueError("lambda given for an unpenalized block")
                continue
            if lam is None or not math.isfinite(lam) or lam <= 0:
                raise ValueError(f"penalized block needs a finite lambda > 0, got {lam!r}")
            M[sl, sl] += lam * S
        return (M + M.T) / 2.0

    def solve(self, lambdas, exact_rss: bool):
        M = self._matrix(lambdas)
        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(
                f"penalized normal equations not positive definite "
                f"(p={self.p}, lambdas={list(lambdas)!r})") from exc
        # cholesky can squeak through on a numerically singular matrix; a
        # tiny pivot is the cheap tell, confirmed by a full condition check
        pivots = np.diag(L)
        if pivots.min() <= 1e-6 * pivots.max():
            condition = np.linalg.cond(M)
            if not np.isfinite(condition) or condition > 1e13:
                raise SingularSystem(
                    f"penalized normal equations numerically singular "
                    f"(condition {condition:.2e}, p={self.p}, "
                    f"lambdas={list(lambdas)!r})")
        rhs = np.concatenate([self.Xtz[:, None], self.XtX], axis=1)
        solution = np.linalg.solve(M, rhs)
        beta = solution[:, 0]
        influence = solution[:, 1:]
        edf_cols = np.diag(influence)
        edf_total = float(edf_cols.sum())
        edf_per_term = tuple(float(edf_cols[sl].sum()) for sl in self.slices)
        if exact_rss:
            resid = self.z - self.X @ beta
            rss = float(resid @ resid)
        else:
            rss = self.ztz - 2.0 * float(beta @ self.Xtz) + float(beta @ (self.XtX @ beta))
            rss = max(rss, 0.0)
        return beta, edf_total, edf_per_term, rss

    def gcv(self, lambdas) -> float:
        _, edf_total, _, rss = self.solve(lambdas, exact_rss=False)
        denom = self.n - edf_total
        if denom <= 0:
            return math.inf
        return self.n * rss / (denom * denom)


def _aic_gcv(n: int, rss: float, edf: float, ztz: float, warnings_out: list):
    if rss <= _DEGENERATE_RSS_RATIO * max(ztz, 1.0):
        warnings_out.append("residual sum of squares is numerically zero; "
                            "aic reported as -inf")
        aic = -math.inf
    else:
        aic = n * math.log(rss / n) + 2.0 * (edf + 1.0)
    denom = n - edf
    gcv = math.inf if denom <= 0 else n * rss / (denom * denom)
    return aic, gcv


def fit_penalized(design_blocks, penalty_blocks, z, lambdas,
                  n_dropped: int = 0) -> FitResult:
    """Solve one penalized least-squares problem at fixed lambdas.

    lambdas aligns with the blocks: a positive float per penalized block,
    None where the penalty is None.
    """
    ne = _NormalEquations(design_blocks, penalty_blocks, z)
    lambdas = tuple(lambdas)
    if len(lambdas) != len(ne.slices):
        raise ValueError(f"{len(lambdas)} lambdas for {len(ne.slices)} blocks")
    beta, edf_total, edf_per_term, rss = ne.solve(lambdas, exact_rss=True)
    notes: list = []
    aic, gcv = _aic_gcv(ne.n, rss, edf_total, ne.ztz, notes)
    return FitResult(
        coefficients=beta, lambdas=lambdas, edf_total=edf_total,
        edf_per_term=edf_per_term, rss=rss, n_used=ne.n, n_dropped=n_dropped,
        aic=aic, gcv=gcv, warnings=tuple(notes),
    )


def select_lambdas(design_blocks, penalty_blocks, z, grids=None,
                   sweeps: int = 2, init_lambda: float = 1.0):
    """Choose per-block lambdas by coordinate descent on GCV.

    grids may be one array shared by all penalized blocks or a per-block
    list (None entries for unpenalized blocks).  Each block scans its
    grid in ascending order while the others stay fixed; only a strict
    GCV improvement moves the choice, so ties settle on the smallest
    lambda.  Returns (lambdas, trace) where trace records
    (block_index, lambda, gcv) after every block update.
    """
    ne = _NormalEquations(design_blocks, penalty_blocks, z)
    n_blocks = len(ne.slices)
    if grids is None:
        grids = [DEFAULT_LAMBDA_GRID if S is not None else None for S in ne.penalties]
    elif isinstance(grids, np.ndarray) or (grids and isinstance(grids[0], float)):
        shared = np.asarray(grids, dtype=np.float64)
        grids = [shared if S is not None else None for S in ne.penalties]
    if len(grids) != n_blocks:
        raise ValueError(f"{len(grids)} grids for {n_blocks} blocks")

    lambdas = [init_lambda if S is not None else None for S in ne.penalties]
    penalized = [i for i, S in enumerate(ne.penalties) if S is not None]
    trace = []
    if not penalized:
        return tuple(lambdas), trace
    for _ in range(sweeps):
        for i in penalized:
            best_lam = None
            best_gcv = math.inf
            for lam in np.asarray(grids[i], dtype=np.float64):
                trial = list(lambdas)
                trial[i] = float(lam)
                try:
                    score = ne.gcv(trial)
                except SingularSystem:
                    continue
                if score < best_gcv:
                    best_gcv = score
                    best_lam = float(lam)
            if best_lam is None:
                raise SingularSystem(
                    f"every lambda candidate for block {i} produced a singular system")
            lambdas[i] = best_lam
            trace.append((i, best_lam, best_gcv))
    return tuple(lambdas), trace


@dataclass(frozen=True)
class ModelSpec:
    """What to fit: ln(response) against smooth terms and random intercepts."""
    response: str
    smooth_terms: tuple = ()
    random_intercepts: tuple = ()


@dataclass
class TermInfo:
    name: str
    kind: str                      # "intercept" | "smooth" | "factor"
    columns: slice
    basis: Optional[BSplineBasis] = None
    levels: Optional[tuple] = None
    level_means: Optional[np.ndarray] = None


class FittedModel:
    """A fit plus enough structure to evaluate its terms on new values."""

    def __init__(self, spec: ModelSpec, result: FitResult, terms: list):
        self.spec = spec
        self.result = result
        self.terms = terms

    def _term(self, name: str) -> TermInfo:
        for term in self.terms:
            if term.name == name:
                return term
        raise KeyError(f"no term named {name!r}; have {[t.name for t in self.terms]}")

    def term_names(self) -> list:
        return [t.name for t in self.terms]

    def partial_effect(self, name: str, n_points: int = 200):
        """Sampled contribution of one term, centered over the training data.

        Smooth terms return (covariate grid, effect at grid).  Factor
        terms return (levels, per-level effect).
        """
        term = self._term(name)
        beta = self.result.coefficients[term.columns]
        if term.kind == "smooth":
            grid = term.basis.grid(n_points)
            return grid, term.basis.design(grid) @ beta
        if term.kind == "factor":
            design = np.eye(len(term.levels)) - term.level_means
            return term.levels, design @ beta
        raise ValueError(f"term {name!r} has no partial effect")

    def predict(self, table: dict) -> np.ndarray:
        """Predicted ln(response) for new rows.

        Smooth covariates are required; factor columns are optional and
        unseen levels contribute zero (a population-level prediction).
        """
        n = None
        for term in self.terms:
            if term.kind == "smooth":
                values = np.asarray(table[term.basis.spec.covariate], dtype=np.float64)
                n = values.shape[0]
        if n is None:
            probe = next(iter(table.values()), [])
            n = len(probe) if not np.isscalar(probe) else 1
        out = np.zeros(n)
        for term in self.terms:
            beta = self.result.coefficients[term.columns]
            if term.kind == "intercept":
                out += beta[0]
            elif term.kind == "smooth":
                values = np.asarray(table[term.basis.spec.covariate], dtype=np.float64)
                out += term.basis.design(values) @ beta
            elif term.kind == "factor":
                column = term.name[3:-1]
                if column not in table:
                    continue
                values = list(table[column])
                index = {level: i for i, level in enumerate(term.levels)}
                design = np.zeros((n, len(term.levels)))
                for row, value in enumerate(values):
                    if value in index:
                        design[row, index[value]] = 1.0
                out += (design - term.level_means) @ beta
        return out


def _to_float_array(values) -> np.ndarray:
    if isinstance(values, np.ndarray):
        return values.astype(np.float64)
    return np.array([math.nan if v is None else float(v) for v in values],
                    dtype=np.float64)


def fit_model(spec: ModelSpec, table: dict, lambda_grid=None,
              min_rows: int = 10) -> FittedModel:
    """Fit ln(response) ~ intercept + smooths + ridge random intercepts.

    Rows with a nonpositive or non-finite response, or a non-finite value
    in any smooth covariate, are dropped and counted.  Fewer than
    min_rows surviving rows raises TooFewRows.
    """
    for term in spec.smooth_terms:
        if term.covariate not in table:
            raise ValueError(f"table has no column {term.covariate!r}")
    for column in spec.random_intercepts:
        if column not in table:
            raise ValueError(f"table has no column {column!r}")
    names = ["s(" + t.covariate + ")" for t in spec.smooth_terms]
    names += ["re(" + c + ")" for c in spec.random_intercepts]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate term names in model spec: {names}")

    y = _to_float_array(table[spec.response])
    mask = np.isfinite(y) & (y > 0)
    covariates = {}
    for term in spec.smooth_terms:
        x = _to_float_array(table[term.covariate])
        if x.shape[0] != y.shape[0]:
            raise ValueError(f"column {term.covariate!r} has {x.shape[0]} rows, "
                             f"response has {y.shape[0]}")
        covariates[term.covariate] = x
        mask &= np.isfinite(x)
    factors = {}
    for column in spec.random_intercepts:
        values = list(table[column])
        if len(values) != y.shape[0]:
            raise ValueError(f"column {column!r} has {len(values)} rows, "
                             f"response has {y.shape[0]}")
        for v in values:
            if not isinstance(v, str) or not v:
                raise ValueError(f"factor column {column!r} contains a non-string "
                                 f"or empty value: {v!r}")
        factors[column] = values

    n_total = y.shape[0]
    n_used = int(mask.sum())
    n_dropped = n_total - n_used
    if n_used < min_rows:
        raise TooFewRows(f"{n_used} usable rows after dropping {n_dropped}; "
                         f"need at least {min_rows}")
    z = np.log(y[mask])

    design_blocks = [np.ones((n_used, 1))]
    penalty_blocks: list = [None]
    terms = [TermInfo(name="intercept", kind="intercept", columns=slice(0, 1))]
    notes: list = []
    start = 1
    for term_spec in spec.smooth_terms:
        basis = bspline_basis(covariates[term_spec.covariate][mask], term_spec)
        notes.extend(basis.notes)
        block = basis.design(covariates[term_spec.covariate][mask])
        design_blocks.append(block)
        penalty_blocks.append(basis.penalty())
        terms.append(TermInfo(name="s(" + term_spec.covariate + ")", kind="smooth",
                              columns=slice(start, start + block.shape[1]), basis=basis))
        start += block.shape[1]
    for column in spec.random_intercepts:
        kept = [v for v, keep in zip(factors[column], mask) if keep]
        levels = tuple(sorted(set(kept)))
        onehot = np.zeros((n_used, len(levels)))
        index = {level: i for i, level in enumerate(levels)}
        for row, value in enumerate(kept):
            onehot[row, index[value]] = 1.0
        level_means = onehot.mean(axis=0)
        design_blocks.append(onehot - level_means)
        penalty_blocks.append(np.eye(len(levels)))
        terms.append(TermInfo(name="re(" + column + ")", kind="factor",
                              columns=slice(start, start + len(levels)),
                              levels=levels, level_means=level_means))
        start += len(levels)

    grids = None
    if lambda_grid is not None:
        grids = [np.asarray(lambda_grid, dtype=np.float64) if S is not None else None
                 for S in penalty_blocks]
    lambdas, _ = select_lambdas(design_blocks, penalty_blocks, z, grids=grids)
    result = fit_penalized(design_blocks, penalty_blocks, z, lambdas,
                           n_dropped=n_dropped)
    if notes:
        result = FitResult(
            coefficients=result.coefficients, lambdas=result.lambdas,
            edf_total=result.edf_total, edf_per_term=result.edf_per_term,
            rss=result.rss, n_used=result.n_used, n_dropped=result.n_dropped,
            aic=result.aic, gcv=result.gcv,
            warnings=tuple(notes) + result.warnings,
        )
    return FittedModel(spec, result, terms)
