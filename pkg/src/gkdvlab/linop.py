"""The linearized operator L = -d^2/dy^2 + 1 - 5 Q^4 around the ground state.

Provides pointwise application, constrained solves (bordered systems that
pin the kernel direction Q'), and constrained minimum-eigenvalue
computations for the coercivity and virial quadratic forms.

The matrix discretization is 4th-order centered finite differences on the
interior with two Dirichlet layers at each end; the result is symmetric
banded, which direct solvers and dense symmetric eigensolvers handle
robustly.  Spectral application (via grids.differentiate on periodic
grids) cross-validates the stencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EigenConvergenceError, NonSolvableError
from .grids import Field, Grid, differentiate, fd_weights, inner, norm2

# Dirichlet padding width: the 7-point interior stencil needs three layers
_PAD = 3


def apply_L(f: Field, Q: Field) -> Field:
    """L f = -f'' + f - 5 Q^4 f."""
    return -differentiate(f, 2) + f - 5.0 * (Q ** 4) * f


def _second_derivative_interior(n: int, h: float) -> sp.csr_matrix:
    """Symmetric 6th-order -d2/dy2 on the interior (Dirichlet padding).

    Matches the stencil of grids.differentiate so that matrix action and
    pointwise application agree to rounding away from the boundary.
    """
    m = n - 2 * _PAD
    stencil = -fd_weights(np.arange(-3, 4) * h, 0.0, 2)  # -f''
    diags = [np.full(m - abs(k), stencil[k + 3]) for k in range(-3, 4)]
    return sp.diags(diags, offsets=range(-3, 4), format="csr")


@dataclass(frozen=True)
class OperatorMatrix:
    """Discretized L restricted to the interior of a bounded grid."""

    grid: Grid
    matrix: sp.csr_matrix      # symmetric, interior points only
    potential: np.ndarray      # 5 Q^4 on the full grid

    @property
    def interior(self) -> slice:
        return slice(_PAD, self.grid.n - _PAD)

    def apply(self, f: Field) -> np.ndarray:
        """Interior action A @ f_interior (boundary layers taken as zero)."""
        return self.matrix @ f.values[self.interior]


def assemble_operator(grid: Grid, Q: Field,
                      include_potential: bool = True) -> OperatorMatrix:
    pot = 5.0 * Q.values ** 4 if include_potential else np.zeros(grid.n)
    A = _second_derivative_interior(grid.n, grid.h)
    A = A + sp.diags(1.0 - pot[_PAD:grid.n - _PAD])
    return OperatorMatrix(grid, A.tocsr(), pot)


def bordered_solve(op: OperatorMatrix, rhs: Field,
                   constraint: Field) -> tuple[Field, float]:
    """Solve A f + mu * c = rhs with (c, f)_{L2} = 0 via a Lagrange border.

    The multiplier column carries the constraint in PDE units while the
    constraint row carries the quadrature weight, so mu directly measures
    how much of the constraint direction the right-hand side contains.
    Returns the full-grid solution (zero Dirichlet layers) and mu.
    """
    n = op.grid.n
    sl = op.interior
    col = constraint.values[sl]
    row = col * op.grid.h
    m = op.matrix.shape[0]
    B = sp.bmat([[op.matrix, col[:, None]], [row[None, :], None]],
                format="csc")
    b = np.concatenate([rhs.values[sl], [0.0]])
    sol = spla.splu(B).solve(b)
    full = np.zeros(n)
    full[sl] = sol[:m]
    return Field(op.grid, full), float(sol[m])


def solve_constrained(h: Field, Q: Field, Qp: Field,
                      rtol: float = 1e-7) -> Field:
    """Unique f with L f = h and (f, Q') = 0; h must satisfy (h, Q') = 0."""
    mismatch = abs(inner(h, Qp))
    scale = norm2(h) * norm2(Qp)
    if scale > 0 and mismatch > rtol * scale:
        raise NonSolvableError(
            f"(h, Q') = {mismatch:.3e} exceeds {rtol:.1e} * scales")
    op = assemble_operator(h.grid, Q)
    f, _mu = bordered_solve(op, h, Qp)
    return f


# ---------------------------------------------------------------------------
# constrained quadratic-form minima

def _orthonormal_columns(vectors: list[np.ndarray]) -> np.ndarray:
    V = np.column_stack(vectors)
    Qm, _ = np.linalg.qr(V)
    return Qm


def _constrained_min_eig(A, D, constraints, dense_limit: int = 2100):
    """min of (v'Av)/(v'Dv) subject to (c, v) = 0 for each constraint.

    A symmetric, D symmetric positive definite (identity allowed as None).
    Dense reduction onto the constraint complement below dense_limit,
    LOBPCG above.
    """
    n = A.shape[0]
    if not constraints:
        C = None
    else:
        Vc = np.column_stack(constraints)
    if n <= dense_limit:
        Ad = A.toarray() if sp.issparse(A) else np.asarray(A)
        Dd = None if D is None else (D.toarray() if sp.issparse(D)
                                     else np.asarray(D))
        if constraints:
            C = scipy.linalg.null_space(Vc.T)
            Ar = C.T @ Ad @ C
            Dr = None if Dd is None else C.T @ Dd @ C
        else:
            Ar, Dr = Ad, Dd
        vals = scipy.linalg.eigh(Ar, Dr, subset_by_index=[0, 0],
                                 eigvals_only=True)
        return float(vals[0])
    # iterative path for large grids
    rng = np.random.default_rng(20230517)
    X = rng.standard_normal((n, 3))
    kwargs = {"largest": False, "maxiter": 2000, "tol": 1e-10}
    if constraints:
        kwargs["Y"] = _orthonormal_columns(constraints)
    try:
        vals, _ = spla.lobpcg(A, X, B=D, **kwargs)
    except Exception as exc:
        raise EigenConvergenceError(f"lobpcg failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise EigenConvergenceError("lobpcg returned non-finite eigenvalues",
                                    iterations=kwargs["maxiter"])
    return float(np.min(vals))


def coercivity_min(grid: Grid, Q: Field, constraints: list[Field],
                   include_potential: bool = True) -> float:
    """Smallest eigenvalue of L restricted to the constraint complement.

    With constraints {Q^3, Q'} the linearized energy is positive; the
    unconstrained operator has a negative direction along Q^3.
    """
    op = assemble_operator(grid, Q, include_potential=include_potential)
    sl = op.interior
    cons = [c.values[sl].copy() for c in constraints]
    return _constrained_min_eig(op.matrix, None, cons)


def virial_min(grid: Grid, Q: Field, Qp: Field, constraints: list[Field],
               localized_B: float | None = None) -> float:
    """Constrained minimum of the virial quadratic form.

    Form: 3 I[v_y^2] + I[v^2] - 5 I[Q^4 v^2] + 20 I[y Q' Q^3 v^2],
    normalized by I[v_y^2 + v^2]; constraints default to {y Lam Q, Q}.
    The gradient energy is represented through the symmetric second
    derivative matrix: first-derivative products (D1' D1) are blind to
    sawtooth modes and produce spurious negative directions.
    With localized_B set, the form and the normalization are restricted
    to |y| < B/2 (Dirichlet at the cut) and the correction term
    (1/B) I[v^2 exp(-|y|/2)] is added to the numerator, matching the
    localized estimate it certifies.
    """
    y = grid.points[_PAD:grid.n - _PAD]
    pot = (-5.0 * Q.values ** 4
           + 20.0 * grid.points * Qp.values * Q.values ** 3)
    pot = pot[_PAD:grid.n - _PAD]
    K = _second_derivative_interior(grid.n, grid.h)
    if localized_B is None:
        idx = np.arange(len(y))
        correction = np.zeros(len(y))
    else:
        idx = np.where(np.abs(y) < localized_B / 2.0)[0]
        correction = np.exp(-np.abs(y[idx]) / 2.0) / localized_B
    A = (3.0 * K[np.ix_(idx, idx)]
         + sp.diags(1.0 + pot[idx] + correction))
    D = K[np.ix_(idx, idx)] + sp.identity(len(idx))
    sl = slice(_PAD, grid.n - _PAD)
    cons = [c.values[sl][idx].copy() for c in constraints]
    return _constrained_min_eig(A.tocsr(), D.tocsr(), cons)


# ---------------------------------------------------------------------------
# identity report

def operator_report(ps, eigen_n: int = 1024) -> list[dict]:
    """Eigen-identity, coercivity and virial checks as report rows.

    Pointwise identities run on the profile grid; the eigenvalue
    computations run on a dedicated coarser grid where dense symmetric
    solves are cheap.
    """
    from .profiles import ground_state, scaling_generator

    rows = []

    def add_sup(name, resid, scale, tol):
        val = float(np.max(np.abs(resid.values))) / scale
        rows.append({"name": name, "computed": val, "target": 0.0,
                     "rel_err": val, "tol": tol, "passed": bool(val < tol)})

    Q, Qp, LamQ = ps.Q, ps.Qp, ps.LamQ
    Q3 = Q ** 3
    add_sup("sup|L Q'|", apply_L(Qp, Q), 1.0, 1e-8)
    add_sup("sup|L Q^3 + 8 Q^3| / sup Q^3", apply_L(Q3, Q) + 8.0 * Q3,
            float(np.max(np.abs(Q3.values))), 1e-8)
    add_sup("sup|L LamQ + 2 Q| / sup Q", apply_L(LamQ, Q) + 2.0 * Q,
            float(np.max(np.abs(Q.values))), 1e-7)

    g = Grid(eigen_n, ps.grid.half_length, ps.grid.kind)
    Qe = ground_state(g)
    Qpe = Qe.differentiate(1)
    LamQe = scaling_generator(Qe)
    yLamQe = Field(g, g.points * LamQe.values)

    mu_coer = coercivity_min(g, Qe, [Qe ** 3, Qpe])
    rows.append({"name": "coercivity min on {Q^3,Q'}^perp",
                 "computed": mu_coer, "target": 1.0,
                 "rel_err": abs(1.0 - mu_coer), "tol": 0.05,
                 "passed": bool(mu_coer >= 0.95)})
    mu_neg = coercivity_min(g, Qe, [])
    rows.append({"name": "unconstrained min (negative direction, -8)",
                 "computed": mu_neg, "target": -8.0,
                 "rel_err": abs(mu_neg + 8.0) / 8.0, "tol": 1e-2,
                 "passed": bool(mu_neg < 0.0)})
    mu_free = coercivity_min(g, Qe, [], include_potential=False)
    rows.append({"name": "free operator min >= 1",
                 "computed": mu_free, "target": 1.0,
                 "rel_err": abs(mu_free - 1.0), "tol": 1e-2,
                 "passed": bool(mu_free >= 1.0 - 1e-6)})
    mu_vir = virial_min(g, Qe, Qpe, [yLamQe, Qe])
    rows.append({"name": "virial min on {yLamQ,Q}^perp > 0",
                 "computed": mu_vir, "target": None, "rel_err": None,
                 "tol": None, "passed": bool(mu_vir > 0.0)})
    mu_vir_free = virial_min(g, Qe, Qpe, [])
    rows.append({"name": "virial min without constraints (smaller)",
                 "computed": mu_vir_free, "target": None, "rel_err": None,
                 "tol": None, "passed": bool(mu_vir_free < mu_vir)})
    return rows
