"""The four-parameter family of almost complex connections and its
distinguished members (natural, canonical, 3-form torsion, symmetric).

The difference tensor Q(X,Y,Z) = g(D'_X Y - D_X Y, Z) is affine in the four
parameters, so a point's family is precomputed as five basis tensors; every
parameter sweep is then a cheap linear combination.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .config import DEFAULT_TOLS
from .errors import InternalConsistencyError
from .pointwise import NordenPoint, generate_in_class, nijenhuis_pair, random_point
from .report import Check, Report
from .tensor import DOWN, Tensor, component_norm, tensor

YANO_PARAMS = (0.0, 0.25, 0.0, 0.0)
THREE_FORM_PARAMS = (0.0, 0.0, 0.0, 0.25)
CANONICAL_PARAMS = (0.0, 0.125, 0.0, -0.125)


@dataclass(frozen=True)
class ConnectionParams:
    """Coefficients of the connection family, with the two standard
    reparameterizations used on complex and on quasi-Kaehler backgrounds."""

    t1: float
    t2: float
    t3: float
    t4: float

    @property
    def p(self) -> float:
        return self.t1 + self.t3

    @property
    def q(self) -> float:
        return self.t2 + self.t4

    @property
    def s(self) -> float:
        return self.t1 - self.t3

    @property
    def t(self) -> float:
        return self.t2 - self.t4

    @classmethod
    def from_pq(cls, p: float, q: float) -> "ConnectionParams":
        return cls(p, q, 0.0, 0.0)

    @classmethod
    def from_st(cls, s: float, t: float) -> "ConnectionParams":
        return cls(s, t, 0.0, 0.0)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.t1, self.t2, self.t3, self.t4)


def _params(params) -> ConnectionParams:
    if isinstance(params, ConnectionParams):
        return params
    return ConnectionParams(*params)


class ConnectionFamily:
    """All parameter-affine tensors of the family at one point."""

    def __init__(self, pt: NordenPoint):
        F, J = pt.F.array, pt.J.array
        self.pt = pt
        self.dim = pt.dim

        FXJY = np.einsum("iak,aj->ijk", F, J)      # F(X, JY, Z)
        FYX = np.einsum("jik->ijk", F)             # F(Y, X, Z)
        FJYJX = np.einsum("abk,aj,bi->ijk", F, J, J)
        FYJX = np.einsum("jak,ai->ijk", F, J)      # F(Y, JX, Z)
        FJYX = np.einsum("aik,aj->ijk", F, J)      # F(JY, X, Z)
        FZX = np.einsum("kij->ijk", F)             # F(Z, X, Y)
        FJZJX = np.einsum("abj,ak,bi->ijk", F, J, J)
        FZJX = np.einsum("kaj,ai->ijk", F, J)      # F(Z, JX, Y)
        FJZX = np.einsum("aij,ak->ijk", F, J)      # F(JZ, X, Y)

        self.q_base = 0.5 * FXJY
        self.q_coeffs = (
            FYX + FJYJX,
            FYJX - FJYX,
            FZX + FJZJX,
            FZJX - FJZX,
        )

        FXYZ = F
        FJXJY = np.einsum("abk,ai,bj->ijk", F, J, J)
        FJXY = np.einsum("ajk,ai->ijk", F, J)
        FJZJXY = np.einsum("abj,ak,bi->ijk", F, J, J)
        self.t_base = 0.5 * (FXJY - FYJX)
        self.t_coeffs = (
            FYX - FXYZ + FJYJX - FJXJY,
            -(FXJY - FYJX) + (FJXY - FJYX),
            2.0 * FJZJXY,
            2.0 * FZJX,
        )

        N, Ntilde = nijenhuis_pair(pt)
        self.N = N.array
        self.Ntilde = Ntilde.array

    # -- family members ----------------------------------------------------

    def difference(self, params) -> np.ndarray:
        c = _params(params)
        Q = self.q_base.copy()
        for t, basis in zip(c.as_tuple(), self.q_coeffs):
            if t:
                Q = Q + t * basis
        return Q

    def torsion_direct(self, params) -> np.ndarray:
        Q = self.difference(params)
        return Q - np.transpose(Q, (1, 0, 2))

    def torsion_formula(self, params) -> np.ndarray:
        c = _params(params)
        T = self.t_base.copy()
        for t, basis in zip(c.as_tuple(), self.t_coeffs):
            if t:
                T = T + t * basis
        return T

    def torsion(self, params, tol: float = DEFAULT_TOLS.structural) -> np.ndarray:
        """Torsion by the closed formula, cross-checked against the
        antisymmetrized difference tensor."""
        T = self.torsion_formula(params)
        direct = self.torsion_direct(params)
        gap = component_norm(T - direct)
        if gap > tol * max(1.0, component_norm(T)):
            raise InternalConsistencyError(
                f"torsion routes disagree (residual {gap:.3g})"
            )
        return T

    # -- residuals ----------------------------------------------------------

    def almost_complex_residual(self, params) -> float:
        pt = self.pt
        Q = self.difference(params)
        ginv = pt.g_inverse
        J = pt.J.array
        A = np.einsum("ijm,mk->kij", pt.F.array, ginv)
        Qhat = np.einsum("ijm,mk->kij", Q, ginv)
        res = (
            A
            + np.einsum("kia,aj->kij", Qhat, J)
            - np.einsum("km,mij->kij", J, Qhat)
        )
        return component_norm(res)

    def metric_derivative_direct(self, params) -> np.ndarray:
        Q = self.difference(params)
        return -Q - np.transpose(Q, (0, 2, 1))

    def assoc_metric_derivative_direct(self, params) -> np.ndarray:
        pt = self.pt
        Q = self.difference(params)
        J = pt.J.array
        F_swapped = np.transpose(pt.F.array, (0, 2, 1))  # F(X, Z, Y)
        return (
            F_swapped
            - np.einsum("ija,ak->ijk", Q, J)
            - np.einsum("ika,aj->ijk", Q, J)
        )

    def metric_derivative_formula(self, params) -> np.ndarray:
        c = _params(params)
        Nt = self.Ntilde
        NtX = np.einsum("jki->ijk", Nt)
        NtJX = np.einsum("jka,ai->ijk", Nt, self.pt.J.array)
        return c.q * NtX - c.p * NtJX

    def assoc_metric_derivative_formula(self, params) -> np.ndarray:
        c = _params(params)
        Nt = self.Ntilde
        NtX = np.einsum("jki->ijk", Nt)
        NtJX = np.einsum("jka,ai->ijk", Nt, self.pt.J.array)
        return -c.p * NtX - c.q * NtJX

    def natural_residual(self, params) -> float:
        return component_norm(self.metric_derivative_direct(params)) + component_norm(
            self.assoc_metric_derivative_direct(params)
        )

    def canonical_residual(self, params) -> float:
        T = self.torsion_formula(params)
        J = self.pt.J.array
        lhs = (
            T
            + np.einsum("jki->ijk", T)                   # T(Y, Z, X)
            - np.einsum("ajc,ai,ck->ijk", T, J, J)       # T(JX, Y, JZ)
            - np.einsum("jca,ck,ai->ijk", T, J, J)       # T(Y, JZ, JX)
        )
        return component_norm(lhs)

    def three_form_residual(self, params) -> float:
        T = self.torsion_formula(params)
        return component_norm(T + np.transpose(T, (0, 2, 1)))

    def symmetric_residual(self, params) -> float:
        return component_norm(self.torsion_formula(params))

    def check_torsion_nijenhuis_identity(self, params,
                                         tol: float = DEFAULT_TOLS.structural) -> None:
        """T(X,Y) - T(JX,JY) = N(X,Y)/2 holds for every family member."""
        T = self.torsion_formula(params)
        J = self.pt.J.array
        lhs = T - np.einsum("abk,ai,bj->ijk", T, J, J)
        gap = component_norm(lhs - 0.5 * self.N)
        if gap > tol * max(1.0, component_norm(T) + component_norm(self.N)):
            raise InternalConsistencyError(
                f"torsion/Nijenhuis identity violated (residual {gap:.3g})"
            )


# ---------------------------------------------------------------------------
# module-level conveniences matching the operation map

def difference_tensor(pt: NordenPoint, params) -> Tensor:
    return tensor(ConnectionFamily(pt).difference(params), (DOWN, DOWN, DOWN))


def almost_complex_residual(pt: NordenPoint, params) -> float:
    return ConnectionFamily(pt).almost_complex_residual(params)


def torsion_tensor(pt: NordenPoint, params) -> Tensor:
    return tensor(ConnectionFamily(pt).torsion(params), (DOWN, DOWN, DOWN))


def metric_derivatives(pt: NordenPoint, params) -> tuple[Tensor, Tensor]:
    fam = ConnectionFamily(pt)
    val = (DOWN, DOWN, DOWN)
    return (
        tensor(fam.metric_derivative_direct(params), val),
        tensor(fam.assoc_metric_derivative_direct(params), val),
    )


def special_residuals(pt: NordenPoint, params) -> dict[str, float]:
    fam = ConnectionFamily(pt)
    fam.check_torsion_nijenhuis_identity(params)
    return {
        "natural": fam.natural_residual(params),
        "canonical": fam.canonical_residual(params),
        "three_form": fam.three_form_residual(params),
        "symmetric": fam.symmetric_residual(params),
    }


# ---------------------------------------------------------------------------
# parameter grids

def parameter_grid_axis() -> tuple[float, ...]:
    """Five-point axis on [-1, 1] joined with the distinguished values."""
    values = {-1.0, -0.5, 0.0, 0.5, 1.0, 0.125, 0.25, -0.125, -0.25}
    return tuple(sorted(values))


def sweep_minimum(fam: ConnectionFamily, residual_name: str, exclude=None,
                  min_torsion: float = 0.0) -> tuple[float, tuple[float, ...] | None]:
    """Grid minimum of a residual over the parameter box.

    ``exclude`` skips one exact tuple (separation tests around a known zero).
    ``min_torsion`` discards parameters whose torsion is essentially zero;
    a vanishing torsion is trivially a 3-form, so nonexistence sweeps for
    genuinely antisymmetric torsion must ignore the symmetric member.
    """
    fn = getattr(fam, f"{residual_name}_residual")
    best = np.inf
    best_at = None
    axis = parameter_grid_axis()
    for combo in product(axis, repeat=4):
        if exclude is not None and combo == exclude:
            continue
        if min_torsion and fam.symmetric_residual(combo) < min_torsion:
            continue
        r = fn(combo)
        if r < best:
            best, best_at = r, combo
    return float(best), best_at


# ---------------------------------------------------------------------------
# the decision matrix

TABLE1_ROWS = ("almost complex", "natural", "canonical", "T is a 3-form", "symmetric")
TABLE1_COLUMNS = ("W1+W2+W3", "W1+W2", "W3")

# stated parameter conditions, as representative tuples; None marks a cell
# where no family member exists and a sweep must come up empty
_TABLE1_CELLS: dict[tuple[str, str], tuple[tuple[float, ...], ...] | None] = {
    ("almost complex", "W1+W2+W3"): ((0.3, -0.7, 0.45, 0.1), (1.0, 1.0, 1.0, 1.0)),
    ("almost complex", "W1+W2"): ((0.3, -0.7, 0.45, 0.1),),
    ("almost complex", "W3"): ((0.3, -0.7, 0.45, 0.1),),
    ("natural", "W1+W2+W3"): ((0.4, -0.2, -0.4, 0.2), (1.0, 0.5, -1.0, -0.5)),
    ("natural", "W1+W2"): ((0.4, -0.2, -0.4, 0.2),),          # p = q = 0
    ("natural", "W3"): ((0.3, -0.7, 0.45, 0.1),),             # any s, t
    ("canonical", "W1+W2+W3"): (CANONICAL_PARAMS,),
    ("canonical", "W1+W2"): ((0.0, 0.0, 0.0, 0.0), (0.25, 0.1, -0.25, -0.1)),
    ("canonical", "W3"): (CANONICAL_PARAMS, YANO_PARAMS),     # s = 0, t = 1/4
    ("T is a 3-form", "W1+W2+W3"): (THREE_FORM_PARAMS,),
    ("T is a 3-form", "W1+W2"): None,
    ("T is a 3-form", "W3"): (THREE_FORM_PARAMS, (0.0, -0.125, 0.0, 0.125)),
    ("symmetric", "W1+W2+W3"): None,
    ("symmetric", "W1+W2"): (YANO_PARAMS,),
    ("symmetric", "W3"): None,
}

_ROW_RESIDUALS = {
    "almost complex": ("almost_complex",),
    "natural": ("natural",),
    "canonical": ("natural", "canonical"),
    "T is a 3-form": ("three_form",),
    "symmetric": ("symmetric",),
}

# which residual a nonexistence sweep minimizes, per row
_ROW_SWEEP = {"T is a 3-form": "three_form", "symmetric": "symmetric"}


def _column_point(column: str, seed: int, dim: int) -> NordenPoint:
    if column == "W1+W2+W3":
        # generic point, resampled until both Nijenhuis tensors are visible
        for attempt in range(100):
            pt = random_point(seed + 7919 * attempt, dim)
            N, Nt = nijenhuis_pair(pt)
            if component_norm(N) > 0.1 and component_norm(Nt) > 0.1:
                return pt
        raise InternalConsistencyError("could not draw a nondegenerate generic point")
    if column == "W1+W2":
        return generate_in_class("W1+W2", seed, dim)
    return generate_in_class("W3", seed, dim)


def table1_matrix(seed: int, dim: int = 4,
                  tols=DEFAULT_TOLS) -> Report:
    """Reproduce the connection-type decision matrix: each stated parameter
    condition must pass at the structural tolerance and each empty cell's
    sweep minimum must stay above the nonexistence bound."""
    report = Report()
    points = {col: _column_point(col, seed, dim) for col in TABLE1_COLUMNS}
    families = {col: ConnectionFamily(pt) for col, pt in points.items()}
    for row in TABLE1_ROWS:
        for col in TABLE1_COLUMNS:
            cell = _TABLE1_CELLS[(row, col)]
            fam = families[col]
            name = f"table1.{_slug(row)}.{_slug(col)}"
            if cell is None:
                floor = tols.separation if row == "T is a 3-form" else 0.0
                minimum, at = sweep_minimum(fam, _ROW_SWEEP[row], min_torsion=floor)
                report.add(
                    Check(
                        check=name + ".nonexistence",
                        residual=minimum,
                        tolerance=tols.nonexistence,
                        passed=minimum > tols.nonexistence,
                        klass=col,
                        params=at,
                        seed=seed,
                    )
                )
                continue
            for params in cell:
                worst = max(
                    getattr(fam, f"{r}_residual")(params)
                    for r in _ROW_RESIDUALS[row]
                )
                report.add(
                    Check(
                        check=name,
                        residual=worst,
                        tolerance=tols.structural,
                        passed=worst < tols.structural,
                        klass=col,
                        params=params,
                        seed=seed,
                    )
                )
    return report


def _slug(label: str) -> str:
    return (
        label.replace(" ", "_")
        .replace("+", "")
        .replace("-", "_")
        .lower()
    )
