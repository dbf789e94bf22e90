"""Coordinate-chart computations: Levi-Civita data, the trace-form
connection family on W1 charts, its curvature, and the scalar-curvature
differential identities.

Metric entries are closed-form expressions, so every derivative of g up to
second order enters the pipeline exactly (symbolic differentiation followed
by evaluation); only the outermost scalar derivatives (exterior derivatives
of the trace form and of the scalar curvatures) use a central finite
difference, with Richardson extrapolation where a full curvature evaluation
sits under the difference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS
from .errors import NumericError, PreconditionError, StructuralError
from .expr import Expr, differentiate, evaluate, parse, to_string
from .pointwise import (
    ClassificationResult,
    NordenPoint,
    classify,
    make_point,
    standard_pair,
    validate_point,
)
from .report import Check, Report
from .tensor import DOWN, Tensor, UP, component_norm, tensor

_PROBE_FRACTIONS = (0.25, 0.4, 0.55, 0.7, 0.85)


class Chart:
    """A coordinate patch: expression-valued metric entries, a constant
    almost complex structure, and a box of coordinates to probe."""

    def __init__(self, name: str, dim: int, g_exprs, J: np.ndarray, domain):
        if dim < 4 or dim % 2:
            raise StructuralError(f"chart dimension must be even and >= 4, got {dim}")
        self.name = name
        self.dim = dim
        # symmetry is enforced structurally: only the upper triangle is kept
        self.g_exprs: list[list[Expr]] = [
            [g_exprs[min(i, j)][max(i, j)] for j in range(dim)] for i in range(dim)
        ]
        self.J = np.asarray(J, dtype=float)
        if self.J.shape != (dim, dim):
            raise StructuralError("J matrix shape mismatch")
        self.domain = [(float(lo), float(hi)) for lo, hi in domain]
        if len(self.domain) != dim:
            raise StructuralError("domain box must have one interval per coordinate")
        self._deriv_cache: dict[tuple[int, int, tuple[int, ...]], Expr] = {}

    # -- exact metric jets ---------------------------------------------------

    def _entry(self, i: int, j: int, dvars: tuple[int, ...]) -> Expr:
        key = (min(i, j), max(i, j), tuple(sorted(dvars)))
        cached = self._deriv_cache.get(key)
        if cached is None:
            if not key[2]:
                cached = self.g_exprs[key[0]][key[1]]
            else:
                parent = self._entry(key[0], key[1], key[2][:-1])
                cached = differentiate(parent, key[2][-1])
            self._deriv_cache[key] = cached
        return cached

    def metric_jet(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """g, its first and its second partials at x, all exact."""
        d = self.dim
        g = np.zeros((d, d))
        dg = np.zeros((d, d, d))
        ddg = np.zeros((d, d, d, d))
        for i in range(d):
            for j in range(i, d):
                g[i, j] = g[j, i] = evaluate(self._entry(i, j, ()), x)
                for a in range(d):
                    v = evaluate(self._entry(i, j, (a,)), x)
                    dg[a, i, j] = dg[a, j, i] = v
                    for b in range(a, d):
                        w = evaluate(self._entry(i, j, (a, b)), x)
                        ddg[a, b, i, j] = ddg[a, b, j, i] = w
                        ddg[b, a, i, j] = ddg[b, a, j, i] = w
        return g, dg, ddg

    def probe_points(self) -> list[np.ndarray]:
        """Five deterministic points inside the domain box, away from
        coordinate zeros and from the diagonals x_i = x_j."""
        points = []
        k = len(_PROBE_FRACTIONS)
        for shift in range(k):
            coords = []
            for axis, (lo, hi) in enumerate(self.domain):
                f = _PROBE_FRACTIONS[(shift + axis) % k]
                coords.append(lo + f * (hi - lo))
            points.append(np.array(coords))
        return points


# ---------------------------------------------------------------------------
# built-in charts

def flat_chart(dim: int = 4) -> Chart:
    g0, J0 = standard_pair(dim)
    n = dim // 2
    exprs = [
        [parse("1" if (i == j and i < n) else ("-1" if i == j else "0"), dim)
         for j in range(dim)]
        for i in range(dim)
    ]
    return Chart("flat", dim, exprs, J0, [(0.2, 1.0)] * dim)


def conformal_kahler_chart(dim: int = 4) -> Chart:
    """Conformally flat candidate: g = exp(2u) g0 with u the real part of a
    holomorphic square of the first complex coordinate.  Whether it really
    lands in the trace class with closed Lie forms is not assumed; the
    engine validates it at every probe point."""
    g0, J0 = standard_pair(dim)
    n = dim // 2
    u = f"x1^2 - x{n + 1}^2"
    exprs = []
    for i in range(dim):
        row = []
        for j in range(dim):
            if i != j:
                row.append(parse("0", dim))
            elif i < n:
                row.append(parse(f"exp(2*({u}))", dim))
            else:
                row.append(parse(f"-exp(2*({u}))", dim))
        exprs.append(row)
    return Chart("conformal_kahler", dim, exprs, J0, [(0.2, 1.0)] * dim)


BUILTIN_CHARTS = ("flat", "conformal_kahler")


def builtin_chart(name: str, dim: int = 4) -> Chart:
    if name == "flat":
        return flat_chart(dim)
    if name == "conformal_kahler":
        return conformal_kahler_chart(dim)
    raise StructuralError(f"unknown chart {name!r}; built-ins: {BUILTIN_CHARTS}")


def chart_to_json(chart: Chart) -> str:
    payload = {
        "name": chart.name,
        "dim": chart.dim,
        "g": [
            [to_string(chart.g_exprs[i][j]) for j in range(i, chart.dim)]
            for i in range(chart.dim)
        ],
        "J": chart.J.reshape(-1).tolist(),
        "domain": [list(iv) for iv in chart.domain],
    }
    return json.dumps(payload)


def chart_from_json(text: str) -> Chart:
    payload = json.loads(text)
    dim = int(payload["dim"])
    rows = payload["g"]
    exprs = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        for offset, src in enumerate(rows[i]):
            j = i + offset
            exprs[i][j] = exprs[j][i] = parse(src, dim)
    J = np.array(payload["J"], dtype=float).reshape(dim, dim)
    return Chart(payload.get("name", "chart"), dim, exprs, J, payload["domain"])


# ---------------------------------------------------------------------------
# the per-point pipeline

class ChartFrame:
    """Everything derivable from the metric jet at one chart point."""

    def __init__(self, chart: Chart, x):
        self.chart = chart
        self.x = np.asarray(x, dtype=float)
        d = chart.dim
        self.n = d // 2
        J = chart.J
        g, dg, ddg = chart.metric_jet(self.x)
        cond = np.linalg.cond(g)
        if not np.isfinite(cond) or cond > 1e12:
            raise NumericError(f"metric singular at {self.x.tolist()}")
        ginv = np.linalg.inv(g)
        dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)

        # bracket[i,j,l] = d_i g_jl + d_j g_il - d_l g_ij
        bracket = (
            np.einsum("ijl->ijl", dg)
            + np.einsum("jil->ijl", dg)
            - np.einsum("lij->ijl", dg)
        )
        Gamma = 0.5 * np.einsum("kl,ijl->kij", ginv, bracket)
        # dbracket[a,i,j,l] = d_a (bracket[i,j,l])
        dbracket = (
            np.einsum("aijl->aijl", ddg)
            + np.einsum("ajil->aijl", ddg)
            - np.einsum("alij->aijl", ddg)
        )
        dGamma = 0.5 * (
            np.einsum("akl,ijl->akij", dginv, bracket)
            + np.einsum("kl,aijl->akij", ginv, dbracket)
        )

        Rup = (
            np.einsum("iljk->lijk", dGamma)
            - np.einsum("jlik->lijk", dGamma)
            + np.einsum("lim,mjk->lijk", Gamma, Gamma)
            - np.einsum("ljm,mik->lijk", Gamma, Gamma)
        )
        R4 = np.einsum("mijk,ml->ijkl", Rup, g)

        A = np.einsum("kim,mj->kij", Gamma, J) - np.einsum("mij,km->kij", Gamma, J)
        dA = np.einsum("akim,mj->akij", dGamma, J) - np.einsum(
            "amij,km->akij", dGamma, J
        )
        F3 = np.einsum("mij,mk->ijk", A, g)
        dF3 = np.einsum("amij,mk->aijk", dA, g) + np.einsum(
            "mij,amk->aijk", A, dg
        )
        theta = np.einsum("ij,ijk->k", ginv, F3)
        dtheta = np.einsum("aij,ijk->ak", dginv, F3) + np.einsum(
            "ij,aijk->ak", ginv, dF3
        )
        theta_star = np.einsum("m,mk->k", theta, J)
        dtheta_star = np.einsum("am,mk->ak", dtheta, J)
        omega = ginv @ theta
        domega = np.einsum("akm,m->ak", dginv, theta) + np.einsum(
            "km,am->ak", ginv, dtheta
        )
        gt = g @ J
        dgt = np.einsum("aim,mj->aij", dg, J)

        self.J = J
        self.g, self.dg, self.ddg = g, dg, ddg
        self.ginv, self.dginv = ginv, dginv
        self.Gamma, self.dGamma = Gamma, dGamma
        self.R4 = R4
        self.A, self.F3 = A, F3
        self.theta, self.theta_star = theta, theta_star
        self.dtheta, self.dtheta_star = dtheta, dtheta_star
        self.omega, self.domega = omega, domega
        self.gt, self.dgt = gt, dgt

    # -- base structure ------------------------------------------------------

    def point(self) -> NordenPoint:
        return make_point(self.g, self.J, self.F3)

    def classification(self) -> ClassificationResult:
        return classify(self.point())

    # -- the trace-class connection family ------------------------------------

    def q_hat(self, p: float, q: float) -> np.ndarray:
        n, J = self.n, self.J
        d = self.chart.dim
        delta = np.eye(d)
        jomega = J @ self.omega
        out = (
            np.einsum("ij,k->kij", self.gt, self.omega)
            - np.einsum("ij,k->kij", self.g, jomega)
            + np.einsum("j,ki->kij", self.theta_star, delta)
            - np.einsum("j,ki->kij", self.theta, J)
        ) / (4 * n)
        out += (p / n) * (
            np.einsum("i,kj->kij", self.theta, delta)
            + np.einsum("i,kj->kij", self.theta_star, J)
        )
        out += (q / n) * (
            np.einsum("i,kj->kij", self.theta_star, delta)
            - np.einsum("i,kj->kij", self.theta, J)
        )
        return out

    def d_q_hat(self, p: float, q: float) -> np.ndarray:
        n, J = self.n, self.J
        d = self.chart.dim
        delta = np.eye(d)
        jomega = J @ self.omega
        djomega = np.einsum("km,am->ak", J, self.domega)
        out = (
            np.einsum("aij,k->akij", self.dgt, self.omega)
            + np.einsum("ij,ak->akij", self.gt, self.domega)
            - np.einsum("aij,k->akij", self.dg, jomega)
            - np.einsum("ij,ak->akij", self.g, djomega)
            + np.einsum("aj,ki->akij", self.dtheta_star, delta)
            - np.einsum("aj,ki->akij", self.dtheta, J)
        ) / (4 * n)
        out += (p / n) * (
            np.einsum("ai,kj->akij", self.dtheta, delta)
            + np.einsum("ai,kj->akij", self.dtheta_star, J)
        )
        out += (q / n) * (
            np.einsum("ai,kj->akij", self.dtheta_star, delta)
            - np.einsum("ai,kj->akij", self.dtheta, J)
        )
        return out

    def prime_gamma(self, p: float, q: float) -> np.ndarray:
        return self.Gamma + self.q_hat(p, q)

    def prime_curvature(self, p: float, q: float):
        """Curvature data of the family member: (R'(0,4), ricci, tau, tau*)."""
        Gp = self.prime_gamma(p, q)
        dGp = self.dGamma + self.d_q_hat(p, q)
        Rup = (
            np.einsum("iljk->lijk", dGp)
            - np.einsum("jlik->lijk", dGp)
            + np.einsum("lim,mjk->lijk", Gp, Gp)
            - np.einsum("ljm,mik->lijk", Gp, Gp)
        )
        R4 = np.einsum("mijk,ml->ijkl", Rup, self.g)
        ricci = np.einsum("ij,iyzj->yz", self.ginv, R4)
        tau = float(np.einsum("ij,ij->", self.ginv, ricci))
        tau_star = float(np.einsum("ij,ia,aj->", self.ginv, ricci, self.J))
        return R4, ricci, tau, tau_star

    def torsion_prime(self, p: float, q: float) -> np.ndarray:
        Gp = self.prime_gamma(p, q)
        return Gp - np.transpose(Gp, (0, 2, 1))

    def torsion_closed_form(self, p: float, q: float) -> np.ndarray:
        n, J = self.n, self.J
        delta = np.eye(self.chart.dim)
        th, ths = self.theta, self.theta_star
        first = (
            np.einsum("i,kj->kij", th, J)
            - np.einsum("j,ki->kij", th, J)
            - np.einsum("i,kj->kij", ths, delta)
            + np.einsum("j,ki->kij", ths, delta)
        )
        second = (
            np.einsum("i,kj->kij", th, delta)
            - np.einsum("j,ki->kij", th, delta)
            + np.einsum("i,kj->kij", ths, J)
            - np.einsum("j,ki->kij", ths, J)
        )
        return ((1 - 4 * q) / (4 * n)) * first + (p / n) * second

    def nabla_theta(self) -> np.ndarray:
        return self.dtheta - np.einsum("mij,m->ij", self.Gamma, self.theta)

    def cyclic_curvature_identity_residual(self, p: float, q: float) -> float:
        """The cyclic sum of covariant curvature derivatives equals a fixed
        bilinear expression in the trace form and the curvature.  The second
        Bianchi identity turns the cyclic sum into pure torsion-curvature
        contractions, so the check needs no third derivatives."""
        n = self.n
        J, th = self.J, self.theta
        thJ = J.T @ th
        Gp = self.prime_gamma(p, q)
        dGp = self.dGamma + self.d_q_hat(p, q)
        Rup = (
            np.einsum("iljk->lijk", dGp)
            - np.einsum("jlik->lijk", dGp)
            + np.einsum("lim,mjk->lijk", Gp, Gp)
            - np.einsum("ljm,mik->lijk", Gp, Gp)
        )
        T = Gp - np.transpose(Gp, (0, 2, 1))
        lhs = -(
            np.einsum("mai,lmjk->alijk", T, Rup)
            + np.einsum("mij,lmak->alijk", T, Rup)
            + np.einsum("mja,lmik->alijk", T, Rup)
        )
        first = (
            np.einsum("a,lmjk,mi->alijk", th, Rup, J)
            - np.einsum("a,lijk->alijk", thJ, Rup)
            - np.einsum("i,lmjk,ma->alijk", th, Rup, J)
            + np.einsum("i,lajk->alijk", thJ, Rup)
            + np.einsum("j,lmik,ma->alijk", th, Rup, J)
            - np.einsum("j,laik->alijk", thJ, Rup)
        )
        second = (
            np.einsum("a,lijk->alijk", th, Rup)
            + np.einsum("a,lmjk,mi->alijk", thJ, Rup, J)
            - np.einsum("i,lajk->alijk", th, Rup)
            - np.einsum("i,lmjk,ma->alijk", thJ, Rup, J)
            + np.einsum("j,laik->alijk", th, Rup)
            + np.einsum("j,lmik,ma->alijk", thJ, Rup, J)
        )
        rhs = ((4 * q - 1) / (2 * n)) * first - (2 * p / n) * second
        return _rel(lhs - rhs, lhs, rhs)

    def structural_curvature(self) -> np.ndarray:
        """The parameter-free closed form that R' must equal on a conformal
        Kaehler chart: R corrected by psi/pi blocks built from the trace
        form and its covariant derivative."""
        n = self.n
        th, ths = self.theta, self.theta_star
        S = np.einsum("ia,aj->ij", self.nabla_theta(), self.J) + (
            np.outer(th, th) - np.outer(ths, ths)
        ) / (4 * n)
        P = np.outer(th, th) + np.outer(ths, ths)
        theta_omega = float(th @ self.omega)
        theta_j_omega = float(th @ (self.J @ self.omega))
        psi1_S = _psi1(self.g, S)
        psi2_S = _psi2(self.g, self.J, S)
        pi1 = 0.5 * _psi1(self.g, self.g)
        pi2 = 0.5 * _psi2(self.g, self.J, self.g)
        pi3 = -_psi1(self.g, self.gt)
        return (
            self.R4
            - (psi1_S + psi2_S) / (4 * n)
            - _psi1(self.g, P) / (8 * n**2)
            - (theta_omega / (16 * n**2)) * (3 * pi1 + pi2)
            + (theta_j_omega / (16 * n**2)) * pi3
        )


def _psi1(g: np.ndarray, S: np.ndarray) -> np.ndarray:
    return (
        np.einsum("jk,il->ijkl", g, S)
        - np.einsum("ik,jl->ijkl", g, S)
        + np.einsum("il,jk->ijkl", g, S)
        - np.einsum("jl,ik->ijkl", g, S)
    )


def _psi2(g: np.ndarray, J: np.ndarray, S: np.ndarray) -> np.ndarray:
    gt = g @ J
    SJ = S @ J
    return (
        np.einsum("jk,il->ijkl", gt, SJ)
        - np.einsum("ik,jl->ijkl", gt, SJ)
        + np.einsum("il,jk->ijkl", gt, SJ)
        - np.einsum("jl,ik->ijkl", gt, SJ)
    )


def psi_pi_tensors(S: Tensor, pt: NordenPoint) -> dict[str, Tensor]:
    """The two curvature-like lifts of a (0,2) tensor and the three
    structure tensors built from the metric pair."""
    g, J = pt.g.array, pt.J.array
    gt = g @ J
    val = (DOWN,) * 4
    return {
        "psi1": tensor(_psi1(g, S.array), val),
        "psi2": tensor(_psi2(g, J, S.array), val),
        "pi1": tensor(0.5 * _psi1(g, g), val),
        "pi2": tensor(0.5 * _psi2(g, J, g), val),
        "pi3": tensor(-_psi1(g, gt), val),
    }


# ---------------------------------------------------------------------------
# thin operation wrappers

def christoffel(chart: Chart, x) -> Tensor:
    return tensor(ChartFrame(chart, x).Gamma, (UP, DOWN, DOWN))


def levi_civita_curvature(chart: Chart, x) -> Tensor:
    return tensor(ChartFrame(chart, x).R4, (DOWN,) * 4)


def prime_connection_coeffs(chart: Chart, x, p: float, q: float) -> Tensor:
    frame = ChartFrame(chart, x)
    _require_trace_class(frame)
    return tensor(frame.prime_gamma(p, q), (UP, DOWN, DOWN))


def prime_curvature(chart: Chart, x, p: float, q: float):
    frame = ChartFrame(chart, x)
    _require_trace_class(frame)
    R4, ricci, tau, tau_star = frame.prime_curvature(p, q)
    return (
        tensor(R4, (DOWN,) * 4),
        tensor(ricci, (DOWN, DOWN)),
        tau,
        tau_star,
    )


def _require_trace_class(frame: ChartFrame) -> ClassificationResult:
    result = frame.classification()
    if not result.label <= {"W1"}:
        raise PreconditionError(
            f"chart point is in class {result.name}, not within W1"
        )
    return result


@dataclass(frozen=True)
class FieldData:
    """Pointwise structure of a chart plus its trace forms and their
    exterior derivatives (the latter by one outer finite difference)."""

    point: NordenPoint
    theta: np.ndarray
    theta_star: np.ndarray
    d_theta: np.ndarray
    d_theta_star: np.ndarray
    classification: ClassificationResult


def field_F_theta(chart: Chart, x, fd_step: float = 1e-6) -> FieldData:
    frame = ChartFrame(chart, x)
    x = np.asarray(x, dtype=float)
    d = chart.dim

    def theta_pair_at(y):
        f = ChartFrame(chart, y)
        return f.theta, f.theta_star

    grad_theta = np.zeros((d, d))
    grad_theta_star = np.zeros((d, d))
    for a in range(d):
        step = np.zeros(d)
        step[a] = fd_step
        tp, tsp = theta_pair_at(x + step)
        tm, tsm = theta_pair_at(x - step)
        grad_theta[a] = (tp - tm) / (2 * fd_step)
        grad_theta_star[a] = (tsp - tsm) / (2 * fd_step)
    d_theta = grad_theta - grad_theta.T
    d_theta_star = grad_theta_star - grad_theta_star.T
    pt = frame.point()
    return FieldData(
        point=pt,
        theta=frame.theta,
        theta_star=frame.theta_star,
        d_theta=d_theta,
        d_theta_star=d_theta_star,
        classification=classify(pt),
    )


# ---------------------------------------------------------------------------
# verification suites

def _agreement(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Relative disagreement with an absolute floor at unit scale."""
    scale = max(component_norm(lhs), component_norm(rhs), 1.0)
    return component_norm(lhs - rhs) / scale


def curvature_like_residual(R: np.ndarray) -> float:
    scale = max(component_norm(R), 1.0)
    anti1 = component_norm(R + np.transpose(R, (1, 0, 2, 3)))
    anti2 = component_norm(R + np.transpose(R, (0, 1, 3, 2)))
    bianchi = component_norm(
        R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))
    )
    return max(anti1, anti2, bianchi) / scale


def kahler_residual(R: np.ndarray, J: np.ndarray) -> float:
    scale = max(component_norm(R), 1.0)
    twisted = np.einsum("ijab,ak,bl->ijkl", R, J, J)
    return component_norm(twisted + R) / scale


def verify_w1_theorems(chart: Chart, x, p: float, q: float,
                       seed: int | None = None) -> Report:
    """Two-route agreement on a W1 chart: covariant metric derivatives,
    torsion, and the curvature structural formula."""
    frame = ChartFrame(chart, x)
    _require_trace_class(frame)
    n = frame.n
    th, ths = frame.theta, frame.theta_star
    g, gt = frame.g, frame.gt
    Gp = frame.prime_gamma(p, q)

    nabla_g = (
        frame.dg
        - np.einsum("mij,mk->ijk", Gp, g)
        - np.einsum("mik,jm->ijk", Gp, g)
    )
    closed_g = -(2.0 / n) * (
        np.einsum("i,jk->ijk", p * th + q * ths, g)
        + np.einsum("i,jk->ijk", p * ths - q * th, gt)
    )
    nabla_gt = (
        frame.dgt
        - np.einsum("mij,mk->ijk", Gp, gt)
        - np.einsum("mik,jm->ijk", Gp, gt)
    )
    closed_gt = (2.0 / n) * (
        np.einsum("i,jk->ijk", p * ths - q * th, g)
        - np.einsum("i,jk->ijk", p * th + q * ths, gt)
    )

    T_direct = frame.torsion_prime(p, q)
    T_closed = frame.torsion_closed_form(p, q)

    R_prime, _, _, _ = frame.prime_curvature(p, q)
    R_structural = frame.structural_curvature()

    tols = DEFAULT_TOLS
    report = Report()
    for name, lhs, rhs in (
        ("w1.metric_derivative", nabla_g, closed_g),
        ("w1.assoc_metric_derivative", nabla_gt, closed_gt),
        ("w1.torsion", T_direct, T_closed),
        ("w1.curvature_structure", R_prime, R_structural),
    ):
        resid = _agreement(lhs, rhs)
        report.add(
            Check(
                check=name,
                residual=resid,
                tolerance=tols.derivative,
                passed=resid < tols.derivative,
                klass=frame.classification().name,
                params=(p, q),
                seed=seed,
            )
        )
    return report


def _richardson(values_h, values_h2):
    return (4.0 * values_h2 - values_h) / 3.0


def _scalar_gradient(chart: Chart, x, fn, step: float = 1e-4) -> np.ndarray:
    """Richardson-extrapolated central differences of a scalar pipeline."""
    x = np.asarray(x, dtype=float)
    d = chart.dim
    grad_h = np.zeros(d)
    grad_h2 = np.zeros(d)
    for a in range(d):
        e = np.zeros(d)
        e[a] = 1.0
        for h, target in ((step, grad_h), (step / 2, grad_h2)):
            target[a] = (fn(x + h * e) - fn(x - h * e)) / (2 * h)
    return _richardson(grad_h, grad_h2)


def tau_checks(chart: Chart, x, p: float, q: float,
               seed: int | None = None) -> Report:
    """Differential identities of the scalar curvatures on a conformal
    Kaehler chart: the Bianchi-derived gradient formulas, the
    Cauchy-Riemann pairing of the two scalars, the recovery of the trace
    forms from them, and the squared-norm corollary."""
    frame = ChartFrame(chart, x)
    _require_trace_class(frame)
    n = frame.n
    _, _, tau, tau_star = frame.prime_curvature(p, q)
    if tau * tau + tau_star * tau_star <= 1e-6:
        raise PreconditionError(
            f"degenerate scalar curvatures at probe point {np.asarray(x).tolist()}"
        )

    cache: dict[bytes, tuple[float, float]] = {}

    def pair_at(y):
        key = np.asarray(y, dtype=float).tobytes()
        got = cache.get(key)
        if got is None:
            _, _, t, ts = ChartFrame(chart, y).prime_curvature(p, q)
            got = cache[key] = (t, ts)
        return got

    angle_ref = math.atan2(tau, tau_star)

    def unwrapped_angle(y):
        t, ts = pair_at(y)
        a = math.atan2(t, ts)
        while a - angle_ref > math.pi:
            a -= 2 * math.pi
        while a - angle_ref < -math.pi:
            a += 2 * math.pi
        return a

    d_tau = _scalar_gradient(chart, x, lambda y: pair_at(y)[0])
    d_tau_star = _scalar_gradient(chart, x, lambda y: pair_at(y)[1])
    theta_rec = 2 * n * _scalar_gradient(chart, x, unwrapped_angle)
    theta_star_rec = -2 * n * _scalar_gradient(
        chart, x, lambda y: 0.5 * math.log(pair_at(y)[0] ** 2 + pair_at(y)[1] ** 2)
    )
    d_sq = _scalar_gradient(
        chart, x, lambda y: pair_at(y)[0] ** 2 + pair_at(y)[1] ** 2
    )

    th, ths = frame.theta, frame.theta_star
    rhs_tau = (tau_star * th - tau * ths) / (2 * n)
    rhs_tau_star = -(tau * th + tau_star * ths) / (2 * n)

    # holomorphic pairing of the two scalars: composing the differential of
    # one with J reproduces the negated differential of the other
    cr_lhs = frame.J.T @ d_tau_star
    cr_resid = _rel(cr_lhs + d_tau, d_tau, d_tau_star)

    sq = tau * tau + tau_star * tau_star
    rhs_sq = -(sq / n) * ths

    tols = DEFAULT_TOLS
    report = Report()
    entries = (
        # the cyclic derivative identity itself, exact via the Bianchi route
        ("tau.cyclic_identity", frame.cyclic_curvature_identity_residual(p, q),
         tols.structural),
        # its claimed traced consequences, by outer finite differences
        ("tau.gradient", _rel(d_tau - rhs_tau, d_tau, rhs_tau), tols.scalar_fd),
        ("tau_star.gradient",
         _rel(d_tau_star - rhs_tau_star, d_tau_star, rhs_tau_star), tols.scalar_fd),
        ("tau.cauchy_riemann", cr_resid, tols.scalar_fd),
        ("tau.theta_recovery", _rel(theta_rec - th, th, theta_rec), tols.scalar_fd),
        ("tau.theta_star_recovery",
         _rel(theta_star_rec - ths, ths, theta_star_rec), tols.scalar_fd),
        ("tau.squared_norm", _rel(d_sq - rhs_sq, d_sq, rhs_sq), tols.scalar_fd),
    )
    for name, resid, tol in entries:
        report.add(
            Check(
                check=name,
                residual=resid,
                tolerance=tol,
                passed=resid < tol,
                klass="W1",
                params=(p, q),
                seed=seed,
            )
        )
    return report


def _rel(diff: np.ndarray, *references: np.ndarray) -> float:
    scale = max(max(component_norm(r) for r in references), 1e-30)
    return component_norm(diff) / scale


# ---------------------------------------------------------------------------
# chart validation and the full per-point report

@dataclass
class CurvatureReport:
    point: list[float]
    R: Tensor
    R_prime: Tensor
    ricci_prime: Tensor
    tau_prime: float
    tau_prime_star: float
    classification: ClassificationResult
    checks: Report


def curvature_report(chart: Chart, x, p: float, q: float,
                     seed: int | None = None) -> CurvatureReport:
    frame = ChartFrame(chart, x)
    R_prime, ricci, tau, tau_star = frame.prime_curvature(p, q)
    checks = Report()
    checks.extend(verify_w1_theorems(chart, x, p, q, seed))
    checks.extend(tau_checks(chart, x, p, q, seed))
    return CurvatureReport(
        point=list(np.asarray(x, dtype=float)),
        R=tensor(frame.R4, (DOWN,) * 4),
        R_prime=tensor(R_prime, (DOWN,) * 4),
        ricci_prime=tensor(ricci, (DOWN, DOWN)),
        tau_prime=tau,
        tau_prime_star=tau_star,
        classification=frame.classification(),
        checks=checks,
    )


def validate_chart(chart: Chart, seed: int | None = None) -> Report:
    """Structural validation at every probe point; conformal charts must
    additionally classify as pure W1 with closed trace forms."""
    tols = DEFAULT_TOLS
    report = Report()
    for idx, x in enumerate(chart.probe_points()):
        frame = ChartFrame(chart, x)
        try:
            validate_point(frame.g, frame.J, frame.F3)
            structural = 0.0
        except (StructuralError, NumericError):
            structural = float("inf")
        report.add(
            Check(
                check=f"chart.{chart.name}.structure.p{idx}",
                residual=structural,
                tolerance=tols.structural,
                passed=structural < tols.structural,
                klass=None,
                params=None,
                seed=seed,
            )
        )
        resid = curvature_like_residual(frame.R4)
        report.add(
            Check(
                check=f"chart.{chart.name}.curvature_identities.p{idx}",
                residual=resid,
                tolerance=1e-9,
                passed=resid < 1e-9,
                seed=seed,
            )
        )
        if chart.name == "conformal_kahler":
            data = field_F_theta(chart, x)
            label_ok = data.classification.label == {"W1"}
            closed = max(
                component_norm(data.d_theta), component_norm(data.d_theta_star)
            )
            report.add(
                Check(
                    check=f"chart.{chart.name}.class_w1.p{idx}",
                    residual=0.0 if label_ok else 1.0,
                    tolerance=0.5,
                    passed=label_ok,
                    klass=data.classification.name,
                    seed=seed,
                )
            )
            report.add(
                Check(
                    check=f"chart.{chart.name}.closed_forms.p{idx}",
                    residual=closed,
                    tolerance=1e-8,
                    passed=closed < 1e-8,
                    seed=seed,
                )
            )
    return report
