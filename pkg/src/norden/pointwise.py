"""Pointwise structures: compatible (g, J, F) triples, Lie forms, Nijenhuis
tensors, and projection / generation / classification for the basic classes.

Class membership is a linear condition on F, so each class is realized as
the null space of a constraint operator restricted to the subspace of
tensors with the two defining F symmetries.  The projectors are assembled
once per dimension in the structure-adapted frame (where g and J take
their standard constant form and the construction is an honest orthogonal
projection in the component inner product) and transported to a point's
working basis by conjugation.  That transport preserves idempotency, the
class decomposition identity and all membership decisions; it is what
makes the decomposition identity hold in every frame, which a frame-naive
orthogonal projector cannot do.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import CONDITION_BOUND, DEFAULT_TOLS, DEGENERATE_NORM
from .errors import GenerationError, NumericError, StructuralError
from .tensor import (
    DOWN,
    Tensor,
    UP,
    check_almost_complex,
    component_norm,
    f_symmetry_residual,
    tensor,
)

BASIC_CLASSES = ("W1", "W2", "W3")
GENERATABLE_CLASSES = ("W0", "W1", "W2", "W3", "W1+W2")


def standard_pair(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """The flat compatible pair: block J and the signature (n,n) metric."""
    if dim < 4 or dim % 2 != 0:
        raise StructuralError(f"dimension must be even and >= 4, got {dim}")
    n = dim // 2
    J = np.zeros((dim, dim))
    J[n:, :n] = np.eye(n)
    J[:n, n:] = -np.eye(n)
    g = np.diag([1.0] * n + [-1.0] * n)
    return g, J


@dataclass(frozen=True)
class NordenPoint:
    """A single tangent-space snapshot of an almost complex Norden structure."""

    g: Tensor
    J: Tensor
    F: Tensor

    def __post_init__(self):
        validate_point(self.g.array, self.J.array, self.F.array)

    @property
    def dim(self) -> int:
        return self.g.dim

    @property
    def g_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.g.array)


def validate_point(g: np.ndarray, J: np.ndarray, F: np.ndarray,
                   tol: float = DEFAULT_TOLS.structural) -> None:
    """Check all structural invariants of a (g, J, F) triple."""
    dim = g.shape[0]
    if g.shape != (dim, dim) or J.shape != (dim, dim) or F.shape != (dim, dim, dim):
        raise StructuralError("component arrays have inconsistent shapes")
    check_almost_complex(J, tol)
    if np.max(np.abs(g - g.T)) > tol:
        raise StructuralError("metric is not symmetric")
    resid = np.max(np.abs(J.T @ g @ J + g))
    if resid > tol * max(1.0, float(np.max(np.abs(g)))):
        raise StructuralError(f"g(JX,JY) != -g(X,Y) (residual {resid:.3g})")
    eigs = np.linalg.eigvalsh(g)
    n = dim // 2
    if np.sum(eigs > 0) != n or np.sum(eigs < 0) != n:
        raise StructuralError("metric signature is not (n, n)")
    if min(np.abs(eigs)) < 1e-13 * max(np.abs(eigs)):
        raise NumericError("metric is numerically singular")
    fres = f_symmetry_residual(F, J)
    if fres > tol * max(1.0, component_norm(F)):
        raise StructuralError(f"F symmetries violated (residual {fres:.3g})")


def make_point(g: np.ndarray, J: np.ndarray, F: np.ndarray) -> NordenPoint:
    return NordenPoint(
        g=tensor(g, (DOWN, DOWN)),
        J=tensor(J, (UP, DOWN)),
        F=tensor(F, (DOWN, DOWN, DOWN)),
    )


def _symmetrize_F(F: np.ndarray, J: np.ndarray) -> np.ndarray:
    swap = np.transpose(F, (0, 2, 1))
    twist = np.einsum("iab,aj,bk->ijk", F, J, J)
    swap_twist = np.einsum("iab,ak,bj->ijk", F, J, J)
    return 0.25 * (F + swap + twist + swap_twist)


def _haar_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(dim, dim)))
    return Q * np.sign(np.diag(R))


def _random_basis(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random invertible basis with condition number well under the bound.

    Drawn as orthogonal * diag(sigma) * orthogonal with log-uniform singular
    values in [1/2, 2]; residual identities downstream are checked at 1e-10,
    and condition numbers near the bound would eat that headroom in float64.
    """
    for _ in range(100):
        sigma = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=dim))
        P = _haar_orthogonal(rng, dim) @ np.diag(sigma) @ _haar_orthogonal(rng, dim)
        if np.linalg.cond(P) <= CONDITION_BOUND:
            return P
    raise GenerationError(
        f"no basis with condition number <= {CONDITION_BOUND} in 100 draws"
    )


def standard_point(seed: int, dim: int) -> NordenPoint:
    """Point carrying the standard flat pair and a random admissible F."""
    g0, J0 = standard_pair(dim)
    rng = np.random.default_rng(seed)
    F = rng.normal(size=(dim, dim, dim))
    F /= component_norm(F)
    return make_point(g0, J0, _symmetrize_F(F, J0))


def random_point(seed: int, dim: int) -> NordenPoint:
    """Push the standard pair forward by a random well-conditioned basis and
    attach a random F with the required symmetries.  Deterministic in seed.
    """
    g0, J0 = standard_pair(dim)
    rng = np.random.default_rng(seed)
    P = _random_basis(rng, dim)
    Pinv = np.linalg.inv(P)
    J = P @ J0 @ Pinv
    g = Pinv.T @ g0 @ Pinv
    g = 0.5 * (g + g.T)
    F = rng.normal(size=(dim, dim, dim))
    F /= component_norm(F)
    return make_point(g, J, _symmetrize_F(F, J))


def with_F(pt: NordenPoint, F: np.ndarray) -> NordenPoint:
    return make_point(pt.g.array, pt.J.array, F)


# ---------------------------------------------------------------------------
# Lie forms and Nijenhuis tensors

def lie_forms(pt: NordenPoint) -> tuple[Tensor, Tensor, Tensor]:
    """Trace 1-forms of F and the metric-dual Lie vector: (theta, theta*, Omega)."""
    ginv = pt.g_inverse
    theta = np.einsum("ij,ijk->k", ginv, pt.F.array)
    theta_star = theta @ pt.J.array
    omega = ginv @ theta
    return (
        tensor(theta, (DOWN,)),
        tensor(theta_star, (DOWN,)),
        tensor(omega, (UP,)),
    )


def nabla_J(pt: NordenPoint) -> Tensor:
    """The (1,2) covariant derivative of J, i.e. F with its third slot raised."""
    A = np.einsum("ijm,mk->kij", pt.F.array, pt.g_inverse)
    return tensor(A, (UP, DOWN, DOWN))


def nijenhuis_pair(pt: NordenPoint) -> tuple[Tensor, Tensor]:
    """Lowered Nijenhuis tensor N and its symmetric companion."""
    F, J = pt.F.array, pt.J.array
    FJ2 = np.einsum("ial,aj->ijl", F, J)   # F(X, JY, Z)
    FJ1 = np.einsum("ajl,ai->ijl", F, J)   # F(JX, Y, Z)
    N = FJ2 - np.transpose(FJ2, (1, 0, 2)) + FJ1 - np.transpose(FJ1, (1, 0, 2))
    Ntilde = FJ2 + np.transpose(FJ2, (1, 0, 2)) + FJ1 + np.transpose(FJ1, (1, 0, 2))
    val = (DOWN, DOWN, DOWN)
    return tensor(N, val), tensor(Ntilde, val)


def cyclic_sum(F: np.ndarray) -> np.ndarray:
    return F + np.transpose(F, (1, 2, 0)) + np.transpose(F, (2, 0, 1))


def cyclic_J_sum(F: np.ndarray, J: np.ndarray) -> np.ndarray:
    return (
        np.einsum("ija,ak->ijk", F, J)
        + np.einsum("jka,ai->ijk", F, J)
        + np.einsum("kia,aj->ijk", F, J)
    )


def trace_form(F: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ijk->k", ginv, F)


def w1_from_theta(theta: np.ndarray, g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """The F tensor of the trace-parameterized family for a given 1-form."""
    n = g.shape[0] // 2
    gt = g @ J
    theta_J = J.T @ theta
    return (
        np.einsum("ij,k->ijk", g, theta)
        + np.einsum("ij,k->ijk", gt, theta_J)
        + np.einsum("ik,j->ijk", g, theta)
        + np.einsum("ik,j->ijk", gt, theta_J)
    ) / (2 * n)


# ---------------------------------------------------------------------------
# adapted frame

def adapted_frame(g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Basis matrix P with P^T g P and P^{-1} J P in standard form.

    Gram-Schmidt over the complex-bilinear form h(u, v) = g(u, v) - i g(u, Jv),
    treating J as multiplication by i.  Always succeeds for valid structures
    except on a measure-zero set of starting candidates, which the candidate
    pool makes unreachable in practice.
    """
    dim = g.shape[0]
    n = dim // 2
    gJ = g @ J

    def h(u, v):
        return complex(u @ g @ v, -(u @ gJ @ v))

    def cmul(z, v):
        return z.real * v + z.imag * (J @ v)

    scale = float(np.linalg.norm(g))
    pool = [np.eye(dim)[k] for k in range(dim)]
    pool += [np.ones(dim)] + [np.eye(dim)[k] + np.eye(dim)[(k + 1) % dim]
                              for k in range(dim)]
    basis: list[np.ndarray] = []
    for _ in range(n):
        for cand in pool:
            w = cand.astype(float).copy()
            for b in basis:
                w = w - cmul(h(w, b), b)
            c = h(w, w)
            if abs(c) > 1e-10 * scale * max(1.0, float(w @ w)):
                basis.append(cmul(1.0 / np.sqrt(c), w))
                break
        else:
            raise StructuralError("could not build an adapted frame")
    cols = basis + [J @ b for b in basis]
    return np.array(cols).T


def pull_back_F(F: np.ndarray, P: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,ia,jb,kc->abc", F, P, P, P)


def push_forward_F(F: np.ndarray, P: np.ndarray) -> np.ndarray:
    Pinv = np.linalg.inv(P)
    return np.einsum("abc,ai,bj,ck->ijk", F, Pinv, Pinv, Pinv)


# ---------------------------------------------------------------------------
# class projectors at the standard frame, cached per dimension

def _vec(F: np.ndarray) -> np.ndarray:
    return F.reshape(-1)


class _StandardProjectors:
    """Orthogonal projectors onto the basic classes, standard frame."""

    def __init__(self, dim: int):
        g0, J0 = standard_pair(dim)
        ginv0 = np.linalg.inv(g0)
        d = dim**3
        eye = np.eye(d)
        # symmetry subspace: +1 eigenspace of both generating involutions
        basis_arrays = eye.reshape(d, dim, dim, dim)
        sym = np.array(
            [_vec(_symmetrize_F(B, J0)) for B in basis_arrays]
        ).T
        U, s, _ = np.linalg.svd(sym)
        r = int(np.sum(s > 0.5))
        B = U[:, :r]  # orthonormal basis of the symmetric subspace

        def constraint_matrix(op):
            return np.array(
                [op(B[:, c].reshape(dim, dim, dim)).reshape(-1) for c in range(r)]
            ).T

        def null_projector(C: np.ndarray) -> np.ndarray:
            _, s2, Vt2 = np.linalg.svd(C)
            tol = 1e-8 * (s2[0] if s2.size else 1.0)
            rank = int(np.sum(s2 > tol))
            Nb = Vt2[rank:].T
            W = B @ Nb
            return W @ W.T

        self.dim = dim
        self.sym = B @ B.T
        self.by_class = {
            "W1": null_projector(
                constraint_matrix(
                    lambda F: F - w1_from_theta(trace_form(F, ginv0), g0, J0)
                )
            ),
            "W2": null_projector(
                np.vstack(
                    [
                        constraint_matrix(lambda F: cyclic_J_sum(F, J0)),
                        np.array(
                            [trace_form(B[:, c].reshape(dim, dim, dim), ginv0)
                             for c in range(r)]
                        ).T,
                    ]
                )
            ),
            "W3": null_projector(constraint_matrix(cyclic_sum)),
            "W1+W2": null_projector(constraint_matrix(lambda F: cyclic_J_sum(F, J0))),
        }
        self._check_build(g0, J0)

    def _check_build(self, g0, J0):
        dim = self.dim
        P1, P2, P3 = (self.by_class[c] for c in BASIC_CLASSES)
        rank1 = round(float(np.trace(P1)))
        if rank1 != dim:
            raise StructuralError(
                f"trace-family projector rank {rank1}, expected {dim}"
            )
        # the projector range must be exactly the span of the generating family
        images = np.array(
            [_vec(w1_from_theta(np.eye(dim)[k], g0, J0)) for k in range(dim)]
        ).T
        if np.linalg.matrix_rank(images, tol=1e-10) != dim:
            raise StructuralError("generating family of the trace class is degenerate")
        if component_norm(P1 @ images - images) > 1e-8:
            raise StructuralError("trace-class projector range mismatch")
        decomp = component_norm(P1 + P2 + P3 - self.sym)
        if decomp > 1e-8:
            raise StructuralError(
                f"basic classes fail to decompose the symmetric space "
                f"(residual {decomp:.3g})"
            )
        pair = component_norm(P1 + P2 - self.by_class["W1+W2"])
        if pair > 1e-8:
            raise StructuralError("W1+W2 projector does not match P1 + P2")


@lru_cache(maxsize=8)
def _standard_projectors(dim: int) -> _StandardProjectors:
    return _StandardProjectors(dim)


class ClassProjector:
    """Linear projection of F-space onto one class, for a fixed (g, J)."""

    def __init__(self, dim: int, label: str, frame: np.ndarray):
        if label not in ("sym",) + tuple(_standard_projectors(dim).by_class):
            raise StructuralError(f"unknown class {label!r}")
        self.dim = dim
        self.label = label
        self.frame = frame
        std = _standard_projectors(dim)
        self._matrix_std = std.sym if label == "sym" else std.by_class[label]

    def apply(self, F: np.ndarray) -> np.ndarray:
        Fa = pull_back_F(F, self.frame)
        proj = (self._matrix_std @ _vec(Fa)).reshape((self.dim,) * 3)
        return push_forward_F(proj, self.frame)

    def matrix(self) -> np.ndarray:
        """Dense matrix of the projector in the working basis."""
        if np.array_equal(self.frame, np.eye(self.dim)):
            return self._matrix_std.copy()
        d = self.dim**3
        eye = np.eye(d)
        cols = [
            _vec(self.apply(eye[:, c].reshape((self.dim,) * 3))) for c in range(d)
        ]
        return np.array(cols).T


_FRAME_CACHE: dict[tuple[int, bytes, bytes], np.ndarray] = {}


def _frame_for(pt: NordenPoint) -> np.ndarray:
    key = (pt.dim, pt.g.array.tobytes(), pt.J.array.tobytes())
    frame = _FRAME_CACHE.get(key)
    if frame is None:
        frame = adapted_frame(pt.g.array, pt.J.array)
        if len(_FRAME_CACHE) > 256:
            _FRAME_CACHE.clear()
        _FRAME_CACHE[key] = frame
    return frame


def class_projector(pt: NordenPoint, label: str) -> ClassProjector:
    """Projector onto a class against the point's (g, J) background."""
    return ClassProjector(pt.dim, label, _frame_for(pt))


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class ClassificationResult:
    component_norms: dict[str, float]
    label: frozenset[str]
    tolerance: float

    @property
    def name(self) -> str:
        if not self.label:
            return "W0"
        return "+".join(sorted(self.label))


def classify(pt: NordenPoint, tol: float = DEFAULT_TOLS.classification) -> ClassificationResult:
    """Split F into basic-class components and report which are present."""
    total = component_norm(pt.F)
    if total < DEGENERATE_NORM:
        return ClassificationResult(
            {c: 0.0 for c in BASIC_CLASSES}, frozenset(), tol
        )
    frame = _frame_for(pt)
    norms = {
        c: component_norm(ClassProjector(pt.dim, c, frame).apply(pt.F.array))
        for c in BASIC_CLASSES
    }
    cutoff = tol * total
    label = frozenset(c for c in BASIC_CLASSES if norms[c] > cutoff)
    return ClassificationResult(norms, label, tol)


def generate_in_class(label: str, seed: int, dim: int,
                      min_norm: float = 0.1) -> NordenPoint:
    """Random point whose F lies exactly in the requested class."""
    if label not in GENERATABLE_CLASSES:
        raise StructuralError(f"cannot generate in class {label!r}")
    for attempt in range(100):
        pt = random_point(seed + 1_000_003 * attempt, dim)
        if label == "W0":
            return with_F(pt, np.zeros((dim, dim, dim)))
        if label == "W1":
            rng = np.random.default_rng((seed, attempt, 17))
            theta = rng.normal(size=dim)
            F = w1_from_theta(theta, pt.g.array, pt.J.array)
        else:
            F = class_projector(pt, label).apply(pt.F.array)
        if component_norm(F) >= min_norm:
            return with_F(pt, F)
    raise GenerationError(f"degenerate draws for class {label} (100 attempts)")


# ---------------------------------------------------------------------------
# serialization

def point_to_json(pt: NordenPoint) -> str:
    payload = {
        "dim": pt.dim,
        "g": pt.g.array.reshape(-1).tolist(),
        "J": pt.J.array.reshape(-1).tolist(),
        "F": pt.F.array.reshape(-1).tolist(),
    }
    return json.dumps(payload)


def point_from_json(text: str) -> NordenPoint:
    payload = json.loads(text)
    dim = int(payload["dim"])
    g = np.array(payload["g"], dtype=float).reshape(dim, dim)
    J = np.array(payload["J"], dtype=float).reshape(dim, dim)
    F = np.array(payload["F"], dtype=float).reshape(dim, dim, dim)
    return make_point(g, J, F)
