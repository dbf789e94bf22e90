"""Dense tensor algebra on a small even-dimensional real vector space.

Tensors carry a valence tuple ('u' or 'd' per slot) next to a dense numpy
array.  Everything is a pure function of immutable values; arrays are
frozen on construction so instances can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS
from .errors import NumericError, StructuralError

UP = "u"
DOWN = "d"


@dataclass(frozen=True)
class Tensor:
    """Dense real tensor with per-slot variance metadata."""

    array: np.ndarray
    valence: tuple[str, ...]

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=float)
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "array", arr)
        object.__setattr__(self, "valence", tuple(self.valence))
        if arr.ndim != len(self.valence):
            raise StructuralError(
                f"valence length {len(self.valence)} does not match rank {arr.ndim}"
            )
        if any(v not in (UP, DOWN) for v in self.valence):
            raise StructuralError(f"invalid valence {self.valence!r}")
        if arr.ndim > 0:
            dims = set(arr.shape)
            if len(dims) != 1:
                raise StructuralError(f"non-cubic component array {arr.shape}")
            (dim,) = dims
            if dim < 2 or dim % 2 != 0:
                raise StructuralError(f"dimension must be even and >= 2, got {dim}")
        if not np.all(np.isfinite(arr)):
            raise StructuralError("tensor components must be finite")

    @property
    def dim(self) -> int:
        return self.array.shape[0] if self.rank else 0

    @property
    def rank(self) -> int:
        return self.array.ndim

    def slot_count(self, kind: str) -> int:
        return sum(1 for v in self.valence if v == kind)


def tensor(array, valence: str | tuple[str, ...]) -> Tensor:
    """Shorthand constructor; valence may be given as a string like 'udd'."""
    return Tensor(np.asarray(array, dtype=float), tuple(valence))


def identity_tensor(dim: int) -> Tensor:
    """The (1,1) identity endomorphism."""
    return tensor(np.eye(dim), (UP, DOWN))


def component_norm(t: Tensor | np.ndarray) -> float:
    """Root-sum-square of raw components in the working basis.

    Deliberately not the g-induced norm: the metric has neutral signature,
    and residual checks need a positive-definite gauge.
    """
    arr = t.array if isinstance(t, Tensor) else np.asarray(t)
    return float(np.sqrt(np.sum(arr * arr)))


def contract(a: Tensor, b: Tensor, slot_pairs: list[tuple[int, int]]) -> Tensor:
    """Contract paired slots of two tensors.

    Each pair (i, j) joins slot i of ``a`` with slot j of ``b``; the slots
    must have matching dimension and complementary variance.  Result slot
    order: surviving slots of ``a`` followed by surviving slots of ``b``.
    """
    if a.rank and b.rank and a.dim != b.dim:
        raise StructuralError(f"dimension mismatch: {a.dim} vs {b.dim}")
    seen_a, seen_b = set(), set()
    for i, j in slot_pairs:
        if not (0 <= i < a.rank and 0 <= j < b.rank):
            raise StructuralError(f"slot pair ({i}, {j}) out of range")
        if i in seen_a or j in seen_b:
            raise StructuralError(f"slot repeated in pairs: ({i}, {j})")
        seen_a.add(i)
        seen_b.add(j)
        if a.valence[i] == b.valence[j]:
            raise StructuralError(
                f"slots ({i}, {j}) must have complementary variance, "
                f"got {a.valence[i]}/{b.valence[j]}"
            )
    letters = "abcdefghijklmnopqrstuvwxyz"
    next_letter = iter(letters)
    a_idx = [next(next_letter) for _ in range(a.rank)]
    b_idx = [next(next_letter) for _ in range(b.rank)]
    for i, j in slot_pairs:
        b_idx[j] = a_idx[i]
    out_idx = [a_idx[i] for i in range(a.rank) if i not in seen_a]
    out_idx += [b_idx[j] for j in range(b.rank) if j not in seen_b]
    spec = f"{''.join(a_idx)},{''.join(b_idx)}->{''.join(out_idx)}"
    out = np.einsum(spec, a.array, b.array)
    out_val = [a.valence[i] for i in range(a.rank) if i not in seen_a]
    out_val += [b.valence[j] for j in range(b.rank) if j not in seen_b]
    return Tensor(np.asarray(out, dtype=float), tuple(out_val))


def _metric_inverse(g: Tensor) -> np.ndarray:
    arr = g.array
    if arr.ndim != 2:
        raise StructuralError("metric must have rank 2")
    cond = np.linalg.cond(arr)
    if not np.isfinite(cond) or cond > 1e14:
        raise NumericError(f"metric is numerically singular (cond={cond:.3g})")
    return np.linalg.inv(arr)


def raise_lower(t: Tensor, slot: int, g: Tensor, direction: str) -> Tensor:
    """Flip the variance of one slot using the metric g (or its inverse)."""
    if not (0 <= slot < t.rank):
        raise StructuralError(f"slot {slot} out of range for rank {t.rank}")
    if direction not in (UP, DOWN):
        raise StructuralError(f"direction must be '{UP}' or '{DOWN}'")
    if t.dim != g.dim:
        raise StructuralError(f"dimension mismatch: {t.dim} vs {g.dim}")
    if t.valence[slot] == direction:
        raise StructuralError(f"slot {slot} is already '{direction}'")
    mat = _metric_inverse(g) if direction == UP else g.array
    arr = np.tensordot(t.array, mat, axes=([slot], [0]))
    arr = np.moveaxis(arr, -1, slot)
    valence = list(t.valence)
    valence[slot] = direction
    return Tensor(arr, tuple(valence))


def check_almost_complex(J: np.ndarray, tol: float = DEFAULT_TOLS.structural) -> None:
    """Raise unless J^2 = -I within tolerance."""
    dim = J.shape[0]
    resid = np.max(np.abs(J @ J + np.eye(dim)))
    if resid > tol:
        raise StructuralError(f"J^2 != -I (residual {resid:.3g})")


def project_F_symmetries(a: Tensor, J: Tensor) -> Tensor:
    """Average a (0,3) tensor over the group generated by the two defining
    symmetries of F: swap of the last two slots, and the J-twist in the
    last two slots.  Idempotent; the output satisfies both symmetries.
    """
    if a.valence != (DOWN, DOWN, DOWN):
        raise StructuralError(f"expected valence (0,3), got {a.valence}")
    Jm = J.array if isinstance(J, Tensor) else np.asarray(J, dtype=float)
    check_almost_complex(Jm)
    arr = a.array
    swap = np.transpose(arr, (0, 2, 1))
    twist = np.einsum("iab,aj,bk->ijk", arr, Jm, Jm)
    swap_twist = np.einsum("iab,ak,bj->ijk", arr, Jm, Jm)
    return Tensor(0.25 * (arr + swap + twist + swap_twist), a.valence)


def f_symmetry_residual(F: np.ndarray, J: np.ndarray) -> float:
    """How far a (0,3) array is from satisfying both defining F symmetries."""
    swap = np.transpose(F, (0, 2, 1))
    twist = np.einsum("iab,aj,bk->ijk", F, J, J)
    return max(component_norm(F - swap), component_norm(F - twist))
