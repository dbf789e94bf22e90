import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from norden.errors import NumericError, StructuralError
from norden.pointwise import standard_pair
from norden.tensor import (
    Tensor,
    component_norm,
    contract,
    identity_tensor,
    project_F_symmetries,
    raise_lower,
    tensor,
)


def rng(seed=0):
    return np.random.default_rng(seed)


class TestContract:
    def test_identity_contraction_returns_vector(self):
        v = tensor(rng().normal(size=4), "u")
        out = contract(identity_tensor(4), v, [(1, 0)])
        assert np.allclose(out.array, v.array)
        assert out.valence == ("u",)

    def test_metric_inverse_contraction_gives_identity(self):
        g_arr = rng(1).normal(size=(4, 4))
        g_arr = g_arr + g_arr.T + 8 * np.eye(4)
        g = tensor(g_arr, "dd")
        ginv = tensor(np.linalg.inv(g_arr), "uu")
        out = contract(ginv, g, [(1, 0)])
        assert np.max(np.abs(out.array - np.eye(4))) < 1e-12

    def test_double_trace_matches_loop_oracle(self):
        F = rng(2).normal(size=(4, 4, 4))
        g_arr = rng(3).normal(size=(4, 4))
        g_arr = g_arr + g_arr.T + 8 * np.eye(4)
        ginv = np.linalg.inv(g_arr)
        out = contract(tensor(ginv, "uu"), tensor(F, "ddd"), [(0, 0), (1, 1)])
        expected = np.zeros(4)
        for k in range(4):
            for i in range(4):
                for j in range(4):
                    expected[k] += ginv[i, j] * F[i, j, k]
        assert np.max(np.abs(out.array - expected)) < 1e-12

    def test_dimension_mismatch_rejected(self):
        a = tensor(np.zeros((4, 4)), "ud")
        b = tensor(np.zeros(6), "u")
        with pytest.raises(StructuralError):
            contract(a, b, [(1, 0)])

    def test_same_variance_rejected(self):
        a = tensor(np.zeros((4, 4)), "dd")
        b = tensor(np.zeros(4), "d")
        with pytest.raises(StructuralError):
            contract(a, b, [(0, 0)])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-3, 3))
    def test_bilinearity(self, seed, alpha):
        r = rng(seed)
        a = tensor(r.normal(size=(4, 4)), "dd")
        b = tensor(r.normal(size=(4, 4)), "dd")
        c = tensor(r.normal(size=4), "u")
        lhs = contract(tensor(alpha * a.array + b.array, "dd"), c, [(1, 0)])
        rhs = alpha * contract(a, c, [(1, 0)]).array + contract(b, c, [(1, 0)]).array
        assert np.max(np.abs(lhs.array - rhs)) < 1e-12 * max(1.0, abs(alpha))


class TestRaiseLower:
    def test_round_trip(self):
        g_arr = rng(5).normal(size=(4, 4))
        g_arr = g_arr + g_arr.T + 8 * np.eye(4)
        g = tensor(g_arr, "dd")
        t = tensor(rng(6).normal(size=(4, 4, 4)), "ddd")
        up = raise_lower(t, 2, g, "u")
        back = raise_lower(up, 2, g, "d")
        assert up.valence == ("d", "d", "u")
        assert np.max(np.abs(back.array - t.array)) < 1e-12

    def test_zero_tensor_stays_zero(self):
        g0, _ = standard_pair(4)
        F = tensor(np.zeros((4, 4, 4)), "ddd")
        out = raise_lower(F, 2, tensor(g0, "dd"), "u")
        assert component_norm(out) == 0.0

    def test_raise_matches_linear_solve_oracle(self):
        g_arr = rng(7).normal(size=(4, 4))
        g_arr = g_arr + g_arr.T + 8 * np.eye(4)
        theta = rng(8).normal(size=4)
        out = raise_lower(tensor(theta, "d"), 0, tensor(g_arr, "dd"), "u")
        solved = np.linalg.solve(g_arr, theta)
        assert np.max(np.abs(out.array - solved)) < 1e-12

    def test_singular_metric_raises(self):
        g = tensor(np.zeros((4, 4)), "dd")
        v = tensor(np.ones(4), "d")
        with pytest.raises(NumericError):
            raise_lower(v, 0, g, "u")

    def test_noop_direction_rejected(self):
        g0, _ = standard_pair(4)
        v = tensor(np.ones(4), "d")
        with pytest.raises(StructuralError):
            raise_lower(v, 0, tensor(g0, "dd"), "d")


class TestComponentNorm:
    def test_zero(self):
        assert component_norm(tensor(np.zeros((4, 4)), "dd")) == 0.0

    def test_one_hot(self):
        arr = np.zeros((4, 4, 4))
        arr[1, 2, 3] = 3.0
        assert component_norm(tensor(arr, "ddd")) == 3.0

    def test_matches_loop_oracle(self):
        arr = rng(9).normal(size=(4, 4, 4))
        total = 0.0
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    total += arr[i, j, k] ** 2
        assert abs(component_norm(tensor(arr, "ddd")) - np.sqrt(total)) < 1e-12


class TestProjectFSymmetries:
    def setup_method(self):
        self.g0, self.J0 = standard_pair(4)
        self.J = tensor(self.J0, "ud")

    def test_fixed_point_unchanged(self):
        a = tensor(rng(10).normal(size=(4, 4, 4)), "ddd")
        once = project_F_symmetries(a, self.J)
        again = project_F_symmetries(once, self.J)
        assert np.max(np.abs(again.array - once.array)) < 1e-14

    def test_output_satisfies_both_symmetries(self):
        a = tensor(rng(11).normal(size=(4, 4, 4)), "ddd")
        out = project_F_symmetries(a, self.J).array
        swap = np.transpose(out, (0, 2, 1))
        twist = np.einsum("iab,aj,bk->ijk", out, self.J0, self.J0)
        assert component_norm(out - swap) < 1e-12
        assert component_norm(out - twist) < 1e-12

    def test_rejects_invalid_structure(self):
        a = tensor(np.zeros((4, 4, 4)), "ddd")
        with pytest.raises(StructuralError):
            project_F_symmetries(a, tensor(np.eye(4), "ud"))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_orthogonal_projection_in_component_inner_product(self, seed):
        # with an isometric J (the standard block form, possibly rotated),
        # group averaging is an orthogonal projection
        r = rng(seed)
        Q, _ = np.linalg.qr(r.normal(size=(4, 4)))
        J = tensor(Q @ self.J0 @ Q.T, "ud")
        a = tensor(r.normal(size=(4, 4, 4)), "ddd")
        b = tensor(r.normal(size=(4, 4, 4)), "ddd")
        Pa = project_F_symmetries(a, J).array
        Pb = project_F_symmetries(b, J).array
        inner = float(np.sum(Pa * (b.array - Pb)))
        assert abs(inner) < 1e-10


class TestTensorType:
    def test_odd_dimension_rejected(self):
        with pytest.raises(StructuralError):
            tensor(np.zeros((3, 3)), "dd")

    def test_nonfinite_rejected(self):
        arr = np.zeros((4, 4))
        arr[0, 0] = np.inf
        with pytest.raises(StructuralError):
            tensor(arr, "dd")

    def test_valence_length_checked(self):
        with pytest.raises(StructuralError):
            tensor(np.zeros((4, 4)), "d")

    def test_components_are_frozen(self):
        t = tensor(np.zeros((4, 4)), "dd")
        with pytest.raises(ValueError):
            t.array[0, 0] = 1.0
