import numpy as np
import pytest

from conftest import random_orthogonal, random_sparse_bracket
from fixtures_lie import (
    chain_soliton,
    critical_family,
    double_star_limit,
    double_star_start,
    graded,
    heisenberg,
    DOUBLE_STAR_MOMENT,
)
from nilsoliton import (
    Bracket,
    ZeroBracketError,
    act,
    beta_of,
    diagonal_moment_projection,
    ricci,
    ricci_diagonal_sufficient,
    two_step_center_check,
    weight_support,
)
from nilsoliton.brackets import pi_action


class TestRicci:
    def test_heisenberg(self):
        data = ricci(heisenberg())
        assert np.allclose(data.ric, np.diag([-0.5, -0.5, 0.5]))
        assert data.scalar_curv == pytest.approx(-0.5)
        assert np.allclose(data.moment, np.diag([-1.0, -1.0, 1.0]))
        assert data.F_value == pytest.approx(3.0)

    def test_graded_all_ones_moment(self):
        data = ricci(graded([1, 1, 0, 1, 1, 1, 1, 0, 1]))
        expected = np.array([-4, -3, -2, -1, 0, 1, 2]) / 7.0
        assert np.allclose(np.diag(data.moment), expected)
        assert data.F_value == pytest.approx(5.0 / 7.0)

    def test_double_star_limit_spectrum(self):
        eigs = np.sort(np.linalg.eigvalsh(ricci(double_star_limit()).ric))
        assert np.allclose(eigs, DOUBLE_STAR_MOMENT, atol=1e-12)

    def test_zero_bracket_rejected(self):
        with pytest.raises(ZeroBracketError):
            ricci(Bracket(3, {}))


class TestDiagonalProjection:
    def test_heisenberg(self):
        assert np.allclose(diagonal_moment_projection(heisenberg()), [-1, -1, 1])

    def test_chain_soliton_combination(self):
        # squared coefficients (5, 8, 9, 8, 5) against the five chain weights,
        # scaled by 2/||mu||^2 = 2/70
        b = chain_soliton()
        sup = weight_support(b)
        assert b.norm_sq() == pytest.approx(70.0)
        expected = (2.0 / 70.0) * np.array(sup.squared_coefficients) @ sup.weight_arrays()
        assert np.allclose(diagonal_moment_projection(b), expected)
        assert np.allclose(expected, np.array([-35, -5, -3, -1, 1, 3, 5]) / 35.0)

    def test_matches_moment_diagonal(self, rng):
        for _ in range(100):
            b = random_sparse_bracket(rng)
            proj = diagonal_moment_projection(b)
            assert np.allclose(proj, np.diag(ricci(b).moment), atol=1e-10)

    def test_trace_is_minus_one(self, rng):
        for _ in range(20):
            b = random_sparse_bracket(rng)
            assert np.sum(diagonal_moment_projection(b)) == pytest.approx(-1.0)


class TestDiagonalSufficient:
    def test_graph_brackets(self):
        assert ricci_diagonal_sufficient(double_star_start())

    def test_graded_brackets(self):
        assert ricci_diagonal_sufficient(graded([1, 1, 1, 1, 1, 1, 1, 1, 1]))

    def test_shared_pair_counterexample(self):
        b = Bracket(4, {(1, 2, 4): 1.0, (1, 3, 4): 1.0})
        assert not ricci_diagonal_sufficient(b)
        off = ricci(b).ric - np.diag(np.diag(ricci(b).ric))
        assert np.max(np.abs(off)) > 0.1


class TestTwoStepCenterCheck:
    def test_graph_without_isolated_vertices(self):
        assert two_step_center_check(double_star_start())

    def test_more_graph_brackets(self):
        from fixtures_lie import path, star
        from nilsoliton import to_bracket

        for g in (path(3), star(4)):
            assert two_step_center_check(to_bracket(g))

    def test_heisenberg_plus_line(self):
        b = Bracket(4, {(1, 2, 3): 1.0})
        assert not two_step_center_check(b)

    def test_double_star_limit_has_zero_eigenvalue(self):
        assert not two_step_center_check(double_star_limit())

    def test_rejects_deeper_nilpotency(self):
        with pytest.raises(ValueError):
            two_step_center_check(chain_soliton())


class TestInvariants:
    def test_scalar_curvature_identity(self, rng):
        for _ in range(50):
            b = random_sparse_bracket(rng)
            assert ricci(b).scalar_curv == pytest.approx(-b.norm_sq() / 4.0)

    def test_orthogonal_equivariance(self, rng):
        for _ in range(30):
            b = random_sparse_bracket(rng)
            q = random_orthogonal(rng, b.dim)
            lhs = ricci(act(q, b, drop_tol=0.0)).ric
            rhs = q @ ricci(b).ric @ q.T
            assert np.max(np.abs(lhs - rhs)) < 1e-9 * max(1.0, np.linalg.norm(rhs))

    def test_scaling_law(self, rng):
        b = random_sparse_bracket(rng)
        c = 3.7
        assert np.allclose(ricci(b.scaled(c)).ric, c * c * ricci(b).ric)
        assert ricci(b.scaled(c)).F_value == pytest.approx(ricci(b).F_value)

    def test_F_bounded_by_min_norm_combination(self, rng):
        for _ in range(50):
            b = random_sparse_bracket(rng)
            assert ricci(b).F_value >= beta_of(b).norm_sq - 1e-12

    def test_moment_map_defining_identity(self, rng):
        for _ in range(100):
            b = random_sparse_bracket(rng)
            alpha = rng.standard_normal((b.dim, b.dim))
            alpha = (alpha + alpha.T) / 2
            lhs = np.sum(ricci(b).moment * alpha) * b.norm_sq()
            rhs = float(np.sum(pi_action(alpha, b) * b.tensor()))
            assert lhs == pytest.approx(rhs, abs=1e-9 * max(1.0, abs(rhs)))

    def test_family_critical_value(self, rng):
        for _ in range(10):
            a = rng.uniform(0.1, 0.9)
            assert ricci(critical_family(a, 1.0, 1.0)).F_value == pytest.approx(5 / 7)
