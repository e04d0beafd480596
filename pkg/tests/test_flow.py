import numpy as np
import pytest

from conftest import random_two_step
from fixtures_lie import (
    chain_flow_limit,
    chain_flow_start,
    chain_soliton,
    double_star_start,
    heisenberg,
)
from nilsoliton import (
    Bracket,
    FlowOptions,
    ZeroBracketError,
    act,
    classify_limit,
    grad_F,
    inner,
    integrate,
    is_einstein,
    ricci,
    trajectory_csv,
    validate,
)
from oracles import directional_derivative_fd


class TestGradient:
    def test_vanishes_at_critical_points(self):
        assert grad_F(chain_soliton().unit_sphere(2.0)).norm() < 1e-8
        assert grad_F(chain_flow_limit()).norm() < 1e-8

    def test_orthogonal_to_scaling_direction(self, rng):
        for _ in range(20):
            b = random_two_step(rng)
            assert abs(inner(grad_F(b), b)) < 1e-10 * max(1.0, grad_F(b).norm())

    def test_matches_central_differences(self, rng):
        def F(b):
            return ricci(b).F_value

        resolved = 0
        attempts = 0
        while resolved < 100 and attempts < 600:
            attempts += 1
            base = random_two_step(rng, n_gens=4, n_center=2)
            h = random_two_step(rng, n_gens=4, n_center=2)
            h = h.scaled(1.0 / h.norm())
            fd = directional_derivative_fd(F, base, h, eps=1e-5)
            an = inner(grad_F(base), h)
            if abs(fd) >= 1e-3:
                assert an == pytest.approx(fd, rel=1e-5)
                resolved += 1
            else:
                # flat directions: both sides must vanish to FD noise level
                assert abs(an - fd) < 1e-8
        assert resolved >= 100

    def test_zero_bracket_rejected(self):
        with pytest.raises(ZeroBracketError):
            grad_F(Bracket(3, {}))


class TestIntegrate:
    def test_chain_flow_limit_values(self):
        traj = integrate(chain_flow_start(), FlowOptions(grad_tol=1e-9))
        assert traj.converged
        lim = traj.limit
        assert lim.coeff(1, 2, 5) == pytest.approx(2 / np.sqrt(5), abs=1e-6)
        assert lim.coeff(2, 3, 6) == pytest.approx(np.sqrt(2 / 5), abs=1e-6)
        assert lim.coeff(3, 4, 7) == pytest.approx(2 / np.sqrt(5), abs=1e-6)

    def test_einstein_start_is_fixed(self):
        traj = integrate(chain_soliton(), FlowOptions(grad_tol=1e-8))
        assert traj.converged and traj.steps == 0
        assert traj.limit == chain_soliton().unit_sphere(2.0)

    def test_f_monotone_along_flow(self):
        traj = integrate(chain_flow_start(), FlowOptions(grad_tol=1e-9))
        values = [s.F_value for s in traj.samples]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_sphere_constraint_maintained(self):
        traj = integrate(chain_flow_start(), FlowOptions(grad_tol=1e-9))
        for s in traj.samples:
            assert s.bracket.norm() == pytest.approx(2.0, abs=1e-12)

    def test_limits_are_critical(self, rng):
        for _ in range(3):
            b = random_two_step(rng, n_gens=3, n_center=2)
            traj = integrate(b, FlowOptions(grad_tol=1e-10, max_time=1e5))
            assert traj.converged
            assert is_einstein(traj.limit, tol=1e-6).is_einstein

    def test_jacobi_preserved_along_flow(self):
        traj = integrate(chain_flow_start(), FlowOptions(grad_tol=1e-9, sample_every=10))
        for s in traj.samples:
            assert validate(s.bracket, tol=1e-6).jacobi_ok

    def test_permutation_equivariance(self):
        b0 = chain_flow_start()
        perm = [3, 1, 2, 4, 6, 5, 7]
        P = np.zeros((7, 7))
        for i, p in enumerate(perm):
            P[p - 1, i] = 1.0
        moved = act(P, b0, drop_tol=0.0)
        t1 = integrate(b0, FlowOptions(grad_tol=1e-9))
        t2 = integrate(moved, FlowOptions(grad_tol=1e-9))
        lim_moved = act(P, t1.limit, drop_tol=0.0)
        for key in set(lim_moved.keys()) | set(t2.limit.keys()):
            assert lim_moved.coeff(*key) == pytest.approx(t2.limit.coeff(*key), abs=1e-6)

    def test_zero_bracket_rejected(self):
        with pytest.raises(ZeroBracketError):
            integrate(Bracket(3, {}))

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            integrate(heisenberg(), FlowOptions(method="verlet"))


class TestStiffIntegrate:
    def test_matches_explicit_on_fast_flow(self):
        t_exp = integrate(chain_flow_start(), FlowOptions(grad_tol=1e-9))
        t_imp = integrate(
            chain_flow_start(),
            FlowOptions(grad_tol=1e-9, method="stiff", rtol=1e-10, atol=1e-13),
        )
        assert t_imp.converged
        for key in t_exp.limit.keys():
            assert t_imp.limit.coeff(*key) == pytest.approx(
                t_exp.limit.coeff(*key), abs=1e-6
            )

    def test_slow_degeneration_reaches_structural_zero(self):
        traj = integrate(
            double_star_start(),
            FlowOptions(grad_tol=0.0, max_time=1e14, rtol=1e-10, atol=1e-14,
                        method="stiff", sample_every=200),
        )
        assert traj.stop_reason == "max_time reached"
        assert abs(traj.limit.coeff(1, 2, 7)) < 1e-7
        assert traj.structural_zeros == ((1, 2, 7),)
        cls = classify_limit(double_star_start(), traj.limit)
        assert cls.proper_degeneration

    def test_einstein_start_short_circuits(self):
        traj = integrate(chain_soliton(), FlowOptions(grad_tol=1e-8, method="stiff"))
        assert traj.converged and traj.steps == 0


class TestClassifyLimit:
    def test_same_orbit_evidence(self):
        cls = classify_limit(chain_flow_start(), chain_flow_limit())
        assert not cls.proper_degeneration

    def test_identical_brackets_match(self):
        b = chain_flow_start()
        assert not classify_limit(b, b).proper_degeneration

    def test_pruning_reveals_degeneration(self):
        limit = Bracket(
            11,
            {
                (1, 2, 7): 1e-9,
                (1, 3, 8): 2**-0.5,
                (1, 4, 9): 2**-0.5,
                (2, 5, 10): 2**-0.5,
                (2, 6, 11): 2**-0.5,
            },
        )
        cls = classify_limit(double_star_start(), limit)
        assert cls.proper_degeneration
        assert cls.start_invariants["derived_dim"] == 5
        assert cls.limit_invariants["derived_dim"] == 4


class TestCsv:
    def test_header_and_shape(self):
        traj = integrate(chain_flow_start(), FlowOptions(grad_tol=1e-9))
        text = trajectory_csv(traj)
        lines = text.strip().splitlines()
        assert lines[0] == "t,F,grad_norm,c_1_2_5,c_2_3_6,c_3_4_7"
        assert len(lines) == len(traj.samples) + 1
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert len(first) == 6


class TestPerturbation:
    def test_seeded_orbit_perturbation_is_deterministic(self):
        opts = FlowOptions(grad_tol=1e-9, perturb_seed=11)
        t1 = integrate(chain_flow_start(), opts)
        t2 = integrate(chain_flow_start(), opts)
        assert t1.limit == t2.limit
        # perturbed flow still reaches a critical point of the same norm
        assert t1.converged
        assert t1.limit.norm() == pytest.approx(2.0)
