import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from golden import (EXACT_2R2P2R, EXACT_2RP3R, POSE_2R2P2R, POSE_2RP3R, SOLUTIONS_2R2P2R,
                    SOLUTIONS_2RP3R, match_table)
from ik6rp.chain import SUPPORTED_PATTERNS, JointVector, forward_arr, make_chain
from ik6rp.dualquat import from_rotation_translation, projective_distance, study_residual
from ik6rp.errors import NotOnStudyQuadric, SingularSystem, ZeroKernel
from ik6rp.poly import Poly2
from ik6rp.sampling import random_chain, random_joints
from ik6rp.solver import (SolverOptions, check_general_position, evaluate_point, kernel_point,
                          leftover_form, prepare_pose, project_to_study, solve_ik, solve_ik_report,
                          solve_uw, study_substitution)
from ik6rp.spaces import left_families, right_families, select_family

seeds = st.integers(0, 2**32 - 1)


def families(chain, ee):
    e, _ = prepare_pose(ee, 1e-3)
    return e, select_family(left_families(chain), "left"), select_family(right_families(chain, e), "right")


@pytest.fixture(scope="module")
def report_2rp3r(chain_2rp3r):
    return solve_ik_report(chain_2rp3r, POSE_2RP3R)


@pytest.fixture(scope="module")
def report_2r2p2r(chain_2r2p2r):
    return solve_ik_report(chain_2r2p2r, POSE_2R2P2R)


# ---------------------------------------------------------------------------
# pose handling
# ---------------------------------------------------------------------------

def test_projection_onto_quadric():
    c, corr = project_to_study(POSE_2RP3R)
    assert study_residual(c) <= 1e-15
    assert 0 < corr < 1e-6
    # only the y-part moves
    np.testing.assert_array_equal(c[:4], POSE_2RP3R[:4])


def test_pose_far_off_quadric_is_rejected(chain_2rp3r):
    with pytest.raises(NotOnStudyQuadric):
        solve_ik(chain_2rp3r, [1, 0, 0, 0, 1, 0, 0, 0])


# ---------------------------------------------------------------------------
# elimination pieces
# ---------------------------------------------------------------------------

def test_solve_uw_circle_and_line():
    u, w = Poly2.u(), Poly2.w()
    pairs = solve_uw(u * u + w * w - 2, u - w)
    assert sorted(pairs) == [pytest.approx((-1, -1)), pytest.approx((1, 1))]


def frozen(fam, t=0.3):
    """The family with its parameter fixed at t (constant forms)."""
    return replace(fam, coeffs=fam.at(t)[None])


def test_general_position_fails_for_shared_space(chain_2rp3r):
    _, tu, _ = families(chain_2rp3r, POSE_2RP3R)
    with pytest.raises(SingularSystem) as info:
        check_general_position(frozen(tu), frozen(tu))
    assert info.value.rank == 4


def test_dependent_rows_give_zero_kernel(chain_2rp3r):
    _, tu, tw = families(chain_2rp3r, POSE_2RP3R)
    # rows 0-3 and 4-6 span only a 4-space, so every 7x7 minor vanishes
    with pytest.raises(ZeroKernel):
        kernel_point(frozen(tu), frozen(tu), (0, 1, 2, 3, 4, 5, 6))


def test_zero_dual_part_gives_zero_f():
    P = [Poly2([[1.0, 2.0]])] * 4 + [Poly2.zero()] * 4
    assert study_substitution(P).is_zero()


def test_elimination_objects(chain_2rp3r):
    e, tu, tw = families(chain_2rp3r, POSE_2RP3R)
    assert check_general_position(tu, tw) == 8
    subset = (0, 1, 2, 3, 4, 5, 6)
    P = kernel_point(tu, tw, subset)
    f = study_substitution(P)
    g = leftover_form(P, tu, tw, subset)
    assert not f.is_zero()
    assert g.deg_u >= 1 or g.deg_w >= 1
    rng = np.random.default_rng(1)
    for u, w in rng.uniform(-2, 2, size=(5, 2)):
        x = evaluate_point(P, u, w)
        m = np.vstack([tu.at(u), tw.at(w)])
        # P lies on the seven chosen hyperplanes
        assert np.max(np.abs(m[:7] @ x)) <= 1e-9 * np.linalg.norm(x) * np.max(np.linalg.norm(m, axis=1))
        assert f(u, w) == pytest.approx(x[:4] @ x[4:], rel=1e-8, abs=1e-12 * np.linalg.norm(x) ** 2)
        assert g(u, w) == pytest.approx(m[7] @ x, rel=1e-8, abs=1e-12 * np.linalg.norm(x))


# ---------------------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------------------

def test_four_solutions_2rp3r(chain_2rp3r, report_2rp3r):
    got = [s.external for s in report_2rp3r.solutions]
    ang, length = match_table(chain_2rp3r, got, SOLUTIONS_2RP3R)
    assert ang <= 0.01 and length <= 1e-4
    assert report_2rp3r.families == ("T(v1)", "T(v6)")
    assert report_2rp3r.subset == (0, 1, 2, 3, 4, 5, 6)


def test_four_solutions_2r2p2r(chain_2r2p2r, report_2r2p2r):
    got = [s.external for s in report_2r2p2r.solutions]
    ang, length = match_table(chain_2r2p2r, got, SOLUTIONS_2R2P2R)
    assert ang <= 0.01 and length <= 1e-4


def test_spurious_resultant_roots_are_filtered(report_2r2p2r):
    assert len(report_2r2p2r.resultant_roots) > len(report_2r2p2r.solutions)
    assert report_2r2p2r.rejected


@pytest.mark.parametrize("name", ["2rp3r", "2r2p2r"])
def test_returned_points_satisfy_all_forms(name, request):
    chain = request.getfixturevalue(f"chain_{name}")
    report = request.getfixturevalue(f"report_{name}")
    tu = report.family_objects["left_first"]
    tw = report.family_objects["right_first"]
    for s in report.solutions:
        u, w = s.uw
        x = s.f4_pose.array()
        assert tu.residual(u, x) <= 1e-8 and tw.residual(w, x) <= 1e-8
        assert study_residual(x) <= 1e-8
        assert s.residual <= 1e-6


@pytest.mark.parametrize("name, exact", [("2rp3r", EXACT_2RP3R), ("2r2p2r", EXACT_2R2P2R)])
def test_exact_solution_is_recovered_tightly(name, exact, request):
    chain = request.getfixturevalue(f"chain_{name}")
    q = JointVector.from_external(chain, exact)
    sols = solve_ik(chain, forward_arr(chain, q))
    assert min(max(abs(a - b) for a, b in zip(s.joints, q)) for s in sols) <= 1e-9


@pytest.mark.parametrize("lam", [-1.0, 0.5, 3.0])
def test_scale_invariance(chain_2r2p2r, report_2r2p2r, lam):
    sols = solve_ik(chain_2r2p2r, lam * np.array(POSE_2R2P2R))
    assert len(sols) == len(report_2r2p2r.solutions)
    for a, b in zip(sols, report_2r2p2r.solutions):
        assert max(abs(x - y) for x, y in zip(a.joints, b.joints)) <= 1e-9


@pytest.mark.parametrize("name", ["2rp3r", "2r2p2r"])
def test_subset_independence(name, request):
    chain = request.getfixturevalue(f"chain_{name}")
    report = request.getfixturevalue(f"report_{name}")
    pose = POSE_2RP3R if name == "2rp3r" else POSE_2R2P2R
    other = solve_ik_report(chain, pose, SolverOptions(drop_order=(3, 2, 1, 0)))
    assert other.subset != report.subset
    assert len(other.solutions) == len(report.solutions)
    for a, b in zip(other.solutions, report.solutions):
        assert max(abs(x - y) for x, y in zip(a.joints, b.joints)) <= 1e-6


def test_solutions_sorted_and_distinct(report_2rp3r):
    th1 = [s.external[0] for s in report_2rp3r.solutions]
    assert th1 == sorted(th1)
    assert len(set(np.round(th1, 6))) == len(th1)


# ---------------------------------------------------------------------------
# random chains
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("pattern", SUPPORTED_PATTERNS)
@settings(max_examples=5, deadline=None)
@given(seed=seeds)
def test_round_trip(pattern, seed):
    rng = np.random.default_rng(seed)
    chain = random_chain(rng, pattern)
    q = random_joints(rng, chain)
    ee = forward_arr(chain, q)
    sols = solve_ik(chain, ee)
    assert all(projective_distance(forward_arr(chain, s.joints), ee) <= 1e-6 for s in sols)
    assert min(max(abs(a - b) for a, b in zip(s.joints, q)) for s in sols) <= 1e-6 * max(1, max(map(abs, q)))


def test_unreachable_pose_returns_empty_list():
    chain = make_chain([("R", None, 0, 0.3, 40), ("R", None, 0.1, 0.5, 30), ("R", None, 0.2, 0.3, 20),
                        ("R", None, 0.25, 0.2, 60), ("R", None, 0.15, 0.4, -50), ("R", None, 0, 0, 0)])
    far = from_rotation_translation([0, 0, 1], 0.3, [50.0, 0, 0]).coords
    report = solve_ik_report(chain, far)
    assert report.solutions == []
    assert "no real solutions" in report.note


def test_options_are_respected(chain_2rp3r):
    # an impossibly strict acceptance gate leaves nothing
    sols = solve_ik(chain_2rp3r, POSE_2RP3R, SolverOptions(accept_tolerance=0.0))
    assert sols == [] or all(s.residual == 0.0 for s in sols)
    assert math.isfinite(SolverOptions().pose_tolerance)
