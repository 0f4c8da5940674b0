"""End-to-end inverse kinematics by intersecting two parametrized 3-space families.

Pipeline for a pose ``sigma_E``:

1. pick usable families ``T(u)`` (left) and ``T(w)`` (right) and check that
   the stacked 8x8 coefficient matrix is regular;
2. for a 7-subset of the eight forms build the kernel point ``P(u, w)`` from
   signed 7x7 minors;
3. ``f = sum x_i y_i`` at P and ``g`` = the unused form at P;
4. real roots of ``Res_w(f, g)`` give u; common real roots of f, g give w;
5. recover the remaining four joints from the complementary families and the
   middle-joint systems, then keep candidates whose forward kinematics
   reproduces ``sigma_E``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chain import ChainSpec, JointVector, forward_arr
from .dualquat import StudyPoint, canonicalize, projective_distance, study_residual
from .errors import (InternalInconsistency, NotOnStudyQuadric, SingularSystem,
                     UnsolvableLinear, ZeroKernel)
from .poly import Poly1, Poly2, common_real_roots, real_roots, sylvester_resultant_w, trim
from .spaces import (LinearSpaceFamily, MiddleJointSystem, left_families, middle_joint_system,
                     right_families, select_family)

log = logging.getLogger(__name__)

RANK_RCOND = 1e-10
ZERO_REL = 1e-9


@dataclass(frozen=True)
class SolverOptions:
    pose_tolerance: float = 1e-3
    accept_tolerance: float = 1e-6
    form_tolerance: float = 1e-4
    discard_tolerance: float = 1e-8
    dedup_tolerance: float = 1e-6
    common_root_tolerance: float = 1e-6
    trim_eps: float = 1e-12
    resultant_trim: float = 1e-40
    general_position_samples: int = 5
    seed: int = 0
    # forms are tried with one of them left out, in this order
    drop_order: Tuple[int, ...] = (7, 6, 5, 4, 3, 2, 1, 0)


@dataclass(frozen=True)
class IKSolution:
    joints: JointVector
    residual: float
    f4_pose: StudyPoint
    uw: Tuple[float, float] = (math.nan, math.nan)

    @property
    def external(self) -> Tuple[float, ...]:
        return self.joints.external()


@dataclass
class EliminationState:
    subset: Tuple[int, ...]
    P: List[Poly2]
    f: Poly2
    g: Poly2


@dataclass
class SolveResult:
    solutions: List[IKSolution]
    families: Tuple[str, str] = ("", "")
    subset: Tuple[int, ...] = ()
    resultant_degree: int = -1
    resultant_roots: List[float] = field(default_factory=list)
    f_degrees: Tuple[int, int] = (-1, -1)
    g_degrees: Tuple[int, int] = (-1, -1)
    pose_correction: float = 0.0
    rejected: List[dict] = field(default_factory=list)
    family_objects: Dict[str, LinearSpaceFamily] = field(default_factory=dict)
    elapsed: float = 0.0
    note: str = ""


# ---------------------------------------------------------------------------
# pose preparation
# ---------------------------------------------------------------------------

def project_to_study(ee) -> Tuple[np.ndarray, float]:
    """Minimal change of the y-part putting the point on the Study quadric.

    Returns (corrected coordinates, relative size of the correction).
    """
    c = np.asarray(ee.coords if hasattr(ee, "coords") else ee, dtype=float).copy()
    x, y = c[:4], c[4:]
    nx = float(x @ x)
    if nx == 0.0:
        raise NotOnStudyQuadric("primal part is zero; not a rigid motion")
    delta = (x @ y) / nx * x
    c[4:] = y - delta
    return c, float(np.max(np.abs(delta)) / np.max(np.abs(c)))


def prepare_pose(ee, tol: float) -> Tuple[np.ndarray, float]:
    c = np.asarray(ee.coords if hasattr(ee, "coords") else ee, dtype=float)
    res = study_residual(c)
    if res > tol:
        raise NotOnStudyQuadric(f"pose Study residual {res:.3g} exceeds tolerance {tol:g}")
    c, corr = project_to_study(canonicalize(c))
    return canonicalize(c), corr


# ---------------------------------------------------------------------------
# linear algebra over the two families
# ---------------------------------------------------------------------------

def _rows(Tu: LinearSpaceFamily, Tw: LinearSpaceFamily):
    out = [(Tu.coeffs[:, i, :], "u") for i in range(Tu.coeffs.shape[1])]
    out += [(Tw.coeffs[:, i, :], "w") for i in range(Tw.coeffs.shape[1])]
    return out


def _row_at(coeffs, t):
    return (t ** np.arange(coeffs.shape[0])) @ coeffs


def stacked_matrix(Tu, Tw, u, w) -> np.ndarray:
    return np.vstack([Tu.at(u), Tw.at(w)])


def check_general_position(Tu, Tw, samples: int = 5, seed: int = 0) -> int:
    """Numeric rank of the stacked 8x8 coefficient matrix at random (u, w).

    Raises SingularSystem when the rank is below 8 at every sample.
    """
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(samples):
        u, w = rng.normal(size=2)
        s = np.linalg.svd(stacked_matrix(Tu, Tw, u, w), compute_uv=False)
        rank = int(np.sum(s > RANK_RCOND * s[0]))
        best = max(best, rank)
        if rank == 8:
            return 8
    raise SingularSystem(f"the eight forms are dependent (rank {best} < 8): infinitely many solutions", rank=best)


def _cheb(n):
    return np.cos(np.pi * (2 * np.arange(n) + 1) / (2 * n))


def kernel_point(Tu, Tw, subset: Sequence[int], trim_eps: float = 1e-12) -> List[Poly2]:
    """P(u, w) from the signed 7x7 minors of the chosen seven forms.

    Computed by evaluation on a Chebyshev tensor grid and interpolation; the
    grid size is the sum of the row degrees in each variable, so the
    interpolation is exact up to rounding.
    """
    rows = _rows(Tu, Tw)
    sub = [rows[k] for k in subset]
    if len(sub) != 7:
        raise ValueError("kernel_point needs exactly seven forms")
    du = sum(c.shape[0] - 1 for c, s in sub if s == "u")
    dw = sum(c.shape[0] - 1 for c, s in sub if s == "w")
    xu, xw = _cheb(du + 1), _cheb(dw + 1)
    vals = np.zeros((8, du + 1, dw + 1))
    ratio = 0.0
    for a, u in enumerate(xu):
        for b, w in enumerate(xw):
            m = np.array([_row_at(c, u if s == "u" else w) for c, s in sub])
            minors = np.array([np.delete(m, i, axis=1) for i in range(8)])
            dets = np.linalg.det(minors) * (-1.0) ** np.arange(8)
            vals[:, a, b] = dets
            ratio = max(ratio, float(np.max(np.abs(dets)) / np.prod(np.linalg.norm(m, axis=1))))
    if ratio < ZERO_REL:
        raise ZeroKernel(f"all minors vanish for subset {tuple(subset)}")
    vu = np.vander(xu, du + 1, increasing=True)
    vw = np.vander(xw, dw + 1, increasing=True)
    P = [np.linalg.solve(vu, np.linalg.solve(vw, vals[i].T).T) for i in range(8)]
    scale = max(float(np.max(np.abs(p))) for p in P)
    out = []
    for p in P:
        p = p / scale
        p[np.abs(p) < trim_eps] = 0.0
        out.append(Poly2(p))
    return out


def evaluate_point(P: Sequence[Poly2], u: float, w: float) -> np.ndarray:
    return np.array([p.evaluate(u, w) for p in P])


def study_substitution(P: Sequence[Poly2], trim_eps: float = 1e-12) -> Poly2:
    """``f = sum x_i y_i`` at P; the zero polynomial signals 'try another subset'."""
    f = Poly2.zero()
    scale = 0.0
    for i in range(4):
        f = f + P[i] * P[i + 4]
        scale = max(scale, P[i].max_abs() * P[i + 4].max_abs())
    if f.is_zero() or f.max_abs() <= ZERO_REL * scale:
        return Poly2.zero()
    return trim(f, trim_eps)


def _row_poly2(coeffs_k: np.ndarray, side: str) -> Poly2:
    return Poly2(coeffs_k[:, None] if side == "u" else coeffs_k[None, :])


def leftover_form(P, Tu, Tw, subset, trim_eps: float = 1e-12) -> Poly2:
    """The unused eighth form evaluated at P.

    Raises InternalInconsistency when it vanishes identically, which would
    contradict the general-position check.
    """
    rows = _rows(Tu, Tw)
    (k,) = [i for i in range(8) if i not in subset]
    coeffs, side = rows[k]
    g = Poly2.zero()
    for j in range(8):
        g = g + _row_poly2(coeffs[:, j], side) * P[j]
    scale = float(np.max(np.abs(coeffs))) * max(p.max_abs() for p in P)
    if g.is_zero() or g.max_abs() <= ZERO_REL * scale:
        raise InternalInconsistency("the eighth form vanishes on P(u, w) although the system is regular")
    return trim(g, trim_eps)


def _newton_uw(f: Poly2, g: Poly2, u: float, w: float, steps: int = 3):
    fu = Poly2(f.c[1:] * np.arange(1, f.c.shape[0])[:, None]) if f.c.shape[0] > 1 else Poly2.zero()
    fw = Poly2(f.c[:, 1:] * np.arange(1, f.c.shape[1])[None, :]) if f.c.shape[1] > 1 else Poly2.zero()
    gu = Poly2(g.c[1:] * np.arange(1, g.c.shape[0])[:, None]) if g.c.shape[0] > 1 else Poly2.zero()
    gw = Poly2(g.c[:, 1:] * np.arange(1, g.c.shape[1])[None, :]) if g.c.shape[1] > 1 else Poly2.zero()

    def size(u, w):
        return abs(f(u, w)) / f.max_abs() + abs(g(u, w)) / g.max_abs()

    best = size(u, w)
    for _ in range(steps):
        jac = np.array([[fu(u, w), fw(u, w)], [gu(u, w), gw(u, w)]])
        rhs = np.array([f(u, w), g(u, w)])
        try:
            du, dw = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            break
        nu, nw = u - du, w - dw
        s = size(nu, nw)
        if not s < best:
            break
        u, w, best = nu, nw, s
    return u, w


def solve_uw(f: Poly2, g: Poly2, P: Optional[Sequence[Poly2]] = None, tol: float = 1e-6,
             discard_tol: float = 1e-8, resultant_trim: float = 1e-40, info: Optional[dict] = None):
    """Real intersections (u, w) of the plane curves f = 0 and g = 0.

    When P is given, pairs whose primal part x0..x3 of P(u, w) vanishes are
    discarded (they do not represent rigid motions).
    """
    r = sylvester_resultant_w(f, g, rel_eps=resultant_trim)
    if r.is_zero():
        raise InternalInconsistency("the resultant vanishes identically")
    us = real_roots(r) if r.degree > 0 else []
    if info is not None:
        info["resultant"] = r
        info["roots"] = [float(x) for x in us]
    pairs = []
    for u in us:
        u = float(u)
        fu, gu = f.evaluate_partial(u), g.evaluate_partial(u)
        fu = trim(fu, 1e-14) if not fu.is_zero() else fu
        gu = trim(gu, 1e-14) if not gu.is_zero() else gu
        if fu.is_zero() and gu.is_zero():
            continue
        for w in common_real_roots(fu, gu, tol):
            uu, ww = _newton_uw(f, g, u, w)
            pairs.append((uu, ww))
    out = []
    for u, w in pairs:
        if P is not None:
            x = evaluate_point(P, u, w)
            if np.max(np.abs(x[:4])) <= discard_tol * np.max(np.abs(x)):
                continue
        if any(abs(u - a) <= 1e-9 * max(1, abs(u)) and abs(w - b) <= 1e-9 * max(1, abs(w)) for a, b in out):
            continue
        out.append((u, w))
    return out


# ---------------------------------------------------------------------------
# remaining joints
# ---------------------------------------------------------------------------

@dataclass
class _Context:
    chain: ChainSpec
    ee: np.ndarray
    left: Dict[str, LinearSpaceFamily]
    right: Dict[str, LinearSpaceFamily]
    Tu: LinearSpaceFamily
    Tw: LinearSpaceFamily
    mid_left: MiddleJointSystem
    mid_right: MiddleJointSystem


def recover_remaining_joints(ctx: _Context, x: np.ndarray, u: float, w: float, min_coeff: float = 1e-10) -> JointVector:
    """Fill in the four joints not fixed by (u, w) at the frame-4 point x."""
    q = [math.nan] * 6
    q[ctx.Tu.joint - 1] = u
    q[ctx.Tw.joint - 1] = w
    other_left = ctx.left["last"] if ctx.Tu is ctx.left["first"] else ctx.left["first"]
    other_right = ctx.right["last"] if ctx.Tw is ctx.right["first"] else ctx.right["first"]
    for fam in (other_left, other_right):
        val, size = fam.solve_param(x)
        if not size > min_coeff or not math.isfinite(val):
            raise UnsolvableLinear(f"{fam.name} does not determine its joint at this point")
        q[fam.joint - 1] = val
    for idx, sysm in ((1, ctx.mid_left), (4, ctx.mid_right)):
        val, size = sysm.solve(x)
        if not size > min_coeff or not math.isfinite(val):
            raise UnsolvableLinear(f"middle joint {idx + 1} is not determined at this point")
        q[idx] = val
    return JointVector(tuple(q), ctx.chain.pattern)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _subset_order(drops):
    for drop in drops:
        yield tuple(k for k in range(8) if k != drop)


def _joint_distance(a: JointVector, b: JointVector) -> float:
    return max(abs(x - y) for x, y in zip(a, b))


def solve_ik_report(chain: ChainSpec, ee, opts: SolverOptions = SolverOptions()) -> SolveResult:
    """Run the full pipeline and return solutions plus diagnostics."""
    t0 = time.perf_counter()
    e, corr = prepare_pose(ee, opts.pose_tolerance)
    left = left_families(chain)
    right = right_families(chain, e)
    Tu = select_family(left, "left")
    Tw = select_family(right, "right")
    check_general_position(Tu, Tw, opts.general_position_samples, opts.seed)
    result = SolveResult(solutions=[], families=(Tu.name, Tw.name), pose_correction=corr,
                         family_objects={"left_first": left["first"], "left_last": left["last"],
                                         "right_first": right["first"], "right_last": right["last"]})

    state = None
    for subset in _subset_order(opts.drop_order):
        try:
            P = kernel_point(Tu, Tw, subset, opts.trim_eps)
        except ZeroKernel:
            continue
        f = study_substitution(P, opts.trim_eps)
        if f.is_zero():
            continue
        g = leftover_form(P, Tu, Tw, subset, opts.trim_eps)
        state = EliminationState(subset, P, f, g)
        break
    if state is None:
        raise InternalInconsistency("every 7-subset gives f = 0; this case needs a different algorithm")
    result.subset = state.subset
    result.f_degrees = (state.f.deg_u, state.f.deg_w)
    result.g_degrees = (state.g.deg_u, state.g.deg_w)
    if state.g.deg_u <= 0 and state.g.deg_w <= 0:
        result.note = "leftover form is a nonzero constant: no real solutions"
        result.elapsed = time.perf_counter() - t0
        return result

    info: dict = {}
    pairs = solve_uw(state.f, state.g, state.P, opts.common_root_tolerance,
                     opts.discard_tolerance, opts.resultant_trim, info)
    result.resultant_degree = info["resultant"].degree
    result.resultant_roots = info["roots"]

    ctx = _Context(chain, e, left, right, Tu, Tw,
                   middle_joint_system(chain, "left"), middle_joint_system(chain, "right", e))
    sols: List[IKSolution] = []
    for u, w in pairs:
        x = evaluate_point(state.P, u, w)
        form_res = max(Tu.residual(u, x), Tw.residual(w, x))
        if form_res > opts.form_tolerance or study_residual(x) > opts.form_tolerance:
            result.rejected.append({"u": u, "w": w, "reason": "forms", "residual": form_res})
            continue
        try:
            joints = recover_remaining_joints(ctx, x, u, w)
        except UnsolvableLinear as exc:
            result.rejected.append({"u": u, "w": w, "reason": str(exc)})
            continue
        res = projective_distance(forward_arr(chain, joints), e)
        if res > opts.accept_tolerance:
            result.rejected.append({"u": u, "w": w, "reason": "fk", "residual": res})
            continue
        if any(_joint_distance(joints, s.joints) <= opts.dedup_tolerance for s in sols):
            continue
        sols.append(IKSolution(joints, res, StudyPoint(canonicalize(x)), (u, w)))
    sols.sort(key=lambda s: s.external[0])
    result.solutions = sols
    if not sols:
        result.note = "no real solutions (half-rotation solutions are not representable)"
    result.elapsed = time.perf_counter() - t0
    return result


def solve_ik(chain: ChainSpec, ee, opts: SolverOptions = SolverOptions()) -> List[IKSolution]:
    """All real IK solutions for the end-effector pose ``ee`` (Study point or 8-array)."""
    return solve_ik_report(chain, ee, opts).solutions
