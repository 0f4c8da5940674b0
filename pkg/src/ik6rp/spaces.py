"""Parametrized linear 3-spaces containing the 3-subchain workspaces.

A two-joint segment ``J(s) Tx(a) Rx(l) J'(t)`` has a kinematic image whose
linear span is a 3-space of P^7; the four linear forms cutting it out are the
kernel of the monomial coefficient matrix of the segment.  Pulling these forms
back through the fixed (and one joint-dependent) factors around the segment
gives a family ``T(q)`` whose coefficients are polynomials in the joint ``q``.

Left chain ``X = Z1 K1 Z2 K2 Z3 K3`` with ``Zi = Rz(vi) Tz(di)`` and
``Ki = Tx(ai) Rx(li)``::

    T(v1):  Y = (Z1 K1 Tz(d2))* X Tail*        segment Rz(v2) K2 J3
    T(q3):  Y = X (Tz(d2) K2 Z3(q3) K3)*        segment Rz(v1) K1 Rz(v2)

Right chain: ``sigma_E* X`` is proportional to ``sigma_6* sigma_5* sigma_4*``
and the same construction applies with ``(a, l) -> (-a, -l)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from .chain import (ChainSpec, PolyDQ, dqmul_arr, left_poly, right_poly, rx, rz, tx, tz)
from .dualquat import STUDY_GRAM, dqconj_arr, left_matrix, right_matrix
from .errors import DegenerateSegment, NoParametrizedKernel, Unsupported
from .poly import Poly1

RANK_RCOND = 1e-10
MEMBERSHIP_TOL = 1e-8

_K = np.array([0, 0, 0, 1.0, 0, 0, 0, 0])
_EPS_K_HALF = np.array([0, 0, 0, 0, 0, 0, 0, 0.5])


# ---------------------------------------------------------------------------
# forms and families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamLinearForm:
    """Linear form on P^7 whose 8 coefficients are polynomials in ``param``.

    ``coeffs`` has shape (deg+1, 8), ascending powers.
    """

    coeffs: np.ndarray
    param: str

    @property
    def polys(self) -> List[Poly1]:
        return [Poly1(list(self.coeffs[:, k]), self.param) for k in range(8)]

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.any(self.coeffs != 0, axis=1))[0]
        return int(nz[-1]) if nz.size else -1

    def at(self, t: float) -> np.ndarray:
        powers = t ** np.arange(self.coeffs.shape[0])
        return powers @ self.coeffs

    def __call__(self, t: float, x) -> float:
        return float(self.at(t) @ np.asarray(x, dtype=float))


@dataclass(frozen=True)
class LinearSpaceFamily:
    """Family ``T(param)`` of linear forms; ``coeffs`` has shape (deg+1, m, 8)."""

    name: str
    param: str
    joint: int
    coeffs: np.ndarray
    in_study_quadric: bool
    condition: str
    segment: str
    segment_params: Tuple[float, float]
    degenerate: bool = False
    study_gram_norm: float = 0.0
    reason: str = ""

    @property
    def forms(self) -> List[ParamLinearForm]:
        return [ParamLinearForm(self.coeffs[:, i, :], self.param) for i in range(self.coeffs.shape[1])]

    @property
    def usable(self) -> bool:
        return not (self.in_study_quadric or self.degenerate)

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.any(self.coeffs != 0, axis=(1, 2)))[0]
        return int(nz[-1]) if nz.size else -1

    def at(self, t: float) -> np.ndarray:
        powers = t ** np.arange(self.coeffs.shape[0])
        return np.tensordot(powers, self.coeffs, axes=1)

    def residual(self, t: float, x) -> float:
        """Largest relative form value at a point (forms normalized at t)."""
        m = self.at(t)
        x = np.asarray(x, dtype=float)
        norms = np.linalg.norm(m, axis=1)
        return float(np.max(np.abs(m @ x) / (norms * np.linalg.norm(x))))

    def solve_param(self, x) -> Tuple[float, float]:
        """Solve a degree-1 family for its parameter at the point x.

        Uses the form whose parameter coefficient has the largest magnitude;
        returns (value, |coefficient| relative to |x|).
        """
        if self.degree > 1:
            raise ValueError("only affine families can be solved linearly")
        x = np.asarray(x, dtype=float)
        c0 = self.coeffs[0] @ x
        c1 = self.coeffs[1] @ x if self.coeffs.shape[0] > 1 else np.zeros_like(c0)
        k = int(np.argmax(np.abs(c1)))
        size = np.linalg.norm(x) * max(np.linalg.norm(self.coeffs[1][k]) if self.coeffs.shape[0] > 1 else 0.0, 1e-300)
        return -float(c0[k] / c1[k]) if c1[k] != 0 else float("nan"), float(abs(c1[k]) / size)


# ---------------------------------------------------------------------------
# two-joint segments
# ---------------------------------------------------------------------------

def _joint_factor(kind: str, var: str) -> PolyDQ:
    if kind == "R":
        return PolyDQ.affine(var, np.eye(8)[0], _K)
    return PolyDQ.affine(var, np.eye(8)[0], _EPS_K_HALF)


def segment_poly(kind: str, a: float, l: float) -> PolyDQ:
    """``J1(s) Tx(a) Rx(l) J2(t)`` for kind in {"RP", "RR", "PR", "PP"}."""
    if len(kind) != 2 or set(kind) - {"R", "P"}:
        raise ValueError(f"bad segment kind {kind!r}")
    return _joint_factor(kind[0], "s") * dqmul_arr(tx(a), rx(l)) * _joint_factor(kind[1], "t")


def _monomial_matrix(p: PolyDQ) -> Tuple[np.ndarray, list]:
    monos = sorted(p.terms, reverse=True)
    rows = np.array([p.terms[m] for m in monos])
    keep = np.any(rows != 0, axis=1)
    return rows[keep], [m for m, k in zip(monos, keep) if k]


def coefficient_matrix_A(kind: str, a: float, l: float) -> np.ndarray:
    """Coefficient rows of ``st, s, t, 1`` after substituting the segment into a generic form.

    Scaled by 4 so the RP case reproduces the printed matrix with rows
    ``(0,0,0,0,-2,2l,0,0)``, ``(0,0,4l,4,0,0,2a,-2al)``, ``(0,...,-2l,2)``,
    ``(4,4l,0,0,-2al,2a,0,0)``.
    """
    p = segment_poly(kind, a, l)
    out = np.zeros((4, 8))
    for r, m in enumerate([(1, 1), (1, 0), (0, 1), (0, 0)]):
        out[r] = 4.0 * p.terms.get(m, np.zeros(8))
    return out


def _span_and_kernel(kind, a, l):
    rows, _ = _monomial_matrix(segment_poly(kind, a, l))
    kernel = null_space(rows, rcond=RANK_RCOND).T
    image = null_space(kernel, rcond=RANK_RCOND).T if kernel.size else np.eye(8)
    return image, kernel


def two_joint_space(kind: str, a: float, l: float, allow_degenerate: bool = False) -> np.ndarray:
    """Orthonormal linear forms (rows) vanishing on the segment's kinematic image.

    Four forms generically; raises DegenerateSegment when the kernel is
    larger (the image collapses, e.g. ``a = l = 0`` for an RR segment) unless
    ``allow_degenerate`` is set, in which case all kernel forms are returned.
    """
    _, kernel = _span_and_kernel(kind, a, l)
    if kernel.shape[0] > 4 and not allow_degenerate:
        raise DegenerateSegment(
            f"{kind} segment with a={a:g}, l={l:g} has a {kernel.shape[0]}-dimensional space of forms")
    return kernel


def span_in_study_quadric(kind: str, a: float, l: float, tol: float = MEMBERSHIP_TOL) -> Tuple[bool, float]:
    """Numeric test whether the segment's linear span lies in the Study quadric.

    Returns (flag, norm of the restricted Study Gram matrix).
    """
    image, _ = _span_and_kernel(kind, a, l)
    gram = image @ STUDY_GRAM @ image.T
    val = float(np.max(np.abs(gram)))
    return val <= tol, val


def symbolic_in_study_quadric(kind: str, a: float, l: float, tol: float = MEMBERSHIP_TOL) -> bool:
    """DH conditions under which the segment span lies in S.

    RP/PR: ``l = +-1``; RR: ``a = 0`` or ``l = 0``.
    """
    if kind == "RR":
        return abs(a) <= tol or abs(l) <= tol
    if kind in ("RP", "PR"):
        return abs(abs(l) - 1.0) <= tol
    return True


def _condition_text(kind: str, a_name: str, l_name: str) -> str:
    if kind == "RR":
        return f"{a_name}=0 or {l_name}=0"
    return f"{l_name}=+-1"


# ---------------------------------------------------------------------------
# change of variables
# ---------------------------------------------------------------------------

def _as_univariate(p, param: str) -> np.ndarray:
    if isinstance(p, PolyDQ):
        if not p.variables:
            return p.terms[()][None, :]
        return p.univariate(param)
    return np.asarray(p, dtype=float)[None, :]


def conjugate_family(forms, left=None, right=None, param: str = "t") -> np.ndarray:
    """Pull linear forms back through ``x -> left * x * right``.

    ``forms`` is (m, 8) or (deg+1, m, 8); ``left`` and ``right`` are
    8-arrays or univariate PolyDQ in ``param``.  Returns (deg'+1, m, 8) where
    the new form is ``L o M`` with ``M`` the induced linear map.
    """
    forms = np.asarray(forms, dtype=float)
    if forms.ndim == 2:
        forms = forms[None]
    g = _as_univariate(left if left is not None else np.eye(8)[0], param)
    h = _as_univariate(right if right is not None else np.eye(8)[0], param)
    deg = forms.shape[0] + g.shape[0] + h.shape[0] - 3
    out = np.zeros((deg + 1, forms.shape[1], 8))
    for i, gi in enumerate(g):
        lg = left_matrix(gi)
        for j, hj in enumerate(h):
            m = lg @ right_matrix(hj)
            for k, fk in enumerate(forms):
                out[i + j + k] += fk @ m
    return out


def _normalize_family(coeffs: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(coeffs), axis=(0, 2), keepdims=True)
    scale[scale == 0] = 1.0
    return coeffs / scale


def _reason_text(kind: str, a: float, l: float, a_name: str, l_name: str, tol: float = MEMBERSHIP_TOL) -> str:
    """The specific membership condition met by (a, l), or '' when none holds."""
    if kind == "RR":
        hits = [f"{a_name}=0"] * (abs(a) <= tol) + [f"{l_name}=0"] * (abs(l) <= tol)
        return ", ".join(hits)
    if kind in ("RP", "PR") and abs(abs(l) - 1.0) <= tol:
        return f"|{l_name}|=1"
    return ""


def _family(name, param, joint, kind, a, l, a_name, l_name, left, right):
    in_s_num, gram = span_in_study_quadric(kind, a, l)
    forms = two_joint_space(kind, a, l, allow_degenerate=True)
    degenerate = forms.shape[0] > 4
    coeffs = _normalize_family(conjugate_family(forms, left, right, param))
    return LinearSpaceFamily(
        name=name, param=param, joint=joint, coeffs=coeffs,
        in_study_quadric=in_s_num or degenerate,
        condition=_condition_text(kind, a_name, l_name),
        segment=kind, segment_params=(a, l), degenerate=degenerate,
        study_gram_norm=gram,
        reason=_reason_text(kind, a, l, a_name, l_name) if (in_s_num or degenerate) else "",
    )


def _jname(chain: ChainSpec, i: int) -> str:
    return ("v" if chain[i].revolute else "d") + str(i)


def _zscrew_poly_conj(row, var):
    return row.zscrew_poly(var).conjugate()


def left_families(chain: ChainSpec) -> Dict[str, LinearSpaceFamily]:
    """The two left-chain families, keyed ``"first"`` (T(v1)) and ``"last"`` (T(q3))."""
    r1, r2, r3 = chain[1], chain[2], chain[3]
    k1, k2, k3 = r1.constant_tail(), r2.constant_tail(), r3.constant_tail()
    p1 = _jname(chain, 1)
    p3 = _jname(chain, 3)

    # T(v1): Y = (Z1(v1) K1 Tz(d2))* X Tail*
    g = (r1.zscrew_poly(p1) * k1 * tz(r2.d)).conjugate()
    if r3.revolute:
        seg_kind, tail = "RR", dqmul_arr(tz(r3.d), k3)
    else:
        seg_kind, tail = "RP", dqmul_arr(rz(r3.v), k3)
    first = _family(f"T({p1})", p1, 1, seg_kind, r2.a, r2.l, "a2", "l2", g, dqconj_arr(tail))

    # T(q3): Y = X (Tz(d2) K2 Z3(q3) K3)*
    h = (PolyDQ.constant(dqmul_arr(tz(r2.d), k2)) * r3.zscrew_poly(p3) * k3).conjugate()
    last = _family(f"T({p3})", p3, 3, "RR", r1.a, r1.l, "a1", "l1", None, h)
    return {"first": first, "last": last}


def right_families(chain: ChainSpec, ee) -> Dict[str, LinearSpaceFamily]:
    """The two right-chain families, keyed ``"first"`` (T(v6)) and ``"last"`` (T(q4)).

    Built from the reversed chain ``sigma_6* sigma_5* sigma_4*`` (twists and
    distances negated) and pulled back by left multiplication with ``sigma_E*``.
    """
    e = np.asarray(ee.coords if hasattr(ee, "coords") else ee, dtype=float)
    e_conj = dqconj_arr(e)
    r4, r5, r6 = chain[4], chain[5], chain[6]
    k4c, k5c = dqconj_arr(r4.constant_tail()), dqconj_arr(r5.constant_tail())
    p6 = _jname(chain, 6)
    p4 = _jname(chain, 4)

    # T(v6): Z = sigma_E* X = Rz(-v6) K5* Tz(-d5) . Seg . Tail
    g = _zscrew_poly_conj(r6, p6) * k5c * tz(-r5.d)
    g_inv = g.conjugate() * e_conj
    if r4.revolute:
        seg_kind, tail = "RR", tz(-r4.d)
    else:
        seg_kind, tail = "RP", rz(-r4.v)
    first = _family(f"T({p6})", p6, 6, seg_kind, -r4.a, -r4.l, "a4", "l4", g_inv, dqconj_arr(tail))

    # T(q4): Z = [Rz(-v6) K5* Rz(-v5)] . [Tz(-d5) K4* Z4*(q4)]
    h = PolyDQ.constant(dqmul_arr(tz(-r5.d), k4c)) * _zscrew_poly_conj(r4, p4)
    last = _family(f"T({p4})", p4, 4, "RR", -r5.a, -r5.l, "a5", "l5", PolyDQ.constant(e_conj), h.conjugate())
    return {"first": first, "last": last}


def select_family(fams: Dict[str, LinearSpaceFamily], side: str) -> LinearSpaceFamily:
    """Preferred usable family: the outer joint first, otherwise the inner one."""
    for key in ("first", "last"):
        if fams[key].usable:
            return fams[key]
    raise Unsupported(
        f"both {side} families lie in the Study quadric "
        f"({fams['first'].name}: {fams['first'].condition}; {fams['last'].name}: {fams['last'].condition})")


# ---------------------------------------------------------------------------
# middle joint
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MiddleJointSystem:
    """Kernel of the monomial matrix B of a form linear in the middle joint."""

    B: np.ndarray
    monomials: Tuple[Tuple[int, ...], ...]
    variables: Tuple[str, ...]
    middle: str
    kernel: np.ndarray  # (16, r)

    @property
    def form(self) -> ParamLinearForm:
        """Kernel element with the strongest middle-joint part."""
        e = self.kernel[8:]
        _, _, vt = np.linalg.svd(e)
        k = self.kernel @ vt[0]
        return ParamLinearForm(np.stack([k[:8], k[8:]]), self.middle)

    def form_at(self, x) -> ParamLinearForm:
        """Kernel element maximizing the middle-joint coefficient at the point x."""
        x = np.asarray(x, dtype=float)
        h = self.kernel[8:].T @ x
        if not np.any(h):
            return self.form
        k = self.kernel @ (h / np.linalg.norm(h))
        return ParamLinearForm(np.stack([k[:8], k[8:]]), self.middle)

    def solve(self, x) -> Tuple[float, float]:
        """Middle-joint value at a point; returns (value, relative coefficient size)."""
        x = np.asarray(x, dtype=float)
        f = self.form_at(x)
        c0, c1 = f.coeffs[0] @ x, f.coeffs[1] @ x
        rel = abs(c1) / (np.linalg.norm(f.coeffs[1]) * np.linalg.norm(x) + 1e-300)
        return (-float(c0 / c1) if c1 != 0 else float("nan")), float(rel)


def middle_joint_system(chain: ChainSpec, side: str = "left", ee=None) -> MiddleJointSystem:
    """Build B from the workspace Study parameters and a generic form in v2 (or v5).

    Raises NoParametrizedKernel when every kernel element has zero
    middle-joint part.
    """
    if side == "left":
        names = ("q1", "q2", "q3")
        ws = left_poly(chain, names)
        middle = "q2"
    else:
        if ee is None:
            raise ValueError("the right workspace needs the end-effector pose")
        e = np.asarray(ee.coords if hasattr(ee, "coords") else ee, dtype=float)
        names = ("q4", "q5", "q6")
        ws = right_poly(chain, e, names)
        middle = "q5"
    mi = ws.variables.index(middle)
    shift = tuple(1 if i == mi else 0 for i in range(len(ws.variables)))
    rows: Dict[Tuple[int, ...], np.ndarray] = {}
    for mono, c in ws.terms.items():
        rows.setdefault(mono, np.zeros(16))[:8] += c
        up = tuple(a + b for a, b in zip(mono, shift))
        rows.setdefault(up, np.zeros(16))[8:] += c
    monos = tuple(sorted(m for m, r in rows.items() if np.any(r)))
    B = np.array([rows[m] for m in monos])
    kernel = null_space(B, rcond=RANK_RCOND)
    if kernel.size == 0 or np.max(np.abs(kernel[8:])) <= RANK_RCOND:
        raise NoParametrizedKernel(f"no kernel element of B depends on the {side} middle joint")
    return MiddleJointSystem(B=B, monomials=monos, variables=ws.variables, middle=middle, kernel=kernel)


def middle_joint_form(side: str, chain: ChainSpec, ee=None) -> ParamLinearForm:
    return middle_joint_system(chain, side, ee).form
