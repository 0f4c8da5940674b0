"""DH chains, joint displacements and forward kinematics.

Every joint displacement is ``sigma_i = Rz(v_i) Tz(d_i) Tx(a_i) Rx(l_i)`` with
the half-angle tangents ``v = tan(theta/2)``, ``l = tan(alpha/2)``.  Rotations
use the unnormalized representatives ``1 + v k`` and ``1 + l i``, so each
sigma_i is affine in its joint variable and the norm of sigma_i is
``(1 + v^2)(1 + l^2)`` instead of 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .dualquat import DualQuaternion, StudyPoint, dqconj_arr, dqmul_arr
from .errors import NormalizationError, SchemaError

SUPPORTED_PATTERNS = ("RRPRRR", "RRPPRR", "RRRPRR", "RRRRRR")
PATTERN_NAMES = {"RRPRRR": "2RP3R", "RRPPRR": "2R2P2R", "RRRPRR": "3RP2R", "RRRRRR": "6R"}


class JointType(enum.Enum):
    REVOLUTE = "R"
    PRISMATIC = "P"


# ---------------------------------------------------------------------------
# elementary displacements (unnormalized, coordinates as 8-arrays)
# ---------------------------------------------------------------------------

def rz(v: float) -> np.ndarray:
    return np.array([1.0, 0, 0, v, 0, 0, 0, 0])


def rx(l: float) -> np.ndarray:
    return np.array([1.0, l, 0, 0, 0, 0, 0, 0])


def tz(d: float) -> np.ndarray:
    return np.array([1.0, 0, 0, 0, 0, 0, 0, d / 2])


def tx(a: float) -> np.ndarray:
    return np.array([1.0, 0, 0, 0, 0, a / 2, 0, 0])


def product(*factors) -> np.ndarray:
    out = np.array([1.0, 0, 0, 0, 0, 0, 0, 0])
    for f in factors:
        out = dqmul_arr(out, f)
    return out


# ---------------------------------------------------------------------------
# polynomial dual quaternions
# ---------------------------------------------------------------------------

class PolyDQ:
    """Dual quaternion whose 8 coordinates are polynomials in named variables.

    Stored sparsely as ``{exponent tuple: 8-array}``; the exponent tuple is
    aligned with ``variables``.
    """

    def __init__(self, terms, variables: Sequence[str] = ()):
        self.variables = tuple(variables)
        self.terms: Dict[Tuple[int, ...], np.ndarray] = {}
        for mono, c in dict(terms).items():
            mono = tuple(mono)
            if len(mono) != len(self.variables):
                raise ValueError("monomial length does not match variables")
            c = np.asarray(c, dtype=float)
            if mono in self.terms:
                self.terms[mono] = self.terms[mono] + c
            else:
                self.terms[mono] = c.copy()

    @classmethod
    def constant(cls, c) -> "PolyDQ":
        return cls({(): np.asarray(c, dtype=float)}, ())

    @classmethod
    def affine(cls, var: str, c0, c1) -> "PolyDQ":
        return cls({(0,): c0, (1,): c1}, (var,))

    def _lift(self, variables):
        idx = [variables.index(v) for v in self.variables]
        out = {}
        for mono, c in self.terms.items():
            e = [0] * len(variables)
            for i, k in zip(idx, mono):
                e[i] = k
            out[tuple(e)] = c
        return out

    def __mul__(self, other):
        if not isinstance(other, PolyDQ):
            other = PolyDQ.constant(other)
        variables = self.variables + tuple(v for v in other.variables if v not in self.variables)
        a, b = self._lift(variables), other._lift(variables)
        out: Dict[Tuple[int, ...], np.ndarray] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                prod = dqmul_arr(ca, cb)
                out[m] = out[m] + prod if m in out else prod
        return PolyDQ(out, variables)

    def __rmul__(self, other):
        return PolyDQ.constant(other) * self

    def conjugate(self) -> "PolyDQ":
        return PolyDQ({m: dqconj_arr(c) for m, c in self.terms.items()}, self.variables)

    def degree(self, var: str) -> int:
        if var not in self.variables:
            return 0
        i = self.variables.index(var)
        return max((m[i] for m, c in self.terms.items() if np.any(c)), default=0)

    def evaluate(self, values: Dict[str, float] | None = None, **kw) -> np.ndarray:
        values = dict(values or {}, **kw)
        out = np.zeros(8)
        for mono, c in self.terms.items():
            w = 1.0
            for v, k in zip(self.variables, mono):
                if k:
                    w *= values[v] ** k
            out += w * c
        return out

    def univariate(self, var: str) -> np.ndarray:
        """Coefficient array of shape (deg+1, 8), ascending powers of ``var``."""
        others = [v for v in self.variables if v != var]
        if others:
            raise ValueError(f"polynomial also depends on {others}")
        deg = self.degree(var)
        out = np.zeros((deg + 1, 8))
        for mono, c in self.terms.items():
            k = mono[0] if mono else 0
            out[k] += c
        return out


# ---------------------------------------------------------------------------
# chain description
# ---------------------------------------------------------------------------

def _is_half_turn(angle: float, tol: float = 1e-12) -> bool:
    r = math.remainder(angle - math.pi, 2 * math.pi)
    return abs(r) < tol


@dataclass(frozen=True)
class DHRow:
    """One DH row; the joint variable is marked by ``None`` in theta or d.

    Angles are radians.
    """

    joint: JointType
    theta: Optional[float]
    d: Optional[float]
    a: float
    alpha: float
    # degree values as given by the user, kept for lossless output
    theta_deg: Optional[float] = field(default=None, compare=False)
    alpha_deg: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if self.joint is JointType.REVOLUTE:
            if self.theta is not None or self.d is None:
                raise SchemaError("revolute joint needs variable theta and fixed d")
        else:
            if self.d is not None or self.theta is None:
                raise SchemaError("prismatic joint needs variable d and fixed theta")
            if _is_half_turn(self.theta):
                raise SchemaError("fixed theta may not be an odd multiple of 180 degrees")
        if _is_half_turn(self.alpha):
            raise SchemaError("alpha may not be an odd multiple of 180 degrees")

    @property
    def l(self) -> float:
        return math.tan(self.alpha / 2)

    @property
    def v(self) -> Optional[float]:
        return None if self.theta is None else math.tan(self.theta / 2)

    @property
    def revolute(self) -> bool:
        return self.joint is JointType.REVOLUTE

    def constant_tail(self) -> np.ndarray:
        """``Tx(a) Rx(l)``, the part after the z-screw."""
        return dqmul_arr(tx(self.a), rx(self.l))

    def zscrew(self, value: float) -> np.ndarray:
        """``Rz(v) Tz(d)`` with the joint variable set to ``value``."""
        if self.revolute:
            return dqmul_arr(rz(value), tz(self.d))
        return dqmul_arr(rz(self.v), tz(value))

    def zscrew_poly(self, var: str) -> PolyDQ:
        if self.revolute:
            base = tz(self.d)
            return PolyDQ.affine(var, base, dqmul_arr(np.array([0, 0, 0, 1.0, 0, 0, 0, 0]), base))
        r = rz(self.v)
        return PolyDQ.affine(var, r, dqmul_arr(r, np.array([0, 0, 0, 0, 0, 0, 0, 0.5])))


@dataclass(frozen=True)
class ChainSpec:
    rows: Tuple[DHRow, ...]
    name: str = ""

    def __post_init__(self):
        rows = tuple(self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != 6:
            raise SchemaError(f"a chain has exactly 6 rows, got {len(rows)}")
        if self.pattern not in SUPPORTED_PATTERNS:
            raise SchemaError(
                f"joint pattern {self.pattern} not supported; expected one of {', '.join(SUPPORTED_PATTERNS)}")
        r1, r6 = rows[0], rows[5]
        bad = []
        if r1.d != 0.0:
            bad.append("d1")
        if r6.d != 0.0:
            bad.append("d6")
        if r6.a != 0.0:
            bad.append("a6")
        if r6.alpha != 0.0:
            bad.append("alpha6")
        if bad:
            raise NormalizationError(
                f"{', '.join(bad)} must be 0; move these offsets into the base/end-effector frames first")

    @property
    def pattern(self) -> str:
        return "".join(r.joint.value for r in self.rows)

    @property
    def kind(self) -> str:
        return PATTERN_NAMES.get(self.pattern, self.pattern)

    def __getitem__(self, i: int) -> DHRow:
        """1-based row access, matching the DH indices."""
        return self.rows[i - 1]

    def a(self, i: int) -> float:
        return self.rows[i - 1].a

    def l(self, i: int) -> float:
        return self.rows[i - 1].l


def make_chain(rows, name: str = "") -> ChainSpec:
    """Build a chain from ``(type, theta_deg|None, d|None, a, alpha_deg)`` tuples."""
    out = []
    for jt, th, d, a, al in rows:
        out.append(DHRow(JointType(jt), None if th is None else math.radians(th),
                         None if d is None else float(d), float(a), math.radians(al),
                         theta_deg=None if th is None else float(th), alpha_deg=float(al)))
    return ChainSpec(tuple(out), name)


# ---------------------------------------------------------------------------
# joint values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JointVector:
    """Six joint values: half-angle tangents for revolute joints, lengths for prismatic ones."""

    values: Tuple[float, ...]
    pattern: str = field(default="RRRRRR")

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        if len(vals) != 6:
            raise ValueError("a joint vector has 6 entries")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_external(cls, chain: ChainSpec, values: Sequence[float]) -> "JointVector":
        """From degrees (revolute) / lengths (prismatic)."""
        if len(values) != 6:
            raise ValueError("expected 6 joint values")
        out = []
        for row, x in zip(chain.rows, values):
            if row.revolute:
                if _is_half_turn(math.radians(x), 1e-9):
                    raise ValueError("half rotations (odd multiples of 180 degrees) are not representable")
                out.append(math.tan(math.radians(x) / 2))
            else:
                out.append(float(x))
        return cls(tuple(out), chain.pattern)

    def external(self) -> Tuple[float, ...]:
        """Degrees for revolute joints in (-180, 180), lengths for prismatic ones."""
        return tuple(math.degrees(2 * math.atan(x)) if t == "R" else x
                     for t, x in zip(self.pattern, self.values))

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)


# ---------------------------------------------------------------------------
# kinematics
# ---------------------------------------------------------------------------

def sigma_i(row: DHRow, value: float) -> DualQuaternion:
    """Projective displacement ``Rz(v) Tz(d) Tx(a) Rx(l)`` at a joint value."""
    return DualQuaternion.from_coords(sigma_arr(row, value))


def sigma_arr(row: DHRow, value: float) -> np.ndarray:
    return dqmul_arr(row.zscrew(value), row.constant_tail())


def sigma_i_poly(row: DHRow, var: str = "t") -> PolyDQ:
    """sigma_i with coordinates affine in the row's joint variable."""
    return row.zscrew_poly(var) * row.constant_tail()


def _as_values(chain, joints):
    if isinstance(joints, JointVector):
        return joints.values
    vals = tuple(float(x) for x in joints)
    if len(vals) != 6:
        raise ValueError("expected 6 joint values")
    return vals


def forward_arr(chain: ChainSpec, joints) -> np.ndarray:
    vals = _as_values(chain, joints)
    out = sigma_arr(chain.rows[0], vals[0])
    for row, x in zip(chain.rows[1:], vals[1:]):
        out = dqmul_arr(out, sigma_arr(row, x))
    return out


def forward_kinematics(chain: ChainSpec, joints) -> StudyPoint:
    """End-effector Study point ``sigma_1 ... sigma_6`` (internal joint units)."""
    return StudyPoint(forward_arr(chain, joints))


def left_pose_arr(chain: ChainSpec, j1: float, j2: float, j3: float) -> np.ndarray:
    return product(*(sigma_arr(r, x) for r, x in zip(chain.rows[:3], (j1, j2, j3))))


def right_chain_pose(chain: ChainSpec, ee, j4: float, j5: float, j6: float) -> StudyPoint:
    """Frame-4 pose implied by the right chain: ``sigma_E sigma_6* sigma_5* sigma_4*``."""
    e = ee.array() if isinstance(ee, StudyPoint) else np.asarray(ee.coords if isinstance(ee, DualQuaternion) else ee, dtype=float)
    out = e
    for row, x in ((chain[6], j6), (chain[5], j5), (chain[4], j4)):
        out = dqmul_arr(out, dqconj_arr(sigma_arr(row, x)))
    return StudyPoint(out)


def left_poly(chain: ChainSpec, names=("q1", "q2", "q3")) -> PolyDQ:
    """Study parameters of ``sigma_1 sigma_2 sigma_3`` as a polynomial in the three left joints."""
    out = sigma_i_poly(chain[1], names[0])
    for i, n in zip((2, 3), names[1:]):
        out = out * sigma_i_poly(chain[i], n)
    return out


def right_poly(chain: ChainSpec, ee, names=("q4", "q5", "q6")) -> PolyDQ:
    """``sigma_E sigma_6* sigma_5* sigma_4*`` as a polynomial in the three right joints."""
    e = ee.array() if isinstance(ee, StudyPoint) else np.asarray(ee, dtype=float)
    out = PolyDQ.constant(e)
    for i, n in ((6, names[2]), (5, names[1]), (4, names[0])):
        out = out * sigma_i_poly(chain[i], n).conjugate()
    return out
