"""Quaternions, dual quaternions and Study parameters.

Coordinates of a dual quaternion ``p + eps*q`` are always stored in the
order ``(x0, x1, x2, x3, y0, y1, y2, y3) = (p0, p1, p2, p3, q0, q1, q2, q3)``.
A rigid motion with rotation ``p`` and translation ``t`` is ``p + eps*(t p)/2``.

The value types are small frozen dataclasses.  The solver works on raw
8-vectors and the 8x8 multiplication matrices, which are exposed here as
``left_matrix`` / ``right_matrix``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadAxis, NotInvertible, NotRigid, ZeroPoint

IDENTITY_TOL = 1e-10
MEMBERSHIP_TOL = 1e-8


# ---------------------------------------------------------------------------
# raw array kernels
# ---------------------------------------------------------------------------

def qmul_arr(a, b):
    """Hamilton product of two quaternions given as length-4 arrays."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.array([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ])


def qconj_arr(a):
    return np.array([a[0], -a[1], -a[2], -a[3]])


def dqmul_arr(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p, q = a[:4], a[4:]
    s, t = b[:4], b[4:]
    return np.concatenate([qmul_arr(p, s), qmul_arr(p, t) + qmul_arr(q, s)])


def dqconj_arr(a):
    a = np.asarray(a, dtype=float)
    return np.concatenate([qconj_arr(a[:4]), qconj_arr(a[4:])])


def _qleft(p):
    p0, p1, p2, p3 = p
    return np.array([
        [p0, -p1, -p2, -p3],
        [p1, p0, -p3, p2],
        [p2, p3, p0, -p1],
        [p3, -p2, p1, p0],
    ])


def _qright(q):
    q0, q1, q2, q3 = q
    return np.array([
        [q0, -q1, -q2, -q3],
        [q1, q0, q3, -q2],
        [q2, -q3, q0, q1],
        [q3, q2, -q1, q0],
    ])


def left_matrix(a):
    """8x8 matrix ``L`` with ``coords(a*x) = L @ coords(x)``."""
    a = np.asarray(a, dtype=float)
    lp, lq = _qleft(a[:4]), _qleft(a[4:])
    out = np.zeros((8, 8))
    out[:4, :4] = lp
    out[4:, :4] = lq
    out[4:, 4:] = lp
    return out


def right_matrix(b):
    """8x8 matrix ``R`` with ``coords(x*b) = R @ coords(x)``."""
    b = np.asarray(b, dtype=float)
    rs, rt = _qright(b[:4]), _qright(b[4:])
    out = np.zeros((8, 8))
    out[:4, :4] = rs
    out[4:, :4] = rt
    out[4:, 4:] = rs
    return out


def study_form(a, b=None):
    """Polar form of the Study quadric; ``study_form(x)`` is sum x_i y_i."""
    a = np.asarray(a)
    if b is None:
        return float(a[:4] @ a[4:])
    b = np.asarray(b)
    return 0.5 * float(a[:4] @ b[4:] + b[:4] @ a[4:])


# Gram matrix of the Study quadric in coordinates: x^T Q x = 2 * sum x_i y_i
STUDY_GRAM = np.block([[np.zeros((4, 4)), np.eye(4)], [np.eye(4), np.zeros((4, 4))]])


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        return cls(*(float(v) for v in a))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __add__(self, other):
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other):
        return Quaternion.from_array(self.as_array() - other.as_array())

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return Quaternion.from_array(self.as_array() * float(other))

    def __rmul__(self, other):
        return Quaternion.from_array(self.as_array() * float(other))


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """``p0 q0 - p.q + (p0 q + q0 p + p x q)``."""
    pv, qv = p.vector, q.vector
    scalar = p.w * q.w - float(pv @ qv)
    vec = p.w * qv + q.w * pv + np.cross(pv, qv)
    return Quaternion(scalar, *vec)


@dataclass(frozen=True)
class DualQuaternion:
    primal: Quaternion
    dual: Quaternion = Quaternion(0.0)

    @classmethod
    def from_coords(cls, c: Sequence[float]) -> "DualQuaternion":
        c = np.asarray(c, dtype=float)
        if c.shape != (8,):
            raise ValueError(f"expected 8 coordinates, got shape {c.shape}")
        return cls(Quaternion.from_array(c[:4]), Quaternion.from_array(c[4:]))

    @classmethod
    def identity(cls) -> "DualQuaternion":
        return cls(Quaternion(1.0))

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate([self.primal.as_array(), self.dual.as_array()])

    def conjugate(self) -> "DualQuaternion":
        return dq_conjugate(self)

    def study_value(self) -> float:
        """p0 q0 + p.q (zero on the Study quadric)."""
        return study_form(self.coords)

    def in_ds(self, tol: float = MEMBERSHIP_TOL) -> bool:
        c = self.coords
        scale = float(np.max(np.abs(c)))
        if scale == 0.0 or self.primal.norm2() <= (tol * scale) ** 2:
            return False
        return abs(self.study_value()) <= tol * scale * scale

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            return dq_mul(self, other)
        return DualQuaternion.from_coords(self.coords * float(other))

    def __add__(self, other):
        return DualQuaternion.from_coords(self.coords + other.coords)

    def __sub__(self, other):
        return DualQuaternion.from_coords(self.coords - other.coords)

    def allclose(self, other, tol: float = IDENTITY_TOL) -> bool:
        a, b = self.coords, other.coords
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        return bool(np.max(np.abs(a - b)) <= tol * scale)


def dq_mul(a: DualQuaternion, b: DualQuaternion) -> DualQuaternion:
    """``(p + eps q)(s + eps t) = ps + eps (pt + qs)``."""
    return DualQuaternion(
        quat_mul(a.primal, b.primal),
        quat_mul(a.primal, b.dual) + quat_mul(a.dual, b.primal),
    )


def dq_conjugate(s: DualQuaternion) -> DualQuaternion:
    return DualQuaternion(s.primal.conjugate(), s.dual.conjugate())


def dq_inverse(s: DualQuaternion, tol: float = MEMBERSHIP_TOL) -> DualQuaternion:
    """Group inverse ``s* / (s s*)`` of an element of D_s.

    Raises NotInvertible when the primal part (nearly) vanishes or the
    Study condition fails, since ``s s*`` is then not a positive real.
    """
    c = s.coords
    scale = float(np.max(np.abs(c)))
    n = s.primal.norm2()
    if scale == 0.0 or n <= (tol * scale) ** 2:
        raise NotInvertible("primal part vanishes")
    if abs(s.study_value()) > tol * scale * scale:
        raise NotInvertible(f"Study condition violated (p0q0+p.q = {s.study_value():.3g})")
    return DualQuaternion.from_coords(dqconj_arr(c) / n)


def from_rotation_translation(axis, theta: float, t=(0.0, 0.0, 0.0),
                              tol: float = MEMBERSHIP_TOL) -> DualQuaternion:
    """Unit dual quaternion of the motion ``x -> R(axis, theta) x + t``."""
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > tol:
        raise BadAxis(f"axis must be a unit 3-vector, got {axis!r}")
    p = Quaternion(math.cos(theta / 2), *(math.sin(theta / 2) * n))
    tq = Quaternion(0.0, *np.asarray(t, dtype=float))
    return DualQuaternion(p, quat_mul(tq, p) * 0.5)


def rotation_matrix(p) -> np.ndarray:
    """Rotation matrix of a (not necessarily unit) quaternion array."""
    w, x, y, z = np.asarray(p, dtype=float) / np.linalg.norm(p)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def _translation(c) -> np.ndarray:
    p, q = c[:4], c[4:]
    return 2.0 * qmul_arr(q, qconj_arr(p))[1:] / float(p @ p)


def to_matrix(s) -> np.ndarray:
    """4x4 homogeneous transform of a dual quaternion (any nonzero scale)."""
    c = s.coords if isinstance(s, (DualQuaternion, StudyPoint)) else np.asarray(s, dtype=float)
    if not np.any(c[:4]):
        raise NotInvertible("primal part vanishes; not a rigid motion")
    m = np.eye(4)
    m[:3, :3] = rotation_matrix(c[:4])
    m[:3, 3] = _translation(c)
    return m


def _quat_from_rotation(r: np.ndarray) -> np.ndarray:
    # Shepperd: pivot on the largest diagonal combination
    tr = np.trace(r)
    cands = [tr, r[0, 0], r[1, 1], r[2, 2]]
    k = int(np.argmax(cands))
    if k == 0:
        s = math.sqrt(1.0 + tr) * 2
        q = [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
    elif k == 1:
        s = math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2
        q = [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s]
    elif k == 2:
        s = math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2
        q = [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s]
    else:
        s = math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2
        q = [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s]
    return np.array(q)


def from_matrix(m, tol: float = MEMBERSHIP_TOL) -> DualQuaternion:
    """Unit dual quaternion of a 4x4 (or 3x4) homogeneous transform."""
    m = np.asarray(m, dtype=float)
    if m.shape not in ((4, 4), (3, 4)):
        raise NotRigid(f"expected a 3x4 or 4x4 matrix, got shape {m.shape}")
    if m.shape == (4, 4) and not np.allclose(m[3], [0, 0, 0, 1], atol=tol):
        raise NotRigid("last row of a homogeneous transform must be (0, 0, 0, 1)")
    r, t = m[:3, :3], m[:3, 3]
    if np.max(np.abs(r.T @ r - np.eye(3))) > tol or np.linalg.det(r) < 0:
        raise NotRigid("rotation block is not a proper orthogonal matrix")
    p = _quat_from_rotation(r)
    p /= np.linalg.norm(p)
    q = 0.5 * qmul_arr(np.concatenate([[0.0], t]), p)
    return DualQuaternion.from_coords(np.concatenate([p, q]))


def act_on_point(s: DualQuaternion, x) -> np.ndarray:
    """Image of a 3-point under ``s`` computed in the dual-quaternion algebra.

    Uses ``s (1 + eps x) s~`` with ``s~ = p* - eps q*``; the result is
    ``|p|^2 (1 + eps x')``.
    """
    c = s.coords
    pt = np.concatenate([[1.0, 0.0, 0.0, 0.0], [0.0], np.asarray(x, dtype=float)])
    tilde = np.concatenate([qconj_arr(c[:4]), -qconj_arr(c[4:])])
    img = dqmul_arr(dqmul_arr(c, pt), tilde)
    return img[5:] / img[0]


# ---------------------------------------------------------------------------
# Study points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StudyPoint:
    """Homogeneous Study parameters ``(x0:x1:x2:x3:y0:y1:y2:y3)``."""

    coords: tuple

    def __init__(self, coords: Iterable[float]):
        c = tuple(float(v) for v in coords)
        if len(c) != 8:
            raise ValueError(f"a Study point has 8 coordinates, got {len(c)}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_dq(cls, s: DualQuaternion) -> "StudyPoint":
        return cls(s.coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords)

    def to_dq(self) -> DualQuaternion:
        return DualQuaternion.from_coords(self.coords)

    def canonical(self) -> "StudyPoint":
        """Representative whose largest-magnitude coordinate equals +1."""
        return StudyPoint(canonicalize(self.array()))

    def is_rigid(self, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.to_dq().in_ds(tol)


def canonicalize(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    k = int(np.argmax(np.abs(c)))
    if c[k] == 0.0:
        raise ZeroPoint("all coordinates are zero")
    return c / c[k]


def study_residual(s) -> float:
    """Scale-invariant Study residual ``|sum x_i y_i| / max|coord|^2``."""
    c = s.array() if isinstance(s, StudyPoint) else np.asarray(s, dtype=float)
    m = float(np.max(np.abs(c)))
    if m == 0.0:
        raise ZeroPoint("all coordinates are zero")
    return abs(float(c[:4] @ c[4:])) / (m * m)


def projective_distance(a, b) -> float:
    """Distance between two points of P^7 after unit scaling and sign alignment."""
    a = np.asarray(a.coords if isinstance(a, (StudyPoint, DualQuaternion)) else a, dtype=float)
    b = np.asarray(b.coords if isinstance(b, (StudyPoint, DualQuaternion)) else b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    if a @ b < 0:
        b = -b
    return float(np.max(np.abs(a - b)))
