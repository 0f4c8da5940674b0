"""Chain files, pose strings and solution reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .chain import ChainSpec, DHRow, JointType
from .dualquat import StudyPoint, from_matrix, study_residual
from .errors import NotOnStudyQuadric, SchemaError
from .solver import SolveResult, project_to_study

FREE = "*"
ROW_FIELDS = ("type", "theta_deg", "d", "a", "alpha_deg")


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------

def _number(value, row: int, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", row=row, field=name)
    if not math.isfinite(value):
        raise SchemaError("value must be finite", row=row, field=name)
    return float(value)


def _row_from_dict(obj, row: int) -> DHRow:
    if not isinstance(obj, dict):
        raise SchemaError("each joint must be an object", row=row)
    missing = [k for k in ROW_FIELDS if k not in obj]
    if missing:
        raise SchemaError(f"missing {', '.join(missing)}", row=row, field=missing[0])
    extra = sorted(set(obj) - set(ROW_FIELDS))
    if extra:
        raise SchemaError("unknown field", row=row, field=extra[0])
    jt = obj["type"]
    if jt not in ("R", "P"):
        raise SchemaError(f"type must be 'R' or 'P', got {jt!r}", row=row, field="type")
    th, d = obj["theta_deg"], obj["d"]
    if th == FREE and d == FREE:
        raise SchemaError("only one of theta_deg and d may be '*'", row=row, field="theta_deg")
    if jt == "R" and th != FREE:
        raise SchemaError("a revolute joint needs theta_deg = '*'", row=row, field="theta_deg")
    if jt == "P" and d != FREE:
        raise SchemaError("a prismatic joint needs d = '*'", row=row, field="d")
    theta_deg = None if th == FREE else _number(th, row, "theta_deg")
    d_val = None if d == FREE else _number(d, row, "d")
    a = _number(obj["a"], row, "a")
    alpha_deg = _number(obj["alpha_deg"], row, "alpha_deg")
    try:
        return DHRow(JointType(jt), None if theta_deg is None else math.radians(theta_deg), d_val, a,
                     math.radians(alpha_deg), theta_deg=theta_deg, alpha_deg=alpha_deg)
    except SchemaError as exc:
        raise SchemaError(str(exc), row=row) from None


def chain_from_dict(doc) -> ChainSpec:
    if not isinstance(doc, dict) or "joints" not in doc:
        raise SchemaError("a chain file is an object with a 'joints' list")
    joints = doc["joints"]
    if not isinstance(joints, list) or len(joints) != 6:
        raise SchemaError(f"'joints' must list exactly 6 rows, got {len(joints) if isinstance(joints, list) else joints!r}")
    rows = tuple(_row_from_dict(obj, i + 1) for i, obj in enumerate(joints))
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("'name' must be a string", field="name")
    return ChainSpec(rows, name)


def parse_chain(path) -> ChainSpec:
    """Read and validate a chain JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    return chain_from_dict(doc)


def _deg(rad: Optional[float], given: Optional[float]):
    if rad is None:
        return FREE
    return given if given is not None else math.degrees(rad)


def chain_to_dict(chain: ChainSpec) -> dict:
    joints = []
    for r in chain.rows:
        joints.append({
            "type": r.joint.value,
            "theta_deg": _deg(r.theta, r.theta_deg),
            "d": FREE if r.d is None else r.d,
            "a": r.a,
            "alpha_deg": r.alpha_deg if r.alpha_deg is not None else math.degrees(r.alpha),
        })
    doc = {"joints": joints}
    if chain.name:
        doc["name"] = chain.name
    return doc


def emit_chain(chain: ChainSpec, path=None) -> str:
    text = json.dumps(chain_to_dict(chain), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------------------
# poses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoseInput:
    point: StudyPoint
    residual: float
    correction: float
    raw: tuple


def _floats(arg) -> List[float]:
    if isinstance(arg, str):
        parts = [p for p in arg.replace(";", ",").replace(" ", ",").split(",") if p]
        try:
            return [float(p) for p in parts]
        except ValueError as exc:
            raise SchemaError(f"bad number in pose: {exc}") from None
    return [float(x) for x in arg]


def parse_pose(arg, tol: float = 1e-3) -> PoseInput:
    """An 8-tuple of Study parameters or a row-major 3x4 / 4x4 homogeneous matrix.

    Small Study-quadric violations are repaired by projecting the y-part
    orthogonally to the x-part; the size of that repair is reported.
    """
    vals = _floats(arg)
    if len(vals) == 8:
        c = np.array(vals)
    elif len(vals) in (12, 16):
        m = np.array(vals).reshape(-1, 4)
        if m.shape[0] == 3:
            m = np.vstack([m, [0, 0, 0, 1]])
        c = from_matrix(m).coords
    else:
        raise SchemaError(f"a pose has 8, 12 or 16 numbers, got {len(vals)}")
    if not np.any(c[:4]):
        raise NotOnStudyQuadric("the primal part x0..x3 is zero")
    res = study_residual(c)
    if res > tol:
        raise NotOnStudyQuadric(f"Study residual {res:.3g} exceeds tolerance {tol:g}")
    fixed, corr = project_to_study(c)
    return PoseInput(StudyPoint(fixed), res, corr, tuple(vals))


def format_pose(c, digits: int = 9) -> str:
    return ",".join(f"{x:.{digits}g}" for x in np.asarray(c, dtype=float))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def joint_labels(chain: ChainSpec) -> List[str]:
    return [("theta" if t == "R" else "d") + str(i + 1) for i, t in enumerate(chain.pattern)]


def report_dict(chain: ChainSpec, result: SolveResult, pose: Optional[PoseInput] = None,
                timing: bool = True) -> dict:
    labels = joint_labels(chain)
    sols = []
    for s in result.solutions:
        ext = s.external
        sols.append({"joints": {k: float(v) for k, v in zip(labels, ext)},
                     "values": [float(v) for v in ext],
                     "residual": float(s.residual)})
    meta = {
        "chain": chain.name,
        "pattern": chain.pattern,
        "families": "/".join(result.families),
        "subset": list(result.subset),
        "f_degrees": list(result.f_degrees),
        "g_degrees": list(result.g_degrees),
        "resultant_degree": result.resultant_degree,
        "resultant_real_roots": len(result.resultant_roots),
        "solution_count": len(sols),
        "pose_correction": pose.correction if pose is not None else result.pose_correction,
    }
    if pose is not None:
        meta["pose_residual"] = pose.residual
    if result.note:
        meta["note"] = result.note
    if timing:
        meta["seconds"] = round(result.elapsed, 6)
    return {"solutions": sols, "meta": meta}


def report_json(chain, result, pose=None, timing: bool = True) -> str:
    return json.dumps(report_dict(chain, result, pose, timing), indent=2, sort_keys=True) + "\n"


def report_table(chain: ChainSpec, result: SolveResult) -> str:
    labels = joint_labels(chain)
    head = ["#"] + [lab + ("(deg)" if lab.startswith("theta") else "") for lab in labels] + ["residual"]
    lines = []
    for k, s in enumerate(result.solutions, 1):
        cells = [str(k)] + [f"{v:.6g}" for v in s.external] + [f"{s.residual:.2e}"]
        lines.append(cells)
    widths = [max(len(h), *(len(r[i]) for r in lines)) if lines else len(h) for i, h in enumerate(head)]
    out = ["  ".join(h.rjust(w) for h, w in zip(head, widths))]
    out += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in lines]
    out.append(f"{len(lines)} real solution(s); families {'/'.join(result.families)}; "
               f"resultant degree {result.resultant_degree}; {result.elapsed:.3f} s")
    if result.note:
        out.append(result.note)
    return "\n".join(out) + "\n"
