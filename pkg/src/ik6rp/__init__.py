"""Analytic inverse kinematics for six-joint serial chains via the Study quadric."""

from .chain import ChainSpec, DHRow, JointType, JointVector, forward_arr, forward_kinematics, make_chain
from .dualquat import DualQuaternion, Quaternion, StudyPoint, from_matrix, to_matrix
from .errors import IKError
from .io import parse_chain, parse_pose
from .solver import IKSolution, SolverOptions, solve_ik, solve_ik_report

__all__ = [
    "ChainSpec", "DHRow", "JointType", "JointVector", "forward_arr", "forward_kinematics", "make_chain",
    "DualQuaternion", "Quaternion", "StudyPoint", "from_matrix", "to_matrix", "IKError",
    "parse_chain", "parse_pose", "IKSolution", "SolverOptions", "solve_ik", "solve_ik_report",
]
