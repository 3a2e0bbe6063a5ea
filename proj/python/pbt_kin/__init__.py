"""Kinematics, collision-aware IK and workspace analysis for PBT joint chains."""

from ._pbt_kin import (
    Box,
    Chain,
    Hull,
    Scenario,
    Sphere,
    catalog,
    chain_capsules,
    clearance,
    compare_modes,
    connectivity,
    extension_length,
    fk,
    fk_closed_form,
    ik,
    jacobian,
    load_scenario,
    manipulability,
    motor_to_joint,
    sample_workspace,
    solve,
)

__all__ = [
    "Box",
    "Chain",
    "Hull",
    "Scenario",
    "Sphere",
    "catalog",
    "chain_capsules",
    "clearance",
    "compare_modes",
    "connectivity",
    "extension_length",
    "fk",
    "fk_closed_form",
    "ik",
    "jacobian",
    "load_scenario",
    "manipulability",
    "motor_to_joint",
    "sample_workspace",
    "solve",
]
