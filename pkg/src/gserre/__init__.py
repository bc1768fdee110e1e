"""Exact combinatorics of generalized Serre conditions and their perversities.

The package models the lattice of depth functions ``rho`` (slope at most one,
``rho(0) = 0``), standard numerical perversities, finite depth-poset models of
equidimensional schemes, the strictly-``S_rho`` example family, and a
certificate checker for ``S_rho``-extension and finite ``S_rho``-ification.
"""

from .errors import InvariantViolation
from .rho_calculus import (
    TailedFunction,
    dual,
    enumerate_w,
    enumerate_wprime,
    identity,
    in_W,
    in_Wprime,
    inclination,
    join,
    meet,
    rho_r,
    zero,
)
from .perversity_calculus import (
    NumericalPerversity,
    dual_by_conjugation,
    enumerate_Pn_rho,
    exists_pi_plus_eq_rho,
    in_Pn,
    in_Pn_rho,
    numerical_dual,
    p_rho_criterion,
    phi,
    phi_inverse,
    pi_max,
    pi_min,
    pi_plus,
)
from .verdict import Status, Verdict, Violation

__version__ = "0.1.0"

__all__ = [
    "InvariantViolation",
    "NumericalPerversity",
    "Status",
    "TailedFunction",
    "Verdict",
    "Violation",
    "dual",
    "dual_by_conjugation",
    "enumerate_Pn_rho",
    "enumerate_w",
    "enumerate_wprime",
    "exists_pi_plus_eq_rho",
    "identity",
    "in_Pn",
    "in_Pn_rho",
    "in_W",
    "in_Wprime",
    "inclination",
    "join",
    "meet",
    "numerical_dual",
    "p_rho_criterion",
    "phi",
    "phi_inverse",
    "pi_max",
    "pi_min",
    "pi_plus",
    "rho_r",
    "zero",
]
