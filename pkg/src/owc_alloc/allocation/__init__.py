"""Joint (access point, wavelength, branch) allocation."""

from owc_alloc.allocation.milp import build_milp, export_milp, write_milp
from owc_alloc.allocation.solver import (
    BRUTEFORCE_LIMIT,
    SinrKernel,
    check_assignment,
    evaluate_assignment,
    solve_bruteforce,
    solve_exact,
)

__all__ = [
    "BRUTEFORCE_LIMIT",
    "SinrKernel",
    "build_milp",
    "check_assignment",
    "evaluate_assignment",
    "export_milp",
    "solve_bruteforce",
    "solve_exact",
    "write_milp",
]
