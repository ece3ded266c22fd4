"""CPLEX LP export of the allocation problem.

The sum-of-SINR objective is a sum of ratios and has no exact linear form. The
exported model keeps the assignment constraints exactly and replaces the
objective with a surrogate: received signal current minus the interference
current of every co-wavelength pair of users on different access points. The
pair terms are products of assignment binaries, linearised through ``z``
variables.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import structlog

from owc_alloc.allocation.solver import SinrKernel
from owc_alloc.models.allocation import AllocationProblem

logger = structlog.get_logger(__name__)

# photocurrents are written in µA so coefficients stay readable
_CURRENT_SCALE = 1e6

_TERMS_PER_LINE = 8

Term = Tuple[float, str]


def _format_terms(terms: Sequence[Term]) -> str:
    parts: List[str] = []
    for i, (coef, name) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        magnitude = abs(coef)
        body = name if magnitude == 1.0 else f"{magnitude:.9g} {name}"
        if i == 0:
            parts.append(f"- {body}" if sign == "-" else body)
        else:
            parts.append(f"{sign} {body}")
    lines = [
        " ".join(parts[start : start + _TERMS_PER_LINE])
        for start in range(0, len(parts), _TERMS_PER_LINE)
    ]
    return "\n   ".join(lines)


@dataclass
class LinearProgram:
    """A binary program rendered in CPLEX LP format.

    Attributes:
        header: comment lines written before the model
        objective: objective row name → terms (maximised)
        constraints: row name → (terms, sense, right-hand side)
        binary: variable names declared binary, in declaration order
    """

    header: List[str] = field(default_factory=list)
    objective: Dict[str, List[Term]] = field(default_factory=dict)
    constraints: Dict[str, Tuple[List[Term], str, float]] = field(default_factory=dict)
    binary: Dict[str, None] = field(default_factory=dict)

    def add_binary(self, name: str) -> str:
        self.binary[name] = None
        return name

    def add_constraint(self, name: str, terms: List[Term], sense: str, rhs: float) -> None:
        if name in self.constraints:
            raise ValueError(f"duplicate constraint {name}")
        self.constraints[name] = (terms, sense, rhs)

    def __str__(self) -> str:
        output = "".join(f"\\ {line}\n" for line in self.header)
        output += "Maximize\n"
        for name, terms in self.objective.items():
            if not terms and self.binary:
                # an all-zero objective still has to name a variable
                terms = [(0.0, next(iter(self.binary)))]
            output += f" {name}: {_format_terms(terms) if terms else '0'}\n"
        output += "Subject To\n"
        for name, (terms, sense, rhs) in self.constraints.items():
            output += f" {name}: {_format_terms(terms)} {sense} {rhs:g}\n"
        if self.binary:
            output += "Binary\n"
            for variable in self.binary:
                output += f" {variable}\n"
        output += "End\n"
        return output


def _x_name(user: int, ap_id: int, label: str, branch: int) -> str:
    return f"x_u{user}_a{ap_id}_{label}_b{branch}"


def build_milp(problem: AllocationProblem) -> LinearProgram:
    """Assignment binaries, constraints and the linear surrogate objective."""
    kernel = SinrKernel(problem)
    ap_ids = problem.ap_ids
    labels = [w.label for w in problem.wavelengths]
    n_users, n_branches = problem.n_users, problem.n_branches
    n_aps, n_wavelengths = problem.n_aps, problem.n_wavelengths

    lp = LinearProgram(
        header=[
            "WDMA resource allocation, CPLEX LP format.",
            "Objective is a linear SURROGATE for the sum of SINRs: signal photocurrent",
            "minus pairwise co-wavelength interference photocurrent (uA). Constraints",
            "are exact: one (AP, wavelength, branch) per user, one user per",
            "(AP, wavelength).",
            f"users={n_users} aps={n_aps} wavelengths={n_wavelengths} branches={n_branches}",
        ]
    )

    x: Dict[Tuple[int, int, int, int], str] = {}
    objective: List[Term] = []
    for u in range(n_users):
        for a in range(n_aps):
            for w in range(n_wavelengths):
                for b in range(n_branches):
                    name = lp.add_binary(_x_name(u + 1, ap_ids[a], labels[w], b + 1))
                    x[(u, a, w, b)] = name
                    coef = kernel.current[u][b][a][w] * _CURRENT_SCALE
                    if coef != 0.0:
                        objective.append((coef, name))

    for u in range(n_users):
        terms = [
            (1.0, x[(u, a, w, b)])
            for a in range(n_aps)
            for w in range(n_wavelengths)
            for b in range(n_branches)
        ]
        lp.add_constraint(f"assign_u{u + 1}", terms, "=", 1)
    for a in range(n_aps):
        for w in range(n_wavelengths):
            terms = [(1.0, x[(u, a, w, b)]) for u in range(n_users) for b in range(n_branches)]
            lp.add_constraint(f"slot_a{ap_ids[a]}_{labels[w]}", terms, "<=", 1)

    # branch each user would pick on (a, w) if it were alone
    best_branch = {
        (u, a, w): max(range(n_branches), key=lambda b, u=u, a=a, w=w: kernel.current[u][b][a][w])
        for u in range(n_users)
        for a in range(n_aps)
        for w in range(n_wavelengths)
    }

    pairs = 0
    for u in range(n_users):
        for v in range(u + 1, n_users):
            for w in range(n_wavelengths):
                for a in range(n_aps):
                    for a2 in range(n_aps):
                        if a == a2:
                            continue
                        hit_u = kernel.current[u][best_branch[(u, a, w)]][a2][w]
                        hit_v = kernel.current[v][best_branch[(v, a2, w)]][a][w]
                        coef = (hit_u + hit_v) * _CURRENT_SCALE
                        if coef == 0.0:
                            continue
                        z = lp.add_binary(
                            f"z_u{u + 1}_v{v + 1}_a{ap_ids[a]}_a{ap_ids[a2]}_{labels[w]}"
                        )
                        on_u = [(-1.0, x[(u, a, w, b)]) for b in range(n_branches)]
                        on_v = [(-1.0, x[(v, a2, w, b)]) for b in range(n_branches)]
                        suffix = z[2:]
                        lp.add_constraint(f"zlo_{suffix}", [(1.0, z)] + on_u + on_v, ">=", -1)
                        lp.add_constraint(f"zu_{suffix}", [(1.0, z)] + on_u, "<=", 0)
                        lp.add_constraint(f"zv_{suffix}", [(1.0, z)] + on_v, "<=", 0)
                        objective.append((-coef, z))
                        pairs += 1

    lp.objective["sinr_surrogate"] = objective
    logger.info(
        "milp_built",
        binaries=n_users * n_aps * n_wavelengths * n_branches,
        pair_variables=pairs,
        constraints=len(lp.constraints),
    )
    return lp


def export_milp(problem: AllocationProblem) -> str:
    """The allocation problem as CPLEX LP text."""
    return str(build_milp(problem))


def write_milp(problem: AllocationProblem, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(export_milp(problem), encoding="utf-8")
    logger.info("milp_written", path=str(path))
    return path
