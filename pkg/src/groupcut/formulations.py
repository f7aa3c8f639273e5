"""Binary linear program and quadratic-assignment exports, with a witness checker.

Both grouping models can be written as binary linear programs over
assignment variables ``x_i_k`` (item i in group k) and pair variables
``y_i_j`` (items i < j share a group), linked by two-sided big-M rows with
M equal to the group count.  The fixed-size model additionally pins each
group's size; the variable-size model introduces selector variables
``u_s_k`` (group k has exactly s members).  The fixed-size model also
reduces to a quadratic assignment instance whose cost matrix is a block
diagonal of all-ones squares, one block per group.

The witness checker evaluates every constraint of a formulation at the
variable values induced by a partition, which verifies the emitted models
without invoking a solver.  By construction the fixed-model objective counts
each pair twice, so its value is exactly two times the partition cost; the
variable-model objective counts each pair once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DistanceMatrix,
    FixedSizes,
    GroupSpec,
    Partition,
    VariableCount,
    check_spec,
)

__all__ = [
    "LinearConstraint",
    "Formulation",
    "FormulationWitness",
    "WitnessReport",
    "QapInstance",
    "build_blp_fixed",
    "build_blp_variable",
    "export_blp_fixed",
    "export_blp_variable",
    "parse_lp",
    "qap_instance",
    "export_qap",
    "read_qaplib",
    "qap_cost",
    "partition_from_permutation",
    "witness_from_partition",
    "check_witness",
]


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=", ">=", or "="
    rhs: float


@dataclass
class Formulation:
    """A named objective plus constraint rows over binary variables."""

    objective: dict[str, float]
    constraints: list[LinearConstraint]
    binaries: list[str]

    def variable_counts(self) -> dict[str, int]:
        counts = {"x": 0, "y": 0, "u": 0}
        for name in self.binaries:
            counts[name.split("_", 1)[0]] += 1
        return counts

    def to_lp(self) -> str:
        """Render in LP file syntax (Minimize / Subject To / Binaries / End)."""
        lines = ["Minimize"]
        lines.append(" obj: " + _render_terms(self.objective))
        lines.append("Subject To")
        for con in self.constraints:
            sense = con.sense if con.sense != "=" else "="
            lines.append(f" {con.name}: {_render_terms(con.coeffs)} {sense} {_num(con.rhs)}")
        lines.append("Binaries")
        for name in self.binaries:
            lines.append(f" {name}")
        lines.append("End")
        return "\n".join(lines) + "\n"


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _render_terms(coeffs: dict[str, float]) -> str:
    parts: list[str] = []
    for name, coef in coeffs.items():
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        term = name if mag == 1 else f"{_num(mag)} {name}"
        if not parts:
            parts.append(term if coef > 0 else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    if not parts:
        return "0 " + next(iter(coeffs), "one")
    return " ".join(parts)


def _xname(i: int, k: int) -> str:
    return f"x_{i + 1}_{k + 1}"


def _yname(i: int, j: int) -> str:
    return f"y_{i + 1}_{j + 1}"


def _uname(s: int, k: int) -> str:
    return f"u_{s}_{k + 1}"


def _linking_rows(n: int, p: int) -> list[LinearConstraint]:
    """Two-sided big-M rows tying y_i_j to equal group indices, M = p."""
    rows = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            coeffs: dict[str, float] = {}
            for k in range(p):
                coeffs[_xname(i, k)] = float(k + 1)
            for k in range(p):
                coeffs[_xname(j, k)] = -float(k + 1)
            lo = dict(coeffs)
            lo[_yname(i, j)] = -float(p)
            rows.append(LinearConstraint(f"link_lo_{i + 1}_{j + 1}", lo, ">=", -float(p)))
            hi = dict(coeffs)
            hi[_yname(i, j)] = float(p)
            rows.append(LinearConstraint(f"link_hi_{i + 1}_{j + 1}", hi, "<=", float(p)))
    return rows


def _assignment_rows(n: int, p: int) -> list[LinearConstraint]:
    return [
        LinearConstraint(
            f"assign_{i + 1}", {_xname(i, k): 1.0 for k in range(p)}, "=", 1.0
        )
        for i in range(n)
    ]


def build_blp_fixed(matrix: DistanceMatrix, sizes) -> Formulation:
    """Fixed-size model over x and upper-triangular y variables.

    The objective carries a factor two because each y stands for an
    unordered pair; the pair-total row pins ``sum(y)`` to the number of
    same-group pairs implied by the sizes.
    """
    sizes = [int(s) for s in sizes]
    spec = FixedSizes(sizes)
    check_spec(spec, matrix.n)
    n, p = matrix.n, len(sizes)
    d = matrix.values
    objective = {
        _yname(i, j): 2.0 * float(d[i, j]) for i in range(n - 1) for j in range(i + 1, n)
    }
    constraints = _linking_rows(n, p)
    pair_total = {
        _yname(i, j): 1.0 for i in range(n - 1) for j in range(i + 1, n)
    }
    rhs = float(sum(s * (s - 1) // 2 for s in sizes))
    constraints.append(LinearConstraint("pair_total", pair_total, "=", rhs))
    constraints.extend(_assignment_rows(n, p))
    for k in range(p):
        constraints.append(
            LinearConstraint(
                f"size_{k + 1}", {_xname(i, k): 1.0 for i in range(n)}, "=", float(sizes[k])
            )
        )
    binaries = [_xname(i, k) for i in range(n) for k in range(p)]
    binaries += [_yname(i, j) for i in range(n - 1) for j in range(i + 1, n)]
    return Formulation(objective, constraints, binaries)


def build_blp_variable(matrix: DistanceMatrix, p: int) -> Formulation:
    """Variable-size model; group sizes become selector variables.

    ``u_s_k = 1`` picks size s for group k (s ranges over 1..n-p+1).  The
    coupling row ``n + 2 sum(y) = sum(s^2 u_s_k)`` forces the pair count to
    match the selected sizes, and per-group rows tie the assignment counts
    to the selected size.
    """
    spec = VariableCount(p)
    check_spec(spec, matrix.n)
    n = matrix.n
    smax = n - p + 1
    d = matrix.values
    objective = {
        _yname(i, j): float(d[i, j]) for i in range(n - 1) for j in range(i + 1, n)
    }
    constraints = _linking_rows(n, p)
    coupling: dict[str, float] = {
        _yname(i, j): 2.0 for i in range(n - 1) for j in range(i + 1, n)
    }
    for s in range(1, smax + 1):
        for k in range(p):
            coupling[_uname(s, k)] = -float(s * s)
    constraints.append(LinearConstraint("pair_coupling", coupling, "=", -float(n)))
    constraints.extend(_assignment_rows(n, p))
    for k in range(p):
        coeffs: dict[str, float] = {_xname(i, k): 1.0 for i in range(n)}
        for s in range(1, smax + 1):
            coeffs[_uname(s, k)] = -float(s)
        constraints.append(LinearConstraint(f"size_{k + 1}", coeffs, "=", 0.0))
    for k in range(p):
        constraints.append(
            LinearConstraint(
                f"pick_{k + 1}", {_uname(s, k): 1.0 for s in range(1, smax + 1)}, "=", 1.0
            )
        )
    binaries = [_xname(i, k) for i in range(n) for k in range(p)]
    binaries += [_yname(i, j) for i in range(n - 1) for j in range(i + 1, n)]
    binaries += [_uname(s, k) for s in range(1, smax + 1) for k in range(p)]
    return Formulation(objective, constraints, binaries)


def export_blp_fixed(matrix: DistanceMatrix, sizes) -> str:
    """LP document for the fixed-size model."""
    return build_blp_fixed(matrix, sizes).to_lp()


def export_blp_variable(matrix: DistanceMatrix, p: int) -> str:
    """LP document for the variable-size model."""
    return build_blp_variable(matrix, p).to_lp()


_TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z]\w*)")


def _parse_terms(text: str) -> dict[str, float]:
    coeffs: dict[str, float] = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse term at: {text[pos:pos + 30]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        coeffs[m.group(3)] = coeffs.get(m.group(3), 0.0) + sign * coef
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return coeffs


def parse_lp(text: str) -> Formulation:
    """Parse the LP dialect produced by :meth:`Formulation.to_lp`."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    section = None
    objective: dict[str, float] = {}
    constraints: list[LinearConstraint] = []
    binaries: list[str] = []
    for line in lines:
        low = line.lower()
        if low in ("minimize", "subject to", "binaries", "end"):
            section = low
            continue
        if section == "minimize":
            _, _, body = line.partition(":")
            objective = _parse_terms(body)
        elif section == "subject to":
            name, _, body = line.partition(":")
            m = re.search(r"(<=|>=|=)\s*(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*$", body)
            if not m:
                raise ValueError(f"constraint without sense/rhs: {line!r}")
            coeffs = _parse_terms(body[: m.start()])
            constraints.append(
                LinearConstraint(name.strip(), coeffs, m.group(1), float(m.group(2)))
            )
        elif section == "binaries":
            binaries.append(line)
        elif section is None:
            raise ValueError(f"content before any section: {line!r}")
    return Formulation(objective, constraints, binaries)


@dataclass(frozen=True)
class QapInstance:
    """Block-diagonal 0/1 cost matrix paired with a distance matrix."""

    c: np.ndarray
    d: np.ndarray

    @property
    def n(self) -> int:
        return self.c.shape[0]

    def to_text(self) -> str:
        lines = [str(self.n), ""]
        lines += [" ".join(str(int(v)) for v in row) for row in self.c]
        lines.append("")
        lines += [" ".join(str(int(v)) for v in row) for row in self.d]
        return "\n".join(lines) + "\n"


def qap_instance(matrix: DistanceMatrix, sizes) -> QapInstance:
    """Quadratic-assignment reduction of the fixed-size model.

    Sizes may sum to less than ``n``; leftover positions carry zero cost,
    so the matching items are excluded from every group.
    """
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError(f"group sizes must be positive, got {sizes}")
    if sum(sizes) > matrix.n:
        raise ValueError(f"group sizes sum to {sum(sizes)}, more than {matrix.n} items")
    if not matrix.is_integral:
        raise ValueError("QAPLIB export requires an integer distance matrix")
    c = np.zeros((matrix.n, matrix.n), dtype=np.int64)
    at = 0
    for s in sizes:
        c[at : at + s, at : at + s] = 1
        at += s
    return QapInstance(c, matrix.values.copy())


def export_qap(matrix: DistanceMatrix, sizes) -> str:
    """QAPLIB document (n, cost matrix, distance matrix) for the reduction."""
    return qap_instance(matrix, sizes).to_text()


def read_qaplib(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse a QAPLIB document back into its two matrices."""
    tokens = text.split()
    n = int(tokens[0])
    body = [int(t) for t in tokens[1:]]
    if len(body) != 2 * n * n:
        raise ValueError(f"expected {2 * n * n} matrix entries, got {len(body)}")
    c = np.array(body[: n * n], dtype=np.int64).reshape(n, n)
    d = np.array(body[n * n :], dtype=np.int64).reshape(n, n)
    return c, d


def qap_cost(c: np.ndarray, d: np.ndarray, perm) -> int:
    """Assignment cost sum(c[i,j] * d[perm[i],perm[j]])."""
    perm = np.asarray(perm, dtype=np.int64)
    return int((c * d[np.ix_(perm, perm)]).sum())


def partition_from_permutation(perm, sizes) -> np.ndarray:
    """Group labels induced by assigning permuted items to the size blocks.

    Items not covered by the blocks get label -1 (excluded).
    """
    perm = np.asarray(perm, dtype=np.int64)
    labels = np.full(perm.shape[0], -1, dtype=np.int64)
    at = 0
    for k, s in enumerate(int(s) for s in sizes):
        labels[perm[at : at + s]] = k
        at += s
    return labels


@dataclass(frozen=True)
class FormulationWitness:
    """Variable values induced by a partition: x, upper-triangular y, u, M."""

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray | None
    m: int

    def values(self) -> dict[str, float]:
        n, p = self.x.shape
        out: dict[str, float] = {}
        for i in range(n):
            for k in range(p):
                out[_xname(i, k)] = float(self.x[i, k])
        for i in range(n - 1):
            for j in range(i + 1, n):
                out[_yname(i, j)] = float(self.y[i, j])
        if self.u is not None:
            for s in range(self.u.shape[0]):
                for k in range(p):
                    out[_uname(s + 1, k)] = float(self.u[s, k])
        return out


@dataclass(frozen=True)
class WitnessReport:
    feasible: bool
    violations: list[tuple[str, float]]
    lp_objective: int | float


def witness_from_partition(part: Partition, spec: GroupSpec) -> FormulationWitness:
    """Map a partition to formulation variable values.

    For the fixed-size model, groups are relabeled so that group k matches
    the k-th declared size (sizes bind to labels in the emitted model).
    """
    check_spec(spec, part.n)
    n = part.n
    p = spec.p if isinstance(spec, VariableCount) else len(spec.sizes)
    if part.p != p:
        raise ValueError(f"partition has {part.p} groups, spec has {p}")
    counts = np.bincount(part.labels, minlength=p)
    labels = part.labels
    if isinstance(spec, FixedSizes):
        if sorted(counts.tolist()) != sorted(spec.sizes):
            raise ValueError(
                f"group sizes {sorted(counts.tolist())} do not match spec {sorted(spec.sizes)}"
            )
        taken = np.zeros(p, dtype=bool)
        slot_of = np.empty(p, dtype=np.int64)
        for slot, want in enumerate(spec.sizes):
            for g in range(p):
                if not taken[g] and counts[g] == want:
                    slot_of[g] = slot
                    taken[g] = True
                    break
        labels = slot_of[part.labels]
    else:
        if np.any(counts == 0):
            raise ValueError("every group must be non-empty")
    x = np.zeros((n, p), dtype=np.int8)
    x[np.arange(n), labels] = 1
    y = np.zeros((n, n), dtype=np.int8)
    same = labels[:, None] == labels[None, :]
    y[np.triu_indices(n, k=1)] = same[np.triu_indices(n, k=1)]
    u = None
    if isinstance(spec, VariableCount):
        smax = n - p + 1
        u = np.zeros((smax, p), dtype=np.int8)
        final_counts = np.bincount(labels, minlength=p)
        for k in range(p):
            u[final_counts[k] - 1, k] = 1
    return FormulationWitness(x, y, u, p)


def check_witness(
    witness: FormulationWitness, matrix: DistanceMatrix, spec: GroupSpec
) -> WitnessReport:
    """Evaluate every constraint of the matching formulation at the witness.

    Returns the violated rows with their signed slack and the objective
    value under the model's own convention (the fixed model counts each
    pair twice).
    """
    if isinstance(spec, FixedSizes):
        form = build_blp_fixed(matrix, spec.sizes)
    else:
        form = build_blp_variable(matrix, spec.p)
    values = witness.values()
    tol = 0.0 if matrix.is_integral else 1e-9
    violations: list[tuple[str, float]] = []
    for con in form.constraints:
        lhs = sum(coef * values[name] for name, coef in con.coeffs.items())
        slack = con.rhs - lhs
        if con.sense == "=":
            bad = abs(slack) > tol
        elif con.sense == "<=":
            bad = slack < -tol
        else:
            bad = slack > tol
        if bad:
            violations.append((con.name, float(slack)))
    objective = sum(coef * values[name] for name, coef in form.objective.items())
    if matrix.is_integral:
        objective = int(round(objective))
    return WitnessReport(not violations, violations, objective)
