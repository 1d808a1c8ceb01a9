"""ONE-IN-THREE 3-SAT instances.

Input format is DIMACS with every clause holding exactly three literals::

    c comment
    p cnf <num_vars> <num_clauses>
    1 -2 3 0

An assignment satisfies an instance when every clause has exactly one true
literal. A literal is a signed variable index; ``-j`` is the negation of
``x_j``. Repeated literals count once per occurrence, so ``1 1 1 0`` is never
satisfied.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Mapping

__all__ = [
    "CnfInstance",
    "CnfFormatError",
    "SizeError",
    "parse_cnf",
    "format_cnf",
    "literal_value",
    "verify_one_in_three",
    "iter_assignments",
    "brute_force_sat",
    "parse_assignment",
    "format_assignment",
    "random_instance",
    "BRUTE_FORCE_MAX_VARS",
]

Assignment = dict[int, bool]

BRUTE_FORCE_MAX_VARS = 24


class CnfFormatError(ValueError):
    pass


class SizeError(ValueError):
    pass


@dataclass(frozen=True)
class CnfInstance:
    num_vars: int
    clauses: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.num_vars < 1:
            raise CnfFormatError("num_vars must be positive")
        for i, clause in enumerate(self.clauses, 1):
            if len(clause) != 3:
                raise CnfFormatError(f"clause {i} has {len(clause)} literals, expected 3")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise CnfFormatError(f"clause {i}: literal {lit} out of range 1..{self.num_vars}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def parse_cnf(text: str) -> CnfInstance:
    header = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise CnfFormatError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfFormatError(f"line {lineno}: malformed problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise CnfFormatError(f"line {lineno}: malformed problem line {line!r}") from None
            continue
        if header is None:
            raise CnfFormatError(f"line {lineno}: clause before problem line")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise CnfFormatError(f"line {lineno}: non-integer token in {line!r}") from None
        if not lits or lits[-1] != 0:
            raise CnfFormatError(f"line {lineno}: clause must end with 0")
        lits = lits[:-1]
        if 0 in lits:
            raise CnfFormatError(f"line {lineno}: literal 0 inside clause")
        if len(lits) != 3:
            raise CnfFormatError(f"line {lineno}: clause has {len(lits)} literals, expected 3")
        for lit in lits:
            if abs(lit) > header[0]:
                raise CnfFormatError(f"line {lineno}: literal {lit} out of range 1..{header[0]}")
        clauses.append(tuple(lits))
    if header is None:
        raise CnfFormatError("missing problem line 'p cnf <vars> <clauses>'")
    n, m = header
    if n < 1:
        raise CnfFormatError("problem line: number of variables must be positive")
    if m != len(clauses):
        raise CnfFormatError(f"problem line declares {m} clauses, found {len(clauses)}")
    return CnfInstance(n, tuple(clauses))


def format_cnf(cnf: CnfInstance) -> str:
    lines = [f"p cnf {cnf.num_vars} {cnf.num_clauses}"]
    lines += [" ".join(str(lit) for lit in c) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def literal_value(lit: int, a: Mapping[int, bool]) -> bool:
    value = a[abs(lit)]
    return not value if lit < 0 else value


def verify_one_in_three(cnf: CnfInstance, a: Mapping[int, bool]) -> bool:
    missing = [j for j in range(1, cnf.num_vars + 1) if j not in a]
    if missing:
        raise KeyError(f"assignment missing variable {missing[0]}")
    return all(sum(literal_value(lit, a) for lit in c) == 1 for c in cnf.clauses)


def iter_assignments(n: int) -> Iterator[Assignment]:
    """All assignments in lexicographic order, False before True, x_1 most significant."""
    for bits in itertools.product((False, True), repeat=n):
        yield {j: v for j, v in enumerate(bits, 1)}


def brute_force_sat(cnf: CnfInstance) -> Assignment | None:
    if cnf.num_vars > BRUTE_FORCE_MAX_VARS:
        raise SizeError(f"brute force limited to {BRUTE_FORCE_MAX_VARS} variables")
    for a in iter_assignments(cnf.num_vars):
        if verify_one_in_three(cnf, a):
            return a
    return None


def parse_assignment(text: str, num_vars: int | None = None) -> Assignment:
    """Parse lines ``j 0|1``."""
    a: Assignment = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("0", "1") or not parts[0].isdigit():
            raise CnfFormatError(f"line {lineno}: expected 'j 0|1', got {line!r}")
        j = int(parts[0])
        if j in a:
            raise CnfFormatError(f"line {lineno}: variable {j} assigned twice")
        a[j] = parts[1] == "1"
    if num_vars is not None:
        expected = set(range(1, num_vars + 1))
        if set(a) != expected:
            raise CnfFormatError(f"assignment must cover exactly variables 1..{num_vars}")
    return a


def format_assignment(a: Mapping[int, bool]) -> str:
    return "".join(f"{j} {int(a[j])}\n" for j in sorted(a))


def random_instance(n: int, m: int, rng: random.Random) -> CnfInstance:
    clauses = [
        tuple(rng.randint(1, n) * rng.choice((1, -1)) for _ in range(3)) for _ in range(m)
    ]
    return CnfInstance(n, tuple(clauses))
