"""Brute-force ground truth: fibers of P_n -> R_n and bounded-degree moves.

A fiber is the set of products of P_n variables with one common value in
R_n. Binomials of degree <= s generate the ideal (within the enumerated
universe) iff every fiber is connected when two members are joined whenever
they differ by a move of degree <= s. Nothing here touches the cone or
decomposition code; only the variable enumeration is shared.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from toricbound.errors import ResourceCapExceeded
from toricbound.monomials import (
    MultiMonomial,
    PnMonomial,
    enumerate_pn_variables,
    flatten,
)
from toricbound.repspec import TorusRep

DEFAULT_PRODUCT_LIMIT = 500_000


@dataclass(frozen=True)
class Fiber:
    value: MultiMonomial
    members: Tuple[PnMonomial, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a fiber has at least one member")
        if len(set(self.members)) != len(self.members):
            raise ValueError("fiber members must be distinct")
        if any(flatten(m) != self.value for m in self.members):
            raise ValueError("fiber members must flatten to the fiber value")

    def __len__(self):
        return len(self.members)


def move_degree(F: PnMonomial, G: PnMonomial) -> int:
    """Degree of the smallest move joining ``F`` and ``G``: ``deg(F / gcd)``."""
    return (F / F.gcd(G)).degree


def enumerate_fibers(rep: TorusRep, n: int, pn_degree_cap: int, dcap: int,
                     degree_cap: Optional[int] = None,
                     limit: int = DEFAULT_PRODUCT_LIMIT) -> List[Fiber]:
    """Group all products of 1..``pn_degree_cap`` P_n variables by value.

    Variables have degree ``1..dcap``. ``degree_cap`` additionally drops
    products whose total degree exceeds it. Fibers come sorted by value key,
    members by factor keys.
    """
    variables = enumerate_pn_variables(rep, n, dcap)
    budget = float("inf") if degree_cap is None else degree_cap
    groups: Dict[MultiMonomial, List[PnMonomial]] = defaultdict(list)
    chosen: List[MultiMonomial] = []
    count = 0

    def extend(start, degree):
        nonlocal count
        if chosen:
            count += 1
            if count > limit:
                raise ResourceCapExceeded(f"more than {limit} products to enumerate")
            F = PnMonomial(rep, n, tuple(chosen))
            groups[flatten(F)].append(F)
        if len(chosen) == pn_degree_cap:
            return
        for k in range(start, len(variables)):
            f = variables[k]
            if degree + f.degree <= budget:
                chosen.append(f)
                extend(k, degree + f.degree)
                chosen.pop()

    extend(0, 0)
    fibers = []
    for value in sorted(groups, key=lambda v: v.key):
        members = sorted(groups[value], key=lambda F: tuple(f.key for f in F.factors))
        fibers.append(Fiber(value, tuple(members)))
    return fibers


def fiber_of(value: MultiMonomial, variables: Sequence[MultiMonomial]) -> Fiber:
    """Every product of ``variables`` whose value is exactly ``value``."""
    rep, n = value.rep, value.n
    target = [Counter(r) for r in value.rows]
    variables = sorted(set(variables), key=lambda f: f.key)
    found: List[PnMonomial] = []
    chosen: List[MultiMonomial] = []

    def fits(f, rest):
        return all(not (Counter(row) - rest[i]) for i, row in enumerate(f.rows))

    def dfs(start, rest):
        if not any(+c for c in rest):
            found.append(PnMonomial(rep, n, tuple(chosen)))
            return
        for k in range(start, len(variables)):
            f = variables[k]
            if fits(f, rest):
                chosen.append(f)
                dfs(k, [rest[i] - Counter(row) for i, row in enumerate(f.rows)])
                chosen.pop()

    dfs(0, target)
    members = sorted(found, key=lambda F: tuple(f.key for f in F.factors))
    return Fiber(value, tuple(members))


def fiber_connected_under(fiber: Fiber, s: int) -> bool:
    members = fiber.members
    seen = {0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in range(len(members)):
            if b not in seen and move_degree(members[a], members[b]) <= s:
                seen.add(b)
                queue.append(b)
    return len(seen) == len(members)


def connecting_degree(fiber: Fiber) -> int:
    """Least ``s`` under which ``fiber`` is connected (0 for a singleton)."""
    members = fiber.members
    if len(members) == 1:
        return 0
    weights = sorted({move_degree(a, b) for a, b in itertools.combinations(members, 2)})
    for s in weights:
        if fiber_connected_under(fiber, s):
            return s
    raise AssertionError("the complete move graph is always connected")


def markov_degree_upper(rep: TorusRep, n: int, caps: Tuple[int, int],
                        degree_cap: Optional[int] = None,
                        limit: int = DEFAULT_PRODUCT_LIMIT) -> int:
    """Least ``s`` connecting every fiber of the capped universe."""
    pn_degree_cap, dcap = caps
    fibers = enumerate_fibers(rep, n, pn_degree_cap, dcap, degree_cap, limit)
    return max((connecting_degree(f) for f in fibers), default=0)


def is_admissible_move(F: PnMonomial, G: PnMonomial, s: int) -> bool:
    """``F`` and ``G`` lie in one fiber and differ by a move of degree <= s."""
    return flatten(F) == flatten(G) and move_degree(F, G) <= s
