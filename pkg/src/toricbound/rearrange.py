"""Rearranging matrix entries within rows, and zero-sum block extraction.

Weight matrices here are plain nested tuples: ``W[i][j]`` is an integer
vector. Every routine is exact and deterministic; ties always go to the
smallest index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from toricbound.cones import HilbertBasis, parse_rational, sq_norm
from toricbound.errors import BoundExceeded, DecompositionError
from toricbound.repspec import TorusRep, Vector

Perm = Tuple[int, ...]

EXHAUSTIVE_LIMIT = 20_000


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _shape(W) -> Tuple[int, int, int]:
    n = len(W)
    d = len(W[0]) if n else 0
    if any(len(row) != d for row in W):
        raise ValueError("weight matrix is not rectangular")
    dim = len(W[0][0]) if n and d else 0
    return n, d, dim


def column_sums(W) -> List[Vector]:
    n, d, dim = _shape(W)
    sums = [(0,) * dim for _ in range(d)]
    for row in W:
        for j, e in enumerate(row):
            sums[j] = _add(sums[j], e)
    return sums


def row_sums(W) -> List[Vector]:
    n, d, dim = _shape(W)
    out = []
    for row in W:
        s = (0,) * dim
        for e in row:
            s = _add(s, e)
        out.append(s)
    return out


def apply_permutations(W, perms: Sequence[Perm]):
    return tuple(tuple(row[p] for p in perm) for row, perm in zip(W, perms))


def _max_sq(W) -> int:
    return max((sq_norm(c) for c in column_sums(W)), default=0)


def steinitz_rearrange(W, D, exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> Tuple[Perm, ...]:
    """Row permutations after which every column sum has norm at most ``D``.

    Returns ``perms`` with ``arranged[i][j] = W[i][perms[i][j]]``. Greedy
    column-by-column placement, then local repair by in-row swaps; when that
    still misses the bound and the instance is small, all row orderings are
    tried. Raises :class:`BoundExceeded` with the best squared norm found.
    """
    n, d, dim = _shape(W)
    D2 = parse_rational(D) ** 2
    identity = tuple(tuple(range(d)) for _ in range(n))
    if n == 0 or d == 0:
        return identity
    total = (0,) * dim
    for row in W:
        for e in row:
            total = _add(total, e)
    if any(total):
        raise ValueError("steinitz_rearrange needs a zero-sum matrix")
    if _max_sq(W) <= D2:
        return identity

    perms = _greedy(W, n, d, dim)
    perms = _repair(W, perms)
    best = _max_sq(apply_permutations(W, perms))
    if best <= D2:
        return perms
    found = _exhaustive(W, D2, exhaustive_limit)
    if found is not None:
        return found
    raise BoundExceeded(
        f"could not rearrange to column norms <= {D}; best squared norm {best}",
        best_sq_norm=best, permutations=perms)


def _greedy(W, n, d, dim) -> List[List[int]]:
    remaining = [list(range(d)) for _ in range(n)]
    perms = [[] for _ in range(n)]
    for _ in range(d):
        acc = (0,) * dim
        for i in range(n):
            best_pos, best_val = None, None
            for pos in remaining[i]:
                val = sq_norm(_add(acc, W[i][pos]))
                if best_val is None or val < best_val:
                    best_pos, best_val = pos, val
            remaining[i].remove(best_pos)
            perms[i].append(best_pos)
            acc = _add(acc, W[i][best_pos])
    return perms


def _repair(W, perms) -> Tuple[Perm, ...]:
    n = len(W)
    d = len(perms[0])
    perms = [list(p) for p in perms]
    sums = column_sums(apply_permutations(W, perms))
    norms = [sq_norm(s) for s in sums]

    def try_phase(accept):
        improved = True
        any_change = False
        while improved:
            improved = False
            for i in range(n):
                row = W[i]
                p = perms[i]
                for a in range(d):
                    for b in range(a + 1, d):
                        ea, eb = row[p[a]], row[p[b]]
                        if ea == eb:
                            continue
                        na = _add(_sub(sums[a], ea), eb)
                        nb = _add(_sub(sums[b], eb), ea)
                        qa, qb = sq_norm(na), sq_norm(nb)
                        if accept(norms[a], norms[b], qa, qb):
                            p[a], p[b] = p[b], p[a]
                            sums[a], sums[b] = na, nb
                            norms[a], norms[b] = qa, qb
                            improved = any_change = True
        return any_change

    def by_sum(xa, xb, ya, yb):
        return ya + yb < xa + xb

    def by_max(xa, xb, ya, yb):
        return sorted((ya, yb), reverse=True) < sorted((xa, xb), reverse=True)

    while True:
        changed = try_phase(by_sum)
        changed = try_phase(by_max) or changed
        if not changed:
            break
    return tuple(tuple(p) for p in perms)


def _distinct_orders(row) -> List[Perm]:
    out = []
    for values in sorted(set(itertools.permutations(row))):
        used = set()
        perm = []
        for v in values:
            pos = next(q for q in range(len(row)) if q not in used and row[q] == v)
            used.add(pos)
            perm.append(pos)
        out.append(tuple(perm))
    return out


def _exhaustive(W, D2, limit) -> Optional[Tuple[Perm, ...]]:
    n, d = len(W), len(W[0])
    count = 1
    for row in W[1:]:
        # multinomial count of distinct orderings
        c = 1
        seen: Dict[Vector, int] = {}
        for k, e in enumerate(row, start=1):
            seen[e] = seen.get(e, 0) + 1
            c = c * k // seen[e]
        count *= c
        if count > limit:
            return None
    options = [_distinct_orders(row) for row in W[1:]]
    first = tuple(range(d))
    for combo in itertools.product(*options):
        perms = (first,) + combo
        if _max_sq(apply_permutations(W, perms)) <= D2:
            return perms
    return None


# --------------------------------------------------------- doubled matrices

@dataclass(frozen=True)
class DoubledMatrix:
    """Entrywise concatenation of two arranged weight matrices of equal shape.

    ``left`` and ``right`` hold variable indices; ``left_source[j]`` (resp.
    ``right_source[j]``) names the factor and the column inside it that
    column ``j`` came from.
    """

    rep: TorusRep
    left: Tuple[Tuple[int, ...], ...]
    right: Tuple[Tuple[int, ...], ...]
    left_source: Tuple[Tuple[int, int], ...] = ()
    right_source: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if len(self.left) != len(self.right):
            raise ValueError("halves have different row counts")
        if any(len(a) != len(b) for a, b in zip(self.left, self.right)):
            raise ValueError("halves have different widths")

    @property
    def n(self) -> int:
        return len(self.left)

    @property
    def width(self) -> int:
        return len(self.left[0]) if self.left else 0

    @property
    def entries(self):
        w = self.rep.weights
        return tuple(tuple(w[a] + w[b] for a, b in zip(ra, rb))
                     for ra, rb in zip(self.left, self.right))


def doubled_sums(W, axis: str) -> List[Vector]:
    """Column or row sums; a plain weight matrix is embedded as ``c -> c || c``."""
    if isinstance(W, DoubledMatrix):
        E = W.entries
        return column_sums(E) if axis == "col" else row_sums(E)
    sums = column_sums(W) if axis == "col" else row_sums(W)
    return [s + s for s in sums]


def _buckets(sums: Sequence[Vector], alive: Sequence[int]) -> Dict[Vector, List[int]]:
    out: Dict[Vector, List[int]] = {}
    for j in alive:
        out.setdefault(sums[j], []).append(j)
    return out


def _realize(buckets, choice: Dict[Vector, int]) -> Tuple[int, ...]:
    return tuple(sorted(j for v, c in choice.items() for j in buckets[v][:c]))


def _block_from_basis(buckets, basis: HilbertBasis):
    index = basis.cone.index()
    L = basis.cone.L
    lam = [0] * L
    for v, cols in buckets.items():
        if v not in index:
            raise DecompositionError(f"sum {v} is not a generator of the cone")
        lam[index[v]] = len(cols)
    gens = basis.cone.generators
    best = None
    for h in basis.elements:
        if all(a <= b for a, b in zip(h, lam)):
            cols = _realize(buckets, {gens[a]: c for a, c in enumerate(h) if c})
            key = (len(cols), cols)
            if best is None or key < best:
                best = key
    if best is None:
        raise DecompositionError("no Hilbert basis element fits the multiplicity vector")
    return best[1]


def _block_lazy(buckets):
    keys = sorted(buckets)
    avail = [len(buckets[v]) for v in keys]
    dim = len(keys[0])
    total = sum(avail)
    for size in range(1, total + 1):
        best = None
        choice = [0] * len(keys)

        def dfs(pos, left, acc):
            nonlocal best
            if left == 0:
                if not any(acc):
                    cols = _realize(buckets, {keys[i]: c for i, c in enumerate(choice) if c})
                    if best is None or cols < best:
                        best = cols
                return
            if pos == len(keys):
                return
            for c in range(min(left, avail[pos]), -1, -1):
                choice[pos] = c
                dfs(pos + 1, left - c, tuple(a + c * x for a, x in zip(acc, keys[pos])))
            choice[pos] = 0

        dfs(0, size, (0,) * dim)
        if best is not None:
            return best
    raise DecompositionError("no zero-sum block exists")


def _extract(sums, alive, bound, basis, what):
    buckets = _buckets(sums, alive)
    block = _block_from_basis(buckets, basis) if basis is not None else _block_lazy(buckets)
    if len(block) > bound:
        raise DecompositionError(
            f"zero-sum {what} block of size {len(block)} exceeds the bound {bound}")
    return block


def zero_sum_column_block(M, d0: int, basis_A: Optional[HilbertBasis] = None) -> Tuple[int, ...]:
    """A zero-sum set of at most ``d0`` columns (0-based, sorted).

    Picks the minimum-size zero-sum set whose sorted column indices are
    lexicographically smallest. With ``basis_A`` the candidates come from the
    Hilbert basis; without it they are searched for directly. Both give the
    same answer when the basis is complete.
    """
    if d0 < 1:
        raise ValueError("d0 must be positive")
    sums = doubled_sums(M, "col")
    if not sums:
        raise DecompositionError("matrix has no columns")
    return _extract(sums, range(len(sums)), d0, basis_A, "column")


def _check_zero_sum(sums):
    if sums and any(_add_all(sums)):
        raise ValueError("matrix is not zero-sum")


def _add_all(vs):
    acc = (0,) * len(vs[0])
    for v in vs:
        acc = _add(acc, v)
    return acc


def zero_sum_column_partition(W, d0: int,
                              basis_A: Optional[HilbertBasis] = None) -> List[Tuple[int, ...]]:
    """Split all columns into disjoint zero-sum blocks of at most ``d0`` columns."""
    if d0 < 1:
        raise ValueError("d0 must be positive")
    sums = doubled_sums(W, "col")
    _check_zero_sum(sums)
    alive = list(range(len(sums)))
    blocks = []
    while alive:
        block = _extract(sums, alive, d0, basis_A, "column")
        blocks.append(block)
        taken = set(block)
        alive = [j for j in alive if j not in taken]
    return blocks


def zero_sum_row_partition(M, n0: int, basis_B: Optional[HilbertBasis] = None,
                           d0: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Split the rows of ``M`` into zero-sum blocks of at most ``n0`` rows.

    Row sums do not depend on the order inside rows, so no rearrangement is
    needed. ``d0`` (when given) enforces the width precondition that puts
    every row sum inside the row cone.
    """
    if n0 < 1:
        raise ValueError("n0 must be positive")
    width = M.width if isinstance(M, DoubledMatrix) else (len(M[0]) if M else 0)
    if d0 is not None and width > d0:
        raise DecompositionError(f"matrix width {width} exceeds d0 = {d0}")
    sums = doubled_sums(M, "row")
    _check_zero_sum(sums)
    alive = list(range(len(sums)))
    blocks = []
    while alive:
        block = _extract(sums, alive, n0, basis_B, "row")
        blocks.append(block)
        taken = set(block)
        alive = [i for i in alive if i not in taken]
    return blocks
