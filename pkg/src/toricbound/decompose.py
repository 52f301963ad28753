"""Turning a binomial relation into a certificate of bounded-degree moves.

One round on a reduced relation ``F - G``:

1. ``column_reduce``: arrange every factor so its column sums are short, pair
   the columns of ``||F||`` and ``||G||`` into a doubled matrix, cut out a
   zero-sum block of at most d0 columns, and read off variables ``f`` and
   ``g`` of equal degree. Two moves of degree <= d0^2 rewrite the relation as
   ``f*H1*G1 - g*H2*G2``.
2. ``row_swap_chain``: split the rows of ``f``/``g`` into zero-sum blocks of
   at most n0 rows and walk ``f = m_0, m_1, ..., m_L = g`` one block at a
   time. Each swap is one move; afterwards ``g`` divides both sides.
3. The leftover relation has strictly smaller degree; repeat.

Every move is a :class:`Step` ``multiplier * (sub_lhs - sub_rhs)``; the steps
sum to ``F - G`` as a formal combination of P_n monomials.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from toricbound.cones import Bounds
from toricbound.errors import ConfigError, DecompositionError, NotARelation
from toricbound.monomials import (
    Binomial,
    MultiMonomial,
    PnMonomial,
    flatten,
    is_invariant,
    is_relation,
    parse_factor_list,
    row_block_replace,
    weight_matrix,
)
from toricbound.rearrange import (
    DoubledMatrix,
    apply_permutations,
    steinitz_rearrange,
    zero_sum_column_block,
    zero_sum_column_partition,
    zero_sum_row_partition,
)
from toricbound.repspec import TorusRep, rep_from_json

KINDS = ("column-reduce-F", "column-reduce-G", "row-swap", "recursion-base")

DEFAULT_MAX_DEPTH = 10_000


@dataclass(frozen=True)
class Step:
    kind: str
    multiplier: PnMonomial
    sub_lhs: PnMonomial
    sub_rhs: PnMonomial

    @property
    def degree(self) -> int:
        return max(self.sub_lhs.degree, self.sub_rhs.degree)

    def scaled(self, outer: PnMonomial) -> "Step":
        return Step(self.kind, outer * self.multiplier, self.sub_lhs, self.sub_rhs)


@dataclass(frozen=True)
class Certificate:
    target: Binomial
    bound: int
    steps: Tuple[Step, ...]
    residual: Optional[Binomial] = None
    residual_multiplier: Optional[PnMonomial] = None

    @property
    def rep(self) -> TorusRep:
        return self.target.lhs.rep

    @property
    def max_step_degree(self) -> int:
        return max((s.degree for s in self.steps), default=0)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: Optional[str] = None
    detail: str = ""

    def __bool__(self):
        return self.ok


# ------------------------------------------------------------------ helpers

@lru_cache(maxsize=None)
def arrange(f: MultiMonomial, D) -> Tuple[Tuple[int, ...], ...]:
    """Rows of ``f`` reordered so every column sum has norm <= D."""
    perms = steinitz_rearrange(weight_matrix(f), D)
    return apply_permutations(f.rows, perms)


def _columns(F: PnMonomial, D):
    """Concatenate the arranged factors of ``F``; returns (rows, provenance)."""
    n = F.n
    rows = [[] for _ in range(n)]
    source = []
    for nu, f in enumerate(F.factors):
        A = arrange(f, D)
        for v in range(f.degree):
            for i in range(n):
                rows[i].append(A[i][v])
            source.append((nu, v))
    return tuple(tuple(r) for r in rows), tuple(source)


def repackage(rep: TorusRep, rows: Sequence[Sequence[int]], bounds: Bounds) -> PnMonomial:
    """Cut a zero-sum matrix of variable indices into P_n variables of degree <= d0."""
    n = len(rows)
    if not rows or not rows[0]:
        return PnMonomial.one(rep, n)
    W = tuple(tuple(rep.weights[v] for v in row) for row in rows)
    perms = steinitz_rearrange(W, bounds.D)
    arranged = apply_permutations(rows, perms)
    W = apply_permutations(W, perms)
    blocks = zero_sum_column_partition(W, bounds.d0, bounds.basis_A)
    factors = []
    for block in blocks:
        f = MultiMonomial(rep, tuple(tuple(arranged[i][j] for j in block) for i in range(n)))
        if not is_invariant(f):
            raise DecompositionError("repackaged block is not invariant")
        factors.append(f)
    return PnMonomial(rep, n, tuple(factors))


def _check_variables(b: Binomial, bounds: Bounds):
    for F in (b.lhs, b.rhs):
        for f in F.factors:
            if f.degree < 1 or not is_invariant(f):
                raise ConfigError(f"{f} is not a P_n variable")
            if f.degree > bounds.d0:
                raise ConfigError(f"{f} has degree {f.degree} > d0 = {bounds.d0}")


# ------------------------------------------------------------ the reduction

def column_reduce(b: Binomial, bounds: Bounds, fast_path: bool = True):
    """Produce matched variables ``f | lhs``, ``g | rhs`` of equal degree.

    Returns ``(f, g, steps, next_binomial)``. For a trivial relation
    ``f = g = None`` and ``next_binomial`` is ``b``. With ``fast_path`` an
    existing pair of equal-degree factors is returned untouched.
    """
    if not is_relation(b):
        raise NotARelation(f"{b} is not a relation")
    if b.trivial:
        return None, None, [], b
    if fast_path:
        for f in b.lhs.factors:
            for g in b.rhs.factors:
                if f.degree == g.degree:
                    return f, g, [], b

    rep, n = b.lhs.rep, b.lhs.n
    left, lsrc = _columns(b.lhs, bounds.D)
    right, rsrc = _columns(b.rhs, bounds.D)
    M = DoubledMatrix(rep, left, right, lsrc, rsrc)
    J = zero_sum_column_block(M, bounds.d0, bounds.basis_A)

    f = MultiMonomial(rep, tuple(tuple(left[i][j] for j in J) for i in range(n)))
    g = MultiMonomial(rep, tuple(tuple(right[i][j] for j in J) for i in range(n)))
    if not (is_invariant(f) and is_invariant(g)):
        raise DecompositionError("column block halves are not invariant")

    steps = []
    halves = []
    for side, rows, src, var, kind in ((b.lhs, left, lsrc, f, "column-reduce-F"),
                                       (b.rhs, right, rsrc, g, "column-reduce-G")):
        touched = sorted({src[j][0] for j in J})
        used = {src[j] for j in J}
        F1 = PnMonomial(rep, n, tuple(side.factors[nu] for nu in touched))
        H1 = side / F1
        rest = [[] for _ in range(n)]
        for j, (nu, v) in enumerate(src):
            if nu in touched and (nu, v) not in used:
                for i in range(n):
                    rest[i].append(rows[i][j])
        G1 = repackage(rep, rest, bounds)
        moved = G1 * var
        if moved != F1:
            if kind == "column-reduce-F":
                steps.append(Step(kind, H1, F1, moved))
            else:
                steps.append(Step(kind, H1, moved, F1))
        halves.append(H1 * moved)
    return f, g, steps, Binomial(halves[0], halves[1])


def _source(X: Sequence[MultiMonomial], needed, order):
    """Pick factors of ``X`` supplying the ``needed`` entries, reusing picks first."""
    chosen: List[int] = []
    supply = {}
    for i in order:
        for var in sorted(needed[i].elements()):
            src = next((c for c in chosen if supply[c][i][var] > 0), None)
            if src is None:
                src = next((c for c, x in enumerate(X)
                            if c not in supply and var in x.rows[i]), None)
                if src is None:
                    raise DecompositionError(
                        f"entry {var} in row {i} cannot be sourced (bookkeeping bug)")
                chosen.append(src)
                supply[src] = [Counter(row) for row in X[src].rows]
            supply[src][i][var] -= 1
    return sorted(chosen)


def row_swap_chain(b: Binomial, f: MultiMonomial, g: MultiMonomial, bounds: Bounds):
    """Walk from ``f`` to ``g`` by swapping zero-sum row blocks.

    Returns ``(steps, g_monomial, residual)`` where
    ``b = sum(steps) + g_monomial * residual`` and ``residual`` has degree
    ``b.degree - deg g``.
    """
    rep, n = b.lhs.rep, b.lhs.n
    if f.degree != g.degree:
        raise ValueError("matched variables must have equal degree")
    if f not in b.lhs.factors or g not in b.rhs.factors:
        raise ValueError("f must divide the left side and g the right side")
    X = b.lhs / f
    Y = b.rhs / g
    steps: List[Step] = []
    if f != g:
        M = DoubledMatrix(rep, f.rows, g.rows)
        blocks = zero_sum_row_partition(M, bounds.n0, bounds.basis_B, bounds.d0)
        m = f
        for I in blocks:
            m_next = row_block_replace(m, I, g)
            if m_next == m:
                continue
            needed = {i: Counter(g.rows[i]) - Counter(m.rows[i]) for i in I}
            surplus = {i: Counter(m.rows[i]) - Counter(g.rows[i]) for i in I}
            factors = list(X.factors)
            chosen = _source(factors, needed, sorted(I))
            F_l = PnMonomial(rep, n, tuple(factors[c] for c in chosen))
            rows = [Counter() for _ in range(n)]
            for c in chosen:
                for i, row in enumerate(factors[c].rows):
                    rows[i].update(row)
            for i in I:
                rows[i] -= needed[i]
                rows[i] += surplus[i]
            G_l = repackage(rep, [sorted(r.elements()) for r in rows], bounds)
            H_l = X / F_l
            steps.append(Step("row-swap", H_l, F_l * m, G_l * m_next))
            X = H_l * G_l
            m = m_next
        if m != g:
            raise DecompositionError("row swaps did not end at g (bookkeeping bug)")
    return steps, PnMonomial(rep, n, (g,)), Binomial(X, Y)


def decompose(b: Binomial, bounds: Bounds, base_degree: Optional[int] = None,
              fast_path: bool = True, max_depth: int = DEFAULT_MAX_DEPTH) -> Certificate:
    """Certificate that ``b`` lies in the ideal generated in degrees <= d1.

    Recursion stops at relations of degree <= ``base_degree`` (default d1),
    which are emitted whole as ``recursion-base`` steps. ``base_degree=0``
    runs the reduction all the way down.
    """
    if not is_relation(b):
        raise NotARelation(f"{b} is not a relation")
    _check_variables(b, bounds)
    bound = bounds.d1
    base = bound if base_degree is None else base_degree
    rep, n = b.lhs.rep, b.lhs.n
    steps: List[Step] = []
    outer = PnMonomial.one(rep, n)
    current = b
    for _ in range(max_depth):
        common, current = current.reduced()
        outer = outer * common
        if current.trivial:
            break
        if current.degree <= base:
            steps.append(Step("recursion-base", outer, current.lhs, current.rhs))
            break
        f, g, cs, middle = column_reduce(current, bounds, fast_path)
        steps.extend(s.scaled(outer) for s in cs)
        rs, gmono, residual = row_swap_chain(middle, f, g, bounds)
        steps.extend(s.scaled(outer) for s in rs)
        if residual.degree >= current.degree:
            raise DecompositionError("degree did not drop (bookkeeping bug)")
        outer = outer * gmono
        current = residual
    else:
        raise DecompositionError(f"recursion depth {max_depth} exceeded")
    for s in steps:
        if s.degree > bound:
            raise DecompositionError(
                f"{s.kind} step of degree {s.degree} exceeds the bound {bound}")
    return Certificate(b, bound, tuple(steps))


# ------------------------------------------------------------- verification

def verify_certificate(c: Certificate) -> Verdict:
    for k, s in enumerate(c.steps):
        if s.kind not in KINDS:
            return Verdict(False, "malformed", f"step {k} has unknown kind {s.kind!r}")
    for k, s in enumerate(c.steps):
        if flatten(s.sub_lhs) != flatten(s.sub_rhs):
            return Verdict(False, "flatten-mismatch", f"step {k}: {s.sub_lhs} != {s.sub_rhs}")
    for k, s in enumerate(c.steps):
        if s.degree > c.bound:
            return Verdict(False, "degree-bound",
                           f"step {k} has degree {s.degree} > {c.bound}")
    balance: Counter = Counter()
    balance[c.target.lhs] += 1
    balance[c.target.rhs] -= 1
    terms = [(s.multiplier, s.sub_lhs, s.sub_rhs) for s in c.steps]
    if c.residual is not None:
        mult = c.residual_multiplier or PnMonomial.one(c.rep, c.target.lhs.n)
        terms.append((mult, c.residual.lhs, c.residual.rhs))
    for mult, lhs, rhs in terms:
        balance[mult * lhs] -= 1
        balance[mult * rhs] += 1
    leftover = {m: v for m, v in balance.items() if v}
    if leftover:
        sample = ", ".join(f"{v:+d}*{m}" for m, v in list(leftover.items())[:3])
        return Verdict(False, "telescoping", f"uncancelled terms: {sample}")
    if c.residual is not None and not c.residual.trivial:
        return Verdict(False, "unterminated", f"residual {c.residual} still pending")
    return Verdict(True)


# ---------------------------------------------------------------------- JSON

def _mono_json(F: PnMonomial) -> List[str]:
    from toricbound.monomials import format_monomial
    return [format_monomial(f) for f in F.factors]


def certificate_to_json(c: Certificate) -> dict:
    residual = None
    if c.residual is not None:
        residual = {"multiplier": _mono_json(c.residual_multiplier or PnMonomial.one(c.rep, c.target.lhs.n)),
                    "lhs": _mono_json(c.residual.lhs), "rhs": _mono_json(c.residual.rhs)}
    return {
        "rep": c.rep.to_json(),
        "n": c.target.lhs.n,
        "target": {"lhs": _mono_json(c.target.lhs), "rhs": _mono_json(c.target.rhs)},
        "bound": c.bound,
        "steps": [{"kind": s.kind, "multiplier": _mono_json(s.multiplier),
                   "sub_lhs": _mono_json(s.sub_lhs), "sub_rhs": _mono_json(s.sub_rhs)}
                  for s in c.steps],
        "residual": residual,
    }


def certificate_from_json(data: dict, rep: Optional[TorusRep] = None) -> Certificate:
    try:
        rep = rep or rep_from_json(data["rep"])
        n = int(data["n"])

        def mono(items):
            return parse_factor_list(rep, items, n)

        target = Binomial(mono(data["target"]["lhs"]), mono(data["target"]["rhs"]))
        steps = tuple(Step(s["kind"], mono(s["multiplier"]), mono(s["sub_lhs"]), mono(s["sub_rhs"]))
                      for s in data["steps"])
        residual = mult = None
        if data.get("residual") is not None:
            r = data["residual"]
            residual = Binomial(mono(r["lhs"]), mono(r["rhs"]))
            mult = mono(r.get("multiplier", []))
        return Certificate(target, int(data["bound"]), steps, residual, mult)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed certificate: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
