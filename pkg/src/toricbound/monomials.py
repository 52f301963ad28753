"""Multi-homogeneous monomials, weight matrices and binomial relations.

A multi-homogeneous monomial ``f = f_1 (x) ... (x) f_n`` of degree ``d`` is an
``n x d`` matrix of variable indices. Rows are commutative monomials, so the
canonical form keeps every row sorted. Variables of the polynomial ring ``P_n``
are invariant monomials of positive degree; products of them are
:class:`PnMonomial` values and relations are pairs of those.

Textual syntax: tensor factors are separated by ``|`` and variables inside a
factor by ``*``, e.g. ``x1*x2|x2*x2``. A product of ``P_n`` variables is
written ``(x|y)(y|x)``, the empty product as ``1``.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from toricbound.errors import ConfigError, ResourceCapExceeded
from toricbound.repspec import TorusRep, Vector

Row = Tuple[int, ...]
WeightMatrix = Tuple[Tuple[Vector, ...], ...]

DEFAULT_ENUM_LIMIT = 200_000


def vsum(vectors: Iterable[Vector], dim: int) -> Vector:
    acc = [0] * dim
    for v in vectors:
        for c, x in enumerate(v):
            acc[c] += x
    return tuple(acc)


@dataclass(frozen=True)
class MultiMonomial:
    rep: TorusRep
    rows: Tuple[Row, ...]

    def __post_init__(self):
        rows = tuple(tuple(sorted(r)) for r in self.rows)
        if not rows:
            raise ConfigError("a multi-homogeneous monomial needs n >= 1 rows")
        d = len(rows[0])
        k = self.rep.k
        for r in rows:
            if len(r) != d:
                raise ConfigError("rows of a multi-homogeneous monomial must have equal degree")
            for v in r:
                if not 0 <= v < k:
                    raise ConfigError(f"variable index {v} out of range")
        object.__setattr__(self, "rows", rows)
        # cached outside the dataclass fields, so equality and hashing ignore it
        object.__setattr__(self, "_key", (d, rows))
        object.__setattr__(self, "_hash", hash(rows))

    # monomials are hashed and compared constantly; skip the rep unless needed
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, MultiMonomial):
            return NotImplemented
        return self.rows == other.rows and (self.rep is other.rep or self.rep == other.rep)

    def __hash__(self):
        return self._hash

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def degree(self) -> int:
        return self._key[0]

    @property
    def key(self):
        return self._key

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return format_monomial(self)

    def __repr__(self):
        return f"MultiMonomial({format_monomial(self)!r})"


# Variables of P_n are plain MultiMonomials that pass ``check_pn_variable``.
PnVariable = MultiMonomial


def check_pn_variable(f: MultiMonomial, d0: int | None = None) -> MultiMonomial:
    if f.degree < 1:
        raise ConfigError("P_n variables have positive degree")
    if not is_invariant(f):
        raise ConfigError(f"{f} is not invariant")
    if d0 is not None and f.degree > d0:
        raise ConfigError(f"{f} has degree {f.degree} > d0 = {d0}")
    return f


def weight_matrix(f: MultiMonomial) -> WeightMatrix:
    w = f.rep.weights
    return tuple(tuple(w[v] for v in row) for row in f.rows)


def is_invariant(f: MultiMonomial) -> bool:
    w = f.rep.weights
    return not any(vsum((w[v] for row in f.rows for v in row), f.rep.rank))


@dataclass(frozen=True)
class PnMonomial:
    """A multiset of P_n variables, stored sorted."""

    rep: TorusRep
    n: int
    factors: Tuple[MultiMonomial, ...] = ()

    def __post_init__(self):
        fs = tuple(sorted(self.factors, key=lambda f: f.key))
        for f in fs:
            if f.n != self.n or (f.rep is not self.rep and f.rep != self.rep):
                raise ConfigError("factors of a P_n monomial must share n and rep")
        object.__setattr__(self, "factors", fs)

    @classmethod
    def one(cls, rep, n):
        return cls(rep, n, ())

    @property
    def size(self) -> int:
        return len(self.factors)

    @property
    def degree(self) -> int:
        """Total multi-homogeneous degree."""
        return sum(f.degree for f in self.factors)

    def __mul__(self, other):
        if isinstance(other, MultiMonomial):
            other = PnMonomial(self.rep, self.n, (other,))
        if other.n != self.n:
            raise ConfigError("cannot multiply P_n monomials with different n")
        return PnMonomial(self.rep, self.n, self.factors + other.factors)

    def counter(self) -> Counter:
        return Counter(self.factors)

    def divides(self, other: "PnMonomial") -> bool:
        mine, theirs = self.counter(), other.counter()
        return all(theirs[f] >= c for f, c in mine.items())

    def __truediv__(self, other):
        if isinstance(other, MultiMonomial):
            other = PnMonomial(self.rep, self.n, (other,))
        rest = self.counter()
        rest.subtract(other.counter())
        if any(c < 0 for c in rest.values()):
            raise ValueError(f"{other} does not divide {self}")
        return PnMonomial(self.rep, self.n, tuple(rest.elements()))

    def gcd(self, other: "PnMonomial") -> "PnMonomial":
        common = self.counter() & other.counter()
        return PnMonomial(self.rep, self.n, tuple(common.elements()))

    def __str__(self):
        return format_pn_monomial(self)

    def __repr__(self):
        return f"PnMonomial({format_pn_monomial(self)!r})"


@dataclass(frozen=True)
class Binomial:
    lhs: PnMonomial
    rhs: PnMonomial

    def __post_init__(self):
        if self.lhs.n != self.rhs.n or self.lhs.rep != self.rhs.rep:
            raise ConfigError("both sides of a binomial must share n and rep")

    @property
    def degree(self) -> int:
        return max(self.lhs.degree, self.rhs.degree)

    @property
    def trivial(self) -> bool:
        return self.lhs == self.rhs

    def reduced(self) -> Tuple[PnMonomial, "Binomial"]:
        """Split off the common factor: returns ``(C, b')`` with ``b = C * b'``."""
        c = self.lhs.gcd(self.rhs)
        return c, Binomial(self.lhs / c, self.rhs / c)

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


def flatten(F: PnMonomial) -> MultiMonomial:
    """The value of a P_n monomial in R_n, as one canonical monomial."""
    rows = [[] for _ in range(F.n)]
    for f in F.factors:
        if f.n != F.n:
            raise ConfigError("mixed n across factors")
        for i, r in enumerate(f.rows):
            rows[i].extend(r)
    return MultiMonomial(F.rep, tuple(tuple(r) for r in rows))


def is_relation(b: Binomial) -> bool:
    return flatten(b.lhs) == flatten(b.rhs)


def row_block_replace(m: MultiMonomial, rows: Iterable[int], b: MultiMonomial) -> MultiMonomial:
    """Replace the rows ``rows`` of ``m`` by the same rows of ``b``.

    Both blocks must be zero-sum, which keeps the result invariant whenever
    ``m`` is.
    """
    rows = sorted(set(rows))
    if m.degree != b.degree:
        raise ValueError(f"degree mismatch: {m.degree} != {b.degree}")
    if m.n != b.n:
        raise ValueError("row count mismatch")
    if not rows:
        return m
    if rows[0] < 0 or rows[-1] >= m.n:
        raise ValueError("row index out of range")
    w, r = m.rep.weights, m.rep.rank
    if any(vsum((w[v] for i in rows for v in b.rows[i]), r)):
        raise ValueError("replacement block is not zero-sum")
    if any(vsum((w[v] for i in rows for v in m.rows[i]), r)):
        raise ValueError("replaced block is not zero-sum")
    new = list(m.rows)
    for i in rows:
        new[i] = b.rows[i]
    return MultiMonomial(m.rep, tuple(new))


def enumerate_pn_variables(rep: TorusRep, n: int, dcap: int,
                           limit: int = DEFAULT_ENUM_LIMIT) -> List[MultiMonomial]:
    """All invariant monomials with ``n`` rows and degree ``1..dcap``.

    Ordered by degree, then lexicographically on the canonical rows. Branches
    are cut as soon as the partial weight sum cannot be cancelled by the rows
    still to be filled.
    """
    if n < 1 or dcap < 1:
        raise ValueError("n and dcap must be positive")
    out: List[MultiMonomial] = []
    r = rep.rank
    zero = (0,) * r
    for d in range(1, dcap + 1):
        row_choices = list(itertools.combinations_with_replacement(range(rep.k), d))
        row_sum = [vsum((rep.weights[v] for v in row), r) for row in row_choices]
        # reach[t]: sums attainable by t rows
        sums1 = set(row_sum)
        reach = [{zero}]
        for _ in range(n):
            reach.append({tuple(a + b for a, b in zip(s, t)) for s in reach[-1] for t in sums1})
        chosen: List[int] = []

        def dfs(i, partial):
            if i == n:
                if partial == zero:
                    if len(out) >= limit:
                        raise ResourceCapExceeded(
                            f"more than {limit} P_n variables", partial=out)
                    out.append(MultiMonomial(rep, tuple(row_choices[c] for c in chosen)))
                return
            need = reach[n - i - 1]
            for c, s in enumerate(row_sum):
                nxt = tuple(a + b for a, b in zip(partial, s))
                if tuple(-x for x in nxt) in need:
                    chosen.append(c)
                    dfs(i + 1, nxt)
                    chosen.pop()

        dfs(0, zero)
    return out


# ---------------------------------------------------------------- text syntax

def format_monomial(f: MultiMonomial) -> str:
    names = f.rep.names
    return "|".join("*".join(names[v] for v in row) for row in f.rows)


def parse_monomial(rep: TorusRep, text: str) -> MultiMonomial:
    rows = []
    for part in text.strip().split("|"):
        part = part.strip()
        if not part:
            rows.append(())
            continue
        rows.append(tuple(rep.index_of(tok.strip()) for tok in part.split("*")))
    return MultiMonomial(rep, tuple(rows))


def format_pn_monomial(F: PnMonomial) -> str:
    if not F.factors:
        return "1"
    return "".join(f"({format_monomial(f)})" for f in F.factors)


_FACTOR = re.compile(r"\(([^()]*)\)")


def parse_pn_monomial(rep: TorusRep, text: str, n: int | None = None) -> PnMonomial:
    text = text.strip()
    if text == "1":
        if n is None:
            raise ConfigError("cannot infer n for the empty product")
        return PnMonomial.one(rep, n)
    pos, factors = 0, []
    for m in _FACTOR.finditer(text):
        if text[pos:m.start()].strip():
            raise ConfigError(f"cannot parse P_n monomial {text!r}")
        factors.append(parse_monomial(rep, m.group(1)))
        pos = m.end()
    if not factors or text[pos:].strip():
        raise ConfigError(f"cannot parse P_n monomial {text!r}")
    if n is None:
        n = factors[0].n
    return PnMonomial(rep, n, tuple(factors))


def parse_factor_list(rep: TorusRep, items: Sequence[str], n: int) -> PnMonomial:
    return PnMonomial(rep, n, tuple(parse_monomial(rep, s) for s in items))


def parse_binomial(rep: TorusRep, text: str) -> Binomial:
    if text.count("=") != 1:
        raise ConfigError("a binomial is written 'LHS = RHS'")
    left, right = text.split("=")
    lhs_n = None if left.strip() == "1" else parse_pn_monomial(rep, left).n
    rhs_n = None if right.strip() == "1" else parse_pn_monomial(rep, right).n
    n = lhs_n or rhs_n
    if n is None:
        raise ConfigError("cannot infer n from '1 = 1'")
    return Binomial(parse_pn_monomial(rep, left, n), parse_pn_monomial(rep, right, n))


def random_invariant_monomial(rep: TorusRep, n: int, d: int, rng) -> MultiMonomial | None:
    """A random invariant n x d monomial, or None if that shape has none.

    Entries are drawn one at a time among the weights that still allow the
    remaining entries to cancel the running sum, then shuffled.
    """
    m = n * d
    zero = (0,) * rep.rank
    reach = [{zero}]
    for _ in range(m):
        reach.append({tuple(a + b for a, b in zip(s, w)) for s in reach[-1] for w in rep.weights})
    if zero not in reach[m]:
        return None
    entries, partial = [], zero
    for left in range(m - 1, -1, -1):
        options = []
        for v, w in enumerate(rep.weights):
            nxt = tuple(a + b for a, b in zip(partial, w))
            if tuple(-x for x in nxt) in reach[left]:
                options.append((v, nxt))
        v, partial = rng.choice(options)
        entries.append(v)
    rng.shuffle(entries)
    return MultiMonomial(rep, tuple(tuple(entries[i * d:(i + 1) * d]) for i in range(n)))
