"""Kernel cones, their Hilbert bases, and the uniform bounds d0, n0, d1.

For a finite list of generators ``a_1..a_L`` in ``Z^m`` the semigroup

    Lambda = { lam in N^L : sum_i lam_i a_i = 0 }

is finitely generated (Gordan). Its Hilbert basis is the set of nonzero
componentwise-minimal elements. ``d0`` and ``n0`` are the largest coordinate
sums over the Hilbert bases of the column cone (``build_A``) and the row cone
(``build_B``).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from toricbound.errors import ConfigError, HilbertCapExhausted, ResourceCapExceeded
from toricbound.repspec import TorusRep, Vector

DEFAULT_HILBERT_CAP = 256
DEFAULT_MAX_CANDIDATES = 400_000
DEFAULT_MAX_GENERATORS = 5_000

SHAPES = ("pairs", "ball")


def sq_norm(v: Sequence[int]) -> int:
    return sum(x * x for x in v)


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool) or isinstance(text, float):
        raise ConfigError(f"D must be exact (int or 'p/q'), got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"cannot parse rational {text!r}") from exc


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def default_D(rep: TorusRep) -> Fraction:
    """Smallest positive half-integer ``p/2`` with ``(p/2)^2 >= rank * max|w|^2``."""
    target = 4 * rep.rank * rep.max_sq_norm
    p = math.isqrt(target)
    if p * p < target:
        p += 1
    return Fraction(max(p, 1), 2)


@dataclass(frozen=True)
class KernelCone:
    generators: Tuple[Vector, ...]

    def __post_init__(self):
        gens = tuple(tuple(g) for g in self.generators)
        if not gens:
            raise ConfigError("a kernel cone needs at least one generator")
        m = len(gens[0])
        if any(len(g) != m for g in gens):
            raise ConfigError("generators must have equal length")
        if len(set(gens)) != len(gens):
            raise ConfigError("generators must be distinct")
        object.__setattr__(self, "generators", gens)

    @property
    def L(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return len(self.generators[0])

    def image(self, lam: Sequence[int]) -> Vector:
        acc = [0] * self.dim
        for c, g in zip(lam, self.generators):
            if c:
                for i, x in enumerate(g):
                    acc[i] += c * x
        return tuple(acc)

    def contains(self, lam: Sequence[int]) -> bool:
        return all(c >= 0 for c in lam) and not any(self.image(lam))

    def index(self) -> Dict[Vector, int]:
        return {g: i for i, g in enumerate(self.generators)}


@dataclass(frozen=True)
class HilbertBasis:
    cone: KernelCone
    elements: Tuple[Tuple[int, ...], ...]

    @property
    def max_degree(self) -> int:
        return max((sum(h) for h in self.elements), default=0)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def hilbert_basis(cone: KernelCone, cap: int = DEFAULT_HILBERT_CAP,
                  max_candidates: int = DEFAULT_MAX_CANDIDATES) -> HilbertBasis:
    """Hilbert basis by Contejean-Devie completion, layered by coordinate sum.

    Layer ``t`` holds the non-dominated candidates of coordinate sum ``t``. A
    candidate ``x`` with image ``s`` is extended by ``e_j`` only when
    ``<s, a_j> < 0``; this restriction keeps the procedure complete and makes
    it terminate. The basis is complete once a layer comes out empty.
    """
    gens = cone.generators
    L = cone.L
    basis: List[Tuple[int, ...]] = []
    # (j, value) -> basis elements h with h[j] == value; a child x + e_j can
    # only be newly dominated by such an h
    by_coord: Dict[Tuple[int, int], List[Tuple[int, ...]]] = defaultdict(list)

    def dominated(y, j):
        for h in by_coord.get((j, y[j]), ()):
            if all(a <= b for a, b in zip(h, y)):
                return True
        return False

    def add_basis(h):
        basis.append(h)
        for j, v in enumerate(h):
            if v:
                by_coord[(j, v)].append(h)

    layer: Dict[Tuple[int, ...], Vector] = {}
    for i, g in enumerate(gens):
        e = tuple(1 if j == i else 0 for j in range(L))
        layer[e] = g
    degree = 1
    while layer:
        if degree > cap:
            raise HilbertCapExhausted(
                f"Hilbert basis not stable at coordinate sum {cap}",
                partial=sorted(basis, key=lambda h: (sum(h), h)), reached=cap)
        open_layer = []
        for x, s in layer.items():
            if any(s):
                open_layer.append((x, s))
            else:
                add_basis(x)
        nxt: Dict[Tuple[int, ...], Vector] = {}
        for x, s in open_layer:
            for j, g in enumerate(gens):
                if sum(a * b for a, b in zip(s, g)) >= 0:
                    continue
                y = x[:j] + (x[j] + 1,) + x[j + 1:]
                if y in nxt or dominated(y, j):
                    continue
                nxt[y] = tuple(a + b for a, b in zip(s, g))
            if len(nxt) > max_candidates:
                raise ResourceCapExceeded(
                    f"Hilbert completion exceeded {max_candidates} candidates "
                    f"at coordinate sum {degree + 1}",
                    partial=sorted(basis, key=lambda h: (sum(h), h)))
        layer = nxt
        degree += 1
    return HilbertBasis(cone, tuple(sorted(basis, key=lambda h: (sum(h), h))))


def hilbert_basis_up_to(cone: KernelCone, cap: int,
                        max_candidates: int = DEFAULT_MAX_CANDIDATES) -> Tuple[Tuple[int, ...], ...]:
    """All Hilbert basis elements of coordinate sum <= ``cap``.

    Completion proceeds layer by layer, so when it is cut off at ``cap`` every
    basis element up to that sum has already been found, even though the
    basis as a whole may not be complete.
    """
    try:
        elements = hilbert_basis(cone, cap, max_candidates).elements
    except HilbertCapExhausted as exc:
        elements = exc.partial
    return tuple(h for h in elements if sum(h) <= cap)


def verify_hilbert_basis(basis: HilbertBasis, cap: Optional[int] = None) -> bool:
    """Brute-force check of the three basis properties up to coordinate sum ``cap``.

    ``cap`` defaults to four times the largest basis degree. Exponential in
    the number of generators; meant for small cones.
    """
    cone = basis.cone
    elems = list(basis.elements)
    if any(sum(h) == 0 or not cone.contains(h) for h in elems):
        return False
    for a in elems:
        for b in elems:
            if a != b and all(x <= y for x, y in zip(a, b)):
                return False
    if cap is None:
        cap = 4 * max(basis.max_degree, 1)
    generated = {tuple([0] * cone.L)}
    frontier = list(generated)
    while frontier:
        new = []
        for x in frontier:
            for h in elems:
                y = tuple(p + q for p, q in zip(x, h))
                if sum(y) <= cap and y not in generated:
                    generated.add(y)
                    new.append(y)
        frontier = new
    for lam in kernel_points(cone, cap):
        if sum(lam) and lam not in generated:
            return False
    return True


def kernel_points(cone: KernelCone, cap: int):
    """Every ``lam`` in Lambda with coordinate sum <= cap (brute force)."""
    gens = cone.generators
    L, m = cone.L, cone.dim

    def rec(i, budget, acc, lam):
        if i == L:
            if not any(acc):
                yield tuple(lam)
            return
        g = gens[i]
        for c in range(budget + 1):
            lam.append(c)
            yield from rec(i + 1, budget - c, [a + c * x for a, x in zip(acc, g)], lam)
            lam.pop()

    yield from rec(0, cap, [0] * m, [])


def minimal_kernel_points(cone: KernelCone, cap: int) -> List[Tuple[int, ...]]:
    pts = sorted((p for p in kernel_points(cone, cap) if sum(p)), key=lambda p: (sum(p), p))
    out: List[Tuple[int, ...]] = []
    for p in pts:
        if not any(all(a <= b for a, b in zip(q, p)) for q in out):
            out.append(p)
    return out


# ------------------------------------------------------------ generator sets

def _steinitz_radius_sq(rep: TorusRep, radius: Fraction) -> Fraction:
    # Any sum of t weights landing in the ball of this radius has an ordering
    # whose partial sums stay inside r * (Wmax + radius) + radius
    # (Steinitz constant <= r for any norm).
    wmax = math.isqrt(rep.max_sq_norm)
    if wmax * wmax < rep.max_sq_norm:
        wmax += 1
    bound = rep.rank * (wmax + radius) + radius
    return bound * bound


def _layered_ball_sums(rep: TorusRep, radius: Fraction,
                       max_points: int = DEFAULT_MAX_GENERATORS * 20):
    """Yield, for t = 0, 1, ..., the set of sums of exactly t weights inside
    the ball of ``radius``, stopping once the sequence has become periodic."""
    r2 = Fraction(radius) ** 2
    prune = _steinitz_radius_sq(rep, Fraction(radius))
    zero = (0,) * rep.rank
    current = frozenset([zero])
    seen = set()
    while current not in seen:
        seen.add(current)
        yield frozenset(p for p in current if sq_norm(p) <= r2)
        nxt = set()
        for p in current:
            for w in rep.weights:
                q = tuple(a + b for a, b in zip(p, w))
                if sq_norm(q) <= prune:
                    nxt.add(q)
        if len(nxt) > max_points:
            raise ResourceCapExceeded(f"weight sums exceed {max_points} points")
        current = frozenset(nxt)


def build_A(rep: TorusRep, D, shape: str = "pairs",
            max_generators: int = DEFAULT_MAX_GENERATORS) -> KernelCone:
    """Column cone: possible column sums of a doubled weight matrix.

    A vector ``u || v`` is admitted when it is a nonnegative integer
    combination of ``X^2`` (so ``u`` and ``v`` are sums of the same number of
    weights) and

    * ``shape="pairs"``: ``|u| <= D`` and ``|v| <= D``;
    * ``shape="ball"``:  ``|u || v| <= 2D``.

    ``pairs`` is contained in ``ball`` and already holds every column sum a
    D-rearranged pair of factors can produce.
    """
    D = parse_rational(D)
    if D <= 0:
        raise ConfigError("D must be positive")
    if shape not in SHAPES:
        raise ConfigError(f"unknown cone shape {shape!r}")
    half = D if shape == "pairs" else 2 * D
    lim = 4 * D * D
    gens = set()
    for pts in _layered_ball_sums(rep, half):
        for u in pts:
            for v in pts:
                if shape == "ball" and sq_norm(u) + sq_norm(v) > lim:
                    continue
                gens.add(u + v)
        if len(gens) > max_generators:
            raise ResourceCapExceeded(f"column cone has more than {max_generators} generators")
    return KernelCone(tuple(sorted(gens)))


def build_B(rep: TorusRep, d0: int, max_generators: int = DEFAULT_MAX_GENERATORS) -> KernelCone:
    """Row cone: combinations of ``X^2`` whose coefficients sum to at most d0."""
    if isinstance(d0, bool) or not isinstance(d0, int) or d0 < 1:
        raise ConfigError("d0 must be a positive integer")
    zero = (0,) * rep.rank
    layer = {zero}
    gens = {zero + zero}
    for _ in range(d0):
        layer = {tuple(a + b for a, b in zip(p, w)) for p in layer for w in rep.weights}
        gens.update(u + v for u in layer for v in layer)
        if len(gens) > max_generators:
            raise ResourceCapExceeded(f"row cone has more than {max_generators} generators")
    return KernelCone(tuple(sorted(gens)))


@dataclass(frozen=True)
class Bounds:
    D: Fraction
    d0: int
    n0: int
    basis_A: Optional[HilbertBasis] = field(default=None, compare=False, repr=False)
    basis_B: Optional[HilbertBasis] = field(default=None, compare=False, repr=False)
    shape: str = "pairs"

    @property
    def d1(self) -> int:
        return self.n0 * self.d0 * self.d0

    def to_json(self) -> dict:
        return {
            "D": format_rational(self.D),
            "d0": self.d0,
            "n0": self.n0,
            "d1": self.d1,
            "hilbert_A_size": len(self.basis_A) if self.basis_A is not None else None,
            "hilbert_B_size": len(self.basis_B) if self.basis_B is not None else None,
        }


def compute_bounds(rep: TorusRep, D=None, cap: int = DEFAULT_HILBERT_CAP,
                   shape: str = "pairs",
                   max_candidates: int = DEFAULT_MAX_CANDIDATES) -> Bounds:
    """d0 from the column cone, n0 from the row cone, d1 = n0 * d0^2.

    Nothing here depends on the number of tensor factors n. A cone whose
    semigroup is trivial yields the conventional value 1.
    """
    D = default_D(rep) if D is None else parse_rational(D)
    basis_A = hilbert_basis(build_A(rep, D, shape), cap, max_candidates)
    d0 = max(basis_A.max_degree, 1)
    basis_B = hilbert_basis(build_B(rep, d0), cap, max_candidates)
    n0 = max(basis_B.max_degree, 1)
    return Bounds(D, d0, n0, basis_A, basis_B, shape)


@dataclass(frozen=True)
class LowerBounds:
    """Certified lower bounds on (d0, n0) when the exact values are out of reach."""

    D: Fraction
    d0: int
    n0: int
    d0_exact: bool
    n0_exact: bool

    @property
    def d1(self) -> int:
        return self.n0 * self.d0 * self.d0

    def to_json(self) -> dict:
        return {"D": format_rational(self.D), "d0_lower": self.d0, "n0_lower": self.n0,
                "d1_lower": self.d1, "d0_exact": self.d0_exact, "n0_exact": self.n0_exact}


def _basis_degree(cone: KernelCone, cap: int, max_candidates: int):
    """(max degree found, complete?) without letting a cap error escape."""
    try:
        return hilbert_basis(cone, cap, max_candidates).max_degree, True
    except (HilbertCapExhausted, ResourceCapExceeded) as exc:
        return max((sum(h) for h in exc.partial), default=0), False


def lower_bounds(rep: TorusRep, D=None, cap: int = 4, shape: str = "pairs",
                 max_candidates: int = 50_000) -> LowerBounds:
    """Lower bounds that stay valid however far the exact computation would go.

    Every basis element found below the cap is a genuine Hilbert basis
    element, so the largest one bounds d0 from below. For n0, a minimal
    kernel element of a sub-family of generators stays minimal for the whole
    family, and build_B(rep, t) is a sub-family of build_B(rep, d0) for
    t <= d0; the row cones for t = 1, 2, ... are tried until one gives up.
    """
    D = default_D(rep) if D is None else parse_rational(D)
    d0, d0_exact = _basis_degree(build_A(rep, D, shape), cap, max_candidates)
    d0 = max(d0, 1)
    n0, n0_exact = 1, False
    for t in range(1, d0 + 1):
        found, complete = _basis_degree(build_B(rep, t), DEFAULT_HILBERT_CAP, max_candidates)
        n0 = max(n0, found)
        n0_exact = complete and d0_exact and t == d0
        if not complete:
            break
    return LowerBounds(D, d0, n0, d0_exact, n0_exact)
