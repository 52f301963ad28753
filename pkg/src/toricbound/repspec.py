"""Torus representations given by integer weight vectors."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from toricbound.errors import ConfigError

Vector = Tuple[int, ...]

_RESERVED = set("|*()= \t\n")


@dataclass(frozen=True)
class TorusRep:
    """A diagonal action of ``(C^*)^rank`` on ``k`` variables.

    Variable ``i`` (0-based) has weight ``weights[i]``. Two variables may share
    a weight; identity is the index, never the weight.
    """

    rank: int
    weights: Tuple[Vector, ...]
    names: Tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.weights)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ConfigError(f"unknown variable {name!r}") from None

    @property
    def max_sq_norm(self) -> int:
        return max(sum(c * c for c in w) for w in self.weights)

    def to_json(self) -> dict:
        return {"rank": self.rank, "weights": [list(w) for w in self.weights],
                "names": list(self.names)}


def _as_int(x, what):
    # bool is an int subclass; floats are rejected even when integral
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{what} must be an exact integer, got {x!r}")
    return x


def validate_rep(rank, weights: Sequence[Sequence[int]],
                 names: Optional[Sequence[str]] = None) -> TorusRep:
    rank = _as_int(rank, "rank")
    if rank < 1:
        raise ConfigError("rank must be positive")
    if weights is None or len(weights) == 0:
        raise ConfigError("empty weight list")
    ws = []
    for i, w in enumerate(weights):
        if isinstance(w, int) and not isinstance(w, bool):
            w = (w,)
        w = tuple(_as_int(c, f"weight {i} coordinate") for c in w)
        if len(w) != rank:
            raise ConfigError(
                f"dimension mismatch: weight {i} has length {len(w)}, rank is {rank}")
        ws.append(w)
    if names is None:
        names = [f"x{i + 1}" for i in range(len(ws))]
    names = tuple(str(s) for s in names)
    if len(names) != len(ws):
        raise ConfigError("names and weights differ in length")
    if len(set(names)) != len(names):
        raise ConfigError("variable names must be distinct")
    for s in names:
        if not s or any(ch in _RESERVED for ch in s) or s == "1":
            raise ConfigError(f"invalid variable name {s!r}")
    return TorusRep(rank, tuple(ws), names)


def rep_from_json(data) -> TorusRep:
    if not isinstance(data, dict) or "rank" not in data or "weights" not in data:
        raise ConfigError("representation needs 'rank' and 'weights'")
    return validate_rep(data["rank"], data["weights"], data.get("names"))


def load_rep(path) -> TorusRep:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read representation {path}: {exc}") from exc
    return rep_from_json(data.get("rep", data) if isinstance(data, dict) else data)


def squared_alphabet(rep: TorusRep) -> Tuple[Vector, ...]:
    """All concatenations ``w_i || w_j``, deduplicated and sorted."""
    return tuple(sorted({u + v for u in rep.weights for v in rep.weights}))
