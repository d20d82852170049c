"""Finite groups as validated Cayley tables with 0-based element indices."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

__all__ = ["GroupTableError", "FiniteGroup", "cyclic", "symmetric"]


class GroupTableError(ValueError):
    """The table does not define a group; the message names the first violation."""


@dataclass(frozen=True)
class FiniteGroup:
    name: str
    table: tuple[tuple[int, ...], ...]
    identity: int = 0

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(int(x) for x in row)
                                                for row in self.table))
        _validate(self.name, self.table, self.identity)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        e = self.identity
        for b in range(self.order):
            if self.mul(a, b) == e:
                return b
        raise GroupTableError(f"{self.name}: element {a} has no inverse")


def _validate(name: str, table: tuple[tuple[int, ...], ...], identity: int) -> None:
    n = len(table)
    if n == 0:
        raise GroupTableError(f"{name}: empty table")
    for i, row in enumerate(table):
        if len(row) != n:
            raise GroupTableError(f"{name}: row {i} has length {len(row)}, expected {n}")
        for j, x in enumerate(row):
            if not 0 <= x < n:
                raise GroupTableError(f"{name}: entry ({i},{j}) = {x} out of range")
    if not 0 <= identity < n:
        raise GroupTableError(f"{name}: identity index {identity} out of range")
    for a in range(n):
        if table[identity][a] != a or table[a][identity] != a:
            raise GroupTableError(f"{name}: {identity} is not an identity at element {a}")
    for a in range(n):
        if identity not in table[a]:
            raise GroupTableError(f"{name}: element {a} has no inverse")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise GroupTableError(
                        f"{name}: associativity fails at ({a},{b},{c})")


def cyclic(n: int) -> FiniteGroup:
    """Z_n with addition modulo n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroup(f"Z{n}", table, 0)


def symmetric(n: int) -> FiniteGroup:
    """S_n on {0..n-1}; elements are permutations in lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    perms = list(permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    # (p q)(x) = p(q(x)), matching left action on functions
    table = tuple(tuple(index[tuple(p[q[x]] for x in range(n))] for q in perms)
                  for p in perms)
    return FiniteGroup(f"S{n}", table, index[tuple(range(n))])
