"""Dense leg calculus for operators on tensor products of finite-dimensional spaces.

Operators carry an ordered list of domain legs and codomain legs.  The
multi-index convention is fixed once and for all: the FIRST leg is the most
significant index, for rows and columns alike, so tensoring two operators is
exactly ``numpy.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "LegError", "Space", "LegSignature", "LegOperator", "Vector",
    "tensor_space", "total_dim", "identity", "compose", "tensor", "adjoint",
    "embed_adjacent", "apply_distant", "extract_distant", "is_unitary",
    "hs_norm", "hs_inner",
]


class LegError(ValueError):
    """Raised when leg signatures are inconsistent with the requested operation."""


@dataclass(frozen=True)
class Space:
    """A finite-dimensional Hilbert space, optionally graded.

    ``grading`` assigns an integer degree to each basis vector; phase
    braidings read it as an exponent.
    """

    id: str
    dim: int
    grading: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"space {self.id!r} needs dim >= 1, got {self.dim}")
        if self.grading is not None:
            object.__setattr__(self, "grading", tuple(int(d) for d in self.grading))
            if len(self.grading) != self.dim:
                raise ValueError(
                    f"space {self.id!r}: grading length {len(self.grading)} != dim {self.dim}")


def tensor_space(a: Space, b: Space) -> Space:
    """The tensor product space, with additive grading when both factors carry one."""
    grading = None
    if a.grading is not None and b.grading is not None:
        grading = tuple(da + db for da in a.grading for db in b.grading)
    return Space(f"{a.id}*{b.id}", a.dim * b.dim, grading)


def total_dim(legs: Sequence[Space]) -> int:
    d = 1
    for s in legs:
        d *= s.dim
    return d


@dataclass(frozen=True)
class LegSignature:
    domain: tuple[Space, ...]
    codomain: tuple[Space, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "codomain", tuple(self.codomain))

    @property
    def dom_dim(self) -> int:
        return total_dim(self.domain)

    @property
    def cod_dim(self) -> int:
        return total_dim(self.codomain)


@dataclass(frozen=True)
class LegOperator:
    """A complex matrix together with its leg signature."""

    signature: LegSignature
    matrix: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(np.asarray(self.matrix, dtype=complex))
        if m.shape != (self.signature.cod_dim, self.signature.dom_dim):
            raise LegError(
                f"matrix shape {m.shape} does not match signature "
                f"({self.signature.cod_dim}, {self.signature.dom_dim})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def domain(self) -> tuple[Space, ...]:
        return self.signature.domain

    @property
    def codomain(self) -> tuple[Space, ...]:
        return self.signature.codomain

    def with_legs(self, domain: Sequence[Space], codomain: Sequence[Space]) -> "LegOperator":
        """Reinterpret the same matrix with regrouped legs (total dims must agree)."""
        sig = LegSignature(tuple(domain), tuple(codomain))
        if (sig.dom_dim, sig.cod_dim) != (self.signature.dom_dim, self.signature.cod_dim):
            raise LegError("regrouped legs change the total dimension")
        return LegOperator(sig, self.matrix)


@dataclass(frozen=True)
class Vector:
    space: Space
    entries: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.entries, dtype=complex).reshape(-1)
        if v.shape != (self.space.dim,):
            raise LegError(f"vector length {v.shape[0]} != dim {self.space.dim}")
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)


def identity(legs: Sequence[Space]) -> LegOperator:
    legs = tuple(legs)
    return LegOperator(LegSignature(legs, legs), np.eye(total_dim(legs), dtype=complex))


def compose(x: LegOperator, y: LegOperator) -> LegOperator:
    """Operator product x after y (diagrams stacked bottom to top, y at the bottom)."""
    if y.codomain != x.domain:
        raise LegError(
            f"compose: codomain legs {[s.id for s in y.codomain]} of the first factor "
            f"do not match domain legs {[s.id for s in x.domain]}")
    return LegOperator(LegSignature(y.domain, x.codomain), x.matrix @ y.matrix)


def tensor(x: LegOperator, y: LegOperator) -> LegOperator:
    """Horizontal juxtaposition: legs of x precede legs of y."""
    sig = LegSignature(x.domain + y.domain, x.codomain + y.codomain)
    return LegOperator(sig, np.kron(x.matrix, y.matrix))


def adjoint(x: LegOperator) -> LegOperator:
    return LegOperator(LegSignature(x.codomain, x.domain), x.matrix.conj().T)


def embed_adjacent(x: LegOperator, context: Sequence[Space], start: int) -> LegOperator:
    """Embed x on the contiguous legs ``start .. start+k-1`` (1-based) of the context."""
    context = tuple(context)
    k = len(x.domain)
    if start < 1 or start + k - 1 > len(context):
        raise LegError(f"cannot embed a {k}-leg operator at position {start} "
                       f"of a {len(context)}-leg context")
    if context[start - 1:start - 1 + k] != x.domain:
        raise LegError(
            f"domain legs {[s.id for s in x.domain]} do not match context legs "
            f"{[s.id for s in context[start - 1:start - 1 + k]]} at position {start}")
    pre, post = context[:start - 1], context[start - 1 + k:]
    m = x.matrix
    if pre:
        m = np.kron(np.eye(total_dim(pre)), m)
    if post:
        m = np.kron(m, np.eye(total_dim(post)))
    sig = LegSignature(context, pre + x.codomain + post)
    return LegOperator(sig, m)


def _adjacent_swap(spaces: list[Space], p: int, crossing: LegOperator) -> np.ndarray:
    """Matrix of a crossing at legs (p, p+1), 1-based, inside the current context."""
    if crossing.domain != (spaces[p - 1], spaces[p]):
        raise LegError("crossing does not match the legs it is applied to")
    return embed_adjacent(crossing, tuple(spaces), p).matrix


def _move_crossing(braiding, a: Space, m: Space, route: str) -> LegOperator:
    # The unitary a (x) m -> m (x) a used to slide leg a rightwards past leg m.
    # Route "over" is pinned by the Pentagon right-hand side c12 F23 cinv12:
    # the first conjugator there is the inverse braiding.
    if route == "over":
        c = braiding.braid(m, a)
        return LegOperator(LegSignature((a, m), (m, a)), np.linalg.inv(c.matrix))
    if route == "under":
        return braiding.braid(a, m)
    raise ValueError(f"route must be 'over' or 'under', got {route!r}")


def _back_crossing(braiding, m: Space, a: Space, route: str) -> LegOperator:
    # The unitary m (x) a -> a (x) m undoing the move above (with a possibly replaced
    # by the codomain space of the applied operator).
    if route == "over":
        return braiding.braid(m, a)
    if route == "under":
        c = braiding.braid(a, m)
        return LegOperator(LegSignature((m, a), (a, m)), np.linalg.inv(c.matrix))
    raise ValueError(f"route must be 'over' or 'under', got {route!r}")


def apply_distant(x: LegOperator, context: Sequence[Space], positions: tuple[int, int],
                  route: str = "over", braiding=None) -> LegOperator:
    """Apply a two-leg operator at non-adjacent legs (i, k) of the context.

    Each intermediate leg is braided past leg i in sequence, x is applied on
    the now-adjacent legs, and the braidings are undone.  With adjacent
    positions this reduces to :func:`embed_adjacent` with no braiding at all.
    """
    i, k = positions
    context = list(context)
    n = len(context)
    if not (1 <= i < k <= n):
        raise LegError(f"positions {positions} out of range for a {n}-leg context")
    if len(x.domain) != 2 or len(x.codomain) != 2:
        raise LegError("apply_distant needs an operator with exactly two domain "
                       "and two codomain legs")
    a, b = x.domain
    if context[i - 1] != a or context[k - 1] != b:
        raise LegError(
            f"operator legs ({a.id}, {b.id}) do not match context legs "
            f"({context[i - 1].id}, {context[k - 1].id}) at positions {positions}")
    if k == i + 1:
        out = embed_adjacent(x, tuple(context), i)
        return out
    if braiding is None:
        raise LegError("apply_distant with intermediate legs needs a braiding")

    a2, b2 = x.codomain
    spaces = list(context)
    move = np.eye(total_dim(spaces), dtype=complex)
    for p in range(i, k - 1):
        m = spaces[p]  # leg p+1, 0-based index p
        cr = _move_crossing(braiding, spaces[p - 1], m, route)
        move = _adjacent_swap(spaces, p, cr) @ move
        spaces[p - 1], spaces[p] = spaces[p], spaces[p - 1]
    # x now acts on adjacent legs (k-1, k) of the permuted context
    mid = embed_adjacent(x, tuple(spaces), k - 1)
    spaces[k - 2], spaces[k - 1] = a2, b2
    back = np.eye(total_dim(spaces), dtype=complex)
    for p in range(k - 2, i - 1, -1):
        m = spaces[p - 1]
        cr = _back_crossing(braiding, m, a2, route)
        back = back @ _adjacent_swap(spaces, p, cr)
        # _adjacent_swap checks legs before the swap, so update afterwards
        spaces[p - 1], spaces[p] = spaces[p], spaces[p - 1]
    out_context = list(context)
    out_context[i - 1], out_context[k - 1] = a2, b2
    sig = LegSignature(tuple(context), tuple(out_context))
    return LegOperator(sig, back @ mid.matrix @ move)


def extract_distant(y: LegOperator, context: Sequence[Space], positions: tuple[int, int],
                    route: str = "over", braiding=None) -> tuple[LegOperator, float]:
    """Best two-leg factor z at legs (i, k) with y ~ apply_distant(z, ...).

    Least squares in the Hilbert-Schmidt metric: conjugate y back along the
    braiding route and partial-trace over the remaining legs.  Returns the
    minimiser and the residual norm; a residual above the caller's tolerance
    means y does not factor through legs (i, k).
    """
    i, k = positions
    context = tuple(context)
    if y.domain != context or y.codomain != context:
        raise LegError("extract_distant expects an endomorphism of the full context")
    a, b = context[i - 1], context[k - 1]
    if k > i + 1 and braiding is None:
        raise LegError("extract_distant with intermediate legs needs a braiding")
    # apply_distant(z) = Q* E(z) Q with the same unitary Q for every z, so the
    # least-squares problem is a partial trace of Q y Q*.
    spaces = list(context)
    move = np.eye(total_dim(spaces), dtype=complex)
    for p in range(i, k - 1):
        cr = _move_crossing(braiding, spaces[p - 1], spaces[p], route)
        move = _adjacent_swap(spaces, p, cr) @ move
        spaces[p - 1], spaces[p] = spaces[p], spaces[p - 1]
    yp = move @ y.matrix @ move.conj().T
    d_left = total_dim(spaces[:k - 2])
    d_mid = a.dim * b.dim
    d_right = total_dim(spaces[k:])
    t = yp.reshape(d_left, d_mid, d_right, d_left, d_mid, d_right)
    z = np.einsum("aibajb->ij", t) / (d_left * d_right)
    zop = LegOperator(LegSignature((a, b), (a, b)), z)
    residual = float(np.linalg.norm(y.matrix - apply_distant(zop, context, positions,
                                                             route, braiding).matrix))
    return zop, residual


def is_unitary(x: LegOperator, tol: float = 1e-9) -> bool:
    """True when x*x and xx* are the identity within tol (Hilbert-Schmidt norm)."""
    if x.signature.dom_dim != x.signature.cod_dim:
        raise LegError("is_unitary needs a square total dimension")
    m = x.matrix
    eye = np.eye(m.shape[0])
    return (np.linalg.norm(m.conj().T @ m - eye) < tol
            and np.linalg.norm(m @ m.conj().T - eye) < tol)


def hs_norm(x: LegOperator | np.ndarray) -> float:
    m = x.matrix if isinstance(x, LegOperator) else x
    return float(np.linalg.norm(m))


def hs_inner(x: LegOperator, y: LegOperator) -> complex:
    """trace(x* y), the Hilbert-Schmidt pairing."""
    return complex(np.vdot(x.matrix, y.matrix))
