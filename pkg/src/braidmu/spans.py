"""Closed linear spans of operator sets in the Hilbert-Schmidt geometry.

Spans are stored as orthonormal bases of vectorized operators (row-major
vectorization, matching the leg convention).  The numerical rank cutoff is
relative: all spans here come from exact algebraic structures, so the
singular spectrum is sharply bimodal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tensor import (LegError, LegOperator, LegSignature, Space, adjoint, compose,
                     identity, tensor, total_dim)

__all__ = [
    "RANK_CUTOFF", "OperatorSpan", "span_of", "span_from_slices", "contains",
    "equals", "projector_distance", "product_span", "adjoint_span", "is_algebra",
    "is_star_closed", "is_nondegenerate", "null_space", "kernel_of_linear_map",
    "crossed_injections", "crossed_product", "crossed_product_commutes",
    "is_relative_multiplier", "Conjugation", "identity_conjugation",
    "CrossedProductExtension", "DecompositionError", "extend_on_crossed_product",
]

RANK_CUTOFF = 1e-9


class DecompositionError(ValueError):
    """An element could not be decomposed over the crossed-product generators."""


@dataclass(frozen=True)
class OperatorSpan:
    """An orthonormal basis of a subspace of operators between two leg lists."""

    domain: tuple[Space, ...]
    codomain: tuple[Space, ...]
    basis: tuple[LegOperator, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return total_dim(self.domain) * total_dim(self.codomain)

    def stack(self) -> np.ndarray:
        """Basis as rows of vectorized operators, shape (rank, ambient_dim)."""
        if not self.basis:
            return np.zeros((0, self.ambient_dim), dtype=complex)
        return np.array([b.matrix.reshape(-1) for b in self.basis])

    def gram_residual(self) -> float:
        b = self.stack()
        return float(np.linalg.norm(b @ b.conj().T - np.eye(self.rank)))


def _vec(op: LegOperator) -> np.ndarray:
    return op.matrix.reshape(-1)


def _unvec(v: np.ndarray, domain: tuple[Space, ...], codomain: tuple[Space, ...]) -> LegOperator:
    sig = LegSignature(domain, codomain)
    return LegOperator(sig, v.reshape(sig.cod_dim, sig.dom_dim))


def span_of(operators: Sequence[LegOperator], cutoff: float = RANK_CUTOFF) -> OperatorSpan:
    """Orthonormalize a list of operators with a rank-revealing SVD."""
    ops = list(operators)
    if not ops:
        raise ValueError("span_of needs at least one operator to fix the signature")
    domain, codomain = ops[0].domain, ops[0].codomain
    for op in ops:
        if op.domain != domain or op.codomain != codomain:
            raise LegError("span_of: mixed signatures")
    a = np.array([_vec(op) for op in ops])
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size and s[0] > 0:
        keep = s > cutoff * s[0]
    else:
        keep = np.zeros(s.shape, dtype=bool)
    basis = tuple(_unvec(vh[i], domain, codomain) for i in range(len(s)) if keep[i])
    return OperatorSpan(domain, codomain, basis)


def span_from_slices(x: LegOperator, side: str, cutoff: float = RANK_CUTOFF) -> OperatorSpan:
    """Span of one-leg slices of a two-by-two leg operator.

    side "right": (id (x) <e_i|) x (id (x) |e_j>) over all basis pairs, an
    operator from the first domain leg to the first codomain leg; "left"
    puts the bras and kets on the first leg instead.
    """
    if len(x.domain) != 2 or len(x.codomain) != 2:
        raise LegError("span_from_slices expects exactly two domain and codomain legs")
    (d1, d2), (c1, c2) = x.domain, x.codomain
    t = x.matrix.reshape(c1.dim, c2.dim, d1.dim, d2.dim)
    if side == "right":
        slices = t.transpose(1, 3, 0, 2).reshape(c2.dim * d2.dim, c1.dim * d1.dim)
        domain, codomain = (d1,), (c1,)
    elif side == "left":
        slices = t.transpose(0, 2, 1, 3).reshape(c1.dim * d1.dim, c2.dim * d2.dim)
        domain, codomain = (d2,), (c2,)
    else:
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    u, s, vh = np.linalg.svd(slices, full_matrices=False)
    keep = s > cutoff * s[0] if s.size and s[0] > 0 else np.zeros(s.shape, bool)
    basis = tuple(_unvec(vh[i], domain, codomain) for i in range(len(s)) if keep[i])
    return OperatorSpan(domain, codomain, basis)


def contains(span: OperatorSpan, x: LegOperator, tol: float = 1e-9) -> bool:
    if x.domain != span.domain or x.codomain != span.codomain:
        raise LegError("contains: signature mismatch")
    v = _vec(x)
    scale = float(np.linalg.norm(v))
    if scale == 0:
        return True
    b = span.stack()
    # rows of b are vdot-orthonormal, so the projector is v |-> b.T (conj(b) v)
    residual = v - b.T @ (b.conj() @ v)
    return float(np.linalg.norm(residual)) < tol * scale


def projector_distance(s1: OperatorSpan, s2: OperatorSpan) -> float:
    """Spectral distance between the orthogonal projectors onto the two spans.

    Computed as the largest sine of a principal angle; 1.0 whenever the ranks
    differ.
    """
    if (s1.domain, s1.codomain) != (s2.domain, s2.codomain):
        raise LegError("projector_distance: signature mismatch")
    if s1.rank != s2.rank:
        return 1.0
    if s1.rank == 0:
        return 0.0
    b1, b2 = s1.stack(), s2.stack()
    r12 = b1 - (b1 @ b2.conj().T) @ b2
    r21 = b2 - (b2 @ b1.conj().T) @ b1
    n12 = np.linalg.svd(r12, compute_uv=False)[0] if r12.size else 0.0
    n21 = np.linalg.svd(r21, compute_uv=False)[0] if r21.size else 0.0
    return float(max(n12, n21))


def equals(s1: OperatorSpan, s2: OperatorSpan, tol: float = 1e-9) -> bool:
    return s1.rank == s2.rank and projector_distance(s1, s2) < tol


def product_span(s1: OperatorSpan, s2: OperatorSpan,
                 cutoff: float = RANK_CUTOFF) -> OperatorSpan:
    """Span of all pairwise products (first factor applied after the second)."""
    if s2.codomain != s1.domain:
        raise LegError("product_span: signatures not composable")
    if not s1.basis or not s2.basis:
        return OperatorSpan(s2.domain, s1.codomain, ())
    products = [compose(a, b) for a in s1.basis for b in s2.basis]
    return span_of(products, cutoff)


def adjoint_span(s: OperatorSpan, cutoff: float = RANK_CUTOFF) -> OperatorSpan:
    if not s.basis:
        return OperatorSpan(s.codomain, s.domain, ())
    return span_of([adjoint(b) for b in s.basis], cutoff)


def _subset_residual(candidates: Sequence[LegOperator], span: OperatorSpan) -> float:
    b = span.stack()
    vecs = [_vec(op) for op in candidates]
    norms = [float(np.linalg.norm(v)) for v in vecs]
    scale = max(norms, default=0.0)
    worst = 0.0
    for v, n in zip(vecs, norms):
        if n <= RANK_CUTOFF * scale:
            # numerically zero at the working scale; trivially contained
            continue
        worst = max(worst, float(np.linalg.norm(v - b.T @ (b.conj() @ v))) / n)
    return worst


def is_algebra(s: OperatorSpan, tol: float = 1e-9) -> bool:
    """Every pairwise product lies back in the span."""
    if s.domain != s.codomain:
        raise LegError("is_algebra expects an endomorphism span")
    products = [compose(a, b) for a in s.basis for b in s.basis]
    return _subset_residual(products, s) < tol


def is_star_closed(s: OperatorSpan, tol: float = 1e-9) -> bool:
    if s.domain != s.codomain:
        raise LegError("is_star_closed expects an endomorphism span")
    return _subset_residual([adjoint(b) for b in s.basis], s) < tol


def is_nondegenerate(s: OperatorSpan, tol: float = 1e-9) -> bool:
    """The vectors {x v} over basis operators x and basis vectors v fill the space."""
    if not s.basis:
        return False
    cols = np.hstack([b.matrix for b in s.basis])
    sv = np.linalg.svd(cols, compute_uv=False)
    rank = int(np.sum(sv > max(tol, RANK_CUTOFF) * sv[0])) if sv[0] > 0 else 0
    return rank == total_dim(s.codomain)


def null_space(t: np.ndarray, cutoff: float = RANK_CUTOFF,
               scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (rows) of the null space at the relative cutoff.

    ``scale`` anchors the cutoff; pass 1.0 when the map is built from
    unit-scale operators so an all-noise matrix counts as zero.
    """
    t = np.asarray(t, dtype=complex)
    if t.size == 0 or not np.any(t):
        return np.eye(t.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(t, full_matrices=True)
    anchor = max(s[0], scale) if scale is not None else s[0]
    rank = int(np.sum(s > cutoff * anchor))
    # t maps conj(vh[j]) to s_j u_j, so the kernel is spanned by the
    # conjugated trailing right-singular rows
    return vh[rank:].conj()


def kernel_of_linear_map(t: np.ndarray, domain: Sequence[Space], codomain: Sequence[Space],
                         cutoff: float = RANK_CUTOFF,
                         scale: float | None = None) -> OperatorSpan:
    """Kernel of an operator-valued linear map given on vectorized operators."""
    domain, codomain = tuple(domain), tuple(codomain)
    vecs = null_space(t, cutoff, scale)
    basis = tuple(_unvec(v, domain, codomain) for v in vecs)
    return OperatorSpan(domain, codomain, basis)


# ---------------------------------------------------------------------------
# crossed products


def crossed_injections(variant: str, provider, legs1: Sequence[Space],
                       legs2: Sequence[Space]) -> tuple[Callable, Callable]:
    """The two injections of a crossed product on legs1 (x) legs2.

    variant "hbt":  a |-> c_{H2,H1} (1 (x) a) c_{H2,H1}^{-1},  b |-> 1 (x) b
    variant "habt": a |-> c_{H1,H2}^{-1} (1 (x) a) c_{H1,H2},  b |-> 1 (x) b
    variant "bt":   a |-> a (x) 1,  b |-> c_{H1,H2}^{-1} (b (x) 1) c_{H1,H2}
    """
    from .braiding import braid_tensor

    legs1, legs2 = tuple(legs1), tuple(legs2)
    id1, id2 = identity(legs1), identity(legs2)

    if variant == "hbt":
        c = braid_tensor(provider, legs2, legs1)  # H2 (x) H1 -> H1 (x) H2
        cinv = LegOperator(LegSignature(c.codomain, c.domain), np.linalg.inv(c.matrix))
        alpha = lambda a: compose(compose(c, tensor(id2, a)), cinv)
        beta = lambda b: tensor(id1, b)
    elif variant == "habt":
        c = braid_tensor(provider, legs1, legs2)  # H1 (x) H2 -> H2 (x) H1
        cinv = LegOperator(LegSignature(c.codomain, c.domain), np.linalg.inv(c.matrix))
        alpha = lambda a: compose(compose(cinv, tensor(id2, a)), c)
        beta = lambda b: tensor(id1, b)
    elif variant == "bt":
        c = braid_tensor(provider, legs1, legs2)
        cinv = LegOperator(LegSignature(c.codomain, c.domain), np.linalg.inv(c.matrix))
        alpha = lambda a: tensor(a, id2)
        beta = lambda b: compose(compose(cinv, tensor(b, id1)), c)
    else:
        raise ValueError(f"unknown crossed product variant {variant!r}")
    return alpha, beta


def crossed_product(s1: OperatorSpan, s2: OperatorSpan, provider, variant: str,
                    cutoff: float = RANK_CUTOFF) -> OperatorSpan:
    """Orthonormal span of all products inj1(a) inj2(b) over the two bases."""
    alpha, beta = crossed_injections(variant, provider, s1.domain, s2.domain)
    products = [compose(alpha(a), beta(b)) for a in s1.basis for b in s2.basis]
    return span_of(products, cutoff)


def crossed_product_commutes(s1: OperatorSpan, s2: OperatorSpan, provider, variant: str,
                             tol: float = 1e-9) -> bool:
    """Span of alpha-then-beta products equals the span of beta-then-alpha products."""
    alpha, beta = crossed_injections(variant, provider, s1.domain, s2.domain)
    ab = span_of([compose(alpha(a), beta(b)) for a in s1.basis for b in s2.basis])
    ba = span_of([compose(beta(b), alpha(a)) for a in s1.basis for b in s2.basis])
    return equals(ab, ba, tol)


def is_relative_multiplier(s: OperatorSpan, x: LegOperator, tol: float = 1e-9) -> bool:
    """x b and b x stay in the span for every basis element b."""
    if s.domain != s.codomain:
        raise LegError("is_relative_multiplier expects an endomorphism span")
    moved = [compose(x, b) for b in s.basis] + [compose(b, x) for b in s.basis]
    return _subset_residual(moved, s) < tol


# ---------------------------------------------------------------------------
# morphism extension on crossed products


@dataclass(frozen=True)
class Conjugation:
    """A map a |-> V (id (x) a) V* (side "left") or a |-> V (a (x) id) V* (side "right").

    V is an isometry from aux-legs-and-source (side "left") or
    source-and-aux-legs (side "right") onto the target legs.
    """

    v: LegOperator
    side: str = "left"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    @property
    def target(self) -> tuple[Space, ...]:
        return self.v.codomain

    def apply(self, a: LegOperator) -> LegOperator:
        if self.side == "left":
            aux = self.v.domain[:-len(a.domain)] if len(a.domain) else self.v.domain
            inner = tensor(identity(aux), a) if aux else a
        else:
            aux = self.v.domain[len(a.domain):]
            inner = tensor(a, identity(aux)) if aux else a
        return compose(compose(self.v, inner), adjoint(self.v))


def identity_conjugation(legs: Sequence[Space]) -> Conjugation:
    return Conjugation(identity(tuple(legs)), "left")


class CrossedProductExtension:
    """Evaluates (f x g) on a crossed product by decompose-and-map.

    Elements are decomposed over a spanning subset of the generator products
    inj1(a_i) inj2(b_j), picked greedily in a deterministic order; each
    selected product is mapped to inj1'(f(a_i)) inj2'(g(b_j)) on the target
    legs.  Well-definedness is the caller's duty to check, e.g. by comparing
    forward and reverse selection orders.
    """

    def __init__(self, s1: OperatorSpan, s2: OperatorSpan, provider, variant: str,
                 f: Conjugation | None, g: Conjugation | None,
                 order: str = "forward", cutoff: float = RANK_CUTOFF):
        alpha, beta = crossed_injections(variant, provider, s1.domain, s2.domain)
        t1 = f.target if f is not None else s1.domain
        t2 = g.target if g is not None else s2.domain
        alpha2, beta2 = crossed_injections(variant, provider, t1, t2)
        pairs = [(i, j) for i in range(s1.rank) for j in range(s2.rank)]
        if order == "reverse":
            pairs = pairs[::-1]
        elif order != "forward":
            raise ValueError("order must be 'forward' or 'reverse'")

        # injected images are reused across many pairs; conjugate each factor once
        src_a = [alpha(a) for a in s1.basis]
        src_b = [beta(b) for b in s2.basis]
        tgt_a = [alpha2(f.apply(a) if f is not None else a) for a in s1.basis]
        tgt_b = [beta2(g.apply(b) if g is not None else b) for b in s2.basis]

        src_vecs, mapped, q_rows = [], [], []
        for (i, j) in pairs:
            v = _vec(compose(src_a[i], src_b[j]))
            n = np.linalg.norm(v)
            if n == 0:
                continue
            r = v.copy()
            for q in q_rows:
                r -= q * (q.conj() @ r)
            if np.linalg.norm(r) <= cutoff * n:
                continue
            q_rows.append(r / np.linalg.norm(r))
            src_vecs.append(v)
            mapped.append(compose(tgt_a[i], tgt_b[j]))
        if not src_vecs:
            raise DecompositionError("crossed product has no nonzero generators")
        self.source_domain = s1.domain + s2.domain
        self.target_domain = t1 + t2
        self._v = np.array(src_vecs).T                      # ambient x r
        self._q, self._r = np.linalg.qr(self._v)            # thin QR for least squares
        self._mapped = mapped

    def apply(self, x: LegOperator, tol: float = 1e-9) -> LegOperator:
        if x.domain != self.source_domain or x.codomain != self.source_domain:
            raise LegError("element signature does not match the crossed product")
        vx = _vec(x)
        coeffs = np.linalg.solve(self._r, self._q.conj().T @ vx)
        residual = np.linalg.norm(self._v @ coeffs - vx)
        scale = max(np.linalg.norm(vx), 1.0)
        if residual > tol * scale:
            raise DecompositionError(
                f"element lies outside the crossed product (residual {residual:.3e})")
        out = sum(c * m.matrix for c, m in zip(coeffs, self._mapped))
        sig = LegSignature(self.target_domain, self.target_domain)
        return LegOperator(sig, out)


def extend_on_crossed_product(f: Conjugation | None, g: Conjugation | None,
                              s1: OperatorSpan, s2: OperatorSpan, provider, variant: str,
                              x: LegOperator, tol: float = 1e-9) -> LegOperator:
    """Apply (f x g) to an element of the crossed product of s1 and s2.

    The result is computed from two independent decompositions (forward and
    reverse generator order); a mismatch beyond tol means the extension is
    not well defined on this input and raises :class:`DecompositionError`.
    """
    fwd = CrossedProductExtension(s1, s2, provider, variant, f, g, "forward")
    rev = CrossedProductExtension(s1, s2, provider, variant, f, g, "reverse")
    y1 = fwd.apply(x, tol)
    y2 = rev.apply(x, tol)
    dev = float(np.linalg.norm(y1.matrix - y2.matrix))
    if dev > tol * max(np.linalg.norm(y1.matrix), 1.0):
        raise DecompositionError(
            f"extension value depends on the decomposition (deviation {dev:.3e})")
    return y1
