"""Corepresentations, representations, Yetter-Drinfeld modules, and the
derived braiding on the module category.

Diagram transcriptions follow one fixed routing convention (documented at
each residual); the trivial and finite-group instances pin them down in the
test suite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import spans
from .braiding import BraidingRegularityReport, ExplicitBraiding, braiding_regularity
from .multunitary import MultUnitary, commutant_dimension
from .spans import OperatorSpan, span_from_slices
from .tensor import (LegOperator, LegSignature, Space, apply_distant, compose,
                     embed_adjacent, extract_distant, is_unitary, tensor_space)

__all__ = [
    "Corep", "Rep", "YDModule", "ExtractionError", "corep_residual", "rep_residual",
    "yd_residual", "tensor_corep", "tensor_rep", "tensor_yd", "pairing_unitary",
    "yd_braiding", "yd_braiding_provider", "yd_braiding_regularity", "corep_slice_span",
]


class ExtractionError(ValueError):
    """A distant-leg factorization exceeded its tolerance."""


@dataclass(frozen=True)
class Corep:
    """A pair (H, U) with U unitary on H (x) L."""
    space: Space
    op: LegOperator


@dataclass(frozen=True)
class Rep:
    """A pair (H, V) with V unitary on L (x) H."""
    space: Space
    op: LegOperator


@dataclass(frozen=True)
class YDModule:
    space: Space
    corep: LegOperator
    rep: LegOperator

    def as_corep(self) -> Corep:
        return Corep(self.space, self.corep)

    def as_rep(self) -> Rep:
        return Rep(self.space, self.rep)


def corep_residual(corep: Corep, mu: MultUnitary) -> float:
    """|| F23 U12 - U12 U13 F23 || on H (x) L (x) L, the over route on U13."""
    h, l = corep.space, mu.space
    ctx = (h, l, l)
    u12 = embed_adjacent(corep.op, ctx, 1).matrix
    f23 = embed_adjacent(mu.op, ctx, 2).matrix
    u13 = apply_distant(corep.op, ctx, (1, 3), "over", mu.braiding).matrix
    return float(np.linalg.norm(f23 @ u12 - u12 @ u13 @ f23))


def rep_residual(rep: Rep, mu: MultUnitary) -> float:
    """|| V23 F12 - F12 V13 V23 || on L (x) L (x) H, the over route on V13."""
    h, l = rep.space, mu.space
    ctx = (l, l, h)
    v23 = embed_adjacent(rep.op, ctx, 2).matrix
    f12 = embed_adjacent(mu.op, ctx, 1).matrix
    v13 = apply_distant(rep.op, ctx, (1, 3), "over", mu.braiding).matrix
    return float(np.linalg.norm(v23 @ f12 - f12 @ v13 @ v23))


def yd_residual(module: YDModule, mu: MultUnitary) -> float:
    """|| V12 F13-over U23 - U23 F13-under V12 || on L (x) H (x) L."""
    h, l = module.space, mu.space
    ctx = (l, h, l)
    v12 = embed_adjacent(module.rep, ctx, 1).matrix
    u23 = embed_adjacent(module.corep, ctx, 2).matrix
    f_over = apply_distant(mu.op, ctx, (1, 3), "over", mu.braiding).matrix
    f_under = apply_distant(mu.op, ctx, (1, 3), "under", mu.braiding).matrix
    return float(np.linalg.norm(v12 @ f_over @ u23 - u23 @ f_under @ v12))


def _regroup_first_two(op: LegOperator, h12: Space) -> LegOperator:
    """View an operator on (H1, H2, X) as an operator on (H1*H2, X)."""
    rest = op.domain[2:]
    return op.with_legs((h12,) + rest, (h12,) + op.codomain[2:])


def tensor_corep(c1: Corep, c2: Corep, mu: MultUnitary, tol: float = 1e-9) -> Corep:
    """Corep on H1 (x) H2: U1 at legs (1,3) over the middle, then U2 at (2,3)."""
    l = mu.space
    ctx = (c1.space, c2.space, l)
    u2 = embed_adjacent(c2.op, ctx, 2)
    u1 = apply_distant(c1.op, ctx, (1, 3), "over", mu.braiding)
    h12 = tensor_space(c1.space, c2.space)
    out = Corep(h12, _regroup_first_two(compose(u1, u2), h12))
    res = corep_residual(out, mu)
    if res > tol:
        raise ValueError(f"tensor corep fails its residual: {res:.3e}")
    return out


def tensor_rep(r1: Rep, r2: Rep, mu: MultUnitary, tol: float = 1e-9) -> Rep:
    """Rep on H1 (x) H2: V2 at legs (1,3) over the middle, then V1 at (1,2)."""
    l = mu.space
    ctx = (l, r1.space, r2.space)
    v2 = apply_distant(r2.op, ctx, (1, 3), "over", mu.braiding)
    v1 = embed_adjacent(r1.op, ctx, 1)
    h12 = tensor_space(r1.space, r2.space)
    out = Rep(h12, compose(v1, v2).with_legs((l, h12), (l, h12)))
    res = rep_residual(out, mu)
    if res > tol:
        raise ValueError(f"tensor rep fails its residual: {res:.3e}")
    return out


def _yd_tensor_rep(r1: Rep, r2: Rep, mu: MultUnitary) -> Rep:
    # The module-category tensor square routes V2 under the middle strand and
    # applies V1 first; equality with tensor_rep holds by naturality and is
    # asserted in the tests rather than assumed here.
    l = mu.space
    ctx = (l, r1.space, r2.space)
    v1 = embed_adjacent(r1.op, ctx, 1)
    v2 = apply_distant(r2.op, ctx, (1, 3), "under", mu.braiding)
    h12 = tensor_space(r1.space, r2.space)
    out = compose(v2, v1)
    return Rep(h12, out.with_legs((l, h12), (l, h12)))


def tensor_yd(m1: YDModule, m2: YDModule, mu: MultUnitary,
              tol: float = 1e-9) -> YDModule:
    """Tensor product module; the output is revalidated against its residuals."""
    c = tensor_corep(m1.as_corep(), m2.as_corep(), mu)
    r = _yd_tensor_rep(m1.as_rep(), m2.as_rep(), mu)
    out = YDModule(c.space, c.op, r.op)
    for name, res in (("corep", corep_residual(c, mu)),
                      ("rep", rep_residual(r, mu)),
                      ("yd", yd_residual(out, mu))):
        if res > tol:
            raise ValueError(f"tensor module fails its {name} residual: {res:.3e}")
    return out


def pairing_unitary(rep: Rep, corep: Corep, mu: MultUnitary,
                    tol: float = 1e-9) -> LegOperator:
    """The unique unitary on H (x) K whose (1,3)-embedding is U*12 V23 U12 V*23.

    Requires a trivial commutant (dimension one); a violation is reported as
    a warning since the extraction itself may still succeed.
    """
    h, k, l = corep.space, rep.space, mu.space
    ctx = (h, l, k)
    u12 = embed_adjacent(corep.op, ctx, 1).matrix
    v23 = embed_adjacent(rep.op, ctx, 2).matrix
    r = u12.conj().T @ v23 @ u12 @ v23.conj().T
    rop = LegOperator(LegSignature(ctx, ctx), r)
    if commutant_dimension(mu) != 1:
        warnings.warn("pairing_unitary: the commutant is not trivial, the "
                      "factorization may not be unique", stacklevel=2)
    z, residual = extract_distant(rop, ctx, (1, 3), "over", mu.braiding)
    if residual > tol:
        raise ExtractionError(
            f"pairing does not factor through the outer legs (residual {residual:.3e})")
    if not is_unitary(z, max(tol, 1e-9)):
        raise ExtractionError("extracted pairing is not unitary")
    return z


def yd_braiding(m1: YDModule, m2: YDModule, mu: MultUnitary,
                tol: float = 1e-9) -> LegOperator:
    """The module-category braiding H (x) K -> K (x) H: inverse ambient braiding
    composed with the rep-corep pairing."""
    h, k = m1.space, m2.space
    pairing = pairing_unitary(m2.as_rep(), m1.as_corep(), mu, tol)
    cinv = mu.braiding.braid_inverse(k, h)  # H (x) K -> K (x) H
    return compose(cinv, pairing)


def yd_braiding_provider(modules: list[YDModule], mu: MultUnitary,
                         include_tensors: bool = True, tol: float = 1e-9) -> ExplicitBraiding:
    """Explicit braiding table over the given modules (and their pairwise tensors).

    Including tensor modules makes the hexagon identities checkable against
    genuinely independent pairings.
    """
    objects = list(modules)
    if include_tensors:
        for a in modules:
            for b in modules:
                objects.append(tensor_yd(a, b, mu, tol))
    provider = ExplicitBraiding()
    base_ids = {m.space.id for m in modules}
    for a in objects:
        for b in objects:
            if a.space.id not in base_ids and b.space.id not in base_ids:
                continue  # tensor-tensor pairs are not needed for hexagon checks
            provider.register(yd_braiding(a, b, mu, tol))
    return provider


def yd_braiding_regularity(m1: YDModule, m2: YDModule, mu: MultUnitary,
                           tol: float = 1e-9) -> BraidingRegularityReport:
    """Slice-span ranks of the module braiding; full rank on regular inputs."""
    phi = yd_braiding(m1, m2, mu, tol)
    provider = ExplicitBraiding()
    provider.register(phi)
    return braiding_regularity(provider, m1.space, m2.space)


def corep_slice_span(corep: Corep, mu: MultUnitary,
                     cutoff: float = spans.RANK_CUTOFF) -> OperatorSpan:
    """Right slices of c^{-1}_{L,H} U, operators from H to L; full rank when the
    ambient data is regular."""
    h, l = corep.space, mu.space
    cinv = mu.braiding.braid_inverse(l, h)  # H (x) L -> L (x) H
    return span_from_slices(compose(cinv, corep.op), "right", cutoff)
