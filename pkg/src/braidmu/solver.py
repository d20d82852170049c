"""Numerical search for braided multiplicative unitaries.

Candidates are parametrized as exp(i H) with H Hermitian in a constrained
subspace, so every iterate sits exactly on the unitary manifold and the
Pentagon residual is the only acceptance quantity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, expm_frechet
from scipy.optimize import minimize

from . import spans
from .multunitary import MultUnitary, full_certificate, pentagon_residual
from .tensor import LegOperator, LegSignature, Space, tensor_space

__all__ = [
    "DegreePreservingConstraint", "CommutantConstraint", "SearchProblem",
    "SearchResult", "residual_objective", "gradient", "search",
]

TRIVIAL_ORBIT_TOL = 1e-6


class DegreePreservingConstraint:
    """Zero out matrix entries between sectors of different total degree mod m."""

    def __init__(self, modulus: int = 0):
        self.modulus = int(modulus)

    def mask(self, space: Space) -> np.ndarray:
        if space.grading is None:
            raise ValueError("degree-preserving constraint needs a graded space")
        deg = np.asarray(space.grading)
        if self.modulus:
            deg = deg % self.modulus
        return (deg[:, None] == deg[None, :]).astype(float)

    def project(self, space: Space, h: np.ndarray) -> np.ndarray:
        return h * self.mask(space)


class CommutantConstraint:
    """Restrict to Hermitian matrices commuting with every given operator."""

    def __init__(self, operators: list[np.ndarray]):
        self.operators = [np.asarray(m, dtype=complex) for m in operators]

    def conditions(self, dim: int) -> np.ndarray:
        """Stacked real-linear conditions [H, M] = 0 on vectorized H."""
        rows = []
        eye = np.eye(dim)
        for m in self.operators:
            rows.append(np.kron(eye, m.T) - np.kron(m, eye))
        return np.vstack(rows) if rows else np.zeros((0, dim * dim))


def _hermitian_basis(dim: int) -> list[np.ndarray]:
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    s = 1 / np.sqrt(2)
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = e[j, i] = s
            basis.append(e)
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1j * s
            e[j, i] = -1j * s
            basis.append(e)
    return basis


@dataclass
class SearchProblem:
    space: Space
    braiding: object
    constraints: tuple = ()
    seed: int = 0
    restarts: int = 8
    max_iter: int = 200
    target_residual: float = 1e-8

    def __post_init__(self):
        self._param_basis = self._feasible_basis()

    def _feasible_basis(self) -> list[np.ndarray]:
        square = tensor_space(self.space, self.space)
        dim = square.dim
        basis = _hermitian_basis(dim)
        if not self.constraints:
            return basis
        kept = basis
        for c in self.constraints:
            if isinstance(c, DegreePreservingConstraint):
                mask = c.mask(square)
                kept = [b * mask for b in kept]
            elif isinstance(c, CommutantConstraint):
                # give a *-closed family of operators, so Hermitizing the
                # projected generators stays inside the commutant
                cond = c.conditions(dim)
                ker = spans.null_space(cond, scale=1.0)
                kept = [(ker.T @ (ker.conj() @ b.reshape(-1))).reshape(dim, dim)
                        for b in kept]
                kept = [(b + b.conj().T) / 2 for b in kept]
            else:
                raise TypeError(f"unknown constraint {c!r}")
        # re-orthonormalize over the reals so the basis stays Hermitian
        vecs = np.array([b.reshape(-1) for b in kept])
        real = np.hstack([vecs.real, vecs.imag])
        u, s, vh = np.linalg.svd(real, full_matrices=False)
        keep = s > spans.RANK_CUTOFF * s[0] if s.size and s[0] > 0 else []
        out = []
        for i in range(len(s)):
            if not keep[i]:
                continue
            v = vh[i, :dim * dim] + 1j * vh[i, dim * dim:]
            out.append(v.reshape(dim, dim))
        return out

    @property
    def param_count(self) -> int:
        return len(self._param_basis)

    def hermitian(self, params: np.ndarray) -> np.ndarray:
        dim = self.space.dim ** 2
        h = np.zeros((dim, dim), dtype=complex)
        for t, b in zip(params, self._param_basis):
            h = h + t * b
        return (h + h.conj().T) / 2

    def unitary(self, params: np.ndarray) -> np.ndarray:
        return expm(1j * self.hermitian(params))

    def _pentagon_pieces(self):
        l = self.space
        n = l.dim
        c = self.braiding.braid(l, l).matrix
        eye = np.eye(n)
        return n, np.kron(c, eye), np.kron(np.linalg.inv(c), eye)


def _defect(problem: SearchProblem, f: np.ndarray) -> np.ndarray:
    n, c12, cinv12 = problem._pentagon_pieces()
    eye = np.eye(n)
    f12 = np.kron(f, eye)
    f23 = np.kron(eye, f)
    return f23 @ f12 - f12 @ c12 @ f23 @ cinv12 @ f23


def residual_objective(problem: SearchProblem, params: np.ndarray) -> float:
    """Squared Hilbert-Schmidt norm of the Pentagon defect."""
    p = _defect(problem, problem.unitary(params))
    return float(np.vdot(p, p).real)


def gradient(problem: SearchProblem, params: np.ndarray) -> np.ndarray:
    """Exact gradient of the objective via the Frechet derivative of expm."""
    n, c12, cinv12 = problem._pentagon_pieces()
    eye = np.eye(n)
    h = problem.hermitian(params)
    f = expm(1j * h)
    f12 = np.kron(f, eye)
    f23 = np.kron(eye, f)
    p = _defect(problem, f)
    g = np.zeros(problem.param_count)
    for a, b in enumerate(problem._param_basis):
        df = expm_frechet(1j * h, 1j * b, compute_expm=False)
        d12 = np.kron(df, eye)
        d23 = np.kron(eye, df)
        dp = (d23 @ f12 + f23 @ d12
              - d12 @ c12 @ f23 @ cinv12 @ f23
              - f12 @ c12 @ d23 @ cinv12 @ f23
              - f12 @ c12 @ f23 @ cinv12 @ d23)
        g[a] = 2.0 * np.vdot(p, dp).real
    return g


def scalar_orbit_distance(f: np.ndarray) -> float:
    """Hilbert-Schmidt distance to the nearest unimodular multiple of the identity."""
    n = f.shape[0]
    tr = np.trace(f)
    d2 = np.vdot(f, f).real + n - 2.0 * abs(tr)
    return float(np.sqrt(max(d2, 0.0)))


@dataclass(frozen=True)
class SearchResult:
    mu: MultUnitary
    residual: float
    restart: int
    trivial: bool

    @property
    def label(self) -> str:
        return "trivial" if self.trivial else "nontrivial"


def search(problem: SearchProblem) -> list[SearchResult]:
    """Multi-restart descent; only certified unitaries are returned.

    Restart zero starts at the identity, the rest at seeded random points.
    Results are ordered by (residual, restart index), so a fixed seed yields
    an identical list.
    """
    rng = np.random.default_rng(problem.seed)
    results = []
    for r in range(problem.restarts):
        if r == 0:
            x0 = np.zeros(problem.param_count)
        else:
            x0 = rng.normal(scale=1.0, size=problem.param_count)
        opt = minimize(lambda x: residual_objective(problem, x), x0,
                       jac=lambda x: gradient(problem, x),
                       method="L-BFGS-B",
                       options={"maxiter": problem.max_iter, "ftol": 1e-18, "gtol": 1e-14})
        f = problem.unitary(opt.x)
        sig = LegSignature((problem.space, problem.space), (problem.space, problem.space))
        mu = MultUnitary(problem.space, LegOperator(sig, f), problem.braiding)
        residual = pentagon_residual(mu)
        if residual >= problem.target_residual:
            continue
        cert = full_certificate(mu, tol=max(problem.target_residual, 1e-12))
        if not cert.gates_passed:
            continue
        results.append(SearchResult(mu=mu, residual=residual, restart=r,
                                    trivial=scalar_orbit_distance(f) < TRIVIAL_ORBIT_TOL))
    results.sort(key=lambda s: (s.residual, s.restart))
    return results
