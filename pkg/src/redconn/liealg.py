"""Lie algebras over structure constants, with optional matrix realizations.

An algebra is stored as its dimension n together with the rank-3 array of
structure constants ``c[i, j, k]``, the e_k-coefficient of [e_i, e_j].  The
named catalog algebras also carry a faithful matrix realization, which powers
the exponential map and the adjoint/coadjoint representations of the
corresponding matrix group.

Conventions used throughout the library:

- ``coad_star(X, xi)`` is the covector ξ∘ad(X), i.e. Y ↦ ⟨ξ, [X, Y]⟩.
- ``Coad(g) = Ad(g⁻¹)ᵀ`` on components, so that the momentum map of the
  lifted left action, (g, ξ) ↦ Coad(g)ξ, is equivariant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .errors import ConfigError, NoRealization, NonReductiveStabilizer

JACOBI_TOL = 1e-12
REALIZATION_TOL = 1e-12
GROUP_MAT_TOL = 1e-9
COMPLEMENT_TOL = 1e-10


@dataclass(frozen=True)
class LieAlgebra:
    """A finite-dimensional real Lie algebra given by structure constants.

    Attributes:
        dim: dimension n of the algebra.
        c: (n, n, n) array with ``c[i, j, k]`` the e_k-coefficient of [e_i, e_j].
        name: optional label.
        realization: optional (n, n_rep, n_rep) stack of matrices realizing the
            basis, with matrix commutators reproducing ``c``.
        det_one: group elements of the realization must have determinant 1.
        orthogonal: group elements of the realization must be orthogonal.
    """

    dim: int
    c: np.ndarray
    name: str | None = None
    realization: np.ndarray | None = None
    det_one: bool = False
    orthogonal: bool = False

    @property
    def has_realization(self) -> bool:
        return self.realization is not None

    def require_realization(self) -> np.ndarray:
        if self.realization is None:
            raise NoRealization(
                f"algebra {self.name or '<anonymous>'} carries no matrix realization"
            )
        return self.realization

    def validate(self) -> None:
        """Check antisymmetry (exact), the Jacobi identity, and the realization."""
        c = self.c
        n = self.dim
        if c.shape != (n, n, n):
            raise ValueError(f"structure constants have shape {c.shape}, expected {(n,) * 3}")
        if not np.all(c == -c.transpose(1, 0, 2)):
            raise ValueError("structure constants are not antisymmetric in the first two slots")
        # cyclic sum of [[e_i, e_j], e_k]
        t = np.einsum("ijl,lkm->ijkm", c, c)
        jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        defect = float(np.max(np.abs(jac))) if n else 0.0
        if defect > JACOBI_TOL:
            raise ValueError(f"Jacobi defect {defect:.3e} exceeds {JACOBI_TOL:.0e}")
        if self.realization is not None:
            rho = self.realization
            if rho.shape[0] != n or rho.shape[1] != rho.shape[2]:
                raise ValueError(f"realization has shape {rho.shape}, expected (n, m, m)")
            comm = np.einsum("iab,jbc->ijac", rho, rho) - np.einsum("jab,ibc->ijac", rho, rho)
            rebuilt = np.einsum("ijk,kab->ijab", c, rho)
            defect = float(np.max(np.abs(comm - rebuilt)))
            if defect > REALIZATION_TOL:
                raise ValueError(
                    f"matrix commutators deviate from structure constants by {defect:.3e}"
                )

    def bracket(self, X, Y) -> np.ndarray:
        """Evaluate [X, Y] from the structure constants.

        Accumulates over the strict upper triangle so that antisymmetry holds
        exactly in floating point: bracket(X, Y) == -bracket(Y, X) bitwise.
        """
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if X.shape != (self.dim,) or Y.shape != (self.dim,):
            raise ValueError(f"bracket arguments must have length {self.dim}")
        W = np.outer(X, Y)
        anti = np.triu(W - W.T, k=1)
        return np.einsum("ij,ijk->k", anti, self.c)

    def ad(self, X) -> np.ndarray:
        """Matrix of ad(X): Y ↦ [X, Y] in the chosen basis."""
        X = np.asarray(X, dtype=float)
        return np.einsum("ijk,i->kj", self.c, X)

    def coad_star(self, X, xi) -> np.ndarray:
        """The covector ξ∘ad(X), defined by ⟨ξ∘ad(X), Y⟩ = ⟨ξ, [X, Y]⟩."""
        X = np.asarray(X, dtype=float)
        xi = np.asarray(xi, dtype=float)
        if X.shape != (self.dim,) or xi.shape != (self.dim,):
            raise ValueError(f"coad_star arguments must have length {self.dim}")
        return self.ad(X).T @ xi

    def bracket_pairing(self, xi) -> np.ndarray:
        """Antisymmetric matrix K(ξ) with K[i, j] = ⟨ξ, [e_i, e_j]⟩."""
        xi = np.asarray(xi, dtype=float)
        return np.einsum("ijk,k->ij", self.c, xi)

    def matrix_coords(self, M, tol: float = 1e-8) -> np.ndarray:
        """Coordinates of a realization matrix in the algebra basis."""
        rho = self.require_realization()
        R = rho.reshape(self.dim, -1).T
        coords, *_ = np.linalg.lstsq(R, np.asarray(M, dtype=float).ravel(), rcond=None)
        residual = np.linalg.norm(R @ coords - np.asarray(M, dtype=float).ravel())
        scale = max(1.0, float(np.linalg.norm(M)))
        if residual > tol * scale:
            raise ValueError(f"matrix is not in the realized algebra (residual {residual:.3e})")
        return coords


def bracket(a: LieAlgebra, X, Y) -> np.ndarray:
    return a.bracket(X, Y)


def coad_star(a: LieAlgebra, X, xi) -> np.ndarray:
    return a.coad_star(X, xi)


def stabilizer_algebra(a: LieAlgebra, mu) -> np.ndarray:
    """Orthonormal basis of the stabilizer {Y | μ∘ad(Y) = 0} (shape (n, k))."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (a.dim,):
        raise ValueError(f"mu must have length {a.dim}")
    # row j of the map Y ↦ μ∘ad(Y) is ⟨μ, [e_i, e_j]⟩ contracted over i
    return linalg.nullspace(a.bracket_pairing(mu).T)


def _is_subalgebra(a: LieAlgebra, basis: np.ndarray, tol: float) -> bool:
    if basis.shape[1] == 0:
        return True
    P = linalg.projector(basis)
    for i in range(basis.shape[1]):
        for j in range(i + 1, basis.shape[1]):
            b = a.bracket(basis[:, i], basis[:, j])
            if np.linalg.norm(b - P @ b) > tol * max(1.0, np.linalg.norm(b)):
                return False
    return True


def _stability_defect(a: LieAlgebra, g_mu: np.ndarray, m: np.ndarray) -> float:
    """max distance of [g_mu, m] from the span of m."""
    if g_mu.shape[1] == 0 or m.shape[1] == 0:
        return 0.0
    P_m = linalg.projector(m)
    defect = 0.0
    for i in range(g_mu.shape[1]):
        for j in range(m.shape[1]):
            b = a.bracket(g_mu[:, i], m[:, j])
            defect = max(defect, float(np.max(np.abs(b - P_m @ b))))
    return defect


def reductive_complement(a: LieAlgebra, g_mu, tol: float = COMPLEMENT_TOL) -> np.ndarray:
    """An ad(g_mu)-stable complement m with g = g_mu ⊕ m.

    Prefers the Euclidean orthogonal complement when that happens to be
    stable, so the output is deterministic; otherwise solves the linear
    system for an equivariant projection onto g_mu and returns its kernel.

    Raises:
        NonReductiveStabilizer: if no stable complement exists.
    """
    g_mu = np.atleast_2d(np.asarray(g_mu, dtype=float))
    n, k = g_mu.shape
    if n != a.dim:
        raise ValueError("stabilizer basis has wrong ambient dimension")
    if not _is_subalgebra(a, g_mu, 1e-10):
        raise ValueError("supplied basis does not span a subalgebra")
    if k == 0:
        return np.eye(n)
    if k == n:
        return np.zeros((n, 0))

    ortho = linalg.nullspace(g_mu.T)
    if _stability_defect(a, g_mu, ortho) <= tol:
        return ortho

    # Equivariant projection pi: range(pi) = g_mu, pi fixes g_mu, and
    # pi ad(Y) = ad(Y) pi for Y in g_mu.  Its kernel is the stable complement.
    # Unknown pi is vectorized row-major, so vec(A pi B) = (A ⊗ Bᵀ) vec(pi).
    H = linalg.orthonormal_columns(g_mu)
    P_h = H @ H.T
    eye = np.eye(n)
    A_blocks = [np.kron(eye, H[:, i][None, :]) for i in range(k)]  # pi @ H_i = H_i
    A_blocks.append(np.kron(eye - P_h, eye))                       # (I - P_h) pi = 0
    rhs = [H[:, i] for i in range(k)] + [np.zeros(n * n)]
    for i in range(k):  # pi ad(Y) - ad(Y) pi = 0
        adY = a.ad(H[:, i])
        A_blocks.append(np.kron(eye, adY.T) - np.kron(adY, eye))
        rhs.append(np.zeros(n * n))
    A = np.vstack(A_blocks)
    b = np.concatenate(rhs)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ sol - b))
    if residual > 1e-8:
        raise NonReductiveStabilizer(
            f"no ad-stable complement: equivariant projection residual {residual:.3e}"
        )
    pi = sol.reshape(n, n)
    m = linalg.nullspace(pi)
    if m.shape[1] != n - k or linalg.rank(np.hstack([g_mu, m])) != n:
        raise NonReductiveStabilizer("equivariant projection produced a degenerate kernel")
    if _stability_defect(a, g_mu, m) > tol:
        raise NonReductiveStabilizer("projection kernel is not ad-stable within tolerance")
    return m


# --- matrix group machinery -------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """A group element in the matrix realization of an algebra."""

    algebra: LieAlgebra
    mat: np.ndarray

    def validate(self, tol: float = GROUP_MAT_TOL) -> None:
        M = self.mat
        if self.algebra.det_one and abs(np.linalg.det(M) - 1.0) > tol:
            raise ValueError(f"determinant {np.linalg.det(M):.12f} deviates from 1")
        if self.algebra.orthogonal:
            defect = float(np.max(np.abs(M.T @ M - np.eye(M.shape[0]))))
            if defect > tol:
                raise ValueError(f"orthogonality defect {defect:.3e}")

    def inverse(self) -> "GroupElement":
        return GroupElement(self.algebra, np.linalg.inv(self.mat))


def identity_element(a: LieAlgebra) -> GroupElement:
    rho = a.require_realization()
    return GroupElement(a, np.eye(rho.shape[1]))


def group_exp(a: LieAlgebra, X) -> GroupElement:
    """exp of the algebra element with coordinates X, in the realization."""
    rho = a.require_realization()
    X = np.asarray(X, dtype=float)
    g = GroupElement(a, scipy.linalg.expm(np.einsum("i,iab->ab", X, rho)))
    g.validate()
    return g


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    return GroupElement(g1.algebra, g1.mat @ g2.mat)


def adjoint_matrix(g: GroupElement) -> np.ndarray:
    """Matrix of Ad(g) on the algebra basis, via conjugation in the realization."""
    a = g.algebra
    rho = a.require_realization()
    g_inv = np.linalg.inv(g.mat)
    cols = [a.matrix_coords(g.mat @ rho[i] @ g_inv) for i in range(a.dim)]
    return np.column_stack(cols)


def coadjoint_matrix(g: GroupElement) -> np.ndarray:
    """Matrix of Coad(g) = Ad(g⁻¹)ᵀ on covector components."""
    return adjoint_matrix(g.inverse()).T


# --- named catalog -----------------------------------------------------------


def _finalize(a: LieAlgebra) -> LieAlgebra:
    a.c.setflags(write=False)
    if a.realization is not None:
        a.realization.setflags(write=False)
    a.validate()
    return a


def so3() -> LieAlgebra:
    """Rotations of R^3; [e1, e2] = e3 cyclically."""
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    rho = np.zeros((3, 3, 3))
    for k in range(3):
        for i in range(3):
            for j in range(3):
                rho[k, i, j] = -_levi_civita(k, i, j)
    return _finalize(LieAlgebra(3, c, "so3", rho, det_one=True, orthogonal=True))


def _levi_civita(i: int, j: int, k: int) -> float:
    return {(0, 1, 2): 1.0, (1, 2, 0): 1.0, (2, 0, 1): 1.0,
            (0, 2, 1): -1.0, (2, 1, 0): -1.0, (1, 0, 2): -1.0}.get((i, j, k), 0.0)


def _realify(M: np.ndarray) -> np.ndarray:
    """Complex m x m matrix A + iB to the real 2m x 2m block matrix [[A, -B], [B, A]]."""
    A, B = M.real, M.imag
    return np.block([[A, -B], [B, A]])


def su2() -> LieAlgebra:
    """su(2) with basis -i σ_j / 2, realified to 4x4 real matrices."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    rho = np.stack([_realify(-0.5j * s) for s in (sx, sy, sz)])
    c = so3().c.copy()  # same bracket table: [X1, X2] = X3 cyclically
    return _finalize(LieAlgebra(3, c, "su2", rho, det_one=True, orthogonal=True))


def sl2r() -> LieAlgebra:
    """sl(2, R) with basis (H, E, F): [H,E] = 2E, [H,F] = -2F, [E,F] = H."""
    c = np.zeros((3, 3, 3))
    c[0, 1, 1], c[1, 0, 1] = 2.0, -2.0
    c[0, 2, 2], c[2, 0, 2] = -2.0, 2.0
    c[1, 2, 0], c[2, 1, 0] = 1.0, -1.0
    rho = np.stack([
        np.array([[1.0, 0.0], [0.0, -1.0]]),
        np.array([[0.0, 1.0], [0.0, 0.0]]),
        np.array([[0.0, 0.0], [1.0, 0.0]]),
    ])
    return _finalize(LieAlgebra(3, c, "sl2r", rho, det_one=True))


def heis3() -> LieAlgebra:
    """Heisenberg algebra (X, Y, Z): [X, Y] = Z, Z central."""
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    rho = np.zeros((3, 3, 3))
    rho[0, 0, 1] = 1.0
    rho[1, 1, 2] = 1.0
    rho[2, 0, 2] = 1.0
    return _finalize(LieAlgebra(3, c, "heis3", rho, det_one=True))


def se2() -> LieAlgebra:
    """Euclidean motions of the plane (J, P1, P2): [J,P1] = P2, [J,P2] = -P1."""
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    c[0, 2, 1], c[2, 0, 1] = -1.0, 1.0
    rho = np.zeros((3, 3, 3))
    rho[0] = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    rho[1, 0, 2] = 1.0
    rho[2, 1, 2] = 1.0
    return _finalize(LieAlgebra(3, c, "se2", rho, det_one=True))


def abelian(n: int) -> LieAlgebra:
    """Abelian algebra of dimension n, realized by commuting nilpotent matrices."""
    if n < 1:
        raise ValueError("abelian dimension must be positive")
    rho = np.zeros((n, n + 1, n + 1))
    for i in range(n):
        rho[i, i, n] = 1.0
    return _finalize(LieAlgebra(n, np.zeros((n, n, n)), f"abelian({n})", rho, det_one=True))


_CATALOG = {"so3": so3, "su2": su2, "sl2r": sl2r, "heis3": heis3, "se2": se2}


def named_algebra(name: str) -> LieAlgebra:
    """Look up a catalog algebra by name; accepts ``abelian(n)``."""
    key = name.strip().lower()
    if key in _CATALOG:
        return _CATALOG[key]()
    if key.startswith("abelian(") and key.endswith(")"):
        try:
            return abelian(int(key[len("abelian("):-1]))
        except ValueError as exc:
            raise ConfigError(f"bad abelian dimension in {name!r}") from exc
    raise ConfigError(f"unknown algebra {name!r}; known: {sorted(_CATALOG)} and abelian(n)")


def algebra_from_json(doc) -> LieAlgebra:
    """Build an algebra from a JSON document or dict.

    Expected shape: ``{"dim": n, "brackets": [[i, j, [k, coeff], ...], ...],
    "realization": [matrix, ...]?}`` with 0-based indices.  Antisymmetric
    counterparts are filled in automatically.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dim" not in doc:
        raise ConfigError("algebra document must be an object with a 'dim' key")
    try:
        n = int(doc["dim"])
        c = np.zeros((n, n, n))
        for entry in doc.get("brackets", []):
            i, j = int(entry[0]), int(entry[1])
            for k, coeff in entry[2:]:
                c[i, j, int(k)] = float(coeff)
                c[j, i, int(k)] = -float(coeff)
        realization = None
        if doc.get("realization") is not None:
            realization = np.asarray(doc["realization"], dtype=float)
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"malformed algebra document: {exc}") from exc
    a = LieAlgebra(n, c, doc.get("name"), realization,
                   det_one=bool(doc.get("det_one", False)),
                   orthogonal=bool(doc.get("orthogonal", False)))
    try:
        return _finalize(a)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
