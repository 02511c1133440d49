"""Coadjoint orbit charts and the Kirillov-Kostant-Souriau form.

The reduced manifold is represented concretely as the coadjoint orbit through
μ, with the quotient map realized by (g, μ) ↦ Coad(g)μ.  A chart is built
from a complement m of the stabilizer: chart coordinates t parametrize
ν(t) = Coad(exp(Σ t_a E_a))μ together with the section (exp(Σ t_a E_a), μ)
into the momentum level set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .errors import NotTangent, RankLoss
from .liealg import GroupElement, LieAlgebra, coadjoint_matrix, compose

TANGENT_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class OrbitChart:
    """Exponential chart on the coadjoint orbit through mu.

    ``m_basis`` holds the complement directions as columns; the chart map is
    t ↦ Coad(exp(Σ t_a E_a))μ and the section map t ↦ (exp(Σ t_a E_a), μ).
    """

    algebra: LieAlgebra
    mu: np.ndarray
    m_basis: np.ndarray
    radius: float = 1.0

    @property
    def dim(self) -> int:
        return self.m_basis.shape[1]

    def _rho_combo(self, t: np.ndarray) -> np.ndarray:
        rho = self.algebra.require_realization()
        coords = self.m_basis @ t
        return np.einsum("i,iab->ab", coords, rho)

    def section_element(self, t, fiber: GroupElement | None = None) -> GroupElement:
        """Group element exp(Σ t_a E_a), optionally right-multiplied by a
        stabilizer element to move along the fiber."""
        t = np.asarray(t, dtype=float)
        g = GroupElement(self.algebra, scipy.linalg.expm(self._rho_combo(t)))
        if fiber is not None:
            g = compose(g, fiber)
        return g

    def nu(self, t, fiber: GroupElement | None = None) -> np.ndarray:
        """Orbit point Coad(exp(Σ t_a E_a))μ; stabilizer fibers do not move it."""
        return coadjoint_matrix(self.section_element(t, fiber)) @ self.mu

    def section_vectors(self, t) -> np.ndarray:
        """Left-trivialized velocities of the chart directions at t.

        Column a is the algebra element exp(A)⁻¹ d/ds exp(A + s E_a)|_0 with
        A = Σ t_a E_a, computed with the Frechet derivative of expm.
        """
        t = np.asarray(t, dtype=float)
        rho = self.algebra.require_realization()
        A = self._rho_combo(t)
        g = scipy.linalg.expm(A)
        cols = []
        for a in range(self.dim):
            Ea = np.einsum("i,iab->ab", self.m_basis[:, a], rho)
            _, F = scipy.linalg.expm_frechet(A, Ea)
            cols.append(self.algebra.matrix_coords(np.linalg.solve(g, F)))
        if not cols:
            return np.zeros((self.algebra.dim, 0))
        return np.column_stack(cols)

    def dnu(self, t) -> np.ndarray:
        """Chart differential: column a is -Coad(g) (μ∘ad(X_a(t)))."""
        t = np.asarray(t, dtype=float)
        g = self.section_element(t)
        vecs = self.section_vectors(t)
        K_T = self.algebra.bracket_pairing(self.mu).T
        return -coadjoint_matrix(g) @ (K_T @ vecs)

    def check_rank(self, t) -> None:
        D = self.dnu(t)
        if D.shape[1] == 0:
            return
        s = np.linalg.svd(D, compute_uv=False)
        if s[-1] <= linalg.RANK_RTOL * s[0]:
            raise RankLoss(f"chart differential lost rank at t = {np.asarray(t).tolist()}")

    def to_chart(self, t, v, tol: float = TANGENT_RESIDUAL_TOL) -> np.ndarray:
        """Chart components of an orbit tangent vector at ν(t)."""
        D = self.dnu(t)
        v = np.asarray(v, dtype=float)
        coords, *_ = np.linalg.lstsq(D, v, rcond=None)
        residual = np.linalg.norm(D @ coords - v)
        if residual > tol * max(1.0, np.linalg.norm(v)):
            raise NotTangent(f"vector is not tangent to the orbit (residual {residual:.3e})")
        return coords

    def coords(self, nu_target, t0=None, max_iter: int = 50,
               tol: float = 1e-13) -> np.ndarray:
        """Invert the chart map near t0 by Gauss-Newton iteration."""
        nu_target = np.asarray(nu_target, dtype=float)
        t = np.zeros(self.dim) if t0 is None else np.asarray(t0, dtype=float).copy()
        for _ in range(max_iter):
            r = nu_target - self.nu(t)
            if np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(nu_target)):
                return t
            step, *_ = np.linalg.lstsq(self.dnu(t), r, rcond=None)
            t = t + step
        raise RankLoss("chart inversion did not converge; point may be outside the chart")


def orbit_chart(a: LieAlgebra, mu, m_basis, radius: float = 1.0) -> OrbitChart:
    """Build the exponential chart; checks ν(0) = μ and full rank at 0."""
    a.require_realization()
    mu = np.asarray(mu, dtype=float)
    m_basis = np.atleast_2d(np.asarray(m_basis, dtype=float))
    chart = OrbitChart(a, mu.copy(), m_basis.copy(), radius)
    if chart.dim:
        if np.linalg.norm(chart.nu(np.zeros(chart.dim)) - mu) > 1e-12 * (1 + np.linalg.norm(mu)):
            raise RankLoss("chart center does not map to mu")
        chart.check_rank(np.zeros(chart.dim))
    return chart


@dataclass(frozen=True)
class OrbitTangentFrame:
    """Tangent frame of the orbit at a point: f_a = d/ds Coad(exp(s E_a))ν|_0."""

    nu: np.ndarray
    vectors: np.ndarray


def orbit_tangent_frame(a: LieAlgebra, nu, m_basis) -> OrbitTangentFrame:
    """Frame f_a = -ν∘ad(E_a); full rank wherever the chart is valid."""
    nu = np.asarray(nu, dtype=float)
    m_basis = np.atleast_2d(np.asarray(m_basis, dtype=float))
    K_T = a.bracket_pairing(nu).T
    return OrbitTangentFrame(nu.copy(), -(K_T @ m_basis))


def tangent_representative(a: LieAlgebra, nu, v,
                           tol: float = TANGENT_RESIDUAL_TOL) -> np.ndarray:
    """An algebra element X with ν∘ad(X) = v, by least squares.

    Well defined only modulo the stabilizer of ν; the pairing below does not
    depend on the representative.  Raises NotTangent when no X fits.
    """
    nu = np.asarray(nu, dtype=float)
    v = np.asarray(v, dtype=float)
    K_T = a.bracket_pairing(nu).T
    X, *_ = np.linalg.lstsq(K_T, v, rcond=None)
    residual = np.linalg.norm(K_T @ X - v)
    if residual > tol * max(1.0, np.linalg.norm(v)):
        raise NotTangent(f"no algebra element maps to the given vector (residual {residual:.3e})")
    return X


def kks_form(a: LieAlgebra, nu, v, w) -> float:
    """Canonical orbit 2-form: ⟨ν, [X, Y]⟩ for ν∘ad(X) = v, ν∘ad(Y) = w."""
    nu = np.asarray(nu, dtype=float)
    X = tangent_representative(a, nu, v)
    Y = tangent_representative(a, nu, w)
    return float(nu @ a.bracket(X, Y))
