"""Characteristic triples and characteristic functions of pure hypercontractions.

For a pure hypercontraction ``T`` with defect square root ``D`` the column
map

    C h = ( sqrt(rho_n) D T*^n h )_{n >= 0},   rho_0 = 1,
    rho_n = 1/w_n - 1/w_{n-1},

stacks with ``T*`` into an isometry; completing that isometry to a unitary
block matrix ``[[T*, B], [C, D-blocks]]`` yields a characteristic triple
``(E, B, {D_n})``, unique up to a right unitary.  The characteristic
function

    theta(z) = sum_n sqrt(rho_n) D_n z^n + z D K(z, T*) B,
    K(z, A) = sum_n z^n A^n / w_n,

is a partially isometric multiplier from a Hardy space into the weighted
Bergman space of the defect, complementary to the dilation map, and a
complete unitary invariant.  Every identity is checkable at the truncation
level and the checks below return the residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bergman import TruncatedSpace, multiplier_matrix
from .dilation import _pure_horizon, _defect_sqrt_pieces, _star_powers
from .errors import HorizonTooShort, NotPure, NotUnitaryInput
from .hyper import is_pure
from .linalg import Operator, as_operator, complete_to_unitary
from .series import MultiWeightSpec, WeightSpec

__all__ = [
    "rho_sequence",
    "CharTriple",
    "CharFunction",
    "contraction_C",
    "build_char_triple",
    "char_function",
    "char_function_eval",
    "key_identity_check",
    "partial_isometry_check",
    "coincidence_verify",
    "uniqueness_unitary",
    "kernel_poly",
]

CHAR_TOL = 1e-9

# Extra slots beyond the purity horizon: the evaluation-grid tail of the
# function decays like (|eta zeta|)^n_terms, so two dozen terms push it to
# machine level on grids of radius up to ~0.6.
MIN_CHAR_TERMS = 24


def _char_horizon(t: Operator, omega: WeightSpec, tol: float) -> int:
    return max(_pure_horizon(t, omega, tol), MIN_CHAR_TERMS)


def rho_sequence(omega: WeightSpec, n: int) -> np.ndarray:
    """``rho_0 = 1`` and ``rho_k = 1/w_k - 1/w_{k-1}`` (nonnegative for decreasing weights)."""
    inv = omega.inverse_weight_values(n)
    out = np.empty(n)
    out[0] = 1.0
    out[1:] = inv[1:] - inv[:-1]
    return out


@dataclass(frozen=True)
class CharTriple:
    """Completion data ``(dim E, B, {D_n})`` of the stacked column isometry."""

    e_dim: int
    b: Operator
    d_blocks: tuple[Operator, ...]

    @property
    def d_stack(self) -> Operator:
        if not self.d_blocks:
            return Operator(np.zeros((0, self.e_dim)))
        return Operator(np.vstack([blk.mat for blk in self.d_blocks]))


@dataclass(frozen=True)
class CharFunction:
    """A characteristic triple bound to its operator, weight and truncation."""

    t: Operator
    omega: WeightSpec
    n_terms: int
    triple: CharTriple
    defect_min: Operator  # H -> defect-space coordinates

    @property
    def defect_dim(self) -> int:
        return self.defect_min.rows

    def coefficients(self) -> list[np.ndarray]:
        """Polynomial coefficients of the function, degree 0 .. n_terms."""
        rho = rho_sequence(self.omega, self.n_terms)
        inv_w = self.omega.inverse_weight_values(self.n_terms)
        stars = _star_powers(self.t.mat, self.n_terms)
        dmin = self.defect_min.mat
        b = self.triple.b.mat
        coeffs = []
        for k in range(self.n_terms + 1):
            blk = np.zeros((self.defect_dim, self.triple.e_dim), dtype=complex)
            if k < self.n_terms:
                blk += math.sqrt(rho[k]) * self.triple.d_blocks[k].mat
            if k >= 1:
                blk += inv_w[k - 1] * (dmin @ stars[k - 1] @ b)
            coeffs.append(blk)
        return coeffs


def contraction_C(
    t: Operator, omega: WeightSpec, n_terms: int | None = None, tol: float = CHAR_TOL
) -> Operator:
    """The stacked column contraction ``h -> (sqrt(rho_n) D T*^n h)_n``.

    Requires a pure input and a horizon long enough that no column mass is
    lost; the internal witness is the exact algebraic identity
    ``I - C*C = T T*``.
    """
    t = as_operator(t)
    if not is_pure(t):
        raise NotPure("tail operator does not vanish; no characteristic function")
    if n_terms is None:
        n_terms = _char_horizon(t, omega, tol)
    _, _, d_min = _defect_sqrt_pieces(t, omega, tol)
    rho = rho_sequence(omega, n_terms)
    stars = _star_powers(t.mat, n_terms)
    rows = [math.sqrt(rho[k]) * (d_min.mat @ stars[k]) for k in range(n_terms)]
    c = Operator(np.vstack(rows)) if rows else Operator(np.zeros((0, t.rows)))
    gap = np.eye(t.rows) - (c.H @ c).mat - (t @ t.H).mat
    res = float(np.linalg.norm(gap, 2))
    if res > tol * 10:
        raise HorizonTooShort(
            f"truncation loses column mass (identity residual {res:.3e}); "
            "increase the number of terms"
        )
    return c


def build_char_triple(
    t: Operator, omega: WeightSpec, n_terms: int | None = None, tol: float = CHAR_TOL
) -> CharTriple:
    """Complete ``[T*; C]`` to a unitary and split off ``(E, B, {D_n})``."""
    t = as_operator(t)
    if n_terms is None:
        n_terms = _char_horizon(t, omega, tol)
    c = contraction_C(t, omega, n_terms, tol)
    x = Operator(np.vstack([t.H.mat, c.mat]))
    e_dim, y = complete_to_unitary(x, tol)
    d = t.rows
    r = c.rows // n_terms if n_terms else 0
    b = Operator(y.mat[:d, :])
    blocks = tuple(
        Operator(y.mat[d + k * r: d + (k + 1) * r, :]) for k in range(n_terms)
    )
    return CharTriple(e_dim, b, blocks)


def char_function(
    t: Operator, omega: WeightSpec, n_terms: int | None = None, tol: float = CHAR_TOL
) -> CharFunction:
    t = as_operator(t)
    if n_terms is None:
        n_terms = _char_horizon(t, omega, tol)
    triple = build_char_triple(t, omega, n_terms, tol)
    _, _, d_min = _defect_sqrt_pieces(t, omega, tol)
    return CharFunction(t, omega, n_terms, triple, d_min)


def kernel_poly(omega: WeightSpec, z: complex, a: np.ndarray, n_terms: int) -> np.ndarray:
    """Operator series ``sum_{n < n_terms} z^n A^n / w_n``."""
    inv_w = omega.inverse_weight_values(n_terms)
    out = np.zeros_like(np.asarray(a, dtype=complex))
    power = np.eye(a.shape[0], dtype=complex)
    for n in range(n_terms):
        out += inv_w[n] * (z ** n) * power
        power = power @ a
    return out


def _kernel_scalar(omega: WeightSpec, x: complex, cap: int = 4096) -> complex:
    """Scalar kernel value ``sum_n x^n / w_n`` summed to machine convergence."""
    total = 0.0 + 0.0j
    block = 64
    n0 = 0
    while n0 < cap:
        inv_w = omega.inverse_weight_values(n0 + block)[n0:]
        powers = x ** (n0 + np.arange(block))
        chunk = np.sum(inv_w * powers)
        total += chunk
        if abs(chunk) < 1e-18 * max(1.0, abs(total)):
            break
        n0 += block
    return complex(total)


def char_function_eval(cf: CharFunction, z: complex) -> Operator:
    """Evaluate the characteristic function at a point of the open disc."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("evaluation point must lie in the open disc")
    rho = rho_sequence(cf.omega, cf.n_terms)
    out = np.zeros((cf.defect_dim, cf.triple.e_dim), dtype=complex)
    for n, blk in enumerate(cf.triple.d_blocks):
        out += math.sqrt(rho[n]) * (z ** n) * blk.mat
    series = kernel_poly(cf.omega, z, cf.t.mat.conj().T, cf.n_terms)
    out += z * (cf.defect_min.mat @ series @ cf.triple.b.mat)
    return Operator(out)


def key_identity_check(cf: CharFunction, zeta: complex, eta: complex) -> float:
    """Residual of the kernel identity tying the function to the defect.

    ``K(eta, zeta) I - theta(eta) theta(zeta)* / (1 - eta conj(zeta))``
    must equal ``D K(eta, T*) K(conj(zeta), T) D`` in the defect coordinates.
    """
    zeta, eta = complex(zeta), complex(eta)
    if abs(zeta) >= 1.0 or abs(eta) >= 1.0:
        raise ValueError("evaluation points must lie in the open disc")
    r = cf.defect_dim
    k_scalar = _kernel_scalar(cf.omega, eta * np.conj(zeta))
    th_eta = char_function_eval(cf, eta).mat
    th_zeta = char_function_eval(cf, zeta).mat
    lhs = k_scalar * np.eye(r) - (th_eta @ th_zeta.conj().T) / (1.0 - eta * np.conj(zeta))
    k_left = kernel_poly(cf.omega, eta, cf.t.mat.conj().T, cf.n_terms)
    k_right = kernel_poly(cf.omega, np.conj(zeta), cf.t.mat, cf.n_terms)
    dmin = cf.defect_min.mat
    rhs = dmin @ k_left @ k_right @ dmin.conj().T
    return float(np.linalg.norm(lhs - rhs, 2)) if r else 0.0


def partial_isometry_check(
    cf: CharFunction,
    degrees: int | None = None,
    source_degrees: int | None = None,
) -> dict[str, float]:
    """Check that the multiplier and the dilation map split the identity.

    Builds the multiplication matrix of the function from a truncated Hardy
    space into the weighted Bergman space of the defect, the dilation map of
    the operator, and returns the residuals of
    ``pi pi* + M M* = I`` and of the range orthogonality ``pi* M = 0``.
    """
    n_a = cf.n_terms if degrees is None else int(degrees)
    n_h = n_a if source_degrees is None else int(source_degrees)
    r = cf.defect_dim
    target = TruncatedSpace(MultiWeightSpec.of(cf.omega), (n_a,), coeff_dim=r)
    source = TruncatedSpace(
        MultiWeightSpec.of(WeightSpec.hardy()), (n_h,), coeff_dim=cf.triple.e_dim
    )
    theta = {(k,): blk for k, blk in enumerate(cf.coefficients())}
    m = multiplier_matrix(theta, source, target)
    inv_sqrt_w = 1.0 / np.sqrt(cf.omega.values(n_a))
    stars = _star_powers(cf.t.mat, n_a)
    rows = [inv_sqrt_w[k] * (cf.defect_min.mat @ stars[k]) for k in range(n_a)]
    pi = Operator(np.vstack(rows)) if rows else Operator(np.zeros((0, cf.t.rows)))
    total = (pi @ pi.H + m @ m.H).mat
    res = float(np.linalg.norm(total - np.eye(target.dim), 2)) if target.dim else 0.0
    cross = (pi.H @ m).norm()
    return {"partial_isometry": res, "range_orthogonality": cross}


def uniqueness_unitary(t1: CharTriple, t2: CharTriple, tol: float = CHAR_TOL) -> Operator:
    """Unitary ``U`` with ``B2 = B1 U`` and ``D2 = D1 U`` between two triples.

    Both completion columns are isometries with the same range, so the
    transition is just the Gram product of the two.
    """
    if t1.e_dim != t2.e_dim:
        raise NotUnitaryInput("triples have different completion dimensions")
    y1 = np.vstack([t1.b.mat, t1.d_stack.mat])
    y2 = np.vstack([t2.b.mat, t2.d_stack.mat])
    u = y1.conj().T @ y2
    res = float(np.linalg.norm(u.conj().T @ u - np.eye(t2.e_dim), 2)) if t2.e_dim else 0.0
    if res > tol * 10:
        raise NotUnitaryInput(f"triples are not related by a unitary (residual {res:.3e})")
    return Operator(u)


def coincidence_verify(
    theta1: CharFunction,
    theta2: CharFunction,
    tau: Operator,
    tau_star: Operator,
    z_grid: Sequence[complex],
    tol: float = CHAR_TOL,
) -> tuple[bool, float]:
    """Check ``theta2(z) = tau_star theta1(z) tau`` on a grid of disc points."""
    tau = as_operator(tau)
    tau_star = as_operator(tau_star)
    for u in (tau, tau_star):
        if u.rows != u.cols:
            raise NotUnitaryInput("coincidence unitaries must be square")
        if u.rows and float(np.linalg.norm((u.H @ u).mat - np.eye(u.cols), 2)) > tol * 10:
            raise NotUnitaryInput("coincidence transports must be unitary")
    worst = 0.0
    for z in z_grid:
        lhs = char_function_eval(theta2, z).mat
        rhs = tau_star.mat @ char_function_eval(theta1, z).mat @ tau.mat
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)) if lhs.size else 0.0)
    return worst <= tol, worst
