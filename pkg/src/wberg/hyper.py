"""Hereditary-calculus defect operators and positivity classification.

For a commuting tuple of contractions ``T`` and a multi-weight ``W`` the
central object is the defect series

    D(r) = sum_a c_a r^a T^a T*^a,

where ``c`` are the reciprocal coefficients of the associated function.  The
series is separable across variables, so it is evaluated as a nested
one-variable hereditary sum: each level is one batched pass
``X -> sum_k c_k T^k X T*^k``.

Classification routines sample ``D(r)`` over an ``r``-grid (any finite grid
under-approximates the continuum; reports say so), add the ``r -> 1`` limit
when coefficient tails certify it, and for integer binomial-type weights also
check the implied lattice of alternating-sum positivity conditions so the two
equivalent criteria below always see the same evidence.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    EquivalenceViolation,
    NotCommuting,
    NotContractive,
    NotPsd,
    SeriesTailTooLarge,
)
from .linalg import Operator, as_operator, psd_check, psd_sqrt
from .series import MultiWeightSpec, WeightSpec

__all__ = [
    "OperatorTuple",
    "DefectResult",
    "TailResult",
    "GRID_CAVEAT",
    "defect_series",
    "defect_limit",
    "defect_operator",
    "tail_operator",
    "conjugation_limit",
    "hereditary_apply",
    "is_omega_hypercontraction",
    "is_W_hypercontraction",
    "is_pure",
    "delta_power",
    "is_gamma_contractive",
    "equivalence_crosscheck",
    "subtuple",
    "subtuple_inheritance_check",
    "two_parameter_monotonicity_check",
    "dyadic_grid",
    "Witness",
    "OmegaHyperReport",
    "WHyperReport",
    "GammaReport",
    "CrosscheckReport",
    "SubtupleReport",
    "MonotonicityReport",
]

GRID_CAVEAT = (
    "positivity verified on a finite r-grid (plus limit points when the "
    "coefficient tail certifies them); the continuum condition is sampled, "
    "not certified"
)

POSITIVITY_TOL = 1e-8
LIMIT_TOL = 1e-9
COMMUTATION_TOL = 1e-10
DEGREE_CAP = 256


# ---------------------------------------------------------------------------
# operator tuples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorTuple:
    """Commuting contractions on a shared finite-dimensional space."""

    ops: tuple[Operator, ...]
    commutation_tol: float = COMMUTATION_TOL

    def __post_init__(self) -> None:
        if not self.ops:
            raise ArityMismatch("operator tuple needs at least one entry")
        object.__setattr__(self, "ops", tuple(as_operator(t) for t in self.ops))
        d = self.ops[0].rows
        for t in self.ops:
            if not t.is_square or t.rows != d:
                raise ArityMismatch("tuple entries must be square on a shared space")
            if t.norm() > 1.0 + self.commutation_tol:
                raise NotContractive(f"entry norm {t.norm():.6f} exceeds 1")
        for i in range(len(self.ops)):
            for j in range(i + 1, len(self.ops)):
                comm = self.ops[i] @ self.ops[j] - self.ops[j] @ self.ops[i]
                if comm.norm() > self.commutation_tol:
                    raise NotCommuting(
                        f"entries {i} and {j} fail to commute (norm {comm.norm():.3e})"
                    )

    @staticmethod
    def of(*ops, commutation_tol: float = COMMUTATION_TOL) -> "OperatorTuple":
        return OperatorTuple(tuple(as_operator(t) for t in ops), commutation_tol)

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def dim(self) -> int:
        return self.ops[0].rows

    def __getitem__(self, i: int) -> Operator:
        return self.ops[i]

    def __iter__(self):
        return iter(self.ops)


def subtuple(t: OperatorTuple, lam: Sequence[int]) -> OperatorTuple:
    """Sub-tuple at the (0-based) sorted index subset ``lam``."""
    lam = _check_subset(lam, t.n)
    return OperatorTuple(tuple(t.ops[i] for i in lam), t.commutation_tol)


def _check_subset(lam: Sequence[int], n: int) -> tuple[int, ...]:
    lam = tuple(sorted(set(int(i) for i in lam)))
    if not lam:
        raise ArityMismatch("index subset must be nonempty")
    if lam[0] < 0 or lam[-1] >= n:
        raise ArityMismatch(f"index subset {lam} out of range for arity {n}")
    return lam


# ---------------------------------------------------------------------------
# hereditary evaluation
# ---------------------------------------------------------------------------

def _power_stack(mat: np.ndarray, count: int) -> np.ndarray:
    """Stack ``[I, T, T^2, ...]`` with ``count`` entries."""
    d = mat.shape[0]
    out = np.empty((count, d, d), dtype=complex)
    out[0] = np.eye(d)
    for k in range(1, count):
        out[k] = out[k - 1] @ mat
    return out


def hereditary_apply(coeffs: np.ndarray, t: Operator, x: np.ndarray) -> np.ndarray:
    """One-variable hereditary sum ``sum_k coeffs[k] T^k X T*^k``."""
    coeffs = np.asarray(coeffs, dtype=float)
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        return np.zeros_like(x)
    count = int(nz[-1]) + 1
    powers = _power_stack(t.mat, count)
    left = powers @ x
    terms = left @ powers.conj().transpose(0, 2, 1)
    return np.tensordot(coeffs[:count], terms, axes=1)


def _nilpotency_order(t: Operator, cap: int) -> int | None:
    """Smallest ``k <= cap`` with ``T^k = 0`` exactly, or None."""
    p = np.eye(t.rows, dtype=complex)
    for k in range(1, cap + 1):
        p = p @ t.mat
        if not np.any(p):
            return k
    return None


def _effective_degree(t: Operator, w: WeightSpec, cap: int) -> int:
    """Truncation level for one variable: coefficient support or nilpotency."""
    cap = min(cap, w.max_terms or cap)
    support = w.inverse_support(cap)
    nil = _nilpotency_order(t, min(cap, t.rows))
    deg = support if nil is None else min(support, nil)
    return max(1, min(deg, cap))


def _tail_estimate(
    t: OperatorTuple, w: MultiWeightSpec, r: Sequence[float], degrees: Sequence[int], cap: int
) -> float:
    """Upper estimate of the mass dropped beyond the per-variable cutoffs."""
    sums, tails = [], []
    for i in range(t.n):
        cap_i = min(cap, w[i].max_terms or cap)
        c = np.abs(w[i].inverse_coeffs(cap_i))
        rp = np.asarray(r[i], dtype=float) ** np.arange(cap_i)
        weighted = c * rp
        deg = min(degrees[i], cap_i)
        # power norms of contractions decrease, so any exponent <= deg bounds
        # the dropped terms; 64 is deep enough to see strict-contraction decay
        pk = t[i].power(min(deg, max(t.dim, 64))).norm() if deg > 0 else 1.0
        tail = float(np.sum(weighted[deg:])) * pk**2
        if w[i].inverse_support(cap_i) >= cap_i and cap_i > 1:
            tail += float(weighted[-1]) * cap_i * pk**2  # crude remainder beyond the cap
        sums.append(float(np.sum(weighted)))
        tails.append(tail)
    total = 0.0
    for i in range(t.n):
        rest = 1.0
        for j in range(t.n):
            if j != i:
                rest *= sums[j]
        total += tails[i] * rest
    return total


def _normalize_point(r, n: int) -> tuple[float, ...]:
    if isinstance(r, (int, float, np.floating)):
        point = (float(r),) * n
    else:
        point = tuple(float(v) for v in r)
    if len(point) != n:
        raise ArityMismatch(f"grid point arity {len(point)} != {n}")
    if any(not (0.0 < v <= 1.0) for v in point):
        raise ValueError("evaluation points must lie in (0, 1]")
    return point


def dyadic_grid(n: int, levels: int = 3) -> list[tuple[float, ...]]:
    """Diagonal grid ``r_j = 1 - 2^-j`` repeated across coordinates."""
    return [((1.0 - 0.5**j),) * n for j in range(1, levels + 1)]


def _resolve_degrees(
    t: OperatorTuple, w: MultiWeightSpec, degrees, cap: int = DEGREE_CAP
) -> tuple[int, ...]:
    if degrees is None:
        return tuple(_effective_degree(t[i], w[i], cap) for i in range(t.n))
    if isinstance(degrees, (int, np.integer)):
        return (int(degrees),) * t.n
    degs = tuple(int(d) for d in degrees)
    if len(degs) != t.n:
        raise ArityMismatch(f"expected {t.n} cutoffs, got {len(degs)}")
    return degs


# ---------------------------------------------------------------------------
# defect series, limits, defect and tail operators
# ---------------------------------------------------------------------------

def defect_series(
    t: OperatorTuple,
    w: MultiWeightSpec,
    r,
    degrees: Sequence[int] | int | None = None,
) -> Operator:
    """Finite hereditary sum ``sum_{a < degrees} c_a r^a T^a T*^a`` (Hermitian)."""
    if w.n != t.n:
        raise ArityMismatch(f"weight arity {w.n} != tuple arity {t.n}")
    point = _normalize_point(r, t.n)
    degs = _resolve_degrees(t, w, degrees)
    x = np.eye(t.dim, dtype=complex)
    for i in reversed(range(t.n)):
        coeffs = w[i].inverse_coeffs(degs[i]) * point[i] ** np.arange(degs[i])
        x = hereditary_apply(coeffs, t[i], x)
    return Operator(0.5 * (x + x.conj().T))


@dataclass(frozen=True)
class DefectResult:
    """Limit of the defect series as ``r`` increases to the vertex.

    ``tail_estimate`` bounds the truncation mass dropped at the last
    evaluated point; on the grid route it is the accuracy floor of the
    reported limit regardless of how small the successive differences get.
    """

    value_at_r: Operator
    limit: Operator
    r_trace: tuple[tuple[float, float], ...]
    converged: bool
    method: str
    tail_estimate: float = 0.0


def defect_limit(
    t: OperatorTuple,
    w: MultiWeightSpec,
    tol: float = LIMIT_TOL,
    grid_policy: str = "auto",
    degrees: Sequence[int] | int | None = None,
    max_levels: int = 40,
) -> DefectResult:
    """Evaluate ``lim_{r -> 1} D(r)``.

    When the dropped coefficient tail at ``r = 1`` is certified below ``tol``
    the limit is the direct sum at the vertex; otherwise the series is swept
    along the dyadic grid ``r_j = 1 - 2^-j`` until successive differences
    fall below ``tol`` (monotonicity makes the sweep decreasing).
    """
    degs = _resolve_degrees(t, w, degrees)
    ones = (1.0,) * t.n
    if grid_policy not in ("auto", "direct", "grid"):
        raise ValueError(f"unknown grid policy {grid_policy!r}")
    use_direct = grid_policy == "direct"
    if grid_policy == "auto":
        use_direct = _tail_estimate(t, w, ones, degs, DEGREE_CAP) < tol
    if use_direct:
        value = defect_series(t, w, ones, degs)
        est = _tail_estimate(t, w, ones, degs, DEGREE_CAP)
        return DefectResult(value, value, ((1.0, 0.0),), True, "direct_sum_at_one", est)
    trace = []
    prev = None
    converged = False
    value = None
    last_r = 0.5
    for j in range(1, max_levels + 1):
        rj = 1.0 - 0.5**j
        last_r = rj
        value = defect_series(t, w, (rj,) * t.n, degs)
        diff = (value - prev).norm() if prev is not None else math.inf
        trace.append((rj, diff))
        if prev is not None and diff < tol:
            converged = True
            break
        prev = value
    est = _tail_estimate(t, w, (last_r,) * t.n, degs, DEGREE_CAP)
    return DefectResult(value, value, tuple(trace), converged, "monotone_grid", est)


def defect_operator(
    t: OperatorTuple,
    w: MultiWeightSpec,
    tol: float = LIMIT_TOL,
    degrees: Sequence[int] | int | None = None,
) -> Operator:
    """PSD square root of the defect-series limit."""
    res = defect_limit(t, w, tol=tol, degrees=degrees)
    if not res.converged or res.tail_estimate > tol:
        warnings.warn(
            f"defect limit accuracy floor {max(res.tail_estimate, tol):.1e} "
            f"exceeds the requested tolerance {tol:.1e}",
            SeriesTailTooLarge,
        )
    cert = psd_check(res.limit, max(tol, POSITIVITY_TOL))
    if not cert.verdict:
        raise NotPsd(
            f"defect limit has eigenvalue {cert.min_eigenvalue:.3e}; tuple is not "
            "hypercontractive at this weight"
        )
    return psd_sqrt(res.limit, max(tol, POSITIVITY_TOL))


def conjugation_limit(
    s: Operator, t: Operator, tol: float = LIMIT_TOL, max_doublings: int = 60
) -> tuple[Operator, bool, int]:
    """Limit of ``T^k S T*^k`` along doubling powers (monotone for contractions)."""
    s = as_operator(s)
    m = as_operator(t).mat
    if s.mat.size == 0 or m.size == 0:
        return Operator(s.mat.copy()), True, 0
    prev = m @ s.mat @ m.conj().T
    steps = 1
    for _ in range(max_doublings):
        m = m @ m
        cur = m @ s.mat @ m.conj().T
        steps += 1
        if float(np.linalg.norm(cur - prev, 2)) < tol:
            return Operator(0.5 * (cur + cur.conj().T)), True, steps
        prev = cur
    return Operator(0.5 * (prev + prev.conj().T)), False, steps


@dataclass(frozen=True)
class TailResult:
    q: Operator
    q_squared: Operator
    converged: bool
    doublings: int


def tail_operator(t: Operator, tol: float = LIMIT_TOL, max_doublings: int = 60) -> TailResult:
    """PSD square root of ``lim_k T^k T*^k`` (zero exactly for pure contractions)."""
    t = as_operator(t)
    if t.norm() > 1.0 + max(tol, COMMUTATION_TOL):
        raise NotContractive(f"tail operator needs a contraction, norm {t.norm():.6f}")
    limit, converged, steps = conjugation_limit(Operator.identity(t.rows), t, tol, max_doublings)
    q = psd_sqrt(limit, max(tol, POSITIVITY_TOL))
    return TailResult(q, limit, converged, steps)


def is_pure(t: OperatorTuple | Operator, tol: float = LIMIT_TOL, max_doublings: int = 60) -> bool:
    """True when every coordinate's tail limit vanishes within ``tol``."""
    ops = t.ops if isinstance(t, OperatorTuple) else (as_operator(t),)
    for op in ops:
        limit, _, _ = conjugation_limit(Operator.identity(op.rows), op, tol, max_doublings)
        if limit.norm() > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# classification reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """One positivity certificate: which member, which point, smallest eigenvalue."""

    mask: int
    kind: str  # "grid" | "limit" | "lattice"
    point: tuple
    min_eig: float

    @property
    def ok(self) -> bool:
        return bool(self.min_eig >= -POSITIVITY_TOL)

    def to_dict(self) -> dict:
        return {
            "mask": self.mask,
            "kind": self.kind,
            "point": list(self.point),
            "min_eig": self.min_eig,
        }


@dataclass(frozen=True)
class OmegaHyperReport:
    verdict: bool
    certificates: tuple[Witness, ...]
    limit_min_eig: float | None
    caveat: str = GRID_CAVEAT


@dataclass(frozen=True)
class WHyperReport:
    verdict: bool
    certificates: tuple[Witness, ...]
    first_failure: Witness | None
    caveat: str = GRID_CAVEAT


def is_omega_hypercontraction(
    t: Operator,
    omega: WeightSpec,
    r_grid: Sequence[float] | None = None,
    tol: float = POSITIVITY_TOL,
    degrees: int | None = None,
) -> OmegaHyperReport:
    """Grid test of ``sum_n c_n r^n T^n T*^n >= 0`` for a single contraction.

    When the coefficient tail at ``r = 1`` is certified small the limit value
    is checked too, which upgrades the grid test to the boundary criterion.
    """
    t = as_operator(t)
    tup = OperatorTuple.of(t)
    w = MultiWeightSpec.of(omega)
    grid = [p[0] for p in dyadic_grid(1)] if r_grid is None else [float(r) for r in r_grid]
    certs = []
    ok = True
    for r in grid:
        value = defect_series(tup, w, (r,), degrees)
        min_eig = psd_check(value, tol).min_eigenvalue
        certs.append(Witness(1, "grid", (r,), min_eig))
        ok = ok and min_eig >= -tol
    limit_eig = None
    degs = _resolve_degrees(tup, w, degrees)
    if _tail_estimate(tup, w, (1.0,), degs, DEGREE_CAP) < tol:
        value = defect_series(tup, w, (1.0,), degs)
        limit_eig = psd_check(value, tol).min_eigenvalue
        certs.append(Witness(1, "limit", (1.0,), limit_eig))
        ok = ok and limit_eig >= -tol
    return OmegaHyperReport(bool(ok), tuple(certs), limit_eig)


def _integer_betas(w: MultiWeightSpec) -> tuple[int, ...] | None:
    """Per-variable binomial exponents when every weight is of that integer type."""
    betas = []
    for spec in w:
        if spec.kind == "hardy":
            betas.append(1)
        elif spec.kind == "bergman" and float(spec.beta).is_integer():
            betas.append(int(spec.beta))
        else:
            return None
    return tuple(betas)


def is_W_hypercontraction(
    t: OperatorTuple,
    w: MultiWeightSpec,
    r_grid: Sequence | None = None,
    tol: float = POSITIVITY_TOL,
    degrees: Sequence[int] | int | None = None,
    lattice_e_points: bool | str = "auto",
) -> WHyperReport:
    """Test defect positivity for every member of the constant-swap family.

    Every grid point is checked for all ``2^n`` members.  Vertex limits are
    added per member when the coefficient tail certifies them.  For integer
    binomial-type weights the implied lattice of alternating-sum conditions
    is checked as well (``lattice_e_points="auto"``), so the verdict matches
    the equivalent finite criterion exactly.
    """
    if w.n != t.n:
        raise ArityMismatch(f"weight arity {w.n} != tuple arity {t.n}")
    grid = dyadic_grid(t.n) if r_grid is None else [_normalize_point(p, t.n) for p in r_grid]
    certs: list[Witness] = []
    failure = None
    ok = True
    for mask, member in w.swap_family():
        degs = _resolve_degrees(t, member, degrees)
        for point in grid:
            value = defect_series(t, member, point, degs)
            min_eig = psd_check(value, tol).min_eigenvalue
            wit = Witness(mask, "grid", point, min_eig)
            certs.append(wit)
            if min_eig < -tol:
                ok = False
                failure = failure or wit
        if _tail_estimate(t, member, (1.0,) * t.n, degs, DEGREE_CAP) < tol:
            value = defect_series(t, member, (1.0,) * t.n, degs)
            min_eig = psd_check(value, tol).min_eigenvalue
            wit = Witness(mask, "limit", (1.0,) * t.n, min_eig)
            certs.append(wit)
            if min_eig < -tol:
                ok = False
                failure = failure or wit
    use_lattice = lattice_e_points is True or (
        lattice_e_points == "auto" and _integer_betas(w) is not None
    )
    if use_lattice:
        gamma = _integer_betas(w)
        if gamma is None:
            raise ValueError("lattice points require integer binomial-type weights")
        eye = Operator.identity(t.dim)
        for beta in itertools.product(*(range(g + 1) for g in gamma)):
            value = delta_power(t, beta, eye)
            min_eig = psd_check(value, tol).min_eigenvalue
            wit = Witness((1 << t.n) - 1, "lattice", beta, min_eig)
            certs.append(wit)
            if min_eig < -tol:
                ok = False
                failure = failure or wit
    return WHyperReport(bool(ok), tuple(certs), failure)


# ---------------------------------------------------------------------------
# integer/real exponent calculus
# ---------------------------------------------------------------------------

def delta_power(
    t: OperatorTuple,
    beta: Sequence[float],
    x: Operator,
    n_series: int = 200,
    tol: float = POSITIVITY_TOL,
) -> Operator:
    """Apply ``prod_i (I - C_{T_i})^{beta_i}`` to a Hermitian ``X``.

    ``C_A(X) = A X A*``.  Integer exponents are applied exactly; a fractional
    remainder ``d`` uses the nonnegative-coefficient expansion
    ``(1-x)^d = 1 - sum b_k x^k`` truncated at ``n_series`` (the dropped mass
    is estimated and reported via :class:`SeriesTailTooLarge`).
    """
    beta = tuple(float(b) for b in beta)
    if len(beta) != t.n:
        raise ArityMismatch(f"exponent arity {len(beta)} != tuple arity {t.n}")
    if any(b < 0 for b in beta):
        raise ValueError("exponents must be nonnegative")
    mat = as_operator(x).mat.copy()
    for i, b in enumerate(beta):
        whole = int(math.floor(b + 1e-12))
        frac = b - whole
        if frac < 1e-12:
            frac = 0.0
        ti = t[i].mat
        for _ in range(whole):
            mat = mat - ti @ mat @ ti.conj().T
        if frac:
            bk = np.empty(n_series + 1)
            bk[0] = 0.0
            bk[1] = frac
            for k in range(1, n_series):
                bk[k + 1] = bk[k] * (k - frac) / (k + 1.0)
            coeffs = -bk
            coeffs[0] = 1.0
            new = hereditary_apply(coeffs, t[i], mat)
            b_tail = 1.0 - float(np.sum(bk))
            pk = np.linalg.matrix_power(ti, n_series)
            last = pk @ mat @ pk.conj().T
            est = abs(b_tail) * float(np.linalg.norm(last, 2))
            if est > tol:
                warnings.warn(
                    f"fractional-power tail estimate {est:.3e} exceeds {tol:.1e}",
                    SeriesTailTooLarge,
                )
            mat = new
    return Operator(0.5 * (mat + mat.conj().T))


@dataclass(frozen=True)
class GammaReport:
    verdict: bool
    witnesses: tuple[tuple[tuple[float, ...], float], ...]
    first_failure: tuple[float, ...] | None


def is_gamma_contractive(
    t: OperatorTuple,
    gamma: Sequence[float],
    tol: float = POSITIVITY_TOL,
    n_series: int = 200,
) -> GammaReport:
    """Check ``Delta^beta(I) >= 0`` over the finite exponent set below ``gamma``.

    Integer ``gamma`` scans the full lattice ``0 <= beta <= gamma``.  Real
    ``gamma`` scans the integer lattice of the floor plus the fractional
    corner values ``gamma_i`` themselves.
    """
    gamma = tuple(float(g) for g in gamma)
    if len(gamma) != t.n:
        raise ArityMismatch(f"gamma arity {len(gamma)} != tuple arity {t.n}")
    if any(g < 1.0 for g in gamma):
        raise ValueError("gamma must be at least 1 in every coordinate")
    axes = []
    for g in gamma:
        vals = [float(k) for k in range(int(math.floor(g + 1e-12)) + 1)]
        if not float(g).is_integer():
            vals.append(g)
        axes.append(vals)
    eye = Operator.identity(t.dim)
    witnesses = []
    verdict = True
    failure = None
    for beta in itertools.product(*axes):
        value = delta_power(t, beta, eye, n_series=n_series, tol=tol)
        min_eig = psd_check(value, tol).min_eigenvalue
        witnesses.append((beta, min_eig))
        if min_eig < -tol:
            verdict = False
            failure = failure or beta
    return GammaReport(bool(verdict), tuple(witnesses), failure)


@dataclass(frozen=True)
class CrosscheckReport:
    gamma_report: GammaReport
    w_report: WHyperReport
    agree: bool


def equivalence_crosscheck(
    t: OperatorTuple,
    gamma: Sequence[int],
    r_grid: Sequence | None = None,
    tol: float = POSITIVITY_TOL,
) -> CrosscheckReport:
    """Run both equivalent finite criteria and insist the verdicts match."""
    gamma = tuple(int(g) for g in gamma)
    if any(g < 1 for g in gamma):
        raise ValueError("gamma must be at least 1 in every coordinate")
    w = MultiWeightSpec(tuple(WeightSpec.bergman(g) for g in gamma))
    gr = is_gamma_contractive(t, gamma, tol=tol)
    wr = is_W_hypercontraction(t, w, r_grid=r_grid, tol=tol, lattice_e_points=True)
    agree = gr.verdict == wr.verdict
    if not agree:
        raise EquivalenceViolation(
            f"criteria disagree: lattice verdict {gr.verdict}, defect verdict {wr.verdict}"
        )
    return CrosscheckReport(gr, wr, agree)


# ---------------------------------------------------------------------------
# subtuples and monotonicity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubtupleReport:
    lam: tuple[int, ...]
    parent: WHyperReport
    sub: WHyperReport
    consistent: bool


def subtuple_inheritance_check(
    t: OperatorTuple,
    w: MultiWeightSpec,
    lam: Sequence[int],
    r_grid: Sequence | None = None,
    tol: float = POSITIVITY_TOL,
) -> SubtupleReport:
    """Verify that a hypercontractive verdict passes to the sub-tuple."""
    lam = _check_subset(lam, t.n)
    parent = is_W_hypercontraction(t, w, r_grid=r_grid, tol=tol)
    sub_grid = None if r_grid is None else [tuple(p[i] for i in lam) for p in
                                            (_normalize_point(q, t.n) for q in r_grid)]
    sub = is_W_hypercontraction(subtuple(t, lam), w.subset(lam), r_grid=sub_grid, tol=tol)
    consistent = (not parent.verdict) or sub.verdict
    return SubtupleReport(lam, parent, sub, consistent)


@dataclass(frozen=True)
class MonotonicityReport:
    ok: bool
    min_gap_eig: float
    pairs_checked: int


def two_parameter_monotonicity_check(
    t: OperatorTuple,
    w: MultiWeightSpec,
    lam: Sequence[int],
    r_points: Sequence,
    beta_points: Sequence[Sequence[int]],
    tol: float = POSITIVITY_TOL,
    degrees: Sequence[int] | int | None = None,
) -> MonotonicityReport:
    """Two-parameter monotonicity of ``T_c^b D(r') T_c*^b`` on finite grids.

    For ``r' <= s'`` and ``a <= b`` the value at the larger parameters must be
    dominated in the semidefinite order, within ``tol``.
    """
    lam = _check_subset(lam, t.n)
    comp = tuple(i for i in range(t.n) if i not in lam)
    t_sub = subtuple(t, lam)
    w_sub = w.subset(lam)
    points = [_normalize_point(p, len(lam)) for p in r_points]
    betas = [tuple(int(b) for b in bp) for bp in beta_points]
    for bp in betas:
        if len(bp) != len(comp):
            raise ArityMismatch(f"exponent arity {len(bp)} != complement size {len(comp)}")
    values: dict[tuple, np.ndarray] = {}
    for p in points:
        base = defect_series(t_sub, w_sub, p, degrees).mat
        for bp in betas:
            left = np.eye(t.dim, dtype=complex)
            for idx, power in zip(comp, bp):
                left = left @ np.linalg.matrix_power(t[idx].mat, power)
            values[(p, bp)] = left @ base @ left.conj().T
    min_gap = math.inf
    pairs = 0
    for (p1, b1), v1 in values.items():
        for (p2, b2), v2 in values.items():
            if (p1, b1) == (p2, b2):
                continue
            if all(a <= b for a, b in zip(p1, p2)) and all(a <= b for a, b in zip(b1, b2)):
                gap = v1 - v2  # smaller parameters dominate
                eig = float(np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0])
                min_gap = min(min_gap, eig)
                pairs += 1
    if pairs == 0:
        min_gap = 0.0
    return MonotonicityReport(bool(min_gap >= -tol), min_gap, pairs)
