"""Defect operators, tails, and the positivity classifications."""

import itertools
import math

import numpy as np
import pytest

from wberg.bergman import TruncatedSpace, multishift_tuple
from wberg.errors import ArityMismatch, NotCommuting, NotContractive
from wberg.generators import (
    commuting_unitaries,
    nilpotent_commuting_tuple,
    random_commuting_contractions,
    scalar_tuple,
    unitary_times_nilpotent,
)
from wberg.hyper import (
    OperatorTuple,
    two_parameter_monotonicity_check,
    defect_limit,
    defect_operator,
    defect_series,
    delta_power,
    equivalence_crosscheck,
    is_gamma_contractive,
    is_omega_hypercontraction,
    is_pure,
    is_W_hypercontraction,
    subtuple,
    subtuple_inheritance_check,
    tail_operator,
)
from wberg.linalg import Operator, psd_check
from wberg.series import MultiWeightSpec, WeightSpec

HARDY = WeightSpec.hardy()
B2 = WeightSpec.bergman(2)
B3 = WeightSpec.bergman(3)


def closed_kernel_value(spec: WeightSpec, r: float) -> float:
    beta = 1.0 if spec.kind == "hardy" else spec.beta
    return (1.0 - r) ** (-beta)


# ---------------------------------------------------------------------------
# operator tuples
# ---------------------------------------------------------------------------

def test_tuple_invariants():
    with pytest.raises(NotContractive):
        OperatorTuple.of(Operator([[1.5]]))
    a = Operator([[0.0, 0.5], [0.0, 0.0]])
    b = Operator([[0.0, 0.0], [0.5, 0.0]])
    with pytest.raises(NotCommuting):
        OperatorTuple.of(a, b)
    t = OperatorTuple.of(a, Operator([[0.0, 0.25], [0.0, 0.0]]))
    assert t.n == 2 and t.dim == 2


def test_swap_family_enumeration():
    w = MultiWeightSpec.parse("bergman:2,bergman:3,hardy")
    family = list(w.swap_family())
    assert len(family) == 8
    masks = [mask for mask, _ in family]
    assert masks == sorted(masks)
    assert family[0][1].text == "hardy,hardy,hardy"
    assert family[-1][1].text == w.text


# ---------------------------------------------------------------------------
# defect series
# ---------------------------------------------------------------------------

def test_defect_series_zero_operator():
    t = OperatorTuple.of(Operator([[0.0]]))
    for spec in (HARDY, B2, WeightSpec.bergman(1.5)):
        val = defect_series(t, MultiWeightSpec.of(spec), (0.7,))
        assert val.mat[0, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("wtxt", ["hardy", "bergman:1.5", "bergman:2", "bergman:3"])
def test_defect_series_coisometries(wtxt):
    t = commuting_unitaries(5, 4, 2)
    w = MultiWeightSpec.parse(f"{wtxt},{wtxt}")
    for _, member in w.swap_family():
        for r in (0.5, 0.875):
            val = defect_series(t, member, (r, r))
            expected = 1.0
            for spec in member:
                expected /= closed_kernel_value(spec, r)
            assert np.linalg.norm(val.mat - expected * np.eye(4), 2) < 1e-10


def test_defect_series_truncated_shift_explicit():
    # multiplication by z on a 4-slot constant-weight truncation
    space = TruncatedSpace(MultiWeightSpec.of(HARDY), (4,))
    s = multishift_tuple(space)
    val = defect_series(s, MultiWeightSpec.of(HARDY), (1.0,))
    # direct 4x4 oracle: I - S S* is the projection onto the constant slot
    smat = s[0].mat
    oracle = np.eye(4) - smat @ smat.conj().T
    assert np.allclose(val.mat, oracle, atol=1e-14)
    assert np.allclose(oracle, np.diag([1.0, 0, 0, 0]), atol=1e-14)


def test_defect_series_arity_mismatch():
    t = OperatorTuple.of(Operator([[0.0]]))
    with pytest.raises(ArityMismatch):
        defect_series(t, MultiWeightSpec.parse("hardy,hardy"), (0.5, 0.5))


# ---------------------------------------------------------------------------
# defect limits and operators
# ---------------------------------------------------------------------------

def test_defect_limit_zero_operator():
    t = OperatorTuple.of(Operator([[0.0, 0.0], [0.0, 0.0]]))
    res = defect_limit(t, MultiWeightSpec.of(B2))
    assert res.method == "direct_sum_at_one"
    assert res.converged
    assert np.allclose(res.limit.mat, np.eye(2))


def test_defect_limit_nilpotent_direct_and_exact():
    t = nilpotent_commuting_tuple(9, 5, 2, radius=0.6)
    w = MultiWeightSpec.parse("hardy,bergman:2")
    res = defect_limit(t, w)
    assert res.method == "direct_sum_at_one"
    direct = defect_series(t, w, (1.0, 1.0))
    assert np.allclose(res.limit.mat, direct.mat, atol=0)


def test_defect_limit_grid_monotone_decrease():
    # non-integer weight on a unitary coordinate: tails cannot be certified,
    # so the dyadic sweep runs; monotonicity is all that can be asserted
    t = commuting_unitaries(3, 3, 1)
    w = MultiWeightSpec.of(WeightSpec.bergman(1.5))
    res = defect_limit(t, w, grid_policy="grid", max_levels=8)
    assert res.method == "monotone_grid"
    values = [defect_series(t, w, (r,)).mat for r, _ in res.r_trace]
    for a, b in zip(values, values[1:]):
        gap = a - b  # D(r) decreases as r grows
        assert np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0] >= -1e-10


def test_defect_operator_values():
    t0 = OperatorTuple.of(Operator([[0.0]]))
    assert defect_operator(t0, MultiWeightSpec.of(HARDY)).mat[0, 0] == pytest.approx(1.0)
    # single contraction, constant weights: the classical defect
    tri = nilpotent_commuting_tuple(4, 4, 1, radius=0.7)
    d = defect_operator(tri, MultiWeightSpec.of(HARDY))
    oracle = np.eye(4) - tri[0].mat @ tri[0].mat.conj().T
    assert np.allclose((d @ d).mat, oracle, atol=1e-12)
    # scalar with quadratic weights
    tval = 0.6 + 0.2j
    ts = scalar_tuple([tval])
    d2 = defect_operator(ts, MultiWeightSpec.of(B2))
    assert (d2 @ d2).mat[0, 0] == pytest.approx((1 - abs(tval) ** 2) ** 2, rel=1e-12)


# ---------------------------------------------------------------------------
# tail operators and purity
# ---------------------------------------------------------------------------

def test_tail_operator_cases():
    nil = nilpotent_commuting_tuple(2, 4, 1, radius=0.9)[0]
    assert tail_operator(nil).q.norm() < 1e-12
    u = commuting_unitaries(8, 3, 1)[0]
    res = tail_operator(u)
    assert np.allclose(res.q.mat, np.eye(3), atol=1e-10)
    assert res.converged
    mixed = Operator(np.diag([1.0, 0.5]))
    res = tail_operator(mixed)
    assert np.allclose(res.q_squared.mat, np.diag([1.0, 0.0]), atol=1e-12)


def test_tail_operator_rejects_expansive():
    with pytest.raises(NotContractive):
        tail_operator(Operator([[2.0]]))


def test_is_pure():
    assert is_pure(nilpotent_commuting_tuple(3, 4, 2, radius=0.8))
    assert is_pure(OperatorTuple.of(Operator(np.diag([0.5, 1 / 3]))))
    mixed = unitary_times_nilpotent(11, 2, 2)
    assert not is_pure(mixed)


# ---------------------------------------------------------------------------
# single-operator classification
# ---------------------------------------------------------------------------

def test_is_omega_zero_operator():
    for spec in (HARDY, B2, WeightSpec.bergman(1.5)):
        assert is_omega_hypercontraction(Operator([[0.0]]), spec).verdict


def test_is_omega_truncated_shift_with_own_weight():
    for spec in (HARDY, B2, B3):
        space = TruncatedSpace(MultiWeightSpec.of(spec), (6,))
        shift = multishift_tuple(space)[0]
        rep = is_omega_hypercontraction(shift, spec)
        assert rep.verdict
        assert rep.limit_min_eig is not None and rep.limit_min_eig >= -1e-10


def test_is_omega_scalar_limit_value():
    tval = 0.8
    rep = is_omega_hypercontraction(Operator([[tval]]), B2)
    assert rep.verdict
    assert rep.limit_min_eig == pytest.approx((1 - tval**2) ** 2, rel=1e-10)


def test_is_omega_failure_witness():
    # norm-0.9 nilpotent fails the quadratic-weight test
    t = nilpotent_commuting_tuple(1, 4, 1, radius=0.9)[0]
    rep = is_omega_hypercontraction(t, B2)
    assert not rep.verdict
    assert any(c.min_eig < -1e-8 for c in rep.certificates)


# ---------------------------------------------------------------------------
# tuple classification
# ---------------------------------------------------------------------------

def test_is_w_coisometries_any_weight():
    t = commuting_unitaries(13, 4, 2)
    for wtxt in ("hardy,hardy", "bergman:2,bergman:1.5", "bergman:3,hardy"):
        assert is_W_hypercontraction(t, MultiWeightSpec.parse(wtxt)).verdict


def test_is_w_coisometry_prepended_to_hypercontraction():
    # a co-isometric first coordinate tensored against a hypercontractive rest
    t = unitary_times_nilpotent(19, 2, 3)
    w = MultiWeightSpec.parse("bergman:3,hardy")
    assert is_W_hypercontraction(t, w).verdict


def test_is_w_multishift_pure():
    w = MultiWeightSpec.parse("bergman:2,bergman:2")
    space = TruncatedSpace(w, (4, 4))
    shifts = multishift_tuple(space)
    assert is_W_hypercontraction(shifts, w).verdict
    assert is_pure(shifts)


def test_is_w_failure_records_witness():
    t = nilpotent_commuting_tuple(1, 4, 2, radius=0.9)
    rep = is_W_hypercontraction(t, MultiWeightSpec.parse("bergman:2,bergman:2"))
    assert not rep.verdict
    assert rep.first_failure is not None
    assert rep.first_failure.min_eig < -1e-8


def test_grid_caveat_is_reported():
    t = scalar_tuple([0.5])
    rep = is_W_hypercontraction(t, MultiWeightSpec.of(HARDY))
    assert "grid" in rep.caveat


# ---------------------------------------------------------------------------
# hereditary powers
# ---------------------------------------------------------------------------

def test_delta_power_zero_exponent():
    t = scalar_tuple([0.5, 0.5])
    x = Operator([[2.0]])
    assert delta_power(t, (0, 0), x).mat[0, 0] == pytest.approx(2.0)


def test_delta_power_scalar_product_rule():
    vals = [0.5, 0.3 + 0.4j]
    t = scalar_tuple(vals)
    out = delta_power(t, (1, 1), Operator.identity(1))
    expected = np.prod([1 - abs(v) ** 2 for v in vals])
    assert out.mat[0, 0] == pytest.approx(expected, rel=1e-12)


def test_delta_power_matches_alternating_binomial_sum():
    t = random_commuting_contractions(31, 5, 2, radius=0.8)
    beta = (2, 1)
    got = delta_power(t, beta, Operator.identity(5)).mat
    acc = np.zeros((5, 5), dtype=complex)
    for alpha in itertools.product(range(beta[0] + 1), range(beta[1] + 1)):
        coeff = (-1) ** sum(alpha) * math.comb(beta[0], alpha[0]) * math.comb(beta[1], alpha[1])
        ta = np.linalg.matrix_power(t[0].mat, alpha[0]) @ np.linalg.matrix_power(
            t[1].mat, alpha[1]
        )
        acc += coeff * ta @ ta.conj().T
    assert np.linalg.norm(got - acc, 2) < 1e-10


def test_delta_power_fractional_scalar():
    tval = 0.7
    t = scalar_tuple([tval])
    out = delta_power(t, (1.5,), Operator.identity(1))
    assert out.mat[0, 0] == pytest.approx((1 - tval**2) ** 1.5, rel=1e-9)


def test_delta_power_fractional_exact_on_nilpotents():
    t = nilpotent_commuting_tuple(8, 4, 1, radius=0.6)
    out = delta_power(t, (2.5,), Operator.identity(4))
    cert = psd_check(out, 1e-8)
    assert cert.verdict  # nilpotent contraction at small radius stays positive


# ---------------------------------------------------------------------------
# gamma-contractivity and the equivalence
# ---------------------------------------------------------------------------

def test_is_gamma_scalar_pair():
    assert is_gamma_contractive(scalar_tuple([0.5, 0.5]), (1, 1)).verdict


def test_is_gamma_coisometries():
    t = commuting_unitaries(23, 3, 2)
    for gamma in [(1, 1), (3, 2)]:
        assert is_gamma_contractive(t, gamma).verdict


def test_is_gamma_failure_witness():
    t = nilpotent_commuting_tuple(1, 4, 2, radius=0.9)
    rep = is_gamma_contractive(t, (2, 2))
    assert not rep.verdict
    assert rep.first_failure is not None


def test_equivalence_scalar_sweep():
    for a in (0.2, 0.5, 0.8):
        for b in (0.3, 0.9):
            rep = equivalence_crosscheck(scalar_tuple([a, b]), (2, 2))
            assert rep.agree and rep.gamma_report.verdict


def test_equivalence_multishift():
    w = MultiWeightSpec.parse("bergman:2,bergman:2")
    shifts = multishift_tuple(TruncatedSpace(w, (4, 4)))
    rep = equivalence_crosscheck(shifts, (2, 2))
    assert rep.agree and rep.w_report.verdict


def test_equivalence_rejects_expansive_upstream():
    with pytest.raises(NotContractive):
        OperatorTuple.of(Operator([[1.2]]), Operator([[0.5]]))


@pytest.mark.parametrize("gamma", [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3)])
def test_equivalence_seeded_pairs(gamma):
    for seed in range(10):
        t = random_commuting_contractions(seed, 4 + seed % 3, 2, radius=0.9)
        assert equivalence_crosscheck(t, gamma).agree


def test_real_gamma_finite_criterion_downward_closed():
    # passing at a larger exponent must propagate down the checked set
    for seed in range(6):
        t = nilpotent_commuting_tuple(seed, 5, 2, radius=0.5)
        rep = is_gamma_contractive(t, (1.5, 2.0))
        verdicts = dict(rep.witnesses)
        for beta, eig in rep.witnesses:
            for beta2, eig2 in rep.witnesses:
                if all(x <= y for x, y in zip(beta, beta2)):
                    if eig2 >= -1e-8:  # larger exponent passes
                        assert eig >= -1e-8 or not np.all(
                            [x <= y for x, y in zip(beta, beta2)]
                        )


# ---------------------------------------------------------------------------
# subtuples
# ---------------------------------------------------------------------------

def test_subtuple_full_set_is_identity():
    t = nilpotent_commuting_tuple(6, 4, 2, radius=0.5)
    sub = subtuple(t, (0, 1))
    assert all(np.array_equal(a.mat, b.mat) for a, b in zip(sub, t))


def test_subtuple_inheritance_coisometries():
    t = commuting_unitaries(29, 3, 3)
    w = MultiWeightSpec.parse("bergman:2,hardy,bergman:1.5")
    for lam in [(0,), (1, 2), (0, 2)]:
        rep = subtuple_inheritance_check(t, w, lam)
        assert rep.consistent and rep.parent.verdict and rep.sub.verdict


def test_subtuple_inheritance_seeded_pair():
    t = nilpotent_commuting_tuple(17, 5, 2, radius=0.45)
    w = MultiWeightSpec.parse("bergman:2,bergman:2")
    parent = is_W_hypercontraction(t, w)
    assert parent.verdict
    rep = subtuple_inheritance_check(t, w, (0,))
    assert rep.consistent and rep.sub.verdict


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------

def test_loewner_monotonicity_in_r():
    t = nilpotent_commuting_tuple(41, 5, 2, radius=0.5)
    w = MultiWeightSpec.parse("hardy,bergman:2")
    assert is_W_hypercontraction(t, w).verdict
    pts = [(0.3, 0.3), (0.6, 0.6), (0.9, 0.9)]
    for a, b in zip(pts, pts[1:]):
        gap = defect_series(t, w, a) - defect_series(t, w, b)
        assert psd_check(gap, 1e-10).verdict


def test_appendix_two_parameter_monotonicity():
    t = nilpotent_commuting_tuple(43, 5, 2, radius=0.5)
    w = MultiWeightSpec.parse("bergman:2,hardy")
    rep = two_parameter_monotonicity_check(
        t, w, lam=(0,), r_points=[(0.4,), (0.7,), (0.95,)],
        beta_points=[(0,), (1,), (2,)], tol=1e-10,
    )
    assert rep.ok and rep.pairs_checked > 0


def test_appendix_monotonicity_scalar_chain():
    t = scalar_tuple([0.6, 0.8])
    w = MultiWeightSpec.parse("bergman:2,hardy")
    rep = two_parameter_monotonicity_check(
        t, w, lam=(0,), r_points=[(0.25,), (0.5,), (1.0,)],
        beta_points=[(0,), (1,), (3,)], tol=1e-12,
    )
    assert rep.ok
    # scalar oracle: f(r, b) = |t2|^(2b) * (1 - r |t1|^2)^2
    vals = {}
    for r in (0.25, 0.5, 1.0):
        for b in (0, 1, 3):
            vals[(r, b)] = 0.8 ** (2 * b) * (1 - r * 0.36) ** 2
    for (r1, b1), v1 in vals.items():
        for (r2, b2), v2 in vals.items():
            if r1 <= r2 and b1 <= b2:
                assert v1 >= v2 - 1e-12


def test_telescoping_identity():
    # the defect of a sub-tuple expands into conjugated full defects plus a
    # geometric remainder controlled by the dropped power
    t = nilpotent_commuting_tuple(47, 5, 2, radius=0.6)
    w_sub = MultiWeightSpec.of(B2)
    w_ext = MultiWeightSpec.parse("bergman:2,hardy")
    r1, r2 = 0.7, 0.6
    lhs = defect_series(subtuple(t, (0,)), w_sub, (r1,)).mat
    full = defect_series(t, w_ext, (r1, r2)).mat
    acc = np.zeros_like(lhs)
    tn = t[1].mat
    for k in range(8):  # nilpotency order 5: remainder is exactly zero
        tk = np.linalg.matrix_power(tn, k)
        acc += (r2**k) * tk @ full @ tk.conj().T
    assert np.linalg.norm(lhs - acc, 2) < 1e-12


def test_telescoping_remainder_bound():
    t = scalar_tuple([0.5, 0.9])
    w_sub = MultiWeightSpec.of(HARDY)
    w_ext = MultiWeightSpec.parse("hardy,hardy")
    r = (0.8, 0.8)
    lhs = defect_series(subtuple(t, (0,)), w_sub, (r[0],)).mat
    full = defect_series(t, w_ext, r).mat
    for K in (3, 8, 16):
        acc = sum(
            (r[1] ** k) * (0.9 ** (2 * k)) * full for k in range(K + 1)
        )
        remainder = np.linalg.norm(lhs - acc, 2)
        bound = (r[1] * 0.81) ** (K + 1) * np.linalg.norm(lhs, 2) / (1 - r[1] * 0.81)
        assert remainder <= bound * (1 + 1e-9)


def test_explicit_weight_list_flows_through_classification():
    spec = WeightSpec.from_values([1.0, 0.5, 0.25, 0.125, 0.0625])
    w = MultiWeightSpec.of(spec)
    t = scalar_tuple([0.4])
    rep = is_W_hypercontraction(t, w)
    assert rep.verdict
    val = defect_series(t, w, (0.5,))
    assert val.mat[0, 0].real == pytest.approx(
        float(np.sum(spec.inverse_coeffs(5) * (0.5 * 0.16) ** np.arange(5)))
    )


def test_defect_operator_warns_on_unconverged_grid():
    import warnings as _warnings

    from wberg.errors import NotPsd, SeriesTailTooLarge

    t = commuting_unitaries(3, 3, 1)
    w = MultiWeightSpec.of(WeightSpec.bergman(1.5))
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        # deep grid levels leave truncation debris: the warning fires first,
        # then the clamped-negative check rejects the unconverged value
        with pytest.raises(NotPsd):
            defect_operator(t, w, tol=1e-12)
    assert any(issubclass(c.category, SeriesTailTooLarge) for c in caught)
