"""Module construction, validation, restriction, reduction, direct sums."""

from fractions import Fraction

import pytest

from preproj import d4
from preproj.fields import QQ, Field
from preproj.linalg import Matrix, Subspace
from preproj.module import (
    BadPrime,
    LambdaModule,
    base_change,
    direct_sum,
    full_graded,
    is_nilpotent,
    reduce_mod_p,
    relation_residual,
    restrict,
    simple,
    validate,
    zero_module,
)
from preproj.quiver import Quiver, double


def a2_double():
    return double(Quiver.build(["1", "2"], [("a", "1", "2")]))


def kronecker_double():
    return double(Quiver.build(["1", "2"], [("a1", "1", "2"), ("a2", "1", "2")]))


def test_build_fills_zeros_and_checks_shapes():
    dq = a2_double()
    m = LambdaModule.build(dq, QQ, (1, 1), {"a": [[1]]})
    assert m.x("a*").is_zero()
    assert m.total_dim == 2
    with pytest.raises(ValueError, match="arrow a"):
        LambdaModule.build(dq, QQ, (1, 1), {"a": [[1], [2]]})
    with pytest.raises(ValueError, match="unknown arrow"):
        LambdaModule.build(dq, QQ, (1, 1), {"zz": [[1]]})


def test_dim_mapping_form():
    dq = a2_double()
    m = LambdaModule.build(dq, QQ, {"2": 3}, {})
    assert m.dim == (0, 3)


def test_validate_flags_relation_residual():
    dq = a2_double()
    good = LambdaModule.build(dq, QQ, (1, 1), {"a": [[1]]})
    assert validate(good).ok
    bad = LambdaModule.build(dq, QQ, (1, 1), {"a": [[1]], "a*": [[1]]})
    report = validate(bad)
    assert not report.ok
    vertices = [v for v, _ in report.residuals]
    assert vertices == ["1", "2"]
    # at vertex 1 the relation reads +x(a*)x(a) = 1, at vertex 2 it picks
    # the bar sign: -x(a)x(a*) = -1
    assert report.residuals[0][1] == Matrix.from_rows(QQ, [[1]])
    assert report.residuals[1][1] == Matrix.from_rows(QQ, [[-1]])


def test_relation_residual_shape_on_zero_dim():
    dq = a2_double()
    m = simple(dq, "1", QQ)
    assert relation_residual(m, "2").nrows == 0


def test_nilpotency_detects_cancellation_fake():
    # relations hold but the module is a shifted regular one: the two
    # parallel arrows act by 1 and -1, their bars both by 1, and the radical
    # chain never shrinks
    dq = kronecker_double()
    m = LambdaModule.build(
        dq, QQ, (1, 1),
        {"a1": [[1]], "a2": [[-1]], "a1*": [[1]], "a2*": [[1]]},
    )
    report = validate(m)
    assert report.residuals == ()
    assert report.nilpotent is False
    assert not report.ok


def test_simple_and_zero_are_nilpotent():
    dq = a2_double()
    assert validate(simple(dq, "1", QQ)).ok
    assert validate(zero_module(dq, QQ)).ok
    assert is_nilpotent(zero_module(dq, QQ))


def test_direct_sum_blocks():
    dq = a2_double()
    s1 = simple(dq, "1", QQ)
    s2 = simple(dq, "2", QQ)
    m = direct_sum(s1, s2)
    assert m.dim == (1, 1)
    assert m.x("a").is_zero()
    other = LambdaModule.build(a2_double(), Field(5), (1, 0), {})
    with pytest.raises(ValueError, match="field"):
        direct_sum(s1, other)


def test_restrict_to_stable_subspace():
    t = d4.t_module()
    sub = list(full_graded(t))
    sub[0] = Subspace.zero(QQ, 1)
    restricted = restrict(t, tuple(sub))
    assert restricted.dim == (0, 1, 1, 1)
    assert restricted.x("b") == Matrix.from_rows(QQ, [[1]])
    assert validate(restricted).ok


def test_restrict_unstable_names_arrow():
    t = d4.t_module()
    sub = list(full_graded(t))
    sub[3] = Subspace.zero(QQ, 1)
    with pytest.raises(ValueError, match="arrow a"):
        restrict(t, tuple(sub))


def test_reduce_mod_p_and_bad_prime():
    m = d4.m_family(Fraction(1, 3))
    with pytest.raises(BadPrime, match="mod 3"):
        reduce_mod_p(m, 3)
    r = reduce_mod_p(m, 5)
    # -1 - 1/3 = -4/3, and -4 * inv(3) = -4 * 2 = 2 mod 5
    assert r.x("a*") == Matrix.from_rows(Field(5), [[2, 0]])
    assert validate(r).ok
    with pytest.raises(ValueError, match="rational"):
        reduce_mod_p(r, 5)


def test_base_change_keeps_relations():
    m = d4.m_family(2)
    g = [
        Matrix.from_rows(QQ, [[3]]),
        Matrix.from_rows(QQ, [[1]]),
        Matrix.from_rows(QQ, [[-2]]),
        Matrix.from_rows(QQ, [[1, 1], [0, 1]]),
    ]
    changed = base_change(m, g)
    assert validate(changed).ok
    assert changed.dim == m.dim
    with pytest.raises(ValueError, match="invertible"):
        base_change(m, [Matrix.zeros(QQ, 1, 1)] + g[1:])


def test_zoo_members_are_valid_nilpotent_modules():
    modules = d4.zoo(lam=1)
    assert set(modules) == {
        "T", "S4", "M(lam)", "M(0)", "M(-1)", "M(inf)",
        "R", "A", "B", "C", "F", "G", "H",
    }
    for name, m in modules.items():
        report = validate(m)
        assert report.ok, f"{name} failed validation"
    assert modules["T"].dim == (1, 1, 1, 1)
    assert modules["S4"].dim == (0, 0, 0, 1)
    for name in ("M(lam)", "M(0)", "M(-1)", "M(inf)", "R", "A", "B", "C", "F", "G", "H"):
        assert modules[name].dim == (1, 1, 1, 2)


def test_zoo_rejects_degenerate_parameters():
    for lam in (0, -1, Fraction(-1)):
        with pytest.raises(ValueError, match="degenerate"):
            d4.zoo(lam)


def test_m_family_specializes_to_named_degenerations():
    assert d4.m_family(0).action == d4.m_zero().action
    assert d4.m_family(-1).action == d4.m_minus_one().action
    lam = Fraction(7, 2)
    m = d4.m_family(lam)
    assert m.x("a*") == Matrix.from_rows(QQ, [[Fraction(-9, 2), 0]])
    assert m.x("c*") == Matrix.from_rows(QQ, [[lam, 0]])


def test_canonical_key_distinguishes_modules():
    assert d4.m_family(1).canonical_key() != d4.m_family(2).canonical_key()
    assert d4.m_family(1).canonical_key() == d4.m_family(1).canonical_key()
