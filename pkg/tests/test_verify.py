"""Identity verification tests.

The A2 pair of simples is small enough to check by hand: the unique
extension of S1 by S2 is the module supported on the original arrow,
the opposite extension is supported on the reversed arrow, and the
fingerprints (1, 0) and (0, 1) add up to the direct sum's (1, 1).  The
star quiver oracles are frozen from the stratification runs: the
projective extension line of the (S4, T) pair carries p - 2 generic
classes and three special ones at every good prime, in both directions.
"""

from collections import OrderedDict

import pytest

from preproj import d4
from preproj.fields import QQ
from preproj.flags import fingerprint
from preproj.homext import ext_presentation
from preproj.module import LambdaModule, direct_sum, reduce_mod_p, simple
from preproj.quiver import Quiver, double
from preproj.verify import (
    AnchorCollision,
    GenericVote,
    Stratum,
    UnanchoredStratum,
    VerificationReport,
    discover_generic_lambda,
    stratify_proj_ext,
    verify_thm_1_1,
    verify_thm_1_2,
)


def a2_double():
    return double(Quiver.build(["1", "2"], [("a", "1", "2")]))


def x_module(dq):
    return LambdaModule.build(dq, QQ, (1, 1), {"a": [[1]]})


def y_module(dq):
    return LambdaModule.build(dq, QQ, (1, 1), {"a*": [[1]]})


def m_anchors(zoo):
    return OrderedDict((n, zoo[n]) for n in ("M(lam)", "M(0)", "M(-1)", "M(inf)"))


def r_anchors(zoo):
    return OrderedDict((n, zoo[n]) for n in ("R", "A", "B", "C"))


def test_unique_extension_identity_on_a2():
    dq = a2_double()
    rep = verify_thm_1_2(simple(dq, "1", QQ), simple(dq, "2", QQ))
    assert rep.passed
    assert rep.method == "unique-extension"
    assert rep.ext1_dim == 1
    assert rep.words == (("1", "2"), ("2", "1"))
    assert rep.left_values == (1, 1)
    assert rep.right_values == (1, 1)
    assert rep.strata_fwd == () and rep.strata_bwd == ()
    assert rep.mismatches() == ()
    assert rep.elapsed > 0
    assert rep.primes_used == tuple(sorted(rep.primes_used))
    assert len(rep.primes_used) >= 3


def test_unique_extension_rejects_higher_ext_dimension():
    zoo = d4.zoo(1)
    with pytest.raises(ValueError, match="needs exactly 1"):
        verify_thm_1_2(zoo["S4"], zoo["T"])


def test_unique_extension_rejects_split_class():
    dq = a2_double()
    s1, s2 = simple(dq, "1", QQ), simple(dq, "2", QQ)
    zero = ext_presentation(s1, s2).ext1_basis[0].scale(0)
    with pytest.raises(ValueError, match="split"):
        verify_thm_1_2(s1, s2, d=zero)


def test_unique_extension_rejects_wrong_direction_class():
    dq = a2_double()
    s1, s2 = simple(dq, "1", QQ), simple(dq, "2", QQ)
    forward = ext_presentation(s1, s2).ext1_basis[0]
    with pytest.raises(ValueError, match="does not live"):
        verify_thm_1_2(s1, s2, g=forward)


def test_singleton_stratum_on_a2():
    dq = a2_double()
    s1, s2 = simple(dq, "1", QQ), simple(dq, "2", QQ)
    strata = stratify_proj_ext(s1, s2, {"x": x_module(dq)})
    assert len(strata) == 1
    st = strata[0]
    assert st.name == "x"
    assert st.chi_proj == 1
    assert all(size == 1 for _, size in st.sizes)
    assert len(st.window) == 1 and len(st.validation) == 2
    assert st.polynomial(17) == 1
    assert st.fingerprint.chi == (1, 0)


def test_pairwise_equals_unique_extension_when_ext_is_one():
    dq = a2_double()
    s1, s2 = simple(dq, "1", QQ), simple(dq, "2", QQ)
    pairwise = verify_thm_1_1(s1, s2, {"x": x_module(dq)}, {"y": y_module(dq)})
    unique = verify_thm_1_2(s1, s2)
    assert pairwise.passed and unique.passed
    assert pairwise.ext1_dim == 1
    assert pairwise.words == unique.words
    assert pairwise.left_values == unique.left_values
    assert pairwise.right_values == unique.right_values


def test_forward_stratification_of_the_star_pair_frozen():
    zoo = d4.zoo(1)
    strata = stratify_proj_ext(
        zoo["S4"], zoo["T"], m_anchors(zoo), prime_list=[3, 5, 7, 11, 13]
    )
    assert tuple(s.name for s in strata) == ("M(lam)", "M(0)", "M(-1)", "M(inf)")
    assert tuple(s.chi_proj for s in strata) == (-1, 1, 1, 1)
    generic = strata[0]
    assert generic.sizes == ((3, 1), (5, 3), (7, 5), (11, 9))
    assert generic.window == (3, 5)
    assert generic.validation == (7, 11)
    assert generic.polynomial(29) == 27
    for special in strata[1:]:
        assert special.sizes == ((3, 1), (5, 1), (7, 1), (11, 1))
    for k, p in enumerate((3, 5, 7, 11)):
        assert sum(s.sizes[k][1] for s in strata) == p + 1


def test_backward_stratification_of_the_star_pair_frozen():
    zoo = d4.zoo(1)
    strata = stratify_proj_ext(
        zoo["T"], zoo["S4"], r_anchors(zoo), prime_list=[2, 3, 5, 7]
    )
    assert tuple(s.name for s in strata) == ("R", "A", "B", "C")
    assert tuple(s.chi_proj for s in strata) == (-1, 1, 1, 1)
    assert strata[0].sizes == ((2, 0), (3, 1), (5, 3), (7, 5))
    assert strata[0].window == (2, 3)
    assert strata[0].validation == (5, 7)


def test_default_primes_skip_the_anchor_collision_at_two():
    # M(1) and M(-1) agree mod 2, so the forward sweep must start at 3.
    zoo = d4.zoo(1)
    strata = stratify_proj_ext(zoo["S4"], zoo["T"], m_anchors(zoo))
    assert strata[0].sizes[0][0] == 3
    assert tuple(s.chi_proj for s in strata) == (-1, 1, 1, 1)


def test_pairwise_identity_on_the_star_pair():
    zoo = d4.zoo(1)
    rep = verify_thm_1_1(zoo["S4"], zoo["T"], m_anchors(zoo), r_anchors(zoo))
    assert rep.passed
    assert rep.ext1_dim == 2
    assert len(rep.words) == 60
    assert sum(s.chi_proj for s in rep.strata_fwd) == 2
    assert sum(s.chi_proj for s in rep.strata_bwd) == 2
    total = fingerprint(direct_sum(zoo["T"], zoo["S4"]))
    assert rep.left_values == tuple(2 * c for c in total.chi)
    assert rep.mismatches() == ()


def test_pairwise_identity_is_symmetric_in_the_pair():
    zoo = d4.zoo(1)
    rep = verify_thm_1_1(zoo["S4"], zoo["T"], m_anchors(zoo), r_anchors(zoo))
    swapped = verify_thm_1_1(zoo["T"], zoo["S4"], r_anchors(zoo), m_anchors(zoo))
    assert rep.passed and swapped.passed
    assert rep.words == swapped.words
    assert rep.left_values == swapped.left_values
    assert rep.right_values == swapped.right_values


def test_pairwise_identity_needs_extensions():
    dq = a2_double()
    s1 = simple(dq, "1", QQ)
    with pytest.raises(ValueError, match="meaningless"):
        verify_thm_1_1(s1, s1, {}, {})


def test_stratify_rejects_bad_inputs():
    zoo = d4.zoo(1)
    dq = a2_double()
    s1 = simple(dq, "1", QQ)
    with pytest.raises(ValueError, match="nothing to stratify"):
        stratify_proj_ext(s1, s1, {})
    with pytest.raises(ValueError, match="different quiver"):
        stratify_proj_ext(zoo["S4"], zoo["T"], {"x": x_module(dq)})
    with pytest.raises(ValueError, match="dimension vector"):
        stratify_proj_ext(zoo["S4"], zoo["T"], {"T": zoo["T"]})
    with pytest.raises(ValueError, match="rationals"):
        stratify_proj_ext(
            zoo["S4"], zoo["T"], {"M(0)": reduce_mod_p(zoo["M(0)"], 5)}
        )
    with pytest.raises(ValueError, match="rational modules"):
        stratify_proj_ext(
            reduce_mod_p(zoo["S4"], 5), reduce_mod_p(zoo["T"], 5), {}
        )


def test_unanchored_stratum_is_reported():
    zoo = d4.zoo(1)
    with pytest.raises(UnanchoredStratum, match="match no anchor"):
        stratify_proj_ext(zoo["S4"], zoo["T"], {"M(0)": zoo["M(0)"]})


def test_anchor_collision_is_reported():
    zoo = d4.zoo(1)
    twins = OrderedDict([("one", d4.m_family(1)), ("two", d4.m_family(1))])
    with pytest.raises(AnchorCollision, match="indistinguishable"):
        stratify_proj_ext(zoo["S4"], zoo["T"], twins, prime_list=[5, 7, 11, 13])


def test_majority_vote_on_the_generic_family():
    vote = discover_generic_lambda(d4.m_family, [1, 2, 0])
    assert vote.members == (1, 2)
    assert vote.outliers == (0,)
    assert vote.fingerprint.chi == fingerprint(d4.m_family(1)).chi


def test_majority_vote_rejects_ties():
    with pytest.raises(ValueError, match="inconclusive"):
        discover_generic_lambda(d4.m_family, [1, 0])
    with pytest.raises(ValueError, match="no candidate"):
        discover_generic_lambda(d4.m_family, [])


def test_report_mismatch_accounting():
    dq = a2_double()
    rep = VerificationReport(
        method="pairwise",
        left_module=x_module(dq),
        right_module=y_module(dq),
        ext1_dim=1,
        strata_fwd=(),
        strata_bwd=(),
        words=(("1", "2"), ("2", "1")),
        left_values=(1, 1),
        right_values=(1, 0),
        primes_used=(2, 3, 5),
        elapsed=0.1,
    )
    assert not rep.passed
    assert rep.mismatches() == (("2", "1"),)
