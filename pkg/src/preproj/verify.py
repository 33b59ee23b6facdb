"""Machine checks of the two flag-multiplication identities.

The pairwise identity says: with n = dim Ext^1(x', x'') > 0,

    n * delta_{x' + x''}  =  sum over strata  (chi of the stratum inside
        P Ext^1(x', x'') plus chi of the stratum inside P Ext^1(x'', x'))
        times delta of the stratum's middle term,

where delta is the Euler-characteristic fingerprint and x' + x'' is the
direct sum.  The unique-extension identity is the n = 1 case, with the
two middle terms appearing directly and coefficient 1.

Strata are found by brute force over prime fields: every projective
extension class is expanded against the chosen Ext^1 basis, the count
vector of its middle term is matched against the supplied anchor
modules, and the per-anchor group sizes are interpolated across primes
(polynomials in p of degree below dim Ext^1) and evaluated at 1.
"""

import time
from collections import OrderedDict
from dataclasses import dataclass
from itertools import islice, product
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .fields import primes
from .flags import (
    MAX_WINDOW_SHIFT,
    VALIDATION_PRIMES,
    DeltaFingerprint,
    InsufficientPrimes,
    NonPolynomialCount,
    _PrimePool,
    count_flags_fp,
    fingerprint,
)
from .homext import Derivation, ext_presentation, is_inner, middle_term
from .linalg import Polynomial, interpolate
from .module import BadPrime, LambdaModule, direct_sum, reduce_mod_p
from .quiver import Word

# Hard cap on candidate primes when none are given explicitly, so a pair
# of anchors that stay indistinguishable forever terminates with an
# AnchorCollision instead of marching up the primes.
CANDIDATE_CAP = 32


class UnanchoredStratum(RuntimeError):
    """Some extension class's count vector matches no anchor module."""


class AnchorCollision(RuntimeError):
    """Two anchors stayed indistinguishable at every usable prime."""


@dataclass(frozen=True)
class Stratum:
    """One anchored stratum of a projective extension space.

    ``sizes`` records, for every sampled prime, how many projective
    classes produced the anchor's count vector there; ``polynomial``
    is fitted on the ``window`` primes and checked on the ``validation``
    primes, and ``chi_proj`` is its value at 1, the Euler characteristic
    of the stratum.
    """

    name: str
    anchor: LambdaModule
    fingerprint: DeltaFingerprint
    sizes: Tuple[Tuple[int, int], ...]
    window: Tuple[int, ...]
    validation: Tuple[int, ...]
    polynomial: Polynomial
    chi_proj: int


@dataclass(frozen=True)
class VerificationReport:
    """Both sides of one identity, evaluated word by word.

    ``strata_fwd`` and ``strata_bwd`` are empty for the unique-extension
    identity, whose right side is the two middle-term fingerprints.
    """

    method: str
    left_module: LambdaModule
    right_module: LambdaModule
    ext1_dim: int
    strata_fwd: Tuple[Stratum, ...]
    strata_bwd: Tuple[Stratum, ...]
    words: Tuple[Word, ...]
    left_values: Tuple[int, ...]
    right_values: Tuple[int, ...]
    primes_used: Tuple[int, ...]
    elapsed: float

    @property
    def passed(self) -> bool:
        return self.left_values == self.right_values

    def mismatches(self) -> Tuple[Word, ...]:
        return tuple(
            w
            for w, a, b in zip(self.words, self.left_values, self.right_values)
            if a != b
        )


@dataclass(frozen=True)
class GenericVote:
    """Outcome of a fingerprint majority vote over a parameter family."""

    fingerprint: DeltaFingerprint
    members: Tuple
    outliers: Tuple


def _projective_vectors(n: int, p: int) -> Iterator[Tuple[int, ...]]:
    """Coefficient vectors over F_p with first nonzero entry 1.

    One vector per point of projective (n-1)-space, (p^n - 1)/(p - 1)
    in all.
    """
    for lead in range(n):
        for tail in product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def _class_derivation(basis: Sequence[Derivation], vec: Sequence[int]) -> Derivation:
    d = basis[0].scale(vec[0])
    for b, t in zip(basis[1:], vec[1:]):
        d = d.add(b.scale(t))
    return d


def stratify_proj_ext(
    xp: LambdaModule,
    xpp: LambdaModule,
    anchors: Mapping[str, LambdaModule],
    prime_list: Optional[Sequence[int]] = None,
) -> Tuple[Stratum, ...]:
    """Anchored strata of the projective space of Ext^1(xp, xpp) classes.

    At each usable prime every projective class is expanded against the
    Ext^1 basis of the reduced pair, its middle term is counted, and the
    classes are grouped by count vector; each group must match exactly
    one anchor.  A prime is skipped when something fails to reduce, when
    a Hom or Ext^1 dimension jumps, or when two anchors become
    indistinguishable there.  Group sizes are then interpolated across
    the sampled primes with a shared fit window.

    Args:
        xp, xpp: rational modules over one double quiver; a class in
            Ext^1(xp, xpp) has middle term with submodule xpp and
            quotient xp.
        anchors: ordered name-to-module mapping, all rational, all with
            the dimension vector of the direct sum.
        prime_list: explicit primes to sample (default: ascending from 2,
            capped at CANDIDATE_CAP candidates).

    Raises:
        UnanchoredStratum: a class matched no anchor at some prime.
        AnchorCollision: the primes ran out with anchors still colliding.
        NonPolynomialCount: the group sizes failed two-prime validation.
        InsufficientPrimes: the primes ran out for another reason.
        ValueError: Ext^1(xp, xpp) = 0, or an anchor is unusable.
    """
    if not (xp.field.is_rational and xpp.field.is_rational):
        raise ValueError("stratification starts from rational modules")
    pres = ext_presentation(xp, xpp)
    n = pres.ext1_dim
    if n == 0:
        raise ValueError("Ext^1 vanishes, there is nothing to stratify")
    back = ext_presentation(xpp, xp)
    names = tuple(anchors)
    mods = tuple(anchors[name] for name in names)
    want = tuple(a + b for a, b in zip(xp.dim, xpp.dim))
    for name, mod in zip(names, mods):
        if mod.dq != xp.dq:
            raise ValueError(f"anchor {name} lives over a different quiver")
        if not mod.field.is_rational:
            raise ValueError(f"anchor {name} is not over the rationals")
        if mod.dim != want:
            raise ValueError(
                f"anchor {name} has dimension vector {mod.dim}, expected {want}"
            )
    fps = tuple(fingerprint(mod, prime_list) for mod in mods)
    collisions: List[int] = []

    def sample(p: int) -> Optional[Tuple[int, ...]]:
        try:
            xp_p = reduce_mod_p(xp, p)
            xpp_p = reduce_mod_p(xpp, p)
            mods_p = [reduce_mod_p(mod, p) for mod in mods]
        except BadPrime:
            return None
        pres_p = ext_presentation(xp_p, xpp_p)
        back_p = ext_presentation(xpp_p, xp_p)
        if (
            pres_p.hom_dim != pres.hom_dim
            or pres_p.ext1_dim != n
            or back_p.hom_dim != back.hom_dim
            or back_p.ext1_dim != back.ext1_dim
        ):
            return None
        memo: Dict = {}
        keys = [count_flags_fp(mod_p, memo=memo) for mod_p in mods_p]
        if len(set(keys)) != len(keys):
            collisions.append(p)
            return None
        groups: Dict[Tuple[int, ...], int] = {}
        witness: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
        for vec in _projective_vectors(n, p):
            d = _class_derivation(pres_p.ext1_basis, vec)
            key = count_flags_fp(middle_term(d).module, memo=memo)
            groups[key] = groups.get(key, 0) + 1
            witness.setdefault(key, vec)
        sizes = tuple(groups.pop(key, 0) for key in keys)
        if groups:
            key, size = next(iter(groups.items()))
            raise UnanchoredStratum(
                f"prime {p}: {size} extension classes (one with coefficients "
                f"{witness[key]}) match no anchor"
            )
        return sizes

    if prime_list is not None:
        candidates = iter(prime_list)
    else:
        candidates = islice(primes(), CANDIDATE_CAP)
    pool = _PrimePool(sample, candidates)
    need = n  # degree bound n - 1, so n window points
    accepted = None
    try:
        for shift in range(MAX_WINDOW_SHIFT + 1):
            rows = [
                pool.row(k)
                for k in range(shift, shift + need + VALIDATION_PRIMES)
            ]
            fits: List[Tuple[Polynomial, int]] = []
            for j in range(len(names)):
                poly = interpolate([(p, vec[j]) for p, vec in rows[:need]])
                at_one = poly(1)
                good = at_one.denominator == 1 and all(
                    poly(p) == vec[j] for p, vec in rows[need:]
                )
                if not good:
                    break
                fits.append((poly, int(at_one)))
            if len(fits) == len(names):
                accepted = (rows, fits)
                break
    except InsufficientPrimes:
        if collisions:
            raise AnchorCollision(
                f"anchors stayed indistinguishable at primes {tuple(collisions)}"
            ) from None
        raise
    if accepted is None:
        raise NonPolynomialCount(
            (),
            f"stratum sizes fail {VALIDATION_PRIMES}-prime validation "
            f"at every window shift up to {MAX_WINDOW_SHIFT}",
        )
    rows, fits = accepted
    sampled = pool.rows
    return tuple(
        Stratum(
            name=name,
            anchor=mod,
            fingerprint=fp,
            sizes=tuple((p, vec[j]) for p, vec in sampled),
            window=tuple(p for p, _ in rows[:need]),
            validation=tuple(p for p, _ in rows[need:]),
            polynomial=fits[j][0],
            chi_proj=fits[j][1],
        )
        for j, (name, mod, fp) in enumerate(zip(names, mods, fps))
    )


def _merge_strata(
    strata: Sequence[Stratum],
) -> "OrderedDict[Tuple[int, ...], List]":
    """Total chi coefficient per distinct anchor fingerprint."""
    merged: "OrderedDict[Tuple[int, ...], List]" = OrderedDict()
    for s in strata:
        key = s.fingerprint.chi
        if key in merged:
            merged[key][0] += s.chi_proj
        else:
            merged[key] = [s.chi_proj, s.fingerprint]
    return merged


def _profile_primes(fps: Sequence[DeltaFingerprint]) -> set:
    return {p for fp in fps for pr in fp.profiles for p, _ in pr.samples}


def verify_thm_1_1(
    xp: LambdaModule,
    xpp: LambdaModule,
    anchors_fwd: Mapping[str, LambdaModule],
    anchors_bwd: Mapping[str, LambdaModule],
    prime_list: Optional[Sequence[int]] = None,
    jobs: int = 1,
) -> VerificationReport:
    """Check the pairwise identity for one module pair.

    Both projective extension spaces are stratified against their anchor
    lists, strata with equal anchor fingerprints are merged, and both
    sides are evaluated on every word with the content of the direct
    sum.  Swapping (xp, xpp) along with the anchor lists yields the same
    verdict and the same per-word values.

    Raises:
        ValueError: Ext^1(xp, xpp) = 0, where the identity is
            meaningless.
        (plus everything stratify_proj_ext raises)
    """
    start = time.perf_counter()
    n = ext_presentation(xp, xpp).ext1_dim
    if n == 0:
        raise ValueError("Ext^1(x', x'') = 0: the pairwise identity is meaningless")
    strata_fwd = stratify_proj_ext(xp, xpp, anchors_fwd, prime_list)
    strata_bwd = stratify_proj_ext(xpp, xp, anchors_bwd, prime_list)
    total = fingerprint(direct_sum(xp, xpp), prime_list, jobs=jobs)
    merged = _merge_strata(strata_fwd + strata_bwd)
    left = tuple(n * c for c in total.chi)
    right = tuple(
        sum(coeff * fp.chi_of(word) for coeff, fp in merged.values())
        for word in total.words
    )
    used = _profile_primes([total]) | {
        p for s in strata_fwd + strata_bwd for p, _ in s.sizes
    }
    return VerificationReport(
        method="pairwise",
        left_module=xp,
        right_module=xpp,
        ext1_dim=n,
        strata_fwd=strata_fwd,
        strata_bwd=strata_bwd,
        words=total.words,
        left_values=left,
        right_values=right,
        primes_used=tuple(sorted(used)),
        elapsed=time.perf_counter() - start,
    )


def verify_thm_1_2(
    xp: LambdaModule,
    xpp: LambdaModule,
    d: Optional[Derivation] = None,
    g: Optional[Derivation] = None,
    prime_list: Optional[Sequence[int]] = None,
    jobs: int = 1,
) -> VerificationReport:
    """Check the unique-extension identity for one module pair.

    With dim Ext^1(xp, xpp) = 1 the identity reads

        delta_{xp + xpp} = delta_{E_d} + delta_{E_g}

    for any non-split classes d in Ext^1(xp, xpp) and g in
    Ext^1(xpp, xp), with E the middle term.

    Args:
        d: class in Ext^1(xp, xpp); default is the chosen basis element.
        g: class in Ext^1(xpp, xp); default likewise.

    Raises:
        ValueError: the Ext^1 dimension is not 1, a supplied class lives
            between the wrong modules, or a supplied class is split.
    """
    start = time.perf_counter()
    pres = ext_presentation(xp, xpp)
    back = ext_presentation(xpp, xp)
    if pres.ext1_dim != 1:
        raise ValueError(
            f"Ext^1 dimension is {pres.ext1_dim}, "
            "the unique-extension identity needs exactly 1"
        )
    if d is None:
        d = pres.ext1_basis[0]
    elif (d.source, d.target) != (xp, xpp):
        raise ValueError("class d does not live in Ext^1(x', x'')")
    if g is None:
        g = back.ext1_basis[0]
    elif (g.source, g.target) != (xpp, xp):
        raise ValueError("class g does not live in Ext^1(x'', x')")
    if is_inner(pres, d):
        raise ValueError("class d is split, its middle term is the direct sum")
    if is_inner(back, g):
        raise ValueError("class g is split, its middle term is the direct sum")
    total = fingerprint(direct_sum(xp, xpp), prime_list, jobs=jobs)
    fx = fingerprint(middle_term(d).module, prime_list, jobs=jobs)
    fy = fingerprint(middle_term(g).module, prime_list, jobs=jobs)
    right = tuple(
        fx.chi_of(word) + fy.chi_of(word) for word in total.words
    )
    return VerificationReport(
        method="unique-extension",
        left_module=xp,
        right_module=xpp,
        ext1_dim=1,
        strata_fwd=(),
        strata_bwd=(),
        words=total.words,
        left_values=total.chi,
        right_values=right,
        primes_used=tuple(sorted(_profile_primes([total, fx, fy]))),
        elapsed=time.perf_counter() - start,
    )


def discover_generic_lambda(
    family: Callable[..., LambdaModule],
    candidates: Sequence,
    prime_list: Optional[Sequence[int]] = None,
) -> GenericVote:
    """The fingerprint a strict majority of the parameter values share.

    Args:
        family: callable sending a parameter value to a rational module.
        candidates: parameter values to try.

    Raises:
        ValueError: no candidates, or a tied vote, which is inconclusive.
    """
    votes: "OrderedDict[Tuple[int, ...], List]" = OrderedDict()
    for lam in candidates:
        fp = fingerprint(family(lam), prime_list)
        votes.setdefault(fp.chi, [fp, []])[1].append(lam)
    if not votes:
        raise ValueError("no candidate parameters supplied")
    ranked = sorted(votes.values(), key=lambda item: len(item[1]), reverse=True)
    if len(ranked) > 1 and len(ranked[0][1]) == len(ranked[1][1]):
        raise ValueError(
            "vote is inconclusive: "
            + " against ".join(str(tuple(mem)) for _, mem in ranked[:2])
        )
    fp, members = ranked[0]
    outliers = tuple(lam for _, mem in ranked[1:] for lam in mem)
    return GenericVote(fingerprint=fp, members=tuple(members), outliers=outliers)
