"""The worked example over the 4-subspace star quiver.

Three sources 1, 2, 3 each send one arrow into the central vertex 4.  The
modules built here all live over the rationals and are the cast of the
flagship verification: the two simples-adjacent modules T and S4, the
one-parameter family M(lam) of middle terms of extensions of S4 by T with its
three degenerate companions, and the middle terms R, A, B, C, F, G, H of the
opposite extensions.  Every action matrix below has been checked against the
vertex relations by hand before being frozen here.

Basis convention at the central vertex for the dimension (1,1,1,2) modules:
coordinates are written (top, bottom); arrows a, b, c land in the bottom
coordinate for the M family and the top/second coordinates as listed for the
others.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Union

from .fields import QQ
from .module import LambdaModule
from .quiver import DoubleQuiver, Quiver, double

Rational = Union[int, Fraction]


def star_quiver() -> Quiver:
    return Quiver.build(
        ["1", "2", "3", "4"],
        [("a", "1", "4"), ("b", "2", "4"), ("c", "3", "4")],
    )


def star_double() -> DoubleQuiver:
    return double(star_quiver())


def t_module(dq: DoubleQuiver = None) -> LambdaModule:
    """T: dimension (1,1,1,1), all three arrows act by 1, bars by 0."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq, QQ, (1, 1, 1, 1), {"a": [[1]], "b": [[1]], "c": [[1]]}
    )


def s4_module(dq: DoubleQuiver = None) -> LambdaModule:
    """The simple at the central vertex."""
    dq = dq or star_double()
    return LambdaModule.build(dq, QQ, (0, 0, 0, 1), {})


def m_family(lam: Rational, dq: DoubleQuiver = None) -> LambdaModule:
    """M(lam): dimension (1,1,1,2) middle terms of extensions of S4 by T.

    The bars act through the top coordinate by the scalars
    (-1-lam, 1, lam), which sum to zero as the central relation demands.
    The members lam = 0 and lam = -1 are the degenerate ones; every other
    value gives the generic member.
    """
    dq = dq or star_double()
    lam = Fraction(lam)
    col = [[0], [1]]
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {
            "a": col,
            "b": col,
            "c": col,
            "a*": [[-1 - lam, 0]],
            "b*": [[1, 0]],
            "c*": [[lam, 0]],
        },
    )


def m_zero(dq: DoubleQuiver = None) -> LambdaModule:
    return m_family(0, dq)


def m_minus_one(dq: DoubleQuiver = None) -> LambdaModule:
    return m_family(-1, dq)


def m_infinity(dq: DoubleQuiver = None) -> LambdaModule:
    """The remaining degenerate member, with bar scalars (-1, 0, 1)."""
    dq = dq or star_double()
    col = [[0], [1]]
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {
            "a": col,
            "b": col,
            "c": col,
            "a*": [[-1, 0]],
            "b*": [[0, 0]],
            "c*": [[1, 0]],
        },
    )


def r_module(dq: DoubleQuiver = None) -> LambdaModule:
    """R: the three arrows hit three pairwise distinct lines; bars act by 0."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {"a": [[1], [0]], "b": [[0], [1]], "c": [[1], [1]]},
    )


def a_sum_module(dq: DoubleQuiver = None) -> LambdaModule:
    """A: the sum of the a-string and the (b,c)-fork, bars zero."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {"a": [[1], [0]], "b": [[0], [1]], "c": [[0], [1]]},
    )


def b_sum_module(dq: DoubleQuiver = None) -> LambdaModule:
    """B: the sum of the b-string and the (a,c)-fork, bars zero."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {"b": [[1], [0]], "a": [[0], [1]], "c": [[0], [1]]},
    )


def c_sum_module(dq: DoubleQuiver = None) -> LambdaModule:
    """C: the sum of the c-string and the (a,b)-fork, bars zero."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {"c": [[1], [0]], "a": [[0], [1]], "b": [[0], [1]]},
    )


def f_module(dq: DoubleQuiver = None) -> LambdaModule:
    """F: top the simple at 1, with b and c folded back through the bars."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {
            "a": [[1], [0]],
            "b": [[0], [1]],
            "c": [[0], [-1]],
            "b*": [[1, 0]],
            "c*": [[1, 0]],
        },
    )


def g_module(dq: DoubleQuiver = None) -> LambdaModule:
    """G: top the simple at 2, with a and c folded back through the bars."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {
            "b": [[1], [0]],
            "a": [[0], [1]],
            "c": [[0], [-1]],
            "a*": [[1, 0]],
            "c*": [[1, 0]],
        },
    )


def h_module(dq: DoubleQuiver = None) -> LambdaModule:
    """H: top the simple at 3, with a and b folded back through the bars."""
    dq = dq or star_double()
    return LambdaModule.build(
        dq,
        QQ,
        (1, 1, 1, 2),
        {
            "c": [[1], [0]],
            "a": [[0], [1]],
            "b": [[0], [-1]],
            "a*": [[1, 0]],
            "b*": [[1, 0]],
        },
    )


def zoo(lam: Rational = 1) -> Dict[str, LambdaModule]:
    """Every module of the worked example, over one shared double quiver.

    The generic family member is built at the given parameter value,
    which must avoid the degenerate values 0 and -1.
    """
    if Fraction(lam) in (Fraction(0), Fraction(-1)):
        raise ValueError(f"lambda = {lam} is degenerate, pick a generic value")
    dq = star_double()
    return {
        "T": t_module(dq),
        "S4": s4_module(dq),
        "M(lam)": m_family(lam, dq),
        "M(0)": m_zero(dq),
        "M(-1)": m_minus_one(dq),
        "M(inf)": m_infinity(dq),
        "R": r_module(dq),
        "A": a_sum_module(dq),
        "B": b_sum_module(dq),
        "C": c_sum_module(dq),
        "F": f_module(dq),
        "G": g_module(dq),
        "H": h_module(dq),
    }
