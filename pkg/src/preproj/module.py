"""Finite dimensional nilpotent modules over a preprojective algebra.

A module assigns to every vertex v a space k^{d_v} and to every doubled arrow
``b`` a matrix ``x(b)`` of shape d_{target} x d_{source}.  It is a module over
the preprojective algebra when at every vertex i

    sum over arrows b of the double with source i of
        (-1)^{sign(b)} x(bar b) x(b)  =  0,

and it is nilpotent when the chain of graded subspaces
W_0 = everything, W_{k+1} = span of all x(b)(W_k) reaches zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .fields import Field, Scalar
from .linalg import Matrix, Subspace, hstack, image_basis, solve
from .quiver import DimVector, DoubleQuiver, Quiver, double

GradedSubspace = Tuple[Subspace, ...]


class BadPrime(ValueError):
    """A rational module cannot be reduced at this prime."""


@dataclass(frozen=True)
class LambdaModule:
    """A graded space with doubled-arrow actions.

    The action tuple is aligned with ``dq.arrows``.  Construction checks the
    matrix shapes only; call :func:`validate` for the relations and
    nilpotency.
    """

    dq: DoubleQuiver
    field: Field
    dim: DimVector
    action: Tuple[Matrix, ...]

    def __post_init__(self) -> None:
        verts = self.dq.base.vertices
        if len(self.dim) != len(verts):
            raise ValueError("dimension vector length differs from vertex count")
        if any(d < 0 for d in self.dim):
            raise ValueError("negative dimension")
        if len(self.action) != len(self.dq.arrows):
            raise ValueError("one action matrix per doubled arrow required")
        idx = self.dq.base.vertex_index
        for arrow, mat in zip(self.dq.arrows, self.action):
            want = (self.dim[idx[arrow.target]], self.dim[idx[arrow.source]])
            if (mat.nrows, mat.ncols) != want:
                raise ValueError(
                    f"action of arrow {arrow.name} has shape "
                    f"{mat.nrows}x{mat.ncols}, expected {want[0]}x{want[1]}"
                )
            if mat.field != self.field:
                raise ValueError(f"action of arrow {arrow.name} is over the wrong field")

    @classmethod
    def build(
        cls,
        dq: DoubleQuiver,
        field: Field,
        dim: Union[DimVector, Mapping[str, int]],
        action: Mapping[str, Union[Matrix, Sequence[Sequence[Union[int, Fraction, str]]]]],
    ) -> "LambdaModule":
        """Build a module, filling omitted arrows with zero matrices.

        Args:
            dim: dimension vector as tuple (vertex order) or mapping by name.
            action: matrices (or row data) keyed by doubled-arrow name.

        Raises:
            ValueError: unknown arrow names or shape mismatches.
        """
        verts = dq.base.vertices
        idx = dq.base.vertex_index
        if isinstance(dim, Mapping):
            dim_vec = tuple(int(dim.get(v, 0)) for v in verts)
        else:
            dim_vec = tuple(int(x) for x in dim)
        known = {a.name for a in dq.arrows}
        for name in action:
            if name not in known:
                raise ValueError(f"unknown arrow {name!r} in action data")
        mats: List[Matrix] = []
        for arrow in dq.arrows:
            nrows = dim_vec[idx[arrow.target]]
            ncols = dim_vec[idx[arrow.source]]
            given = action.get(arrow.name)
            if given is None:
                mats.append(Matrix.zeros(field, nrows, ncols))
            elif isinstance(given, Matrix):
                mats.append(given)
            else:
                mats.append(Matrix.from_rows(field, given, ncols=ncols))
        return cls(dq, field, dim_vec, tuple(mats))

    def x(self, arrow_name: str) -> Matrix:
        """The action matrix of a doubled arrow."""
        return self.action[self.dq.arrow_index[arrow_name]]

    def dim_of(self, v: str) -> int:
        return self.dim[self.dq.base.vertex_index[v]]

    @property
    def total_dim(self) -> int:
        return sum(self.dim)

    @property
    def quiver(self) -> Quiver:
        return self.dq.base

    def canonical_key(self) -> Tuple:
        """A hashable key identifying the module data exactly."""
        return (self.field.p, self.dim, tuple(m.entries for m in self.action))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`: offending residuals and nilpotency."""

    residuals: Tuple[Tuple[str, Matrix], ...]
    nilpotent: Optional[bool]

    @property
    def ok(self) -> bool:
        return not self.residuals and self.nilpotent is not False


def relation_residual(m: LambdaModule, v: str) -> Matrix:
    """The preprojective relation at vertex v, as a d_v x d_v matrix."""
    d_v = m.dim_of(v)
    acc = Matrix.zeros(m.field, d_v, d_v)
    for arrow in m.dq.arrows_from(v):
        term = m.x(arrow.bar).mul(m.x(arrow.name))
        acc = acc.sub(term) if arrow.sign else acc.add(term)
    return acc


def radical_filtration(m: LambdaModule) -> List[GradedSubspace]:
    """The chain V = W_0 > W_1 > ... with W_{k+1} spanned by all x(b)(W_k).

    Stops when the chain stabilizes; the module is nilpotent exactly when the
    last term is zero.
    """
    verts = m.quiver.vertices
    idx = m.quiver.vertex_index
    current: GradedSubspace = tuple(
        Subspace.full(m.field, d) for d in m.dim
    )
    chain = [current]
    while True:
        pieces: List[Subspace] = []
        for v in verts:
            images = [
                m.x(a.name).mul(current[idx[a.source]].basis)
                for a in m.dq.arrows_into(v)
            ]
            images = [im for im in images if im.ncols > 0]
            if images:
                pieces.append(Subspace.span(hstack(images)))
            else:
                pieces.append(Subspace.zero(m.field, m.dim_of(v)))
        nxt = tuple(pieces)
        chain.append(nxt)
        if tuple(s.dim for s in nxt) == tuple(s.dim for s in current):
            return chain
        current = nxt


def is_nilpotent(m: LambdaModule) -> bool:
    return all(s.dim == 0 for s in radical_filtration(m)[-1])


def validate(m: LambdaModule, check_nilpotent: bool = True) -> ValidationReport:
    """Check the preprojective relations and (optionally) nilpotency.

    Returns:
        A report listing every vertex with a nonzero relation residual,
        plus the nilpotency verdict (None when not checked).
    """
    bad: List[Tuple[str, Matrix]] = []
    for v in m.quiver.vertices:
        res = relation_residual(m, v)
        if not res.is_zero():
            bad.append((v, res))
    nil = is_nilpotent(m) if check_nilpotent else None
    return ValidationReport(tuple(bad), nil)


def simple(dq: DoubleQuiver, v: str, field: Field) -> LambdaModule:
    """The one dimensional simple module concentrated at vertex v."""
    return LambdaModule.build(dq, field, dq.base.unit_vector(v), {})


def zero_module(dq: DoubleQuiver, field: Field) -> LambdaModule:
    return LambdaModule.build(dq, field, (0,) * len(dq.base.vertices), {})


def direct_sum(m: LambdaModule, n: LambdaModule) -> LambdaModule:
    """Blockwise direct sum; both summands first, per vertex, in order.

    Raises:
        ValueError: when the quivers or fields differ.
    """
    if m.dq != n.dq:
        raise ValueError("direct sum over different quivers")
    if m.field != n.field:
        raise ValueError("direct sum over different fields")
    dim = tuple(a + b for a, b in zip(m.dim, n.dim))
    idx = m.quiver.vertex_index
    mats: List[Matrix] = []
    for i, arrow in enumerate(m.dq.arrows):
        a, b = m.action[i], n.action[i]
        zt = Matrix.zeros(m.field, a.nrows, b.ncols)
        zb = Matrix.zeros(m.field, b.nrows, a.ncols)
        mats.append(Matrix.block([[a, zt], [zb, b]]))
    return LambdaModule(m.dq, m.field, dim, tuple(mats))


def full_graded(m: LambdaModule) -> GradedSubspace:
    return tuple(Subspace.full(m.field, d) for d in m.dim)


def restrict(m: LambdaModule, sub: GradedSubspace) -> LambdaModule:
    """The module structure on an action-stable graded subspace.

    The result is written in the echelon basis of each piece of ``sub``.

    Raises:
        ValueError: when some x(b) does not preserve the subspace; the
            message names the witnessing arrow.
    """
    verts = m.quiver.vertices
    idx = m.quiver.vertex_index
    if len(sub) != len(verts):
        raise ValueError("graded subspace has wrong number of pieces")
    for v, piece in zip(verts, sub):
        if piece.ambient != m.dim_of(v):
            raise ValueError(f"piece at vertex {v} has wrong ambient dimension")
    mats: List[Matrix] = []
    for arrow in m.dq.arrows:
        src = sub[idx[arrow.source]]
        tgt = sub[idx[arrow.target]]
        moved = m.x(arrow.name).mul(src.basis)
        coords = solve(tgt.basis, moved)
        if coords is None:
            raise ValueError(
                f"subspace is not stable under arrow {arrow.name}"
            )
        mats.append(coords)
    dim = tuple(s.dim for s in sub)
    return LambdaModule(m.dq, m.field, dim, tuple(mats))


def reduce_mod_p(m: LambdaModule, p: int) -> LambdaModule:
    """Reduce a rational module modulo p.

    Raises:
        BadPrime: when p divides some denominator in the action data.
        ValueError: when the module is not rational.
    """
    if not m.field.is_rational:
        raise ValueError("only rational modules can be reduced")
    target = Field(p)
    mats: List[Matrix] = []
    for arrow, mat in zip(m.dq.arrows, m.action):
        try:
            mats.append(
                Matrix.from_rows(
                    target, [list(row) for row in mat.entries], ncols=mat.ncols
                )
            )
        except ZeroDivisionError as exc:
            raise BadPrime(
                f"arrow {arrow.name}: {exc} while reducing mod {p}"
            ) from exc
    return LambdaModule(m.dq, target, m.dim, tuple(mats))


def base_change(m: LambdaModule, g: Sequence[Matrix]) -> LambdaModule:
    """Conjugate by per-vertex invertible matrices: x(b) -> g_t x(b) g_s^-1.

    Raises:
        ValueError: when some g_v is not square invertible of size d_v.
    """
    verts = m.quiver.vertices
    idx = m.quiver.vertex_index
    if len(g) != len(verts):
        raise ValueError("one change of basis per vertex required")
    inverses: List[Matrix] = []
    for v, gv in zip(verts, g):
        d = m.dim_of(v)
        if (gv.nrows, gv.ncols) != (d, d):
            raise ValueError(f"base change at vertex {v} has wrong shape")
        inv = solve(gv, Matrix.identity(m.field, d))
        if inv is None or gv.mul(inv) != Matrix.identity(m.field, d):
            raise ValueError(f"base change at vertex {v} is not invertible")
        inverses.append(inv)
    mats: List[Matrix] = []
    for arrow, mat in zip(m.dq.arrows, m.action):
        gs_inv = inverses[idx[arrow.source]]
        gt = g[idx[arrow.target]]
        mats.append(gt.mul(mat).mul(gs_inv))
    return LambdaModule(m.dq, m.field, m.dim, tuple(mats))
