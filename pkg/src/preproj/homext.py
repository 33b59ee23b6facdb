"""Hom spaces, extension spaces, middle terms, and the trace pairing.

For modules M (written x') and N (written x'') the three-term complex

    C0 = sum_v Hom(M_v, N_v)
    C1 = sum_b Hom(M_{s(b)}, N_{e(b)})    (b over the doubled arrows)
    C2 = sum_v Hom(M_v, N_v)

has differentials

    d0(f)_b   = N(b) f_{s(b)} - f_{e(b)} M(b)
    d1(g)_v   = sum over b with s(b) = v of
                (-1)^{sign(b)} ( N(bar b) g_b + g_{bar b} M(b) ).

Hom(M, N) is the kernel of d0.  The kernel of d1 is the space of derivations,
its subspace im(d0) the inner ones, and the quotient is Ext^1(M, N).  The
cokernel of d1 equals Ext^2(M, N) exactly when no component of the quiver is
Dynkin; the presentation records that flag rather than guessing.

Coordinates of C0/C1/C2 vectors are the row-major entries of the per-vertex
(per-arrow) blocks, blocks in vertex (arrow) order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from .fields import Field, Scalar
from .linalg import (
    Matrix,
    Subspace,
    column_echelon,
    hstack,
    kernel_basis,
    rank,
    rref,
    solve,
)
from .module import LambdaModule
from .quiver import has_dynkin_component, symmetric_form


def _pack(field: Field, mats: Sequence[Matrix]) -> Matrix:
    """Flatten matrices into one coordinate column, row-major per block."""
    coords = [x for m in mats for row in m.entries for x in row]
    return Matrix.from_cols(field, [coords], nrows=len(coords))


def _unpack(
    field: Field, column: Matrix, shapes: Sequence[Tuple[int, int]]
) -> List[Matrix]:
    flat = [column.entries[i][0] for i in range(column.nrows)]
    out: List[Matrix] = []
    pos = 0
    for r, c in shapes:
        rows = []
        for i in range(r):
            rows.append(flat[pos : pos + c])
            pos += c
        out.append(Matrix.from_rows(field, rows, ncols=c))
    if pos != len(flat):
        raise ValueError("coordinate column length differs from block shapes")
    return out


def _c0_shapes(m: LambdaModule, n: LambdaModule) -> List[Tuple[int, int]]:
    return [(dn, dm) for dm, dn in zip(m.dim, n.dim)]


def _c1_shapes(m: LambdaModule, n: LambdaModule) -> List[Tuple[int, int]]:
    return [
        (n.dim_of(a.target), m.dim_of(a.source)) for a in m.dq.arrows
    ]


def _check_pair(m: LambdaModule, n: LambdaModule) -> None:
    if m.dq != n.dq:
        raise ValueError("modules over different quivers")
    if m.field != n.field:
        raise ValueError("modules over different fields")


@dataclass(frozen=True)
class Intertwiner:
    """A module map: per-vertex matrices commuting with every arrow action."""

    source: LambdaModule
    target: LambdaModule
    components: Tuple[Matrix, ...]

    @classmethod
    def build(
        cls,
        source: LambdaModule,
        target: LambdaModule,
        components: Sequence[Matrix],
        check: bool = True,
    ) -> "Intertwiner":
        """Build and (by default) verify the commuting condition.

        Raises:
            ValueError: shape mismatch, or a named arrow where the map
                fails to commute.
        """
        _check_pair(source, target)
        comps = tuple(components)
        verts = source.quiver.vertices
        if len(comps) != len(verts):
            raise ValueError("one component per vertex required")
        idx = source.quiver.vertex_index
        for v, mat in zip(verts, comps):
            want = (target.dim_of(v), source.dim_of(v))
            if (mat.nrows, mat.ncols) != want:
                raise ValueError(f"component at vertex {v} has wrong shape")
        if check:
            for a in source.dq.arrows:
                left = target.x(a.name).mul(comps[idx[a.source]])
                right = comps[idx[a.target]].mul(source.x(a.name))
                if left != right:
                    raise ValueError(
                        f"map does not commute with arrow {a.name}"
                    )
        return cls(source, target, comps)

    @classmethod
    def identity(cls, m: LambdaModule) -> "Intertwiner":
        return cls(
            m, m, tuple(Matrix.identity(m.field, d) for d in m.dim)
        )

    def component(self, v: str) -> Matrix:
        return self.components[self.source.quiver.vertex_index[v]]

    def compose(self, other: "Intertwiner") -> "Intertwiner":
        """self after other."""
        if other.target != self.source:
            raise ValueError("composition endpoints do not match")
        comps = tuple(
            a.mul(b) for a, b in zip(self.components, other.components)
        )
        return Intertwiner(other.source, self.target, comps)

    def add(self, other: "Intertwiner") -> "Intertwiner":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("adding maps between different modules")
        comps = tuple(
            a.add(b) for a, b in zip(self.components, other.components)
        )
        return Intertwiner(self.source, self.target, comps)

    def scale(self, s: Union[int, Fraction]) -> "Intertwiner":
        return Intertwiner(
            self.source, self.target, tuple(c.scale(s) for c in self.components)
        )


@dataclass(frozen=True)
class Derivation:
    """An arrow-indexed tuple of maps d(b): M_{s(b)} -> N_{e(b)}.

    Solutions of the derivation equation are exactly the kernel of d1; the
    equation is checked through :func:`derivation_residual`.
    """

    source: LambdaModule
    target: LambdaModule
    maps: Tuple[Matrix, ...]

    def __post_init__(self) -> None:
        _check_pair(self.source, self.target)
        if len(self.maps) != len(self.source.dq.arrows):
            raise ValueError("one map per doubled arrow required")
        for a, mat in zip(self.source.dq.arrows, self.maps):
            want = (self.target.dim_of(a.target), self.source.dim_of(a.source))
            if (mat.nrows, mat.ncols) != want:
                raise ValueError(f"map of arrow {a.name} has wrong shape")

    @classmethod
    def build(
        cls,
        source: LambdaModule,
        target: LambdaModule,
        maps: Mapping[str, Union[Matrix, Sequence[Sequence[Union[int, Fraction, str]]]]],
    ) -> "Derivation":
        """Build from a partial mapping by arrow name, zero-filling the rest."""
        known = {a.name for a in source.dq.arrows}
        for name in maps:
            if name not in known:
                raise ValueError(f"unknown arrow {name!r}")
        mats: List[Matrix] = []
        field = source.field
        for a in source.dq.arrows:
            nrows = target.dim_of(a.target)
            ncols = source.dim_of(a.source)
            given = maps.get(a.name)
            if given is None:
                mats.append(Matrix.zeros(field, nrows, ncols))
            elif isinstance(given, Matrix):
                mats.append(given)
            else:
                mats.append(Matrix.from_rows(field, given, ncols=ncols))
        return cls(source, target, tuple(mats))

    def map_of(self, arrow_name: str) -> Matrix:
        return self.maps[self.source.dq.arrow_index[arrow_name]]

    def flatten(self) -> Matrix:
        return _pack(self.source.field, self.maps)

    def add(self, other: "Derivation") -> "Derivation":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("adding derivations between different modules")
        return Derivation(
            self.source,
            self.target,
            tuple(a.add(b) for a, b in zip(self.maps, other.maps)),
        )

    def scale(self, s: Union[int, Fraction]) -> "Derivation":
        return Derivation(
            self.source, self.target, tuple(m.scale(s) for m in self.maps)
        )


def derivation_residual(d: Derivation, v: str) -> Matrix:
    """The derivation equation at vertex v, written over original arrows:

    sum_{a: s(a)=v} ( d(a*) x'(a) + x''(a*) d(a) )
      - sum_{a: e(a)=v} ( d(a) x'(a*) + x''(a) d(a*) )
    """
    m, n = d.source, d.target
    acc = Matrix.zeros(m.field, n.dim_of(v), m.dim_of(v))
    for a in m.dq.arrows:
        if a.sign:
            continue
        if a.source == v:
            acc = acc.add(d.map_of(a.bar).mul(m.x(a.name)))
            acc = acc.add(n.x(a.bar).mul(d.map_of(a.name)))
        if a.target == v:
            acc = acc.sub(d.map_of(a.name).mul(m.x(a.bar)))
            acc = acc.sub(n.x(a.name).mul(d.map_of(a.bar)))
    return acc


def is_derivation(d: Derivation) -> bool:
    return all(
        derivation_residual(d, v).is_zero() for v in d.source.quiver.vertices
    )


def apply_d0(
    m: LambdaModule, n: LambdaModule, f: Sequence[Matrix]
) -> List[Matrix]:
    idx = m.quiver.vertex_index
    out: List[Matrix] = []
    for a in m.dq.arrows:
        out.append(
            n.x(a.name).mul(f[idx[a.source]]).sub(f[idx[a.target]].mul(m.x(a.name)))
        )
    return out


def apply_d1(
    m: LambdaModule, n: LambdaModule, g: Sequence[Matrix]
) -> List[Matrix]:
    aidx = m.dq.arrow_index
    out: List[Matrix] = []
    for v in m.quiver.vertices:
        acc = Matrix.zeros(m.field, n.dim_of(v), m.dim_of(v))
        for a in m.dq.arrows_from(v):
            term = n.x(a.bar).mul(g[aidx[a.name]]).add(
                g[aidx[a.bar]].mul(m.x(a.name))
            )
            acc = acc.sub(term) if a.sign else acc.add(term)
        out.append(acc)
    return out


def _operator_matrix(
    field: Field,
    in_shapes: List[Tuple[int, int]],
    out_shapes: List[Tuple[int, int]],
    apply,
) -> Matrix:
    """The matrix of a linear map between packed block spaces."""
    in_dim = sum(r * c for r, c in in_shapes)
    cols: List[List[Scalar]] = []
    zero_col = Matrix.zeros(field, in_dim, 1)
    for j in range(in_dim):
        unit = Matrix(
            field,
            in_dim,
            1,
            tuple(
                (field.one(),) if i == j else (field.zero(),)
                for i in range(in_dim)
            ),
        )
        blocks = _unpack(field, unit, in_shapes)
        image = apply(blocks)
        cols.append([x for mat in image for row in mat.entries for x in row])
    out_dim = sum(r * c for r, c in out_shapes)
    return Matrix.from_cols(field, cols, nrows=out_dim)


@dataclass(frozen=True)
class ExtPresentation:
    """Every space the complex of a module pair yields, with chosen bases.

    ``ext1_basis`` spans a complement of the inner derivations inside the
    derivation space, picked by echelon pivoting, so it is deterministic for
    given input data.  ``ext2_cokernel`` is dim C2 - rank d1, which is the
    dimension of Ext^2 exactly when ``ext2_exact`` is True.
    """

    source: LambdaModule
    target: LambdaModule
    d0: Matrix
    d1: Matrix
    hom: Subspace
    derivations: Subspace
    inner: Subspace
    ext1_basis: Tuple[Derivation, ...]
    ext2_cokernel: int
    ext2_exact: bool

    @property
    def hom_dim(self) -> int:
        return self.hom.dim

    @property
    def ext1_dim(self) -> int:
        return len(self.ext1_basis)

    @property
    def c0_dim(self) -> int:
        return self.d0.ncols

    @property
    def c1_dim(self) -> int:
        return self.d0.nrows


def ext_presentation(m: LambdaModule, n: LambdaModule) -> ExtPresentation:
    """Compute Hom, derivations, inner derivations, and the Ext^1 complement."""
    _check_pair(m, n)
    field = m.field
    c0_shapes = _c0_shapes(m, n)
    c1_shapes = _c1_shapes(m, n)
    d0 = _operator_matrix(
        field, c0_shapes, c1_shapes, lambda f: apply_d0(m, n, f)
    )
    d1 = _operator_matrix(
        field, c1_shapes, c0_shapes, lambda g: apply_d1(m, n, g)
    )
    hom = Subspace.span(kernel_basis(d0))
    ker1 = column_echelon(kernel_basis(d1))
    inner = column_echelon(d0)
    c1_dim = d0.nrows
    if inner.ncols:
        combined = hstack([inner, ker1])
    else:
        combined = ker1
    _, pivots = rref(combined)
    chosen = [j - inner.ncols for j in pivots if j >= inner.ncols]
    basis: List[Derivation] = []
    for j in chosen:
        col = Matrix.from_cols(field, [ker1.col(j)], nrows=c1_dim)
        basis.append(Derivation(m, n, tuple(_unpack(field, col, c1_shapes))))
    c2_dim = sum(r * c for r, c in c0_shapes)
    return ExtPresentation(
        source=m,
        target=n,
        d0=d0,
        d1=d1,
        hom=hom,
        derivations=Subspace(c1_dim, ker1),
        inner=Subspace(c1_dim, inner),
        ext1_basis=tuple(basis),
        ext2_cokernel=c2_dim - rank(d1),
        ext2_exact=not has_dynkin_component(m.quiver),
    )


def hom_basis(m: LambdaModule, n: LambdaModule) -> Tuple[Intertwiner, ...]:
    """A basis of Hom(M, N) as intertwiners."""
    pres = ext_presentation(m, n)
    shapes = _c0_shapes(m, n)
    out: List[Intertwiner] = []
    for j in range(pres.hom.dim):
        col = Matrix.from_cols(
            m.field, [pres.hom.basis.col(j)], nrows=pres.hom.basis.nrows
        )
        comps = _unpack(m.field, col, shapes)
        out.append(Intertwiner.build(m, n, comps, check=True))
    return tuple(out)


def derivation_basis(pres: ExtPresentation) -> Tuple[Derivation, ...]:
    """A basis of the full derivation space of a presentation."""
    shapes = _c1_shapes(pres.source, pres.target)
    out: List[Derivation] = []
    for j in range(pres.derivations.dim):
        col = Matrix.from_cols(
            pres.source.field,
            [pres.derivations.basis.col(j)],
            nrows=pres.derivations.basis.nrows,
        )
        out.append(
            Derivation(
                pres.source,
                pres.target,
                tuple(_unpack(pres.source.field, col, shapes)),
            )
        )
    return tuple(out)


def inner_derivation(
    m: LambdaModule, n: LambdaModule, phis: Sequence[Matrix]
) -> Derivation:
    """The inner derivation b -> phi_{e(b)} x'(b) - x''(b) phi_{s(b)}."""
    _check_pair(m, n)
    idx = m.quiver.vertex_index
    maps: List[Matrix] = []
    for a in m.dq.arrows:
        maps.append(
            phis[idx[a.target]].mul(m.x(a.name)).sub(
                n.x(a.name).mul(phis[idx[a.source]])
            )
        )
    return Derivation(m, n, tuple(maps))


def is_inner(pres: ExtPresentation, d: Derivation) -> bool:
    """Whether d lies in the image of d0."""
    if (d.source, d.target) != (pres.source, pres.target):
        raise ValueError("derivation belongs to a different pair")
    return solve(pres.inner.basis, d.flatten()) is not None


@dataclass(frozen=True)
class MiddleTerm:
    """The extension module E_d with its exact-sequence bookkeeping.

    Per vertex the coordinates of E are the x' part first, then the x''
    part; ``inclusion`` embeds x'' and ``projection`` maps onto x', so
    0 -> x'' -> E_d -> x' -> 0 is exact by construction.
    """

    module: LambdaModule
    inclusion: Tuple[Matrix, ...]
    projection: Tuple[Matrix, ...]


def middle_term(d: Derivation) -> MiddleTerm:
    """The module E_d(b) = [[x'(b), 0], [d(b), x''(b)]].

    Raises:
        ValueError: when the derivation equation fails; the message names
            a witnessing vertex.
    """
    m, n = d.source, d.target
    for v in m.quiver.vertices:
        if not derivation_residual(d, v).is_zero():
            raise ValueError(
                f"derivation equation violated at vertex {v}"
            )
    field = m.field
    mats: List[Matrix] = []
    for i, a in enumerate(m.dq.arrows):
        top = [m.action[i], Matrix.zeros(field, m.action[i].nrows, n.action[i].ncols)]
        bottom = [d.maps[i], n.action[i]]
        mats.append(Matrix.block([top, bottom]))
    dim = tuple(x + y for x, y in zip(m.dim, n.dim))
    module = LambdaModule(m.dq, field, dim, tuple(mats))
    inclusion: List[Matrix] = []
    projection: List[Matrix] = []
    for dm, dn in zip(m.dim, n.dim):
        inclusion.append(
            Matrix.block(
                [[Matrix.zeros(field, dm, dn)], [Matrix.identity(field, dn)]]
            )
        )
        projection.append(
            Matrix.block(
                [[Matrix.identity(field, dm), Matrix.zeros(field, dm, dn)]]
            )
        )
    return MiddleTerm(module, tuple(inclusion), tuple(projection))


def pullback(d: Derivation, rho: Intertwiner) -> Derivation:
    """Precompose an extension class with a map into its source: d . rho."""
    if rho.target != d.source:
        raise ValueError("pullback map does not land in the derivation source")
    idx = d.source.quiver.vertex_index
    maps = tuple(
        mat.mul(rho.components[idx[a.source]])
        for a, mat in zip(d.source.dq.arrows, d.maps)
    )
    return Derivation(rho.source, d.target, maps)


def pushout(d: Derivation, lam: Intertwiner) -> Derivation:
    """Postcompose an extension class with a map out of its target: lam . d."""
    if lam.source != d.target:
        raise ValueError("pushout map does not start at the derivation target")
    idx = d.source.quiver.vertex_index
    maps = tuple(
        lam.components[idx[a.target]].mul(mat)
        for a, mat in zip(d.source.dq.arrows, d.maps)
    )
    return Derivation(d.source, lam.target, maps)


def cy_pairing(d: Derivation, g: Derivation) -> Scalar:
    """The trace pairing sum_b (-1)^{sign(b)} Tr( d(bar b) g(b) ).

    ``d`` runs M -> N and ``g`` runs N -> M.  The pairing descends to
    Ext^1 x Ext^1 and is nondegenerate there; those facts are certified by
    the test suite rather than assumed.
    """
    if d.source != g.target or d.target != g.source:
        raise ValueError("pairing requires opposite derivation directions")
    field = d.source.field
    acc = field.zero()
    for a in d.source.dq.arrows:
        term = d.map_of(a.bar).mul(g.map_of(a.name)).trace()
        acc = field.sub(acc, term) if a.sign else field.add(acc, term)
    return acc


def cy_gram(pres_mn: ExtPresentation, pres_nm: ExtPresentation) -> Matrix:
    """The pairing matrix between the two chosen Ext^1 complement bases."""
    rows = [
        [cy_pairing(d, g) for g in pres_nm.ext1_basis]
        for d in pres_mn.ext1_basis
    ]
    return Matrix.from_rows(
        pres_mn.source.field, rows, ncols=pres_nm.ext1_dim
    )


@dataclass(frozen=True)
class DimensionReport:
    """The two dimension formulas for a module pair.

    The reflexive formula dim Ext^1 = hom_mn + hom_nm - (dim M, dim N) holds
    for every nilpotent pair; the Euler formula
    hom - ext1 + ext2 = (dim M, dim N) is only asserted when the degree-2
    cokernel really is Ext^2 (no Dynkin component).
    """

    hom_mn: int
    hom_nm: int
    ext1_mn: int
    ext1_nm: int
    ext2_cokernel: int
    form: int
    ext2_exact: bool

    @property
    def reflexive_ok(self) -> bool:
        return self.ext1_mn == self.hom_mn + self.hom_nm - self.form

    @property
    def symmetric_ok(self) -> bool:
        return self.ext1_mn == self.ext1_nm

    @property
    def euler_ok(self) -> Optional[bool]:
        if not self.ext2_exact:
            return None
        return self.hom_mn - self.ext1_mn + self.ext2_cokernel == self.form

    @property
    def ok(self) -> bool:
        return (
            self.reflexive_ok
            and self.symmetric_ok
            and self.euler_ok is not False
        )


def dimension_checks(m: LambdaModule, n: LambdaModule) -> DimensionReport:
    """Evaluate both dimension formulas for the pair (M, N)."""
    pres_mn = ext_presentation(m, n)
    pres_nm = ext_presentation(n, m)
    return DimensionReport(
        hom_mn=pres_mn.hom_dim,
        hom_nm=pres_nm.hom_dim,
        ext1_mn=pres_mn.ext1_dim,
        ext1_nm=pres_nm.ext1_dim,
        ext2_cokernel=pres_mn.ext2_cokernel,
        form=symmetric_form(m.quiver, m.dim, n.dim),
        ext2_exact=pres_mn.ext2_exact,
    )
