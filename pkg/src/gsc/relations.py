"""Relation rows spanning the ideal that generalizes the exterior algebra.

The ideal is generated in arity 4 by triangles carrying one vector in
all three positions; closing under diamond insertions places such a
triangle on an arbitrary index triple i < j < k with arbitrary monomial
fill around it.  The degree-n component is therefore modeled as the span
of rows indexed by (triple, occupant multiset, fill): each row sums, with
coefficient 1, the distinct arrangements of the occupant multiset over
the three triangle positions, all other positions frozen to the fill.
This explicit model is a design commitment; the closure property test
and the saturation oracle justify it rather than assume it.

Three generating variants are exposed.  All three reproduce the same
per-block row set once the quadratic/cubic families are polarized into
multihomogeneous components; variants 2 and 3 divide by 2 and 3 along
the way, hence the characteristic restriction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, permutations
from typing import Iterator

from .errors import CharacteristicUnsupported, DegreeMismatch
from .fields import FieldSpec
from .sparse import SparseMatrix
from .tensor import (
    MultiDegree,
    TriMonomial,
    _words_with_counts,
    count_block_monomials,
    enumerate_block_monomials,
    n_triangle_entries,
    rank_in_block,
    triangle_positions,
)

Row = tuple[TriMonomial, ...]  # sorted monomials, all coefficients 1

VARIANTS = (1, 2, 3)


@dataclass(frozen=True)
class TriangleRelation:
    """One relation row before flattening: where, what, and the context.

    ``triple`` is the strictly increasing index triple carrying the
    occupants; ``occupants`` the multiset (sorted 3-tuple) of basis
    indices placed on its three positions; ``fill`` assigns a basis index
    to every position outside the triple's triangle.
    """

    size: int
    triple: tuple[int, int, int]
    occupants: tuple[int, int, int]
    fill: tuple[tuple[tuple[int, int], int], ...]

    def triangle_slots(self) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
        i, j, k = self.triple
        return ((i, j), (i, k), (j, k))

    def monomials(self) -> Row:
        """The distinct arrangements (1, 3, or 6 of them), sorted."""
        base = dict(self.fill)
        slots = self.triangle_slots()
        out = set()
        for arrangement in set(permutations(self.occupants)):
            entries = dict(base)
            for slot, v in zip(slots, arrangement):
                entries[slot] = v
            out.add(TriMonomial.from_dict(self.size, entries))
        return tuple(sorted(out))


def _occupant_multisets(d: int, variant: int) -> list[tuple[int, int, int]]:
    """Occupant multisets contributed by one generating variant.

    Variant 1 polarizes the cubic family v (x) v (x) v directly: every
    multiset appears.  Variant 2 starts from the three-term family in
    (u, v): its v-pure components give the {v,v,u} multisets, its
    v-mixed components the three-distinct-letter multisets, and the
    u = v diagonal (divided by 3) the constant ones.  Variant 3 starts
    from the fully symmetrized six-term family: distinct triples come
    straight from it, degenerate multisets from the lower polarizations
    T(a,a,b)/2 and T(a,a,a)/6.  All three end at the same multiset list;
    what differs is the justification, so variants 2 and 3 insist on
    characteristic not 2 or 3.
    """
    return list(combinations_with_replacement(range(1, d + 1), 3))


def _check_variant(variant: int, field: FieldSpec | None) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if variant in (2, 3) and field is not None and field.characteristic in (2, 3):
        raise CharacteristicUnsupported(
            f"variant {variant} needs characteristic not 2 or 3, got {field}"
        )


def iter_block_relations(
    size: int, k: MultiDegree, d: int, variant: int = 3, field: FieldSpec | None = None
) -> Iterator[TriangleRelation]:
    """All triangle relations of one multidegree block, deterministically.

    Order: triples lexicographically, occupant multisets lexicographically,
    fills lexicographically.
    """
    _check_variant(variant, field)
    n_pos = n_triangle_entries(size)
    if sum(k) != n_pos or any(x < 0 for x in k):
        raise DegreeMismatch(f"multidegree {k} does not sum to {n_pos}")
    if size < 3:
        return
    all_pos = triangle_positions(size)
    for triple in combinations(range(1, size + 1), 3):
        i, j, kk = triple
        tri_slots = {(i, j), (i, kk), (j, kk)}
        rest = [p for p in all_pos if p not in tri_slots]
        for occ in _occupant_multisets(d, variant):
            remaining = list(k)
            ok = True
            for v in occ:
                remaining[v - 1] -= 1
                if remaining[v - 1] < 0:
                    ok = False
                    break
            if not ok:
                continue
            for fill_word in _words_with_counts(remaining):
                yield TriangleRelation(
                    size, triple, occ, tuple(zip(rest, fill_word))
                )


def relation_generators(
    n: int, d: int, variant: int = 3, field: FieldSpec | None = None
) -> list[TriangleRelation]:
    """Every triangle relation of size n, across all multidegree blocks."""
    _check_variant(variant, field)
    out: list[TriangleRelation] = []
    if n < 3:
        return out
    from .tensor import multidegrees

    for k in multidegrees(n_triangle_entries(n), d):
        out.extend(iter_block_relations(n, k, d, variant, field))
    return out


@dataclass(frozen=True)
class RelationBlock:
    """One multidegree block's relation matrix, columns in monomial order."""

    n: int
    k: MultiDegree
    d: int
    variant: int
    monomials: tuple[TriMonomial, ...]
    matrix: SparseMatrix

    @property
    def n_rows(self) -> int:
        return self.matrix.n_rows

    @property
    def n_monomials(self) -> int:
        return self.matrix.n_cols


def dedup_rows(rows: Iterator[Row]) -> list[Row]:
    """Drop duplicate rows, keeping first-seen order."""
    seen: set[Row] = set()
    out: list[Row] = []
    for row in rows:
        if row not in seen:
            seen.add(row)
            out.append(row)
    return out


def block_rows(
    size: int, k: MultiDegree, d: int, variant: int = 3, field: FieldSpec | None = None
) -> list[Row]:
    """Deduplicated relation rows of one block, deterministic order."""
    return dedup_rows(
        rel.monomials() for rel in iter_block_relations(size, k, d, variant, field)
    )


def assemble_relation_block(
    n: int,
    k: MultiDegree,
    d: int,
    field: FieldSpec,
    variant: int = 3,
) -> RelationBlock:
    """Build the block's sparse matrix over ``field``.

    Rows are deduplicated; columns follow the canonical monomial order;
    the construction is deterministic for fixed inputs.
    """
    _check_variant(variant, field)
    monomials = enumerate_block_monomials(n, tuple(k))
    index = {m: c for c, m in enumerate(monomials)}
    rows = block_rows(n, tuple(k), d, variant, field)
    entries = [
        (r, index[m], 1) for r, row in enumerate(rows) for m in row
    ]
    matrix = SparseMatrix.from_entries(len(rows), len(monomials), field, entries)
    return RelationBlock(
        n=n,
        k=tuple(k),
        d=d,
        variant=variant,
        monomials=tuple(monomials),
        matrix=matrix,
    )


def write_block_matrix_text(
    n: int,
    k: MultiDegree,
    d: int,
    field: FieldSpec,
    path,
    variant: int = 3,
) -> tuple[int, int]:
    """Stream one block's relation matrix to ``path`` in the text format.

    Returns (rows, cols).  Unlike :func:`assemble_relation_block` this
    never materializes the monomial list or the matrix: columns come
    from the combinatorial ranking, rows are deduplicated by support.
    Used for blocks too large to hold; output is byte-identical to the
    in-memory route on blocks where both apply.
    """
    import os
    import shutil
    import tempfile

    _check_variant(variant, field)
    n_cols = count_block_monomials(n, tuple(k))
    modulus = 0 if field.is_rational else field.p
    seen: set[tuple[int, ...]] = set()
    n_rows = 0
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)) or ".")
    try:
        with os.fdopen(fd, "w") as body:
            for rel in iter_block_relations(n, tuple(k), d, variant, field):
                cols = tuple(
                    sorted(rank_in_block(m.entries, tuple(k)) for m in rel.monomials())
                )
                if cols in seen:
                    continue
                seen.add(cols)
                for c in cols:
                    body.write(f"{n_rows + 1} {c + 1} 1\n")
                n_rows += 1
        with open(path, "w", newline="") as out:
            out.write(f"{n_rows} {n_cols} {modulus}\n")
            with open(tmp) as body:
                shutil.copyfileobj(body, out)
            out.write("0 0 0\n")
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return n_rows, n_cols


def block_row_count(size: int, k: MultiDegree, d: int, variant: int = 3) -> int:
    """Number of raw (pre-dedup) relations in a block, by counting fills."""
    n_pos = n_triangle_entries(size)
    if sum(k) != n_pos:
        raise DegreeMismatch(f"multidegree {k} does not sum to {n_pos}")
    if size < 3:
        return 0
    import math

    n_triples = math.comb(size, 3)
    total = 0
    for occ in _occupant_multisets(d, variant):
        remaining = list(k)
        ok = True
        for v in occ:
            remaining[v - 1] -= 1
            if remaining[v - 1] < 0:
                ok = False
                break
        if not ok:
            continue
        fills = math.factorial(n_pos - 3)
        for x in remaining:
            fills //= math.factorial(x)
        total += fills
    return total * n_triples
