"""Sparse matrices over Q or GF(p): exact rank, reduced echelon forms.

Two engines live here.  The reference engine is pure-Python sparse
elimination with a Markowitz-style least-fill pivot chosen within the
leftmost eligible column (relation blocks have at most 6 nonzeros per
row, so fill-in dominates cost).  For prime fields and wide matrices a
dense numpy engine takes over: batched Gauss-Jordan where trailing
updates are float64 matmuls, exact because p**2 * panel_width stays
below 2**53.  Both engines are deterministic and agree; the tests
cross-check them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import ResourceLimit, ShapeMismatch
from .fields import FieldSpec

try:
    import numpy as _np
except ImportError:  # pragma: no cover - numpy is a hard dependency in practice
    _np = None

# Columns at which rank_sparse switches to the dense engine (prime fields only).
DENSE_COLUMN_THRESHOLD = 600

# Above this the dense basis would not fit in memory; the streaming
# stretch path is the way to attack such blocks.
DENSE_MAX_COLUMNS = 50_000


@dataclass(frozen=True)
class RunLimits:
    """Resource guards for elimination.

    ``max_rational_cols``: rational elimination on wider matrices is
    refused; callers use multi-prime GF(p) evidence instead.
    ``max_entries``: crude memory budget on stored nonzeros.
    """

    max_rational_cols: int = 10_000
    max_entries: int = 200_000_000


DEFAULT_LIMITS = RunLimits()


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable sparse matrix; rows are sorted adjacency lists.

    ``rows[i]`` is a tuple of (col, value) pairs with strictly increasing
    col and nonzero value.  Duplicate (row, col) insertions are an error,
    not a sum: relation assembly controls its own accumulation.
    """

    n_rows: int
    n_cols: int
    field: FieldSpec
    rows: tuple[tuple[tuple[int, object], ...], ...]

    @staticmethod
    def from_entries(
        n_rows: int,
        n_cols: int,
        field: FieldSpec,
        entries: Iterable[tuple[int, int, object]],
    ) -> "SparseMatrix":
        buckets: list[dict[int, object]] = [dict() for _ in range(n_rows)]
        for r, c, v in entries:
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise ShapeMismatch(f"entry ({r},{c}) outside {n_rows}x{n_cols}")
            row = buckets[r]
            if c in row:
                raise ValueError(f"duplicate entry at ({r},{c})")
            v = field.convert(v)
            if v != 0:
                row[c] = v
        return SparseMatrix(
            n_rows,
            n_cols,
            field,
            tuple(tuple(sorted(row.items())) for row in buckets),
        )

    @staticmethod
    def from_dense(data: list[list], field: FieldSpec) -> "SparseMatrix":
        n_rows = len(data)
        n_cols = len(data[0]) if data else 0
        entries = [
            (i, j, v)
            for i, row in enumerate(data)
            for j, v in enumerate(row)
            if v != 0
        ]
        return SparseMatrix.from_entries(n_rows, n_cols, field, entries)

    @property
    def n_entries(self) -> int:
        return sum(len(r) for r in self.rows)

    def iter_entries(self) -> Iterator[tuple[int, int, object]]:
        for i, row in enumerate(self.rows):
            for c, v in row:
                yield i, c, v


@dataclass(frozen=True)
class EchelonForm:
    """Reduced row-echelon data: rank, pivot columns, and the RREF rows.

    Pivot columns are strictly increasing; each pivot entry is 1 and is
    the only nonzero in its column among the reduced rows.  Rows are
    stored sparse, aligned with ``pivot_cols``.
    """

    n_cols: int
    field: FieldSpec
    pivot_cols: tuple[int, ...]
    reduced_rows: tuple[tuple[tuple[int, object], ...], ...]
    _pivot_index: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._pivot_index.update(
            {c: i for i, c in enumerate(self.pivot_cols)}
        )

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)

    def non_pivot_cols(self) -> list[int]:
        pivots = set(self.pivot_cols)
        return [c for c in range(self.n_cols) if c not in pivots]

    def reduce_vector(self, vec: dict[int, object]) -> dict[int, object]:
        """Residual of ``vec`` modulo the row space; exact."""
        f = self.field
        out = {c: f.convert(v) for c, v in vec.items() if v != 0}
        for c in sorted(out):
            i = self._pivot_index.get(c)
            if i is None:
                continue
            coeff = out.get(c)
            if not coeff:
                continue
            for cc, vv in self.reduced_rows[i]:
                newv = f.sub(out.get(cc, f.zero()), f.mul(coeff, vv))
                if newv:
                    out[cc] = newv
                else:
                    out.pop(cc, None)
        return {c: v for c, v in out.items() if v}


def _check_limits(m: SparseMatrix, limits: RunLimits) -> None:
    if m.field.is_rational and m.n_cols > limits.max_rational_cols:
        raise ResourceLimit(
            f"rational elimination refused on {m.n_cols} columns "
            f"(limit {limits.max_rational_cols}); use prime fields"
        )
    if m.n_entries > limits.max_entries:
        raise ResourceLimit(
            f"{m.n_entries} stored entries exceed budget {limits.max_entries}"
        )


def _sparse_eliminate(
    m: SparseMatrix, want_reduced: bool
) -> tuple[list[int], list[dict[int, object]]]:
    """Forward elimination; returns (pivot_cols, pivot_rows as dicts).

    Pivot choice: leftmost nonempty column, then the row of least fill
    (fewest nonzeros), ties broken by insertion order.  If
    ``want_reduced`` the pivot rows are fully back-substituted to RREF.
    """
    f = m.field
    rows: list[dict[int, object] | None] = [dict(r) for r in m.rows]
    col_rows: dict[int, set[int]] = {}
    for i, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(i)
    heap = list(col_rows.keys())
    heapq.heapify(heap)

    pivot_cols: list[int] = []
    pivot_rows: list[dict[int, object]] = []

    while heap:
        c = heapq.heappop(heap)
        live = col_rows.get(c)
        if not live:
            continue
        pid = min(live, key=lambda i: (len(rows[i]), i))
        prow = rows[pid]
        rows[pid] = None
        for cc in prow:
            col_rows[cc].discard(pid)
        inv = f.inv(prow[c])
        if inv != f.one():
            prow = {cc: f.mul(inv, vv) for cc, vv in prow.items()}
        others = list(col_rows.get(c, ()))
        for i in others:
            row = rows[i]
            coeff = row[c]
            for cc, vv in prow.items():
                cur = row.get(cc)
                if cur is None:
                    nv = f.neg(f.mul(coeff, vv))
                    if nv:
                        row[cc] = nv
                        col_rows.setdefault(cc, set()).add(i)
                        if len(col_rows[cc]) == 1:
                            heapq.heappush(heap, cc)
                else:
                    nv = f.sub(cur, f.mul(coeff, vv))
                    if nv:
                        row[cc] = nv
                    else:
                        del row[cc]
                        col_rows[cc].discard(i)
        pivot_cols.append(c)
        pivot_rows.append(prow)

    if want_reduced:
        # Back-substitute: pivots were produced in increasing column order.
        pivot_of = {c: i for i, c in enumerate(pivot_cols)}
        for i in range(len(pivot_rows) - 1, -1, -1):
            row = pivot_rows[i]
            for c in sorted(cc for cc in row if cc in pivot_of and cc != pivot_cols[i]):
                j = pivot_of[c]
                if j <= i:
                    continue
                coeff = row.get(c)
                if not coeff:
                    continue
                for cc, vv in pivot_rows[j].items():
                    cur = row.get(cc, f.zero())
                    nv = f.sub(cur, f.mul(coeff, vv))
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
    return pivot_cols, pivot_rows


# ---------------------------------------------------------------------------
# Dense GF(p) engine


def _mod_p_inplace(a, p: float) -> None:
    """Exact in-place reduction of nonnegative float64 ints below 2**53."""
    tmp = _np.floor(a * (1.0 / p))
    tmp *= p
    a -= tmp
    # floor() on the rounded quotient can be off by one either way
    _np.add(a, p, out=a, where=a < 0)
    _np.subtract(a, p, out=a, where=a >= p)


class DenseGFpRref:
    """Streaming reduced row-echelon accumulator over GF(p), float64-backed.

    Rows arrive in batches; each batch is reduced against the fully
    reduced basis with one matmul, new pivots are found by
    rank-one sweeps inside small panels, and the basis is kept in RREF.
    All values stay exact: p**2 * accumulation_width < 2**53.
    """

    PANEL = 128
    K_CHUNK = 4000

    def __init__(self, p: int, n_cols: int, max_rank: int | None = None):
        if _np is None:
            raise ResourceLimit("numpy unavailable for dense elimination")
        if p * float(p) * self.K_CHUNK >= 2.0**53:
            raise ValueError(f"prime {p} too large for exact float64 accumulation")
        self.p = p
        self.n_cols = n_cols
        cap = min(max_rank if max_rank is not None else n_cols, n_cols)
        self.basis = _np.zeros((cap, n_cols), dtype=_np.float64)
        self.pivot_cols: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)

    @property
    def full(self) -> bool:
        return self.rank >= self.n_cols

    def _matmul_reduce(self, rows, coeff_cols, block) -> None:
        """rows -= rows[:, coeff_cols] @ block  (mod p), K-chunked.

        Requires ``block`` to be fully reduced: block row j is zero at
        every pivot column except its own (where it is 1), so one pass
        zeroes all of ``coeff_cols`` in ``rows`` exactly.
        """
        k = len(coeff_cols)
        for s in range(0, k, self.K_CHUNK):
            e = min(s + self.K_CHUNK, k)
            f = rows[:, coeff_cols[s:e]]
            if not f.any():
                continue
            rows -= f @ block[s:e]
            _mod_p_inplace(rows, self.p)

    def _absorb_panel(self, panel) -> list[int]:
        """Full Gauss-Jordan inside a panel; returns new pivot row indices.

        On return the pivot rows of the panel are mutually reduced, so
        they extend the basis without breaking its RREF invariant.
        """
        p = self.p
        pivot_rows: list[int] = []
        for i in range(panel.shape[0]):
            row = panel[i]
            nz = _np.nonzero(row)[0]
            if nz.size == 0:
                continue
            c = int(nz[0])
            inv = pow(int(row[c]), p - 2, p)
            if inv != 1:
                row *= inv
                _mod_p_inplace(row, p)
            coeffs = panel[:, c].copy()
            coeffs[i] = 0.0
            hit = _np.nonzero(coeffs)[0]
            if hit.size:
                sub = panel[hit] - coeffs[hit, None] * row[None, :]
                _mod_p_inplace(sub, p)
                panel[hit] = sub
            pivot_rows.append(i)
        return pivot_rows

    def add_batch(self, batch) -> None:
        """Absorb a (b, n_cols) array of ints (any sign, any int dtype).

        New pivots are collected per panel as "generations": a later
        panel is reduced against earlier generations before its own
        sweep (sound because each generation's rows were clean with
        respect to all earlier pivots when frozen).  The basis append
        and its back-elimination happen once per batch.
        """
        if self.full:
            return
        rows = _np.asarray(batch, dtype=_np.float64)
        _mod_p_inplace(rows, self.p)
        if self.pivot_cols:
            self._matmul_reduce(rows, self.pivot_cols, self.basis[: self.rank])
        gens: list[tuple[list[int], object]] = []
        gen_total = 0
        for s in range(0, rows.shape[0], self.PANEL):
            panel = rows[s : s + self.PANEL]
            for gcols, grows in gens:
                self._matmul_reduce(panel, gcols, grows)
            keep = self._absorb_panel(panel)
            if keep:
                block = panel[keep]
                gcols = [int(_np.nonzero(r)[0][0]) for r in block]
                gens.append((gcols, block))
                gen_total += len(keep)
                if self.rank + gen_total >= self.n_cols:
                    break
        if not gens:
            return
        new_cols = [c for gcols, _ in gens for c in gcols]
        new_block = _np.vstack([grows for _, grows in gens])
        # reverse pass: clear later generations' pivot columns out of
        # earlier generations, making the union internally reduced
        offsets = []
        pos = 0
        for gcols, _ in gens:
            offsets.append(pos)
            pos += len(gcols)
        for i in range(len(gens) - 2, -1, -1):
            seg = new_block[offsets[i] : offsets[i + 1]]
            tail_start = offsets[i + 1]
            self._matmul_reduce(seg, new_cols[tail_start:], new_block[tail_start:])
        self._append(new_block, new_cols)

    def _append(self, new_block, new_cols) -> None:
        """Append an internally reduced pivot block; keep the basis RREF."""
        r = self.rank
        if r:
            self._matmul_reduce(self.basis[:r], new_cols, new_block)
        need = r + new_block.shape[0]
        if need > self.basis.shape[0]:
            grown = _np.zeros((max(need, 2 * self.basis.shape[0]), self.n_cols))
            grown[:r] = self.basis[:r]
            self.basis = grown
        self.basis[r:need] = new_block
        self.pivot_cols.extend(new_cols)


def _rank_dense_gfp(m: SparseMatrix, batch_rows: int = 1024) -> int:
    p = m.field.p
    acc = DenseGFpRref(p, m.n_cols)
    # sparsest rows first: singleton rows pivot without fill, so the
    # early basis stays cheap to reduce against
    order = sorted(range(m.n_rows), key=lambda r: (len(m.rows[r]), r))
    for s in range(0, m.n_rows, batch_rows):
        if acc.full:
            break
        chunk = order[s : s + batch_rows]
        block = _np.zeros((len(chunk), m.n_cols))
        for i, r in enumerate(chunk):
            for c, v in m.rows[r]:
                block[i, c] = v
        acc.add_batch(block)
    return acc.rank


def rank_sparse(m: SparseMatrix, limits: RunLimits = DEFAULT_LIMITS) -> int:
    """Exact rank of ``m`` over its field; deterministic elimination."""
    _check_limits(m, limits)
    if not m.field.is_rational and m.n_cols >= DENSE_COLUMN_THRESHOLD:
        if m.n_cols > DENSE_MAX_COLUMNS:
            raise ResourceLimit(
                f"{m.n_cols} columns exceed the dense engine budget "
                f"({DENSE_MAX_COLUMNS}); use the streaming stretch path"
            )
        if _np is not None:
            return _rank_dense_gfp(m)
    pivot_cols, _ = _sparse_eliminate(m, want_reduced=False)
    return len(pivot_cols)


def rref_sparse(m: SparseMatrix, limits: RunLimits = DEFAULT_LIMITS) -> EchelonForm:
    """Reduced row-echelon form of ``m``; row space preserved."""
    _check_limits(m, limits)
    pivot_cols, pivot_rows = _sparse_eliminate(m, want_reduced=True)
    return EchelonForm(
        n_cols=m.n_cols,
        field=m.field,
        pivot_cols=tuple(pivot_cols),
        reduced_rows=tuple(tuple(sorted(r.items())) for r in pivot_rows),
    )


# ---------------------------------------------------------------------------
# Text interchange format
#
# Header "R C M" (M = 0 means rational), one line "r c v" per entry with
# 1-based indices, terminator "0 0 0".  LF line endings, single spaces.


def _scalar_to_text(v) -> str:
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{v.numerator}/{v.denominator}"
    return str(int(v))


def _scalar_from_text(s: str):
    if "/" in s:
        a, b = s.split("/")
        return Fraction(int(a), int(b))
    return int(s)


def write_matrix_text(m: SparseMatrix) -> str:
    modulus = 0 if m.field.is_rational else m.field.p
    lines = [f"{m.n_rows} {m.n_cols} {modulus}"]
    for r, c, v in m.iter_entries():
        lines.append(f"{r + 1} {c + 1} {_scalar_to_text(v)}")
    lines.append("0 0 0")
    return "\n".join(lines) + "\n"


def read_matrix_text(text: str) -> SparseMatrix:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty matrix file")
    n_rows, n_cols, modulus = (int(x) for x in lines[0].split())
    field = FieldSpec.rational() if modulus == 0 else FieldSpec.prime(modulus, allow_small=True)
    entries = []
    terminated = False
    for ln in lines[1:]:
        ln = ln.strip()
        if not ln:
            continue
        r, c, v = ln.split()
        if r == "0" and c == "0" and v == "0":
            terminated = True
            break
        entries.append((int(r) - 1, int(c) - 1, _scalar_from_text(v)))
    if not terminated:
        raise ValueError("missing '0 0 0' terminator")
    return SparseMatrix.from_entries(n_rows, n_cols, field, entries)
