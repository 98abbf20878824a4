"""Long-running rank computation for the conjecture block.

The open case is the 15-entry block with five of each letter over a
3-dimensional space: 756,756 monomial columns and about five million
relation rows of at most six unit entries.  Everything here streams;
nothing materializes the full matrix.

The rank is taken in three phases, all exact over GF(p):

  peel   - single-entry rows kill their column class outright and
           two-entry rows identify two classes up to a unit (weighted
           union-find); rows are streamed once, the irreducible ones
           stashed, and the stash is re-peeled in memory to a fixed
           point.  This is Gaussian elimination restricted to unit and
           binomial pivots, so it causes no fill-in at all.
  core   - the surviving rows over class representatives are eliminated
           with dict-backed sparse reduction.
  total  - rank = merges + class deaths + core rank.

Progress checkpoards (pickle under the cache directory) make the run
resumable; a time budget stops at the next checkpoint.  The reported
dimension over GF(p) upper-bounds the rational dimension.  The block is
parameterizable so the identical pipeline is exercised on small blocks
by the tests; the defaults are the open case.
"""

from __future__ import annotations

import pickle
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .cache import resolve_cache_dir
from .errors import ResourceLimit
from .fields import FieldSpec
from .relations import iter_block_relations
from .tensor import count_block_monomials, rank_in_block

_ONE_Q = Fraction(1)

STRETCH_N = 6
STRETCH_K = (5, 5, 5)
STRETCH_D = 3


@dataclass(frozen=True)
class StretchBlock:
    n: int = STRETCH_N
    k: tuple[int, ...] = STRETCH_K
    d: int = STRETCH_D

    def columns(self) -> int:
        return count_block_monomials(self.n, self.k)

    def tag(self) -> str:
        return f"n{self.n}-k{'-'.join(map(str, self.k))}-d{self.d}"


CONJECTURE_BLOCK = StretchBlock()
CHECKPOINT_EVERY = 200_000
# dict-backed rows cost on the order of 100 bytes per stored entry, so
# this keeps the core basis in the low tens of gigabytes
MAX_BASIS_ENTRIES = 120_000_000


def stretch_column_count() -> int:
    return CONJECTURE_BLOCK.columns()


def _iter_rows(block: StretchBlock, variant: int = 3):
    for rel in iter_block_relations(block.n, block.k, block.d, variant):
        yield tuple(
            sorted(rank_in_block(m.entries, block.k) for m in rel.monomials())
        )


class _SignedUnionFind:
    """Column classes with unit multipliers: value(c) = scale(c) * value(root).

    ``scale[c]`` is relative to ``parent[c]``; path compression rewrites
    it to be relative to the root.  ``p`` of None runs the same structure
    over the rationals (Fraction scales, exact).
    """

    __slots__ = ("p", "parent", "scale", "dead", "merges", "deaths")

    def __init__(self, p: int | None, n: int):
        self.p = p
        self.parent = list(range(n))
        self.scale = [_ONE_Q if p is None else 1] * n
        self.dead = bytearray(n)
        self.merges = 0
        self.deaths = 0

    def find(self, c: int) -> tuple[int, object]:
        parent = self.parent
        scale = self.scale
        path = []
        while parent[c] != c:
            path.append(c)
            c = parent[c]
        root = c
        # compress from the shallow end: after the loop every path node
        # points at the root with its cumulative multiplier
        p_mod = self.p
        cum = _ONE_Q if p_mod is None else 1
        for node in reversed(path):
            cum = scale[node] * cum if p_mod is None else scale[node] * cum % p_mod
            parent[node] = root
            scale[node] = cum
        return root, cum

    def kill(self, root: int) -> None:
        if not self.dead[root]:
            self.dead[root] = 1
            self.deaths += 1

    def merge(self, r1: int, v1, r2: int, v2) -> None:
        """Impose v1*x1 + v2*x2 = 0 on live roots r1 != r2."""
        p = self.p
        # attach r1 under r2: x1 = (-v2/v1) x2
        self.parent[r1] = r2
        if p is None:
            self.scale[r1] = Fraction(-v2, 1) / v1
        else:
            self.scale[r1] = -v2 * pow(v1, p - 2, p) % p
        self.merges += 1

    def reduce_row_items(self, items) -> list[tuple[int, object]]:
        """Map (column, coeff) pairs through classes; drop dead, combine."""
        p = self.p
        acc: dict[int, object] = {}
        for c, coeff in items:
            root, s = self.find(c)
            if self.dead[root]:
                continue
            v = acc.get(root, 0) + coeff * s
            acc[root] = v if p is None else v % p
        return sorted((r, v) for r, v in acc.items() if v)

    def reduce_row(self, cols) -> list[tuple[int, object]]:
        """Unit-coefficient column tuple, mapped through the classes."""
        return self.reduce_row_items((c, 1) for c in cols)

    def absorb(self, items) -> bool:
        """Use a reduced row as a unit/binomial pivot if short enough.

        Returns True if consumed (length 0, 1 or 2), False if it belongs
        in the core.
        """
        if not items:
            return True
        if len(items) == 1:
            self.kill(items[0][0])
            return True
        if len(items) == 2:
            (r1, v1), (r2, v2) = items
            self.merge(r1, v1, r2, v2)
            return True
        return False


@dataclass
class StretchState:
    p: int | None
    variant: int
    block: StretchBlock
    phase: str  # "stream" -> "peel" -> "core" -> "done"
    parent: list
    scale: list
    dead: bytearray
    merges: int
    deaths: int
    stash: list
    basis: dict = dc_field(default_factory=dict)
    rows_done: int = 0

    def basis_entries(self) -> int:
        return sum(len(r) for r in self.basis.values())


def _checkpoint_path(cache_dir, block: StretchBlock, p, variant: int):
    root = resolve_cache_dir(cache_dir)
    ftag = "q" if p is None else f"p{p}"
    return root / "stretch" / f"{block.tag()}-{ftag}-var{variant}.pickle"


def _save(state: StretchState, cache_dir) -> None:
    path = _checkpoint_path(cache_dir, state.block, state.p, state.variant)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        pickle.dump(state, fh, protocol=pickle.HIGHEST_PROTOCOL)
    tmp.replace(path)


def _load(cache_dir, block: StretchBlock, p: int, variant: int) -> StretchState | None:
    path = _checkpoint_path(cache_dir, block, p, variant)
    if not path.exists():
        return None
    with open(path, "rb") as fh:
        return pickle.load(fh)


@dataclass(frozen=True)
class StretchReport:
    p: int | None  # None: the run was exact over the rationals
    n_columns: int
    peel_rank: int
    core_rows: int
    core_rank: int
    rank: int
    dimension: int
    seconds: float
    finished: bool


def stretch_rank(
    field: FieldSpec,
    cache_dir=None,
    variant: int = 3,
    progress=None,
    time_budget: float | None = None,
    block: StretchBlock = CONJECTURE_BLOCK,
    checkpoint_every: int = CHECKPOINT_EVERY,
) -> StretchReport:
    """Rank of the block over one prime; checkpoints and resumes.

    With a ``time_budget`` (seconds) the run checkpoints and returns
    ``finished=False`` when the budget expires; rerunning resumes from
    the last checkpoint.

    Rational runs are exact: the peel phase uses only unit and binomial
    pivots, so coefficients stay small and there is no fill-in; only a
    nonempty core can grow, and the memory budget guards it.
    """
    p = field.p
    t0 = time.monotonic()

    def out_of_time() -> bool:
        return time_budget is not None and time.monotonic() - t0 > time_budget

    state = _load(cache_dir, block, p, variant)
    if state is None:
        n_cols = block.columns()
        uf = _SignedUnionFind(p, n_cols)
        state = StretchState(
            p=p,
            variant=variant,
            block=block,
            phase="stream",
            parent=uf.parent,
            scale=uf.scale,
            dead=uf.dead,
            merges=0,
            deaths=0,
            stash=[],
        )
    elif progress:
        progress(f"resumed in phase {state.phase}")

    uf = _SignedUnionFind(p, 0)
    uf.parent = state.parent
    uf.scale = state.scale
    uf.dead = state.dead
    uf.merges = state.merges
    uf.deaths = state.deaths

    def sync_and_save():
        state.merges, state.deaths = uf.merges, uf.deaths
        _save(state, cache_dir)

    finished = True

    if state.phase == "stream":
        # One pass over every relation row; short rows peel immediately.
        # Absorbed rows re-reduce to empty, so a budget stop here may
        # simply restart the stream against the saved classes on resume.
        stash_set = set()
        count = 0
        for cols in _iter_rows(block, variant):
            count += 1
            items = uf.reduce_row(cols)
            if not uf.absorb(items):
                stash_set.add(tuple(items))
            if count % checkpoint_every == 0:
                if out_of_time():
                    sync_and_save()
                    finished = False
                    break
                if progress and count % 1_000_000 == 0:
                    progress(
                        f"stream: {count} rows, merges {uf.merges}, "
                        f"deaths {uf.deaths}, stash {len(stash_set)}"
                    )
        if finished:
            state.stash = sorted(stash_set)
            state.phase = "peel"
            sync_and_save()
            if progress:
                progress(
                    f"stream done: {count} rows, merges {uf.merges}, "
                    f"deaths {uf.deaths}, stash {len(state.stash)}"
                )
            if out_of_time():
                finished = False

    if finished and state.phase == "peel":
        # re-peel the stash to a fixed point entirely in memory
        sweep = 0
        while True:
            sweep += 1
            before = uf.merges + uf.deaths
            stash_set = set()
            for items in state.stash:
                reduced = uf.reduce_row_items(items)
                if not uf.absorb(reduced):
                    stash_set.add(tuple(reduced))
            state.stash = sorted(stash_set)
            changed = uf.merges + uf.deaths - before
            if progress:
                progress(
                    f"peel sweep {sweep}: +{changed} pivots, stash {len(state.stash)}"
                )
            if not changed:
                break
            if out_of_time():
                finished = False
                break
        if finished:
            state.phase = "core"
            state.rows_done = 0
        sync_and_save()

    if finished and state.phase == "core":
        basis = state.basis
        skip = state.rows_done
        for idx, items in enumerate(state.stash):
            if idx < skip:
                continue
            vec = dict(uf.reduce_row_items(items))
            while vec:
                lead = min(vec)
                row = basis.get(lead)
                if row is None:
                    lead_val = vec[lead]
                    if p is None:
                        basis[lead] = {c: Fraction(v, 1) / lead_val for c, v in vec.items()}
                    else:
                        inv = pow(lead_val, p - 2, p)
                        basis[lead] = {c: v * inv % p for c, v in vec.items()}
                    break
                coeff = vec.pop(lead)
                for c, v in row.items():
                    if c == lead:
                        continue
                    nv = vec.get(c, 0) - coeff * v
                    if p is not None:
                        nv %= p
                    if nv:
                        vec[c] = nv
                    else:
                        vec.pop(c, None)
            state.rows_done = idx + 1
            if (idx + 1) % checkpoint_every == 0:
                over = state.basis_entries() > MAX_BASIS_ENTRIES
                sync_and_save()
                if over:
                    raise ResourceLimit("core basis exceeded the memory budget; checkpointed")
                if progress:
                    progress(
                        f"core: {idx + 1}/{len(state.stash)} rows, "
                        f"rank {len(basis)}, nnz {state.basis_entries()}"
                    )
                if out_of_time():
                    finished = False
                    break
        if finished:
            state.phase = "done"
        sync_and_save()

    n_cols = block.columns()
    peel_rank = uf.merges + uf.deaths
    core_rank = len(state.basis)
    rank = peel_rank + core_rank
    return StretchReport(
        p=p,
        n_columns=n_cols,
        peel_rank=peel_rank,
        core_rows=len(state.stash),
        core_rank=core_rank,
        rank=rank,
        dimension=n_cols - rank,
        seconds=time.monotonic() - t0,
        finished=finished and state.phase == "done",
    )
