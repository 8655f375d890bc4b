"""Finite semigroups as Cayley tables and transformation semigroups.

Elements are 0-based indices.  Transformations act on the right, so the
product ``s * t`` means "apply ``s``, then ``t``".
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .config import DEFAULT_BOUNDS
from .errors import BoundExceeded, CapExceeded, MalformedTable, NotAssociative

LABELED = "labeled"
ISO = "iso"
MODES = (LABELED, ISO)


def _check_square(rows) -> int:
    n = len(rows)
    if n == 0:
        raise MalformedTable("empty table")
    for r, row in enumerate(rows):
        if len(row) != n:
            raise MalformedTable(f"row {r} has length {len(row)}, expected {n}")
        for c, v in enumerate(row):
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= v < n:
                raise MalformedTable(f"entry ({r}, {c}) = {v!r} out of range [0, {n})")
    return n


def verify_associativity(rows: Sequence[Sequence[int]]) -> tuple[int, int, int] | None:
    """Return the lexicographically least non-associating triple, or None."""
    n = _check_square(rows)
    for i in range(n):
        ri = rows[i]
        for j in range(n):
            rij = rows[ri[j]]
            rj = rows[j]
            for k in range(n):
                if rij[k] != ri[rj[k]]:
                    return (i, j, k)
    return None


@dataclass(frozen=True)
class CayleyTable:
    rows: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.rows)

    @classmethod
    def from_rows(cls, rows, check: bool = True) -> "CayleyTable":
        rows = tuple(tuple(int(v) for v in row) for row in rows)
        if check:
            bad = verify_associativity(rows)
            if bad is not None:
                raise NotAssociative(f"triple {bad} does not associate")
        else:
            _check_square(rows)
        return cls(rows)

    def mul(self, *xs: int) -> int:
        """Left-to-right product of one or more elements."""
        it = iter(xs)
        acc = next(it)
        for x in it:
            acc = self.rows[acc][x]
        return acc

    def power(self, s: int, k: int) -> int:
        acc = s
        row_s = [r[s] for r in self.rows]
        for _ in range(k - 1):
            acc = row_s[acc]
        return acc

    def elements(self) -> range:
        return range(self.order)

    def flat(self) -> tuple[int, ...]:
        return tuple(v for row in self.rows for v in row)

    def relabel(self, perm: Sequence[int]) -> "CayleyTable":
        """Image of the table under the bijection ``i -> perm[i]``."""
        n = self.order
        inv = [0] * n
        for i, p in enumerate(perm):
            inv[p] = i
        return CayleyTable(tuple(
            tuple(perm[self.rows[inv[i]][inv[j]]] for j in range(n)) for i in range(n)
        ))

    def __repr__(self):
        return f"CayleyTable({[list(r) for r in self.rows]})"


@dataclass(frozen=True)
class Transformation:
    images: tuple[int, ...]

    def __post_init__(self):
        d = len(self.images)
        if d == 0:
            raise MalformedTable("transformation of degree 0")
        for v in self.images:
            if not 0 <= v < d:
                raise MalformedTable(f"image {v} out of range for degree {d}")

    @classmethod
    def of(cls, images: Iterable[int]) -> "Transformation":
        return cls(tuple(int(v) for v in images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __mul__(self, other: "Transformation") -> "Transformation":
        if other.degree != self.degree:
            raise MalformedTable("degree mismatch")
        img = other.images
        return Transformation(tuple(img[v] for v in self.images))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def image(self) -> frozenset[int]:
        return frozenset(self.images)

    def __repr__(self):
        return f"Transformation({list(self.images)})"


@dataclass(frozen=True)
class TransformationSemigroup:
    degree: int
    elements: tuple[Transformation, ...]
    cayley: CayleyTable
    index: dict = field(compare=False, repr=False, hash=False, default=None)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {t: i for i, t in enumerate(self.elements)})

    @property
    def order(self) -> int:
        return len(self.elements)

    @classmethod
    def from_elements(cls, elements: Sequence[Transformation]) -> "TransformationSemigroup":
        elements = tuple(elements)
        if not elements:
            raise MalformedTable("no elements")
        degree = elements[0].degree
        index = {t: i for i, t in enumerate(elements)}
        if len(index) != len(elements):
            raise MalformedTable("duplicate transformations")
        rows = []
        for s in elements:
            row = []
            for t in elements:
                p = s * t
                if p not in index:
                    raise MalformedTable(f"{s} * {t} = {p} is not listed (not closed)")
                row.append(index[p])
            rows.append(tuple(row))
        return cls(degree, elements, CayleyTable(tuple(rows)), index)


@dataclass(frozen=True)
class IndexPeriod:
    kappa: int
    rho: int


# --- enumeration -----------------------------------------------------------

def _search(n: int, iso: bool, prefix: tuple[int, ...]) -> Iterator[CayleyTable]:
    N = n * n
    t = [-1] * N
    perms = []
    if iso:
        for p in itertools.permutations(range(n)):
            if p == tuple(range(n)):
                continue
            pinv = [0] * n
            for i, v in enumerate(p):
                pinv[v] = i
            perms.append((p, pinv))
    cells = [divmod(c, n) for c in range(N)]
    rng = range(n)

    def consistent(c: int, v: int) -> bool:
        i, j = cells[c]
        jn, iN = j * n, i * n
        for k in rng:                      # (ij)k = i(jk)
            jk = t[jn + k]
            if jk >= 0:
                lhs = t[v * n + k]
                rhs = t[iN + jk]
                if lhs >= 0 and rhs >= 0 and lhs != rhs:
                    return False
        for a in rng:                      # (ai)j = a(ij)
            ai = t[a * n + i]
            if ai >= 0:
                lhs = t[ai * n + j]
                rhs = t[a * n + v]
                if lhs >= 0 and rhs >= 0 and lhs != rhs:
                    return False
        for a in rng:                      # (ab)j = a(bj) where ab = i
            an = a * n
            for b in rng:
                if t[an + b] == i:
                    bj = t[b * n + j]
                    if bj >= 0:
                        rhs = t[an + bj]
                        if rhs >= 0 and rhs != v:
                            return False
        for b in rng:                      # (ib)c = i(bc) where bc = j
            ib = t[iN + b]
            if ib < 0:
                continue
            bn = b * n
            for c2 in rng:
                if t[bn + c2] == j:
                    lhs = t[ib * n + c2]
                    if lhs >= 0 and lhs != v:
                        return False
        return True

    def canonical(filled: int) -> bool:
        # prune when some relabeling is already lexicographically smaller
        for p, pinv in perms:
            for pos in range(filled):
                i, j = cells[pos]
                src = t[pinv[i] * n + pinv[j]]
                if src < 0:
                    break
                a, b = p[src], t[pos]
                if a < b:
                    return False
                if a > b:
                    break
        return True

    def rec(c: int):
        if c == N:
            yield CayleyTable(tuple(tuple(t[r * n:(r + 1) * n]) for r in range(n)))
            return
        choices = (prefix[c],) if c < len(prefix) else rng
        for v in choices:
            t[c] = v
            if consistent(c, v) and (not iso or canonical(c + 1)):
                yield from rec(c + 1)
        t[c] = -1

    yield from rec(0)


def _search_list(args) -> list[CayleyTable]:
    n, iso, prefix = args
    return list(_search(n, iso, prefix))


def enumerate_semigroups(n: int, mode: str = LABELED, *, limit: int | None = None,
                         jobs: int = 1, prefix: Sequence[int] = ()) -> Iterator[CayleyTable]:
    """Every associative n x n table, in lexicographic order of the flattened table.

    ``mode="iso"`` keeps exactly the lexicographically least table of each
    isomorphism class.  With ``jobs > 1`` the search is split on the first
    cell; the merged stream keeps the global order.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if n < 1:
        raise ValueError("order must be positive")
    if limit is None:
        limit = DEFAULT_BOUNDS.labeled_order if mode == LABELED else DEFAULT_BOUNDS.iso_order
    if n > limit:
        raise BoundExceeded(f"order {n} exceeds the {mode} enumeration bound {limit}")
    iso = mode == ISO
    prefix = tuple(prefix)
    if jobs > 1 and not prefix and n > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_search_list, [(n, iso, (v,)) for v in range(n)])
            for part in parts:
                yield from part
        return
    yield from _search(n, iso, prefix)


@lru_cache(maxsize=None)
def semigroups_of_order(n: int, mode: str = LABELED) -> tuple[CayleyTable, ...]:
    """Cached, fully materialised ``enumerate_semigroups(n, mode)``."""
    return tuple(enumerate_semigroups(n, mode, limit=n))


def semigroups_up_to(max_order: int, mode: str = LABELED) -> Iterator[CayleyTable]:
    for n in range(1, max_order + 1):
        yield from semigroups_of_order(n, mode)


def canonical_form(table: CayleyTable) -> CayleyTable:
    """Lexicographically least relabeling (brute force over all n! bijections)."""
    n = table.order
    best = None
    for p in itertools.permutations(range(n)):
        cand = table.relabel(p)
        if best is None or cand.rows < best.rows:
            best = cand
    return best


# --- single-table operations ------------------------------------------------

def index_period(table: CayleyTable, s: int) -> IndexPeriod:
    if not 0 <= s < table.order:
        raise IndexError(f"element {s} out of range")
    seen = {}
    x, k = s, 1
    while x not in seen:
        seen[x] = k
        x = table.rows[x][s]
        k += 1
    kappa = seen[x]
    return IndexPeriod(kappa, k - kappa)


def idempotent_power(table: CayleyTable, s: int) -> int:
    """Least n >= 1 with s^n idempotent."""
    ip = index_period(table, s)
    return -(-ip.kappa // ip.rho) * ip.rho


def idempotent_set(table: CayleyTable) -> frozenset[int]:
    return frozenset(e for e in table.elements() if table.rows[e][e] == e)


def subsemigroup_closure(table: CayleyTable, seed: Iterable[int]) -> frozenset[int]:
    found = set(seed)
    if not found:
        raise ValueError("seed must be nonempty")
    frontier = list(found)
    while frontier:
        new = []
        current = list(found)
        for x in frontier:
            for y in current:
                for z in (table.rows[x][y], table.rows[y][x]):
                    if z not in found:
                        found.add(z)
                        new.append(z)
        frontier = new
    return frozenset(found)


def subset_mask_product(table: CayleyTable, xs: int, ys: int) -> int:
    """Setwise product of two subsets given as bitmasks."""
    out = 0
    rows = table.rows
    for x in _bits(xs):
        row = rows[x]
        for y in _bits(ys):
            out |= 1 << row[y]
    return out


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def members(mask: int) -> tuple[int, ...]:
    return tuple(_bits(mask))


def power_semigroup(table: CayleyTable, *, limit: int | None = None) -> CayleyTable:
    """Semigroup of nonempty subsets under setwise product.

    Subset ``X`` (as a bitmask) has index ``X - 1``.
    """
    limit = DEFAULT_BOUNDS.power_order if limit is None else limit
    n = table.order
    if n > limit:
        raise BoundExceeded(f"power semigroup of order-{n} table exceeds bound {limit}")
    size = 1 << n
    rows = np.asarray(table.rows, dtype=np.int64)
    # right[x, Y] = {x*y : y in Y}; built by doubling on the highest bit of Y
    right = np.zeros((n, size), dtype=np.int64)
    for k in range(n):
        right[:, 1 << k:1 << (k + 1)] = right[:, :1 << k] | (np.int64(1) << rows[:, k])[:, None]
    prod = np.zeros((size, size), dtype=np.int64)
    for k in range(n):
        prod[1 << k:1 << (k + 1)] = prod[:1 << k] | right[k][None, :]
    sub = prod[1:, 1:] - 1
    ints = list(range(size - 1))
    return CayleyTable(tuple(tuple(ints[v] for v in row) for row in sub.tolist()))


# --- transformations --------------------------------------------------------

def transformation_closure(generators: Sequence[Transformation], cap: int | None = None
                           ) -> TransformationSemigroup:
    """Breadth-first closure under composition; generators first, then discovery order."""
    cap = DEFAULT_BOUNDS.closure_cap if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be >= 1")
    gens = []
    for g in generators:
        if g not in gens:
            gens.append(g)
    if not gens:
        raise ValueError("no generators")
    if len({g.degree for g in gens}) != 1:
        raise MalformedTable("generators have different degrees")
    elements = []
    seen = set()
    for g in gens:
        elements.append(g)
        seen.add(g)
        if len(elements) > cap:
            raise CapExceeded(f"closure exceeds cap {cap}", len(elements))
    i = 0
    while i < len(elements):
        x = elements[i]
        i += 1
        for g in gens:
            y = x * g
            if y not in seen:
                seen.add(y)
                elements.append(y)
                if len(elements) > cap:
                    raise CapExceeded(f"closure exceeds cap {cap}", len(elements))
    return TransformationSemigroup.from_elements(elements)


@lru_cache(maxsize=None)
def full_transformation_semigroup(degree: int) -> TransformationSemigroup:
    """All degree^degree maps, in lexicographic order of their image tuples."""
    maps = [Transformation(p) for p in itertools.product(range(degree), repeat=degree)]
    return TransformationSemigroup.from_elements(maps)


def regular_representation(table: CayleyTable) -> TransformationSemigroup:
    """Right translations x -> x*a on S with a fresh identity adjoined (point n)."""
    n = table.order
    elements = []
    for a in range(n):
        elements.append(Transformation(tuple(table.rows[x][a] for x in range(n)) + (a,)))
    ts = TransformationSemigroup.from_elements(elements)
    if ts.cayley != table:
        raise AssertionError("regular representation does not reproduce the table")
    return ts


# --- small constructors -------------------------------------------------------

def table_from_op(elements: Sequence, op) -> CayleyTable:
    idx = {e: i for i, e in enumerate(elements)}
    return CayleyTable.from_rows([[idx[op(x, y)] for y in elements] for x in elements])


def cyclic_group(n: int) -> CayleyTable:
    return CayleyTable(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


def left_zero(n: int) -> CayleyTable:
    return CayleyTable(tuple(tuple(i for _ in range(n)) for i in range(n)))


def right_zero(n: int) -> CayleyTable:
    return CayleyTable(tuple(tuple(range(n)) for _ in range(n)))


def chain_semilattice(n: int) -> CayleyTable:
    """Meet semilattice on the chain 0 < 1 < ... < n-1."""
    return CayleyTable(tuple(tuple(min(i, j) for j in range(n)) for i in range(n)))


def monogenic(index: int, period: int) -> CayleyTable:
    """<s | s^index = s^(index+period)>; element e is s^(e+1)."""
    size = index + period - 1

    def reduce(k):
        return k if k < index + period else index + (k - index) % period

    return CayleyTable(tuple(
        tuple(reduce(a + b) - 1 for b in range(1, size + 1)) for a in range(1, size + 1)
    ))


def direct_product(s: CayleyTable, t: CayleyTable) -> CayleyTable:
    """Element (a, b) has index a * |t| + b."""
    m = t.order
    pairs = [(a, b) for a in s.elements() for b in t.elements()]
    return CayleyTable(tuple(
        tuple(s.rows[a][c] * m + t.rows[b][d] for (c, d) in pairs) for (a, b) in pairs
    ))


def adjoin_identity(table: CayleyTable) -> CayleyTable:
    """S^1 with the new identity at index n (always adjoined)."""
    n = table.order
    rows = [list(r) + [i] for i, r in enumerate(table.rows)]
    rows.append(list(range(n + 1)))
    return CayleyTable(tuple(tuple(r) for r in rows))
