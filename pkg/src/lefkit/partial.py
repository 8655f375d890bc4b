"""Partial multiplication tables, embedding search and wraps by finite semigroups.

A :class:`PartialTable` is a finite set of named elements with the products
that stay inside the set; ``ambient`` optionally records the value of every
product (as a canonical word), in or out of the set.  A :class:`WrapInstance`
labels the elements of a finite semigroup ``D`` either by an element of such a
table or by :class:`Outside`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Sequence, Union

from .config import DEFAULT_BOUNDS
from .errors import (BoundExceeded, DuplicateElement, PreconditionFailed,
                     UndecidedEquality, WordTooLong)
from .finite import (ISO, CayleyTable, TransformationSemigroup, direct_product,
                     full_transformation_semigroup, semigroups_of_order)
from .rewriting import (RewritingSystem, bounded_class, free_semigroup, is_complete,
                        normal_form, parse_word, show_word)

Pair = tuple[int, int]


@dataclass(frozen=True, eq=True)
class PartialTable:
    elements: tuple[str, ...]
    product: Mapping[Pair, int]
    ambient: Mapping[Pair, str] | None = None

    def __post_init__(self):
        t = len(self.elements)
        if len(set(self.elements)) != t:
            raise DuplicateElement("element names must be distinct")
        for (i, j), k in self.product.items():
            if not (0 <= i < t and 0 <= j < t and 0 <= k < t):
                raise ValueError(f"product {(i, j)} -> {k} out of range")
        if self.ambient is not None:
            for (i, j), k in self.product.items():
                w = self.ambient.get((i, j))
                if w is not None and w != self.elements[k]:
                    raise ValueError(f"ambient value {w!r} of {(i, j)} disagrees with "
                                     f"in-set product {self.elements[k]!r}")

    __hash__ = None

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, name: str) -> int:
        return self.elements.index(name)

    def mul(self, i: int | None, j: int | None) -> int | None:
        if i is None or j is None:
            return None
        return self.product.get((i, j))

    def chain(self, *xs: int) -> int | None:
        """Left-to-right product, None as soon as a partial product leaves the set."""
        acc = xs[0]
        for x in xs[1:]:
            acc = self.mul(acc, x)
            if acc is None:
                return None
        return acc

    def is_out_of_set(self, i: int, j: int) -> bool:
        """True iff the product is known to fall outside the set."""
        if (i, j) in self.product:
            return False
        if self.ambient is None or (i, j) not in self.ambient:
            raise UndecidedEquality(f"no ambient value for {self.elements[i]}*{self.elements[j]}")
        return True

    def sub(self, names: Sequence[str]) -> "PartialTable":
        """Restriction to a subset of the elements (ambient kept for those pairs)."""
        idx = [self.index(n) for n in names]
        back = {old: new for new, old in enumerate(idx)}
        product = {}
        ambient = {} if self.ambient is not None else None
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                k = self.product.get((i, j))
                if k in back:
                    product[(a, b)] = back[k]
                if ambient is not None and (i, j) in self.ambient:
                    ambient[(a, b)] = self.ambient[(i, j)]
                elif ambient is not None and k is not None:
                    ambient[(a, b)] = self.elements[k]
        return PartialTable(tuple(names), product, ambient)


def check_partial_associativity(pt: PartialTable) -> tuple[int, int, int] | None:
    """Least triple whose two groupings are both defined in the set but differ."""
    r = range(pt.size)
    for x, y, z in itertools.product(r, r, r):
        left = pt.mul(pt.mul(x, y), z)
        right = pt.mul(x, pt.mul(y, z))
        if left is not None and right is not None and left != right:
            return (x, y, z)
    return None


# --- inducing a partial table from an ambient semigroup ----------------------------

def induce(source: RewritingSystem | CayleyTable, words: Sequence,
           *, max_len: int | None = None, max_steps: int | None = None,
           unknown_as_distinct: bool = False) -> PartialTable:
    """Partial table of ``words`` with products inherited from ``source``.

    ``source`` is either a rewriting system (equality by normal forms when it
    is complete, otherwise by bounded class search) or a finite Cayley table
    (``words`` are element indices).  Bounded search can only prove
    equalities, so a non-complete system raises :class:`UndecidedEquality`
    unless ``unknown_as_distinct`` accepts unseparated words as distinct.
    """
    if isinstance(source, CayleyTable):
        return _induce_table(source, words)
    rs = source
    if is_complete(rs):
        names = [rs.word(w) if isinstance(w, str) else w for w in words]
        nfs = [normal_form(w, rs) for w in names]
        labels = [show_word(w) for w in nfs]
        if len(set(labels)) != len(labels):
            dup = next(l for l in labels if labels.count(l) > 1)
            raise DuplicateElement(f"two inputs reduce to {dup!r}")
        where = {w: i for i, w in enumerate(nfs)}
        product, ambient = {}, {}
        for i, u in enumerate(nfs):
            for j, v in enumerate(nfs):
                w = normal_form(u + v, rs)
                ambient[(i, j)] = show_word(w)
                if w in where:
                    product[(i, j)] = where[w]
        return PartialTable(tuple(labels), product, ambient)
    if max_len is None or max_steps is None:
        raise UndecidedEquality(f"{rs.name or 'system'} is not complete; supply search caps")
    return _induce_bounded(rs, [rs.word(w) for w in words], max_len, max_steps,
                           unknown_as_distinct)


def _induce_bounded(rs, names, max_len, max_steps, unknown_as_distinct) -> PartialTable:
    # Bounded search only ever proves equalities; inequality is an assumption.
    classes = {}

    def cls(w):
        if w not in classes:
            classes[w] = bounded_class(w, rs, max_len, max_steps)[0]
        return classes[w]

    def undecided(what):
        if not unknown_as_distinct:
            raise UndecidedEquality(f"cannot separate {what} without a complete system")

    for a, b in itertools.combinations(range(len(names)), 2):
        if names[b] in cls(names[a]):
            raise DuplicateElement(f"{show_word(names[a])!r} = {show_word(names[b])!r}")
        undecided(f"{show_word(names[a])} and {show_word(names[b])}")
    product, ambient = {}, {}
    for i, u in enumerate(names):
        for j, v in enumerate(names):
            reach = cls(u + v)
            hits = [k for k, z in enumerate(names) if z in reach]
            if hits:
                product[(i, j)] = hits[0]
                ambient[(i, j)] = show_word(names[hits[0]])
            else:
                undecided(f"{show_word(u + v)} from every element")
                ambient[(i, j)] = show_word(u + v)
    return PartialTable(tuple(show_word(w) for w in names), product, ambient)


def _induce_table(table: CayleyTable, elems) -> PartialTable:
    elems = [int(e) for e in elems]
    if len(set(elems)) != len(elems):
        raise DuplicateElement("repeated element")
    where = {e: i for i, e in enumerate(elems)}
    product, ambient = {}, {}
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            z = table.rows[x][y]
            ambient[(i, j)] = str(z)
            if z in where:
                product[(i, j)] = where[z]
    return PartialTable(tuple(str(e) for e in elems), product, ambient)


# --- embeddings ----------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingWitness:
    target: CayleyTable
    assignment: tuple[int, ...]
    transformations: tuple | None = None   # target elements as maps, for degree spaces


@dataclass(frozen=True)
class Witnessed:
    witness: object
    targets_tried: int


@dataclass(frozen=True)
class Exhausted:
    space: dict
    targets: int


@dataclass(frozen=True)
class OrderSpace:
    """Every semigroup of order <= max_order, one per isomorphism class."""
    max_order: int

    def describe(self) -> dict:
        return {"kind": "orders", "max_order": self.max_order, "mode": ISO}


@dataclass(frozen=True)
class DegreeSpace:
    """Full transformation semigroups T_1 .. T_max_degree."""
    max_degree: int

    def describe(self) -> dict:
        return {"kind": "transformations", "max_degree": self.max_degree}


def verify_embedding(pt: PartialTable, witness: EmbeddingWitness) -> bool:
    f = witness.assignment
    n = witness.target.order
    if len(f) != pt.size or any(not 0 <= v < n for v in f):
        return False
    if len(set(f)) != len(f):
        return False
    rows = witness.target.rows
    return all(rows[f[i]][f[j]] == f[k] for (i, j), k in pt.product.items())


def _constraints_by_last(pt: PartialTable) -> list[list[tuple[int, int, int]]]:
    by_last = [[] for _ in range(pt.size)]
    for (i, j), k in pt.product.items():
        by_last[max(i, j, k)].append((i, j, k))
    return by_last


def find_assignment(pt: PartialTable, target: CayleyTable) -> tuple[int, ...] | None:
    """Least (lexicographic) injective product-preserving map into ``target``."""
    t, m = pt.size, target.order
    if t > m:
        return None
    rows = target.rows
    by_last = _constraints_by_last(pt)
    f = [-1] * t
    used = [False] * m

    def rec(e):
        if e == t:
            return True
        for v in range(m):
            if used[v]:
                continue
            f[e] = v
            if all(rows[f[i]][f[j]] == f[k] for i, j, k in by_last[e]):
                used[v] = True
                if rec(e + 1):
                    return True
                used[v] = False
        f[e] = -1
        return False

    return tuple(f) if rec(0) else None


def _targets(space):
    if isinstance(space, OrderSpace):
        for n in range(1, space.max_order + 1):
            for table in semigroups_of_order(n, ISO):
                yield table, None
    elif isinstance(space, DegreeSpace):
        for d in range(1, space.max_degree + 1):
            ts = full_transformation_semigroup(d)
            yield ts.cayley, ts.elements
    else:
        raise TypeError(f"unknown search space {space!r}")


def embed_search(pt: PartialTable, space, *, bounds=DEFAULT_BOUNDS) -> Witnessed | Exhausted:
    """Deterministic backtracking over targets (ascending) and assignments."""
    if isinstance(space, OrderSpace) and space.max_order > bounds.iso_order:
        raise BoundExceeded(f"order {space.max_order} over bound {bounds.iso_order}")
    if isinstance(space, DegreeSpace) and space.max_degree > max(bounds.embed_degree, 4):
        raise BoundExceeded(f"degree {space.max_degree} over bound")
    tried = 0
    for target, maps in _targets(space):
        tried += 1
        f = find_assignment(pt, target)
        if f is not None:
            return Witnessed(EmbeddingWitness(target, f, maps), tried)
    return Exhausted(space.describe(), tried)


def free_truncation_witness(words: Sequence[str], max_len: int,
                            alphabet: Sequence[str] | None = None) -> EmbeddingWitness:
    """Inclusion into {nonempty words of length <= max_len} + zero, overflow going to zero.

    Target elements are the words in shortlex order followed by the zero.
    """
    words = [parse_word(w) for w in words]
    if alphabet is None:
        alphabet = sorted({ch for w in words for ch in w})
    for w in words:
        if not w or len(w) > max_len:
            raise WordTooLong(f"{w!r} is empty or longer than {max_len}")
    universe = ["".join(p) for k in range(1, max_len + 1)
                for p in itertools.product(alphabet, repeat=k)]
    index = {w: i for i, w in enumerate(universe)}
    zero = len(universe)
    rows = []
    for u in universe:
        rows.append(tuple(index[u + v] if len(u) + len(v) <= max_len else zero for v in universe)
                    + (zero,))
    rows.append(tuple([zero] * (zero + 1)))
    return EmbeddingWitness(CayleyTable(tuple(rows)), tuple(index[w] for w in words))


def free_pattern(words: Sequence[str]) -> PartialTable:
    alphabet = sorted({ch for w in words for ch in w})
    return induce(free_semigroup(alphabet), words)


# --- wraps ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Outside:
    """Label of a D-element whose value lies outside H; ``word=None`` is the sink ⊥."""
    word: str | None = None

    def __repr__(self):
        return f"Outside({self.word!r})" if self.word is not None else "Outside(⊥)"


BOTTOM = Outside(None)
Label = Union[int, Outside]


def in_h(label: Label) -> bool:
    return not isinstance(label, Outside)


@dataclass(frozen=True)
class WrapInstance:
    D: CayleyTable
    labeling: tuple[Label, ...]
    H: PartialTable
    designated: tuple[int, ...] | None = field(default=None)

    def preimages(self, h: int) -> list[int]:
        return [x for x, l in enumerate(self.labeling) if l == h and in_h(l)]

    def h_preimage(self) -> frozenset[int]:
        return frozenset(x for x, l in enumerate(self.labeling) if in_h(l))

    def designation(self) -> tuple[int, ...]:
        if self.designated is not None:
            return self.designated
        out = []
        for h in range(self.H.size):
            pre = self.preimages(h)
            if not pre:
                raise PreconditionFailed(f"{self.H.elements[h]} has no preimage")
            out.append(pre[0])
        return tuple(out)


def wrap_problems(wi: WrapInstance) -> list[str]:
    """Coverage and compatibility failures; empty means the wrap is valid."""
    H, D, lab = wi.H, wi.D, wi.labeling
    problems = []
    if len(lab) != D.order:
        return [f"labeling has {len(lab)} entries for {D.order} elements"]
    for x, l in enumerate(lab):
        if in_h(l) and not 0 <= l < H.size:
            problems.append(f"label {l} of {x} is not an element of H")
    if problems:
        return problems
    for h in range(H.size):
        if not wi.preimages(h):
            problems.append(f"{H.elements[h]} has no preimage")
    for x, lx in enumerate(lab):
        if not in_h(lx):
            continue
        for y, ly in enumerate(lab):
            if not in_h(ly):
                continue
            z = D.rows[x][y]
            lz = lab[z]
            want = H.product.get((lx, ly))
            if want is not None:
                if lz != want:
                    problems.append(f"{x}*{y}={z} labelled {lz!r}, expected {H.elements[want]}")
            elif H.is_out_of_set(lx, ly) and in_h(lz):
                problems.append(f"{x}*{y}={z} labelled {H.elements[lz]}, expected outside H")
    if wi.designated is not None:
        for h, x in enumerate(wi.designated):
            if lab[x] != h or not in_h(lab[x]):
                problems.append(f"designated preimage {x} of {H.elements[h]} is labelled {lab[x]!r}")
    return problems


def wrap_verify(wi: WrapInstance) -> bool:
    return not wrap_problems(wi)


def wrap_search(pt: PartialTable, max_order: int, *, bounds=DEFAULT_BOUNDS) -> Witnessed | Exhausted:
    """Search D (up to isomorphism, ascending order) and labelings D -> H ∪ {outside}."""
    if pt.ambient is None:
        raise UndecidedEquality("wrap search needs ambient products")
    if max_order > bounds.iso_order:
        raise BoundExceeded(f"order {max_order} over bound {bounds.iso_order}")
    t = pt.size
    out_of_set = {(i, j): pt.is_out_of_set(i, j) for i in range(t) for j in range(t)}
    OUT = t
    tried = 0
    for m in range(1, max_order + 1):
        for D in semigroups_of_order(m, ISO):
            tried += 1
            if m < t:
                continue
            lab = _find_labeling(D, pt, out_of_set, OUT)
            if lab is not None:
                labeling = tuple(
                    l if l != OUT else _forced_outside(D, lab, x, pt, OUT) for x, l in enumerate(lab)
                )
                return Witnessed(WrapInstance(D, labeling, pt), tried)
    return Exhausted({"kind": "orders", "max_order": max_order, "mode": ISO}, tried)


def _forced_outside(D, lab, x, pt, OUT) -> Outside:
    for a in range(D.order):
        for b in range(D.order):
            if D.rows[a][b] == x and lab[a] != OUT and lab[b] != OUT:
                return Outside(pt.ambient[(lab[a], lab[b])])
    return BOTTOM


def _find_labeling(D: CayleyTable, pt: PartialTable, out_of_set, OUT) -> list[int] | None:
    m, t = D.order, pt.size
    rows = D.rows
    lab = [-1] * m
    count = [0] * t

    def ok(e):
        for x in range(e + 1):
            lx = lab[x]
            for y in range(e + 1):
                ly = lab[y]
                z = rows[x][y]
                if z > e or (x != e and y != e and z != e):
                    continue
                if lx == OUT or ly == OUT:
                    continue
                want = pt.product.get((lx, ly))
                lz = lab[z]
                if want is not None:
                    if lz != want:
                        return False
                elif lz != OUT:
                    return False
        return True

    def rec(e, missing):
        if missing > m - e:
            return False
        if e == m:
            return missing == 0
        for l in list(range(t)) + [OUT]:
            lab[e] = l
            if ok(e):
                newly = 0
                if l != OUT:
                    newly = count[l] == 0
                    count[l] += 1
                if rec(e + 1, missing - newly):
                    return True
                if l != OUT:
                    count[l] -= 1
        lab[e] = -1
        return False

    return lab if rec(0, t) else None


def accurate_set(wi: WrapInstance, designated: Sequence[int] | None = None) -> frozenset[int]:
    """Least set holding the designated preimages, closed under products that land in H's preimage."""
    if designated is None:
        designated = wi.designation()
    for h, x in enumerate(designated):
        if wi.labeling[x] != h or not in_h(wi.labeling[x]):
            raise PreconditionFailed(f"{x} is not a preimage of {wi.H.elements[h]}")
    rows, lab = wi.D.rows, wi.labeling
    acc = set(designated)
    frontier = list(acc)
    while frontier:
        new = []
        current = list(acc)
        for u in frontier:
            for v in current:
                for z in (rows[u][v], rows[v][u]):
                    if in_h(lab[z]) and z not in acc:
                        acc.add(z)
                        new.append(z)
        frontier = new
    return frozenset(acc)


def tighten_trace(wi: WrapInstance, designated: Sequence[int] | None = None,
                  sink: Outside = BOTTOM) -> list[WrapInstance]:
    """Successive relabelings of non-accurate preimages to ``sink``, ending at the fixpoint."""
    if not wrap_verify(wi):
        raise PreconditionFailed("not a valid wrap: " + "; ".join(wrap_problems(wi)[:3]))
    if sink.word is not None and sink.word in wi.H.elements:
        raise PreconditionFailed(f"sink {sink.word!r} lies in H")
    designated = tuple(designated) if designated is not None else wi.designation()
    wi = replace(wi, designated=designated)
    trace = [wi]
    while True:
        acc = accurate_set(wi, designated)
        junk = wi.h_preimage() - acc
        if not junk:
            return trace
        labeling = tuple(sink if x in junk else l for x, l in enumerate(wi.labeling))
        wi = replace(wi, labeling=labeling)
        trace.append(wi)


def tighten(wi: WrapInstance, designated: Sequence[int] | None = None,
            sink: Outside = BOTTOM) -> WrapInstance:
    return tighten_trace(wi, designated, sink)[-1]


def is_accurate_tight(wi: WrapInstance, designated: Sequence[int] | None = None) -> bool:
    return accurate_set(wi, designated) == wi.h_preimage()


def designations(wi: WrapInstance, cap: int = 100_000) -> Iterator[tuple[int, ...]]:
    """Every choice of one preimage per element of H (BoundExceeded past ``cap``)."""
    pools = [wi.preimages(h) for h in range(wi.H.size)]
    total = 1
    for p in pools:
        total *= len(p)
    if total > cap:
        raise BoundExceeded(f"{total} designations exceed cap {cap}")
    return itertools.product(*pools)


def is_tight(wi: WrapInstance, cap: int = 100_000) -> bool:
    """Accurate products generate the whole preimage of H for every designation."""
    target = wi.h_preimage()
    return all(accurate_set(wi, d) == target for d in designations(wi, cap))


def tighten_all(wi: WrapInstance, sink: Outside = BOTTOM, cap: int = 100_000) -> WrapInstance:
    """Tighten against successive designations until :func:`is_tight` holds."""
    wi = replace(wi, designated=None)
    while True:
        target = wi.h_preimage()
        for d in designations(wi, cap):
            if accurate_set(wi, d) != target:
                wi = replace(tighten(wi, d, sink), designated=None)
                break
        else:
            return wi


# --- wrap constructions --------------------------------------------------------------

def self_wrap(table: CayleyTable, subset: Sequence[int] | None = None) -> WrapInstance:
    """D = S, each element labelled by itself (outside labels for elements not in ``subset``)."""
    subset = list(range(table.order)) if subset is None else [int(s) for s in subset]
    pt = induce(table, subset)
    where = {e: i for i, e in enumerate(subset)}
    labeling = tuple(where[x] if x in where else Outside(str(x)) for x in range(table.order))
    return WrapInstance(table, labeling, pt)


def wrap_from_embedding(h_table: PartialTable, k_table: PartialTable,
                        witness: EmbeddingWitness) -> WrapInstance:
    """Wrap of H read off an embedding of K ⊇ H ∪ H².

    D is the embedding's target; a D-element is labelled by x when it is the
    image of x ∈ K, and by the sink otherwise.
    """
    if not verify_embedding(k_table, witness):
        raise PreconditionFailed("witness does not embed K")
    h_names = set(h_table.elements)
    missing = h_names - set(k_table.elements)
    if missing:
        raise PreconditionFailed(f"K lacks {sorted(missing)}")
    if h_table.ambient is not None:
        squares = {w for w in h_table.ambient.values()} - set(k_table.elements)
        if squares:
            raise PreconditionFailed(f"K lacks products {sorted(squares)}")
    image = {v: k_table.elements[x] for x, v in enumerate(witness.assignment)}
    labeling = []
    for d in range(witness.target.order):
        name = image.get(d)
        if name is None:
            labeling.append(BOTTOM)
        elif name in h_names:
            labeling.append(h_table.index(name))
        else:
            labeling.append(Outside(name))
    return WrapInstance(witness.target, tuple(labeling), h_table)


def square_closure(table: CayleyTable, subset: Sequence[int]) -> list[int]:
    """H ∪ H² in first-appearance order."""
    out = list(dict.fromkeys(int(s) for s in subset))
    seen = set(out)
    for x in list(out):
        for y in list(subset):
            z = table.rows[x][int(y)]
            if z not in seen:
                seen.add(z)
                out.append(z)
    return out


def finite_lef_wrap(table: CayleyTable, subset: Sequence[int], *,
                    search: bool = False) -> WrapInstance:
    """Embedding-to-wrap construction for a finite S.

    K = H ∪ H² embeds in S by inclusion; with ``search=True`` the embedding is
    the least one found by :func:`embed_search` among semigroups of order |S|.
    """
    subset = [int(s) for s in subset]
    k = square_closure(table, subset)
    k_pt = induce(table, k)
    if search:
        found = embed_search(k_pt, OrderSpace(table.order))
        if not isinstance(found, Witnessed):
            raise AssertionError("a subset of a finite semigroup must embed")
        witness = found.witness
    else:
        witness = EmbeddingWitness(table, tuple(k))
    return wrap_from_embedding(induce(table, subset), k_pt, witness)


def projection_wrap(table: CayleyTable, other: CayleyTable,
                    subset: Sequence[int] | None = None) -> WrapInstance:
    """D = S × C labelled by the first coordinate; every element of C gives a copy."""
    subset = list(range(table.order)) if subset is None else [int(s) for s in subset]
    pt = induce(table, subset)
    where = {e: i for i, e in enumerate(subset)}
    m = other.order
    labeling = []
    for x in range(table.order * m):
        a = x // m
        labeling.append(where[a] if a in where else Outside(str(a)))
    return WrapInstance(direct_product(table, other), tuple(labeling), pt)
