"""Inverse semigroups: partial bijections, Wagner-Preston, the lift of an
embedding into transformations to partial bijections, symmetrised sets, and
checks on wraps by finite inverse semigroups.

Partial bijections act on the right like :class:`~lefkit.finite.Transformation`:
``compose_pb(f, g)`` applies f first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .config import DEFAULT_BOUNDS
from .errors import (BoundExceeded, EmptyPreimage, MalformedTable, PreconditionFailed,
                     UniverseMismatch)
from .finite import (CayleyTable, Transformation, idempotent_power, idempotent_set, mask_of,
                     power_semigroup, subset_mask_product)
from .partial import WrapInstance, in_h, is_tight


# --- partial bijections ---------------------------------------------------------

@dataclass(frozen=True)
class PartialBijection:
    universe: int
    images: tuple[int | None, ...]

    def __post_init__(self):
        if len(self.images) != self.universe:
            raise MalformedTable(f"{len(self.images)} images for universe {self.universe}")
        seen = set()
        for v in self.images:
            if v is None:
                continue
            if not 0 <= v < self.universe:
                raise MalformedTable(f"image {v} outside universe {self.universe}")
            if v in seen:
                raise MalformedTable(f"{v} has two preimages")
            seen.add(v)

    @classmethod
    def from_map(cls, universe: int, mapping: Mapping[int, int]) -> "PartialBijection":
        images = [None] * universe
        for k, v in mapping.items():
            images[int(k)] = int(v)
        return cls(universe, tuple(images))

    @classmethod
    def identity(cls, universe: int, points=None) -> "PartialBijection":
        points = range(universe) if points is None else set(points)
        return cls(universe, tuple(p if p in points else None for p in range(universe)))

    def domain(self) -> frozenset[int]:
        return frozenset(p for p, v in enumerate(self.images) if v is not None)

    def range(self) -> frozenset[int]:
        return frozenset(v for v in self.images if v is not None)

    def rank(self) -> int:
        return len(self.domain())

    def as_map(self) -> dict[int, int]:
        return {p: v for p, v in enumerate(self.images) if v is not None}

    def is_partial_identity(self) -> bool:
        return all(v is None or v == p for p, v in enumerate(self.images))

    def __repr__(self):
        return f"PB{self.universe}{self.as_map()}"


def compose_pb(f: PartialBijection, g: PartialBijection) -> PartialBijection:
    """f then g, defined on {d : f(d) in dom g}."""
    if f.universe != g.universe:
        raise UniverseMismatch(f"universes {f.universe} and {g.universe}")
    gi = g.images
    return PartialBijection(f.universe, tuple(None if v is None else gi[v] for v in f.images))


def invert_pb(f: PartialBijection) -> PartialBijection:
    images = [None] * f.universe
    for p, v in f.as_map().items():
        images[v] = p
    return PartialBijection(f.universe, tuple(images))


def restricts(f: PartialBijection, g: PartialBijection) -> bool:
    """f <= g in the natural order: f is a restriction of g."""
    if f.universe != g.universe:
        raise UniverseMismatch(f"universes {f.universe} and {g.universe}")
    return all(v is None or g.images[p] == v for p, v in enumerate(f.images))


def _pb_key(f: PartialBijection):
    return (f.rank(), tuple(-1 if v is None else v for v in f.images))


# --- inverse tables -------------------------------------------------------------

@dataclass(frozen=True)
class InverseTable:
    cayley: CayleyTable
    inv: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.cayley.order

    def mul(self, *xs: int) -> int:
        return self.cayley.mul(*xs)

    def idempotents(self) -> frozenset[int]:
        return idempotent_set(self.cayley)

    def leq(self, x: int, y: int) -> bool:
        """Natural partial order: x = (x x^-1) y."""
        r = self.cayley.rows
        return x == r[r[x][self.inv[x]]][y]


@dataclass(frozen=True)
class NotInverse:
    element: int
    partners: tuple[int, ...]


def inverse_partners(table: CayleyTable, x: int) -> tuple[int, ...]:
    r = table.rows
    return tuple(y for y in range(table.order) if r[r[x][y]][x] == x and r[r[y][x]][y] == y)


def inverse_structure(table: CayleyTable) -> InverseTable | NotInverse:
    """The inverse of each element if every element has exactly one, else a witness."""
    inv = []
    for x in range(table.order):
        ps = inverse_partners(table, x)
        if len(ps) != 1:
            return NotInverse(x, ps)
        inv.append(ps[0])
    return InverseTable(table, tuple(inv))


def as_inverse(table: CayleyTable) -> InverseTable:
    it = inverse_structure(table)
    if isinstance(it, NotInverse):
        raise PreconditionFailed(f"not inverse: element {it.element} has partners {it.partners}")
    return it


def leq_natural(x, y, it: InverseTable | None = None) -> bool:
    """Natural order on partial bijections (restriction) or on elements of ``it``."""
    if isinstance(x, PartialBijection):
        return restricts(x, y)
    if it is None:
        raise TypeError("element comparison needs an InverseTable")
    return it.leq(x, y)


@dataclass(frozen=True)
class PBSemigroup:
    """A semigroup of partial bijections with its table."""
    elements: tuple[PartialBijection, ...]
    table: InverseTable

    def index(self, f: PartialBijection) -> int:
        return self.elements.index(f)


def pb_semigroup(elements: Sequence[PartialBijection]) -> PBSemigroup:
    """Table of a composition-closed, inverse-closed set of partial bijections."""
    elements = tuple(sorted(set(elements), key=_pb_key))
    where = {f: i for i, f in enumerate(elements)}
    rows = []
    for f in elements:
        row = []
        for g in elements:
            h = compose_pb(f, g)
            if h not in where:
                raise MalformedTable(f"{f} then {g} = {h} is not listed")
            row.append(where[h])
        rows.append(tuple(row))
    cayley = CayleyTable(tuple(rows))
    inv = []
    for f in elements:
        g = invert_pb(f)
        if g not in where:
            raise MalformedTable(f"inverse of {f} is not listed")
        inv.append(where[g])
    return PBSemigroup(elements, InverseTable(cayley, tuple(inv)))


def pb_closure(generators: Sequence[PartialBijection], cap: int = 100_000) -> PBSemigroup:
    """Inverse subsemigroup generated by ``generators``."""
    seen = set(generators) | {invert_pb(g) for g in generators}
    gens = list(seen)
    frontier = list(seen)
    while frontier:
        new = []
        for f in frontier:
            for g in gens:
                h = compose_pb(f, g)
                if h not in seen:
                    seen.add(h)
                    new.append(h)
        if len(seen) > cap:
            raise BoundExceeded(f"closure exceeds {cap}")
        frontier = new
    return pb_semigroup(seen)


def symmetric_inverse_monoid(n: int) -> PBSemigroup:
    """All partial bijections of {0..n-1}; ordered by rank, then images."""
    pbs = []
    for images in itertools.product([None] + list(range(n)), repeat=n):
        vals = [v for v in images if v is not None]
        if len(vals) == len(set(vals)):
            pbs.append(PartialBijection(n, images))
    return pb_semigroup(pbs)


def brandt_b2() -> PBSemigroup:
    """2x2 matrix units and zero: the rank <= 1 partial bijections of two points."""
    return pb_semigroup([f for f in symmetric_inverse_monoid(2).elements if f.rank() <= 1])


# --- Wagner-Preston ---------------------------------------------------------------

@dataclass
class WagnerPrestonReport:
    images: list[PartialBijection]
    injective: bool
    multiplicative: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.injective and self.multiplicative


def wagner_preston(it: InverseTable) -> WagnerPrestonReport:
    """a -> (x -> x a) on {x : x a a^-1 = x}, with the monomorphism checked."""
    n, r, inv = it.order, it.cayley.rows, it.inv
    images = []
    for a in range(n):
        e = r[a][inv[a]]
        images.append(PartialBijection(n, tuple(r[x][a] if r[x][e] == x else None
                                                for x in range(n))))
    failures = []
    injective = len(set(images)) == n
    if not injective:
        failures.append(("injective", [a for a in range(n) if images.count(images[a]) > 1]))
    multiplicative = True
    for a, b in itertools.product(range(n), repeat=2):
        if compose_pb(images[a], images[b]) != images[r[a][b]]:
            multiplicative = False
            failures.append(("multiplicative", (a, b)))
    return WagnerPrestonReport(images, injective, multiplicative, failures)


# --- symmetrised sets ----------------------------------------------------------------

ELEMENTWISE = "elementwise"
SETWISE = "setwise"


def symmetrise(H: Sequence[int], it: InverseTable, reading: str = ELEMENTWISE) -> tuple[int, ...]:
    """H ∪ H^-1 ∪ HH^-1 ∪ H^-1H in first-appearance order.

    ``elementwise`` reads HH^-1 as {h h^-1}; ``setwise`` as {h k^-1 : h, k in H}.
    """
    inv, mul = it.inv, it.cayley.rows
    H = [int(h) for h in H]
    out = list(H) + [inv[h] for h in H]
    if reading == ELEMENTWISE:
        out += [mul[h][inv[h]] for h in H] + [mul[inv[h]][h] for h in H]
    elif reading == SETWISE:
        out += [mul[h][inv[k]] for h in H for k in H] + [mul[inv[h]][k] for h in H for k in H]
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return tuple(dict.fromkeys(out))


def symmetrised_problems(K: Sequence[int], it: InverseTable,
                         reading: str = ELEMENTWISE) -> list[tuple[str, tuple]]:
    """Failures of K = K^-1, K ⊇ KK^-1, K ⊇ K^-1K under the given reading."""
    inv, mul = it.inv, it.cayley.rows
    ks = set(int(k) for k in K)
    problems = [("inverse", (k,)) for k in sorted(ks) if inv[k] not in ks]
    if reading == ELEMENTWISE:
        pairs = [(k, k) for k in sorted(ks)]
    elif reading == SETWISE:
        pairs = list(itertools.product(sorted(ks), repeat=2))
    else:
        raise ValueError(f"unknown reading {reading!r}")
    for x, y in pairs:
        if mul[x][inv[y]] not in ks:
            problems.append(("right", (x, y)))
        if mul[inv[x]][y] not in ks:
            problems.append(("left", (x, y)))
    return problems


def is_symmetrised(K: Sequence[int], it: InverseTable, reading: str = ELEMENTWISE) -> bool:
    return not symmetrised_problems(K, it, reading)


def symmetric_closure(H: Sequence[int], it: InverseTable, reading: str = SETWISE,
                      cap: int = 10_000) -> tuple[int, ...]:
    """Iterate the one-shot recipe until the result is symmetrised."""
    K = tuple(dict.fromkeys(int(h) for h in H))
    while not is_symmetrised(K, it, reading):
        K = tuple(dict.fromkeys(K + symmetrise(K, it, reading)))
        if len(K) > cap:
            raise BoundExceeded(f"closure exceeds {cap}")
    return K


def products_cubed(K: Sequence[int], it: InverseTable) -> frozenset[int]:
    """K^3 = {xyz : x, y, z in K}."""
    r = it.cayley.rows
    two = {r[x][y] for x in K for y in K}
    return frozenset(r[w][z] for w in two for z in K)


# --- lifting a map into transformations to partial bijections ----------------------------

@dataclass
class LiftReport:
    lift: dict[int, PartialBijection]
    violations: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())


def ilef_lift(it: InverseTable, K: Sequence[int],
              f: Mapping[int, Transformation]) -> LiftReport:
    """Restrict each x f to the image of x^-1 f.

    ``f`` must be injective and multiplicative on K^3 (checked first,
    PreconditionFailed otherwise).  The report checks that every restriction
    is a bijection onto Im(x f), idempotents become partial identities, and the
    lift is injective on K, multiplicative on K and respects inverses.
    """
    K = [int(k) for k in dict.fromkeys(K)]
    r, inv = it.cayley.rows, it.inv
    if any(inv[k] not in K for k in K):
        raise PreconditionFailed("K is not closed under inverses")
    cube = products_cubed(K, it)
    missing = sorted(cube - set(f))
    if missing:
        raise PreconditionFailed(f"f undefined on {missing} of K^3")
    if len({f[x] for x in cube}) != len(cube):
        raise PreconditionFailed("f is not injective on K^3")
    if len({f[x].degree for x in cube}) != 1:
        raise PreconditionFailed("transformations of different degrees")
    for x, y in itertools.product(sorted(cube), repeat=2):
        z = r[x][y]
        if z in cube and f[x] * f[y] != f[z]:
            raise PreconditionFailed(f"f not multiplicative at ({x}, {y})")

    degree = f[K[0]].degree
    lift, v = {}, {"bijection": [], "idempotent": [], "injective": [], "multiplicative": [],
                   "inverse": []}
    for x in K:
        dom = f[inv[x]].image()
        images = tuple(f[x](p) if p in dom else None for p in range(degree))
        try:
            pb = PartialBijection(degree, images)
        except MalformedTable:
            v["bijection"].append(x)
            continue
        if pb.range() != f[x].image():
            v["bijection"].append(x)
        lift[x] = pb
        if r[x][x] == x and not (pb.is_partial_identity() and pb.domain() == f[x].image()):
            v["idempotent"].append(x)
    done = [x for x in K if x in lift]
    for x, y in itertools.combinations(done, 2):
        if lift[x] == lift[y]:
            v["injective"].append((x, y))
    for x, y in itertools.product(done, repeat=2):
        z = r[x][y]
        if z in lift and compose_pb(lift[x], lift[y]) != lift[z]:
            v["multiplicative"].append((x, y))
    for x in done:
        if inv[x] in lift and invert_pb(lift[x]) != lift[inv[x]]:
            v["inverse"].append(x)
    return LiftReport(lift, v)


def regular_map(it: InverseTable) -> dict[int, Transformation]:
    """x -> right translation by x on S with an identity adjoined (degree |S| + 1)."""
    n, r = it.order, it.cayley.rows
    return {a: Transformation(tuple(r[x][a] for x in range(n)) + (a,)) for a in range(n)}


# --- wraps by finite inverse semigroups ------------------------------------------------

@dataclass(frozen=True)
class InverseWrap:
    """A wrap whose D is inverse and whose H is a subset K of an inverse ambient.

    Element names of K are ambient indices (as produced by inducing from a table).
    """
    wi: WrapInstance
    ambient: InverseTable
    D: InverseTable
    k_elems: tuple[int, ...]     # ambient index of each label
    k_inv: tuple[int, ...]       # label of the inverse of each label

    def label(self, x: int):
        return self.wi.labeling[x]

    def preimages(self, h: int) -> list[int]:
        return self.wi.preimages(h)

    def k_label(self, s: int) -> int | None:
        try:
            return self.k_elems.index(s)
        except ValueError:
            return None


def inverse_wrap(wi: WrapInstance, ambient: InverseTable | CayleyTable) -> InverseWrap:
    if isinstance(ambient, CayleyTable):
        ambient = as_inverse(ambient)
    D = as_inverse(wi.D)
    try:
        k_elems = tuple(int(name) for name in wi.H.elements)
    except ValueError:
        raise PreconditionFailed("K must be named by ambient element indices") from None
    where = {s: h for h, s in enumerate(k_elems)}
    k_inv = []
    for s in k_elems:
        if ambient.inv[s] not in where:
            raise PreconditionFailed(f"K lacks the inverse of {s}")
        k_inv.append(where[ambient.inv[s]])
    return InverseWrap(wi, ambient, D, k_elems, tuple(k_inv))


@dataclass
class LemmaReport:
    checked: dict[str, int] = field(default_factory=dict)
    violations: dict[str, list] = field(default_factory=dict)

    def add(self, clause: str, ok: bool, witness=None):
        self.checked[clause] = self.checked.get(clause, 0) + 1
        self.violations.setdefault(clause, [])
        if not ok:
            self.violations[clause].append(witness)

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())


def check_wrap_inverse_compat(iw: InverseWrap) -> LemmaReport:
    """Preimages of K respect inverses, and the explicit inverse-preimage recipes work.

    - for every preimage w' of some k in K, the inverse of w' in D maps to k^-1;
    - for preimages x' of h and y' of h^-1 (h not idempotent) and n with
      (x'y')^n idempotent, u' = (x'y')^n x' and v' = y'(x'y')^(2n-1) map to h
      and h^-1 and are mutually inverse;
    - an idempotent h has the idempotent preimage z'^n for any preimage z'.
    """
    rep = LemmaReport()
    D, lab = iw.D, iw.wi.labeling
    r = D.cayley.rows
    for w in sorted(iw.wi.h_preimage()):
        h = lab[w]
        rep.add("inverse-preimage", lab[D.inv[w]] == iw.k_inv[h], (w, D.inv[w]))
    amb = iw.ambient
    for h, s in enumerate(iw.k_elems):
        if amb.cayley.rows[s][s] == s:
            for z in iw.preimages(h):
                zn = D.cayley.power(z, idempotent_power(D.cayley, z))
                rep.add("idempotent-preimage", lab[zn] == h and r[zn][zn] == zn, (h, z))
            continue
        hi = iw.k_inv[h]
        for x, y in itertools.product(iw.preimages(h), iw.preimages(hi)):
            xy = r[x][y]
            n = idempotent_power(D.cayley, xy)
            u = r[D.cayley.power(xy, n)][x]
            v = r[y][D.cayley.power(xy, 2 * n - 1)]
            ok = (lab[u] == h and lab[v] == hi and r[r[u][v]][u] == u and r[r[v][u]][v] == v)
            rep.add("recipe", ok, (h, x, y))
    return rep


def _kk_inv_label(iw: InverseWrap, h: int) -> int:
    s = iw.k_elems[h]
    e = iw.ambient.cayley.rows[s][iw.ambient.inv[s]]
    lab = iw.k_label(e)
    if lab is None:
        raise EmptyPreimage(f"{s}{s}^-1 = {e} is not in K")
    return lab


def is_h_minimal(iw: InverseWrap, h: int, x: int) -> bool:
    """x maps to h and x x^-1 lies below y y^-1 for every preimage y of h."""
    D = iw.D
    r = D.cayley.rows
    if iw.label(x) != h:
        return False
    ex = r[x][D.inv[x]]
    return all(D.leq(ex, r[y][D.inv[y]]) for y in iw.preimages(h))


def h_minimal(iw: InverseWrap, h: int) -> int:
    """e'h' with e' the product of all preimages of hh^-1 and h' the least preimage of h."""
    pre_h = iw.preimages(h)
    if not pre_h:
        raise EmptyPreimage(f"{iw.wi.H.elements[h]} has no preimage")
    pre_e = iw.preimages(_kk_inv_label(iw, h))
    if not pre_e:
        raise EmptyPreimage(f"no preimage of {iw.wi.H.elements[h]} times its inverse")
    e = iw.D.mul(*pre_e) if len(pre_e) > 1 else pre_e[0]
    x = iw.D.cayley.rows[e][pre_h[0]]
    if not is_h_minimal(iw, h, x):
        raise PreconditionFailed(f"{x} is not minimal for {iw.wi.H.elements[h]}; is the wrap tight?")
    return x


def check_hmin_lemmas(iw: InverseWrap) -> LemmaReport:
    """Minimal preimages behave under inverses and products, idempotents lift uniquely.

    Clauses: the product e' of all preimages of hh^-1 is itself such a
    preimage; e'h' is h-minimal; its inverse is h^-1-minimal; h'h'^-1 is
    hh^-1-minimal and h'^-1h' is h^-1h-minimal; each idempotent of K has
    exactly one idempotent preimage.
    """
    rep = LemmaReport()
    D, amb = iw.D, iw.ambient
    r, ar = D.cayley.rows, amb.cayley.rows
    for h, s in enumerate(iw.k_elems):
        eh = _kk_inv_label(iw, h)
        pre_e = iw.preimages(eh)
        e = D.mul(*pre_e) if len(pre_e) > 1 else pre_e[0]
        rep.add("product-of-preimages", iw.label(e) == eh, (h, e))
        x = r[e][iw.preimages(h)[0]]
        rep.add("minimal-exists", is_h_minimal(iw, h, x), (h, x))
        xi = D.inv[x]
        rep.add("inverse-minimal", is_h_minimal(iw, iw.k_inv[h], xi), (h, x))
        rep.add("right-idempotent-minimal", is_h_minimal(iw, eh, r[x][xi]), (h, x))
        fh = iw.k_label(ar[amb.inv[s]][s])
        rep.add("left-idempotent-minimal", fh is not None and is_h_minimal(iw, fh, r[xi][x]),
                (h, x))
        if ar[s][s] == s:
            idem = [y for y in iw.preimages(h) if r[y][y] == y]
            rep.add("unique-idempotent", len(idem) == 1, (h, idem))
    return rep


@dataclass
class IlefResult:
    masks: dict[int, int]                 # label -> subset of D as a bitmask
    power: CayleyTable | None             # power semigroup of D (subset X has index X-1)
    injective: bool
    multiplicative: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.injective and self.multiplicative

    def image(self, h: int) -> int:
        """Element of the power semigroup table assigned to label h."""
        return self.masks[h] - 1


def ilef_from_wrap(iw: InverseWrap, H: Sequence[int] | None = None, *,
                   materialize: bool | None = None, bounds=DEFAULT_BOUNDS) -> IlefResult:
    """h -> (preimages of h) M in the power semigroup of D, M = preimages of idempotents.

    ``H`` lists labels (default: all of K).  Products are computed on subset
    bitmasks; the power semigroup table is built when |D| is within the power
    bound (or forced with ``materialize=True``) and then used as a second
    route for the multiplicativity check.
    """
    amb = iw.ambient
    idem = amb.idempotents()
    missing = sorted(idem - set(iw.k_elems))
    if missing:
        raise PreconditionFailed(f"idempotents {missing} of the ambient are not in K")
    if not is_tight(iw.wi):
        raise PreconditionFailed("wrap is not tight")
    D = iw.D.cayley
    if materialize is None:
        materialize = D.order <= bounds.power_order
    if materialize and D.order > bounds.power_order:
        raise BoundExceeded(f"power semigroup of order-{D.order} D exceeds {bounds.power_order}")
    H = list(range(len(iw.k_elems))) if H is None else [int(h) for h in H]
    M = mask_of(x for x, l in enumerate(iw.wi.labeling) if in_h(l) and iw.k_elems[l] in idem)
    masks = {h: subset_mask_product(D, mask_of(iw.preimages(h)), M) for h in H}
    failures = []
    injective = len(set(masks.values())) == len(H)
    if not injective:
        failures.append(("injective", sorted(masks.items(), key=lambda kv: kv[1])))
    power = power_semigroup(D, limit=bounds.power_order) if materialize else None
    multiplicative = True
    ar = amb.cayley.rows
    for hi, hj in itertools.product(H, repeat=2):
        k = iw.k_label(ar[iw.k_elems[hi]][iw.k_elems[hj]])
        if k is None or k not in masks:
            continue
        prod = subset_mask_product(D, masks[hi], masks[hj])
        ok = prod == masks[k]
        if power is not None:
            ok = ok and power.rows[masks[hi] - 1][masks[hj] - 1] == masks[k] - 1
        if not ok:
            multiplicative = False
            failures.append(("multiplicative", (hi, hj, k)))
    return IlefResult(masks, power, injective, multiplicative, failures)
