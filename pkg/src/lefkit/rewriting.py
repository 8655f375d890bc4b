"""Words, string rewriting, critical pairs and the presented semigroups.

Words are plain ``str`` over single-character symbols.  In a monoid
presentation the empty word is the identity and is written ``"1"`` at the
boundaries (parsing/printing); internally it is ``""``.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

from .errors import AlphabetError, NotTerminating, ParseError, StepCapExceeded

MONOID = "monoid"
SEMIGROUP = "semigroup"
IDENTITY = "1"


@dataclass(frozen=True)
class RewritingSystem:
    alphabet: tuple[str, ...]
    rules: tuple[tuple[str, str], ...]
    kind: str = SEMIGROUP
    name: str = ""

    def __post_init__(self):
        if self.kind not in (MONOID, SEMIGROUP):
            raise ValueError(f"kind must be {MONOID!r} or {SEMIGROUP!r}")
        for s in self.alphabet:
            if len(s) != 1:
                raise AlphabetError(f"symbol {s!r} is not a single character")
        if IDENTITY in self.alphabet:
            raise AlphabetError(f"{IDENTITY!r} is reserved for the identity")
        for lhs, rhs in self.rules:
            if not lhs:
                raise ValueError("rule with empty left-hand side")
            if not rhs and self.kind == SEMIGROUP:
                raise ValueError(f"semigroup rule {lhs}->1 would create an empty word")
            self.check_word(lhs)
            self.check_word(rhs, allow_empty=True)

    @classmethod
    def make(cls, alphabet, rules, kind=SEMIGROUP, name=""):
        return cls(tuple(alphabet), tuple((parse_word(l), parse_word(r)) for l, r in rules),
                   kind, name)

    def check_word(self, w: str, allow_empty: bool | None = None) -> str:
        if allow_empty is None:
            allow_empty = self.kind == MONOID
        if not w and not allow_empty:
            raise AlphabetError("empty word is not an element of a semigroup")
        for ch in w:
            if ch not in self.alphabet:
                raise AlphabetError(f"symbol {ch!r} not in alphabet {self.alphabet}")
        return w

    def word(self, text: str) -> str:
        return self.check_word(parse_word(text))


def parse_word(text: str) -> str:
    return "" if text == IDENTITY else text


def show_word(w: str) -> str:
    return w if w else IDENTITY


def power_word(*blocks: tuple[str, int]) -> str:
    """Concatenate ``block * exponent`` pieces, e.g. ``power_word(("ba", 1), ("ab", 3))``."""
    return "".join(block * k for block, k in blocks)


# --- presentations ------------------------------------------------------------

def bicyclic() -> RewritingSystem:
    return RewritingSystem(("a", "b"), (("ab", ""),), MONOID, "B")


def aab_semigroup() -> RewritingSystem:
    return RewritingSystem(("a", "b"), (("aab", "a"),), SEMIGROUP, "A")


def baab_semigroup() -> RewritingSystem:
    return RewritingSystem(("a", "b"), (("baab", "ba"),), SEMIGROUP, "T")


def tn_semigroup(n: int) -> RewritingSystem:
    """Sg<a,b | (ba)(ab)^n = (ba)^n>, oriented to shorten words."""
    if n < 1:
        raise ValueError("n must be positive")
    lhs = power_word(("ba", 1), ("ab", n))
    return RewritingSystem(("a", "b"), ((lhs, "ba" * n),), SEMIGROUP, f"T_{n}")


def abab_monoid() -> RewritingSystem:
    return RewritingSystem(("a", "b"), (("abab", ""), ("baba", "")), MONOID, "S_abab")


def free_semigroup(alphabet: Sequence[str] = ("a", "b")) -> RewritingSystem:
    return RewritingSystem(tuple(alphabet), (), SEMIGROUP, "free")


def presentation(name: str, n: int | None = None) -> RewritingSystem:
    """Registry lookup: ``B``, ``A``, ``T``, ``T_n`` (or ``T2``, ``T_3``...), ``S_abab``, ``free``."""
    fixed = {"B": bicyclic, "A": aab_semigroup, "T": baab_semigroup,
             "S_abab": abab_monoid, "free": free_semigroup}
    if name in fixed:
        return fixed[name]()
    m = re.fullmatch(r"T_?(\d+)?|T_n", name)
    if m:
        k = m.group(1)
        if k is None:
            if n is None:
                raise ValueError("T_n needs n")
            k = n
        return tn_semigroup(int(k))
    raise KeyError(f"unknown presentation {name!r}")


PRESENTATION_NAMES = ("B", "A", "T", "T_n", "S_abab", "free")


# --- reduction ---------------------------------------------------------------

def is_length_reducing(rs: RewritingSystem) -> bool:
    return all(len(l) > len(r) for l, r in rs.rules)


def _leftmost_redex(w: str, rules) -> tuple[int, int] | None:
    best = None
    for idx, (lhs, _) in enumerate(rules):
        p = w.find(lhs)
        if p >= 0 and (best is None or p < best[0]):
            best = (p, idx)
    return best


def rewrite_once(w: str, rs: RewritingSystem) -> str | None:
    hit = _leftmost_redex(w, rs.rules)
    if hit is None:
        return None
    p, idx = hit
    lhs, rhs = rs.rules[idx]
    return w[:p] + rhs + w[p + len(lhs):]


def normal_form(w: str, rs: RewritingSystem, step_cap: int | None = None) -> str:
    """Rewrite at the leftmost redex (lowest rule index on ties) until irreducible."""
    if step_cap is None:
        if not is_length_reducing(rs):
            raise NotTerminating(f"{rs.name or 'system'} is not length-reducing; give step_cap")
        return _nf_cached(w, rs)
    steps = 0
    while True:
        nxt = rewrite_once(w, rs)
        if nxt is None:
            return w
        steps += 1
        if steps > step_cap:
            raise StepCapExceeded(f"no normal form within {step_cap} steps")
        w = nxt


@lru_cache(maxsize=1 << 16)
def _nf_cached(w: str, rs: RewritingSystem) -> str:
    while True:
        nxt = rewrite_once(w, rs)
        if nxt is None:
            return w
        w = nxt


def is_irreducible(w: str, rs: RewritingSystem) -> bool:
    return _leftmost_redex(w, rs.rules) is None


def irreducible_words(rs: RewritingSystem, max_len: int) -> Iterator[str]:
    """Irreducible words of length <= max_len, shortlex order."""
    if rs.kind == MONOID:
        yield ""
    lhss = [l for l, _ in rs.rules]
    layer = [""]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for s in rs.alphabet:
                v = w + s
                if not any(v.endswith(l) for l in lhss):
                    nxt.append(v)
        yield from nxt
        layer = nxt


class CriticalPair(NamedTuple):
    peak: str
    left: str
    right: str
    joinable: bool
    rules: tuple[int, int]


def critical_pairs(rs: RewritingSystem, step_cap: int | None = None) -> list[CriticalPair]:
    """All overlap and inclusion peaks between left-hand sides, with one-step reducts."""
    if step_cap is None and not is_length_reducing(rs):
        raise NotTerminating("joinability needs a terminating system or a step cap")
    out = []
    rules = rs.rules
    for i, (l1, r1) in enumerate(rules):
        for j, (l2, r2) in enumerate(rules):
            # proper suffix of l1 equal to a proper prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    peak = l1 + l2[k:]
                    out.append(_pair(peak, r1 + l2[k:], l1[:-k] + r2, (i, j), rs, step_cap))
            # l2 strictly inside l1 (or equal, for distinct rules)
            if i != j and len(l2) <= len(l1):
                p = l1.find(l2)
                while p >= 0:
                    out.append(_pair(l1, r1, l1[:p] + r2 + l1[p + len(l2):], (i, j), rs, step_cap))
                    p = l1.find(l2, p + 1)
    return out


def _pair(peak, left, right, ij, rs, step_cap):
    joinable = normal_form(left, rs, step_cap) == normal_form(right, rs, step_cap)
    return CriticalPair(peak, left, right, joinable, ij)


def is_locally_confluent(rs: RewritingSystem, step_cap: int | None = None) -> bool:
    return all(cp.joinable for cp in critical_pairs(rs, step_cap))


def is_complete(rs: RewritingSystem) -> bool:
    return is_length_reducing(rs) and is_locally_confluent(rs)


# --- bidirectional search ---------------------------------------------------------

class Step(NamedTuple):
    rule: int
    forward: bool
    position: int
    word: str          # word after the step


@dataclass(frozen=True)
class Equal:
    path: tuple[Step, ...]


@dataclass(frozen=True)
class Unknown:
    visited: int
    exhausted: bool    # True when every word within the length cap was reached


def neighbours(w: str, rs: RewritingSystem, max_len: int) -> Iterator[Step]:
    for idx, (lhs, rhs) in enumerate(rs.rules):
        for src, dst, forward in ((lhs, rhs, True), (rhs, lhs, False)):
            if len(w) - len(src) + len(dst) > max_len:
                continue
            if src:
                p = w.find(src)
                while p >= 0:
                    yield Step(idx, forward, p, w[:p] + dst + w[p + len(src):])
                    p = w.find(src, p + 1)
            else:
                for p in range(len(w) + 1):
                    yield Step(idx, forward, p, w[:p] + dst + w[p:])


def congruence_search(w1: str, w2: str, rs: RewritingSystem, max_len: int,
                      max_steps: int) -> Equal | Unknown:
    """Breadth-first search for a rewriting chain w1 -> w2 using rules both ways.

    Words longer than ``max(max_len, |w1|, |w2|)`` are never visited;
    ``max_steps`` caps the number of expanded words.  ``Unknown`` proves nothing
    about the semigroup beyond the explored region.
    """
    if max_len < 1 or max_steps < 1:
        raise ValueError("caps must be positive")
    if w1 == w2:
        return Equal(())
    cap = max(max_len, len(w1), len(w2))
    parent: dict[str, Step | None] = {w1: None}
    prev: dict[str, str] = {}
    queue = deque([w1])
    expanded = 0
    while queue:
        if expanded >= max_steps:
            return Unknown(len(parent), False)
        w = queue.popleft()
        expanded += 1
        for step in neighbours(w, rs, cap):
            v = step.word
            if v in parent or (not v and rs.kind == SEMIGROUP):
                continue
            parent[v] = step
            prev[v] = w
            if v == w2:
                path = []
                while v != w1:
                    path.append(parent[v])
                    v = prev[v]
                return Equal(tuple(reversed(path)))
            queue.append(v)
    return Unknown(len(parent), True)


def bounded_class(w: str, rs: RewritingSystem, max_len: int, max_steps: int
                  ) -> tuple[frozenset[str], bool]:
    """Words reachable from ``w`` through words of length <= max(max_len, |w|).

    The flag is True when the bounded region was fully traversed.
    """
    cap = max(max_len, len(w))
    seen = {w}
    queue = deque([w])
    expanded = 0
    while queue:
        if expanded >= max_steps:
            return frozenset(seen), False
        u = queue.popleft()
        expanded += 1
        for step in neighbours(u, rs, cap):
            v = step.word
            if v not in seen and (v or rs.kind == MONOID):
                seen.add(v)
                queue.append(v)
    return frozenset(seen), True


def random_path(w: str, rs: RewritingSystem, steps: int, rng: random.Random,
                max_len: int = 64) -> list[str]:
    """Random walk along single rewrites in either direction."""
    out = [w]
    for _ in range(steps):
        options = list(neighbours(w, rs, max_len))
        if not rs.kind == MONOID:
            options = [s for s in options if s.word]
        if not options:
            break
        w = rng.choice(options).word
        out.append(w)
    return out


# --- the bicyclic monoid -----------------------------------------------------------

class BicyclicNF(NamedTuple):
    i: int   # power of b
    j: int   # power of a


def bicyclic_nf(w: str) -> BicyclicNF:
    i = j = 0
    for ch in w:
        if ch == "a":
            j += 1
        elif ch == "b":
            if j:
                j -= 1
            else:
                i += 1
        else:
            raise AlphabetError(f"symbol {ch!r} not in {{a, b}}")
    return BicyclicNF(i, j)


def bicyclic_mul(x: BicyclicNF, y: BicyclicNF) -> BicyclicNF:
    m = min(x.j, y.i)
    return BicyclicNF(x.i + y.i - m, y.j + x.j - m)


def bicyclic_word(x: BicyclicNF) -> str:
    return "b" * x.i + "a" * x.j


# --- A = Sg<a,b | aab = a> -----------------------------------------------------------

class ANormalForm(NamedTuple):
    beta: tuple[int, ...]   # beta_0 >= 0, then beta_1..beta_n > 0
    alpha: int


_A_SHAPE = re.compile(r"(b*)((?:ab+)*)(a*)")


def eta(w: str) -> int:
    """#a - #b; invariant under aab <-> a."""
    return w.count("a") - w.count("b")


def a_nf(w: str) -> ANormalForm:
    if not w:
        raise AlphabetError("A has no empty word")
    aab_semigroup().check_word(w)
    irr = normal_form(w, aab_semigroup())
    m = _A_SHAPE.fullmatch(irr)
    if m is None:
        raise ParseError(f"irreducible word {irr!r} does not have the b^β0 (ab^β)* a^α shape")
    lead, middle, tail = m.groups()
    beta = [len(lead)] + [len(block) - 1 for block in re.findall(r"ab+", middle)]
    return ANormalForm(tuple(beta), len(tail))


def a_word(nf: ANormalForm) -> str:
    return "b" * nf.beta[0] + "".join("a" + "b" * k for k in nf.beta[1:]) + "a" * nf.alpha


def a_idempotent_scan(max_len: int) -> str | None:
    """First irreducible w (|w| <= max_len) with ww = w in A, or None."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    rs = aab_semigroup()
    for w in irreducible_words(rs, max_len):
        if normal_form(w + w, rs) == w:
            return w
    return None


# --- the a -> aab orbit ------------------------------------------------------------

def generate_orbit(seed: str, rule: tuple[str, str], cap_len: int) -> frozenset[str]:
    """Words reachable from ``seed`` by forward applications of ``rule``, length <= cap_len."""
    if cap_len < len(seed):
        raise ValueError("cap_len shorter than the seed")
    lhs, rhs = rule
    seen = {seed}
    queue = deque([seed])
    while queue:
        w = queue.popleft()
        if len(w) - len(lhs) + len(rhs) > cap_len:
            continue
        p = w.find(lhs)
        while p >= 0:
            v = w[:p] + rhs + w[p + len(lhs):]
            if v not in seen:
                seen.add(v)
                queue.append(v)
            p = w.find(lhs, p + 1)
    return frozenset(seen)


def wa_shape_check(w: str, cumulative: bool = True) -> bool:
    """Shape test for w = a^α0 b^β0 ... a^αn b^βn.

    The cumulative form (default) asks α0 + ... + αi > β0 + ... + βi for every
    i, i.e. every nonempty prefix has more a's than b's; this is what
    a -> aab, abab -> 1 and baba -> 1 preserve.  ``cumulative=False`` tests the
    blockwise α0 > β0, αi >= βi instead, which is sufficient but fails on
    orbit words such as aaababb.
    """
    if not w or w[0] != "a" or set(w) - {"a", "b"}:
        return False
    runs = [(len(m.group(1)), len(m.group(2))) for m in re.finditer(r"(a+)(b*)", w)]
    excess = 0
    for k, (na, nb) in enumerate(runs):
        if cumulative:
            excess += na - nb
            if excess <= 0:
                return False
        elif (k == 0 and na <= nb) or na < nb:
            return False
    return True
