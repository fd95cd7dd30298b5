"""Exact mapping class computations on the n-holed disk.

Holes sit on a circle concentric with the boundary, labelled 1..n
counterclockwise; every twist is a positive (or negative) Dehn twist about
the boundary of a neighbourhood of the convex hull of a subset of holes.
Products act left factor first.

Representation.  Each hole is doubled into two punctures (hole i becomes
punctures 2i-1, 2i), so a twist about a single hole's boundary acts
nontrivially on the free group F = <x_1, ..., x_2n> of the doubled disk.
With S the doubled puncture set (s_1 < ... < s_m) and W = x_{s_1}...x_{s_m},
the twist about the hull of S maps

    x_j  |->  W x_j W^{-1}                     for j in S,
    x_j  |->  (W V_i^{-1}) x_j (W V_i^{-1})^{-1}   for j between s_i, s_{i+1},
    x_j  |->  x_j                              outside [s_1, s_m],

where V_i = x_{s_{i+1}}...x_{s_m} x_{s_1}...x_{s_i} is the rotation of W
starting after gap i.  For contiguous S this is the familiar conjugation by
the subword; the rotation terms are what a hull curve does to the loops it
must cross, and make the action fix the boundary word x_1...x_{2n}.  The
mandatory relation suite (lantern, daisy, generalized lantern, boundary
centrality, commutation probes) pins this convention down; a plain
"conjugate members, fix the rest" rule fails all of them on non-contiguous
subsets.

Equality of factorizations is decided on these normal forms, with the
abelianized linking matrix as a cheap negative filter.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import ParseError, ReplayError, ResourceBudgetError

DEFAULT_MAX_LETTERS = 10**6

Word = tuple[int, ...]


def _letter_budget(max_letters) -> int:
    if max_letters is not None:
        return max_letters
    return int(os.environ.get("STARSURGERY_MAX_LETTERS", DEFAULT_MAX_LETTERS))


# -- free words ---------------------------------------------------------------

def wreduce(seq) -> Word:
    out = []
    for x in seq:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def winv(word) -> Word:
    return tuple(-x for x in reversed(word))


def _extend_reduced(buf: list, word) -> None:
    for x in word:
        if buf and buf[-1] == -x:
            buf.pop()
        else:
            buf.append(x)


def apply_auto(images, word) -> Word:
    """Apply an automorphism (tuple of generator images) to a word."""
    buf: list = []
    for x in word:
        img = images[x - 1] if x > 0 else winv(images[-x - 1])
        _extend_reduced(buf, img)
    return tuple(buf)


def identity_images(rank: int) -> tuple[Word, ...]:
    return tuple((g,) for g in range(1, rank + 1))


# -- surfaces, twists, factorizations ----------------------------------------

@dataclass(frozen=True)
class HoledDisk:
    """Disk with n holes on a concentric circle, labelled counterclockwise."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one hole")


@dataclass(frozen=True)
class ConvexTwist:
    """power-fold Dehn twist about the hull curve of a hole subset."""

    holes: tuple[int, ...]
    power: int = 1

    def __post_init__(self):
        holes = tuple(sorted(set(int(h) for h in self.holes)))
        if not holes:
            raise ValueError("a convex twist needs a nonempty hole subset")
        if holes[0] < 1:
            raise ValueError("holes are labelled from 1")
        if self.power == 0:
            raise ValueError("zero powers are not twists")
        object.__setattr__(self, "holes", holes)
        object.__setattr__(self, "power", int(self.power))

    def inverse(self) -> "ConvexTwist":
        return ConvexTwist(self.holes, -self.power)


@dataclass(frozen=True)
class Factorization:
    """Ordered twist word on an n-holed disk; leftmost twist acts first."""

    n: int
    word: tuple[ConvexTwist, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one hole")
        word = tuple(self.word)
        for t in word:
            if t.holes[-1] > self.n:
                raise ValueError(f"twist {t.holes} exceeds hole count {self.n}")
        object.__setattr__(self, "word", word)

    @property
    def length(self) -> int:
        return sum(abs(t.power) for t in self.word)

    def is_positive(self) -> bool:
        return all(t.power > 0 for t in self.word)

    def letters(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        """Expanded to unit-power (holes, sign) letters."""
        out = []
        for t in self.word:
            sign = 1 if t.power > 0 else -1
            out.extend((t.holes, sign) for _ in range(abs(t.power)))
        return tuple(out)

    def inverse(self) -> "Factorization":
        return Factorization(self.n, tuple(t.inverse() for t in reversed(self.word)))

    def __add__(self, other: "Factorization") -> "Factorization":
        if self.n != other.n:
            raise ValueError("factorizations live on different surfaces")
        return Factorization(self.n, self.word + other.word)


@dataclass(frozen=True)
class MappingClassNF:
    """Normal form: reduced images of the 2n doubled free generators."""

    n: int
    images: tuple[Word, ...]

    def is_identity(self) -> bool:
        return self.images == identity_images(2 * self.n)

    def total_letters(self) -> int:
        return sum(len(w) for w in self.images)


@lru_cache(maxsize=None)
def _twist_images(rank: int, punctures: tuple[int, ...], sign: int) -> tuple[Word, ...]:
    s = punctures
    m = len(s)
    w: Word = tuple(s)
    images = []
    member = set(s)
    for j in range(1, rank + 1):
        if j in member:
            u = w if sign > 0 else winv(w)
        elif s[0] < j < s[-1]:
            i = sum(1 for x in s if x < j)
            v = tuple(s[i:] + s[:i])
            u = wreduce(w + winv(v)) if sign > 0 else wreduce(winv(w) + v)
        else:
            images.append((j,))
            continue
        images.append(wreduce(u + (j,) + winv(u)))
    return tuple(images)


def _doubled(holes) -> tuple[int, ...]:
    out = []
    for h in holes:
        out.extend((2 * h - 1, 2 * h))
    return tuple(out)


def twist_automorphism(n: int, t: ConvexTwist) -> MappingClassNF:
    """Normal form of a single convex twist; empty or out-of-range subsets
    are rejected."""
    if t.holes[-1] > n:
        raise ValueError(f"twist {t.holes} exceeds hole count {n}")
    rank = 2 * n
    base = _twist_images(rank, _doubled(t.holes), 1 if t.power > 0 else -1)
    images = base
    for _ in range(abs(t.power) - 1):
        images = tuple(apply_auto(base, img) for img in images)
    return MappingClassNF(n, images)


def act(f: Factorization, max_letters: int | None = None) -> MappingClassNF:
    """Compose the twist word (leftmost first) into a normal form.

    Raises ResourceBudgetError when the images exceed the letter guard
    (default 10**6 letters, env STARSURGERY_MAX_LETTERS).
    """
    budget = _letter_budget(max_letters)
    rank = 2 * f.n
    images = identity_images(rank)
    for holes, sign in f.letters():
        step = _twist_images(rank, _doubled(holes), sign)
        images = tuple(apply_auto(step, img) for img in images)
        total = sum(len(w) for w in images)
        if total > budget:
            raise ResourceBudgetError(
                f"normal form exceeded the {budget}-letter guard (at {total})"
            )
    return MappingClassNF(f.n, images)


def linking_matrix(f: Factorization) -> np.ndarray:
    """Signed twist counts: diagonal (i,i) counts twists containing hole i,
    entry (i,j) those containing both.  Equal factorizations have equal
    linking matrices (the converse fails)."""
    mat = np.zeros((f.n, f.n), dtype=np.int64)
    for t in f.word:
        for a in t.holes:
            mat[a - 1, a - 1] += t.power
        for a, b in combinations(t.holes, 2):
            mat[a - 1, b - 1] += t.power
            mat[b - 1, a - 1] += t.power
    return mat


def equal(f: Factorization, g: Factorization, max_letters: int | None = None) -> bool:
    """Equality in the mapping class group of the holed disk."""
    if f.n != g.n:
        raise ValueError("factorizations live on different surfaces")
    if not np.array_equal(linking_matrix(f), linking_matrix(g)):
        return False
    return act(f, max_letters) == act(g, max_letters)


# -- commutation --------------------------------------------------------------

def commute(s, t) -> bool:
    """Whether the convex twists about hole sets s and t commute: nested
    subsets always do, disjoint ones exactly when not circularly
    interleaved (their hulls are then disjoint)."""
    a, b = frozenset(s), frozenset(t)
    if a <= b or b <= a:
        return True
    if a & b:
        return False
    merged = sorted(a | b)
    flags = [x in a for x in merged]
    changes = sum(flags[i] != flags[(i + 1) % len(flags)] for i in range(len(flags)))
    return changes <= 2


def letters_commute(x, y) -> bool:
    return commute(x[0], y[0])


# -- the relation library -----------------------------------------------------

def _validate_groups(groups, n: int) -> None:
    flat = []
    for g in groups:
        if not g:
            raise ValueError("hole groups must be nonempty")
        flat.extend(g)
    if len(set(flat)) != len(flat):
        raise ValueError("hole groups must be pairwise disjoint")
    if max(flat) > n or min(flat) < 1:
        raise ValueError("hole out of range")
    union = sorted(flat)
    gid = {}
    for k, g in enumerate(groups):
        for h in g:
            gid[h] = k
    seq = [gid[h] for h in union]
    runs = [seq[0]]
    for x in seq[1:]:
        if x != runs[-1]:
            runs.append(x)
    if len(runs) > 1 and runs[0] == runs[-1]:
        runs = runs[1:]
    k = len(groups)
    if sorted(runs) != list(range(k)):
        raise ValueError("groups must be non-crossing on the circle")
    start = runs.index(0)
    if runs != list(range(k)) and runs[start:] + runs[:start] != list(range(k)):
        raise ValueError("groups must appear in counterclockwise order")


def _union(*groups) -> tuple[int, ...]:
    out: list[int] = []
    for g in groups:
        out.extend(g)
    return tuple(sorted(out))


def lantern(a, b, c, n: int | None = None) -> tuple[Factorization, Factorization]:
    """phi_{ABC} phi_A phi_B phi_C = phi_{AB} phi_{AC} phi_{BC} for disjoint
    counterclockwise hole groups A, B, C."""
    a, b, c = tuple(a), tuple(b), tuple(c)
    n = n or max(_union(a, b, c))
    _validate_groups((a, b, c), n)
    lhs = Factorization(n, (
        ConvexTwist(_union(a, b, c)),
        ConvexTwist(a), ConvexTwist(b), ConvexTwist(c),
    ))
    rhs = Factorization(n, (
        ConvexTwist(_union(a, b)), ConvexTwist(_union(a, c)), ConvexTwist(_union(b, c)),
    ))
    return lhs, rhs


def daisy(*groups, n: int | None = None) -> tuple[Factorization, Factorization]:
    """phi_{B0..Bp} phi_{B0}^{p-1} phi_{B1} ... phi_{Bp}
    = phi_{B0 B1} ... phi_{B0 Bp} phi_{B1..Bp},  p >= 2."""
    groups = tuple(tuple(g) for g in groups)
    p = len(groups) - 1
    if p < 2:
        raise ValueError("the daisy needs at least three groups")
    n = n or max(_union(*groups))
    _validate_groups(groups, n)
    b0, petals = groups[0], groups[1:]
    lhs_word = [ConvexTwist(_union(*groups))]
    if p - 1 > 0:
        lhs_word.append(ConvexTwist(b0, p - 1))
    lhs_word.extend(ConvexTwist(g) for g in petals)
    rhs_word = [ConvexTwist(_union(b0, g)) for g in petals]
    rhs_word.append(ConvexTwist(_union(*petals)))
    return Factorization(n, tuple(lhs_word)), Factorization(n, tuple(rhs_word))


def generalized_lantern(k: int, n: int | None = None) -> tuple[Factorization, Factorization]:
    """phi_{1..k} phi_1^{k-2} ... phi_k^{k-2} = prod of all pair twists
    (lexicographic), on holes 1..k.  k >= 3."""
    if k < 3:
        raise ValueError("the generalized lantern needs k >= 3")
    n = n or k
    if n < k:
        raise ValueError("surface too small")
    lhs_word = [ConvexTwist(tuple(range(1, k + 1)))]
    lhs_word.extend(ConvexTwist((i,), k - 2) for i in range(1, k + 1))
    rhs_word = [ConvexTwist((i, j)) for i, j in combinations(range(1, k + 1), 2)]
    return Factorization(n, tuple(lhs_word)), Factorization(n, tuple(rhs_word))


# -- the two fillings' factorizations ------------------------------------------
#
# Holes A_1..A_m = 1..m, B = m+1, C_1..C_n = m+2..m+n+1, counterclockwise.

def F_factorization(m: int, n: int) -> Factorization:
    """phi_{A..C} phi_{A1}^n ... phi_{Am}^n phi_B phi_{C1}^m ... phi_{Cn}^m
    (length 2mn + 2); the plumbing-side planar fibration."""
    if m < 1 or n < 1:
        raise ValueError("need m, n >= 1")
    holes = m + 1 + n
    word = [ConvexTwist(tuple(range(1, holes + 1)))]
    word.extend(ConvexTwist((i,), n) for i in range(1, m + 1))
    word.append(ConvexTwist((m + 1,)))
    word.extend(ConvexTwist((m + 1 + j,), m) for j in range(1, n + 1))
    return Factorization(holes, tuple(word))


def G_factorization(m: int, n: int) -> Factorization:
    """phi_{A,B} (phi_{A1C1}..phi_{A1Cn}) ... (phi_{AmC1}..phi_{AmCn})
    phi_{B,C} (length mn + 2); the small filling's planar fibration."""
    if m < 1 or n < 1:
        raise ValueError("need m, n >= 1")
    holes = m + 1 + n
    word = [ConvexTwist(tuple(range(1, m + 2)))]
    for i in range(1, m + 1):
        word.extend(ConvexTwist((i, m + 1 + j)) for j in range(1, n + 1))
    word.append(ConvexTwist(tuple(range(m + 1, holes + 1))))
    return Factorization(holes, tuple(word))


def verify_FG(m: int, n: int, max_letters: int | None = None) -> bool:
    """The two products are equal in the mapping class group."""
    return equal(F_factorization(m, n), G_factorization(m, n), max_letters)


# -- derivation replay ----------------------------------------------------------

@dataclass(frozen=True)
class ReplayTrace:
    m: int
    n: int
    steps: tuple[str, ...]
    f_rewritten: tuple
    g_rewritten: tuple
    swaps: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return True  # construction fails loudly instead of returning a bad trace


def _pairs_lex(holes):
    return [ConvexTwist((i, j)) for i, j in combinations(holes, 2)]


def _expand(word) -> list:
    out = []
    for t in word:
        sign = 1 if t.power > 0 else -1
        out.extend((t.holes, sign) for _ in range(abs(t.power)))
    return out


def proof_replay(m: int, n: int, max_letters: int | None = None) -> ReplayTrace:
    """Replay the commutation proof that F and G agree: split every big
    twist by the generalized lantern, then transform one non-positive word
    into the other by adjacent transpositions of commuting twists.

    Raises ReplayError if no commutation path exists (which would contradict
    the equality) and ResourceBudgetError under the letter guard.
    """
    steps = []
    holes = m + 1 + n
    all_holes = tuple(range(1, holes + 1))
    a_holes = tuple(range(1, m + 1))
    b = m + 1
    c_holes = tuple(range(m + 2, holes + 1))

    # F with its full twist split by the generalized lantern on all holes:
    counts = {h: 0 for h in all_holes}
    for i in a_holes:
        counts[i] = n
    counts[b] = 1
    for j in c_holes:
        counts[j] = m
    f_word = []
    for h in all_holes:
        power = counts[h] - (holes - 2)
        if power:
            f_word.append(ConvexTwist((h,), power))
    f_word.extend(_pairs_lex(all_holes))
    steps.append(
        f"rewrite F({m},{n}): generalized lantern (k={holes}) splits the full twist;"
        " single-hole powers collected"
    )

    # G with both of its big twists split:
    g_word = []
    if m - 1 > 0:
        g_word.extend(ConvexTwist((h,), -(m - 1)) for h in a_holes + (b,))
    g_word.extend(_pairs_lex(a_holes + (b,)))
    for i in a_holes:
        g_word.extend(ConvexTwist((i, j)) for j in c_holes)
    if n - 1 > 0:
        g_word.extend(ConvexTwist((h,), -(n - 1)) for h in (b,) + c_holes)
    g_word.extend(_pairs_lex((b,) + c_holes))
    steps.append(
        f"rewrite G({m},{n}): generalized lanterns (k={m + 1}, k={n + 1}) split both"
        " boundary twists"
    )

    f_nf = act(F_factorization(m, n), max_letters)
    fr = Factorization(holes, tuple(f_word))
    if act(fr, max_letters) != f_nf:
        raise ReplayError("rewritten F does not represent the same mapping class")
    g_nf = act(G_factorization(m, n), max_letters)
    gr = Factorization(holes, tuple(g_word))
    if act(gr, max_letters) != g_nf:
        raise ReplayError("rewritten G does not represent the same mapping class")
    if f_nf != g_nf:
        raise ReplayError("F and G are not equal; nothing to replay")
    steps.append("verified: both rewritten words still act like F = G")

    current = _expand(f_word)
    target = _expand(g_word)
    if sorted(current) != sorted(target):
        raise ReplayError("rewritten words are not letter-multiset equal")

    swaps = []
    for idx in range(len(target)):
        pos = None
        for k in range(idx, len(current)):
            if current[k] != target[idx]:
                continue
            if all(letters_commute(current[j], current[k]) for j in range(idx, k)):
                pos = k
                break
        if pos is None:
            raise ReplayError(
                f"no commutation path: cannot bring {target[idx]} to position {idx}"
            )
        for k in range(pos, idx, -1):
            current[k - 1], current[k] = current[k], current[k - 1]
            swaps.append((k - 1, k))
    if current != target:
        raise ReplayError("transposition phase ended on the wrong word")
    steps.append(f"{len(swaps)} adjacent transpositions of commuting twists")
    steps.append("words coincide letter for letter")
    return ReplayTrace(m, n, tuple(steps), tuple(f_word), tuple(g_word), tuple(swaps))


# -- factorization text format --------------------------------------------------

def parse_factorization(text: str, source=None) -> Factorization:
    """One twist per line: ``twist 1,3,4 ^ 2`` (power optional); an optional
    ``holes <n>`` header fixes the surface (default: the largest hole used)."""
    n = None
    word = []
    max_hole = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "holes":
            if len(fields) != 2 or not fields[1].isdigit():
                raise ParseError("holes takes one positive integer", line=lineno, source=source)
            n = int(fields[1])
        elif fields[0] == "twist":
            rest = line[len("twist"):].strip()
            power = 1
            if "^" in rest:
                rest, _, powtext = rest.partition("^")
                try:
                    power = int(powtext.strip())
                except ValueError:
                    raise ParseError(f"bad power {powtext.strip()!r}", line=lineno, source=source) from None
            try:
                holes = tuple(int(tok) for tok in rest.strip().split(",") if tok.strip())
            except ValueError:
                raise ParseError(f"bad hole list {rest.strip()!r}", line=lineno, source=source) from None
            if not holes:
                raise ParseError("twist needs at least one hole", line=lineno, source=source)
            try:
                twist = ConvexTwist(holes, power)
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno, source=source) from None
            word.append(twist)
            max_hole = max(max_hole, twist.holes[-1])
        else:
            raise ParseError(f"unknown directive {fields[0]!r}", line=lineno, source=source)
    if n is None:
        n = max_hole
    if n == 0:
        raise ParseError("empty factorization needs an explicit holes line", source=source)
    try:
        return Factorization(n, tuple(word))
    except ValueError as exc:
        raise ParseError(str(exc), source=source) from None


def format_factorization(f: Factorization) -> str:
    lines = [f"holes {f.n}"]
    for t in f.word:
        body = ",".join(str(h) for h in t.holes)
        lines.append(f"twist {body}" + (f" ^ {t.power}" if t.power != 1 else ""))
    return "\n".join(lines) + "\n"
