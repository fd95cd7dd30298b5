"""Concave caps of dually-positive star plumbings.

Each filling arm with weights (-a1, ..., -as) carries the negative continued
fraction p/q = a1 - 1/(a2 - 1/(... - 1/as)); the corresponding cap arm is the
expansion of p/(p-q).  The cap has central weight +1 and -e0 - 1 arms in
total (e0 the filling's central weight): one dual arm per filling arm, in
order, padded at the end with single (-1) leaves, each the image of a fiber
sphere that was blown up exactly once.

canonical_embedding produces the distinguished homological embedding of that
cap whose complement is the filling plumbing itself: the cap center maps to
h, every depth-1 cap vertex to h - e1 - (fresh labels), and every deeper cap
vertex to (its parent's last fresh label) - (fresh labels), with e1 the only
label shared across arms.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .embedder import CapEmbedding
from .homlattice import LatticeClass
from .plumbing import CAP, FILLING, StarPlumbing, is_dually_positive

HJString = tuple[int, ...]


def hj_expand(p: int, q: int) -> HJString:
    """The unique (a1, ..., as), all ai >= 2, with
    p/q = a1 - 1/(a2 - 1/(... - 1/as)).  Requires p > q >= 1 coprime."""
    if not (p > q >= 1):
        raise ValueError(f"need p > q >= 1, got {p}/{q}")
    if gcd(p, q) != 1:
        raise ValueError(f"need gcd(p, q) = 1, got {p}/{q}")
    out = []
    while q > 0:
        a = -((-p) // q)  # ceil division
        out.append(a)
        p, q = q, a * q - p
    return tuple(out)


def hj_value(s: HJString) -> Fraction:
    """Evaluate a continued fraction string back to p/q."""
    if not s:
        raise ValueError("empty string has no value")
    value = Fraction(s[-1])
    for a in reversed(s[:-1]):
        value = a - 1 / value
    return value


def hj_dual(s: HJString) -> HJString:
    """If s carries p/q, the dual string carries p/(p-q); an involution.
    The string (1) (a once-blown fiber) has no dual here."""
    if tuple(s) == (1,):
        raise ValueError("(1,) is the once-blown fiber; it has no dual string")
    if any(a < 2 for a in s):
        raise ValueError("entries must be >= 2")
    value = hj_value(s)
    p, q = value.numerator, value.denominator
    return hj_expand(p, p - q)


def dual_cap(graph: StarPlumbing) -> StarPlumbing:
    """The concave cap of a dually-positive filling plumbing."""
    if graph.side != FILLING or not is_dually_positive(graph):
        raise ValueError("dual_cap requires a dually-positive filling plumbing")
    cap_arms = []
    for arm in graph.arms:
        dual = hj_dual(tuple(-w for w in arm))
        cap_arms.append(tuple(-a for a in dual))
    padding = -graph.center - 1 - graph.num_arms
    cap_arms.extend((-1,) for _ in range(padding))
    return StarPlumbing(1, tuple(cap_arms), CAP)


def canonical_embedding(graph: StarPlumbing) -> CapEmbedding:
    """The embedding of dual_cap(graph) whose complement is graph.

    Uses integer labels: 1 is the section class shared by every depth-1
    vertex, fresh labels are numbered consecutively in vertex order.  The
    result attains N = |graph| + |dual_cap(graph)| - 1 distinct labels.
    """
    cap = dual_cap(graph)
    classes = [LatticeClass(1)]
    next_label = 2
    for arm in cap.arms:
        last_fresh = None
        for depth, w in enumerate(arm, start=1):
            if depth == 1:
                count = -w
                fresh = list(range(next_label, next_label + count))
                exc = {1: -1}
                exc.update({f: -1 for f in fresh})
                classes.append(LatticeClass(1, exc))
            else:
                count = -w - 1
                fresh = list(range(next_label, next_label + count))
                exc = {last_fresh: 1}
                exc.update({f: -1 for f in fresh})
                classes.append(LatticeClass(0, exc))
            next_label += count
            if fresh:
                last_fresh = fresh[-1]
    return CapEmbedding(cap, tuple(classes))
