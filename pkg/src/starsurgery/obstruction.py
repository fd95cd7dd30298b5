"""Rational blow-down candidates and the divisibility obstruction.

The linear candidates are built two ways: by the cyclic blow-up recursion
(start from a (-4) and a (-1) vertex joined by two edges; repeatedly blow up
an edge at the unique (-1) vertex; finally delete the (-1)), and directly as
the negated continued fraction expansion of p^2/(pq-1).  Both produce the
same family of chains.

A candidate configuration can only embed in the convex plumbing P_{a,b} if
each of its sphere classes S satisfies (a+b) | S^2 + 2 (weight_filter).  A
single blow-down from P_{a,b} to the small filling must remove a
configuration with exactly a*b spheres; pushing the filter through the
linear family forces (a+b) | ab+1, and the non-linear families die on a
(-3)/(-4)/(-6) sphere or on their size.  single_blowdown_verdict returns
RuledOut exactly when (a+b) does not divide ab+1, and otherwise
Inconclusive: passing the necessary condition proves nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .dualize import hj_expand
from .plumbing import LinearChain, StarPlumbing

RULED_OUT = "RuledOut"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ParkDescriptor:
    """Run lengths (m1, ..., mn) of same-side choices in the recursion;
    the resulting chain has weights {-4-m1, -2-m2, ..., -2-mn} plus
    (-2)s, with 1 + sum(m) vertices in total."""

    m: tuple[int, ...]

    def __post_init__(self):
        if any(x < 1 for x in self.m):
            raise ValueError("run lengths must be >= 1")
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))

    @property
    def length(self) -> int:
        return 1 + sum(self.m)

    def weight_multiset(self) -> list[int]:
        if not self.m:
            return [-4]
        weights = [-4 - self.m[0]] + [-2 - x for x in self.m[1:]]
        weights += [-2] * (self.length - len(weights))
        return sorted(weights)


def sides_to_descriptor(sides) -> ParkDescriptor:
    """Maximal runs of equal side choices."""
    runs = []
    for side in sides:
        if runs and side == last:
            runs[-1] += 1
        else:
            runs.append(1)
        last = side
    return ParkDescriptor(tuple(runs))


@dataclass(frozen=True)
class Verdict:
    outcome: str
    certificate: str

    @property
    def ruled_out(self) -> bool:
        return self.outcome == RULED_OUT


def park_chain_recursive(sides) -> LinearChain:
    """Simulate the cyclic blow-up recursion.

    The cycle is stored counterclockwise; L blows up the edge from the
    (-1) vertex to its counterclockwise neighbour (the first blow-up is
    normalized to happen counterclockwise), R the clockwise one.  The final
    chain is read starting from the counterclockwise neighbour of the
    deleted (-1) vertex.
    """
    cycle = [-4, -1]
    pos = 1  # index of the unique (-1) vertex
    for side in sides:
        if side not in ("L", "R"):
            raise ValueError(f"sides must be 'L' or 'R', got {side!r}")
        n = len(cycle)
        if side == "L":
            nb = (pos + 1) % n
            cycle[pos] -= 1
            cycle[nb] -= 1
            # subdivide the edge pos -> nb (ccw): fresh -1 after pos
            cycle.insert(pos + 1, -1)
            pos = pos + 1
        else:
            nb = (pos - 1) % n
            cycle[pos] -= 1
            cycle[nb] -= 1
            cycle.insert(pos, -1)
            # pos now points at the fresh -1
    n = len(cycle)
    order = [cycle[(pos + 1 + k) % n] for k in range(n - 1)]
    return LinearChain(tuple(order))


def park_chain_fraction(p: int, q: int) -> LinearChain:
    """The linear candidate with continued fraction p^2/(pq-1)."""
    if p < 2 or not (p > q >= 1) or gcd(p, q) != 1:
        raise ValueError(f"need p > q >= 1 coprime with p >= 2, got ({p}, {q})")
    return LinearChain(tuple(-a for a in hj_expand(p * p, p * q - 1)))


def divisibility_criterion(a: int, b: int) -> bool:
    """(a+b) | (ab+1); equivalently (a+b) | (b^2 - 1)."""
    if a < 2 or b < 2:
        raise ValueError("need a, b >= 2")
    return (a * b + 1) % (a + b) == 0


def weight_filter(obj, modulus: int) -> bool:
    """Necessary embedding condition: every vertex weight w of the candidate
    has w + 2 divisible by the modulus (= a+b for P_{a,b})."""
    if modulus < 4:
        raise ValueError("modulus below 4 never arises for a, b >= 2")
    if isinstance(obj, LinearChain):
        weights = obj.weights
    elif isinstance(obj, StarPlumbing):
        weights = (obj.center,) + tuple(w for arm in obj.arms for w in arm)
    else:
        weights = tuple(obj)
    return all((w + 2) % modulus == 0 for w in weights)


def single_blowdown_verdict(a: int, b: int) -> Verdict:
    """Decide whether a single rational blow-down from P_{a,b} to the small
    filling is obstructed.  RuledOut carries the modular argument;
    Inconclusive carries the divisibility witness (the criterion is
    necessary, never sufficient)."""
    if a < 2 or b < 2:
        raise ValueError("need a, b >= 2")
    s = a + b
    size = a * b
    lines = [
        f"P_{{{a},{b}}}: chi drop to the alternate filling is {size}, so a single",
        f"  blow-down must remove a candidate configuration with {size} spheres,",
        f"  and every sphere class S in it needs (a+b) = {s} to divide S^2 + 2.",
    ]
    if s > 4:
        lines.append(
            f"  non-linear candidates: each contains a (-3)/(-4) sphere (S^2+2 = -1, -2)"
        )
        lines.append(
            f"  except one (-6) family (S^2+2 = -4); none divisible by {s} > 4."
        )
    else:
        lines.append(
            "  non-linear candidates: (-3)/(-4) spheres fail (-1, -2 not divisible by 4);"
        )
        lines.append(
            f"  the (-6) family has 5+q >= 5 > {size} spheres, too many."
        )
    lines.append(
        f"  linear candidates of length 1+sum(m_j) = {size} passing the filter force"
    )
    lines.append(
        f"  {s} | (2+m_1), {s} | m_j, hence {s} | 2+sum(m_j) = ab+1 = {size + 1}."
    )
    if divisibility_criterion(a, b):
        lines.append(
            f"  Here {s} | {size + 1} holds ({size + 1} = {(size + 1) // s} * {s}), so the"
        )
        lines.append(
            "  necessary condition is met: Inconclusive (no statement that the"
        )
        lines.append("  blow-down exists).")
        return Verdict(INCONCLUSIVE, "\n".join(lines))
    lines.append(
        f"  Here {size + 1} = {(size + 1) % s} mod {s}, so no linear candidate survives"
    )
    lines.append("  either: RuledOut.")
    return Verdict(RULED_OUT, "\n".join(lines))
