"""Weighted star-shaped plumbing graphs and linear chains.

A star plumbing has a central vertex and ordered arms, each arm a nonempty
chain of weighted vertices read outward from the center.  Vertices are
addressed as (arm, depth) pairs with the center at (0, 0) and arms 1-based.

Two constructors build the family studied here: make_P(a, b) is the
dually-positive convex plumbing with central weight -(a+b+2), a arms of
(b-1) many (-2)-vertices and b arms of (a-1) many (-2)-vertices; its concave
cap is the star DGamma(a, b) with central weight +1 and a+b+1 leaves
(a of weight -b, one of weight -1, b of weight -a), built by make_DGamma.

The text format is one graph per block::

    # optional comments
    center -6
    arm -2
    arm -3 -2

Blocks are separated by blank lines.  A graph whose center weight is +1 is
cap-side, anything else is filling-side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import intmat
from .errors import ParseError

FILLING = "filling"
CAP = "cap"


@dataclass(frozen=True)
class StarPlumbing:
    center: int
    arms: tuple[tuple[int, ...], ...]
    side: str = FILLING

    def __post_init__(self):
        if self.side not in (FILLING, CAP):
            raise ValueError(f"unknown side {self.side!r}")
        arms = tuple(tuple(int(w) for w in arm) for arm in self.arms)
        if any(len(arm) == 0 for arm in arms):
            raise ValueError("arms must be nonempty weight chains")
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "center", int(self.center))

    @property
    def num_arms(self) -> int:
        return len(self.arms)

    @property
    def vertex_count(self) -> int:
        return 1 + sum(len(arm) for arm in self.arms)

    def vertices(self) -> list[tuple[int, int]]:
        """Canonical vertex order: center, then arms in order, outward."""
        out = [(0, 0)]
        for j, arm in enumerate(self.arms, start=1):
            out.extend((j, i) for i in range(1, len(arm) + 1))
        return out

    def weight(self, vertex: tuple[int, int]) -> int:
        j, i = vertex
        if i == 0:
            return self.center
        return self.arms[j - 1][i - 1]

    def same_graph(self, other: "StarPlumbing") -> bool:
        """Graph equality disregarding arm order (star isomorphism)."""
        return (
            isinstance(other, StarPlumbing)
            and self.center == other.center
            and self.side == other.side
            and sorted(self.arms) == sorted(other.arms)
        )

    def intersection_matrix(self) -> np.ndarray:
        verts = self.vertices()
        index = {v: k for k, v in enumerate(verts)}
        n = len(verts)
        mat = np.zeros((n, n), dtype=np.int64)
        for v in verts:
            mat[index[v], index[v]] = self.weight(v)
        for j, arm in enumerate(self.arms, start=1):
            prev = (0, 0)
            for i in range(1, len(arm) + 1):
                mat[index[prev], index[(j, i)]] = 1
                mat[index[(j, i)], index[prev]] = 1
                prev = (j, i)
        return mat


@dataclass(frozen=True)
class LinearChain:
    weights: tuple[int, ...]

    def __post_init__(self):
        weights = tuple(int(w) for w in self.weights)
        if not weights:
            raise ValueError("a linear chain needs at least one vertex")
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.weights)

    def reversed(self) -> "LinearChain":
        return LinearChain(tuple(reversed(self.weights)))

    def intersection_matrix(self) -> np.ndarray:
        n = len(self.weights)
        mat = np.zeros((n, n), dtype=np.int64)
        for i, w in enumerate(self.weights):
            mat[i, i] = w
        for i in range(n - 1):
            mat[i, i + 1] = mat[i + 1, i] = 1
        return mat


def is_dually_positive(graph: StarPlumbing) -> bool:
    """Central weight at most -(#arms)-1 and every arm weight at most -2."""
    if graph.side != FILLING:
        raise ValueError("dual positivity is a filling-side notion")
    if graph.center > -graph.num_arms - 1:
        return False
    return all(w <= -2 for arm in graph.arms for w in arm)


def euler_characteristic(graph: StarPlumbing) -> int:
    """chi of a plumbing of n spheres is 1 + n."""
    return 1 + graph.vertex_count


def make_P(a: int, b: int) -> StarPlumbing:
    """The convex plumbing: center -(a+b+2), a arms of (b-1) (-2)s and
    b arms of (a-1) (-2)s.  Requires a, b >= 2."""
    if a < 2 or b < 2:
        raise ValueError("make_P requires a, b >= 2")
    arms = tuple((-2,) * (b - 1) for _ in range(a)) + tuple((-2,) * (a - 1) for _ in range(b))
    return StarPlumbing(-(a + b + 2), arms, FILLING)


def make_DGamma(a: int, b: int) -> StarPlumbing:
    """The concave cap of make_P(a, b): center +1 with a+b+1 leaves
    (-b) * a, (-1), (-a) * b."""
    if a < 2 or b < 2:
        raise ValueError("make_DGamma requires a, b >= 2")
    arms = tuple((-b,) for _ in range(a)) + ((-1,),) + tuple((-a,) for _ in range(b))
    return StarPlumbing(1, arms, CAP)


def is_negative_definite(obj) -> bool:
    """Exact negative-definiteness of the intersection form of a star
    plumbing or linear chain."""
    return intmat.is_negative_definite(obj.intersection_matrix())


# -- graph DSL ---------------------------------------------------------------

def _parse_weight(token: str, lineno: int, source) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"bad weight {token!r}", line=lineno, source=source) from None


def parse_graphs(text: str, source=None) -> list[StarPlumbing]:
    graphs = []
    center = None
    arms: list[tuple[int, ...]] = []
    start_line = None

    def flush(lineno):
        nonlocal center, arms, start_line
        if center is None:
            if arms:
                raise ParseError("arm before center", line=start_line, source=source)
            return
        side = CAP if center == 1 else FILLING
        graphs.append(StarPlumbing(center, tuple(arms), side))
        center = None
        arms = []
        start_line = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if center is not None or arms:
                flush(lineno)
            continue
        fields = line.split()
        if fields[0] == "center":
            if center is not None:
                flush(lineno)
            if len(fields) != 2:
                raise ParseError("center takes exactly one weight", line=lineno, source=source)
            center = _parse_weight(fields[1], lineno, source)
            start_line = lineno
        elif fields[0] == "arm":
            if center is None:
                raise ParseError("arm before center", line=lineno, source=source)
            if len(fields) < 2:
                raise ParseError("arm needs at least one weight", line=lineno, source=source)
            arms.append(tuple(_parse_weight(t, lineno, source) for t in fields[1:]))
        else:
            raise ParseError(f"unknown directive {fields[0]!r}", line=lineno, source=source)
    flush(None)
    return graphs


def parse_graph(text: str, source=None) -> StarPlumbing:
    graphs = parse_graphs(text, source=source)
    if len(graphs) != 1:
        raise ParseError(f"expected exactly one graph, found {len(graphs)}", source=source)
    return graphs[0]


def format_graph(graph: StarPlumbing) -> str:
    lines = [f"center {graph.center}"]
    lines.extend("arm " + " ".join(str(w) for w in arm) for arm in graph.arms)
    return "\n".join(lines) + "\n"
