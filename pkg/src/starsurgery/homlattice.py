"""Exact arithmetic in the homology lattice of a blown-up projective plane.

Elements are integer combinations  a*h + sum_l c_l * e_l  where h is the line
class (h.h = +1) and the e_l are exceptional classes (e_l.e_l = -1, pairwise
orthogonal and orthogonal to h).  The intersection form is therefore
diag(+1, -1, -1, ...), the first Chern class of the standard symplectic
structure pairs as 3*a + sum_l c_l, and a class can be represented by an
embedded symplectic sphere only if the adjunction defect
<c1, x> - x.x - 2 vanishes.

Labels of exceptional classes may be integers, names, or tuples of those;
they only need a stable total order so that canonical relabelling elsewhere
is deterministic.  Coefficients are unbounded Python integers.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

ExcLabel = int | str | tuple

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def label_key(label: ExcLabel):
    """Total-order sort key across the mixed label universe."""
    if isinstance(label, bool):
        raise TypeError("booleans are not valid exceptional labels")
    if isinstance(label, int):
        return (0, label, "")
    if isinstance(label, tuple):
        return (1, tuple(label_key(part) for part in label))
    if isinstance(label, str):
        return (2, label, "")
    raise TypeError(f"unsupported exceptional label {label!r}")


class LatticeClass:
    """A second-homology class: h-coefficient plus a finitely supported
    assignment of integer coefficients to exceptional labels.

    Zero coefficients are never stored; equality and hashing are
    coefficient-wise.
    """

    __slots__ = ("h", "_exc")

    def __init__(self, h: int = 0, exc: Mapping[ExcLabel, int] | Iterable = ()):
        items = exc.items() if isinstance(exc, Mapping) else exc
        cleaned = {}
        for label, coeff in items:
            label_key(label)  # validates
            if not isinstance(coeff, int) or isinstance(coeff, bool):
                raise TypeError(f"coefficient of {label!r} must be an integer")
            if coeff != 0:
                cleaned[label] = cleaned.get(label, 0) + coeff
                if cleaned[label] == 0:
                    del cleaned[label]
        self.h = h
        self._exc = tuple(sorted(cleaned.items(), key=lambda kv: label_key(kv[0])))

    @property
    def exc(self) -> dict:
        """Exceptional coefficients as a fresh dict (labels in sorted order)."""
        return dict(self._exc)

    def coefficient(self, label: ExcLabel) -> int:
        for lab, coeff in self._exc:
            if lab == label:
                return coeff
        return 0

    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self._exc)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "LatticeClass") -> "LatticeClass":
        exc = dict(self._exc)
        for lab, c in other._exc:
            exc[lab] = exc.get(lab, 0) + c
        return LatticeClass(self.h + other.h, exc)

    def __neg__(self) -> "LatticeClass":
        return LatticeClass(-self.h, [(lab, -c) for lab, c in self._exc])

    def __sub__(self, other: "LatticeClass") -> "LatticeClass":
        return self + (-other)

    def __mul__(self, scalar: int) -> "LatticeClass":
        if not isinstance(scalar, int):
            return NotImplemented
        return LatticeClass(self.h * scalar, [(lab, c * scalar) for lab, c in self._exc])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeClass):
            return NotImplemented
        return self.h == other.h and self._exc == other._exc

    def __hash__(self):
        return hash((self.h, self._exc))

    def __repr__(self):
        return f"LatticeClass({format_class(self)!r})"

    def __str__(self):
        return format_class(self)

    def is_zero(self) -> bool:
        return self.h == 0 and not self._exc


def line() -> LatticeClass:
    """The class h of the complex projective line."""
    return LatticeClass(1)


def exceptional(label: ExcLabel) -> LatticeClass:
    """The exceptional class e_label of a blow-up."""
    return LatticeClass(0, {label: 1})


def pairing(x: LatticeClass, y: LatticeClass) -> int:
    """Intersection pairing: x.h*y.h - sum over shared labels of the
    coefficient products.  Symmetric and bilinear."""
    total = x.h * y.h
    if len(x._exc) > len(y._exc):
        x, y = y, x
    yexc = dict(y._exc)
    for lab, c in x._exc:
        d = yexc.get(lab)
        if d is not None:
            total -= c * d
    return total


def self_intersection(x: LatticeClass) -> int:
    return pairing(x, x)


def c1_pairing(x: LatticeClass) -> int:
    """Evaluation of the first Chern class 3h - sum_l e_l on x.

    <3h - sum e_l, a*h + sum c_l e_l> = 3a - sum_l (-1)*c_l*(-1)... the
    diagonal form gives 3a + sum_l c_l.
    """
    return 3 * x.h + sum(c for _, c in x._exc)


def adjunction_defect(x: LatticeClass) -> int:
    """<c1, x> - x.x - 2; zero exactly for classes of embedded symplectic
    spheres under the adjunction criterion."""
    return c1_pairing(x) - self_intersection(x) - 2


# -- textual form ----------------------------------------------------------
#
# Classes render as e.g. "h - e1 - e(2,3)" or "2h + 3e1 - ex"; parse/print
# round-trips.  Integer labels render as e1, name labels as ex, tuple labels
# as e(2,3) / e(i,2).

def _format_label(label: ExcLabel) -> str:
    if isinstance(label, int):
        return str(label)
    if isinstance(label, str):
        if not _NAME_RE.match(label) or label.isdigit():
            raise ValueError(f"string label {label!r} is not renderable")
        return label
    return "(" + ",".join(_format_label(part) for part in label) + ")"


def format_class(x: LatticeClass) -> str:
    terms = []
    if x.h != 0:
        terms.append((x.h, "h"))
    for lab, c in x._exc:
        terms.append((c, "e" + _format_label(lab)))
    if not terms:
        return "0"
    out = []
    for i, (coeff, atom) in enumerate(terms):
        mag = abs(coeff)
        body = atom if mag == 1 else f"{mag}{atom}"
        if i == 0:
            out.append(("-" if coeff < 0 else "") + body)
        else:
            out.append((" - " if coeff < 0 else " + ") + body)
    return "".join(out)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<sign>[+-])"
    r"|(?P<coeff>\d+)"
    r"|(?P<h>h\b)"
    r"|e\((?P<tup>[^)]*)\)"
    r"|e(?P<lab>[A-Za-z0-9_]+)"
    r"|(?P<zero>0))"
)


def _parse_ident(text: str) -> int | str:
    text = text.strip()
    if not text:
        raise ValueError("empty label component")
    if text.isdigit():
        return int(text)
    if not _NAME_RE.match(text):
        raise ValueError(f"bad label component {text!r}")
    return text


def parse_class(text: str) -> LatticeClass:
    """Inverse of format_class.  Raises ValueError on malformed input."""
    if text.strip() == "0":
        return LatticeClass(0)
    pos = 0
    h = 0
    exc: dict = {}
    sign = 1
    pending_coeff = None
    saw_term = False
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected input at {text[pos:]!r}")
        pos = m.end()
        if m.group("sign"):
            if pending_coeff is not None:
                raise ValueError("dangling coefficient")
            sign = -sign if m.group("sign") == "-" else sign
            continue
        if m.group("coeff"):
            if pending_coeff is not None:
                raise ValueError("two coefficients in a row")
            pending_coeff = int(m.group("coeff"))
            continue
        coeff = sign * (1 if pending_coeff is None else pending_coeff)
        if m.group("h"):
            h += coeff
        elif m.group("zero"):
            if pending_coeff is not None:
                raise ValueError("coefficient before 0")
        else:
            if m.group("tup") is not None:
                label: ExcLabel = tuple(_parse_ident(p) for p in m.group("tup").split(","))
            else:
                label = _parse_ident(m.group("lab"))
            exc[label] = exc.get(label, 0) + coeff
        sign = 1
        pending_coeff = None
        saw_term = True
    if not saw_term or pending_coeff is not None:
        raise ValueError(f"malformed class {text!r}")
    return LatticeClass(h, exc)
