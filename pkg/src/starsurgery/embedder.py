"""Enumeration of homological embeddings of a concave cap plumbing.

A cap-side star plumbing (central weight +1) embeds into a blown-up
projective plane by assigning a lattice class to every vertex:

* the center carries exactly h;
* a depth-1 vertex of weight w carries h minus (1-w) distinct exceptional
  labels, each with coefficient -1;
* a deeper vertex of weight w carries one label with coefficient +1 and
  (-w-1) further distinct labels with coefficient -1;

subject to the pairing matrix of the classes equalling the cap's
intersection matrix.  Those shapes make every class have adjunction defect
zero, as an embedded symplectic sphere must.

Embeddings are classified up to relabelling of the exceptional classes.
enumerate_embeddings returns one canonical representative per relabelling
class in a deterministic order; enumerate_embeddings_bruteforce recomputes
the same answer by unpruned enumeration of all label partitions of the
coefficient slots and exists purely as an independent cross-check.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ResourceBudgetError
from .homlattice import LatticeClass, adjunction_defect, label_key, pairing
from .plumbing import CAP, StarPlumbing

DEFAULT_SEARCH_NODES = 5_000_000


def _search_budget(max_nodes):
    if max_nodes is not None:
        return max_nodes
    return int(os.environ.get("STARSURGERY_MAX_NODES", DEFAULT_SEARCH_NODES))


@dataclass(frozen=True)
class CapEmbedding:
    """Assignment of lattice classes to the vertices of a cap plumbing.

    classes is aligned with cap.vertices() (center first, then arms in
    order, outward).
    """

    cap: StarPlumbing
    classes: tuple[LatticeClass, ...]

    def __post_init__(self):
        if len(self.classes) != self.cap.vertex_count:
            raise ValueError("one class per cap vertex required")

    @property
    def N(self) -> int:
        """Number of distinct exceptional labels with nonzero coefficient."""
        labels = set()
        for cls in self.classes:
            labels.update(cls.labels())
        return len(labels)

    def assignment(self) -> dict:
        return dict(zip(self.cap.vertices(), self.classes))

    def class_of(self, vertex) -> LatticeClass:
        return self.classes[self.cap.vertices().index(vertex)]

    def relabelled(self, mapping) -> "CapEmbedding":
        """Apply a label permutation (dict old -> new)."""
        new = []
        for cls in self.classes:
            new.append(LatticeClass(cls.h, {mapping.get(l, l): c for l, c in cls.exc.items()}))
        return CapEmbedding(self.cap, tuple(new))


# -- validation --------------------------------------------------------------

def validation_errors(cap: StarPlumbing, emb: CapEmbedding) -> list[str]:
    problems = []
    verts = cap.vertices()
    if emb.cap is not cap and emb.cap != cap:
        problems.append("embedding belongs to a different cap")
        return problems
    classes = emb.classes
    center = classes[0]
    if center != LatticeClass(1):
        problems.append(f"center class is {center}, not h")
    for v, cls in zip(verts[1:], classes[1:]):
        coeffs = list(cls.exc.values())
        if v[1] == 1:
            if cls.h != 1:
                problems.append(f"depth-1 vertex {v} has h-coefficient {cls.h}")
            if any(c != -1 for c in coeffs):
                problems.append(f"depth-1 vertex {v} has a coefficient other than -1")
        else:
            if cls.h != 0:
                problems.append(f"deeper vertex {v} has h-coefficient {cls.h}")
            if sorted(coeffs).count(1) != 1 or any(c not in (1, -1) for c in coeffs):
                problems.append(f"deeper vertex {v} lacks the (+1, -1...) shape")
        if adjunction_defect(cls) != 0:
            problems.append(f"vertex {v} has adjunction defect {adjunction_defect(cls)}")
    mat = cap.intersection_matrix()
    for i in range(len(verts)):
        for j in range(i, len(verts)):
            got = pairing(classes[i], classes[j])
            if got != int(mat[i, j]):
                problems.append(
                    f"pairing({verts[i]}, {verts[j]}) = {got}, expected {int(mat[i, j])}"
                )
    return problems


def is_valid_embedding(cap: StarPlumbing, emb: CapEmbedding) -> bool:
    if cap.side != CAP:
        raise ValueError("embeddings are defined for cap-side plumbings")
    return not validation_errors(cap, emb)


def _require_valid(cap, emb):
    errs = validation_errors(cap, emb)
    if errs:
        raise ValueError("invalid embedding: " + "; ".join(errs[:3]))


# -- internal mask form -------------------------------------------------------
#
# During the search a class is ('d1', negmask) or ('dp', poslabel, negmask)
# with labels 0, 1, 2, ... in order of first introduction.

def _popcount(x: int) -> int:
    return bin(x).count("1")


def _pair_internal(x, y) -> int:
    if x[0] == "d1":
        if y[0] == "d1":
            return 1 - _popcount(x[1] & y[1])
        q, u = y[1], y[2]
        return ((x[1] >> q) & 1) - _popcount(x[1] & u)
    if y[0] == "d1":
        return _pair_internal(y, x)
    p, t = x[1], x[2]
    q, u = y[1], y[2]
    return -(p == q) + ((u >> p) & 1) + ((t >> q) & 1) - _popcount(t & u)


def _canonical_classes(entries, num_labels):
    """Relabel by column signature; returns tuple of LatticeClass.

    entries: per non-center vertex ('d1', mask) / ('dp', pos, mask), in cap
    vertex order.  Labels with identical coefficient columns are genuinely
    interchangeable, so signature sorting is a complete canonical form.
    """
    columns = []
    for label in range(num_labels):
        col = []
        for e in entries:
            if e[0] == "d1":
                col.append(-1 if (e[1] >> label) & 1 else 0)
            else:
                if e[1] == label:
                    col.append(1)
                elif (e[2] >> label) & 1:
                    col.append(-1)
                else:
                    col.append(0)
        columns.append(tuple(col))
    order = sorted(range(num_labels), key=lambda l: tuple((c == 0, -c) for c in columns[l]))
    relabel = {old: new + 1 for new, old in enumerate(order)}
    classes = [LatticeClass(1)]
    for e in entries:
        if e[0] == "d1":
            exc = {relabel[l]: -1 for l in range(num_labels) if (e[1] >> l) & 1}
            classes.append(LatticeClass(1, exc))
        else:
            exc = {relabel[l]: -1 for l in range(num_labels) if (e[2] >> l) & 1}
            exc[relabel[e[1]]] = 1
            classes.append(LatticeClass(0, exc))
    return tuple(classes)


def canonical_form(emb: CapEmbedding) -> CapEmbedding:
    """The canonical representative of emb under label permutation."""
    labels = sorted({l for cls in emb.classes for l in cls.labels()}, key=label_key)
    index = {l: i for i, l in enumerate(labels)}
    entries = []
    for v, cls in zip(emb.cap.vertices()[1:], emb.classes[1:]):
        neg = 0
        pos = None
        for l, c in cls.exc.items():
            if c == -1:
                neg |= 1 << index[l]
            elif c == 1:
                pos = index[l]
            else:
                raise ValueError("canonical_form expects homform-shaped classes")
        if v[1] == 1:
            entries.append(("d1", neg))
        else:
            entries.append(("dp", pos, neg))
    return CapEmbedding(emb.cap, _canonical_classes(entries, len(labels)))


def _embedding_key(emb: CapEmbedding):
    return tuple((cls.h, tuple(cls.exc.items())) for cls in emb.classes)


def _swap_arms(emb: CapEmbedding, j1: int, j2: int) -> CapEmbedding:
    """Exchange the class chains of two equal-chain arms (1-based)."""
    cap = emb.cap
    verts = cap.vertices()
    index = {v: k for k, v in enumerate(verts)}
    classes = list(emb.classes)
    for i in range(1, len(cap.arms[j1 - 1]) + 1):
        a, b = index[(j1, i)], index[(j2, i)]
        classes[a], classes[b] = classes[b], classes[a]
    return CapEmbedding(cap, tuple(classes))


def _group_by_arm_symmetry(cap: StarPlumbing, found: dict) -> list[CapEmbedding]:
    """Quotient the label-canonical embeddings by permutations of
    equal-weight arms.  The found set is closed under those permutations
    (the search is complete), so orbits are computed by closing under the
    transpositions that generate each block's symmetric group; each orbit is
    represented by its least serialization.
    """
    blocks: dict = {}
    for j, arm in enumerate(cap.arms, start=1):
        blocks.setdefault(arm, []).append(j)
    gens = [
        (block[i], block[i + 1])
        for block in blocks.values()
        for i in range(len(block) - 1)
    ]
    parent = {key: key for key in found}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for key, emb in found.items():
        for j1, j2 in gens:
            image = canonical_form(_swap_arms(emb, j1, j2))
            key2 = _embedding_key(image)
            if key2 not in parent:
                raise AssertionError("arm permutation left the enumerated set")
            ra, rb = find(key), find(key2)
            if ra != rb:
                parent[ra] = rb
    orbits: dict = {}
    for key, emb in found.items():
        orbits.setdefault(find(key), []).append((key, emb))
    reps = [min(members)[1] for members in orbits.values()]
    return sorted(reps, key=lambda e: (-e.N, _embedding_key(e)))


# -- pruned enumeration -------------------------------------------------------

def enumerate_embeddings(cap: StarPlumbing, max_nodes: int | None = None) -> list[CapEmbedding]:
    """All homological embeddings of the cap, one canonical representative
    per exceptional-label permutation class, deterministically ordered
    (descending N, then serialized form).

    Raises ResourceBudgetError when the node budget is exhausted rather
    than returning a truncated answer.
    """
    if cap.side != CAP or cap.center != 1:
        raise ValueError("enumerate_embeddings needs a cap-side plumbing with center +1")
    budget = _search_budget(max_nodes)
    arms = cap.arms

    # Depth-1 classes first (most constrained arm first), then each arm
    # outward.  Output is re-expressed in the cap's own vertex order.
    arm_order = sorted(range(len(arms)), key=lambda j: (1 - arms[j][0], j))
    schedule = [(j, 1) for j in arm_order]
    for j in arm_order:
        schedule.extend((j, i) for i in range(2, len(arms[j]) + 1))
    parent_pos = {}
    for k, (j, i) in enumerate(schedule):
        if i > 1:
            parent_pos[k] = schedule.index((j, i - 1))

    nodes = 0
    found = {}

    def note_node():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ResourceBudgetError(
                f"embedding search exhausted its budget of {budget} nodes"
            )

    def depth1_candidates(sets, m, next_label):
        # Reused labels must hit every earlier depth-1 class exactly once;
        # the remainder of the class is fresh labels.
        results = []
        prefix_union = [0]
        for s in sets:
            prefix_union.append(prefix_union[-1] | s)

        def rec(idx, reused, count):
            if idx == len(sets):
                results.append((reused, count))
                return
            s = sets[idx]
            inter = reused & s
            pc = _popcount(inter)
            if pc == 1:
                rec(idx + 1, reused, count)
            elif pc == 0 and count < m:
                cand = s & ~prefix_union[idx] & ~reused
                while cand:
                    low = cand & -cand
                    rec(idx + 1, reused | low, count + 1)
                    cand ^= low

        rec(0, 0, 0)
        out = []
        for reused, count in results:
            mask = reused
            for t in range(m - count):
                mask |= 1 << (next_label + t)
            out.append((("d1", mask), next_label + m - count))
        return out

    def deeper_candidates(assigned, parent_idx, t, next_label):
        # assigned: list of internal classes (search order); constraints are
        # the pairing targets (1 for the parent, 0 otherwise).  Fresh labels
        # never meet assigned classes, so only the reused part matters.
        d1 = [(k, e[1]) for k, e in enumerate(assigned) if e[0] == "d1"]
        dp = [(k, e[1], e[2]) for k, e in enumerate(assigned) if e[0] == "dp"]
        out = []
        for p in range(next_label + 1):
            p_fresh = p == next_label
            reqs = []
            ok = True
            for k, s in d1:
                target = 1 if k == parent_idx else 0
                req = (0 if p_fresh else (s >> p) & 1) - target
                if req < 0:
                    ok = False
                    break
                reqs.append((s, req))
            if not ok:
                continue

            def check_dp(reused):
                for k, q, u in dp:
                    target = 1 if k == parent_idx else 0
                    val = (
                        -(not p_fresh and p == q)
                        + (0 if p_fresh else (u >> p) & 1)
                        + ((reused >> q) & 1)
                        - _popcount(reused & u)
                    )
                    if val != target:
                        return False
                return True

            def rec(label, reused, count, counts):
                if label == next_label:
                    if all(c == r for (_, r), c in zip(reqs, counts)) and check_dp(reused):
                        fresh_base = next_label + (1 if p_fresh else 0)
                        mask = reused
                        for x in range(t - count):
                            mask |= 1 << (fresh_base + x)
                        out.append(
                            (
                                ("dp", p, mask),
                                fresh_base + t - count,
                            )
                        )
                    return
                rec(label + 1, reused, count, counts)
                if label != p and count < t:
                    new_counts = list(counts)
                    fits = True
                    for idx2, (s, req) in enumerate(reqs):
                        if (s >> label) & 1:
                            new_counts[idx2] += 1
                            if new_counts[idx2] > req:
                                fits = False
                                break
                    if fits:
                        rec(label + 1, reused | (1 << label), count + 1, new_counts)

            rec(0, 0, 0, [0] * len(reqs))
        return out

    def assign(pos, assigned, d1_sets, next_label):
        note_node()
        if pos == len(schedule):
            entries_by_vertex = {}
            for (j, i), e in zip(schedule, assigned):
                entries_by_vertex[(j + 1, i)] = e
            ordered = [entries_by_vertex[v] for v in cap.vertices()[1:]]
            classes = _canonical_classes(ordered, next_label)
            emb = CapEmbedding(cap, classes)
            found.setdefault(_embedding_key(emb), emb)
            return
        j, i = schedule[pos]
        w = arms[j][i - 1]
        if i == 1:
            for (entry, nl) in depth1_candidates(d1_sets, 1 - w, next_label):
                assign(pos + 1, assigned + [entry], d1_sets + [entry[1]], nl)
        else:
            t = -w - 1
            if t < 0:
                return
            for (entry, nl) in deeper_candidates(assigned, parent_pos[pos], t, next_label):
                assign(pos + 1, assigned + [entry], d1_sets, nl)

    assign(0, [], [], 0)
    return _group_by_arm_symmetry(cap, found)


# -- brute force oracle -------------------------------------------------------

def enumerate_embeddings_bruteforce(cap: StarPlumbing, max_nodes: int | None = None) -> list[CapEmbedding]:
    """Unpruned enumeration over all label partitions of the coefficient
    slots, filtered by the pairing equations as vertices complete.  Slow and
    deliberately structure-free; used to cross-check enumerate_embeddings."""
    if cap.side != CAP or cap.center != 1:
        raise ValueError("expected a cap-side plumbing with center +1")
    budget = _search_budget(max_nodes)
    verts = cap.vertices()[1:]
    mat = cap.intersection_matrix()
    vidx = {v: k for k, v in enumerate(cap.vertices())}

    # slot plan: per vertex a 'pos' slot (deeper only) then neg slots
    plan = []
    for v in verts:
        w = cap.weight(v)
        if v[1] == 1:
            plan.append((v, 0, 1 - w))
        else:
            if -w - 1 < 0:
                return []
            plan.append((v, 1, -w - 1))

    nodes = 0
    found = {}

    def pairing_target(u, v):
        return int(mat[vidx[u], vidx[v]])

    def complete_check(entries, new_entry, upto):
        v_new = verts[upto]
        for k in range(upto):
            if _pair_internal(entries[k], new_entry) != pairing_target(verts[k], v_new):
                return False
        # against the center: forced by shapes (h-coefficients), no check needed
        return True

    def rec(vi, entries, used):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ResourceBudgetError(
                f"brute-force search exhausted its budget of {budget} nodes"
            )
        if vi == len(plan):
            classes = _canonical_classes(entries, used)
            emb = CapEmbedding(cap, classes)
            found.setdefault(_embedding_key(emb), emb)
            return
        v, npos, nneg = plan[vi]

        def fill_neg(slot, start, neg, pos, used_now):
            if slot == nneg:
                entry = ("d1", neg) if npos == 0 else ("dp", pos, neg)
                if complete_check(entries, entry, vi):
                    rec(vi + 1, entries + [entry], used_now)
                return
            # strictly increasing labels inside a class: partitions of slots,
            # not sequences, are enumerated
            for lab in range(start, used_now + 1):
                if lab == pos:
                    continue
                fill_neg(slot + 1, lab + 1, neg | (1 << lab), pos, max(used_now, lab + 1))

        if npos:
            for pos in range(used + 1):
                fill_neg(0, 0, 0, pos, max(used, pos + 1))
        else:
            fill_neg(0, 0, 0, None, used)

    rec(0, [], 0)
    return _group_by_arm_symmetry(cap, found)


# -- per-embedding invariants -------------------------------------------------

def complement_euler(cap: StarPlumbing, emb: CapEmbedding) -> int:
    """Euler characteristic 2 + N - |cap| of the complementary filling."""
    _require_valid(cap, emb)
    return 2 + emb.N - cap.vertex_count


def complement_betti2(cap: StarPlumbing, emb: CapEmbedding) -> int:
    """Second Betti number of the complement (b0 = 1, b1 = b3 = 0)."""
    return complement_euler(cap, emb) - 1


def multiplicity_total(cap: StarPlumbing, emb: CapEmbedding) -> int:
    """Total exceptional coefficient count, with multiplicity."""
    return sum(abs(c) for cls in emb.classes for c in cls.exc.values())


@dataclass(frozen=True)
class StructureReport:
    """Pass/fail per structural lemma, with a witness string on failure."""

    results: tuple[tuple[str, bool, str | None], ...]

    @property
    def all_pass(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def failures(self) -> list[tuple[str, str]]:
        return [(name, witness or "") for name, ok, witness in self.results if not ok]

    def as_dict(self) -> dict:
        return {name: ok for name, ok, _ in self.results}


def check_structure(cap: StarPlumbing, emb: CapEmbedding) -> StructureReport:
    """Audit the structural constraints every valid embedding must satisfy:

    mixing       every two depth-1 classes share exactly one -1 label
    first        depth-2's +1 label sits in depth-1's class and nothing else
                 is shared between them
    consecutive  deeper neighbours pass their +1/-1 handoff rules
    pos          no label carries +1 in two different classes
    share2       non-adjacent sharing classes satisfy the two-way rule
    """
    _require_valid(cap, emb)
    verts = cap.vertices()[1:]
    info = {}
    for v, cls in zip(verts, emb.classes[1:]):
        pos = None
        negs = set()
        for l, c in cls.exc.items():
            if c == 1:
                pos = l
            else:
                negs.add(l)
        info[v] = (pos, negs)

    results = []

    witness = None
    ok = True
    depth1 = [v for v in verts if v[1] == 1]
    for a in range(len(depth1)):
        for b in range(a + 1, len(depth1)):
            shared = info[depth1[a]][1] & info[depth1[b]][1]
            if len(shared) != 1:
                ok, witness = False, f"{depth1[a]} and {depth1[b]} share {sorted(map(repr, shared))}"
    results.append(("mixing", ok, witness))

    ok, witness = True, None
    for j, arm in enumerate(cap.arms, start=1):
        if len(arm) < 2:
            continue
        p2, n2 = info[(j, 2)]
        p1, n1 = info[(j, 1)]
        labels1 = n1
        labels2 = n2 | {p2}
        if p2 not in n1 or labels1 & labels2 != {p2}:
            ok, witness = False, f"arm {j}: depth 1/2 share {sorted(map(repr, labels1 & labels2))}"
    results.append(("first", ok, witness))

    ok, witness = True, None
    for j, arm in enumerate(cap.arms, start=1):
        for i in range(2, len(arm)):
            pa, na = info[(j, i)]
            pb, nb = info[(j, i + 1)]
            fwd = pa in nb
            back = pb in na
            shared = len(na & nb)
            good = (fwd or back) and pa != pb and shared == (1 if (fwd and back) else 0)
            if not good:
                ok, witness = False, f"arm {j}, depths {i},{i + 1}"
    results.append(("consecutive", ok, witness))

    ok, witness = True, None
    seen = {}
    for v in verts:
        p = info[v][0]
        if p is not None:
            if p in seen:
                ok, witness = False, f"label {p!r} is +1 in {seen[p]} and {v}"
            seen[p] = v
    results.append(("pos", ok, witness))

    ok, witness = True, None
    for a in range(len(verts)):
        for b in range(a + 1, len(verts)):
            u, v = verts[a], verts[b]
            if u[1] == 1 and v[1] == 1:
                continue
            if u[0] == v[0] and abs(u[1] - v[1]) == 1:
                continue
            pu, nu = info[u]
            pv, nv = info[v]
            labels_u = nu | ({pu} if pu is not None else set())
            labels_v = nv | ({pv} if pv is not None else set())
            if not labels_u & labels_v:
                continue
            one = pu is not None and pu in nv
            two = pv is not None and pv in nu
            shared = len(nu & nv)
            good = (one or two) and shared == (2 if (one and two) else 1)
            if not good:
                ok, witness = False, f"{u} vs {v}"
    results.append(("share2", ok, witness))

    return StructureReport(tuple(results))
