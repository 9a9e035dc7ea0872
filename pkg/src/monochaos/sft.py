"""Exact finite-resolution checks of Devaney's conditions and Touhey's criterion
on subshifts of finite type.

A SymbolGraph is a directed multigraph; the shift space is the set of
one-sided infinite edge walks, each edge being one symbol. Open sets are
cylinders [u] for admissible words u of length <= L, periodic points are
repetitions w^inf of closed walks w of length <= P, and the metric is
d(x, y) = 2^-(first index where x and y differ).
"""
from __future__ import annotations

import itertools
import json
import os
import string
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

SYMBOLS = string.digits + string.ascii_letters
DEFAULT_MAX_STATES = 10**7


def max_states() -> int:
    return int(float(os.environ.get("MONOCHAOS_MAX_STATES", DEFAULT_MAX_STATES)))


class ResourceCapExceeded(RuntimeError):
    pass


class SymbolGraph:
    """Essential directed multigraph; vertices that cannot lie on a bi-infinite walk are pruned."""

    def __init__(self, vertices: int, edges):
        self.n_input_vertices = int(vertices)
        edges = [tuple(map(int, e)) for e in edges]
        for s, t in edges:
            if not (0 <= s < vertices and 0 <= t < vertices):
                raise ValueError(f"edge {(s, t)} references a vertex outside 0..{vertices - 1}")
        alive = set(range(vertices))
        live_edges = list(edges)
        while True:
            outs = {s for s, t in live_edges}
            ins = {t for s, t in live_edges}
            keep = alive & outs & ins
            if keep == alive:
                break
            alive = keep
            live_edges = [(s, t) for s, t in live_edges if s in alive and t in alive]
        self.vertices = sorted(alive)
        self.edges = sorted(live_edges)
        self.pruned_vertices = sorted(set(range(vertices)) - alive)
        self.pruned_edges = len(edges) - len(self.edges)
        if len(self.edges) > len(SYMBOLS):
            raise ValueError(f"at most {len(SYMBOLS)} edges are supported")
        self.follow = [
            tuple(f for f, (s2, _) in enumerate(self.edges) if s2 == t) for _, t in self.edges
        ]

    @classmethod
    def from_dict(cls, d) -> "SymbolGraph":
        return cls(d["vertices"], d["edges"])

    @classmethod
    def load(cls, path) -> "SymbolGraph":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"vertices": self.n_input_vertices, "edges": [list(e) for e in self.edges]}

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def word(self, w) -> str:
        return "".join(SYMBOLS[e] for e in w)

    def unword(self, s: str) -> tuple:
        return tuple(SYMBOLS.index(c) for c in s)

    def admissible(self, w) -> bool:
        return all(0 <= e < self.n_edges for e in w) and all(
            b in self.follow[a] for a, b in zip(w, w[1:]))

    def closed(self, w) -> bool:
        return len(w) > 0 and self.admissible(w) and w[0] in self.follow[w[-1]]

    def digraph(self) -> nx.MultiDiGraph:
        G = nx.MultiDiGraph()
        G.add_nodes_from(self.vertices)
        G.add_edges_from(self.edges)
        return G

    def __repr__(self):
        return f"SymbolGraph(vertices={self.n_input_vertices}, edges={self.edges})"


def _words(g: SymbolGraph, L: int) -> list:
    """All admissible words of length 1..L, shortest first."""
    out = []
    layer = [(e,) for e in range(g.n_edges)]
    cap = max_states()
    for _ in range(L):
        out.extend(layer)
        if len(out) > cap:
            raise ResourceCapExceeded(f"more than {cap} words")
        layer = [w + (f,) for w in layer for f in g.follow[w[-1]]]
    return out


def _closed_words(g: SymbolGraph, P: int) -> list:
    return [w for w in _words(g, P) if w[0] in g.follow[w[-1]]]


def _primitive(w) -> bool:
    n = len(w)
    return not any(n % d == 0 and w == w[:d] * (n // d) for d in range(1, n))


def _cyclic_factors(w, L: int) -> set:
    """Words of length <= L occurring in w^inf."""
    rep = w * (L // len(w) + 2)
    return {rep[i:i + k] for i in range(len(w)) for k in range(1, L + 1)}


def _is_lyndon(w) -> bool:
    """Strictly smaller than all its proper rotations (Duval's scan)."""
    n = len(w)
    k, j = 0, 1
    while j < n and w[k] <= w[j]:
        k = 0 if w[k] < w[j] else k + 1
        j += 1
    return j == n and j - k == n


def _orbits(g: SymbolGraph, P: int) -> list:
    """Periodic orbits of period <= P, each as its Lyndon (least-rotation) word.

    Every symbol of a Lyndon word is >= its first symbol, which prunes the walk search.
    """
    cap = max_states()
    orbits = []
    visited = 0
    for s in range(g.n_edges):
        stack = [(s,)]
        while stack:
            w = stack.pop()
            visited += 1
            if visited > cap:
                raise ResourceCapExceeded(f"more than {cap} walks while enumerating periodic orbits")
            if s in g.follow[w[-1]] and _is_lyndon(w):
                orbits.append(w)
            if len(w) < P:
                stack.extend(w + (f,) for f in g.follow[w[-1]] if f >= s)
    orbits.sort(key=lambda w: (len(w), w))
    return orbits


def _count_words(g: SymbolGraph, k: int) -> int:
    counts = [1] * g.n_edges
    for _ in range(k - 1):
        counts = [sum(counts[f] for f in g.follow[e]) for e in range(g.n_edges)]
    return sum(counts)


def _count_fixed(g: SymbolGraph, k: int) -> int:
    """Number of points x with shift^k x = x (closed walks of length k)."""
    total = 0
    for start in range(g.n_edges):
        counts = {start: 1}
        for _ in range(k - 1):
            nxt = {}
            for e, c in counts.items():
                for f in g.follow[e]:
                    nxt[f] = nxt.get(f, 0) + c
            counts = nxt
        total += sum(c for e, c in counts.items() if start in g.follow[e])
    return total


def _path_between(g: SymbolGraph, a: int, b: int) -> Optional[tuple]:
    """Shortest edge sequence p with a p b admissible (p may be empty), or None."""
    if b in g.follow[a]:
        return ()
    prev = {}
    q = deque()
    for f in g.follow[a]:
        prev[f] = None
        q.append(f)
    while q:
        e = q.popleft()
        if b in g.follow[e]:
            path = [e]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return tuple(reversed(path))
        for f in g.follow[e]:
            if f not in prev:
                prev[f] = e
                q.append(f)
    return None


@dataclass
class TransitivityResult:
    holds: bool
    walk: str = ""
    pair: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def is_transitive(g: SymbolGraph) -> TransitivityResult:
    """Strong connectivity of the essential graph.

    Witness: a closed walk through every edge, or a vertex pair (u, v) with no
    path from u to v.
    """
    if g.is_empty:
        raise ValueError("empty graph")
    G = g.digraph()
    if nx.is_strongly_connected(G):
        walk = [0]
        for e in range(1, g.n_edges):
            if e in walk:
                continue
            walk.extend(_path_between(g, walk[-1], e) + (e,))
        walk.extend(_path_between(g, walk[-1], walk[0]))
        return TransitivityResult(True, g.word(walk))
    for u in g.vertices:
        reach = nx.descendants(G, u) | {u}
        for v in g.vertices:
            if v not in reach:
                return TransitivityResult(False, pair=(u, v))
    raise AssertionError("not strongly connected but every pair reachable")


@dataclass
class CylinderVerdict:
    L: int
    P: int
    verdicts: dict
    witnesses: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    partial: bool = False

    @property
    def chaotic(self) -> bool:
        return all(self.verdicts.get(k, False) for k in
                   ("dense_periodic", "transitive", "sensitive", "nondiscrete"))

    def __getitem__(self, k):
        return self.verdicts[k]

    def to_dict(self) -> dict:
        return {"L": self.L, "P": self.P, "verdicts": dict(self.verdicts),
                "chaotic": self.chaotic if "touhey" not in self.verdicts else None,
                "witnesses": self.witnesses, "counts": self.counts, "partial": self.partial}


def _check_resolution(L, P):
    if L < 1 or P < 1:
        raise ValueError("L and P must be at least 1")


def _partial_verdict(L, P, names, exc) -> CylinderVerdict:
    return CylinderVerdict(L, P, {k: None for k in names}, {"error": str(exc)}, partial=True)


def devaney_check_bruteforce(g: SymbolGraph, L: int, P: int) -> CylinderVerdict:
    """Decide Devaney's three conditions plus nondiscreteness at resolution (L, P).

    * dense periodic: every cylinder of length <= L holds a point of period <= P;
    * transitive: a single walk, closed up through the graph, visits every
      cylinder (its periodic repetition is a point whose orbit meets them all);
    * sensitive: every cylinder contains two points first differing at an
      index <= L + P, so some shift separates them by at least 2^-L;
    * nondiscrete: the word count grows from length L+P-1 to L+P; an
      essential shift with no growth at some length is finite.
    """
    _check_resolution(L, P)
    names = ("dense_periodic", "transitive", "sensitive", "nondiscrete")
    try:
        cylinders = _words(g, L)
        orbits = _orbits(g, P)
    except ResourceCapExceeded as exc:
        return _partial_verdict(L, P, names, exc)
    verdicts, wit = {}, {}

    # dense periodic points
    covered = {}
    for w in orbits:
        for r in range(len(w)):
            rot = w[r:] + w[:r]
            rep = rot * (L // len(rot) + 1)
            for k in range(1, L + 1):
                covered.setdefault(rep[:k], rot)
    missing = [u for u in cylinders if u not in covered]
    verdicts["dense_periodic"] = not missing
    wit["dense_periodic"] = ({"missing_cylinder": g.word(missing[0])} if missing else
                             {g.word(u): g.word(covered[u]) for u in cylinders})

    # transitivity via one closed covering walk
    targets = [u for u in cylinders if len(u) == L]
    walk = list(targets[0])
    seen = set()
    ok, fail = True, None

    def note_windows(start):
        for i in range(max(0, start), len(walk) - L + 1):
            seen.add(tuple(walk[i:i + L]))

    note_windows(0)
    for u in targets:
        if u in seen:
            continue
        p = _path_between(g, walk[-1], u[0])
        if p is None:
            ok, fail = False, (g.word(walk[-1:]), g.word(u))
            break
        start = len(walk) - L + 1
        walk.extend(p + u)
        note_windows(start)
    if ok:
        back = _path_between(g, walk[-1], walk[0])
        if back is None:
            ok, fail = False, (g.word(walk[-1:]), g.word(walk[:1]))
        else:
            walk.extend(back)
    verdicts["transitive"] = ok
    wit["transitive"] = {"walk": g.word(walk)} if ok else {"unreachable": list(fail)}

    # sensitivity: a branching point within reach of every cylinder
    limit = L + P
    sens_ok, sens_w, sens_fail = True, {}, None
    for u in cylinders:
        found = None
        q = deque([u])
        while q and found is None:
            w = q.popleft()
            nxt = g.follow[w[-1]]
            if len(w) + 1 > limit + 1:
                continue
            if len(nxt) >= 2:
                found = (w + (nxt[0],), w + (nxt[1],))
                break
            for f in nxt:
                q.append(w + (f,))
        if found is None:
            sens_ok, sens_fail = False, g.word(u)
            break
        sens_w[g.word(u)] = [g.word(found[0]), g.word(found[1])]
    verdicts["sensitive"] = sens_ok
    wit["sensitive"] = sens_w if sens_ok else {"rigid_cylinder": sens_fail}
    wit["delta"] = 2.0 ** (-L)

    # nondiscreteness
    c_prev, c_last = _count_words(g, L + P - 1), _count_words(g, L + P)
    verdicts["nondiscrete"] = c_last > c_prev
    counts = {
        "cylinders": len(cylinders),
        "periodic_orbits": len(orbits),
        f"words_len_{L + P - 1}": c_prev,
        f"words_len_{L + P}": c_last,
        "periodic_points_by_period": {p: _count_fixed(g, p) for p in range(1, P + 1)},
    }
    return CylinderVerdict(L, P, verdicts, wit, counts)


def touhey_check(g: SymbolGraph, L: int, P: int) -> CylinderVerdict:
    """Every ordered pair of cylinders (length <= L) meets a common orbit of period <= P."""
    _check_resolution(L, P)
    try:
        cylinders = _words(g, L)
        orbits = _orbits(g, P)
        if len(cylinders) ** 2 > max_states():
            raise ResourceCapExceeded(f"{len(cylinders) ** 2} cylinder pairs")
    except ResourceCapExceeded as exc:
        return _partial_verdict(L, P, ("touhey",), exc)
    index = {u: i for i, u in enumerate(cylinders)}
    masks = []
    for w in orbits:
        m = 0
        for u in _cyclic_factors(w, L):
            if u in index:
                m |= 1 << index[u]
        masks.append(m)
    full = (1 << len(cylinders)) - 1
    witnesses = {}
    for i, u in enumerate(cylinders):
        reach = 0
        bit = 1 << i
        for w, m in zip(orbits, masks):
            if m & bit:
                new = m & ~reach
                reach |= m
                while new:
                    j = (new & -new).bit_length() - 1
                    witnesses[(g.word(u), g.word(cylinders[j]))] = g.word(w)
                    new &= new - 1
        if reach != full:
            j = next(k for k in range(len(cylinders)) if not reach >> k & 1)
            return CylinderVerdict(L, P, {"touhey": False},
                                   {"failing_pair": [g.word(u), g.word(cylinders[j])]},
                                   {"cylinders": len(cylinders), "periodic_orbits": len(orbits)})
    return CylinderVerdict(L, P, {"touhey": True},
                           {f"{a}|{b}": w for (a, b), w in witnesses.items()},
                           {"cylinders": len(cylinders), "periodic_orbits": len(orbits)})


def replay_periodic(g: SymbolGraph, word: str, cylinders) -> bool:
    """Independent check that `word` is a closed walk of exact period len(word)
    whose shift orbit visits every cylinder in `cylinders`."""
    w = g.unword(word)
    if not g.closed(w) or not _primitive(w):
        return False
    rep = word * (max((len(c) for c in cylinders), default=1) // len(word) + 2)
    return all(any(rep[i:].startswith(c) for i in range(len(word))) for c in cylinders)


def replay_transitive_walk(g: SymbolGraph, walk: str, L: int) -> bool:
    """The closed walk, repeated forever, visits every admissible word of length L."""
    w = g.unword(walk)
    if not g.closed(w):
        return False
    rep = walk * (L // len(walk) + 2)
    windows = {rep[i:i + L] for i in range(len(walk))}
    return all(g.word(u) in windows for u in _words(g, L) if len(u) == L)


def single_orbit_graph(g: SymbolGraph) -> bool:
    """The shift is one periodic orbit: strongly connected with every out-degree one."""
    return (not g.is_empty and nx.is_strongly_connected(g.digraph())
            and all(len(f) == 1 for f in g.follow))


def enumerate_graphs(max_vertices: int, max_edges: int, max_multiplicity: int = 2):
    """Essential multigraphs, up to edge-multiset identity, in lexicographic order."""
    for V in range(1, max_vertices + 1):
        slots = [(s, t) for s in range(V) for t in range(V)]
        for mult in itertools.product(range(max_multiplicity + 1), repeat=len(slots)):
            total = sum(mult)
            if total == 0 or total > max_edges:
                continue
            edges = [st for st, m in zip(slots, mult) for _ in range(m)]
            outs = {s for s, _ in edges}
            ins = {t for _, t in edges}
            if len(outs) == V and len(ins) == V:
                yield SymbolGraph(V, edges)


def equivalence_scan(max_vertices: int, max_edges: int, L: int, P: int,
                     max_multiplicity: int = 2) -> dict:
    """Compare Touhey's criterion against the four-condition conjunction on every graph."""
    if max_vertices > 4:
        raise ValueError("equivalence_scan is desk-scale: max_vertices <= 4")
    total = agree = 0
    disagreements, single_orbit, inconsistent, partial = [], [], [], []
    for g in enumerate_graphs(max_vertices, max_edges, max_multiplicity):
        total += 1
        dv = devaney_check_bruteforce(g, L, P)
        tv = touhey_check(g, L, P)
        if dv.partial or tv.partial:
            partial.append(g.to_dict())
            continue
        if bool(is_transitive(g)) != dv["transitive"]:
            inconsistent.append(g.to_dict())
        entry = {"graph": g.to_dict(), "touhey": tv["touhey"], "devaney": dv.chaotic,
                 "verdicts": dv.verdicts}
        if dv["dense_periodic"] and dv["transitive"] and not dv["nondiscrete"]:
            single_orbit.append(entry)
            continue
        if tv["touhey"] == dv.chaotic:
            agree += 1
        else:
            disagreements.append(entry)
    return {
        "max_vertices": max_vertices, "max_edges": max_edges, "max_multiplicity": max_multiplicity,
        "L": L, "P": P, "graphs": total, "agreements": agree,
        "disagreements": disagreements, "single_orbit_bucket": single_orbit,
        "transitivity_inconsistencies": inconsistent, "partial": partial,
    }
