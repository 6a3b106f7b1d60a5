"""Enumeration of decorated sphere graphs by admissible face refinement.

A sphere graph is stored as a rotation system: for each vertex, the
cyclic order of its neighbours.  Faces are the orbits of the face-tracing
map next(u,v) = (v, w) where w immediately precedes u in the rotation at
v.  Graphs are simple (no loops, no multiple joins) and every face is a
simple polygon of size >= 3; the Euler relation V - E + F = 2 is checked
on every constructed graph.

Each face carries an attribute: Modifiable (still under construction) or
Unmodifiable (committed).  A refinement step fixes, per graph, the
lexicographically least modifiable face P and its least edge, then
inserts every admissible polygon Q through that edge: Q's vertices are
vertices of P or new interior vertices, Q shares the fixed edge, the
inserted Q becomes Unmodifiable and the remaining pieces of P become
Modifiable.  The P = Q case just flips the attribute.  Fixing the face
and edge loses no terminal classes, and every graph whose largest face
has k edges is reached from the k-gon seed, so seeds honour the
largest-initial-polygon rule via a cheap terminal filter.

Generation deduplicates at every level with a canonical form that is
invariant under embedding-preserving isomorphism including reflection,
and includes the face attributes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

__all__ = [
    "DecoratedGraph",
    "GeneratorConfig",
    "GenerationResult",
    "TerminalRecord",
    "RefinementStep",
    "seed_graph",
    "seed_graphs",
    "admissible_refinements",
    "refinements_with_steps",
    "apply_step",
    "replay_path",
    "canonical_form",
    "generate",
    "compile_prune_spec",
]

Dart = tuple[int, int]
FaceKey = tuple[Dart, ...]


def _canon_cycle(cycle: list[Dart]) -> FaceKey:
    i = cycle.index(min(cycle))
    return tuple(cycle[i:] + cycle[:i])


def _faces_of_rotation(rot: Sequence[Sequence[int]]) -> list[FaceKey]:
    index = {}
    for u, nbrs in enumerate(rot):
        for pos, v in enumerate(nbrs):
            index[(u, v)] = pos
    seen = set()
    faces = []
    for u in range(len(rot)):
        for v in rot[u]:
            start = (u, v)
            if start in seen:
                continue
            cycle = []
            cur = start
            while cur not in seen:
                seen.add(cur)
                cycle.append(cur)
                a, b = cur
                nbrs = rot[b]
                w = nbrs[(index[(b, a)] - 1) % len(nbrs)]
                cur = (b, w)
            faces.append(_canon_cycle(cycle))
    return faces


@dataclass(frozen=True, slots=True)
class DecoratedGraph:
    """Immutable decorated sphere graph.

    rot[v] is the cyclic neighbour order at vertex v; modifiable_faces is
    the set of face keys (canonical dart cycles) still open to
    refinement.  All derived structure (faces, Euler check, simplicity)
    is validated at construction."""

    rot: tuple[tuple[int, ...], ...]
    modifiable_faces: frozenset

    def __post_init__(self):
        rot = self.rot
        nv = len(rot)
        if nv == 0:
            raise ValueError("graph must be nonempty")
        seen_edges = set()
        for u, nbrs in enumerate(rot):
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"vertex {u}: repeated neighbour (multi-join)")
            for v in nbrs:
                if v == u:
                    raise ValueError(f"vertex {u}: loop")
                if not (0 <= v < nv):
                    raise ValueError(f"vertex {u}: neighbour {v} out of range")
                seen_edges.add((u, v))
        for (u, v) in seen_edges:
            if (v, u) not in seen_edges:
                raise ValueError(f"dart ({u},{v}) lacks its reverse")
        faces = _faces_of_rotation(rot)
        ne = len(seen_edges) // 2
        if nv - ne + len(faces) != 2:
            raise ValueError(
                f"not a sphere embedding: V-E+F = {nv}-{ne}+{len(faces)}")
        for f in faces:
            if len(f) < 3:
                raise ValueError(f"face {f} has fewer than 3 sides")
            verts = [d[0] for d in f]
            if len(set(verts)) != len(verts):
                raise ValueError(f"face {f} is not a simple polygon")
        face_set = set(faces)
        for key in self.modifiable_faces:
            if key not in face_set:
                raise ValueError(f"modifiable face {key} is not a face")

    # -- derived structure ------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.rot)

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.rot) // 2

    def faces(self) -> list[FaceKey]:
        return sorted(_faces_of_rotation(self.rot))

    def face_sizes(self) -> list[int]:
        return sorted(len(f) for f in _faces_of_rotation(self.rot))

    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.rot]

    def unmodifiable_faces(self) -> list[FaceKey]:
        return sorted(set(_faces_of_rotation(self.rot)) - self.modifiable_faces)

    @property
    def is_terminal(self) -> bool:
        return not self.modifiable_faces

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.rot[u]


# ---------------------------------------------------------------------------
# Seeds
# ---------------------------------------------------------------------------

def seed_graph(k: int) -> DecoratedGraph:
    """k-cycle with the face through dart (0,1) modifiable and the other
    side unmodifiable."""
    if k < 3:
        raise ValueError("polygon seeds need k >= 3")
    rot = tuple(((i - 1) % k, (i + 1) % k) for i in range(k))
    faces = _faces_of_rotation(rot)
    assert len(faces) == 2
    inner = next(f for f in faces if (0, 1) in f)
    return DecoratedGraph(rot, frozenset([inner]))


def seed_graphs(n_max: int) -> list[DecoratedGraph]:
    """One seed per polygon size 3..N (the initial polygon is the face
    with the most edges of whatever terminal it leads to)."""
    if n_max < 3:
        raise ValueError("N must be >= 3")
    return [seed_graph(k) for k in range(3, n_max + 1)]


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class RefinementStep:
    """Replayable descriptor of one refinement: indices (into the fixed
    face's boundary) of the polygon vertices kept from P, and the number
    of new interior vertices inserted in each gap after them.  The fixed
    face and edge are canonical per graph, so the step is self-contained.
    The P = Q attribute flip is keep=all, news=zeros."""

    keep: tuple[int, ...]
    news: tuple[int, ...]


def _fixed_face_and_edge(g: DecoratedGraph) -> FaceKey:
    """The canonical modifiable face; its fixed edge is the face key's
    first dart (the least dart of the cycle)."""
    if not g.modifiable_faces:
        raise ValueError("graph has no modifiable face")
    return min(g.modifiable_faces)


def _enumerate_steps(g: DecoratedGraph, budget: int) -> list[RefinementStep]:
    """All admissible steps through the fixed face/edge, newest-vertex
    budget respected, simplicity enforced combinatorially."""
    face = _fixed_face_and_edge(g)
    k = len(face)
    bverts = [d[0] for d in face]
    steps = []

    def gaps_of(keep: tuple[int, ...]) -> list[tuple[int, int]]:
        # vertex-index pairs (a, b) for each gap: after keep[1], ..., closing
        out = []
        for t in range(1, len(keep)):
            out.append((keep[t], keep[(t + 1) % len(keep)] if t + 1 < len(keep) else keep[0]))
        return out

    def chord_ok(a_idx: int, b_idx: int) -> bool:
        # a gap crossed directly: adjacent boundary positions reuse the
        # existing edge; otherwise a new chord must not already exist
        if (a_idx + 1) % k == b_idx:
            return True
        return not g.has_edge(bverts[a_idx], bverts[b_idx])

    # choose keep = (0, 1, then any subset of 2..k-1)
    rest = list(range(2, k))
    for mask in range(1 << len(rest)):
        keep = [0, 1] + [rest[i] for i in range(len(rest)) if (mask >> i) & 1]
        gaps = gaps_of(tuple(keep))
        # distribute new vertices: news[t] >= 0 per gap, sum <= budget
        def rec(t: int, remaining: int, news: list[int]):
            if t == len(gaps):
                kt = tuple(keep)
                nt = tuple(news)
                if len(keep) == k and sum(news) == 0:
                    steps.append(RefinementStep(kt, nt))  # P = Q flip
                    return
                if len(keep) + sum(news) < 3:
                    return  # Q must be a simple polygon
                ok = True
                for (a, b), j in zip(gaps, news):
                    if j == 0 and not chord_ok(a, b):
                        ok = False
                        break
                if ok:
                    steps.append(RefinementStep(kt, nt))
                return
            a, b = gaps[t]
            limit = remaining
            for j in range(limit + 1):
                news.append(j)
                rec(t + 1, remaining - j, news)
                news.pop()
        rec(0, budget, [])
    steps.sort(key=lambda s: (len(s.keep), s.keep, s.news))
    return steps


def apply_step(g: DecoratedGraph, step: RefinementStep) -> DecoratedGraph:
    """Insert the polygon Q described by the step into the fixed face."""
    face = _fixed_face_and_edge(g)
    k = len(face)
    bverts = [d[0] for d in face]
    keep = step.keep
    if keep[:2] != (0, 1) or list(keep) != sorted(keep) or keep[-1] >= k:
        raise ValueError(f"malformed step {step}")
    if len(step.news) != len(keep) - 1:
        raise ValueError(f"step has {len(step.news)} gaps, expected {len(keep) - 1}")

    old_faces = set(_faces_of_rotation(g.rot))
    if len(keep) == k and sum(step.news) == 0:
        # attribute flip
        return DecoratedGraph(g.rot, g.modifiable_faces - {face})

    nv = g.n_vertices
    rot = [list(nbrs) for nbrs in g.rot]

    # Build Q's vertex cycle: kept boundary vertices with new-vertex runs
    # in each gap, consistent with P's boundary orientation.
    qcycle: list[int] = [bverts[0], bverts[1]]
    new_ids: list[int] = []
    next_id = nv
    for t in range(1, len(keep)):
        for _ in range(step.news[t - 1]):
            qcycle.append(next_id)
            new_ids.append(next_id)
            next_id += 1
        if t + 1 < len(keep):
            qcycle.append(bverts[keep[t + 1]])
    # trailing run of the closing gap was appended above when t+1 == len(keep)
    m = len(qcycle)

    for v in new_ids:
        rot.append([])

    pos_in_keep = {bverts[idx]: idx for idx in keep}
    succ = {bverts[i]: bverts[(i + 1) % k] for i in range(k)}
    pred = {bverts[i]: bverts[(i - 1) % k] for i in range(k)}

    for t, vert in enumerate(qcycle):
        qprev = qcycle[(t - 1) % m]
        qnext = qcycle[(t + 1) % m]
        if vert >= nv:
            rot[vert] = [qprev, qnext]
            continue
        inserts = []
        if qnext != succ[vert]:
            inserts.append(qnext)
        if qprev != pred[vert]:
            inserts.append(qprev)
        if not inserts:
            continue
        at = rot[vert].index(pred[vert])
        rot[vert][at:at] = inserts

    rot_t = tuple(tuple(nbrs) for nbrs in rot)
    q_key = None
    new_faces = _faces_of_rotation(rot_t)
    qset = set(qcycle)
    for f in new_faces:
        fverts = [d[0] for d in f]
        if len(fverts) == m and set(fverts) == qset and f not in old_faces:
            q_key = f
            break
    if q_key is None:
        raise AssertionError(f"inserted polygon not found as a face ({step})")
    survivors = set(new_faces)
    kept_unmod = {f for f in old_faces - g.modifiable_faces}
    if not kept_unmod <= survivors:
        raise AssertionError("refinement disturbed an unmodifiable face")
    modifiable = survivors - kept_unmod - {q_key}
    return DecoratedGraph(rot_t, frozenset(modifiable))


def refinements_with_steps(g: DecoratedGraph, n_max: int) -> list[tuple[RefinementStep, DecoratedGraph]]:
    budget = n_max - g.n_vertices
    out = []
    for step in _enumerate_steps(g, budget):
        out.append((step, apply_step(g, step)))
    return out


def admissible_refinements(g: DecoratedGraph, cfg: "GeneratorConfig") -> list[DecoratedGraph]:
    """Every compatibly decorated refinement through the canonical
    modifiable face and edge, within the vertex budget, pruned."""
    out = []
    for _step, child in refinements_with_steps(g, cfg.n_max):
        if cfg.prune(child):
            out.append(child)
    return out


def replay_path(path: Sequence) -> DecoratedGraph:
    """Rebuild a graph from its recorded derivation: (seed_k, step, step, ...)."""
    g = seed_graph(path[0])
    for step in path[1:]:
        g = apply_step(g, step)
    return g


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

def _encode_from(rot: Sequence[Sequence[int]], start: Dart, mirror: bool) -> tuple[str, dict]:
    """Breadth-first canonical labelling from a root dart; returns the
    encoding and the old->new label map."""
    label = {start[0]: 0}
    order = [start[0]]
    first_nbr = {start[0]: start[1]}
    out = []
    qi = 0
    while qi < len(order):
        u = order[qi]
        qi += 1
        nbrs = rot[u]
        deg = len(nbrs)
        anchor = first_nbr[u]
        ai = nbrs.index(anchor)
        seq = [nbrs[(ai + (-(t) if mirror else t)) % deg] for t in range(deg)]
        row = []
        for v in seq:
            if v not in label:
                label[v] = len(order)
                order.append(v)
                first_nbr[v] = u
            row.append(label[v])
        out.append(str(deg) + ":" + ",".join(map(str, row)))
    if len(order) != len(rot):
        raise ValueError("graph is not connected")
    return ";".join(out), label


def canonical_form(g: DecoratedGraph) -> str:
    """Label string invariant under embedding-preserving isomorphism,
    including reflection, and sensitive to face attributes: the
    lexicographic minimum over all starting darts and both orientations
    of a rotation-order traversal encoding plus the attribute flags."""
    faces = _faces_of_rotation(g.rot)
    dart_face = {}
    for fi, f in enumerate(faces):
        for d in f:
            dart_face[d] = fi
    flags = ["M" if f in g.modifiable_faces else "U" for f in faces]

    best = None
    for u in range(g.n_vertices):
        for v in g.rot[u]:
            for mirror in (False, True):
                enc, label = _encode_from(g.rot, (u, v), mirror)
                inv = {new: old for old, new in label.items()}
                relabeled_rot = []
                for new in range(g.n_vertices):
                    old = inv[new]
                    nbrs = [label[w] for w in g.rot[old]]
                    if mirror:
                        nbrs = nbrs[::-1]
                    relabeled_rot.append(tuple(nbrs))
                rel_faces = _faces_of_rotation(relabeled_rot)
                attr = []
                for f in sorted(rel_faces):
                    a, b = f[0]
                    orig = (inv[a], inv[b])
                    attr.append(flags[dart_face[orig]])
                cand = enc + "|" + "".join(attr)
                if best is None or cand < best:
                    best = cand
    return best


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def _accept_all(_g: DecoratedGraph) -> bool:
    return True


@dataclass(frozen=True, slots=True)
class GeneratorConfig:
    n_max: int
    prune: Callable[[DecoratedGraph], bool] = _accept_all
    collect: Optional[Callable[["TerminalRecord"], None]] = None
    max_states: int = 500_000

    def __post_init__(self):
        if self.n_max < 3:
            raise ValueError("N must be >= 3")


@dataclass(frozen=True, slots=True)
class TerminalRecord:
    graph: DecoratedGraph
    canonical: str
    path: tuple


@dataclass(frozen=True, slots=True)
class GenerationResult:
    terminals: tuple[TerminalRecord, ...]
    complete: bool
    states_explored: int

    def canonical_strings(self) -> list[str]:
        return [t.canonical for t in self.terminals]


def generate(cfg: GeneratorConfig) -> GenerationResult:
    """Exhaustive set of terminal isomorphism classes with <= N vertices
    surviving pruning.  Deterministic: output sorted by canonical string."""
    stack = []
    seen: set[tuple[str, int]] = set()
    for seed_k in range(cfg.n_max, 2, -1):
        g = seed_graph(seed_k)
        if cfg.prune(g):
            stack.append((g, seed_k, (seed_k,)))
    terminals: dict[str, TerminalRecord] = {}
    states = 0
    complete = True
    while stack:
        if states >= cfg.max_states:
            complete = False
            break
        g, seed_k, path = stack.pop()
        states += 1
        if g.is_terminal:
            if max(len(f) for f in _faces_of_rotation(g.rot)) > seed_k:
                continue
            canon = canonical_form(g)
            if canon not in terminals:
                rec = TerminalRecord(g, canon, path)
                terminals[canon] = rec
                if cfg.collect is not None:
                    cfg.collect(rec)
            continue
        for step, child in refinements_with_steps(g, cfg.n_max):
            if not cfg.prune(child):
                continue
            key = (canonical_form(child), seed_k)
            if key in seen:
                continue
            seen.add(key)
            stack.append((child, seed_k, path + (step,)))
    ordered = tuple(terminals[k] for k in sorted(terminals))
    return GenerationResult(ordered, complete, states)


# ---------------------------------------------------------------------------
# Prune-spec mini-language
# ---------------------------------------------------------------------------

def compile_prune_spec(spec: str) -> Callable[[DecoratedGraph], bool]:
    """Compile a prune specification into a predicate.

    Comma-separated clauses:
      all-triangles      committed faces are triangles; terminal graphs
                         must additionally be honest triangulations
                         (minimum degree 3)
      max-face-size=K    committed (unmodifiable) faces have <= K sides
      max-degree=K       vertex degrees stay <= K
      max-faces=K        total face count stays <= K

    All clauses are monotone along refinement paths (a violating graph
    has no clean descendants), so pruning mid-generation is safe.
    """
    max_face: Optional[int] = None
    max_degree: Optional[int] = None
    max_faces: Optional[int] = None
    triangulation = False
    for clause in spec.split(","):
        clause = clause.strip()
        if not clause:
            continue
        if clause == "all-triangles":
            triangulation = True
            max_face = 3 if max_face is None else min(max_face, 3)
        elif clause.startswith("max-face-size="):
            max_face_val = int(clause.split("=", 1)[1])
            max_face = max_face_val if max_face is None else min(max_face, max_face_val)
        elif clause.startswith("max-degree="):
            max_degree = int(clause.split("=", 1)[1])
        elif clause.startswith("max-faces="):
            max_faces = int(clause.split("=", 1)[1])
        else:
            raise ValueError(f"unknown prune clause {clause!r}")

    def predicate(g: DecoratedGraph) -> bool:
        if max_face is not None:
            for f in g.unmodifiable_faces():
                if len(f) > max_face:
                    return False
        if max_degree is not None and any(d > max_degree for d in g.degrees()):
            return False
        if max_faces is not None and len(_faces_of_rotation(g.rot)) > max_faces:
            return False
        if triangulation and g.is_terminal and any(d < 3 for d in g.degrees()):
            return False
        return True

    return predicate
