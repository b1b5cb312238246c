"""Weighted stable dual graphs and their contraction poset.

A graph records nonnegative integer genus weights on vertices, a multiset of
edges (loops allowed), and labelled tails.  The module provides genus and
stability tests, simultaneous edge contraction, canonical forms up to
isomorphism fixing the tails pointwise, automorphism groups, exhaustive
enumeration for a type (g, n), and the poset of isomorphism classes ordered
by contraction together with its layer decomposition.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field


class GraphError(ValueError):
    pass


class ConnectivityError(GraphError):
    pass


class StabilityError(GraphError):
    pass


@dataclass(frozen=True)
class StableGraph:
    """A weighted dual graph.

    ``genera[v]`` is the genus weight of vertex ``v`` (vertices are
    ``0..len(genera)-1``).  ``edges[e]`` is an unordered endpoint pair stored
    as ``(u, v)`` with ``u <= v``; the two half-edges of edge ``e`` are
    ``(e, 0)`` attached at ``u`` and ``(e, 1)`` attached at ``v``.
    ``tails[k]`` is the vertex carrying the tail labelled ``k + 1``.
    """

    genera: tuple
    edges: tuple
    tails: tuple

    def __post_init__(self):
        genera = tuple(int(g) for g in self.genera)
        if not genera:
            raise GraphError("graph needs at least one vertex")
        if any(g < 0 for g in genera):
            raise GraphError("genus weights must be nonnegative")
        nv = len(genera)
        edges = []
        for e in self.edges:
            u, v = e
            if not (0 <= u < nv and 0 <= v < nv):
                raise GraphError("edge endpoint out of range: %r" % (e,))
            edges.append((u, v) if u <= v else (v, u))
        tails = tuple(int(t) for t in self.tails)
        if any(not 0 <= t < nv for t in tails):
            raise GraphError("tail vertex out of range")
        object.__setattr__(self, "genera", genera)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "tails", tails)

    @property
    def num_vertices(self):
        return len(self.genera)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def num_tails(self):
        return len(self.tails)

    def half_edge_counts(self):
        h = [0] * self.num_vertices
        for u, v in self.edges:
            h[u] += 1
            h[v] += 1
        return h

    def tail_counts(self):
        t = [0] * self.num_vertices
        for v in self.tails:
            t[v] += 1
        return t

    def valence(self, v):
        """m_v: tails plus half-edges at v (a loop contributes two)."""
        h = self.half_edge_counts()
        return h[v] + self.tail_counts()[v]

    def is_connected(self):
        nv = self.num_vertices
        parent = list(range(nv))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        root = find(0)
        return all(find(v) == root for v in range(nv))

    def genus(self):
        """Total genus: sum of weights plus the first Betti number."""
        if not self.is_connected():
            raise ConnectivityError("genus undefined for disconnected graph")
        b1 = self.num_edges - self.num_vertices + 1
        return sum(self.genera) + b1

    def is_stable(self):
        h = self.half_edge_counts()
        t = self.tail_counts()
        return all(
            2 - 2 * g - (h[v] + t[v]) < 0 for v, g in enumerate(self.genera)
        )

    def dimension(self):
        """3g - 3 + n - |E|; also the sum over vertices of 3g_v - 3 + m_v."""
        if not self.is_stable():
            raise StabilityError("dimension requires a stable graph")
        return 3 * self.genus() - 3 + self.num_tails - self.num_edges

    def contract(self, edge_ids):
        """Contract the edge subset simultaneously.

        Each connected component of the contracted subgraph collapses to one
        vertex whose weight is the sum of the member weights plus the first
        Betti number of the component, so the total genus is preserved.
        Surviving edges keep their relative order.
        """
        D = set(edge_ids)
        for e in D:
            if not 0 <= e < self.num_edges:
                raise GraphError("edge id %r not in graph" % (e,))
        nv = self.num_vertices
        parent = list(range(nv))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in D:
            u, v = self.edges[e]
            parent[find(u)] = find(v)
        comp_of = [find(v) for v in range(nv)]
        roots = sorted(set(comp_of), key=lambda r: min(
            v for v in range(nv) if comp_of[v] == r))
        new_id = {r: i for i, r in enumerate(roots)}
        size = [0] * len(roots)
        weight = [0] * len(roots)
        for v in range(nv):
            i = new_id[comp_of[v]]
            size[i] += 1
            weight[i] += self.genera[v]
        d_edges = [0] * len(roots)
        for e in D:
            d_edges[new_id[comp_of[self.edges[e][0]]]] += 1
        genera = tuple(weight[i] + d_edges[i] - size[i] + 1
                       for i in range(len(roots)))
        edges = tuple(
            (new_id[comp_of[u]], new_id[comp_of[v]])
            for e, (u, v) in enumerate(self.edges) if e not in D
        )
        tails = tuple(new_id[comp_of[v]] for v in self.tails)
        return StableGraph(genera, edges, tails)

    def surviving_edge_map(self, edge_ids):
        """Old edge id -> new edge id after contracting ``edge_ids``."""
        D = set(edge_ids)
        survivors = [e for e in range(self.num_edges) if e not in D]
        return {e: i for i, e in enumerate(survivors)}

    def relabeled(self, perm):
        """Apply a vertex relabeling; ``perm[v]`` is the new id of v."""
        genera = [0] * self.num_vertices
        for v, g in enumerate(self.genera):
            genera[perm[v]] = g
        edges = tuple((perm[u], perm[v]) for u, v in self.edges)
        tails = tuple(perm[v] for v in self.tails)
        return StableGraph(tuple(genera), edges, tails)

    def _vertex_invariants(self):
        h = self.half_edge_counts()
        t = self.tail_counts()
        loops = [0] * self.num_vertices
        for u, v in self.edges:
            if u == v:
                loops[u] += 1
        tail_labels = [[] for _ in range(self.num_vertices)]
        for k, v in enumerate(self.tails):
            tail_labels[v].append(k + 1)
        return [
            (self.genera[v], h[v] + t[v], loops[v], tuple(tail_labels[v]))
            for v in range(self.num_vertices)
        ]

    def canonical_form(self):
        """Canonical isomorphism class; tails fixed pointwise.

        Minimizes the serialized form over all vertex orderings that sort
        vertices by an isomorphism-invariant key, so equal encodings are
        equivalent to tail-respecting isomorphism.
        """
        inv = self._vertex_invariants()
        nv = self.num_vertices
        order = sorted(range(nv), key=lambda v: inv[v])
        inv_seq = tuple(inv[v] for v in order)
        groups = []
        start = 0
        for i in range(1, nv + 1):
            if i == nv or inv[order[i]] != inv[order[start]]:
                groups.append(order[start:i])
                start = i
        best = None
        for arrangement in itertools.product(
                *(itertools.permutations(g) for g in groups)):
            flat = [v for g in arrangement for v in g]
            perm = [0] * nv
            for new, old in enumerate(flat):
                perm[old] = new
            enc_edges = tuple(sorted(
                (min(perm[u], perm[v]), max(perm[u], perm[v]))
                for u, v in self.edges))
            enc_tails = tuple(perm[v] for v in self.tails)
            cand = (enc_edges, enc_tails)
            if best is None or cand < best:
                best = cand
        key = (nv, inv_seq, best[0], best[1])
        graph = StableGraph(tuple(i[0] for i in inv_seq), best[0], best[1])
        return GraphClass(key, graph)

    def to_json(self):
        return {
            "vertices": [{"id": v, "genus": g}
                         for v, g in enumerate(self.genera)],
            "edges": [{"half_edges": [[e, 0], [e, 1]], "ends": [u, v]}
                      for e, (u, v) in enumerate(self.edges)],
            "tails": {str(k + 1): v for k, v in enumerate(self.tails)},
        }

    @classmethod
    def from_json(cls, data):
        nv = len(data["vertices"])
        genera = [0] * nv
        for rec in data["vertices"]:
            genera[rec["id"]] = rec["genus"]
        edges = tuple(tuple(rec["ends"]) for rec in data["edges"])
        tails_map = {int(k): v for k, v in data["tails"].items()}
        n = len(tails_map)
        if sorted(tails_map) != list(range(1, n + 1)):
            raise GraphError("tail labels must be 1..n")
        tails = tuple(tails_map[k] for k in range(1, n + 1))
        return cls(tuple(genera), edges, tails)

    def describe(self):
        """Compact one-line form, stable across runs."""
        gs = ",".join(str(g) for g in self.genera)
        es = ",".join("%d-%d" % e for e in self.edges)
        ts = ",".join("%d:%d" % (k + 1, v) for k, v in enumerate(self.tails))
        return "g=(%s);e=(%s);t=(%s)" % (gs, es, ts)


@dataclass(frozen=True)
class GraphClass:
    """Isomorphism class of stable graphs, keyed by canonical encoding."""

    key: tuple
    graph: StableGraph = field(compare=False)

    @property
    def num_edges(self):
        return self.graph.num_edges

    def describe(self):
        return self.graph.describe()


@dataclass(frozen=True)
class Automorphism:
    """Structure-preserving permutation fixing every labelled tail."""

    vertex_perm: tuple
    half_edge_map: tuple  # ((e, h) image indexed by 2*e + h)

    def edge_perm(self):
        return tuple(self.half_edge_map[2 * e][0]
                     for e in range(len(self.half_edge_map) // 2))


@dataclass(frozen=True)
class AutomorphismGroup:
    elements: tuple

    @property
    def order(self):
        return len(self.elements)

    @property
    def generators(self):
        # The full element list; small groups only at desk scale.
        return self.elements

    def edge_perms(self):
        return sorted({a.edge_perm() for a in self.elements})


def automorphism_group(graph):
    """All automorphisms, by brute force over compatible vertex orderings."""
    nv = graph.num_vertices
    ne = graph.num_edges
    inv = graph._vertex_invariants()
    groups = {}
    for v in range(nv):
        groups.setdefault(inv[v], []).append(v)
    elements = []
    for images in itertools.product(
            *(itertools.permutations(g) for g in groups.values())):
        perm = [0] * nv
        for src_group, img_group in zip(groups.values(), images):
            for s, i in zip(src_group, img_group):
                perm[s] = i
        if any(perm[v] != v for v in graph.tails):
            continue
        by_pair = {}
        for e, (u, v) in enumerate(graph.edges):
            by_pair.setdefault((u, v), []).append(e)
        target = {}
        ok = True
        for (u, v), es in by_pair.items():
            q = (min(perm[u], perm[v]), max(perm[u], perm[v]))
            if q not in by_pair or len(by_pair[q]) != len(es):
                ok = False
                break
            target[(u, v)] = by_pair[q]
        if not ok:
            continue
        pair_list = list(by_pair.items())
        for edge_images in itertools.product(
                *(itertools.permutations(target[p]) for p, _ in pair_list)):
            base = {}
            loops = []
            for (p, es), imgs in zip(pair_list, edge_images):
                for e, e2 in zip(es, imgs):
                    base[e] = e2
                    if p[0] == p[1]:
                        loops.append(e)
            for flips in itertools.product((0, 1), repeat=len(loops)):
                flip = dict(zip(loops, flips))
                half = [None] * (2 * ne)
                good = True
                for e in range(ne):
                    u, v = graph.edges[e]
                    e2 = base[e]
                    u2, v2 = graph.edges[e2]
                    if u == v:
                        f = flip[e]
                        half[2 * e] = (e2, f)
                        half[2 * e + 1] = (e2, 1 - f)
                    else:
                        # half (e,0) sits at u, must land at perm[u]
                        if (perm[u], perm[v]) == (u2, v2):
                            half[2 * e] = (e2, 0)
                            half[2 * e + 1] = (e2, 1)
                        elif (perm[v], perm[u]) == (u2, v2):
                            half[2 * e] = (e2, 1)
                            half[2 * e + 1] = (e2, 0)
                        else:
                            good = False
                            break
                if good:
                    elements.append(Automorphism(tuple(perm), tuple(half)))
    return AutomorphismGroup(tuple(elements))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _label_splits(labels, sizes):
    if not sizes:
        yield ()
        return
    for subset in itertools.combinations(labels, sizes[0]):
        remaining = [x for x in labels if x not in subset]
        for rest in _label_splits(remaining, sizes[1:]):
            yield (subset,) + rest


def _tail_assignments(n, nv, required, free):
    """Tail tuples (label k+1 at tails[k]) with per-vertex minimum counts."""
    base = sum(required)
    for extra in _compositions(n - base, nv):
        sizes = [required[v] + extra[v] for v in range(nv)]
        for split in _label_splits(tuple(range(1, n + 1)), sizes):
            tails = [0] * n
            for v, labels in enumerate(split):
                for lab in labels:
                    tails[lab - 1] = v
            yield tuple(tails)
    if free:
        return


def _connected(nv, edges):
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    root = find(0)
    return all(find(v) == root for v in range(nv))


def enumerate_stable_graphs(g, n):
    """All isomorphism classes of stable graphs of type (g, n), sorted.

    Generates weight/valence data satisfying stability, matches half-edges
    into connected multigraphs, then canonicalizes and deduplicates.
    """
    if 2 * g - 2 + n <= 0:
        raise StabilityError("no stable graphs for 2g-2+n <= 0")
    found = {}
    max_v = max(1, 2 * g - 2 + n)
    max_e = 3 * g - 3 + n
    for nv in range(1, max_v + 1):
        pairs = [(i, j) for i in range(nv) for j in range(i, nv)]
        for ne in range(nv - 1, max_e + 1):
            b1 = ne - nv + 1
            gsum = g - b1
            if gsum < 0:
                continue
            for genera in _compositions(gsum, nv):
                for combo in itertools.combinations_with_replacement(pairs, ne):
                    if not _connected(nv, combo):
                        continue
                    h = [0] * nv
                    for u, v in combo:
                        h[u] += 1
                        h[v] += 1
                    required = [max(0, 3 - 2 * genera[v] - h[v])
                                for v in range(nv)]
                    if sum(required) > n:
                        continue
                    for tails in _tail_assignments(n, nv, required, False):
                        graph = StableGraph(genera, combo, tails)
                        gc = graph.canonical_form()
                        found.setdefault(gc.key, gc)
    return tuple(sorted(found.values(), key=lambda c: c.key))


@dataclass(frozen=True)
class StrataPoset:
    """Contraction poset of graph classes for one type (g, n).

    ``a ≺ b`` (strictly smaller, i.e. more edges) is stored as the index
    pair ``(a, b)`` in ``order``; ``covers`` holds the one-edge-contraction
    pairs.  ``layers[k]`` is the k-th batch of the layered construction:
    the minimal elements of what remains after removing earlier layers.
    """

    signature: tuple
    elements: tuple
    covers: frozenset
    order: frozenset
    layers: tuple
    top: int

    def leq(self, a, b):
        return a == b or (a, b) in self.order

    def to_json(self):
        return {
            "signature": list(self.signature),
            "elements": [c.describe() for c in self.elements],
            "dimensions": [c.graph.dimension() for c in self.elements],
            "covers": sorted([a, b] for a, b in self.covers),
            "layers": [list(layer) for layer in self.layers],
            "top": self.top,
        }

    def to_dot(self):
        """Hasse diagram in DOT, nodes annotated with dimensions."""
        lines = ["digraph strata_poset {", "  rankdir=BT;"]
        for i, c in enumerate(self.elements):
            lines.append('  n%d [label="%s\\ndim=%d"];'
                         % (i, c.describe(), c.graph.dimension()))
        for a, b in sorted(self.covers):
            lines.append("  n%d -> n%d;" % (a, b))
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_poset(g, n):
    elements = enumerate_stable_graphs(g, n)
    index = {c.key: i for i, c in enumerate(elements)}
    covers = set()
    for i, c in enumerate(elements):
        for e in range(c.graph.num_edges):
            parent_key = c.graph.contract({e}).canonical_form().key
            covers.add((i, index[parent_key]))
    # strict order: transitive closure of covers
    above = {i: set() for i in range(len(elements))}
    for a, b in covers:
        above[a].add(b)
    order = set()
    for a in range(len(elements)):
        stack = list(above[a])
        seen = set()
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            order.add((a, b))
            stack.extend(above[b])
    maximal = [i for i in range(len(elements))
               if not any((i, b) in order for b in range(len(elements)))]
    if len(maximal) != 1:
        raise GraphError("poset must have a unique top element")
    top = maximal[0]
    remaining = set(range(len(elements)))
    layers = []
    while remaining:
        layer = tuple(sorted(
            i for i in remaining
            if not any((j, i) in order for j in remaining)))
        layers.append(layer)
        remaining -= set(layer)
    return StrataPoset(
        signature=(g, n),
        elements=elements,
        covers=frozenset(covers),
        order=frozenset(order),
        layers=tuple(layers),
        top=top,
    )
