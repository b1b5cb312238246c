"""Edge-contraction stratifications of stable graphs.

For a stable graph class the subsets of its edge set are grouped by the
isomorphism class of the contracted graph.  These groups partition the power
set of the edges, members of one group share their cardinality, and the
resulting object is a linearly stratified vector space of dimension |E|: the
local model of the gluing chart around the corresponding boundary stratum,
whose gluing bundle is a sum of one line per edge.  The checks here are the
combinatorial shadows of the chart identities: dimension matching,
functoriality of iterated contraction, and equivariance under the graph's
automorphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fields import REAL
from .gluing_engine import build_atlas, linear_model
from .linear_strata import LinearStratification, popcount
from .stable_graphs import (GraphClass, automorphism_group, build_poset,
                            enumerate_stable_graphs)


@dataclass(frozen=True)
class EdgeStratification:
    """Partition of the edge power set by contraction target."""

    graph_class: GraphClass
    targets: tuple  # (target GraphClass, tuple of edge masks) per class
    stratification: LinearStratification

    @property
    def num_classes(self):
        return len(self.targets)

    def class_of_subset(self, mask):
        for i, (_, masks) in enumerate(self.targets):
            if mask in masks:
                return i
        raise ValueError("subset not classified")

    def to_json(self):
        return {
            "graph": self.graph_class.describe(),
            "classes": [{
                "target": target.describe(),
                "subsets": [sorted(e + 1 for e in range(32)
                                   if mask & (1 << e)) for mask in masks],
            } for target, masks in self.targets],
            "stratification": self.stratification.to_json(),
        }


def gluing_bundle_rank(gc):
    """Rank of the sum of one line per node: the edge count."""
    return gc.graph.num_edges


def edge_stratification(gc):
    """Group edge subsets by the class of the contracted graph.

    The groups are emitted in a deterministic order (by cardinality, then
    by smallest member) and assembled into a linearly stratified space of
    dimension |E|, which is validated on construction.
    """
    graph = gc.graph
    ne = graph.num_edges
    groups = {}
    for mask in range(1 << ne):
        D = {e for e in range(ne) if mask & (1 << e)}
        target = graph.contract(D).canonical_form()
        groups.setdefault(target.key, (target, []))[1].append(mask)
    targets = sorted(
        ((target, tuple(sorted(masks))) for target, masks in groups.values()),
        key=lambda pair: (popcount(pair[1][0]), pair[1]))
    classes = tuple(masks for _, masks in targets)
    strat = LinearStratification(ne, REAL, classes)
    return EdgeStratification(gc, tuple(targets), strat)


def verify_dimension_matching(gc):
    """Contracting k edges must raise the dimension by exactly k."""
    es = edge_stratification(gc)
    dim = gc.graph.dimension()
    violations = []
    for target, masks in es.targets:
        k = popcount(masks[0])
        if any(popcount(m) != k for m in masks):
            violations.append(
                "class of %s mixes cardinalities" % target.describe())
        if dim + k != target.graph.dimension():
            violations.append(
                "%s: %d + %d != %d" % (target.describe(), dim, k,
                                       target.graph.dimension()))
    return {"ok": not violations, "violations": violations}


def contraction_functoriality(gc):
    """Nested contractions compose: Ctr by a superset equals the two-step.

    For every nested pair I inside I' the contraction by I' must agree with
    first contracting I and then the image of I' minus I.
    """
    graph = gc.graph
    ne = graph.num_edges
    violations = []
    subsets = list(range(1 << ne))
    for inner in subsets:
        I = {e for e in range(ne) if inner & (1 << e)}
        emap = graph.surviving_edge_map(I)
        mid = graph.contract(I)
        for outer in subsets:
            if outer & inner != inner:
                continue
            Ip = {e for e in range(ne) if outer & (1 << e)}
            image = {emap[e] for e in Ip - I}
            direct = graph.contract(Ip).canonical_form()
            stepped = mid.contract(image).canonical_form()
            if direct != stepped:
                violations.append("I=%s I'=%s" % (sorted(I), sorted(Ip)))
    return {"ok": not violations, "violations": violations}


def aut_equivariance(gc):
    """Graph automorphisms must permute each contraction class into itself."""
    es = edge_stratification(gc)
    grp = automorphism_group(gc.graph)
    ne = gc.graph.num_edges
    violations = []
    for a in grp.elements:
        perm = a.edge_perm()
        for i, (target, masks) in enumerate(es.targets):
            mask_set = set(masks)
            for mask in masks:
                image = 0
                for e in range(ne):
                    if mask & (1 << e):
                        image |= 1 << perm[e]
                if image not in mask_set:
                    violations.append(
                        "automorphism moves a subset out of class %d" % i)
    return {"ok": not violations, "violations": violations,
            "aut_order": grp.order}


def dm_report(g, n, with_atlas=True, atlas_cache=None):
    """Per-class verification report for one signature.

    The atlas feed runs the gluing engine on the induced stratification of
    each class; since the outcome depends only on the stratification, the
    runs are cached by its class data.
    """
    poset = build_poset(g, n)
    if atlas_cache is None:
        atlas_cache = {}
    entries = []
    for gc in poset.elements:
        es = edge_stratification(gc)
        dim_rep = verify_dimension_matching(gc)
        fun_rep = contraction_functoriality(gc)
        aut_rep = aut_equivariance(gc)
        entry = {
            "graph": gc.describe(),
            "edges": gc.graph.num_edges,
            "dimension": gc.graph.dimension(),
            "num_classes": es.num_classes,
            "dimension_matching": dim_rep["ok"],
            "functoriality": fun_rep["ok"],
            "aut_order": aut_rep["aut_order"],
            "equivariance": aut_rep["ok"],
        }
        if with_atlas:
            key = es.stratification.classes
            if key not in atlas_cache:
                report = build_atlas(linear_model(es.stratification))
                atlas_cache[key] = (report.all_compatible,
                                    report.separation_ok, report.cover_ok)
            compatible, separated, covered = atlas_cache[key]
            entry["atlas_compatible"] = compatible
            entry["atlas_separated"] = separated
            entry["atlas_covers"] = covered
        entries.append(entry)
    ok = all(e["dimension_matching"] and e["functoriality"]
             and e["equivariance"]
             and e.get("atlas_compatible", True) for e in entries)
    return {"signature": [g, n], "ok": ok, "classes": entries}
