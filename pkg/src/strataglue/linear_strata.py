"""Linearly stratified vector spaces over coordinate supports.

The space is K^m (K the rationals or Gaussian rationals) stratified by the
support pattern of the coordinates: the stratum of a point is the set I of
indices where it is nonzero.  Supports are grouped into index classes, all
members of one class having the same cardinality, and the classes carry the
partial order where one class precedes another when each of its supports is
contained in some support of the other.  Subsets of {1..m} are stored as
integer bitmasks throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .fields import COMPLEX, REAL, GaussianRational, is_zero


class StratificationError(ValueError):
    pass


class OrderError(StratificationError):
    pass


def mask_of(indices):
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


def indices_of(mask):
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask):
    return bin(mask).count("1")


@dataclass(frozen=True)
class LinearStratification:
    """Partition of the power set of {1..m} into equal-cardinality classes."""

    m: int
    field: str
    classes: tuple  # tuple of sorted tuples of bitmasks

    def __post_init__(self):
        report = validate(self.m, self.classes, self.field)
        if not report.ok:
            raise StratificationError("; ".join(report.violations))

    @property
    def num_classes(self):
        return len(self.classes)

    def class_of(self, mask):
        for a, masks in enumerate(self.classes):
            if mask in masks:
                return a
        raise StratificationError("support %s not in any class"
                                  % (indices_of(mask),))

    def leq(self, a, b):
        """a precedes b: every support of a sits inside one of b."""
        return all(any(I & J == I for J in self.classes[b])
                   for I in self.classes[a])

    def above(self, a):
        """S^a: indices of classes at or above a."""
        return tuple(b for b in range(self.num_classes) if self.leq(a, b))

    def below(self, a):
        return tuple(b for b in range(self.num_classes) if self.leq(b, a))

    def stratum_of(self, point):
        """Class index and support of an exact point of K^m."""
        if len(point) != self.m:
            raise StratificationError("point has wrong dimension")
        mask = 0
        for i, x in enumerate(point):
            if not is_zero(x):
                mask |= 1 << i
        return self.class_of(mask), mask

    def normal_stratum(self, a, b):
        """The b-part of the normal bundle over class a.

        Maps each base support I in class a to the supports J in class b
        with J containing I.  Requires b at or above a.
        """
        if not self.leq(a, b):
            raise OrderError("class %d is not above class %d" % (b, a))
        return {I: tuple(J for J in self.classes[b] if I & J == I)
                for I in self.classes[a]}

    def double_normal(self, a, b):
        """Pieces of the normal bundle of the b-part inside the bundle over a.

        For strictly ordered a, b this is one normal bundle N(V^[J]) per pair
        I in class a, J in class b with J containing I; each J also names the
        target piece in the bundle over b.
        """
        if a == b or not self.leq(a, b):
            raise OrderError("double normal needs strict order a < b")
        pieces = []
        targets = self.normal_stratum(b, b)
        for I in self.classes[a]:
            for J in self.classes[b]:
                if I & J == I:
                    assert J in targets
                    pieces.append((I, J))
        return tuple(pieces)

    def tau_embed(self, a, b, I, point):
        """Include a point of the bundle over class a into the b-stratum.

        The inclusion is the identity on coordinates; the point's support
        must lie in class b and contain the base support I.
        """
        if I not in self.classes[a]:
            raise StratificationError("base support not in class %d" % a)
        c, mask = self.stratum_of(point)
        if c != b:
            raise StratificationError(
                "point support %s is not in class %d" % (indices_of(mask), b))
        if I & mask != I:
            raise StratificationError("support does not contain the base")
        return tuple(point), b

    def to_json(self):
        return {
            "m": self.m,
            "field": "R" if self.field == REAL else "C",
            "classes": [[list(indices_of(I)) for I in masks]
                        for masks in self.classes],
        }

    @classmethod
    def from_json(cls, data):
        field = REAL if data["field"] == "R" else COMPLEX
        classes = tuple(
            tuple(sorted(mask_of(I) for I in masks))
            for masks in data["classes"])
        return cls(int(data["m"]), field, classes)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def to_json(self):
        return {"ok": self.ok, "violations": list(self.violations)}


def validate(m, classes, field=REAL):
    """Check the partition, cardinality, and order axioms."""
    violations = []
    if field not in (REAL, COMPLEX):
        violations.append("unknown ground field %r" % (field,))
    seen = {}
    for a, masks in enumerate(classes):
        if not masks:
            violations.append("class %d is empty" % a)
            continue
        sizes = {popcount(I) for I in masks}
        if len(sizes) > 1:
            violations.append("class %d mixes cardinalities %s"
                              % (a, sorted(sizes)))
        for I in masks:
            if not 0 <= I < (1 << m):
                violations.append("class %d contains an out-of-range subset"
                                  % a)
            elif I in seen:
                violations.append(
                    "subset %s appears in classes %d and %d"
                    % (list(indices_of(I)), seen[I], a))
            else:
                seen[I] = a
    missing = [I for I in range(1 << m) if I not in seen]
    if missing:
        violations.append("subsets missing from the partition: %s"
                          % [list(indices_of(I)) for I in missing])
    if not violations:
        # frontier condition: if one support of a class fits inside some
        # support of another class, all of them must (a stratum closure
        # meeting another stratum has to contain it)
        n = len(classes)
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                dominated = [any(I & J == I for J in classes[b])
                             for I in classes[a]]
                if any(dominated) and not all(dominated):
                    violations.append(
                        "class %d partially meets the closure of class %d"
                        % (a, b))
    if not violations:
        # the containment relation must be a partial order on classes
        n = len(classes)
        le = [[all(any(I & J == I for J in classes[b]) for I in classes[a])
               for b in range(n)] for a in range(n)]
        for a in range(n):
            for b in range(n):
                if a != b and le[a][b] and le[b][a]:
                    violations.append(
                        "classes %d and %d are mutually comparable" % (a, b))
                if le[a][b]:
                    for c in range(n):
                        if le[b][c] and not le[a][c]:
                            violations.append(
                                "order not transitive at (%d,%d,%d)"
                                % (a, b, c))
    return ValidationReport(not violations, tuple(violations))


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1:]
        yield [[first]] + part


def enumerate_stratifications(m, field=REAL):
    """Every stratification of K^m, exhaustively.

    Equal cardinality within a class means the classes refine the grouping
    of subsets by size, so the candidates are the products of set partitions
    of each size level; those violating the frontier condition are dropped.
    Output order is deterministic.
    """
    levels = []
    for k in range(m + 1):
        masks = [mask_of(c) for c in
                 itertools.combinations(range(1, m + 1), k)]
        levels.append([
            tuple(sorted(tuple(sorted(g)) for g in part))
            for part in _set_partitions(masks)])
    for combo in itertools.product(*levels):
        classes = tuple(sorted(
            (g for part in combo for g in part),
            key=lambda g: (popcount(g[0]), g)))
        if validate(m, classes, field).ok:
            yield LinearStratification(m, field, classes)


def matrix_is_invertible(matrix, field=REAL):
    """Exact invertibility by fraction-free style Gaussian elimination."""
    n = len(matrix)
    rows = [list(r) for r in matrix]
    if any(len(r) != n for r in rows):
        raise StratificationError("matrix must be square")
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not is_zero(rows[r][col]):
                pivot = r
                break
        if pivot is None:
            return False
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pv = rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] / pv
            for c in range(col, n):
                rows[r][c] = rows[r][c] - factor * rows[col][c]
    return True


def preserves_stratification(matrix, strat):
    """Whether an invertible matrix maps each class's subspaces within class.

    The image of a coordinate subspace spanned by the axes in I is the span
    of the corresponding columns; it is again a coordinate subspace exactly
    when the union J of the column supports has size |I| (the columns are
    independent, so the span then fills the subspace).  The map preserves
    the stratification when J always lands in the class of I.
    """
    if not matrix_is_invertible(matrix, strat.field):
        raise StratificationError("matrix is singular")
    m = strat.m
    col_support = []
    for j in range(m):
        mask = 0
        for i in range(m):
            if not is_zero(matrix[i][j]):
                mask |= 1 << i
        col_support.append(mask)
    for I in range(1 << m):
        J = 0
        for j in range(m):
            if I & (1 << j):
                J |= col_support[j]
        if popcount(J) != popcount(I):
            return False
        if strat.class_of(J) != strat.class_of(I):
            return False
    return True


def chain_stratification(m, field=REAL):
    """The cardinality stratification: one class per support size."""
    classes = []
    for k in range(m + 1):
        classes.append(tuple(sorted(
            mask_of(c) for c in itertools.combinations(range(1, m + 1), k))))
    return LinearStratification(m, field, tuple(classes))
