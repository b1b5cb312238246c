"""Layered construction of gluing atlases on a coordinate model.

The model of a linearly stratified space K^m: the stratum of class a is V_a,
its gluing bundle is the normal bundle N(V_a) whose points are pairs of a
base support I in class a and a vector whose support contains I.  Chart maps
are words over three primitives: GLUE(a) forgets the tags, PHI(a,b) advances
the tag chain to class b, PSI(b,a,choice) prepends a chosen base tag.  The
composition identities between charts and bundle maps become a terminating
rewrite system on words, so map equality is decidable by normal form, and is
cross-checked by evaluation at deterministic rational sample points.

The atlas builder runs one pass per poset layer: canonical data on the
smallest strata, then for each later stratum the data induced from below are
sewed over the union of chart images, extended inward to the whole stratum,
and every new radius is halved against the earlier ones.  The report
certifies pairwise compatibility, the separation of images of incomparable
strata, and that the chart images cover a sample grid.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, replace
from fractions import Fraction

from .fields import (REAL, box_abs, from_real_parts, is_zero, real_axes,
                     real_parts, zero)
from .linear_strata import (LinearStratification, OrderError, indices_of,
                            popcount)
from .regions import (INF, Region, axes_of, boundary_type, collar, covered,
                      full_box, region_contains, region_subset,
                      sample_points, split_nonzero, whole_stratum)

EPS_FLOOR = Fraction(1, 2 ** 32)


class EngineError(ValueError):
    pass


# ---------------------------------------------------------------------------
# chart words

def glue(a):
    return ("GLUE", a)


def phi(a, b):
    return ("PHI", a, b)


def psi(b, a, choice):
    return ("PSI", b, a, tuple(sorted(choice.items())))


def normalize(word):
    """Normal form under the chart composition identities.

    PHI(a,a) is the identity; a PHI chain collapses; GLUE absorbs a leading
    PHI; PSI followed by GLUE or PHI of the matching stratum drops out.  The
    rules only ever shorten the word, so this terminates, and critical pairs
    all resolve to the same one-primitive tails.
    """
    word = tuple(word)
    changed = True
    while changed:
        changed = False
        out = []
        i = 0
        while i < len(word):
            p = word[i]
            if p[0] == "PHI" and p[1] == p[2]:
                i += 1
                changed = True
                continue
            if i + 1 < len(word):
                q = word[i + 1]
                if p[0] == "PSI" and q[0] == "GLUE" and q[1] == p[2]:
                    out.append(glue(p[1]))
                    i += 2
                    changed = True
                    continue
                if p[0] == "PSI" and q[0] == "PHI" and q[1] == p[2]:
                    out.append(phi(p[1], q[2]))
                    i += 2
                    changed = True
                    continue
                if p[0] == "PHI" and q[0] == "PHI" and q[1] == p[2]:
                    out.append(phi(p[1], q[2]))
                    i += 2
                    changed = True
                    continue
                if p[0] == "PHI" and q[0] == "GLUE" and q[1] == p[2]:
                    out.append(glue(p[1]))
                    i += 2
                    changed = True
                    continue
            out.append(p)
            i += 1
        word = tuple(out)
    return word


def support_mask(vector):
    mask = 0
    for i, x in enumerate(vector):
        if not is_zero(x):
            mask |= 1 << i
    return mask


def evaluate(strat, word, point):
    """Apply a chart word to a tagged point (chain of supports, vector).

    The chain records the iterated bundle tags, innermost first; the
    vector's support always contains the last tag.  GLUE returns the bare
    vector, PHI advances the chain to the first tag of the target class
    (falling back to the vector's own support), PSI prepends its chosen tag.
    """
    chain, vector = point
    chain = tuple(chain)
    for p in word:
        if p[0] == "GLUE":
            if not chain or strat.class_of(chain[0]) != p[1]:
                raise EngineError("point not over stratum %d" % p[1])
            return vector
        if p[0] == "PHI":
            a, c = p[1], p[2]
            if not chain or strat.class_of(chain[0]) != a:
                raise EngineError("point not over stratum %d" % a)
            for j, tag in enumerate(chain):
                if strat.class_of(tag) == c:
                    chain = chain[j:]
                    break
            else:
                mask = support_mask(vector)
                if strat.class_of(mask) != c:
                    raise EngineError("no tag of class %d on the chain" % c)
                chain = (mask,)
            continue
        if p[0] == "PSI":
            b, a, choice = p[1], p[2], dict(p[3])
            if not chain or strat.class_of(chain[0]) != b:
                raise EngineError("point not over stratum %d" % b)
            if chain[0] not in choice:
                raise EngineError("no chosen base tag for this support")
            chain = (choice[chain[0]],) + chain
            continue
        raise EngineError("unknown primitive %r" % (p,))
    return chain, vector


def tagged_samples(strat, field, chain_classes, count, seed=11):
    """Deterministic tagged points with the given chain of classes.

    Chains walk nested supports through the classes; vector supports equal
    the final tag.  Used to cross-check word equality by evaluation.
    """
    chains = []
    for combo in itertools.product(*(strat.classes[c]
                                     for c in chain_classes)):
        if all(combo[i] & combo[i + 1] == combo[i]
               for i in range(len(combo) - 1)):
            chains.append(combo)
    if not chains:
        return []
    out = []
    state = seed
    idx = 0
    while len(out) < count:
        chain = chains[idx % len(chains)]
        idx += 1
        top = chain[-1]
        coords = []
        for coord in range(1, strat.m + 1):
            parts = []
            for _ in range(real_axes(field)):
                state = (state * 1103515245 + 12345) % (2 ** 31)
                if top & (1 << (coord - 1)):
                    parts.append(Fraction((state % 63) + 1, 64))
                else:
                    parts.append(Fraction(0))
            coords.append(from_real_parts(field, tuple(parts)))
        out.append((chain, tuple(coords)))
    return out


def words_equal(strat, field, w1, w2, chain_classes, count=100):
    """Normal-form equality cross-checked at deterministic sample points."""
    n1, n2 = normalize(w1), normalize(w2)
    if n1 != n2:
        return False
    for point in tagged_samples(strat, field, chain_classes, count):
        try:
            r1 = evaluate(strat, w1, point)
            r2 = evaluate(strat, w2, point)
        except EngineError:
            continue
        if r1 != r2:
            return False
    return True


# ---------------------------------------------------------------------------
# model and gluing data

@dataclass(frozen=True)
class StratifiedModel:
    strat: LinearStratification
    layers: tuple

    @property
    def field(self):
        return self.strat.field

    def dim(self, a):
        I = self.strat.classes[a][0]
        return popcount(I) * real_axes(self.field)

    def fiber_dim(self, a, b):
        """Dimension of the b-part fibers of the bundle over a."""
        return self.dim(b) - self.dim(a)

    def canonical_datum(self, a, epsilon=Fraction(1), scales=None):
        m = self.strat.m
        if scales is None:
            scales = tuple(Fraction(1) for _ in range(m))
        return GluingDatum(
            stratum=a,
            region=whole_stratum(self.strat, self.field, a),
            scales=tuple(scales),
            epsilon=Fraction(epsilon),
            phi_word=(glue(a),),
            bundle_words={b: (phi(a, b),) for b in self.strat.above(a)},
        )

    def to_json(self):
        return {"stratification": self.strat.to_json(),
                "layers": [list(layer) for layer in self.layers]}

    @classmethod
    def from_json(cls, data):
        if "stratification" in data:
            data = data["stratification"]
        return linear_model(LinearStratification.from_json(data))


def linear_model(strat):
    """Coordinate model of a stratification, with its layer decomposition.

    Layers peel off the smallest remaining classes; each gluing bundle's
    fiber dimension plus the base stratum dimension matches the dimension of
    the target stratum by construction, asserted here per support pair.
    """
    n = strat.num_classes
    remaining = set(range(n))
    layers = []
    while remaining:
        layer = tuple(sorted(
            a for a in remaining
            if not any(strat.leq(b, a) for b in remaining if b != a)))
        if not layer:
            raise EngineError("order on classes is not well-founded")
        layers.append(layer)
        remaining -= set(layer)
    model = StratifiedModel(strat=strat, layers=tuple(layers))
    for a in range(n):
        for b in strat.above(a):
            for I in strat.classes[a]:
                for J in strat.classes[b]:
                    if I & J == I:
                        assert (model.fiber_dim(a, b) + model.dim(a)
                                == model.dim(b))
    return model


@dataclass(frozen=True)
class GluingDatum:
    """Chart data over one stratum: region, metric scales, radius, words."""

    stratum: int
    region: Region
    scales: tuple  # positive rational scale per field coordinate
    epsilon: Fraction
    phi_word: tuple
    bundle_words: dict

    def __post_init__(self):
        if self.epsilon <= 0:
            raise EngineError("radius must be positive")
        if any(s <= 0 for s in self.scales):
            raise EngineError("metric scales must be positive")
        object.__setattr__(self, "phi_word", normalize(self.phi_word))
        object.__setattr__(self, "bundle_words",
                           {b: normalize(w)
                            for b, w in sorted(self.bundle_words.items())})

    def to_json(self):
        return {
            "stratum": self.stratum,
            "region": self.region.to_json(),
            "scales": [[s.numerator, s.denominator] for s in self.scales],
            "epsilon": [self.epsilon.numerator, self.epsilon.denominator],
            "phi": [list(p[:3]) for p in self.phi_word],
            "bundle": {str(b): [list(p[:3]) for p in w]
                       for b, w in self.bundle_words.items()},
        }


def point_in_image(model, datum, v):
    """Exact membership of an ambient point in the chart image R(phi)."""
    strat = model.strat
    cls, mask = strat.stratum_of(v)
    a = datum.stratum
    if not strat.leq(a, cls):
        return False
    for I in strat.classes[a]:
        if I & mask != I:
            continue
        base = tuple(x if I & (1 << i) else zero(model.field)
                     for i, x in enumerate(v))
        if not region_contains(strat, model.field, datum.region, base):
            continue
        fiber_ok = all(
            datum.scales[i] * box_abs(x) < datum.epsilon
            for i, x in enumerate(v) if not I & (1 << i))
        if fiber_ok:
            return True
    return False


def image_region(model, datum, b):
    """The b-stratum part of the chart image, as an exact region over b."""
    strat = model.strat
    a = datum.stratum
    if not strat.leq(a, b):
        raise OrderError("stratum %d is not above %d" % (b, a))
    k = real_axes(model.field)
    num_axes = strat.m * k
    boxes = []
    for I in strat.classes[a]:
        for J in strat.classes[b]:
            if I & J != I:
                continue
            for B in datum.region.boxes:
                box = list(full_box(num_axes))
                usable = True
                for coord in range(1, strat.m + 1):
                    bit = 1 << (coord - 1)
                    for ax in axes_of(model.field, coord):
                        if I & bit:
                            box[ax] = B[ax]
                        elif J & bit:
                            e = datum.epsilon / datum.scales[coord - 1]
                            box[ax] = (-e, e)
                        if not I & bit:
                            lo, hi = B[ax]
                            if not lo < 0 < hi:
                                usable = False
                    if not usable:
                        break
                if usable and all(lo < hi for lo, hi in box):
                    boxes.append(tuple(box))
    dedup = []
    for box in boxes:
        if box not in dedup:
            dedup.append(box)
    return Region(b, tuple(dedup))


def region_is_empty(model, region):
    """Whether the region meets its stratum at all, decided exactly."""
    strat = model.strat
    from .regions import _piece_cell
    for mask in strat.classes[region.cls]:
        groups = [axes_of(model.field, i) for i in indices_of(mask)]
        for box in region.boxes:
            cell = _piece_cell(strat, model.field, mask, box)
            if cell is None:
                continue
            if split_nonzero(cell, groups):
                return False
    return True


def restrict(model, datum, region, epsilon):
    """Shrink a datum to a sub-region and sub-radius; maps are unchanged."""
    epsilon = Fraction(epsilon)
    if epsilon > datum.epsilon:
        raise EngineError("cannot enlarge the radius under restriction")
    if region.cls != datum.stratum:
        raise EngineError("restriction region lives over another stratum")
    if not region_subset(model.strat, model.field, region, datum.region):
        raise EngineError("restriction region is not inside the domain")
    return replace(datum, region=region, epsilon=epsilon)


def induce(model, datum, b, region, epsilon):
    """Datum over a higher stratum b pulled through the chart of datum.

    The new chart is the old one precomposed with the tag-prepending map
    whose base choice is the smallest admissible support per target support;
    the metric pushes forward unchanged along coordinates.  Injectivity of
    the new chart over the region is verified on sample points.
    """
    strat = model.strat
    a = datum.stratum
    if b == a:
        raise OrderError("inducing onto the same stratum is not allowed")
    if not strat.leq(a, b):
        raise OrderError("stratum %d is not above %d" % (b, a))
    epsilon = Fraction(epsilon)
    if epsilon > datum.epsilon:
        raise EngineError("induced radius exceeds the source radius")
    img = image_region(model, datum, b)
    if not region_subset(strat, model.field, region, img):
        raise EngineError("region is not inside the chart image over %d" % b)
    choice = {}
    for J in strat.classes[b]:
        cands = [I for I in strat.classes[a] if I & J == I]
        if cands:
            choice[J] = min(cands)
    word = psi(b, a, choice)
    new = GluingDatum(
        stratum=b,
        region=region,
        scales=datum.scales,
        epsilon=epsilon,
        phi_word=(word,) + datum.phi_word,
        bundle_words={c: (word,) + datum.bundle_words[c]
                      for c in strat.above(b)},
    )
    _check_injectivity(model, new)
    return new


def _check_injectivity(model, datum, count=24):
    """Sample-based injectivity of the chart on each bundle component.

    The chart can identify points sitting over different base supports (two
    small coordinates can each serve as the fiber direction of the other),
    so only per-component injectivity is checkable and meaningful here: two
    distinct sampled points with the same base tag must have distinct
    images.
    """
    strat = model.strat
    seen = {}
    b = datum.stratum
    for c in strat.above(b):
        for point in tagged_samples(strat, model.field, (b, c), count):
            chain, vector = point
            base = tuple(x if chain[0] & (1 << i) else zero(model.field)
                         for i, x in enumerate(vector))
            if not region_contains(strat, model.field, datum.region, base):
                continue
            try:
                image = evaluate(strat, datum.phi_word, point)
            except EngineError:
                continue
            key = (chain[0], image)
            if key in seen and seen[key] != (chain[0], vector):
                raise EngineError("chart not injective on sample points")
            seen[key] = (chain[0], vector)


def coincide(model, d1, d2):
    """Equality of two data over the intersection of their regions."""
    if d1.stratum != d2.stratum:
        return False
    overlap = d1.region.intersect(d2.region)
    if region_is_empty(model, overlap):
        return True
    if d1.scales != d2.scales:
        return False
    if d1.phi_word != d2.phi_word:
        return False
    if d1.bundle_words != d2.bundle_words:
        return False
    # normal forms agree; cross-check by evaluation over the overlap
    strat = model.strat
    a = d1.stratum
    for c in strat.above(a):
        for point in tagged_samples(strat, model.field, (a, c), 20):
            chain, vector = point
            base = tuple(x if chain[0] & (1 << i) else zero(model.field)
                         for i, x in enumerate(vector))
            if not region_contains(strat, model.field, overlap, base):
                continue
            if (evaluate(strat, d1.phi_word, point)
                    != evaluate(strat, d2.phi_word, point)):
                return False
    return True


def sew(model, d1, d2):
    """Union of two coinciding data, with a strictly smaller radius."""
    if not coincide(model, d1, d2):
        raise EngineError("cannot sew data that do not coincide")
    if d1.phi_word != d2.phi_word or d1.scales != d2.scales:
        # disjoint domains but genuinely different data: refuse to merge
        raise EngineError("cannot sew data with different maps or metrics")
    return replace(d1, region=d1.region.union(d2.region),
                   epsilon=min(d1.epsilon, d2.epsilon) / 2)


def is_boundary_type(model, region):
    return boundary_type(model.strat, model.field, region)


def inward_extend(model, datum):
    """Global datum on the stratum agreeing with the input near the boundary.

    Requires a boundary-type region.  The canonical chart words are used for
    the extension, keeping the input's metric and radius; agreement with the
    input is verified on the collar, a boundary-type sub-region.  Returns
    the extended datum and the collar radius (None on a boundaryless
    stratum).
    """
    strat = model.strat
    if not boundary_type(strat, model.field, datum.region):
        raise EngineError("inward extension needs a boundary-type region")
    collar_region, radius = collar(strat, model.field, datum.region)
    extended = model.canonical_datum(
        datum.stratum, epsilon=datum.epsilon, scales=datum.scales)
    if collar_region.boxes and not region_is_empty(model, collar_region):
        inner = restrict(model, datum, collar_region, datum.epsilon)
        outer = restrict(model, extended, collar_region, datum.epsilon)
        if not coincide(model, inner, outer):
            raise EngineError(
                "datum does not extend: disagreement on the collar")
    return extended, radius


def check_compatible(model, d1, d2):
    """Induced data on every common higher stratum must coincide."""
    strat = model.strat
    common = set(strat.above(d1.stratum)) & set(strat.above(d2.stratum))
    eps = min(d1.epsilon, d2.epsilon) / 2
    for b in sorted(common):
        r1 = image_region(model, d1, b)
        r2 = image_region(model, d2, b)
        W = r1.intersect(r2)
        if region_is_empty(model, W):
            continue
        e1 = _induced_on(model, d1, b, W, eps)
        e2 = _induced_on(model, d2, b, W, eps)
        if not coincide(model, e1, e2):
            return False
    return True


def _induced_on(model, datum, b, region, eps):
    if b == datum.stratum:
        return restrict(model, datum, region, eps)
    return induce(model, datum, b, region, eps)


# ---------------------------------------------------------------------------
# atlas construction

@dataclass(frozen=True)
class AtlasReport:
    model: StratifiedModel
    data: dict  # stratum -> GluingDatum
    passes: int
    compatible: dict  # (a, b) -> bool
    separation_ok: bool
    separation_witnesses: tuple
    cover_ok: bool
    cover_witnesses: tuple

    @property
    def all_compatible(self):
        return all(self.compatible.values())

    def to_json(self):
        return {
            "passes": self.passes,
            "data": {str(a): d.to_json() for a, d in sorted(
                self.data.items())},
            "compatible": {"%d,%d" % k: v
                           for k, v in sorted(self.compatible.items())},
            "all_compatible": self.all_compatible,
            "separation": {
                "ok": self.separation_ok,
                "witnesses": [[str(x) for x in w]
                              for w in self.separation_witnesses]},
            "cover": {
                "ok": self.cover_ok,
                "witnesses": [[str(x) for x in w]
                              for w in self.cover_witnesses]},
        }


def grid_density(num_axes):
    env = os.environ.get("STRATAGLUE_GRID")
    if env:
        return max(3, int(env))
    if num_axes <= 3:
        return 21
    if num_axes <= 5:
        return 7
    return 5


def sample_grid(model, density=None):
    """Rational grid on [-1, 1] per real axis, density points per axis."""
    strat = model.strat
    num_axes = strat.m * real_axes(model.field)
    d = density or grid_density(num_axes)
    values = [Fraction(-1) + Fraction(2 * i, d - 1) for i in range(d)]
    for combo in itertools.product(values, repeat=num_axes):
        point = []
        k = real_axes(model.field)
        for coord in range(strat.m):
            point.append(from_real_parts(
                model.field, tuple(combo[k * coord:k * coord + k])))
        yield tuple(point)


def _separation(model, data, grid):
    """Images of incomparable strata may only meet inside lower images."""
    strat = model.strat
    pairs = [(a, b) for a in data for b in data
             if a < b and not strat.leq(a, b) and not strat.leq(b, a)]
    if not pairs:
        return True, ()
    witnesses = []
    for v in grid:
        for a, b in pairs:
            if (point_in_image(model, data[a], v)
                    and point_in_image(model, data[b], v)):
                lower = set(strat.below(a)) & set(strat.below(b))
                if not any(point_in_image(model, data[g], v)
                           for g in lower if g in data):
                    witnesses.append(v)
    return not witnesses, tuple(witnesses)


def build_atlas(model, grid=None):
    """Run the layered induction and certify the resulting atlas.

    One pass per layer: the smallest strata receive canonical data; each
    later stratum sews the data induced from all strata below it over the
    union of their chart images, extends inward, and takes a radius of half
    the smallest one so far.  After construction the separation condition is
    enforced by halving all radii (down to a floor of 2^-32) and the
    compatibility matrix and cover check are evaluated.
    """
    strat = model.strat
    if grid is None:
        grid = list(sample_grid(model))
    data = {}
    passes = 0
    for layer in model.layers:
        passes += 1
        for a in layer:
            if not data:
                data[a] = model.canonical_datum(a)
                continue
            eps = min(d.epsilon for d in data.values()) / 2
            below = [g for g in data if strat.leq(g, a) and g != a]
            if not below:
                data[a] = model.canonical_datum(a, epsilon=eps)
                continue
            pieces = []
            for g in below:
                img = image_region(model, data[g], a)
                if region_is_empty(model, img):
                    continue
                pieces.append(induce(model, data[g], a, img, eps))
            merged = pieces[0]
            for p in pieces[1:]:
                merged = sew(model, merged, p)
            if not boundary_type(strat, model.field, merged.region):
                raise EngineError(
                    "sewed domain over stratum %d is not boundary-type" % a)
            extended, radius = inward_extend(model, merged)
            data[a] = replace(extended, epsilon=eps)
            if radius is not None:
                half = Fraction(radius) / 2
                for g in below:
                    if data[g].epsilon > half:
                        data[g] = replace(data[g], epsilon=half)
    assert passes == len(model.layers)
    sep_ok, sep_wit = _separation(model, data, grid)
    while not sep_ok:
        smallest = min(d.epsilon for d in data.values())
        if smallest / 2 < EPS_FLOOR:
            break
        data = {a: replace(d, epsilon=d.epsilon / 2)
                for a, d in data.items()}
        sep_ok, sep_wit = _separation(model, data, grid)
    compatible = {}
    for a in sorted(data):
        for b in sorted(data):
            if a < b:
                compatible[(a, b)] = check_compatible(
                    model, data[a], data[b])
    cover_ok, cover_wit = verify_cover(model, data, grid)
    return AtlasReport(
        model=model,
        data=data,
        passes=passes,
        compatible=compatible,
        separation_ok=sep_ok,
        separation_witnesses=sep_wit,
        cover_ok=cover_ok,
        cover_witnesses=cover_wit,
    )


def verify_cover(model, data, grid=None):
    """Every grid point must lie in some chart image."""
    if grid is None:
        grid = list(sample_grid(model))
    witnesses = []
    for v in grid:
        if not any(point_in_image(model, d, v) for d in data.values()):
            witnesses.append(v)
    return not witnesses, tuple(witnesses)
