"""Embedding certificates for finite metrics.

A metric is negative definite when sum a_i a_j d(x_i,x_j) <= 0 for every
real weight vector with zero sum; equivalently the doubly-centered matrix
B = -1/2 J D J is positive semidefinite.  The decision here is exact:
rational elimination with complete diagonal pivoting, a witness vector on
failure.  Float linear algebra only ever produces coordinates, which are
then verified against the metric.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import InputError, InternalCheckError, ResourceLimitError
from .graphs import MedianGraphCert
from .metric import FiniteMetric, MedianMetric, Classification, classify

Point = Hashable

DEFAULT_HYPERMETRIC_BOUND = 2
DEFAULT_HYPERMETRIC_BUDGET = 20_000_000
DEFAULT_HELLY_CAP = 12
DEFAULT_GNS_TOL = 1e-9


def distance_form(m: FiniteMetric, coeffs: Sequence[Fraction | int]) -> Fraction:
    """sum_{i,j} a_i a_j d(x_i, x_j), exactly."""
    n = len(m.points)
    if len(coeffs) != n:
        raise InputError(f"expected {n} coefficients, got {len(coeffs)}")
    total = Fraction(0)
    for i in range(n):
        ai = coeffs[i]
        if not ai:
            continue
        for j in range(i + 1, n):
            if coeffs[j]:
                total += 2 * ai * coeffs[j] * m.dist_int(i, j)
    return total / m.scale


def centered_gram(m: FiniteMetric) -> list[list[Fraction]]:
    """B = -1/2 J D J with J the mean-centering projector; B is PSD iff
    the distance form is <= 0 on zero-sum vectors."""
    n = len(m.points)
    d = [[Fraction(m.dist_int(i, j), m.scale) for j in range(n)] for i in range(n)]
    row = [sum(d[i]) / n for i in range(n)]
    grand = sum(row) / n
    return [[-(d[i][j] - row[i] - row[j] + grand) / 2 for j in range(n)]
            for i in range(n)]


def _psd_eliminate(b: list[list[Fraction]]):
    """Exact PSD test by elimination with greedy diagonal pivoting.

    Returns (is_psd, pivots, witness) where witness is a vector v with
    v^T B v < 0 when the test fails.  Rows of the tracked transform M keep
    the reduced form expressed in original coordinates: S = M B M^T.
    """
    n = len(b)
    work = [row[:] for row in b]
    trans = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
             for i in range(n)]
    remaining = list(range(n))
    pivots: list[Fraction] = []
    while remaining:
        k = max(remaining, key=lambda i: work[i][i])
        if work[k][k] > 0:
            d = work[k][k]
            pivots.append(d)
            remaining.remove(k)
            for i in remaining:
                c = work[i][k] / d
                if c:
                    wk = work[k]
                    wi = work[i]
                    for j in remaining:
                        wi[j] -= c * wk[j]
                    tk = trans[k]
                    ti = trans[i]
                    for j in range(n):
                        ti[j] -= c * tk[j]
            continue
        neg = [i for i in remaining if work[i][i] < 0]
        if neg:
            return False, pivots, trans[neg[0]]
        for i in remaining:
            for j in remaining:
                if i < j and work[i][j] != 0:
                    # diagonal all zero, off-diagonal not: e_i -/+ e_j is negative
                    s = 1 if work[i][j] > 0 else -1
                    witness = [trans[i][t] - s * trans[j][t] for t in range(n)]
                    return False, pivots, witness
        pivots.extend(Fraction(0) for _ in remaining)
        remaining = []
    return True, pivots, None


@dataclass(frozen=True)
class NegDefCertificate:
    metric: FiniteMetric
    centered: tuple[tuple[Fraction, ...], ...]
    negative_definite: bool
    pivots: tuple[Fraction, ...]
    witness: tuple[Fraction, ...] | None   # zero-sum vector with positive form

    def form_value(self, coeffs) -> Fraction:
        return distance_form(self.metric, coeffs)


def certify_negative_definite(m: FiniteMetric) -> NegDefCertificate:
    """Exact verdict; a failing certificate carries a zero-sum rational
    vector whose distance form is positive (re-evaluated to confirm)."""
    b = centered_gram(m)
    ok, pivots, raw = _psd_eliminate(b)
    witness = None
    if not ok:
        n = len(m.points)
        mean = sum(raw) / n
        alpha = [v - mean for v in raw]          # project to zero sum
        den = 1
        for a in alpha:
            den = den * a.denominator // math.gcd(den, a.denominator)
        alpha = [a * den for a in alpha]
        if sum(alpha) != 0:
            raise InternalCheckError("witness is not zero-sum")
        if distance_form(m, alpha) <= 0:
            raise InternalCheckError("extracted witness fails to certify")
        witness = tuple(alpha)
    return NegDefCertificate(
        metric=m,
        centered=tuple(tuple(row) for row in b),
        negative_definite=ok,
        pivots=tuple(pivots),
        witness=witness,
    )


@dataclass(frozen=True)
class HypermetricReport:
    bound: int
    holds: bool
    max_value: Fraction
    argmax: tuple[int, ...]
    vectors_checked: int


def certify_hypermetric(m: FiniteMetric, bound: int = DEFAULT_HYPERMETRIC_BOUND,
                        budget: int = DEFAULT_HYPERMETRIC_BUDGET) -> HypermetricReport:
    """Exhaustively evaluate the form over integer vectors with entries in
    [-bound, bound] summing to 1; reports the maximum and its vector.

    The hypermetric condition asks <= 0 for all such vectors (unbounded in
    general; this is the desk-scale truncation).
    """
    if bound < 1:
        raise InputError("bound must be >= 1")
    n = len(m.points)
    est = (2 * bound + 1) ** n
    if est > budget:
        raise ResourceLimitError(
            f"hypermetric enumeration of ({2 * bound + 1})^{n} vectors exceeds "
            f"budget {budget} at bound {bound}", cap=budget)
    d = [[m.dist_int(i, j) for j in range(n)] for i in range(n)]
    best_val: int | None = None
    best_vec: tuple[int, ...] = ()
    checked = 0
    vec = [0] * n
    contrib = [0] * n      # contrib[j] = sum_i vec[i] * d[i][j] over assigned i

    def rec(pos: int, ssum: int, form: int):
        nonlocal best_val, best_vec, checked
        rem = n - pos
        if pos == n:
            if ssum == 1:
                checked += 1
                if best_val is None or form > best_val:
                    best_val = form
                    best_vec = tuple(vec)
            return
        lo, hi = 1 - ssum - bound * (rem - 1), 1 - ssum + bound * (rem - 1)
        for t in range(-bound, bound + 1):
            if t < lo or t > hi:
                continue
            vec[pos] = t
            if t == 0:
                rec(pos + 1, ssum, form)
            else:
                dp = d[pos]
                for j in range(pos + 1, n):
                    contrib[j] += t * dp[j]
                rec(pos + 1, ssum + t, form + 2 * t * contrib[pos])
                for j in range(pos + 1, n):
                    contrib[j] -= t * dp[j]
        vec[pos] = 0

    # contrib[pos] accumulates pairs (i < pos); form gains 2*t*contrib[pos]
    rec(0, 0, 0)
    if best_val is None:
        raise InternalCheckError("no admissible vector enumerated")
    return HypermetricReport(
        bound=bound,
        holds=best_val <= 0,
        max_value=Fraction(best_val, m.scale),
        argmax=best_vec,
        vectors_checked=checked,
    )


@dataclass
class GnsEmbedding:
    """Coordinates gamma with d(x,y) = ||gamma(x)-gamma(y)||^2 within tol."""

    points: list
    coords: np.ndarray          # shape (n, dim)
    tol: float
    max_error: float

    def coordinate(self, x) -> np.ndarray:
        return self.coords[self.points.index(x)]

    def distance_sq(self, x, y) -> float:
        diff = self.coordinate(x) - self.coordinate(y)
        return float(diff @ diff)


def gns_embed(m: FiniteMetric, tol: float = DEFAULT_GNS_TOL,
              certificate: NegDefCertificate | None = None) -> GnsEmbedding:
    """Euclidean coordinates from the centered form's eigendecomposition.

    Requires a negative-definite metric; a failing certificate is attached
    to the raised error.  The squared-distance reproduction is verified at
    every pair.
    """
    cert = certificate or certify_negative_definite(m)
    if not cert.negative_definite:
        err = InputError("metric is not negative definite; witness attached")
        err.witness = cert.witness
        raise err
    n = len(m.points)
    b = np.array([[float(v) for v in row] for row in cert.centered])
    evals, evecs = np.linalg.eigh(b)
    cut = max(float(evals.max()), 1.0) * 1e-13
    keep = evals > cut
    coords = evecs[:, keep] * np.sqrt(evals[keep])
    if coords.shape[1] > max(n - 1, 0):
        raise InternalCheckError("embedding dimension exceeds n-1")
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            diff = coords[i] - coords[j]
            worst = max(worst, abs(float(diff @ diff) - float(m.dist(m.points[i],
                                                                     m.points[j]))))
    if worst > tol:
        raise InternalCheckError(
            f"embedding error {worst:.3e} exceeds tolerance {tol:.3e}")
    return GnsEmbedding(list(m.points), coords, tol, worst)


@dataclass(frozen=True)
class L1Embedding:
    """Wall-side indicator vectors; Hamming distance equals path distance."""

    vertices: tuple
    vectors: dict
    dimension: int

    def hamming(self, u, v) -> int:
        return sum(a != b for a, b in zip(self.vectors[u], self.vectors[v]))


def l1_embed(cert: MedianGraphCert) -> L1Embedding:
    vecs = cert.wall_coordinates()
    for u in cert.vertices:
        for v in cert.vertices:
            ham = sum(a != b for a, b in zip(vecs[u], vecs[v]))
            if ham != cert.dist(u, v):
                raise InternalCheckError(
                    f"Hamming distance differs from path distance at ({u!r},{v!r})")
    return L1Embedding(tuple(cert.vertices), vecs, len(cert.walls))


@dataclass(frozen=True)
class HellyReport:
    holds: bool
    classification: Classification
    agrees: bool                # holds <-> classification is median/modular
    convex_count: int
    witness: tuple[frozenset, ...] | None


def convex_sets(m: FiniteMetric) -> list[int]:
    """All geodesically convex subsets, as bitmasks (includes empty set)."""
    n = len(m.points)
    betw = m._between()
    out = []
    for mask in range(1 << n):
        members = [t for t in range(n) if mask >> t & 1]
        if all(not betw[a][b] & ~mask for a, b in
               itertools.combinations_with_replacement(members, 2)):
            out.append(mask)
    return out


def check_helly(m: FiniteMetric, cap: int = DEFAULT_HELLY_CAP) -> HellyReport:
    """Verify Helly's property over all families of convex sets.

    Pairwise-intersecting families reduce to the triple case (intersections
    of convex sets are convex, so C1,C2 may be replaced by their meet), so
    checking every triple of nonempty convex sets decides the property.
    The verdict must match modularity of the metric.
    """
    n = len(m.points)
    if n > cap:
        raise ResourceLimitError(f"Helly check capped at {cap} points, got {n}",
                                 cap=cap)
    masks = [x for x in convex_sets(m) if x]
    cls = classify(m)

    def unmask(x):
        return frozenset(m.points[t] for t in range(n) if x >> t & 1)

    witness = None
    arr = np.array(masks, dtype=np.int64)
    k = len(masks)
    for a in range(k):
        ma = masks[a]
        hits_a = arr & ma
        for b in range(a + 1, k):
            mb = masks[b]
            common = ma & mb
            if not common:
                continue
            tail = arr[b + 1:]
            bad = ((tail & common) == 0) & (hits_a[b + 1:] != 0) & ((tail & mb) != 0)
            if bad.any():
                c = int(np.flatnonzero(bad)[0]) + b + 1
                witness = (unmask(ma), unmask(mb), unmask(masks[c]))
                break
        if witness:
            break
    holds = witness is None
    agrees = holds == (cls.kind in ("median", "modular"))
    return HellyReport(holds, cls, agrees, len(masks) + 1, witness)


@dataclass(frozen=True)
class RetractionStep:
    """One peeling step: the kept halfspace, the peeled complement, the
    constant gap delta, and the nearest-point retraction."""

    halfspace: tuple
    complement: tuple
    delta: Fraction
    retraction: dict


@dataclass(frozen=True)
class DecompositionTrace:
    metric: MedianMetric
    steps: tuple[RetractionStep, ...]

    def form_value_via_trace(self, coeffs: Mapping) -> Fraction:
        """Reassemble the distance form from the trace: each step
        contributes -2*delta*(sum of peeled coefficients)^2; must equal
        the direct form value."""
        weights = {p: Fraction(c) for p, c in coeffs.items()}
        if sum(weights.values()) != 0:
            raise InputError("coefficients must sum to zero")
        total = Fraction(0)
        for step in self.steps:
            peeled = sum((weights.get(p, Fraction(0)) for p in step.complement),
                         Fraction(0))
            total += -2 * step.delta * peeled * peeled
            moved = {}
            for p in step.complement:
                tgt = step.retraction[p]
                moved[tgt] = moved.get(tgt, Fraction(0)) + weights.pop(p, Fraction(0))
            for tgt, v in moved.items():
                weights[tgt] = weights.get(tgt, Fraction(0)) + v
        return total


def _proper_halfspace_masks(betw, indices: list[int]) -> list[int]:
    """Proper convex-complement subsets of the given index set, by scan."""
    k = len(indices)
    local = {g: i for i, g in enumerate(indices)}

    def convex(mask: int) -> bool:
        members = [indices[t] for t in range(k) if mask >> t & 1]
        for a in members:
            row = betw[a]
            for b in members:
                inter = row[b]
                t = inter
                while t:
                    low = t & -t
                    g = low.bit_length() - 1
                    if g in local and not mask >> local[g] & 1:
                        return False
                    t ^= low
        return True

    full = (1 << k) - 1
    out = []
    for rest in range(1 << (k - 1)):
        side = (rest << 1) | 1
        if side == full:
            continue
        if convex(side) and convex(full & ~side):
            out.append(side)
            out.append(full & ~side)
    return out


def retraction_decomposition(mm: MedianMetric, cap: int = 16) -> DecompositionTrace:
    """Peel a maximal proper halfspace at a time, checking every clause the
    negative-definiteness argument rests on: unique nearest points lying on
    geodesics, the rectangle property off the halfspace, a constant gap
    delta, the four-case distance law, and that only the chosen wall
    separates a point from its retraction.
    """
    n = len(mm.points)
    if n > cap:
        raise ResourceLimitError(
            f"retraction decomposition enumerates halfspaces; capped at {cap} "
            f"points, got {n}", cap=cap)
    d = [[mm.dist_int(i, j) for j in range(n)] for i in range(n)]
    betw = mm._between()
    steps: list[RetractionStep] = []
    current = list(range(n))
    while len(current) > 1:
        sides = _proper_halfspace_masks(betw, current)
        if not sides:
            raise InternalCheckError("no proper halfspace in a 2+ point space")
        expand = {side: [current[t] for t in range(len(current)) if side >> t & 1]
                  for side in sides}
        maximal = [s for s in sides
                   if not any(t != s and expand[s] and
                              set(expand[s]) < set(expand[t]) for t in sides)]
        chosen = min(maximal, key=lambda s: tuple(expand[s]))
        inside = expand[chosen]
        outside = [g for g in current if g not in set(inside)]

        retraction = {}
        delta = None
        for x in outside:
            dmin = min(d[x][p] for p in inside)
            nearest = [p for p in inside if d[x][p] == dmin]
            if len(nearest) != 1:
                raise InternalCheckError(
                    f"nearest point in halfspace not unique for {mm.points[x]!r}")
            px = nearest[0]
            for p in inside:
                if d[x][px] + d[px][p] != d[x][p]:
                    raise InternalCheckError(
                        "nearest point not on the geodesic to the halfspace")
            for s in sides:
                smem = set(expand[s])
                if ((x in smem) != (px in smem)) and s != chosen and \
                        smem != set(outside):
                    raise InternalCheckError(
                        "a wall other than the peeled one separates x from its "
                        "retraction")
            retraction[x] = px
            if delta is None:
                delta = dmin
            elif delta != dmin:
                raise InternalCheckError("gap to the halfspace is not constant")

        for x in outside:
            for y in outside:
                px, py = retraction[x], retraction[y]
                if not (betw[x][py] >> y & 1 and betw[x][py] >> px & 1
                        and betw[y][px] >> x & 1 and betw[y][px] >> py & 1):
                    raise InternalCheckError("rectangle property fails off the "
                                             "halfspace")
                if d[x][y] != d[px][py] or d[y][py] != d[px][x]:
                    raise InternalCheckError("rectangle has unequal opposite sides")

        for x in current:
            for y in current:
                px = retraction.get(x, x)
                py = retraction.get(y, y)
                gap = (x in retraction) != (y in retraction)
                if d[x][y] != d[px][py] + (delta if gap else 0):
                    raise InternalCheckError("four-case distance law fails")

        steps.append(RetractionStep(
            halfspace=tuple(mm.points[g] for g in inside),
            complement=tuple(mm.points[g] for g in outside),
            delta=Fraction(delta, mm.scale),
            retraction={mm.points[x]: mm.points[p] for x, p in retraction.items()},
        ))
        current = inside
    return DecompositionTrace(mm, tuple(steps))


def zero_sum_sampling_oracle(m: FiniteMetric, samples: int = 10_000,
                             seed: int = 0, span: int = 9) -> Fraction:
    """Maximum form value over seeded random integer zero-sum vectors.

    Integer vectors cover the rational condition (the form is homogeneous,
    so denominators clear); evaluation is exact in int64.  A certificate
    claiming negative definiteness must never be contradicted by this.
    """
    n = len(m.points)
    rng = np.random.default_rng(seed)
    a = rng.integers(-span, span + 1, size=(samples, n), dtype=np.int64)
    a[:, -1] -= a.sum(axis=1)
    d = np.array([[m.dist_int(i, j) for j in range(n)] for i in range(n)],
                 dtype=np.int64)
    peak = int(np.abs(a).max(initial=0))
    if peak ** 2 * int(d.max(initial=0)) * n * n >= 2 ** 62:
        raise InputError("sampling oracle would overflow int64")
    vals = np.einsum("si,ij,sj->s", a, d, a)
    return Fraction(int(vals.max()), m.scale)
