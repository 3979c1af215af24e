"""Knot and link invariants of braid words and embedded polylines.

Three independent computational routes live here:

- combinatorial: writhe and transverse self-linking read off a braid word
  (sl = exponent sum minus strand count, the push-off convention for
  closed braids in the standard tight structure);
- algebraic: Alexander polynomials through the reduced Burau
  representation over exact integer Laurent arithmetic;
- geometric: Gauss linking numbers of disjoint closed polylines, either by
  signed crossings in a verified-generic projection or by the exact
  per-segment-pair solid-angle formula.

Identification against the small built-in table is conservative: the
Alexander polynomial does not separate all knots, so anything off the
table is reported as "unknown" rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from knotflow.braids import BraidWord

__all__ = [
    "CurveGeometry",
    "CurvesIntersect",
    "DegenerateProjection",
    "KnotReport",
    "LaurentPoly",
    "NotAKnot",
    "PLCurve",
    "alexander",
    "closure_curves",
    "gauss_linking",
    "identify",
    "knot_report",
    "writhe_and_self_linking",
]


class NotAKnot(ValueError):
    """The braid closure has more than one component."""


class CurvesIntersect(ValueError):
    """Input curves are not disjoint to tolerance."""


class DegenerateProjection(RuntimeError):
    """No generic projection direction found after retries."""


# ---------------------------------------------------------------------------
# Laurent polynomials with integer coefficients


class LaurentPoly:
    """Integer Laurent polynomial; coeffs[k] multiplies t**(lo + k)."""

    __slots__ = ("lo", "coeffs")

    def __init__(self, lo: int = 0, coeffs=()):
        coeffs = [int(c) for c in coeffs]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        end = len(coeffs)
        while end > start and coeffs[end - 1] == 0:
            end -= 1
        self.lo = int(lo) + start if end > start else 0
        self.coeffs = tuple(coeffs[start:end])

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls(0, ())

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls(0, (1,))

    @classmethod
    def term(cls, coeff: int, exponent: int) -> "LaurentPoly":
        return cls(exponent, (coeff,))

    @classmethod
    def from_pairs(cls, pairs) -> "LaurentPoly":
        pairs = [(int(e), int(c)) for e, c in pairs if int(c) != 0]
        if not pairs:
            return cls.zero()
        lo = min(e for e, _ in pairs)
        hi = max(e for e, _ in pairs)
        coeffs = [0] * (hi - lo + 1)
        for e, c in pairs:
            coeffs[e - lo] += c
        return cls(lo, coeffs)

    def to_pairs(self):
        return [(self.lo + k, c) for k, c in enumerate(self.coeffs) if c != 0]

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    @property
    def span(self) -> int:
        """Difference between highest and lowest exponent (0 for constants)."""
        return len(self.coeffs) - 1 if self.coeffs else 0

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPoly)
            and self.lo == other.lo
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.lo, self.coeffs))

    def __neg__(self):
        return LaurentPoly(self.lo, tuple(-c for c in self.coeffs))

    def __add__(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        coeffs = [0] * (hi - lo + 1)
        for k, c in enumerate(self.coeffs):
            coeffs[self.lo - lo + k] += c
        for k, c in enumerate(other.coeffs):
            coeffs[other.lo - lo + k] += c
        return LaurentPoly(lo, coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return LaurentPoly.zero()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return LaurentPoly(self.lo + other.lo, out)

    def shifted(self, k: int) -> "LaurentPoly":
        return LaurentPoly(self.lo + k, self.coeffs)

    def reversed_variable(self) -> "LaurentPoly":
        """Substitute t -> 1/t."""
        return LaurentPoly(-self.hi, tuple(reversed(self.coeffs)))

    def __call__(self, t: float) -> float:
        return sum(c * t ** (self.lo + k) for k, c in enumerate(self.coeffs))

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient self / other, asserting the division is exact."""
        if other.is_zero:
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero:
            return LaurentPoly.zero()
        num = list(reversed(self.coeffs))
        den = list(reversed(other.coeffs))
        if len(num) < len(den):
            raise ArithmeticError("inexact polynomial division")
        quot = []
        for _ in range(len(num) - len(den) + 1):
            lead = num[0]
            if lead % den[0] != 0:
                raise ArithmeticError("inexact polynomial division")
            f = lead // den[0]
            quot.append(f)
            for i in range(len(den)):
                num[i] -= f * den[i]
            num.pop(0)
        if any(num):
            raise ArithmeticError("inexact polynomial division")
        return LaurentPoly(self.lo - other.lo, tuple(reversed(quot)))

    def __repr__(self):
        if self.is_zero:
            return "LaurentPoly<0>"
        terms = []
        for e, c in reversed(self.to_pairs()):
            if e == 0:
                terms.append(f"{c:+d}")
            elif e == 1:
                terms.append(f"{c:+d}*t")
            else:
                terms.append(f"{c:+d}*t^{e}")
        return "LaurentPoly<" + " ".join(terms) + ">"


def _laurent_det(matrix: list) -> LaurentPoly:
    """Determinant by fraction-free Bareiss elimination (exact division)."""
    n = len(matrix)
    if n == 0:
        return LaurentPoly.one()
    # shift all entries to ordinary polynomials; det picks up t^(n*shift)
    lows = [e.lo for row in matrix for e in row if not e.is_zero]
    shift = -min(lows) if lows and min(lows) < 0 else 0
    m = [[e.shifted(shift) for e in row] for row in matrix]
    sign = 1
    prev = LaurentPoly.one()
    for k in range(n - 1):
        if m[k][k].is_zero:
            pivot_row = next((r for r in range(k + 1, n) if not m[r][k].is_zero), None)
            if pivot_row is None:
                return LaurentPoly.zero()
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).exact_div(prev)
            m[i][k] = LaurentPoly.zero()
        prev = m[k][k]
    det = m[n - 1][n - 1].shifted(-shift * n)
    return -det if sign < 0 else det


# ---------------------------------------------------------------------------
# Alexander polynomial via the reduced Burau representation

_T = LaurentPoly.term(1, 1)
_T_INV = LaurentPoly.term(1, -1)
_ONE = LaurentPoly.one()


def _burau_column(i: int, n: int, positive: bool):
    """Nonzero rows of column i-1 (0-based) of the reduced Burau matrix of
    sigma_i^{+-1} on n strands; every generator differs from the identity
    in that single column."""
    rows = {}
    if positive:
        if i >= 2:
            rows[i - 2] = _T
        rows[i - 1] = -_T
        if i <= n - 2:
            rows[i] = _ONE
    else:
        if i >= 2:
            rows[i - 2] = _ONE
        rows[i - 1] = -_T_INV
        if i <= n - 2:
            rows[i] = _T_INV
    return rows


def _reduced_burau(braid: BraidWord) -> list:
    n = braid.strands
    dim = n - 1
    m = [
        [(_ONE if r == c else LaurentPoly.zero()) for c in range(dim)]
        for r in range(dim)
    ]
    for letter in braid.letters:
        i = abs(letter)
        col_rows = _burau_column(i, n, letter > 0)
        col = i - 1
        for r in range(dim):
            acc = LaurentPoly.zero()
            for k, entry in col_rows.items():
                if not m[r][k].is_zero:
                    acc = acc + m[r][k] * entry
            m[r][col] = acc
    return m


def alexander(b: BraidWord) -> LaurentPoly:
    """Alexander polynomial of the knot closing the braid.

    det(I - reduced Burau), times (1 - t)/(1 - t^n), normalized to the
    symmetric representative with positive leading coefficient; the result
    satisfies delta(t) = delta(1/t) and delta(1) = +-1.
    """
    if not b.is_knot():
        raise NotAKnot(f"closure of {b} has {len(b.components())} components")
    n = b.strands
    if n == 1:
        return LaurentPoly.one()
    rho = _reduced_burau(b)
    dim = n - 1
    i_minus_rho = [
        [(_ONE if r == c else LaurentPoly.zero()) - rho[r][c] for c in range(dim)]
        for r in range(dim)
    ]
    det = _laurent_det(i_minus_rho)
    one_minus_t = LaurentPoly.from_pairs([(0, 1), (1, -1)])
    one_minus_tn = LaurentPoly.from_pairs([(0, 1), (n, -1)])
    raw = (det * one_minus_t).exact_div(one_minus_tn)
    return _normalize_alexander(raw)


def _normalize_alexander(raw: LaurentPoly) -> LaurentPoly:
    if raw.is_zero:
        raise ArithmeticError("vanishing Alexander polynomial for a knot")
    center2 = raw.lo + raw.hi
    if center2 % 2 != 0:
        raise ArithmeticError("asymmetric exponent range; closure is not a knot")
    poly = raw.shifted(-center2 // 2)
    if poly.coeffs[-1] < 0:
        poly = -poly
    if poly.coeffs != tuple(reversed(poly.coeffs)):
        raise ArithmeticError("non-palindromic Alexander polynomial")
    if poly(1) not in (1, -1):
        raise ArithmeticError("Alexander polynomial must evaluate to +-1 at t=1")
    return poly


def writhe_and_self_linking(b: BraidWord):
    """(writhe, self-linking) of the closed-braid diagram.

    Writhe of the braid-position diagram is the exponent sum; the
    self-linking of the transverse closure is writhe minus strand count.
    """
    if not b.is_knot():
        raise NotAKnot(f"closure of {b} has {len(b.components())} components")
    e = b.exponent_sum
    return e, e - b.strands


# ---------------------------------------------------------------------------
# Embedded polylines and Gauss linking


@dataclass(frozen=True)
class PLCurve:
    """Closed polyline in R^3; the last vertex connects back to the first."""

    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3 or verts.shape[0] < 3:
            raise ValueError("need at least 3 vertices of dimension 3")
        cyc = np.vstack([verts, verts[:1]])
        if np.any(np.linalg.norm(np.diff(cyc, axis=0), axis=1) < 1e-12):
            raise ValueError("consecutive vertices coincide")
        object.__setattr__(self, "vertices", verts)

    def __len__(self):
        return len(self.vertices)

    def segments(self):
        """(starts, ends) arrays of the closing segment chain."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)


def _min_distance_between(c1: PLCurve, c2: PLCurve) -> float:
    """Minimum distance between two closed segment chains (clamped form)."""
    p0, p1 = c1.segments()
    q0, q1 = c2.segments()
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0[:, None, :] - q0[None, :, :]
    a = np.einsum("id,id->i", d1, d1)[:, None]
    e = np.einsum("jd,jd->j", d2, d2)[None, :]
    b = np.einsum("id,jd->ij", d1, d2)
    c = np.einsum("id,ijd->ij", d1, r)
    f = np.einsum("jd,ijd->ij", d2, r)
    denom = a * e - b * b
    s = np.where(denom > 1e-15, (b * f - c * e) / np.where(denom == 0, 1, denom), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.where(e > 1e-15, (b * s + f) / np.where(e == 0, 1, e), 0.0)
    t_clamped = np.clip(t, 0.0, 1.0)
    # re-solve s where t was clamped
    s = np.where(
        t != t_clamped,
        np.clip((b * t_clamped - c) / np.where(a == 0, 1, a), 0.0, 1.0),
        s,
    )
    t = t_clamped
    diff = r + s[:, :, None] * d1[:, None, :] - t[:, :, None] * d2[None, :, :]
    return float(np.sqrt(np.einsum("ijd,ijd->ij", diff, diff).min()))


def _gauss_quadrature(c1: PLCurve, c2: PLCurve) -> float:
    """Gauss linking integral; exact solid-angle sum over segment pairs."""
    p0, p1 = c1.segments()
    q0, q1 = c2.segments()
    a = p0[:, None, :] - q0[None, :, :]
    b = p0[:, None, :] - q1[None, :, :]
    c = p1[:, None, :] - q1[None, :, :]
    d = p1[:, None, :] - q0[None, :, :]

    def norm(v):
        return np.sqrt(np.einsum("ijd,ijd->ij", v, v))

    def dot(u, v):
        return np.einsum("ijd,ijd->ij", u, v)

    na, nb, nc, nd = norm(a), norm(b), norm(c), norm(d)
    p = np.einsum("ijd,ijd->ij", a, np.cross(b, c))
    den1 = na * nb * nc + dot(a, b) * nc + dot(b, c) * na + dot(c, a) * nb
    den2 = na * nd * nc + dot(a, d) * nc + dot(d, c) * na + dot(c, a) * nd
    total = np.arctan2(p, den1) + np.arctan2(p, den2)
    return float(total.sum() / (2.0 * math.pi))


def _projection_basis(direction: np.ndarray):
    d = direction / np.linalg.norm(direction)
    helper = np.array([1.0, 0.0, 0.0])
    if abs(d[0]) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, d)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return e1, e2, d


def _signed_crossings_once(c1: PLCurve, c2: PLCurve, direction: np.ndarray) -> int:
    """Signed inter-curve crossings in the projection along ``direction``.

    Raises DegenerateProjection on any near-parallel overlap, near-vertex
    crossing, ambiguous depth, or odd total count.
    """
    e1, e2, d = _projection_basis(direction)
    param_eps = 1e-9

    def flatten(curve):
        v = curve.vertices
        return np.column_stack([v @ e1, v @ e2]), v @ d

    u1, h1 = flatten(c1)
    u2, h2 = flatten(c2)
    total = 0
    n1, n2 = len(u1), len(u2)
    scale = max(np.abs(u1).max(), np.abs(u2).max(), 1.0)
    for i in range(n1):
        a0, a1 = u1[i], u1[(i + 1) % n1]
        ta = a1 - a0
        for j in range(n2):
            b0, b1 = u2[j], u2[(j + 1) % n2]
            tb = b1 - b0
            det = ta[0] * tb[1] - ta[1] * tb[0]
            rhs = b0 - a0
            if abs(det) < 1e-14 * scale * scale:
                # parallel in projection: degenerate only if they overlap
                cross_gap = abs(rhs[0] * ta[1] - rhs[1] * ta[0])
                if cross_gap < 1e-10 * scale * scale:
                    raise DegenerateProjection("parallel overlapping segments")
                continue
            s = (rhs[0] * tb[1] - rhs[1] * tb[0]) / det
            t = (rhs[0] * ta[1] - rhs[1] * ta[0]) / det
            if s < -param_eps or s > 1 + param_eps or t < -param_eps or t > 1 + param_eps:
                continue
            if min(s, t) < param_eps or max(s, t) > 1 - param_eps:
                raise DegenerateProjection("crossing at a vertex")
            ha = h1[i] + s * (h1[(i + 1) % n1] - h1[i])
            hb = h2[j] + t * (h2[(j + 1) % n2] - h2[j])
            if abs(ha - hb) < 1e-12 * scale:
                raise DegenerateProjection("ambiguous crossing depth")
            t_over, t_under = (ta, tb) if ha > hb else (tb, ta)
            sign = t_over[0] * t_under[1] - t_over[1] * t_under[0]
            total += 1 if sign > 0 else -1
    if total % 2 != 0:
        raise DegenerateProjection("odd crossing count")
    return total // 2


def gauss_linking(c1: PLCurve, c2: PLCurve, method: str = "signed_crossings"):
    """Linking number of two disjoint closed polylines.

    ``signed_crossings`` returns the exact integer from a generic planar
    projection (retrying perturbed directions before giving up);
    ``quadrature`` returns the real-valued Gauss integral, which lands
    within 0.4 of the integer and is rounded by the caller.
    """
    if _min_distance_between(c1, c2) < 1e-9:
        raise CurvesIntersect("curves are closer than 1e-9")
    if method == "quadrature":
        return _gauss_quadrature(c1, c2)
    if method != "signed_crossings":
        raise ValueError(f"unknown method {method!r}")
    gen = np.random.default_rng(1618)
    direction = np.array([0.12, -0.97, 0.21])
    last_error = None
    for _ in range(8):
        try:
            return _signed_crossings_once(c1, c2, direction)
        except DegenerateProjection as err:
            last_error = err
            direction = gen.normal(size=3)
    raise DegenerateProjection(f"no generic direction found: {last_error}")


# ---------------------------------------------------------------------------
# Closed-braid embedding as polylines


@dataclass(frozen=True)
class CurveGeometry:
    """Embedding parameters for closed-braid polylines.

    Strands run upward along +z at x = slot * slot_spacing; each letter
    occupies one height band with the over strand offset to -y and the
    under strand to +y (this choice makes positive letters +1 crossings);
    closure arcs are nested planar loops in the planes x = slot, which
    keeps them disjoint from each other and from the braid block.
    """

    slot_spacing: float = 1.0
    band_height: float = 1.0
    clearance: float = 0.35
    loop_depth: float = 2.5
    loop_margin: float = 0.8


def closure_curves(braid: BraidWord, geometry: CurveGeometry | None = None):
    """Embed the closure of a braid; one PLCurve per link component.

    Components are ordered by their smallest entering slot.
    """
    geo = geometry or CurveGeometry()
    n = braid.strands
    sx, hz, cl = geo.slot_spacing, geo.band_height, geo.clearance

    paths = {s: [(s * sx, 0.0, 0.0)] for s in range(n)}

    def append(strand, point):
        if paths[strand][-1] != point:
            paths[strand].append(point)

    slot_strand = list(range(n))
    for k, letter in enumerate(braid.letters):
        j = abs(letter) - 1
        left, right = slot_strand[j], slot_strand[j + 1]
        z0, z1 = k * hz, (k + 1) * hz
        zm = z0 + hz / 2
        xl, xr = j * sx, (j + 1) * sx
        xm = (xl + xr) / 2
        over_left = letter > 0
        y_left = -cl if over_left else cl
        append(left, (xl, 0.0, z0))
        append(left, (xm, y_left, zm))
        append(left, (xr, 0.0, z1))
        append(right, (xr, 0.0, z0))
        append(right, (xm, -y_left, zm))
        append(right, (xl, 0.0, z1))
        slot_strand[j], slot_strand[j + 1] = right, left

    z_top = max(len(braid.letters), 1) * hz
    for slot, strand in enumerate(slot_strand):
        append(strand, (slot * sx, 0.0, z_top))

    perm = braid.permutation()
    curves = []
    for cycle in braid.components():
        vertices = []
        for strand in cycle:
            vertices.extend(paths[strand])
            x_exit = perm[strand] * sx
            vertices.extend(
                [
                    (x_exit, 0.0, z_top + geo.loop_margin),
                    (x_exit, -geo.loop_depth, z_top + geo.loop_margin),
                    (x_exit, -geo.loop_depth, -geo.loop_margin),
                    (x_exit, 0.0, -geo.loop_margin),
                ]
            )
        curves.append(PLCurve(np.array(vertices)))
    return curves


# ---------------------------------------------------------------------------
# Reports and identification

_TREFOIL = LaurentPoly.from_pairs([(-1, 1), (0, -1), (1, 1)])
_FIGURE_EIGHT = LaurentPoly.from_pairs([(-1, 1), (0, -3), (1, 1)])
_T25 = LaurentPoly.from_pairs([(-2, 1), (-1, -1), (0, 1), (1, -1), (2, 1)])
_T27 = LaurentPoly.from_pairs(
    [(-3, 1), (-2, -1), (-1, 1), (0, -1), (1, 1), (2, -1), (3, 1)]
)
_T34 = LaurentPoly.from_pairs([(-3, 1), (-2, -1), (0, 1), (2, -1), (3, 1)])
_T35 = LaurentPoly.from_pairs(
    [(-4, 1), (-3, -1), (-1, 1), (0, -1), (1, 1), (3, -1), (4, 1)]
)


@dataclass(frozen=True)
class KnotReport:
    """Invariant bundle for one closed-braid orbit."""

    word: str
    strands: int
    crossings: int
    exponent_sum: int
    self_linking: int
    genus_bound: int
    alexander: LaurentPoly
    name: str = "unknown"

    def to_json_dict(self) -> dict:
        return {
            "word": self.word,
            "strands": self.strands,
            "crossings": self.crossings,
            "exponent_sum": self.exponent_sum,
            "self_linking": self.self_linking,
            "genus_bound": self.genus_bound,
            "alexander": [[e, c] for e, c in self.alexander.to_pairs()],
            "name": self.name,
        }


def identify(report: KnotReport) -> str:
    """Table lookup by Alexander polynomial (plus genus/chirality hints).

    Returns "unknown" whenever the table does not decide; never guesses.
    """
    poly = report.alexander
    homogeneous_positive = report.exponent_sum == report.crossings
    homogeneous_negative = report.exponent_sum == -report.crossings
    if poly == LaurentPoly.one():
        return "unknot" if report.genus_bound == 0 else "unknown"
    if poly == _TREFOIL:
        if homogeneous_positive:
            return "trefoil (right-handed)"
        if homogeneous_negative:
            return "trefoil (left-handed)"
        return "trefoil"
    if poly == _FIGURE_EIGHT:
        return "figure-eight"
    if poly == _T25:
        return "cinquefoil T(2,5)"
    if poly == _T27:
        return "T(2,7)"
    if poly == _T34:
        return "T(3,4)"
    if poly == _T35:
        return "T(3,5)"
    return "unknown"


def knot_report(word: str, braid: BraidWord) -> KnotReport:
    """Assemble the invariants of a knotted braid closure."""
    writhe, sl = writhe_and_self_linking(braid)
    poly = alexander(braid)
    if abs(writhe) == braid.crossing_count:
        # homogeneous braids realize the Bennequin genus exactly
        genus_bound = (braid.crossing_count - braid.strands + 1) // 2
    else:
        genus_bound = poly.span // 2
    report = KnotReport(
        word=word,
        strands=braid.strands,
        crossings=braid.crossing_count,
        exponent_sum=writhe,
        self_linking=sl,
        genus_bound=genus_bound,
        alexander=poly,
    )
    return replace(report, name=identify(report))
