"""Integer polynomials, primitive families, composition with tuples and the
shift-degeneracy machinery (shift relations, degeneracy graph, resultants)."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

from .errors import BoundsError, CapabilityError, DomainError
from .numeric import BRUTE_FORCE_ROOT_LIMIT, RootCount, distinct_roots_gcd, prime_factors
from .tuples import KTuple


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with exact integer coefficients, ascending degree order."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        if not c:
            raise DomainError("the zero polynomial is not allowed")
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        return parse_polynomial(text)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    @property
    def content(self):
        return reduce(math.gcd, self.coeffs, 0)

    @property
    def height(self):
        return max(abs(a) for a in self.coeffs)

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def shift(self, t: int) -> "IntPolynomial":
        """f(X + t), by Horner's scheme on (X + t)."""
        out = [0]
        for a in reversed(self.coeffs):
            # out = out * (X + t) + a
            nxt = [0] * (len(out) + 1)
            for i, b in enumerate(out):
                nxt[i] += b * t
                nxt[i + 1] += b
            nxt[0] += a
            out = nxt
        return IntPolynomial(out)

    def __str__(self):
        return format_polynomial(self.coeffs)


def format_polynomial(coeffs):
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        a = coeffs[e]
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        if e == 0:
            body = str(mag)
        else:
            xpart = "x" if e == 1 else f"x^{e}"
            body = xpart if mag == 1 else f"{mag}*{xpart}"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


_TERM = re.compile(r"([+-])(\d*)(\*?x(?:\^(\d+))?)?$")


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse "x^2+7", "2*x - 1", "3x^2" or a coefficient list "a0,a1,...,ad"
    (optionally bracketed)."""
    s = re.sub(r"\s+", "", text.lower())
    if not s:
        raise DomainError("empty polynomial text")
    if s.startswith("["):
        if not s.endswith("]"):
            raise DomainError(f"unbalanced brackets in {text!r}")
        s = s[1:-1]
    if re.fullmatch(r"-?\d+(,-?\d+)*", s) and "," in s:
        return IntPolynomial(int(t) for t in s.split(","))
    if s[0] not in "+-":
        s = "+" + s
    pieces = re.findall(r"[+-][^+-]*", s)
    if "".join(pieces) != s:
        raise DomainError(f"cannot parse polynomial {text!r}")
    coeffs: dict[int, int] = {}
    for piece in pieces:
        m = _TERM.match(piece)
        if not m or (not m.group(2) and not m.group(3)):
            raise DomainError(f"bad term {piece!r} in {text!r}")
        sign, num, xpart, exp = m.groups()
        if xpart and xpart.startswith("*") and not num:
            raise DomainError(f"bad term {piece!r} in {text!r}")
        c = int(num) if num else 1
        e = (int(exp) if exp else 1) if xpart else 0
        coeffs[e] = coeffs.get(e, 0) + (-c if sign == "-" else c)
    deg = max(coeffs)
    return IntPolynomial(coeffs.get(i, 0) for i in range(deg + 1))


def split_family_text(text):
    """Split on commas that are not inside brackets."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p for p in (q.strip() for q in parts) if p]


@dataclass(frozen=True)
class PolyFamily:
    members: tuple[IntPolynomial, ...]
    assume_irreducible: bool = field(default=False, compare=False)

    def __init__(self, members: Iterable, assume_irreducible: bool = False):
        ms = tuple(m if isinstance(m, IntPolynomial) else _as_poly(m) for m in members)
        if not ms:
            raise DomainError("a family needs at least one member")
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "assume_irreducible", assume_irreducible)

    @classmethod
    def parse(cls, text: str, assume_irreducible: bool = False) -> "PolyFamily":
        return cls((parse_polynomial(t) for t in split_family_text(text)), assume_irreducible)

    @classmethod
    def linear_tuple(cls, h) -> "PolyFamily":
        """The family (X + h_1, ..., X + h_k)."""
        return cls(IntPolynomial((e, 1)) for e in h)

    @property
    def m(self):
        return len(self.members)

    @cached_property
    def peg(self):
        return math.prod(f.degree for f in self.members)

    @cached_property
    def c(self):
        return sum(f.height for f in self.members)

    @property
    def is_linear(self):
        return all(f.degree == 1 for f in self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def __str__(self):
        return ", ".join(str(f) for f in self.members)


def _as_poly(m):
    if isinstance(m, str):
        return parse_polynomial(m)
    return IntPolynomial(m)


def _divisors(n):
    n = abs(n)
    divs = [1]
    for p in prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return divs


def has_rational_root(f: IntPolynomial) -> bool:
    a0, ad = f.coeffs[0], f.leading
    if a0 == 0:
        return True
    for q in _divisors(ad):
        for p in _divisors(a0):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if _eval_fraction(f, cand) == 0:
                    return True
    return False


def _eval_fraction(f, x):
    acc = Fraction(0)
    for a in reversed(f.coeffs):
        acc = acc * x + a
    return acc


def is_irreducible(f: IntPolynomial, assume: bool = False) -> bool:
    """Irreducibility over Q for degree <= 3.

    Degree >= 4 raises :class:`CapabilityError` unless ``assume`` is set.
    """
    d = f.degree
    if d < 1:
        return False
    if d == 1:
        return True
    if d == 2:
        c, b, a = f.coeffs
        disc = b * b - 4 * a * c
        return not (disc >= 0 and math.isqrt(disc) ** 2 == disc)
    if d == 3:
        return not has_rational_root(f)
    if assume:
        return True
    raise CapabilityError(f"irreducibility of degree-{d} polynomials is not decided; "
                          "pass assume_irreducible to assert it")


@dataclass(frozen=True)
class PrimitivityReport:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def is_primitive_family(F: PolyFamily) -> PrimitivityReport:
    """Distinct, irreducible members with positive leading coefficient and content 1.

    The report names the first violated condition.
    """
    seen = set()
    for j, f in enumerate(F.members):
        if f.degree < 1:
            return PrimitivityReport(False, f"member {j} ({f}) is constant")
        if f in seen:
            return PrimitivityReport(False, f"member {j} ({f}) is repeated")
        seen.add(f)
    for j, f in enumerate(F.members):
        if f.leading <= 0:
            return PrimitivityReport(False, f"member {j} ({f}) has non-positive leading coefficient")
        if f.content != 1:
            return PrimitivityReport(False, f"member {j} ({f}) has content {f.content}")
        if not is_irreducible(f, assume=F.assume_irreducible):
            return PrimitivityReport(False, f"member {j} ({f}) is reducible")
    return PrimitivityReport(True)


def require_primitive(F: PolyFamily):
    report = is_primitive_family(F)
    if not report:
        raise DomainError(f"family ({F}) is not primitive: {report.reason}")


def product_polynomial(polys):
    out = [1]
    for f in polys:
        nxt = [0] * (len(out) + len(f.coeffs) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(f.coeffs):
                nxt[i + j] += a * b
        out = nxt
    return out


def nu_p_family(F: PolyFamily, p: int) -> RootCount:
    """Size of the union of the root sets mod p of the members.

    If some member vanishes identically mod p, returns p with
    ``saturated=True``.
    """
    if any(all(a % p == 0 for a in f.coeffs) for f in F.members):
        return RootCount(p, saturated=True)
    if p <= BRUTE_FORCE_ROOT_LIMIT:
        count = 0
        for x in range(p):
            for f in F.members:
                if f(x) % p == 0:
                    count += 1
                    break
        return RootCount(count)
    return RootCount(distinct_roots_gcd(product_polynomial(F.members), p))


def compose(F: PolyFamily, h) -> PolyFamily:
    """The km polynomials f_j(X + h_i), ordered by tuple index i, then member j."""
    entries = h.entries if isinstance(h, KTuple) else tuple(h)
    if min(entries) < 1:
        raise BoundsError("tuple entries must be positive")
    return PolyFamily((f.shift(t) for t in entries for f in F.members),
                      assume_irreducible=F.assume_irreducible)


@dataclass(frozen=True)
class ShiftRelation:
    """f_{j1}(X) = f_{j2}(X + delta), with 0-based member indices."""

    j1: int
    j2: int
    delta: int


def shift_relations(F: PolyFamily) -> list[ShiftRelation]:
    out = []
    for j1, f in enumerate(F.members):
        for j2, g in enumerate(F.members):
            if j1 == j2 or f.degree != g.degree or f.leading != g.leading:
                continue
            d = f.degree
            num = f.coeffs[d - 1] - g.coeffs[d - 1]
            den = d * f.leading
            if num == 0 or num % den:
                continue
            delta = num // den
            if g.shift(delta) == f:
                out.append(ShiftRelation(j1, j2, delta))
    return out


@dataclass(frozen=True)
class DegeneracyGraph:
    k: int
    edges: tuple[tuple[int, int, ShiftRelation], ...]
    components: int
    nonsingleton: int

    @property
    def c(self):
        return self.components

    @property
    def d(self):
        return self.nonsingleton

    @property
    def edge_set(self):
        return {(a, b) for a, b, _ in self.edges}


def degeneracy_graph(F: PolyFamily, h, relations=None) -> DegeneracyGraph:
    """Graph on tuple indices; (i1, i2) is an edge when
    f_{j1}(X + h_{i1}) = f_{j2}(X + h_{i2}) for some shift relation."""
    entries = h.entries if isinstance(h, KTuple) else tuple(h)
    k = len(entries)
    rels = shift_relations(F) if relations is None else relations
    by_delta = {}
    for r in rels:
        by_delta.setdefault(r.delta, r)
    edges = []
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i1 in range(k):
        for i2 in range(i1 + 1, k):
            r = by_delta.get(entries[i2] - entries[i1])
            if r is not None:
                edges.append((i1, i2, r))
                parent[find(i1)] = find(i2)
    sizes = {}
    for i in range(k):
        root = find(i)
        sizes[root] = sizes.get(root, 0) + 1
    return DegeneracyGraph(k, tuple(edges), len(sizes), sum(1 for s in sizes.values() if s > 1))


def composed_is_primitive(F: PolyFamily, h) -> bool:
    members = compose(F, h).members
    return len(set(members)) == len(members)


def distinct_member_count(F: PolyFamily) -> int:
    return len(set(F.members))


def _bareiss_det(M):
    n = len(M)
    if n == 0:
        return 1
    A = [list(row) for row in M]
    sign, prev = 1, 1
    for i in range(n - 1):
        if A[i][i] == 0:
            for r in range(i + 1, n):
                if A[r][i] != 0:
                    A[i], A[r] = A[r], A[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                A[r][c] = (A[r][c] * A[i][i] - A[r][i] * A[i][c]) // prev
        prev = A[i][i]
    return sign * A[n - 1][n - 1]


def sylvester_matrix(f: IntPolynomial, g: IntPolynomial):
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fdesc = list(reversed(f.coeffs))
    gdesc = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([0] * i + fdesc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gdesc + [0] * (size - n - 1 - i))
    return rows


def resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Res(f, g) as the determinant of the Sylvester matrix (fraction-free)."""
    if f.degree == 0 and g.degree == 0:
        return 1
    return _bareiss_det(sylvester_matrix(f, g))


def d1_resultant(F: PolyFamily, h) -> int:
    """D_1(h) = |prod over member pairs of Res(f_j(X + h_i), f_j'(X + h_i'))|."""
    members = compose(F, h).members
    out = 1
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            out *= resultant(members[a], members[b])
            if out == 0:
                return 0
    return abs(out)
