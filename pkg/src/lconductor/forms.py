"""Binary quadratic forms of negative discriminant and their class groups.

Forms are ``(a, b, c)`` triples standing for ``a x^2 + b xy + c y^2`` with
discriminant ``b^2 - 4ac = -q``.  The class group is computed by full
enumeration of reduced forms, which is cheap for ``h(-q)`` in the thousands.
"""

from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import InputError, InvalidFormError, ParseError, ResourceError

DEFAULT_MAX_CLASS_NUMBER = 10**6


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def inverse(self) -> "QuadForm":
        return reduce(QuadForm(self.a, -self.b, self.c))

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def check_discriminant(q: int) -> int:
    """Validate ``-q`` as a negative discriminant and return ``q`` as int."""
    q = int(q)
    if q <= 4:
        raise InputError(f"need q > 4, got {q}")
    if q % 4 not in (0, 3):
        raise InputError(f"-{q} is not a discriminant (-q must be 0 or 1 mod 4)")
    return q


def _squarefree(n: int) -> bool:
    if n % 4 == 0:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1 if p == 2 else 2
    return True


def is_fundamental(q: int) -> bool:
    """True when ``-q`` is a fundamental discriminant."""
    if q % 4 == 3:
        return _squarefree(q)
    m = q // 4
    return m % 4 in (1, 2) and _squarefree(m)


def reduce(f) -> QuadForm:
    """Gauss reduction of a positive definite form."""
    a, b, c = (int(v) for v in f)
    if b * b - 4 * a * c >= 0 or a <= 0:
        raise InvalidFormError(f"form {tuple(f)} is not positive definite")
    while True:
        # normalize b into (-a, a]
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            c = c + r * (b + a * r)
            b = b + 2 * a * r
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


def principal_form(q: int) -> QuadForm:
    q = check_discriminant(q)
    if q % 4 == 0:
        return QuadForm(1, 0, q // 4)
    return QuadForm(1, 1, (q + 1) // 4)


def _xgcd(a: int, b: int):
    """Return ``(g, x, y)`` with ``a x + b y = g = gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0


def compose(f, g, q: int | None = None) -> QuadForm:
    """Dirichlet composition of two forms, returned reduced."""
    a1, b1, c1 = f
    a2, b2, c2 = g
    disc = b1 * b1 - 4 * a1 * c1
    if b2 * b2 - 4 * a2 * c2 != disc:
        raise InputError(f"discriminant mismatch between {tuple(f)} and {tuple(g)}")
    if q is not None and disc != -q:
        raise InputError(f"forms have discriminant {disc}, expected {-q}")
    s = (b1 + b2) // 2
    d0, u0, v0 = _xgcd(a1, a2)
    e, x, w = _xgcd(d0, s)
    u, v = u0 * x, v0 * x
    a3 = a1 * a2 // (e * e)
    b3 = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + disc) // 2) // e
    b3 %= 2 * a3
    c3 = (b3 * b3 - disc) // (4 * a3)
    return reduce((a3, b3, c3))


def power(f, n: int) -> QuadForm:
    f = reduce(f)
    if n < 0:
        f, n = f.inverse(), -n
    result = principal_form(-f.discriminant)
    while n:
        if n & 1:
            result = compose(result, f)
        n >>= 1
        if n:
            f = compose(f, f)
    return result


def enumerate_reduced(q: int) -> list[QuadForm]:
    """All primitive reduced forms of discriminant ``-q``, sorted by (a, b)."""
    q = check_discriminant(q)
    out = []
    amax = math.isqrt(q // 3)
    for a in range(1, amax + 1):
        # b must have the parity of q
        start = -a if (a + q) % 2 == 0 else -a + 1
        bs = np.arange(start, a + 1, 2, dtype=np.int64)
        num = bs * bs + q
        ok = num % (4 * a) == 0
        for b in bs[ok].tolist():
            c = (b * b + q) // (4 * a)
            if c < a or (b < 0 and (a == c or -b == a)):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append(QuadForm(a, b, c))
    out.sort()
    return out


def _factor(n: int) -> dict[int, int]:
    fac = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        fac[n] = fac.get(n, 0) + 1
    return fac


@dataclass(frozen=True)
class ClassGroup:
    q: int
    forms: tuple
    invariant_factors: tuple
    generators: tuple
    coords: dict = field(repr=False)

    @property
    def h(self) -> int:
        return len(self.forms)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def principal(self) -> QuadForm:
        return principal_form(self.q)

    def index(self, f) -> int:
        return self._index[(f[0], f[1])]

    @property
    def _index(self):
        # lazily built (a, b) -> position map; frozen dataclass needs object.__setattr__
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {(f.a, f.b): i for i, f in enumerate(self.forms)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def lookup(self, f) -> QuadForm:
        return self.forms[self.index(f)]

    def coords_array(self) -> np.ndarray:
        """``(h, r)`` integer array of exponent vectors in form order."""
        return np.array([self.coords[f] for f in self.forms], dtype=np.int64).reshape(self.h, self.rank)

    def element(self, exps) -> QuadForm:
        """Form with the given coordinates (product of generator powers)."""
        f = self.principal
        for g, e, m in zip(self.generators, exps, self.invariant_factors):
            f = compose(f, power(g, int(e) % m))
        return f

    def compose(self, f, g) -> QuadForm:
        return compose(f, g, self.q)

    def display_structure(self) -> str:
        return "{" + ", ".join(str(m) for m in self.invariant_factors) + "}"


def _sylow_basis(forms, q, p, v, h):
    """Basis of the p-Sylow subgroup as (generator, order) pairs, orders descending.

    Greedy: take the lexicographically first element of maximal order in the
    quotient by the span so far, then correct it by an element of the span so
    that its order equals its quotient order.
    """
    pv = p**v
    cof = h // pv
    e0 = principal_form(q)

    # enumerate the Sylow subgroup as a span of p-parts of forms, in form order
    span = {e0}
    for f in forms:
        if len(span) == pv:
            break
        y = power(f, cof)
        if y in span:
            continue
        new = set(span)
        z = y
        while z not in span:
            new.update(compose(z, x) for x in span)
            z = compose(z, y)
        span = new
    sylow = sorted(span)

    basis = []
    H = {e0: ()}
    while len(H) < pv:
        best, best_e = None, 0
        bound = round(math.log(pv // len(H), p))
        for y in sylow:
            z, e = y, 0
            while z not in H:
                z = power(z, p)
                e += 1
            if e > best_e:
                best, best_e = y, e
                if e == bound:
                    break
        order = p**best_e
        c = H[power(best, order)]
        g = best
        for (gi, _), ci in zip(basis, c):
            assert ci % order == 0
            g = compose(g, power(gi, -(ci // order)))
        newH = {}
        gk = e0
        for k in range(order):
            for x, cx in H.items():
                newH[compose(gk, x)] = cx + (k,)
            gk = compose(gk, g)
        H = newH
        basis.append((g, order))
    return basis


def class_group(q: int, max_h: int = DEFAULT_MAX_CLASS_NUMBER, forms=None) -> ClassGroup:
    """Reduced forms, invariant factors (largest first) and coordinates."""
    q = check_discriminant(q)
    if not is_fundamental(q):
        warnings.warn(f"-{q} is not a fundamental discriminant; using primitive forms", stacklevel=2)
    if forms is None:
        forms = enumerate_reduced(q)
    h = len(forms)
    if h > max_h:
        raise ResourceError(f"class number h(-{q}) = {h} exceeds budget {max_h}")

    per_prime = [_sylow_basis(forms, q, p, v, h) for p, v in sorted(_factor(h).items())]
    r = max((len(b) for b in per_prime), default=0)
    invariants, gens = [], []
    for i in range(r):
        m, g = 1, principal_form(q)
        for basis in per_prime:
            if i < len(basis):
                gi, oi = basis[i]
                m *= oi
                g = compose(g, gi)
        invariants.append(m)
        gens.append(g)

    # coordinate table by walking the product of cyclic factors
    table = {principal_form(q): ()}
    for g, m in zip(gens, invariants):
        new = {}
        gk = principal_form(q)
        for k in range(m):
            for x, cx in table.items():
                new[compose(gk, x)] = cx + (k,)
            gk = compose(gk, g)
        table = new
    if len(table) != h or any(f not in table for f in forms):
        raise ArithmeticError(f"coordinate map for -{q} is not a bijection")
    coords = {f: table[f] for f in forms}
    return ClassGroup(q, tuple(forms), tuple(invariants), tuple(gens), coords)


def dual_two_torsion(invariant_factors) -> int:
    """Number of characters of order at most 2."""
    return 2 ** sum(1 for m in invariant_factors if m % 2 == 0)


def count_usable_characters(G: ClassGroup) -> int:
    """Complex characters counted once per conjugate pair."""
    return (G.h - dual_two_torsion(G.invariant_factors)) // 2


def all_characters(invariant_factors):
    return list(itertools.product(*(range(m) for m in invariant_factors)))


def conjugate_character(chi, invariant_factors):
    return tuple((-a) % m for a, m in zip(chi, invariant_factors))


def is_real_character(chi, invariant_factors) -> bool:
    return all((2 * a) % m == 0 for a, m in zip(chi, invariant_factors))


def usable_characters(invariant_factors):
    """Non-real characters, the lexicographically smaller of each conjugate pair."""
    out = []
    for chi in all_characters(invariant_factors):
        if is_real_character(chi, invariant_factors):
            continue
        if chi < conjugate_character(chi, invariant_factors):
            out.append(chi)
    return out


def genus_characters(invariant_factors):
    return [chi for chi in all_characters(invariant_factors) if is_real_character(chi, invariant_factors)]


def character_value(G: ClassGroup, chi, f) -> complex:
    e = G.coords[G.lookup(f)]
    phase = sum((a * x % m) / m for a, x, m in zip(chi, e, G.invariant_factors))
    return cmath.exp(2j * math.pi * phase)


# ---------------------------------------------------------------- cache file


def write_forms_cache(G: ClassGroup, path) -> Path:
    path = Path(path)
    lines = [f"BQF1 {G.q} {G.h} {','.join(map(str, G.invariant_factors))}"]
    for f in G.forms:
        lines.append(f"{f.a} {f.b} {f.c} {','.join(map(str, G.coords[f]))}")
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return path


def read_forms_cache(path) -> ClassGroup:
    path = Path(path)
    text = path.read_bytes().decode("ascii").split("\n")
    if text and text[-1] == "":
        text.pop()
    if not text:
        raise ParseError("empty forms cache", 1)
    head = text[0].split()
    if len(head) != 4 or head[0] != "BQF1":
        raise ParseError("bad BQF1 header", 1)
    q, h = int(head[1]), int(head[2])
    invariants = tuple(int(m) for m in head[3].split(",") if m)
    forms, coords = [], {}
    for lineno, line in enumerate(text[1:], start=2):
        parts = line.split()
        if len(parts) != 4 and not (len(parts) == 3 and not invariants):
            raise ParseError(f"expected 'a b c e1,...', got {line!r}", lineno)
        f = QuadForm(int(parts[0]), int(parts[1]), int(parts[2]))
        if f.discriminant != -q or not f.is_reduced():
            raise ParseError(f"form {f} is not a reduced form of discriminant -{q}", lineno)
        e = tuple(int(x) for x in parts[3].split(",")) if len(parts) == 4 and parts[3] else ()
        forms.append(f)
        coords[f] = e
    if len(forms) != h:
        raise ParseError(f"header says h={h} but {len(forms)} forms follow")
    gens = []
    for i in range(len(invariants)):
        unit = tuple(1 if k == i else 0 for k in range(len(invariants)))
        gens.append(next(f for f in forms if coords[f] == unit))
    return ClassGroup(q, tuple(forms), invariants, tuple(gens), coords)
