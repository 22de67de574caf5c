"""Exact arithmetic in GF(p), GF(p^m), and the polynomial ring GF(p^m)[x].

Scalars are immutable and carry a reference to their field, so values from
different fields never mix silently.  Extension fields GF(p^m) with at most
2^16 elements get log/exp tables for fast multiplication; larger fields fall
back to schoolbook polynomial arithmetic modulo the field's modulus
polynomial.
"""

from __future__ import annotations

from typing import Iterable, Iterator

_TABLE_LIMIT = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (inputs here stay below ~10^8)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class FieldError(ValueError):
    pass


class FieldScalar:
    """Element of GF(p^m) in the power basis of the field's modulus polynomial.

    ``v`` is a plain residue for m = 1 and a tuple of m residues otherwise.
    """

    __slots__ = ("field", "v")

    def __init__(self, field: "Field", v):
        self.field = field
        self.v = v

    def __eq__(self, other):
        return (
            isinstance(other, FieldScalar)
            and self.field is other.field
            and self.v == other.v
        )

    def __hash__(self):
        return hash((id(self.field), self.v))

    def __bool__(self):
        return self.v != 0 if self.field.m == 1 else any(self.v)

    def __add__(self, other):
        f = self.field
        if f.m == 1:
            return FieldScalar(f, (self.v + other.v) % f.p)
        p = f.p
        return FieldScalar(f, tuple((a + b) % p for a, b in zip(self.v, other.v)))

    def __sub__(self, other):
        f = self.field
        if f.m == 1:
            return FieldScalar(f, (self.v - other.v) % f.p)
        p = f.p
        return FieldScalar(f, tuple((a - b) % p for a, b in zip(self.v, other.v)))

    def __neg__(self):
        f = self.field
        if f.m == 1:
            return FieldScalar(f, (-self.v) % f.p)
        p = f.p
        return FieldScalar(f, tuple((-a) % p for a in self.v))

    def __mul__(self, other):
        return self.field.mul(self, other)

    def __pow__(self, e: int):
        return self.field.pow(self, e)

    def inverse(self) -> "FieldScalar":
        return self.field.inv(self)

    def frobenius(self) -> "FieldScalar":
        """The p-power map a -> a^p."""
        return self.field.pow(self, self.field.p)

    def __repr__(self):
        f = self.field
        if f.m == 1:
            return f"GF({f.p}):{self.v}"
        return f"GF({f.p}^{f.m}):{list(self.v)}"


class Field:
    """GF(p^m) with a deterministic modulus polynomial.

    The modulus is the lexicographically smallest monic irreducible polynomial
    of degree m over GF(p), where polynomials are ordered by reading the
    non-leading coefficients (c_{m-1}, ..., c_1, c_0) as a base-p integer.
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...]):
        self.p = p
        self.m = m
        self.modulus = modulus  # (c_0, ..., c_{m-1}) of y^m + c_{m-1}y^{m-1} + ... + c_0
        self.cardinality = p**m
        self.zero = FieldScalar(self, 0 if m == 1 else (0,) * m)
        self.one = FieldScalar(self, 1 if m == 1 else (1,) + (0,) * (m - 1))
        self._exp: list | None = None
        self._log: dict | None = None
        self._primitive: FieldScalar | None = None
        if m > 1 and self.cardinality <= _TABLE_LIMIT:
            self._build_tables()

    # -- construction helpers -------------------------------------------------

    def scalar(self, x) -> FieldScalar:
        """Coerce an integer, residue tuple, or scalar into this field."""
        if isinstance(x, FieldScalar):
            if x.field is not self:
                raise FieldError("scalar from a different field")
            return x
        if isinstance(x, int):
            if self.m == 1:
                return FieldScalar(self, x % self.p)
            return FieldScalar(self, (x % self.p,) + (0,) * (self.m - 1))
        v = tuple(int(c) % self.p for c in x)
        if len(v) != self.m:
            raise FieldError(f"expected {self.m} coordinates, got {len(v)}")
        return FieldScalar(self, v if self.m > 1 else v[0])

    def elements(self) -> Iterator[FieldScalar]:
        """All field elements in counting order (coordinates base p, c_0 fastest)."""
        p, m = self.p, self.m
        if m == 1:
            for v in range(p):
                yield FieldScalar(self, v)
            return
        for k in range(self.cardinality):
            digits = []
            kk = k
            for _ in range(m):
                digits.append(kk % p)
                kk //= p
            yield FieldScalar(self, tuple(digits))

    # -- raw arithmetic --------------------------------------------------------

    def _raw_mul(self, a, b):
        p, m = self.p, self.m
        if m == 1:
            return (a * b) % p
        prod = [0] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        # reduce modulo y^m + c_{m-1}y^{m-1} + ... + c_0
        mod = self.modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k] % p
            if c:
                for i in range(m):
                    prod[k - m + i] -= c * mod[i]
            prod[k] = 0
        return tuple(x % p for x in prod[:m])

    def _build_tables(self):
        g = self.primitive_element()
        q = self.cardinality
        exp = [None] * (q - 1)
        log = {}
        acc = self.one.v
        for i in range(q - 1):
            exp[i] = acc
            log[acc] = i
            acc = self._raw_mul(acc, g.v)
        self._exp, self._log = exp, log

    def mul(self, a: FieldScalar, b: FieldScalar) -> FieldScalar:
        if self.m == 1:
            return FieldScalar(self, (a.v * b.v) % self.p)
        if self._log is not None:
            if not a or not b:
                return self.zero
            i = self._log[a.v] + self._log[b.v]
            q1 = self.cardinality - 1
            if i >= q1:
                i -= q1
            return FieldScalar(self, self._exp[i])
        return FieldScalar(self, self._raw_mul(a.v, b.v))

    def inv(self, a: FieldScalar) -> FieldScalar:
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.m == 1:
            return FieldScalar(self, pow(a.v, self.p - 2, self.p))
        if self._log is not None:
            q1 = self.cardinality - 1
            return FieldScalar(self, self._exp[(q1 - self._log[a.v]) % q1])
        return self.pow(a, self.cardinality - 2)

    def pow(self, a: FieldScalar, e: int) -> FieldScalar:
        if e == 0:
            return self.one
        if not a:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return self.zero
        q1 = self.cardinality - 1
        e %= q1
        if e == 0:
            return self.one
        if self.m == 1:
            return FieldScalar(self, pow(a.v, e, self.p))
        if self._log is not None:
            return FieldScalar(self, self._exp[(self._log[a.v] * e) % q1])
        res = self.one
        base = a
        while e:
            if e & 1:
                res = self.mul(res, base)
            base = self.mul(base, base)
            e >>= 1
        return res

    # -- multiplicative structure ----------------------------------------------

    def element_order(self, a: FieldScalar) -> int:
        if not a:
            raise FieldError("zero has no multiplicative order")
        order = self.cardinality - 1
        for q in factorize(order):
            while order % q == 0 and self.pow(a, order // q) == self.one:
                order //= q
        return order

    def primitive_element(self) -> FieldScalar:
        """Smallest generator of the multiplicative group, in counting order."""
        if self._primitive is None:
            q1 = self.cardinality - 1
            qs = list(factorize(q1))
            for a in self.elements():
                if not a:
                    continue
                if all(self.pow(a, q1 // q) != self.one for q in qs):
                    self._primitive = a
                    break
            else:  # pragma: no cover - never reached, the group is cyclic
                raise FieldError("no primitive element found")
        return self._primitive

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"


# -- modulus search ------------------------------------------------------------


def _poly_is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Rabin test for a monic polynomial y^m + sum coeffs[i] y^i over GF(p)."""
    m = len(coeffs)

    def mulmod(a, b):
        prod = [0] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                for i in range(m):
                    prod[k - m + i] = (prod[k - m + i] - c * coeffs[i]) % p
            prod[k] = 0
        return prod[:m]

    def ypow(e):
        # y^e mod f, starting from y
        res = [0] * m
        res[0] = 1
        base = [0] * m
        if m == 1:
            base[0] = (-coeffs[0]) % p  # y = -c_0 in GF(p)[y]/(y + c_0)
        else:
            base[1] = 1
        while e:
            if e & 1:
                res = mulmod(res, base)
            base = mulmod(base, base)
            e >>= 1
        return res

    def gcd_with(poly):
        # gcd(f, poly) where poly has degree < m, f monic of degree m
        a = list(coeffs) + [1]
        b = list(poly)
        while any(b):
            while len(b) > 1 and b[-1] == 0:
                b.pop()
            db = len(b) - 1
            inv_lead = pow(b[-1], p - 2, p)
            # reduce a mod b
            a = a[:]
            for k in range(len(a) - 1, db - 1, -1):
                c = a[k]
                if c:
                    q = (c * inv_lead) % p
                    for i in range(db + 1):
                        a[k - db + i] = (a[k - db + i] - q * b[i]) % p
            a, b = b, a[:db]
            if not b:
                break
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        return a

    # f irreducible iff y^(p^m) == y mod f and gcd(f, y^(p^(m/q)) - y) = 1
    # for every prime divisor q of m.
    xq = ypow(p**m)
    target = [0] * m
    if m == 1:
        target[0] = (-coeffs[0]) % p
    else:
        target[1] = 1
    if xq != target:
        return False
    for q in factorize(m):
        t = ypow(p ** (m // q))
        t = t[:]
        t[1 if m > 1 else 0] = (t[1 if m > 1 else 0] - (1 if m > 1 else 0)) % p
        if m == 1:
            t[0] = (t[0] - (-coeffs[0])) % p
        g = gcd_with(t)
        if len(g) > 1 or (len(g) == 1 and g[0] == 0):
            return False
    return True


_FIELD_CACHE: dict[tuple[int, int], Field] = {}


def field_create(p: int, m: int = 1) -> Field:
    """The field GF(p^m) with deterministic modulus; identical inputs share one object."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if m < 1:
        raise FieldError("extension degree must be >= 1")
    key = (p, m)
    if key in _FIELD_CACHE:
        return _FIELD_CACHE[key]
    if m == 1:
        field = Field(p, 1, (0,))
    else:
        modulus = None
        for k in range(p**m):
            digits = []
            kk = k
            for _ in range(m):
                digits.append(kk % p)
                kk //= p
            cand = tuple(digits)
            if _poly_is_irreducible(cand, p):
                modulus = cand
                break
        if modulus is None:  # pragma: no cover - irreducibles always exist
            raise FieldError("no irreducible modulus found")
        field = Field(p, m, modulus)
    _FIELD_CACHE[key] = field
    return field


# -- roots ----------------------------------------------------------------------


def nth_roots(field: Field, a: FieldScalar, n: int) -> set[FieldScalar]:
    """All x in the field with x^n = a, for nonzero a.

    Solved through the cyclic group structure: x = g^k works iff
    k*n = dlog(a) mod (q-1), so there are either 0 or gcd(n, q-1) roots.
    """
    a = field.scalar(a)
    if not a:
        raise FieldError("nth_roots requires a nonzero target")
    q1 = field.cardinality - 1
    g = field.primitive_element()
    # discrete log by direct walk of the power table; fields here are small
    # enough (at most ~10^7 elements) that this stays cheap and exact.
    dlog = None
    acc = field.one
    for i in range(q1):
        if acc == a:
            dlog = i
            break
        acc = field.mul(acc, g)
    if dlog is None:  # pragma: no cover - every nonzero element is a power of g
        raise FieldError("discrete log not found")
    import math

    d = math.gcd(n, q1)
    if dlog % d != 0:
        return set()
    # one solution of k*n = dlog mod q1, then the full coset
    n_red = (n // d) % (q1 // d)
    k0 = (dlog // d) * pow(n_red, -1, q1 // d) % (q1 // d)
    return {field.pow(g, k0 + j * (q1 // d)) for j in range(d)}


def primitive_root_of_unity(field: Field, n: int) -> FieldScalar:
    """The element g^((q-1)/n) of exact order n, g the smallest primitive element."""
    q1 = field.cardinality - 1
    if n < 1 or q1 % n != 0:
        raise FieldError(
            f"root not present; extend the field (need {n} | {q1})"
        )
    return field.pow(field.primitive_element(), q1 // n)


# -- polynomials over the field ---------------------------------------------------


class Poly:
    """Dense univariate polynomial over a Field; the variable is semantic only."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Iterable[FieldScalar]):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, field: Field, c) -> "Poly":
        return cls(field, [field.scalar(c)])

    @classmethod
    def x_power(cls, field: Field, e: int, c=1) -> "Poly":
        return cls(field, [field.zero] * e + [field.scalar(c)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def valuation(self) -> int | None:
        """x-adic valuation; None for the zero polynomial."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field is other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(self.field, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, FieldScalar):
            return Poly(self.field, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly(self.field, [])
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    def evaluate(self, e: FieldScalar) -> FieldScalar:
        """Horner evaluation; a ring homomorphism Poly -> field for fixed e."""
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * e + c
        return acc

    def shift(self, e: int) -> "Poly":
        """Multiply by x^e (e >= 0)."""
        if not self.coeffs:
            return self
        return Poly(self.field, [self.field.zero] * e + list(self.coeffs))

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        inv = self.coeffs[-1].inverse()
        return Poly(self.field, [c * inv for c in self.coeffs])

    def derivative(self) -> "Poly":
        f = self.field
        return Poly(
            f, [f.scalar(i) * c for i, c in enumerate(self.coeffs) if i > 0]
        )

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cv = c.v if self.field.m == 1 else list(c.v)
            parts.append(f"{cv}" if i == 0 else (f"{cv}*x^{i}" if i > 1 else f"{cv}*x"))
        return " + ".join(parts)


def poly_evaluate(f: Poly, e: FieldScalar) -> FieldScalar:
    return f.evaluate(e)


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    field = a.field
    rem = list(a.coeffs)
    db = b.degree
    inv_lead = b.coeffs[-1].inverse()
    quot = [field.zero] * max(0, len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if c:
            q = c * inv_lead
            quot[k - db] = q
            for i, bc in enumerate(b.coeffs):
                rem[k - db + i] = rem[k - db + i] - q * bc
    return Poly(field, quot), Poly(field, rem[:db])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    return a.monic() if not a.is_zero() else a


def poly_radical(f: Poly) -> Poly:
    """Squarefree part: same roots, multiplicity one.  Handles the
    characteristic-p degenerate case f = g(x^p), whose derivative vanishes,
    by taking p-th roots of coefficients (the field is perfect)."""
    field = f.field
    p, m = field.p, field.m
    while not f.is_zero():
        fp = f.derivative()
        if not fp.is_zero():
            return poly_divmod(f, poly_gcd(f, fp))[0].monic()
        # f = g(x^p); over a perfect field the roots of f and g biject
        root_exp = p ** (m - 1)  # c -> c^(p^(m-1)) is the p-th root
        coeffs = [field.pow(f.coeffs[i], root_exp) if f.coeffs[i] else field.zero
                  for i in range(0, len(f.coeffs), p)]
        f = Poly(field, coeffs)
    return f


def poly_powmod(base: Poly, e: int, mod: Poly) -> Poly:
    result = Poly.const(base.field, 1)
    base = poly_divmod(base, mod)[1]
    while e:
        if e & 1:
            result = poly_divmod(result * base, mod)[1]
        base = poly_divmod(base * base, mod)[1]
        e >>= 1
    return result
