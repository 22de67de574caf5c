"""Monomials in the generators h[i,j], wedge products with signs, and gradings.

A monomial is a square-free product of generators h[i,j] with i, j in
{1, ..., n} (second subscripts are cyclic mod n; an input j = 0 is accepted
and normalized to j = n).  It is stored as a bitmask over the n^2 slots
slot(i, j) = (i-1)*n + (j-1), so the canonical order of generators inside a
monomial is lexicographic on (i, j) and monomial equality is integer equality.
"""

from __future__ import annotations

import re

MAX_N = 5  # 25 slots; full-basis scans stay inside one machine word


def normalize_j(j: int, n: int) -> int:
    """Second subscripts live in {1..n}; j = 0 (and any integer) wraps mod n."""
    return (j - 1) % n + 1


def slot(i: int, j: int, n: int) -> int:
    if not 1 <= i <= n:
        raise ValueError(f"first subscript {i} out of range 1..{n}")
    return (i - 1) * n + (normalize_j(j, n) - 1)


def generator_mask(i: int, j: int, n: int) -> int:
    return 1 << slot(i, j, n)


def slots_of(mask: int, n: int) -> list[tuple[int, int]]:
    """The (i, j) pairs of a monomial, in canonical order."""
    out = []
    while mask:
        low = mask & -mask
        s = low.bit_length() - 1
        out.append((s // n + 1, s % n + 1))
        mask ^= low
    return out


def degree(mask: int) -> int:
    return mask.bit_count()


def wedge(a: int, b: int) -> tuple[int, int] | None:
    """Wedge of two canonical monomials: (sign, merged mask), or None if zero.

    The sign is the parity of the number of transpositions needed to sort the
    concatenation (a..., b...) into canonical slot order, which is the number
    of pairs (u in b, v in a) with v > u.
    """
    if a & b:
        return None
    inversions = 0
    bb = b
    while bb:
        low = bb & -bb
        inversions += (a >> low.bit_length()).bit_count()
        bb ^= low
    return (-1 if inversions & 1 else 1, a | b)


def wedge_sign_oracle(a_slots: list[int], b_slots: list[int]) -> int | None:
    """Independent sign computation by explicit bubble sort of slot lists."""
    seq = list(a_slots) + list(b_slots)
    if len(set(seq)) != len(seq):
        return None
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign


# -- gradings ---------------------------------------------------------------------


def internal_weights(n: int, p: int) -> tuple[list[int], int]:
    """Per-slot internal degrees 2(p^i - 1)p^j and the modulus 2(p^n - 1)."""
    mod = 2 * (p**n - 1)
    w = [0] * (n * n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            w[(i - 1) * n + (j - 1)] = (2 * (p**i - 1) * p**j) % mod
    return w, mod


def reduced_weights(n: int, p: int) -> tuple[list[int], int]:
    """Per-slot reduced degrees p^j (p^i - 1)/(p - 1) and modulus (p^n - 1)/(p - 1)."""
    mod = (p**n - 1) // (p - 1)
    w = [0] * (n * n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            w[(i - 1) * n + (j - 1)] = (p**j * (p**i - 1) // (p - 1)) % mod
    return w, mod


def _weighted_sum(mask: int, weights: list[int]) -> int:
    total = 0
    while mask:
        low = mask & -mask
        total += weights[low.bit_length() - 1]
        mask ^= low
    return total


def internal_degree(mask: int, n: int, p: int) -> int:
    w, mod = internal_weights(n, p)
    return _weighted_sum(mask, w) % mod


def reduced_internal_degree(mask: int, n: int, p: int) -> int:
    w, mod = reduced_weights(n, p)
    return _weighted_sum(mask, w) % mod


def angle_bracket(mask: int, n: int) -> tuple[int, ...]:
    """Integer n-tuple indexed by residues (0 = n, 1, ..., n-1): each generator
    h[i,j] contributes -1 at residue j and +1 at residue i+j."""
    t = [0] * n
    for i, j in slots_of(mask, n):
        t[j % n] -= 1
        t[(i + j) % n] += 1
    return tuple(t)


def first_subscript_sum(mask: int, n: int) -> int:
    total = 0
    mm = mask
    while mm:
        low = mm & -mm
        total += (low.bit_length() - 1) // n + 1
        mm ^= low
    return total % n


def first_subscript_filtration(mask: int, n: int) -> int:
    """The integer (not mod n) sum of first subscripts."""
    total = 0
    mm = mask
    while mm:
        low = mm & -mm
        total += (low.bit_length() - 1) // n + 1
        mm ^= low
    return total


def sigma_shift(mask: int, n: int) -> tuple[int, int]:
    """Image of a monomial under h[i,j] -> h[i,j+1], with the reordering sign."""
    new_slots = [slot(i, j + 1, n) for i, j in slots_of(mask, n)]
    sign = 1
    # parity of the permutation sorting the shifted slot list
    for a in range(len(new_slots)):
        for b in range(a + 1, len(new_slots)):
            if new_slots[a] > new_slots[b]:
                sign = -sign
    out = 0
    for s in new_slots:
        out |= 1 << s
    return sign, out


# -- textual syntax ----------------------------------------------------------------

_GEN_RE = re.compile(r"h\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


def parse_monomial(text: str, n: int) -> tuple[int, int]:
    """Parse `h[i,j]h[k,l]...` into (sign, mask); `1` denotes the empty monomial.

    Subscripts are normalized mod n, and the sign accounts for sorting the
    written order into canonical order.  A repeated generator parses to the
    zero monomial, reported as ValueError since fixtures never want it.
    """
    text = text.strip()
    if text in ("1", ""):
        return 1, 0
    pos = 0
    slots = []
    for m in _GEN_RE.finditer(text):
        if text[pos : m.start()].strip():
            raise ValueError(f"unparsed text {text[pos:m.start()]!r}")
        i, j = int(m.group(1)), int(m.group(2))
        slots.append(slot(i, j, n))
        pos = m.end()
    if text[pos:].strip() or not slots:
        raise ValueError(f"not a monomial: {text!r}")
    if len(set(slots)) != len(slots):
        raise ValueError(f"repeated generator in {text!r}")
    sign = 1
    for a in range(len(slots)):
        for b in range(a + 1, len(slots)):
            if slots[a] > slots[b]:
                sign = -sign
    mask = 0
    for s in slots:
        mask |= 1 << s
    return sign, mask


def format_monomial(mask: int, n: int) -> str:
    if mask == 0:
        return "1"
    return "".join(f"h[{i},{j}]" for i, j in slots_of(mask, n))


# -- cochains ----------------------------------------------------------------------


class Cochain:
    """Sparse linear combination of monomials; coefficients are field scalars
    or polynomials, depending on the complex the cochain lives in."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[int, object] | None = None):
        self.n = n
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and self.n == other.n
            and self.terms == other.terms
        )

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                s = out[m] + c
                if s:
                    out[m] = s
                else:
                    del out[m]
            else:
                out[m] = c
        return Cochain(self.n, out)

    def __sub__(self, other):
        return self + other.scale_neg()

    def scale_neg(self):
        return Cochain(self.n, {m: -c for m, c in self.terms.items()})

    def scale(self, c):
        if not c:
            return Cochain(self.n, {})
        return Cochain(self.n, {m: coeff * c for m, coeff in self.terms.items()})

    def wedge(self, other: "Cochain", ring_one) -> "Cochain":
        """Bilinear wedge; ring_one converts +/-1 wedge signs into the ring."""
        out: dict[int, object] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                w = wedge(ma, mb)
                if w is None:
                    continue
                sign, mm = w
                c = ca * cb
                if sign < 0:
                    c = -c
                if mm in out:
                    s = out[mm] + c
                    if s:
                        out[mm] = s
                    else:
                        del out[mm]
                elif c:
                    out[mm] = c
        return Cochain(self.n, out)

    def degrees(self) -> set[int]:
        return {degree(m) for m in self.terms}

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            parts.append(f"({self.terms[m]!r})*{format_monomial(m, self.n)}")
        return " + ".join(parts)


def cochain_from_text(text: str, n: int, one) -> Cochain:
    """Parse a single signed monomial string into a cochain with coefficient 1."""
    sign, mask = parse_monomial(text, n)
    c = one if sign > 0 else -one
    return Cochain(n, {mask: c})
