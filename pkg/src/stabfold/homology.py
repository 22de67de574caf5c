"""Exact cohomology over finite fields: Betti tables, representatives, cup
products, ring recognition, and ranks of induced maps.

Rank computations run through sparse Gaussian elimination with Markowitz
pivoting (dense row reduction below 512 columns); an independent dense
elimination oracle is kept for cross-checks and never shares code with the
sparse path.
"""

from __future__ import annotations

from .exterior import Cochain, degree, format_monomial
from .gf import Field

_DENSE_CUTOFF = 512


# -- elimination ----------------------------------------------------------------


def dense_rank_oracle(rows: list[dict[int, object]], ncols: int, field: Field) -> int:
    """Textbook row echelon over a dense matrix; the independent oracle."""
    mat = []
    for r in rows:
        row = [field.zero] * ncols
        for c, v in r.items():
            row[c] = v
        mat.append(row)
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(mat)):
            if mat[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = mat[rank][col].inverse()
        prow = mat[rank]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                factor = mat[i][col] * inv
                row = mat[i]
                for c in range(col, ncols):
                    if prow[c]:
                        row[c] = row[c] - factor * prow[c]
        rank += 1
        if rank == len(mat):
            break
    return rank


def sparse_rank(rows: list[dict[int, object]]) -> int:
    """Markowitz-pivoted sparse elimination; deterministic tie-break by
    (row weight, column index, row index)."""
    work = {i: dict(r) for i, r in enumerate(rows) if r}
    col_rows: dict[int, set[int]] = {}
    for i, r in work.items():
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    rank = 0
    while work:
        best = None
        for i, r in work.items():
            rw = len(r)
            for c in r:
                score = (rw - 1) * (len(col_rows[c]) - 1)
                key = (score, rw, c, i)
                if best is None or key < best:
                    best = key
        _, _, pc, pi = best
        prow = work.pop(pi)
        for c in prow:
            col_rows[c].discard(pi)
        inv = prow[pc].inverse()
        for i in list(col_rows.get(pc, ())):
            row = work[i]
            factor = row[pc] * inv
            for c, v in prow.items():
                if c in row:
                    nv = row[c] - factor * v
                    if nv:
                        row[c] = nv
                    else:
                        del row[c]
                        col_rows[c].discard(i)
                else:
                    row[c] = -(factor * v)
                    col_rows.setdefault(c, set()).add(i)
            if not row:
                del work[i]
        rank += 1
    return rank


def matrix_rank(rows, ncols: int, field: Field, method: str = "auto") -> int:
    if method == "dense" or (method == "auto" and ncols < _DENSE_CUTOFF):
        return dense_rank_oracle(rows, ncols, field)
    return sparse_rank(rows)


def rref(rows: list[dict[int, object]], field: Field):
    """Reduced row echelon form of sparse rows; returns (rows, pivot columns),
    rows ordered by pivot column, each pivot normalized to 1."""
    reduced: list[dict[int, object]] = []
    pivots: list[int] = []
    for r in rows:
        row = dict(r)
        for p, prow in zip(pivots, reduced):
            if p in row:
                factor = row[p]
                for c, v in prow.items():
                    nv = row.get(c, field.zero) - factor * v
                    if nv:
                        row[c] = nv
                    elif c in row:
                        del row[c]
        if not row:
            continue
        piv = min(row)
        inv = row[piv].inverse()
        row = {c: v * inv for c, v in row.items()}
        # back-substitute into existing rows
        for i, (p, prow) in enumerate(zip(pivots, reduced)):
            if piv in prow:
                factor = prow[piv]
                newr = dict(prow)
                for c, v in row.items():
                    nv = newr.get(c, field.zero) - factor * v
                    if nv:
                        newr[c] = nv
                    elif c in newr:
                        del newr[c]
                reduced[i] = newr
        pivots.append(piv)
        reduced.append(row)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [reduced[i] for i in order], [pivots[i] for i in order]


def nullspace(rows: list[dict[int, object]], ncols: int, field: Field):
    """Kernel basis of the matrix (rows act on column vectors), one vector per
    free column, echelon-style and deterministic."""
    rr, pivots = rref(rows, field)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = {free: field.one}
        for p, row in zip(pivots, rr):
            v = row.get(free)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def reduce_against(vec: dict[int, object], rr_rows, pivots, field: Field):
    """Eliminate the pivot coordinates of an echelon family from a vector."""
    out = dict(vec)
    for p, row in zip(pivots, rr_rows):
        c = out.get(p)
        if not c:
            continue
        for col, v in row.items():
            nv = out.get(col, field.zero) - c * v
            if nv:
                out[col] = nv
            elif col in out:
                del out[col]
    return out


# -- Betti tables -----------------------------------------------------------------


class BettiTable:
    def __init__(self, entries: dict[tuple[int, int], int],
                 block_dims: dict[tuple[int, int], int], descriptor=None):
        self.entries = {k: v for k, v in entries.items() if v}
        self.block_dims = block_dims
        self.descriptor = descriptor

    def get(self, s: int, u: int) -> int:
        return self.entries.get((s, u), 0)

    def totals_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (s, _u), b in self.entries.items():
            out[s] = out.get(s, 0) + b
        return out

    def grand_total(self) -> int:
        return sum(self.entries.values())

    def euler_characteristics_match(self) -> bool:
        """Per internal class: alternating sums of cochain dims and of Betti
        numbers agree."""
        us = {u for (_s, u) in self.block_dims}
        for u in us:
            chain = sum((-1) ** s * d for (s, uu), d in self.block_dims.items() if uu == u)
            coh = sum((-1) ** s * b for (s, uu), b in self.entries.items() if uu == u)
            if chain != coh:
                return False
        return True

    def to_json_rows(self) -> list[dict]:
        return [
            {"s": s, "u": u, "dim": b}
            for (s, u), b in sorted(self.entries.items())
        ]

    def to_csv(self) -> str:
        lines = ["s,u,dim"]
        for (s, u), b in sorted(self.entries.items()):
            lines.append(f"{s},{u},{b}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.entries == other.entries


def block_matrix(cx, s: int, u: int):
    """Rows of d^s restricted to the (s, u) block: one sparse row per target
    monomial in the (s+1, u) block, columns indexed by the source basis."""
    src = cx.blocks(s).get(u, [])
    tgt = cx.blocks(s + 1).get(u, [])
    tgt_index = {m: i for i, m in enumerate(tgt)}
    rows: list[dict[int, object]] = [dict() for _ in tgt]
    for j, mask in enumerate(src):
        for t, c in cx.d_monomial(mask).items():
            i = tgt_index.get(t)
            if i is None:
                raise AssertionError(
                    f"differential leaves block u={u}: {format_monomial(mask, cx.n)}"
                )
            rows[i][j] = c
    return rows, len(src)


def betti(cx, method: str = "auto") -> BettiTable:
    """Betti numbers per (cohomological degree, internal class) block."""
    if cx.descriptor.is_bundle():
        raise ValueError(
            "bundle-mode complex: cohomology over F[x] is handled through "
            "the pages module"
        )
    field = cx.field
    top = cx.top_degree
    ranks: dict[tuple[int, int], int] = {}
    dims: dict[tuple[int, int], int] = {}
    for s in range(top + 1):
        for u, monos in cx.blocks(s).items():
            dims[(s, u)] = len(monos)
            rows, ncols = block_matrix(cx, s, u)
            ranks[(s, u)] = matrix_rank(rows, ncols, field, method)
    entries: dict[tuple[int, int], int] = {}
    for (s, u), dim in dims.items():
        b = dim - ranks[(s, u)] - ranks.get((s - 1, u), 0)
        if b:
            entries[(s, u)] = b
    return BettiTable(entries, dims, cx.descriptor)


# -- representatives and the cup product ----------------------------------------------


class BlockCohomology:
    """Cohomology of one (s, u) block: cocycle representatives in echelon form
    plus the machinery to reduce any cocycle to class coordinates."""

    def __init__(self, cx, s: int, u: int):
        self.cx = cx
        self.s = s
        self.u = u
        field = cx.field
        self.monomials = cx.blocks(s).get(u, [])
        self.index = {m: i for i, m in enumerate(self.monomials)}
        ncols = len(self.monomials)

        rows, _ = block_matrix(cx, s, u)
        kernel = nullspace(rows, ncols, field)

        prev = cx.blocks(s - 1).get(u, []) if s > 0 else []
        cob_vectors = []
        for mask in prev:
            vec = {}
            for t, c in cx.d_monomial(mask).items():
                vec[self.index[t]] = c
            if vec:
                cob_vectors.append(vec)
        self.cob_rows, self.cob_pivots = rref(cob_vectors, field)

        reduced = [
            reduce_against(v, self.cob_rows, self.cob_pivots, field) for v in kernel
        ]
        self.rep_rows, self.rep_pivots = rref([r for r in reduced if r], field)

    @property
    def dim(self) -> int:
        return len(self.rep_rows)

    def representative(self, idx: int) -> Cochain:
        row = self.rep_rows[idx]
        return Cochain(self.cx.n, {self.monomials[c]: v for c, v in row.items()})

    def vector_of(self, z: Cochain) -> dict[int, object]:
        vec = {}
        for mask, c in z.terms.items():
            i = self.index.get(mask)
            if i is None:
                raise ValueError(
                    f"cochain not supported on block (s={self.s}, u={self.u})"
                )
            vec[i] = c
        return vec

    def reduce(self, z: Cochain) -> list:
        """Class coordinates of a cocycle in this block's representative basis."""
        field = self.cx.field
        vec = reduce_against(self.vector_of(z), self.cob_rows, self.cob_pivots, field)
        coords = [field.zero] * self.dim
        for i, (p, row) in enumerate(zip(self.rep_pivots, self.rep_rows)):
            c = vec.get(p)
            if c:
                coords[i] = c
                for col, v in row.items():
                    nv = vec.get(col, field.zero) - c * v
                    if nv:
                        vec[col] = nv
                    elif col in vec:
                        del vec[col]
        if vec:
            raise ValueError("not a cocycle modulo coboundaries")
        return coords


class Cohomology:
    """Lazy per-block cohomology of a fiber-mode complex."""

    def __init__(self, cx):
        if cx.descriptor.is_bundle():
            raise ValueError("representatives need a fiber-mode complex")
        self.cx = cx
        self._blocks: dict[tuple[int, int], BlockCohomology] = {}

    def block(self, s: int, u: int) -> BlockCohomology:
        key = (s, u)
        if key not in self._blocks:
            self._blocks[key] = BlockCohomology(self.cx, s, u)
        return self._blocks[key]

    def classes(self) -> list[tuple[int, int, int]]:
        out = []
        for s in range(self.cx.top_degree + 1):
            for u in sorted(self.cx.blocks(s)):
                bc = self.block(s, u)
                out.extend((s, u, i) for i in range(bc.dim))
        return out

    def representative(self, ref: tuple[int, int, int]) -> Cochain:
        s, u, i = ref
        return self.block(s, u).representative(i)

    def reduce_cocycle(self, z: Cochain) -> dict[tuple[int, int, int], object]:
        """Split a cocycle by (s, u) block and reduce each part."""
        out: dict[tuple[int, int, int], object] = {}
        parts: dict[tuple[int, int], dict] = {}
        for mask, c in z.terms.items():
            key = (degree(mask), self.cx.block_key(mask))
            parts.setdefault(key, {})[mask] = c
        for (s, u), terms in parts.items():
            bc = self.block(s, u)
            for i, c in enumerate(bc.reduce(Cochain(self.cx.n, terms))):
                if c:
                    out[(s, u, i)] = c
        return out

    def cup(self, a: tuple[int, int, int], b: tuple[int, int, int]):
        """Cup product of two basis classes, as class coordinates."""
        za = self.representative(a)
        zb = self.representative(b)
        prod = za.wedge(zb, self.cx.ring_one)
        return self.reduce_cocycle(prod)


def representatives(cx) -> Cohomology:
    return Cohomology(cx)


def cup(cx_or_coh, a, b):
    coh = cx_or_coh if isinstance(cx_or_coh, Cohomology) else Cohomology(cx_or_coh)
    return coh.cup(a, b)


# -- ring recognition ---------------------------------------------------------------


def exterior_ring_check(cx, expected_degrees: list[int]) -> dict:
    """Does the cohomology ring look like the exterior algebra on one generator
    in each expected (odd) degree?

    Betti totals are compared first; on mismatch no generator search runs.
    Then generators are chosen greedily (any class independent of products of
    the earlier generators), and all square-free cup monomials must be linearly
    independent and exhaust the cohomology.
    """
    from itertools import combinations

    field = cx.field
    table = betti(cx)
    poincare: dict[int, int] = {}
    for r in range(len(expected_degrees) + 1):
        for combo in combinations(expected_degrees, r):
            d = sum(combo)
            poincare[d] = poincare.get(d, 0) + 1
    totals = table.totals_by_degree()
    if totals != poincare:
        return {
            "holds": False,
            "reason": f"Betti profile {totals} differs from exterior profile {poincare}",
        }

    coh = Cohomology(cx)
    all_classes = coh.classes()
    by_degree: dict[int, list] = {}
    for ref in all_classes:
        by_degree.setdefault(ref[0], []).append(ref)
    nclasses = len(all_classes)
    class_index = {ref: i for i, ref in enumerate(all_classes)}

    def coords_of(z: Cochain) -> dict[int, object]:
        return {class_index[r]: c for r, c in coh.reduce_cocycle(z).items()}

    # representative cochain for each square-free product of chosen generators,
    # keyed by the (distinct) degrees of the factors
    generators: list[tuple[int, int, int]] = []
    products: dict[frozenset, Cochain] = {
        frozenset(): coh.representative((0, 0, 0))
    }
    for d in expected_degrees:
        spanned = [coords_of(z) for subset, z in products.items() if sum(subset) == d]
        rr_rows, rr_piv = rref(spanned, field)
        candidate = None
        for ref in by_degree.get(d, []):
            red = reduce_against({class_index[ref]: field.one}, rr_rows, rr_piv, field)
            if red:
                candidate = ref
                break
        if candidate is None:
            return {"holds": False,
                    "reason": f"no indecomposable class in degree {d}"}
        generators.append(candidate)
        zc = coh.representative(candidate)
        for subset, z in list(products.items()):
            products[subset | {d}] = zc.wedge(z, cx.ring_one)

    for g in generators:
        zg = coh.representative(g)
        if coh.reduce_cocycle(zg.wedge(zg, cx.ring_one)):
            return {"holds": False,
                    "reason": f"generator in degree {g[0]} has nonzero square"}
    vectors = [coords_of(z) for z in products.values()]
    rr_rows, _ = rref([v for v in vectors if v], field)
    if len(rr_rows) != len(vectors):
        return {"holds": False, "reason": "cup monomials are linearly dependent"}
    if len(vectors) != nclasses:
        return {"holds": False, "reason": "cup monomials do not exhaust cohomology"}
    return {"holds": True, "generators": generators}


# -- induced maps -----------------------------------------------------------------------


class ChainMap:
    """Degree-0 map between fiber complexes, given on basis monomials."""

    def __init__(self, source, target, fn, name: str = ""):
        self.source = source
        self.target = target
        self.fn = fn
        self.name = name

    def apply(self, z: Cochain) -> Cochain:
        out = Cochain(self.target.n, {})
        for mask, c in z.terms.items():
            out = out + self.fn(mask).scale(c)
        return out

    def verify_chain_property(self) -> None:
        src = self.source
        tgt = self.target
        for s in range(src.top_degree + 1):
            for mask in src.basis(s):
                lhs = self.apply(Cochain(src.n, src.d_monomial(mask)))
                rhs = tgt.d_cochain(self.fn(mask))
                if lhs != rhs:
                    raise ValueError(
                        f"not a chain map at {format_monomial(mask, src.n)}"
                    )


def inclusion_map(sub, full) -> ChainMap:
    one = full.ring_one
    return ChainMap(sub, full, lambda m: Cochain(full.n, {m: one}), "inclusion")


def monomial_projection(full, member, target) -> ChainMap:
    """Kill basis monomials outside the target subcomplex, keep the rest."""
    one = target.ring_one

    def fn(mask):
        if member(mask):
            return Cochain(target.n, {mask: one})
        return Cochain(target.n, {})

    return ChainMap(full, target, fn, "projection")


def induced_map_rank(chmap: ChainMap) -> dict:
    """Per-(s, u) rank of the induced map on cohomology, with isomorphism and
    surjectivity verdicts."""
    chmap.verify_chain_property()
    src_coh = Cohomology(chmap.source)
    tgt_coh = Cohomology(chmap.target)
    field = chmap.source.field
    ranks: dict[tuple[int, int], int] = {}
    src_b: dict[tuple[int, int], int] = {}
    tgt_b: dict[tuple[int, int], int] = {}

    keys = set()
    for s in range(chmap.source.top_degree + 1):
        keys.update((s, u) for u in chmap.source.blocks(s))
    for s in range(chmap.target.top_degree + 1):
        keys.update((s, u) for u in chmap.target.blocks(s))

    for (s, u) in sorted(keys):
        sb = src_coh.block(s, u) if u in chmap.source.blocks(s) else None
        tb = tgt_coh.block(s, u) if u in chmap.target.blocks(s) else None
        sdim = sb.dim if sb else 0
        tdim = tb.dim if tb else 0
        if sdim:
            src_b[(s, u)] = sdim
        if tdim:
            tgt_b[(s, u)] = tdim
        if not sdim or not tdim:
            ranks[(s, u)] = 0
            continue
        image_rows = []
        for i in range(sdim):
            img = chmap.apply(sb.representative(i))
            coords = tb.reduce(img)
            vec = {j: c for j, c in enumerate(coords) if c}
            if vec:
                image_rows.append(vec)
        rr_rows, _ = rref(image_rows, field)
        ranks[(s, u)] = len(rr_rows)

    iso = all(
        ranks.get(k, 0) == src_b.get(k, 0) == tgt_b.get(k, 0)
        for k in set(src_b) | set(tgt_b)
    )
    surjective = all(ranks.get(k, 0) == tgt_b.get(k, 0) for k in tgt_b)
    return {
        "ranks": ranks,
        "source_betti": src_b,
        "target_betti": tgt_b,
        "quasi_isomorphism": iso,
        "surjective_on_cohomology": surjective,
    }
