"""Dense exact linear algebra over any FieldDescriptor.

Plain Gauss-Jordan with exact division; no pivoting heuristics are needed
over exact fields.  Subspaces are always stored in reduced row echelon form
so that equality is structural.
"""

from . import errors
from .fields import FieldElement


def vec_zero(field, n):
    z = field.zero()
    return [z] * n


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(u, c):
    if c.is_zero:
        return [c.field.zero()] * len(u)
    return [c * a for a in u]


def vec_is_zero(u):
    return all(a.is_zero for a in u)


class Matrix:
    """Immutable rectangular matrix of FieldElements over one descriptor."""

    __slots__ = ("field", "rows")

    def __init__(self, field, rows):
        rows = tuple(tuple(r) for r in rows)
        if rows:
            n = len(rows[0])
            for r in rows:
                if len(r) != n:
                    raise errors.DimensionMismatch("ragged matrix")
                for e in r:
                    if not isinstance(e, FieldElement) or e.field != field:
                        raise errors.DescriptorMismatch("matrix entry field")
        self.field = field
        self.rows = rows

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    @staticmethod
    def identity(field, n):
        one, zero = field.one(), field.zero()
        return Matrix(field, [[one if i == j else zero for j in range(n)]
                              for i in range(n)])

    @staticmethod
    def zero(field, m, n):
        z = field.zero()
        return Matrix(field, [[z] * n for _ in range(m)])

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.field, self.rows))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise errors.DimensionMismatch(
                    f"{self.nrows}x{self.ncols} times {other.nrows}x{other.ncols}")
            cols = other.ncols
            zero = self.field.zero()
            out = []
            for r in self.rows:
                row = [zero] * cols
                for k, a in enumerate(r):
                    if a.is_zero:
                        continue
                    orow = other.rows[k]
                    for j in range(cols):
                        b = orow[j]
                        if not b.is_zero:
                            row[j] = row[j] + a * b
                out.append(row)
            return Matrix(self.field, out)
        raise TypeError("matrix multiplication expects a Matrix")

    def apply(self, vec):
        """Matrix-vector product (vec as a column)."""
        zero = self.field.zero()
        out = []
        for r in self.rows:
            acc = zero
            for a, x in zip(r, vec):
                if not a.is_zero and not x.is_zero:
                    acc = acc + a * x
            out.append(acc)
        return out

    def transpose(self):
        return Matrix(self.field, list(zip(*self.rows)) if self.rows else [])

    def column(self, j):
        return [r[j] for r in self.rows]

    def hstack(self, other):
        return Matrix(self.field,
                      [list(a) + list(b) for a, b in zip(self.rows, other.rows)])


def _rref_inplace(rows):
    """Reduce list-of-lists in place; returns pivot column list."""
    if not rows:
        return []
    nrows, ncols = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = None
        for i in range(r, nrows):
            if not rows[i][c].is_zero:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c].inv()
        rows[r] = [inv * a for a in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if not f.is_zero:
                    rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return pivots


class SolveResult:
    __slots__ = ("rref", "rank", "pivots", "particular", "kernel", "consistent")

    def __init__(self, rref, rank, pivots, particular, kernel, consistent):
        self.rref = rref
        self.rank = rank
        self.pivots = pivots
        self.particular = particular
        self.kernel = kernel
        self.consistent = consistent


def rref_solve(a, b=None):
    """RREF of a; when b is given, also a particular solution of a x = b.

    Inconsistency is reported (consistent flag, particular = None), not
    raised.  The kernel spans {x : a x = 0}."""
    field = a.field
    na = a.ncols
    if b is not None and b.nrows != a.nrows:
        raise errors.DimensionMismatch("right-hand side row count")
    work = [list(r) for r in a.rows]
    nb = 0
    if b is not None:
        nb = b.ncols
        work = [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)]

    if not work:
        rref = Matrix(field, [])
        kernel = Subspace.full(field, na) if na else Subspace(field, na, [])
        part = Matrix.zero(field, na, nb) if b is not None else None
        return SolveResult(rref, 0, [], part, kernel, True)

    # eliminate on the a-columns only
    nrows = len(work)
    pivots = []
    r = 0
    for c in range(na):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if not work[i][c].is_zero), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = work[r][c].inv()
        work[r] = [inv * x for x in work[r]]
        prow = work[r]
        for i in range(nrows):
            if i != r:
                f = work[i][c]
                if not f.is_zero:
                    work[i] = [x - f * y for x, y in zip(work[i], prow)]
        pivots.append(c)
        r += 1
    rank = len(pivots)
    rref = Matrix(field, [row[:na] for row in work])

    consistent = True
    particular = None
    if b is not None:
        for i in range(rank, nrows):
            if any(not work[i][na + j].is_zero for j in range(nb)):
                consistent = False
                break
        if consistent:
            zero = field.zero()
            sol = [[zero] * nb for _ in range(na)]
            for i, c in enumerate(pivots):
                for j in range(nb):
                    sol[c][j] = work[i][na + j]
            particular = Matrix(field, sol)

    pivot_set = set(pivots)
    kvecs = []
    zero, one = field.zero(), field.one()
    for j in range(na):
        if j in pivot_set:
            continue
        v = [zero] * na
        v[j] = one
        for i, c in enumerate(pivots):
            v[c] = -rref.rows[i][j]
        kvecs.append(v)
    kernel = Subspace.from_vectors(field, na, kvecs)
    return SolveResult(rref, rank, pivots, particular, kernel, consistent)


class Subspace:
    """Subspace of k^n held as an RREF basis (pivot entries 1, pivot
    columns elsewhere 0, pivots strictly increasing)."""

    __slots__ = ("field", "ambient", "rows", "pivots")

    def __init__(self, field, ambient, rows, pivots=None):
        self.field = field
        self.ambient = ambient
        self.rows = tuple(tuple(r) for r in rows)
        if pivots is None:
            pivots = []
            for r in self.rows:
                pivots.append(next(i for i, a in enumerate(r) if not a.is_zero))
        self.pivots = tuple(pivots)

    @staticmethod
    def from_vectors(field, ambient, vectors):
        rows = [list(v) for v in vectors if not vec_is_zero(v)]
        pivots = _rref_inplace(rows)
        rows = rows[:len(pivots)]
        return Subspace(field, ambient, rows, pivots)

    @staticmethod
    def full(field, n):
        return Subspace(field, n, Matrix.identity(field, n).rows,
                        list(range(n)))

    @property
    def dim(self):
        return len(self.rows)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.field == other.field
                and self.ambient == other.ambient and self.rows == other.rows)

    def __hash__(self):
        return hash((self.field, self.ambient, self.rows))

    def __repr__(self):
        return f"<Subspace dim {self.dim} of k^{self.ambient}>"

    def _check(self, other):
        if self.ambient != other.ambient or self.field != other.field:
            raise errors.AmbientMismatch(
                f"k^{self.ambient} vs k^{other.ambient}")

    def reduce(self, vec):
        """Residual of vec after subtracting its projection on self."""
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if not c.is_zero:
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def contains(self, vec):
        return vec_is_zero(self.reduce(vec))

    def contains_space(self, other):
        self._check(other)
        return all(self.contains(r) for r in other.rows)

    def sum(self, other):
        self._check(other)
        return Subspace.from_vectors(self.field, self.ambient,
                                     list(self.rows) + list(other.rows))

    def intersect(self, other):
        """Zassenhaus: rref of [[U U], [V 0]]; zero-left rows carry the
        intersection in their right half."""
        self._check(other)
        n = self.ambient
        zero = self.field.zero()
        block = [list(r) + list(r) for r in self.rows]
        block += [list(r) + [zero] * n for r in other.rows]
        _rref_inplace(block)
        vecs = []
        for row in block:
            if all(a.is_zero for a in row[:n]):
                right = row[n:]
                if not vec_is_zero(right):
                    vecs.append(right)
        return Subspace.from_vectors(self.field, n, vecs)

    def complement_indices(self):
        pivot_set = set(self.pivots)
        return [j for j in range(self.ambient) if j not in pivot_set]

    def quotient_coords(self):
        """Complement basis (standard vectors off the pivot columns) and the
        induced coordinate map onto the quotient by self."""
        comp = self.complement_indices()

        def project(vec):
            res = self.reduce(vec)
            return [res[j] for j in comp]

        def lift(coords):
            v = vec_zero(self.field, self.ambient)
            for j, c in zip(comp, coords):
                v[j] = c
            return v

        return comp, project, lift


def subspace_ops(op, u, v=None):
    """Spec-surface dispatcher over the Subspace methods."""
    if op == "sum":
        return u.sum(v)
    if op == "intersect":
        return u.intersect(v)
    if op == "contains":
        if isinstance(v, Subspace):
            return u.contains_space(v)
        return u.contains(v)
    if op == "equal":
        u._check(v)
        return u == v
    if op == "quotient_coords":
        return u.quotient_coords()
    raise ValueError(f"unknown subspace op {op!r}")


class SpanBuilder:
    """Incremental RREF accumulator; the workhorse behind closures."""

    __slots__ = ("field", "ambient", "rows", "pivots")

    def __init__(self, field, ambient, vectors=()):
        self.field = field
        self.ambient = ambient
        self.rows = []
        self.pivots = []
        for v in vectors:
            self.add(v)

    @property
    def dim(self):
        return len(self.rows)

    def add(self, vec):
        """Insert a vector; True if the span grew."""
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if not c.is_zero:
                v = [a - c * b for a, b in zip(v, row)]
        piv = next((i for i, a in enumerate(v) if not a.is_zero), None)
        if piv is None:
            return False
        inv = v[piv].inv()
        v = [inv * a for a in v]
        # keep earlier rows fully reduced
        for i, row in enumerate(self.rows):
            c = row[piv]
            if not c.is_zero:
                self.rows[i] = [a - c * b for a, b in zip(row, v)]
        pos = 0
        while pos < len(self.pivots) and self.pivots[pos] < piv:
            pos += 1
        self.rows.insert(pos, v)
        self.pivots.insert(pos, piv)
        return True

    def contains(self, vec):
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if not c.is_zero:
                v = [a - c * b for a, b in zip(v, row)]
        return all(a.is_zero for a in v)

    def subspace(self):
        return Subspace(self.field, self.ambient, self.rows, self.pivots)


def bilinear_image(u, v, mult):
    """Span of all products of u-basis by v-basis under the bilinear map.

    `mult` multiplies two ambient coordinate vectors (e.g. an
    AlgebraPresentation.multiply)."""
    if u.ambient != v.ambient:
        raise errors.DimensionMismatch("bilinear image over unequal ambients")
    out = SpanBuilder(u.field, u.ambient)
    for x in u.rows:
        for y in v.rows:
            out.add(mult(x, y))
    return out.subspace()
