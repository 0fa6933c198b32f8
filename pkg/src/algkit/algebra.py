"""Finite-dimensional associative algebras by structure constants: validation,
ideals, radical certification, Peirce decomposition, split and r-split tests.

Over non-perfect coefficient fields the radical is certificate-driven: the
caller supplies a radical basis plus isomorphisms of the quotient blocks onto
field towers, and everything is verified before use.
"""

from . import errors
from .fields import (FieldElement, dim_over, embed, is_perfect,
                     pth_power_components, tower_basis, tower_coords)
from .linalg import (Matrix, SpanBuilder, Subspace, bilinear_image, rref_solve,
                     vec_is_zero, vec_zero)


class AlgebraPresentation:
    """Structure-constant table of a unital associative k-algebra."""

    __slots__ = ("field", "dim", "basis_names", "unit", "table", "_cache")

    def __init__(self, field, basis_names, unit, table):
        self.field = field
        self.dim = len(basis_names)
        self.basis_names = tuple(basis_names)
        self.unit = tuple(unit)
        self.table = tuple(tuple(tuple(v) for v in row) for row in table)
        if len(self.unit) != self.dim or len(self.table) != self.dim:
            raise errors.DimensionMismatch("table/unit size")
        for row in self.table:
            if len(row) != self.dim or any(len(v) != self.dim for v in row):
                raise errors.DimensionMismatch("table entry size")
        self._cache = {}

    def __repr__(self):
        return f"<AlgebraPresentation dim {self.dim} over {self.field.token}>"

    # -- element helpers ----------------------------------------------------

    def zero_vec(self):
        return vec_zero(self.field, self.dim)

    def basis_vector(self, i):
        v = self.zero_vec()
        v[i] = self.field.one()
        return v

    def scalar(self, c):
        return [c * u for u in self.unit]

    def _sparse(self):
        sp = self._cache.get("sparse")
        if sp is None:
            sp = {}
            for i, row in enumerate(self.table):
                for j, vec in enumerate(row):
                    nz = [(l, c) for l, c in enumerate(vec) if not c.is_zero]
                    if nz:
                        sp[(i, j)] = nz
            self._cache["sparse"] = sp
        return sp

    def multiply(self, u, v):
        sp = self._sparse()
        out = self.zero_vec()
        for i, a in enumerate(u):
            if a.is_zero:
                continue
            for j, b in enumerate(v):
                if b.is_zero:
                    continue
                nz = sp.get((i, j))
                if not nz:
                    continue
                ab = a * b
                for l, c in nz:
                    out[l] = out[l] + ab * c
        return out

    def left_mult_matrix(self, x):
        """Matrix of y -> x*y on the basis."""
        cols = [self.multiply(x, self.basis_vector(j)) for j in range(self.dim)]
        return Matrix(self.field, list(zip(*cols)))

    def right_mult_matrix(self, x):
        cols = [self.multiply(self.basis_vector(j), x) for j in range(self.dim)]
        return Matrix(self.field, list(zip(*cols)))

    def power(self, x, n):
        out = list(self.unit)
        b = list(x)
        while n:
            if n & 1:
                out = self.multiply(out, b)
            b = self.multiply(b, b)
            n >>= 1
        return out

    def is_commutative(self):
        flag = self._cache.get("comm")
        if flag is None:
            flag = all(self.table[i][j] == self.table[j][i]
                       for i in range(self.dim) for j in range(i))
            self._cache["comm"] = flag
        return flag


class ValidationReport:
    __slots__ = ("ok", "dim", "problems")

    def __init__(self, ok, dim, problems):
        self.ok = ok
        self.dim = dim
        self.problems = problems

    def raise_if_invalid(self):
        if self.ok:
            return self
        p = self.problems[0]
        if p[0] == "associativity":
            raise errors.NotAssociative(*p[1])
        raise errors.UnitFails(str(p))


def validate_algebra(a, stop_early=True):
    """Check the unit axioms and associativity on all basis triples."""
    problems = []
    d = a.dim
    for i in range(d):
        e = a.basis_vector(i)
        if a.multiply(a.unit, e) != e or a.multiply(e, a.unit) != e:
            problems.append(("unit", i))
            if stop_early:
                return ValidationReport(False, d, problems)
    sp = a._sparse()
    for i in range(d):
        for j in range(d):
            cij = a.table[i][j]
            nz_ij = [(l, c) for l, c in enumerate(cij) if not c.is_zero]
            for l in range(d):
                # (b_i b_j) b_l
                left = a.zero_vec()
                for m, c in nz_ij:
                    for t, c2 in sp.get((m, l), ()):
                        left[t] = left[t] + c * c2
                # b_i (b_j b_l)
                right = a.zero_vec()
                for m, c in enumerate(a.table[j][l]):
                    if c.is_zero:
                        continue
                    for t, c2 in sp.get((i, m), ()):
                        right[t] = right[t] + c * c2
                if left != right:
                    problems.append(("associativity", (i, j, l)))
                    if stop_early:
                        return ValidationReport(False, d, problems)
    return ValidationReport(not problems, d, problems)


class IdealSubspace:
    """Subspace of an algebra verified to be a two-sided ideal."""

    __slots__ = ("algebra", "space")

    def __init__(self, algebra, space, verify=True):
        self.algebra = algebra
        self.space = space
        if verify:
            for r in space.rows:
                for i in range(algebra.dim):
                    e = algebra.basis_vector(i)
                    if not space.contains(algebra.multiply(e, r)) or \
                       not space.contains(algebra.multiply(r, e)):
                        raise errors.CertificateRejected(
                            "subspace is not a two-sided ideal")

    @property
    def dim(self):
        return self.space.dim


def ideal_closure(a, gens):
    """Least two-sided ideal containing the generators."""
    span = SpanBuilder(a.field, a.dim)
    work = []
    for g in gens:
        if span.add(g):
            work.append(list(g))
    basis = [a.basis_vector(i) for i in range(a.dim)]
    while work:
        v = work.pop()
        for e in basis:
            for prod in (a.multiply(e, v), a.multiply(v, e)):
                if span.add(prod):
                    work.append(prod)
    return IdealSubspace(a, span.subspace(), verify=False)


def nilpotency_index(ideal):
    """Least n with I^n = 0, or None if I^(d+1) != 0."""
    a = ideal.algebra
    power = ideal.space
    n = 1
    while power.dim:
        if n > a.dim:
            return None
        power = bilinear_image(power, ideal.space, a.multiply)
        n += 1
    return n if n > 1 or ideal.space.dim == 0 else 1


def loewy_length(a, rad):
    """rl = least n with r^n = 0; rl = 1 iff semisimple."""
    n = nilpotency_index(rad)
    if n is None:
        raise errors.CertificateRejected("radical candidate is not nilpotent")
    return n


# ---------------------------------------------------------------------------
# quotient algebras and certified block structure

class QuotientData:
    """Λ/I with a fixed complement choice: presentation, projection onto the
    quotient coordinates, and the canonical coset-representative section."""

    __slots__ = ("algebra", "ideal", "quotient", "project", "lift")

    def __init__(self, algebra, ideal):
        self.algebra = algebra
        self.ideal = ideal
        comp, project, lift = ideal.space.quotient_coords()
        self.project = project
        self.lift = lift
        m = len(comp)
        names = [f"q{j}" for j in range(m)]
        unit = project(list(algebra.unit))
        table = []
        for i in range(m):
            bi = lift(_std(algebra.field, m, i))
            row = []
            for j in range(m):
                bj = lift(_std(algebra.field, m, j))
                row.append(project(algebra.multiply(bi, bj)))
            table.append(row)
        self.quotient = AlgebraPresentation(algebra.field, names, unit, table)


def _std(field, n, i):
    v = vec_zero(field, n)
    v[i] = field.one()
    return v


class BlockIso:
    """Certified isomorphism of one quotient block onto a field tower.

    `basis` lists coset representatives (full algebra coordinates); `images`
    are their images in the tower D."""

    __slots__ = ("field_tower", "basis", "images")

    def __init__(self, field_tower, basis, images):
        self.field_tower = field_tower
        self.basis = [list(b) for b in basis]
        self.images = list(images)


class BlockData:
    """Verified block: q-coordinates, both directions of the isomorphism."""

    __slots__ = ("tower", "qbasis", "images", "unit_qvec", "ground")

    def __init__(self, tower, qbasis, images, unit_qvec, ground):
        self.tower = tower
        self.qbasis = qbasis
        self.images = images
        self.unit_qvec = unit_qvec
        self.ground = ground

    def to_tower(self, coeffs):
        """Block coefficients (over qbasis) -> tower element."""
        out = self.tower.zero()
        for c, im in zip(coeffs, self.images):
            out = out + embed(c, self.tower) * im
        return out

    def from_tower(self, d):
        """Tower element -> block coefficients over qbasis (k-linear solve)."""
        cols = [tower_coords(im, self.ground) for im in self.images]
        mat = Matrix(self.ground, list(zip(*cols)))
        rhs = Matrix(self.ground, [[c] for c in tower_coords(d, self.ground)])
        res = rref_solve(mat, rhs)
        assert res.consistent
        return res.particular.column(0)


def verify_block_structure(qdata, block_isos):
    """Certify Λ/r = ⊕ D_i: every block iso bijective and multiplicative,
    blocks independent, pairwise annihilating, units summing to the unit."""
    Q = qdata.quotient
    k = Q.field
    blocks = []
    total = 0
    span = SpanBuilder(k, Q.dim)
    for bi in block_isos:
        qbasis = [qdata.project(b) for b in bi.basis]
        d_over_k = dim_over(bi.field_tower, k)
        if len(qbasis) != d_over_k or len(bi.images) != d_over_k:
            raise errors.CertificateRejected(
                f"block size {len(qbasis)} vs dim_k {bi.field_tower.token}"
                f" = {d_over_k}")
        for v in qbasis:
            if not span.add(v):
                raise errors.CertificateRejected("block bases not independent")
        # images must be a k-basis of the tower
        coords = [tower_coords(im, k) for im in bi.images]
        if rref_solve(Matrix(k, coords)).rank != d_over_k:
            raise errors.CertificateRejected(
                f"images do not span {bi.field_tower.token}")
        total += d_over_k
        blocks.append((bi, qbasis))
    if total != Q.dim:
        raise errors.CertificateRejected(
            f"blocks cover dim {total} of a {Q.dim}-dimensional quotient")

    out = []
    unit_sum = vec_zero(k, Q.dim)
    for bi, qbasis in blocks:
        block_span = SpanBuilder(k, Q.dim, qbasis)

        def in_block_coords(vec, qbasis=qbasis):
            mat = Matrix(k, list(zip(*qbasis)))
            res = rref_solve(mat, Matrix(k, [[c] for c in vec]))
            if not res.consistent:
                raise errors.CertificateRejected("product leaves its block")
            return res.particular.column(0)

        # multiplicativity on the block basis
        for r, qr in enumerate(qbasis):
            for s, qs in enumerate(qbasis):
                prod = Q.multiply(qr, qs)
                if not block_span.contains(prod):
                    raise errors.CertificateRejected(
                        "block is not multiplicatively closed")
                coeffs = in_block_coords(prod)
                lhs = bi.field_tower.zero()
                for c, im in zip(coeffs, bi.images):
                    lhs = lhs + embed(c, bi.field_tower) * im
                if lhs != bi.images[r] * bi.images[s]:
                    raise errors.CertificateRejected(
                        "block iso is not multiplicative")
        bd = BlockData(bi.field_tower, qbasis, bi.images, None, k)
        unit_vec = bd.from_tower(bi.field_tower.one())
        uq = vec_zero(k, Q.dim)
        for c, qv in zip(unit_vec, qbasis):
            for t in range(Q.dim):
                uq[t] = uq[t] + c * qv[t]
        bd.unit_qvec = uq
        out.append(bd)
        for t in range(Q.dim):
            unit_sum[t] = unit_sum[t] + uq[t]
    if unit_sum != list(Q.unit):
        raise errors.CertificateRejected("block units do not sum to 1")
    # pairwise annihilation
    for i, a in enumerate(out):
        for j, b in enumerate(out):
            if i == j:
                continue
            for qr in a.qbasis:
                for qs in b.qbasis:
                    if not vec_is_zero(Q.multiply(qr, qs)):
                        raise errors.CertificateRejected(
                            "distinct blocks do not annihilate")
    return out


class Certificates:
    """Optional certified data riding with an algebra presentation."""

    __slots__ = ("radical_vectors", "idempotents", "blocks", "epsilon_images")

    def __init__(self, radical_vectors=None, idempotents=None, blocks=None,
                 epsilon_images=None):
        self.radical_vectors = radical_vectors
        self.idempotents = idempotents
        self.blocks = blocks
        self.epsilon_images = epsilon_images  # per block: tower-basis images


class RadicalResult:
    __slots__ = ("ideal", "qdata", "blocks", "mode")

    def __init__(self, ideal, qdata, blocks, mode):
        self.ideal = ideal
        self.qdata = qdata
        self.blocks = blocks
        self.mode = mode


def radical(a, mode, certificates=None):
    """The Jacobson radical, either by the char-0 trace criterion or by
    verifying a supplied certificate (radical basis + quotient block isos)."""
    if mode == "trace_char0":
        if a.field.characteristic != 0:
            raise errors.WrongCharacteristic(
                "trace criterion needs characteristic zero")
        k = a.field
        tr = []
        for l in range(a.dim):
            s = k.zero()
            for m in range(a.dim):
                s = s + a.table[l][m][m]
            tr.append(s)
        rows = []
        for j in range(a.dim):
            rows.append([sum((a.table[i][j][l] * tr[l] for l in range(a.dim)),
                             k.zero()) for i in range(a.dim)])
        kernel = rref_solve(Matrix(k, rows)).kernel
        ideal = IdealSubspace(a, kernel, verify=True)
        if nilpotency_index(ideal) is None:
            raise errors.CertificateRejected("trace radical is not nilpotent")
        qdata = QuotientData(a, ideal)
        return RadicalResult(ideal, qdata, None, mode)
    if mode == "supplied":
        if certificates is None or certificates.radical_vectors is None:
            raise errors.CertificateRejected("no radical certificate supplied")
        space = Subspace.from_vectors(a.field, a.dim,
                                      certificates.radical_vectors)
        ideal = IdealSubspace(a, space, verify=True)
        if nilpotency_index(ideal) is None:
            raise errors.CertificateRejected(
                "supplied radical is not nilpotent")
        qdata = QuotientData(a, ideal)
        if certificates.blocks is None:
            raise errors.CertificateRejected("no quotient block isomorphisms")
        blocks = verify_block_structure(qdata, certificates.blocks)
        return RadicalResult(ideal, qdata, blocks, mode)
    raise ValueError(f"unknown radical mode {mode!r}")


def is_basic(a, certificates):
    """True iff every quotient block is (certified) a commutative field
    tower.  A provably non-commutative block gives False outright."""
    space = Subspace.from_vectors(a.field, a.dim, certificates.radical_vectors)
    ideal = IdealSubspace(a, space, verify=True)
    if nilpotency_index(ideal) is None:
        raise errors.CertificateRejected("supplied radical is not nilpotent")
    qdata = QuotientData(a, ideal)
    Q = qdata.quotient
    for bi in certificates.blocks or ():
        qbasis = [qdata.project(b) for b in bi.basis]
        for qr in qbasis:
            for qs in qbasis:
                if Q.multiply(qr, qs) != Q.multiply(qs, qr):
                    return False
    try:
        verify_block_structure(qdata, certificates.blocks or ())
    except errors.CertificateRejected:
        raise
    return True


# ---------------------------------------------------------------------------
# idempotents and the Peirce decomposition

def _is_idempotent(a, e):
    return a.multiply(e, e) == list(e)


def idempotent_toolkit(a, action, rad_result=None, candidates=None):
    """verify: complete orthogonal primitive idempotent check.
    lift: lift the quotient block units through the radical."""
    if action == "verify":
        if candidates is None:
            raise ValueError("verify needs a candidate list")
        es = [list(e) for e in candidates]
        for e in es:
            if not _is_idempotent(a, e):
                raise errors.NotIdempotent("candidate fails e^2 = e")
        for i, e in enumerate(es):
            for j, f in enumerate(es):
                if i != j and (not vec_is_zero(a.multiply(e, f))
                               or not vec_is_zero(a.multiply(f, e))):
                    raise errors.NotOrthogonal(f"candidates {i}, {j}")
        total = a.zero_vec()
        for e in es:
            total = [x + y for x, y in zip(total, e)]
        if total != list(a.unit):
            raise errors.NotComplete("candidates do not sum to 1")
        if rad_result is not None and rad_result.blocks is not None:
            # primitive in the basic case: the image of e is the unit of
            # exactly one certified division block
            for i, e in enumerate(es):
                q = rad_result.qdata.project(e)
                hits = [b for b in rad_result.blocks if q == list(b.unit_qvec)]
                if len(hits) != 1:
                    raise errors.NotPrimitive(
                        f"candidate {i} is not a single block unit")
        return es
    if action == "lift":
        if rad_result is None or rad_result.blocks is None:
            raise errors.CertificateRejected(
                "lifting needs a verified radical with block structure")
        rl = loewy_length(a, rad_result.ideal)
        max_iter = rl.bit_length() + 1
        lifted = []
        done = a.zero_vec()
        one = a.field.one()
        two = a.field.from_int(2)
        three = a.field.from_int(3)
        for b in rad_result.blocks:
            e = rad_result.qdata.lift(list(b.unit_qvec))
            # orthogonalize against what we already fixed: (1-f) e (1-f)
            f1 = [u - x for u, x in zip(a.unit, done)]
            e = a.multiply(a.multiply(f1, e), f1)
            for _ in range(max_iter + 1):
                if _is_idempotent(a, e):
                    break
                e2 = a.multiply(e, e)
                e3 = a.multiply(e2, e)
                e = [three * x - two * y for x, y in zip(e2, e3)]
            if not _is_idempotent(a, e):
                raise errors.NotIdempotent("lifting did not converge")
            lifted.append(e)
            done = [x + y for x, y in zip(done, e)]
        if done != list(a.unit):
            raise errors.NotComplete("lifted idempotents do not sum to 1")
        return idempotent_toolkit(a, "verify", rad_result, lifted)
    raise ValueError(f"unknown action {action!r}")


def peirce(a, idems):
    """Bases of all blocks e_j Λ e_i, keyed by (j, i)."""
    blocks = {}
    total = 0
    for j, ej in enumerate(idems):
        for i, ei in enumerate(idems):
            span = SpanBuilder(a.field, a.dim)
            for l in range(a.dim):
                span.add(a.multiply(a.multiply(ej, a.basis_vector(l)), ei))
            blocks[(j, i)] = span.subspace()
            total += span.dim
    if total != a.dim:
        raise errors.NotComplete(
            f"Peirce blocks sum to {total}, algebra has dim {a.dim}")
    return blocks


# ---------------------------------------------------------------------------
# morphisms, split and r-split tests

class AlgebraMorphism:
    """k-linear map between presentations with a multiplicativity flag."""

    __slots__ = ("source", "target", "matrix", "verified")

    def __init__(self, source, target, matrix, verify=True):
        self.source = source
        self.target = target
        self.matrix = matrix
        self.verified = False
        if verify:
            self.verify()

    def apply(self, vec):
        return self.matrix.apply(vec)

    def verify(self):
        s, t = self.source, self.target
        if self.apply(s.unit) != list(t.unit):
            raise errors.NotIsomorphic("morphism does not preserve the unit")
        images = [self.apply(s.basis_vector(i)) for i in range(s.dim)]
        for i in range(s.dim):
            for j in range(s.dim):
                lhs = self.apply(s.table[i][j])
                rhs = t.multiply(images[i], images[j])
                if lhs != rhs:
                    raise errors.NotIsomorphic(
                        f"morphism not multiplicative at basis pair ({i},{j})")
        self.verified = True
        return self

    def is_bijective(self):
        return (self.source.dim == self.target.dim
                and rref_solve(self.matrix).rank == self.source.dim)


def epsilon_from_block_images(rad_result, epsilon_images):
    """Assemble the lifting ε: Λ/r -> Λ from per-block tower-basis images."""
    a = rad_result.ideal.algebra
    qdata = rad_result.qdata
    Q = qdata.quotient
    k = a.field
    cols_domain = []
    cols_image = []
    for b, imgs in zip(rad_result.blocks, epsilon_images):
        if len(imgs) != len(b.qbasis):
            raise errors.CertificateRejected("epsilon image count per block")
        # domain columns: q-vectors of phi^{-1}(tower basis)
        for tb, im in zip(tower_basis(b.tower, k), imgs):
            coeffs = b.from_tower(tb)
            qv = vec_zero(k, Q.dim)
            for c, qb in zip(coeffs, b.qbasis):
                for t2 in range(Q.dim):
                    qv[t2] = qv[t2] + c * qb[t2]
            cols_domain.append(qv)
            cols_image.append(list(im))
    B = Matrix(k, list(zip(*cols_domain)))
    I = Matrix(k, list(zip(*cols_image)))
    return AlgebraMorphism(Q, a, _mat_div(I, B), verify=True)


def _mat_div(I, B):
    """I * B^{-1} for square invertible B."""
    res = rref_solve(B, Matrix.identity(B.field, B.nrows))
    if not res.consistent or res.rank != B.nrows:
        raise errors.CertificateRejected("singular basis matrix")
    return I * res.particular


def verify_split(a, rad_result, epsilon):
    """True iff ε is a verified algebra morphism Λ/r -> Λ with π∘ε = id."""
    if isinstance(epsilon, Matrix):
        try:
            epsilon = AlgebraMorphism(rad_result.qdata.quotient, a, epsilon,
                                      verify=True)
        except errors.NotIsomorphic as exc:
            return False, str(exc)
    elif not epsilon.verified:
        try:
            epsilon.verify()
        except errors.NotIsomorphic as exc:
            return False, str(exc)
    Q = rad_result.qdata.quotient
    for j in range(Q.dim):
        img = epsilon.apply(_std(a.field, Q.dim, j))
        if rad_result.qdata.project(img) != _std(a.field, Q.dim, j):
            return False, f"π∘ε is not the identity on quotient basis {j}"
    return True, "verified splitting"


class SplitSearchResult:
    __slots__ = ("status", "epsilon", "detail")

    def __init__(self, status, epsilon, detail):
        self.status = status  # found | none | unsupported
        self.epsilon = epsilon
        self.detail = detail


def find_splitting_charp(a, rad_result):
    """Decide splitting for commutative char-p Λ whose quotient is a single
    tower with purely inseparable minimal polynomial u^(p^e) - c.

    The equation ε(θ) = w with w^(p^e) = c·1 is semilinear, so it reduces to
    an exact linear system over q-th powers."""
    k = a.field
    p = k.characteristic
    if p == 0:
        raise errors.UnsupportedShape("characteristic zero")
    if not a.is_commutative():
        raise errors.UnsupportedShape("algebra is not commutative")
    if rad_result.blocks is None or len(rad_result.blocks) != 1:
        raise errors.UnsupportedShape("quotient is not a single tower")
    block = rad_result.blocks[0]
    D = block.tower
    if D == k:
        # quotient is the ground field: scalars split every unital algebra
        cols = [list(a.unit)]
        eps = AlgebraMorphism(rad_result.qdata.quotient, a,
                              Matrix(k, list(zip(*cols))), verify=True)
        return SplitSearchResult("found", eps, "scalar section")
    if D.kind != "extension" or D.base != k:
        raise errors.UnsupportedShape(
            f"quotient tower {D.token} is not simple over {k.token}")
    mp = D.minpoly
    q = len(mp) - 1
    e = 0
    qq = q
    while qq > 1 and qq % p == 0:
        qq //= p
        e += 1
    if qq != 1 or any(not k._is_zero(c) for c in mp[1:-1]):
        raise errors.UnsupportedShape(
            "minimal polynomial is not of the shape u^(p^e) - c")
    c = FieldElement(k, k._neg(mp[0]))
    # unknowns: w = sum_i gamma_i b_i with sum gamma_i^q b_i^q = c*1
    powers = [a.power(a.basis_vector(i), q) for i in range(a.dim)]
    target = a.scalar(c)
    rows = []
    rhs = []
    ncomp = len(pth_power_components(k.zero(), q))
    for l in range(a.dim):
        wcomp = [pth_power_components(powers[i][l], q) for i in range(a.dim)]
        tcomp = pth_power_components(target[l], q)
        for j in range(ncomp):
            rows.append([wcomp[i][j] for i in range(a.dim)])
            rhs.append([tcomp[j]])
    res = rref_solve(Matrix(k, rows), Matrix(k, rhs))
    if not res.consistent:
        return SplitSearchResult(
            "none", None,
            f"the semilinear system for w^{q} = c·1 is inconsistent; "
            "no k-algebra section exists")
    w = res.particular.column(0)
    assert a.power(w, q) == a.scalar(c)
    # ε sends the tower basis θ^i to w^i
    imgs = [a.power(w, i) for i in range(q)]
    eps = epsilon_from_block_images(rad_result, [imgs])
    ok, detail = verify_split(a, rad_result, eps)
    if not ok:
        raise errors.CertificateRejected(f"constructed ε failed: {detail}")
    return SplitSearchResult("found", eps, "semilinear solve")


class SectionResult:
    __slots__ = ("feasible", "section", "detail", "rad_complement")

    def __init__(self, feasible, section, detail, rad_complement):
        self.feasible = feasible
        self.section = section
        self.detail = detail
        self.rad_complement = rad_complement


def radical_quotient_data(a, rad_result):
    """Coordinates for r, r^2 and M = r/r^2 (complement inside r)."""
    R = rad_result.ideal.space
    R2 = bilinear_image(R, R, a.multiply)
    # express r^2 inside r-coordinates
    k = a.field
    rmat = Matrix(k, list(zip(*R.rows)))  # columns = radical basis
    r2_in_r = []
    for v in R2.rows:
        res = rref_solve(rmat, Matrix(k, [[c] for c in v]))
        assert res.consistent
        r2_in_r.append(res.particular.column(0))
    inner = Subspace.from_vectors(k, R.dim, r2_in_r)
    comp, project, lift = inner.quotient_coords()
    return R, R2, inner, comp, project, lift


def r_split_check(a, rad_result, epsilon):
    """Exact feasibility of a Λ/r-bimodule section s: r/r^2 -> r via ε.

    Returns the section (as r-coordinates of the images of the chosen
    complement basis) or a certified infeasibility."""
    k = a.field
    R, R2, inner, comp, projectM, liftM = radical_quotient_data(a, rad_result)
    nR, nM = R.dim, len(comp)
    Q = rad_result.qdata.quotient
    nQ = Q.dim

    def r_coords(vec):
        rmat = Matrix(k, list(zip(*R.rows)))
        res = rref_solve(rmat, Matrix(k, [[c] for c in vec]))
        assert res.consistent, "vector not in the radical"
        return res.particular.column(0)

    if nM == 0:
        zero = Matrix.zero(k, nR, 0)
        return SectionResult(True, zero, "r = r^2 (trivially split)", comp)

    eps_std = [epsilon.apply(_std(k, nQ, i)) for i in range(nQ)]
    m_reps = [R_lin_comb(R, liftM(_std(k, nM, j))) for j in range(nM)]

    # unknowns S[r][j]; rows of the linear system over k
    nunk = nR * nM
    rows = []
    rhs = []

    def unk(r, j):
        return r * nM + j

    # (i) p ∘ s = id: s(m_j) = sum_r S[r][j] R_r has M-coords
    # sum_r S[r][j] projM(R_r)
    projM_basis = [projectM(_unit_list(R, r)) for r in range(nR)]
    for j in range(nM):
        for t in range(nM):
            row = [k.zero()] * nunk
            for r in range(nR):
                pm = projM_basis[r][t]
                if not pm.is_zero:
                    row[unk(r, j)] = pm
            rhs.append([k.one() if t == j else k.zero()])
            rows.append(row)

    # (ii) equivariance over the quotient basis
    act_cache = {}
    for ai in range(nQ):
        for bi in range(nQ):
            for j in range(nM):
                # A = M-coords of ε(u_a) m̂_j ε(u_b)
                prod = a.multiply(a.multiply(eps_std[ai], m_reps[j]), eps_std[bi])
                A = projectM(r_coords(prod))
                # LHS: s(A) = sum_t A_t s(m_t) -> r-coords sum_t A_t S[.][t]
                # RHS: ε(u_a) s(m_j) ε(u_b) -> sum_r S[r][j] rc(ε_a R_r ε_b)
                for rr in range(nR):
                    row = [k.zero()] * nunk
                    for t in range(nM):
                        if not A[t].is_zero:
                            row[unk(rr, t)] = row[unk(rr, t)] + A[t]
                    for r in range(nR):
                        key = (ai, bi, r)
                        rc = act_cache.get(key)
                        if rc is None:
                            pr = a.multiply(a.multiply(eps_std[ai],
                                                       list(R.rows[r])),
                                            eps_std[bi])
                            rc = r_coords(pr)
                            act_cache[key] = rc
                        if not rc[rr].is_zero:
                            row[unk(r, j)] = row[unk(r, j)] - rc[rr]
                    if any(not c.is_zero for c in row):
                        rows.append(row)
                        rhs.append([k.zero()])

    res = rref_solve(Matrix(k, rows), Matrix(k, rhs))
    if not res.consistent:
        return SectionResult(False, None,
                             "bimodule section system is inconsistent", comp)
    S = res.particular.column(0)
    section = Matrix(k, [[S[unk(r, j)] for j in range(nM)] for r in range(nR)])
    _verify_section(a, rad_result, epsilon, section, R, projectM, m_reps)
    return SectionResult(True, section, "section found", comp)


def _unit_list(R, r):
    out = [R.field.zero()] * R.dim
    out[r] = R.field.one()
    return out


def R_lin_comb(R, coeffs):
    """Vector in the big algebra from r-coordinates."""
    out = [R.field.zero()] * R.ambient
    for c, row in zip(coeffs, R.rows):
        if c.is_zero:
            continue
        for i, x in enumerate(row):
            if not x.is_zero:
                out[i] = out[i] + c * x
    return out


def _verify_section(a, rad_result, epsilon, section, R, projectM, m_reps):
    """Re-verify p ∘ s = id and bimodule equivariance exactly."""
    k = a.field
    nM = section.ncols
    nQ = rad_result.qdata.quotient.dim

    def s_of(coordsM):
        rc = section.apply(coordsM)
        return R_lin_comb(R, rc)

    def r_coords(vec):
        rmat = Matrix(k, list(zip(*R.rows)))
        res = rref_solve(rmat, Matrix(k, [[c] for c in vec]))
        assert res.consistent
        return res.particular.column(0)

    for j in range(nM):
        ej = _std(k, nM, j)
        img = s_of(ej)
        assert projectM(r_coords(img)) == ej, "p∘s != id"
    eps_std = [epsilon.apply(_std(k, nQ, i)) for i in range(nQ)]
    for ai in range(nQ):
        for bi in range(nQ):
            for j in range(nM):
                prod = a.multiply(a.multiply(eps_std[ai], m_reps[j]),
                                  eps_std[bi])
                lhs = s_of(projectM(r_coords(prod)))
                rhs = a.multiply(a.multiply(eps_std[ai], s_of(_std(k, nM, j))),
                                 eps_std[bi])
                assert lhs == rhs, "section is not bimodule-equivariant"
