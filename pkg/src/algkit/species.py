"""Species (modulated quivers) with relations.

Vertices carry field towers over a common ground field k, edges carry
bimodules given by explicit k-action matrices, and path spaces are tensor
products over the intermediate towers, materialized over k by imposing the
balancing relations (m·d ⊗ v - m ⊗ d·v) through row reduction.
"""

from . import errors
from .algebra import RadicalResult, R_lin_comb, radical_quotient_data
from .fields import FieldElement, dim_over, embed, tower_basis, tower_coords
from .linalg import (Matrix, SpanBuilder, Subspace, rref_solve, vec_is_zero,
                     vec_zero)


class VertexRing:
    """A vertex: a field tower D over the ground field, finite dimensional."""

    __slots__ = ("vid", "tower", "ground")

    def __init__(self, vid, tower, ground):
        self.vid = vid
        self.tower = tower
        self.ground = ground
        dim_over(tower, ground)  # raises NoTowerPath when not a finite tower

    @property
    def dim(self):
        return dim_over(self.tower, self.ground)


class Bimodule:
    """D_j-D_i-bimodule over k: a k-space with one action matrix per tower
    basis element of D_j (left) and of D_i (right)."""

    __slots__ = ("source", "target", "dim", "basis_names", "left_action",
                 "right_action")

    def __init__(self, source, target, basis_names, left_action, right_action):
        self.source = source        # VertexRing i
        self.target = target        # VertexRing j
        self.dim = len(basis_names)
        self.basis_names = tuple(basis_names)
        self.left_action = tuple(left_action)    # per tower basis of D_j
        self.right_action = tuple(right_action)  # per tower basis of D_i

    @property
    def ground(self):
        return self.source.ground

    def act_left_matrix(self, d):
        """Action matrix of d in D_j, expanded over the tower basis."""
        coords = tower_coords(d, self.ground)
        rows = [[self.ground.zero()] * self.dim for _ in range(self.dim)]
        for c, mat in zip(coords, self.left_action):
            if c.is_zero:
                continue
            for r in range(self.dim):
                for s in range(self.dim):
                    rows[r][s] = rows[r][s] + c * mat.rows[r][s]
        return Matrix(self.ground, rows)

    def act_right_matrix(self, d):
        coords = tower_coords(d, self.ground)
        rows = [[self.ground.zero()] * self.dim for _ in range(self.dim)]
        for c, mat in zip(coords, self.right_action):
            if c.is_zero:
                continue
            for r in range(self.dim):
                for s in range(self.dim):
                    rows[r][s] = rows[r][s] + c * mat.rows[r][s]
        return Matrix(self.ground, rows)

    def validate(self):
        k = self.ground
        dj = tower_basis(self.target.tower, k)
        di = tower_basis(self.source.tower, k)
        if len(self.left_action) != len(dj) or len(self.right_action) != len(di):
            raise errors.ActionAxiomFails(
                (self.source.vid, self.target.vid), "action matrix count")
        ident = Matrix.identity(k, self.dim)
        if self.left_action[0] != ident or self.right_action[0] != ident:
            raise errors.ActionAxiomFails(
                (self.source.vid, self.target.vid), "unit acts nontrivially")
        # action of a product = product of actions (anti for the right side,
        # which coincides for the commutative towers of v1)
        for bas, acts, side in ((dj, self.left_action, "left"),
                                (di, self.right_action, "right")):
            for r, br in enumerate(bas):
                for s, bs in enumerate(bas):
                    coords = tower_coords(br * bs, k)
                    want = _lin_comb_matrix(k, self.dim, coords, acts)
                    got = acts[r] * acts[s] if side == "left" else acts[s] * acts[r]
                    if got != want:
                        raise errors.ActionAxiomFails(
                            (self.source.vid, self.target.vid),
                            f"{side} action not multiplicative at ({r},{s})")
        for L in self.left_action:
            for R in self.right_action:
                if L * R != R * L:
                    raise errors.ActionAxiomFails(
                        (self.source.vid, self.target.vid),
                        "left and right actions do not commute")
        return True


def _lin_comb_matrix(k, n, coords, mats):
    rows = [[k.zero()] * n for _ in range(n)]
    for c, mat in zip(coords, mats):
        if c.is_zero:
            continue
        for r in range(n):
            for s in range(n):
                rows[r][s] = rows[r][s] + c * mat.rows[r][s]
    return Matrix(k, rows)


class Quiver:
    """Underlying quiver with a path enumeration cache."""

    __slots__ = ("vertices", "arrows", "_cache")

    def __init__(self, vertices, arrows):
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)
        self._cache = {}

    def successors(self, v):
        return [j for (i, j) in self.arrows if i == v]

    def is_acyclic(self):
        flag = self._cache.get("acyclic")
        if flag is None:
            indeg = {v: 0 for v in self.vertices}
            for (_, j) in self.arrows:
                indeg[j] += 1
            queue = [v for v in self.vertices if indeg[v] == 0]
            seen = 0
            while queue:
                v = queue.pop()
                seen += 1
                for j in self.successors(v):
                    indeg[j] -= 1
                    if indeg[j] == 0:
                        queue.append(j)
            flag = seen == len(self.vertices)
            self._cache["acyclic"] = flag
        return flag

    def longest_path(self):
        if not self.is_acyclic():
            return None
        best = {v: 0 for v in self.vertices}

        def depth(v):
            if v in done:
                return best[v]
            done.add(v)
            best[v] = max((depth(j) + 1 for j in self.successors(v)),
                          default=0)
            return best[v]

        done = set()
        return max((depth(v) for v in self.vertices), default=0)

    def is_tree_graph(self):
        """Cycle test on the undirected graph (ignoring orientations)."""
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (i, j) in self.arrows:
            ri, rj = find(i), find(j)
            if ri == rj:
                return False
            parent[ri] = rj
        return True

    def paths(self, i, j, min_len=1, max_len=None):
        """All directed paths i -> j with min_len <= length <= max_len,
        as vertex tuples, sorted by (length, tuple)."""
        if max_len is None:
            if not self.is_acyclic():
                raise errors.CyclicWithoutBound(
                    "path enumeration over a cyclic quiver needs a bound")
            max_len = len(self.vertices)
        out = []

        def walk(path):
            v = path[-1]
            if len(path) - 1 >= min_len and v == j:
                out.append(tuple(path))
            if len(path) - 1 >= max_len:
                return
            for w in self.successors(v):
                walk(path + [w])

        walk([i])
        # a path may revisit j only in the cyclic bounded case; keep all
        out.sort(key=lambda p: (len(p), p))
        return out

    def all_paths(self, max_len=None):
        out = []
        for i in self.vertices:
            for j in self.vertices:
                out.extend(self.paths(i, j, 1, max_len))
        out.sort(key=lambda p: (len(p), p))
        return out


def quiver_ops(s, op):
    q = s.quiver()
    if op == "underlying":
        return q
    if op == "is_acyclic":
        return q.is_acyclic()
    if op == "longest_path":
        return q.longest_path()
    if op == "is_tree_graph":
        return q.is_tree_graph()
    raise ValueError(f"unknown quiver op {op!r}")


class WordSpace:
    """Tensor words along one path: the raw k-tensor of the edge spaces
    modulo the balancing relations of the intermediate towers.

    Raw index convention: the LAST edge of the path is the leftmost tensor
    factor and the most significant digit of the flat index."""

    __slots__ = ("species", "path", "edges", "raw_dims", "raw_dim",
                 "balancing", "comp", "_project", "_lift", "dim")

    def __init__(self, species, path):
        self.species = species
        self.path = path
        self.edges = [species.edge(path[l], path[l + 1])
                      for l in range(len(path) - 1)]
        self.raw_dims = [e.dim for e in self.edges]
        raw_dim = 1
        for d in self.raw_dims:
            raw_dim *= d
        self.raw_dim = raw_dim
        k = species.ground
        relations = []
        n = len(self.edges)
        for l in range(n - 1):  # balancing over the tower at path[l + 1]
            D = species.vertex(path[l + 1]).tower
            basis = tower_basis(D, k)
            right_acts = self.edges[l + 1].right_action
            left_acts = self.edges[l].left_action
            for bidx in range(1, len(basis)):
                Rmat = right_acts[bidx]   # acts on edge l+1 (left factor)
                Lmat = left_acts[bidx]    # acts on edge l (right factor)
                for idx in range(raw_dim):
                    digits = self._unflatten(idx)
                    vec = vec_zero(k, raw_dim)
                    a = digits[l + 1]
                    b = digits[l]
                    # (a·d) ⊗ b: expand a·d over the edge l+1 basis
                    col = Rmat.column(a)
                    for anew, c in enumerate(col):
                        if not c.is_zero:
                            d2 = list(digits)
                            d2[l + 1] = anew
                            vec[self._flatten(d2)] = \
                                vec[self._flatten(d2)] + c
                    # minus a ⊗ (d·b)
                    col = Lmat.column(b)
                    for bnew, c in enumerate(col):
                        if not c.is_zero:
                            d2 = list(digits)
                            d2[l] = bnew
                            vec[self._flatten(d2)] = \
                                vec[self._flatten(d2)] - c
                    if not vec_is_zero(vec):
                        relations.append(vec)
        self.balancing = Subspace.from_vectors(k, raw_dim, relations)
        self.comp, self._project, self._lift = self.balancing.quotient_coords()
        self.dim = len(self.comp)

    def _flatten(self, digits):
        idx = 0
        for l in range(len(digits) - 1, -1, -1):
            idx = idx * self.raw_dims[l] + digits[l]
        return idx

    def _unflatten(self, idx):
        digits = []
        for d in self.raw_dims:
            digits.append(idx % d)
            idx //= d
        return digits

    def project(self, rawvec):
        return self._project(rawvec)

    def lift(self, coords):
        return self._lift(coords)

    def left_action_matrix(self, bidx):
        """Outer left action of the target tower basis element on words."""
        return self._outer(bidx, left=True)

    def right_action_matrix(self, bidx):
        return self._outer(bidx, left=False)

    def _outer(self, bidx, left):
        k = self.species.ground
        act = (self.edges[-1].left_action if left
               else self.edges[0].right_action)[bidx]
        pos = len(self.edges) - 1 if left else 0
        cols = []
        for widx in range(self.dim):
            raw = self.lift(_std(k, self.dim, widx))
            out = vec_zero(k, self.raw_dim)
            for idx, c in enumerate(raw):
                if c.is_zero:
                    continue
                digits = self._unflatten(idx)
                col = act.column(digits[pos])
                for new, c2 in enumerate(col):
                    if not c2.is_zero:
                        d2 = list(digits)
                        d2[pos] = new
                        out[self._flatten(d2)] = \
                            out[self._flatten(d2)] + c * c2
            cols.append(self.project(out))
        return Matrix(k, list(zip(*cols)))


def _std(field, n, i):
    v = vec_zero(field, n)
    v[i] = field.one()
    return v


class PathBimodule:
    """Direct sum of the word spaces over all paths i -> j up to a bound."""

    __slots__ = ("species", "start", "end", "paths", "spaces", "offsets", "dim")

    def __init__(self, species, i, j, max_len=None):
        q = species.quiver()
        if max_len is None and not q.is_acyclic():
            raise errors.CyclicWithoutBound(
                "path bimodule over a cyclic quiver needs a length bound")
        self.species = species
        self.start = i
        self.end = j
        self.paths = q.paths(i, j, 1, max_len)
        self.spaces = [species.word_space(p) for p in self.paths]
        self.offsets = {}
        off = 0
        for p, w in zip(self.paths, self.spaces):
            self.offsets[p] = off
            off += w.dim
        self.dim = off

    def space(self, path):
        return self.spaces[self.paths.index(path)]


class Species:
    """Vertex towers plus at most one bimodule per ordered vertex pair."""

    __slots__ = ("ground", "vertex_order", "_vertices", "edges", "_cache")

    def __init__(self, ground, vertices, edges):
        self.ground = ground
        self.vertex_order = tuple(v.vid for v in vertices)
        self._vertices = {v.vid: v for v in vertices}
        self.edges = dict(edges)
        for (i, j), m in self.edges.items():
            if i not in self._vertices or j not in self._vertices:
                raise errors.AmbientMismatch(f"edge ({i},{j}) endpoint missing")
            if m.dim == 0:
                raise ValueError("zero bimodules must be omitted")
        self._cache = {}

    def vertex(self, vid):
        return self._vertices[vid]

    def edge(self, i, j):
        return self.edges[(i, j)]

    def quiver(self):
        q = self._cache.get("quiver")
        if q is None:
            q = Quiver(self.vertex_order, sorted(self.edges.keys()))
            self._cache["quiver"] = q
        return q

    def word_space(self, path):
        ws = self._cache.setdefault("words", {})
        w = ws.get(path)
        if w is None:
            w = WordSpace(self, path)
            ws[path] = w
        return w

    def path_bimodule(self, i, j, max_len=None):
        key = ("pbm", i, j, max_len)
        pb = self._cache.get(key)
        if pb is None:
            pb = PathBimodule(self, i, j, max_len)
            self._cache[key] = pb
        return pb

    def replace_edge(self, i, j, bimodule):
        """New species with one edge replaced (None drops the edge)."""
        edges = dict(self.edges)
        if bimodule is None:
            edges.pop((i, j), None)
        else:
            edges[(i, j)] = bimodule
        return Species(self.ground, [self._vertices[v] for v in
                                     self.vertex_order], edges)


class SpeciesReport:
    __slots__ = ("ok", "problems")

    def __init__(self, ok, problems):
        self.ok = ok
        self.problems = problems


def validate_species(s, strict_duality=False):
    problems = []
    for (i, j), m in sorted(s.edges.items()):
        try:
            m.validate()
        except errors.ActionAxiomFails as exc:
            problems.append(("action", (i, j), str(exc)))
            continue
        if strict_duality and not _duality_holds(s, m):
            problems.append(("duality", (i, j), "Hom-duality fails"))
    return SpeciesReport(not problems, problems)


def _hom_space(k, n, target_dim, conditions):
    """Basis of {F (target_dim x n matrices)} satisfying the linear
    intertwining conditions; conditions yield (A, B) meaning F·A = B·F."""
    nunk = target_dim * n
    rows = []
    for (A, B) in conditions:
        for r in range(target_dim):
            for c in range(n):
                row = [k.zero()] * nunk
                # (F A)[r][c] = sum_m F[r][m] A[m][c]
                for m in range(n):
                    coeff = A.rows[m][c]
                    if not coeff.is_zero:
                        row[r * n + m] = row[r * n + m] + coeff
                # (B F)[r][c] = sum_m B[r][m] F[m][c]
                for m in range(target_dim):
                    coeff = B.rows[r][m]
                    if not coeff.is_zero:
                        row[m * n + c] = row[m * n + c] - coeff
                if any(not x.is_zero for x in row):
                    rows.append(row)
    if not rows:
        return [Matrix(k, [[k.one() if r * n + c == t else k.zero()
                            for c in range(n)] for r in range(target_dim)])
                for t in range(nunk)]
    kern = rref_solve(Matrix(k, rows)).kernel
    out = []
    for v in kern.rows:
        out.append(Matrix(k, [[v[r * n + c] for c in range(n)]
                              for r in range(target_dim)]))
    return out


def _tower_mult_matrices(D, k, side):
    """Matrices of left/right multiplication by the tower basis on D itself,
    in tower coordinates."""
    basis = tower_basis(D, k)
    mats = []
    for b in basis:
        cols = []
        for c in basis:
            prod = b * c if side == "left" else c * b
            cols.append(tower_coords(prod, k))
        mats.append(Matrix(k, list(zip(*cols))))
    return mats


def _duality_holds(s, m):
    """Hom_{D_i}(M, D_i) ≅ Hom_{D_j}(M, D_j) as D_i-D_j-bimodules, decided
    by a symbolic generic-determinant test on the intertwiner space."""
    k = s.ground
    Di = m.source.tower
    Dj = m.target.tower
    di, dj = dim_over(Di, k), dim_over(Dj, k)
    right_on_Di = _tower_mult_matrices(Di, k, "right")
    left_on_Dj = _tower_mult_matrices(Dj, k, "left")
    # H_R = {φ: M → D_i : φ(m·α) = φ(m)·α}
    HR = _hom_space(k, m.dim, di,
                    [(m.right_action[t], right_on_Di[t]) for t in range(di)])
    # H_L = {ψ: M → D_j : ψ(d·m) = d·ψ(m)}
    HL = _hom_space(k, m.dim, dj,
                    [(m.left_action[t], left_on_Dj[t]) for t in range(dj)])
    if len(HR) != len(HL):
        return False
    if not HR:
        return True
    # bimodule actions on H_R: (d_i·φ)(x) = d_i·φ(x), (φ·d_j)(x) = φ(d_j·x)
    # and on H_L: (d_i·ψ)(x) = ψ(x·d_i), (ψ·d_j)(x) = ψ(x)·d_j
    left_on_Di = _tower_mult_matrices(Di, k, "left")
    right_on_Dj = _tower_mult_matrices(Dj, k, "right")

    def action_on_hom(homs, pre, post):
        """Matrix of φ -> post∘φ∘pre in the hom basis coordinates."""
        cols = []
        flat = [sum([list(r) for r in h.rows], []) for h in homs]
        basis_mat = Matrix(k, list(zip(*flat)))
        for h in homs:
            img = post * h * pre
            iflat = sum([list(r) for r in img.rows], [])
            res = rref_solve(basis_mat, Matrix(k, [[c] for c in iflat]))
            assert res.consistent, "hom space not action-closed"
            cols.append(res.particular.column(0))
        return Matrix(k, list(zip(*cols)))

    conds = []
    for t in range(di):
        AR = action_on_hom(HR, Matrix.identity(k, m.dim), left_on_Di[t])
        AL = action_on_hom(HL, m.right_action[t], Matrix.identity(k, dj))
        conds.append((AR, AL))
    for t in range(dj):
        AR = action_on_hom(HR, m.left_action[t], Matrix.identity(k, di))
        AL = action_on_hom(HL, Matrix.identity(k, m.dim), right_on_Dj[t])
        conds.append((AR, AL))
    inter = _hom_space(k, len(HR), len(HL), conds)
    if not inter:
        return False
    return _generic_det_nonzero(k, inter)


def _generic_det_nonzero(k, mats):
    """det(sum_c λ_c Θ_c) as a multivariate polynomial over k; True iff it
    is not identically zero.  One fresh indeterminate per basis matrix."""
    n = mats[0].nrows
    if n != mats[0].ncols:
        return False

    def poly_add(p, q):
        out = dict(p)
        for e, c in q.items():
            nc = out.get(e, k.zero()) + c
            if nc.is_zero:
                out.pop(e, None)
            else:
                out[e] = nc
        return out

    def poly_mul(p, q):
        out = {}
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                nc = out.get(e, k.zero()) + c1 * c2
                if nc.is_zero:
                    out.pop(e, None)
                else:
                    out[e] = nc
        return out

    nv = len(mats)
    entries = [[{} for _ in range(n)] for _ in range(n)]
    for c, mat in enumerate(mats):
        evar = tuple(1 if t == c else 0 for t in range(nv))
        for r in range(n):
            for s in range(n):
                x = mat.rows[r][s]
                if not x.is_zero:
                    entries[r][s] = poly_add(entries[r][s], {evar: x})

    def det(rows, cols):
        if len(rows) == 1:
            return entries[rows[0]][cols[0]]
        out = {}
        sign = 1
        for idx, c in enumerate(cols):
            minor = det(rows[1:], cols[:idx] + cols[idx + 1:])
            term = poly_mul(entries[rows[0]][c], minor)
            if sign < 0:
                term = {e: -v for e, v in term.items()}
            out = poly_add(out, term)
            sign = -sign
        return out

    return bool(det(list(range(n)), list(range(n))))


# ---------------------------------------------------------------------------
# the species (and enlarged species) of an algebra

class SpeciesOfAlgebra:
    """species_of output plus the data tying it back to the algebra."""

    __slots__ = ("species", "algebra", "rad_result", "idems", "edge_reps",
                 "mdata", "vertex_of_block")

    def __init__(self, species, algebra, rad_result, idems, edge_reps, mdata,
                 vertex_of_block):
        self.species = species
        self.algebra = algebra
        self.rad_result = rad_result
        self.idems = idems
        self.edge_reps = edge_reps  # (i,j) -> list of Λ-vectors (coset reps)
        self.mdata = mdata
        self.vertex_of_block = vertex_of_block


def block_element_lift(rad_result, block_idx, d):
    """A coset representative in Λ of the block element φ^{-1}(d)."""
    b = rad_result.blocks[block_idx]
    coeffs = b.from_tower(d)
    q = rad_result.qdata.quotient
    qv = vec_zero(q.field, q.dim)
    for c, qb in zip(coeffs, b.qbasis):
        for t in range(q.dim):
            qv[t] = qv[t] + c * qb[t]
    return rad_result.qdata.lift(qv)


def species_of(a, rad_result, idems):
    """The species of Λ: vertices are the certified towers, the edge (i→j)
    is e_j (r/r^2) e_i with the canonical transported actions."""
    if rad_result.blocks is None:
        raise errors.NotBasic("species extraction needs certified blocks")
    k = a.field
    R, R2, inner, comp, projM, liftM = radical_quotient_data(a, rad_result)
    nM = len(comp)
    rmat = Matrix(k, list(zip(*R.rows))) if R.dim else None

    def r_coords(vec):
        res = rref_solve(rmat, Matrix(k, [[c] for c in vec]))
        assert res.consistent
        return res.particular.column(0)

    def m_coords(vec):
        # Λ-vector inside r -> coordinates of its class in M
        return projM(r_coords(vec))

    vertices = []
    for bidx, b in enumerate(rad_result.blocks):
        vertices.append(VertexRing(str(bidx), b.tower, k))
    edges = {}
    edge_reps = {}
    total = 0
    for jdx in range(len(idems)):
        for idx in range(len(idems)):
            vecs = []
            for t in range(nM):
                rep = R_lin_comb(R, liftM(_std(k, nM, t)))
                sliced = a.multiply(a.multiply(idems[jdx], rep), idems[idx])
                vecs.append(m_coords(sliced))
            slice_space = Subspace.from_vectors(k, nM, vecs)
            if slice_space.dim == 0:
                continue
            total += slice_space.dim
            # coset representatives of the slice basis, sliced again so they
            # sit in e_j r e_i on the nose
            reps = []
            for v in slice_space.rows:
                rep = R_lin_comb(R, liftM(list(v)))
                reps.append(a.multiply(a.multiply(idems[jdx], rep),
                                       idems[idx]))
            slice_mat = Matrix(k, list(zip(*slice_space.rows)))

            def slice_coords(vec, slice_mat=slice_mat):
                res = rref_solve(slice_mat, Matrix(k, [[c] for c in vec]))
                if not res.consistent:
                    raise errors.CertificateRejected(
                        "tower action leaves its Peirce slice")
                return res.particular.column(0)

            n = slice_space.dim
            left_acts, right_acts = [], []
            for tb in tower_basis(rad_result.blocks[jdx].tower, k):
                lam = block_element_lift(rad_result, jdx, tb)
                cols = [slice_coords(m_coords(a.multiply(lam, rep)))
                        for rep in reps]
                left_acts.append(Matrix(k, list(zip(*cols))))
            for tb in tower_basis(rad_result.blocks[idx].tower, k):
                lam = block_element_lift(rad_result, idx, tb)
                cols = [slice_coords(m_coords(a.multiply(rep, lam)))
                        for rep in reps]
                right_acts.append(Matrix(k, list(zip(*cols))))
            names = [f"m{t}" for t in range(n)]
            bm = Bimodule(vertices[idx], vertices[jdx], names,
                          left_acts, right_acts)
            bm.validate()
            edges[(str(idx), str(jdx))] = bm
            edge_reps[(str(idx), str(jdx))] = reps
    if total != nM:
        raise errors.CertificateRejected(
            f"Peirce slices of r/r^2 cover {total} of {nM} dimensions")
    sp = Species(k, vertices, edges)
    mdata = (R, R2, inner, comp, projM, liftM)
    return SpeciesOfAlgebra(sp, a, rad_result, idems, edge_reps, mdata,
                            {str(i): i for i in range(len(idems))})


class EnlargedSpecies:
    __slots__ = ("species", "base", "epis")

    def __init__(self, species, base, epis):
        self.species = species
        self.base = base   # SpeciesOfAlgebra
        self.epis = epis   # (i,j) -> Matrix: enlarged edge -> base edge


def enlarged_species(species_of_result):
    """Edges D_j ⊗_k (_jM_i) ⊗_k D_i with outer actions on the outer factors,
    plus the bimodule epimorphism g onto r/r^2 edge by edge."""
    soa = species_of_result
    s = soa.species
    k = s.ground
    a = soa.algebra
    rad_result = soa.rad_result
    vertices = [s.vertex(v) for v in s.vertex_order]
    edges = {}
    epis = {}
    for (i, j), m in s.edges.items():
        Dj = s.vertex(j).tower
        Di = s.vertex(i).tower
        bj = tower_basis(Dj, k)
        bi = tower_basis(Di, k)
        dj, di, n = len(bj), len(bi), m.dim
        dim = dj * n * di

        def tidx(bq, mq, aq, n=n, di=di):
            return (bq * n + mq) * di + aq

        left_acts = []
        for tb in bj:
            # action on the leftmost factor: tb·b_q expanded over bj
            mult = [tower_coords(tb * b, k) for b in bj]
            rows = [[k.zero()] * dim for _ in range(dim)]
            for bq in range(dj):
                for new in range(dj):
                    c = mult[bq][new]
                    if c.is_zero:
                        continue
                    for mq in range(n):
                        for aq in range(di):
                            rows[tidx(new, mq, aq)][tidx(bq, mq, aq)] = \
                                rows[tidx(new, mq, aq)][tidx(bq, mq, aq)] + c
            left_acts.append(Matrix(k, rows))
        right_acts = []
        for tb in bi:
            mult = [tower_coords(b * tb, k) for b in bi]
            rows = [[k.zero()] * dim for _ in range(dim)]
            for aq in range(di):
                for new in range(di):
                    c = mult[aq][new]
                    if c.is_zero:
                        continue
                    for bq in range(dj):
                        for mq in range(n):
                            rows[tidx(bq, mq, new)][tidx(bq, mq, aq)] = \
                                rows[tidx(bq, mq, new)][tidx(bq, mq, aq)] + c
            right_acts.append(Matrix(k, rows))
        names = [f"{bq}x{mq}x{aq}" for bq in range(dj) for mq in range(n)
                 for aq in range(di)]
        bm = Bimodule(s.vertex(i), s.vertex(j), names, left_acts, right_acts)
        bm.validate()
        edges[(i, j)] = bm
        # epimorphism g: β ⊗ m ⊗ α -> class(λ_β · m̂ · λ_α)
        jdx = soa.vertex_of_block[j]
        idx = soa.vertex_of_block[i]
        (R, R2, inner, comp, projM, liftM) = soa.mdata
        rmat = Matrix(k, list(zip(*R.rows)))
        base_slice = Subspace.from_vectors(
            k, len(comp),
            [_m_coords_of(a, rmat, projM, rep) for rep in soa.edge_reps[(i, j)]])
        slice_mat = Matrix(k, list(zip(*base_slice.rows)))
        cols = []
        for bq in range(dj):
            lam_b = block_element_lift(rad_result, jdx, bj[bq])
            for mq in range(n):
                rep = soa.edge_reps[(i, j)][mq]
                for aq in range(di):
                    lam_a = block_element_lift(rad_result, idx, bi[aq])
                    prod = a.multiply(a.multiply(lam_b, rep), lam_a)
                    mc = _m_coords_of(a, rmat, projM, prod)
                    res = rref_solve(slice_mat, Matrix(k, [[c] for c in mc]))
                    assert res.consistent
                    cols.append(res.particular.column(0))
        g = Matrix(k, list(zip(*cols)))
        if rref_solve(g).rank != n:
            raise errors.CertificateRejected(
                f"enlarged-edge epimorphism not surjective on ({i},{j})")
        epis[(i, j)] = g
    return EnlargedSpecies(Species(k, vertices, edges), soa, epis)


def _m_coords_of(a, rmat, projM, vec):
    res = rref_solve(rmat, Matrix(a.field, [[c] for c in vec]))
    assert res.consistent
    return projM(res.particular.column(0))


# ---------------------------------------------------------------------------
# relations

class Relation:
    """Sum of tensor-path elements with fixed endpoints, stored as one
    coefficient vector per path (in that path's word basis)."""

    __slots__ = ("species", "start", "end", "components")

    def __init__(self, species, start, end, components):
        comps = {}
        for path, coords in components.items():
            path = tuple(path)
            if path[0] != start or path[-1] != end:
                raise errors.NotHomogeneousEndpoints(
                    f"component path {path} does not run {start} -> {end}")
            w = species.word_space(path)
            coords = list(coords)
            if len(coords) != w.dim:
                raise errors.DimensionMismatch(
                    f"component on {path}: {len(coords)} coords for a "
                    f"{w.dim}-dimensional word space")
            if not vec_is_zero(coords):
                comps[path] = tuple(coords)
        if not comps:
            raise ValueError("relation must have a nonzero component")
        self.species = species
        self.start = start
        self.end = end
        self.components = comps

    def degree_one_part(self):
        return self.components.get((self.start, self.end))

    def higher_parts(self):
        return {p: c for p, c in self.components.items() if len(p) > 2}

    def max_degree(self):
        return max(len(p) - 1 for p in self.components)

    @staticmethod
    def split_homogeneous(species, mixed):
        """Split {path: coords} with mixed endpoints into relations; the
        per-edge degree-1 summands merge automatically in this encoding."""
        groups = {}
        for path, coords in mixed.items():
            if vec_is_zero(coords):
                continue
            key = (path[0], path[-1])
            groups.setdefault(key, {})[tuple(path)] = coords
        return [Relation(species, a, b, comps)
                for (a, b), comps in sorted(groups.items())]


def sub_bimodule_span(bimodule, vectors):
    """Smallest subspace containing the vectors and closed under both
    actions."""
    k = bimodule.ground
    span = SpanBuilder(k, bimodule.dim)
    work = [list(v) for v in vectors if span.add(v)]
    while work:
        v = work.pop()
        for mat in list(bimodule.left_action) + list(bimodule.right_action):
            w = mat.apply(v)
            if span.add(w):
                work.append(w)
    return span.subspace()


def relation_toolkit(s, data, action):
    """decompose / is_canonical / is_strong_canonical / validate_canonical_set."""
    if action == "decompose":
        return Relation.split_homogeneous(s, data)
    if action == "is_canonical":
        g1 = data.degree_one_part()
        return g1 is not None and (data.start, data.end) in s.edges
    if action == "is_strong_canonical":
        return (relation_toolkit(s, data, "is_canonical")
                and bool(data.higher_parts()))
    if action == "validate_canonical_set":
        problems = []
        for r in data:
            if not relation_toolkit(s, r, "is_canonical"):
                problems.append(("not canonical", (r.start, r.end)))
        by_edge = {}
        for r in data:
            if r.degree_one_part() is not None:
                by_edge.setdefault((r.start, r.end), []).append(r)
        for edge, rels in by_edge.items():
            if edge not in s.edges:
                continue
            bm = s.edges[edge]
            spans = [sub_bimodule_span(bm, [r.degree_one_part()])
                     for r in rels]
            for x in range(len(spans)):
                for y in range(x + 1, len(spans)):
                    if spans[x].intersect(spans[y]).dim:
                        problems.append(("g1 spans intersect", edge, (x, y)))
        return SpeciesReport(not problems, problems)
    raise ValueError(f"unknown relation action {action!r}")


def canonical_quiver(q, arrow):
    """The subquiver spanned by the arrow i→j and every path i ⇝ j of
    length >= 2; equals the bare arrow iff no such path exists."""
    if arrow not in q.arrows:
        raise errors.ArrowMissing(f"{arrow} is not an arrow")
    i, j = arrow
    vertices = {i, j}
    arrows = {arrow}
    for p in q.paths(i, j, 2):
        vertices.update(p)
        for l in range(len(p) - 1):
            arrows.add((p[l], p[l + 1]))
    order = [v for v in q.vertices if v in vertices]
    return Quiver(order, sorted(arrows))


class ReductionWitness:
    __slots__ = ("steps", "dim_before", "dim_after")

    def __init__(self, steps, dim_before, dim_after):
        self.steps = steps
        self.dim_before = dim_before
        self.dim_after = dim_after

    @property
    def preserved(self):
        return self.dim_before == self.dim_after


def reduce_to_strong_canonical(s, rho):
    """Eliminate non-strong canonical relations by quotienting their edge
    bimodule by <g1>; returns (S_m, surviving strong relations, witness).

    Relations with a trivial canonical quiver go first (the paper's case);
    remaining pure degree-1 relations are eliminated the same way, each step
    re-checked by the dimension witness (see the decisions ledger)."""
    report = relation_toolkit(s, rho, "validate_canonical_set")
    if not report.ok:
        raise errors.NotCanonicalSet(str(report.problems))
    from .tensor import build_tensor_algebra, quotient_by_relations
    dim_before = _quotient_dim(s, rho)
    steps = []
    cur_s, cur_rho = s, list(rho)
    while True:
        non_strong = [r for r in cur_rho
                      if not relation_toolkit(cur_s, r, "is_strong_canonical")]
        if not non_strong:
            break
        q = cur_s.quiver()
        pick = None
        for r in non_strong:
            cq = canonical_quiver(q, (r.start, r.end))
            if len(cq.arrows) == 1:
                pick = r
                break
        if pick is None:
            pick = non_strong[0]
        cur_s, cur_rho = _eliminate(cur_s, cur_rho, pick)
        steps.append((pick.start, pick.end))
        check = relation_toolkit(cur_s, cur_rho, "validate_canonical_set")
        if not check.ok:
            raise errors.NotCanonicalSet(
                f"elimination broke the canonical set: {check.problems}")
    dim_after = _quotient_dim(cur_s, cur_rho)
    witness = ReductionWitness(steps, dim_before, dim_after)
    if not witness.preserved:
        raise errors.NotCanonicalSet(
            f"reduction changed the quotient dimension "
            f"{dim_before} -> {dim_after}")
    return cur_s, cur_rho, witness


def _quotient_dim(s, rho):
    from .tensor import build_tensor_algebra, quotient_by_relations
    t = build_tensor_algebra(s, "full")
    return quotient_by_relations(t, rho).algebra.dim


def _eliminate(s, rho, sigma):
    """Quotient the edge bimodule of a pure degree-1 canonical relation by
    the sub-bimodule its g1 generates; push the other relations through."""
    i, j = sigma.start, sigma.end
    bm = s.edges[(i, j)]
    k = s.ground
    G = sub_bimodule_span(bm, [sigma.degree_one_part()])
    comp, project, lift = G.quotient_coords()
    n_new = len(comp)
    if n_new == 0:
        new_bm = None
    else:
        left_acts = [ _transported(mat, project, lift, k, n_new)
                      for mat in bm.left_action]
        right_acts = [_transported(mat, project, lift, k, n_new)
                      for mat in bm.right_action]
        names = [f"n{t}" for t in range(n_new)]
        new_bm = Bimodule(bm.source, bm.target, names, left_acts, right_acts)
        new_bm.validate()
    new_s = s.replace_edge(i, j, new_bm)
    new_rho = []
    for r in rho:
        if r is sigma:
            continue
        comps = {}
        for path, coords in r.components.items():
            if (i, j) not in zip(path, path[1:]):
                comps[path] = coords
                continue
            if new_bm is None:
                continue  # the whole path space dies with the edge
            comps[path] = _push_word_coords(s, new_s, path, coords, (i, j),
                                            project)
        comps = {p: c for p, c in comps.items() if not vec_is_zero(c)}
        if comps:
            new_rho.append(Relation(new_s, r.start, r.end, comps))
    return new_s, new_rho


def _transported(mat, project, lift, k, n_new):
    cols = [project(mat.apply(lift(_std(k, n_new, t)))) for t in range(n_new)]
    return Matrix(k, list(zip(*cols)))


def _push_word_coords(s, new_s, path, coords, edge, project):
    """Push word coordinates through an edge quotient on one path."""
    w_old = s.word_space(path)
    w_new = new_s.word_space(path)
    k = s.ground
    pos = list(zip(path, path[1:])).index(edge)
    out = vec_zero(k, w_new.raw_dim)
    raw = w_old.lift(list(coords))
    for idx, c in enumerate(raw):
        if c.is_zero:
            continue
        digits = w_old._unflatten(idx)
        unit = _std(k, w_old.raw_dims[pos], digits[pos])
        newcoords = project(unit)
        for t, c2 in enumerate(newcoords):
            if c2.is_zero:
                continue
            d2 = list(digits)
            d2[pos] = t
            out[w_new._flatten(d2)] = out[w_new._flatten(d2)] + c * c2
    return w_new.project(out)
