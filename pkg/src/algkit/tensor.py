"""Truncated tensor algebras of species, quotients by relation ideals, the
representation/module equivalence, projectives, and the hereditary test."""

from . import errors
from .algebra import (AlgebraPresentation, BlockIso, Certificates, IdealSubspace,
                      QuotientData, RadicalResult, ideal_closure, radical,
                      validate_algebra)
from .fields import dim_over, tower_basis, tower_coords
from .linalg import (Matrix, SpanBuilder, Subspace, rref_solve, vec_is_zero,
                     vec_zero)
from .species import Relation, _std, sub_bimodule_span


class TensorBasisWord:
    """Degree-0 words are vertex-tower basis elements; positive degrees are
    balanced tensor words along a path."""

    __slots__ = ("kind", "vertex", "tower_index", "path", "word_index",
                 "degree", "name")

    def __init__(self, kind, vertex=None, tower_index=None, path=None,
                 word_index=None, name=""):
        self.kind = kind
        self.vertex = vertex
        self.tower_index = tower_index
        self.path = path
        self.word_index = word_index
        self.degree = 0 if kind == "vertex" else len(path) - 1
        self.name = name

    @property
    def start(self):
        return self.vertex if self.kind == "vertex" else self.path[0]

    @property
    def end(self):
        return self.vertex if self.kind == "vertex" else self.path[-1]


class TruncatedTensorAlgebra:
    """T(S) up to a degree bound ('full' needs an acyclic quiver), with its
    word grading and the arrow ideal J."""

    __slots__ = ("species", "bound", "full", "words", "algebra",
                 "vertex_offset", "path_offset", "_cache")

    def __init__(self, species, bound):
        q = species.quiver()
        if bound == "full":
            if not q.is_acyclic():
                raise errors.CyclicWithoutBound(
                    "full tensor algebra of a cyclic species is infinite")
            self.full = True
            bound = q.longest_path()
        else:
            self.full = q.is_acyclic() and bound >= q.longest_path()
        self.species = species
        self.bound = bound
        k = species.ground
        words = []
        self.vertex_offset = {}
        for vid in species.vertex_order:
            D = species.vertex(vid).tower
            self.vertex_offset[vid] = len(words)
            for t, b in enumerate(tower_basis(D, k)):
                words.append(TensorBasisWord("vertex", vertex=vid,
                                             tower_index=t,
                                             name=f"e[{vid}]#{t}"))
        self.path_offset = {}
        for p in q.all_paths(bound):
            if len(p) - 1 > bound:
                continue
            w = species.word_space(p)
            self.path_offset[p] = len(words)
            for t in range(w.dim):
                words.append(TensorBasisWord("path", path=p, word_index=t,
                                             name=f"w[{'>'.join(p)}]#{t}"))
        self.words = words
        self._cache = {}
        self.algebra = self._build_presentation()

    # -- construction -------------------------------------------------------

    def _build_presentation(self):
        s = self.species
        k = s.ground
        d = len(self.words)
        zero = vec_zero(k, d)
        towers = {vid: tower_basis(s.vertex(vid).tower, k)
                  for vid in s.vertex_order}
        table = [[tuple(zero) for _ in range(d)] for _ in range(d)]
        for i, wi in enumerate(self.words):
            for j, wj in enumerate(self.words):
                vec = self._word_product(wi, wj, towers)
                if vec is not None:
                    table[i][j] = tuple(vec)
        unit = list(zero)
        for vid in s.vertex_order:
            unit[self.vertex_offset[vid]] = k.one()
        names = [w.name for w in self.words]
        return AlgebraPresentation(k, names, unit, table)

    def _word_product(self, x, y, towers):
        """x·y: concatenation with x's factors on the left (later edges)."""
        s = self.species
        k = s.ground
        d = len(self.words)
        if x.kind == "vertex" and y.kind == "vertex":
            if x.vertex != y.vertex:
                return None
            bas = towers[x.vertex]
            prod = bas[x.tower_index] * bas[y.tower_index]
            out = vec_zero(k, d)
            off = self.vertex_offset[x.vertex]
            for t, c in enumerate(tower_coords(prod, k)):
                if not c.is_zero:
                    out[off + t] = c
            return out
        if x.kind == "vertex":
            if y.end != x.vertex:
                return None
            w = s.word_space(y.path)
            col = w.left_action_matrix(x.tower_index).column(y.word_index)
            return self._place(y.path, col)
        if y.kind == "vertex":
            if x.start != y.vertex:
                return None
            w = s.word_space(x.path)
            col = w.right_action_matrix(y.tower_index).column(x.word_index)
            return self._place(x.path, col)
        # path · path
        if y.end != x.start:
            return None
        newpath = y.path + x.path[1:]
        if len(newpath) - 1 > self.bound:
            return self._zero_if_truncated()
        wx = s.word_space(x.path)
        wy = s.word_space(y.path)
        wxy = s.word_space(newpath)
        # raw unit indices; combined flat index has x's digits on top
        raw_x = wx.comp[x.word_index]
        raw_y = wy.comp[y.word_index]
        combined = raw_x * wy.raw_dim + raw_y
        coords = wxy.project(_std(k, wxy.raw_dim, combined))
        return self._place(newpath, coords)

    def _zero_if_truncated(self):
        return vec_zero(self.species.ground, len(self.words))

    def _place(self, path, coords):
        k = self.species.ground
        out = vec_zero(k, len(self.words))
        off = self.path_offset[path]
        for t, c in enumerate(coords):
            if not c.is_zero:
                out[off + t] = c
        return out

    # -- structure ----------------------------------------------------------

    def degree_of(self, index):
        return self.words[index].degree

    def j_power(self, n):
        """J^n as a subspace: the span of all words of degree >= n."""
        k = self.species.ground
        d = len(self.words)
        vecs = [_std(k, d, i) for i, w in enumerate(self.words)
                if w.degree >= n]
        return Subspace.from_vectors(k, d, vecs)

    def vertex_unit(self, vid):
        return _std(self.species.ground, len(self.words),
                    self.vertex_offset[vid])

    def relation_vector(self, rel):
        """Embed a Relation into tensor-algebra coordinates."""
        k = self.species.ground
        out = vec_zero(k, len(self.words))
        for path, coords in rel.components.items():
            if len(path) - 1 > self.bound:
                raise errors.RelationOutOfBound(
                    f"component of degree {len(path) - 1} above bound "
                    f"{self.bound}")
            off = self.path_offset[path]
            for t, c in enumerate(coords):
                out[off + t] = out[off + t] + c
        return out

    def relation_from_vector(self, vec):
        """Split a J-supported vector into endpoint-homogeneous relations."""
        comps = {}
        for path, off in self.path_offset.items():
            w = self.species.word_space(path)
            coords = vec[off:off + w.dim]
            if not vec_is_zero(coords):
                comps[path] = coords
        for i, w in enumerate(self.words):
            if w.degree == 0 and not vec[i].is_zero:
                raise errors.NotHomogeneousEndpoints(
                    "vector has a degree-0 component")
        return Relation.split_homogeneous(self.species, comps)

    def certificates(self):
        """Auto-certificates: radical = image of J, blocks = the vertex
        towers included as the degree-0 words."""
        k = self.species.ground
        d = len(self.words)
        rad_vecs = [_std(k, d, i) for i, w in enumerate(self.words)
                    if w.degree >= 1]
        blocks = []
        eps_images = []
        for vid in self.species.vertex_order:
            D = self.species.vertex(vid).tower
            bas = tower_basis(D, k)
            off = self.vertex_offset[vid]
            vecs = [_std(k, d, off + t) for t in range(len(bas))]
            blocks.append(BlockIso(D, vecs, bas))
            eps_images.append(vecs)
        return Certificates(radical_vectors=rad_vecs, blocks=blocks,
                            epsilon_images=eps_images)

    def idempotents(self):
        return [self.vertex_unit(vid) for vid in self.species.vertex_order]


def build_tensor_algebra(species, bound):
    """T(S) truncated at the bound (or 'full' for acyclic species)."""
    return TruncatedTensorAlgebra(species, bound)


class QuotientByRelations:
    __slots__ = ("tensor", "relations", "ideal", "qdata", "algebra", "sound",
                 "inside_j2", "least_jn", "admissible")

    def __init__(self, tensor, relations, ideal, qdata, sound, inside_j2,
                 least_jn):
        self.tensor = tensor
        self.relations = relations
        self.ideal = ideal
        self.qdata = qdata
        self.algebra = qdata.quotient
        self.sound = sound
        self.inside_j2 = inside_j2
        self.least_jn = least_jn
        self.admissible = inside_j2 and least_jn is not None


def quotient_by_relations(t, relations):
    """T(S)/<rho> with soundness and admissibility classification."""
    vectors = [t.relation_vector(r) for r in relations]
    ideal = ideal_closure(t.algebra, vectors)
    qdata = QuotientData(t.algebra, ideal)
    top = t.j_power(t.bound) if not t.full else None
    sound = t.full or all(ideal.space.contains(v) for v in top.rows)
    inside_j2 = all(t.words[i].degree >= 2
                    for row in ideal.space.rows
                    for i, c in enumerate(row) if not c.is_zero)
    least_jn = None
    for n in range(2, t.bound + 2):
        jn = t.j_power(n)
        if all(ideal.space.contains(v) for v in jn.rows):
            least_jn = n
            break
    if least_jn is not None and least_jn == t.bound + 1 and not sound:
        # J^(bound+1) vanishes only by truncation; inconclusive
        least_jn = None
    return QuotientByRelations(t, list(relations), ideal, qdata, sound,
                               inside_j2, least_jn)


# ---------------------------------------------------------------------------
# modules and representations

class ModuleOverAlgebra:
    """Left module: one action matrix per algebra basis element, verified to
    be an algebra homomorphism into endomorphisms."""

    __slots__ = ("algebra", "dim", "actions")

    def __init__(self, algebra, actions, verify=True):
        self.algebra = algebra
        self.actions = list(actions)
        self.dim = self.actions[0].nrows if self.actions else 0
        if verify:
            self.verify()

    def act(self, avec, v):
        out = vec_zero(self.algebra.field, self.dim)
        for l, c in enumerate(avec):
            if c.is_zero:
                continue
            col = self.actions[l].apply(v)
            for r in range(self.dim):
                if not col[r].is_zero:
                    out[r] = out[r] + c * col[r]
        return out

    def act_matrix(self, avec):
        k = self.algebra.field
        rows = [[k.zero()] * self.dim for _ in range(self.dim)]
        for l, c in enumerate(avec):
            if c.is_zero:
                continue
            for r in range(self.dim):
                arow = self.actions[l].rows[r]
                for s in range(self.dim):
                    if not arow[s].is_zero:
                        rows[r][s] = rows[r][s] + c * arow[s]
        return Matrix(k, rows)

    def verify(self):
        a = self.algebra
        if self.dim == 0:
            return self
        ident = Matrix.identity(a.field, self.dim)
        if self.act_matrix(a.unit) != ident:
            raise errors.NotIsomorphic("unit does not act as identity")
        for i in range(a.dim):
            Ai = self.actions[i]
            for j in range(a.dim):
                lhs = Ai * self.actions[j]
                rhs = self.act_matrix(a.table[i][j])
                if lhs != rhs:
                    raise errors.NotIsomorphic(
                        f"module action not multiplicative at ({i},{j})")
        return self


class BalancedTensor:
    """M ⊗_{D_i} V_i over k: the raw tensor modulo the balancing span
    (m·d ⊗ v - m ⊗ d·v).  Raw index = m_idx * dim(V_i) + v_idx."""

    __slots__ = ("ground", "m_dim", "v_dim", "raw_dim", "comp", "project",
                 "lift", "dim")

    def __init__(self, ground, bimodule, v_dim, v_actions):
        self.ground = ground
        self.m_dim = bimodule.dim
        self.v_dim = v_dim
        self.raw_dim = self.m_dim * v_dim
        rels = []
        for bidx in range(1, len(bimodule.right_action)):
            Rm = bimodule.right_action[bidx]
            Av = v_actions[bidx]
            for mi in range(self.m_dim):
                for vi in range(v_dim):
                    vec = vec_zero(ground, self.raw_dim)
                    for mnew, c in enumerate(Rm.column(mi)):
                        if not c.is_zero:
                            vec[mnew * v_dim + vi] = vec[mnew * v_dim + vi] + c
                    for vnew, c in enumerate(Av.column(vi)):
                        if not c.is_zero:
                            vec[mi * v_dim + vnew] = vec[mi * v_dim + vnew] - c
                    if not vec_is_zero(vec):
                        rels.append(vec)
        space = Subspace.from_vectors(ground, self.raw_dim, rels)
        self.comp, self.project, self.lift = space.quotient_coords()
        self.dim = len(self.comp)


class RepresentationOfSpecies:
    """Per-vertex D_i-modules plus left-D_j-linear edge maps on the balanced
    tensor bases."""

    __slots__ = ("species", "dims", "vertex_actions", "edge_maps", "balanced")

    def __init__(self, species, dims, vertex_actions, edge_maps, verify=True):
        self.species = species
        self.dims = dict(dims)
        self.vertex_actions = dict(vertex_actions)
        self.edge_maps = dict(edge_maps)
        self.balanced = {}
        k = species.ground
        for (i, j), m in species.edges.items():
            self.balanced[(i, j)] = BalancedTensor(
                k, m, self.dims[i], self.vertex_actions[i])
        if verify:
            self.verify()

    def verify(self):
        k = self.species.ground
        for vid in self.species.vertex_order:
            D = self.species.vertex(vid).tower
            bas = tower_basis(D, k)
            acts = self.vertex_actions[vid]
            n = self.dims[vid]
            if n == 0:
                continue
            if acts[0] != Matrix.identity(k, n):
                raise errors.NotIsomorphic(f"vertex {vid}: 1 acts nontrivially")
            for r, br in enumerate(bas):
                for s, bs in enumerate(bas):
                    want = _lin_comb(k, n, tower_coords(br * bs, k), acts)
                    if acts[r] * acts[s] != want:
                        raise errors.NotIsomorphic(
                            f"vertex {vid}: tower action not multiplicative")
        for (i, j), m in self.species.edges.items():
            phi = self.edge_maps[(i, j)]
            bt = self.balanced[(i, j)]
            if phi.ncols != bt.dim or phi.nrows != self.dims[j]:
                raise errors.DimensionMismatch(f"edge map shape on ({i},{j})")
            # left D_j-linearity: φ(d·(m ⊗ v)) = d·φ(m ⊗ v)
            actsj = self.vertex_actions[j]
            for bidx in range(len(m.left_action)):
                L = m.left_action[bidx]
                for w in range(bt.dim):
                    raw = bt.lift(_std(k, bt.dim, w))
                    moved = vec_zero(k, bt.raw_dim)
                    for idx, c in enumerate(raw):
                        if c.is_zero:
                            continue
                        mi, vi = divmod(idx, bt.v_dim)
                        for mnew, c2 in enumerate(L.column(mi)):
                            if not c2.is_zero:
                                moved[mnew * bt.v_dim + vi] = \
                                    moved[mnew * bt.v_dim + vi] + c * c2
                    lhs = phi.apply(bt.project(moved))
                    rhs = actsj[bidx].apply(phi.apply(_std(k, bt.dim, w)))
                    if lhs != rhs:
                        raise errors.NotIsomorphic(
                            f"edge map ({i},{j}) is not left-linear")
        return self

    def edge_basis_action(self, i, j):
        """Per edge-basis-element matrices E[m]: V_i -> V_j."""
        k = self.species.ground
        bt = self.balanced[(i, j)]
        phi = self.edge_maps[(i, j)]
        out = []
        for mi in range(bt.m_dim):
            cols = []
            for vi in range(self.dims[i]):
                raw = _std(k, bt.raw_dim, mi * bt.v_dim + vi)
                cols.append(phi.apply(bt.project(raw)))
            out.append(Matrix(k, list(zip(*cols))) if cols else
                       Matrix.zero(k, self.dims[j], 0))
        return out


def _lin_comb(k, n, coords, mats):
    rows = [[k.zero()] * n for _ in range(n)]
    for c, mat in zip(coords, mats):
        if c.is_zero:
            continue
        for r in range(n):
            for s in range(n):
                rows[r][s] = rows[r][s] + c * mat.rows[r][s]
    return Matrix(k, rows)


def rep_to_module(t, rep):
    """Functor F: V = ⊕ V_i with word actions composed edge by edge.
    Returns (module over the tensor algebra, block offsets)."""
    s = t.species
    k = s.ground
    offsets = {}
    total = 0
    for vid in s.vertex_order:
        offsets[vid] = total
        total += rep.dims[vid]
    edge_acts = {(i, j): rep.edge_basis_action(i, j) for (i, j) in s.edges}
    zero = Matrix.zero(k, total, total)
    actions = []
    for w in t.words:
        if w.kind == "vertex":
            vid = w.vertex
            n = rep.dims[vid]
            rows = [[k.zero()] * total for _ in range(total)]
            if n:
                block = rep.vertex_actions[vid][w.tower_index]
                o = offsets[vid]
                for r in range(n):
                    for c in range(n):
                        rows[o + r][o + c] = block.rows[r][c]
            actions.append(Matrix(k, rows))
            continue
        path = w.path
        ws = s.word_space(path)
        raw = ws.lift(_std(k, ws.dim, w.word_index))
        src, dst = path[0], path[-1]
        nsrc, ndst = rep.dims[src], rep.dims[dst]
        block = Matrix.zero(k, ndst, nsrc)
        acc = [[k.zero()] * nsrc for _ in range(ndst)]
        for idx, coeff in enumerate(raw):
            if coeff.is_zero:
                continue
            digits = ws._unflatten(idx)
            mat = None
            for l in range(len(path) - 1):
                e = (path[l], path[l + 1])
                step = edge_acts[e][digits[l]]
                mat = step if mat is None else step * mat
            for r in range(ndst):
                for c in range(nsrc):
                    x = mat.rows[r][c]
                    if not x.is_zero:
                        acc[r][c] = acc[r][c] + coeff * x
        rows = [[k.zero()] * total for _ in range(total)]
        o_r, o_c = offsets[dst], offsets[src]
        for r in range(ndst):
            for c in range(nsrc):
                rows[o_r + r][o_c + c] = acc[r][c]
        actions.append(Matrix(k, rows))
    module = ModuleOverAlgebra(t.algebra, actions, verify=True)
    return module, offsets


def module_to_rep(t, module):
    """Functor G: V_i = image of the vertex unit, edge maps restricted."""
    s = t.species
    k = s.ground
    vbases = {}
    for vid in s.vertex_order:
        proj = module.act_matrix(t.vertex_unit(vid))
        span = SpanBuilder(k, module.dim)
        for j in range(module.dim):
            span.add(proj.column(j))
        vbases[vid] = span.subspace()
    total = sum(sp.dim for sp in vbases.values())
    if total != module.dim:
        raise errors.NotIsomorphic("vertex units do not decompose the module")
    dims = {vid: sp.dim for vid, sp in vbases.items()}

    def coords_in(vid, vec):
        sp = vbases[vid]
        mat = Matrix(k, list(zip(*sp.rows)))
        res = rref_solve(mat, Matrix(k, [[c] for c in vec]))
        if not res.consistent:
            raise errors.NotIsomorphic(
                f"vector leaves the vertex component {vid}")
        return res.particular.column(0)

    vertex_actions = {}
    for vid in s.vertex_order:
        D = s.vertex(vid).tower
        bas = tower_basis(D, k)
        off = t.vertex_offset[vid]
        acts = []
        for ti in range(len(bas)):
            A = module.actions[off + ti]
            cols = [coords_in(vid, A.apply(list(b))) for b in vbases[vid].rows]
            acts.append(Matrix(k, list(zip(*cols))) if cols
                        else Matrix.zero(k, 0, 0))
        vertex_actions[vid] = acts
    edge_maps = {}
    for (i, j), m in s.edges.items():
        bt = BalancedTensor(k, m, dims[i], vertex_actions[i])
        off = t.path_offset[(i, j)]
        cols = []
        for w in range(bt.dim):
            raw = bt.lift(_std(k, bt.dim, w))
            img = vec_zero(k, module.dim)
            for idx, c in enumerate(raw):
                if c.is_zero:
                    continue
                mi, vi = divmod(idx, bt.v_dim)
                vvec = vbases[i].rows[vi]
                av = module.actions[off + mi].apply(list(vvec))
                for r in range(module.dim):
                    if not av[r].is_zero:
                        img[r] = img[r] + c * av[r]
            cols.append(coords_in(j, img))
        edge_maps[(i, j)] = (Matrix(k, list(zip(*cols))) if cols
                             else Matrix.zero(k, dims[j], 0))
    return RepresentationOfSpecies(s, dims, vertex_actions, edge_maps,
                                   verify=True)


def rep_satisfies_relations(rep, relations):
    """True iff the induced maps vanish on <σ> ⊗ V for every relation."""
    s = rep.species
    k = s.ground
    for rel in relations:
        # close the relation under the outer bimodule actions inside the
        # direct sum of its path word spaces
        paths = sorted(rel.components.keys(), key=lambda p: (len(p), p))
        offs = {}
        tot = 0
        for p in paths:
            offs[p] = tot
            tot += s.word_space(p).dim
        base = vec_zero(k, tot)
        for p, coords in rel.components.items():
            for ti, c in enumerate(coords):
                base[offs[p] + ti] = c
        Dj = s.vertex(rel.end).tower
        Di = s.vertex(rel.start).tower
        span = SpanBuilder(k, tot)
        span.add(base)
        work = [base]
        nl = len(tower_basis(Dj, k))
        nr = len(tower_basis(Di, k))
        while work:
            v = work.pop()
            for side, count in (("L", nl), ("R", nr)):
                for bidx in range(count):
                    out = vec_zero(k, tot)
                    for p in paths:
                        w = s.word_space(p)
                        seg = v[offs[p]:offs[p] + w.dim]
                        if vec_is_zero(seg):
                            continue
                        mat = (w.left_action_matrix(bidx) if side == "L"
                               else w.right_action_matrix(bidx))
                        img = mat.apply(seg)
                        for ti, c in enumerate(img):
                            out[offs[p] + ti] = out[offs[p] + ti] + c
                    if span.add(out):
                        work.append(out)
        # evaluate the induced map on every generator ⊗ V_i basis vector
        edge_acts = {}
        for tau in span.subspace().rows:
            for vi in range(rep.dims[rel.start]):
                acc = vec_zero(k, rep.dims[rel.end])
                for p in paths:
                    w = s.word_space(p)
                    seg = tau[offs[p]:offs[p] + w.dim]
                    if vec_is_zero(seg):
                        continue
                    for widx, coeff in enumerate(seg):
                        if coeff.is_zero:
                            continue
                        raw = w.lift(_std(k, w.dim, widx))
                        for idx, c2 in enumerate(raw):
                            if c2.is_zero:
                                continue
                            digits = w._unflatten(idx)
                            vecv = _std(k, rep.dims[rel.start], vi)
                            for l in range(len(p) - 1):
                                e = (p[l], p[l + 1])
                                if e not in edge_acts:
                                    edge_acts[e] = rep.edge_basis_action(*e)
                                vecv = edge_acts[e][digits[l]].apply(vecv)
                            for r in range(rep.dims[rel.end]):
                                if not vecv[r].is_zero:
                                    acc[r] = acc[r] + coeff * c2 * vecv[r]
                if not vec_is_zero(acc):
                    return False
    return True


def module_annihilates(module, t, relations):
    """Whether <rho> acts as zero (so the module descends to the quotient)."""
    for rel in relations:
        vec = t.relation_vector(rel)
        if module.act_matrix(vec) != Matrix.zero(module.algebra.field,
                                                 module.dim, module.dim):
            return False
    return True


def module_over_quotient(module, qres):
    """Push a T-module annihilated by the ideal down to T/<rho>."""
    t = qres.tensor
    if not module_annihilates(module, t, qres.relations):
        raise errors.NotIsomorphic("ideal does not annihilate the module")
    acts = []
    for j in range(qres.algebra.dim):
        lift = qres.qdata.lift(_std(t.algebra.field, qres.algebra.dim, j))
        acts.append(module.act_matrix(lift))
    return ModuleOverAlgebra(qres.algebra, acts, verify=True)


def module_pullback(module, qres):
    """View a module over T/<rho> as a module over T."""
    t = qres.tensor
    acts = []
    for i in range(t.algebra.dim):
        q = qres.qdata.project(_std(t.algebra.field, t.algebra.dim, i))
        acts.append(module.act_matrix(q))
    return ModuleOverAlgebra(t.algebra, acts, verify=True)


# ---------------------------------------------------------------------------
# projectives and the hereditary test

class ModuleContext:
    """An algebra with verified radical and idempotents, as the projective
    machinery needs it."""

    __slots__ = ("algebra", "rad_result", "idems")

    def __init__(self, algebra, rad_result, idems):
        self.algebra = algebra
        self.rad_result = rad_result
        self.idems = idems


def regular_module(a):
    """Λ as a left module over itself."""
    acts = [a.left_mult_matrix(a.basis_vector(i)) for i in range(a.dim)]
    return ModuleOverAlgebra(a, acts, verify=False)


def submodule_as_module(a, big, basis_rows):
    """Module structure on an action-closed subspace, in its own coords."""
    k = a.field
    n = len(basis_rows)
    mat = Matrix(k, list(zip(*basis_rows))) if n else None

    def coords(vec):
        res = rref_solve(mat, Matrix(k, [[c] for c in vec]))
        if not res.consistent:
            raise errors.NotIsomorphic("subspace is not action-closed")
        return res.particular.column(0)

    acts = []
    for i in range(a.dim):
        cols = [coords(big.act(a.basis_vector(i), list(b)))
                for b in basis_rows]
        acts.append(Matrix(k, list(zip(*cols))) if n
                    else Matrix.zero(k, 0, 0))
    return ModuleOverAlgebra(a, acts, verify=True), mat


def projective_toolkit(ctx, action, m=None):
    """projectives / radical_of / top_of / is_projective over a context."""
    a = ctx.algebra
    k = a.field
    if action == "projectives":
        reg = regular_module(a)
        out = []
        for e in ctx.idems:
            span = SpanBuilder(k, a.dim)
            for l in range(a.dim):
                span.add(a.multiply(a.basis_vector(l), e))
            mod, basis = submodule_as_module(a, reg, list(span.subspace().rows))
            out.append((mod, span.subspace()))
        return out
    if action == "radical_of":
        span = SpanBuilder(k, m.dim)
        for r in ctx.rad_result.ideal.space.rows:
            for b in range(m.dim):
                span.add(m.act(list(r), _std(k, m.dim, b)))
        return span.subspace()
    if action == "top_of":
        radm = projective_toolkit(ctx, "radical_of", m)
        comp, project, lift = radm.quotient_coords()
        mult = {}
        for bidx, e in enumerate(ctx.idems):
            span = SpanBuilder(k, len(comp))
            for b in range(m.dim):
                v = m.act(list(e), _std(k, m.dim, b))
                span.add(project(v))
            D = ctx.rad_result.blocks[bidx].tower
            dk = dim_over(D, k)
            if span.dim % dk:
                raise errors.NotIsomorphic(
                    "top component is not a tower module")
            mult[bidx] = span.dim // dk
        return mult, radm
    if action == "is_projective":
        return _is_projective(ctx, m)
    raise ValueError(f"unknown projective action {action!r}")


def _is_projective(ctx, m):
    """Projective cover comparison: build P = ⊕ mult_i P_i matching the top,
    lift the top generators, check surjectivity and dimension equality."""
    a = ctx.algebra
    k = a.field
    mult, radm = projective_toolkit(ctx, "top_of", m)
    projs = projective_toolkit(ctx, "projectives")
    dimP = sum(mult[b] * projs[b][0].dim for b in mult)
    if dimP != m.dim:
        return False, mult, f"cover dim {dimP} != module dim {m.dim}"
    comp, project, lift = radm.quotient_coords()
    cols = []
    for bidx, e in enumerate(ctx.idems):
        need = mult[bidx]
        if not need:
            continue
        span = SpanBuilder(k, len(comp))
        gens = []
        tower_lifts = _block_tower_lifts(ctx, bidx)
        for b in range(m.dim):
            if len(gens) == need:
                break
            v = m.act(list(e), _std(k, m.dim, b))
            if span.add(project(v)):
                gens.append(v)
                # close the top span under the block tower action so the
                # next generator starts a fresh D-orbit
                for lvec in tower_lifts:
                    span.add(project(m.act(lvec, v)))
        if len(gens) != need:
            return False, mult, "could not lift enough top generators"
        Pmod, Pspace = projs[bidx]
        for g in gens:
            for prow in Pspace.rows:
                cols.append(m.act(list(prow), g))
    mat = Matrix(k, list(zip(*cols))) if cols else Matrix.zero(k, m.dim, 0)
    rank = rref_solve(mat).rank if cols else 0
    ok = rank == m.dim
    return ok, mult, ("projective cover is an isomorphism" if ok
                      else f"cover map rank {rank} < {m.dim}")


def _block_tower_lifts(ctx, bidx):
    from .species import block_element_lift
    D = ctx.rad_result.blocks[bidx].tower
    k = ctx.algebra.field
    return [block_element_lift(ctx.rad_result, bidx, tb)
            for tb in tower_basis(D, k)]


def hereditary_check(ctx):
    """Hereditary iff r·e_i is projective for every i; reports the
    projective multiplicities per vertex."""
    a = ctx.algebra
    k = a.field
    reg = regular_module(a)
    report = {}
    hereditary = True
    for i, e in enumerate(ctx.idems):
        span = SpanBuilder(k, a.dim)
        for r in ctx.rad_result.ideal.space.rows:
            span.add(a.multiply(list(r), e))
        if span.dim == 0:
            report[i] = {"dim": 0, "projective": True, "multiplicities": {}}
            continue
        mod, _ = submodule_as_module(a, reg, list(span.subspace().rows))
        ok, mult, detail = projective_toolkit(ctx, "is_projective", mod)
        report[i] = {"dim": mod.dim, "projective": ok,
                     "multiplicities": mult, "detail": detail}
        hereditary = hereditary and ok
    return hereditary, report
