"""Theorem pipelines: the universal tensor map, surjections onto an algebra
from the species (r-split mode) or the enlarged species (split mode), kernel
relation extraction with bound verification, presentation verification, and
the instance-wise theorem suites."""

from . import errors
from .algebra import (AlgebraMorphism, Certificates, IdealSubspace,
                      R_lin_comb, epsilon_from_block_images, idempotent_toolkit,
                      loewy_length, radical, r_split_check, verify_split)
from .fields import is_perfect, tower_basis, tower_coords
from .linalg import Matrix, SpanBuilder, Subspace, rref_solve, vec_is_zero
from .species import (Relation, _std, block_element_lift, enlarged_species,
                      relation_toolkit, reduce_to_strong_canonical, species_of)
from .tensor import (ModuleContext, build_tensor_algebra, hereditary_check,
                     quotient_by_relations)


class PreparedAlgebra:
    """An algebra with its verified certificates, ready for the pipelines."""

    __slots__ = ("name", "algebra", "rad_result", "idems", "epsilon", "soa")

    def __init__(self, algebra, certificates, name="", lift_idempotents=False):
        self.name = name
        self.algebra = algebra
        self.rad_result = radical(algebra, "supplied", certificates)
        if certificates.idempotents is not None:
            self.idems = idempotent_toolkit(algebra, "verify", self.rad_result,
                                            certificates.idempotents)
        elif lift_idempotents:
            self.idems = idempotent_toolkit(algebra, "lift", self.rad_result)
        else:
            self.idems = idempotent_toolkit(algebra, "lift", self.rad_result)
        if certificates.epsilon_images is not None:
            self.epsilon = epsilon_from_block_images(
                self.rad_result, certificates.epsilon_images)
            ok, detail = verify_split(algebra, self.rad_result, self.epsilon)
            if not ok:
                raise errors.NotSplit(detail)
        else:
            self.epsilon = None
        self.soa = None

    def species(self):
        if self.soa is None:
            self.soa = species_of(self.algebra, self.rad_result, self.idems)
        return self.soa

    def context(self):
        return ModuleContext(self.algebra, self.rad_result, self.idems)

    def loewy(self):
        return loewy_length(self.algebra, self.rad_result.ideal)


def universal_extension(t, target, sigma_images, vpart_images):
    """Extend f: Σ ⊕ V -> Λ to the unique algebra map on the truncation,
    word-wise by f(v_1 ⊗ ... ⊗ v_n) = f(v_1) ... f(v_n).

    sigma_images: vid -> per-tower-basis Λ-vectors.
    vpart_images: (i,j) -> per-edge-basis Λ-vectors."""
    s = t.species
    k = s.ground
    # Σ-multiplicativity of the degree-0 part
    for vid in s.vertex_order:
        D = s.vertex(vid).tower
        bas = tower_basis(D, k)
        imgs = sigma_images[vid]
        for r, br in enumerate(bas):
            for c, bc in enumerate(bas):
                want = target.zero_vec()
                for idx, co in enumerate(tower_coords(br * bc, k)):
                    if not co.is_zero:
                        for l2 in range(target.dim):
                            want[l2] = want[l2] + co * imgs[idx][l2]
                got = target.multiply(imgs[r], imgs[c])
                if got != want:
                    raise errors.EquivarianceFails(
                        f"degree-0 part is not multiplicative at vertex {vid}")
    # bimodule equivariance of the degree-1 part
    for (i, j), m in s.edges.items():
        imgs = vpart_images[(i, j)]
        for bidx in range(len(m.left_action)):
            L = m.left_action[bidx]
            for widx in range(m.dim):
                lhs = target.zero_vec()
                for new, c in enumerate(L.column(widx)):
                    if not c.is_zero:
                        for l2 in range(target.dim):
                            lhs[l2] = lhs[l2] + c * imgs[new][l2]
                rhs = target.multiply(sigma_images[j][bidx], imgs[widx])
                if lhs != rhs:
                    raise errors.EquivarianceFails(
                        f"left equivariance fails on edge ({i},{j})")
        for bidx in range(len(m.right_action)):
            R = m.right_action[bidx]
            for widx in range(m.dim):
                lhs = target.zero_vec()
                for new, c in enumerate(R.column(widx)):
                    if not c.is_zero:
                        for l2 in range(target.dim):
                            lhs[l2] = lhs[l2] + c * imgs[new][l2]
                rhs = target.multiply(imgs[widx], sigma_images[i][bidx])
                if lhs != rhs:
                    raise errors.EquivarianceFails(
                        f"right equivariance fails on edge ({i},{j})")
    cols = []
    for w in t.words:
        if w.kind == "vertex":
            cols.append(list(sigma_images[w.vertex][w.tower_index]))
            continue
        ws = s.word_space(w.path)
        raw = ws.lift(_std(k, ws.dim, w.word_index))
        acc = target.zero_vec()
        for idx, coeff in enumerate(raw):
            if coeff.is_zero:
                continue
            digits = ws._unflatten(idx)
            prod = None
            for l in range(len(w.path) - 2, -1, -1):
                e = (w.path[l], w.path[l + 1])
                img = vpart_images[e][digits[l]]
                prod = img if prod is None else target.multiply(prod, img)
            for l2 in range(target.dim):
                if not prod[l2].is_zero:
                    acc[l2] = acc[l2] + coeff * prod[l2]
        cols.append(acc)
    mat = Matrix(target.field, list(zip(*cols)))
    return AlgebraMorphism(t.algebra, target, mat, verify=True)


class SurjectionResult:
    __slots__ = ("prepared", "tensor", "morphism", "mode", "kernel", "flags",
                 "species", "enlarged")

    def __init__(self, prepared, tensor, morphism, mode, kernel, flags,
                 species, enlarged):
        self.prepared = prepared
        self.tensor = tensor
        self.morphism = morphism
        self.mode = mode
        self.kernel = kernel
        self.flags = flags
        self.species = species
        self.enlarged = enlarged


def _epsilon_tower_images(prep, block_idx, qv_builder=None):
    """ε-images of the tower basis of one block."""
    rad_result = prep.rad_result
    b = rad_result.blocks[block_idx]
    k = prep.algebra.field
    Q = rad_result.qdata.quotient
    out = []
    for tb in tower_basis(b.tower, k):
        coeffs = b.from_tower(tb)
        qv = [k.zero()] * Q.dim
        for c, qb in zip(coeffs, b.qbasis):
            for t in range(Q.dim):
                qv[t] = qv[t] + c * qb[t]
        out.append(prep.epsilon.apply(qv))
    return out


def build_surjection(prep, mode, section=None):
    """The surjection f̃: T(S_Λ) -> Λ (r_split mode, needs a bimodule
    section) or T(S̃_Λ) -> Λ (split_enlarged mode, needs only ε)."""
    a = prep.algebra
    k = a.field
    if prep.epsilon is None:
        raise errors.NotSplit("no verified ε is available")
    soa = prep.species()
    rl = prep.loewy()
    sigma_images = {}
    for vid in soa.species.vertex_order:
        bidx = soa.vertex_of_block[vid]
        sigma_images[vid] = _epsilon_tower_images(prep, bidx)
    if mode == "r_split":
        if section is None:
            sec = r_split_check(a, prep.rad_result, prep.epsilon)
            if not sec.feasible:
                raise errors.SectionMissing(
                    "r-split section is infeasible: " + sec.detail)
            section = sec.section
        t = build_tensor_algebra(soa.species, rl)
        (R, R2, inner, comp, projM, liftM) = soa.mdata
        rmat = Matrix(k, list(zip(*R.rows)))
        vpart = {}
        for (i, j), reps in soa.edge_reps.items():
            imgs = []
            for rep in reps:
                res = rref_solve(rmat, Matrix(k, [[c] for c in rep]))
                assert res.consistent
                mcoords = projM(res.particular.column(0))
                imgs.append(R_lin_comb(R, section.apply(mcoords)))
            vpart[(i, j)] = imgs
        species = soa.species
        enlarged = None
    elif mode == "split_enlarged":
        enlarged = enlarged_species(soa)
        t = build_tensor_algebra(enlarged.species, rl)
        vpart = {}
        for (i, j), m in enlarged.species.edges.items():
            jdx = soa.vertex_of_block[j]
            idx = soa.vertex_of_block[i]
            bj = sigma_images[j]
            bi = sigma_images[i]
            n = soa.species.edge(i, j).dim
            reps = soa.edge_reps[(i, j)]
            imgs = []
            for bq in range(len(bj)):
                for mq in range(n):
                    for aq in range(len(bi)):
                        imgs.append(a.multiply(a.multiply(bj[bq], reps[mq]),
                                               bi[aq]))
            vpart[(i, j)] = imgs
        species = enlarged.species
    else:
        raise ValueError(f"unknown surjection mode {mode!r}")
    morphism = universal_extension(t, a, sigma_images, vpart)
    solved = rref_solve(morphism.matrix)
    if solved.rank != a.dim:
        raise errors.BoundViolation(
            "tensor map is not surjective; upstream certificates are wrong")
    kernel_space = solved.kernel
    kernel = IdealSubspace(t.algebra, kernel_space, verify=True)
    flags = {
        "contains_J_rl": all(kernel_space.contains(v)
                             for v in t.j_power(rl).rows),
        "inside_J": all(t.words[idx].degree >= 1
                        for row in kernel_space.rows
                        for idx, c in enumerate(row) if not c.is_zero),
        "inside_J2": all(t.words[idx].degree >= 2
                         for row in kernel_space.rows
                         for idx, c in enumerate(row) if not c.is_zero),
    }
    expected = flags["contains_J_rl"] and (
        flags["inside_J2"] if mode == "r_split" else flags["inside_J"])
    if not expected:
        raise errors.BoundViolation(f"kernel bound flags failed: {flags}")
    return SurjectionResult(prep, t, morphism, mode, kernel, flags,
                            species, enlarged)


def kernel_relations(res):
    """A finite minimal generating set of the kernel ideal: a basis of
    K mod (J·K + K·J) sliced to endpoint-homogeneous relations, re-verified
    to regenerate the kernel exactly."""
    t = res.tensor
    a = t.algebra
    k = a.field
    K = res.kernel.space
    deg1 = [i for i, w in enumerate(t.words) if w.degree == 1]
    border = SpanBuilder(k, a.dim)
    for i in deg1:
        w = a.basis_vector(i)
        for row in K.rows:
            border.add(a.multiply(w, list(row)))
            border.add(a.multiply(list(row), w))
    units = {vid: t.vertex_unit(vid) for vid in t.species.vertex_order}
    gens = []
    for jv in t.species.vertex_order:
        for iv in t.species.vertex_order:
            ej, ei = units[jv], units[iv]
            slice_border = SpanBuilder(k, a.dim)
            for row in border.subspace().rows:
                slice_border.add(a.multiply(a.multiply(ej, list(row)), ei))
            grow = slice_border
            for row in K.rows:
                v = a.multiply(a.multiply(ej, list(row)), ei)
                if grow.add(v):
                    gens.append(v)
    regenerated = _ideal_closure_space(a, gens)
    if regenerated.rows != K.rows:
        raise errors.BoundViolation(
            "minimal generators do not regenerate the kernel")
    rels = []
    for g in gens:
        parts = t.relation_from_vector(g)
        assert len(parts) == 1
        rels.extend(parts)
    return rels


def _ideal_closure_space(a, gens):
    from .algebra import ideal_closure
    return ideal_closure(a, gens).space


class PresentationWitness:
    __slots__ = ("species", "relations", "morphism", "classification")

    def __init__(self, species, relations, morphism, classification):
        self.species = species
        self.relations = relations
        self.morphism = morphism
        self.classification = classification


def verify_presentation(a, s, rho, sigma_images, vpart_images, bound="full"):
    """Build the induced map T(S)/<rho> -> Λ from the defining data, verify
    bijectivity and multiplicativity, and classify the ideal."""
    t = build_tensor_algebra(s, bound)
    qres = quotient_by_relations(t, rho)
    if not qres.sound:
        raise errors.NotIsomorphic(
            "truncated quotient is not sound; raise the bound")
    f = universal_extension(t, a, sigma_images, vpart_images)
    for r in rho:
        vec = t.relation_vector(r)
        if not vec_is_zero(f.apply(vec)):
            raise errors.NotIsomorphic("a relation is not in the kernel")
    if qres.algebra.dim != a.dim:
        raise errors.NotIsomorphic(
            f"dimension {qres.algebra.dim} != {a.dim}")
    k = a.field
    cols = [f.apply(qres.qdata.lift(_std(k, qres.algebra.dim, j)))
            for j in range(qres.algebra.dim)]
    mat = Matrix(k, list(zip(*cols)))
    induced = AlgebraMorphism(qres.algebra, a, mat, verify=True)
    if not induced.is_bijective():
        raise errors.NotIsomorphic("induced map is singular")
    canon = relation_toolkit(s, rho, "validate_canonical_set").ok and \
        all(relation_toolkit(s, r, "is_canonical") for r in rho)
    strong = canon and all(relation_toolkit(s, r, "is_strong_canonical")
                           for r in rho)
    classification = {
        "admissible": qres.admissible,
        "inside_J2": qres.inside_j2,
        "least_jn": qres.least_jn,
        "canonical": canon,
        "strong_canonical": strong,
    }
    return PresentationWitness(s, list(rho), induced, classification)


def presentation_data_from_surjection(res):
    """The (sigma, vpart) image data that defined a surjection, reusable for
    verify_presentation of its kernel relations."""
    prep = res.prepared
    soa = prep.species()
    sigma_images = {}
    for vid in res.species.vertex_order:
        bidx = soa.vertex_of_block[vid]
        sigma_images[vid] = _epsilon_tower_images(prep, bidx)
    vpart = {}
    for (i, j) in res.species.edges:
        off = res.tensor.path_offset[(i, j)]
        n = res.species.edge(i, j).dim
        vpart[(i, j)] = [res.morphism.apply(
            _std(prep.algebra.field, res.tensor.algebra.dim, off + w))
            for w in range(n)]
    return sigma_images, vpart


# ---------------------------------------------------------------------------
# the theorem suites

def theorem_suite(prep, which):
    if which == "thm_3_8":
        return _suite_3_8(prep)
    if which == "thm_5_4":
        return _suite_5_4(prep)
    if which == "tree_corollary":
        return _suite_tree(prep)
    if which == "perfect_r_split":
        return _suite_perfect(prep)
    raise ValueError(f"unknown suite {which!r}")


def _clause(name, status, detail=""):
    return {"name": name, "status": status, "detail": detail}


def _suite_3_8(prep):
    """(i) hereditary <=> (ii) Λ ≅ T(S_Λ), S_Λ finite acyclic; needs r-split."""
    clauses = []
    hered, rep = hereditary_check(prep.context())
    clauses.append(_clause("hereditary", "pass" if hered else "fail",
                           str({i: r["projective"] for i, r in rep.items()})))
    try:
        res = build_surjection(prep, "r_split")
    except (errors.SectionMissing, errors.NotSplit) as exc:
        clauses.append(_clause("r_split_premise", "not-applicable", str(exc)))
        return {"which": "thm_3_8", "verdict": "not-applicable",
                "clauses": clauses}
    rels = kernel_relations(res)
    acyclic = res.species.quiver().is_acyclic()
    tensor_alg = not rels and acyclic
    clauses.append(_clause("tensor_algebra_of_acyclic_species",
                           "pass" if tensor_alg else "fail",
                           f"{len(rels)} kernel relations; acyclic={acyclic}"))
    equiv = hered == tensor_alg
    clauses.append(_clause("equivalence_i_iff_ii",
                           "pass" if equiv else "fail"))
    return {"which": "thm_3_8",
            "verdict": "pass" if equiv else "fail", "clauses": clauses}


def _suite_5_4(prep):
    """(i) hereditary <=> (ii) canonical presentation over S̃_Λ <=>
    (iii) strong canonical presentation over S_m."""
    clauses = []
    hered, rep = hereditary_check(prep.context())
    clauses.append(_clause("hereditary", "pass" if hered else "fail"))
    res = build_surjection(prep, "split_enlarged")
    rels = kernel_relations(res)
    acyclic = res.species.quiver().is_acyclic()
    canon = acyclic and \
        relation_toolkit(res.species, rels, "validate_canonical_set").ok and \
        all(relation_toolkit(res.species, r, "is_canonical") for r in rels)
    clauses.append(_clause("canonical_presentation",
                           "pass" if canon == hered else "fail",
                           f"{len(rels)} relations, canonical={canon}"))
    verdict = canon == hered
    if hered and canon:
        s_m, rho_m, witness = reduce_to_strong_canonical(res.species, rels)
        strong = all(relation_toolkit(s_m, r, "is_strong_canonical")
                     for r in rho_m)
        clauses.append(_clause(
            "strong_canonical_Sm",
            "pass" if strong and witness.preserved else "fail",
            f"dims {witness.dim_before} -> {witness.dim_after}, "
            f"{len(rho_m)} strong relations"))
        verdict = verdict and strong and witness.preserved
    return {"which": "thm_5_4",
            "verdict": "pass" if verdict else "fail", "clauses": clauses}


def _suite_tree(prep):
    clauses = []
    soa = prep.species()
    tree = soa.species.quiver().is_tree_graph()
    clauses.append(_clause("underlying_graph_tree",
                           "pass" if tree else "not-applicable"))
    if not tree:
        return {"which": "tree_corollary", "verdict": "not-applicable",
                "clauses": clauses}
    res = build_surjection(prep, "r_split")
    rels = kernel_relations(res)
    clauses.append(_clause("kernel_relations_empty",
                           "pass" if not rels else "fail",
                           f"{len(rels)} relations"))
    sigma, vpart = presentation_data_from_surjection(res)
    try:
        witness = verify_presentation(prep.algebra, res.species, rels,
                                      sigma, vpart, bound="full")
        iso = True
    except errors.NotIsomorphic as exc:
        iso = False
        witness = None
    clauses.append(_clause("isomorphic_to_tensor_algebra",
                           "pass" if iso else "fail"))
    ok = not rels and iso
    return {"which": "tree_corollary",
            "verdict": "pass" if ok else "fail", "clauses": clauses}


def _suite_perfect(prep):
    clauses = []
    k = prep.algebra.field
    perf = is_perfect(k)
    clauses.append(_clause("ground_field_perfect",
                           "pass" if perf else "not-applicable"))
    if not perf:
        return {"which": "perfect_r_split", "verdict": "not-applicable",
                "clauses": clauses}
    if prep.epsilon is None:
        clauses.append(_clause("epsilon", "unknown",
                               "no ε supplied or found"))
        return {"which": "perfect_r_split", "verdict": "unknown",
                "clauses": clauses}
    sec = r_split_check(prep.algebra, prep.rad_result, prep.epsilon)
    clauses.append(_clause("r_split_feasible",
                           "pass" if sec.feasible else "fail", sec.detail))
    return {"which": "perfect_r_split",
            "verdict": "pass" if sec.feasible else "fail", "clauses": clauses}
