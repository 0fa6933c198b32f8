"""Scratch driver for the DR3 example pipeline (will move into gallery/tests)."""
import sys, time
sys.path.insert(0, "src")
from algkit.fields import *
from algkit.algebra import *
from algkit.species import *
from algkit.tensor import *
from algkit.structure import *
from algkit.linalg import Matrix

t0 = time.time()
k = FieldDescriptor.rational_function(2, "x")   # x stands for t^2
x = k.generator()
K = k.extend("t", [x, 0, 1])
t = K.generator()
one, zero = K.one(), K.zero()

def delta(b):  # derivation d/dt on K: b0 + b1 t -> b1
    c = b.coords()
    return embed(c[1], K)

# slots: K at (1,1),(2,1),(2,2),(3,2),(3,3); M = K^2 at (3,1)
SLOTS = [(1,1),(2,1),(2,2),(3,1),(3,2),(3,3)]
def slot_dim(s): return 4 if s == (3,1) else 2

offsets = {}
off = 0
for s in SLOTS:
    offsets[s] = off
    off += slot_dim(s)
DIM = off  # 14

def kcoords(e):  # K element -> 2 k-coords
    return list(e.coords())

def to_vec(parts):
    """parts: dict slot -> K element or (f,g) pair; -> 14-dim coord vector."""
    v = [k.zero()] * DIM
    for s, val in parts.items():
        o = offsets[s]
        if s == (3,1):
            f, g = val
            c = kcoords(f) + kcoords(g)
        else:
            c = kcoords(val)
        for i, ci in enumerate(c):
            v[o + i] = v[o + i] + ci
    return v

def basis_element(idx):
    """index -> (slot, K-element or pair)"""
    for s in SLOTS:
        o = offsets[s]
        if o <= idx < o + slot_dim(s):
            r = idx - o
            if s == (3,1):
                f = one if r == 0 else (t if r == 1 else zero)
                g = one if r == 2 else (t if r == 3 else zero)
                if r < 2:
                    return s, ((one if r == 0 else t), zero)
                return s, (zero, (one if r == 2 else t))
            return s, (one if r == 0 else t)
    raise IndexError

def mult_parts(s1, v1, s2, v2):
    """product of slot elements; returns dict slot -> value (or empty)."""
    (r1, c1), (r2, c2) = s1, s2
    if c1 != r2:
        return {}
    target = (r1, c2)
    if target not in offsets:
        return {}
    if s1 == (3,1):
        # M · K(1,1): right action (f,g)b = (fb + g δ(b), gb)
        f, g = v1
        b = v2
        return {target: (f*b + g*delta(b), g*b)}
    if s2 == (3,1):
        # K(3,3) · M: left action a(f,g) = (af, ag)
        a = v1
        f, g = v2
        return {target: (a*f, a*g)}
    if s1 == (3,2) and s2 == (2,1):
        # corner: a·b -> (ab, 0) in M
        return {target: (v1*v2, zero)}
    return {target: v1*v2}

table = []
for i in range(DIM):
    row = []
    si, vi = basis_element(i)
    for j in range(DIM):
        sj, vj = basis_element(j)
        row.append(to_vec(mult_parts(si, vi, sj, vj)))
    table.append(row)
unit = to_vec({(1,1): one, (2,2): one, (3,3): one})
names = [f"{s}:{'1' if idx - offsets[s] in (0,) else 't' if idx-offsets[s]==1 else ('u' if idx-offsets[s]==2 else 'ut')}" for idx, s in
         [(i, next(s for s in SLOTS if offsets[s] <= i < offsets[s]+slot_dim(s))) for i in range(DIM)]]
A = AlgebraPresentation(k, names, unit, table)
rep = validate_algebra(A)
print("DR3 validates:", rep.ok, "dim:", rep.dim, f"({time.time()-t0:.1f}s)")

rad_vecs = []
for s in [(2,1),(3,1),(3,2)]:
    for r in range(slot_dim(s)):
        v = [k.zero()]*DIM; v[offsets[s]+r] = k.one(); rad_vecs.append(v)

blocks = []
eps_images = []
for s in [(1,1),(2,2),(3,3)]:
    bas = [to_vec({s: one}), to_vec({s: t})]
    blocks.append(BlockIso(K, bas, [one, t]))
    eps_images.append(bas)
certs = Certificates(radical_vectors=rad_vecs, idempotents=[to_vec({(1,1): one}), to_vec({(2,2): one}), to_vec({(3,3): one})], blocks=blocks, epsilon_images=eps_images)

prep = PreparedAlgebra(A, certs, name="dr3")
print("radical verified; rl:", prep.loewy(), f"({time.time()-t0:.1f}s)")
ok, detail = verify_split(A, prep.rad_result, prep.epsilon)
print("verify_split(diagonal eps):", ok)

sec = r_split_check(A, prep.rad_result, prep.epsilon)
print("r_split_check:", sec.feasible, "-", sec.detail, f"({time.time()-t0:.1f}s)")

hered, hrep = hereditary_check(prep.context())
print("hereditary:", hered, {i: r["projective"] for i, r in hrep.items()}, f"({time.time()-t0:.1f}s)")

soa = prep.species()
print("species edges:", {e: m.dim for e, m in soa.species.edges.items()})
print("peirce dims:", {key: sp.dim for key, sp in peirce(A, prep.idems).items()})

enl = enlarged_species(soa)
print("enlarged edges:", {e: m.dim for e, m in enl.species.edges.items()})

res = build_surjection(prep, "split_enlarged")
print("split_enlarged surjection: kernel dim", res.kernel.dim, "flags:", res.flags, f"({time.time()-t0:.1f}s)")

rels = kernel_relations(res)
print("kernel relations:", len(rels), [(r.start, r.end, sorted(len(p)-1 for p in r.components)) for r in rels], f"({time.time()-t0:.1f}s)")
vc = relation_toolkit(res.species, rels, "validate_canonical_set")
print("canonical set:", vc.ok)

sm, rhom, witness = reduce_to_strong_canonical(res.species, rels)
print("S_m edges:", {e: m.dim for e, m in sm.edges.items()}, "strong rels:", len(rhom), "dims", witness.dim_before, "->", witness.dim_after, f"({time.time()-t0:.1f}s)")

suite = theorem_suite(prep, "thm_5_4")
print("thm_5_4:", suite["verdict"], [(c["name"], c["status"]) for c in suite["clauses"]], f"({time.time()-t0:.1f}s)")
EOF_MARKER = None
