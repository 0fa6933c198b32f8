"""Exact arithmetic for field towers: F_p, Q, F_p(x), and simple algebraic
extensions such as F_2(x)[t]/(t^2 - x).

Every element is kept in a unique canonical form, so equality is raw data
comparison:

* prime p > 0: an int in [0, p)
* the rationals (p == 0): a fractions.Fraction
* rational functions: a coprime (numerator, denominator) pair of prime-field
  polynomials with monic denominator (see _poly for the payload encodings)
* extensions: a coordinate tuple in the power basis 1, u, ..., u^{d-1}
"""

from fractions import Fraction

from . import errors
from ._poly import poly_ops

PRIME = "prime"
RATIONAL_FUNCTION = "rational_function"
EXTENSION = "extension"

_PRIMALITY_LIMIT = 1 << 20


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class FieldDescriptor:
    """Immutable description of one field in a tower.

    `token` is the stable identity string; two descriptors are equal iff
    their structural keys (hence tokens) are equal.
    """

    __slots__ = ("kind", "p", "var", "base", "gen", "minpoly", "irreducibility",
                 "token", "_key", "_cache")

    def __init__(self, kind, p=None, var=None, base=None, gen=None,
                 minpoly=None, irreducibility=None):
        self.kind = kind
        self.p = p
        self.var = var
        self.base = base
        self.gen = gen
        self.minpoly = minpoly
        self.irreducibility = irreducibility
        self._cache = {}
        if kind == PRIME:
            self._key = (PRIME, p)
            self.token = "QQ" if p == 0 else f"GF({p})"
        elif kind == RATIONAL_FUNCTION:
            self._key = (RATIONAL_FUNCTION, p, var)
            base_tok = "QQ" if p == 0 else f"GF({p})"
            self.token = f"{base_tok}({var})"
        else:
            self._key = (EXTENSION, base._key, gen, minpoly)
            mp = _bpoly_str(base, minpoly, gen)
            self.token = f"{base.token}[{gen}]/({mp})"

    def __eq__(self, other):
        return isinstance(other, FieldDescriptor) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FieldDescriptor({self.token})"

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rationals():
        return FieldDescriptor(PRIME, p=0)

    @staticmethod
    def prime_field(p):
        if p != 0 and (p > _PRIMALITY_LIMIT or not _is_prime(p)):
            raise ValueError(f"{p} is not 0 or a small prime")
        return FieldDescriptor(PRIME, p=p)

    @staticmethod
    def rational_function(p, var):
        if p != 0 and not _is_prime(p):
            raise ValueError(f"{p} is not 0 or a prime")
        if not var.isidentifier():
            raise ValueError(f"bad indeterminate name {var!r}")
        return FieldDescriptor(RATIONAL_FUNCTION, p=p, var=var)

    def extend(self, gen, minpoly_coeffs, certificate=None):
        """Simple extension by a root of the given monic polynomial.

        `minpoly_coeffs`: coefficients over self, low degree first, as
        FieldElements, ints, or literals for parse_element.
        """
        if not gen.isidentifier():
            raise ValueError(f"bad generator name {gen!r}")
        if gen in symbol_names(self):
            raise ValueError(f"generator {gen!r} shadows a tower symbol")
        coeffs = []
        for c in minpoly_coeffs:
            if isinstance(c, FieldElement):
                if c.field != self:
                    raise errors.DescriptorMismatch("minpoly coefficient field")
                coeffs.append(c.data)
            elif isinstance(c, str):
                coeffs.append(parse_element(c, self).data)
            else:
                coeffs.append(self.from_int(c).data)
        while coeffs and self._is_zero(coeffs[-1]):
            coeffs.pop()
        deg = len(coeffs) - 1
        if deg < 2:
            raise ValueError("extension degree must be >= 2")
        if not self._eq(coeffs[-1], self._one()):
            raise ValueError("minimal polynomial must be monic")
        evidence = _certify_irreducible(self, tuple(coeffs), certificate)
        return FieldDescriptor(EXTENSION, base=self, gen=gen,
                               minpoly=tuple(coeffs), irreducibility=evidence)

    # -- basic structure ---------------------------------------------------

    @property
    def characteristic(self):
        d = self
        while d.kind == EXTENSION:
            d = d.base
        return d.p

    @property
    def degree(self):
        """Degree over the base (extensions only)."""
        return len(self.minpoly) - 1

    def zero(self):
        return FieldElement(self, self._zero())

    def one(self):
        return FieldElement(self, self._one())

    def from_int(self, n):
        return FieldElement(self, self._from_int(n))

    def generator(self):
        if self.kind == RATIONAL_FUNCTION:
            ops = poly_ops(self.p)
            return FieldElement(self, (ops.x, ops.one))
        if self.kind == EXTENSION:
            d = self.degree
            coords = [self.base._zero()] * d
            coords[1 if d > 1 else 0] = self.base._one()
            return FieldElement(self, tuple(coords))
        raise ValueError(f"{self.token} has no generator")

    def element(self, data):
        return FieldElement(self, data)

    # -- raw payload arithmetic ---------------------------------------------

    def _zero(self):
        k = self.kind
        if k == PRIME:
            return Fraction(0) if self.p == 0 else 0
        if k == RATIONAL_FUNCTION:
            ops = poly_ops(self.p)
            return (ops.zero, ops.one)
        return (self.base._zero(),) * self.degree

    def _one(self):
        k = self.kind
        if k == PRIME:
            return Fraction(1) if self.p == 0 else 1
        if k == RATIONAL_FUNCTION:
            ops = poly_ops(self.p)
            return (ops.one, ops.one)
        base = self.base
        return (base._one(),) + (base._zero(),) * (self.degree - 1)

    def _from_int(self, n):
        k = self.kind
        if k == PRIME:
            return Fraction(n) if self.p == 0 else n % self.p
        if k == RATIONAL_FUNCTION:
            ops = poly_ops(self.p)
            return (ops.const(n), ops.one)
        return (self.base._from_int(n),) + (self.base._zero(),) * (self.degree - 1)

    def _is_zero(self, a):
        k = self.kind
        if k == PRIME:
            return not a
        if k == RATIONAL_FUNCTION:
            return poly_ops(self.p).is_zero(a[0])
        return all(self.base._is_zero(c) for c in a)

    def _eq(self, a, b):
        return a == b

    def _add(self, a, b):
        k = self.kind
        if k == PRIME:
            return (a + b) % self.p if self.p else a + b
        if k == RATIONAL_FUNCTION:
            ops = poly_ops(self.p)
            n1, d1 = a
            n2, d2 = b
            if d1 == d2:
                return self._normalize(ops.add(n1, n2), d1)
            return self._normalize(ops.add(ops.mul(n1, d2), ops.mul(n2, d1)),
                                   ops.mul(d1, d2))
        base = self.base
        return tuple(base._add(x, y) for x, y in zip(a, b))

    def _neg(self, a):
        k = self.kind
        if k == PRIME:
            return (-a) % self.p if self.p else -a
        if k == RATIONAL_FUNCTION:
            return (poly_ops(self.p).neg(a[0]), a[1])
        base = self.base
        return tuple(base._neg(x) for x in a)

    def _sub(self, a, b):
        return self._add(a, self._neg(b))

    def _mul(self, a, b):
        k = self.kind
        if k == PRIME:
            return (a * b) % self.p if self.p else a * b
        if k == RATIONAL_FUNCTION:
            ops = poly_ops(self.p)
            return self._normalize(ops.mul(a[0], b[0]), ops.mul(a[1], b[1]))
        return self._ext_mul(a, b)

    def _inv(self, a):
        if self._is_zero(a):
            raise errors.DivisionByZero(f"inverse of zero in {self.token}")
        k = self.kind
        if k == PRIME:
            return 1 / a if self.p == 0 else pow(a, self.p - 2, self.p)
        if k == RATIONAL_FUNCTION:
            return self._normalize(a[1], a[0])
        return self._ext_inv(a)

    def _div(self, a, b):
        return self._mul(a, self._inv(b))

    def _normalize(self, num, den):
        ops = poly_ops(self.p)
        if ops.is_zero(den):
            raise errors.DivisionByZero(f"zero denominator in {self.token}")
        if ops.is_zero(num):
            return (ops.zero, ops.one)
        g = ops.gcd(num, den)
        if ops.degree(g) > 0:
            num = ops.divmod(num, g)[0]
            den = ops.divmod(den, g)[0]
        den, lead = ops.monic(den)
        if lead != 1:
            num = ops.scale(num, _inv_scalar(self.p, lead))
        return (num, den)

    # extension helpers

    def _reduction_rows(self):
        """Coordinates of u^d, u^{d+1}, ..., u^{2d-2} in the power basis."""
        rows = self._cache.get("red")
        if rows is None:
            base, d, mp = self.base, self.degree, self.minpoly
            top = [base._neg(c) for c in mp[:-1]]
            rows = [tuple(top)]
            for _ in range(d - 2):
                prev = rows[-1]
                shifted = [base._zero()] + list(prev[:-1])
                lead = prev[-1]
                nxt = [base._add(shifted[i], base._mul(lead, top[i]))
                       for i in range(d)]
                rows.append(tuple(nxt))
            self._cache["red"] = rows
        return rows

    def _ext_mul(self, a, b):
        base, d = self.base, self.degree
        conv = [base._zero()] * (2 * d - 1)
        for i, x in enumerate(a):
            if base._is_zero(x):
                continue
            for j, y in enumerate(b):
                if base._is_zero(y):
                    continue
                conv[i + j] = base._add(conv[i + j], base._mul(x, y))
        out = conv[:d]
        rows = self._reduction_rows()
        for j in range(d, 2 * d - 1):
            c = conv[j]
            if base._is_zero(c):
                continue
            row = rows[j - d]
            for i in range(d):
                if not base._is_zero(row[i]):
                    out[i] = base._add(out[i], base._mul(c, row[i]))
        return tuple(out)

    def _ext_inv(self, a):
        # extended Euclid in base[u] against the minimal polynomial
        base = self.base
        r0, r1 = list(self.minpoly), _bpoly_trim(base, list(a))
        s0, s1 = [], [base._one()]
        while True:
            q, r = _bpoly_divmod(base, r0, r1)
            if not r:
                break
            s = _bpoly_sub(base, s0, _bpoly_mul(base, q, s1))
            r0, r1, s0, s1 = r1, r, s1, s
        if len(r1) != 1:
            raise errors.NotIrreducible(
                f"minimal polynomial of {self.token} is not irreducible "
                f"(witness gcd of degree {len(r1) - 1})")
        c = base._inv(r1[0])
        inv = [base._mul(c, x) for x in s1]
        inv += [base._zero()] * (self.degree - len(inv))
        return tuple(inv[:self.degree])


class FieldElement:
    """Immutable element of a FieldDescriptor, always in canonical form."""

    __slots__ = ("field", "data")

    def __init__(self, field, data):
        self.field = field
        self.data = data

    def __repr__(self):
        return f"<{format_element(self)} : {self.field.token}>"

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.data == other.data

    def __hash__(self):
        return hash((self.field, self.data))

    def _coerce(self, other):
        if isinstance(other, int):
            return self.field.from_int(other)
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other)}")
        if other.field != self.field:
            raise errors.DescriptorMismatch(
                f"{self.field.token} vs {other.field.token}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.field._add(self.data, other.data))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.field._sub(self.data, other.data))

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.field._mul(self.data, other.data))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.field._div(self.data, other.data))

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.data))

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inv() ** (-n)
        out = self.field.one()
        b = self
        while n:
            if n & 1:
                out = out * b
            b = b * b
            n >>= 1
        return out

    def inv(self):
        return FieldElement(self.field, self.field._inv(self.data))

    @property
    def is_zero(self):
        return self.field._is_zero(self.data)

    def coords(self):
        """Power-basis coordinates over the base (extensions only)."""
        if self.field.kind != EXTENSION:
            raise ValueError("coords only defined for extension elements")
        return tuple(FieldElement(self.field.base, c) for c in self.data)


# ---------------------------------------------------------------------------
# base-coefficient polynomial helpers (lists of base payloads, no trailing 0)

def _bpoly_trim(base, f):
    while f and base._is_zero(f[-1]):
        f.pop()
    return f


def _bpoly_sub(base, f, g):
    out = list(f) + [base._zero()] * (len(g) - len(f))
    for i, c in enumerate(g):
        out[i] = base._sub(out[i], c)
    return _bpoly_trim(base, out)


def _bpoly_mul(base, f, g):
    if not f or not g:
        return []
    out = [base._zero()] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if base._is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = base._add(out[i + j], base._mul(a, b))
    return _bpoly_trim(base, out)


def _bpoly_divmod(base, f, g):
    f = list(f)
    q = [base._zero()] * max(0, len(f) - len(g) + 1)
    inv_lead = base._inv(g[-1])
    while len(f) >= len(g) and f:
        c = base._mul(f[-1], inv_lead)
        shift = len(f) - len(g)
        q[shift] = c
        for i, b in enumerate(g):
            f[shift + i] = base._sub(f[shift + i], base._mul(c, b))
        _bpoly_trim(base, f)
    return _bpoly_trim(base, q), f


def _bpoly_eval(base, f, v):
    out = base._zero()
    for c in reversed(f):
        out = base._add(base._mul(out, v), c)
    return out


def _bpoly_str(base, coeffs, var):
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if base._is_zero(c):
            continue
        cs = format_element(FieldElement(base, c))
        if i == 0:
            terms.append(f"({cs})")
        elif i == 1:
            terms.append(var if cs == "1" else f"({cs})*{var}")
        else:
            terms.append(f"{var}^{i}" if cs == "1" else f"({cs})*{var}^{i}")
    return " + ".join(terms) if terms else "0"


def _inv_scalar(p, c):
    if p == 0:
        return Fraction(1) / c
    return pow(c, p - 2, p)


# ---------------------------------------------------------------------------
# irreducibility certification

def _certify_irreducible(base, coeffs, certificate):
    deg = len(coeffs) - 1
    if certificate is not None:
        return f"certificate:{certificate}"
    if deg <= 3:
        if _has_root(base, coeffs):
            raise errors.NotIrreducible(
                f"degree-{deg} minimal polynomial has a root in {base.token}")
        return "root-free"
    if _finite_order(base) is not None:
        if not _rabin_irreducible(base, coeffs):
            raise errors.NotIrreducible("Rabin test found a factor")
        return "rabin"
    raise errors.NeedCertificate(
        f"degree {deg} over {base.token}: supply an irreducibility certificate")


def _finite_order(field):
    """Number of elements, or None when infinite."""
    if field.kind == PRIME and field.p:
        return field.p
    if field.kind == EXTENSION:
        b = _finite_order(field.base)
        return None if b is None else b ** field.degree
    return None


def iter_elements(field):
    """All elements of a finite field, deterministic order."""
    if field.kind == PRIME and field.p:
        for n in range(field.p):
            yield FieldElement(field, n)
        return
    if field.kind == EXTENSION and _finite_order(field) is not None:
        base_elems = [e.data for e in iter_elements(field.base)]
        d = field.degree

        def rec(prefix):
            if len(prefix) == d:
                yield FieldElement(field, tuple(prefix))
                return
            for b in base_elems:
                yield from rec(prefix + [b])

        yield from rec([])
        return
    raise ValueError(f"{field.token} is not finite")


def _has_root(base, coeffs):
    if base._is_zero(coeffs[0]):
        return True  # zero is a root
    if _finite_order(base) is not None:
        return any(base._is_zero(_bpoly_eval(base, list(coeffs), e.data))
                   for e in iter_elements(base))
    if base.kind == PRIME and base.p == 0:
        return _has_rational_root(coeffs)
    if base.kind == RATIONAL_FUNCTION and base.p:
        return _has_function_root(base, coeffs)
    raise errors.NeedCertificate(
        f"no root test available over {base.token}; supply a certificate")


def _int_divisors(n):
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return out


def _has_rational_root(coeffs):
    # rational root theorem after clearing denominators
    denlcm = 1
    for c in coeffs:
        denlcm = denlcm * c.denominator // _gcd_int(denlcm, c.denominator)
    ints = [int(c * denlcm) for c in coeffs]
    a0, ad = ints[0], ints[-1]
    for num in _int_divisors(a0):
        for den in _int_divisors(ad):
            for sign in (1, -1):
                r = Fraction(sign * num, den)
                if not sum(c * r ** i for i, c in enumerate(ints)):
                    return True
    return False


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return a


def _has_function_root(base, coeffs):
    # rational root theorem in F_p[x]: clear denominators, enumerate monic
    # divisor candidates of the outer coefficients
    ops = poly_ops(base.p)
    lcm = ops.one
    for (_, den) in coeffs:
        g = ops.gcd(lcm, den)
        lcm = ops.divmod(ops.mul(lcm, den), g)[0]
    ints = []
    for (num, den) in coeffs:
        q, r = ops.divmod(lcm, den)
        assert ops.is_zero(r)
        ints.append(ops.mul(num, q))
    a0, ad = ints[0], ints[-1]
    try:
        f_divs = ops.monic_divisors(a0)
        g_divs = ops.monic_divisors(ad)
    except ValueError as exc:
        raise errors.NeedCertificate(str(exc))
    units = range(1, base.p)
    for f in f_divs:
        for g in g_divs:
            for c in units:
                cand = base._normalize(ops.scale(f, c), g)
                if base._is_zero(_bpoly_eval(base, list(coeffs),
                                             (cand[0], cand[1]))):
                    return True
    return False


def _rabin_irreducible(base, coeffs):
    # deterministic over finite fields: x^{q^d} = x mod m and
    # gcd(x^{q^{d/l}} - x, m) = 1 for every prime l | d
    q = _finite_order(base)
    d = len(coeffs) - 1
    m = list(coeffs)
    x = [base._zero(), base._one()]

    def powmod(f, n):
        out = [base._one()]
        f = _bpoly_divmod(base, f, m)[1]
        while n:
            if n & 1:
                out = _bpoly_divmod(base, _bpoly_mul(base, out, f), m)[1]
            f = _bpoly_divmod(base, _bpoly_mul(base, f, f), m)[1]
            n >>= 1
        return out

    def bgcd(f, g):
        while g:
            f, g = g, _bpoly_divmod(base, f, g)[1]
        return f

    if _bpoly_sub(base, powmod(x, q ** d), x):
        return False
    dd, ls = d, []
    l = 2
    while l * l <= dd:
        if dd % l == 0:
            ls.append(l)
            while dd % l == 0:
                dd //= l
        l += 1
    if dd > 1:
        ls.append(dd)
    for l in ls:
        g = bgcd(m, _bpoly_sub(base, powmod(x, q ** (d // l)), x))
        if len(g) - 1 != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# tower navigation, embeddings, linear structure over a subfield

def _base_of(field):
    if field.kind == EXTENSION:
        return field.base
    if field.kind == RATIONAL_FUNCTION:
        return FieldDescriptor(PRIME, p=field.p)
    return None


def tower_path(src, dst):
    """Descriptors from src (exclusive) up to dst (inclusive), or None."""
    chain = []
    d = dst
    while d is not None:
        chain.append(d)
        if d == src:
            break
        d = _base_of(d)
    else:
        return None
    chain.reverse()
    return chain[1:]


def embed(e, target):
    """Image of e under the canonical tower inclusion into target."""
    path = tower_path(e.field, target)
    if path is None:
        raise errors.NoTowerPath(f"{e.field.token} into {target.token}")
    data = e.data
    src = e.field
    for step in path:
        if step.kind == RATIONAL_FUNCTION:
            ops = poly_ops(step.p)
            if step.p == 0:
                num = (data,) if data else ()
            else:
                num = ops.const(data)
            data = (num, ops.one)
        else:
            data = (data,) + (step.base._zero(),) * (step.degree - 1)
        src = step
    _verify_embedding(e.field, target)
    return FieldElement(target, data)


def _verify_embedding(src, dst):
    """One-time verification that the inclusion is a field homomorphism."""
    key = ("emb", src._key)
    if key in dst._cache:
        return
    dst._cache[key] = True
    path = tower_path(src, dst)
    samples = [src.one(), src.from_int(2), src.from_int(3)]
    if src.kind in (RATIONAL_FUNCTION, EXTENSION):
        samples.append(src.generator())
        samples.append(src.generator() + src.one())

    def up(x):
        data = x.data
        for step in path:
            if step.kind == RATIONAL_FUNCTION:
                ops = poly_ops(step.p)
                num = ((data,) if data else ()) if step.p == 0 else ops.const(data)
                data = (num, ops.one)
            else:
                data = (data,) + (step.base._zero(),) * (step.degree - 1)
        return FieldElement(dst, data)

    assert up(src.one()) == dst.one()
    for a in samples:
        for b in samples:
            assert up(a + b) == up(a) + up(b)
            assert up(a * b) == up(a) * up(b)


def dim_over(field, sub):
    """Dimension of field as a vector space over the subfield sub."""
    if field == sub:
        return 1
    if field.kind != EXTENSION:
        raise errors.NoTowerPath(f"{sub.token} has no finite tower to {field.token}")
    return field.degree * dim_over(field.base, sub)


def tower_basis(field, sub):
    """Basis of field over sub: base basis times generator powers, in that
    order, starting with 1."""
    if field == sub:
        return [field.one()]
    if field.kind != EXTENSION or tower_path(sub, field) is None:
        raise errors.NoTowerPath(f"{sub.token} under {field.token}")
    below = tower_basis(field.base, sub)
    u = field.generator()
    out = []
    power = field.one()
    for i in range(field.degree):
        for b in below:
            out.append(embed(b, field) * power)
        power = power * u
    return out


def tower_coords(e, sub):
    """Coordinates of e over tower_basis(e.field, sub)."""
    field = e.field
    if field == sub:
        return [e]
    out = []
    for c in e.data:
        out.extend(tower_coords(FieldElement(field.base, c), sub))
    return out


def from_tower_coords(field, sub, coords):
    basis = tower_basis(field, sub)
    out = field.zero()
    for c, b in zip(coords, basis):
        out = out + embed(c, field) * b
    return out


# ---------------------------------------------------------------------------
# perfection, Frobenius

def is_perfect(field):
    """Char 0 and finite fields are perfect; F_p(x) is not; a finite
    extension is perfect iff its base is."""
    if field.kind == PRIME:
        return True
    if field.kind == RATIONAL_FUNCTION:
        return field.p == 0
    return is_perfect(field.base)


def frobenius_preimage(e):
    """f with f^p = e if one exists in the same field, else None."""
    field = e.field
    p = field.characteristic
    if p == 0:
        raise errors.CharZero(f"{field.token} has characteristic zero")
    if field.kind == PRIME:
        return e  # a^p = a in F_p
    if field.kind == RATIONAL_FUNCTION:
        ops = poly_ops(p)
        num, den = e.data
        rn = ops.qth_root(num, p)
        rd = ops.qth_root(den, p)
        if rn is None or rd is None:
            return None
        return FieldElement(field, field._normalize(rn, rd))
    return _ext_frobenius_preimage(e)


def pth_power_components(e, q):
    """Write e = sum_j r_j^q * m_j over the imperfection basis m_j of
    e.field (q a power of the characteristic).  Returns the list of r_j.

    Raises UnsupportedShape when no imperfection basis is available."""
    field = e.field
    basis = imperfection_basis(field, q)
    if basis is None:
        raise errors.UnsupportedShape(
            f"no q-th power decomposition over {field.token}")
    if field.kind == PRIME:
        out = e
        for _ in range(_log_char(field, q)):
            out = frobenius_preimage(out)
        return [out]
    if field.kind == RATIONAL_FUNCTION:
        ops = poly_ops(field.p)
        num, den = e.data
        # f/g = f*g^(q-1) / g^q with g^q = (g)(x^q)
        h = num
        gq = den
        for _ in range(q - 1):
            h = ops.mul(h, den)
        comps = []
        cs = ops.coeffs(h)
        for j in range(q):
            picked = [cs[i] for i in range(j, len(cs), q)]
            hj = ops.from_coeffs(picked)
            comps.append(FieldElement(field, field._normalize(hj, gq)))
        return comps
    # perfect extension: single component, iterated Frobenius preimage
    out = e
    for _ in range(_log_char(field, q)):
        out = frobenius_preimage(out)
    return [out]


def imperfection_basis(field, q):
    """Basis of field over field^q, or None when unsupported.

    Prime fields and perfect extensions: [1].  F_p(x): x^j for j < q.
    Imperfect extensions are out of scope (see decisions ledger)."""
    p = field.characteristic
    if p == 0 or q % p:
        raise ValueError("q must be a power of the characteristic")
    if field.kind == PRIME:
        return [field.one()]
    if field.kind == RATIONAL_FUNCTION:
        x = field.generator()
        return [x ** j for j in range(q)]
    if is_perfect(field):
        return [field.one()]
    return None


def _log_char(field, q):
    p = field.characteristic
    e = 0
    while q > 1:
        assert q % p == 0
        q //= p
        e += 1
    return e


def _ext_frobenius_preimage(e):
    """Solve f^p = e in an extension by a semilinear system over the base."""
    field = e.field
    base = field.base
    p = field.characteristic
    d = field.degree
    if imperfection_basis(base, p) is None:
        raise errors.UnsupportedShape(
            f"Frobenius preimage needs an imperfection basis for {base.token}")
    u = field.generator()
    up = u ** p
    # f = sum a_i u^i  =>  f^p = sum a_i^p (u^p)^i; expand (u^p)^i over the
    # power basis and split every base coefficient over the q-basis
    powers = [field.one()]
    for _ in range(d - 1):
        powers.append(powers[-1] * up)
    mbasis = imperfection_basis(base, p)
    J = len(mbasis)
    rows = []
    rhs = []
    for l in range(d):
        wcol = [FieldElement(base, powers[i].data[l]) for i in range(d)]
        ecomp = pth_power_components(FieldElement(base, e.data[l]), p)
        for j in range(J):
            rows.append([pth_power_components(w, p)[j] for w in wcol])
            rhs.append(ecomp[j])
    sol = _solve_dense(base, rows, rhs)
    if sol is None:
        return None
    f = field.zero()
    for i, a in enumerate(sol):
        f = f + embed(a, field) * (u ** i)
    assert f ** p == e
    return f


def _solve_dense(field, rows, rhs):
    """Tiny Gaussian solver on FieldElement lists; None if inconsistent."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols - 1):
        pr = next((i for i in range(r, nrows) if not m[i][c].is_zero), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c].inv()
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and not m[i][c].is_zero:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, nrows):
        if not m[i][-1].is_zero:
            return None
    sol = [field.zero()] * (ncols - 1)
    for i, c in enumerate(pivots):
        sol[c] = m[i][-1]
    return sol


# ---------------------------------------------------------------------------
# the arithmetic dispatcher demanded by the spec surface

_ARITH = {"add", "sub", "mul", "div", "neg", "inv", "pow", "eq"}


def field_arith(op, *args):
    if op not in _ARITH:
        raise ValueError(f"unknown op {op!r}")
    if op in ("neg", "inv"):
        (a,) = args
        return -a if op == "neg" else a.inv()
    if op == "pow":
        a, n = args
        return a ** n
    a, b = args
    if not isinstance(b, FieldElement) or a.field != b.field:
        raise errors.DescriptorMismatch("operands must share a descriptor")
    if op == "eq":
        return a == b
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if b.is_zero:
        raise errors.DivisionByZero("division by zero")
    return a / b


# ---------------------------------------------------------------------------
# element grammar: INT | NAME | + - * / ^ | parentheses

def symbol_names(field):
    names = []
    d = field
    while d is not None:
        if d.kind == EXTENSION:
            names.append(d.gen)
        elif d.kind == RATIONAL_FUNCTION:
            names.append(d.var)
        d = _base_of(d)
    return names


def _symbol_table(field):
    table = field._cache.get("symbols")
    if table is None:
        table = {}
        d = field
        while d is not None:
            if d.kind == EXTENSION:
                table.setdefault(d.gen, embed(d.generator(), field))
            elif d.kind == RATIONAL_FUNCTION:
                table.setdefault(d.var, embed(d.generator(), field))
            d = _base_of(d)
        field._cache["symbols"] = table
    return table


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.items = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.items.append(("INT", int(text[i:j]), i))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.items.append(("NAME", text[i:j], i))
                i = j
            elif ch in "+-*/^()":
                self.items.append((ch, ch, i))
                i += 1
            else:
                raise errors.SyntaxError_(f"unexpected character {ch!r}", i)
        self.items.append(("END", None, n))
        self.k = 0

    def peek(self):
        return self.items[self.k]

    def next(self):
        tok = self.items[self.k]
        self.k += 1
        return tok


def parse_element(text, field):
    """Parse a grammar literal into a canonical FieldElement."""
    toks = _Tokens(text)
    table = _symbol_table(field)

    def expr():
        v = term()
        while toks.peek()[0] in "+-":
            op = toks.next()[0]
            w = term()
            v = v + w if op == "+" else v - w
        return v

    def term():
        v = factor()
        while toks.peek()[0] in "*/":
            op, _, pos = toks.next()
            w = factor()
            if op == "*":
                v = v * w
            else:
                if w.is_zero:
                    raise errors.DivisionByZero(
                        f"division by zero at position {pos}")
                v = v / w
        return v

    def factor():
        if toks.peek()[0] == "-":
            toks.next()
            return -factor()
        return power()

    def power():
        v = atom()
        if toks.peek()[0] == "^":
            _, _, pos = toks.next()
            sign = 1
            if toks.peek()[0] == "-":
                toks.next()
                sign = -1
            kind, val, p2 = toks.next()
            if kind != "INT":
                raise errors.SyntaxError_("integer exponent expected", p2)
            n = sign * val
            if n < 0 and v.is_zero:
                raise errors.DivisionByZero(
                    f"zero to a negative power at position {pos}")
            v = v ** n
        return v

    def atom():
        kind, val, pos = toks.next()
        if kind == "INT":
            return field.from_int(val)
        if kind == "NAME":
            if val not in table:
                raise errors.UnknownSymbol(
                    f"unknown symbol {val!r} in {field.token}")
            return table[val]
        if kind == "(":
            v = expr()
            kind2, _, pos2 = toks.next()
            if kind2 != ")":
                raise errors.SyntaxError_("expected ')'", pos2)
            return v
        raise errors.SyntaxError_(f"unexpected token {val!r}", pos)

    v = expr()
    kind, val, pos = toks.peek()
    if kind != "END":
        raise errors.SyntaxError_(f"trailing input {val!r}", pos)
    return v


def format_element(e):
    """Canonical string; parse_element(format_element(e)) == e."""
    field = e.field
    if field.kind == PRIME:
        if field.p == 0:
            f = e.data
            if f < 0:
                return f"0 - {-f.numerator}/{f.denominator}" if f.denominator != 1 \
                    else f"0 - {-f.numerator}"
            return f"{f.numerator}/{f.denominator}" if f.denominator != 1 \
                else str(f.numerator)
        return str(e.data)
    if field.kind == RATIONAL_FUNCTION:
        ops = poly_ops(field.p)
        num, den = e.data
        ns = ops.to_string(num, field.var)
        if ops.degree(den) == 0 and ops.coeff(den, 0) == 1:
            return ns
        return f"({ns})/({ops.to_string(den, field.var)})"
    base = field.base
    terms = []
    for i in range(field.degree - 1, -1, -1):
        c = e.data[i]
        if base._is_zero(c):
            continue
        cs = format_element(FieldElement(base, c))
        if i == 0:
            terms.append(f"({cs})")
        else:
            g = field.gen if i == 1 else f"{field.gen}^{i}"
            terms.append(g if cs == "1" else f"({cs})*{g}")
    return " + ".join(terms) if terms else "0"
