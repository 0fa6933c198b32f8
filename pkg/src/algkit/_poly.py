"""Dense univariate polynomial kernels over the prime coefficient domains.

Three payload conventions, chosen per characteristic:

* p == 2: a polynomial is an int bitmask, bit i = coefficient of x^i
  (zero polynomial = 0).  Addition is xor, multiplication is carry-less.
* p odd prime: a tuple of ints in [0, p), no trailing zeros, () = 0.
* p == 0: a tuple of fractions.Fraction, no trailing zeros, () = 0.

The higher layers only go through the PolyOps facade returned by
`poly_ops(p)`, so the representation never leaks.
"""

from fractions import Fraction


class PolyOps:
    """Facade over one coefficient domain; stateless, cached per p."""

    __slots__ = ("p", "zero", "one", "x")

    def __init__(self, p):
        self.p = p
        if p == 2:
            self.zero, self.one, self.x = 0, 1, 2
        else:
            self.zero = ()
            one = Fraction(1) if p == 0 else 1
            self.one = (one,)
            zero = Fraction(0) if p == 0 else 0
            self.x = (zero, one)

    # -- predicates / structure ------------------------------------------

    def is_zero(self, f):
        return f == 0 if self.p == 2 else not f

    def degree(self, f):
        # degree of the zero polynomial is -1 (the distinguished sentinel)
        if self.p == 2:
            return f.bit_length() - 1
        return len(f) - 1

    def const(self, c):
        """Constant polynomial from an integer (or Fraction when p == 0)."""
        p = self.p
        if p == 0:
            c = Fraction(c)
            return (c,) if c else ()
        c %= p
        if p == 2:
            return c
        return (c,) if c else ()

    def coeff(self, f, i):
        if self.p == 2:
            return (f >> i) & 1
        return f[i] if i < len(f) else (Fraction(0) if self.p == 0 else 0)

    def coeffs(self, f):
        """Coefficient list, low degree first (empty for zero)."""
        if self.p == 2:
            return [(f >> i) & 1 for i in range(f.bit_length())]
        return list(f)

    def from_coeffs(self, cs):
        p = self.p
        if p == 2:
            v = 0
            for i, c in enumerate(cs):
                if c % 2:
                    v |= 1 << i
            return v
        if p == 0:
            cs = [Fraction(c) for c in cs]
        else:
            cs = [c % p for c in cs]
        while cs and not cs[-1]:
            cs.pop()
        return tuple(cs)

    # -- ring operations ---------------------------------------------------

    def add(self, f, g):
        p = self.p
        if p == 2:
            return f ^ g
        if len(f) < len(g):
            f, g = g, f
        out = list(f)
        for i, c in enumerate(g):
            out[i] = (out[i] + c) % p if p else out[i] + c
        while out and not out[-1]:
            out.pop()
        return tuple(out)

    def neg(self, f):
        p = self.p
        if p == 2:
            return f
        if p == 0:
            return tuple(-c for c in f)
        return tuple((-c) % p for c in f)

    def sub(self, f, g):
        return self.add(f, self.neg(g))

    def mul(self, f, g):
        p = self.p
        if p == 2:
            out = 0
            while g:
                if g & 1:
                    out ^= f
                f <<= 1
                g >>= 1
            return out
        if not f or not g:
            return ()
        out = [Fraction(0) if p == 0 else 0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if not a:
                continue
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p if p else out[i + j] + a * b
        while out and not out[-1]:
            out.pop()
        return tuple(out)

    def scale(self, f, c):
        p = self.p
        if p == 2:
            return f if c % 2 else 0
        if p == 0:
            c = Fraction(c)
            return tuple(a * c for a in f) if c else ()
        c %= p
        if not c:
            return ()
        return tuple((a * c) % p for a in f)

    def divmod(self, f, g):
        """Polynomial division; g must be nonzero."""
        p = self.p
        if self.is_zero(g):
            raise ZeroDivisionError("polynomial division by zero")
        if p == 2:
            q = 0
            dg = g.bit_length() - 1
            while f.bit_length() - 1 >= dg:
                shift = f.bit_length() - 1 - dg
                q |= 1 << shift
                f ^= g << shift
            return q, f
        r = list(f)
        dg = len(g) - 1
        lead_inv = Fraction(1, g[-1]) if p == 0 else pow(g[-1], p - 2, p)
        q = [Fraction(0) if p == 0 else 0] * max(0, len(r) - dg)
        while len(r) - 1 >= dg and r:
            c = r[-1] * lead_inv
            c = c if p == 0 else c % p
            shift = len(r) - 1 - dg
            q[shift] = c
            for i, b in enumerate(g):
                r[shift + i] = (r[shift + i] - c * b) % p if p else r[shift + i] - c * b
            while r and not r[-1]:
                r.pop()
        while q and not q[-1]:
            q.pop()
        return tuple(q), tuple(r)

    def mod(self, f, g):
        return self.divmod(f, g)[1]

    def gcd(self, f, g):
        while not self.is_zero(g):
            f, g = g, self.mod(f, g)
        return self.monic(f)[0]

    def monic(self, f):
        """Return (monic multiple, leading coefficient); (0, 1) for zero."""
        p = self.p
        if self.is_zero(f):
            return f, (Fraction(1) if p == 0 else 1)
        if p == 2:
            return f, 1
        lead = f[-1]
        if p == 0:
            inv = Fraction(1, lead)
            return tuple(c * inv for c in f), lead
        inv = pow(lead, p - 2, p)
        return tuple((c * inv) % p for c in f), lead

    def pow_mod(self, f, n, m):
        out = self.one
        f = self.mod(f, m)
        while n:
            if n & 1:
                out = self.mod(self.mul(out, f), m)
            f = self.mod(self.mul(f, f), m)
            n >>= 1
        return out

    def shift(self, f, n):
        """Multiply by x^n."""
        if self.p == 2:
            return f << n
        if not f:
            return f
        zero = Fraction(0) if self.p == 0 else 0
        return (zero,) * n + f

    def substitute_xq(self, f, q):
        """f(x) -> f(x^q)."""
        cs = self.coeffs(f)
        out = []
        for c in cs:
            out.append(c)
            out.extend([0] * (q - 1))
        return self.from_coeffs(out[: (len(cs) - 1) * q + 1] if cs else [])

    def qth_root(self, f, q):
        """Inverse of x -> x^q on polynomials supported on q-divisible
        exponents with coefficients fixed by Frobenius; None when it fails.
        Valid over F_p for q a power of p (coefficients satisfy c^q = c)."""
        cs = self.coeffs(f)
        out = []
        for i, c in enumerate(cs):
            if i % q == 0:
                out.append(c)
            elif c:
                return None
        return self.from_coeffs(out)

    def monic_divisors(self, f, limit=20000):
        """All monic divisors of a nonzero f, by bounded brute force."""
        p = self.p
        if p == 0:
            raise ValueError("divisor enumeration needs a finite coefficient field")
        d = self.degree(f)
        total = sum(p ** i for i in range(d // 2 + 1))
        if total > limit:
            raise ValueError("too many candidate divisors")
        divs = {self.one, self.monic(f)[0]}
        # enumerate monic candidates of degree 1 .. d//2; pair with cofactor
        for deg in range(1, d // 2 + 1):
            for code in range(p ** deg):
                cs = []
                c = code
                for _ in range(deg):
                    cs.append(c % p)
                    c //= p
                cs.append(1)
                g = self.from_coeffs(cs)
                q, r = self.divmod(f, g)
                if self.is_zero(r):
                    divs.add(g)
                    divs.add(self.monic(q)[0])
        return divs

    def to_string(self, f, var):
        """Human/grammar form, highest degree first; reparses exactly."""
        if self.is_zero(f):
            return "0"
        p = self.p
        terms = []
        cs = self.coeffs(f)
        for i in range(len(cs) - 1, -1, -1):
            c = cs[i]
            if not c:
                continue
            if i == 0:
                terms.append(_coeff_str(c))
            else:
                xi = var if i == 1 else f"{var}^{i}"
                if c == 1:
                    terms.append(xi)
                else:
                    terms.append(f"{_coeff_str(c)}*{xi}")
        return " + ".join(terms)


def _coeff_str(c):
    if isinstance(c, Fraction) and c.denominator != 1:
        if c < 0:
            return f"(0 - {-c.numerator}/{c.denominator})"
        return f"{c.numerator}/{c.denominator}"
    if c < 0:
        return f"(0 - {-c})"
    return str(c)


_CACHE = {}


def poly_ops(p):
    ops = _CACHE.get(p)
    if ops is None:
        ops = _CACHE[p] = PolyOps(p)
    return ops
