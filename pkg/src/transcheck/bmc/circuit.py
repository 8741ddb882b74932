"""Bit-blasting of 32-bit two's-complement arithmetic into CNF.

Literals are DIMACS-style signed ints. Variable 1 is the constant true, so
``T = 1`` and ``F = -1``; gates fold constants and are structurally hashed.
Bit-vectors are lists of literals, least significant bit first.
"""

from __future__ import annotations

from .ir import CapacityError

T = 1
F = -1
WIDTH = 32


class Circuit:
    def __init__(self, max_vars: int | None = None):
        self.num_vars = 1
        self.clauses: list[list[int]] = [[T]]
        self.max_vars = max_vars
        self._and: dict = {}
        self._xor: dict = {}
        self._ite: dict = {}

    def new_var(self) -> int:
        self.num_vars += 1
        if self.max_vars is not None and self.num_vars > self.max_vars:
            raise CapacityError(f"formula exceeds {self.max_vars} variables")
        return self.num_vars

    def new_vector(self, width: int = WIDTH) -> list[int]:
        return [self.new_var() for _ in range(width)]

    def add(self, clause):
        self.clauses.append(list(clause))

    # -- gates ----------------------------------------------------------------

    def AND(self, a: int, b: int) -> int:
        if a == F or b == F or a == -b:
            return F
        if a == T or a == b:
            return b
        if b == T:
            return a
        if a > b:
            a, b = b, a
        key = (a, b)
        o = self._and.get(key)
        if o is None:
            o = self.new_var()
            self._and[key] = o
            self.clauses.append([-o, a])
            self.clauses.append([-o, b])
            self.clauses.append([o, -a, -b])
        return o

    def OR(self, a: int, b: int) -> int:
        return -self.AND(-a, -b)

    def XOR(self, a: int, b: int) -> int:
        if a == F:
            return b
        if a == T:
            return -b
        if b == F:
            return a
        if b == T:
            return -a
        if a == b:
            return F
        if a == -b:
            return T
        sign = 1
        if a < 0:
            a, sign = -a, -sign
        if b < 0:
            b, sign = -b, -sign
        if a > b:
            a, b = b, a
        key = (a, b)
        o = self._xor.get(key)
        if o is None:
            o = self.new_var()
            self._xor[key] = o
            self.clauses.append([-o, a, b])
            self.clauses.append([-o, -a, -b])
            self.clauses.append([o, -a, b])
            self.clauses.append([o, a, -b])
        return o * sign

    def ITE(self, c: int, t: int, e: int) -> int:
        if c == T or t == e:
            return t
        if c == F:
            return e
        if t == -e:
            return -self.XOR(c, t)
        if t == T or t == c:
            return self.OR(c, e)
        if t == F or t == -c:
            return self.AND(-c, e)
        if e == T or e == -c:
            return self.OR(-c, t)
        if e == F or e == c:
            return self.AND(c, t)
        if c < 0:
            c, t, e = -c, e, t
        key = (c, t, e)
        o = self._ite.get(key)
        if o is None:
            o = self.new_var()
            self._ite[key] = o
            self.clauses.append([-o, -c, t])
            self.clauses.append([-o, c, e])
            self.clauses.append([o, -c, -t])
            self.clauses.append([o, c, -e])
            self.clauses.append([-o, t, e])
            self.clauses.append([o, -t, -e])
        return o

    def AND_many(self, lits) -> int:
        lits = [l for l in dict.fromkeys(lits) if l != T]
        if any(l == F for l in lits):
            return F
        s = set(lits)
        if any(-l in s for l in lits):
            return F
        if not lits:
            return T
        if len(lits) == 1:
            return lits[0]
        if len(lits) == 2:
            return self.AND(lits[0], lits[1])
        o = self.new_var()
        for l in lits:
            self.clauses.append([-o, l])
        self.clauses.append([o] + [-l for l in lits])
        return o

    def OR_many(self, lits) -> int:
        return -self.AND_many([-l for l in lits])

    def EQ(self, a: int, b: int) -> int:
        return -self.XOR(a, b)

    # -- bit-vectors ----------------------------------------------------------

    @staticmethod
    def const(value: int, width: int = WIDTH) -> list[int]:
        return [T if (value >> i) & 1 else F for i in range(width)]

    @staticmethod
    def is_const(bits) -> bool:
        return all(b == T or b == F for b in bits)

    @staticmethod
    def const_value(bits) -> int:
        v = sum(1 << i for i, b in enumerate(bits) if b == T)
        if bits and bits[-1] == T:
            v -= 1 << len(bits)
        return v

    def full_add(self, a, b, c):
        ab = self.XOR(a, b)
        s = self.XOR(ab, c)
        carry = self.OR(self.AND(a, b), self.AND(c, ab))
        return s, carry

    def add_vec(self, a, b, cin: int = F):
        out = []
        c = cin
        for x, y in zip(a, b):
            s, c = self.full_add(x, y, c)
            out.append(s)
        return out, c

    def plus(self, a, b):
        return self.add_vec(a, b)[0]

    def neg(self, a):
        return self.add_vec([-x for x in a], self.const(0, len(a)), T)[0]

    def minus(self, a, b):
        return self.add_vec(a, [-x for x in b], T)[0]

    def times(self, a, b):
        # keep the operand with more constant bits as the multiplier
        if sum(x in (T, F) for x in a) > sum(x in (T, F) for x in b):
            a, b = b, a
        n = len(a)
        acc = self.const(0, n)
        for i in range(n):
            if b[i] == F:
                continue
            partial = [F] * i + [self.AND(b[i], a[j]) for j in range(n - i)]
            acc = self.plus(acc, partial)
        return acc

    def uge(self, a, b) -> int:
        """Unsigned a >= b (carry out of a + ~b + 1)."""
        return self.add_vec(a, [-x for x in b], T)[1]

    def ult(self, a, b) -> int:
        return -self.uge(a, b)

    def slt(self, a, b) -> int:
        a2 = a[:-1] + [-a[-1]]
        b2 = b[:-1] + [-b[-1]]
        return self.ult(a2, b2)

    def eq(self, a, b) -> int:
        return self.AND_many([self.EQ(x, y) for x, y in zip(a, b)])

    def mux(self, c, a, b):
        return [self.ITE(c, x, y) for x, y in zip(a, b)]

    def nonzero(self, a) -> int:
        return self.OR_many(a)

    def udivrem(self, a, b):
        """Restoring division of unsigned vectors; quotient/remainder of a/b."""
        n = len(a)
        b1 = b + [F]
        rem = self.const(0, n + 1)
        q = [F] * n
        for i in range(n - 1, -1, -1):
            rem = [a[i]] + rem[:-1]
            diff, ge = self.add_vec(rem, [-x for x in b1], T)
            q[i] = ge
            rem = self.mux(ge, diff, rem)
        return q, rem[:n]

    def sdivrem(self, a, b):
        sa, sb = a[-1], b[-1]
        ua = self.mux(sa, self.neg(a), a)
        ub = self.mux(sb, self.neg(b), b)
        q, r = self.udivrem(ua, ub)
        q = self.mux(self.XOR(sa, sb), self.neg(q), q)
        r = self.mux(sa, self.neg(r), r)
        return q, r

    def shl(self, a, amount):
        out = list(a)
        n = len(a)
        for s in range(5):
            k = 1 << s
            shifted = [F] * k + out[:n - k]
            out = self.mux(amount[s], shifted, out)
        return out

    def ashr(self, a, amount):
        out = list(a)
        n = len(a)
        for s in range(5):
            k = 1 << s
            shifted = out[k:] + [out[-1]] * k
            out = self.mux(amount[s], shifted, out)
        return out

    def bool_to_vec(self, lit: int, width: int = WIDTH) -> list[int]:
        return [lit] + [F] * (width - 1)
