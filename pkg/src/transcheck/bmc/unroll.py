"""Loop unrolling and call inlining for checked MiniC programs.

Loops become nested conditionals ``k`` deep followed by an unwinding check;
calls are inlined up to depth ``d``. break/continue/return are compiled to
flag variables, and the statements after a possible jump are wrapped in a
conditional on those flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..minic.nodes import (Assert, Assign, Assume, Binary, Block, Break, Call,
                           CompoundAssign, Cond, Continue, Decl, ExprStmt, For,
                           If, Index, IntLit, MiniCProgram, NONDET_NAMES,
                           Return, StrLit, Unary, Var, While)
from ..util import deep_recursion
from .ir import (CapacityError, EBin, EConst, EIte, ENondet, ESel, EUn, EVar, FALSE, TRUE,
                 UAssign, UAssume, UCheck, UIf, eval_expr)

UNWOUND = "__unwound"


class RecursionBound(Exception):
    """Call inlining exceeded the configured depth."""

    def __init__(self, name: str, depth: int):
        super().__init__(f"inlining '{name}' exceeds call depth {depth}")
        self.name = name
        self.depth = depth


@dataclass
class UnrolledProgram:
    body: list
    k: int
    d: int
    policy: str                    # "fail" or "assume"
    nondets: list = field(default_factory=list)
    size: int = 0

    def origins(self) -> set:
        out = set()
        for s in walk(self.body):
            if getattr(s, "origin", None) is not None:
                out.add(s.origin)
        return out


def walk(stmts):
    """All statements of a loop-free body in program order."""
    stack = [iter(stmts)]
    while stack:
        for s in stack[-1]:
            yield s
            if isinstance(s, UIf):
                stack.append(iter(s.other))
                stack.append(iter(s.then))
                break
        else:
            stack.pop()


def _jumps(s) -> set:
    """Jump kinds ('ret', 'brk', 'cont') a statement may perform at this level."""
    if isinstance(s, Return):
        return {"ret"}
    if isinstance(s, Break):
        return {"brk"}
    if isinstance(s, Continue):
        return {"cont"}
    if isinstance(s, Block):
        out = set()
        for x in s.stmts:
            out |= _jumps(x)
        return out
    if isinstance(s, If):
        out = _jumps(s.then)
        if s.other is not None:
            out |= _jumps(s.other)
        return out
    if isinstance(s, (While, For)):
        return {"ret"} & _jumps(s.body)
    return set()


def _not_any(flags):
    e = None
    for f in flags:
        t = EUn("!", EVar(f))
        e = t if e is None else EBin("&&", e, t)
    return e


class _Frame:
    """One inlined function instance."""

    def __init__(self, prefix, depth):
        self.prefix = prefix
        self.depth = depth
        self.scopes = [{}]
        self.strings = [{}]
        self.ret_flag = prefix + "ret"
        self.ret_val = prefix + "rv"
        self.loops = []    # stack of (brk flag, cont flag)
        self.counter = {}


class _Unroller:
    def __init__(self, program: MiniCProgram, k: int, d: int, policy: str,
                 max_statements: int):
        self.program = program
        self.k = k
        self.d = d
        self.policy = policy
        self.max_statements = max_statements
        self.instances = 0
        self.temps = 0
        self.nondets: list[str] = []
        self.size = 0
        self.loop_id = 0

    def grow(self, n=1):
        self.size += n
        if self.size > self.max_statements:
            raise CapacityError(f"unrolled program exceeds {self.max_statements} statements")

    def temp(self, fr, hint="t"):
        self.temps += 1
        return f"{fr.prefix}{hint}~{self.temps}"

    # -- names --------------------------------------------------------------

    def declare(self, fr, name):
        n = fr.counter.get(name, 0)
        fr.counter[name] = n + 1
        unique = fr.prefix + name + (f".{n}" if n else "")
        fr.scopes[-1][name] = unique
        return unique

    def resolve(self, fr, name):
        for scope in reversed(fr.scopes):
            if name in scope:
                return scope[name]
        raise KeyError(name)

    def string(self, fr, name):
        for scope in reversed(fr.strings):
            if name in scope:
                return scope[name]
        return None

    def push(self, fr):
        fr.scopes.append({})
        fr.strings.append({})

    def pop(self, fr):
        fr.scopes.pop()
        fr.strings.pop()

    # -- entry ----------------------------------------------------------------

    def run(self):
        main = self.program.function("main")
        fr = _Frame("main#0:", 0)
        out = [UAssign(fr.ret_flag, FALSE, None, "flag"),
               UAssign(fr.ret_val, FALSE, None, "flag")]
        if self.policy == "fail" and self._has_loops():
            out.append(UAssign(UNWOUND, FALSE, None, "flag"))
        out += self.seq(main.body.stmts, fr)
        return out

    def _has_loops(self):
        def has(s):
            if isinstance(s, (While, For)):
                return True
            if isinstance(s, Block):
                return any(has(x) for x in s.stmts)
            if isinstance(s, If):
                return has(s.then) or (s.other is not None and has(s.other))
            return False
        return any(has(f.body) for f in self.program.functions)

    # -- statements ---------------------------------------------------------

    def seq(self, stmts, fr) -> list:
        out = []
        for i, s in enumerate(stmts):
            if isinstance(s, (Return, Break, Continue)):
                out += self.stmt(s, fr)
                return out   # the rest is dead
            out += self.stmt(s, fr)
            jumps = _jumps(s)
            rest = stmts[i + 1:]
            if jumps and rest:
                flags = []
                if "ret" in jumps:
                    flags.append(fr.ret_flag)
                if "brk" in jumps:
                    flags.append(fr.loops[-1][0])
                if "cont" in jumps:
                    flags.append(fr.loops[-1][1])
                out.append(UIf(_not_any(flags), self.seq(rest, fr), [], None))
                return out
        return out

    def block(self, b: Block, fr) -> list:
        self.push(fr)
        out = self.seq(b.stmts, fr)
        self.pop(fr)
        return out

    def stmt(self, s, fr) -> list:
        self.grow()
        if isinstance(s, Block):
            return self.block(s, fr)
        if isinstance(s, Decl):
            if s.ctype == "str":
                pre, data = [], self.str_value(s.init, fr)
                fr.strings[-1][s.name] = data
                self.declare(fr, s.name)
                return pre
            if s.init is None:
                name = self.declare(fr, s.name)
                return [UAssign(name, FALSE, None, "decl")]
            pre, e = self.expr(s.init, fr)
            name = self.declare(fr, s.name)
            return pre + [UAssign(name, e, s.sid, "decl")]
        if isinstance(s, Assign):
            pre, e = self.expr(s.value, fr)
            return pre + [UAssign(self.resolve(fr, s.name), e, s.sid, "assign")]
        if isinstance(s, CompoundAssign):
            pre, e = self.expr(s.value, fr)
            target = self.resolve(fr, s.name)
            pre2, val = self.arith(s.op, EVar(target), e, s.value, fr)
            return pre + pre2 + [UAssign(target, val, s.sid, "compound")]
        if isinstance(s, If):
            pre, c = self.expr(s.cond, fr)
            then = self.block(s.then, fr)
            other = self.block(s.other, fr) if s.other is not None else []
            return pre + [UIf(c, then, other, s.sid)]
        if isinstance(s, While):
            return self.loop(s.cond, s.body, None, s.sid, s.span, fr)
        if isinstance(s, For):
            self.push(fr)
            out = self.stmt(s.init, fr) if s.init is not None else []
            out += self.loop(s.cond, s.body, s.update, s.sid, s.span, fr)
            self.pop(fr)
            return out
        if isinstance(s, Break):
            return [UAssign(fr.loops[-1][0], TRUE, None, "flag")]
        if isinstance(s, Continue):
            return [UAssign(fr.loops[-1][1], TRUE, None, "flag")]
        if isinstance(s, Return):
            out = []
            if s.value is not None:
                pre, e = self.expr(s.value, fr)
                out = pre + [UAssign(fr.ret_val, e, s.sid, "return")]
            out.append(UAssign(fr.ret_flag, TRUE, None, "flag"))
            return out
        if isinstance(s, Assert):
            pre, c = self.expr(s.cond, fr)
            return pre + [UCheck(c, "assert", s.sid, s.span)]
        if isinstance(s, Assume):
            pre, c = self.expr(s.cond, fr)
            return pre + [UAssume(c, "assume", s.sid, s.span)]
        if isinstance(s, ExprStmt):
            pre, _ = self.expr(s.expr, fr)
            return pre
        raise TypeError(type(s).__name__)

    def loop(self, cond, body, update, sid, span, fr) -> list:
        self.loop_id += 1
        brk = f"{fr.prefix}brk~{self.loop_id}"
        cont = f"{fr.prefix}cont~{self.loop_id}"
        returns = "ret" in _jumps(body)
        uses_brk = _has_direct(body, Break)
        uses_cont = _has_direct(body, Continue)
        out = []
        if uses_brk:
            out.append(UAssign(brk, FALSE, None, "flag"))
        fr.loops.append((brk, cont))

        def iteration(n):
            if cond is not None:
                pre, c = self.expr(cond, fr)
            else:
                pre, c = [], TRUE
            if n == self.k:
                if self.policy == "fail":
                    tail = [UCheck(EUn("!", c), "unwind", sid, span),
                            UIf(c, [UAssign(UNWOUND, TRUE, None, "flag")], [], None)]
                else:
                    tail = [UAssume(EUn("!", c), "unwind", sid, span)]
                return pre + tail
            inner = []
            if uses_cont:
                inner.append(UAssign(cont, FALSE, None, "flag"))
            inner += self.block(body, fr)
            rest = []
            if update is not None:
                rest += self.stmt(update, fr)
            rest += iteration(n + 1)
            stop = []
            if uses_brk:
                stop.append(brk)
            if returns:
                stop.append(fr.ret_flag)
            if stop:
                inner.append(UIf(_not_any(stop), rest, [], None))
            else:
                inner += rest
            return pre + [UIf(c, inner, [], sid)]

        out += iteration(0)
        fr.loops.pop()
        return out

    # -- expressions --------------------------------------------------------

    def str_value(self, e, fr) -> bytes:
        if isinstance(e, StrLit):
            return e.value
        if isinstance(e, Var):
            data = self.string(fr, e.name)
            if data is None:
                raise KeyError(e.name)
            return data
        raise TypeError("string expression expected")

    def arith(self, op, a, b, b_node, fr):
        """``a op b`` plus the division-by-zero obligation where needed."""
        pre = []
        if op in ("/", "%"):
            pre.append(UCheck(EBin("!=", b, FALSE), "div", None, b_node.span))
        return pre, EBin(op, a, b)

    def expr(self, e, fr):
        """Returns (pre-statements, pure expression)."""
        if isinstance(e, IntLit):
            v = ((e.value + 0x80000000) & 0xFFFFFFFF) - 0x80000000
            return [], EConst(v)
        if isinstance(e, Var):
            return [], EVar(self.resolve(fr, e.name))
        if isinstance(e, Index):
            data = self.str_value(e.base, fr)
            pre, i = self.expr(e.index, fr)
            ok = EBin("&&", EBin(">=", i, FALSE), EBin("<=", i, EConst(len(data))))
            pre.append(UCheck(ok, "bounds", None, e.span))
            return pre, ESel(data + b"\0", i)
        if isinstance(e, Unary):
            pre, a = self.expr(e.operand, fr)
            return pre, EUn(e.op, a)
        if isinstance(e, Binary):
            pa, a = self.expr(e.left, fr)
            pb, b = self.expr(e.right, fr)
            if e.op in ("&&", "||"):
                if not pb:
                    return pa, EBin(e.op, a, b)
                t = self.temp(fr)
                test = EBin("!=", a, FALSE)
                first = UAssign(t, test, None, "temp")
                second = UAssign(t, EBin("!=", b, FALSE), None, "temp")
                if e.op == "&&":
                    branch = UIf(EVar(t), pb + [second], [], None)
                else:
                    branch = UIf(EUn("!", EVar(t)), pb + [second], [], None)
                return pa + [first, branch], EVar(t)
            pre, val = self.arith(e.op, a, b, e.right, fr)
            return pa + pb + pre, val
        if isinstance(e, Cond):
            pc, c = self.expr(e.cond, fr)
            pt, a = self.expr(e.then, fr)
            po, b = self.expr(e.other, fr)
            if not pt and not po:
                return pc, EIte(c, a, b)
            t = self.temp(fr)
            return pc + [UIf(c, pt + [UAssign(t, a, None, "temp")],
                             po + [UAssign(t, b, None, "temp")], None)], EVar(t)
        if isinstance(e, Call):
            return self.call(e, fr)
        if isinstance(e, StrLit):
            raise TypeError("string literal in int context")
        raise TypeError(type(e).__name__)

    def call(self, e: Call, fr):
        name = e.name
        user = {f.name: f for f in self.program.functions}
        if name in user:
            f = user[name]
            if fr.depth + 1 > self.d:
                raise RecursionBound(name, self.d)
            self.instances += 1
            callee = _Frame(f"{name}#{self.instances}:", fr.depth + 1)
            pre = []
            for p, a in zip(f.params, e.args):
                if p.ctype == "str":
                    callee.strings[0][p.name] = self.str_value(a, fr)
                    callee.scopes[0][p.name] = callee.prefix + p.name
                else:
                    pa, v = self.expr(a, fr)
                    pre += pa
                    pre.append(UAssign(self.declare(callee, p.name), v, None, "param"))
            pre.append(UAssign(callee.ret_flag, FALSE, None, "flag"))
            pre.append(UAssign(callee.ret_val, FALSE, None, "flag"))
            pre += self.seq(f.body.stmts, callee)
            return pre, EVar(callee.ret_val)
        if name in NONDET_NAMES:
            t = self.temp(fr, "nondet")
            self.nondets.append(t)
            return [UAssign(t, ENondet(t), None, "temp")], EVar(t)
        pre = []
        vals = []
        for a in e.args:
            if name == "printf" and isinstance(a, (StrLit,)):
                continue
            if name == "printf" and isinstance(a, Var) and self.string(fr, a.name) is not None:
                continue
            pa, v = self.expr(a, fr)
            pre += pa
            vals.append(v)
        if name == "abs":
            (x,) = vals
            return pre, EIte(EBin("<", x, FALSE), EUn("-", x), x)
        if name == "min":
            x, y = vals
            return pre, EIte(EBin("<", x, y), x, y)
        if name == "max":
            x, y = vals
            return pre, EIte(EBin(">", x, y), x, y)
        if name == "printf":
            return pre, FALSE
        raise TypeError(f"unknown intrinsic {name}")


def _has_direct(body, kind) -> bool:
    """Whether ``body`` contains a ``kind`` statement targeting this loop."""
    for s in body.stmts if isinstance(body, Block) else (body,):
        if isinstance(s, kind):
            return True
        if isinstance(s, Block) and _has_direct(s, kind):
            return True
        if isinstance(s, If) and (_has_direct(s.then, kind) or
                                  (s.other is not None and _has_direct(s.other, kind))):
            return True
    return False


def execute_unrolled(u: UnrolledProgram, inputs: dict | None = None):
    """Concretely run an unrolled program.

    Returns ("Completed", None), ("Violated", check) for the first failing
    obligation, or ("Blocked", assume) when an assumption is false.
    """
    env: dict = {}
    stack = [iter(u.body)]
    while stack:
        for s in stack[-1]:
            if isinstance(s, UAssign):
                env[s.target] = eval_expr(s.expr, env, inputs)
            elif isinstance(s, UIf):
                branch = s.then if eval_expr(s.cond, env, inputs) else s.other
                stack.append(iter(branch))
                break
            elif isinstance(s, UCheck):
                if not _blocked(env) and not eval_expr(s.cond, env, inputs):
                    return "Violated", s
            elif isinstance(s, UAssume):
                if not eval_expr(s.cond, env, inputs):
                    return "Blocked", s
        else:
            stack.pop()
    return "Completed", None


def _blocked(env) -> bool:
    return bool(env.get(UNWOUND, 0))


def unroll(program: MiniCProgram, k: int, d: int, policy: str = "fail",
           max_statements: int = 2_000_000) -> UnrolledProgram:
    """Loop-free, call-free version of ``main`` valid for ``k`` iterations per
    loop and call depth ``d``."""
    if not program.checked:
        raise ValueError("program must be typechecked first")
    if k < 1 or d < 1:
        raise ValueError("k and d must be positive")
    if policy not in ("fail", "assume"):
        raise ValueError(f"unknown unwinding policy {policy!r}")
    u = _Unroller(program, k, d, policy, max_statements)
    with deep_recursion():
        body = u.run()
    return UnrolledProgram(body, k, d, policy, u.nondets, u.size)
