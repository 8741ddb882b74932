"""Recursive-descent parser for MiniC.

Anything outside the subset (pointers other than ``const char *``, structs,
casts other than ``(int)``, goto, heap allocation, globals, ...) is rejected
with a :class:`ParseError`; the pipeline treats that as "does not compile".
"""

from __future__ import annotations

from .lexer import MiniCError, Token, tokenize_minic
from .nodes import (Assert, Assign, Assume, ASSUME_NAMES, Binary, Block, Break,
                    Call, CompoundAssign, Cond, Continue, Decl, ExprStmt, For,
                    FunctionDef, If, Index, IntLit, MiniCProgram, Param, Return,
                    Span, StrLit, Unary, Var, While)


class ParseError(MiniCError):
    pass


_BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}

_COMPOUND_OPS = {"+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}

_REJECTED = {
    "struct": "structs", "union": "unions", "goto": "goto",
    "long": "long integers", "short": "short integers",
    "unsigned": "unsigned integers", "signed": "explicitly signed types",
    "float": "floating point", "double": "floating point",
    "sizeof": "sizeof", "typedef": "typedef", "enum": "enums",
    "static": "static storage", "do": "do-while loops", "switch": "switch",
    "case": "switch", "default": "switch", "extern": "extern declarations",
    "volatile": "volatile", "bool": "bool", "_Bool": "bool",
}


_ALLOCATORS = {"malloc", "calloc", "realloc", "free", "alloca"}


class _Parser:
    def __init__(self, source: str):
        self.source = source
        toks = [t for t in tokenize_minic(source) if t.kind != "pp"]
        end = len(source)
        last_line = source.count("\n") + 1
        eof_col = end - (source.rfind("\n") + 1) + 1
        toks.append(Token("eof", "<eof>", Span(last_line, eof_col, end, end)))
        self.toks = toks
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def look(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def is_op(self, text: str, k: int = 0) -> bool:
        t = self.look(k) if k else self.tok
        return t.kind == "op" and t.text == text

    def is_kw(self, text: str, k: int = 0) -> bool:
        t = self.look(k) if k else self.tok
        return t.kind == "kw" and t.text == text

    def accept(self, text: str) -> Token | None:
        if self.tok.kind in ("op", "kw") and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            self.error(f"expected '{text}', found '{self.tok.text}'")
        return t

    def expect_ident(self) -> Token:
        if self.tok.kind != "id":
            self.error(f"expected identifier, found '{self.tok.text}'")
        return self.advance()

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(tok.span, message)

    def span(self, first: Token, last: Token) -> Span:
        return Span(first.span.line, first.span.col, first.span.start, last.span.end)

    @property
    def prev(self) -> Token:
        return self.toks[self.pos - 1]

    def reject_keyword(self):
        t = self.tok
        if t.kind == "kw" and t.text in _REJECTED:
            self.error(f"{_REJECTED[t.text]} ('{t.text}') is outside the MiniC subset")

    # -- types --------------------------------------------------------------

    def at_type(self) -> bool:
        t = self.tok
        return t.kind == "kw" and t.text in ("int", "void", "char", "const")

    def parse_type(self) -> str:
        """Returns "int", "void", "char" or "str" (const char pointer)."""
        self.reject_keyword()
        while self.accept("const"):
            pass
        self.reject_keyword()
        t = self.tok
        if not (t.kind == "kw" and t.text in ("int", "void", "char")):
            self.error(f"expected a type, found '{t.text}'")
        self.advance()
        base = t.text
        while self.accept("const"):
            pass
        stars = 0
        while self.is_op("*"):
            star = self.advance()
            stars += 1
            while self.accept("const"):
                pass
            if base != "char" or stars > 1:
                self.error("pointer types other than const char * are outside the MiniC subset", star)
        if stars:
            return "str"
        return base

    # -- top level ----------------------------------------------------------

    def parse_program(self) -> MiniCProgram:
        functions: list[FunctionDef] = []
        seen: dict[str, FunctionDef] = {}
        protos: dict[str, tuple] = {}
        while self.tok.kind != "eof":
            self.reject_keyword()
            first = self.tok
            ret = self.parse_type()
            if ret == "char":
                self.error("char return types are outside the MiniC subset", first)
            name_tok = self.expect_ident()
            if not self.is_op("("):
                self.error("global variables are outside the MiniC subset", name_tok)
            params = self.parse_params()
            if self.accept(";"):
                protos[name_tok.text] = (ret, params)
                continue
            if ret == "str":
                self.error("pointer return types are outside the MiniC subset", first)
            body = self.parse_block()
            fn = FunctionDef(self.span(first, self.prev), name_tok.text, params, ret, body)
            if fn.name in seen:
                raise ParseError(name_tok.span, f"redefinition of function '{fn.name}'")
            seen[fn.name] = fn
            functions.append(fn)
        for name, (ret, params) in protos.items():
            fn = seen.get(name)
            if fn is not None and (fn.ret, tuple(p.ctype for p in fn.params)) != \
                    (ret, tuple(p.ctype for p in params)):
                raise ParseError(fn.span, f"conflicting declaration of '{name}'")
        return MiniCProgram(tuple(functions), self.source)

    def parse_params(self) -> tuple:
        self.expect("(")
        params: list[Param] = []
        if self.is_kw("void") and self.is_op(")", 1):
            self.advance()
        elif not self.is_op(")"):
            while True:
                ptype = self.parse_type()
                if ptype == "void":
                    self.error("void parameter")
                pname = self.expect_ident()
                if self.accept("["):
                    self.expect("]")
                    if ptype != "char":
                        self.error("array parameters other than char[] are outside the MiniC subset", pname)
                    ptype = "str"
                if ptype == "char":
                    ptype = "int"
                params.append(Param(pname.text, ptype))
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(params)

    # -- statements ---------------------------------------------------------

    def parse_block(self) -> Block:
        first = self.expect("{")
        stmts: list = []
        while not self.is_op("}"):
            if self.tok.kind == "eof":
                self.error("expected '}' before end of input")
            stmts.extend(self.parse_statement())
        last = self.advance()
        return Block(self.span(first, last), tuple(stmts))

    def parse_body(self) -> Block:
        """A statement used as a loop/branch body, always wrapped in a Block."""
        if self.is_op("{"):
            return self.parse_block()
        first = self.tok
        stmts = self.parse_statement()
        for s in stmts:
            if isinstance(s, Decl):
                raise ParseError(s.span, "declaration is not allowed as a bare body")
        return Block(self.span(first, self.prev), tuple(stmts))

    def parse_statement(self) -> list:
        t = self.tok
        self.reject_keyword()
        if self.is_op("{"):
            return [self.parse_block()]
        if self.is_op(";"):
            self.advance()
            return []
        if self.at_type():
            decls = self.parse_declaration()
            self.expect(";")
            last = self.prev
            return [Decl(self.span(first, last), d.ctype, d.name, d.init)
                    for first, d in decls]
        if t.kind == "kw":
            if t.text == "if":
                return [self.parse_if()]
            if t.text == "while":
                self.advance()
                self.expect("(")
                cond = self.parse_expr()
                close = self.expect(")")
                head = self.span(t, close)
                return [While(head, cond, self.parse_body())]
            if t.text == "for":
                return [self.parse_for()]
            if t.text == "break":
                self.advance()
                last = self.expect(";")
                return [Break(self.span(t, last))]
            if t.text == "continue":
                self.advance()
                last = self.expect(";")
                return [Continue(self.span(t, last))]
            if t.text == "return":
                self.advance()
                value = None if self.is_op(";") else self.parse_expr()
                last = self.expect(";")
                return [Return(self.span(t, last), value)]
            if t.text == "else":
                self.error("'else' without a matching 'if'")
        stmt = self.parse_simple()
        last = self.expect(";")
        return [self._respan(stmt, self.span(t, last))]

    @staticmethod
    def _respan(stmt, span):
        return type(stmt)(span, *[getattr(stmt, f) for f in stmt.__dataclass_fields__
                                  if f not in ("span", "sid")])

    def parse_if(self) -> If:
        t = self.advance()
        self.expect("(")
        cond = self.parse_expr()
        close = self.expect(")")
        then = self.parse_body()
        other = None
        if self.accept("else"):
            if self.is_kw("if"):
                first = self.tok
                nested = self.parse_if()
                other = Block(self.span(first, self.prev), (nested,))
            else:
                other = self.parse_body()
        return If(self.span(t, close), cond, then, other)

    def parse_for(self) -> For:
        t = self.advance()
        self.expect("(")
        init = None
        if self.at_type():
            decls = self.parse_declaration()
            if len(decls) != 1:
                self.error("multiple declarations in a for initialiser are outside the MiniC subset")
            first, d = decls[0]
            init = Decl(self.span(first, self.prev), d.ctype, d.name, d.init)
        elif not self.is_op(";"):
            first = self.tok
            init = self._respan(self.parse_simple(), self.span(first, self.prev))
        self.expect(";")
        cond = None if self.is_op(";") else self.parse_expr()
        self.expect(";")
        update = None
        if not self.is_op(")"):
            first = self.tok
            update = self._respan(self.parse_simple(), self.span(first, self.prev))
            if not isinstance(update, (Assign, CompoundAssign, ExprStmt)):
                self.error("unsupported for-loop update")
        close = self.expect(")")
        return For(self.span(t, close), init, cond, update, self.parse_body())

    def parse_declaration(self) -> list:
        """``type declarator (, declarator)*`` without the trailing ';'."""
        first = self.tok
        base = self.parse_type()
        if base == "void":
            self.error("void variables are not allowed", first)
        out = []
        while True:
            start = self.tok
            ctype = base
            while self.is_op("*"):
                self.error("pointer types other than const char * are outside the MiniC subset")
            name = self.expect_ident()
            if self.accept("["):
                if not self.is_op("]"):
                    self.error("arrays other than char[] string constants are outside the MiniC subset")
                self.expect("]")
                if base != "char":
                    self.error("arrays other than char[] string constants are outside the MiniC subset", name)
                ctype = "str"
            if ctype == "char":
                ctype = "int"
            init = None
            if self.accept("="):
                if self.is_op("{"):
                    self.error("initialiser lists are outside the MiniC subset")
                init = self.parse_expr()
            elif ctype == "str":
                self.error("string variables must be initialised with a literal", name)
            out.append((first if not out else start,
                        Decl(None, ctype, name.text, init)))
            if not self.accept(","):
                break
        return out

    def parse_simple(self):
        """Assignment, increment, or expression statement (no ';')."""
        t = self.tok
        if self.is_op("++") or self.is_op("--"):
            op = self.advance().text
            name = self.expect_ident()
            return CompoundAssign(None, op[0], name.text, IntLit(name.span, 1))
        if t.kind == "id":
            nxt = self.look()
            if nxt.kind == "op":
                if nxt.text == "=":
                    self.advance()
                    self.advance()
                    return Assign(None, t.text, self.parse_assign_rhs())
                if nxt.text in _COMPOUND_OPS:
                    self.advance()
                    self.advance()
                    return CompoundAssign(None, nxt.text[:-1], t.text, self.parse_assign_rhs())
                if nxt.text in ("++", "--"):
                    self.advance()
                    self.advance()
                    return CompoundAssign(None, nxt.text[0], t.text, IntLit(nxt.span, 1))
        expr = self.parse_expr()
        if self.tok.kind == "op" and (self.tok.text == "=" or self.tok.text in _COMPOUND_OPS):
            self.error("assignment to this target is outside the MiniC subset")
        if isinstance(expr, Call) and expr.name == "assert":
            if len(expr.args) != 1:
                self.error("assert takes exactly one argument", t)
            return Assert(None, expr.args[0])
        if isinstance(expr, Call) and expr.name in ASSUME_NAMES:
            if len(expr.args) != 1:
                self.error("assume takes exactly one argument", t)
            return Assume(None, expr.args[0])
        return ExprStmt(None, expr)

    def parse_assign_rhs(self):
        e = self.parse_expr()
        if self.tok.kind == "op" and (self.tok.text == "=" or self.tok.text in _COMPOUND_OPS):
            self.error("chained assignment is outside the MiniC subset")
        return e

    # -- expressions --------------------------------------------------------

    def parse_expr(self):
        first = self.tok
        c = self.parse_binary(1)
        if self.accept("?"):
            then = self.parse_expr()
            self.expect(":")
            other = self.parse_expr()
            return Cond(self.span(first, self.prev), c, then, other)
        return c

    def parse_binary(self, min_prec: int):
        first = self.tok
        left = self.parse_unary()
        while True:
            t = self.tok
            prec = _BINARY_PREC.get(t.text) if t.kind == "op" else None
            if prec is None or prec < min_prec:
                return left
            self.advance()
            right = self.parse_binary(prec + 1)
            left = Binary(self.span(first, self.prev), t.text, left, right)

    def parse_unary(self):
        t = self.tok
        if t.kind == "op":
            if t.text in ("-", "!", "~"):
                self.advance()
                operand = self.parse_unary()
                if t.text == "-" and isinstance(operand, IntLit) and not operand.is_char:
                    return IntLit(self.span(t, self.prev), -operand.value)
                return Unary(self.span(t, self.prev), t.text, operand)
            if t.text == "+":
                self.advance()
                return self.parse_unary()
            if t.text in ("*", "&"):
                self.error("pointer operations are outside the MiniC subset")
            if t.text in ("++", "--"):
                self.error("increment inside an expression is outside the MiniC subset")
            if t.text == "(" and self.look().kind == "kw" and self.look().text in (
                    "int", "char", "const", "void", "long", "unsigned", "short", "float", "double"):
                self.advance()
                ty = self.advance()
                if ty.text != "int" or not self.is_op(")"):
                    self.error("casts other than (int) are outside the MiniC subset", ty)
                self.advance()
                return self.parse_unary()
        return self.parse_postfix()

    def parse_postfix(self):
        first = self.tok
        e = self.parse_primary()
        while True:
            if self.is_op("["):
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                e = Index(self.span(first, self.prev), e, idx)
            elif self.is_op("(") and isinstance(e, Var):
                if e.name in _ALLOCATORS:
                    self.error("dynamic allocation is outside the MiniC subset", first)
                self.advance()
                args = []
                if not self.is_op(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                e = Call(self.span(first, self.prev), e.name, tuple(args))
            elif self.is_op("++") or self.is_op("--"):
                self.error("increment inside an expression is outside the MiniC subset")
            elif self.is_op(".") or self.is_op("->"):
                self.error("member access is outside the MiniC subset")
            else:
                return e

    def parse_primary(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return IntLit(t.span, t.value)
        if t.kind == "char":
            self.advance()
            return IntLit(t.span, t.value, True)
        if t.kind == "str":
            self.advance()
            data = t.value
            last = t
            while self.tok.kind == "str":
                last = self.advance()
                data += last.value
            return StrLit(self.span(t, last), data)
        if t.kind == "id":
            self.advance()
            return Var(t.span, t.text)
        if self.is_op("("):
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        self.reject_keyword()
        if t.kind == "eof":
            self.error("unexpected end of input")
        self.error(f"expected expression, found '{t.text}'")


def parse_minic(source: str) -> MiniCProgram:
    """Parse MiniC source into an (unchecked) program."""
    return _Parser(source).parse_program()
