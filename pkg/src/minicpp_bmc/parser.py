"""Recursive descent parser for MiniC++.

The grammar is LL-style with one name-driven disambiguation: `name < ...`
is a template-argument list when `name` is a declared template, otherwise
a relational expression.  To support that, the parser tracks declared type
names, class template names, and function template names as it goes
(friend function templates register their name when the enclosing class
body is parsed, so calls like `foo<5678>(bring)` parse before semantic
injection happens).
"""
from __future__ import annotations

from .ast_nodes import (
    AssertStmt,
    AssignExpr,
    BaseSpec,
    Binary,
    Block,
    BoolLit,
    Call,
    CastExpr,
    ClassDecl,
    DeleteExpr,
    Expr,
    ExprStmt,
    ForStmt,
    FunctionDecl,
    Ident,
    IfStmt,
    IndexExpr,
    IntLit,
    Member,
    NewExpr,
    NullLit,
    Param,
    Program,
    ReturnStmt,
    Stmt,
    TemplateDecl,
    TemplateId,
    TemplateParam,
    ThisExpr,
    TypedefDecl,
    TypeRef,
    Unary,
    VarDecl,
    WhileStmt,
    expr_text,
    targ_text,
)
from .diagnostics import ParseError, SourceLoc
from .lexer import Token, tokenize

_TYPE_KEYWORDS = ("int", "bool", "void")


class _Parser:
    def __init__(self, tokens: list[Token], filename: str):
        self.toks = tokens
        self.pos = 0
        self.filename = filename
        self.type_names: set[str] = set()
        self.class_templates: set[str] = set()
        self.func_templates: set[str] = set()

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = self.pos + ahead
        if i < len(self.toks):
            return self.toks[i]
        last = self.toks[-1].loc if self.toks else SourceLoc(self.filename, 1, 1)
        return Token("eof", "<eof>", last)

    def at(self, text: str, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t.text == text and t.kind in ("kw", "punct")

    def advance(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, *texts: str) -> Token:
        if self.peek().text in texts and self.peek().kind in ("kw", "punct"):
            return self.advance()
        raise ParseError(self.peek().loc, [f"'{t}'" for t in texts], f"'{self.peek().text}'")

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise ParseError(t.loc, [what], f"'{t.text}'")
        return self.advance()

    # -- types -------------------------------------------------------------

    def at_type_start(self, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        if t.kind == "kw" and t.text in _TYPE_KEYWORDS + ("const",):
            return True
        return t.kind == "ident" and (t.text in self.type_names or t.text in self.class_templates)

    def parse_type(self) -> TypeRef:
        self.accept("const")
        t = self.peek()
        if t.kind == "kw" and t.text in _TYPE_KEYWORDS:
            self.advance()
            base = TypeRef(t.text)
        elif t.kind == "ident":
            self.advance()
            targs = []
            if self.at("<") and (t.text in self.class_templates or t.text in self.type_names):
                targs = self.parse_template_args()
            base = TypeRef("named", name=t.text, targs=targs)
        else:
            raise ParseError(t.loc, ["type"], f"'{t.text}'")
        while True:
            if self.accept("const"):
                continue
            if self.accept("*"):
                base = TypeRef("ptr", inner=base)
                continue
            if self.accept("&"):
                base = TypeRef("ref", inner=base)
                continue
            return base

    def parse_template_args(self) -> list:
        self.expect("<")
        args = []
        if not self.at(">"):
            while True:
                if self.at_type_start() and not self._arg_looks_like_expr():
                    args.append(self.parse_type())
                else:
                    args.append(self.parse_additive())
                if not self.accept(","):
                    break
        self.expect(">")
        return args

    def _arg_looks_like_expr(self) -> bool:
        # `X<N>` with N an int template parameter: N is not a type name,
        # so at_type_start is already false; this hook only guards plain
        # identifiers that name values shadowing nothing.
        return False

    # -- declarations --------------------------------------------------------

    def parse_program(self) -> Program:
        decls = []
        while self.peek().kind != "eof":
            decls.append(self.parse_top_decl())
        return Program(decls)

    def parse_top_decl(self):
        t = self.peek()
        if self.at("typedef"):
            return self.parse_typedef()
        if self.at("template"):
            return self.parse_template_decl()
        if self.at("class") or self.at("struct"):
            return self.parse_class(template_name=None)
        if self.at_type_start():
            return self.parse_func_or_var()
        raise ParseError(t.loc, ["declaration"], f"'{t.text}'")

    def parse_typedef(self) -> TypedefDecl:
        loc = self.expect("typedef").loc
        ty = self.parse_type()
        name = self.expect_ident().text
        self.expect(";")
        self.type_names.add(name)
        return TypedefDecl(name=name, ty=ty, loc=loc)

    def parse_template_params(self) -> list[TemplateParam]:
        self.expect("<")
        params: list[TemplateParam] = []
        if not self.at(">"):
            while True:
                t = self.peek()
                if self.at("typename") or self.at("class"):
                    self.advance()
                    name = self.expect_ident().text
                    default = None
                    if self.accept("="):
                        default = self.parse_type()
                    params.append(TemplateParam("type", name, default, loc=t.loc))
                elif self.at("int"):
                    self.advance()
                    name = self.expect_ident().text
                    default = None
                    if self.accept("="):
                        default = self.parse_additive()
                    params.append(TemplateParam("int", name, default, loc=t.loc))
                else:
                    raise ParseError(t.loc, ["'typename'", "'class'", "'int'"], f"'{t.text}'")
                if not self.accept(","):
                    break
        self.expect(">")
        return params

    def parse_template_decl(self) -> TemplateDecl:
        loc = self.expect("template").loc
        params = self.parse_template_params()
        saved_types = set(self.type_names)
        for p in params:
            if p.kind == "type":
                self.type_names.add(p.name)
        register_class: str | None = None
        register_func: str | None = None
        try:
            if self.at("class") or self.at("struct"):
                if not params and self._is_class_specialization():
                    decl, spec_args = self.parse_class_specialization()
                    return TemplateDecl(params=[], decl=decl, spec_args=spec_args, loc=loc)
                register_class = self.peek(1).text
                self.class_templates.add(register_class)
                decl = self.parse_class(template_name=register_class)
                return TemplateDecl(params=params, decl=decl, loc=loc)
            if self.at_type_start():
                fn, spec_args = self.parse_function_template_body()
                register_func = fn.name
                return TemplateDecl(params=params, decl=fn, spec_args=spec_args, loc=loc)
            raise ParseError(self.peek().loc, ["class template", "function template"], f"'{self.peek().text}'")
        finally:
            self.type_names = saved_types
            if register_class is not None:
                self.class_templates.add(register_class)
            if register_func is not None:
                self.func_templates.add(register_func)

    def _is_class_specialization(self) -> bool:
        return self.peek(1).kind == "ident" and self.peek(2).text == "<"

    def parse_class_specialization(self):
        keyword = self.advance().text  # class/struct
        name = self.expect_ident().text
        spec_args = self.parse_template_args()
        decl = self.parse_class_body(name, keyword, self.peek().loc)
        return decl, spec_args

    def parse_function_template_body(self):
        ret = self.parse_type()
        name_tok = self.expect_ident()
        spec_args = None
        if self.at("<"):
            spec_args = self.parse_template_args()
        self.func_templates.add(name_tok.text)  # visible inside its own body
        fn = self.parse_function_rest(ret, name_tok.text, name_tok.loc)
        return fn, spec_args

    def parse_class(self, template_name: str | None) -> ClassDecl:
        keyword = self.advance().text
        name_tok = self.expect_ident()
        name = name_tok.text
        if template_name is None:
            self.type_names.add(name)
        return self.parse_class_body(name, keyword, name_tok.loc)

    def parse_class_body(self, name: str, keyword: str, loc: SourceLoc) -> ClassDecl:
        bases = []
        if self.accept(":"):
            while True:
                virtual = bool(self.accept("virtual"))
                if self.at("public") or self.at("private") or self.at("protected"):
                    self.advance()
                virtual = virtual or bool(self.accept("virtual"))
                base_tok = self.expect_ident("base class name")
                targs = self.parse_template_args() if self.at("<") else []
                bases.append(
                    BaseSpec(TypeRef("named", name=base_tok.text, targs=targs), virtual, loc=base_tok.loc)
                )
                if not self.accept(","):
                    break
        self.expect("{")
        # the injected-class-name is usable as a type inside the body
        added_self = name not in self.type_names
        self.type_names.add(name)
        members = []
        while not self.at("}"):
            m = self.parse_member(name)
            if m is not None:
                members.append(m)
        self.expect("}")
        self.expect(";")
        if added_self:
            self.type_names.discard(name)
        return ClassDecl(name=name, keyword=keyword, bases=bases, members=members, loc=loc)

    def parse_member(self, class_name: str):
        t = self.peek()
        if (self.at("public") or self.at("private") or self.at("protected")) and self.at(":", 1):
            self.advance()
            self.advance()
            return None
        if self.at("typedef"):
            return self.parse_typedef()
        if self.at("template"):
            loc = self.advance().loc
            params = self.parse_template_params()
            saved = set(self.type_names)
            for p in params:
                if p.kind == "type":
                    self.type_names.add(p.name)
            try:
                if not self.accept("friend"):
                    raise ParseError(
                        self.peek().loc, ["'friend'"], f"'{self.peek().text}' (only friend member templates supported)"
                    )
                ret = self.parse_type()
                name_tok = self.expect_ident()
                self.func_templates.add(name_tok.text)  # visible inside its own body
                fn = self.parse_function_rest(ret, name_tok.text, name_tok.loc)
                fn.is_friend = True
            finally:
                self.type_names = saved
            self.func_templates.add(fn.name)
            return TemplateDecl(params=params, decl=fn, loc=loc)
        # constructor
        if t.kind == "ident" and t.text == class_name and self.at("(", 1):
            self.advance()
            fn = self.parse_function_rest(None, class_name, t.loc, is_ctor=True)
            return fn
        # destructor
        virtual = bool(self.accept("virtual"))
        if self.accept("~"):
            name_tok = self.expect_ident()
            if name_tok.text != class_name:
                raise ParseError(name_tok.loc, [f"'~{class_name}'"], f"'~{name_tok.text}'")
            fn = self.parse_function_rest(None, "~" + class_name, name_tok.loc, is_dtor=True)
            fn.is_virtual = virtual
            return fn
        if not self.at_type_start():
            raise ParseError(t.loc, ["member declaration"], f"'{t.text}'")
        ty = self.parse_type()
        name_tok = self.expect_ident()
        if self.at("("):
            fn = self.parse_function_rest(ty, name_tok.text, name_tok.loc)
            fn.is_virtual = virtual
            return fn
        if virtual:
            raise ParseError(name_tok.loc, ["method declaration"], "field after 'virtual'")
        ty = self.parse_array_suffix(ty)
        self.expect(";")
        return VarDecl(name=name_tok.text, ty=ty, loc=name_tok.loc)

    def parse_array_suffix(self, ty: TypeRef) -> TypeRef:
        if self.accept("["):
            length = self.parse_additive()
            self.expect("]")
            ty = TypeRef("array", inner=ty, length_expr=length)
        return ty

    def parse_function_rest(
        self, ret: TypeRef | None, name: str, loc: SourceLoc, is_ctor: bool = False, is_dtor: bool = False
    ) -> FunctionDecl:
        self.expect("(")
        params: list[Param] = []
        if not self.at(")"):
            if self.at("void") and self.at(")", 1):
                self.advance()
            else:
                while True:
                    pty = self.parse_type()
                    pname = None
                    if self.peek().kind == "ident":
                        pname = self.advance().text
                    params.append(Param(pty, pname, loc=self.peek().loc))
                    if not self.accept(","):
                        break
        self.expect(")")
        self.accept("const")
        is_override = bool(self.accept("override"))
        init_list = []
        if is_ctor and self.accept(":"):
            while True:
                nm_tok = self.expect_ident("initializer name")
                nm = nm_tok.text
                if self.at("<"):
                    targs = self.parse_template_args()
                    nm += f"<{', '.join(targ_text(a) for a in targs)}>"
                self.expect("(")
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                init_list.append((nm, args, nm_tok.loc))
                if not self.accept(","):
                    break
        body = None
        if self.at("{"):
            body = self.parse_block()
        else:
            self.expect(";")
        return FunctionDecl(
            name=name,
            ret=ret if ret is not None else TypeRef("void"),
            params=params,
            body=body,
            is_override=is_override,
            is_ctor=is_ctor,
            is_dtor=is_dtor,
            init_list=init_list,
            loc=loc,
        )

    def parse_func_or_var(self):
        ty = self.parse_type()
        name_tok = self.expect_ident()
        if self.at("("):
            # distinguish `int f(...) {...}` from `C v(args);`
            if self._call_style_init(ty):
                args = self.parse_paren_args()
                self.expect(";")
                return VarDecl(name=name_tok.text, ty=ty, ctor_args=args, loc=name_tok.loc)
            fn = self.parse_function_rest(ty, name_tok.text, name_tok.loc)
            return fn
        vty = self.parse_array_suffix(ty)
        init = None
        if self.accept("="):
            init = self.parse_expr()
        self.expect(";")
        return VarDecl(name=name_tok.text, ty=vty, init=init, loc=name_tok.loc)

    def _call_style_init(self, ty: TypeRef) -> bool:
        # `C v(expr, ...);` vs function definition: an argument list starting
        # with a non-type token that is not ')' means constructor arguments.
        if ty.kind in ("named",) or (ty.kind == "class"):
            nxt = self.peek(1)
            if nxt.text == ")":
                return False
            return not (self.at_type_start(1))
        return False

    def parse_paren_args(self) -> list[Expr]:
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return args

    # -- statements ----------------------------------------------------------

    def parse_block(self) -> Block:
        loc = self.expect("{").loc
        stmts = []
        while not self.at("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return Block(stmts=stmts, loc=loc)

    def parse_stmt(self) -> Stmt:
        t = self.peek()
        if self.at("{"):
            return self.parse_block()
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then_body = self.parse_stmt()
            else_body = None
            if self.accept("else"):
                else_body = self.parse_stmt()
            return IfStmt(cond=cond, then_body=then_body, else_body=else_body, loc=t.loc)
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            return WhileStmt(cond=cond, body=self.parse_stmt(), loc=t.loc)
        if self.at("for"):
            self.advance()
            self.expect("(")
            init = None
            if not self.at(";"):
                init = self.parse_decl_or_expr_stmt()
            else:
                self.advance()
            cond = None
            if not self.at(";"):
                cond = self.parse_expr()
            self.expect(";")
            step = None
            if not self.at(")"):
                step = self.parse_expr()
            self.expect(")")
            return ForStmt(init=init, cond=cond, step=step, body=self.parse_stmt(), loc=t.loc)
        if self.at("return"):
            self.advance()
            value = None
            if not self.at(";"):
                value = self.parse_expr()
            self.expect(";")
            return ReturnStmt(value=value, loc=t.loc)
        if self.at("assert"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect(";")
            return AssertStmt(cond=cond, text=expr_text(cond, compact=True), loc=t.loc)
        if self.at(";"):
            self.advance()
            return Block(stmts=[], loc=t.loc)
        return self.parse_decl_or_expr_stmt()

    def parse_decl_or_expr_stmt(self) -> Stmt:
        t = self.peek()
        is_decl = False
        if t.kind == "kw" and t.text in _TYPE_KEYWORDS + ("const",):
            is_decl = True
        elif t.kind == "ident" and t.text in self.type_names:
            is_decl = True
        elif t.kind == "ident" and t.text in self.class_templates and self.at("<", 1):
            is_decl = True
        if is_decl:
            ty = self.parse_type()
            name_tok = self.expect_ident()
            ty = self.parse_array_suffix(ty)
            init = None
            ctor_args = None
            if self.accept("="):
                init = self.parse_expr()
            elif self.at("("):
                ctor_args = self.parse_paren_args()
            self.expect(";")
            return VarDecl(name=name_tok.text, ty=ty, init=init, ctor_args=ctor_args, loc=name_tok.loc)
        expr = self.parse_expr()
        self.expect(";")
        return ExprStmt(expr=expr, loc=t.loc)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_assignment()

    def parse_assignment(self) -> Expr:
        lhs = self.parse_logical_or()
        if self.at("="):
            loc = self.advance().loc
            rhs = self.parse_assignment()
            return AssignExpr(target=lhs, value=rhs, loc=loc)
        return lhs

    def _binary_chain(self, ops: tuple[str, ...], sub) -> Expr:
        left = sub()
        while self.peek().text in ops and self.peek().kind == "punct":
            op_tok = self.advance()
            right = sub()
            left = Binary(op=op_tok.text, left=left, right=right, loc=op_tok.loc)
        return left

    def parse_logical_or(self) -> Expr:
        return self._binary_chain(("||",), self.parse_logical_and)

    def parse_logical_and(self) -> Expr:
        return self._binary_chain(("&&",), self.parse_equality)

    def parse_equality(self) -> Expr:
        return self._binary_chain(("==", "!="), self.parse_relational)

    def parse_relational(self) -> Expr:
        return self._binary_chain(("<", "<=", ">", ">="), self.parse_additive)

    def parse_additive(self) -> Expr:
        return self._binary_chain(("+", "-"), self.parse_multiplicative)

    def parse_multiplicative(self) -> Expr:
        return self._binary_chain(("*", "/", "%"), self.parse_unary)

    def parse_unary(self) -> Expr:
        t = self.peek()
        if t.text in ("-", "!", "*", "&") and t.kind == "punct":
            self.advance()
            return Unary(op=t.text, operand=self.parse_unary(), loc=t.loc)
        if self.at("new"):
            self.advance()
            ty = self.parse_type()
            args = None
            if self.at("("):
                args = self.parse_paren_args()
            return NewExpr(alloc_type=ty, args=args, loc=t.loc)
        if self.at("delete"):
            self.advance()
            return DeleteExpr(operand=self.parse_unary(), loc=t.loc)
        if self.at("(") and self.at_type_start(1) and not self.at("(", 1):
            # C-style cast: `(` TYPE `)` unary
            self.advance()
            ty = self.parse_type()
            self.expect(")")
            return CastExpr(target_type=ty, operand=self.parse_unary(), loc=t.loc)
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        e = self.parse_primary()
        while True:
            t = self.peek()
            if self.at("("):
                args = self.parse_paren_args()
                e = Call(callee=e, args=args, loc=t.loc)
            elif self.at("["):
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                e = IndexExpr(base=e, index=idx, loc=t.loc)
            elif self.at(".") or self.at("->"):
                arrow = self.advance().text == "->"
                name = self.expect_ident("member name").text
                e = Member(base=e, name=name, arrow=arrow, loc=t.loc)
            else:
                return e

    def parse_primary(self) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.advance()
            return IntLit(value=t.value, loc=t.loc)
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(value=t.text == "true", loc=t.loc)
        if self.at("nullptr"):
            self.advance()
            return NullLit(loc=t.loc)
        if self.at("this"):
            self.advance()
            return ThisExpr(loc=t.loc)
        if self.at("("):
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.advance()
            if self.at("<") and (t.text in self.func_templates or t.text in self.class_templates):
                targs = self.parse_template_args()
                return TemplateId(name=t.text, targs=targs, loc=t.loc)
            return Ident(name=t.text, loc=t.loc)
        raise ParseError(t.loc, ["expression"], f"'{t.text}'")


def parse(tokens: list[Token], filename: str = "<input>") -> Program:
    """Parse a token sequence into a Program."""
    return _Parser(tokens, filename).parse_program()


def parse_source(source: str, filename: str = "<input>") -> Program:
    return parse(tokenize(source, filename), filename)
