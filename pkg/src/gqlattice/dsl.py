"""Textual query language: parse and serialize query representations.

One declaration per line of intent:

    query "case2" {
      node n0;
      motif C0 = clique(nodes=5);
      edge e0 = n0 -- C0;
      rule attr node n0: name == "Valjean";
      rule repeat C0: count = 0..3;
    }

`#` starts a line comment. References must be declared before use. Motif
parameter ranges live in the motif declaration and desugar to a configuration
rule. Rule ids are generated positionally (r0, r1, ...) in declaration order,
so a serialize/parse round trip reproduces them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    ChainingRule,
    ChainMode,
    CustomEntity,
    Diagnostic,
    EdgeAttrRule,
    EdgeEntity,
    EntityRef,
    IntRange,
    MotifConfigRule,
    MotifEntity,
    MotifKind,
    NodeAttrRule,
    NodeEntity,
    Op,
    Predicate,
    QueryRepresentation,
    RepeatingRule,
    Rule,
    validate,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class QdslParseError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


# --- lexer ---------------------------------------------------------------------

_PUNCT = [
    ("..", "DOTDOT"), ("->", "ARROW"), ("--", "UNDIR"),
    ("==", "EQEQ"), ("!=", "NEQ"), ("<=", "LE"), (">=", "GE"),
    ("{", "LBRACE"), ("}", "RBRACE"), ("(", "LPAREN"), (")", "RPAREN"),
    ("=", "EQUALS"), (";", "SEMI"), (":", "COLON"), (",", "COMMA"),
    (".", "DOT"), ("<", "LT"), (">", "GT"), ("-", "MINUS"),
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT INT FLOAT STRING <punct name> EOF
    text: str
    value: object
    span: SourceSpan


def _lex(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def span(length: int) -> SourceSpan:
        return SourceSpan(line, col, length)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = i + 1
            out = []
            ok = True
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    ok = False
                    break
                if text[j] == "\\":
                    if j + 1 < n and text[j + 1] in _ESCAPES:
                        out.append(_ESCAPES[text[j + 1]])
                        j += 2
                        continue
                    ok = False
                    break
                out.append(text[j])
                j += 1
            if not ok or j >= n:
                diags.append(Diagnostic("error", "unterminated or malformed string literal",
                                        span=span(j - i)))
                return tokens, diags
            length = j + 1 - i
            tokens.append(Token("STRING", text[i:j + 1], "".join(out), span(length)))
            i = j + 1
            col += length
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            # a '.' begins a fraction only when not the '..' range operator
            if j < n and text[j] == "." and not (j + 1 < n and text[j + 1] == "."):
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            raw = text[i:j]
            tokens.append(Token("FLOAT" if is_float else "INT", raw,
                                float(raw) if is_float else int(raw), span(j - i)))
            col += j - i
            i = j
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            tokens.append(Token("IDENT", word, word, span(len(word))))
            i = m.end()
            col += len(word)
            continue
        for punct, kind in _PUNCT:
            if text.startswith(punct, i):
                tokens.append(Token(kind, punct, punct, span(len(punct))))
                i += len(punct)
                col += len(punct)
                break
        else:
            diags.append(Diagnostic("error", f"unexpected character {c!r}", span=span(1)))
            i += 1
            col += 1
    tokens.append(Token("EOF", "", None, SourceSpan(line, col, 0)))
    return tokens, diags


# --- parser --------------------------------------------------------------------

_OPS = {"EQEQ": Op.EQ, "NEQ": Op.NE, "LT": Op.LT, "LE": Op.LE, "GT": Op.GT, "GE": Op.GE}
_MOTIF_KINDS = {k.value: k for k in MotifKind}


class _DeclError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        self.diag = Diagnostic("error", message, span=span)
        super().__init__(message)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []
        self.entities: list = []
        self.entity_spans: dict[str, SourceSpan] = {}
        self.rules: list[Rule] = []
        self.rule_spans: dict[str, SourceSpan] = {}
        self.ids: dict[str, object] = {}
        self.rule_counter = 0

    # token helpers

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise _DeclError(f"expected {what or kind}, found {t.text or 'end of input'!r}", t.span)
        return self.take()

    def expect_word(self, word: str) -> Token:
        t = self.peek()
        if t.kind != "IDENT" or t.text != word:
            raise _DeclError(f"expected {word!r}, found {t.text or 'end of input'!r}", t.span)
        return self.take()

    def error(self, message: str, span: SourceSpan):
        self.diags.append(Diagnostic("error", message, span=span))

    # declarations

    def fresh_rule_id(self) -> str:
        rid = f"r{self.rule_counter}"
        self.rule_counter += 1
        return rid

    def declare(self, tok: Token, entity):
        if tok.text in self.ids:
            raise _DeclError(f"duplicate declaration of {tok.text!r}", tok.span)
        self.ids[tok.text] = entity
        self.entities.append(entity)
        self.entity_spans[tok.text] = tok.span

    def resolve(self, tok: Token):
        if tok.text not in self.ids:
            raise _DeclError(f"reference to undeclared id {tok.text!r}", tok.span)
        return self.ids[tok.text]

    def parse_query(self) -> QueryRepresentation | None:
        if self.peek().kind == "EOF":
            self.diags.append(Diagnostic("warning", "empty input; produced an empty query"))
            return QueryRepresentation("unnamed")
        try:
            self.expect_word("query")
            name = self.expect("STRING", "query name string").value
            self.expect("LBRACE")
        except _DeclError as exc:
            self.diags.append(exc.diag)
            return None
        while self.peek().kind not in ("RBRACE", "EOF"):
            try:
                self.parse_decl()
            except _DeclError as exc:
                self.diags.append(exc.diag)
                self.skip_decl()
        if self.peek().kind == "RBRACE":
            self.take()
            trailing = self.peek()
            if trailing.kind != "EOF":
                self.error("unexpected text after closing brace", trailing.span)
        else:
            self.error("missing closing brace", self.peek().span)
        return QueryRepresentation(str(name), self.entities, self.rules)

    def skip_decl(self):
        while self.peek().kind not in ("SEMI", "RBRACE", "EOF"):
            self.take()
        if self.peek().kind == "SEMI":
            self.take()

    def parse_decl(self):
        t = self.peek()
        if t.kind != "IDENT":
            raise _DeclError(f"expected a declaration, found {t.text!r}", t.span)
        if t.text == "node":
            self.take()
            tok = self.expect("IDENT", "node id")
            self.declare(tok, NodeEntity(tok.text))
            self.expect("SEMI")
        elif t.text == "motif":
            self.parse_motif()
        elif t.text == "edge":
            self.parse_edge()
        elif t.text == "group":
            self.parse_group()
        elif t.text == "rule":
            self.parse_rule()
        else:
            raise _DeclError(f"unknown declaration {t.text!r}", t.span)

    def parse_range(self) -> IntRange:
        neg = False
        if self.peek().kind == "MINUS":
            self.take()
            neg = True
        lo_tok = self.expect("INT", "integer")
        lo = -lo_tok.value if neg else lo_tok.value
        hi = lo
        if self.peek().kind == "DOTDOT":
            self.take()
            neg2 = False
            if self.peek().kind == "MINUS":
                self.take()
                neg2 = True
            hi_tok = self.expect("INT", "integer")
            hi = -hi_tok.value if neg2 else hi_tok.value
        if lo > hi:
            raise _DeclError(f"empty range {lo}..{hi}", lo_tok.span)
        return IntRange(lo, hi)

    def parse_motif(self):
        self.take()  # motif
        tok = self.expect("IDENT", "motif id")
        self.expect("EQUALS")
        kind_tok = self.expect("IDENT", "motif kind (path|loop|tree|clique)")
        kind = _MOTIF_KINDS.get(kind_tok.text)
        if kind is None:
            raise _DeclError(f"unknown motif kind {kind_tok.text!r}", kind_tok.span)
        self.expect("LPAREN")
        params: dict[str, IntRange] = {}
        while True:
            name_tok = self.expect("IDENT", "motif parameter")
            if name_tok.text not in ("nodes", "width", "depth"):
                raise _DeclError(f"unknown motif parameter {name_tok.text!r}", name_tok.span)
            if name_tok.text in params:
                raise _DeclError(f"duplicate motif parameter {name_tok.text!r}", name_tok.span)
            self.expect("EQUALS")
            params[name_tok.text] = self.parse_range()
            if self.peek().kind == "COMMA":
                self.take()
                continue
            break
        self.expect("RPAREN")
        self.expect("SEMI")
        if "nodes" not in params:
            raise _DeclError("motif requires a nodes=range parameter", kind_tok.span)
        self.declare(tok, MotifEntity(tok.text, kind))
        rid = self.fresh_rule_id()
        self.rules.append(Rule(rid, tok.text, MotifConfigRule(
            params["nodes"], params.get("width"), params.get("depth"))))
        self.rule_spans[rid] = tok.span

    def parse_ref(self) -> EntityRef:
        tok = self.expect("IDENT", "entity reference")
        self.resolve(tok)
        port = None
        if self.peek().kind == "DOT":
            self.take()
            port_tok = self.expect("IDENT", "head or tail")
            if port_tok.text not in ("head", "tail"):
                raise _DeclError("path ports are 'head' and 'tail'", port_tok.span)
            port = port_tok.text
        return EntityRef(tok.text, port)

    def parse_edge(self):
        self.take()  # edge
        tok = self.expect("IDENT", "edge id")
        self.expect("EQUALS")
        source = self.parse_ref()
        arrow = self.peek()
        if arrow.kind not in ("ARROW", "UNDIR"):
            raise _DeclError("expected -> or -- between endpoints", arrow.span)
        self.take()
        target = self.parse_ref()
        self.expect("SEMI")
        self.declare(tok, EdgeEntity(tok.text, source, target, arrow.kind == "ARROW"))

    def parse_group(self):
        self.take()  # group
        tok = self.expect("IDENT", "group id")
        self.expect("EQUALS")
        self.expect("LBRACE")
        members = []
        while True:
            m = self.expect("IDENT", "member id")
            self.resolve(m)
            members.append(m.text)
            if self.peek().kind == "COMMA":
                self.take()
                continue
            break
        self.expect("RBRACE")
        self.expect("SEMI")
        self.declare(tok, CustomEntity(tok.text, tuple(members)))

    def parse_literal(self):
        t = self.peek()
        if t.kind == "STRING":
            return self.take().value
        if t.kind == "MINUS":
            self.take()
            num = self.peek()
            if num.kind not in ("INT", "FLOAT"):
                raise _DeclError("expected a number after '-'", num.span)
            return -self.take().value
        if t.kind in ("INT", "FLOAT"):
            return self.take().value
        if t.kind == "IDENT" and t.text in ("true", "false"):
            return self.take().text == "true"
        raise _DeclError(f"expected a literal, found {t.text!r}", t.span)

    def parse_rule(self):
        self.take()  # rule
        kind = self.expect("IDENT", "rule kind (attr|repeat|chain)")
        if kind.text == "attr":
            self.parse_attr_rule()
        elif kind.text == "repeat":
            tok = self.expect("IDENT", "target id")
            self.resolve(tok)
            self.expect("COLON")
            self.expect_word("count")
            self.expect("EQUALS")
            rng = self.parse_range()
            self.expect("SEMI")
            rid = self.fresh_rule_id()
            self.rules.append(Rule(rid, tok.text, RepeatingRule(rng)))
            self.rule_spans[rid] = tok.span
        elif kind.text == "chain":
            tok = self.expect("IDENT", "target id")
            self.resolve(tok)
            self.expect("COLON")
            self.expect_word("start")
            self.expect("EQUALS")
            start = self.expect("IDENT", "start node id")
            self.resolve(start)
            self.expect("COMMA")
            self.expect_word("end")
            self.expect("EQUALS")
            end = self.expect("IDENT", "end node id")
            self.resolve(end)
            self.expect("COMMA")
            self.expect_word("iterations")
            self.expect("EQUALS")
            rng = self.parse_range()
            self.expect("COMMA")
            self.expect_word("mode")
            self.expect("EQUALS")
            mode_tok = self.expect("IDENT", "linked or shared")
            if mode_tok.text not in ("linked", "shared"):
                raise _DeclError("chaining mode is 'linked' or 'shared'", mode_tok.span)
            self.expect("SEMI")
            rid = self.fresh_rule_id()
            self.rules.append(Rule(rid, tok.text, ChainingRule(
                start.text, end.text, rng, ChainMode(mode_tok.text))))
            self.rule_spans[rid] = tok.span
        else:
            raise _DeclError(f"unknown rule kind {kind.text!r}", kind.span)

    def parse_attr_rule(self):
        selector = self.expect("IDENT", "node|edge|nodes|edges")
        if selector.text in ("node", "edge"):
            is_node = selector.text == "node"
            scoped = False
        elif selector.text in ("nodes", "edges"):
            is_node = selector.text == "nodes"
            scoped = True
            self.expect_word("in")
        else:
            raise _DeclError("attr rules start with node, edge, nodes in, or edges in",
                             selector.span)
        tok = self.expect("IDENT", "target id")
        target = self.resolve(tok)
        if not scoped and is_node and not isinstance(target, NodeEntity):
            raise _DeclError("'attr node' targets a node; use 'nodes in' for motifs/groups", tok.span)
        if not scoped and not is_node and not isinstance(target, EdgeEntity):
            raise _DeclError("'attr edge' targets an edge; use 'edges in' for motifs/groups", tok.span)
        if scoped and not isinstance(target, (MotifEntity, CustomEntity)):
            raise _DeclError("'in' selectors target a motif or group", tok.span)
        self.expect("COLON")
        name_tok = self.peek()
        if name_tok.kind == "STRING":
            attr = self.take().value
        else:
            attr = self.expect("IDENT", "attribute name").text
        op_tok = self.peek()
        if op_tok.kind not in _OPS:
            raise _DeclError("expected a comparison operator", op_tok.span)
        self.take()
        literal = self.parse_literal()
        self.expect("SEMI")
        pred = Predicate(attr, _OPS[op_tok.kind], literal)
        body = NodeAttrRule(pred) if is_node else EdgeAttrRule(pred)
        rid = self.fresh_rule_id()
        self.rules.append(Rule(rid, tok.text, body))
        self.rule_spans[rid] = tok.span


def parse_with_diagnostics(text: str) -> tuple[QueryRepresentation | None, list[Diagnostic]]:
    """Parse and validate; returns (representation, diagnostics). The
    representation is None when any error diagnostic was produced."""
    tokens, diags = _lex(text)
    if any(d.severity == "error" for d in diags):
        return None, diags
    parser = _Parser(tokens)
    qr = parser.parse_query()
    diags = diags + parser.diags
    if qr is not None and not any(d.severity == "error" for d in diags):
        spans = {**parser.entity_spans, **parser.rule_spans}
        for d in validate(qr):
            diags.append(Diagnostic(d.severity, d.message, d.subject, spans.get(d.subject)))
    if any(d.severity == "error" for d in diags):
        return None, diags
    return qr, diags


def parse(text: str) -> QueryRepresentation:
    """Parse text into a validated representation; raises QdslParseError with
    the full diagnostic list on any error."""
    qr, diags = parse_with_diagnostics(text)
    if qr is None:
        raise QdslParseError([d for d in diags if d.severity == "error"])
    return qr


# --- serializer ------------------------------------------------------------------

def _string(value: str) -> str:
    out = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def _literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return _string(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _range(rng: IntRange) -> str:
    return str(rng.lo) if rng.lo == rng.hi else f"{rng.lo}..{rng.hi}"


def _attr_name(name: str) -> str:
    return name if _IDENT_RE.fullmatch(name) else _string(name)


def _ref(ref: EntityRef) -> str:
    return ref.entity_id if ref.port is None else f"{ref.entity_id}.{ref.port}"


def serialize(qr: QueryRepresentation) -> str:
    """Deterministic text form; parse(serialize(qr)) is structurally equal to
    qr for any valid representation declared in dependency order."""
    configs = {r.target: r for r in qr.rules if isinstance(r.body, MotifConfigRule)}
    lines = [f"query {_string(qr.name)} {{"]
    for ent in qr.entities:
        if isinstance(ent, NodeEntity):
            lines.append(f"  node {ent.id};")
        elif isinstance(ent, MotifEntity):
            cfg = configs.get(ent.id)
            params = []
            if cfg is not None:
                body = cfg.body
                params.append(f"nodes={_range(body.node_range)}")
                if body.width_range is not None:
                    params.append(f"width={_range(body.width_range)}")
                if body.depth_range is not None:
                    params.append(f"depth={_range(body.depth_range)}")
            lines.append(f"  motif {ent.id} = {ent.kind.value}({', '.join(params)});")
        elif isinstance(ent, EdgeEntity):
            arrow = "->" if ent.directed else "--"
            lines.append(f"  edge {ent.id} = {_ref(ent.source)} {arrow} {_ref(ent.target)};")
        elif isinstance(ent, CustomEntity):
            lines.append(f"  group {ent.id} = {{ {', '.join(ent.members)} }};")
    ents = qr.entity_map()
    for rule in qr.rules:
        body = rule.body
        if isinstance(body, MotifConfigRule):
            continue  # folded into the motif declaration
        if isinstance(body, (NodeAttrRule, EdgeAttrRule)):
            target = ents.get(rule.target)
            pred = body.predicate
            if isinstance(body, NodeAttrRule):
                sel = "node" if isinstance(target, NodeEntity) else "nodes in"
            else:
                sel = "edge" if isinstance(target, EdgeEntity) else "edges in"
            lines.append(f"  rule attr {sel} {rule.target}: "
                         f"{_attr_name(pred.attr)} {pred.op.value} {_literal(pred.literal)};")
        elif isinstance(body, RepeatingRule):
            lines.append(f"  rule repeat {rule.target}: count = {_range(body.count_range)};")
        elif isinstance(body, ChainingRule):
            lines.append(f"  rule chain {rule.target}: start={body.start_node}, "
                         f"end={body.end_node}, iterations={_range(body.iter_range)}, "
                         f"mode={body.mode.value};")
    if len(lines) == 1:
        return f"query {_string(qr.name)} {{ }}\n"
    lines.append("}")
    return "\n".join(lines) + "\n"
