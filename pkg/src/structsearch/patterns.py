"""Pattern fragments: Java snippets extended with ``$METAVARS`` and ``...``.

A fragment is rewritten so that every ellipsis becomes a parseable
placeholder (an identifier, a statement, a field or a parameter depending on
where it sits), parsed with the Java grammar inside a wrapper, and the
placeholders are then folded back into ``ellipsis`` nodes. Identifiers that
look like ``$NAME`` become ``metavariable`` nodes.
"""

from __future__ import annotations

import re
import textwrap
from dataclasses import dataclass

from .syntax import (
    COMMENT_KINDS,
    AstNode,
    _first_error,
    convert_tree,
    is_statement,
    parse_tree_sitter,
)

METAVAR = "metavariable"
ELLIPSIS = "ellipsis"
METAVAR_RE = re.compile(r"^\$[A-Z][A-Z0-9_]*$")

_PH = "__SCS_ELLIPSIS__"
_FOR_PH = f"{_PH};;"
_STMT_PH = f"{_PH};"
_MEMBER_PH = f"int {_PH};"
_PARAM_PH = f"{_PH} {_PH}"

_CONTROL_KEYWORDS = frozenset(
    {"if", "while", "for", "switch", "catch", "synchronized", "return", "new", "throw", "else", "do", "try", "case"}
)
_TYPE_KEYWORDS = frozenset({"class", "interface", "enum", "record"})

# Kinds a metavariable may never stand for: statements, declarations and list-like scaffolding.
NON_EXPRESSION_KINDS = frozenset(
    {
        "program",
        "block",
        "class_body",
        "interface_body",
        "enum_body",
        "enum_body_declarations",
        "constructor_body",
        "argument_list",
        "formal_parameters",
        "formal_parameter",
        "spread_parameter",
        "receiver_parameter",
        "modifiers",
        "variable_declarator",
        "catch_clause",
        "catch_formal_parameter",
        "catch_type",
        "finally_clause",
        "switch_block",
        "switch_block_statement_group",
        "switch_label",
        "switch_rule",
        "resource_specification",
        "resource",
        "type_parameters",
        "type_parameter",
        "type_arguments",
        "superclass",
        "super_interfaces",
        "extends_interfaces",
        "type_list",
        "throws",
        "dimensions",
        "inferred_parameters",
        "string_fragment",
        "escape_sequence",
        "marker_annotation",
        "annotation",
        "annotation_argument_list",
        "import_declaration",
        "package_declaration",
        METAVAR,
        ELLIPSIS,
    }
)


def metavar_matchable(node: AstNode) -> bool:
    if node.kind in NON_EXPRESSION_KINDS or node.kind.endswith(("_statement", "_declaration")):
        return False
    return not is_statement(node)


class PatternParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# lexical preprocessing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<string>"(?:\\.|[^"\\\n])*"|'(?:\\.|[^'\\\n])*')
  | (?P<ellipsis>\.\.\.)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<number>\d[\w.]*)
  | (?P<punct>.)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    start: int
    end: int


def _tokens(text: str) -> list[_Tok]:
    out = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        out.append(_Tok(kind, m.group(), m.start(), m.end()))
    return out


def _brace_kinds(toks: list[_Tok]) -> dict[int, str]:
    """Classify each ``{`` token index as a ``"class"`` body or a ``"block"``."""
    kinds: dict[int, str] = {}
    paren_open: dict[int, int] = {}
    stack: list[int] = []
    for i, tok in enumerate(toks):
        if tok.text == "(":
            stack.append(i)
        elif tok.text == ")" and stack:
            paren_open[i] = stack.pop()
    for i, tok in enumerate(toks):
        if tok.text != "{":
            continue
        kind = "block"
        j = i - 1
        while j >= 0 and toks[j].text not in (";", "{", "}"):
            if toks[j].kind == "ident" and toks[j].text in _TYPE_KEYWORDS:
                kind = "class"
                break
            j -= 1
        if kind == "block" and i > 0 and (i - 1) in paren_open:
            # new Foo<Bar>(args) { ... } is an anonymous class body
            k = paren_open[i - 1] - 1
            while k >= 0 and (
                toks[k].kind == "ident" and toks[k].text != "new" or toks[k].text in (".", "<", ">", ",", "?")
            ):
                k -= 1
            if k >= 0 and toks[k].text == "new":
                kind = "class"
        kinds[i] = kind
    return kinds


def _is_declaration_params(toks: list[_Tok], open_idx: int, close_idx: int) -> bool:
    """True when the parenthesised group starting at ``open_idx`` is a formal parameter list."""
    if open_idx == 0:
        return False
    before = toks[open_idx - 1]
    if before.kind != "ident" or before.text in _CONTROL_KEYWORDS:
        return False
    if open_idx >= 2 and toks[open_idx - 2].text in (".", "new"):
        return False
    if open_idx >= 2 and toks[open_idx - 2].kind not in ("ident",) and toks[open_idx - 2].text not in (">", "]"):
        return False
    after = toks[close_idx + 1] if close_idx + 1 < len(toks) else None
    return after is not None and (after.text == "{" or after.text == "throws")


def preprocess(text: str) -> tuple[str, list[tuple[int, int, str]]]:
    """Replace ellipses by parseable placeholders.

    Returns the rewritten text and a list of ``(start, end, original)``
    character ranges in the rewritten text.
    """
    toks = _tokens(text)
    braces = _brace_kinds(toks)
    # Matching parens for parameter-list detection.
    match_paren: dict[int, int] = {}
    pstack: list[int] = []
    for i, tok in enumerate(toks):
        if tok.text == "(":
            pstack.append(i)
        elif tok.text == ")" and pstack:
            match_paren[pstack.pop()] = i

    replacements: list[tuple[int, int, str]] = []  # (tok start, tok end, new text)
    enclosing: list[tuple[str, int]] = []  # (bracket, token index)
    for i, tok in enumerate(toks):
        if tok.text in ("(", "{", "["):
            enclosing.append((tok.text, i))
            continue
        if tok.text in (")", "}", "]"):
            if enclosing:
                enclosing.pop()
            continue
        if tok.kind != "ellipsis":
            continue
        prev = toks[i - 1] if i > 0 else None
        nxt = toks[i + 1] if i + 1 < len(toks) else None
        if (
            prev is not None
            and (prev.kind == "ident" and prev.text not in _CONTROL_KEYWORDS or prev.text in ("]", ">"))
            and nxt is not None
            and nxt.kind == "ident"
        ):
            continue  # varargs declaration
        top = enclosing[-1] if enclosing else None
        if top is not None and top[0] == "(":
            open_idx = top[1]
            close_idx = match_paren.get(open_idx)
            if (
                prev is not None
                and prev.text == "("
                and nxt is not None
                and nxt.text == ")"
                and open_idx > 0
                and toks[open_idx - 1].text == "for"
            ):
                new = _FOR_PH
            elif close_idx is not None and _is_declaration_params(toks, open_idx, close_idx):
                new = _PARAM_PH
            else:
                new = _PH
        elif top is not None and top[0] == "[":
            new = _PH
        else:
            statement_position = prev is None or prev.text in (";", "{", "}") or (
                prev.text == ":" and top is not None
            )
            if not statement_position:
                new = _PH
            else:
                in_class = top is not None and braces.get(top[1]) == "class"
                follows_semicolon = nxt is not None and nxt.text == ";"
                if in_class:
                    new = _MEMBER_PH[:-1] if follows_semicolon else _MEMBER_PH
                else:
                    new = _PH if follows_semicolon else _STMT_PH
        replacements.append((tok.start, tok.end, new))

    out = []
    placeholders = []
    pos = 0
    length = 0
    for start, end, new in replacements:
        chunk = text[pos:start]
        out.append(chunk)
        length += len(chunk)
        placeholders.append((length, length + len(new), text[start:end]))
        out.append(new)
        length += len(new)
        pos = end
    out.append(text[pos:])
    return "".join(out), placeholders


# ---------------------------------------------------------------------------
# parsing

_WRAPPERS = (
    ("statement", "class __ScsWrap {\nvoid __scsWrap() {\n", "\n}\n}\n"),
    ("expression", "class __ScsWrap {\nObject __scsWrap =\n", "\n;\n}\n"),
    ("member", "class __ScsWrap {\n", "\n}\n"),
    ("unit", "", "\n"),
)


@dataclass
class Pattern:
    """A parsed pattern fragment.

    ``root`` is the pattern AST; ``text`` is the fragment as written (dedented
    and stripped). Byte offsets in the AST refer to ``_src``, the wrapped,
    placeholder-bearing source; :meth:`render` maps them back.
    """

    text: str
    root: AstNode
    wrapper: str
    _src: bytes
    _placeholders: list[tuple[int, int, str]]  # byte ranges in _src

    @property
    def metavariables(self) -> list[str]:
        seen: list[str] = []
        for node in self.root.walk():
            if node.kind == METAVAR and node.text not in seen:
                seen.append(node.text)
        return seen

    def nodes(self) -> list[AstNode]:
        return list(self.root.walk())

    def _restore(self, start: int, end: int) -> str:
        out = []
        pos = start
        for pstart, pend, original in self._placeholders:
            if pend <= start or pstart >= end:
                continue
            out.append(self._src[pos:max(pstart, pos)].decode("utf-8"))
            out.append(original)
            pos = max(pos, pend)
        if pos < end:
            out.append(self._src[pos:end].decode("utf-8"))
        return "".join(out)

    def render(self, replacements: dict[int, str] | None = None) -> str:
        """Render the pattern back to text, substituting ``{id(node): text}``."""
        replacements = replacements or {}

        def emit(node: AstNode) -> str:
            if id(node) in replacements:
                return replacements[id(node)]
            if node.kind == METAVAR:
                return node.text
            if node.kind == ELLIPSIS:
                return "..."
            if not any(id(n) in replacements for n in node.walk()):
                return self._restore(node.start_byte, node.end_byte)
            parts = []
            pos = node.start_byte
            for child in node.children:
                parts.append(self._restore(pos, child.start_byte))
                parts.append(emit(child))
                pos = child.end_byte
            parts.append(self._restore(pos, node.end_byte))
            return "".join(parts)

        return normalize_fragment(emit(self.root))


class _HoleNode(AstNode):
    __slots__ = ("text_value",)

    @property
    def text(self) -> str:  # type: ignore[override]
        return self.text_value


def _hole(kind: str, like: AstNode, start: int, end: int, value: str) -> AstNode:
    node = _HoleNode(
        kind=kind,
        span=like.span,
        children=(),
        field=like.field,
        ops=(),
        start_byte=start,
        end_byte=end,
        terminal=True,
        src=like.source,
    )
    node.text_value = value
    return node


def _rebuild(node: AstNode, children: tuple[AstNode, ...]) -> AstNode:
    if len(children) == len(node.children) and all(a is b for a, b in zip(children, node.children)):
        return node
    return AstNode(
        kind=node.kind,
        span=node.span,
        children=children,
        field=node.field,
        ops=node.ops,
        start_byte=node.start_byte,
        end_byte=node.end_byte,
        terminal=node.terminal,
        src=node.source,
    )


def _fold_holes(node: AstNode, placeholders: list[tuple[int, int, str]]) -> AstNode:
    """Replace placeholder constructs with ellipsis nodes and ``$X`` with metavariables."""

    def is_ph(n: AstNode) -> bool:
        return n.kind in ("identifier", "type_identifier") and n.text == _PH

    def ellipsis(n: AstNode, anchor: AstNode) -> AstNode:
        start, end = n.start_byte, n.end_byte
        for pstart, pend, _ in placeholders:
            if pstart <= anchor.start_byte < pend:
                start, end = min(start, pstart), max(end, pend)
                break
        return _hole(ELLIPSIS, n, start, end, "...")

    def named(n: AstNode, fld: str) -> AstNode | None:
        return next((c for c in n.children if c.field == fld), None)

    def visit(n: AstNode) -> AstNode:
        if is_ph(n):
            return ellipsis(n, n)
        if n.kind in ("identifier", "type_identifier") and METAVAR_RE.match(n.text):
            return _hole(METAVAR, n, n.start_byte, n.end_byte, n.text)
        if n.kind == "expression_statement" and len(n.children) == 1 and is_ph(n.children[0]):
            return ellipsis(n, n.children[0])
        if n.kind in ("field_declaration", "constant_declaration"):
            declarator = named(n, "declarator")
            name = named(declarator, "name") if declarator is not None else None
            if name is not None and is_ph(name):
                return ellipsis(n, name)
        if n.kind == "formal_parameter":
            name = named(n, "name")
            if name is not None and is_ph(name):
                return ellipsis(n, name)
        if not n.children:
            return n
        return _rebuild(n, tuple(visit(c) for c in n.children))

    return visit(node)


def _detach(node: AstNode) -> AstNode:
    """Copy ``node`` as a parentless root without a field label."""
    return AstNode(
        kind=node.kind,
        span=node.span,
        children=node.children,
        field=None,
        ops=node.ops,
        start_byte=node.start_byte,
        end_byte=node.end_byte,
        terminal=node.terminal,
        src=node.source,
    )


def _lead_expand(line: str) -> str:
    stripped = line.lstrip(" \t")
    return line[: len(line) - len(stripped)].expandtabs(4) + stripped


def normalize_fragment(text: str) -> str:
    """Drop blank edge lines, expand leading tabs, dedent and strip trailing spaces."""
    lines = [_lead_expand(line).rstrip() for line in text.splitlines()]
    while lines and not lines[0]:
        lines.pop(0)
    while lines and not lines[-1]:
        lines.pop()
    return textwrap.dedent("\n".join(lines))


def node_fragment(node: AstNode, replace: tuple[AstNode, str] | None = None) -> str:
    """Source text of ``node`` as a standalone fragment, keeping relative indentation.

    ``replace`` substitutes one descendant's text (used to punch a hole).
    """
    src = node.source
    line_start = src.rfind(b"\n", 0, node.start_byte) + 1
    indent = src[line_start : node.start_byte].decode("utf-8", errors="replace")
    pad = indent if not indent.strip() else " " * len(indent)
    if replace is None:
        body = node.text
    else:
        inner, text = replace
        body = (
            src[node.start_byte : inner.start_byte].decode("utf-8", errors="replace")
            + text
            + src[inner.end_byte : node.end_byte].decode("utf-8", errors="replace")
        )
    return normalize_fragment(pad + body)


def parse_pattern(text: str) -> Pattern:
    """Parse a fragment, trying statement, expression, member and unit wrappers in turn."""
    fragment = normalize_fragment(text)
    if not fragment.strip():
        raise PatternParseError("empty pattern")
    rewritten, char_placeholders = preprocess(fragment)
    last_error = None
    for name, prefix, suffix in _WRAPPERS:
        src_text = prefix + rewritten + suffix
        src = src_text.encode("utf-8")
        tree = parse_tree_sitter(src)
        if tree.root_node.has_error:
            last_error = (name, _first_error(tree.root_node))
            continue
        offset = len(prefix)
        byte_placeholders = [
            (
                len(src_text[: offset + s].encode("utf-8")),
                len(src_text[: offset + e].encode("utf-8")),
                original,
            )
            for s, e, original in char_placeholders
        ]
        full = convert_tree(tree.root_node, src, "<pattern>")
        items = _fragment_items(full, name)
        if items is None:
            continue
        if len(items) != 1:
            raise PatternParseError(
                f"pattern must be a single statement, expression or declaration, got {len(items)}: {fragment!r}"
            )
        folded = _fold_holes(_detach(items[0]), byte_placeholders)
        if folded.kind == ELLIPSIS:
            raise PatternParseError("a pattern cannot be a bare ellipsis")
        folded.field = None
        return Pattern(fragment, folded, name, src, byte_placeholders)
    where = f" ({last_error[0]} wrapper, line {last_error[1][0]})" if last_error else ""
    raise PatternParseError(f"cannot parse pattern{where}: {fragment!r}")


def _fragment_items(full: AstNode, wrapper: str) -> list[AstNode] | None:
    if wrapper == "unit":
        return [c for c in full.children if c.kind not in COMMENT_KINDS]
    cls = full.children[0] if full.children else None
    if cls is None or cls.kind != "class_declaration":
        return None
    body = next((c for c in cls.children if c.field == "body"), None)
    if body is None:
        return None
    if wrapper == "member":
        return list(body.children)
    members = body.children
    if len(members) != 1:
        return None
    member = members[0]
    if wrapper == "statement":
        block = next((c for c in member.children if c.field == "body"), None)
        return list(block.children) if block is not None else None
    declarator = next((c for c in member.children if c.field == "declarator"), None)
    if declarator is None:
        return None
    value = next((c for c in declarator.children if c.field == "value"), None)
    return [value] if value is not None else None
