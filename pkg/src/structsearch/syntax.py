"""Java syntax trees, code constructs and corpora.

Parsing is delegated to tree-sitter's Java grammar; the resulting trees are
converted into immutable :class:`AstNode` objects that keep only named nodes.
Anonymous keyword and operator tokens are folded into ``AstNode.ops`` so that
``a += b`` and ``a -= b`` stay distinguishable without carrying punctuation.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator

import tree_sitter_java
from tree_sitter import Language, Parser

log = logging.getLogger(__name__)

# Anonymous tokens that carry no structural meaning once node kinds are known.
DELIMITERS = frozenset({"(", ")", "{", "}", "[", "]", ";", ",", ".", ":"})
COMMENT_KINDS = frozenset({"line_comment", "block_comment"})


class SyntaxCoreError(Exception):
    pass


class ParseError(SyntaxCoreError):
    def __init__(self, file_id: str, position: tuple[int, int]):
        self.file_id = file_id
        self.position = position
        super().__init__(f"{file_id}:{position[0]}:{position[1]}: syntax error")


class UnknownFile(SyntaxCoreError, KeyError):
    def __init__(self, file_id: str):
        self.file_id = file_id
        super().__init__(file_id)

    def __str__(self) -> str:
        return f"unknown file: {self.file_id}"


@dataclass(frozen=True, order=True)
class Span:
    """A 1-based source region. ``end_col`` points one past the last character."""

    file_id: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    @property
    def start(self) -> tuple[int, int]:
        return (self.start_line, self.start_col)

    @property
    def end(self) -> tuple[int, int]:
        return (self.end_line, self.end_col)

    def contains(self, other: Span) -> bool:
        return (
            self.file_id == other.file_id
            and self.start <= other.start
            and other.end <= self.end
        )

    def contains_line(self, line: int) -> bool:
        return self.start_line <= line <= self.end_line

    def to_dict(self) -> dict:
        return {
            "path": self.file_id,
            "start_line": self.start_line,
            "start_col": self.start_col,
            "end_line": self.end_line,
            "end_col": self.end_col,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Span:
        return cls(data["path"], data["start_line"], data["start_col"], data["end_line"], data["end_col"])


class AstNode:
    """An immutable named syntax node.

    ``children`` holds named children only, in source order. ``field`` is the
    grammar field under which this node hangs off its parent (``None`` when
    unlabeled). ``terminal`` is true for nodes that had no children at all in
    the grammar tree (identifiers, numeric literals, ``this``...).
    """

    __slots__ = (
        "kind",
        "span",
        "children",
        "field",
        "ops",
        "start_byte",
        "end_byte",
        "terminal",
        "parent",
        "_src",
        "_index",
    )

    def __init__(
        self,
        kind: str,
        span: Span,
        children: tuple[AstNode, ...],
        field: str | None,
        ops: tuple[str, ...],
        start_byte: int,
        end_byte: int,
        terminal: bool,
        src: bytes,
    ):
        self.kind = kind
        self.span = span
        self.children = children
        self.field = field
        self.ops = ops
        self.start_byte = start_byte
        self.end_byte = end_byte
        self.terminal = terminal
        self.parent: AstNode | None = None
        self._src = src
        self._index: dict[str, list[AstNode]] | None = None
        for child in children:
            child.parent = self

    @property
    def text(self) -> str:
        return self._src[self.start_byte : self.end_byte].decode("utf-8", errors="replace")

    @property
    def source(self) -> bytes:
        return self._src

    def walk(self) -> Iterator[AstNode]:
        """Pre-order traversal, self first."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def ancestors(self) -> Iterator[AstNode]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def kind_index(self) -> dict[str, list[AstNode]]:
        """Descendants (including self) grouped by kind, in pre-order."""
        if self._index is None:
            index: dict[str, list[AstNode]] = {}
            for node in self.walk():
                index.setdefault(node.kind, []).append(node)
            self._index = index
        return self._index

    def same_tree(self, other: AstNode) -> bool:
        """Token-level equality, insensitive to whitespace and comments."""
        if self.kind != other.kind or self.ops != other.ops:
            return False
        if self.terminal or other.terminal:
            return self.terminal == other.terminal and self.text == other.text
        if len(self.children) != len(other.children):
            return False
        return all(
            a.field == b.field and a.same_tree(b) for a, b in zip(self.children, other.children)
        )

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def __repr__(self) -> str:
        text = self.text
        if len(text) > 40:
            text = text[:37] + "..."
        return f"AstNode({self.kind}, {self.span.start_line}:{self.span.start_col}, {text!r})"


class ConstructType(str, enum.Enum):
    Literal = "Literal"
    Variable = "Variable"
    MethodCall = "MethodCall"
    Operator = "Operator"
    IfStatement = "IfStatement"
    ForLoop = "ForLoop"
    WhileLoop = "WhileLoop"
    ContinueStatement = "ContinueStatement"
    BreakStatement = "BreakStatement"
    ReturnStatement = "ReturnStatement"
    TryStatement = "TryStatement"
    SwitchStatement = "SwitchStatement"
    VariableDeclaration = "VariableDeclaration"
    MethodDeclaration = "MethodDeclaration"
    ClassDeclaration = "ClassDeclaration"

    def __str__(self) -> str:
        return self.value


_KIND_TO_TYPE: dict[str, ConstructType] = {}
for _type, _kinds in {
    ConstructType.Literal: (
        "decimal_integer_literal",
        "hex_integer_literal",
        "octal_integer_literal",
        "binary_integer_literal",
        "decimal_floating_point_literal",
        "hex_floating_point_literal",
        "string_literal",
        "character_literal",
        "true",
        "false",
        "null_literal",
    ),
    ConstructType.MethodCall: ("method_invocation", "explicit_constructor_invocation"),
    ConstructType.Operator: (
        "binary_expression",
        "unary_expression",
        "assignment_expression",
        "update_expression",
        "ternary_expression",
        "instanceof_expression",
    ),
    ConstructType.IfStatement: ("if_statement",),
    ConstructType.ForLoop: ("for_statement", "enhanced_for_statement"),
    ConstructType.WhileLoop: ("while_statement", "do_statement"),
    ConstructType.ContinueStatement: ("continue_statement",),
    ConstructType.BreakStatement: ("break_statement",),
    ConstructType.ReturnStatement: ("return_statement",),
    ConstructType.TryStatement: ("try_statement", "try_with_resources_statement"),
    ConstructType.SwitchStatement: ("switch_expression",),
    ConstructType.VariableDeclaration: ("local_variable_declaration", "field_declaration"),
    ConstructType.MethodDeclaration: ("method_declaration", "constructor_declaration"),
    ConstructType.ClassDeclaration: (
        "class_declaration",
        "interface_declaration",
        "enum_declaration",
        "record_declaration",
    ),
}.items():
    for _kind in _kinds:
        _KIND_TO_TYPE[_kind] = _type

TAXONOMY: dict[str, ConstructType] = dict(_KIND_TO_TYPE)

_NAMED_DECLARATIONS = frozenset(
    {
        "method_declaration",
        "constructor_declaration",
        "class_declaration",
        "interface_declaration",
        "enum_declaration",
        "record_declaration",
        "annotation_type_declaration",
    }
)
_NON_VARIABLE_PARENTS = frozenset(
    {
        "scoped_identifier",
        "package_declaration",
        "import_declaration",
        "marker_annotation",
        "annotation",
        "labeled_statement",
        "break_statement",
        "continue_statement",
        "enum_constant",
        "method_reference",
        "element_value_pair",
    }
)


def construct_type(node: AstNode) -> ConstructType | None:
    """Taxonomy mapping; identifiers need their parent to decide."""
    found = _KIND_TO_TYPE.get(node.kind)
    if found is not None or node.kind != "identifier":
        return found
    parent = node.parent
    if parent is None:
        return ConstructType.Variable
    if parent.kind in _NON_VARIABLE_PARENTS:
        return None
    if node.field == "name" and (parent.kind == "method_invocation" or parent.kind in _NAMED_DECLARATIONS):
        return None
    # Capitalised receivers are almost always type names (Integer.toString).
    if node.field == "object" and parent.kind in ("method_invocation", "field_access") and node.text[:1].isupper():
        return None
    return ConstructType.Variable


STATEMENT_CONTAINERS = frozenset(
    {"block", "constructor_body", "switch_block_statement_group", "program"}
)
MEMBER_CONTAINERS = frozenset(
    {"class_body", "interface_body", "enum_body_declarations", "annotation_type_body", "program"}
)
_STATEMENT_KINDS = frozenset(
    {
        "expression_statement",
        "local_variable_declaration",
        "field_declaration",
        "constant_declaration",
        "if_statement",
        "for_statement",
        "enhanced_for_statement",
        "while_statement",
        "do_statement",
        "continue_statement",
        "break_statement",
        "return_statement",
        "throw_statement",
        "try_statement",
        "try_with_resources_statement",
        "switch_expression",
        "synchronized_statement",
        "labeled_statement",
        "assert_statement",
        "yield_statement",
        "explicit_constructor_invocation",
        "local_class_declaration",
    }
    | _NAMED_DECLARATIONS
)


def is_statement(node: AstNode) -> bool:
    """Statements and member declarations: the units a query pattern anchors on."""
    if node.kind in ("block", "program", "class_body", "constructor_body"):
        return False
    if node.kind == "switch_expression":
        return node.parent is None or node.parent.kind in STATEMENT_CONTAINERS
    if node.kind == "local_variable_declaration" and node.parent is not None:
        return node.parent.kind != "for_statement"
    if node.kind in _STATEMENT_KINDS:
        return True
    return node.parent is not None and node.parent.kind in STATEMENT_CONTAINERS and node.kind != "switch_label"


def enclosing_statement(node: AstNode) -> AstNode:
    """The smallest statement or declaration containing ``node`` (itself if it is one)."""
    current: AstNode | None = node
    while current is not None:
        if is_statement(current):
            return current
        current = current.parent
    return node


@dataclass(frozen=True)
class CodeConstruct:
    ctype: ConstructType
    node: AstNode = field(compare=False, repr=False)
    span: Span

    @property
    def file_id(self) -> str:
        return self.span.file_id


# ---------------------------------------------------------------------------
# parsing


@lru_cache(maxsize=1)
def _language() -> Language:
    return Language(tree_sitter_java.language())


def _parser() -> Parser:
    return Parser(_language())


class _LineMap:
    def __init__(self, src: bytes):
        self.src = src
        self.starts = [0]
        for i, byte in enumerate(src):
            if byte == 0x0A:
                self.starts.append(i + 1)
        self.ascii = src.isascii()

    def column(self, row: int, byte_col: int) -> int:
        if self.ascii:
            return byte_col + 1
        start = self.starts[row]
        return len(self.src[start : start + byte_col].decode("utf-8", errors="replace")) + 1

    def line_of(self, byte_offset: int) -> int:
        return bisect_right(self.starts, byte_offset)


def _first_error(ts_node) -> tuple[int, int]:
    stack = [ts_node]
    while stack:
        node = stack.pop()
        if node.is_error or node.is_missing:
            return (node.start_point[0] + 1, node.start_point[1] + 1)
        if node.has_error:
            stack.extend(reversed(node.children))
    return (ts_node.start_point[0] + 1, ts_node.start_point[1] + 1)


def convert_tree(ts_root, src: bytes, file_id: str) -> AstNode:
    """Convert a tree-sitter node into an :class:`AstNode` tree (iteratively)."""
    lines = _LineMap(src)

    def make_span(ts_node) -> Span:
        (sr, sc), (er, ec) = ts_node.start_point, ts_node.end_point
        return Span(file_id, sr + 1, lines.column(sr, sc), er + 1, lines.column(er, ec))

    # Post-order build: (ts_node, field, visited)
    built: dict[int, AstNode] = {}
    stack: list[tuple[object, str | None, bool]] = [(ts_root, None, False)]
    result: AstNode | None = None
    while stack:
        ts_node, fld, visited = stack.pop()
        if not visited:
            stack.append((ts_node, fld, True))
            for i in range(ts_node.child_count - 1, -1, -1):
                child = ts_node.children[i]
                if child.is_named and child.type not in COMMENT_KINDS:
                    stack.append((child, ts_node.field_name_for_child(i), False))
            continue
        children = []
        ops = []
        for i, child in enumerate(ts_node.children):
            if child.is_named:
                if child.type in COMMENT_KINDS:
                    continue
                children.append(built.pop(child.id))
            else:
                token = child.type
                if token not in DELIMITERS:
                    ops.append(token)
        if ts_node.type == "update_expression" and ts_node.child_count and not ts_node.children[0].is_named:
            ops.insert(0, "prefix")
        node = AstNode(
            kind=ts_node.type,
            span=make_span(ts_node),
            children=tuple(children),
            field=fld,
            ops=tuple(ops),
            start_byte=ts_node.start_byte,
            end_byte=ts_node.end_byte,
            terminal=ts_node.child_count == 0,
            src=src,
        )
        built[ts_node.id] = node
        result = node
    assert result is not None
    return result


def parse_tree_sitter(src: bytes):
    return _parser().parse(src)


def parse_source(text: str, file_id: str) -> AstNode:
    """Parse a Java compilation unit. Raises :class:`ParseError` on syntax errors."""
    src = text.encode("utf-8")
    tree = parse_tree_sitter(src)
    if tree.root_node.has_error:
        raise ParseError(file_id, _first_error(tree.root_node))
    return convert_tree(tree.root_node, src, file_id)


def enumerate_constructs(ast: AstNode) -> list[CodeConstruct]:
    """All taxonomy constructs under ``ast`` in source (pre-)order."""
    out = []
    for node in ast.walk():
        ctype = construct_type(node)
        if ctype is not None:
            out.append(CodeConstruct(ctype, node, node.span))
    return out


# ---------------------------------------------------------------------------
# corpora


METHOD_KINDS = frozenset({"method_declaration", "constructor_declaration"})


@dataclass
class SourceFile:
    path: str
    text: str
    ast: AstNode
    _methods: list[AstNode] | None = field(default=None, repr=False)

    def methods(self) -> list[AstNode]:
        if self._methods is None:
            index = self.ast.kind_index()
            found = [n for kind in METHOD_KINDS for n in index.get(kind, [])]
            self._methods = sorted(found, key=lambda n: n.start_byte)
        return self._methods

    def line(self, number: int) -> str:
        lines = self.text.splitlines()
        return lines[number - 1] if 0 < number <= len(lines) else ""


@dataclass
class Corpus:
    root: Path
    files: list[SourceFile]
    errors: dict[str, str] = field(default_factory=dict)
    _by_path: dict[str, SourceFile] = field(default_factory=dict, repr=False)
    _constructs: list[CodeConstruct] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self._by_path = {f.path: f for f in self.files}

    def file(self, file_id: str) -> SourceFile:
        try:
            return self._by_path[file_id]
        except KeyError:
            raise UnknownFile(file_id) from None

    def __contains__(self, file_id: str) -> bool:
        return file_id in self._by_path

    def __len__(self) -> int:
        return len(self.files)

    def constructs(self) -> list[CodeConstruct]:
        if self._constructs is None:
            self._constructs = [c for f in self.files for c in enumerate_constructs(f.ast)]
        return self._constructs

    @property
    def sha256(self) -> str:
        digest = hashlib.sha256()
        for f in self.files:
            digest.update(f.path.encode())
            digest.update(b"\0")
            digest.update(f.text.encode("utf-8"))
            digest.update(b"\0")
        return digest.hexdigest()

    def manifest(self) -> dict:
        return {"root": str(self.root), "files": [f.path for f in self.files], "sha256": self.sha256}

    def write_manifest(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.manifest(), indent=2) + "\n", encoding="utf-8")

    @property
    def line_count(self) -> int:
        return sum(f.text.count("\n") + (0 if f.text.endswith("\n") else 1) for f in self.files)

    @classmethod
    def from_sources(cls, sources: dict[str, str], root: str | Path = ".") -> Corpus:
        files, errors = [], {}
        for path in sorted(sources):
            try:
                files.append(SourceFile(path, sources[path], parse_source(sources[path], path)))
            except ParseError as exc:
                errors[path] = str(exc)
        return cls(Path(root), files, errors)


def load_corpus(root: str | Path) -> Corpus:
    """Load every ``.java`` file below ``root``; unparseable files are reported, not fatal."""
    root = Path(root)
    sources = {}
    for path in sorted(root.rglob("*.java")):
        rel = path.relative_to(root).as_posix()
        sources[rel] = path.read_text(encoding="utf-8", errors="replace")
    corpus = Corpus.from_sources(sources, root)
    for path, message in corpus.errors.items():
        log.warning("excluding %s: %s", path, message)
    return corpus


def load_manifest(path: str | Path) -> Corpus:
    """Load a corpus from a ``corpus.json`` manifest, resolving ``root`` relative to it."""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    root = Path(data["root"])
    if not root.is_absolute():
        root = (path.parent / root).resolve()
    sources = {rel: (root / rel).read_text(encoding="utf-8", errors="replace") for rel in data["files"]}
    corpus = Corpus.from_sources(sources, root)
    expected = data.get("sha256")
    if expected and not corpus.errors and expected != corpus.sha256:
        log.warning("corpus %s does not match manifest hash", root)
    return corpus


def enclosing_method(corpus: Corpus, file_id: str, line: int) -> Span | None:
    """Span of the innermost method or constructor declaration covering ``line``."""
    source = corpus.file(file_id)
    best: AstNode | None = None
    for method in source.methods():
        if method.span.start_line > line:
            break
        if method.span.contains_line(line):
            if best is None or best.span.contains(method.span):
                best = method
    return best.span if best is not None else None


def bundled_corpus_path() -> Path:
    return Path(__file__).parent / "data" / "minicorpus"


def load_bundled_corpus() -> Corpus:
    return load_corpus(bundled_corpus_path())
