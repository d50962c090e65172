"""Extract table and column names from raw SQL text.

One permissive dialect covers the common DML/DDL of the four supported
database families; backtick, double-quote, and bracket identifier quoting are
all accepted. Statements the walker does not understand produce a diagnostic
and contribute nothing, never an exception.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

# Marker spliced into reconstructed query text wherever data flow could not
# resolve a fragment; NUL bytes keep it impossible to collide with real SQL.
HOLE_MARKER = "\x00HOLE\x00"
_HOLE_IDENT = "__hole__"

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>--[^\n]*|\#[^\n]*|/\*.*?\*/)
    | (?P<string>'(?:[^'\\]|\\.|'')*')
    | (?P<qident>"(?:[^"]|"")+"|`[^`]+`|\[[^\]]+\])
    | (?P<param>%\(\w+\)s|%s|\?|:\w+|\$\d+)
    | (?P<number>\d+(?:\.\d+)?)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
    | (?P<op><=|>=|<>|!=|\|\||::|[(),;.=<>+\-*/%])
    """,
    re.VERBOSE | re.DOTALL,
)

_KEYWORDS = {
    "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT",
    "OFFSET", "ASC", "DESC", "DISTINCT", "AS", "AND", "OR", "NOT", "NULL",
    "LIKE", "ILIKE", "IN", "IS", "BETWEEN", "EXISTS", "CASE", "WHEN", "THEN",
    "ELSE", "END", "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS",
    "ON", "USING", "UNION", "ALL", "INSERT", "INTO", "VALUES", "UPDATE",
    "SET", "DELETE", "CREATE", "TABLE", "IF", "ALTER", "ADD", "COLUMN",
    "DROP", "MODIFY", "CHANGE", "RENAME", "TO", "PRIMARY", "KEY", "FOREIGN",
    "REFERENCES", "UNIQUE", "CONSTRAINT", "CHECK", "INDEX", "DEFAULT",
    "AUTO_INCREMENT", "AUTOINCREMENT", "RETURNING", "DUPLICATE", "IGNORE",
    "TEMPORARY", "CASCADE", "RESTRICT", "COLLATE", "UNSIGNED",
}

_CONSTRAINT_STARTERS = {
    "PRIMARY", "FOREIGN", "UNIQUE", "KEY", "CONSTRAINT", "CHECK", "INDEX",
}


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | string | number | param | op
    text: str

    @property
    def upper(self) -> str:
        return self.text.upper()


@dataclass
class SqlExtraction:
    """Table/column names found in one SQL text, deduplicated case-insensitively."""

    tables: set[str] = field(default_factory=set)
    columns: set[str] = field(default_factory=set)
    diagnostics: list[str] = field(default_factory=list)

    def merge(self, other: "SqlExtraction") -> None:
        lower_tables = {t.lower() for t in self.tables}
        lower_columns = {c.lower() for c in self.columns}
        for t in other.tables:
            if t.lower() not in lower_tables:
                self.tables.add(t)
                lower_tables.add(t.lower())
        for c in other.columns:
            if c.lower() not in lower_columns:
                self.columns.add(c)
                lower_columns.add(c.lower())
        self.diagnostics.extend(other.diagnostics)


def neutralize_holes(sql_text: str) -> str:
    """Replace HOLE markers with a neutral identifier so the text still parses."""
    return sql_text.replace(HOLE_MARKER, _HOLE_IDENT)


def _unquote(text: str) -> str:
    if text and text[0] in "\"`[":
        return text[1:-1].replace('""', '"')
    return text


def _tokenize(sql: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(sql):
        match = _TOKEN_RE.match(sql, pos)
        if match is None:
            pos += 1  # unknown byte: skip, stay permissive
            continue
        pos = match.end()
        kind = match.lastgroup
        if kind in ("ws", "comment"):
            continue
        text = match.group()
        if kind == "qident":
            tokens.append(_Token("ident", _unquote(text)))
        else:
            tokens.append(_Token(kind, text))
    return tokens


class _Walker:
    """Clause-driven walk over one statement's tokens."""

    def __init__(self, tokens: list[_Token], out: SqlExtraction):
        self.tokens = tokens
        self.pos = 0
        self.out = out
        self.aliases: set[str] = set()
        self._table_lower: set[str] = set()

    # -- token helpers ----------------------------------------------------
    def peek(self, offset: int = 0) -> _Token | None:
        idx = self.pos + offset
        return self.tokens[idx] if idx < len(self.tokens) else None

    def next(self) -> _Token | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "ident" and tok.upper in words

    def _is_keyword(self, tok: _Token) -> bool:
        return tok.kind == "ident" and tok.upper in _KEYWORDS

    # -- emit helpers ------------------------------------------------------
    def add_table(self, name: str) -> None:
        if name.lower() == _HOLE_IDENT:
            return
        if name.lower() not in {t.lower() for t in self.out.tables}:
            self.out.tables.add(name)
        self._table_lower.add(name.lower())

    def add_column(self, name: str) -> None:
        if name == "*" or name.lower() == _HOLE_IDENT:
            return
        if name.lower() not in {c.lower() for c in self.out.columns}:
            self.out.columns.add(name)

    # -- shared pieces -----------------------------------------------------
    def read_dotted_name(self) -> list[str] | None:
        """IDENT (DOT IDENT|*)* consumed; returns parts or None."""
        tok = self.peek()
        if tok is None or tok.kind != "ident" or self._is_keyword(tok):
            return None
        parts = [self.next().text]
        while True:
            dot = self.peek()
            if dot is None or dot.kind != "op" or dot.text != ".":
                break
            nxt = self.peek(1)
            if nxt is None:
                break
            if nxt.kind == "ident" or (nxt.kind == "op" and nxt.text == "*"):
                self.next()
                parts.append(self.next().text)
            else:
                break
        return parts

    def read_table_ref(self, register_alias: bool = True) -> None:
        parts = self.read_dotted_name()
        if parts is None:
            self.next()
            return
        self.add_table(parts[-1])
        if not register_alias:
            return
        if self.at_keyword("AS"):
            self.next()
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and not self._is_keyword(tok):
            self.aliases.add(self.next().text.lower())

    def skip_parenthesized(self) -> None:
        """Consume a balanced ( ... ) without emitting anything."""
        depth = 0
        while True:
            tok = self.next()
            if tok is None:
                return
            if tok.kind == "op" and tok.text == "(":
                depth += 1
            elif tok.kind == "op" and tok.text == ")":
                depth -= 1
                if depth <= 0:
                    return

    def walk_expression(self, stop_words: set[str], columns: bool = True) -> None:
        """Consume tokens up to a top-level stop keyword, emitting columns."""
        while True:
            tok = self.peek()
            if tok is None:
                return
            if tok.kind == "op" and tok.text in (";", ")"):
                return
            if tok.kind == "ident" and tok.upper in stop_words:
                return
            if tok.kind == "op" and tok.text == "(":
                self.next()
                if self.at_keyword("SELECT"):
                    self._walk_subselect()
                else:
                    self.walk_expression(stop_words=set())
                closing = self.peek()
                if closing is not None and closing.kind == "op" and closing.text == ")":
                    self.next()
                continue
            if tok.kind == "ident" and not self._is_keyword(tok):
                parts = self.read_dotted_name()
                after = self.peek()
                if after is not None and after.kind == "op" and after.text == "(":
                    continue  # function call; arguments handled on next loop
                if columns and parts:
                    last = parts[-1]
                    if last != "*" and not (len(parts) == 1 and last.lower() in self.aliases):
                        self.add_column(last)
                continue
            self.next()

    def _walk_subselect(self) -> None:
        sub = _Walker(self.tokens, self.out)
        sub.pos = self.pos
        sub.aliases = set(self.aliases)
        sub.walk_select(nested=True)
        self.pos = sub.pos

    # -- statement walkers ---------------------------------------------------
    def walk_select(self, nested: bool = False) -> None:
        self.next()  # SELECT
        if self.at_keyword("DISTINCT", "ALL"):
            self.next()
        # select list
        expect_expr = True
        while True:
            tok = self.peek()
            if tok is None or (tok.kind == "op" and tok.text in (";",)):
                return
            if nested and tok.kind == "op" and tok.text == ")":
                return
            if self.at_keyword("FROM"):
                self.next()
                break
            if tok.kind == "op" and tok.text == ",":
                self.next()
                expect_expr = True
                continue
            if tok.kind == "op" and tok.text == "*":
                self.next()
                expect_expr = False
                continue
            if tok.kind == "op" and tok.text == "(":
                self.next()
                if self.at_keyword("SELECT"):
                    self._walk_subselect()
                else:
                    self.walk_expression(stop_words=set())
                closing = self.peek()
                if closing is not None and closing.kind == "op" and closing.text == ")":
                    self.next()
                expect_expr = False
                continue
            if self.at_keyword("AS"):
                self.next()
                if self.peek() is not None:
                    self.next()  # alias
                expect_expr = False
                continue
            if self.at_keyword("CASE", "WHEN", "THEN", "ELSE", "END", "AND", "OR",
                               "NOT", "IS", "NULL", "LIKE", "IN", "BETWEEN"):
                self.next()
                expect_expr = True
                continue
            if tok.kind == "ident" and not self._is_keyword(tok):
                parts = self.read_dotted_name()
                after = self.peek()
                if after is not None and after.kind == "op" and after.text == "(":
                    expect_expr = True
                    continue
                if expect_expr:
                    last = parts[-1] if parts else ""
                    if last:
                        self.add_column(last)
                    expect_expr = False
                # a bare ident right after an expression is an implicit alias
                continue
            self.next()

        # FROM clause and the rest
        stop = {"WHERE", "GROUP", "HAVING", "ORDER", "LIMIT", "OFFSET", "UNION",
                "ON", "USING", "JOIN", "INNER", "LEFT", "RIGHT", "FULL",
                "OUTER", "CROSS", "RETURNING"}
        in_from = True
        while True:
            tok = self.peek()
            if tok is None or (tok.kind == "op" and tok.text == ";"):
                return
            if nested and tok.kind == "op" and tok.text == ")":
                return
            if in_from:
                if tok.kind == "op" and tok.text == "(":
                    self.next()
                    if self.at_keyword("SELECT"):
                        self._walk_subselect()
                        closing = self.peek()
                        if closing is not None and closing.kind == "op" and closing.text == ")":
                            self.next()
                        if self.at_keyword("AS"):
                            self.next()
                        alias = self.peek()
                        if alias is not None and alias.kind == "ident" and not self._is_keyword(alias):
                            self.aliases.add(self.next().text.lower())
                    continue
                if tok.kind == "ident" and not self._is_keyword(tok):
                    self.read_table_ref()
                    continue
                if tok.kind == "op" and tok.text == ",":
                    self.next()
                    continue
            if self.at_keyword("JOIN"):
                self.next()
                in_from = True
                continue
            if self.at_keyword("INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS"):
                self.next()
                continue
            if self.at_keyword("ON"):
                self.next()
                self.walk_expression(stop_words=stop)
                in_from = False
                continue
            if self.at_keyword("USING"):
                self.next()
                if self.peek() is not None and self.peek().kind == "op" and self.peek().text == "(":
                    self.next()
                    self.walk_expression(stop_words=set())
                    if self.peek() is not None and self.peek().kind == "op" and self.peek().text == ")":
                        self.next()
                in_from = False
                continue
            if self.at_keyword("WHERE", "HAVING", "RETURNING"):
                self.next()
                self.walk_expression(stop_words=stop)
                in_from = False
                continue
            if self.at_keyword("GROUP", "ORDER"):
                self.next()
                if self.at_keyword("BY"):
                    self.next()
                self.walk_expression(stop_words=stop)
                in_from = False
                continue
            if self.at_keyword("LIMIT", "OFFSET", "ASC", "DESC", "UNION", "ALL"):
                self.next()
                in_from = False
                if self.at_keyword("SELECT"):
                    self.walk_select(nested=nested)
                    return
                continue
            self.next()

    def walk_insert(self) -> None:
        self.next()  # INSERT
        while self.at_keyword("INTO", "IGNORE", "OR"):
            self.next()
        self.read_table_ref(register_alias=False)
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "(":
            self.next()
            self.walk_expression(stop_words=set())
            if self.peek() is not None and self.peek().kind == "op" and self.peek().text == ")":
                self.next()
        if self.at_keyword("VALUES"):
            self.next()
            while self.peek() is not None:
                tok = self.peek()
                if tok.kind == "op" and tok.text == "(":
                    self.skip_parenthesized()
                elif tok.kind == "op" and tok.text == ",":
                    self.next()
                else:
                    break
        if self.at_keyword("SELECT"):
            self.walk_select()
        if self.at_keyword("ON"):
            self.next()  # ON DUPLICATE KEY UPDATE col=...
            while self.at_keyword("DUPLICATE", "KEY", "UPDATE"):
                self.next()
            self.walk_expression(stop_words={"RETURNING"})
        if self.at_keyword("RETURNING"):
            self.next()
            self.walk_expression(stop_words=set())

    def walk_update(self) -> None:
        self.next()  # UPDATE
        self.read_table_ref()
        if self.at_keyword("SET"):
            self.next()
            self.walk_expression(stop_words={"WHERE", "RETURNING"})
        if self.at_keyword("WHERE"):
            self.next()
            self.walk_expression(stop_words={"RETURNING"})
        if self.at_keyword("RETURNING"):
            self.next()
            self.walk_expression(stop_words=set())

    def walk_delete(self) -> None:
        self.next()  # DELETE
        if self.at_keyword("FROM"):
            self.next()
        self.read_table_ref()
        if self.at_keyword("WHERE"):
            self.next()
            self.walk_expression(stop_words=set())

    def walk_create(self) -> bool:
        self.next()  # CREATE
        if self.at_keyword("TEMPORARY"):
            self.next()
        if not self.at_keyword("TABLE"):
            return False
        self.next()
        while self.at_keyword("IF", "NOT", "EXISTS"):
            self.next()
        parts = self.read_dotted_name()
        if parts:
            self.add_table(parts[-1])
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text != "(":
            return True
        self.next()
        self._walk_column_defs()
        return True

    def _walk_column_defs(self) -> None:
        expect_column = True
        depth = 0
        while True:
            tok = self.peek()
            if tok is None:
                return
            if tok.kind == "op" and tok.text == "(":
                self.next()
                depth += 1
                continue
            if tok.kind == "op" and tok.text == ")":
                self.next()
                if depth == 0:
                    return
                depth -= 1
                continue
            if tok.kind == "op" and tok.text == "," and depth == 0:
                self.next()
                expect_column = True
                continue
            if expect_column and tok.kind == "ident":
                if tok.upper in _CONSTRAINT_STARTERS:
                    self._walk_constraint()
                    expect_column = False
                    continue
                self.add_column(self.next().text)
                expect_column = False
                continue
            if tok.kind == "ident" and tok.upper == "REFERENCES":
                self.next()
                parts = self.read_dotted_name()
                if parts:
                    self.add_table(parts[-1])
                continue
            self.next()

    def _walk_constraint(self) -> None:
        """PRIMARY KEY (a, b) / FOREIGN KEY (x) REFERENCES t(y) / UNIQUE (...)"""
        while True:
            tok = self.peek()
            if tok is None or (tok.kind == "op" and tok.text in (",", ")")):
                return
            if tok.kind == "op" and tok.text == "(":
                self.next()
                self.walk_expression(stop_words=set())
                if self.peek() is not None and self.peek().kind == "op" and self.peek().text == ")":
                    self.next()
                continue
            if tok.kind == "ident" and tok.upper == "REFERENCES":
                self.next()
                parts = self.read_dotted_name()
                if parts:
                    self.add_table(parts[-1])
                continue
            self.next()

    def walk_alter(self) -> bool:
        self.next()  # ALTER
        if not self.at_keyword("TABLE"):
            return False
        self.next()
        while self.at_keyword("IF", "EXISTS", "ONLY"):
            self.next()
        parts = self.read_dotted_name()
        if parts:
            self.add_table(parts[-1])
        while True:
            tok = self.peek()
            if tok is None or (tok.kind == "op" and tok.text == ";"):
                return True
            if self.at_keyword("ADD", "DROP", "MODIFY", "CHANGE", "ALTER"):
                self.next()
                if self.at_keyword("COLUMN", "CONSTRAINT"):
                    self.next()
                if self.at_keyword("PRIMARY", "FOREIGN", "UNIQUE", "KEY", "INDEX", "CHECK"):
                    self._walk_constraint()
                    continue
                name = self.read_dotted_name()
                if name:
                    self.add_column(name[-1])
                # CHANGE old new TYPE: second name is also a column
                follow = self.peek()
                if follow is not None and follow.kind == "ident" and not self._is_keyword(follow):
                    nxt = self.peek(1)
                    if nxt is not None and nxt.kind == "ident" and not self._is_keyword(nxt):
                        self.add_column(self.next().text)
                continue
            if self.at_keyword("RENAME"):
                self.next()
                if self.at_keyword("TO"):
                    self.next()
                    parts = self.read_dotted_name()
                    if parts:
                        self.add_table(parts[-1])
                elif self.at_keyword("COLUMN"):
                    self.next()
                    old = self.read_dotted_name()
                    if old:
                        self.add_column(old[-1])
                    if self.at_keyword("TO"):
                        self.next()
                        new = self.read_dotted_name()
                        if new:
                            self.add_column(new[-1])
                continue
            self.next()


def _split_statements(tokens: list[_Token]) -> list[list[_Token]]:
    statements: list[list[_Token]] = []
    current: list[_Token] = []
    for tok in tokens:
        if tok.kind == "op" and tok.text == ";":
            if current:
                statements.append(current)
                current = []
            continue
        current.append(tok)
    if current:
        statements.append(current)
    return statements


def extract_sql_keywords(sql_text: str) -> SqlExtraction:
    """Tables and columns referenced by the statements in ``sql_text``.

    HOLE markers are neutralized first; ``*`` projections yield no columns;
    aliases never surface as keywords.
    """
    out = SqlExtraction()
    if not sql_text or not sql_text.strip():
        return out
    tokens = _tokenize(neutralize_holes(sql_text))
    for statement in _split_statements(tokens):
        head = statement[0]
        if head.kind != "ident":
            out.diagnostics.append(f"unparseable statement starting with {head.text!r}")
            continue
        walker = _Walker(statement, out)
        verb = head.upper
        try:
            if verb == "SELECT":
                walker.walk_select()
            elif verb == "INSERT":
                walker.walk_insert()
            elif verb == "UPDATE":
                walker.walk_update()
            elif verb == "DELETE":
                walker.walk_delete()
            elif verb == "CREATE":
                if not walker.walk_create():
                    out.diagnostics.append("unsupported CREATE statement skipped")
            elif verb == "ALTER":
                if not walker.walk_alter():
                    out.diagnostics.append("unsupported ALTER statement skipped")
            else:
                out.diagnostics.append(f"unsupported statement verb: {verb}")
        except Exception as exc:  # pragma: no cover - permissiveness guard
            out.diagnostics.append(f"statement parse failed: {exc}")
    return out
