"""Intraprocedural def-use analysis with constant propagation for Python files.

Each file is parsed (with line-dropping recovery for syntax errors) and walked
statement by statement. String and number literals propagate through
assignments, concatenation, f-strings, and dict literals; anything dynamic
(environment reads, call results, diverging branches) becomes a HOLE fragment.
Call sites, import aliases, class definitions, and client subscript chains are
recorded for the sink matcher and keyword extractors.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from .sqlkeywords import HOLE_MARKER

_MAX_RECOVERY_ATTEMPTS = 40


@dataclass(frozen=True)
class Fragment:
    text: str | None  # None marks a HOLE
    location: tuple[int, int] | None = None  # (line, column), 1-based

    @property
    def is_hole(self) -> bool:
        return self.text is None


@dataclass(frozen=True)
class ResolvedArgument:
    """One sink argument: its role and the fragments that build its value."""

    role: str
    fragments: tuple[Fragment, ...]

    @property
    def fully_resolved(self) -> bool:
        return bool(self.fragments) and all(not f.is_hole for f in self.fragments)

    @property
    def value(self) -> str | None:
        if not self.fully_resolved:
            return None
        return "".join(f.text for f in self.fragments)

    def render_with_holes(self) -> str:
        return "".join(HOLE_MARKER if f.is_hole else f.text for f in self.fragments)


# --- abstract values ---------------------------------------------------------


class _Unknown:
    __slots__ = ()

    def __repr__(self) -> str:
        return "UNKNOWN"


UNKNOWN = _Unknown()


@dataclass(frozen=True)
class SVal:
    fragments: tuple[Fragment, ...]

    @property
    def fully_resolved(self) -> bool:
        return all(not f.is_hole for f in self.fragments)

    @property
    def value(self) -> str | None:
        if not self.fully_resolved:
            return None
        return "".join(f.text for f in self.fragments)

    def shape(self) -> tuple:
        return tuple(f.text for f in self.fragments)


@dataclass(frozen=True)
class NumVal:
    value: int | float


@dataclass(frozen=True)
class ModuleRef:
    name: str


@dataclass(frozen=True)
class FuncRef:
    qualname: str


@dataclass(frozen=True)
class CallVal:
    call_id: int


@dataclass(frozen=True)
class ChainVal:
    call_id: int
    path: tuple[str, ...]


@dataclass(frozen=True)
class DictVal:
    entries: tuple[tuple[str | None, object], ...]  # key None = dynamic key

    def get(self, key: str):
        for k, v in self.entries:
            if k == key:
                return v
        return None


@dataclass(frozen=True)
class ListVal:
    items: tuple[object, ...]


def _values_equal(a, b) -> bool:
    if a is b:
        return True
    if isinstance(a, SVal) and isinstance(b, SVal):
        return a.shape() == b.shape()
    if isinstance(a, NumVal) and isinstance(b, NumVal):
        return a.value == b.value
    if isinstance(a, DictVal) and isinstance(b, DictVal):
        if len(a.entries) != len(b.entries):
            return False
        return all(
            ka == kb and _values_equal(va, vb)
            for (ka, va), (kb, vb) in zip(a.entries, b.entries)
        )
    if isinstance(a, (ModuleRef, FuncRef, CallVal, ChainVal)):
        return a == b
    return False


# --- graph records -----------------------------------------------------------


@dataclass
class Definition:
    node_id: int
    name: str
    scope: str
    line: int
    column: int
    value: object


@dataclass
class Use:
    name: str
    line: int
    column: int
    definition: int | None  # node_id of the reaching definition


@dataclass
class CallSite:
    call_id: int
    qualname: str | None  # dotted name when statically known
    method: str | None  # attribute name for receiver method calls
    receiver: object | None
    args: list
    kwargs: dict[str, object]
    line: int
    column: int


@dataclass
class ClassInfo:
    name: str
    bases: list[str]
    line: int
    column: int
    # class-level `attr = <call>()` assignments: (attr, callable display name)
    column_calls: list[tuple[str, str]] = field(default_factory=list)
    # class-level constant string assignments: attr -> value
    string_attrs: dict[str, str] = field(default_factory=dict)


@dataclass
class DefUseGraph:
    path: str = "<memory>"
    definitions: list[Definition] = field(default_factory=list)
    uses: list[Use] = field(default_factory=list)
    literal_table: dict[int, str | int | float] = field(default_factory=dict)
    call_sites: list[CallSite] = field(default_factory=list)
    classes: list[ClassInfo] = field(default_factory=list)
    chains: list[tuple[int, tuple[str, ...]]] = field(default_factory=list)
    declarative_bases: set[str] = field(default_factory=set)
    import_map: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


@dataclass
class ParseResult:
    tree: ast.Module
    warnings: list[str] = field(default_factory=list)


def parse_source(file_text: str) -> ParseResult:
    """Parse Python source, dropping offending lines until the rest parses.

    Never raises: hopeless input yields an empty module plus a warning.
    """
    warnings: list[str] = []
    lines = file_text.splitlines()
    for _ in range(_MAX_RECOVERY_ATTEMPTS):
        try:
            return ParseResult(ast.parse("\n".join(lines)), warnings)
        except SyntaxError as exc:
            lineno = exc.lineno or 0
            if not 1 <= lineno <= len(lines) or not lines[lineno - 1].strip():
                break
            warnings.append(f"dropped unparseable line {lineno}: {exc.msg}")
            lines[lineno - 1] = ""
        except (ValueError, MemoryError, RecursionError) as exc:
            warnings.append(f"parse failed: {exc}")
            return ParseResult(ast.Module(body=[], type_ignores=[]), warnings)
    warnings.append("file could not be parsed; analysis skipped")
    return ParseResult(ast.Module(body=[], type_ignores=[]), warnings)


# --- analyzer ----------------------------------------------------------------

# Collection/query method names never treated as chain path segments.
_NOSQL_METHODS = {
    "insert_one", "insert_many", "find", "find_one", "find_one_and_update",
    "update_one", "update_many", "replace_one", "delete_one", "delete_many",
    "aggregate", "count_documents",
}
_CHAIN_ATTR_BLOCKLIST = _NOSQL_METHODS | {
    "close", "commit", "rollback", "cursor", "execute", "executemany",
    "fetchone", "fetchall", "fetchmany", "admin", "client", "connect",
    "server_info", "list_database_names", "list_collection_names",
    "with_options", "get_database", "get_collection",
}

_DECLARATIVE_FACTORIES = {
    "declarative_base",
    "sqlalchemy.orm.declarative_base",
    "sqlalchemy.ext.declarative.declarative_base",
    "sqlalchemy.orm.DeclarativeBase",
}


class _Analyzer:
    def __init__(self, graph: DefUseGraph):
        self.graph = graph
        self._next_id = 0
        self._def_by_name: dict[tuple[str, str], int] = {}

    # -- bookkeeping --------------------------------------------------------
    def _new_id(self) -> int:
        self._next_id += 1
        return self._next_id

    def _loc(self, node: ast.AST) -> tuple[int, int]:
        return (getattr(node, "lineno", 1), getattr(node, "col_offset", 0) + 1)

    def define(self, name: str, scope: str, node: ast.AST, value) -> None:
        line, col = self._loc(node)
        node_id = self._new_id()
        definition = Definition(node_id, name, scope, line, col, value)
        self.graph.definitions.append(definition)
        self._def_by_name[(scope, name)] = node_id
        if isinstance(value, SVal) and value.fully_resolved:
            self.graph.literal_table[node_id] = value.value
        elif isinstance(value, NumVal):
            self.graph.literal_table[node_id] = value.value

    def record_use(self, name: str, scope: str, node: ast.AST) -> None:
        line, col = self._loc(node)
        self.graph.uses.append(
            Use(name, line, col, self._def_by_name.get((scope, name)))
        )

    def record_chain(self, chain: ChainVal) -> None:
        if chain.path:
            self.graph.chains.append((chain.call_id, chain.path))

    # -- expression evaluation ----------------------------------------------
    def eval(self, node: ast.expr, env: dict, scope: str):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, str):
                return SVal((Fragment(node.value, self._loc(node)),))
            if isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
                return NumVal(node.value)
            return UNKNOWN
        if isinstance(node, ast.Name):
            self.record_use(node.id, scope, node)
            return env.get(node.id, UNKNOWN)
        if isinstance(node, ast.JoinedStr):
            fragments: list[Fragment] = []
            for part in node.values:
                if isinstance(part, ast.Constant) and isinstance(part.value, str):
                    fragments.append(Fragment(part.value, self._loc(part)))
                elif isinstance(part, ast.FormattedValue):
                    inner = self.eval(part.value, env, scope)
                    fragments.extend(self._as_fragments(inner, part))
                else:
                    fragments.append(Fragment(None, self._loc(part)))
            return SVal(tuple(fragments))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Add):
            left = self.eval(node.left, env, scope)
            right = self.eval(node.right, env, scope)
            if isinstance(left, NumVal) and isinstance(right, NumVal):
                return NumVal(left.value + right.value)
            if isinstance(left, (SVal, _Unknown)) or isinstance(right, (SVal, _Unknown)):
                return SVal(
                    tuple(self._as_fragments(left, node.left))
                    + tuple(self._as_fragments(right, node.right))
                )
            return UNKNOWN
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mod):
            # printf-style query building keeps the template, holes the args
            left = self.eval(node.left, env, scope)
            if isinstance(left, SVal):
                return SVal(left.fragments + (Fragment(None, self._loc(node.right)),))
            return UNKNOWN
        if isinstance(node, ast.Attribute):
            base = self.eval(node.value, env, scope)
            if isinstance(base, ModuleRef):
                return ModuleRef(f"{base.name}.{node.attr}")
            if isinstance(base, (CallVal, ChainVal)) and not node.attr.startswith("_"):
                if node.attr in _CHAIN_ATTR_BLOCKLIST:
                    return UNKNOWN
                chain = self._extend_chain(base, node.attr)
                self.record_chain(chain)
                return chain
            return UNKNOWN
        if isinstance(node, ast.Subscript):
            base = self.eval(node.value, env, scope)
            key = self._subscript_key(node, env, scope)
            if isinstance(base, DictVal) and key is not None:
                found = base.get(key)
                return found if found is not None else UNKNOWN
            if isinstance(base, (CallVal, ChainVal)) and key is not None:
                chain = self._extend_chain(base, key)
                self.record_chain(chain)
                return chain
            return UNKNOWN
        if isinstance(node, ast.Dict):
            entries: list[tuple[str | None, object]] = []
            for key_node, value_node in zip(node.keys, node.values):
                if key_node is None:
                    entries.append((None, UNKNOWN))
                    continue
                key_val = self.eval(key_node, env, scope)
                value = self.eval(value_node, env, scope)
                if isinstance(key_val, SVal) and key_val.fully_resolved:
                    entries.append((key_val.value, value))
                else:
                    entries.append((None, value))
            return DictVal(tuple(entries))
        if isinstance(node, (ast.List, ast.Tuple)):
            return ListVal(tuple(self.eval(el, env, scope) for el in node.elts))
        if isinstance(node, ast.Call):
            return self._eval_call(node, env, scope)
        if isinstance(node, ast.IfExp):
            body = self.eval(node.body, env, scope)
            orelse = self.eval(node.orelse, env, scope)
            return body if _values_equal(body, orelse) else UNKNOWN
        return UNKNOWN

    def _as_fragments(self, value, node: ast.AST) -> list[Fragment]:
        if isinstance(value, SVal):
            return list(value.fragments)
        if isinstance(value, NumVal):
            rendered = str(value.value)
            return [Fragment(rendered, self._loc(node))]
        return [Fragment(None, self._loc(node))]

    def _subscript_key(self, node: ast.Subscript, env: dict, scope: str) -> str | None:
        index = node.slice
        value = self.eval(index, env, scope) if isinstance(index, ast.expr) else UNKNOWN
        if isinstance(value, SVal) and value.fully_resolved:
            return value.value
        return None

    def _extend_chain(self, base, segment: str) -> ChainVal:
        if isinstance(base, ChainVal):
            return ChainVal(base.call_id, base.path + (segment,))
        return ChainVal(base.call_id, (segment,))

    def _func_target(self, func: ast.expr, env: dict, scope: str):
        """Returns (qualname, method, receiver)."""
        if isinstance(func, ast.Name):
            self.record_use(func.id, scope, func)
            bound = env.get(func.id)
            if isinstance(bound, FuncRef):
                return bound.qualname, None, None
            if isinstance(bound, ModuleRef):
                return bound.name, None, None
            if bound is None:
                return func.id, None, None  # builtins such as open()
            return None, None, None
        if isinstance(func, ast.Attribute):
            base = self.eval(func.value, env, scope)
            if isinstance(base, ModuleRef):
                return f"{base.name}.{func.attr}", None, None
            if isinstance(base, FuncRef):
                return f"{base.qualname}.{func.attr}", None, None
            return None, func.attr, base
        return None, None, None

    def _eval_call(self, node: ast.Call, env: dict, scope: str):
        qualname, method, receiver = self._func_target(node.func, env, scope)
        args = [self.eval(arg, env, scope) for arg in node.args if not isinstance(arg, ast.Starred)]
        kwargs = {}
        for kw in node.keywords:
            if kw.arg is not None:
                kwargs[kw.arg] = self.eval(kw.value, env, scope)
        line, col = self._loc(node)
        call = CallSite(self._new_id(), qualname, method, receiver, args, kwargs, line, col)
        self.graph.call_sites.append(call)
        return CallVal(call.call_id)

    # -- statements ----------------------------------------------------------
    def exec_block(self, body: list[ast.stmt], env: dict, scope: str) -> None:
        for stmt in body:
            self.exec_stmt(stmt, env, scope)

    def exec_stmt(self, stmt: ast.stmt, env: dict, scope: str) -> None:
        if isinstance(stmt, (ast.Import, ast.ImportFrom)):
            self._handle_import(stmt, env)
            return
        if isinstance(stmt, ast.Assign):
            value = self.eval(stmt.value, env, scope)
            for target in stmt.targets:
                self._assign_target(target, value, stmt.value, env, scope)
            return
        if isinstance(stmt, ast.AnnAssign) and stmt.value is not None:
            value = self.eval(stmt.value, env, scope)
            self._assign_target(stmt.target, value, stmt.value, env, scope)
            return
        if isinstance(stmt, ast.AugAssign):
            if isinstance(stmt.target, ast.Name):
                current = env.get(stmt.target.id, UNKNOWN)
                addition = self.eval(stmt.value, env, scope)
                if isinstance(stmt.op, ast.Add):
                    if isinstance(current, NumVal) and isinstance(addition, NumVal):
                        merged = NumVal(current.value + addition.value)
                    else:
                        merged = SVal(
                            tuple(self._as_fragments(current, stmt.target))
                            + tuple(self._as_fragments(addition, stmt.value))
                        )
                else:
                    merged = UNKNOWN
                env[stmt.target.id] = merged
                self.define(stmt.target.id, scope, stmt, merged)
            else:
                self.eval(stmt.value, env, scope)
            return
        if isinstance(stmt, ast.Expr):
            self.eval(stmt.value, env, scope)
            return
        if isinstance(stmt, ast.If):
            self.eval(stmt.test, env, scope)
            self._exec_branches(stmt.body, stmt.orelse, env, scope, stmt)
            return
        if isinstance(stmt, (ast.For, ast.AsyncFor)):
            self.eval(stmt.iter, env, scope)
            if isinstance(stmt.target, ast.Name):
                env[stmt.target.id] = UNKNOWN
            self._exec_branches(stmt.body, stmt.orelse, env, scope, stmt)
            return
        if isinstance(stmt, ast.While):
            self.eval(stmt.test, env, scope)
            self._exec_branches(stmt.body, stmt.orelse, env, scope, stmt)
            return
        if isinstance(stmt, ast.Try):
            handler_bodies: list[ast.stmt] = []
            for handler in stmt.handlers:
                handler_bodies.extend(handler.body)
            self._exec_branches(stmt.body + stmt.orelse, handler_bodies, env, scope, stmt)
            self.exec_block(stmt.finalbody, env, scope)
            return
        if isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                value = self.eval(item.context_expr, env, scope)
                if item.optional_vars is not None and isinstance(item.optional_vars, ast.Name):
                    env[item.optional_vars.id] = value
                    self.define(item.optional_vars.id, scope, item.optional_vars, value)
            self.exec_block(stmt.body, env, scope)
            return
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            child_env = dict(env)
            for arg in stmt.args.args + stmt.args.kwonlyargs:
                child_env[arg.arg] = UNKNOWN
            self.exec_block(stmt.body, child_env, f"{scope}.{stmt.name}")
            return
        if isinstance(stmt, ast.ClassDef):
            self._handle_class(stmt, env, scope)
            return
        if isinstance(stmt, ast.Return) and stmt.value is not None:
            self.eval(stmt.value, env, scope)
            return
        if isinstance(stmt, (ast.Delete, ast.Global, ast.Nonlocal, ast.Pass)):
            return
        # anything else: look inside for calls so sinks are not missed
        for child in ast.iter_child_nodes(stmt):
            if isinstance(child, ast.expr):
                self.eval(child, env, scope)

    def _assign_target(self, target, value, value_node, env: dict, scope: str) -> None:
        if isinstance(target, ast.Name):
            env[target.id] = value
            self.define(target.id, scope, target, value)
            if isinstance(value, ChainVal):
                self.record_chain(value)
        elif isinstance(target, (ast.Tuple, ast.List)):
            items = value.items if isinstance(value, ListVal) else None
            for index, element in enumerate(target.elts):
                element_value = (
                    items[index] if items is not None and index < len(items) else UNKNOWN
                )
                self._assign_target(element, element_value, value_node, env, scope)
        elif isinstance(target, ast.Subscript):
            base = self.eval(target.value, env, scope)
            key = self._subscript_key(target, env, scope)
            if (
                isinstance(target.value, ast.Name)
                and isinstance(base, DictVal)
                and key is not None
            ):
                entries = tuple(e for e in base.entries if e[0] != key) + ((key, value),)
                env[target.value.id] = DictVal(entries)
                self.define(target.value.id, scope, target, env[target.value.id])
        # attribute targets and the rest stay dynamic

    def _exec_branches(self, body, orelse, env: dict, scope: str, marker: ast.stmt) -> None:
        """Run both paths on copies and keep only agreeing bindings."""
        env_true = dict(env)
        env_false = dict(env)
        self.exec_block(list(body), env_true, scope)
        self.exec_block(list(orelse), env_false, scope)
        for name in set(env_true) | set(env_false):
            in_true = env_true.get(name)
            in_false = env_false.get(name)
            if in_true is not None and in_false is not None and _values_equal(in_true, in_false):
                merged = in_true
            else:
                merged = UNKNOWN
            previous = env.get(name)
            env[name] = merged
            if previous is None or not _values_equal(previous, merged):
                # join point: record a fresh definition so later uses resolve
                # to the merged value rather than one branch's constant
                self.define(name, scope, marker, merged)

    def _handle_import(self, stmt, env: dict) -> None:
        if isinstance(stmt, ast.Import):
            for alias in stmt.names:
                bound = alias.asname or alias.name.split(".")[0]
                target = alias.name if alias.asname else alias.name.split(".")[0]
                env[bound] = ModuleRef(target)
                self.graph.import_map[bound] = target
        else:
            module = stmt.module or ""
            for alias in stmt.names:
                if alias.name == "*":
                    continue
                bound = alias.asname or alias.name
                qualname = f"{module}.{alias.name}" if module else alias.name
                env[bound] = FuncRef(qualname)
                self.graph.import_map[bound] = qualname

    def _handle_class(self, stmt: ast.ClassDef, env: dict, scope: str) -> None:
        bases = [self._render_base(b) for b in stmt.bases]
        info = ClassInfo(stmt.name, [b for b in bases if b], *self._loc(stmt))
        class_env = dict(env)
        for body_stmt in stmt.body:
            target_name = None
            value_node = None
            if isinstance(body_stmt, ast.Assign) and len(body_stmt.targets) == 1 and isinstance(
                body_stmt.targets[0], ast.Name
            ):
                target_name = body_stmt.targets[0].id
                value_node = body_stmt.value
            elif isinstance(body_stmt, ast.AnnAssign) and isinstance(
                body_stmt.target, ast.Name
            ) and body_stmt.value is not None:
                target_name = body_stmt.target.id
                value_node = body_stmt.value
            if target_name is not None and value_node is not None:
                value = self.eval(value_node, class_env, f"{scope}.{stmt.name}")
                if isinstance(value, SVal) and value.fully_resolved:
                    info.string_attrs[target_name] = value.value
                if isinstance(value_node, ast.Call):
                    callee = self._render_base(value_node.func)
                    if callee:
                        info.column_calls.append((target_name, callee))
                continue
            self.exec_stmt(body_stmt, class_env, f"{scope}.{stmt.name}")
        self.graph.classes.append(info)
        # class bodies do not leak assignments outward

    def _render_base(self, node: ast.expr) -> str:
        if isinstance(node, ast.Name):
            return node.id
        if isinstance(node, ast.Attribute):
            prefix = self._render_base(node.value)
            return f"{prefix}.{node.attr}" if prefix else node.attr
        if isinstance(node, ast.Call):
            return self._render_base(node.func)
        if isinstance(node, ast.Subscript):
            return self._render_base(node.value)
        return ""


def build_def_use(tree: ast.Module | ParseResult, path: str = "<memory>") -> DefUseGraph:
    """Run the analyzer over a parsed module."""
    if isinstance(tree, ParseResult):
        module = tree.tree
        warnings = list(tree.warnings)
    else:
        module = tree
        warnings = []
    graph = DefUseGraph(path=path, warnings=warnings)
    analyzer = _Analyzer(graph)
    env: dict[str, object] = {}
    analyzer.exec_block(module.body, env, "module")

    # names bound to a declarative-base factory act as ORM base classes
    call_by_id = {c.call_id: c for c in graph.call_sites}
    for definition in graph.definitions:
        value = definition.value
        if isinstance(value, CallVal):
            call = call_by_id.get(value.call_id)
            if call and call.qualname and (
                call.qualname in _DECLARATIVE_FACTORIES
                or call.qualname.endswith(".declarative_base")
            ):
                graph.declarative_bases.add(definition.name)
    return graph


def analyze_source(file_text: str, path: str = "<memory>") -> DefUseGraph:
    """Parse + build in one step."""
    return build_def_use(parse_source(file_text), path=path)


def resolve_value(graph: DefUseGraph, name: str) -> str | None:
    """Final resolved constant for a module-level name, when it exists."""
    for definition in reversed(graph.definitions):
        if definition.name == name and definition.scope == "module":
            value = definition.value
            if isinstance(value, SVal):
                return value.value
            if isinstance(value, NumVal):
                return str(value.value)
            return None
    return None


def argument_from_value(value, role: str, node_hint: tuple[int, int] | None = None) -> ResolvedArgument:
    """Wrap an abstract value into a ResolvedArgument for the given role."""
    if isinstance(value, SVal):
        return ResolvedArgument(role, value.fragments)
    if isinstance(value, NumVal):
        return ResolvedArgument(role, (Fragment(str(value.value), node_hint),))
    return ResolvedArgument(role, (Fragment(None, node_hint),))


def trace_query_fragments(graph: DefUseGraph, call: CallSite) -> ResolvedArgument:
    """The raw-query argument of an execute-style call, fragments in source order."""
    if call.args:
        return argument_from_value(call.args[0], "raw_query", (call.line, call.column))
    return ResolvedArgument("raw_query", (Fragment(None, (call.line, call.column)),))


def find_file_open_sql(graph: DefUseGraph) -> list[str]:
    """Constant .sql/.ddl paths passed to file-open calls."""
    paths: list[str] = []
    for call in graph.call_sites:
        if call.qualname not in ("open", "io.open", "pathlib.Path", "Path"):
            continue
        if not call.args:
            continue
        first = call.args[0]
        if isinstance(first, SVal) and first.fully_resolved:
            text = first.value
            if text and text.lower().endswith((".sql", ".ddl")) and text not in paths:
                paths.append(text)
    return paths
