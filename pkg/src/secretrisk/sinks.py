"""Driver/ORM sink inventory and call-site matching."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .dataflow import (
    CallSite,
    DefUseGraph,
    DictVal,
    Fragment,
    ResolvedArgument,
    argument_from_value,
)
from .model import DbType


class SinkCategory(str, Enum):
    SQL_DRIVER = "SqlDriver"
    NOSQL_DRIVER = "NoSqlDriver"
    ORM_FRAMEWORK = "OrmFramework"


_ROLES = {
    "host", "port", "user", "password", "database",
    "connection_string", "raw_query", "document",
}

# callable prefix -> database type, for pairs found through discrete arguments
_DB_TYPE_BY_CALLABLE = {
    "aiomysql": DbType.MYSQL,
    "pymysql": DbType.MYSQL,
    "aiopg": DbType.POSTGRESQL,
    "asyncpg": DbType.POSTGRESQL,
    "psycopg2": DbType.POSTGRESQL,
    "pymssql": DbType.SQLSERVER,
    "pyodbc": DbType.SQLSERVER,
    "pymongo": DbType.MONGODB,
    "flask_pymongo": DbType.MONGODB,
    "peewee.MySQLDatabase": DbType.MYSQL,
    "peewee.PostgresqlDatabase": DbType.POSTGRESQL,
}


@dataclass(frozen=True)
class DriverSinkSpec:
    qualified_callable: str  # leading "." means method-name match
    category: SinkCategory
    positional_slots: dict[int, str] = field(default_factory=dict)
    keyword_slots: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.positional_slots and not self.keyword_slots:
            raise ValueError(f"sink {self.qualified_callable}: no slots bound")
        for role in list(self.positional_slots.values()) + list(self.keyword_slots.values()):
            if role not in _ROLES:
                raise ValueError(f"sink {self.qualified_callable}: unknown role {role!r}")

    @property
    def is_method(self) -> bool:
        return self.qualified_callable.startswith(".")

    def db_type(self) -> DbType:
        name = self.qualified_callable
        for prefix, db_type in _DB_TYPE_BY_CALLABLE.items():
            if name == prefix or name.startswith(prefix + "."):
                return db_type
        return DbType.UNKNOWN


@dataclass
class SinkBinding:
    slot: str  # "#0" or the keyword name
    role: str
    argument: ResolvedArgument


@dataclass
class SinkMatch:
    spec: DriverSinkSpec
    call: CallSite
    bindings: list[SinkBinding]
    warnings: list[str] = field(default_factory=list)

    def role_argument(self, role: str) -> ResolvedArgument | None:
        for binding in self.bindings:
            if binding.role == role:
                return binding.argument
        return None

    def role_value(self, role: str) -> str | None:
        argument = self.role_argument(role)
        return argument.value if argument is not None else None


def parse_sink_specs(text: str) -> list[DriverSinkSpec]:
    specs: list[DriverSinkSpec] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        # whole-line comments only: '#N=' is a positional slot, not a comment
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise ValueError(f"sinks line {lineno}: expected 3 fields")
        callable_name, category, bindings_text = parts
        positional: dict[int, str] = {}
        keyword: dict[str, str] = {}
        for item in bindings_text.split(","):
            item = item.strip()
            if not item:
                continue
            slot, _, role = item.partition("=")
            slot, role = slot.strip(), role.strip()
            if slot.startswith("#"):
                positional[int(slot[1:])] = role
            else:
                keyword[slot] = role
        specs.append(
            DriverSinkSpec(
                qualified_callable=callable_name,
                category=SinkCategory(category),
                positional_slots=positional,
                keyword_slots=keyword,
            )
        )
    return specs


def load_sink_specs(path: str | Path | None = None) -> list[DriverSinkSpec]:
    if path is not None:
        return parse_sink_specs(Path(path).read_text(encoding="utf-8"))
    text = resources.files("secretrisk").joinpath("data/sinks.txt").read_text("utf-8")
    return parse_sink_specs(text)


def _match_spec(call: CallSite, spec: DriverSinkSpec) -> bool:
    if spec.is_method:
        return call.method == spec.qualified_callable[1:]
    return call.qualname == spec.qualified_callable


def _bind(call: CallSite, spec: DriverSinkSpec) -> list[SinkBinding]:
    bindings: list[SinkBinding] = []
    hint = (call.line, call.column)
    for index, role in sorted(spec.positional_slots.items()):
        if index < len(call.args):
            bindings.append(
                SinkBinding(f"#{index}", role, argument_from_value(call.args[index], role, hint))
            )
    for name, role in sorted(spec.keyword_slots.items()):
        if name in call.kwargs:
            bindings.append(
                SinkBinding(name, role, argument_from_value(call.kwargs[name], role, hint))
            )
    return bindings


def find_sinks(graph: DefUseGraph, specs: list[DriverSinkSpec]) -> list[SinkMatch]:
    """Call sites matching the inventory, with per-role resolved arguments.

    When a call receives both a connection string and discrete host/password
    arguments, the discrete arguments win and the conflict is recorded.
    """
    matches: list[SinkMatch] = []
    for call in graph.call_sites:
        for spec in specs:
            if not _match_spec(call, spec):
                continue
            bindings = _bind(call, spec)
            if not bindings:
                continue
            match = SinkMatch(spec, call, bindings)
            roles = {b.role for b in bindings}
            if "connection_string" in roles and ({"host", "password"} & roles):
                match.bindings = [b for b in bindings if b.role != "connection_string"]
                match.warnings.append(
                    "sink received both a connection string and discrete "
                    "arguments; using the discrete arguments"
                )
            matches.append(match)
            break
    matches.extend(_django_settings_sinks(graph))
    return matches


_DJANGO_SPEC = DriverSinkSpec(
    qualified_callable="django.settings.DATABASES",
    category=SinkCategory.ORM_FRAMEWORK,
    keyword_slots={
        "NAME": "database",
        "USER": "user",
        "PASSWORD": "password",
        "HOST": "host",
        "PORT": "port",
    },
)


def _django_settings_sinks(graph: DefUseGraph) -> list[SinkMatch]:
    """A Django settings DATABASES dict acts as an ORM sink."""
    matches: list[SinkMatch] = []
    for definition in graph.definitions:
        if definition.name != "DATABASES" or not isinstance(definition.value, DictVal):
            continue
        for _, inner in definition.value.entries:
            if not isinstance(inner, DictVal):
                continue
            keys = {k for k, _ in inner.entries if k}
            if "NAME" not in keys and "ENGINE" not in keys:
                continue
            call = CallSite(
                call_id=-definition.node_id,
                qualname="django.settings.DATABASES",
                method=None,
                receiver=None,
                args=[],
                kwargs={k: v for k, v in inner.entries if k},
                line=definition.line,
                column=definition.column,
            )
            bindings = _bind(call, _DJANGO_SPEC)
            if bindings:
                matches.append(SinkMatch(_DJANGO_SPEC, call, bindings))
    return matches


def sink_db_type(match: SinkMatch) -> DbType:
    if match.spec.qualified_callable == "django.settings.DATABASES":
        engine = match.call.kwargs.get("ENGINE")
        engine_arg = argument_from_value(engine, "database") if engine is not None else None
        engine_text = (engine_arg.value or "").lower() if engine_arg else ""
        if "mysql" in engine_text:
            return DbType.MYSQL
        if "postgres" in engine_text or "psycopg" in engine_text:
            return DbType.POSTGRESQL
        if "sql_server" in engine_text or "mssql" in engine_text:
            return DbType.SQLSERVER
        return DbType.UNKNOWN
    return match.spec.db_type()
