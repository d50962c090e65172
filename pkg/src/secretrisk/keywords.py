"""Assemble the database keyword set (database/table/column names) per pair."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .dataflow import ChainVal, DefUseGraph, DictVal, ListVal, SVal
from .model import SecretAssetPair
from .sinks import SinkCategory, SinkMatch
from .sqlkeywords import SqlExtraction


class KeywordSource(str, Enum):
    SQL_QUERY = "SqlQuery"
    SQL_FILE = "SqlFile"
    NOSQL_CHAIN = "NoSqlChain"
    ORM_MODEL = "OrmModel"
    ASSET_IDENTIFIER = "AssetIdentifier"


class _KeywordBag:
    """Case-insensitive dedup that preserves the first-seen casing."""

    def __init__(self) -> None:
        self._by_lower: dict[str, str] = {}

    def add(self, keyword: str) -> str | None:
        cleaned = keyword.strip().strip("'\"`")
        if not cleaned:
            return None
        lowered = cleaned.lower()
        if lowered not in self._by_lower:
            self._by_lower[lowered] = cleaned
        return self._by_lower[lowered]

    def values(self) -> set[str]:
        return set(self._by_lower.values())


@dataclass
class DatabaseKeywordSet:
    pair_id: str
    _databases: _KeywordBag = field(default_factory=_KeywordBag)
    _tables: _KeywordBag = field(default_factory=_KeywordBag)
    _columns: _KeywordBag = field(default_factory=_KeywordBag)
    sources: dict[str, set[KeywordSource]] = field(default_factory=dict)

    @property
    def database_names(self) -> set[str]:
        return self._databases.values()

    @property
    def table_names(self) -> set[str]:
        return self._tables.values()

    @property
    def column_names(self) -> set[str]:
        return self._columns.values()

    def _record(self, stored: str | None, source: KeywordSource) -> None:
        if stored is not None:
            self.sources.setdefault(stored.lower(), set()).add(source)

    def add_database(self, name: str, source: KeywordSource) -> None:
        self._record(self._databases.add(name), source)

    def add_table(self, name: str, source: KeywordSource) -> None:
        self._record(self._tables.add(name), source)

    def add_column(self, name: str, source: KeywordSource) -> None:
        self._record(self._columns.add(name), source)

    def all_keywords(self) -> set[str]:
        return self.database_names | self.table_names | self.column_names


# --- NoSQL extraction -----------------------------------------------------------


@dataclass
class NoSqlExtraction:
    database: str | None = None
    collections: set[str] = field(default_factory=set)
    fields: set[str] = field(default_factory=set)
    diagnostics: list[str] = field(default_factory=list)


def _document_fields(value, prefix: str = "") -> tuple[set[str], bool]:
    """Keys of a dict literal; nested keys dot-joined one level down.
    Returns (fields, had_dynamic_parts)."""
    fields_found: set[str] = set()
    dynamic = False
    if isinstance(value, DictVal):
        for key, inner in value.entries:
            if key is None:
                dynamic = True
                continue
            if key.startswith("$"):
                nested, nested_dynamic = _document_fields(inner, prefix)
                fields_found |= nested
                dynamic |= nested_dynamic
                continue
            name = f"{prefix}.{key}" if prefix else key
            if isinstance(inner, DictVal) and not prefix:
                nested, nested_dynamic = _document_fields(inner, name)
                fields_found |= nested or {name}
                dynamic |= nested_dynamic
            else:
                fields_found.add(name)
    elif isinstance(value, ListVal):
        for item in value.items:
            nested, nested_dynamic = _document_fields(item, prefix)
            fields_found |= nested
            dynamic |= nested_dynamic
    else:
        dynamic = True
    return fields_found, dynamic


def extract_nosql_keywords(graph: DefUseGraph, client_match: SinkMatch) -> NoSqlExtraction:
    """Database/collection names from subscript or attribute chains rooted at
    the client call; field names from dict literals passed to query methods."""
    out = NoSqlExtraction()
    client_id = client_match.call.call_id

    for call_id, path in graph.chains:
        if call_id != client_id or not path:
            continue
        if out.database is None:
            out.database = path[0]
        if len(path) >= 2:
            out.collections.add(path[1])

    for call in graph.call_sites:
        if call.method is None or not isinstance(call.receiver, ChainVal):
            continue
        if call.receiver.call_id != client_id:
            continue
        for argument in list(call.args) + list(call.kwargs.values()):
            fields_found, dynamic = _document_fields(argument)
            out.fields |= fields_found
            if dynamic:
                out.diagnostics.append(
                    f"dynamically constructed document at line {call.line}; "
                    "field names incomplete"
                )
    # the URI path database (if any) comes from the asset identifier instead
    return out


# --- ORM extraction --------------------------------------------------------------


_ORM_BASE_NAMES = {"Model", "Base", "DeclarativeBase", "models.Model", "peewee.Model"}
_COLUMN_CONSTRUCTORS = {"Column", "mapped_column"}


@dataclass
class OrmModel:
    table: str
    columns: set[str] = field(default_factory=set)


@dataclass
class OrmExtraction:
    database: str | None = None
    models: list[OrmModel] = field(default_factory=list)


def _is_column_call(callee: str) -> bool:
    last = callee.rsplit(".", 1)[-1]
    return last in _COLUMN_CONSTRUCTORS or last.endswith("Field")


def extract_orm_models(graph: DefUseGraph) -> list[OrmModel]:
    """Model classes in one file: base-class name match, `__tablename__` or the
    lower-cased class name, columns from column-constructor assignments."""
    models: list[OrmModel] = []
    base_names = _ORM_BASE_NAMES | graph.declarative_bases
    for cls in graph.classes:
        if not any(
            base in base_names or base.rsplit(".", 1)[-1] in ("Model", "DeclarativeBase")
            for base in cls.bases
        ):
            continue
        table = cls.string_attrs.get("__tablename__") or cls.name.lower()
        model = OrmModel(table=table)
        for attr, callee in cls.column_calls:
            if attr.startswith("_"):
                continue
            if _is_column_call(callee):
                model.columns.add(attr)
        models.append(model)
    return models


def database_from_url(url: str | None) -> str | None:
    """The path component of a connection URL names the database."""
    if not url or "://" not in url:
        return None
    _, _, rest = url.partition("://")
    rest = rest.split("?", 1)[0]
    if "/" not in rest:
        return None
    _, _, path = rest.partition("/")
    path = path.strip("/")
    return path.split("/", 1)[0] or None


def extract_orm_keywords(
    graphs: list[DefUseGraph], orm_match: SinkMatch
) -> OrmExtraction:
    """Repo-wide model classes plus the database named by the ORM binding."""
    out = OrmExtraction()
    database_arg = orm_match.role_argument("database")
    if database_arg is not None and database_arg.fully_resolved:
        out.database = database_arg.value
    else:
        connection_arg = orm_match.role_argument("connection_string")
        if connection_arg is not None and connection_arg.fully_resolved:
            out.database = database_from_url(connection_arg.value)
    for graph in graphs:
        out.models.extend(extract_orm_models(graph))
    return out


# --- assembly --------------------------------------------------------------------


def assemble_keyword_set(
    pair: SecretAssetPair,
    sql_extractions: list[tuple[SqlExtraction, KeywordSource]] | None = None,
    nosql_extractions: list[NoSqlExtraction] | None = None,
    orm_extractions: list[OrmExtraction] | None = None,
) -> DatabaseKeywordSet:
    """Merge the asset identifier's database name with extraction results."""
    keyword_set = DatabaseKeywordSet(pair_id=pair.pair_id)
    if pair.asset.database_name:
        keyword_set.add_database(pair.asset.database_name, KeywordSource.ASSET_IDENTIFIER)
    for extraction, source in sql_extractions or []:
        for table in extraction.tables:
            keyword_set.add_table(table, source)
        for column in extraction.columns:
            keyword_set.add_column(column, source)
    for nosql in nosql_extractions or []:
        if nosql.database:
            keyword_set.add_database(nosql.database, KeywordSource.NOSQL_CHAIN)
        for collection in nosql.collections:
            keyword_set.add_table(collection, KeywordSource.NOSQL_CHAIN)
        for field_name in nosql.fields:
            keyword_set.add_column(field_name, KeywordSource.NOSQL_CHAIN)
    for orm in orm_extractions or []:
        if orm.database:
            keyword_set.add_database(orm.database, KeywordSource.ORM_MODEL)
        for model in orm.models:
            keyword_set.add_table(model.table, KeywordSource.ORM_MODEL)
            for column in model.columns:
                keyword_set.add_column(column, KeywordSource.ORM_MODEL)
    return keyword_set
