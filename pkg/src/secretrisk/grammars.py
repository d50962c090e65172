"""Connection-string grammars: three pattern groups with round-trip templates.

Every pattern isolates the secret and the asset parts (host, port, database)
through named capture groups; a grammar's template re-renders captured fields
into a string that the same pattern matches again.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .model import DbType


class GrammarGroup(str, Enum):
    URL_STYLE = "UrlStyle"
    KEY_VALUE_STYLE = "KeyValueStyle"
    JDBC_STYLE = "JdbcStyle"


@dataclass(frozen=True)
class ConnectionStringGrammar:
    name: str
    group: GrammarGroup
    pattern: re.Pattern
    template: str
    db_type_hint: DbType = DbType.UNKNOWN

    def __post_init__(self) -> None:
        groups = self.pattern.groupindex
        if "password" not in groups or "host" not in groups:
            raise ValueError(f"grammar {self.name}: password and host groups are required")


_SCHEME_DB_TYPES = {
    "mysql": DbType.MYSQL,
    "postgres": DbType.POSTGRESQL,
    "postgresql": DbType.POSTGRESQL,
    "postgis": DbType.POSTGRESQL,
    "mongodb": DbType.MONGODB,
    "mongodb+srv": DbType.MONGODB,
    "mariadb": DbType.MYSQL,
    "sqlserver": DbType.SQLSERVER,
    "mssql": DbType.SQLSERVER,
    "microsoft:sqlserver": DbType.SQLSERVER,
}

_URL_PATTERN = re.compile(
    r"""
    (?<![\w:+])
    (?P<scheme>mysql|postgresql|postgres|postgis|mongodb\+srv|mongodb|mariadb|mssql)
    ://
    (?:(?P<user>[^:/@\s'"]+)(?::(?P<password>[^@/\s'"]*))?@)
    (?P<host>[A-Za-z0-9_.-]+|\[[0-9A-Fa-f:.]+\])
    (?::(?P<port>\d{1,5}))?
    (?:/(?P<db>[A-Za-z0-9_.$-]+))?
    """,
    re.VERBOSE,
)

# Key/value strings list fields in any order; each lookahead scans forward
# from the first recognized key, so one match covers the whole run.
_KV_SEGMENT = r"[^;'\"\n]*;\s*"
_KV_PATTERN = re.compile(
    rf"""
    (?<![\w=])
    (?=(?:{_KV_SEGMENT})*?(?:server|data\ source|host|address|addr)\s*=\s*(?P<host>[^;,'\"\n]+))
    (?=(?:{_KV_SEGMENT})*?(?:pwd|password)\s*=\s*(?P<password>[^;'\"\n]+))
    (?:(?=(?:{_KV_SEGMENT})*?(?:database|initial\ catalog)\s*=\s*(?P<db>[^;'\"\n]+)))?
    (?:(?=(?:{_KV_SEGMENT})*?(?:uid|user\ id|user)\s*=\s*(?P<user>[^;'\"\n]+)))?
    (?:(?=(?:{_KV_SEGMENT})*?port\s*=\s*(?P<port>\d{{1,5}})))?
    (?:server|data\ source|host|address|addr|database|initial\ catalog|uid|user\ id|user|pwd|password|port)\s*=
    """,
    re.VERBOSE | re.IGNORECASE,
)

_JDBC_URL_PATTERN = re.compile(
    r"""
    jdbc:
    (?P<scheme>mysql|mariadb|postgresql)
    ://
    (?P<host>[A-Za-z0-9_.-]+)
    (?::(?P<port>\d{1,5}))?
    (?:/(?P<db>[A-Za-z0-9_.$-]+))?
    \?
    (?=[^\s'"]*?user=(?P<user>[^&\s'"]+))
    (?=[^\s'"]*?password=(?P<password>[^&\s'"]+))
    """,
    re.VERBOSE,
)

_JDBC_SQLSERVER_PATTERN = re.compile(
    r"""
    jdbc:
    (?P<scheme>sqlserver|microsoft:sqlserver)
    ://
    (?P<host>[A-Za-z0-9_.-]+)
    (?::(?P<port>\d{1,5}))?
    (?=(?:;[^;\s'"]*)*?;databaseName=(?P<db>[^;\s'"]+))?
    (?=(?:;[^;\s'"]*)*?;user(?:Name)?=(?P<user>[^;\s'"]+))
    (?=(?:;[^;\s'"]*)*?;password=(?P<password>[^;\s'"]+))
    """,
    re.VERBOSE,
)

BUILTIN_GRAMMARS: tuple[ConnectionStringGrammar, ...] = (
    ConnectionStringGrammar(
        name="url",
        group=GrammarGroup.URL_STYLE,
        pattern=_URL_PATTERN,
        template="{scheme}://{user}:{password}@{host}{port_part}{db_part}",
    ),
    ConnectionStringGrammar(
        name="key-value",
        group=GrammarGroup.KEY_VALUE_STYLE,
        pattern=_KV_PATTERN,
        template="Server={host};{port_kv}{db_kv}{user_kv}Password={password};",
        db_type_hint=DbType.SQLSERVER,
    ),
    ConnectionStringGrammar(
        name="jdbc-url",
        group=GrammarGroup.JDBC_STYLE,
        pattern=_JDBC_URL_PATTERN,
        template="jdbc:{scheme}://{host}{port_part}{db_part}?user={user}&password={password}",
    ),
    ConnectionStringGrammar(
        name="jdbc-sqlserver",
        group=GrammarGroup.JDBC_STYLE,
        pattern=_JDBC_SQLSERVER_PATTERN,
        template="jdbc:{scheme}://{host}{port_part};databaseName={db};user={user};password={password}",
        db_type_hint=DbType.SQLSERVER,
    ),
)


def scheme_db_type(scheme: str | None, fallback: DbType) -> DbType:
    if scheme:
        return _SCHEME_DB_TYPES.get(scheme.lower(), fallback)
    return fallback


def render_template(grammar: ConnectionStringGrammar, fields: dict[str, str | None]) -> str:
    """Substitute captured fields back into the grammar's template."""
    port = fields.get("port")
    db = fields.get("db")
    user = fields.get("user") or "user"
    return grammar.template.format(
        scheme=fields.get("scheme") or "mysql",
        user=user,
        password=fields.get("password") or "",
        host=fields.get("host") or "",
        port_part=f":{port}" if port else "",
        db_part=f"/{db}" if db else "",
        port_kv=f"Port={port};" if port else "",
        db_kv=f"Database={db};" if db else "",
        user_kv=f"User Id={user};" if user else "",
        db=db or "db",
    )
