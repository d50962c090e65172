"""Core domain types shared across the scan pipeline."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum


class DbType(str, Enum):
    MYSQL = "MySQL"
    POSTGRESQL = "PostgreSQL"
    MONGODB = "MongoDB"
    SQLSERVER = "SQLServer"
    UNKNOWN = "Unknown"


# Default server ports checked when the asset identifier carries no port.
DEFAULT_DB_PORTS: dict[DbType, int] = {
    DbType.MYSQL: 3306,
    DbType.POSTGRESQL: 5432,
    DbType.MONGODB: 27017,
    DbType.SQLSERVER: 1433,
}


class DetectionMethod(str, Enum):
    CONNECTION_STRING = "ConnectionString"
    DATA_FLOW = "DataFlow"
    NEIGHBOR_HEURISTIC = "NeighborHeuristic"


# Lower rank survives when duplicate pairs collapse.
METHOD_PRECEDENCE: dict[DetectionMethod, int] = {
    DetectionMethod.CONNECTION_STRING: 0,
    DetectionMethod.DATA_FLOW: 1,
    DetectionMethod.NEIGHBOR_HEURISTIC: 2,
}


@dataclass(frozen=True, order=True)
class SourceLocation:
    """A 1-based (line, column) position in a file relative to the scan root."""

    path: str
    line: int
    column: int = 1

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")
        if "\\" in self.path:
            object.__setattr__(self, "path", self.path.replace("\\", "/"))


@dataclass(frozen=True)
class AssetIdentifier:
    """The (host, port, database name) triple naming the protected resource."""

    host: str
    port: int | None = None
    database_name: str | None = None
    db_type: DbType = DbType.UNKNOWN

    def __post_init__(self) -> None:
        if not self.host:
            raise ValueError("host must be non-empty")
        if self.port is not None and not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")


def make_pair_id(path: str, line: int, secret: str) -> str:
    """Stable identifier for a pair, derived from (path, line, secret hash)."""
    secret_digest = hashlib.sha256(secret.encode("utf-8")).hexdigest()[:12]
    raw = f"{path}:{line}:{secret_digest}"
    return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class SecretAssetPair:
    """A detected secret plus the asset identifier it protects."""

    secret: str
    secret_location: SourceLocation
    asset: AssetIdentifier
    asset_location: SourceLocation
    detection_method: DetectionMethod
    pair_id: str = ""

    def __post_init__(self) -> None:
        if not self.secret:
            raise ValueError("secret must be non-empty")
        if not self.pair_id:
            object.__setattr__(
                self,
                "pair_id",
                make_pair_id(
                    self.secret_location.path, self.secret_location.line, self.secret
                ),
            )

    def dedup_key(self) -> tuple:
        return (
            self.secret,
            self.asset.host,
            self.asset.port,
            self.asset.database_name,
            self.secret_location.path,
        )


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal warning surfaced in the final report."""

    code: str
    message: str
    path: str = ""

    def sort_key(self) -> tuple:
        return (self.path, self.code, self.message)
