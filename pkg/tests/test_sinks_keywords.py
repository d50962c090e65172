import pytest

from secretrisk.dataflow import analyze_source
from secretrisk.keywords import (
    KeywordSource,
    assemble_keyword_set,
    database_from_url,
    extract_nosql_keywords,
    extract_orm_keywords,
    extract_orm_models,
)
from secretrisk.model import AssetIdentifier, DetectionMethod, SecretAssetPair, SourceLocation
from secretrisk.sinks import SinkCategory, find_sinks, load_sink_specs
from secretrisk.sqlkeywords import extract_sql_keywords

SPECS = load_sink_specs()


def test_inventory_covers_the_driver_list():
    names = {spec.qualified_callable for spec in SPECS}
    for expected in (
        "aiomysql.connect", "pymysql.connect", "aiopg.connect", "asyncpg.connect",
        "psycopg2.connect", "pymssql.connect", "pyodbc.connect", "jaydebeapi.connect",
        "pymongo.MongoClient", "flask_pymongo.PyMongo",
        "peewee.MySQLDatabase", "sqlalchemy.create_engine",
    ):
        assert expected in names, expected
    assert ".execute" in names


def test_keyword_argument_sink_resolution():
    graph = analyze_source(
        "import pymysql\n"
        'h = "db.internal"\np = "pw123"\nd = "db_patient"\n'
        "conn = pymysql.connect(host=h, password=p, db=d)\n"
    )
    matches = [m for m in find_sinks(graph, SPECS) if m.spec.qualified_callable == "pymysql.connect"]
    assert len(matches) == 1
    match = matches[0]
    assert match.role_value("host") == "db.internal"
    assert match.role_value("password") == "pw123"
    assert match.role_value("database") == "db_patient"


def test_positional_connection_string_sink():
    graph = analyze_source(
        "import pyodbc\n"
        'conn = pyodbc.connect("Server=s;Database=d;Uid=u;Pwd=p;")\n'
    )
    matches = [m for m in find_sinks(graph, SPECS) if m.spec.qualified_callable == "pyodbc.connect"]
    assert len(matches) == 1
    assert matches[0].role_value("connection_string") == "Server=s;Database=d;Uid=u;Pwd=p;"


def test_unknown_callable_is_not_a_sink():
    graph = analyze_source("import requests\nrequests.get('https://x.example')\n")
    callables = {
        m.spec.qualified_callable
        for m in find_sinks(graph, SPECS)
        if not m.spec.is_method
    }
    assert callables == set()


def test_conflicting_connection_string_and_discrete_args_warns():
    graph = analyze_source(
        "import psycopg2\n"
        'conn = psycopg2.connect("postgres://u:p@h/db", host="h2", password="p2")\n'
    )
    matches = [m for m in find_sinks(graph, SPECS) if m.spec.qualified_callable == "psycopg2.connect"]
    assert len(matches) == 1
    match = matches[0]
    assert match.warnings
    assert match.role_value("host") == "h2"
    assert match.role_argument("connection_string") is None


def test_django_settings_dict_is_a_sink():
    graph = analyze_source(
        "DATABASES = {\n"
        '    "default": {\n'
        '        "ENGINE": "django.db.backends.mysql",\n'
        '        "NAME": "warehouse",\n'
        '        "USER": "svc",\n'
        '        "PASSWORD": "djpass12",\n'
        '        "HOST": "db.dj.example",\n'
        '        "PORT": 3306,\n'
        "    }\n"
        "}\n"
    )
    matches = [m for m in find_sinks(graph, SPECS) if m.spec.qualified_callable == "django.settings.DATABASES"]
    assert len(matches) == 1
    match = matches[0]
    assert match.role_value("database") == "warehouse"
    assert match.role_value("password") == "djpass12"
    assert match.role_value("host") == "db.dj.example"


# --- NoSQL keyword extraction -----------------------------------------------


def _client_match(source: str):
    graph = analyze_source(source)
    matches = [
        m
        for m in find_sinks(graph, SPECS)
        if m.spec.category == SinkCategory.NOSQL_DRIVER and not m.spec.is_method
    ]
    assert matches, "expected a NoSQL client sink"
    return graph, matches[0]


def test_nosql_chain_extraction():
    graph, client = _client_match(
        "from pymongo import MongoClient\n"
        'client = MongoClient(host="m.example", username="u", password="pw123456")\n'
        'client["shop"]["orders"].insert_one({"email": e, "phone": p})\n'
    )
    extraction = extract_nosql_keywords(graph, client)
    assert extraction.database == "shop"
    assert extraction.collections == {"orders"}
    assert extraction.fields == {"email", "phone"}


def test_nosql_dynamic_document_warns():
    graph, client = _client_match(
        "from pymongo import MongoClient\n"
        'client = MongoClient(host="m.example", password="pw123456")\n'
        'doc = build_doc()\n'
        'client["shop"]["orders"].insert_one(doc)\n'
    )
    extraction = extract_nosql_keywords(graph, client)
    assert extraction.fields == set()
    assert extraction.diagnostics


def test_nosql_attribute_collection_access():
    graph, client = _client_match(
        "from pymongo import MongoClient\n"
        'client = MongoClient(host="m.example", password="pw123456")\n'
        'db = client["app"]\n'
        "users = db.users\n"
    )
    extraction = extract_nosql_keywords(graph, client)
    assert extraction.database == "app"
    assert extraction.collections == {"users"}


def test_nosql_nested_document_keys_dot_joined():
    graph, client = _client_match(
        "from pymongo import MongoClient\n"
        'client = MongoClient(host="m.example", password="pw123456")\n'
        'client["crm"]["people"].insert_one({"contact": {"email": e}, "age": a})\n'
    )
    extraction = extract_nosql_keywords(graph, client)
    assert extraction.fields == {"contact.email", "age"}


# --- ORM keyword extraction ----------------------------------------------------


ORM_MODELS_SOURCE = (
    "from sqlalchemy import Column, Integer, String\n"
    "from sqlalchemy.orm import declarative_base\n"
    "Base = declarative_base()\n"
    "\n"
    "class User(Base):\n"
    '    __tablename__ = "users"\n'
    "    id = Column(Integer, primary_key=True)\n"
    "    username = Column(String(64))\n"
    "    password = Column(String(128))\n"
    "\n"
    "class AuditEvent(Base):\n"
    "    actor = Column(String(32))\n"
)


def test_orm_models_tablename_and_columns():
    models = extract_orm_models(analyze_source(ORM_MODELS_SOURCE))
    by_table = {m.table: m for m in models}
    assert set(by_table) == {"users", "auditevent"}
    assert by_table["users"].columns == {"id", "username", "password"}
    assert by_table["auditevent"].columns == {"actor"}


def test_peewee_and_django_model_bases():
    peewee_graph = analyze_source(
        "from peewee import Model, CharField\n"
        "class Invoice(Model):\n"
        "    number = CharField()\n"
    )
    assert [m.table for m in extract_orm_models(peewee_graph)] == ["invoice"]
    django_graph = analyze_source(
        "from django.db import models\n"
        "class Profile(models.Model):\n"
        "    bio = models.TextField()\n"
    )
    assert [m.table for m in extract_orm_models(django_graph)] == ["profile"]


def test_database_from_url():
    assert database_from_url("mysql://u:p@h:3306/portfolio") == "portfolio"
    assert database_from_url("postgres://u:p@h/warehouse?sslmode=require") == "warehouse"
    assert database_from_url("mysql://u:p@h") is None
    assert database_from_url(None) is None


def test_orm_extraction_combines_binding_and_models():
    app_graph = analyze_source(
        "from sqlalchemy import create_engine\n"
        'engine = create_engine("mysql://svc:pw@h:3306/portfolio")\n'
    )
    models_graph = analyze_source(ORM_MODELS_SOURCE)
    orm_match = [
        m for m in find_sinks(app_graph, SPECS) if m.spec.category == SinkCategory.ORM_FRAMEWORK
    ][0]
    extraction = extract_orm_keywords([app_graph, models_graph], orm_match)
    assert extraction.database == "portfolio"
    assert {m.table for m in extraction.models} == {"users", "auditevent"}


# --- assembly -------------------------------------------------------------------


def _pair(database: str | None) -> SecretAssetPair:
    return SecretAssetPair(
        secret="s3cret!",
        secret_location=SourceLocation("a.py", 1, 1),
        asset=AssetIdentifier(host="h", database_name=database),
        asset_location=SourceLocation("a.py", 1, 5),
        detection_method=DetectionMethod.DATA_FLOW,
    )


def test_assemble_db_name_only():
    keyword_set = assemble_keyword_set(_pair("db_patient"))
    assert keyword_set.database_names == {"db_patient"}
    assert keyword_set.table_names == set()
    assert keyword_set.column_names == set()
    assert keyword_set.sources["db_patient"] == {KeywordSource.ASSET_IDENTIFIER}


def test_assemble_union_with_sql():
    extraction = extract_sql_keywords("SELECT name FROM patients WHERE id=1")
    keyword_set = assemble_keyword_set(
        _pair("db_patient"), sql_extractions=[(extraction, KeywordSource.SQL_QUERY)]
    )
    assert keyword_set.database_names == {"db_patient"}
    assert keyword_set.table_names == {"patients"}
    assert keyword_set.column_names == {"name", "id"}


def test_assemble_duplicate_keyword_merges_provenance():
    sql = extract_sql_keywords("SELECT username FROM users")
    orm_graph = analyze_source(ORM_MODELS_SOURCE)
    from secretrisk.keywords import OrmExtraction

    orm = OrmExtraction(database=None, models=extract_orm_models(orm_graph))
    keyword_set = assemble_keyword_set(
        _pair(None),
        sql_extractions=[(sql, KeywordSource.SQL_QUERY)],
        orm_extractions=[orm],
    )
    assert "users" in keyword_set.table_names
    assert keyword_set.sources["users"] == {KeywordSource.SQL_QUERY, KeywordSource.ORM_MODEL}


def test_keywords_are_trimmed_and_quote_stripped():
    keyword_set = assemble_keyword_set(_pair('  "quoted_db"  '))
    assert keyword_set.database_names == {"quoted_db"}
