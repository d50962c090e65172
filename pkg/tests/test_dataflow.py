import ast

from secretrisk.dataflow import (
    SVal,
    analyze_source,
    build_def_use,
    find_file_open_sql,
    parse_source,
    resolve_value,
    trace_query_fragments,
)

from .reference import interpret_straight_line

# Thirty straight-line snippets; exec() under a bare namespace is the oracle
# for what constant propagation must compute for `target`.
FOLD_CORPUS: list[tuple[str, str]] = [
    ('q = "a" + "b"', "q"),
    ('q = "a" "b"', "q"),
    ('q = "SELECT x" + " FROM t"', "q"),
    ('a = "one"\nb = "two"\nq = a + b', "q"),
    ('a = "x"\nq = a + a + a', "q"),
    ('q = "a"\nq += "b"', "q"),
    ('q = "a"\nq += "b"\nq += "c"', "q"),
    ('u = "root"\nq = f"user={u}"', "q"),
    ('u = "r"\np = "s"\nq = f"{u}:{p}"', "q"),
    ('user = "svc"\npw = "zz"\nh = "db"\ndb = "sales"\nq = f"mysql://{user}:{pw}@{h}/{db}"', "q"),
    ('x = "A"\ny = x\nq = y + "B"', "q"),
    ('parts = "se"\nq = parts + "cret"', "q"),
    ('q = "head" + "-" + "tail"', "q"),
    ('h = "db1"\nq = "host=" + h + ";"', "q"),
    ('n = "n"\nq = f"{n}{n}{n}"', "q"),
    ('q = f"static"', "q"),
    ('a = "1"\nb = "2"\nc = "3"\nq = a + b + c', "q"),
    ('q = "SELECT a"\nq += " FROM b"\nq += " WHERE c = 1"', "q"),
    ('base = "pre"\nmid = base + "mid"\nq = mid + "post"', "q"),
    ('s = "o"\nt = s + s\nq = t + s', "q"),
    ('first = "John"\nlast = "Doe"\nq = f"{first} {last}"', "q"),
    ('x = "a"\nx = "b"\nq = x', "q"),
    ('x = "a"\nx = x + "b"\nq = x', "q"),
    ('q = "quote\'s"', "q"),
    ('sep = "/"\nq = "a" + sep + "b" + sep + "c"', "q"),
    ('host = "h"\nport = "5432"\nq = host + ":" + port', "q"),
    ('t = "lit"\nq = t if True else t', "q"),
    ('flag = "f"\na = "x" if flag else "x"\nq = a', "q"),
    ('pw = "p@ss"\nq = f"password={pw}!"', "q"),
    ('left = "L"\nright = "R"\nmidl = left + "-"\nq = midl + right', "q"),
]

HOLE_CORPUS: list[tuple[str, str]] = [
    ('import os\nq = os.environ["H"]', "q"),
    ('import os\nq = "pre" + os.environ["H"]', "q"),
    ('def f():\n    return "x"\nq = f()', "q"),
    ('q = input()', "q"),
    ('if cond:\n    q = "a"\nelse:\n    q = "b"', "q"),
    ('x = unknown_name\nq = "v=" + x', "q"),
    ('q = "a"\nfor i in range(2):\n    q = q + "b"', "q"),
    ('d = {"k": outside}\nq = d["missing"]', "q"),
    ('q = "x" * 3', "q"),  # string repetition is not folded
]


def test_fold_corpus_has_30_snippets():
    assert len(FOLD_CORPUS) == 30


def test_constant_folding_matches_interpreter_on_all_30():
    for snippet, target in FOLD_CORPUS:
        try:
            expected = interpret_straight_line(snippet, target)
        except Exception:
            expected = None
        graph = analyze_source(snippet)
        resolved = resolve_value(graph, target)
        if expected is None:
            assert resolved is None, snippet
        else:
            assert resolved == expected, snippet


def test_hole_cases_flagged_never_guessed():
    for snippet, target in HOLE_CORPUS:
        graph = analyze_source(snippet)
        assert resolve_value(graph, target) is None, snippet


def test_parse_source_empty_and_simple():
    assert parse_source("").tree.body == []
    tree = parse_source("x = 1").tree
    assert len(tree.body) == 1
    assert isinstance(tree.body[0], ast.Assign)


def test_parse_source_recovers_around_syntax_error():
    source = 'x = "a"\nif True\n    y = 1\nz = "b"\n'
    result = parse_source(source)
    assert result.warnings
    graph = build_def_use(result)
    assert resolve_value(graph, "x") == "a"
    assert resolve_value(graph, "z") == "b"


def test_parse_source_never_raises_on_garbage():
    result = parse_source("£$%^&*\x00(((((")
    assert isinstance(result.tree, ast.Module)


def test_reassignment_creates_new_definition():
    graph = analyze_source('x = "a"\nx = "b"\n')
    defs = [d for d in graph.definitions if d.name == "x"]
    assert len(defs) == 2
    assert graph.literal_table[defs[0].node_id] == "a"
    assert graph.literal_table[defs[1].node_id] == "b"


def test_uses_bind_to_latest_definition():
    graph = analyze_source('x = "a"\nx = "b"\ny = x\n')
    defs = [d for d in graph.definitions if d.name == "x"]
    uses = [u for u in graph.uses if u.name == "x"]
    assert uses[-1].definition == defs[-1].node_id


def test_fold_confluence_orderings():
    """Different concatenation shapes of the same constants agree."""
    variants = [
        'q = ("a" + "b") + "c"',
        'q = "a" + ("b" + "c")',
        'x = "a" + "b"\nq = x + "c"',
        'y = "b" + "c"\nq = "a" + y',
    ]
    values = {resolve_value(analyze_source(v), "q") for v in variants}
    assert values == {"abc"}


def test_query_fragments_in_source_order_with_hole():
    source = (
        'q = "SELECT email FROM user"\n'
        'q += " WHERE id = "\n'
        "q += str(uid)\n"
        "cur.execute(q)\n"
    )
    graph = analyze_source(source)
    call = [c for c in graph.call_sites if c.method == "execute"][-1]
    argument = trace_query_fragments(graph, call)
    assert not argument.fully_resolved
    texts = [f.text for f in argument.fragments]
    assert texts[0] == "SELECT email FROM user"
    assert texts[1] == " WHERE id = "
    assert texts[2] is None  # the dynamic tail stays a hole
    lines = [f.location[0] for f in argument.fragments if f.location]
    assert lines == sorted(lines)


def test_query_fully_resolved():
    graph = analyze_source('cur.execute("SELECT email FROM user")\n')
    call = [c for c in graph.call_sites if c.method == "execute"][-1]
    argument = trace_query_fragments(graph, call)
    assert argument.fully_resolved
    assert argument.value == "SELECT email FROM user"


def test_find_file_open_sql():
    graph = analyze_source(
        'f = open("migrations/init.sql")\n'
        "g = open(path_var)\n"
        'h = open("notes.txt")\n'
        'i = open("schema.DDL")\n'
    )
    assert find_file_open_sql(graph) == ["migrations/init.sql", "schema.DDL"]


def test_import_alias_resolution():
    graph = analyze_source("import pymysql as m\nconn = m.connect(host='h')\n")
    assert any(c.qualname == "pymysql.connect" for c in graph.call_sites)
    graph = analyze_source("from pymysql import connect\nconn = connect(host='h')\n")
    assert any(c.qualname == "pymysql.connect" for c in graph.call_sites)


def test_dict_literal_resolution():
    graph = analyze_source('cfg = {"host": "db1", "password": "pw"}\nh = cfg["host"]\n')
    assert resolve_value(graph, "h") == "db1"


def test_branch_agreeing_assignments_stay_resolved():
    source = 'a = "same"\nif cond:\n    a = "same"\nq = a\n'
    assert resolve_value(analyze_source(source), "q") == "same"
