from __future__ import annotations

import random

import pytest

from cases import IMPORT_CASES, bfs_within, random_graph
from conftest import FIXTURES
from referee.context import (
    ApiDocs,
    DependencyClass,
    RelatedInfo,
    SearchConfig,
    build_context,
    format_context,
    import_bindings,
    normalize_doc_key,
    resolve_import,
    search_related,
)
from referee.errors import NotAnImport
from referee.graph import build_graph, entities_in, find_function


@pytest.mark.parametrize("statement,expected", IMPORT_CASES)
def test_resolve_import_table(statement, expected):
    assert resolve_import(statement) == expected


def test_resolve_import_with_attribute():
    assert resolve_import("from utils.collection_utils import key_prefix", attr="upper") == (
        "utils.collection_utils",
        "key_prefix.upper",
    )


@pytest.mark.parametrize("text", ["x = 1", "def f(): pass", "", "import"])
def test_not_an_import(text):
    with pytest.raises(NotAnImport):
        resolve_import(text)


def test_import_bindings_aliases():
    [binding] = import_bindings("import numpy as np")
    assert (binding.local, binding.base) == ("np", "numpy")
    [binding] = import_bindings("import a.b")
    assert (binding.local, binding.base) == ("a", "a")


def names(items):
    return {i.entity_name for i in items}


def chain_seed():
    graph = build_graph(FIXTURES / "chain", "python")
    fn = find_function(graph, "chain.py", "a")
    return graph, [n for n in entities_in(graph, "chain.py", fn.span) if n.qualified_name.startswith("a")]


@pytest.mark.parametrize("hops,expected", [(0, set()), (1, {"b"}), (2, {"b", "c"})])
def test_hop_semantics_on_chain(hops, expected):
    graph, seeds = chain_seed()
    assert names(search_related(graph, seeds, SearchConfig(hop_limit=hops), repo_root=FIXTURES / "chain")) == expected


def test_hop_monotonicity_vs_bfs_oracle():
    rng = random.Random(7)
    crucial = SearchConfig().crucial_kinds
    for _ in range(100):
        graph = random_graph(rng)
        seeds = rng.sample(list(graph.nodes.values()), rng.randint(1, 2))
        previous: set[str] = set()
        for hops in (0, 1, 2, 3):
            got = names(search_related(graph, seeds, SearchConfig(hop_limit=hops)))
            assert got == bfs_within(graph, seeds, hops, crucial)
            assert previous <= got
            previous = got


def test_cycles_terminate(tmp_path):
    (tmp_path / "m.py").write_text("def a():\n    return b()\n\n\ndef b():\n    return a()\n")
    graph = build_graph(tmp_path, "python")
    fn = find_function(graph, "m.py", "a")
    seeds = [n for n in entities_in(graph, "m.py", fn.span) if n.qualified_name == "a"]
    assert names(search_related(graph, seeds, SearchConfig(hop_limit=2))) == {"b"}


def test_idn_external_context():
    repo = FIXTURES / "idn"
    graph = build_graph(repo, "python")
    fn = find_function(graph, "net.py", "convert_to_idn")
    seeds = entities_in(graph, "net.py", fn.span)
    related = search_related(graph, seeds, SearchConfig(hop_limit=1), ApiDocs.bundled(), repo)
    assert names(related) == {"urllib.parse.urlsplit", "urllib.parse.urlunsplit"}
    assert all(i.dependency_class is DependencyClass.EXTERNAL for i in related)
    assert search_related(graph, seeds, SearchConfig(hop_limit=0), ApiDocs.bundled(), repo) == []


def test_cross_file_and_internal_classes():
    repo = FIXTURES / "py_small"
    graph = build_graph(repo, "python")
    fn = find_function(graph, "app.py", "lookup")
    seeds = [n for n in entities_in(graph, "app.py", fn.span) if n.qualified_name.startswith("lookup")]
    one = search_related(graph, seeds, SearchConfig(hop_limit=1), ApiDocs.bundled(), repo)
    assert {(i.entity_name, i.dependency_class) for i in one} == {
        ("DEFAULT", DependencyClass.INTERNAL),
        ("json.dumps", DependencyClass.EXTERNAL),
    }
    two = search_related(graph, seeds, SearchConfig(hop_limit=2), ApiDocs.bundled(), repo)
    assert ("Store", DependencyClass.CROSS_FILE) in {(i.entity_name, i.dependency_class) for i in two}
    assert names(one) <= names(two)
    store = next(i for i in two if i.entity_name == "Store")
    assert store.content == "In-memory key-value store."


def test_misses_are_counted(tmp_path):
    (tmp_path / "m.py").write_text("import nosuchlib\n\n\ndef f():\n    return nosuchlib.go()\n")
    graph = build_graph(tmp_path, "python")
    fn = find_function(graph, "m.py", "f")
    related = search_related(graph, entities_in(graph, "m.py", fn.span), SearchConfig(), ApiDocs(), tmp_path)
    assert related == []
    assert len(related.misses) == 1


def test_context_format():
    items = [
        RelatedInfo("a.b", "doc a", DependencyClass.EXTERNAL, "a.b", "x"),
        RelatedInfo("c", "def c(): pass", DependencyClass.INTERNAL, "m.py", "x"),
    ]
    assert format_context(items, "CODE") == "# a.b # doc a\n\n# c # def c(): pass\n\nCODE"
    assert format_context([], "CODE") == "CODE"
    assert build_context(items, "CODE").related_text == "# a.b # doc a\n\n# c # def c(): pass"


def test_related_info_round_trip():
    item = RelatedInfo("a.b", "doc", DependencyClass.CROSS_FILE, "m.py", "x")
    assert RelatedInfo.from_dict(item.to_dict()) == item
    assert item.to_dict()["class"] == "cross_file"


def test_api_docs_lookup():
    docs = ApiDocs.from_mapping({"os.path.join()": "join paths", "json": "json module"})
    assert normalize_doc_key(" os.path.join() ") == "os.path.join"
    assert docs.lookup("os.path.join") == ("os.path.join", "join paths")
    assert docs.lookup("json.nothing") == ("json", "json module")
    assert docs.lookup("json.a.b") is None
    with pytest.raises(ValueError):
        ApiDocs.from_mapping({"a()": "x", "a": "y"})
    assert len(ApiDocs.bundled()) >= 50
