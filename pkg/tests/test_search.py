import http.server
import json
import subprocess
import threading
import urllib.parse
from pathlib import Path

import pytest

from misusemine.api import ApiContext
from misusemine.errors import ProviderError
from misusemine.javalite import ImportDecl
from misusemine.search import (FilesystemProvider, Hit, HttpProvider, Origin, SearchQuery, SourceDoc,
                               external_candidates, imports_match, internal_candidates, origin_prefix,
                               run_session, select_by_imports)

FIXTURES = Path(__file__).parent / "fixtures" / "searchcode"


def java(pkg, imports=(), body="class X {}"):
    head = f"package {pkg};\n" if pkg else ""
    return head + "".join(f"import {i};\n" for i in imports) + body + "\n"


def write_tree(root: Path, files: dict):
    for rel, text in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")


class TestSourceDoc:
    def test_package_and_imports(self):
        d = SourceDoc(Origin.EXTERNAL, "x", "// package fake;\npackage a.b;\nimport c.D;\nimport static e.F.g;\n"
                                            "import h.*;\n/* import no.Way; */\nclass X {}")
        assert d.package_name == "a.b"
        assert d.import_lines == {"c.D", "e.F.g", "h.*"}

    def test_import_matching(self):
        assert imports_match({"a.b.C"}, "a.b.C")
        assert imports_match({"a.b.*"}, "a.b.C")
        assert not imports_match({"a.b.Cx"}, "a.b.C")
        assert not imports_match({"a.*"}, "a.b.C")

    def test_query_validation(self):
        assert SearchQuery(("a", "b", "a")).import_statements == ("a", "b")
        with pytest.raises(ValueError):
            SearchQuery(())
        with pytest.raises(ValueError):
            SearchQuery(("a",), 0)


class TestInternal:
    def test_exclude(self, tmp_path):
        write_tree(tmp_path, {"A.java": java("p"), "B.java": java("p")})
        assert [d.identity for d in internal_candidates(tmp_path, "A.java")] == ["B.java"]

    def test_missing_exclude_warns(self, tmp_path):
        write_tree(tmp_path, {"A.java": java("p")})
        diags = []
        docs = internal_candidates(tmp_path, "Nope.java", diags)
        assert [d.identity for d in docs] == ["A.java"]
        assert diags == [{"kind": "ExcludeMissing", "file": "Nope.java"}]

    def test_nested_order_matches_find_sort(self, tmp_path):
        files = {"z/Z.java": "", "a/b/C.java": "", "a/A.java": "", "M.java": "", "a/b/notes.txt": "",
                 "a/Ab.java": "", ".git/X.java": ""}
        write_tree(tmp_path, files)
        out = subprocess.run("find . -name '*.java' -not -path './.git/*' | sed 's|^./||' | LC_ALL=C sort",
                             shell=True, cwd=tmp_path, capture_output=True, text=True, check=True).stdout.split()
        docs = internal_candidates(tmp_path)
        assert [d.identity for d in docs] == out
        assert [d.relevance_rank for d in docs] == list(range(len(out)))
        assert all(d.origin is Origin.INTERNAL for d in docs)

    def test_unreadable_root(self, tmp_path):
        with pytest.raises(OSError):
            internal_candidates(tmp_path / "missing")

    def test_select_by_imports(self, tmp_path):
        write_tree(tmp_path, {"A.java": java("p", ["x.Y"]), "B.java": java("p", ["x.*"]), "C.java": java("p")})
        docs = internal_candidates(tmp_path)
        assert [d.identity for d in select_by_imports(docs, ["x.Y"])] == ["A.java", "B.java"]


class TestFilesystemProvider:
    def test_matches_grep_oracle(self, tmp_path):
        write_tree(tmp_path, {
            "b/One.java": java("o", ["org.acme.Reader"]),
            "a/Two.java": java("t", ["org.acme.Reader", "x.Y"]),
            "c/Three.java": java("t", ["x.Y"]),
        })
        hits = FilesystemProvider(tmp_path).query(SearchQuery(("org.acme.Reader",)), 0)
        grep = subprocess.run("grep -rl --include='*.java' 'import org.acme.Reader;' . | sed 's|^./||' | "
                              "LC_ALL=C sort", shell=True, cwd=tmp_path, capture_output=True, text=True).stdout
        assert [h.identity for h in hits] == grep.split()
        assert [h.relevance_rank for h in hits] == [0, 1]

    def test_or_semantics_and_paging(self, tmp_path):
        write_tree(tmp_path, {f"F{i}.java": java("p", ["a.A" if i % 2 else "b.B"]) for i in range(5)})
        prov = FilesystemProvider(tmp_path)
        q = SearchQuery(("a.A", "b.B"), page_limit=2)
        pages = [prov.query(q, p) for p in range(4)]
        assert [len(p) for p in pages] == [2, 2, 1, 0]
        assert [h.relevance_rank for p in pages for h in p] == list(range(5))
        with pytest.raises(ValueError):
            prov.query(q, -1)

    def test_empty_corpus(self, tmp_path):
        assert FilesystemProvider(tmp_path).query(SearchQuery(("a.A",)), 0) == []
        assert FilesystemProvider(tmp_path / "none").query(SearchQuery(("a.A",)), 0) == []

    def test_deterministic(self, tmp_path):
        write_tree(tmp_path, {f"d{i}/F.java": java("p", ["a.A"]) for i in range(6)})
        q = SearchQuery(("a.A",))
        assert FilesystemProvider(tmp_path).query(q, 0) == FilesystemProvider(tmp_path).query(q, 0)


class StubProvider:
    """Serves fixed hit lists per import tuple."""

    def __init__(self, sessions):
        self.sessions = sessions
        self.calls = []

    def query(self, q, page):
        self.calls.append((q.import_statements, page))
        hits = self.sessions.get(q.import_statements, [])
        return hits[page * q.page_limit:(page + 1) * q.page_limit]

    def fetch(self, hit):
        return hit.raw_text


def hits(prefix, n, pkg="ext.lib"):
    return [Hit(f"{prefix}{i}", i, java(pkg)) for i in range(n)]


def ctx(api, misused=None):
    imps = [ImportDecl(q) for q in api]
    mis = None if misused is None else [i for i in imps if i.qualified_name in misused]
    return ApiContext(None, imps, {"k"}, mis)


class TestExternal:
    def test_two_full_sessions(self):
        prov = StubProvider({("a.A",): hits("s1-", 1000), ("a.A", "b.B"): hits("s2-", 1000)})
        docs = external_candidates(ctx(["a.A", "b.B"], ["a.A"]), prov, "my.own.pkg")
        assert len(docs) == 2000
        assert docs[0].identity == "s1-0" and docs[1000].identity == "s2-0"
        assert [d.relevance_rank for d in docs] == list(range(2000))

    def test_session_cap(self):
        prov = StubProvider({("a.A",): hits("s1-", 1500), ("a.A", "b.B"): hits("s2-", 1500)})
        docs = external_candidates(ctx(["a.A", "b.B"], ["a.A"]), prov, "")
        assert len(docs) == 2000

    def test_dedup(self):
        same = [Hit("one", 0, java("q.r"))]
        prov = StubProvider({("a.A",): same})  # both sessions ask for the same import
        docs = external_candidates(ctx(["a.A"], ["a.A"]), prov, "")
        assert [d.identity for d in docs] == ["one"]

    def test_no_misused_runs_one_session(self):
        prov = StubProvider({("a.A",): hits("x", 3)})
        external_candidates(ctx(["a.A"]), prov, "")
        assert {c[0] for c in prov.calls} == {("a.A",)}

    def test_same_project_prefix_excluded(self):
        sess = [Hit("mine", 0, java("my.own.pkg.sub")), Hit("near", 1, java("my.own.pkgx")),
                Hit("other", 2, java("my.own"))]
        prov = StubProvider({("a.A",): sess})
        diags = []
        docs = external_candidates(ctx(["a.A"]), prov, origin_prefix("my.own.pkg.deep"), diagnostics=diags)
        assert [d.identity for d in docs] == ["near", "other"]
        assert diags == [{"kind": "SameProjectExcluded", "doc": "mine"}]

    def test_requires_imports(self):
        with pytest.raises(ValueError):
            external_candidates(ctx([]), StubProvider({}), "")

    def test_run_session_stops_on_short_page(self):
        prov = StubProvider({("a.A",): hits("x", 250)})
        out = run_session(prov, ["a.A"], cap=1000, page_size=100)
        assert len(out) == 250 and [c[1] for c in prov.calls] == [0, 1, 2]


# ---------------------------------------------------------------- HTTP

class _Handler(http.server.BaseHTTPRequestHandler):
    requests: list = []
    fail_next = 0

    def log_message(self, *args):
        pass

    def do_GET(self):
        url = urllib.parse.urlparse(self.path)
        type(self).requests.append(self.path)
        if type(self).fail_next:
            type(self).fail_next -= 1
            self.send_error(503)
            return
        base = f"http://{self.headers['Host']}"
        if url.path == "/api/codesearch_I/":
            qs = urllib.parse.parse_qs(url.query)
            page = FIXTURES / f"page{qs['p'][0]}.json"
            body = page.read_text().replace("RAW_BASE", base) if page.exists() else '{"results": []}'
            self._send(body.encode(), "application/json")
        elif url.path.startswith("/codesearch/raw/") or url.path.startswith("/custom/"):
            ident = url.path.strip("/").split("/")[-1]
            self._send((FIXTURES / f"raw-{ident}.java").read_bytes(), "text/plain")
        elif url.path == "/broken/api/codesearch_I/":
            self._send(b"not json", "application/json")
        else:
            self.send_error(404)

    def _send(self, body, ctype):
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture()
def server():
    _Handler.requests = []
    _Handler.fail_next = 0
    srv = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    yield f"http://127.0.0.1:{srv.server_address[1]}"
    srv.shutdown()
    srv.server_close()


class TestHttpProvider:
    def test_recorded_pages(self, server):
        prov = HttpProvider(server, backoff=0.01)
        q = SearchQuery(("org.acme.io.DataReader",), page_limit=2)
        page0 = prov.query(q, 0)
        expected = [str(r["id"]) for r in json.loads((FIXTURES / "page0.json").read_text())["results"]]
        assert [h.identity for h in page0] == expected
        assert [h.relevance_rank for h in page0] == [0, 1]
        assert page0[0].fetch_url == f"{server}/codesearch/raw/4101/"
        page1 = prov.query(q, 1)
        assert [(h.identity, h.relevance_rank) for h in page1] == [("4103", 2)]
        assert page1[0].fetch_url == f"{server}/custom/4103"
        assert "package org.gamma;" in prov.fetch(page1[0])
        first = urllib.parse.parse_qs(urllib.parse.urlparse(_Handler.requests[0]).query)
        assert first == {"q": ["org.acme.io.DataReader"], "p": ["0"], "per_page": ["2"]}

    def test_external_search_over_http(self, server):
        prov = HttpProvider(server, backoff=0.01)
        context = ctx(["org.acme.io.DataReader"], ["org.acme.io.DataReader"])
        diags = []
        docs = external_candidates(context, prov, "com.example.app", page_size=2, diagnostics=diags)
        assert [d.identity for d in docs] == ["4101", "4103"]
        assert diags == [{"kind": "SameProjectExcluded", "doc": "4102"}]

    def test_retry_then_success(self, server):
        _Handler.fail_next = 1
        prov = HttpProvider(server, retries=2, backoff=0.01)
        assert len(prov.query(SearchQuery(("a.A",), 2), 0)) == 2

    def test_retries_exhausted(self, server):
        _Handler.fail_next = 5
        with pytest.raises(ProviderError):
            HttpProvider(server, retries=1, backoff=0.01).query(SearchQuery(("a.A",)), 0)

    def test_malformed_json(self, server):
        with pytest.raises(ProviderError):
            HttpProvider(server + "/broken", retries=0).query(SearchQuery(("a.A",)), 0)

    def test_client_error_not_retried(self, server):
        with pytest.raises(ProviderError):
            HttpProvider(server, retries=3, backoff=0.01).fetch(Hit("x", 0, None, server + "/nowhere"))
        assert len(_Handler.requests) == 1

    def test_unreachable(self):
        with pytest.raises(ProviderError):
            HttpProvider("http://127.0.0.1:9", retries=0, timeout=2).query(SearchQuery(("a.A",)), 0)


def test_fixture_files_present():
    assert sorted(p.name for p in FIXTURES.iterdir()) == [
        "page0.json", "page1.json", "raw-4101.java", "raw-4102.java", "raw-4103.java"]
