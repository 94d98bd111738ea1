"""Acceptance criteria 1-10. Each check prints one PASS/FAIL line."""

from __future__ import annotations

import json
import random
import threading
import time
from fractions import Fraction
from http.server import BaseHTTPRequestHandler, HTTPServer


from cases import IMPORT_CASES, bfs_within, random_graph
from conftest import FIXTURES, TABLE5_FLAGS, TABLE13_FLAGS, record_criterion
from oracles import kendall_oracle, pearson_oracle, random_pair, spearman_oracle
from referee.backends import ScriptedStub
from referee.bench import kendall_tau, krippendorff_alpha, pearson, spearman
from referee.cli import main
from referee.context import CodeContext, SearchConfig, resolve_import, search_related
from referee.errors import InsufficientData
from referee.graph import Relation, build_graph, entities_in, find_function
from referee.judge import CRITERIA, VerdictMatrix, render_prompt
from referee.pipeline import Target, evaluate_summary
from referee.scoring import TABLE11_WEIGHTS, UNIT_WEIGHTS, aggregate
from referee.segmenter import Segment

IDN = FIXTURES / "idn"


# ---------------------------------------------------------------- criterion 1


def _double_loop(flags, weights) -> float:
    num = Fraction(0)
    for row in flags:
        for c in range(4):
            num += Fraction(weights[c]) * row[c]
    return float(num / (len(flags) * sum(Fraction(w) for w in weights)))


def test_criterion_1_aggregation_oracle():
    rng = random.Random(1)
    worst = 0.0
    elapsed = 0.0  # aggregate() only; the exact oracle is slow by design
    for _ in range(1000):
        flags = [[rng.randint(0, 1) for _ in range(4)] for _ in range(rng.randint(1, 40))]
        matrix = VerdictMatrix.from_flags(flags)
        for weights in (UNIT_WEIGHTS, TABLE11_WEIGHTS):
            start = time.perf_counter()
            score = aggregate(matrix, weights)
            elapsed += time.perf_counter() - start
            worst = max(worst, abs(score - _double_loop(flags, weights.as_tuple())))
    ok = worst <= 1e-12 and elapsed < 1.0
    record_criterion("1", ok, "aggregation oracle equivalence",
                     f"1000 matrices x 2 weightings, max err {worst:.1e}, {elapsed:.2f} s")
    assert worst <= 1e-12
    assert elapsed < 1.0


# ---------------------------------------------------------------- criterion 2


def _evaluate(flags):
    summary = (IDN / "summary.txt").read_text(encoding="utf-8")
    start = time.perf_counter()
    report = evaluate_summary(IDN, Target("net.py", function="convert_to_idn"), summary,
                              ScriptedStub.from_flags(flags))
    elapsed = time.perf_counter() - start
    # report indices are 0-based; the criteria number segments from 1
    failed = {s.index + 1: set(s.failed) for s in report.per_segment if s.failed}
    return report, failed, elapsed


def test_criterion_2a_table5_flags_as_stated():
    """The stated flag pattern and the stated score, checked together."""
    report, failed, elapsed = _evaluate(TABLE5_FLAGS)
    expected_flags = {2: {"C1", "C3"}, 4: {"C2", "C3"}, 5: {"C4"}}
    ok = report.overall_score == 0.55 and failed == expected_flags and elapsed < 1.0
    record_criterion("2a", ok, "convert_to_idn example, Table 5 flags",
                     f"score {report.overall_score:.2f} (expected 0.55), flags {_fmt(failed)}, {elapsed:.2f} s")
    assert failed == expected_flags
    assert report.overall_score == 0.55


def test_criterion_2b_table13_verdicts():
    """Same example with the full verdicts of the appendix table."""
    report, failed, elapsed = _evaluate(TABLE13_FLAGS)
    ok = (
        report.overall_score == 0.55
        and failed[2] >= {"C1", "C3"}
        and failed[4] >= {"C2", "C3"}
        and failed[5] == {"C4"}
        and set(failed) == {2, 4, 5}
        and elapsed < 1.0
    )
    record_criterion("2b", ok, "convert_to_idn example, Table 13 verdicts",
                     f"score {report.overall_score:.2f}, flags {_fmt(failed)}, {elapsed:.2f} s")
    assert ok


def _fmt(failed):
    return "; ".join(f"seg{k}={{{','.join(sorted(v))}}}" for k, v in sorted(failed.items()))


# ---------------------------------------------------------------- criterion 3


def test_criterion_3_correlations():
    rng = random.Random(3)
    worst_p = worst_s = 0.0
    kendall_exact = True
    start = time.perf_counter()
    for _ in range(200):
        x, y = random_pair(rng)
        worst_p = max(worst_p, abs(pearson(x, y)[0] - pearson_oracle(x, y)))
        worst_s = max(worst_s, abs(spearman(x, y)[0] - spearman_oracle(x, y)))
        kendall_exact &= kendall_tau(x, y)[0] == kendall_oracle(x, y)
    elapsed = time.perf_counter() - start
    ok = worst_p <= 1e-9 and worst_s <= 1e-9 and kendall_exact and elapsed < 5.0
    record_criterion("3", ok, "correlation correctness",
                     f"200 pairs, pearson err {worst_p:.1e}, spearman err {worst_s:.1e}, "
                     f"kendall exact={kendall_exact}, {elapsed:.2f} s")
    assert ok


# ---------------------------------------------------------------- criterion 4


def test_criterion_4_krippendorff():
    rng = random.Random(4)
    perfect = True
    for _ in range(20):
        row = [rng.randint(1, 5) for _ in range(rng.randint(2, 10))]
        if len(set(row)) < 2:
            row.append(row[0] % 5 + 1)
        raters = rng.randint(2, 4)
        for level in ("nominal", "ordinal"):
            perfect &= krippendorff_alpha([list(row) for _ in range(raters)], level).alpha == 1.0
    hand = krippendorff_alpha([["a", "a", "b", "b"], ["a", "b", "b", "b"], ["a", "b", "b", None]], "nominal").alpha
    hand_ok = abs(hand - 9 / 14) <= 1e-9
    degenerate = 0
    for labels in ([[1, 2, 3]], [[1, None], [None, 2]], [[None, None], [None, None]]):
        try:
            krippendorff_alpha(labels)
        except InsufficientData:
            degenerate += 1
    ok = perfect and hand_ok and degenerate == 3
    record_criterion("4", ok, "Krippendorff's alpha",
                     f"perfect={perfect}, hand fixture {hand:.12f} vs 9/14, degenerate raised {degenerate}/3")
    assert ok


# ---------------------------------------------------------------- criterion 5


def test_criterion_5_import_resolution():
    key = resolve_import("from utils.collection_utils import key_prefix")
    passed = sum(resolve_import(stmt) == expected for stmt, expected in IMPORT_CASES)
    java = sum(stmt.endswith(";") for stmt, _ in IMPORT_CASES)
    ok = key == ("utils.collection_utils", "key_prefix") and passed == len(IMPORT_CASES) == 20
    record_criterion("5", ok, "import resolution",
                     f"key_prefix -> {key}, table {passed}/{len(IMPORT_CASES)} "
                     f"({len(IMPORT_CASES) - java} Python, {java} Java)")
    assert ok


# ---------------------------------------------------------------- criterion 6


def test_criterion_6_hop_semantics():
    graph = build_graph(FIXTURES / "chain", "python")
    fn = find_function(graph, "chain.py", "a")
    seeds = [n for n in entities_in(graph, "chain.py", fn.span) if n.qualified_name.startswith("a")]
    chain = {h: {i.entity_name for i in search_related(graph, seeds, SearchConfig(hop_limit=h))} for h in (0, 1, 2)}
    chain_ok = chain == {0: set(), 1: {"b"}, 2: {"b", "c"}}

    rng = random.Random(6)
    crucial = SearchConfig().crucial_kinds
    agree = 0
    for _ in range(100):
        g = random_graph(rng)
        s = rng.sample(list(g.nodes.values()), rng.randint(1, 2))
        sets = [{i.entity_name for i in search_related(g, s, SearchConfig(hop_limit=h))} for h in (0, 1, 2, 3)]
        oracle = [bfs_within(g, s, h, crucial) for h in (0, 1, 2, 3)]
        monotone = all(a <= b for a, b in zip(sets, sets[1:]))
        agree += sets == oracle and monotone
    ok = chain_ok and agree == 100
    record_criterion("6", ok, "hop semantics",
                     f"chain {dict((h, sorted(v)) for h, v in chain.items())}, random graphs {agree}/100 match BFS")
    assert ok


# ---------------------------------------------------------------- criterion 7


def test_criterion_7_relation_coverage():
    graph = build_graph(FIXTURES / "relations", "python")
    counts = {r.value: sum(e.relation is r for e in graph.edges) for r in Relation}
    ok = counts == {r.value: 1 for r in Relation}
    record_criterion("7", ok, "relation coverage", ", ".join(f"{k}={v}" for k, v in counts.items()))
    assert ok


# ---------------------------------------------------------------- criterion 8

# hand transcription of the segment-level criterion prompt
SYSTEM_TRANSCRIPTION = (
    "You will be given one summary text written for a source code. "
    "Your task is to evaluate the summary from <C> aspect.\n"
    "Please make sure you read and understand these instructions carefully. "
    "Please keep this document open while reviewing, and refer to it as needed.\n"
    "\n"
    "Evaluation Criteria:\n"
    "<C> (1 or 0) -- <E>\n"
    "\n"
    "Evaluation Steps:\n"
    "1. Read the CODE carefully and understand its main intent.\n"
    "2. Read the code summary text and check if it accurately describes the code.\n"
    '3. Evaluate whether <C> exists, where "1" means "<C> does not exist" and "0" means "<C> exists" '
    "based on the Evaluation Criteria."
)
USER_WITH_INFO = "## CODE:\n(Related Information) <R>\n(Input Code) <I>\n## SUMMARY TEXT: <S>\n## SCORE (score only):"
USER_WITHOUT_INFO = "## CODE:\n(Input Code) <I>\n## SUMMARY TEXT: <S>\n## SCORE (score only):"


def test_criterion_8_prompt_fidelity():
    segment = Segment(0, "It first splits the URL into its components.", (0, 45))
    related, code = "# urllib.parse.urlsplit # Split a URL.", "def convert_to_idn(url):\n    pass"
    matches = 0
    for crit in CRITERIA:
        system = SYSTEM_TRANSCRIPTION.replace("<C>", crit.title).replace("<E>", crit.definition)
        for ctx, template in ((CodeContext(related, code), USER_WITH_INFO), (CodeContext("", code), USER_WITHOUT_INFO)):
            user = template.replace("<R>", related).replace("<I>", code).replace("<S>", segment.text)
            got = render_prompt(crit, ctx, segment)
            matches += got[0].encode("utf-8") == system.encode("utf-8") and got[1].encode("utf-8") == user.encode("utf-8")
    ok = matches == 8
    record_criterion("8", ok, "prompt fidelity", f"{matches}/8 renders byte-equal (4 criteria x with/without info)")
    assert ok


# ---------------------------------------------------------------- criterion 9


def test_criterion_9_determinism(tmp_path, capsys):
    data, stub = tmp_path / "d.jsonl", tmp_path / "stub.json"
    assert main(["--seed", "9", "bench", "synth", "--n", "20", "--out", str(data)]) == 0
    assert main(["--seed", "9", "bench", "make-stub", "--dataset", str(data), "--flip-rate", "0.1",
                 "--out", str(stub)]) == 0
    outputs = []
    for run in range(2):
        out = tmp_path / f"metrics{run}.json"
        assert main(["bench", "run", "--dataset", str(data), "--stub", str(stub), "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    capsys.readouterr()
    ok = outputs[0] == outputs[1]
    record_criterion("9", ok, "determinism", f"two bench runs, {len(outputs[0])} bytes each, identical={ok}")
    assert ok


# --------------------------------------------------------------- criterion 10


class _Judge(BaseHTTPRequestHandler):
    """Local chat-completions endpoint; answers depend only on the prompt."""

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        user = body["messages"][1]["content"]
        answer = "0" if sum(map(ord, user)) % 3 == 0 else "1"
        payload = json.dumps({"choices": [{"message": {"role": "assistant", "content": answer}}]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


def test_criterion_10_endpoint_mode_disclosure(tmp_path, capsys):
    server = HTTPServer(("127.0.0.1", 0), _Judge)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        data = tmp_path / "d.jsonl"
        assert main(["bench", "synth", "--n", "10", "--out", str(data)]) == 0
        code = main(["bench", "run", "--dataset", str(data), "--endpoint", f"http://127.0.0.1:{server.server_port}",
                     "--model", "local", "--format", "text", "--out", str(tmp_path / "table.txt")])
    finally:
        server.shutdown()
    capsys.readouterr()
    header = (tmp_path / "table.txt").read_text().splitlines()[0].split() if code == 0 else []
    ok = code == 0 and header == ["Language", "n", "r_p", "r_s", "tau", "Average"]
    record_criterion("10", ok, "endpoint mode exists, Table 3 columns, no numeric gate",
                     f"exit {code}, header {header}; headline live-judge correlations are not reproduced offline")
    assert ok
