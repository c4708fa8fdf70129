import io
import json

import pytest

from weightedwords import cli
from weightedwords.errors import ConfigError
from weightedwords.identities import registry
from weightedwords.report import FAIL, PASS, IdentityReport, summary_table, to_jsonl
from weightedwords.suite import SuiteConfig, run_suite

SMALL = """
# two toy identities
identity geometric_sum
  group toys
  suite toy
  about finite geometric sum
  n 0..6
  lhs (1 - q) * sum(i, 0, n, q^i)
  rhs 1 - q^(n+1)

identity off_by_one
  group toys
  suite toy
  N 10
  n 1..4
  lhs sum(i, 0, n, q^i)
  rhs poch(q, 1, n, inv)
    * (1 - q)
"""


def run(argv):
    out = io.StringIO()
    return cli.main(argv, out), out.getvalue()


# -- registry -------------------------------------------------------------------

def test_loads_parses_stanzas_and_continuations():
    entries = registry.loads(SMALL)
    assert [e.name for e in entries] == ["geometric_sum", "off_by_one"]
    assert entries[1].order == 10 and entries[1].n_range == (1, 4)
    assert len(entries[1].rhs) == 1
    assert entries[0].group == "toys" and entries[0].suites == ("toy",)


def test_entry_text_reloads_to_the_same_entry():
    for e in registry.builtin():
        again, = registry.loads(e.text())
        assert (again.name, again.lhs, again.rhs, again.n_range, again.order) == \
            (e.name, e.lhs, e.rhs, e.n_range, e.order)


@pytest.mark.parametrize("text,fragment", [
    ("lhs 1", "expected 'identity"),
    ("identity x\n  rhs 1", "no lhs"),
    ("identity x\n  group g\n  colour red\n  lhs 1", "unknown field"),
    ("identity x\n  n 3..1\n  lhs 1", "empty range"),
    ("identity x\n  n a..b\n  lhs 1", "bad range"),
    ("identity x\n  N 0\n  lhs 1", "at least 1"),
    ("identity x\n  lhs poch(", "<string>:2"),
])
def test_loads_errors(text, fragment):
    with pytest.raises(ConfigError) as info:
        registry.loads(text)
    assert fragment in str(info.value)


def test_run_entry_pass_is_exact_for_polynomials():
    rep = registry.run_entry(registry.loads(SMALL)[0])
    assert rep.verdict == PASS and rep.truncation == "exact"
    assert rep.params == {"n": "0..6"}


def test_run_entry_failure_carries_a_witness():
    rep = registry.run_entry(registry.loads(SMALL)[1])
    assert rep.verdict == FAIL
    # n = 1: 1 + q against (1 - q)/(1 - q) = 1
    assert rep.witness == {"n": 1, "q_power": 1, "coefficient": "1"}
    assert rep.truncation == 10


def test_run_entry_turns_domain_errors_into_witnesses():
    entry, = registry.loads("identity bad\n  n 1..2\n  lhs 1 / (2 - q)\n")
    rep = registry.run_entry(entry)
    assert rep.verdict == FAIL and rep.witness["error"].startswith("NotAUnit")


def test_select():
    entries = registry.loads(SMALL)
    assert len(registry.select(entries, identity="toys")) == 2
    assert len(registry.select(entries, suite="toy")) == 2
    with pytest.raises(ConfigError):
        registry.select(entries, identity="missing")


def test_report_requires_a_witness_for_failures():
    with pytest.raises(ValueError):
        IdentityReport("x", FAIL)
    with pytest.raises(ValueError):
        IdentityReport("x", "MAYBE")


def test_jsonl_is_sorted_and_excludes_time():
    reps = [IdentityReport("b", PASS, elapsed=1.5), IdentityReport("a", FAIL, witness={"n": 1}, elapsed=2.0)]
    lines = to_jsonl(reps).splitlines()
    assert [json.loads(x)["name"] for x in lines] == ["a", "b"]
    assert "wall_time" not in lines[0]
    assert "wall_time_s" in to_jsonl(reps, timings=True)
    assert "1/2 identities pass" in summary_table(reps)


# -- suite --------------------------------------------------------------------------

def test_suite_main_sum_group():
    reports, status = run_suite(SuiteConfig(identity="thm_Main_Sum", n_max=25))
    assert [(r.name, r.verdict) for r in reports] == [("eq_sum1", PASS), ("eq_sum2", PASS)]
    assert status == 0


def test_suite_config_validation():
    with pytest.raises(ConfigError):
        SuiteConfig(order=0)
    with pytest.raises(ConfigError):
        SuiteConfig(format="xml")
    with pytest.raises(ConfigError):
        SuiteConfig(identity="a", suite="b")
    with pytest.raises(ConfigError):
        run_suite(SuiteConfig(identity="h_three_routes", n_max=1))


def test_suite_status_reflects_failures():
    reports, status = run_suite(SuiteConfig(suite="toy"), registry.loads(SMALL))
    assert status == 1
    assert [r.name for r in reports] == ["geometric_sum", "off_by_one"]


def test_parallel_run_matches_serial():
    cfg = dict(suite="toy")
    serial, _ = run_suite(SuiteConfig(**cfg), registry.loads(SMALL))
    parallel, _ = run_suite(SuiteConfig(jobs=2, **cfg), registry.loads(SMALL))
    assert to_jsonl(serial) == to_jsonl(parallel)


# -- command line --------------------------------------------------------------------

def test_cli_verify_identity(tmp_path):
    status, out = run(["verify", "--identity", "eq_sum1", "--nmax", "8"])
    assert status == 0 and "1/1 identities pass" in out
    path = tmp_path / "r.jsonl"
    status, out = run(["verify", "--identity", "eq_sum1", "--nmax", "8", "--format", "jsonl",
                       "--report", str(path)])
    assert status == 0
    rec = json.loads(path.read_text())
    assert rec == {"name": "eq_sum1", "params": {"n": "1..8"}, "truncation": "exact", "verdict": "PASS"}


def test_cli_verify_custom_file_failure(tmp_path):
    path = tmp_path / "toy.ww"
    path.write_text(SMALL)
    status, out = run(["verify", "--file", str(path), "--format", "jsonl"])
    assert status == 1
    assert '"verdict":"FAIL"' in out


def test_cli_usage_errors():
    assert run(["verify", "--N", "0"])[0] == 2
    assert run(["verify", "--identity", "nope"])[0] == 2
    assert run(["frobnicate"])[0] == 2
    assert run(["table", "Weighted_MM", "--n", "3"])[0] == 2
    assert run(["enumerate", "nope", "--n", "3"])[0] == 2
    assert run(["eval", "poch("])[0] == 2
    assert run(["eval", "1", "--let", "n"])[0] == 2


def test_cli_table_and_enumerate():
    status, out = run(["table", "thm_main_comp", "--n", "5"])
    assert status == 0
    assert "(5̅)" in out and "(5_r)" in out
    status, out = run(["table", "thm_Mod2_MM_refinement", "--n", "18", "--m", "2", "--format", "json"])
    rec = json.loads(out)
    assert [c["count"] for c in rec["columns"]] == [16, 16]
    status, out = run(["enumerate", "macmahon_gap", "--n", "6", "--stats"])
    assert status == 0
    assert out.splitlines()[0].startswith("(6)")
    assert "4 partitions of 6" in out


def test_cli_unbalanced_table_fails():
    status, out = run(["table", "overpartition_au_product", "--n", "10"])
    assert status == 1 and "cardinalities differ" in out


def test_cli_list_and_eval():
    status, out = run(["list"])
    assert status == 0 and "Weighted_MM" in out and "Rprime" in out
    status, out = run(["eval", "qbin(n, 2)", "--let", "n=4"])
    assert status == 0 and out.strip() == "1 + q + 2*q^2 + q^3 + q^4"


def test_cli_runtime_errors_exit_one():
    status, _ = run(["eval", "1 / (2 - q)"])
    assert status == 1
