"""End-to-end acceptance criteria.

Each test records one PASS/FAIL line, with its wall time and budget, in the
"acceptance criteria" section of the pytest summary. Criteria are checked
literally: a printed statement that the computation contradicts fails here
and the witness is shown.
"""

import dataclasses
import io
import json
from pathlib import Path

import pytest

from weightedwords import cli, colored
from weightedwords.identities import registry

pytestmark = pytest.mark.acceptance

FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "tables.json").read_text(encoding="utf-8"))
ENTRIES = {e.name: e for e in registry.builtin()}


def run_cli(argv):
    out = io.StringIO()
    status = cli.main(argv, out)
    return status, out.getvalue()


def check(names, n_range=None):
    """Run registry entries; return (all passed, text describing failures)."""
    failures = []
    for name in names:
        entry = ENTRIES[name]
        if n_range is not None:
            entry = dataclasses.replace(entry, n_range=n_range)
        rep = registry.run_entry(entry)
        if not rep.passed:
            failures.append(f"{name} {json.dumps(rep.witness, sort_keys=True)}")
    return not failures, "; ".join(failures)


def column_sets(table_json):
    return [{json.dumps(e, sort_keys=True) for e in c["parts"]} for c in table_json["columns"]]


def compare_lists(got, printed, labels):
    problems = []
    for label, g, p in zip(labels, got, printed):
        if g != p:
            problems.append(f"{label}: printed only {sorted(p - g)}, computed only {sorted(g - p)}")
    return not problems, "; ".join(problems)


def test_mod2_refinement_table(criterion):
    c = criterion(1, "thm_Mod2_MM_refinement table at n=18, m=2 equals both printed lists", 1.0)
    status, out = run_cli(["table", "thm_Mod2_MM_refinement", "--n", "18", "--m", "2", "--format", "json"])
    got = column_sets(json.loads(out))
    fx = FIXTURES["mod2_n18_m2"]
    printed = [{json.dumps(p) for p in fx["gap"]}, {json.dumps(p) for p in fx["congruence"]}]
    ok, detail = compare_lists(got, printed, ["gap", "congruence"])
    c.finish(status == 0 and ok, detail)


def test_main_comp_table(criterion):
    c = criterion(2, "thm_main_comp table at n=5 equals both printed lists", 1.0)
    status, out = run_cli(["table", "thm_main_comp", "--n", "5", "--format", "json"])
    got = column_sets(json.loads(out))
    fx = FIXTURES["main_comp_n5"]
    pattern = {json.dumps({"overlined": sorted(r["overlined"], reverse=True), "parts": r["parts"]}, sort_keys=True)
               for r in fx["pattern"]}
    colored_ = {json.dumps({"green": [p for p, col in r if col == "g"], "red": [p for p, col in r if col == "r"]},
                           sort_keys=True) for r in fx["colored"]}
    ok, detail = compare_lists(got, [pattern, colored_], ["pattern", "colored"])
    c.finish(status == 0 and ok and all(len(s) == 12 for s in got), detail)


def test_macmahon_census(criterion):
    c = criterion(3, "thm_MacMahon: gap, frequency and congruence censuses agree for n <= 40", 30.0)
    c.finish(*check(["thm_MacMahon"]))


def test_mod2_refinement_census(criterion):
    c = criterion(4, "thm_Mod2_MM_refinement: (n, m) censuses agree for n <= 30", 30.0)
    c.finish(*check(["thm_Mod2_MM_refinement"]))


def test_russell_censuses(criterion):
    c = criterion(5, "thm_Russell for n <= 40 and thm_Russell_refinement for n <= 25")
    c.finish(*check(["thm_Russell", "thm_Russell_refinement"]))


def test_mod3_refinement_census(criterion):
    c = criterion(6, "thm_Mod3_MM_refinement censuses agree for n <= 25")
    c.finish(*check(["thm_Mod3_MM_refinement"]))


def test_companion_and_au_product(criterion):
    c = criterion(7, "thm_main_comp for n <= 30; printed AU rule against 1/((q;q)(q;q^3)) for n <= 25")
    c.finish(*check(["thm_main_comp", "overpartition_au_product"]))


def test_product_theorems(criterion):
    c = criterion(8, "Weighted_MM, Weighted_R, Weighted_R2 to q^60 with symbolic markers", 60.0)
    c.finish(*check(["Weighted_MM", "Weighted_R", "Weighted_R2"]))


def test_recurrences_as_printed(criterion):
    c = criterion(9, "coupled/uncoupled recurrences, R_an_rec and the three shifts vanish for n = 1..10 at q^40")
    names = ["MM_coupled_a", "MM_coupled_b", "MM_uncoupled_a", "MM_uncoupled_b",
             "R_coupled_a", "R_coupled_b", "R_coupled_c", "R_an_rec",
             "MacMahon_shift", "Russell_shift", "Rprime_shift"]
    c.finish(*check(names, n_range=(1, 10)))


def test_h_sequences(criterion):
    c = criterion(10, "h three routes (n <= 15), h' two routes (n <= 12), substitution chain (n <= 12, q^30)")
    c.finish(*check(["h_double_sum_initial", "h_three_routes", "hprime_routes",
                     "substitution_chain", "substitution_chain_b_eq_aq"]))


def test_finite_sums(criterion):
    c = criterion(11, "eq_sum1..3 hold exactly for 1 <= n <= 25", 60.0)
    c.finish(*check(["eq_sum1", "eq_sum2", "eq_sum3"]))


def test_dp_against_brute_force(criterion):
    c = criterion(12, "M, R, R': brute-force census equals the DP for every bound of level <= 8 to q^18")
    bad = []
    for system in ("M", "R", "Rprime"):
        ts = colored.BUILTIN[system]
        family = colored.BoundedFamily(ts, 19)
        everything = colored.enumerate_bounded(ts, ts.largest_symbol(8), 18)
        for level in range(1, 9):
            for color in ts.colors:
                top = ts.key((color, level))
                brute = colored.census([p for p in everything if not p or ts.key(p[0]) <= top], 19)
                if family.series((color, level)) != brute:
                    bad.append(f"{system} {color}{level}")
    c.finish(not bad, ", ".join(bad))


def test_reports_are_byte_identical(criterion, tmp_path):
    c = criterion(13, "two full-suite runs give byte-identical JSONL reports")
    paths = [tmp_path / "first.jsonl", tmp_path / "second.jsonl"]
    for p in paths:
        run_cli(["verify", "--format", "jsonl", "--report", str(p)])
    first, second = (p.read_bytes() for p in paths)
    c.finish(bool(first) and first == second, "reports differ")
