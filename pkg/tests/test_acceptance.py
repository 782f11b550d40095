"""Acceptance criteria, one test each.

Every test prints a single line ``[PASS|FAIL] <n> <title> (<elapsed>s / budget <b>s)``;
a criterion passes only if its check holds and it finishes inside its budget.
Run ``pytest tests/test_acceptance.py -v`` (lines go to the terminal even when
output is captured) or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import pathlib
import random
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from dgloc.algebra import check_d_squared, random_morphism
from dgloc.constructions import (
    bracket_identity_check,
    cylinder,
    iv,
    kill,
    kv,
    kvw,
    left_localize,
    lv,
    pushout,
    qv,
    right_localize,
    two_sided_localize,
)
from dgloc.dsl import parse_presentation, print_presentation
from dgloc.fields import GF, QQ
from dgloc.finite import kv_model, kv_right_inverse, kv_two_sided_inverse
from dgloc.homology import hom_paths, homology, stabilized_homology
from dgloc.verify.suites import SuiteConfig, run_suite

FIELDS = (QQ, GF(2), GF(3))
WINDOW = (-2, 3)
SEED = 42
GOLDEN = pathlib.Path(__file__).parent / "golden"
PAIRS = [("O1", "O1"), ("O1", "O2"), ("O2", "O1"), ("O2", "O2")]

_RESULTS: dict[int, str] = {}


def _emit(line: str, capsys=None) -> None:
    if capsys is not None:
        with capsys.disabled():
            print(line)
    else:
        print(line)


@contextmanager
def criterion(number: int, title: str, budget: float, capsys=None):
    """Time the body; it must set ``state["ok"]``."""
    state = {"ok": False, "note": ""}
    t0 = time.perf_counter()
    try:
        yield state
    finally:
        elapsed = time.perf_counter() - t0
        ok = bool(state["ok"]) and elapsed < budget
        note = f" [{state['note']}]" if state["note"] else ""
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2} {title} ({elapsed:.1f}s / budget {budget:.0f}s){note}"
        _RESULTS[number] = line
        _emit(line, capsys)
    assert state["ok"], state["note"] or title
    assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"


# 1


def _construction_outputs(field):
    out = []
    for n in (-1, 0, 1):
        for build in (kv, kvw, qv, lv, iv):
            out.append(build(n, field))
        C = kv(n, field)
        v = C.gen("v")
        for construct in (kill, right_localize, left_localize, two_sided_localize):
            out.append(construct(C, v))
        Q = qv(n, field)
        d_u = Q.differential["u"]
        for construct in (kill, right_localize, left_localize, two_sided_localize):
            out.append(construct(Q, d_u))
            out.append(construct(Q, Q.gen("v")))
        for D in (kvw(n, field), qv(n, field), lv(n, field), iv(n, field)):
            out.append(cylinder(kv(n, field), D).presentation)
        out.append(cylinder(Q, right_localize(Q, d_u)).presentation)
        out.append(pushout(qv(n, field), lv(n, field), kv(n, field)))
        out.append(pushout(qv(n, field), kvw(n, field), kv(n, field)))
    return out


def test_c01_d_squared(capsys):
    with criterion(1, "d^2 = 0 on presets and construction outputs", 5, capsys) as st:
        count = 0
        bad = []
        for F in FIELDS:
            for P in _construction_outputs(F):
                count += 1
                if not check_d_squared(P).ok:
                    bad.append(print_presentation(P))
            for model in (kv_right_inverse, kv_two_sided_inverse, kv_model):
                count += 1
                if model(0, F).validate():
                    bad.append(model.__name__)
        st["ok"] = not bad
        st["note"] = f"{count} presentations" + (f", {len(bad)} bad" if bad else "")


# 2


def test_c02_bracket_identity(capsys):
    with criterion(2, "[d, f](x) = x1 - x2 on cylinders of KVW and QV", 5, capsys) as st:
        total = failures = 0
        for F in FIELDS:
            for build in (kvw, qv):
                D = build(0, F)
                cyl = cylinder(kv(0, F), D)
                rng = random.Random(f"{SEED}:{build.__name__}:{F.name}")
                samples = [random_morphism(D, rng, 4, 3) for _ in range(100)]
                checks = bracket_identity_check(cyl, samples)
                total += len(checks)
                failures += sum(not c.ok for c in checks)
        st["ok"] = failures == 0 and total == 600
        st["note"] = f"{total} samples, {failures} failures"


# 3, 4


def _stabilized_vs_model(build, model):
    mismatches = []
    for F in FIELDS:
        P = build(0, F)
        M = model(0, F)
        for a, b in PAIRS:
            rep = stabilized_homology(P, a, b, WINDOW, (4, 6, 8, 10))
            want = M.hom_homology(a, b, WINDOW).dims
            if not rep.all_stable:
                mismatches.append(f"{F.name} {a}{b} unstable")
            elif rep.dims != want:
                mismatches.append(f"{F.name} {a}{b} {rep.dims} != {want}")
    return mismatches


def test_c03_qv_homology(capsys):
    expected = {("O1", "O1"): 2, ("O1", "O2"): 1, ("O2", "O1"): 1, ("O2", "O2"): 1}
    with criterion(3, "stabilized homology of QV(0) matches KV_RIGHT_INV", 60, capsys) as st:
        bad = _stabilized_vs_model(qv, kv_right_inverse)
        for F in FIELDS:
            for ab, h0 in expected.items():
                if kv_right_inverse(0, F).hom_homology(*ab, WINDOW).nonzero() != {0: h0}:
                    bad.append(f"model {F.name} {ab}")
        st["ok"] = not bad
        st["note"] = "; ".join(bad)


def test_c04_iv_homology(capsys):
    with criterion(4, "stabilized homology of IV(0) matches KV_TWO_INV", 120, capsys) as st:
        bad = _stabilized_vs_model(iv, kv_two_sided_inverse)
        for F in FIELDS:
            for ab in PAIRS:
                if kv_two_sided_inverse(0, F).hom_homology(*ab, WINDOW).nonzero() != {0: 1}:
                    bad.append(f"model {F.name} {ab}")
        st["ok"] = not bad
        st["note"] = "; ".join(bad)


# 5


def test_c05_cylinder_homology(capsys):
    with criterion(5, "truncated homology of cylinders equals that of D", 60, capsys) as st:
        bad = []
        compared = 0
        for F in (QQ, GF(2)):
            for build in (kvw, qv, iv):
                D = build(0, F)
                cyl = cylinder(kv(0, F), D)
                wD = {n: cyl.weights[n] for n in D.generators}
                for a, b in PAIRS:
                    tc = hom_paths(cyl.presentation, a, b, WINDOW, 10, cyl.weights)
                    td = hom_paths(D, a, b, WINDOW, 10, wD)
                    for W in (4, 6, 8, 10):
                        x = homology(tc.complex(W, WINDOW), check=False).dims
                        y = homology(td.complex(W, WINDOW), check=False).dims
                        compared += 1
                        if x != y:
                            bad.append(f"{F.name} {build.__name__} {a}{b} W={W}")
        st["ok"] = not bad
        st["note"] = f"{compared} comparisons" + (f"; {bad}" if bad else "")


# 6 - 10


def _suite(names, field, trials=20, rank_bound=4):
    cfg = SuiteConfig(field, SEED, trials, rank_bound)
    records = [r for n in names for r in run_suite(n, cfg)]
    failed = [f"{r.suite}/{r.name}:{r.status}" for r in records if not r.passed]
    return records, failed


def test_c06_representability(capsys):
    with criterion(6, "representability suites (kill, right, left) over F2", 120, capsys) as st:
        records, failed = _suite(["kill-rep", "rloc-rep", "lloc-rep"], GF(2))
        st["ok"] = len(records) == 18 and not failed
        st["note"] = f"{len(records)} checks" + (f"; failed {failed}" if failed else "")


def test_c07_universal(capsys):
    with criterion(7, "two-sided localization is a point iff [G(v)] is invertible", 60, capsys) as st:
        records, failed = _suite(["universal"], GF(2))
        fixed = {r.name: r.details["left"]["homotopy_classes"] for r in records[:3]}
        st["ok"] = (len(records) == 8 and not failed
                    and fixed == {"KV_TWO_INV": 1, "KV": 0, "KV_RIGHT_INV": 0})
        st["note"] = f"{len(records)} targets" + (f"; failed {failed}" if failed else "")


def test_c08_killing_vs_localization(capsys):
    with criterion(8, "kill witnesses biject with right inverses on cone triangles", 120, capsys) as st:
        total, failed = 0, []
        for F in (GF(2), GF(3)):
            records, bad = _suite(["thm61"], F)
            total += len(records)
            failed += bad
        st["ok"] = total == 40 and not failed
        st["note"] = f"{total} triangles" + (f"; failed {failed}" if failed else "")


def test_c09_rotation(capsys):
    with criterion(9, "rho of the second map vs lambda of the first", 60, capsys) as st:
        total, failed = 0, []
        for F in (GF(2), GF(3)):
            records, bad = _suite(["rotation"], F)
            total += len(records)
            failed += bad
        st["ok"] = total == 40 and not failed
        st["note"] = f"{total} triangles" + (f"; failed {failed}" if failed else "")


def test_c10_drinfeld(capsys):
    with criterion(10, "killing x and y in either order vs invertibility of z", 120, capsys) as st:
        records, failed = _suite(["drinfeld"], GF(2))
        verdicts = {r.details["right"]["verdict_xy"] for r in records}
        st["ok"] = len(records) == 20 and not failed and verdicts >= {"singleton", "empty"}
        st["note"] = f"{len(records)} triangles, verdicts {sorted(verdicts)}" + (f"; failed {failed}" if failed else "")


# 11


def _cli(*args):
    t0 = time.perf_counter()
    res = subprocess.run([sys.executable, "-m", "dgloc.cli", *args], capture_output=True, text=True)
    return res, time.perf_counter() - t0


def test_c11_cli(capsys, tmp_path):
    with criterion(11, "CLI golden round-trips, verify all, determinism", 10 + 60, capsys) as st:
        problems = []
        for build in (kv, kvw, qv, lv, iv):
            for n in (0, 1):
                text = (GOLDEN / f"{build.__name__}_{n}.dgp").read_text()
                P = build(n, QQ)
                if print_presentation(P) != text or print_presentation(parse_presentation(text)) != text:
                    problems.append(f"golden {build.__name__}_{n}")
        t0 = time.perf_counter()
        run_suite("all", SuiteConfig(GF(2), SEED))
        library = time.perf_counter() - t0
        outs = []
        for i in range(2):
            path = tmp_path / f"run{i}.report.json"
            res, wall = _cli("verify", "all", "--field", "F2", "--seed", str(SEED), "-o", str(path))
            if res.returncode != 0:
                problems.append(f"exit {res.returncode}: {res.stderr.strip()}")
            if wall - library > 10:
                problems.append(f"overhead {wall - library:.1f}s")
            report = json.loads(path.read_text())
            report.pop("timestamp")
            outs.append(json.dumps(report, sort_keys=True))
        if outs[0] != outs[1]:
            problems.append("reports differ beyond the timestamp")
        st["ok"] = not problems
        st["note"] = "; ".join(problems)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
