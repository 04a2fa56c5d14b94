import json
import random
from io import StringIO

import pytest

from artifact import io as aio
from artifact import models
from artifact.cli import main
from artifact.dgla import GradedElement
from artifact.hochschild import truncated_polynomial_algebra
from artifact.sampling import perturb_stack, random_stack
from artifact.simplicial import Nerve


def run(*argv):
    out, err = StringIO(), StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, _ = run(*argv)
    return code, json.loads(out)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_mc_check_zero_element(tmp_path):
    L = models.heisenberg_exterior()
    zero = GradedElement.zero(L, 2)
    f = write(tmp_path, "zero.json", {"dgla": {"model": "heisenberg_ext"},
                                      "element": aio.element_to_json(zero)})
    code, rep = run_json("mc-check", f)
    assert code == 0 and rep["defect"] == "0" and rep["pass"]


def test_mc_check_failing_element(tmp_path):
    A = models.abelian({0: 1, 1: 1, 2: 1}, {1: [(0, 0, 1)]}, name="ab")
    lam = GradedElement.from_orders(A, 2, 1, {1: [1]})
    f = write(tmp_path, "bad.json", {"dgla": aio.dgla_to_json(A), "element": aio.element_to_json(lam)})
    code, rep = run_json("mc-check", f)
    assert code == 1 and not rep["pass"] and rep["first_failing_order"] == 1


def test_fedosov_leading_term_is_omega():
    code, rep = run_json("fedosov", "--n", "1", "--hbar-order", "3", "--y-degree", "6")
    assert code == 0 and rep["pass"]
    lead = [t for t in rep["theta"] if t["order"] == -1]
    assert lead and lead[0]["matrix"] == [["0", "-1"], ["1", "0"]]


def test_stack_check_perturbed_fixture(tmp_path):
    rng = random.Random(0)
    S, *_ = random_stack(rng, Nerve.full(3), truncated_polynomial_algebra(2))
    bad, _ = perturb_stack(rng, S)
    f = write(tmp_path, "stack.json", aio.stack_to_json(bad))
    code, rep = run_json("stack-check", f)
    assert code == 1 and not rep["pass"]
    w = rep["report"]["cocycle2"]["witness"]
    assert len(w) == 4
    good = write(tmp_path, "good.json", aio.stack_to_json(S))
    assert run_json("stack-check", good)[0] == 0
    assert run_json("stack-check", "--perturb-stack")[0] == 1


def test_usage_and_input_errors(tmp_path):
    assert run("no-such-command")[0] == 2
    assert run("fedosov", "--hbar-order", "0")[0] == 2
    f = write(tmp_path, "bad.json", {"dgla": {"model": "heisenberg_ext"}, "element": {"type": "Nope"}})
    code, out, err = run("mc-check", f)
    assert code == 2 and json.loads(out)["pointer"] == "/element/type" and "input error" in err
    (tmp_path / "broken.json").write_text("{")
    assert run("mc-check", str(tmp_path / "broken.json"))[0] == 2
    assert run("mc-check", str(tmp_path / "missing.json"))[0] == 2
    assert run("mc-check")[0] == 2


def test_theta_file_errors(tmp_path):
    f = write(tmp_path, "theta.json", [{"order": 0, "matrix": [["0", "1"], ["1", "0"]]}])
    code, out, _ = run("fedosov", "--theta", f)
    assert code == 2 and json.loads(out)["pointer"] == "/0/matrix/0/1"
    ok = write(tmp_path, "theta_ok.json", [{"order": 0, "matrix": [["0", "2"], ["-2", "0"]]}])
    code, rep = run_json("fedosov", "--theta", ok, "--absorb", "A")
    assert code == 0 and any(t["order"] == 0 for t in rep["theta"])


def test_deterministic_output():
    for argv in (["descent-check", "--seed", "5"], ["barycentric", "--seed", "3"],
                 ["validate-dgla", "--sweep", "3", "--seed", "1"]):
        assert run(*argv)[1] == run(*argv)[1]


def test_text_format():
    code, out, _ = run("rw", "--format", "text")
    assert code == 0 and out.strip() and not out.lstrip().startswith("{")


@pytest.mark.parametrize("cmd", ["validate-dgla", "mc-check", "gauge", "descent-check", "deviation",
                                 "totalize", "stack-check", "twisted-matrix", "barycentric",
                                 "fedosov", "char-class", "rw"])
def test_sweeps_pass(cmd):
    code, rep = run_json(cmd, "--sweep", "2", "--seed", "7")
    assert code == 0 and rep["pass"], rep


@pytest.mark.parametrize("argv", [["validate-dgla", "--model", "sl2"], ["gauge"], ["descent-check"],
                                  ["deviation", "--model", "abelian_ext"], ["totalize", "--p-max", "1"],
                                  ["twisted-matrix", "--sigma", "0", "1"], ["barycentric"],
                                  ["char-class"], ["rw", "--n", "2"]])
def test_single_runs(argv):
    code, rep = run_json(*argv)
    assert code in (0, 1) and "command" in rep
    assert code == (0 if rep["pass"] else 1)
