import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from apollokit.cli import main
from apollokit.configs import DescartesConfig
from apollokit.ensembles import orbit_from_json


def run(capsys, monkeypatch, argv, stdin=""):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cli(capsys, monkeypatch):
    return lambda argv, stdin="": run(capsys, monkeypatch, argv, stdin)


def test_equivalence_n9(cli):
    code, out, _ = cli(["equivalence", "--n", "9"])
    assert code == 0
    assert json.loads(out) == {"closed_form": True, "equivalent": True, "n": 9,
                               "representation": "exact"}


def test_equivalence_details(cli):
    code, out, _ = cli(["equivalence", "--n", "3", "--details"])
    d = json.loads(out)
    assert code == 0 and d["equivalent"] is False
    assert d["details"]["det_ratio_square"] is False
    assert set(d["details"]["lorentz_necessary"]) == {"descartes", "wilker"}


def test_relations(cli):
    code, out, _ = cli(["relations", "--n", "4"])
    d = json.loads(out)
    assert code == 0 and d["ok"] is True and d["failures"] == []


def test_seed_orbit_spectrum_pipeline(cli):
    _, seed, _ = cli(["seed", "--n", "2", "--kind", "integral"])
    code, orbit, _ = cli(["orbit", "--depth", "2"], seed)
    assert code == 0
    o = orbit_from_json(json.loads(orbit))
    assert len(o) == 1 + 4 + 12
    code, spectrum_out, _ = cli(["spectrum"], orbit)
    d = json.loads(spectrum_out)
    assert code == 0
    assert [Fraction(x) for x in d["spectrum"]] == sorted(Fraction(x) for x in d["spectrum"])
    assert Fraction(-1) in [Fraction(x) for x in d["spectrum"]]
    code, csv_text, _ = cli(["spectrum", "--format", "csv"], orbit)
    assert csv_text.startswith("curvature,multiplicity\n")


def test_orbit_elements_revalidate(cli):
    _, seed, _ = cli(["seed", "--n", "3"])
    _, orbit, _ = cli(["orbit", "--depth", "2", "--group", "dual"], seed)
    for el in json.loads(orbit)["elements"]:
        cfg = el["config"] if "config" in el else el
        code, _, _ = cli(["validate"], json.dumps(cfg))
        assert code == 0


def test_determinism(cli):
    _, seed, _ = cli(["seed", "--n", "3"])
    outs = [cli(["orbit", "--depth", "2"], seed)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert outs[0].endswith("\n")


def test_packing_check(cli):
    _, seed, _ = cli(["seed", "--n", "2", "--kind", "integral"])
    _, orbit, _ = cli(["orbit", "--depth", "2"], seed)
    code, out, _ = cli(["packing-check"], orbit)
    assert code == 0 and json.loads(out)["counts"]["crossing"] == 0


def test_domain_errors_exit_1(cli):
    code, out, err = cli(["validate"], '{"n": 2, "W": [[1, 0, 0, 0]]}')
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "dimension_mismatch"
    code, _, err = cli(["orbit"], "")
    assert code == 1 and json.loads(err)["error"] == "invalid_input"
    code, _, err = cli(["validate"], "not json")
    assert code == 1
    code, _, err = cli(["mass-cert", "--word", "x7"])
    assert code == 1 and "error" in json.loads(err)


def test_usage_errors_exit_2(cli):
    assert cli(["bogus"])[0] == 2
    assert cli(["seed", "--n", "abc"])[0] == 2
    assert cli(["orbit", "--group", "modular"], "{}")[0] == 2


def test_padic(cli):
    _, out, _ = cli(["padic", "--d", "3", "--p", "3"])
    assert json.loads(out)["value"] == 3
    _, out, _ = cli(["padic", "--diag", "2,2,2,-2", "--p", "2"])
    assert json.loads(out)["value"] == 2


def test_intertwiner(cli):
    code, out, _ = cli(["intertwiner", "--n", "2", "--target", "lorentz"])
    d = json.loads(out)
    assert code == 0 and d["verified"] is True
    assert d["W"][0] == ["1/2"] * 4
    code, _, err = cli(["intertwiner", "--n", "3"])
    assert code == 1


def test_moebius(cli):
    _, seed, _ = cli(["seed", "--n", "2", "--kind", "integral"])
    code, out, _ = cli(["moebius", "--gens", "d:2"], seed)
    cfg = DescartesConfig.from_json(json.loads(out))
    assert [Fraction(c) for c in cfg.curvatures()] == [Fraction(-1, 2), 1, 1, Fraction(3, 2)]
    code, _, err = cli(["moebius", "--gens", "d:-1"], seed)
    assert code == 1


def test_dualize(cli):
    _, seed, _ = cli(["seed", "--n", "2", "--kind", "integral"])
    code, out, _ = cli(["dualize"], seed)
    d = json.loads(out)
    assert code == 0 and len(d["spheres"]) == 4
    assert d["max_orthogonality_residual"] < 1e-9


def test_reduce_and_mass(cli):
    _, out, _ = cli(["reduce", "--word", "s1 s2 s1 s2"])
    d = json.loads(out)
    assert d["reduced"] == "s2 s1" and d["matrix_equal"] is True
    code, out, _ = cli(["mass-cert", "--word", "s1 s2"])
    assert code == 0 and "representation" in json.loads(out)


def test_render_svg(cli):
    _, seed, _ = cli(["seed", "--n", "2", "--kind", "integral"])
    code, out, _ = cli(["render-svg", "--viewport=-2,-2,2,2"], seed)
    assert code == 0
    assert ET.fromstring(out).tag.endswith("svg")
    code, out, _ = cli(["render-svg", "--xmin", "-3", "--xmax", "3"], seed)
    assert code == 0
    code, _, err = cli(["render-svg", "--viewport", "1,2"], seed)
    assert code == 1
    _, seed3, _ = cli(["seed", "--n", "3"])
    assert cli(["render-svg"], seed3)[0] == 1


def test_seed_file(tmp_path, cli):
    _, seed, _ = cli(["seed", "--n", "2", "--kind", "integral"])
    f = tmp_path / "seed.json"
    f.write_text(seed)
    code, out, _ = cli(["validate", "--seed-file", str(f)])
    assert code == 0


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "apollokit", "equivalence", "--n", "8"],
                       capture_output=True, text=True, check=True)
    assert json.loads(p.stdout)["equivalent"] is True
