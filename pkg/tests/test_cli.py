import orjson

from codimflow.utils.files import read_cloud



def _config(tmp_path, document:dict, name:str="config.json"):
    path = tmp_path / name
    path.write_bytes(orjson.dumps(document))
    return str(path)



def _provenance(out) -> str:
    return (out / "results.csv").read_text().splitlines()[0]



# Gen tests

def test_gen_circle(cli, tmp_path, out):
    document = {"n": 2, "k": 1, "shape": {"kind": "sphere", "radius": 1.0}, "spacing": 0.05}
    result = cli("gen", "--config", _config(tmp_path, document), "--out", str(out))
    assert result.exit_code == 0
    cloud = read_cloud(out / "cloud.txt")
    assert len(cloud) == 126
    assert (out / "summary.txt").exists()


def test_gen_needs_spacing(cli, tmp_path, out):
    document = {"n": 2, "k": 1, "shape": {"kind": "sphere"}}
    result = cli("gen", "--config", _config(tmp_path, document), "--out", str(out))
    assert result.exit_code == 2



# Verify tests

def test_verify_tube(cli, out):
    result = cli("verify", "--family", "circle", "--check", "tube", "--out", str(out))
    assert result.exit_code == 0
    assert _provenance(out).startswith("# provenance: tool=codimflow; version=")
    assert (out / "tube_circle.csv").exists()


def test_verify_alpha(cli, out):
    result = cli("verify", "--family", "circle", "--check", "alpha", "--out", str(out))
    assert result.exit_code == 1
    assert "FAIL alpha" in result.output
    result = cli("verify", "--family", "circle", "--check", "alpha", "--override", "c1=0.08",
                 "--out", str(out))
    assert result.exit_code == 0


def test_verify_operator(cli, out):
    result = cli("verify", "--check", "operator", "--override", "trials=50", "--out", str(out))
    assert result.exit_code == 0


def test_verify_subsolution_violation(cli, out):
    result = cli("verify", "--check", "subsolution", "--override", "t_range=[0.01,0.2]",
                 "--out", str(out))
    assert result.exit_code == 1
    assert "violation: curvature" in (out / "summary.txt").read_text()


def test_verify_unknown_key(cli, out):
    result = cli("verify", "--check", "alpha", "--override", "colour=red", "--out", str(out))
    assert result.exit_code == 2


def test_verify_unknown_family(cli, out):
    result = cli("verify", "--family", "torus", "--out", str(out))
    assert result.exit_code == 2


def test_effective_config_reproduces_the_hash(cli, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert cli("verify", "--check", "operator", "--override", "trials=20", "--out", str(first)).exit_code == 0
    effective = str(first / "config.effective.json")
    assert cli("verify", "--config", effective, "--out", str(second)).exit_code == 0
    assert _provenance(first) == _provenance(second)



# Flow tests

def test_flow_circle(cli, tmp_path, out):
    document = {
        "n": 2, "k": 1,
        "grid": {"lower": [-1.5, -1.5], "upper": [1.5, 1.5], "h": 0.125},
        "shape": {"kind": "sphere", "radius": 1.0},
        "t_end": 0.02, "snapshots": [0.01],
        "output": {"slices": [{}]},
    }
    result = cli("flow", "--config", _config(tmp_path, document), "--out", str(out))
    assert result.exit_code == 0
    for name in ("grid_t000.txt", "grid_t002.txt", "zero_t001.txt", "slice0_t002.pgm", "diagnostics.csv"):
        assert (out / name).exists()


def test_flow_slice_needs_axes(cli, tmp_path, out):
    document = {
        "n": 3, "k": 1,
        "grid": {"lower": [-1.0, -1.0, -1.0], "upper": [1.0, 1.0, 1.0], "h": 0.125},
        "shape": {"kind": "sphere", "radius": 0.5},
        "t_end": 0.01,
        "output": {"slices": [{}]},
    }
    result = cli("flow", "--config", _config(tmp_path, document), "--out", str(out))
    assert result.exit_code == 2
    assert not (out / "results.csv").exists()



# Graphflow tests

def test_graphflow_linearization(cli, out):
    result = cli("graphflow", "--override", "experiment=linearization", "--out", str(out))
    assert result.exit_code == 0
    assert "linearization" in (out / "results.csv").read_text()
