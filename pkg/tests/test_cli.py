import json

import numpy as np
import pytest

from srstair.cli import main
from srstair.framing import ChainFileError, dumps_chain, loads_chain

TOY = {"code": {"nu": 5, "t": 2, "m": 14, "q": 2, "w": 2, "L": 12},
       "decoder": {"window": 5, "max_iters": 8, "mode": "mf"},
       "channel": {"kind": "bsc", "points": [0.06, 0.1]},
       "run": {"seed": 7, "min_bit_errors": 20, "max_blocks": 200, "workers": 1}}


@pytest.fixture
def toy_cfg(tmp_path):
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(TOY))
    return str(path)


def test_validate(toy_cfg, tmp_path, capsys):
    assert main(["validate", "--config", toy_cfg]) == 0
    out = capsys.readouterr().out
    assert "VALID" in out and "n=28 k=18 e=3" in out
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", "--config", str(bad)]) == 2
    inv = tmp_path / "inv.json"
    inv.write_text(json.dumps({"code": {"nu": 5, "t": 2, "m": 14, "q": 3, "w": 2}}))
    assert main(["validate", "--config", str(inv)]) == 3
    assert "subblock-divisible" in capsys.readouterr().out
    assert main(["validate", "--config", str(tmp_path / "missing.json")]) == 2


def test_simulate_is_byte_identical(toy_cfg, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", toy_cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", toy_cfg, "--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0].startswith("# columns: p,")
    rows = [l for l in lines if not l.startswith("#")]
    assert len(rows) == 3  # header + two points
    manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert manifest["seed"] == 7 and len(manifest["input_sha256"]) == 64
    c = tmp_path / "c.csv"
    assert main(["simulate", "--config", toy_cfg, "--out", str(c), "--seed", "8", "--points", "0.1"]) == 0
    assert c.read_bytes() != a.read_bytes()


def test_threshold(toy_cfg, tmp_path, capsys):
    cfg = tmp_path / "th.json"
    cfg.write_text(json.dumps({"code": [{"label": "anchor", "nu": 10, "t": 3, "m": 510}]}))
    assert main(["threshold", "--config", str(cfg), "--length", "64", "--tol", "1e-6"]) == 0
    out = capsys.readouterr().out
    row = [l for l in out.splitlines() if l.startswith("anchor")][0].split(",")
    assert abs(float(row[-2]) - 5.63e-3) < 5e-5


def test_floor_and_oracle(toy_cfg, capsys):
    assert main(["floor", "--config", toy_cfg, "--points", "1e-3", "--a-min", "2"]) == 0
    assert ",6,True," in capsys.readouterr().out
    assert main(["floor", "--config", toy_cfg, "--points", "1e-3"]) == 3
    assert main(["smin-oracle", "--config", toy_cfg]) == 0
    assert "AGREE" in capsys.readouterr().out
    assert main(["smin-oracle", "--config", toy_cfg, "--budget", "3"]) == 4


def test_encode_decode_files(toy_cfg, tmp_path):
    src = tmp_path / "in.bin"
    payload = np.random.default_rng(0).integers(0, 256, 700, dtype=np.uint8).tobytes()
    src.write_bytes(payload)
    chain, out = tmp_path / "c.bin", tmp_path / "o.bin"
    assert main(["encode", "--config", toy_cfg, "--input", str(src), "--output", str(chain),
                 "--flip-p", "0.003", "--seed", "1"]) == 0
    assert main(["decode", "--config", toy_cfg, "--input", str(chain), "--output", str(out)]) == 0
    assert out.read_bytes() == payload
    chain.write_bytes(b"garbage" + chain.read_bytes())
    assert main(["decode", "--config", toy_cfg, "--input", str(chain), "--output", str(out)]) == 2


def test_chain_framing_checks():
    from srstair.srsc import SrscConfig, zero_block
    cfg = SrscConfig.symmetric(5, 2, 14, q=2, w=2, L=3)
    blocks = [zero_block(cfg, i) for i in (1, 2, 3)]
    blocks[1][2, 5] = 1
    data = dumps_chain(cfg, blocks, 10)
    back, n = loads_chain(cfg, data)
    assert n == 10 and all(np.array_equal(a, b) for a, b in zip(blocks, back))
    with pytest.raises(ChainFileError, match="different code"):
        loads_chain(SrscConfig.symmetric(5, 2, 14, q=1, w=2, L=3), data)
    with pytest.raises(ChainFileError, match="truncated"):
        loads_chain(cfg, data[:-3])
    with pytest.raises(ChainFileError, match="trailing"):
        loads_chain(cfg, data + b"\0")
