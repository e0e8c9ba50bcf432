"""Smoke test for the compiled module: import, a few numeric spot checks,
and one end-to-end command run into a temp directory."""

import json
import math
import os
import shutil
import tempfile

import burstpdmp


def main():
    assert burstpdmp.version() == burstpdmp.__version__
    assert burstpdmp.version().count(".") == 2

    # exact flow against the closed form, gamma1 != gamma2
    x, y = burstpdmp.flow(1.0, 0.5, 0.25, 2.0, 1.0, 3.0)
    ex = math.exp(-0.5)
    ey = 0.5 * math.exp(-0.25) + 3.0 * (math.exp(-0.25) - math.exp(-0.5))
    assert abs(x - ex) < 1e-14, (x, ex)
    assert abs(y - ey) < 1e-14, (y, ey)

    cfg = json.loads(burstpdmp.default_config())
    assert cfg["model"]["gamma1"] == 10.0
    assert cfg["sim"]["process"] == "full2d"

    # constant-rate model closes: E[X] = b phi / gamma1
    cfg["model"]["rate"] = {"kind": "constant", "value": 2.0}
    cfg["model"]["burst"]["mean"] = 1.0
    mom = burstpdmp.stationary_moments(json.dumps(cfg), 1)
    assert abs(mom["mu"][1] - 0.2) < 1e-12, mom

    law = burstpdmp.law_pdf(json.dumps(cfg), [0.5, 1.0, 2.0])
    assert all(v > 0.0 for v in law), law

    out = tempfile.mkdtemp(prefix="burstpdmp_smoke_")
    try:
        cfg["sim"]["horizon"] = 2.0
        cfg["sim"]["obs_dt"] = 0.5
        cfg["sim"]["n_replicas"] = 1
        cfg["threads"] = 1
        cfg["out_dir"] = out
        res = burstpdmp.run("simulate", json.dumps(cfg))
        assert os.path.isfile(res["manifest_path"]), res
        assert res["outputs"], res
        for name in res["outputs"]:
            with open(os.path.join(res["out_dir"], name)) as fh:
                assert fh.readline().strip() == "t,x,y,event"
    finally:
        shutil.rmtree(out, ignore_errors=True)

    # config errors surface as the registered ValueError subclass
    try:
        burstpdmp.run("simulate", '{"bogus": 1}')
    except burstpdmp.ConfigError as e:
        assert "bogus" in str(e)
    else:
        raise AssertionError("unknown field accepted")

    print("python smoke: ok")


if __name__ == "__main__":
    main()
