"""Builds the extension, imports it and runs one request end to end.

    python3 python/smoke_test.py
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build():
    subprocess.run(
        ["cargo", "build", "-q", "-p", "gsx-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    built = os.path.join(ROOT, "target", "debug", "libgsx_py.so")
    dest = tempfile.mkdtemp()
    shutil.copy(built, os.path.join(dest, "gsx_py.so"))
    sys.path.insert(0, dest)


def main():
    build()
    import gsx_py

    request = {
        "grid": {"width": 8, "height": 8},
        "targets": [
            {"label": "a", "x": 1, "y": 1},
            {"label": "b", "x": 6, "y": 1},
            {"label": "c", "x": 3, "y": 6},
        ],
        "edges": [["a", "b"], ["b", "c"]],
    }
    for strategy in ("lvde", "ovde"):
        plan = gsx_py.plan(json.dumps(request), strategy)
        gsx_py.verify(plan, "tableau", 5)
        gsx_py.verify(plan, "graph")
        cost = gsx_py.cost_report(plan)
        assert cost["total"] == len(json.loads(plan)["steps"]), cost
        art = gsx_py.render(plan, "ascii")
        assert art.count("T") == 3, art
        assert gsx_py.render(plan, "svg").startswith("<svg")
        print(strategy, cost["total"])

    try:
        gsx_py.plan(json.dumps(request), "fastest")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown strategy accepted")

    bad = json.loads(gsx_py.plan(json.dumps(request)))
    bad["steps"].pop()
    try:
        gsx_py.verify(json.dumps(bad), "graph")
    except gsx_py.VerificationError:
        pass
    else:
        raise AssertionError("truncated plan verified")

    # path 0-1-2: complementing at 1 adds the edge 0-2
    assert gsx_py.local_complement([(0, 1), (1, 2)], 1) == [(0, 1), (0, 2), (1, 2)]
    print("ok")


if __name__ == "__main__":
    main()
