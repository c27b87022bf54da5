"""
Command line runs
=================

The ``zzbdoa`` command wraps everything above. This script calls it
in-process, running one built-in figure with a reduced trial count and one
closed-form evaluation from a JSON config.
"""

import json
import tempfile
from pathlib import Path

from zzbdoa.cli import run

out = Path(tempfile.mkdtemp(prefix="zzbdoa-demo-"))

# the single-source figure with 50 trials per SNR point
code = run(["figure", "fig3", "--trials", "50", "--out", str(out / "fig3")])
print("figure fig3 exit code:", code)
print((out / "fig3" / "results.csv").read_text().splitlines()[0])
print((out / "fig3" / "manifest.txt").read_text())

# closed-form bound at one configuration
config = {
    "geometry": {"type": "coprime", "m": 3, "n": 5},
    "ensemble": {"num_sources": 11, "powers": [1.0] * 11},
    "prior": {"min_deg": -60, "max_deg": 60, "min_separation_deg": 5},
    "sweep": {"snapshots": 40, "snr_db": [0.0], "estimator": False},
    "point": {"snr_db": 0.0},
}
path = out / "coprime.json"
path.write_text(json.dumps(config, indent=2))
print("bound exit code:", run(["bound", "--config", str(path), "--out", str(out / "bound")]))
print("outputs in", out)
