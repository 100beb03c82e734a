"""
The command line, end to end
============================

Writes a group file, builds a certificate with ``eucgroups compactgen`` and
checks it with ``eucgroups verify`` from the certificate file alone.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp())
group = work / "xaxis.json"
group.write_text(json.dumps({
    "version": 1,
    "constants": [{"name": "t", "realization": "1.4142135623730950488"}],
    "ambient": "R^2",
    "generators": [["1", "0"], ["t", "0"], ["0", "1"]],
}))


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "eucgroups", *args], capture_output=True, text=True)
    print("$ eucgroups", " ".join(args), f"  [exit {proc.returncode}]")
    print(proc.stdout + proc.stderr)


cli("closure", str(group), "--stages", "2")
cli("compactgen", str(group), "--stages", "4", "--out", str(work / "cert.json"))
cli("verify", str(work / "cert.json"))
cli("compactgen", "--statement")
