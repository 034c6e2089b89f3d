"""
Driving the command line
========================

The ``pcone`` executable works on JSON matrix files. This script writes a
few inputs to a temporary directory and calls the same entry point the
shell would, printing each command and its output.
"""
import contextlib
import io
import shlex
import tempfile
from pathlib import Path

import numpy as np

from pcone.cli import main
from pcone.io import save_matrix

work = Path(tempfile.mkdtemp(prefix="pcone-demo-"))
save_matrix(work / "A.json", np.diag([1.0, 4.0]))
save_matrix(work / "B.json", np.diag([4.0, 1.0]))
save_matrix(work / "G.json", np.array([[2.0, 1.0], [0.5, 3.0]]))


def pcone(cmd):
    print("$ pcone", cmd)
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(shlex.split(cmd.replace("@", str(work) + "/")))
    print(out.getvalue().rstrip())
    print(f"[exit {code}]\n")


pcone("dist @A.json @B.json --p 2")
pcone("geodesic @A.json @B.json --samples 3")
pcone("factorize @G.json --p 2")
pcone("project @G.json --submanifold diag")
pcone("verify --suite emi,lie-triple --trials 2 --n 3 --format csv")

# Errors go to standard error, with a distinct exit code per failure class.
pcone("dist @A.json @missing.json")
