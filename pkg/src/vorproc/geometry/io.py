"""Plain-text point pattern exchange: one point per line, '#' comments."""
import numpy as np


def write_points(path, points, header=None):
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    with open(path, "w") as fh:
        if header:
            for line in str(header).splitlines():
                fh.write(f"# {line}\n")
        for p in pts:
            row = np.atleast_1d(p)
            fh.write(" ".join(format(v, ".17g") for v in row) + "\n")


def read_points(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append([float(t) for t in line.split()])
    if not rows:
        return np.empty((0, 2))
    arr = np.array(rows)
    return arr[:, 0] if arr.shape[1] == 1 else arr
