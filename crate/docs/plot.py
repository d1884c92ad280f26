"""Plot the series written by `toa run` / `toa preset`.

    python docs/plot.py out/fig1            # every out/fig1_*.csv
    python docs/plot.py out/fig4 --flux     # dashed flux curves as well
"""
import argparse
import glob

import matplotlib.pyplot as plt
import numpy as np

parser = argparse.ArgumentParser()
parser.add_argument("prefix", help="output directory joined with the file prefix")
parser.add_argument("--flux", action="store_true")
parser.add_argument("--save", metavar="PNG")
args = parser.parse_args()

paths = sorted(glob.glob(f"{args.prefix}_*.csv"))
if not paths:
    raise SystemExit(f"no {args.prefix}_*.csv files")

fig, ax = plt.subplots(figsize=(8, 4.5))
for path in paths:
    label = path[len(args.prefix) + 1 : -len(".csv")]
    data = np.genfromtxt(path, delimiter=",", names=True)
    (line,) = ax.plot(data["t"], data["pi"], label=label)
    if args.flux:
        ax.plot(data["t"], data["flux"], "--", color=line.get_color(), label=f"{label} flux")
ax.set_xlabel("t")
ax.set_ylabel("arrival density")
ax.legend()
fig.tight_layout()
if args.save:
    fig.savefig(args.save, dpi=150)
else:
    plt.show()
