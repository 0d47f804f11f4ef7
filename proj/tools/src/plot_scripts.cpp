#include "plot_scripts.hpp"

namespace geoperiods::cli {

namespace {

const char* kPrelude = R"py(#!/usr/bin/env python3
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name), newline="") as f:
        rows = list(csv.DictReader(f))
    return {k: [float(r[k]) for r in rows] for k in rows[0]} if rows else {}


def groups(d, key):
    out = {}
    for i, v in enumerate(d[key]):
        out.setdefault(v, []).append(i)
    return out


def save(fig, name):
    path = os.path.join(HERE, name)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    print(path)

)py";

const char* kLimiting = R"py(d = load("limiting_curvature.csv")
fig, ax = plt.subplots()
ax.plot(d["t"], d["k_plus"], label="k(+normal)")
ax.plot(d["t"], d["k_minus"], "--", label="k(-normal)")
ax.set_xlabel("arc length t")
ax.set_ylabel("limiting-circle curvature")
ax.legend()
save(fig, "limiting_curvature.png")
)py";

const char* kAdmissibility = R"py(c = load("admissibility_curve.csv")
m = load("admissibility_margin.csv")
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
a.plot(c["t"], c["h"], label="h")
a.plot(c["t"], c["k_plus"], label="k+")
a.plot(c["t"], c["k_minus"], label="k-")
a.set_xlabel("t")
a.legend()
b.plot(m["eps"], m["margin"])
b.axhline(0, color="k", lw=0.5)
b.set_xlabel("eps")
b.set_ylabel("margin")
save(fig, "admissibility.png")
)py";

const char* kPeriods = R"py(d = load("periods_envelope.csv")
fig, ax = plt.subplots()
for eps, idx in sorted(groups(d, "eps").items()):
    lam = [d["lambda"][i] for i in idx]
    ax.loglog(lam, [d["abs_envelope"][i] for i in idx], "o-", label=f"eps={eps:g} envelope")
    ax.loglog(lam, [d["abs_raw"][i] for i in idx], "x:", alpha=0.5)
ax.set_xlabel("lambda")
ax.set_ylabel("|generalized period|")
ax.legend()
save(fig, "periods.png")
)py";

const char* kPhase = R"py(d = load("phase_grid.csv")
n = int(round(len(d["t"]) ** 0.5))
fig, axes = plt.subplots(1, 3, figsize=(14, 4))
for ax, key in zip(axes, ["phi", "d2phi_ss", "d2phi_ts"]):
    z = [d[key][i * n:(i + 1) * n] for i in range(n)]
    im = ax.imshow(z, origin="lower", aspect="auto",
                   extent=[min(d["s"]), max(d["s"]), min(d["t"]), max(d["t"])])
    ax.set_title(key)
    ax.set_xlabel("s")
    ax.set_ylabel("t")
    fig.colorbar(im, ax=ax)
if os.path.exists(os.path.join(HERE, "critical_points.csv")):
    c = load("critical_points.csv")
    if c:
        axes[0].plot(c["s"], c["t"], "r+", ms=10)
save(fig, "phase.png")
)py";

const char* kDecay = R"py(d = load("decay.csv")
fig, ax = plt.subplots()
for eps, idx in sorted(groups(d, "eps").items()):
    ax.semilogx([d["lambda"][i] for i in idx], [d["rms_ratio"][i] for i in idx], "o-",
                label=f"eps={eps:g}")
ax.set_xlabel("lambda")
ax.set_ylabel("normalized period (ensemble RMS)")
ax.legend()
save(fig, "decay.png")
)py";

}  // namespace

std::string plot_script_for(const std::string& subcommand) {
  std::string body;
  if (subcommand == "limiting_curvature") body = kLimiting;
  else if (subcommand == "admissibility") body = kAdmissibility;
  else if (subcommand == "periods_scan") body = kPeriods;
  else if (subcommand == "phase_check") body = kPhase;
  else if (subcommand == "decay_scan") body = kDecay;
  return kPrelude + body;
}

}  // namespace geoperiods::cli
