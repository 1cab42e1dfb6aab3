"""Regenerates the toy dataset, its exact conjugate posterior draws and the classical DIC golden file."""

import json
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent
N, MU, SIGMA = 50, 0.3, 1.0
PRIOR_MEAN, PRIOR_SD = 0.0, 10.0
DRAWS = 4000

rng = np.random.default_rng(20240611)
y = rng.normal(MU, SIGMA, N)

post_prec = 1.0 / PRIOR_SD**2 + N / SIGMA**2
post_sd = post_prec**-0.5
post_mean = (PRIOR_MEAN / PRIOR_SD**2 + y.sum() / SIGMA**2) / post_prec
theta = rng.normal(post_mean, post_sd, DRAWS)


def fmt(x):
    return f"{x:.16e}"


with open(HERE / "toy.csv", "w") as f:
    f.write(f"# wentropy data v1 model=normal-mean theta={MU} n={N} sigma={SIGMA} weights=ones\n")
    f.write("y_1,weight\n")
    for v in y:
        f.write(f"{fmt(v)},{fmt(1.0)}\n")

with open(HERE / "toy_draws.csv", "w") as f:
    f.write(
        f"# wentropy draws v1 model=normal-mean exact posterior N({float(post_mean)!r}, {float(post_sd)!r}^2) "
        f"prior=N({PRIOR_MEAN}, {PRIOR_SD}^2)\n"
    )
    f.write("theta_1\n")
    for t in theta:
        f.write(f"{fmt(t)}\n")

# Re-read what was written so the golden matches the files bit for bit.
y = np.loadtxt(HERE / "toy.csv", delimiter=",", skiprows=2)[:, 0]
theta = np.loadtxt(HERE / "toy_draws.csv", skiprows=2)


def deviance(mu):
    r = (y - mu) / SIGMA
    return float(np.sum(np.log(2 * np.pi * SIGMA**2) + r * r))


dbar = float(np.mean([deviance(t) for t in theta]))
theta_bar = float(np.mean(theta))
d_hat = deviance(theta_bar)
p_d = dbar - d_hat
golden = {
    "dic": d_hat + 2 * p_d,
    "p_d": p_d,
    "deviance_at_mean": d_hat,
    "mean_deviance": dbar,
    "theta_bar": theta_bar,
    "model": "normal-mean",
    "sigma": SIGMA,
    "prior": {"mean": PRIOR_MEAN, "sd": PRIOR_SD},
    "observations": int(y.size),
    "draws": int(theta.size),
}
(HERE / "toy_dic_golden.json").write_text(json.dumps(golden, indent=2) + "\n")
print(json.dumps(golden, indent=2))
