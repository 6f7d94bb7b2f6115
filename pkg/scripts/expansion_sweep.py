"""Measured growth exponent of random sets under 4A-4A and f(A)-f(A)."""
from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean

from _config import parse_config
from ffdyn import ElemSet, field_from_spec
from ffdyn.fpoly import parse_poly
from ffdyn.report import to_csv
from ffdyn.rng import SplitMix64
from ffdyn.theorems import expansion_experiment


@dataclass
class Config:
    field: str = "3^1^5"
    poly: str = "0,1,1"
    sizes: str = "4,8,16,32"
    samples: int = 50
    seed: int = 0
    out: str = "results/expansion_sweep.csv"


def main(cfg: Config) -> None:
    ctx = field_from_spec(cfg.field)
    f = parse_poly(ctx, cfg.poly)
    rows = []
    for size in (int(s) for s in cfg.sizes.split(",")):
        for i in range(cfg.samples):
            seed = cfg.seed + i
            A = ElemSet.from_indices(ctx.order, SplitMix64(seed).sample(ctx.order, size))
            rep = expansion_experiment(ctx, A, f)
            rows.append({"size": size, "seed": seed, "gamma_M": rep.gamma_M, "xi_M": rep.xi_M,
                         "exponent": rep.measured_exponent,
                         "condition": rep.condition.satisfied})
        exps = [r["exponent"] for r in rows if r["size"] == size]
        print(f"size {size:3d}: mean exponent {fmean(exps):.3f}, min {min(exps):.3f}")
    with open(cfg.out, "w") as fh:
        fh.write(to_csv(rows))


if __name__ == "__main__":
    main(parse_config(Config, description=__doc__))
