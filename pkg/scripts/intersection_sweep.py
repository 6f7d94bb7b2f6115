"""#(A cap f(A)) over random affine subspaces, with the inclusions re-checked."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from _config import parse_config
from ffdyn import field_from_spec
from ffdyn.fpoly import parse_poly
from ffdyn.klinalg import random_affine
from ffdyn.report import to_csv
from ffdyn.theorems import intersection_experiment


@dataclass
class Config:
    field: str = "5^1^4"
    poly: str = "1,0,1"
    dims: str = "1,2,3"
    samples: int = 100
    strict: bool = True
    out: str = "results/intersection_sweep.csv"


def main(cfg: Config) -> None:
    ctx = field_from_spec(cfg.field)
    f = parse_poly(ctx, cfg.poly)
    rows = []
    for s in (int(x) for x in cfg.dims.split(",")):
        sizes = Counter()
        for seed in range(cfg.samples):
            rep = intersection_experiment(ctx, random_affine(ctx, s, seed), f, strict=cfg.strict)
            sizes[rep.card_intersection] += 1
            rows.append({"s": s, "seed": seed, "card": rep.card_intersection,
                         "bound_exponent": rep.bound_exponent, "log_ratio": rep.log_ratio,
                         "condition": rep.condition.satisfied})
        print(f"dim {s}: intersection sizes {dict(sorted(sizes.items()))}")
    with open(cfg.out, "w") as fh:
        fh.write(to_csv(rows))


if __name__ == "__main__":
    main(parse_config(Config, description=__doc__))
