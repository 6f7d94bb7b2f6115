"""Linear maps over F_{32^2} where the hit threshold is actually reachable.

For degree 1 the threshold drops below N on orbits of length ~100, so the
detector and the certifier both get exercised.  Coefficients are drawn from
K plus a few elements outside it.
"""
from __future__ import annotations

from dataclasses import dataclass

from _config import parse_config
from ffdyn import field_from_spec
from ffdyn.gf_tower import enumerate_subfield
from ffdyn.report import to_json
from ffdyn.theorems import verify_thm_subfield


@dataclass
class Config:
    field: str = "2^5^2"
    extra: str = "32,33,100,517"
    out: str = "results/detector_nonvacuous.json"


def main(cfg: Config) -> None:
    ctx = field_from_spec(cfg.field)
    K = enumerate_subfield(ctx, ctx.m).indices().tolist()
    extra = [int(x) for x in cfg.extra.split(",") if x]
    rep = verify_thm_subfield(ctx, 1, coeff_set=K + extra, leading="all", starts=K)
    with open(cfg.out, "w") as fh:
        fh.write(to_json(rep.to_json()) + "\n")
    print(f"met {rep.n_met}, certified {rep.n_certified}, k histogram {dict(rep.certified_k)}, "
          f"counterexamples {len(rep.counterexamples)}")


if __name__ == "__main__":
    main(parse_config(Config, description=__doc__))
