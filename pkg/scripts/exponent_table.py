"""Print the exponent table and the log(eta_d)/d convergence diagnostic."""
from __future__ import annotations

import math
from dataclasses import dataclass

from _config import parse_config
from ffdyn.exponents import eta_limit_report, exponent_table


@dataclass
class Config:
    dmax: int = 12
    limit_to: int = 60


def main(cfg: Config) -> None:
    print(f"{'d':>3} {'eta':>16} {'theta':>24} {'kappa':>16}")
    for row in exponent_table(cfg.dmax):
        print(f"{row.d:>3} {str(row.eta):>16} {str(row.theta):>24} {str(row.kappa):>16}")
    print(f"\n-ln 5 = {-math.log(5):.6f}")
    for d, v in eta_limit_report(cfg.limit_to)[::10]:
        print(f"d = {d:3d}: log(eta_d)/d = {v:.6f}")


if __name__ == "__main__":
    main(parse_config(Config, description=__doc__))
