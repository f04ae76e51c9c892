"""Gate-phase robustness of the proposed command on the switched engine.

The duty map assumes the short window is centered on each secondary-current
crest.  Sweeping the window offset across a half carrier period shows how
far the realized envelope drifts from that ideal: the peak excess over the
final level stays small even at a quarter-period displacement.
"""

import argparse
import math

from wptsbar import ControllerConfig, ScenarioConfig, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=5, help="offsets across [0, pi]")
    ap.add_argument("--t-end", type=float, default=20e-3)
    args = ap.parse_args()

    print(f"{'offset/pi':>9} {'i2_max[A]':>10} {'final[A]':>9} {'peak excess%':>13}")
    worst = (0.0, 0.0)
    for k in range(args.points):
        frac = k / (args.points - 1) if args.points > 1 else 0.0
        _, m = run_scenario(
            ScenarioConfig(
                controller=ControllerConfig(ref_kind="proposed"),
                engine="switched",
                phase_offset=frac * math.pi,
                t_end=args.t_end,
            )
        )
        excess = 100.0 * (m.i2_max - m.i2_final) / m.i2_final
        if excess > worst[1]:
            worst = (frac, excess)
        print(f"{frac:>9.3f} {m.i2_max:>10.4f} {m.i2_final:>9.4f} {excess:>13.4f}")
    print(f"\nworst case: offset {worst[0]:.3f} pi, peak {worst[1]:.3f}% above final")


if __name__ == "__main__":
    main()
