#!/usr/bin/env python3
"""Attitude PID gains by pole placement on the rigid-body plant I*theta'' = u.

With u = -kp*theta - kd*theta' + ki*integral(-theta) the closed-loop
characteristic polynomial is s^3 + (kd/I) s^2 + (kp/I) s + ki/I. Placing the
poles at -p1, -p2, -p3 gives the gains below. Inertias come from
`flapsim validate` (roll_inertia_kgm2, pitch_inertia_kgm2).
"""

import argparse


def gains(inertia, poles):
    p1, p2, p3 = poles
    kd = inertia * (p1 + p2 + p3)
    kp = inertia * (p1 * p2 + p2 * p3 + p1 * p3)
    ki = inertia * p1 * p2 * p3
    return kp, ki, kd


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--roll-inertia", type=float, required=True)
    parser.add_argument("--pitch-inertia", type=float, required=True)
    parser.add_argument("--poles", type=float, nargs=3, default=[6.0, 8.0, 10.0],
                        help="closed-loop pole magnitudes in rad/s")
    args = parser.parse_args()
    for axis, inertia in (("roll", args.roll_inertia), ("pitch", args.pitch_inertia)):
        kp, ki, kd = gains(inertia, args.poles)
        print(f'"{axis}": {{"kp": {kp:.3g}, "ki": {ki:.3g}, "kd": {kd:.3g}}}')


if __name__ == "__main__":
    main()
