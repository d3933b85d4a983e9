"""Lower and upper bounds on the ensemble error exponent vs rate.

Sweeps the achievable and converse exponents for BSC(0.2) over several
cloud rates K. For K below the no-jump threshold -0.5*ln(p(1-p)) the
converse diverges to +inf at low rates; the printout marks that region.

Run:  python demos/exponent_curves.py [out.csv]
"""

import sys

import numpy as np

import cloudchan as cc

W = cc.Channel.bsc(0.2)
P = cc.Distribution.uniform(2)
K_VALUES = (1.2, 1.1, 1.0, 0.85)
RATES = np.arange(0.005, 0.33, 0.015)


def main():
    out = open(sys.argv[1], "w") if len(sys.argv) > 1 else None
    if out:
        out.write("K,R,achievable,converse,correct_decoding,rho_star,eta_star,error\n")

    for k in K_VALUES:
        r_jump = cc.r_min_jump(W, k)
        print(f"\nK = {k}   (converse jump point R_min = {r_jump:.4f})")
        print(f"{'R':>7} {'achievable':>12} {'converse':>12}")
        for r in RATES:
            low = cc.achievable_error_exponent(P, W, float(r), k)
            up = cc.converse_error_exponent(W, float(r), k)
            up_txt = "inf" if np.isinf(up.value) else f"{up.value:.6f}"
            print(f"{r:7.3f} {low.value:12.6f} {up_txt:>12}")
            if out:
                out.write(
                    f"{k},{r:.3f},{low.value:.9g},"
                    f"{'inf' if np.isinf(up.value) else f'{up.value:.9g}'},"
                    f",{low.rho:.6g},{low.eta:.6g},\n"
                )
    if out:
        out.close()
        print(f"\nwrote {sys.argv[1]}")


if __name__ == "__main__":
    main()
