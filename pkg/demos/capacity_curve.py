"""Ensemble capacity of the clustered channel vs the cloud rate K.

C(W, K) = max{C(W), H_max(W) - K}: for small K the decoder can exploit the
cloud structure and the capacity follows the H_max(W) - K line; beyond the
elbow at K = H_max - C only the classical capacity remains.

Run:  python demos/capacity_curve.py [out.csv]
"""

import math
import sys

import numpy as np

import cloudchan as cc

W = cc.Channel.bsc(0.2)


def main():
    c, p_star = cc.shannon_capacity(W)
    h, _ = cc.h_max(W)
    print(f"Shannon capacity C = {c:.6f} nats at P = {np.round(p_star.probs, 4)}")
    print(f"max output entropy H_max = {h:.6f} nats")
    print(f"elbow at K = H_max - C = {h - c:.6f}\n")

    out = open(sys.argv[1], "w") if len(sys.argv) > 1 else None
    if out:
        out.write("K,capacity\n")
    print(f"{'K':>6} {'C(W,K)':>10}")
    for k in np.arange(0.1, 1.51, 0.05):
        cap = cc.ensemble_capacity(W, float(k))
        marker = "  <- cloud term" if cap > c + 1e-12 else ""
        print(f"{k:6.2f} {cap:10.6f}{marker}")
        if out:
            out.write(f"{k:.2f},{cap:.9g}\n")
    if out:
        out.close()
        print(f"\nwrote {sys.argv[1]}")


if __name__ == "__main__":
    main()
