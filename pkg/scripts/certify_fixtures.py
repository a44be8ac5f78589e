"""Certify the bundled networks and the R^(k) family; print a verdict table."""

import argparse
import time
from pathlib import Path

from crncert import certify, verify_certificate
from crncert.network import family_network, parse_network

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=8, help="largest family index to certify")
    ap.add_argument("--out", type=Path, help="directory for certificate JSON files")
    args = ap.parse_args()

    cases = [(f"R{k}", family_network(k)) for k in range(2, args.kmax + 1)]
    cases += [(p.stem, parse_network(p.read_text())) for p in sorted((ROOT / "networks").glob("*.rxn"))]
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    print(f"{'network':<8} {'m':>3} {'n':>3} {'overall':<34} {'r':<24} {'secs':>6} verify")
    for name, net in cases:
        t0 = time.perf_counter()
        cert = certify(net)
        secs = time.perf_counter() - t0
        r = "-" if cert.r is None else ",".join(str(v) for v in cert.r)
        print(f"{name:<8} {net.m:>3} {net.n:>3} {cert.overall[:34]:<34} {r:<24} {secs:6.2f} "
              f"{verify_certificate(cert)}")
        if args.out:
            (args.out / f"{name}.json").write_text(cert.to_json())


if __name__ == "__main__":
    main()
