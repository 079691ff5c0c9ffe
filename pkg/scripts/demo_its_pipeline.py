#!/usr/bin/env python3
"""End-to-end demonstration: secure a safety message over the channel, then
run the fault attack against the same receiver keypair and recover its key.

Uses the toy variant so the whole story plays out in seconds; pass --level to
watch a full variant instead (minutes).
"""

import argparse
import time

import numpy as np

from kyberlab import attack, experiment, its, kem, solver
from kyberlab.params import Variant, get_params


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--level", choices=[l.value for l in its.SecurityLevel])
    parser.add_argument("--ineq", type=int, default=None)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    if args.level:
        level = its.SecurityLevel(args.level)
        variant = level.variant
        count = args.ineq or {Variant.K512: 7000, Variant.K768: 8000,
                              Variant.K1024: 11000}[variant]
    else:
        level = None
        variant = Variant.BABY
        count = args.ineq or 200

    params = get_params(variant)
    seed_block = experiment.encoding.kdf(b"demo" + args.seed.to_bytes(8, "big"), 64)
    keypair = kem.kem_keygen(params, seed_block[:32])
    print(f"variant {variant.value}: {params.unknown_count} secret coefficients")

    if level:
        msg = its.sample_bsm()
        envelope = its.secure_send(keypair.pk, level, msg, m_seed=b"\x01" * 32)
        back = its.secure_receive(keypair.bundle, envelope)
        print(f"channel: {len(envelope.payload_ct)}-byte payload delivered, "
              f"round trip ok: {back == msg}")

    t0 = time.perf_counter()
    transcript = attack.collect_inequalities(keypair, count, seed_block[32:])
    print(f"collected {count} inequalities in {time.perf_counter() - t0:.1f}s")

    config = experiment.default_solver_config(params)
    candidate, iters, converged, report = solver.recover_key(
        transcript.inequalities, params, config, true_unknowns=keypair.true_unknowns())
    validated = solver.validate_candidate(keypair.pk, candidate, params)
    if not validated and params.unknown_count <= solver.EXACT_MODE_MAX_UNKNOWNS:
        candidate = solver.disambiguate_candidate(keypair.pk, candidate,
                                                  transcript.inequalities, params)
        validated = solver.validate_candidate(keypair.pk, candidate, params)
    accuracy = float(np.mean(candidate.flat() == keypair.true_unknowns()))
    print(f"recovery: {iters} sweeps, accuracy {accuracy:.4f}, "
          f"validated against the public key: {validated} "
          f"({time.perf_counter() - t0:.1f}s total)")


if __name__ == "__main__":
    main()
