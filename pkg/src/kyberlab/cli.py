"""Command-line front end: key management, encapsulation, the fault-attack
pipeline, sweeps, and the secure BSM channel."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import attack, experiment, its, kem, pke, solver
from .params import Variant, get_params


def _parse_seed32(text: str | None) -> bytes:
    if text is None:
        return os.urandom(32)
    raw = bytes.fromhex(text)
    if len(raw) > 32:
        raise SystemExit("seed must be at most 32 hex bytes")
    return raw.rjust(32, b"\x00")


def _parse_counts(text: str) -> list[int]:
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        if len(parts) != 3:
            raise SystemExit("range must be start:stop:step")
        start, stop, step = parts
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.split(",")]


def _load_keydir(path: str, need_secret: bool):
    meta = json.loads((Path(path) / "meta.json").read_text())
    params = get_params(Variant(meta["variant"]))
    pk = pke.deserialize_pk((Path(path) / "pk.bin").read_bytes(), params)
    if not need_secret:
        return params, pk, None
    blob = json.loads((Path(path) / "sk.json").read_text())
    sk = pke.deserialize_sk(bytes.fromhex(blob["sk"]), params)
    bundle = kem.KemSecretBundle(
        params.variant, sk, pk, bytes.fromhex(blob["z"]),
        bytes.fromhex(blob["h_pk"]), np.array(blob["e"], dtype=np.int64))
    return params, pk, bundle


def cmd_keygen(args) -> int:
    params = get_params(Variant(args.variant))
    keypair = kem.kem_keygen(params, _parse_seed32(args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "meta.json").write_text(json.dumps({"variant": params.variant.value}) + "\n")
    (out / "pk.bin").write_bytes(pke.serialize_pk(keypair.pk))
    (out / "sk.json").write_text(json.dumps({
        "sk": pke.serialize_sk(keypair.bundle.sk, params).hex(),
        "z": keypair.bundle.z.hex(),
        "h_pk": keypair.bundle.h_pk.hex(),
        "e": keypair.bundle.e_noise.tolist(),
    }) + "\n")
    print(f"wrote {params.variant.value} keypair to {out}")
    return 0


def cmd_encaps(args) -> int:
    params, pk, _ = _load_keydir(args.keydir, need_secret=False)
    ct, key, _ = kem.encaps(pk, _parse_seed32(args.seed))
    Path(args.out).write_bytes(pke.serialize_ct(ct, params))
    print(key.hex())
    return 0


def cmd_decaps(args) -> int:
    params, _, bundle = _load_keydir(args.keydir, need_secret=True)
    ct = pke.deserialize_ct(Path(args.ct).read_bytes(), params)
    print(kem.decaps(bundle, ct).hex())
    return 0


def cmd_attack(args) -> int:
    variant = Variant(args.variant)
    record_seed = args.seed if args.seed is not None else int.from_bytes(os.urandom(8), "big")
    params = get_params(variant)
    config = experiment.default_solver_config(params)

    block = experiment.encoding.kdf(b"kyberlab-trial" + record_seed.to_bytes(8, "big"), 64)
    keypair = kem.kem_keygen(params, block[:32])
    transcript = attack.collect_inequalities(keypair, args.ineq, block[32:])
    if args.ineq_out:
        attack.save_inequalities(args.ineq_out, transcript.inequalities)
    candidate, _iters, _conv, report = solver.recover_key(
        transcript.inequalities, params, config, true_unknowns=keypair.true_unknowns())
    validated = solver.validate_candidate(keypair.pk, candidate, params)
    if not validated and params.unknown_count <= solver.EXACT_MODE_MAX_UNKNOWNS:
        candidate = solver.disambiguate_candidate(keypair.pk, candidate,
                                                  transcript.inequalities, params)
        validated = solver.validate_candidate(keypair.pk, candidate, params)
    text = solver.recovery_report({**report, "seed": record_seed}, validated)
    if args.report:
        Path(args.report).write_text(text + "\n")
    print(text)
    return 0 if validated else 1


def cmd_sweep(args) -> int:
    config = experiment.SweepConfig(
        variant=Variant(args.variant), counts=_parse_counts(args.ineq),
        repeats=args.repeats, master_seed=args.seed, workers=args.workers,
        out_path=args.out)
    records = experiment.run_sweep(config)
    for row in experiment.summarize(records):
        print(f"{row['variant']:>5} n={row['ineq_count']:>6} "
              f"success={row['successes']}/{row['trials']} "
              f"mean={row['mean_wall_ms']:.0f}ms")
    print(f"wrote {args.out} and {experiment.summary_path(args.out)}")
    return 0


def cmd_send(args) -> int:
    _params, pk, _ = _load_keydir(args.keydir, need_secret=False)
    level = its.SecurityLevel(args.level)
    msg = (its.deserialize_bsm(Path(args.bsm).read_bytes()) if args.bsm
           else its.sample_bsm())
    envelope = its.secure_send(pk, level, msg, m_seed=_parse_seed32(args.seed),
                               payload_len=args.payload_len)
    Path(args.out).write_bytes(its.pack_envelope(envelope))
    print(f"wrote envelope ({len(envelope.payload_ct)} payload bytes) to {args.out}")
    return 0


def cmd_recv(args) -> int:
    _params, _, bundle = _load_keydir(args.keydir, need_secret=True)
    envelope = its.unpack_envelope(Path(args.envelope).read_bytes())
    msg = its.secure_receive(bundle, envelope)
    sys.stdout.write(its.serialize_bsm(msg).decode())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kyberlab")
    sub = parser.add_subparsers(dest="command", required=True)
    variants = [v.value for v in Variant]

    p = sub.add_parser("keygen", help="generate a keypair directory")
    p.add_argument("--variant", choices=variants, required=True)
    p.add_argument("--seed", help="hex seed (32 bytes), random if omitted")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encaps", help="encapsulate a shared key")
    p.add_argument("--keydir", required=True)
    p.add_argument("--seed", help="hex seed, random if omitted")
    p.add_argument("--out", required=True, help="ciphertext output path")
    p.set_defaults(func=cmd_encaps)

    p = sub.add_parser("decaps", help="decapsulate a ciphertext")
    p.add_argument("--keydir", required=True)
    p.add_argument("--ct", required=True)
    p.set_defaults(func=cmd_decaps)

    p = sub.add_parser("attack", help="run one fault-attack trial")
    p.add_argument("--variant", choices=variants, required=True)
    p.add_argument("--ineq", type=int, required=True, help="inequalities to collect")
    p.add_argument("--seed", type=int, help="trial seed (integer)")
    p.add_argument("--ineq-out", help="write the inequality system to this path")
    p.add_argument("--report", help="write the recovery report to this path")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="run a success/time sweep to CSV")
    p.add_argument("--variant", choices=variants, required=True)
    p.add_argument("--ineq", required=True, help="comma list or start:stop:step")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("send", help="encrypt a BSM into an envelope")
    p.add_argument("--keydir", required=True)
    p.add_argument("--level", choices=[l.value for l in its.SecurityLevel], required=True)
    p.add_argument("--bsm", help="BSM text file (canonical form); sample if omitted")
    p.add_argument("--seed", help="hex seed for encapsulation")
    p.add_argument("--payload-len", type=int, default=1024)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_send)

    p = sub.add_parser("recv", help="open an envelope and print the BSM")
    p.add_argument("--keydir", required=True)
    p.add_argument("--envelope", required=True)
    p.set_defaults(func=cmd_recv)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
