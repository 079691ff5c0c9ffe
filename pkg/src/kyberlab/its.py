"""V2X basic-safety-message channel secured with the KEM.

A BSM core record is serialized to a canonical text form, a security level
picks the KEM variant (low -> 512, moderate -> 768, high -> 1024), and the
payload travels XORed with a keystream derived from the encapsulated key,
authenticated by a hash tag.  The data-encapsulation side is deliberately
minimal lab plumbing, not a production AEAD.
"""

from __future__ import annotations

import enum
import os
import struct
from dataclasses import dataclass

from . import encoding, kem, pke
from .params import Variant, get_params

_STREAM_TAG = b"kyberlab/its/keystream"
_ENVELOPE_MAGIC = b"KENV"

TRANSMISSION_STATES = ("neutral", "park", "forwardGears", "reverseGears", "unavailable")


class ParseError(ValueError):
    pass


class AuthenticationError(Exception):
    pass


class ConfigurationError(Exception):
    pass


class SecurityLevel(str, enum.Enum):
    LOW = "low"
    MODERATE = "moderate"
    HIGH = "high"

    @property
    def variant(self) -> Variant:
        return _LEVEL_TO_VARIANT[self]


_LEVEL_TO_VARIANT = {
    SecurityLevel.LOW: Variant.K512,
    SecurityLevel.MODERATE: Variant.K768,
    SecurityLevel.HIGH: Variant.K1024,
}


@dataclass
class PositionalAccuracy:
    semiMajor: float
    semiMinor: float
    orientation: float


@dataclass
class AccelerationSet:
    long: float
    lat: float
    vert: float
    yaw: float


@dataclass
class BrakeStatus:
    wheelBrakes: str
    traction: str
    abs: str
    scs: str
    brakeBoost: str
    auxbrakes: str


@dataclass
class VehicleSize:
    width: float
    length: float


@dataclass
class BsmMessage:
    msgCnt: int
    id: str
    secmark: int
    lat: float
    long: float
    elev: float
    accuracy: PositionalAccuracy
    transmission: str
    speed: float
    heading: float
    angle: float
    accelSet: AccelerationSet
    brakes: BrakeStatus
    size: VehicleSize

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError("lat outside [-90, 90]")
        if not -180.0 <= self.long <= 180.0:
            raise ValueError("long outside [-180, 180]")
        if self.transmission not in TRANSMISSION_STATES:
            raise ValueError(f"transmission must be one of {TRANSMISSION_STATES}")


_FIELD_ORDER = [
    ("msgCnt", int), ("id", str), ("secmark", int),
    ("lat", float), ("long", float), ("elev", float),
    ("accuracy.semiMajor", float), ("accuracy.semiMinor", float), ("accuracy.orientation", float),
    ("transmission", str), ("speed", float), ("heading", float), ("angle", float),
    ("accelSet.long", float), ("accelSet.lat", float), ("accelSet.vert", float), ("accelSet.yaw", float),
    ("brakes.wheelBrakes", str), ("brakes.traction", str), ("brakes.abs", str),
    ("brakes.scs", str), ("brakes.brakeBoost", str), ("brakes.auxbrakes", str),
    ("size.width", float), ("size.length", float),
]


def _get_path(msg: BsmMessage, path: str):
    obj = msg
    for part in path.split("."):
        obj = getattr(obj, part)
    return obj


def serialize_bsm(msg: BsmMessage) -> bytes:
    """Canonical order-fixed text form; equal messages serialize identically."""
    lines = ["bsm/1"]
    for path, kind in _FIELD_ORDER:
        value = _get_path(msg, path)
        lines.append(f"{path}={kind(value)!r}" if kind is str else f"{path}={kind(value)}")
    return ("\n".join(lines) + "\n").encode()


def deserialize_bsm(data: bytes) -> BsmMessage:
    try:
        text = data.decode()
    except UnicodeDecodeError as exc:
        raise ParseError(f"not a text record: {exc}") from None
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != "bsm/1":
        raise ParseError("missing bsm/1 header")
    expected = dict(_FIELD_ORDER)
    values = {}
    for line in lines[1:]:
        if "=" not in line:
            raise ParseError(f"malformed line {line!r}")
        path, raw = line.split("=", 1)
        if path not in expected:
            raise ParseError(f"unknown field {path!r}")
        if path in values:
            raise ParseError(f"duplicate field {path!r}")
        kind = expected[path]
        try:
            if kind is str:
                import ast

                value = ast.literal_eval(raw)
                if not isinstance(value, str):
                    raise ValueError("expected a string literal")
            else:
                value = kind(raw)
        except (ValueError, SyntaxError) as exc:
            raise ParseError(f"bad value for field {path!r}: {exc}") from None
        values[path] = value
    missing = set(expected) - set(values)
    if missing:
        raise ParseError(f"missing fields: {sorted(missing)}")
    try:
        return BsmMessage(
            msgCnt=values["msgCnt"], id=values["id"], secmark=values["secmark"],
            lat=values["lat"], long=values["long"], elev=values["elev"],
            accuracy=PositionalAccuracy(values["accuracy.semiMajor"], values["accuracy.semiMinor"],
                                        values["accuracy.orientation"]),
            transmission=values["transmission"], speed=values["speed"],
            heading=values["heading"], angle=values["angle"],
            accelSet=AccelerationSet(values["accelSet.long"], values["accelSet.lat"],
                                     values["accelSet.vert"], values["accelSet.yaw"]),
            brakes=BrakeStatus(values["brakes.wheelBrakes"], values["brakes.traction"],
                               values["brakes.abs"], values["brakes.scs"],
                               values["brakes.brakeBoost"], values["brakes.auxbrakes"]),
            size=VehicleSize(values["size.width"], values["size.length"]),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


@dataclass
class SecureEnvelope:
    level: SecurityLevel
    kem_ct: bytes
    payload_ct: bytes
    auth_tag: bytes


def _keystream(key: bytes, length: int) -> bytes:
    counter = struct.pack(">Q", 0)
    return encoding.kdf(key + _STREAM_TAG + counter, length)


def _frame_payload(data: bytes, payload_len: int | None) -> bytes:
    framed = struct.pack(">I", len(data)) + data
    if payload_len is not None:
        if len(framed) > payload_len:
            raise ValueError(f"payload needs {len(framed)} bytes, limit is {payload_len}")
        framed = framed + bytes(payload_len - len(framed))
    return framed


def secure_send(pk: pke.PkePublicKey, level: SecurityLevel, msg: BsmMessage,
                m_seed: bytes | None = None, payload_len: int | None = 1024) -> SecureEnvelope:
    """Encapsulate a fresh key for the level's variant and encrypt the BSM.

    ``payload_len`` pads the framed plaintext to a fixed wire size (the
    default matches the experiment setting); None disables padding.
    """
    if pk.variant != level.variant:
        raise ConfigurationError(f"level {level.value} requires variant {level.variant.value}, "
                                 f"public key is {pk.variant.value}")
    ct, key, _ = kem.encaps(pk, m_seed if m_seed is not None else os.urandom(32))
    payload = _frame_payload(serialize_bsm(msg), payload_len)
    stream = _keystream(key, len(payload))
    payload_ct = bytes(a ^ b for a, b in zip(payload, stream))
    tag = encoding.hash_h(key + payload_ct)
    return SecureEnvelope(level, pke.serialize_ct(ct, pk.params), payload_ct, tag)


def secure_receive(bundle: kem.KemSecretBundle, envelope: SecureEnvelope) -> BsmMessage:
    if bundle.variant != envelope.level.variant:
        raise ConfigurationError(f"envelope level {envelope.level.value} requires variant "
                                 f"{envelope.level.variant.value}, key is {bundle.variant.value}")
    params = get_params(bundle.variant)
    key = kem.decaps(bundle, pke.deserialize_ct(envelope.kem_ct, params))
    if encoding.hash_h(key + envelope.payload_ct) != envelope.auth_tag:
        raise AuthenticationError("payload authentication tag mismatch")
    stream = _keystream(key, len(envelope.payload_ct))
    payload = bytes(a ^ b for a, b in zip(envelope.payload_ct, stream))
    (length,) = struct.unpack(">I", payload[:4])
    if length + 4 > len(payload):
        raise ParseError("framed length exceeds payload")
    return deserialize_bsm(payload[4 : 4 + length])


_LEVEL_CODES = {SecurityLevel.LOW: 0, SecurityLevel.MODERATE: 1, SecurityLevel.HIGH: 2}
_CODE_LEVELS = {v: k for k, v in _LEVEL_CODES.items()}


def pack_envelope(env: SecureEnvelope) -> bytes:
    return b"".join([
        _ENVELOPE_MAGIC, bytes([1, _LEVEL_CODES[env.level]]),
        struct.pack(">I", len(env.kem_ct)), env.kem_ct,
        struct.pack(">I", len(env.payload_ct)), env.payload_ct,
        env.auth_tag,
    ])


def unpack_envelope(data: bytes) -> SecureEnvelope:
    if data[:4] != _ENVELOPE_MAGIC or data[4] != 1:
        raise ParseError("not a version-1 envelope")
    level = _CODE_LEVELS.get(data[5])
    if level is None:
        raise ParseError(f"unknown level code {data[5]}")
    off = 6
    (n_kem,) = struct.unpack_from(">I", data, off)
    off += 4
    kem_ct = data[off : off + n_kem]
    off += n_kem
    (n_pay,) = struct.unpack_from(">I", data, off)
    off += 4
    payload_ct = data[off : off + n_pay]
    off += n_pay
    tag = data[off : off + 32]
    if len(tag) != 32:
        raise ParseError("truncated envelope")
    return SecureEnvelope(level, kem_ct, payload_ct, tag)


def sample_bsm() -> BsmMessage:
    """A fully-populated example record (values shaped like THEA CV pilot data)."""
    return BsmMessage(
        msgCnt=47, id="2D6748E9", secmark=36799,
        lat=27.9506083, long=-82.4571776, elev=12.6,
        accuracy=PositionalAccuracy(5.0, 2.0, 40.0),
        transmission="forwardGears", speed=13.9, heading=221.0125, angle=1.5,
        accelSet=AccelerationSet(0.34, -0.12, -0.02, 0.6),
        brakes=BrakeStatus("unavailable", "on", "on", "unavailable", "unavailable", "off"),
        size=VehicleSize(1.95, 4.87),
    )
