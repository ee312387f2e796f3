import random

import pytest

from mrwb import accel, dse, mpcith, serialization as ser
from mrwb.mpcith import PRESETS, ParameterSet

DESK = PRESETS["desk"]


def _keypair(seed=b""):
    rng = random.Random(seed or 21)
    randomness = bytes(rng.randrange(256) for _ in range(32))
    return mpcith.keygen(DESK, randomness)


# -------------------------------------------------------------- binary keys

def test_public_key_round_trip():
    for name, ps in PRESETS.items():
        pk, _ = mpcith.keygen(ps, bytes(range(32)))
        blob = ser.serialize_public_key(pk)
        back = ser.parse_public_key(blob)
        assert back == pk
        assert ser.serialize_public_key(back) == blob


def test_secret_key_round_trip_preserves_signing():
    for name, ps in PRESETS.items():
        _, sk = mpcith.keygen(ps, bytes(range(32)))
        blob = ser.serialize_secret_key(sk)
        back = ser.parse_secret_key(blob)
        assert back == sk
        assert mpcith.sign(back, b"m", b"\x05" * 32) == mpcith.sign(sk, b"m", b"\x05" * 32)


def test_signature_round_trip_both_presets():
    rng = random.Random(22)
    for ps in PRESETS.values():
        pk, sk = mpcith.keygen(ps, bytes(rng.randrange(256) for _ in range(32)))
        sig = mpcith.sign(sk, b"wire", bytes(rng.randrange(256) for _ in range(32)))
        blob = ser.serialize_signature(sig)
        back = ser.parse_signature(blob)
        assert back == sig
        assert ser.serialize_signature(back) == blob
        assert mpcith.open(pk, b"wire", back)


def test_header_rejects_corruption():
    pk, sk = _keypair()
    blob = ser.serialize_public_key(pk)
    with pytest.raises(ser.FormatError):
        ser.parse_public_key(b"XXXX" + blob[4:])
    bad_version = blob[:4] + b"\xee" + blob[5:]
    with pytest.raises(ser.UnsupportedVersionError):
        ser.parse_public_key(bad_version)
    # kind byte must match the parser in use
    sk_blob = ser.serialize_secret_key(sk)
    with pytest.raises(ser.FormatError):
        ser.parse_public_key(sk_blob)
    with pytest.raises(ser.FormatError):
        ser.parse_secret_key(blob)


def test_header_rejects_bad_parameters():
    pk, _ = _keypair()
    blob = bytearray(ser.serialize_public_key(pk))
    # n_parties lives in the 6th header field; force it to 1
    off = 4 + 1 + 1 + 5 * 2
    blob[off : off + 2] = (1).to_bytes(2, "little")
    with pytest.raises(ser.FormatError):
        ser.parse_public_key(bytes(blob))


def test_every_truncation_is_rejected():
    pk, sk = _keypair(b"trunc")
    sig = mpcith.sign(sk, b"t", b"\x09" * 32)
    for blob in (
        ser.serialize_public_key(pk),
        ser.serialize_secret_key(sk),
        ser.serialize_signature(sig),
    ):
        parse = {
            ser.KIND_PUBLIC: ser.parse_public_key,
            ser.KIND_SECRET: ser.parse_secret_key,
            ser.KIND_SIGNATURE: ser.parse_signature,
        }[blob[5]]
        for cut in range(len(blob)):
            with pytest.raises(ser.FormatError):
                parse(blob[:cut])
        with pytest.raises(ser.FormatError):
            parse(blob + b"\x00")


def test_single_byte_corruption_never_escapes_format_errors():
    pk, sk = _keypair(b"fuzz")
    sig = mpcith.sign(sk, b"f", b"\x0a" * 32)
    blob = ser.serialize_signature(sig)
    rng = random.Random(23)
    for _ in range(300):
        pos = rng.randrange(len(blob))
        mutated = blob[:pos] + bytes((blob[pos] ^ (1 << rng.randrange(8)),)) + blob[pos + 1 :]
        try:
            back = ser.parse_signature(mutated)
        except ser.FormatError:
            continue
        # anything that parses must re-serialize canonically
        assert ser.serialize_signature(back) == mutated
        assert not mpcith.open(pk, b"f", back)


def test_size_formula_matches_serialized_length():
    rng = random.Random(24)
    for ps in PRESETS.values():
        pk, sk = mpcith.keygen(ps, bytes(rng.randrange(256) for _ in range(32)))
        for trial in range(5):
            sig = mpcith.sign(sk, b"size %d" % trial, bytes(rng.randrange(256) for _ in range(32)))
            unopened = mpcith._unopened_parties(sig.h2, ps)
            assert ser.signature_file_size(ps, unopened) == len(ser.serialize_signature(sig))


def test_nonuniform_projection_width_is_unrepresentable():
    ps = ParameterSet(s=4)
    assert ps.s != ps.r
    pk, _ = mpcith.keygen(ps, bytes(range(32)))
    with pytest.raises(ser.FormatError):
        ser.serialize_public_key(pk)


# ------------------------------------------------------------- text config

GOOD = """
[cut:solo]
t_keygen_ms = 1.0
t_sign_ms = 2.0
t_open_ms = 3.0
kluts = 4
kffs = 5
brams = 6

[composition:fast]
accel_stages = scalar_mat_sum
overlap_stages = keccak_permute, keccak_squeeze keccak_absorb
clock_mhz = 142

[accel:wide]
parallelism = 8
"""


def test_parse_library_config_happy_path():
    cfg = ser.parse_library_config(GOOD)
    (entry,) = cfg.entries
    assert entry.name == "solo" and entry.dsps == 2.0 and entry.brams == 6.0
    comp = cfg.compositions["fast"]
    assert comp.accel_stages == frozenset({"scalar_mat_sum"})
    assert comp.overlap_stages == frozenset(
        {"keccak_permute", "keccak_squeeze", "keccak_absorb"}
    )
    assert comp.clock_mhz == 142.0
    assert cfg.accel_configs["wide"].parallelism == 8
    assert cfg.accel_configs["wide"].clock_mhz == accel.DEFAULT_CLOCK_MHZ
    assert cfg.block_library().get("solo") is entry


def test_bundled_library_loads():
    from importlib import resources

    text = resources.files("mrwb.data").joinpath("table3_zynq7000.ini").read_text()
    lib = ser.parse_library_config(text).block_library()
    assert len(lib.entries) == 18
    assert lib.get("Cut 3").kluts == 22.3
    assert lib.get("Cut 7, P=8").t_open_ms == 5.81

    comp_text = resources.files("mrwb.data").joinpath("cut_compositions.ini").read_text()
    comps = ser.parse_library_config(comp_text).compositions
    assert set(comps) == {"Cut 1", "Cut 2", "Cut 1+2"}


@pytest.mark.parametrize(
    "mutation",
    [
        GOOD.replace("kluts = 4", "kluts = 4\nvoltage = 9"),
        GOOD.replace("kluts = 4", ""),
        GOOD.replace("[cut:solo]", "[block:solo]"),
        GOOD.replace("[cut:solo]", "[cut:]"),
        GOOD.replace("t_sign_ms = 2.0", "t_sign_ms = fast"),
        GOOD.replace("t_sign_ms = 2.0", "t_sign_ms = -2.0"),
        GOOD.replace("scalar_mat_sum", "warp_drive"),
        GOOD.replace("accel_stages = scalar_mat_sum", "accel_stages = keccak_permute"),
        GOOD.replace("parallelism = 8", "parallelism = 8.5"),
        GOOD.replace("parallelism = 8", "parallelism = 0"),
        GOOD + "\n[cut:solo]\nt_keygen_ms = 1\n",
    ],
)
def test_parse_library_config_rejects(mutation):
    with pytest.raises(ser.FormatError):
        ser.parse_library_config(mutation)


def test_emit_parse_round_trip():
    from importlib import resources

    merged = "\n".join(
        resources.files("mrwb.data").joinpath(name).read_text()
        for name in ("table3_zynq7000.ini", "cut_compositions.ini")
    )
    cfg = ser.parse_library_config(merged)
    back = ser.parse_library_config(ser.emit_library_config(cfg))
    assert back.entries == cfg.entries
    assert back.compositions == cfg.compositions
    assert back.accel_configs == cfg.accel_configs


def test_empty_config_has_no_library():
    cfg = ser.parse_library_config("")
    assert cfg.entries == ()
    with pytest.raises(ser.FormatError):
        cfg.block_library()
