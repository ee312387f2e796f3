"""Byte formats for keys and signatures, and the text format for libraries.

Binary layout: a 4-byte magic "MRWB", a format version byte, a kind byte
(public key / secret key / signature), seven little-endian u16 parameter
fields (q, m_rows, n_cols, k, r, n_parties, tau), then u32-length-prefixed
payload fields.  Signatures do not store which party stays unopened; the
parser re-derives that from the second challenge, exactly like the
verifier.

Block libraries, cut compositions and accelerator settings share one
INI-style config format: [cut:NAME], [composition:NAME], [accel:NAME]
sections with numeric keys.  Unknown sections or keys are errors, not
warnings, so a typoed key cannot silently skew a search.
"""

import configparser
import io
from dataclasses import dataclass

from . import mpcith
from .accel import AccelConfig, ConfigError, CutComposition
from .dse import BlockLibrary, CutEntry
from .gf16 import Matrix
from .mpcith import ParameterSet, PublicKey, RoundOpening, SecretKey, Signature

MAGIC = b"MRWB"
FORMAT_VERSION = 1

KIND_PUBLIC = 1
KIND_SECRET = 2
KIND_SIGNATURE = 3

_KIND_NAMES = {KIND_PUBLIC: "public key", KIND_SECRET: "secret key", KIND_SIGNATURE: "signature"}


class FormatError(ValueError):
    """Malformed or out-of-contract bytes/text."""


class UnsupportedVersionError(FormatError):
    pass


def _u16(v: int) -> bytes:
    return v.to_bytes(2, "little")


def _lp(field: bytes) -> bytes:
    return len(field).to_bytes(4, "little") + field


class _Reader:
    def __init__(self, blob: bytes):
        self._b = blob
        self._pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self._pos + n > len(self._b):
            raise FormatError(f"truncated while reading {what}")
        out = self._b[self._pos : self._pos + n]
        self._pos += n
        return out

    def u16(self, what: str) -> int:
        return int.from_bytes(self.take(2, what), "little")

    def field(self, expect_len: int, what: str) -> bytes:
        n = int.from_bytes(self.take(4, what), "little")
        if n != expect_len:
            raise FormatError(f"{what}: expected {expect_len} bytes, header says {n}")
        return self.take(n, what)

    def done(self, what: str):
        if self._pos != len(self._b):
            raise FormatError(f"{len(self._b) - self._pos} trailing bytes after {what}")


def _header(kind: int, ps: ParameterSet) -> bytes:
    if ps.s != ps.r:
        raise FormatError("non-default projection height is not representable")
    fields = (ps.q, ps.m_rows, ps.n_cols, ps.k, ps.r, ps.n_parties, ps.tau)
    return MAGIC + bytes((FORMAT_VERSION, kind)) + b"".join(_u16(v) for v in fields)


def _parse_header(rd: _Reader, expect_kind: int) -> ParameterSet:
    if rd.take(4, "magic") != MAGIC:
        raise FormatError("bad magic, not a MRWB file")
    version = rd.take(1, "version")[0]
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"format version {version} not supported")
    kind = rd.take(1, "kind")[0]
    if kind != expect_kind:
        found = _KIND_NAMES.get(kind, f"kind {kind}")
        raise FormatError(f"expected a {_KIND_NAMES[expect_kind]} file, found {found}")
    vals = [rd.u16(f) for f in ("q", "m_rows", "n_cols", "k", "r", "n_parties", "tau")]
    try:
        return ParameterSet(*vals)
    except ValueError as exc:
        raise FormatError(f"invalid parameters in header: {exc}") from None


def _parse_matrix(rd: _Reader, rows: int, cols: int, what: str) -> Matrix:
    raw = rd.field(rows * cols, what)
    try:
        return Matrix(rows, cols, raw)
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None


def serialize_public_key(pk: PublicKey) -> bytes:
    ps = pk.params
    return _header(KIND_PUBLIC, ps) + _lp(pk.seed_pk) + _lp(pk.m0_left.data)


def parse_public_key(blob: bytes) -> PublicKey:
    rd = _Reader(blob)
    ps = _parse_header(rd, KIND_PUBLIC)
    seed_pk = rd.field(mpcith.SEED_LEN, "public seed")
    m0_left = _parse_matrix(rd, ps.m_rows, ps.cols_left, "left key matrix")
    rd.done("public key")
    return PublicKey(ps, bytes(seed_pk), m0_left)


def serialize_secret_key(sk: SecretKey) -> bytes:
    ps = sk.params
    return (
        _header(KIND_SECRET, ps)
        + _lp(sk.seed_sk)
        + _lp(sk.public.seed_pk)
        + _lp(sk.public.m0_left.data)
    )


def parse_secret_key(blob: bytes) -> SecretKey:
    rd = _Reader(blob)
    ps = _parse_header(rd, KIND_SECRET)
    seed_sk = bytes(rd.field(mpcith.SEED_LEN, "secret seed"))
    seed_pk = bytes(rd.field(mpcith.SEED_LEN, "public seed"))
    m0_left = _parse_matrix(rd, ps.m_rows, ps.cols_left, "left key matrix")
    rd.done("secret key")
    alpha, kmat = mpcith._expand_secret(seed_sk, ps)
    pk = PublicKey(ps, seed_pk, m0_left)
    return SecretKey(ps, seed_sk, alpha, kmat, pk)


def serialize_signature(sig: Signature) -> bytes:
    ps = sig.params
    unopened = mpcith._unopened_parties(sig.h2, ps)
    last = ps.n_parties - 1
    out = [_header(KIND_SIGNATURE, ps), _lp(sig.salt), _lp(sig.h1), _lp(sig.h2)]
    for i_star, rnd in zip(unopened, sig.rounds):
        out.append(_lp(b"".join(rnd.seeds)))
        out.append(_lp(rnd.com_unopened))
        out.append(_lp(rnd.s_share.data))
        if (rnd.aux is None) != (i_star == last):
            raise FormatError("aux corrections inconsistent with the unopened party")
        if rnd.aux is not None:
            alpha, kmat, cmat = rnd.aux
            out.append(_lp(bytes(alpha)))
            out.append(_lp(kmat.data))
            out.append(_lp(cmat.data))
    return b"".join(out)


def parse_signature(blob: bytes) -> Signature:
    rd = _Reader(blob)
    ps = _parse_header(rd, KIND_SIGNATURE)
    salt = bytes(rd.field(mpcith.SALT_LEN, "salt"))
    h1 = bytes(rd.field(32, "first challenge"))
    h2 = bytes(rd.field(32, "second challenge"))
    unopened = mpcith._unopened_parties(h2, ps)
    last = ps.n_parties - 1
    rounds = []
    for l, i_star in enumerate(unopened):
        what = f"round {l}"
        joined = rd.field((ps.n_parties - 1) * mpcith.SEED_LEN, what + " seeds")
        seeds = tuple(
            bytes(joined[i * mpcith.SEED_LEN : (i + 1) * mpcith.SEED_LEN])
            for i in range(ps.n_parties - 1)
        )
        com = bytes(rd.field(32, what + " commitment"))
        s_share = _parse_matrix(rd, ps.s, ps.r, what + " S share")
        aux = None
        if i_star != last:
            alpha_raw = rd.field(ps.k, what + " alpha corrections")
            if any(v >= 16 for v in alpha_raw):
                raise FormatError(what + " alpha corrections out of field range")
            kmat = _parse_matrix(rd, ps.r, ps.cols_left, what + " K corrections")
            cmat = _parse_matrix(rd, ps.s, ps.cols_left, what + " C corrections")
            aux = (tuple(alpha_raw), kmat, cmat)
        rounds.append(RoundOpening(seeds, com, s_share, aux))
    rd.done("signature")
    return Signature(ps, salt, h1, h2, tuple(rounds))


def signature_file_size(ps: ParameterSet, unopened) -> int:
    """Exact byte size of a serialized signature given the unopened parties."""
    if len(unopened) != ps.tau:
        raise ValueError("one unopened party per round required")
    last = ps.n_parties - 1
    size = 20 + 3 * (4 + 32)
    per_round = (4 + (ps.n_parties - 1) * mpcith.SEED_LEN) + (4 + 32) + (4 + ps.s * ps.r)
    aux = (4 + ps.k) + (4 + ps.r * ps.cols_left) + (4 + ps.s * ps.cols_left)
    for i_star in unopened:
        size += per_round
        if i_star != last:
            size += aux
    return size


# ---------------------------------------------------------------------------
# block library / composition / accelerator config text format

_CUT_KEYS = {"t_keygen_ms", "t_sign_ms", "t_open_ms", "kluts", "kffs", "brams"}
_CUT_OPTIONAL = {"dsps"}
_COMP_KEYS = {"accel_stages"}
_COMP_OPTIONAL = {"overlap_stages", "clock_mhz"}
_ACCEL_OPTIONAL = {"parallelism", "clock_mhz", "pipeline_latency"}


@dataclass(frozen=True)
class LibraryConfig:
    entries: tuple          # CutEntry, in file order
    compositions: dict      # name -> CutComposition
    accel_configs: dict     # name -> AccelConfig

    def block_library(self) -> BlockLibrary:
        if not self.entries:
            raise FormatError("config defines no cut entries")
        return BlockLibrary(self.entries)


def _number(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise FormatError(f"[{section}] {key}: {raw!r} is not a number") from None


def _check_keys(section: str, present, required, optional):
    missing = required - present
    if missing:
        raise FormatError(f"[{section}] missing key(s): {', '.join(sorted(missing))}")
    unknown = present - required - optional
    if unknown:
        raise FormatError(f"[{section}] unknown key(s): {', '.join(sorted(unknown))}")


def _stage_list(raw: str):
    return frozenset(s.strip() for s in raw.replace(",", " ").split())


def parse_library_config(text: str) -> LibraryConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise FormatError(f"config syntax: {exc}") from None

    entries = []
    compositions = {}
    accel_configs = {}
    for section in cp.sections():
        items = dict(cp.items(section))
        present = set(items)
        if section.startswith("cut:"):
            name = section[4:].strip()
            if not name:
                raise FormatError("cut section with an empty name")
            _check_keys(section, present, _CUT_KEYS, _CUT_OPTIONAL)
            kwargs = {k: _number(section, k, v) for k, v in items.items()}
            try:
                entries.append(CutEntry(name, **kwargs))
            except ValueError as exc:
                raise FormatError(f"[{section}] {exc}") from None
        elif section.startswith("composition:"):
            name = section[12:].strip()
            if not name:
                raise FormatError("composition section with an empty name")
            _check_keys(section, present, _COMP_KEYS, _COMP_OPTIONAL)
            clock = None
            if "clock_mhz" in items:
                clock = _number(section, "clock_mhz", items["clock_mhz"])
            try:
                compositions[name] = CutComposition(
                    name,
                    _stage_list(items["accel_stages"]),
                    _stage_list(items.get("overlap_stages", "")),
                    clock,
                )
            except ConfigError as exc:
                raise FormatError(f"[{section}] {exc}") from None
        elif section.startswith("accel:"):
            name = section[6:].strip()
            if not name:
                raise FormatError("accel section with an empty name")
            _check_keys(section, present, set(), _ACCEL_OPTIONAL)
            kwargs = {}
            for k, v in items.items():
                val = _number(section, k, v)
                if k in ("parallelism", "pipeline_latency"):
                    if val != int(val):
                        raise FormatError(f"[{section}] {k} must be an integer")
                    val = int(val)
                kwargs[k] = val
            try:
                accel_configs[name] = AccelConfig(**kwargs)
            except ConfigError as exc:
                raise FormatError(f"[{section}] {exc}") from None
        else:
            raise FormatError(
                f"unknown section [{section}]; expected cut:, composition: or accel:"
            )

    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise FormatError("duplicate cut names in config")
    return LibraryConfig(tuple(entries), compositions, accel_configs)


def emit_library_config(config: LibraryConfig) -> str:
    """Render a LibraryConfig back to config text (round-trips via parse)."""
    cp = configparser.ConfigParser(interpolation=None)
    for e in config.entries:
        sec = f"cut:{e.name}"
        cp.add_section(sec)
        for key in ("t_keygen_ms", "t_sign_ms", "t_open_ms", "kluts", "kffs", "brams", "dsps"):
            cp.set(sec, key, repr(getattr(e, key)))
    for name, comp in config.compositions.items():
        sec = f"composition:{name}"
        cp.add_section(sec)
        cp.set(sec, "accel_stages", " ".join(sorted(comp.accel_stages)))
        if comp.overlap_stages:
            cp.set(sec, "overlap_stages", " ".join(sorted(comp.overlap_stages)))
        if comp.clock_mhz is not None:
            cp.set(sec, "clock_mhz", repr(comp.clock_mhz))
    for name, cfg in config.accel_configs.items():
        sec = f"accel:{name}"
        cp.add_section(sec)
        cp.set(sec, "parallelism", repr(cfg.parallelism))
        cp.set(sec, "clock_mhz", repr(cfg.clock_mhz))
        cp.set(sec, "pipeline_latency", repr(cfg.pipeline_latency))
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
