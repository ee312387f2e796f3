"""MinRank-based MPC-in-the-head signatures over GF(16).

A key pair fixes matrices M_0..M_k (split into left/right column blocks) such
that the secret (alpha, K) satisfies

    M_0^L + sum_i alpha_i M_i^L = (M_0^R + sum_i alpha_i M_i^R) K.

Signing simulates N additively-shared parties per round: shares of alpha, K
and a masking pair (A, C = A*K) are expanded from per-(round, party) seeds,
the verifier's first challenge projects the rank relation onto s random rows,
and the second challenge picks one party per round to stay unopened.  The
whole transcript is bound through the two challenge hashes, so verification
reduces to recomputing them from the opened parties.
"""

from dataclasses import dataclass
from functools import lru_cache, reduce

from . import gf16, keccak
from .gf16 import Matrix

SEED_LEN = 16
SALT_LEN = 32

# domain tags, one per hash/PRNG role
D_SK_EXPAND = 1
D_PK_EXPAND = 2
D_PK_DIGEST = 3
D_SIGN_RAND = 4
D_SHARE = 5
D_COMMIT = 6
D_CHALLENGE1 = 7
D_PROJECTION = 8
D_CHALLENGE2 = 9
D_SELECT = 10


@dataclass(frozen=True)
class ParameterSet:
    """Protocol dimensions; q is fixed to 16 by the field implementation."""

    q: int = 16
    m_rows: int = 15
    n_cols: int = 15
    k: int = 15
    r: int = 6
    n_parties: int = 4
    tau: int = 8
    s: int = None  # projection rows; defaults to r

    def __post_init__(self):
        if self.s is None:
            object.__setattr__(self, "s", self.r)
        if self.q != 16:
            raise ValueError("only GF(16) is supported")
        if not 0 < self.r < self.n_cols:
            raise ValueError("need 0 < r < n_cols (both column blocks non-empty)")
        for name in ("m_rows", "k", "tau", "s"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_parties < 2:
            raise ValueError("n_parties must be at least 2")
        if self.n_parties > 256:
            # party selection rejection-samples single bytes
            raise ValueError("n_parties must be at most 256")

    @property
    def cols_left(self) -> int:
        return self.n_cols - self.r


PRESETS = {
    "desk": ParameterSet(),
    "ia-like": ParameterSet(k=78, n_parties=16, tau=39),
}


@dataclass(frozen=True)
class PublicKey:
    params: ParameterSet
    seed_pk: bytes
    m0_left: Matrix


@dataclass(frozen=True)
class SecretKey:
    params: ParameterSet
    seed_sk: bytes
    alpha: tuple
    kmat: Matrix
    public: PublicKey


@dataclass(frozen=True)
class RoundOpening:
    """Per-round signature material: everything but one party's tape."""

    seeds: tuple          # seeds of the opened parties, ascending party index
    com_unopened: bytes   # commitment of the unopened party
    s_share: Matrix       # that party's S broadcast
    aux: tuple            # (alpha, K, C) corrections, present unless the
                          # last party stays unopened


@dataclass(frozen=True)
class Signature:
    params: ParameterSet
    salt: bytes
    h1: bytes
    h2: bytes
    rounds: tuple


def _u16(v: int) -> bytes:
    return v.to_bytes(2, "little")


def _expand_matrix(rng: keccak.Prng, rows: int, cols: int) -> Matrix:
    # PRNG nibbles are in range by construction, skip re-validation
    return gf16._unchecked(rows, cols, rng.field_bytes(rows * cols))


def _expand_secret(seed_sk: bytes, ps: ParameterSet):
    rng = keccak.Prng(seed_sk, tag=D_SK_EXPAND)
    alpha = tuple(rng.field_bytes(ps.k))
    kmat = _expand_matrix(rng, ps.r, ps.cols_left)
    return alpha, kmat


def _expand_public(seed_pk: bytes, ps: ParameterSet):
    rng = keccak.Prng(seed_pk, tag=D_PK_EXPAND)
    mats = [_expand_matrix(rng, ps.m_rows, ps.n_cols) for _ in range(ps.k)]
    m0_right = _expand_matrix(rng, ps.m_rows, ps.r)
    return mats, m0_right


@lru_cache(maxsize=16)
def public_matrices(pk: PublicKey):
    """Expand (M_1..M_k, full M_0) from the public seed.

    Cached: a signer or verifier typically handles many messages under one
    key, and the expansion dwarfs everything else it would amortize over.
    """
    mats, m0_right = _expand_public(pk.seed_pk, pk.params)
    return tuple(mats), gf16.concat_cols(pk.m0_left, m0_right)


@lru_cache(maxsize=128)
def public_key_digest(pk: PublicKey) -> bytes:
    return keccak.hash_digest(D_PK_DIGEST, [pk.seed_pk, pk.m0_left.data])


def keygen(ps: ParameterSet, randomness: bytes):
    """Derive a key pair from 32 bytes of randomness; fully deterministic."""
    if len(randomness) < 2 * SEED_LEN:
        raise ValueError(f"keygen needs {2 * SEED_LEN} bytes of randomness")
    seed_sk = bytes(randomness[:SEED_LEN])
    seed_pk = bytes(randomness[SEED_LEN : 2 * SEED_LEN])
    alpha, kmat = _expand_secret(seed_sk, ps)
    mats, m0_right = _expand_public(seed_pk, ps)
    e = gf16.scalar_mat_sum(alpha, mats)
    e_left, e_right = gf16.split_lr(e, ps.r)
    # solve the rank relation for M_0^L (char 2: subtraction is addition)
    m0_left = gf16.mat_add(gf16.mat_mul(gf16.mat_add(m0_right, e_right), kmat), e_left)
    pk = PublicKey(ps, seed_pk, m0_left)
    sk = SecretKey(ps, seed_sk, alpha, kmat, pk)
    return pk, sk


def minrank_residual(pk: PublicKey, alpha, kmat: Matrix) -> Matrix:
    """Left-hand side minus right-hand side of the key relation (zero iff valid)."""
    ps = pk.params
    mats, m0_right = _expand_public(pk.seed_pk, ps)
    e = gf16.scalar_mat_sum(alpha, mats)
    e_left, e_right = gf16.split_lr(e, ps.r)
    lhs = gf16.mat_add(pk.m0_left, e_left)
    rhs = gf16.mat_mul(gf16.mat_add(m0_right, e_right), kmat)
    return gf16.mat_add(lhs, rhs)


@dataclass(frozen=True)
class PartyShares:
    """One party's additive shares for one round."""

    seed: bytes
    alpha: tuple
    kmat: Matrix
    amat: Matrix
    cmat: Matrix


def _share_rng(seed: bytes, salt: bytes, l: int, i: int) -> keccak.Prng:
    return keccak.Prng(seed, tag=D_SHARE, salt=salt + _u16(l) + _u16(i))


def _expand_regular_shares(ps: ParameterSet, seed: bytes, salt: bytes, l: int, i: int) -> PartyShares:
    rng = _share_rng(seed, salt, l, i)
    alpha = tuple(rng.field_bytes(ps.k))
    kmat = _expand_matrix(rng, ps.r, ps.cols_left)
    amat = _expand_matrix(rng, ps.s, ps.r)
    cmat = _expand_matrix(rng, ps.s, ps.cols_left)
    return PartyShares(seed, alpha, kmat, amat, cmat)


def _expand_last_amat(ps: ParameterSet, seed: bytes, salt: bytes, l: int) -> Matrix:
    rng = _share_rng(seed, salt, l, ps.n_parties - 1)
    return _expand_matrix(rng, ps.s, ps.r)


def _aux_bytes(alpha, kmat: Matrix, cmat: Matrix) -> bytes:
    return bytes(alpha) + kmat.data + cmat.data


def _commitment(salt: bytes, l: int, i: int, seed: bytes, aux: bytes = b"") -> bytes:
    chunks = [salt, _u16(l), _u16(i), seed]
    if aux:
        chunks.append(aux)
    return keccak.hash_digest(D_COMMIT, chunks)


def _xor_alpha(acc, parts):
    # coefficient vectors xor bytewise; entries stay below 16
    v = int.from_bytes(bytes(acc), "little")
    for part in parts:
        v ^= int.from_bytes(bytes(part), "little")
    return tuple(v.to_bytes(len(acc), "little"))


def _build_round(ps: ParameterSet, salt: bytes, l: int, seeds, alpha, kmat):
    """Share (alpha, K, A, C=A*K) among n_parties; the last party carries
    corrections so the shares sum to the true values."""
    last = ps.n_parties - 1
    parties = [_expand_regular_shares(ps, seeds[i], salt, l, i) for i in range(last)]
    amat_last = _expand_last_amat(ps, seeds[last], salt, l)

    alpha_last = _xor_alpha(alpha, (p.alpha for p in parties))
    kmat_last = reduce(gf16.mat_add, (p.kmat for p in parties), kmat)
    amat_total = reduce(gf16.mat_add, (p.amat for p in parties), amat_last)
    cmat_last = reduce(
        gf16.mat_add, (p.cmat for p in parties), gf16.mat_mul(amat_total, kmat)
    )
    parties.append(PartyShares(seeds[last], alpha_last, kmat_last, amat_last, cmat_last))

    coms = [
        _commitment(salt, l, i, parties[i].seed) for i in range(last)
    ]
    coms.append(
        _commitment(salt, l, last, seeds[last], _aux_bytes(alpha_last, kmat_last, cmat_last))
    )
    return parties, coms


def phase3_mpc_round(parties, mats, m0_full: Matrix, r: int, proj: Matrix):
    """Projected rank check for one round over any number of parties.

    Party 0 owns the public constant M_0.  Returns the opened S together with
    each party's (S, V) broadcast; the V shares sum to zero exactly when the
    shared (alpha, K) satisfies the key relation.
    """
    s_shares = []
    pe_lefts = []
    for idx, p in enumerate(parties):
        e = gf16.scalar_mat_sum(p.alpha, mats)
        if idx == 0:
            e = gf16.mat_add(e, m0_full)
        # project once; the column blocks of proj*E are proj*E_left, proj*E_right
        pe_left, pe_right = gf16.split_lr(gf16.mat_mul(proj, e), r)
        pe_lefts.append(pe_left)
        s_shares.append(gf16.mat_add(pe_right, p.amat))
    s_open = reduce(gf16.mat_add, s_shares)
    broadcasts = []
    for p, s_i, pe_left in zip(parties, s_shares, pe_lefts):
        v_i = gf16.mat_add(
            gf16.mat_add(gf16.mat_mul(s_open, p.kmat), pe_left),
            p.cmat,
        )
        broadcasts.append((s_i, v_i))
    return s_open, broadcasts


def _first_challenge(message: bytes, salt: bytes, pk_dig: bytes, coms) -> bytes:
    # commitments are fixed-width digests, one joined chunk suffices
    return keccak.hash_digest(D_CHALLENGE1, [message, salt, pk_dig, b"".join(coms)])


def _projections(h1: bytes, ps: ParameterSet):
    rng = keccak.Prng(h1, tag=D_PROJECTION)
    return [_expand_matrix(rng, ps.s, ps.m_rows) for _ in range(ps.tau)]


def _second_challenge_hash(h1: bytes, broadcasts_per_round) -> bytes:
    chunks = [h1]
    for broadcasts in broadcasts_per_round:
        round_data = b"".join(s_i.data + v_i.data for s_i, v_i in broadcasts)
        chunks.append(gf16.pack_nibbles(round_data))
    return keccak.hash_digest(D_CHALLENGE2, chunks)


def _unopened_parties(h2: bytes, ps: ParameterSet):
    """One party index per round, rejection-sampled to keep the pick unbiased."""
    rng = keccak.Prng(h2, tag=D_SELECT)
    limit = (256 // ps.n_parties) * ps.n_parties
    picks = []
    for _ in range(ps.tau):
        while True:
            b = rng.read(1)[0]
            if b < limit:
                picks.append(b % ps.n_parties)
                break
    return picks


def sign(sk: SecretKey, message: bytes, randomness: bytes) -> Signature:
    """Deterministic signature for (message, randomness)."""
    ps = sk.params
    if len(randomness) < SALT_LEN:
        raise ValueError(f"sign needs {SALT_LEN} bytes of randomness")
    rng = keccak.Prng(bytes(randomness[:SALT_LEN]), tag=D_SIGN_RAND)
    salt = rng.read(SALT_LEN)
    seeds = [[rng.read(SEED_LEN) for _ in range(ps.n_parties)] for _ in range(ps.tau)]

    mats, m0_full = public_matrices(sk.public)

    rounds = []
    coms = []
    for l in range(ps.tau):
        parties, round_coms = _build_round(ps, salt, l, seeds[l], sk.alpha, sk.kmat)
        rounds.append(parties)
        coms.extend(round_coms)

    pk_dig = public_key_digest(sk.public)
    h1 = _first_challenge(message, salt, pk_dig, coms)
    projections = _projections(h1, ps)

    broadcasts_per_round = []
    for l in range(ps.tau):
        s_open, broadcasts = phase3_mpc_round(
            rounds[l], mats, m0_full, ps.r, projections[l]
        )
        v_total = reduce(gf16.mat_add, (v for _, v in broadcasts))
        assert v_total.is_zero(), "honest execution must satisfy the rank check"
        broadcasts_per_round.append(broadcasts)

    h2 = _second_challenge_hash(h1, broadcasts_per_round)
    unopened = _unopened_parties(h2, ps)

    openings = []
    last = ps.n_parties - 1
    for l, i_star in enumerate(unopened):
        opened_seeds = tuple(seeds[l][i] for i in range(ps.n_parties) if i != i_star)
        com_unopened = coms[l * ps.n_parties + i_star]
        s_share = broadcasts_per_round[l][i_star][0]
        if i_star != last:
            p = rounds[l][last]
            aux = (p.alpha, p.kmat, p.cmat)
        else:
            aux = None
        openings.append(RoundOpening(opened_seeds, com_unopened, s_share, aux))

    return Signature(ps, salt, h1, h2, tuple(openings))


def _check_signature_shapes(pk: PublicKey, sig: Signature) -> bool:
    ps = pk.params
    if sig.params != ps:
        return False
    if len(sig.salt) != SALT_LEN or len(sig.h1) != 32 or len(sig.h2) != 32:
        return False
    if len(sig.rounds) != ps.tau:
        return False
    for rnd in sig.rounds:
        if len(rnd.seeds) != ps.n_parties - 1:
            return False
        if any(len(s) != SEED_LEN for s in rnd.seeds):
            return False
        if len(rnd.com_unopened) != 32:
            return False
        if rnd.s_share.shape != (ps.s, ps.r):
            return False
        if rnd.aux is not None:
            alpha, kmat, cmat = rnd.aux
            if len(alpha) != ps.k or any(not 0 <= a < 16 for a in alpha):
                return False
            if kmat.shape != (ps.r, ps.cols_left):
                return False
            if cmat.shape != (ps.s, ps.cols_left):
                return False
    return True


def open(pk: PublicKey, message: bytes, sig: Signature) -> bool:
    """Verify a signature; every failure mode returns False rather than raising."""
    ps = pk.params
    if not _check_signature_shapes(pk, sig):
        return False
    unopened = _unopened_parties(sig.h2, ps)
    last = ps.n_parties - 1

    # aux corrections travel exactly when the last party is opened
    for i_star, rnd in zip(unopened, sig.rounds):
        if (rnd.aux is None) != (i_star == last):
            return False

    mats, m0_full = public_matrices(pk)
    pk_dig = public_key_digest(pk)

    coms = []
    opened_per_round = []
    for l, (i_star, rnd) in enumerate(zip(unopened, sig.rounds)):
        opened = {}
        seeds_iter = iter(rnd.seeds)
        for i in range(ps.n_parties):
            if i == i_star:
                continue
            seed = next(seeds_iter)
            if i != last:
                opened[i] = _expand_regular_shares(ps, seed, sig.salt, l, i)
            else:
                alpha, kmat, cmat = rnd.aux
                amat = _expand_last_amat(ps, seed, sig.salt, l)
                opened[i] = PartyShares(seed, tuple(alpha), kmat, amat, cmat)
        opened_per_round.append(opened)
        for i in range(ps.n_parties):
            if i == i_star:
                coms.append(rnd.com_unopened)
            elif i != last:
                coms.append(_commitment(sig.salt, l, i, opened[i].seed))
            else:
                p = opened[i]
                coms.append(
                    _commitment(sig.salt, l, i, p.seed, _aux_bytes(p.alpha, p.kmat, p.cmat))
                )

    h1 = _first_challenge(message, sig.salt, pk_dig, coms)
    if h1 != sig.h1:
        return False
    projections = _projections(h1, ps)

    broadcasts_per_round = []
    for l, (i_star, rnd) in enumerate(zip(unopened, sig.rounds)):
        opened = opened_per_round[l]
        proj = projections[l]
        s_shares = {}
        pe_lefts = {}
        for i, p in opened.items():
            e = gf16.scalar_mat_sum(p.alpha, mats)
            if i == 0:
                e = gf16.mat_add(e, m0_full)
            pe_left, pe_right = gf16.split_lr(gf16.mat_mul(proj, e), ps.r)
            pe_lefts[i] = pe_left
            s_shares[i] = gf16.mat_add(pe_right, p.amat)
        s_shares[i_star] = rnd.s_share
        s_open = reduce(gf16.mat_add, s_shares.values())

        v_shares = {}
        for i, p in opened.items():
            v_shares[i] = gf16.mat_add(
                gf16.mat_add(gf16.mat_mul(s_open, p.kmat), pe_lefts[i]),
                p.cmat,
            )
        # the unopened party's V share is fixed by requiring the shares to
        # sum to zero; h2 then binds it to the prover's committed value
        v_shares[i_star] = reduce(gf16.mat_add, v_shares.values())
        broadcasts_per_round.append(
            [(s_shares[i], v_shares[i]) for i in range(ps.n_parties)]
        )

    h2 = _second_challenge_hash(h1, broadcasts_per_round)
    return h2 == sig.h2
