import dataclasses
import random
from functools import reduce

import pytest

from mrwb import gf16, mpcith
from mrwb.gf16 import Matrix
from mrwb.mpcith import PRESETS, ParameterSet

DESK = PRESETS["desk"]
IA = PRESETS["ia-like"]


def rand_bytes(rng, n):
    return bytes(rng.randrange(256) for _ in range(n))


# ----------------------------------------------------------- parameters

def test_parameter_validation():
    with pytest.raises(ValueError):
        ParameterSet(q=8)
    with pytest.raises(ValueError):
        ParameterSet(r=15)  # right block would swallow every column
    with pytest.raises(ValueError):
        ParameterSet(r=0)
    with pytest.raises(ValueError):
        ParameterSet(n_parties=1)
    with pytest.raises(ValueError):
        ParameterSet(n_parties=257)  # challenge bytes could never select it
    with pytest.raises(ValueError):
        ParameterSet(tau=0)
    ps = ParameterSet()
    assert ps.s == ps.r and ps.cols_left == ps.n_cols - ps.r
    assert IA.k == 78 and IA.n_parties == 16 and IA.tau == 39


# --------------------------------------------------------------- keygen

def test_keygen_solves_the_low_rank_relation():
    rng = random.Random(11)
    for ps in (DESK, IA):
        for _ in range(5):
            pk, sk = mpcith.keygen(ps, rand_bytes(rng, 32))
            assert mpcith.minrank_residual(pk, sk.alpha, sk.kmat).is_zero()
            assert len(sk.alpha) == ps.k
            assert sk.kmat.shape == (ps.r, ps.cols_left)
            assert pk.m0_left.shape == (ps.m_rows, ps.cols_left)


def test_keygen_is_deterministic():
    seed = bytes(range(32))
    pk1, sk1 = mpcith.keygen(DESK, seed)
    pk2, sk2 = mpcith.keygen(DESK, seed)
    assert pk1 == pk2 and sk1 == sk2
    pk3, _ = mpcith.keygen(DESK, bytes(32))
    assert pk3 != pk1
    with pytest.raises(ValueError):
        mpcith.keygen(DESK, b"short")


def test_random_guess_leaves_a_residual():
    rng = random.Random(12)
    pk, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    for _ in range(10):
        alpha = [rng.randrange(16) for _ in range(DESK.k)]
        kmat = Matrix(
            DESK.r,
            DESK.cols_left,
            bytes(rng.randrange(16) for _ in range(DESK.r * DESK.cols_left)),
        )
        assert not mpcith.minrank_residual(pk, alpha, kmat).is_zero()


def test_public_matrices_shapes_and_caching():
    pk, _ = mpcith.keygen(DESK, bytes(range(32)))
    mats1, m0_full1 = mpcith.public_matrices(pk)
    mats2, m0_full2 = mpcith.public_matrices(pk)
    assert mats1 is mats2 and m0_full1 is m0_full2
    assert len(mats1) == DESK.k
    assert all(m.shape == (DESK.m_rows, DESK.n_cols) for m in mats1)
    assert m0_full1.shape == (DESK.m_rows, DESK.n_cols)
    left, _ = gf16.split_lr(m0_full1, DESK.r)
    assert left == pk.m0_left


# --------------------------------------------------------------- shares

def test_round_shares_reconstruct_the_witness():
    rng = random.Random(13)
    _, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    salt = rand_bytes(rng, mpcith.SALT_LEN)
    seeds = [rand_bytes(rng, mpcith.SEED_LEN) for _ in range(DESK.n_parties)]
    parties, coms = mpcith._build_round(DESK, salt, 0, seeds, sk.alpha, sk.kmat)
    assert len(parties) == DESK.n_parties and len(coms) == DESK.n_parties

    alpha_sum = reduce(
        lambda a, b: tuple(x ^ y for x, y in zip(a, b)), (p.alpha for p in parties)
    )
    assert alpha_sum == tuple(sk.alpha)
    assert reduce(gf16.mat_add, (p.kmat for p in parties)) == sk.kmat
    amat_total = reduce(gf16.mat_add, (p.amat for p in parties))
    cmat_total = reduce(gf16.mat_add, (p.cmat for p in parties))
    assert cmat_total == gf16.mat_mul(amat_total, sk.kmat)


def test_mpc_round_broadcasts_sum_to_zero_only_for_witnesses():
    rng = random.Random(14)
    pk, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    mats, m0_full = mpcith.public_matrices(pk)
    salt = rand_bytes(rng, mpcith.SALT_LEN)
    proj = Matrix(
        DESK.s, DESK.m_rows, bytes(rng.randrange(16) for _ in range(DESK.s * DESK.m_rows))
    )
    seeds = [rand_bytes(rng, mpcith.SEED_LEN) for _ in range(DESK.n_parties)]

    parties, _ = mpcith._build_round(DESK, salt, 0, seeds, sk.alpha, sk.kmat)
    s_open, broadcasts = mpcith.phase3_mpc_round(parties, mats, m0_full, DESK.r, proj)
    v_total = reduce(gf16.mat_add, (v for _, v in broadcasts))
    assert v_total.is_zero()
    assert s_open.shape == (DESK.s, DESK.r)
    assert len(broadcasts) == DESK.n_parties

    # a random non-witness fails the projected check (w.h.p.)
    bad_alpha = tuple(rng.randrange(16) for _ in range(DESK.k))
    bad_k = Matrix(
        DESK.r,
        DESK.cols_left,
        bytes(rng.randrange(16) for _ in range(DESK.r * DESK.cols_left)),
    )
    parties, _ = mpcith._build_round(DESK, salt, 1, seeds, bad_alpha, bad_k)
    _, broadcasts = mpcith.phase3_mpc_round(parties, mats, m0_full, DESK.r, proj)
    v_total = reduce(gf16.mat_add, (v for _, v in broadcasts))
    assert not v_total.is_zero()


def test_mpc_round_with_one_party_is_the_plain_computation():
    # sharing among a single party is the identity: its broadcasts must
    # match the unshared formulas evaluated on the witness directly
    rng = random.Random(15)
    pk, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    mats, m0_full = mpcith.public_matrices(pk)
    proj = Matrix(
        DESK.s, DESK.m_rows, bytes(rng.randrange(16) for _ in range(DESK.s * DESK.m_rows))
    )
    amat = Matrix(DESK.s, DESK.r, bytes(rng.randrange(16) for _ in range(DESK.s * DESK.r)))
    sole = mpcith.PartyShares(
        seed=b"\x00" * mpcith.SEED_LEN,
        alpha=tuple(sk.alpha),
        kmat=sk.kmat,
        amat=amat,
        cmat=gf16.mat_mul(amat, sk.kmat),
    )

    s_open, broadcasts = mpcith.phase3_mpc_round([sole], mats, m0_full, DESK.r, proj)
    assert len(broadcasts) == 1

    e = gf16.mat_add(gf16.scalar_mat_sum(sk.alpha, mats), m0_full)
    pe_left, pe_right = gf16.split_lr(gf16.mat_mul(proj, e), DESK.r)
    s_plain = gf16.mat_add(pe_right, amat)
    v_plain = gf16.mat_add(gf16.mat_add(gf16.mat_mul(s_plain, sk.kmat), pe_left), sole.cmat)

    assert s_open == s_plain
    assert broadcasts[0] == (s_plain, v_plain)
    assert v_plain.is_zero()


def test_challenge_expansion_ranges():
    h2 = bytes(range(32))
    for ps in (DESK, IA):
        stars = mpcith._unopened_parties(h2, ps)
        assert len(stars) == ps.tau
        assert all(0 <= i < ps.n_parties for i in stars)
        assert stars == mpcith._unopened_parties(h2, ps)


# ------------------------------------------------------------ sign/open

def test_sign_open_round_trip_both_presets():
    rng = random.Random(15)
    for ps in (DESK, IA):
        pk, sk = mpcith.keygen(ps, rand_bytes(rng, 32))
        message = b"round trip at " + repr(ps).encode()
        sig = mpcith.sign(sk, message, rand_bytes(rng, 32))
        assert sig.params == ps
        assert len(sig.rounds) == ps.tau
        assert mpcith.open(pk, message, sig)


def test_sign_is_deterministic_in_message_and_randomness():
    pk, sk = mpcith.keygen(DESK, bytes(range(32)))
    r1, r2 = b"\x01" * 32, b"\x02" * 32
    sig_a = mpcith.sign(sk, b"m", r1)
    assert mpcith.sign(sk, b"m", r1) == sig_a
    assert mpcith.sign(sk, b"m", r2) != sig_a
    assert mpcith.sign(sk, b"n", r1) != sig_a
    with pytest.raises(ValueError):
        mpcith.sign(sk, b"m", b"short")


def test_open_rejects_wrong_message_and_wrong_key():
    rng = random.Random(16)
    pk, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    other_pk, _ = mpcith.keygen(DESK, rand_bytes(rng, 32))
    sig = mpcith.sign(sk, b"payload", rand_bytes(rng, 32))
    assert mpcith.open(pk, b"payload", sig)
    assert not mpcith.open(pk, b"payloae", sig)
    assert not mpcith.open(other_pk, b"payload", sig)


def test_open_rejects_tampered_transcript_fields():
    rng = random.Random(17)
    pk, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    sig = mpcith.sign(sk, b"msg", rand_bytes(rng, 32))

    def flip(data, pos=0):
        out = bytearray(data)
        out[pos] ^= 1
        return bytes(out)

    for field in ("salt", "h1", "h2"):
        bad = dataclasses.replace(sig, **{field: flip(getattr(sig, field))})
        assert not mpcith.open(pk, b"msg", bad)

    rounds = list(sig.rounds)
    r0 = rounds[0]
    rounds[0] = dataclasses.replace(r0, com_unopened=flip(r0.com_unopened))
    assert not mpcith.open(pk, b"msg", dataclasses.replace(sig, rounds=tuple(rounds)))

    rounds[0] = dataclasses.replace(r0, seeds=(flip(r0.seeds[0]),) + r0.seeds[1:])
    assert not mpcith.open(pk, b"msg", dataclasses.replace(sig, rounds=tuple(rounds)))

    bad_share = gf16.mat_add(
        r0.s_share, Matrix(DESK.s, DESK.r, b"\x01" + bytes(DESK.s * DESK.r - 1))
    )
    rounds[0] = dataclasses.replace(r0, s_share=bad_share)
    assert not mpcith.open(pk, b"msg", dataclasses.replace(sig, rounds=tuple(rounds)))


def test_open_rejects_structural_mismatches_without_raising():
    rng = random.Random(18)
    pk, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    sig = mpcith.sign(sk, b"msg", rand_bytes(rng, 32))

    # too few rounds
    assert not mpcith.open(pk, b"msg", dataclasses.replace(sig, rounds=sig.rounds[:-1]))
    # wrong share shape
    r0 = sig.rounds[0]
    rounds = (dataclasses.replace(r0, s_share=Matrix.zeros(1, 1)),) + sig.rounds[1:]
    assert not mpcith.open(pk, b"msg", dataclasses.replace(sig, rounds=rounds))
    # aux present when it must be absent, and vice versa
    flipped = []
    for i_star, rnd in zip(mpcith._unopened_parties(sig.h2, DESK), sig.rounds):
        if rnd.aux is None:
            fake = (tuple([0] * DESK.k), Matrix.zeros(DESK.r, DESK.cols_left),
                    Matrix.zeros(DESK.s, DESK.cols_left))
            flipped.append(dataclasses.replace(rnd, aux=fake))
        else:
            flipped.append(dataclasses.replace(rnd, aux=None))
    assert not mpcith.open(pk, b"msg", dataclasses.replace(sig, rounds=tuple(flipped)))


def test_signature_binds_to_its_parameters():
    rng = random.Random(19)
    pk, sk = mpcith.keygen(DESK, rand_bytes(rng, 32))
    sig = mpcith.sign(sk, b"msg", rand_bytes(rng, 32))
    narrow = ParameterSet(tau=4)
    pk_n, sk_n = mpcith.keygen(narrow, rand_bytes(rng, 32))
    sig_n = mpcith.sign(sk_n, b"msg", rand_bytes(rng, 32))
    assert not mpcith.open(pk, b"msg", sig_n)
    assert not mpcith.open(pk_n, b"msg", sig)


def test_degenerate_two_party_setup_works():
    ps = ParameterSet(n_parties=2, tau=3)
    rng = random.Random(20)
    pk, sk = mpcith.keygen(ps, rand_bytes(rng, 32))
    sig = mpcith.sign(sk, b"tiny", rand_bytes(rng, 32))
    assert mpcith.open(pk, b"tiny", sig)
