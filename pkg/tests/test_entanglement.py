import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xxzent.analytic import m0_ring_state
from xxzent.entanglement import (EPS_NEG, Bipartition, negativity, partial_trace, partial_transpose,
                                 pt_field_factorization_check, pt_sign_test, pt_spectrum, pure_negativity,
                                 pure_negativity_from_spectrum, schmidt_coefficients, separability_ball_test,
                                 sf_entropy)
from xxzent.errors import ValidationError
from xxzent.limits import all_global_bipartitions
from xxzent.spectral import decompose, thermal_state, zero_T_limit
from xxzent.spinchain import ChainSpec, magnetization


def random_pure(rng, n, real=False):
    psi = rng.normal(size=1 << n)
    if not real:
        psi = psi + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def random_mixed(rng, n, rank=None):
    d = 1 << n
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_sz_symmetric(rng, n):
    """Random density matrix commuting with S_z."""
    rho = random_mixed(rng, n)
    m = magnetization(np.arange(1 << n), n)
    rho[m[:, None] != m[None, :]] = 0
    return rho / np.trace(rho).real


W3 = np.zeros(8)
W3[[0b011, 0b101, 0b110]] = 1 / math.sqrt(3)


# ---------------------------------------------------------------- labels


def test_parse_and_canonical_label():
    p = Bipartition.parse("bcd-a", 4)
    assert p.label == "a-bcd" and p.part_a == 0b0001 and p.is_global
    assert Bipartition.parse("ac-bd", 4).label == "ac-bd"
    assert Bipartition.parse("a-*", 6).label == "a-bcdef"
    assert Bipartition.parse("a-rest", 3).label == "a-bc"
    r = Bipartition.parse("b-a", 3)
    assert not r.is_global and r.label == "a-b" and r.keep == 0b011
    assert Bipartition(4, 0b1110).label == "a-bcd"


@pytest.mark.parametrize("label,n", [("ac-bd", 3), ("ab-bc", 3), ("aa-b", 3), ("ab", 3), ("a-", 3),
                                     ("a-b-c", 3), ("a-z", 3), ("*-*", 3)])
def test_bad_labels(label, n):
    with pytest.raises(ValidationError):
        Bipartition.parse(label, n)


def test_reduced_split_renumbers_sites():
    p = Bipartition.parse("b-d", 5)
    assert p.reduced().label == "a-b" and p.reduced().n == 2


# ---------------------------------------------------------- partial trace


def test_partial_trace_of_product():
    rng = np.random.default_rng(0)
    ra, rb = random_mixed(rng, 1), random_mixed(rng, 2)
    # site a is bit 0, the least significant, so it is the right Kronecker factor
    rho = np.kron(rb, ra)
    assert np.allclose(partial_trace(rho, 0b001), ra, atol=1e-14)
    assert np.allclose(partial_trace(rho, 0b110), rb, atol=1e-14)
    assert np.trace(partial_trace(rho, 0b010)).real == pytest.approx(1.0)


def test_m0_ring_state_single_site_is_maximally_mixed():
    for delta in (-2.0, 0.0, 0.7, 4.0):
        psi = m0_ring_state(delta).vector()
        assert np.allclose(partial_trace(np.outer(psi, psi), 0b0001), np.eye(2) / 2, atol=1e-14)


def test_partial_trace_rejects_empty_keep():
    with pytest.raises(ValidationError):
        partial_trace(np.eye(4) / 4, 0)


# ------------------------------------------------------ partial transpose


def test_product_state_stays_positive():
    rng = np.random.default_rng(1)
    rho = np.kron(random_mixed(rng, 2), random_mixed(rng, 1))
    assert np.linalg.eigvalsh(partial_transpose(rho, 0b001))[0] > -1e-14


@pytest.mark.parametrize("sign", [1, -1])
def test_bell_state_spectrum(sign):
    psi = np.zeros(4)
    psi[[0b01, 0b10]] = [1 / math.sqrt(2), sign / math.sqrt(2)]
    lam = np.linalg.eigvalsh(partial_transpose(np.outer(psi, psi), 0b01))
    assert np.allclose(lam, [-0.5, 0.5, 0.5, 0.5], atol=1e-14)


def test_partial_transpose_matches_index_definition():
    rng = np.random.default_rng(2)
    rho = random_mixed(rng, 3)
    mask = 0b101
    pt = partial_transpose(rho, mask)
    for i in range(8):
        for j in range(8):
            # swap the A bits of row and column
            i2 = (i & ~mask) | (j & mask)
            j2 = (j & ~mask) | (i & mask)
            assert pt[i, j] == rho[i2, j2]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 32 - 1))
def test_partial_transpose_involution_and_trace(n, seed):
    rng = np.random.default_rng(seed)
    rho = random_mixed(rng, n)
    mask = int(rng.integers(1, (1 << n) - 1))
    pt = partial_transpose(rho, mask)
    assert np.allclose(partial_transpose(pt, mask), rho, atol=0)
    assert np.allclose(pt, pt.conj().T, atol=1e-14)
    assert np.trace(pt).real == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2 ** 32 - 1))
def test_blocked_and_dense_spectra_agree(n, seed):
    rng = np.random.default_rng(seed)
    rho = random_sz_symmetric(rng, n)
    mask = int(rng.integers(1, (1 << n) - 1))
    a = pt_spectrum(rho, mask, "dense")
    b = pt_spectrum(rho, mask, "blocked")
    assert np.allclose(np.sort(a), np.sort(b), atol=1e-12)


def test_auto_method_falls_back_for_asymmetric_state():
    rho = random_mixed(np.random.default_rng(4), 3)
    assert np.allclose(pt_spectrum(rho, 0b001, "auto"), pt_spectrum(rho, 0b001, "dense"))
    with pytest.raises(ValidationError):
        pt_spectrum(rho, 0b001, "svd")


# -------------------------------------------------------------- negativity


def test_w_state_negativities():
    rho = np.outer(W3, W3)
    assert negativity(rho, Bipartition.parse("a-bc", 3)).value == pytest.approx(math.sqrt(2) / 3, abs=1e-12)
    assert negativity(rho, Bipartition.parse("a-b", 3)).value == pytest.approx((math.sqrt(5) - 1) / 6, abs=1e-12)


def test_zero_field_ground_mixture():
    rho = zero_T_limit(decompose(ChainSpec.from_reduced(3, 0.3)))
    assert negativity(rho, Bipartition.parse("a-bc", 3)).value == pytest.approx((math.sqrt(3) - 1) / 3, abs=1e-12)
    assert negativity(rho, Bipartition.parse("a-b", 3)).value == pytest.approx(1 / 6, abs=1e-12)


def test_negative_coupling_mixture_with_field():
    rho = zero_T_limit(decompose(ChainSpec.from_reduced(3, 0.0, 0.3, -1)))
    assert negativity(rho, Bipartition.parse("a-bc", 3)).value == pytest.approx(math.sqrt(2) / 6, abs=1e-12)
    assert negativity(rho, Bipartition.parse("a-b", 3)).value == pytest.approx((math.sqrt(2) - 1) / 6, abs=1e-12)


def test_maximally_mixed_state():
    for n in (2, 4):
        for part in all_global_bipartitions(n):
            rep = negativity(np.eye(1 << n) / (1 << n), part)
            assert rep.value == 0.0 and rep.k == 0


def test_report_fields():
    rep = negativity(np.outer(W3, W3), Bipartition.parse("a-bc", 3), T=0.0)
    assert rep.k == rep.negative_eigenvalue_count == 1
    assert rep.bipartition.label == "a-bc" and rep.metadata == {"T": 0.0}
    with pytest.raises(ValidationError):
        negativity(np.eye(4) / 4, Bipartition.parse("a-bc", 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 32 - 1), st.sampled_from([1, 2, 4, None]))
def test_ppt_bound_and_zero_iff_no_negative_eigenvalue(n, seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_mixed(rng, n, rank)
    for part in all_global_bipartitions(n):
        rep = negativity(rho, part)
        size_a = bin(part.part_a).count("1")
        dm = 2 ** min(size_a, n - size_a)
        assert -1e-15 <= rep.value <= (dm - 1) / 2 + 1e-12
        assert (rep.value > EPS_NEG) == (rep.k > 0) or rep.value < 1e-9


# ---------------------------------------------------------- pure states


def test_pure_negativity_examples():
    prod = np.zeros(8)
    prod[0b010] = 1
    assert pure_negativity(prod, Bipartition.parse("a-bc", 3)) == pytest.approx(0.0, abs=1e-15)
    for dm in (2, 4, 8):
        assert pure_negativity_from_spectrum(np.full(dm, 1 / dm)) == pytest.approx((dm - 1) / 2)
    assert pure_negativity(m0_ring_state(0.4).vector(), Bipartition.parse("a-bcd", 4)) == pytest.approx(0.5)


def test_pure_negativity_rejects_unnormalized():
    with pytest.raises(ValidationError):
        pure_negativity(np.ones(4), Bipartition.parse("a-b", 2))


def test_pure_state_agreement_500_states():
    rng = np.random.default_rng(12345)
    worst = 0.0
    for i in range(500):
        n = 2 + i % 5
        psi = random_pure(rng, n, real=bool(i % 2))
        rho = np.outer(psi, psi.conj())
        for part in all_global_bipartitions(n):
            worst = max(worst, abs(negativity(rho, part).value - pure_negativity(psi, part)))
    assert worst < 1e-9


def test_schmidt_spectrum_is_reduced_spectrum():
    rng = np.random.default_rng(5)
    psi = random_pure(rng, 4)
    lam = schmidt_coefficients(psi, 0b0101)
    red = np.linalg.eigvalsh(partial_trace(np.outer(psi, psi.conj()), 0b0101))
    assert np.allclose(np.sort(lam), red, atol=1e-12)


def _majorizes(p, q):
    return np.all(np.cumsum(np.sort(p)[::-1]) >= np.cumsum(np.sort(q)[::-1]) - 1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 16), st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.95))
def test_majorization_monotonicity(d, seed, mix):
    rng = np.random.default_rng(seed)
    lam_p = rng.dirichlet(np.ones(d))
    # mixing toward uniform gives a spectrum majorized by the original
    lam = (1 - mix) * lam_p + mix / d
    assert _majorizes(lam_p, lam)
    assert pure_negativity_from_spectrum(lam) >= pure_negativity_from_spectrum(lam_p) - 1e-14


@pytest.mark.parametrize("q", [0.25, 0.5, 0.75])
def test_convexity(q):
    rng = np.random.default_rng(int(q * 100))
    for _ in range(30):
        n = int(rng.integers(2, 5))
        r1, r2 = random_mixed(rng, n, 1), random_mixed(rng, n, 2)
        for part in all_global_bipartitions(n):
            lhs = negativity(q * r1 + (1 - q) * r2, part).value
            rhs = q * negativity(r1, part).value + (1 - q) * negativity(r2, part).value
            assert lhs <= rhs + 1e-12


# ------------------------------------------------------------- S_f entropy


def test_sf_entropy_values():
    assert sf_entropy(np.outer(W3, W3)) == pytest.approx(0.0, abs=1e-7)
    s = sf_entropy(np.eye(2) / 2)
    assert s == pytest.approx(math.sqrt(2) - 1)
    assert 0.5 * ((s + 1) ** 2 - 1) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        sf_entropy(np.diag([1.5, -0.5]))


def test_sf_entropy_identity_for_pure_states():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        psi = random_pure(rng, n)
        part = all_global_bipartitions(n)[int(rng.integers(len(all_global_bipartitions(n))))]
        s = sf_entropy(partial_trace(np.outer(psi, psi.conj()), part.part_a))
        assert pure_negativity(psi, part) == pytest.approx(0.5 * ((s + 1) ** 2 - 1), abs=1e-9)


# ------------------------------------------------------- separability ball


def test_ball_examples():
    assert separability_ball_test(np.eye(8) / 8)
    rng = np.random.default_rng(7)
    for n in (2, 3, 4):
        psi = random_pure(rng, n)
        assert not separability_ball_test(np.outer(psi, psi.conj()))


def test_ball_implies_no_negativity():
    rng = np.random.default_rng(8)
    inside = 0
    for _ in range(200):
        n = int(rng.integers(2, 5))
        d = 1 << n
        x = random_mixed(rng, n)
        q = rng.uniform(0, 1)
        rho = (1 - q) * np.eye(d) / d + q * x
        if separability_ball_test(rho):
            inside += 1
            assert all(negativity(rho, p).value < EPS_NEG for p in all_global_bipartitions(n))
    assert inside > 20


# --------------------------------------------------- field factorization


def test_factorization_trivial_at_zero_field():
    assert pt_field_factorization_check(ChainSpec.from_reduced(3, 0.4), Bipartition(3, 1), 1.0) == 0.0


@pytest.mark.parametrize("n,mask,b", [(3, 0b001, 0.7), (4, 0b0101, 0.7), (5, 0b00110, 1.9)])
def test_factorization(n, mask, b):
    spec = ChainSpec(n, v_x=1.0, v_z=-0.4, b=b)
    assert pt_field_factorization_check(spec, Bipartition(n, mask), 1.0) < 1e-9


def test_field_does_not_change_sign_pattern():
    rng = np.random.default_rng(9)
    for _ in range(30):
        n = int(rng.integers(3, 6))
        delta, t = rng.uniform(-3, 2), rng.uniform(0.05, 2)
        for part in all_global_bipartitions(n):
            pattern = {pt_sign_test(thermal_state(decompose(ChainSpec.from_reduced(n, delta, bb)), t),
                                    part, bb / t)
                       for bb in (0.0, 0.5, 2.0)}
            assert len(pattern) == 1


def test_plain_count_never_exceeds_frame_count():
    # the field can push some negative eigenvalues of the plain transpose
    # below eps_neg, but it cannot create new ones
    for n, delta, t in [(3, -1.0, 0.5), (4, 0.2, 0.3), (5, -0.5, 0.4), (4, 1.5, 0.2)]:
        for part in all_global_bipartitions(n):
            for bb in (0.0, 0.5, 2.0):
                rho = thermal_state(decompose(ChainSpec.from_reduced(n, delta, bb)), t)
                frame_k = pt_sign_test(rho, part, bb / t)[1]
                assert negativity(rho, part).k <= frame_k
                if bb == 0.0:
                    assert negativity(rho, part).k == frame_k


def test_sign_test_on_reduced_split():
    pair = Bipartition.parse("a-b", 3)
    assert pt_sign_test(np.eye(8) / 8, pair) == (False, 0)
    rho = thermal_state(decompose(ChainSpec.from_reduced(3, -1.0)), 0.5)
    rep = negativity(rho, pair)
    assert pt_sign_test(rho, pair) == (rep.value > EPS_NEG, rep.k)
    # strong field at low t: entangled, but the plain negativity is below eps
    spec = ChainSpec.from_reduced(3, 0.8733948227989785, 1.4324712101372783)
    t = 0.08975553878928685
    rho = thermal_state(decompose(spec), t)
    assert negativity(rho, pair).value < EPS_NEG
    assert pt_sign_test(rho, pair, spec.b / t)[0]
