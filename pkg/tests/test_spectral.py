"""Spectral-side checks: eigenvalue closed forms, truncated operators,
trace scans, certified tails and residue extraction.

The eigendata claims are verified twice -- closed forms against dense
diagonalization of the assembled sector matrices -- and the trace sums
are verified across three independent routes: the plain sector scan, the
diagonalized 2x2 pairing route, and the cutoff-free lattice evaluators.
Certified tail bounds are checked to actually dominate measured tails.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from suq2.algebra import gens
from suq2.functionals import gns_inner
from suq2.peterweyl import pw_orthobasis
from suq2.scalars import Scalar, big_q
from suq2.spectral import (NonConvergenceError, SpectralGrid, c_ratio,
                           clebsch_minus, clebsch_plus, commutator_growth,
                           dirac_matrix, dirac_sector_matrix,
                           eigen_lattice_sum, jset, lambda_eigen,
                           mult_op_matrix, residue_extract,
                           sector_spectrum_closed, tail_bound,
                           upsilon_cstarc_lattice,
                           upsilon_identity_pairblocks, upsilon_scan,
                           upsilon_value)

A, B, C, D = gens()

Q_GRID = (0.3, 0.5, 0.8)


# ---------------------------------------------------------------------------
# Closed-form eigendata.

def test_lambda_frozen_values():
    # lambda(l=1/2, n=0) = [1]^2 = 1 at every q
    for q in (0.3, 0.5, 0.8, 0.95):
        assert lambda_eigen(1, 0, q) == 1.0
    # sector l=1 interior mode at q=0.5: sqrt(1/4 + q [3/2+1/2][3/2-1/2])
    assert abs(lambda_eigen(2, 1, 0.5) - math.sqrt(1.5)) < 1e-15
    assert abs(lambda_eigen(2, 1, 0.5) - 1.224744871391589) < 1e-12
    # the partner mode n = -1 of the same sector
    assert abs(lambda_eigen(2, -1, 0.5) ** 2 - 5.25) < 1e-12


def test_lambda_edge_modes_exact():
    for l2 in range(0, 9):
        for q in (0.3, 0.5, 0.8):
            assert lambda_eigen(l2, l2 + 1, q) == 0.5 * (l2 + 1)
            assert lambda_eigen(l2, -(l2 + 1), q) == 0.5 * (l2 + 1)


def test_lambda_validation():
    with pytest.raises(ValueError):
        lambda_eigen(-1, 0, 0.5)
    with pytest.raises(ValueError):
        lambda_eigen(2, 4, 0.5)
    with pytest.raises(ValueError):
        lambda_eigen(2, 1, 1.0)
    with pytest.raises(ValueError):
        lambda_eigen(2, 1, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=14), st.data(),
       st.sampled_from((0.2, 0.45, 0.7, 0.9)))
def test_lambda_lower_bound(l2, data, q):
    n = data.draw(st.integers(min_value=-(l2 + 1), max_value=l2 + 1))
    lam = lambda_eigen(l2, n, q)
    # the bracket product is non-negative on the admitted window
    assert lam >= 0.5 * abs(n) - 1e-12


def test_jset_values_and_parity():
    assert list(jset(1)) == [0]
    assert list(jset(2)) == [1]
    assert list(jset(3)) == [0, 2]
    assert list(jset(4)) == [1, 3]
    assert list(jset(5)) == [0, 2, 4]
    for l2 in range(1, 20):
        for n in jset(l2):
            assert (l2 - n) % 2 == 1  # the companion label m is odd
            assert 0 <= n < l2


# ---------------------------------------------------------------------------
# Sector matrices against closed forms.

def test_sector_matrix_symmetric():
    for l2 in range(0, 7):
        m = dirac_sector_matrix(l2, 0.5)
        assert np.array_equal(m, m.T)


@pytest.mark.parametrize("q", Q_GRID)
def test_sector_spectrum_matches_closed(q):
    for l2 in range(0, 7):
        ev = np.linalg.eigvalsh(dirac_sector_matrix(l2, q))
        closed = np.array(sector_spectrum_closed(l2, q))
        assert np.max(np.abs(np.sort(ev) - closed)) < 1e-9


def test_sector_spectrum_spin_one_example():
    # l = 1, q = 0.5: edge -(l + 1/2) twice, pairs +-lambda(1, +-1)
    spec = sector_spectrum_closed(2, 0.5)
    expect = sorted([-1.5, -1.5, math.sqrt(1.5), -math.sqrt(1.5),
                     math.sqrt(5.25), -math.sqrt(5.25)])
    assert np.max(np.abs(np.array(spec) - np.array(expect))) < 1e-12
    assert any(abs(v + 1.5) < 1e-12 for v in spec)
    assert any(abs(v - 1.224745) < 1e-6 for v in spec)


@pytest.mark.parametrize("q", Q_GRID)
def test_eigenvector_component_ratios(q):
    """The closed component ratios solve the assembled eigen-equations.

    Checking M w = (+-lambda) w directly keeps the test meaningful even
    where eigenvalues of different pairings collide (at l2 = 1 the edge
    value -1 coincides with -lambda(l, 0) for every q)."""
    for l2 in range(1, 6):
        mat = dirac_sector_matrix(l2, q)
        for j2 in range(-l2 + 2, l2 + 1, 2):
            up = (j2 + l2) // 2
            down = (l2 + 1) + (j2 - 2 + l2) // 2
            lam = lambda_eigen(l2, j2 - 1, q)
            for sign in (1, -1):
                w = np.zeros(2 * (l2 + 1))
                w[up] = 1.0  # upper slot positive by convention
                w[down] = c_ratio(l2, j2, sign, q)
                resid = mat @ w - sign * lam * w
                assert np.max(np.abs(resid)) < 1e-8 * np.max(np.abs(w))


def test_c_ratio_validation():
    with pytest.raises(ValueError):
        c_ratio(2, 1, 1, 0.5)      # wrong parity column
    with pytest.raises(ValueError):
        c_ratio(2, -2, 1, 0.5)     # unpaired edge column
    with pytest.raises(ValueError):
        c_ratio(2, 2, 0, 0.5)      # sign must be +-1


def test_dirac_matrix_multiplicities():
    grid = SpectralGrid(0.5, 3)
    mat, labels = dirac_matrix(grid)
    assert mat.shape[0] == len(labels) == sum(
        2 * (l2 + 1) * (l2 + 1) for l2 in range(0, 4))
    # the full matrix is block diagonal: eigenvalues are the sector
    # spectra with multiplicity l2 + 1
    ev = np.sort(np.linalg.eigvalsh(mat))
    expect = np.sort(np.concatenate(
        [sector_spectrum_closed(l2, 0.5)
         for l2 in range(0, 4) for _ in range(l2 + 1)]))
    assert np.max(np.abs(ev - expect)) < 1e-9


# ---------------------------------------------------------------------------
# Truncated multiplication operators.

def test_mult_op_unit_is_identity():
    from suq2.algebra import AlgebraElement

    grid = SpectralGrid(0.5, 3)
    mm = mult_op_matrix(AlgebraElement.unit(), grid)
    assert not mm.flagged
    assert np.array_equal(mm.matrix, np.eye(len(mm.labels)))


def test_mult_op_c_matches_ladder_closed_forms():
    """Every unflagged column of the c operator is exactly the two-term
    ladder with the conventional coefficients."""
    q = 0.5
    grid = SpectralGrid(q, 5)
    mm = mult_op_matrix(C, grid)
    pos = {lab: k for k, lab in enumerate(mm.labels)}
    flagged = set(mm.flagged)
    checked = 0
    for (l2, i2, j2), col in pos.items():
        if l2 > 4:
            assert (l2, i2, j2) in flagged
            continue
        assert (l2, i2, j2) not in flagged
        colvec = mm.matrix[:, col]
        support = {mm.labels[r] for r in np.nonzero(np.abs(colvec) > 1e-14)[0]}
        expect = set()
        vp = clebsch_plus(l2, i2, j2, q)
        if abs(vp) > 1e-14:
            expect.add((l2 + 1, i2 + 1, j2 - 1))
            assert abs(mm.entry((l2 + 1, i2 + 1, j2 - 1),
                                (l2, i2, j2)) - vp) < 1e-10
        rm = (l2 - 1, i2 + 1, j2 - 1)
        if rm in pos:
            vm = clebsch_minus(l2, i2, j2, q)
            if abs(vm) > 1e-14:
                expect.add(rm)
                assert abs(mm.entry(rm, (l2, i2, j2)) - vm) < 1e-10
        assert support == expect
        checked += 1
    assert checked == sum((l2 + 1) ** 2 for l2 in range(0, 5))


def test_cstarc_diagonal_matches_eps_display_exactly():
    """The (c* c) diagonal equals q^{2l} (q^{2j} C1 + q^{2i} C2) with the
    epsilon-ratio coefficients, as an exact identity in the coefficient
    field."""
    bigq = big_q()
    one = Scalar.one()

    def eps(t2: int) -> Scalar:
        return bigq * (one - Scalar.q_pow(t2))

    cstar = C.star()
    for block in pw_orthobasis(4).values():
        for v in block:
            l2, i2, j2 = v.l2, v.i2, v.j2
            image = C * v.monic
            lhs = gns_inner(image, image) / v.norm_sq
            c1 = (eps(l2 + i2 + 2) * eps(l2 - j2 + 2)
                  / (eps(2 * l2 + 2) * eps(2 * l2 + 4)))
            rhs = Scalar.q_pow(j2) * c1
            if l2 > 0:
                c2 = (eps(l2 - i2) * eps(l2 + j2)
                      / (eps(2 * l2) * eps(2 * l2 + 2)))
                rhs = rhs + Scalar.q_pow(i2) * c2
            rhs = Scalar.q_pow(l2) * rhs
            assert lhs == rhs
    # and c* itself is the expected multiple of b
    assert cstar == -B.scale(Scalar.q_pow(-1))


# ---------------------------------------------------------------------------
# Trace scans.

def test_scan_closed_i_sums_match_explicit_loops():
    """The O(1) per-(n, l2) scan terms agree with brute-force sums over
    the right index i and the two ladder columns."""
    from suq2.spectral import _scan_terms

    z = 3.3
    for q in Q_GRID:
        qc = q / (1.0 - q * q)

        def eps(t2):
            return qc * (1.0 - q ** t2)

        for omega in ("deltaL2-e11", "cstarc"):
            lmax = 9
            terms = iter(_scan_terms(omega, z, q, lmax))
            for n in range(0, lmax):
                for l2 in range(n + 1, lmax + 1, 2):
                    lam = lambda_eigen(l2, n, q)
                    x = (1.0 + lam * lam) ** (-0.5 * z)
                    if omega == "deltaL2-e11":
                        brute = math.fsum(
                            q ** (-i2) * q ** n * x
                            for i2 in range(-l2, l2 + 1, 2))
                    else:
                        pieces = []
                        for i2 in range(-l2, l2 + 1, 2):
                            for j2 in (n + 1, n - 1):
                                c1 = (eps(l2 + i2 + 2) * eps(l2 - j2 + 2)
                                      / (eps(2 * l2 + 2) * eps(2 * l2 + 4)))
                                c2 = (eps(l2 - i2) * eps(l2 + j2)
                                      / (eps(2 * l2) * eps(2 * l2 + 2)))
                                pieces.append(
                                    q ** (-i2 - n) * x
                                    * (q ** (l2 + n + 1) * c1
                                       + q ** (l2 + i2) * c2))
                        brute = math.fsum(pieces)
                    assert abs(next(terms) - brute) <= 1e-13 * max(1.0, brute)


def test_upsilon_gamma_vanishes_identically():
    for z in (2.5, 3.0, 4.0, 6.0):
        for lmax in (1, 5, 40):
            assert upsilon_value("gamma", z, 0.5, lmax) == 0.0


def test_upsilon_validation():
    with pytest.raises(ValueError):
        upsilon_value("identity", 2.0, 0.5, 10)
    with pytest.raises(ValueError):
        upsilon_value("identity", 4.0, 0.5, 0)
    with pytest.raises(ValueError):
        upsilon_value("nope", 4.0, 0.5, 10)
    with pytest.raises(ValueError):
        eigen_lattice_sum(3.0, 0.5)
    with pytest.raises(ValueError):
        upsilon_cstarc_lattice(2.0, 0.5)


def test_upsilon_identity_monotone():
    vals = [upsilon_value("identity", 4.0, 0.5, lmax)
            for lmax in (5, 10, 20, 40, 80)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    zs = [upsilon_value("identity", z, 0.5, 40) for z in (3.2, 3.6, 4.0, 5.0)]
    assert all(b < a for a, b in zip(zs, zs[1:]))


@pytest.mark.parametrize("q", (0.3, 0.5))
def test_identity_scan_agrees_with_pair_blocks(q):
    direct = upsilon_value("identity", 4.0, q, 40)
    paired = upsilon_identity_pairblocks(4.0, q, 40)
    assert abs(direct - paired) <= 1e-12 * max(1.0, abs(direct))


def test_upsilon_scan_rows():
    rows = upsilon_scan("identity", 0.5, [3.5, 4.0], 30)
    assert [r["z"] for r in rows] == [3.5, 4.0]
    for r in rows:
        assert set(r) == {"omega_tag", "q", "z", "lmax", "partial_sum",
                          "tail_bound"}
        assert r["omega_tag"] == "identity"
        assert r["partial_sum"] > 0.0
        assert 0.0 < r["tail_bound"] < math.inf


# ---------------------------------------------------------------------------
# Certified tails and the cutoff-free evaluators.

@pytest.mark.parametrize("omega", ("identity", "cstarc", "deltaL2-e11"))
def test_tail_bound_dominates_measured_tail(omega):
    q = 0.5
    for z in (3.2, 4.0):
        zz = z + 0.01 if omega == "deltaL2-e11" else z
        lo = upsilon_value(omega, zz, q, 400)
        hi = upsilon_value(omega, zz, q, 1000)
        tb = tail_bound(omega, 400, zz, q)
        assert 0.0 < hi - lo <= tb


def test_tail_bound_abscissas():
    assert tail_bound("gamma", 10, 2.1, 0.5) == 0.0
    assert tail_bound("identity", 10, 2.0, 0.5) == math.inf
    assert tail_bound("deltaL2-e11", 10, 3.0, 0.5) == math.inf
    assert tail_bound("deltaL2-e11", 10, 3.2, 0.5) < math.inf


@pytest.mark.parametrize("q", Q_GRID)
def test_cstarc_lattice_within_certified_window(q):
    for z in (3.05, 4.0):
        lat = upsilon_cstarc_lattice(z, q)
        direct = upsilon_value("cstarc", z, q, 400)
        tb = tail_bound("cstarc", 400, z, q)
        assert 0.0 <= lat - direct <= tb
    # far from the abscissa the cutoff scan is essentially converged
    lat = upsilon_cstarc_lattice(6.0, q)
    direct = upsilon_value("cstarc", 6.0, q, 400)
    assert abs(lat - direct) <= 1e-7 * direct


def test_pole_evaluator_within_certified_window():
    q = 0.5
    pref = 1.0 / (1.0 - q * q)
    for z in (3.5, 4.0):
        lat = pref * eigen_lattice_sum(z, q)
        direct = upsilon_value("deltaL2-e11", z, q, 400)
        tb = tail_bound("deltaL2-e11", 400, z, q)
        assert 0.0 <= lat - direct <= tb


# ---------------------------------------------------------------------------
# Residue extraction.

@pytest.mark.parametrize("q", Q_GRID)
def test_residue_delta_weight_halves_scaled_value(q):
    """The extracted residue sits on R/2 with R = 4(q^{-1}-q)/ln(q^{-1});
    the acceptance suite separately documents the comparison against the
    full R."""
    rep = residue_extract("deltaL2-e11", q)
    r_val = 4.0 * (1.0 / q - q) / math.log(1.0 / q)
    assert rep.method.startswith("pole-resolved")
    assert abs(rep.estimate - 0.5 * r_val) <= 1e-3 * (0.5 * r_val)
    assert abs(rep.estimate - r_val) > 0.4 * r_val  # nowhere near full R
    assert rep.error_bar < 0.05 * rep.estimate


def test_residue_e11_equals_e22():
    r1 = residue_extract("deltaL2-e11", 0.5)
    r2 = residue_extract("deltaL2-e22", 0.5)
    assert r1.estimate == r2.estimate


def test_residue_cstarc_refined_schedule_confirms_holomorphy():
    """With schedule points appended below 0.05 the extrapolant collapses
    toward zero (each refinement gains ~40x), which certifies that the
    weighted trace has no pole at z = 3."""
    rep4 = residue_extract("cstarc", 0.5)
    assert rep4.method.startswith("lattice-resolved")
    assert abs(rep4.estimate) < 2e-3  # schedule-limited extrapolation level
    rep6 = residue_extract(
        "cstarc", 0.5, schedule=(0.4, 0.2, 0.1, 0.05, 0.025, 0.0125))
    assert abs(rep6.estimate) < 1e-5
    assert abs(rep6.estimate) < abs(rep4.estimate) / 50.0


def test_residue_gamma_identically_zero():
    rep = residue_extract("gamma", 0.5)
    assert rep.estimate == 0.0
    assert rep.error_bar == 0.0
    assert rep.method == "identically-zero"


def test_residue_report_json_shape():
    rep = residue_extract("deltaL2-e11", 0.5)
    d = rep.to_json_dict()
    assert list(d) == ["omega", "q", "estimate", "error_bar", "method"]
    assert d["omega"] == "deltaL2-e11"
    assert d["q"] == 0.5


def test_residue_schedule_validation():
    with pytest.raises(ValueError):
        residue_extract("cstarc", 0.5, schedule=(0.4, 0.2))
    with pytest.raises(ValueError):
        residue_extract("cstarc", 0.5, schedule=(0.1, 0.2, 0.4))
    with pytest.raises(ValueError):
        residue_extract("cstarc", 0.5, schedule=(0.4, 0.2, -0.1))


def test_residue_nonconvergence_is_reported():
    with pytest.raises(NonConvergenceError):
        residue_extract("cstarc", 0.5, max_error_bar=1e-9)


# ---------------------------------------------------------------------------
# Commutator growth probe.

def test_commutator_growth_unbounded():
    rows = commutator_growth(0.5, lmax=5)
    norms = [nrm for _, nrm in rows]
    assert len(norms) == 5
    assert all(b > a for a, b in zip(norms, norms[1:]))
    assert norms[-1] > 5.0 * norms[0]
