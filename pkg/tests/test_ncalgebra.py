import pytest
import sympy

import config
from qalgebra.errors import DomainError, RewriteLimitError
from qalgebra.ncalgebra import (
    MatrixRep,
    NCPoly,
    RewriteSystem,
    commutator,
    confluence_fuzz,
    matrix_algebra_check,
    normal_order,
    parse_word,
    plane_operators,
    poly_distance,
    random_words,
    scan_conventions,
    substitute,
    verify_identity,
    weyl_normal_form,
)
from qalgebra.qcore import exact_expi
from verifiers.ncalgebra_verifier import NCAlgebraVerifier

q = sympy.Symbol("q")


@pytest.fixture(scope="module")
def plane():
    R = RewriteSystem(q, dims=2)
    return R, plane_operators(R)


def test_parse_word():
    assert parse_word("dx x y") == (3, 0, 1)
    with pytest.raises(DomainError):
        parse_word("dw")


def test_rewrite_system_validation():
    with pytest.raises(DomainError):
        RewriteSystem(0.5, dims=4)
    with pytest.raises(DomainError):
        RewriteSystem(0, dims=3)


def test_plane_system_rejects_z():
    with pytest.raises(DomainError):
        normal_order(NCPoly.word("dz z"), RewriteSystem(q, dims=2))


def test_derivative_coordinate_rule():
    R = RewriteSystem(q, dims=2)
    out = normal_order(NCPoly.word("dx x"), R)
    expected = {(): 1, (0, 3): q ** 2, (1, 4): q ** 2 - 1}
    assert set(out.terms) == set(expected)
    for w, c in expected.items():
        assert sympy.expand(out.terms[w] - c) == 0


def test_coordinates_q_commute():
    R = RewriteSystem(q, dims=3)
    res = verify_identity(NCPoly.word("x y"), NCPoly.word("y x") * q, R)
    assert not res.terms


def test_exchange_relations(plane):
    R, ops = plane
    px, py, x, y = ops["px"], ops["py"], ops["x"], ops["y"]
    assert not verify_identity(px * y, y * px * q, R).terms
    assert not verify_identity(py * x, x * py * q, R).terms
    assert not verify_identity(py * px, px * py * q, R).terms
    assert not verify_identity(py * y, NCPoly.scalar(-sympy.I * q) + y * py * q ** 2, R).terms


def test_px_x_needs_cubic_coefficient(plane):
    R, ops = plane
    px, py, x, y = ops["px"], ops["py"], ops["x"], ops["y"]
    base = NCPoly.scalar(-sympy.I * q ** 2) + x * px * q ** 2
    printed = verify_identity(px * x, base + y * py * (q * (q - 1)), R)
    assert printed.terms
    corrected = verify_identity(px * x, base + y * py * (q * (q ** 2 - 1)), R)
    assert not corrected.terms


def test_first_deformed_relation(plane):
    R, ops = plane
    px, py = ops["px"], ops["py"]
    assert not verify_identity(commutator(px, py, R), px * py * (1 - q), R).terms


def test_euclidean_relations_at_q_one():
    R = RewriteSystem(1.0, dims=2)
    ops = plane_operators(R)
    Px, Py, Rot = ops["Px"], ops["Py"], ops["R"]
    assert not verify_identity(commutator(Rot, Px, R), Py, R).terms
    assert not verify_identity(commutator(Rot, Py, R), -Px, R).terms
    assert not commutator(Px, Py, R).terms


def test_substitute_symbolic_coefficients():
    p = NCPoly.word("x", q ** 2 - 1)
    assert not substitute(p, q, 1).terms
    assert substitute(p, q, 2).terms[(0,)] == 3


def test_weyl_normal_form():
    out = weyl_normal_form(parse_word("dx x"), dims=3)
    assert out.terms == {(): 1, (0, 3): 1}


def test_normal_form_matches_weyl_collection_at_q_one():
    R = RewriteSystem(1.0, dims=3)
    word = parse_word("dx dy x y dx x")
    left = normal_order(NCPoly({word: 1}), R)
    assert poly_distance(left, weyl_normal_form(word, 3)) < 1e-12


def test_confluence_deformed():
    report = confluence_fuzz(RewriteSystem(exact_expi(0.7), dims=3), trials=100, max_degree=5, seed=3)
    assert report["divergences"] == []
    assert not report["weyl_checked"]


def test_confluence_classical():
    report = confluence_fuzz(RewriteSystem(1.0, dims=3), trials=100, max_degree=5, seed=3)
    assert report["divergences"] == []
    assert report["weyl_checked"]
    assert report["weyl_mismatches"] == []


def test_rewrite_budget():
    R = RewriteSystem(0.5, dims=3, max_rewrites=2)
    with pytest.raises(RewriteLimitError):
        normal_order(NCPoly.word("dx x dx x dx x"), R)


def test_matrix_convention_satisfies_lie_relations():
    out = matrix_algebra_check(MatrixRep(1, 1, 1))
    assert out["lie_all"]
    assert all(out["squares"].values())
    assert set(out["q_relations"]) == {
        "[R_y,P]_q = (1+q)R_y",
        "[V,P]_q = -(1+q)V",
        "[R_y,V]_q = 2((1-q)1-(1+q)P)",
    }


def test_rewrite_budget_applies_per_normalization():
    R = RewriteSystem(0.5, dims=3, max_rewrites=6)
    for text in ("dx x", "dy y", "dz z", "y x", "z y", "z x", "dy dx"):
        normal_order(NCPoly.word(text), R)
        assert R.last_rewrites <= 6
    assert R.rewrites >= 7


def test_normal_order_is_linear():
    R = RewriteSystem(0.5, dims=3)
    P = NCPoly.word("dx x dy y")
    S = NCPoly.word("dy x dx z")
    a, b = 2.0 - 1.0j, -0.75
    combined = normal_order(P * a + S * b, R)
    separate = normal_order(P, R) * a + normal_order(S, R) * b
    assert poly_distance(combined, separate) < 1e-12


def test_terminates_on_degree_ten_words():
    R = RewriteSystem(exact_expi(0.7), dims=3)
    for word in random_words(R, 20, 10, seed=5):
        out = normal_order(NCPoly({word: 1}), R)
        assert R.last_rewrites <= R.max_rewrites
        assert all(R.is_normal(w) for w in out.terms)


def test_deformed_e2_lines_two_and_three_leave_residuals():
    verifier = NCAlgebraVerifier(trials=10, max_degree=3)
    verifier.check_euclidean()
    verdicts = {e.claim_id: e.verdict for e in verifier.recorder.entries}
    assert verdicts["Eq.35-line1"] == "confirmed"
    assert verdicts["Eq.35-line2"] == "mismatch"
    assert verdicts["Eq.35-line3"] == "mismatch"
    assert verdicts["Eq.35-to-34"] == "confirmed"
    assert verdicts["Eq.36"] == "confirmed"
    assert verifier.residuals["Eq.35-line1"] == "0"
    assert verifier.residuals["Eq.35-line2"] != "0"
    assert verifier.residuals["Eq.35-line3"] != "0"


def test_matrix_q_commutators_flip_sign():
    relations = matrix_algebra_check(MatrixRep(1, 1, 1))["q_relations"]
    assert relations["[R_y,P]_q = (1+q)R_y"]["signs"] == (-1,)
    assert relations["[V,P]_q = -(1+q)V"]["signs"] == (-1,)
    assert relations["[R_y,V]_q = 2((1-q)1-(1+q)P)"]["signs"] == (1, -1)
    assert {r["verdict"] for r in relations.values()} == {"sign-flip"}


def test_no_lie_convention_confirms_the_q_commutators():
    lie_conventions = [c for c in scan_conventions() if c["lie_all"]]
    assert len(lie_conventions) == 4
    for c in lie_conventions:
        assert {r["verdict"] for r in c["q_relations"].values()} == {"sign-flip"}, c["convention"]


def test_confluence_entry_at_configured_scale():
    verifier = NCAlgebraVerifier()
    verifier.check_confluence()
    entry = next(e for e in verifier.recorder.entries if e.claim_id == "confluence")
    assert entry.verdict == "confirmed"
    assert verifier.fuzz["deformed"]["trials"] == config.FUZZ_TRIALS
    assert verifier.fuzz["deformed"]["max_degree"] == 6
