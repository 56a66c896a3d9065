import pytest

from lcsreduce.fixtures import (coisotropic_slice, conformal_darboux, darboux_chart, darboux_form,
                                darboux_hypersurface, lcs_fixtures, non_involutive_form)
from lcsreduce.forms import Chart, DifferentialForm, VectorField, interior_product
from lcsreduce.geometry import (DistributionFrame, Embedding, NotImmersed, RankNotConstant,
                                characteristic_distribution, frames_span_equal,
                                involutivity_check, kernel_frame, restrict)
from lcsreduce.symbolic import ZERO, as_expr, parse, parse_form, var

M6 = darboux_chart(3)


def test_restrict_darboux_hypersurface():
    iota = Embedding.slice(M6, {"x1": as_expr(0)})
    assert restrict(iota, darboux_form(M6)) == parse_form("dx2^dy2 + dx3^dy3", iota.source)


def test_restrict_identity():
    Om = conformal_darboux(M6, "x1*y2")
    assert restrict(Embedding.identity(M6), Om) == Om


def test_lagrangian_slice_pulls_back_to_zero():
    iota = Embedding.slice(M6, {y: as_expr(0) for y in ("y1", "y2", "y3")})
    assert restrict(iota, darboux_form(M6)).is_zero_literal()


def test_darboux_hypersurface_frame():
    fx = darboux_hypersurface("y1")
    frame = characteristic_distribution(fx.embedding, fx.Omega)
    assert frame.rank == 1
    assert frame.fields[0] == VectorField.coordinate(fx.embedding.source, "y1")


def test_full_rank_gives_empty_frame():
    frame = characteristic_distribution(Embedding.identity(M6), darboux_form(M6))
    assert frame.rank == 0 and frame.fields == []


def test_coisotropic_codim_two():
    fx = coisotropic_slice(3, 2)
    frame = characteristic_distribution(fx.embedding, fx.Omega)
    Q = fx.embedding.source
    assert frame.rank == 2
    expected = DistributionFrame(Q, [VectorField.coordinate(Q, "y1"),
                                     VectorField.coordinate(Q, "y2")], 2)
    assert frames_span_equal(frame, expected)
    assert involutivity_check(frame, restrict(fx.embedding, fx.Omega)).involutive


@pytest.mark.parametrize("fx", lcs_fixtures(), ids=lambda f: f.name)
def test_fixture_frames(fx):
    frame = characteristic_distribution(fx.embedding, fx.Omega)
    pulled = restrict(fx.embedding, fx.Omega)
    assert frame.rank == fx.rank
    assert frame.check_independent()
    for X in frame.fields:
        assert interior_product(X, pulled).is_zero()
    assert involutivity_check(frame, pulled).involutive


@pytest.mark.parametrize("fx", lcs_fixtures(), ids=lambda f: f.name)
def test_frame_independent_of_coordinate_order(fx):
    """Reordering the chart coordinates yields a frame with the same span."""
    Q = fx.embedding.source
    perm = Chart(tuple(reversed(Q.coords)), Q.periodic, "Qrev")
    pulled = restrict(fx.embedding, fx.Omega)
    moved = DifferentialForm(perm, 2, {tuple(perm.index(n) for n in pulled.names(k)): c
                                       for k, c in pulled.terms.items()})
    frame = kernel_frame(pulled)
    other = kernel_frame(moved)
    back = DistributionFrame(Q, [VectorField(Q, {n: X[n] for n in perm.coords})
                                 for X in other.fields], other.rank)
    assert frames_span_equal(frame, back)


def test_non_involutive_report():
    R4, w = non_involutive_form()
    frame = kernel_frame(w)
    report = involutivity_check(frame, w)
    assert frame.rank == 2
    assert not report.involutive
    assert report.failures()
    assert report.to_dict()["involutive"] is False


def test_rank_not_constant():
    """x^20 falls below the numeric rank tolerance near x = 0 only."""
    R4 = Chart(("x", "y", "z", "w"))
    w = parse_form("x^20*dx^dy + dz^dw", R4)
    with pytest.raises(RankNotConstant) as err:
        kernel_frame(w)
    assert sorted(err.value.ranks) == [2, 4]
    assert all("x" in p for p in err.value.points)


def test_hidden_zero_coefficient():
    R4 = Chart(("x", "y", "z", "w"))
    x = var("x")
    w = DifferentialForm(R4, 2, {(0, 1): (x + 1) / (x + 1) - 1, (2, 3): 1})
    assert kernel_frame(w).rank == 2


def test_not_immersed():
    R2 = Chart(("s", "u"))
    iota = Embedding.from_components(R2, M6, [parse("s", R2), parse("s", R2), ZERO, ZERO,
                                              ZERO, ZERO])
    with pytest.raises(NotImmersed):
        iota.check_immersion()


def test_frame_rank_mismatch_rejected():
    Q = Chart(("a", "b"))
    with pytest.raises(ValueError):
        DistributionFrame(Q, [VectorField.coordinate(Q, "a")], 2)
