import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcsreduce.forms import (Chart, ChartMismatch, ChartTooLarge, DifferentialForm, SmoothMap,
                             VectorField, coefficient_matrix, d, evaluate_form,
                             exterior_derivative, form_from_matrix, interior_product,
                             lie_bracket, lie_derivative, pullback, sort_sign, wedge)
from lcsreduce.fixtures import darboux_chart, darboux_form
from lcsreduce.symbolic import ZERO, exp, parse, parse_form, var
from oracles import lie_derivative_generators
from strategies import charts, fields, forms, maps

R2 = Chart(("x", "y"))
R3 = Chart(("x", "y", "z"))
dx, dy = DifferentialForm.basis(R2, "x"), DifferentialForm.basis(R2, "y")
X, Y = var("x"), var("y")


def vf(chart, **comps):
    return VectorField(chart, {k: parse(v, chart) for k, v in comps.items()})


def zero(form, plan=None):
    return form.is_zero(plan)


class TestChart:
    def test_validation(self):
        with pytest.raises(ValueError):
            Chart(("x", "x"))
        with pytest.raises(ValueError):
            Chart(())
        with pytest.raises(ValueError):
            Chart(("x",), frozenset({"y"}))
        with pytest.raises(ChartTooLarge):
            Chart(tuple(f"u{i}" for i in range(11)))

    def test_sort_sign(self):
        assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
        assert sort_sign((1, 0)) == (-1, (0, 1))
        assert sort_sign((1, 1))[0] == 0

    def test_undeclared_coefficient(self):
        with pytest.raises(ValueError):
            DifferentialForm(R2, 1, {(0,): var("q")})


class TestWedge:
    def test_examples(self):
        assert (dx ^ dx).is_zero_literal()
        assert (dx ^ dy) == -(dy ^ dx)
        assert wedge(dy * X, dx * Y) == (dx ^ dy) * (-X * Y)

    def test_overflow_degree(self):
        assert wedge(dx ^ dy, dx).is_zero_literal()

    def test_chart_mismatch(self):
        with pytest.raises(ChartMismatch):
            wedge(dx, DifferentialForm.basis(R3, "x"))

    @given(st.data())
    def test_graded_commutative(self, data):
        c = data.draw(charts(max_dim=5))
        a, b = data.draw(forms(c)), data.draw(forms(c))
        assert zero(wedge(a, b) - wedge(b, a) * (-1) ** (a.degree * b.degree))

    @given(st.data())
    def test_associative(self, data):
        c = data.draw(charts(max_dim=5))
        a, b, e = data.draw(forms(c)), data.draw(forms(c)), data.draw(forms(c))
        assert zero(wedge(wedge(a, b), e) - wedge(a, wedge(b, e)))


class TestExteriorDerivative:
    def test_examples(self):
        assert d(dy * X) == dx ^ dy
        f = parse("x^2*y + sin(y)", R2)
        df = d(DifferentialForm.function(R2, f))
        assert df == dx * (2 * X * Y) + dy * (X ** 2 + parse("cos(y)", R2))
        P = Chart(("th", "r"), frozenset({"th"}))
        assert d(parse_form("sin(th)*dth", P)).is_zero_literal()

    @given(st.data())
    def test_d_squared(self, data):
        c = data.draw(charts())
        a = data.draw(forms(c))
        assert zero(d(d(a)))

    @given(st.data())
    def test_graded_leibniz(self, data):
        c = data.draw(charts(max_dim=5))
        a, b = data.draw(forms(c)), data.draw(forms(c))
        rhs = (d(a) ^ b) + (a ^ d(b)) * (-1) ** a.degree
        assert zero(d(a ^ b) - rhs)


class TestInterior:
    def test_examples(self):
        assert interior_product(vf(R2, x="1"), dx ^ dy) == dy
        assert interior_product(vf(R2, y="1"), dx).is_zero_literal()
        assert interior_product(vf(R2, x="y"), (dx ^ dy) * X) == dy * (X * Y)

    def test_degree_zero_rejected(self):
        with pytest.raises(ValueError):
            interior_product(vf(R2, x="1"), DifferentialForm.function(R2, X))

    @given(st.data())
    def test_anticommute(self, data):
        c = data.draw(charts(max_dim=5))
        a = data.draw(forms(c, degree=data.draw(st.integers(2, c.dim))))
        U, V = data.draw(fields(c)), data.draw(fields(c))
        s = interior_product(U, interior_product(V, a)) + interior_product(V, interior_product(U, a))
        assert zero(s)
        assert zero(interior_product(U, interior_product(U, a)))

    @given(st.data())
    def test_derivation(self, data):
        c = data.draw(charts(max_dim=5))
        a = data.draw(forms(c, degree=data.draw(st.integers(1, c.dim))))
        b = data.draw(forms(c))
        U = data.draw(fields(c))
        rhs = (interior_product(U, a) ^ b) + (a ^ interior_product(U, b)) * (-1) ** a.degree \
            if b.degree else (interior_product(U, a) ^ b)
        assert zero(interior_product(U, a ^ b) - rhs)

    def test_evaluate_matches_contractions(self):
        a = parse_form("x*dx^dy + y*dy^dz + dx^dz", R3)
        U, V = vf(R3, x="1", y="z"), vf(R3, y="x", z="1")
        lhs = evaluate_form(a, [U, V])
        rhs = interior_product(V, interior_product(U, a))
        assert lhs == rhs[()]


class TestPullback:
    def test_examples(self):
        F0 = SmoothMap(R2, R2, [X, ZERO])
        assert pullback(F0, dx * Y).is_zero_literal()
        assert pullback(SmoothMap.identity(R2), dx * Y + dy) == dx * Y + dy

    def test_drops_pairs_on_slice(self):
        M = darboux_chart(3)
        Q = Chart(("y1", "x2", "y2", "x3", "y3"))
        iota = SmoothMap(Q, M, [ZERO] + [var(c) for c in Q.coords])
        assert pullback(iota, darboux_form(M)) == parse_form("dx2^dy2 + dx3^dy3", Q)

    @given(st.data())
    def test_naturality(self, data):
        c = data.draw(charts(max_dim=5))
        src = Chart(tuple(f"s{i}" for i in range(data.draw(st.integers(1, 5)))))
        phi = data.draw(maps(src, c))
        a = data.draw(forms(c))
        assert zero(pullback(phi, d(a)) - d(pullback(phi, a)))

    @given(st.data())
    def test_multiplicative(self, data):
        c = data.draw(charts(max_dim=4))
        phi = data.draw(maps(c, c))
        a, b = data.draw(forms(c)), data.draw(forms(c))
        assert zero(pullback(phi, a ^ b) - (pullback(phi, a) ^ pullback(phi, b)))

    def test_composition(self):
        phi = SmoothMap(R2, R2, [X + Y ** 2, Y])
        psi = SmoothMap(R2, R2, [X * Y, exp(X)])
        a = parse_form("y*dx^dy", R2)
        assert zero(pullback(psi.compose(phi), a) - pullback(phi, pullback(psi, a)))


class TestLie:
    def test_examples(self):
        assert lie_derivative(vf(R2, x="1"), (dx ^ dy) * X) == dx ^ dy
        assert lie_derivative(VectorField.zero(R2), dx * X).is_zero_literal()
        M = darboux_chart(3)
        Om = darboux_form(M) * exp(var("x2"))
        assert lie_derivative(VectorField.coordinate(M, "y1"), Om).is_zero_literal()

    def test_brackets(self):
        ex, ey = VectorField.coordinate(R2, "x"), VectorField.coordinate(R2, "y")
        assert lie_bracket(ex, ey).is_zero_literal()
        assert lie_bracket(vf(R2, y="x"), ex) == -ey
        U = vf(R2, x="x*y", y="sin(x)")
        assert lie_bracket(U, U).is_zero_literal()

    @given(st.data())
    def test_cartan_two_ways(self, data):
        c = data.draw(charts(max_dim=5))
        a, U = data.draw(forms(c)), data.draw(fields(c))
        assert zero(lie_derivative(U, a) - lie_derivative_generators(U, a))

    @given(st.data())
    def test_bracket_laws(self, data):
        c = data.draw(charts(max_dim=4))
        U, V, W = data.draw(fields(c)), data.draw(fields(c)), data.draw(fields(c))
        assert (lie_bracket(U, V) + lie_bracket(V, U)).is_zero_literal()
        jac = (lie_bracket(U, lie_bracket(V, W)) + lie_bracket(V, lie_bracket(W, U))
               + lie_bracket(W, lie_bracket(U, V)))
        assert jac.is_zero_literal()

    @given(st.data())
    def test_bracket_contraction(self, data):
        c = data.draw(charts(max_dim=4))
        a = data.draw(forms(c, degree=data.draw(st.integers(1, c.dim))))
        U, V = data.draw(fields(c)), data.draw(fields(c))
        lhs = interior_product(lie_bracket(U, V), a)
        rhs = lie_derivative(U, interior_product(V, a)) - interior_product(V, lie_derivative(U, a))
        assert zero(lhs - rhs)


def test_matrix_round_trip():
    a = parse_form("x*dx^dy + dy^dz - z*dx^dz", R3)
    A = coefficient_matrix(a)
    assert all((A[i][j] + A[j][i]).is_zero_literal() for i in range(3) for j in range(3))
    assert form_from_matrix(R3, A) == a


def test_exterior_derivative_alias():
    assert d is exterior_derivative
