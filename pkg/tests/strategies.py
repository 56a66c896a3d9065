"""Hypothesis strategies built on the seeded generators."""
import random

from hypothesis import strategies as st

from lcsreduce.forms import Chart
from lcsreduce.generators import random_expr, random_field, random_form, random_map

NAMES = ("x", "y", "z", "w")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def exprs(draw, names=NAMES, terms=2, transcendental=True):
    return random_expr(random.Random(draw(seeds)), names, terms, transcendental)


@st.composite
def charts(draw, min_dim=2, max_dim=6):
    n = draw(st.integers(min_dim, max_dim))
    return Chart(tuple(f"u{i}" for i in range(n)))


@st.composite
def forms(draw, chart, degree=None):
    p = draw(st.integers(0, chart.dim)) if degree is None else degree
    return random_form(random.Random(draw(seeds)), chart, p)


@st.composite
def fields(draw, chart):
    return random_field(random.Random(draw(seeds)), chart)


@st.composite
def maps(draw, source, target):
    return random_map(random.Random(draw(seeds)), source, target)
