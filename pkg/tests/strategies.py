from fractions import Fraction

from hypothesis import strategies as st

from mahlercert.algebra import Poly, RatFun

small_fracs = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5))


@st.composite
def polys(draw, max_degree=4, nonzero=False):
    coeffs = draw(st.lists(small_fracs, min_size=1, max_size=max_degree + 1))
    p = Poly(coeffs)
    if nonzero and p.is_zero():
        p = Poly([draw(st.integers(1, 5))])
    return p


@st.composite
def ratfuns(draw, max_degree=3, nonzero=False):
    num = draw(polys(max_degree, nonzero=nonzero))
    den = draw(polys(max_degree, nonzero=True))
    return RatFun(num, den)


@st.composite
def units_at_zero(draw, max_degree=3):
    """Rational f with f(0) = 1 (no zero or pole at the origin)."""
    num = draw(st.lists(st.integers(-4, 4), min_size=0, max_size=max_degree))
    den = draw(st.lists(st.integers(-4, 4), min_size=0, max_size=max_degree))
    return RatFun(Poly([1] + num), Poly([1] + den))


radix = st.sampled_from([2, 3, 5])
