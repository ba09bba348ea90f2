import math

from hypothesis import strategies as st

from reebcount.iteration import IterationProfile, QuadIrrational


@st.composite
def quad_angles(draw):
    d = draw(st.sampled_from([2, 3, 5, 6, 7, 10, 11]))
    s = draw(st.integers(1, 60))
    q = draw(st.sampled_from([-3, -2, -1, 1, 2, 3]))
    u = draw(st.floats(min_value=0.01, max_value=0.99))
    p = math.floor(s * u - q * math.sqrt(d))
    for shift in (0, 1, -1, 2):
        try:
            return QuadIrrational(p + shift, q, d, s)
        except ValueError:
            continue
    return QuadIrrational(-1, 1, 2, 1)


@st.composite
def profiles(draw, n=None, r_range=(-8, 8)):
    n = n if n is not None else draw(st.integers(2, 4))
    j = draw(st.integers(0, n - 1))
    thetas = tuple(draw(quad_angles()) for _ in range(j))
    r = draw(st.integers(*r_range))
    return IterationProfile(r, thetas, n)
