"""Hypothesis generators shared by the test modules."""
from hypothesis import strategies as st

from gamesec.games import view
from gamesec.lattice import l4
from gamesec.types import Bang, Flat, I, Limp, Monad, Tensor, With

LAT = l4()
LEVELS = sorted(LAT.elements)

flats = st.builds(Flat, st.sampled_from(["X", "Y"]), st.integers(1, 2), st.sampled_from(LEVELS))
leaves = st.one_of(flats, st.just(I))


def _extend(children):
    return st.one_of(
        st.builds(Tensor, children, children),
        st.builds(With, children, children),
        st.builds(Limp, children, children),
        st.builds(Bang, children),
        st.builds(Monad, st.sampled_from(LEVELS), children),
    )


types = st.recursive(leaves, _extend, max_leaves=3)


def small(t, k=1, limit=8):
    return len(view(t, LAT, k).moves) <= limit


small_types = types.filter(small)
