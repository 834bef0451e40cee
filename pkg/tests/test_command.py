import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edakit.command import (
    ApplyClustering,
    ApplyProjection,
    ExtendView,
    FilterWhere,
    ForwardPerturb,
    LoadViewOnScreens,
    ShowView,
    VIEW_KINDS,
    edit_distance,
    parse_command,
    print_command,
)
from edakit.errors import CommandError
from edakit.filters import And, Or, Pred


class TestQuotedForms:
    def test_apply_agglomerative_clustering(self):
        got = parse_command("Apply agglomerative clustering with 4 clusters to solution 1")
        assert got == ApplyClustering("agglomerative", 4, 1)

    def test_show_projection_on_screen_13(self):
        got = parse_command("Show projection view on screen number 13")
        assert got == ShowView("projection", (13,))

    def test_try_increasing_feature_by_5(self):
        got = parse_command("Try increasing the steps value of this data point by 5")
        assert got == ForwardPerturb("steps", 5.0)

    def test_load_view_on_screens(self):
        got = parse_command("Load table view on screens 2 and 7")
        assert got == LoadViewOnScreens("table", (2, 7))

    def test_extend_to_n_screens(self):
        got = parse_command("Extend projection to 3 screens")
        assert got == ExtendView("projection", 3)


class TestSurface:
    def test_case_insensitive(self):
        a = parse_command("APPLY KMEANS CLUSTERING WITH 3 CLUSTERS TO SOLUTION 2")
        assert a == ApplyClustering("kmeans", 3, 2)

    def test_number_words_two_through_ten(self):
        got = parse_command("apply kmeans clustering with seven clusters to solution 1")
        assert got == ApplyClustering("kmeans", 7, 1)

    def test_decreasing_negates(self):
        got = parse_command("try decreasing the age value of this data point by 2.5")
        assert got == ForwardPerturb("age", -2.5)

    def test_filter_where(self):
        got = parse_command('filter solution 1 where age >= 30 and gender == "F"')
        assert got == FilterWhere(
            1, And((Pred("age", ">=", 30.0), Pred("gender", "==", "F")))
        )

    def test_projection_with_metric(self):
        got = parse_command(
            "apply cmds projection in 3 dimensions with cosine metric to solution 4"
        )
        assert got == ApplyProjection("cmds", 3, 4, "cosine")

    def test_feature_selection_two_words(self):
        got = parse_command("show feature selection view on screen 9")
        assert got == ShowView("feature_selection", (9,))


class TestErrors:
    def test_deictic_screen_rejected(self):
        with pytest.raises(CommandError, match="deictic"):
            parse_command("Show projection view on that screen")

    def test_unknown_algorithm_with_suggestion(self):
        with pytest.raises(CommandError) as exc:
            parse_command("apply kmaens clustering with 4 clusters to solution 1")
        assert "kmeans" in exc.value.suggestions

    def test_unknown_view_kind_suggestion(self):
        with pytest.raises(CommandError) as exc:
            parse_command("show projectoin view on screen 3")
        assert "projection" in exc.value.suggestions

    def test_syntax_error_has_offset(self):
        with pytest.raises(CommandError) as exc:
            parse_command("show projection view on screen number")
        assert exc.value.offset >= 0

    def test_unknown_verb(self):
        with pytest.raises(CommandError, match="unknown command"):
            parse_command("dance the tango")

    def test_empty(self):
        with pytest.raises(CommandError):
            parse_command("")


def test_edit_distance():
    assert edit_distance("kmaens", "kmeans") == 2
    assert edit_distance("pca", "pca") == 0
    assert edit_distance("abc", "xyz") == 3


# canonical print forms pinned by the module contract
def test_print_canonical_forms():
    assert (
        print_command(ApplyClustering("kmeans", 3, 2))
        == "apply kmeans clustering with 3 clusters to solution 2"
    )
    assert (
        print_command(ShowView("distribution", (4,)))
        == "show distribution view on screen number 4"
    )


# ---------------------------------------------------------------------------
# Round-trip fuzzing
# ---------------------------------------------------------------------------

_ident = st.from_regex(r"[a-z_][a-z0-9_]{0,10}", fullmatch=True).filter(
    lambda s: s
    not in {"and", "or", "value", "of", "this", "that", "data", "point", "by"}
)
_kind = st.sampled_from(VIEW_KINDS)
_slots = st.lists(st.integers(1, 15), min_size=1, max_size=4, unique=True).map(tuple)
_delta = st.one_of(
    st.integers(-100, 100).map(float),
    st.floats(
        allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6, width=32
    ),
)

_command = st.one_of(
    st.builds(ShowView, _kind, _slots),
    st.builds(LoadViewOnScreens, _kind, _slots),
    st.builds(ExtendView, _kind, st.integers(1, 15)),
    st.builds(
        ApplyClustering,
        st.sampled_from(["kmeans", "agglomerative"]),
        st.integers(2, 12),
        st.integers(0, 9),
    ),
    st.builds(
        ApplyProjection,
        st.sampled_from(["pca", "cmds"]),
        st.sampled_from([2, 3]),
        st.integers(0, 9),
        st.one_of(
            st.none(),
            st.sampled_from(["euclidean", "manhattan", "cosine", "correlation"]),
        ),
    ),
    st.builds(ForwardPerturb, _ident, _delta),
    st.builds(
        FilterWhere,
        st.integers(0, 9),
        st.builds(
            Pred,
            _ident,
            st.sampled_from(["==", "!=", "<", "<=", ">", ">="]),
            st.integers(-50, 50).map(float),
        ),
    ),
)


@given(_command)
@settings(max_examples=300, deadline=None)
def test_roundtrip_fuzz(cmd):
    assert parse_command(print_command(cmd)) == cmd


def test_roundtrip_thousand_seeded():
    rng = np.random.default_rng(0)
    kinds = VIEW_KINDS
    count = 0
    while count < 1000:
        choice = rng.integers(7)
        if choice == 0:
            cmd = ShowView(str(rng.choice(kinds)), (int(rng.integers(1, 16)),))
        elif choice == 1:
            slots = tuple(
                int(s) for s in rng.choice(15, size=int(rng.integers(1, 4)), replace=False) + 1
            )
            cmd = LoadViewOnScreens(str(rng.choice(kinds)), slots)
        elif choice == 2:
            cmd = ExtendView(str(rng.choice(kinds)), int(rng.integers(1, 16)))
        elif choice == 3:
            cmd = ApplyClustering(
                str(rng.choice(["kmeans", "agglomerative"])),
                int(rng.integers(2, 12)),
                int(rng.integers(10)),
            )
        elif choice == 4:
            cmd = ApplyProjection(
                str(rng.choice(["pca", "cmds"])),
                int(rng.choice([2, 3])),
                int(rng.integers(10)),
                None if rng.random() < 0.5 else str(rng.choice(["euclidean", "manhattan"])),
            )
        elif choice == 5:
            cmd = ForwardPerturb(f"feat{rng.integers(100)}", float(rng.normal()))
        else:
            cmd = FilterWhere(
                int(rng.integers(10)),
                Pred(f"col{rng.integers(20)}", str(rng.choice(["==", "<", ">="])), float(rng.integers(-9, 9))),
            )
        assert parse_command(print_command(cmd)) == cmd
        count += 1


def test_never_crashes_on_random_bytes():
    rng = np.random.default_rng(1)
    for _ in range(2000):  # the full 1e5 sweep lives in the acceptance suite
        length = int(rng.integers(0, 60))
        text = bytes(rng.integers(0, 256, size=length).tolist()).decode(
            "latin-1"
        )
        try:
            parse_command(text)
        except CommandError:
            pass
