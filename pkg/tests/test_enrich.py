import pytest
from hypothesis import given, strategies as st

from mmtharness.corpus import Box, CaptionRecord, Detection, DetectionSet, GtAnnotationSet, GtObject
from mmtharness.enrich import (
    attach_attributes, build_input, filter_gt_objects, fold_plural, select_tags, split_input,
    tags_for_variant,
)
from mmtharness.textproc import default_color_lexicon


def dets(*pairs):
    return DetectionSet("img", tuple(Detection(label, score) for label, score in pairs))


def test_select_top_ten():
    scores = [0.91, 0.15, 0.77, 0.52, 0.99, 0.33, 0.68, 0.05, 0.44, 0.86, 0.21, 0.60]
    d = dets(*[(f"l{i}", s) for i, s in enumerate(scores)])
    by_hand = ["l4", "l0", "l9", "l2", "l6", "l11", "l3", "l8", "l5", "l10"]
    assert select_tags(d) == by_hand


def test_select_stable_ties_and_duplicates():
    d = dets(("b", 0.5), ("a", 0.9), ("c", 0.5), ("a", 0.5))
    assert select_tags(d, 3) == ["a", "b", "c"]
    assert select_tags(d, 10) == ["a", "b", "c", "a"]


def test_select_empty_and_negative():
    assert select_tags(dets()) == []
    with pytest.raises(ValueError):
        select_tags(dets(), -1)


def _selection_oracle(pairs, k):
    remaining = list(pairs)
    out = []
    while remaining and len(out) < k:
        best = 0
        for i, (_, s) in enumerate(remaining):
            if s > remaining[best][1]:
                best = i
        out.append(remaining.pop(best)[0])
    return out


@given(st.lists(st.tuples(st.sampled_from("abcd"), st.sampled_from([0.1, 0.2, 0.5, 0.9])),
                max_size=15), st.integers(0, 12))
def test_select_matches_selection_oracle(pairs, k):
    got = select_tags(dets(*pairs), k)
    assert len(got) == min(k, len(pairs))
    assert got == _selection_oracle(pairs, k)


def test_build_input_formats():
    assert build_input("A man riding", ["man", "motorcycle"]) == "A man riding ## man , motorcycle"
    assert build_input("A cat", []) == "A cat ##"
    assert build_input("A cat", ["red car"]) == "A cat ## red car"
    with pytest.raises(ValueError):
        build_input("", ["x"])


@given(st.text(alphabet="ab c.", min_size=1).filter(lambda s: s.strip() and "##" not in s
                                                     and not s.endswith(" ")),
       st.lists(st.text(alphabet="xy z", min_size=1).filter(
           lambda t: "," not in t and not t.startswith(" ") and not t.endswith(" ")), max_size=4))
def test_build_split_round_trip(sentence, tags):
    assert split_input(build_input(sentence, tags)) == (sentence, tags)


def test_fold_plural():
    assert fold_plural("Cars") == "car"
    assert fold_plural("glass") == "glass"
    assert fold_plural("s") == "s"


GT = GtAnnotationSet("img", (
    GtObject(("car",), ("red", "parked"), Box(10, 10, 20, 20)),
    GtObject(("tree",), ("green", "tall"), Box(200, 200, 10, 10)),
    GtObject(("man", "person"), ("old",), Box(40, 0, 40, 20)),
))


def test_filter_gt_inside_and_disjoint():
    region = Box(0, 0, 60, 60)
    assert filter_gt_objects(GT, region) == ["car", "man"]


def test_filter_gt_threshold():
    # man box x in [40, 80), region x in [0, 60): 20 of 40 columns inside -> overlap 0.5
    region = Box(0, 0, 60, 60)
    assert filter_gt_objects(GT, region, 0.4) == ["car", "man"]
    assert filter_gt_objects(GT, region, 0.6) == ["car"]


def test_filter_gt_validates():
    with pytest.raises(ValueError):
        filter_gt_objects(GT, Box(0, 0, 0, 5))
    with pytest.raises(ValueError):
        filter_gt_objects(GT, Box(0, 0, 5, 5), 1.5)


def test_attach_colors():
    colors = default_color_lexicon()
    assert attach_attributes(["car"], GT, colors) == ["red car"]
    assert attach_attributes(["dog"], GT, colors) == ["dog"]
    assert attach_attributes(["Cars", "dog", "tree"], GT, colors) == ["red Cars", "dog", "green tree"]


def test_attach_adjectives():
    gt = GtAnnotationSet("img", (GtObject(("car",), ("red", "small"), Box(0, 0, 1, 1)),))
    assert attach_attributes(["car"], gt, None) == ["red small car"]
    assert attach_attributes(["car"], gt, {"small"}) == ["small car"]


def test_attach_first_match_wins():
    gt = GtAnnotationSet("img", (
        GtObject(("car",), ("red",), Box(0, 0, 1, 1)),
        GtObject(("cars",), ("blue",), Box(0, 0, 1, 1)),
    ))
    assert attach_attributes(["car"], gt, None) == ["red car"]


@given(st.lists(st.sampled_from(["car", "tree", "dog", "man", "cars"]), max_size=8))
def test_attach_preserves_tags(tags):
    out = attach_attributes(tags, GT, None)
    assert len(out) == len(tags)
    for before, after in zip(tags, out):
        assert after.endswith(before)


def test_variants():
    rec = CaptionRecord("img", Box(0, 0, 60, 60), "A red car.", "एक लाल गाड़ी।")
    detections = {"img": dets(("tree", 0.4), ("car", 0.9), ("dog", 0.7))}
    gt = {"img": GT}
    colors = default_color_lexicon()
    kw = dict(color_filter=colors)
    assert tags_for_variant("none", rec, detections, gt, **kw) is None
    assert tags_for_variant("vita", rec, detections, gt, **kw) == ["car", "dog", "tree"]
    assert tags_for_variant("vita", rec, detections, gt, k=2, **kw) == ["car", "dog"]
    assert tags_for_variant("vita-col", rec, detections, gt, **kw) == ["red car", "dog", "green tree"]
    assert tags_for_variant("vita-adj", rec, detections, gt, **kw) == [
        "red parked car", "dog", "green tall tree"]
    assert tags_for_variant("vita-gt", rec, detections, gt, **kw) == ["car", "man"]
    assert tags_for_variant("vita-gt-col", rec, detections, gt, **kw) == ["red car", "man"]
    assert tags_for_variant("vita-gt-adj", rec, detections, gt, **kw) == ["red parked car", "old man"]
    assert tags_for_variant("vita", rec, {}, gt, **kw) == []
    assert tags_for_variant("vita-gt", rec, detections, {}, **kw) == []
    with pytest.raises(ValueError):
        tags_for_variant("vita-x", rec, detections, gt)
