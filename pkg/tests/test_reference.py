"""Engine scores must match the naive reference evaluator bit-for-bit on
randomized synthetic anchor runs."""

from stereobench.harness import score_runs
from stereobench.model import EvalConfig

from reference import ref_evaluate
from runsim import random_dataset_with_runs

ENGINE_KEYS = {
    "accuracy": "acc_2d",
    "error_px": "err_2d",
    "rob_2d": "rob_2d",
    "error_mm": "err_3d",
    "rob_3d": "rob_3d",
}


def compare_one(seed: int) -> int:
    dataset, runs = random_dataset_with_runs(seed)
    report = score_runs(dataset, runs, EvalConfig(), "sim")
    ref = ref_evaluate(dataset, runs)

    for anchor in report.anchors:
        expected = ref["anchors"][(anchor.video_id, anchor.anchor_frame)]
        for ref_key, eng_key in ENGINE_KEYS.items():
            got = getattr(anchor.scores, eng_key)
            assert got.value == expected[ref_key][0], (
                seed, anchor.video_id, anchor.anchor_frame, ref_key)
            assert got.weight == expected[ref_key][1]

    for video in report.videos:
        expected = ref["videos"][video.video_id]
        for ref_key, eng_key in ENGINE_KEYS.items():
            got = getattr(video.scores, eng_key)
            assert got.value == expected["scores"][ref_key][0]
            assert got.weight == expected["scores"][ref_key][1]
        assert video.sequence == expected["sequence"]

    for case in report.cases:
        expected = ref["cases"][case.case_id]
        for ref_key, eng_key in ENGINE_KEYS.items():
            got = getattr(case.scores, eng_key)
            assert got.value == expected["scores"][ref_key][0]

    for ref_key, eng_key in ENGINE_KEYS.items():
        got = getattr(report.scores, eng_key)
        assert got.value == ref["subset"][ref_key][0]
        assert got.weight == ref["subset"][ref_key][1]

    assert report.subset_sequence == ref["subset_sequence"]
    assert (report.window.n_min, report.window.n_max) == ref["window"]
    assert report.eao == ref["eao"]
    return len(report.anchors)


def test_engine_matches_reference_on_random_runs():
    total_runs = 0
    seed = 0
    while total_runs < 60:
        total_runs += compare_one(seed)
        seed += 1
    assert total_runs >= 60
