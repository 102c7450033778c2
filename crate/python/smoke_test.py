#!/usr/bin/env python3
"""Smoke test for the compop_py extension module.

Builds nothing itself: run `cargo build -p compop-py` first (or pass
--release and build that profile). The script locates the compiled cdylib,
stages it under an importable name, and exercises the main types and
operations end to end.
"""

import argparse
import json
import pathlib
import shutil
import sys
import tempfile


def stage_module(profile: str) -> pathlib.Path:
    root = pathlib.Path(__file__).resolve().parent.parent
    lib = root / "target" / profile / "libcompop_py.so"
    if not lib.exists():
        sys.exit(
            f"{lib} not found; run `cargo build -p compop-py"
            + (" --release`" if profile == "release" else "`")
        )
    stage = pathlib.Path(tempfile.mkdtemp(prefix="compop-py-"))
    shutil.copy2(lib, stage / "compop_py.so")
    return stage


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--release", action="store_true", help="use the release build")
    args = parser.parse_args()

    sys.path.insert(0, str(stage_module("release" if args.release else "debug")))
    import compop_py as cp

    checks = 0

    def check(condition: bool, label: str) -> None:
        nonlocal checks
        if not condition:
            sys.exit(f"FAIL: {label}")
        checks += 1

    # spaces
    path = cp.Space.path()
    tree = cp.Space.tree(2)
    check(path.points_up_to(3) == [(0, 0), (1, 0), (2, 0), (3, 0)], "path enumeration")
    check(len(tree.points_up_to(2)) == 7, "binary tree level counts")
    check(path.ray(5) == (5, 0), "canonical ray on the path")
    gapped = cp.Space.table([1, 0], [2, 0])
    check(gapped.ray(1) == (2, 0), "ray skips empty lengths")

    # maps and classification
    ident = cp.Map.identity(path)
    shift = cp.Map.ray_advance(path, 1)
    const0 = cp.Map.constant(path, (0, 0))
    const1 = cp.Map.constant(path, (1, 0))
    perturbed = ident.with_override((0, 0), (5, 0))

    check(ident.apply((7, 0)) == (7, 0), "identity evaluation")
    check(shift.apply((4, 0)) == (5, 0), "ray advance evaluation")
    check(perturbed.apply((0, 0)) == (5, 0), "override evaluation")
    check(not ident.range_is_finite() and const0.range_is_finite(), "range split")

    check(cp.classify(ident, shift)["class"] == "infinite-deviation", "classify infinite deviation")
    check(cp.classify(ident, const0)["class"] == "mixed-range", "classify mixed")
    check(cp.classify(ident, perturbed)["class"] == "finite-deviation", "classify finite deviation")
    check(cp.classify(const0, const1)["class"] == "both-finite-range", "classify both finite")
    dev = ident.deviation(perturbed)
    check(dev["finite"] and dev["points"] == [(0, 0)], "deviation points")

    # norms
    check(cp.single_norms(ident) == {"operator_norm": 1, "essential_norm": 1, "compact": False},
          "identity norms")
    check(cp.single_norms(const0) == {"operator_norm": 1, "essential_norm": 0, "compact": True},
          "constant norms")
    diff = cp.difference_norms(ident, shift)
    check((diff["operator_norm"], diff["essential_norm"], diff["compact"]) == (2, 2, False),
          "difference norms for infinite deviation")
    check(cp.difference_norms(ident, const0)["essential_norm"] == 1, "mixed essential norm")
    check(cp.difference_norms(ident, perturbed)["compact"], "finite deviation is compact")

    witness = cp.norm_attainment_witness(ident, perturbed)
    check(witness["base"] == [0, 0] and witness["attained"] == 2, "attainment witness")
    check(sorted(witness["function"]) == [[[0, 0], "1"], [[5, 0], "-1"]], "witness function entries")

    family = cp.essential_witness_sequence(ident, shift, 2)
    check(family[0] == [[[0, 0], "1"], [[1, 0], "-1"]], "essential witness family")
    mixed = cp.mixed_noncompact_witness(ident, const0, 2)
    check(mixed[0] == [[[1, 0], "1"]], "mixed witness family skips the constant's range")

    reps = cp.class_representatives(ident)
    check(reps["same_class_relation"]["class"] == "finite-deviation", "same-class companion")
    check(reps["cross_class"].describe() == "ray-advance 1", "cross-class companion")

    # topology
    check(cp.uniform_distance(ident, perturbed) == 2, "uniform distance of distinct operators")
    check(cp.essential_distance(ident, perturbed) == 0, "essential distance in one component")
    check(cp.essential_ball(const0, "1") == "compact-class", "ball around a compact center")
    check(cp.essential_ball(ident, "3/2") == "dot-class-plus-compacts", "ball at radius 3/2")
    check(cp.essential_ball(ident, "5/2") == "all", "ball beyond radius 2")
    check(cp.ball_contains(const0, "1/2", const1), "compacts share every neighborhood")
    check(not cp.ball_contains(ident, "1", const0), "distance 1 is outside the open radius-1 ball")
    check(cp.same_component(ident, perturbed, "essential"), "essential component")
    check(not cp.same_component(ident, perturbed, "uniform"), "uniform discreteness")

    isolated, _ = cp.is_isolated(ident, "uniform")
    check(isolated, "uniform isolation")
    isolated, companion = cp.is_isolated(ident, "essential")
    check(not isolated and cp.essential_distance(ident, companion) == 0, "essential non-isolation")

    x, y = cp.hausdorff_counterexample(path)
    check(cp.uniform_distance(x, y) == 2 and cp.essential_distance(x, y) == 0,
          "hausdorff counterexample")
    cert = cp.path_certificate(ident, perturbed)
    check(cert["continuous"], "path certificate")

    # oracle
    restricted = cp.restricted_difference_norm(ident, perturbed, 3)
    check(restricted["value"] == 2 and restricted["combinatorial"] == restricted["exhaustive"],
          "dual-route restricted norm")
    lower = cp.essential_lower_bound_probe(ident, shift, 8)
    check(lower["certified"] == 2 and lower["conclusive"], "essential lower bound probe")
    probe = cp.compactness_probe(ident, perturbed, 10, 16)
    check(probe["verdict"] == "consistent-with-compact" and probe["trace"][6:] == [0, 0, 0, 0],
          "compactness probe trace")
    escape = cp.range_escape_probe(ident, 100, 50)
    check(escape["escaped"] == "51:0", "range escape probe")

    # scenario pipeline
    report = json.loads(cp.run_scenario(
        "[space]\nkind = path\n\n[maps]\nid = identity\nshift = ray-advance 1\n\n"
        "[queries]\ndifference-norms id shift\nhausdorff\n",
        True,
    ))
    check(report["summary"]["status"] == "pass", "scenario report status")
    check(report["records"][0]["result"]["essential_norm"] == 2, "scenario record value")
    try:
        cp.run_scenario("[space]\nkind = path\n\n[maps]\nid = identity\nid = identity\n", False)
        sys.exit("FAIL: duplicate map name must raise")
    except ValueError as e:
        check("duplicate" in str(e), "scenario validation error")

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
