"""Acceptance criteria, one test per criterion (criterion 7 is split by q).

Each test records a PASS/FAIL line; ``conftest.py`` prints them at the end
of the run, and ``python tests/test_acceptance.py`` prints them directly.
"""
import math
import time

import numpy as np
import pytest

from cechrecon import generators as gen
from cechrecon.complex import (
    FilteredComplex,
    cech_complex,
    filtered_ambient_cech,
    filtered_cech,
)
from cechrecon.errors import AlphaOutOfRange, DensityTooLow
from cechrecon.homology import (
    PersistentImageQuery,
    betti,
    chain_complex,
    induced_rank_oracle,
    induced_rank_table,
    persistence,
    persistent_image_rank,
    query_grid,
)
from cechrecon import gf
from cechrecon.maps import (
    SimplicialMap,
    are_contiguous,
    check_interleaving,
    check_reverse_square,
    compose,
    dowker_sweep,
    inclusion,
)
from cechrecon.metric import projection_map
from cechrecon.recover import (
    default_params,
    nsw_reconstruct_check,
    recover_homology,
    validate_params,
)

RESULTS: dict[str, str] = {}


def record(name: str, passed: bool, detail: str = "") -> None:
    line = f"{'PASS' if passed else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    RESULTS[name] = line
    print(line)


def circle_params(q):
    fx = gen.circle_sample(q)
    d = fx.facts["d_H"]
    alpha, eps = default_params(1.0, d)
    return fx, validate_params(1.0, d, alpha, eps, closed_alpha=True)


# -- 1 -----------------------------------------------------------------------------------


def test_criterion_1_circle_recovery():
    name = "1 circle recovery A_14"
    t0 = time.perf_counter()
    fx = gen.circle_sample(14)
    params = validate_params(1.0, fx.facts["d_H"], 0.5, 0.5)
    report = recover_homology(fx["A"], params)
    elapsed = time.perf_counter() - t0
    h1 = report.barcode.in_dim(1)
    birth = h1[0].birth if h1 else float("nan")
    expected = 2 * math.sin(math.pi / 14)
    ok = report.betti_claim == [1, 1, 0] and len(h1) == 1 and abs(birth - expected) <= 1e-9 and elapsed < 5
    record(name, ok, f"claim={report.betti_claim}, H1 birth={birth!r}, {elapsed:.2f}s")
    assert report.betti_claim == [1, 1, 0]
    assert len(h1) == 1
    assert birth == pytest.approx(expected, abs=1e-9)
    assert elapsed < 5


# -- 2 -----------------------------------------------------------------------------------


def test_criterion_2_threshold_tightness():
    name = "2 threshold tightness q=10 vs q=9"
    d10, d9 = 2 * math.sin(math.pi / 20), 2 * math.sin(math.pi / 18)
    ok = abs(gen.circle_sample(10).facts["d_H"] - d10) <= 1e-9
    ok &= abs(gen.circle_sample(9).facts["d_H"] - d9) <= 1e-9
    ok &= abs(d10 - 0.31287) < 5e-6 and abs(d9 - 0.34730) < 5e-6 and d10 < 1 / 3 <= d9
    _, p10 = circle_params(10)
    ok &= p10.alpha == pytest.approx(2 * d10, abs=1e-9) and p10.epsilon == pytest.approx(1 - 2 * d10, abs=1e-9)
    with pytest.raises(DensityTooLow):
        circle_params(9)
    # the boundary sits exactly between 9 and 10
    accepted = []
    for q in range(3, 31):
        try:
            circle_params(q)
            accepted.append(q)
        except DensityTooLow:
            pass
    ok &= accepted == list(range(10, 31))
    record(name, ok, f"d_10={d10:.5f} accepted, d_9={d9:.5f} rejected, first accepted q={accepted[0]}")
    assert ok


# -- 3 -----------------------------------------------------------------------------------


def two_point_table(eps, alpha):
    """The four complexes of the two-point example, as sets of label tuples."""
    x1, x2, edge = ("x1",), ("x2",), ("x1", "x2")
    high = alpha > eps
    return {
        "C_A(A)": {x1},
        "C_X(A)": {x1},
        "C_A(X)": {x1, x2, edge} if high else {x1},
        "C_X(X)": {x1, x2, edge} if high else {x1, x2},
    }


def labelled(K, labels):
    return {tuple(labels[v] for v in s) for s in K}


def test_criterion_3_two_point_example():
    name = "3 two-point example"
    problems = []
    for eps in (1.0, 2.5):
        fx = gen.two_point_space(eps)
        A, X = fx["A"], fx["X"]
        labels = fx.space.labels
        for alpha in (0.5 * eps, eps, 2 * eps):
            got = {
                "C_A(A)": cech_complex(A, A, alpha, 2),
                "C_X(A)": cech_complex(A, X, alpha, 2),
                "C_A(X)": cech_complex(X, A, alpha, 2),
                "C_X(X)": cech_complex(X, X, alpha, 2),
            }
            want = two_point_table(eps, alpha)
            for key, K in got.items():
                if labelled(K, labels) != want[key]:
                    problems.append(f"{key} at alpha={alpha}")
            # both displayed triangles: incl ~ iota o pi into C_X(X, alpha + eps)
            pi = projection_map(X, A)
            top = cech_complex(X, X, alpha + eps, 2)
            for src, mid in [
                (got["C_X(X)"], cech_complex(A, X, alpha + eps, 2)),
                (got["C_A(X)"], cech_complex(A, A, alpha + eps, 2)),
            ]:
                p = SimplicialMap(src, mid, pi)
                f = inclusion(src, top)
                g = compose(inclusion(mid, top), p)
                if not are_contiguous(f, g):
                    problems.append(f"triangle at alpha={alpha}")
        with pytest.raises(DensityTooLow):
            validate_params(fx.facts["tau"], fx.facts["d_H"], 0.5 * eps, 0.5 * eps)
        with pytest.raises(DensityTooLow):
            default_params(fx.facts["tau"], fx.facts["d_H"])
    record(name, not problems, "; ".join(problems) or "complexes, triangles, refusal")
    assert not problems


# -- 4 -----------------------------------------------------------------------------------


def test_criterion_4_dowker_suite():
    name = "4 Dowker duality suite (50 pairs)"
    t0 = time.perf_counter()
    failures = []
    sizes = []
    for seed in range(50):
        method = gen.RANDOM_METHODS[seed % 2]
        fx = gen.random_metric_instance(seed, 10, method)
        # alternate between independent subsets and a full 10-point side
        X, Y = (fx["X"], fx["Y"]) if (seed // 2) % 2 == 0 else (fx["M"], fx["Y"])
        assert len(X) <= 10 and len(Y) <= 10
        sizes.append((len(X), len(Y)))
        rep = dowker_sweep(X, Y, k_max=2, p=2)
        if not rep.ok:
            failures.append((seed, method, [c.to_json_obj() for c in rep.failures()]))
    elapsed = time.perf_counter() - t0
    both = {gen.RANDOM_METHODS[s % 2] for s in range(50)}
    record(name, not failures and elapsed < 60 and len(both) == 2,
           f"{len(failures)} failures, {elapsed:.2f}s, mean |X|,|Y| = "
           f"{np.mean([s[0] for s in sizes]):.1f},{np.mean([s[1] for s in sizes]):.1f}")
    assert not failures, failures[:3]
    assert elapsed < 60


# -- 5 -----------------------------------------------------------------------------------


def test_criterion_5_interleaving_suite():
    name = "5 interleaving suite (30 instances) and two-point failure"
    failures = []
    n_alphas = 0
    for seed in range(30):
        fx = gen.random_metric_instance(1000 + seed, 12, "euclidean-uniform-cube")
        X, A, Y = fx["X"], fx["A"], fx["Y"]
        d = fx.facts["d_H"]
        eps = d * 1.01 if d > 0 else 1e-3  # A == X: any positive eps is admissible
        r1 = check_interleaving(X, A, Y, eps)
        r2 = check_reverse_square(X, A, None, eps)
        n_alphas += len(r1.alphas) + len(r2.alphas)
        if not (r1.ok and r2.ok):
            failures.append((seed, [c.name for c in r1.failures() + r2.failures()]))

    fx = gen.two_point_space(1.0)
    X, A = fx["X"], fx["A"]
    eps = fx.facts["d_H"] * 0.5
    rep = check_interleaving(X, A, X.difference(A), eps, strict=False)
    pi_fail = [c for c in rep.failures() if c.name == "Pi simplicial"]
    rev = check_reverse_square(X, A, None, eps, strict=False)
    ok = not failures and bool(pi_fail) and pi_fail[0].counterexample is not None and not rev.ok
    detail = f"{len(failures)} failures over {n_alphas} radii"
    if pi_fail:
        detail += f"; Pi fails at alpha={pi_fail[0].alpha!r} on {pi_fail[0].counterexample}"
    record(name, ok, detail)
    assert not failures, failures[:3]
    assert pi_fail and pi_fail[0].counterexample == (1,)
    assert not rev.ok


# -- 6 -----------------------------------------------------------------------------------


def random_filtration(seed, n=10, dim_cap=3):
    """Random monotone filtration on the full (dim_cap)-skeleton of n vertices.

    Values are rounded to a coarse grid so ties occur.
    """
    rng = np.random.default_rng(seed)
    from itertools import combinations

    values = {}
    simplices = []
    for d in range(dim_cap + 1):
        for s in combinations(range(n), d + 1):
            base = max((values[f] for f in combinations(s, d)), default=0.0) if d else 0.0
            v = round(base + float(rng.integers(0, 4)) * 0.25, 2) if d else round(float(rng.integers(0, 3)) * 0.25, 2)
            values[s] = v
            simplices.append(s)
    return FilteredComplex(simplices, [values[s] for s in simplices], dim_cap)


def seeded_filtrations():
    for seed in range(40):
        if seed % 2 == 0:
            fx = gen.random_metric_instance(seed, 10, gen.RANDOM_METHODS[(seed // 2) % 2])
            yield seed, filtered_cech(fx["M"], fx["Y"], 3)
        else:
            yield seed, random_filtration(seed)


def test_criterion_6_oracle_equivalence():
    name = "6 oracle equivalence (40 filtrations, GF(2), GF(3))"
    t0 = time.perf_counter()
    discrepancies = []
    pairs = 0
    spot = 0
    for seed, F in seeded_filtrations():
        grid = query_grid(F)
        for p in (2, 3):
            bc = persistence(F, p, 2)
            for k in range(3):
                table = induced_rank_table(F, k, grid, p)
                for (beta, alpha), r in table.items():
                    pairs += 1
                    got = persistent_image_rank(bc, PersistentImageQuery(k, beta, alpha))
                    if got != r:
                        discrepancies.append((seed, p, k, beta, alpha, got, r))
                # the batched table must match the one-shot oracle
                keys = sorted(table)
                for key in keys[:: max(1, len(keys) // 12)]:
                    spot += 1
                    if induced_rank_oracle(F, k, *key, p) != table[key]:
                        discrepancies.append((seed, p, k, *key, "table", table[key]))
    elapsed = time.perf_counter() - t0
    record(name, not discrepancies,
           f"{len(discrepancies)} discrepancies over {pairs} (beta, alpha, k, p) queries, "
           f"{spot} direct oracle spot checks, {elapsed:.1f}s")
    assert not discrepancies, discrepancies[:5]


# -- 7 -----------------------------------------------------------------------------------


@pytest.mark.parametrize("q", [10, 14, 20])
def test_criterion_7_cross_method(q):
    name = f"7 cross-method agreement A_{q}"
    fx, params = circle_params(q)
    claim = recover_homology(fx["A"], params).betti_claim
    d = fx.facts["d_H"]
    try:
        nsw = nsw_reconstruct_check(fx.cloud, 1.0, d, 0.6)
        note = ""
    except AlphaOutOfRange as exc:
        nsw = None
        # what the ambient complex would give without the hypothesis check
        K = filtered_ambient_cech(fx.cloud, 3).slice(0.6)
        unchecked = [betti(K, k) for k in range(3)]
        note = f"nsw refused: {exc}; unchecked ambient Betti at 0.6 = {unchecked}"
    ok = claim == [1, 1, 0] and nsw == [1, 1, 0]
    record(name, ok, f"recover={claim}, nsw={nsw}" + (f"; {note}" if note else ""))
    assert claim == [1, 1, 0]
    assert nsw == [1, 1, 0], note


# -- 8 -----------------------------------------------------------------------------------


def structural_fixtures():
    two = gen.two_point_space(1.0)
    yield "two-point C_X(X)", filtered_cech(two["X"], two["X"], 3), two["X"], two["X"]
    for q in (10, 14, 20):
        fx = gen.circle_sample(q)
        yield f"A_{q} C_A(A)", filtered_cech(fx["A"], fx["A"], 3), fx["A"], fx["A"]
    nested = gen.nested_circle_samples(4, 8)
    yield "A_4 in A_8 C_X(A)", filtered_cech(nested["A"], nested["X"], 3), nested["A"], nested["X"]
    for seed in range(6):
        fx = gen.random_metric_instance(seed, 10, gen.RANDOM_METHODS[seed % 2])
        yield f"random {seed} C_Y(X)", filtered_cech(fx["X"], fx["Y"], 3), fx["X"], fx["Y"]
        yield f"random {seed} C_X(Y)", filtered_cech(fx["Y"], fx["X"], 3), fx["Y"], fx["X"]


def euler_identity(K, p=2):
    """chi(K) against the alternating sum of Betti numbers of the capped complex."""
    cap = K.dim_cap
    counts = [len(K.by_dim(k)) for k in range(cap + 1)]
    chi = sum((-1) ** k * c for k, c in enumerate(counts))
    cc = chain_complex(K, p)
    top_rank = gf.rank(cc.boundary[cap], p) if cap in cc.boundary else 0
    b = [betti(K, k, p) for k in range(cap)] + [counts[cap] - top_rank]
    return chi == sum((-1) ** k * x for k, x in enumerate(b)), chi, b


def test_criterion_8_structural_invariants():
    name = "8 structural invariants"
    rng = np.random.default_rng(8)
    problems = []
    n_fixtures = 0
    for label, F, X, Y in structural_fixtures():
        n_fixtures += 1
        F.validate()
        bc = persistence(F, 2, 2)
        top = max(F.values)
        for alpha in rng.uniform(0.0, 1.2 * top + 0.1, size=20):
            alpha = float(alpha)
            K = F.slice(alpha)
            if K != cech_complex(X, Y, alpha, F.dim_cap):
                problems.append(f"{label}: slice != direct complex at {alpha!r}")
            if not chain_complex(K).is_chain_complex():
                problems.append(f"{label}: dd != 0 at {alpha!r}")
            ok, chi, b = euler_identity(K)
            if not ok:
                problems.append(f"{label}: Euler chi={chi} betti={b} at {alpha!r}")
            for k in range(3):
                if bc.alive(k, alpha) != betti(K, k):
                    problems.append(f"{label}: barcode/slice H_{k} at {alpha!r}")
    record(name, not problems, f"{n_fixtures} fixtures x 20 radii" + (f"; {problems[:3]}" if problems else ""))
    assert not problems, problems[:5]


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
