"""Acceptance gate: the eleven contract criteria, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
summary lines; every tolerance and count below is part of the contract and
must not be loosened.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from stepquiver import (
    Box,
    CaseTag,
    FunctionTuple,
    DyadicScheme,
    InfiniteGlobalDimensionError,
    Interval,
    K_constant,
    SigmaPair,
    acos_cat,
    add_elements,
    ae_equal,
    asin_cat,
    box1,
    classify_case,
    emit_dsl,
    enumerate_threads,
    eta,
    forb_perm_bijection,
    game_map,
    game_natural,
    global_dimension,
    integrate_step,
    juxtapose,
    k_reference,
    koszul_dual,
    lambda_action,
    linear_combine,
    ln_cat,
    log_power_measure,
    make_interval,
    measurable_set,
    p_norm,
    parse_quiver_dsl,
    path_length_via_integral,
    poset_element,
    restrict,
    scalar_action,
    sin_cat,
    stieltjes_integrate,
    upper_limit_record,
    var_upper_integral,
    zero_function,
)
from stepquiver.cli import main as cli_main

from conftest import (
    CORPUS_DIR,
    EXPECTED_GLDIM,
    INFINITE_GLDIM,
    brute_global_dimension,
    brute_paths,
    brute_threads,
    corpus_names,
    load_doc,
    load_presentation,
    random_step,
)


def _report(n: int, detail: str) -> None:
    print(f"criterion {n:>2} PASS — {detail}")


def _interval_pair(lo: float, hi: float, value: float) -> SigmaPair:
    return SigmaPair(measurable_set((Box((Interval(lo, hi),)),)), value)


# ---------------------------------------------------------------------------
# 1 — the quarter-period constant
# ---------------------------------------------------------------------------

def test_criterion_01_quarter_period_constant():
    t0 = time.monotonic()
    enc = K_constant(1e-3)
    elapsed = time.monotonic() - t0
    assert enc.width <= 2e-3, f"width {enc.width} exceeds 2e-3"
    assert enc.lower <= 1.5707963 <= enc.upper, f"[{enc.lower}, {enc.upper}]"
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    _report(1, f"K(1e-3) width {enc.width:.2e} contains 1.5707963 "
               f"in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 2 — global dimension three ways across the corpus
# ---------------------------------------------------------------------------

def test_criterion_02_global_dimension_triple_agreement():
    assert len(EXPECTED_GLDIM) >= 10, "corpus shrank below ten presentations"
    for n in range(2, 7):
        assert EXPECTED_GLDIM[f"a{n}_full"] == n - 1, f"a{n}_full"
    free = [n for n in EXPECTED_GLDIM if not load_doc(n).relations]
    assert len(free) >= 2 and all(EXPECTED_GLDIM[n] == 1 for n in free), free

    docs = {n: load_doc(n) for n in EXPECTED_GLDIM}
    pres = {n: load_presentation(n) for n in EXPECTED_GLDIM}
    t0 = time.monotonic()
    for name, p in pres.items():
        values = {m: global_dimension(p, m)
                  for m in ("threads", "integral", "stieltjes")}
        assert len(set(values.values())) == 1, f"{name}: {values}"
        got = values["threads"]
        assert got == EXPECTED_GLDIM[name], f"{name}: {got}"
        assert got == brute_global_dimension(docs[name]), f"{name}: brute"
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0, f"sweep took {elapsed:.2f}s"
    _report(2, f"three routes agree on {len(pres)} presentations "
               f"(brute-force confirmed) in {elapsed:.3f}s")


# ---------------------------------------------------------------------------
# 3 — Stieltjes identity integrals recover the log-power weight
# ---------------------------------------------------------------------------

def test_criterion_03_stieltjes_identity_values():
    worst = 0.0
    for l in range(1, 11):
        value = stieltjes_integrate(lambda x: x, log_power_measure(float(l)),
                                    (1.0, 2.0), 1e-9)
        worst = max(worst, abs(value - l))
        assert abs(value - l) <= 1e-9, f"l={l}: {value}"
    _report(3, f"∫x d(l·ln x) = l for l=1..10, worst error {worst:.2e}")


# ---------------------------------------------------------------------------
# 4 — path length recovered through the unit-box integral
# ---------------------------------------------------------------------------

def test_criterion_04_path_length_via_integral():
    checked = 0
    for name in corpus_names():
        doc = load_doc(name)
        p = load_presentation(name)
        for path in brute_paths(doc, 8):
            got = path_length_via_integral(p, path)
            assert got == len(path), f"{name}:{path} gave {got}"
            checked += 1
    assert checked > 0
    _report(4, f"arrow count recovered exactly on {checked} paths "
               f"(length <= 8, all {len(corpus_names())} corpus quivers)")


# ---------------------------------------------------------------------------
# 5 — Chasles additivity through the pairing maps
# ---------------------------------------------------------------------------

def test_criterion_05_chasles_additivity():
    rng = np.random.default_rng(501)
    ambient = (0.0, 4.0)
    worst = 0.0
    for i in range(100):
        f = random_step(rng, *ambient)
        cuts = np.sort(rng.uniform(*ambient, size=3))
        alpha, beta, gamma = (float(c) for c in cuts)
        if i % 7 == 0:
            beta = alpha  # degenerate first leg
        if i % 11 == 0:
            gamma = beta
        ab = game_natural(game_map(upper_limit_record(f, alpha, beta)), ambient)
        bc = game_natural(game_map(upper_limit_record(f, beta, gamma)), ambient)
        ac = game_natural(game_map(upper_limit_record(f, alpha, gamma)), ambient)
        total = ab + bc
        assert total.set == ac.set
        gap = abs(total.value - ac.value)
        worst = max(worst, gap)
        assert gap <= 1e-12, f"case {i}: |{total.value} - {ac.value}| = {gap}"
    _report(5, f"100 random (f, α≤β≤γ) triples additive, worst gap {worst:.2e}")


# ---------------------------------------------------------------------------
# 6 — the six-branch case table equals the general integral
# ---------------------------------------------------------------------------

def _case_table_value(tag: CaseTag, f, g, a: Interval, b: Interval) -> float:
    """The case-by-case formulas, restated independently of the library."""
    u, v = a.lo, a.hi
    s, t = b.lo, b.hi
    fg = linear_combine(1.0, f, 1.0, g)

    def intf(lo, hi):
        return integrate_step(f, Interval(lo, hi))

    def intg(lo, hi):
        return integrate_step(g, Interval(lo, hi))

    if tag is CaseTag.DISJOINT_LEFT:
        return intf(u, v) + intg(s, t)
    if tag is CaseTag.DISJOINT_RIGHT:
        return intg(s, t) + intf(u, v)
    if tag is CaseTag.OVERLAP_LEFT:
        return intf(u, s) + integrate_step(fg, Interval(s, v)) + intg(v, t)
    if tag is CaseTag.OVERLAP_RIGHT:
        return intg(s, u) + integrate_step(fg, Interval(u, t)) + intf(t, v)
    if tag is CaseTag.CONTAINED_IN:
        return intg(s, t) + intf(u, v)
    return intf(u, v) + intg(s, t)


def _draw_pair(rng, i: int) -> tuple[Interval, Interval]:
    u, v = sorted(float(x) for x in rng.uniform(0.0, 4.0, size=2))
    s, t = sorted(float(x) for x in rng.uniform(0.0, 4.0, size=2))
    mode = i % 8
    if mode == 0:
        s, t = v, max(v, t)                      # shared endpoint, empty strip
    elif mode == 1:
        s, t = u, v                              # equal intervals
    elif mode == 2:
        m = 0.5 * (u + v)
        s = t = m                                # degenerate inside [u, v]
    elif mode == 3:
        u = v = 0.5 * (s + t)                    # degenerate inside [s, t]
    elif mode == 4:
        s, t = u, max(v, t)                      # shared lower endpoint
    elif mode == 5:
        u, v = min(u, 1.8) / 2, min(v, 1.9)      # force a gap: v < 2 < s
        s, t = 2.0 + s / 2, 2.0 + t / 2
        if i % 16 >= 8:
            (u, v), (s, t) = (s, t), (u, v)
    elif mode == 6:
        s, u, t, v = sorted((u, v, s, t))        # s <= u <= t <= v
        if u == t:
            v = max(v, t + 0.125)
    return Interval(u, v), Interval(s, t)


def test_criterion_06_case_table_matches_general_integral():
    rng = np.random.default_rng(601)
    seen: dict[CaseTag, int] = {}
    worst = 0.0
    for i in range(1000):
        f = random_step(rng, 0.0, 4.0)
        g = random_step(rng, 0.0, 4.0)
        a, b = _draw_pair(rng, i)
        tag = classify_case(a, b)
        seen[tag] = seen.get(tag, 0) + 1
        hull = Interval(min(a.lo, b.lo), max(a.hi, b.hi))
        general = integrate_step(
            linear_combine(1.0, restrict(f, a), 1.0, restrict(g, b)), hull)
        branch = _case_table_value(tag, f, g, a, b)
        gap = abs(branch - general)
        worst = max(worst, gap)
        assert gap <= 1e-12, f"case {i} ({tag.value}): gap {gap}"
        # the library's own addition must land on the same number
        pair = add_elements(poset_element(f, a), poset_element(g, b))
        assert abs(pair.value - general) <= 1e-12
    assert set(seen) == set(CaseTag), f"branches missed: {seen}"
    _report(6, "1000 interval pairs, all six branches hit "
               f"({ {k.value: v for k, v in sorted(seen.items(), key=lambda kv: kv[0].value)} }), "
               f"worst gap {worst:.2e}")


# ---------------------------------------------------------------------------
# 7 — juxtaposition commutes with the variable-upper-limit integral
# ---------------------------------------------------------------------------

def test_criterion_07_eta_commuting_square():
    rng = np.random.default_rng(701)
    unit = Interval(0.0, 1.0)
    sch = DyadicScheme(unit)
    points = [k / 64.0 for k in range(65)]
    worst = 0.0
    for i in range(100):
        f = random_step(rng, 0.0, 1.0)
        g = random_step(rng, 0.0, 1.0)
        h = juxtapose(sch, FunctionTuple((f, g)))
        lhs = var_upper_integral(h, 0.0)
        rhs = eta(var_upper_integral(f, 0.0), var_upper_integral(g, 0.0), unit)
        for x in points:
            gap = abs(lhs(x) - rhs(x))
            worst = max(worst, gap)
            assert gap <= 1e-12, f"pair {i} at {x}: gap {gap}"
    _report(7, "var-upper ∘ juxtapose = eta ∘ (var-upper × var-upper) on "
               f"100 pairs at k/64 (k=0..64), worst gap {worst:.2e}")


# ---------------------------------------------------------------------------
# 8 — forbidden threads ↔ permitted threads of the dual
# ---------------------------------------------------------------------------

def test_criterion_08_thread_bijection():
    total = 0
    for name in sorted(EXPECTED_GLDIM) + ["cycle3_free"]:
        doc = load_doc(name)
        p = load_presentation(name)
        pairs = forb_perm_bijection(p)
        firsts = [f.arrows for f, _ in pairs]
        seconds = [g.arrows for _, g in pairs]
        # total + injective on the forbidden side, surjective onto the dual
        assert len(set(firsts)) == len(firsts)
        assert len(set(seconds)) == len(seconds)
        assert set(firsts) == brute_threads(doc, "forbidden"), name
        dual = koszul_dual(p)
        dual_doc = type("D", (), {})()
        dual_doc.arrows = dual.quiver.arrows
        dual_doc.relations = sorted(dual.relations)
        assert set(seconds) == brute_threads(dual_doc, "permitted"), name
        for f, g in pairs:
            assert g.arrows == tuple(reversed(f.arrows)), name
            assert f.length == g.length, name
        total += len(pairs)
    for name in sorted(INFINITE_GLDIM):
        with pytest.raises(InfiniteGlobalDimensionError):
            forb_perm_bijection(load_presentation(name))
    _report(8, f"name-reversal is a length-preserving bijection on "
               f"{total} thread pairs (brute-force confirmed both sides)")


# ---------------------------------------------------------------------------
# 9 — elementary-function identities
# ---------------------------------------------------------------------------

def test_criterion_09_elementary_identities():
    rng = np.random.default_rng(901)
    worst_ln = 0.0
    for _ in range(50):
        y1, y2 = (float(v) for v in rng.uniform(0.05, 50.0, size=2))
        gap = abs(ln_cat(y1 * y2).midpoint
                  - ln_cat(y1).midpoint - ln_cat(y2).midpoint)
        worst_ln = max(worst_ln, gap)
        assert gap <= 3e-6, f"ln({y1}·{y2}): gap {gap}"

    two_k = 2.0 * k_reference()
    worst_sin = 0.0
    for x in rng.uniform(-20.0, 20.0 - two_k, size=20):
        a = sin_cat(float(x) + two_k, 2e-4)
        b = sin_cat(float(x), 2e-4)
        gap = abs(a.midpoint + b.midpoint)
        worst_sin = max(worst_sin, gap)
        assert gap <= 1e-3, f"sin({x}+2K) vs -sin({x}): gap {gap}"

    k = k_reference()
    for x in rng.uniform(-1.0, 1.0, size=50):
        s = asin_cat(float(x)) + acos_cat(float(x))
        assert s.contains(k), f"asin+acos at {x}: [{s.lower}, {s.upper}]"
        assert s.contains(np.pi / 2)

    _report(9, f"ln additivity worst {worst_ln:.2e} (50 pairs); "
               f"sin half-period flip worst {worst_sin:.2e} (20 points); "
               "asin+acos encloses K (50 points)")


# ---------------------------------------------------------------------------
# 10 — seminorm and module axioms
# ---------------------------------------------------------------------------

def test_criterion_10_norm_and_module_axioms():
    rng = np.random.default_rng(1001)
    cases = 0
    tau = float  # the identity homomorphism

    # p-norm axioms: homogeneity, triangle, vanishing only a.e.
    assert p_norm(zero_function(box1(0.0, 2.0)), 1.0) == 0.0
    for _ in range(150):
        f = random_step(rng, 0.0, 2.0)
        g = random_step(rng, 0.0, 2.0)
        k = int(rng.integers(-64, 65)) / 16.0
        p = float(rng.integers(1, 4))
        nf, ng = p_norm(f, p), p_norm(g, p)
        assert nf >= 0.0
        hom = abs(p_norm(linear_combine(k, f, 0.0, g), p) - abs(k) * nf)
        assert hom <= 1e-12 * (1.0 + abs(k) * nf)
        tri = p_norm(linear_combine(1.0, f, 1.0, g), p) - (nf + ng)
        assert tri <= 1e-12 * (1.0 + nf + ng)
        assert (nf == 0.0) == ae_equal(f, zero_function(f.ambient))
        cases += 1

    # module axioms (a')-(e') for the identity homomorphism
    for _ in range(250):
        lo, hi = sorted(float(x) for x in rng.uniform(0.0, 4.0, size=2))
        r1 = int(rng.integers(-256, 257)) / 64.0
        r2 = int(rng.integers(-256, 257)) / 64.0
        a1 = int(rng.integers(-64, 65)) / 16.0
        a2 = int(rng.integers(-64, 65)) / 16.0
        k = int(rng.integers(-32, 33)) / 8.0
        p1 = _interval_pair(lo, hi, r1)
        p2 = _interval_pair(lo, hi, r2)

        def close(x: SigmaPair, y: SigmaPair) -> None:
            assert x.set == y.set
            assert abs(x.value - y.value) <= 1e-12 * (1.0 + abs(y.value))

        close(lambda_action(1.0, tau, p1), p1)                           # (a')
        close(lambda_action(a1 * a2, tau, p1),
              lambda_action(a1, tau, lambda_action(a2, tau, p1)))        # (b')
        close(lambda_action(a1 + a2, tau, p1),
              lambda_action(a1, tau, p1) + lambda_action(a2, tau, p1))   # (c')
        close(lambda_action(a1, tau, p1 + p2),
              lambda_action(a1, tau, p1) + lambda_action(a1, tau, p2))   # (d')
        close(lambda_action(k * a1, tau, p1),
              lambda_action(a1, tau, scalar_action(k, p1)))              # (e')
        close(lambda_action(k * a1, tau, p1),
              scalar_action(k, lambda_action(a1, tau, p1)))              # (e')
        cases += 1

    # the forgetful pairing map is linear
    ambient = (0.0, 4.0)
    for _ in range(100):
        f = random_step(rng, *ambient)
        g = random_step(rng, *ambient)
        alpha, t = sorted(float(x) for x in rng.uniform(*ambient, size=2))
        k = int(rng.integers(-32, 33)) / 8.0
        pf = game_map(upper_limit_record(f, alpha, t))
        pg = game_map(upper_limit_record(g, alpha, t))
        lhs = game_natural(pf + pg, ambient)
        rhs = game_natural(pf, ambient) + game_natural(pg, ambient)
        assert lhs.set == rhs.set and abs(lhs.value - rhs.value) <= 1e-12
        sl = game_natural(scalar_action(k, pf), ambient)
        sr = scalar_action(k, game_natural(pf, ambient))
        assert sl.set == sr.set and abs(sl.value - sr.value) <= 1e-12
        cases += 1

    assert cases >= 500, cases
    _report(10, f"norm + module axioms (a')-(e') + pairing linearity over "
                f"{cases} cases, all within 1e-12")


# ---------------------------------------------------------------------------
# 11 — text formats round-trip; the CLI is deterministic
# ---------------------------------------------------------------------------

def test_criterion_11_round_trips_and_determinism(capsys):
    for name in corpus_names():
        text = (CORPUS_DIR / f"{name}.qv").read_text()
        assert emit_dsl(parse_quiver_dsl(text)) == text, name

    def qv(name):
        return str(CORPUS_DIR / f"{name}.qv")

    commands = [
        ["validate", qv("a3_full")],
        ["validate", qv("square_half"), "--json", "--strict"],
        ["threads", qv("branch_relation"), "--json"],
        ["threads", qv("a6_full"), "--kind", "permitted"],
        ["koszul", qv("a4_full")],
        ["koszul", qv("kronecker"), "--json"],
        ["gldim", qv("a5_full")],
        ["gldim", qv("square_zero"), "--json"],
        ["gldim", qv("a4_free"), "--method", "integral", "--json"],
        ["integrate", "--fn", "2*indicator(0,1)+3*indicator(1,2)",
         "--domain", "0", "2", "--json"],
        ["integrate", "--fn", "sqrt(t)", "--domain", "0", "1", "--json"],
        ["integrate", "--fn", "1/t", "--domain", "0", "1", "--truncate"],
        ["stieltjes", "--fn", "t", "--domain", "1", "2", "--log-power", "4",
         "--json"],
        ["stieltjes", "--fn", "indicator(1,1.5)", "--domain", "1", "2"],
        ["elemfn", "--name", "K", "--tol", "1e-3", "--json"],
        ["elemfn", "--name", "asin", "--at", "0.5", "--json"],
        ["elemfn", "--name", "exp", "--at", "2", "--tol", "1e-4"],
        ["iposet-add", "--fn", "indicator(0,4)", "--first", "0", "2",
         "--second", "1", "3", "--json"],
    ]
    for argv in commands:
        rc1 = cli_main(list(argv))
        out1 = capsys.readouterr()
        rc2 = cli_main(list(argv))
        out2 = capsys.readouterr()
        assert rc1 == rc2 == 0, f"{argv}: rc {rc1}/{rc2}, stderr {out1.err!r}"
        assert out1.out == out2.out and out1.err == out2.err, \
            f"nondeterministic output for {argv}"
    _report(11, f"{len(corpus_names())} corpus files round-trip byte-"
                f"identically; {len(commands)} CLI invocations deterministic")
