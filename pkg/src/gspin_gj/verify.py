"""Seeded verification runs: each returns a Report-shaped dict."""
from __future__ import annotations

import random
import time
from fractions import Fraction

from . import gspin as G
from .arith import TruncSeries
from .clifford import CliffordAlgebra, filtration_degree, u_pairs
from .integrator import (
    DoublingSetup,
    betaT,
    betaT_expected,
    chary_check,
    check_support_claim,
    eis_section_character,
    exact_basic_function_check,
    fourier_ST,
    fourier_ST_expected,
    gj_series_direct,
    gj_series_recursive,
    measure_Uy,
    measure_Uy_closed,
    pullback_phi_check,
    random_primitive_T,
    random_px,
    random_scalar,
    random_y,
    random_y_prime_k,
    theorem1_sides,
    v1_setup,
)
from .lfun import SatakeData, basic_function_coeffs, parse_satake, random_satake, standard_L
from .quadspace import QSpace, default_nonsquare, parse_descriptor

SCHEMA = "gspin-gj/1"

DEFAULT_TRIALS = {
    "verify-theorem1": 3,
    "verify-basic-function": 3,
    "verify-meas": 100,
    "verify-fourier": 100,
    "verify-support-claim": 1000,
    "verify-filtration": 100,
    "verify-pullback-phi": 200,
    "verify-eis-character": 100,
    "verify-betaT": 100,
    "verify-chary": 100,
    "verify-k-invariance": 500,
    "lfunction-eval": 1,
    "basic-coeffs": 1,
}


def theorem_spaces(p: int) -> list[str]:
    """The eight space shapes of the main-identity acceptance run."""
    u = default_nonsquare(p)
    return [
        f"n=0,E=F,p={p}",
        f"n=0,E=split,p={p}",
        f"n=0,E=unram:u={u},p={p}",
        f"n=1,E=F,p={p}",
        f"n=1,E=split,p={p}",
        f"n=1,E=unram:u={u},p={p}",
        f"n=2,E=F,p={p}",
        f"n=2,E=split,p={p}",
    ]


def _satake_str(sd: SatakeData) -> str:
    return ",".join(str(x) for x in sd.a) + ";E=" + ",".join(str(x) for x in sd.evals)


def _report(command: str, S: QSpace, M: int, seed: int, trials: int) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "space": S.descriptor(),
        "p": S.p,
        "M": M,
        "seed": seed,
        "satake": [],
        "trials": trials,
        "failures": [],
        "series_lhs": None,
        "series_rhs": None,
        "pass": False,
        "wall_time_ms": 0,
    }


def _finish(rep: dict, t0: float, extra_ok: bool = True) -> dict:
    ok = not rep["failures"] and extra_ok
    if rep["series_lhs"] is not None and rep["series_lhs"] != rep["series_rhs"]:
        ok = False
    rep["pass"] = ok
    rep["wall_time_ms"] = int((time.perf_counter() - t0) * 1000)
    return rep


def _fail(rep: dict, inp, expected, actual):
    rep["failures"].append({"input": str(inp), "expected": str(expected), "actual": str(actual)})


def _samples(S: QSpace, rng, trials: int, satake: str | None) -> list[SatakeData]:
    if satake:
        return [parse_satake(satake, S)]
    return [random_satake(S, rng) for _ in range(trials)]


# -- series identities ---------------------------------------------------------------------


def verify_theorem1(S: QSpace, M: int = 4, seed: int = 0, trials: int = 3, satake: str | None = None,
                    mode: str = "both") -> dict:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    sds = _samples(S, rng, trials, satake)
    rep = _report("verify-theorem1", S, M, seed, len(sds))
    rep["mode"] = mode
    certified = True
    for k, sd in enumerate(sds):
        rep["satake"].append(_satake_str(sd))
        series = {}
        if mode in ("direct", "both"):
            res = gj_series_direct(sd, S, M)
            certified = certified and res.stability_certificate
            if not res.stability_certificate:
                _fail(rep, _satake_str(sd), "stability certificate", "; ".join(res.notes))
            series["direct"] = res.series
        if mode in ("recursive", "both"):
            series["recursive"] = gj_series_recursive(sd, S, M)
        if mode == "both" and series["direct"] != series["recursive"]:
            _fail(rep, _satake_str(sd) + " direct vs recursive", series["recursive"].as_strings(),
                  series["direct"].as_strings())
        I = series.get("direct", series.get("recursive"))
        lhs, rhs = theorem1_sides(sd, S, I)
        if lhs != rhs:
            _fail(rep, _satake_str(sd), rhs.as_strings(), lhs.as_strings())
        if k == 0:
            rep["series_lhs"] = lhs.as_strings()
            rep["series_rhs"] = rhs.as_strings()
    return _finish(rep, t0, certified)


def verify_basic_function(S: QSpace, M: int = 4, seed: int = 0, trials: int = 3, satake: str | None = None,
                          partial_sum_M: int = 10) -> dict:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    sds = _samples(S, rng, trials, satake)
    rep = _report("verify-basic-function", S, M, seed, len(sds))
    for k, sd in enumerate(sds):
        rep["satake"].append(_satake_str(sd))
        ok, lhs, rhs = exact_basic_function_check(sd, S, M)
        if not ok:
            _fail(rep, _satake_str(sd), rhs.as_strings(), lhs.as_strings())
        if k == 0:
            rep["series_lhs"], rep["series_rhs"] = lhs.as_strings(), rhs.as_strings()
    pp, pc = basic_function_coeffs(S.dim, S.p, partial_sum_M)
    for m in range(partial_sum_M + 1):
        if pp[m] != sum(pc[: m + 1]):
            _fail(rep, f"p' partial sum M={m}", sum(pc[: m + 1]), pp[m])
    return _finish(rep, t0)


def lfunction_eval(S: QSpace, M: int = 4, seed: int = 0, satake: str | None = None) -> dict:
    t0 = time.perf_counter()
    sd = _samples(S, random.Random(seed), 1, satake)[0]
    rep = _report("lfunction-eval", S, M, seed, 1)
    rep["satake"].append(_satake_str(sd))
    L = standard_L(sd, S, M)
    rep["series"] = L.as_strings()
    # re-expansion check: the product of the factors has constant term 1
    if L[0] != 1:
        _fail(rep, _satake_str(sd), "constant term 1", L[0])
    return _finish(rep, t0)


def basic_coeffs(S: QSpace, M: int = 4, seed: int = 0) -> dict:
    t0 = time.perf_counter()
    rep = _report("basic-coeffs", S, M, seed, 1)
    pp, pc = basic_function_coeffs(S.dim, S.p, M)
    rep["p_prime"] = [str(x) for x in pp]
    rep["p"] = [str(x) for x in pc]
    return _finish(rep, t0)


# -- lattice lemmas -------------------------------------------------------------------------


def _need_n(S: QSpace, k: int, command: str):
    if S.n < k:
        raise ValueError(f"{command} needs n >= {k} (got {S.descriptor()})")


def verify_meas(S: QSpace, M: int = 4, seed: int = 0, trials: int = 100) -> dict:
    _need_n(S, 1, "verify-meas")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-meas", S, M, seed, trials)
    _, alg1, _ = v1_setup(S)
    for _ in range(trials):
        y = random_y(alg1, rng)
        a, b = measure_Uy(y), measure_Uy_closed(y)
        if a != b:
            _fail(rep, y, b, a)
    return _finish(rep, t0)


def fourier_samples(S: QSpace, rng, trials: int, dropped: list | None = None):
    """(lambda, y, T, tag): valid samples, ones violating exactly one condition, and unrestricted ones.

    A tag that cannot be realised (T.y violations need V_1 isotropic) is
    dropped after repeated misses and recorded in ``dropped``.
    """
    _, alg1, _ = v1_setup(S)
    S1 = alg1.space
    p = S.p
    tags = ["valid", "lambda", "val_y+", "val_y-", "T.y", "random"]
    misses = dict.fromkeys(tags, 0)
    out = []
    while len(out) < trials:
        tag = tags[len(out) % len(tags)]
        T = random_primitive_T(S1, rng)
        if tag == "random":
            out.append((random_scalar(rng, p), random_y(alg1, rng), T, tag))
            continue
        y = random_y(alg1, rng, 0, 0, general=0.0)
        ty = S1.in_lattice(G.act_on_V(y, T))
        if int(y.g.val()) != 0 or ty != (tag != "T.y"):
            misses[tag] += 1
            if misses[tag] > 200:
                tags.remove(tag)
                if dropped is not None:
                    dropped.append(tag)
            continue
        misses[tag] = 0
        lam = random_scalar(rng, p, 0, 2)
        if tag == "lambda":
            lam = random_scalar(rng, p, -2, -1)
        elif tag == "val_y+":
            y = _scaled(y, p, 1)
        elif tag == "val_y-":
            y = _scaled(y, p, -1)
        out.append((lam, y, T, tag))
    return out


def verify_fourier(S: QSpace, M: int = 4, seed: int = 0, trials: int = 100) -> dict:
    _need_n(S, 1, "verify-fourier")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-fourier", S, M, seed, trials)
    nonzero = 0
    dropped: list[str] = []
    for lam, y, T, tag in fourier_samples(S, rng, trials, dropped):
        a, b = fourier_ST(S, lam, y, T), fourier_ST_expected(S, lam, y, T)
        nonzero += bool(a)
        if a != b:
            _fail(rep, (tag, lam, T, y), b, a)
    rep["nonzero"] = nonzero
    rep["unrealisable_tags"] = dropped
    return _finish(rep, t0)


def _random_x(S1: QSpace, rng, vmin=-2, vmax=2):
    p = S1.p
    return [Fraction(rng.randint(-4, 4)) * Fraction(p) ** rng.randint(vmin, vmax) for _ in range(S1.dim)]


def verify_support_claim(S: QSpace, M: int = 4, seed: int = 0, trials: int = 1000) -> dict:
    _need_n(S, 1, "verify-support-claim")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-support-claim", S, M, seed, trials)
    _, alg1, _ = v1_setup(S)
    true_count = 0
    for _ in range(trials):
        y = random_y(alg1, rng)
        lam = random_scalar(rng, S.p)
        x = _random_x(alg1.space, rng)
        ok, lhs, rhs = check_support_claim(S, x, lam, y)
        true_count += lhs
        if not ok:
            _fail(rep, (x, lam, y), rhs, lhs)
    rep["integral_count"] = true_count
    return _finish(rep, t0)


# -- group-theoretic lemmas ------------------------------------------------------------------


def verify_filtration(S: QSpace, M: int = 4, seed: int = 0, trials: int = 100) -> dict:
    _need_n(S, 1, "verify-filtration")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-filtration", S, M, seed, trials)
    alg = CliffordAlgebra(S)
    counts = {"parabolic": 0, "degree0": 0, "unipotent": 0, "unipotent_converse": 0}
    for k in range(1, S.n + 1):
        pairs = u_pairs(S, k)
        for _ in range(trials):
            g = G.random_parabolic(alg, k, rng)
            counts["parabolic"] += 1
            if filtration_degree(g.g, pairs) > 0:
                _fail(rep, ("P_U", k, g), "degree <= 0", filtration_degree(g.g, pairs))
            u = G.random_parabolic(alg, k, rng, unipotent_only=True)
            counts["unipotent"] += 1
            du = filtration_degree(u.g - alg.one(), pairs)
            if du is not None and du > -1:
                _fail(rep, ("N_U", k, u), "degree(n - 1) <= -1", du)
        found = 0
        while found < trials:
            h = G.puv_candidate(alg, k, rng)
            if filtration_degree(h.g, pairs) <= 0:
                found += 1
                if not G.stabilizes_U(h, k):
                    _fail(rep, ("degree<=0", k, h), "stabilizes U", False)
        counts["degree0"] += found
        found = 0
        while found < trials:
            u = G.unipotent_candidate(alg, k, rng)
            ok, _ = G.is_gspin(u.g)
            du = filtration_degree(u.g - alg.one(), pairs)
            if ok and (du is None or du <= -1):
                found += 1
                if not G.acts_unipotently(u, k):
                    _fail(rep, ("1+N(U,V)", k, u), "in N_U", False)
        counts["unipotent_converse"] += found
    rep["counts"] = counts
    return _finish(rep, t0)


def _scaled(h: G.GSpinElement, p: int, j: int) -> G.GSpinElement:
    pj = Fraction(p) ** j
    return G.GSpinElement(h.g * pj, h.nu * pj * pj)


def verify_pullback_phi(S: QSpace, M: int = 4, seed: int = 0, trials: int = 200) -> dict:
    """Pullback checks for W = V + V_0^- with V_0 = V_E; plus the r = 0 doubling when dim W <= 10."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-pullback-phi", S, M, seed, trials)
    setup = DoublingSetup(S, S.n)
    rep["dim_W"] = setup.W.dim
    for defect in setup.isometry_defects():
        _fail(rep, "embedding", "isometry", defect)
    for t in range(trials):
        side = "minus" if t % 2 == 0 else "plus"
        alg = setup.alg0m if side == "minus" else setup.alg0
        if rng.random() < 0.5:
            h = G.random_gspin(alg, rng, pairs=rng.randint(1, 2))
        else:
            h = G.random_gspin(alg, rng, pairs=1, lo=-1, hi=1)
        h = _scaled(h, S.p, rng.randint(-2, 2))
        ok, lhs, rhs = pullback_phi_check(setup, h, side)
        if not ok:
            _fail(rep, (side, h), rhs, lhs)
    if 2 * S.dim <= 10:
        dbl = DoublingSetup(S, 0)
        alg = dbl.alg
        for _ in range(max(1, trials // 4)):
            g = G.random_gspin(alg, rng, pairs=rng.randint(1, 2))
            if rng.random() < 0.5:
                g = G.random_integral_k(alg, rng) * g
            g = _scaled(g, S.p, rng.randint(-1, 1))
            if dbl.phi_X(dbl.iota_V(g.g)) != G.phi(g):
                _fail(rep, ("doubling", g), G.phi(g), not G.phi(g))
    return _finish(rep, t0)


def verify_eis_character(S: QSpace, M: int = 4, seed: int = 0, trials: int = 100) -> dict:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-eis-character", S, M, seed, trials)
    setup = DoublingSetup(S, S.n)
    for _ in range(trials):
        pe = random_px(setup, rng)
        alpha, det = eis_section_character(setup, pe)
        if alpha * alpha / pe.nu != 1 / det:
            _fail(rep, pe, 1 / det, alpha * alpha / pe.nu)
    return _finish(rep, t0)


def verify_betaT(S: QSpace, M: int = 4, seed: int = 0, trials: int = 100) -> dict:
    _need_n(S, 1, "verify-betaT")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-betaT", S, M, seed, trials)
    _, alg1, _ = v1_setup(S)
    nonzero = 0
    for _ in range(trials):
        y = random_y(alg1, rng)
        lam = random_scalar(rng, S.p)
        T = random_primitive_T(alg1.space, rng)
        a, b = betaT(S, lam, y, T), betaT_expected(S, lam, y, T)
        nonzero += bool(a)
        if a != b:
            _fail(rep, (lam, T, y), b, a)
    rep["nonzero"] = nonzero
    return _finish(rep, t0)


def verify_chary(S: QSpace, M: int = 4, seed: int = 0, trials: int = 100) -> dict:
    _need_n(S, 2, "verify-chary")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-chary", S, M, seed, trials)
    setup = DoublingSetup(S, 2)
    _, alg1, _ = v1_setup(S)
    for t in range(trials):
        lam = random_scalar(rng, S.p)
        if t % 2 == 0:
            y = random_y_prime_k(setup, alg1, rng)
            T = random_primitive_T(alg1.space, rng)
        else:
            y, T = random_y(alg1, rng), None
        ok, msg = chary_check(setup, lam, y, T)
        if not ok:
            _fail(rep, (lam, T, y), "agreement", msg)
    return _finish(rep, t0)


def verify_k_invariance(S: QSpace, M: int = 4, seed: int = 0, trials: int = 500) -> dict:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = _report("verify-k-invariance", S, M, seed, trials)
    alg = CliffordAlgebra(S)
    for _ in range(trials):
        g = G.random_gspin(alg, rng, pairs=rng.randint(1, 2))
        if rng.random() < 0.5:
            g = G.random_integral_k(alg, rng) * g
        g = _scaled(g, S.p, rng.randint(-1, 1))
        k = G.random_integral_k(alg, rng)
        base = G.phi(g)
        if G.phi(g * k) != base or G.phi(k * g) != base:
            _fail(rep, (g, k), base, (G.phi(g * k), G.phi(k * g)))
    return _finish(rep, t0)


COMMANDS = {
    "verify-theorem1": verify_theorem1,
    "verify-basic-function": verify_basic_function,
    "verify-meas": verify_meas,
    "verify-fourier": verify_fourier,
    "verify-support-claim": verify_support_claim,
    "verify-filtration": verify_filtration,
    "verify-pullback-phi": verify_pullback_phi,
    "verify-eis-character": verify_eis_character,
    "verify-betaT": verify_betaT,
    "verify-chary": verify_chary,
    "verify-k-invariance": verify_k_invariance,
    "lfunction-eval": lfunction_eval,
    "basic-coeffs": basic_coeffs,
}

# commands that need n >= k
MIN_N = {
    "verify-meas": 1, "verify-fourier": 1, "verify-support-claim": 1, "verify-filtration": 1,
    "verify-betaT": 1, "verify-chary": 2,
}


def run_suite(spaces: list[str], M: int = 4, seed: int = 0, trials: int | None = None) -> dict:
    """Every command on every applicable space; pass iff all sub-reports pass."""
    t0 = time.perf_counter()
    subs = []
    for desc in spaces:
        S = parse_descriptor(desc)
        for name, fn in COMMANDS.items():
            if S.n < MIN_N.get(name, 0):
                continue
            kw = {"M": M, "seed": seed}
            if name not in ("lfunction-eval", "basic-coeffs"):
                kw["trials"] = trials if trials is not None else DEFAULT_TRIALS[name]
            if name == "verify-pullback-phi" and S.dim + len(S.ve_indices) > 10:
                continue
            subs.append(fn(S, **kw))
    rep = {
        "schema": SCHEMA,
        "command": "suite",
        "space": ";".join(spaces),
        "M": M,
        "seed": seed,
        "trials": trials,
        "reports": subs,
        "failures": [
            {"input": f"{r['command']} {r['space']}", "expected": "pass", "actual": "fail"}
            for r in subs if not r["pass"]
        ],
    }
    rep["pass"] = not rep["failures"]
    rep["wall_time_ms"] = int((time.perf_counter() - t0) * 1000)
    return rep


__all__ = ["COMMANDS", "DEFAULT_TRIALS", "MIN_N", "SCHEMA", "run_suite", "theorem_spaces", "TruncSeries"]
