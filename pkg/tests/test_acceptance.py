"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import json
import subprocess
import sys
import time
from functools import lru_cache
from importlib import resources

import numpy as np
from conftest import record
from kvn import algebra as alg
from kvn import diagonal as dg
from kvn import extension as ext
from kvn import fixtures as fx
from kvn import gns as gn
from kvn import normed
from kvn._linalg import random_complex
from kvn.bounds import as_interval, lower, upper
from kvn.errors import BadCandidate, VerificationError

NORMS = (normed.L1, normed.L2, normed.LINF)


def instance(seed, norms=NORMS, complement=False):
    rng = np.random.default_rng(10_000 + seed)
    n = int(rng.integers(2, 11))
    k = int(rng.integers(1, n)) if complement else int(rng.integers(1, n + 1))
    rank = int(rng.integers(1, n + 1))
    norm = norms[seed % len(norms)]
    return ext.random_operator(n, k, norm, seed=seed, rank=rank)


@lru_cache(maxsize=None)
def extension_batch(count=200):
    t0 = time.perf_counter()
    out = []
    for s in range(count):
        op, P = instance(s)
        out.append((op, P, ext.krein_von_neumann(op)))
    return out, time.perf_counter() - t0


def test_criterion_01_extension_identity():
    batch, elapsed = extension_batch()
    worst = max(float(np.max(np.abs(res.A_N @ op.D - op.B))) for op, _, res in batch)
    ok = len(batch) >= 200 and worst <= 1e-9 and elapsed < 10
    record(1, "extension identity |A_N D - B|_max <= 1e-9 on 200 instances, < 10 s", ok,
           f"worst {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_02_variational_formula():
    worst, count = 0.0, 0
    for s in range(20):
        op, _, res = extension_batch()[0][s]
        rng = np.random.default_rng(s)
        for j in range(100):
            x = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
            q = float((x.conj() @ res.A_N @ x).real)
            o = ext.quadratic_form_oracle(op, x, seed=j)
            worst = max(worst, abs(q - o) / max(1.0, abs(q)))
            count += 1
    ok = count == 2000 and worst <= 1e-6
    record(2, "x^H A_N x matches the pattern-search oracle (oracle tolerance 1e-6 relative)", ok,
           f"{count} evaluations, worst {worst:.2e}")
    assert ok


def _rejected(op, res, C):
    try:
        return not ext.verify_minimality(op, res, C)
    except BadCandidate:
        return True


def test_criterion_03_minimality():
    dominated, total, rejected, adv = True, 0, 0, 0
    for s in range(10):
        op, P = instance(s, complement=True)
        res = ext.krein_von_neumann(op)
        rng = np.random.default_rng(s)
        cands = [P] + [ext.random_extension(op, res, seed=100 * s + j, scale=10.0 ** rng.uniform(-3, 1),
                                            rank=int(rng.integers(1, op.n + 1))) for j in range(100)]
        for C in cands:
            dominated &= bool(ext.verify_minimality(op, res, C))
            total += 1
        # adversarial: below A_N on the complement, non-hermitian, not extending
        Pc = ext.domain_complement_projector(op)
        S = Pc @ random_complex(rng, op.n, op.n)
        bad = [res.A_N - 0.1 * S @ S.conj().T,
               res.A_N + 1e-3 * (np.triu(np.ones((op.n, op.n)), 1)),
               res.A_N + 0.05 * np.outer(op.D[:, 0], op.D[:, 0].conj()),
               0.9 * res.A_N + 0.9 * Pc]
        for C in (bad[0], bad[1 + s % 3]):
            adv += 1
            rejected += _rejected(op, res, C)
    ok = dominated and total >= 1000 and rejected == adv and adv >= 20
    record(3, "100 random extensions per instance dominate A_N; 20 adversarial candidates rejected", ok,
           f"{total} candidates, {rejected}/{adv} rejected")
    assert ok


def test_criterion_04_norm_formula():
    worst, overlaps, n_inf = 0.0, True, 0
    for s in range(60):
        op, _, res = extension_batch()[0][s]
        M = ext.schwarz_bound(op, res)
        nrm = normed.operator_norm(res.A_N, op.space)
        if op.space.norm_tag == normed.LINF:
            n_inf += 1
            overlaps &= as_interval(nrm).overlaps(as_interval(M), rtol=1e-9)
        else:
            e = ext.extension_norm(op, res)
            worst = max(worst, abs(float(e) - float(M)) / max(1.0, abs(float(M))))
    ok = worst <= 1e-6 and overlaps and n_inf > 0
    record(4, "|A_N| = schwarz_bound (1e-6 relative on l1/l2, interval overlap on linf)", ok,
           f"worst {worst:.2e}, {n_inf} linf overlaps {'hold' if overlaps else 'fail'}")
    assert ok


def test_criterion_05_closed_range_equivalence():
    worst = 0.0
    for s in range(30):
        op, _, res = extension_batch()[0][s]
        if res.rank_G == 0:
            continue
        Mu, Mpu = upper(res.M_min), upper(res.Mprime_min)
        rng = np.random.default_rng(s)
        for j in range(100):
            if j % 2:
                c = random_complex(rng, op.k)
                x, Ax = op.D @ c, op.B @ c
            else:
                x = random_complex(rng, op.n)
                Ax = res.A_N @ x
            q = float(np.vdot(x, Ax).real)
            d2 = normed.dual_norm(op.space, Ax) ** 2
            if q <= 1e-12 * max(1.0, d2):
                continue
            worst = max(worst, (d2 / q) / Mu - 1, (q / d2) / Mpu - 1)
    ok = worst <= 1e-6
    record(5, "sampled dual_norm(Ax)^2/<Ax|x> <= M_min and reciprocal <= Mprime_min", ok,
           f"largest relative excess {worst:.2e}")
    assert ok


def test_criterion_06_range_chain():
    batch, _ = extension_batch()
    failures = 0
    for op, _, res in batch:
        try:
            ext.range_chain_check(op, res)
        except ext.RangeMismatch:
            failures += 1
    ok = failures == 0
    record(6, "range chain ranks and inclusions on every instance", ok, f"{len(batch) - failures}/{len(batch)}")
    assert ok


def test_criterion_07_diagonal_model():
    details, ok = [], True
    sizes = (2, 4, 8, 16, 32)
    for name, d, sup_s in fx.diagonal_fixtures():
        bounds = []
        mp = {}
        for n in sizes:
            op = dg.truncate(d, n)
            res = ext.krein_von_neumann(op)
            bounds.append(ext.schwarz_bound(op, res))
            mp[n] = res.Mprime_min
        conv = all(b2 >= b1 - 1e-12 for b1, b2 in zip(bounds, bounds[1:])) and abs(bounds[-1] - sup_s) <= 1e-12
        stab, _ = dg.net_stabilizes(d, 0.25)
        grows = lower(mp[32]) > 2 * upper(mp[8])
        steady = upper(mp[32]) <= upper(mp[8]) * (1 + 1e-6)
        closed_ok = (not grows and steady) if dg.has_closed_range_extension(d) else grows
        good = conv and stab == dg.is_compact_extension(d) and closed_ok
        ok &= good
        details.append(f"{name}: {'ok' if good else 'mismatch'}")
    record(7, "diagonal truncations converge to sup s; compactness and closed range match the oracles", ok,
           "; ".join(details))
    assert ok


def test_criterion_08_gns():
    details, ok = [], True
    for f in fx.gns_fixtures():
        try:
            data = gn.gns(f.F, check=True)
            recon = max(abs(data.state(f.F.D[:, j]) - f.F.values[j]) for j in range(f.F.k))
            good = recon <= 1e-9
        except VerificationError as exc:
            good, recon = False, str(exc)
        ok &= good
        details.append(f"{f.name}: {recon if isinstance(recon, str) else f'{recon:.1e}'}")
    record(8, "GNS reconstruction, *-homomorphism and cyclicity on all fixtures", ok, "; ".join(details))
    assert ok


def test_criterion_09_minimal_representable_extension():
    details, ok = [], True
    for f in fx.representable_fixtures():
        fN, _, cert = gn.minimal_extension(f.F, samples=50, seed=1)
        cands = gn.representable_candidates(f.F, fN, count=50, seed=2)
        minimal = all(gn.verify_functional_minimality(f.F, fN, c, samples=50, seed=3) for c in cands)
        closed = f.expected_fN is None or np.max(np.abs(fN - f.expected_fN)) <= 1e-9
        good = cert.ok and minimal and closed and len(cands) >= 50
        ok &= good
        details.append(f"{f.name}: {'ok' if good else 'fail'}")
    record(9, "f_N extends f, is representable, satisfies the sup formula and is below 50 candidates", ok,
           "; ".join(details))
    assert ok


def _corpus_path(name):
    return str(resources.files("kvn") / "corpus" / name)


def test_criterion_10_counterexample():
    path = _corpus_path("10_extend_fn_m2_counterexample.json")
    runs = [subprocess.run([sys.executable, "-m", "kvn", "extend-fn", "--input", path],
                           capture_output=True, text=True) for _ in range(2)]
    rep = json.loads(runs[0].stdout)
    w = rep.get("witness", {})
    a = np.array(w.get("a", [[0, 0]] * 4), dtype=float)
    ok = (all(r.returncode == 2 for r in runs) and runs[0].stdout == runs[1].stdout
          and rep["error"] == "NotRepresentable" and abs(complex(*w["f(a)"])) > 0.5
          and abs(w["f(a*a)"]) <= 1e-12 and np.allclose(a[:, 0], [0, 0, 1, 0]))
    record(10, "M2 first-column counterexample refused with kernel witness, exit 2, byte-stable", ok,
           f"exit codes {[r.returncode for r in runs]}")
    assert ok


def test_criterion_11_unital_and_approximate_units():
    worst = 0.0
    for f in fx.representable_fixtures():
        fN, _, _ = gn.minimal_extension(f.F, samples=0, check=False)
        fu = gn.unital_minimal_extension(f.F, f.left_unit)
        worst = max(worst, float(np.max(np.abs(fu - fN))))
    F = fx.discrete_measure().F
    rep = gn.approximate_unit_limit(F, gn.indicator_net(3, [0, 1], steps=8))
    ok = worst <= 1e-9 and rep.monotone and rep.final < 1e-9
    record(11, "conj(A_N e) = f_N for left units; approximate-unit deviations decrease to < 1e-9", ok,
           f"worst {worst:.1e}; deviations {[round(d, 6) for d in rep.deviations]}")
    assert ok


def _hermitian_sample(a, rng, target):
    y = rng.standard_normal(a.dim) + 1j * rng.standard_normal(a.dim)
    h = 0.5 * (y + a.involute(y))
    r = alg.spectral_radius(a, h)
    return h * (target / r) if r > 0 else h


def test_criterion_12_spectral_radius_and_square_root():
    worst_ineq = max(gn.spectral_radius_inequality(f.F, pairs=100, seed=7) for f in fx.representable_fixtures())
    rng = np.random.default_rng(3)
    algebras = [alg.matrix_algebra(1), alg.cyclic_group(2), alg.symmetric_group(3), alg.matrix_algebra(2),
                alg.block_algebra((2, 1)), alg.function_algebra(3), alg.unitization(alg.cyclic_group(2))]
    worst_res = worst_herm = 0.0
    for a in algebras:
        for _ in range(10):
            h = _hermitian_sample(a, rng, rng.uniform(0.0, 0.9))
            sr = alg.square_root_lemma(a, h)
            worst_res = max(worst_res, a.norm(2 * sr.y - a.multiply(sr.y, sr.y) - h))
            worst_herm = max(worst_herm, a.norm(a.involute(sr.y) - sr.y))
    ok = worst_ineq <= 1e-9 and worst_res <= 1e-8 and worst_herm <= 1e-8
    record(12, "f(a*x*xa) <= r(x*x) f(a*a) on 100 pairs per fixture; square-root residual <= 1e-8", ok,
           f"max violation {worst_ineq:.1e}, residual {worst_res:.1e}, hermitian defect {worst_herm:.1e}")
    assert ok


def test_criterion_13_cstar_norm_chain():
    details, ok = [], True
    for f in (fx.block_trace(), fx.block_state()):
        chain = gn.cstar_ideal_norm_check(f.F)
        good = chain.consistent(1e-6)
        ok &= good
        details.append(f"{f.name}: {chain.f_norm:.9g} {chain.zeta_norm_sq:.9g} "
                       f"[{lower(chain.AN_norm):.9g}, {upper(chain.AN_norm):.9g}] {chain.fN_norm:.9g}")
    record(13, "|f| = |zeta|^2 = |A_N| = |f_N| on both block fixtures (1e-6 relative)", ok, "; ".join(details))
    assert ok


def test_criterion_14_cli_corpus():
    t0 = time.perf_counter()
    run = subprocess.run([sys.executable, "-m", "kvn", "corpus"], capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    ok = run.returncode == 0 and elapsed < 60 and "FAIL" not in run.stdout
    record(14, "kvn corpus exits 0 with every fixture passing in < 60 s", ok,
           f"{run.stdout.strip().splitlines()[-1] if run.stdout else run.stderr.strip()}; wall {elapsed:.1f} s")
    assert ok
