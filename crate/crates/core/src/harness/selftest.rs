//! Deterministic verification suites behind `selftest` and the
//! acceptance test target. Every suite runs at fixed seeds; `Quick`
//! scales instance counts down, `Full` runs the complete load.

use crate::adversarial::{self, CoordinatePolicy};
use crate::agreement::{self, LiftingMode, WordObject};
use crate::ball::{syndrome_weight_table, BallQuery, Strategy};
use crate::codes::{uniform_image_test, LinearCode};
use crate::field::Field;
use crate::geometry::{self, WordCurve, WordSpace};
use crate::harness::config::{Enumeration, ExperimentConfig, Mode};
use crate::harness::records;
use crate::harness::runners;
use crate::linalg::{weight, Matrix, Vector};
use crate::planner;
use crate::seeds;
use crate::witness::{
    self, DesignKind, Elimination, GapHypothesis, ThresholdVerdict,
};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

const CAP: u64 = 400_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub checks: u64,
    pub failures: Vec<String>,
    pub wall_ms: u128,
}

impl SuiteResult {
    fn new(name: &str) -> SuiteResult {
        SuiteResult {
            name: name.to_string(),
            pass: true,
            checks: 0,
            failures: Vec::new(),
            wall_ms: 0,
        }
    }

    fn fail(&mut self, msg: String) {
        self.pass = false;
        if self.failures.len() < 8 {
            self.failures.push(msg);
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(msg());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub level: Level,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

/// Runs every suite at the given level.
pub fn selftest(level: Level) -> SelftestReport {
    let suites = vec![
        suite_line_ball_bound(level),
        suite_degenerate_lines(level),
        suite_membership_equivalence(level),
        suite_no_slack(level),
        suite_rank_reduction(level),
        suite_space_curve_bounds(level),
        suite_agreement_equivalence(level),
        suite_uniform_image(level),
        suite_planner(level),
        suite_lifting(level),
        suite_determinism(level),
        suite_threshold_soak(level),
    ];
    let pass = suites.iter().all(|s| s.pass);
    SelftestReport {
        level,
        suites,
        pass,
    }
}

fn timed(mut result: SuiteResult, started: std::time::Instant) -> SuiteResult {
    result.wall_ms = started.elapsed().as_millis();
    result
}

fn gf(q: u64) -> Arc<Field> {
    Arc::new(Field::new(q).unwrap())
}

/// Lines not contained in the big ball keep at most
/// (E⁺+1)/(E⁺−E+1) of their points in the small one — exhaustively,
/// every line over small grids.
pub fn suite_line_ball_bound(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("line-ball-bound-exhaustive");
    let n_max = match level {
        Level::Quick => 4,
        Level::Full => 5,
    };
    for q in [2u64, 3] {
        let f = gf(q);
        for n in 1..=n_max {
            let total = q.pow(n as u32);
            let mut weights = vec![0usize; q as usize];
            for acode in 0..total {
                for bcode in 1..total {
                    // decode and evaluate all q points once
                    let decode = |mut c: u64| -> Vector {
                        let mut v = vec![0u32; n];
                        for slot in v.iter_mut() {
                            *slot = (c % q) as u32;
                            c /= q;
                        }
                        v
                    };
                    let a = decode(acode);
                    let b = decode(bcode);
                    let mut maxw = 0usize;
                    for (alpha, slot) in weights.iter_mut().enumerate() {
                        let mut w = 0usize;
                        for i in 0..n {
                            if f.add(a[i], f.mul(alpha as u32, b[i])) != 0 {
                                w += 1;
                            }
                        }
                        *slot = w;
                        maxw = maxw.max(w);
                    }
                    for eplus in 0..=n {
                        if maxw <= eplus {
                            continue; // contained in B_{E+}
                        }
                        for e in 0..=eplus {
                            let count = weights.iter().filter(|&&w| w <= e).count();
                            let bound = (eplus + 1) / (eplus - e + 1);
                            out.check(count <= bound, || {
                                format!(
                                    "q={q} n={n} a={a:?} b={b:?} E={e} E+={eplus}: {count} > {bound}"
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    timed(out, started)
}

/// Degenerate syndrome lines (dim span ≤ 1) have member counts forced
/// into {0, 1, q} at every radius, on random codes.
pub fn suite_degenerate_lines(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("degenerate-line-counts");
    let codes = match level {
        Level::Quick => 20,
        Level::Full => 100,
    };
    let mut rng = seeds::rng(0xdead, "degenerate-lines", 0);
    for trial in 0..codes {
        let q = [2u64, 3, 4, 5][trial % 4];
        let r = rng.random_range(1..=5usize);
        let n = rng.random_range(r.max(3)..=10usize);
        let code = LinearCode::sample(gf(q), n, r, 7000 + trial as u64);
        let f = code.field();
        let table = match syndrome_weight_table(&code, n, CAP) {
            Ok(t) => t,
            Err(e) => {
                out.fail(format!("table failed: {e}"));
                continue;
            }
        };
        // singleton lines {s0}: count at radius E is 0 or 1 by
        // construction; tallied via the leader weights
        for s0 in crate::combin::Tuples::new(q, r) {
            let w = table.leader_weight(&s0);
            for e in 0..=n {
                let count = u64::from(w.is_some_and(|lw| lw <= e));
                out.check(count <= 1, || format!("singleton count {count}"));
            }
        }
        // through-origin lines {γ·s1}: count must be 1 or q
        for lead in 0..r {
            for tail in crate::combin::Tuples::new(q, r - lead - 1) {
                let mut s1 = vec![0u32; r];
                s1[lead] = 1;
                s1[lead + 1..].copy_from_slice(&tail);
                let gamma_weights: Vec<Option<usize>> = f
                    .elements()
                    .map(|g| {
                        let point: Vector = s1.iter().map(|&v| f.mul(g, v)).collect();
                        table.leader_weight(&point)
                    })
                    .collect();
                for e in 0..=n {
                    let count = gamma_weights
                        .iter()
                        .filter(|w| w.is_some_and(|lw| lw <= e))
                        .count() as u64;
                    out.check(count == 1 || count == q, || {
                        format!("q={q} n={n} r={r} s1={s1:?} E={e}: count {count}")
                    });
                }
            }
        }
        // spot-check the classifier against explicit sets
        for e in [0, n / 2] {
            let set = table.set_at(&code, e);
            let s1: Vector = (0..r).map(|_| rng.random_range(0..f.q())).collect();
            if weight(&s1) == 0 {
                continue;
            }
            let line = geometry::SyndromeLine::new(f, vec![0; r], s1);
            if let geometry::LineClass::Degenerate {
                predicted, actual, ..
            } = geometry::classify_line(f, &line, &set)
            {
                out.check(predicted == actual, || {
                    format!("classifier mismatch {predicted} vs {actual}")
                });
            }
        }
    }
    timed(out, started)
}

/// d(y, C) ≤ E ⟺ the syndrome of y is an H_E member, on random
/// (code, word, radius) draws.
pub fn suite_membership_equivalence(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("membership-distance-equivalence");
    let cases = match level {
        Level::Quick => 200,
        Level::Full => 1000,
    };
    let mut rng = seeds::rng(0x2b2b, "membership", 0);
    for trial in 0..cases {
        let q = [2u64, 3, 4, 5][trial % 4];
        let r = rng.random_range(2..=4usize);
        let n = rng.random_range(6..=9usize);
        let code = LinearCode::sample(gf(q), n, r, 9000 + trial as u64);
        let y: Vector = (0..n)
            .map(|_| rng.random_range(0..code.field().q()))
            .collect();
        let e = rng.random_range(0..=n);
        let (d, nearest) = match code.distance_to_code(&y, CAP) {
            Ok(v) => v,
            Err(err) => {
                out.fail(format!("distance failed: {err}"));
                continue;
            }
        };
        out.check(code.contains(&nearest), || "nearest not a codeword".into());
        let s = code.syndrome(&y).unwrap();
        let member = BallQuery::new(&code, e, Strategy::Auto)
            .and_then(|qy| qy.member(&s, CAP))
            .map(|w| w.is_some());
        match member {
            Ok(m) => out.check(m == (d <= e), || {
                format!("q={q} n={n} r={r} E={e}: d={d} but member={m}")
            }),
            Err(err) => out.fail(format!("membership failed: {err}")),
        }
    }
    timed(out, started)
}

/// The zero-slack pair: exact weight profile on random parameter draws,
/// plus assembled certificates on codes with verified distance.
pub fn suite_no_slack(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("no-slack-construction");
    let (draws, certs_per_radius) = match level {
        Level::Quick => (30, 2),
        Level::Full => (100, 5),
    };
    let mut rng = seeds::rng(0x3c3c, "no-slack", 0);
    for trial in 0..draws {
        let q = [3u64, 4, 5, 7, 8, 9, 11][trial % 7];
        let f = gf(q);
        let n = rng.random_range(4..=16usize);
        let e = rng.random_range(1..n - 1);
        let kmax = (e + 1).min(q as usize - 1);
        let k = rng.random_range(1..=kmax);
        let mut alphas: Vec<u32> = f.elements().collect();
        use rand::seq::SliceRandom;
        alphas.shuffle(&mut rng);
        alphas.truncate(k);
        let policy = if trial % 2 == 0 {
            CoordinatePolicy::Prefix
        } else {
            CoordinatePolicy::Seeded(trial as u64)
        };
        match adversarial::build_no_slack_pair(&f, n, e, &alphas, policy) {
            Ok(inst) => {
                // constructor re-verifies; recount the exact profile
                let at_e = f
                    .elements()
                    .filter(|&a| weight(&inst.eval(&f, a)) == e)
                    .count();
                let at_e1 = f
                    .elements()
                    .filter(|&a| weight(&inst.eval(&f, a)) == e + 1)
                    .count();
                out.check(at_e == k && at_e1 == q as usize - k, || {
                    format!("profile {at_e}/{at_e1} for q={q} n={n} E={e} K={k}")
                });
            }
            Err(err) => out.fail(format!("build failed: {err}")),
        }
    }
    // assembled certificates at E = 1 and E = 2
    for (e, q, n, r) in [(1usize, 8u64, 14usize, 10usize), (2, 9, 16, 12)] {
        let f = gf(q);
        for i in 0..certs_per_radius {
            let seed = 40_000 + (e * 100 + i) as u64;
            let code = match adversarial::find_code_with_distance(
                Arc::clone(&f),
                n,
                r,
                2 * e + 2,
                100,
                seed,
                CAP,
            ) {
                Ok(c) => c,
                Err(err) => {
                    out.fail(format!("no code with d >= {} at E={e}: {err}", 2 * e + 2));
                    continue;
                }
            };
            let k = (e + 1).min(q as usize - 1).min(3);
            let alphas: Vec<u32> = (0..k as u32).collect();
            let inst = adversarial::build_no_slack_pair(&f, n, e, &alphas, CoordinatePolicy::Prefix)
                .expect("parameters admissible");
            let set = BallQuery::new(&code, e, Strategy::Auto)
                .and_then(|qy| qy.enumerate(CAP))
                .expect("desk-scale enumeration");
            match adversarial::certify_violation(&code, &inst, &set, CAP) {
                Ok(cert) => {
                    out.check(cert.verify(&code, &set).is_ok(), || {
                        "certificate failed re-verification".into()
                    });
                    out.check(cert.members.len() >= k, || "too few members".into());
                }
                Err(err) => out.fail(format!("certification failed: {err}")),
            }
        }
    }
    timed(out, started)
}

/// Synthetic witnesses across kinds and excess ranks: single reduction
/// steps drop the rank, preserve the predicate, and meet the retained
/// count certificate; full reduction recovers an exact parametrization.
pub fn suite_rank_reduction(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("rank-reduction");
    let target_witnesses = match level {
        Level::Quick => 40,
        Level::Full => 200,
    };
    let kinds = [
        DesignKind::Line,
        DesignKind::Space { m: 2 },
        DesignKind::Curve { degree: 2 },
    ];
    let mut produced = 0u64;
    let mut attempt = 0u64;
    while produced < target_witnesses && attempt < target_witnesses * 3 {
        attempt += 1;
        let kind = kinds[(attempt % 3) as usize];
        let delta = 1 + (attempt / 3) % 3; // t − h ∈ {1, 2, 3}
        let q = [7u64, 8, 9][(attempt % 3) as usize];
        let n = 10 + (attempt % 5) as usize;
        let e = 3usize;
        let code = LinearCode::sample(gf(q), n, 3, 60_000 + attempt);
        let h = kind.arity();
        let t = h + delta as usize;
        let threshold = kind.degeneracy_threshold(q) as usize;
        let k_points = match kind {
            DesignKind::Space { .. } => (threshold + delta as usize + 5).min(16),
            _ => (t + 3).min(q as usize),
        };
        if k_points < t {
            continue;
        }
        let w = match witness::synth_witness(&code, kind, t, k_points, e, attempt, CAP) {
            Ok(w) => w,
            Err(_) => continue,
        };
        produced += 1;
        let f = code.field();
        let d_lower = code
            .min_distance(CAP)
            .ok()
            .and_then(|dd| dd.finite())
            .unwrap_or(1);

        // one step
        match witness::reduce_rank_once(&code, &w, d_lower) {
            Ok((reduced, cert)) => {
                out.check(
                    matches!(cert.eliminated, Elimination::Eliminated { .. }),
                    || "expected an eliminated codeword".into(),
                );
                out.check(cert.rank_after < cert.rank_before, || {
                    format!("rank did not drop: {cert:?}")
                });
                out.check(witness::verify_witness(&code, &reduced).is_ok(), || {
                    "reduced witness no longer verifies".into()
                });
                out.check(
                    cert.retained.len() >= cert.certified_minimum(w.k()),
                    || format!("retained below certificate: {cert:?}"),
                );
                if let Elimination::Eliminated {
                    codeword,
                    support_size,
                } = &cert.eliminated
                {
                    out.check(code.contains(codeword), || {
                        "eliminated vector is not a codeword".into()
                    });
                    out.check(*support_size >= d_lower, || {
                        format!("eliminated support {support_size} below distance {d_lower}")
                    });
                }
            }
            Err(err) => out.fail(format!("reduce_rank_once failed: {err}")),
        }

        // all the way down
        match witness::reduce_to_base(&code, &w, d_lower) {
            Ok(base) => {
                out.check(base.witness.rank(f) == w.target.h(), || {
                    "final rank is not the base dimension".into()
                });
                for (a, s) in base
                    .coefficients
                    .iter()
                    .zip(base.witness.target.coefficients())
                {
                    out.check(&code.syndrome(a).unwrap() == s, || {
                        "coefficient syndrome mismatch".into()
                    });
                }
                let mut k = w.k();
                for cert in &base.chain {
                    out.check(cert.retained.len() >= cert.certified_minimum(k), || {
                        "chain certificate violated".into()
                    });
                    k = cert.retained.len();
                }
            }
            Err(err) => out.fail(format!("reduce_to_base failed ({kind:?}, t={t}): {err}")),
        }
    }
    out.check(produced >= target_witnesses, || {
        format!("only synthesized {produced}/{target_witnesses} witnesses")
    });
    timed(out, started)
}

/// Exhaustive coefficient grids for affine spaces and curves: when the
/// support exceeds E⁺, the member count stays within the exact rational
/// bound; plus random larger instances.
pub fn suite_space_curve_bounds(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("space-curve-ball-bounds");
    let (n_max, random_cases) = match level {
        Level::Quick => (3usize, 200u64),
        Level::Full => (5, 1000),
    };
    let q = 3u64;
    let f = gf(q);
    // exhaustive m-space grids, m ∈ {1, 2}
    for m in 1..=2usize {
        for n in 1..=n_max {
            let arity = m + 1;
            for flat in crate::combin::Tuples::new(q, n * arity) {
                let coeffs: Vec<&[u32]> = flat.chunks(n).collect();
                let mut weights = Vec::with_capacity((q as usize).pow(m as u32));
                for beta in crate::combin::Tuples::new(q, m) {
                    let mut w = 0usize;
                    for i in 0..n {
                        let mut v = coeffs[0][i];
                        for (bi, c) in beta.iter().zip(&coeffs[1..]) {
                            if *bi != 0 && c[i] != 0 {
                                v = f.add(v, f.mul(*bi, c[i]));
                            }
                        }
                        if v != 0 {
                            w += 1;
                        }
                    }
                    weights.push(w);
                }
                let supp = (0..n)
                    .filter(|&i| coeffs.iter().any(|c| c[i] != 0))
                    .count();
                let qpow = q.pow((m - 1) as u32);
                for eplus in 0..=n {
                    if supp <= eplus {
                        continue;
                    }
                    for e in 0..=eplus {
                        let count = weights.iter().filter(|&&w| w <= e).count() as u64;
                        // count ≤ (E⁺+1)/(E⁺−E+1)·q^{m−1}
                        let ok = count as u128 * (eplus - e + 1) as u128
                            <= (eplus + 1) as u128 * qpow as u128;
                        out.check(ok, || {
                            format!("space m={m} n={n} {flat:?} E={e} E+={eplus}: count {count}")
                        });
                    }
                }
            }
        }
    }
    // exhaustive curve grids, degree ∈ {1, 2}
    for degree in 1..=2usize {
        for n in 1..=n_max {
            let arity = degree + 1;
            for flat in crate::combin::Tuples::new(q, n * arity) {
                let coeffs: Vec<Vector> = flat.chunks(n).map(|c| c.to_vec()).collect();
                let curve = WordCurve {
                    coeffs: coeffs.clone(),
                };
                let supp = (0..n)
                    .filter(|&i| coeffs.iter().any(|c| c[i] != 0))
                    .count();
                let weights: Vec<usize> = f
                    .elements()
                    .map(|a| weight(&curve.eval(&f, a)))
                    .collect();
                for eplus in 0..=n {
                    if supp <= eplus {
                        continue;
                    }
                    for e in 0..=eplus {
                        let count = weights.iter().filter(|&&w| w <= e).count() as u64;
                        let ok = count as u128 * (eplus - e + 1) as u128
                            <= (degree as u128) * (eplus + 1) as u128;
                        out.check(ok, || {
                            format!("curve deg={degree} n={n} {flat:?} E={e} E+={eplus}: {count}")
                        });
                    }
                }
            }
        }
    }
    // random larger instances over GF(5)
    let f5 = gf(5);
    let mut rng = seeds::rng(0x6a6a, "space-curve-random", 0);
    for _ in 0..random_cases {
        let n = rng.random_range(6..=8usize);
        let space = WordSpace {
            base: (0..n).map(|_| rng.random_range(0..5u32)).collect(),
            dirs: (0..2)
                .map(|_| (0..n).map(|_| rng.random_range(0..5u32)).collect())
                .collect(),
        };
        let curve = WordCurve {
            coeffs: (0..3)
                .map(|_| (0..n).map(|_| rng.random_range(0..5u32)).collect())
                .collect(),
        };
        for eplus in 0..n {
            for e in 0..=eplus {
                let sc = geometry::space_ball_count(&f5, &space, e, eplus, CAP).unwrap();
                if sc.supp_size > eplus {
                    out.check(sc.bound_holds(), || format!("space {space:?} {sc:?}"));
                }
                let cc = geometry::curve_ball_count(&f5, &curve, e, eplus).unwrap();
                if cc.rowwt > eplus {
                    out.check(cc.bound_holds(), || format!("curve {curve:?} {cc:?}"));
                }
            }
        }
    }
    timed(out, started)
}

/// The support-restricted CA decision equals the brute-force search
/// over codeword tuples, exhaustively on small grids and sampled on
/// larger ones.
pub fn suite_agreement_equivalence(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("agreement-reformulation-equivalence");
    let (stride, curve_cases) = match level {
        Level::Quick => (7usize, 200u64),
        Level::Full => (1, 1000),
    };
    // exhaustive m = 1 grid: q=2, n=6, r=3
    {
        let code = LinearCode::sample(gf(2), 6, 3, 77_000);
        let words: Vec<Vector> = crate::combin::Tuples::new(2, 6).collect();
        for (i, u0) in words.iter().enumerate() {
            if i % stride != 0 {
                continue;
            }
            for (j, u1) in words.iter().enumerate() {
                if j % stride != 0 {
                    continue;
                }
                let obj = WordObject::Space(WordSpace {
                    base: u0.clone(),
                    dirs: vec![u1.clone()],
                });
                for eplus in 0..=3usize {
                    match agreement::reformulation_crosscheck(&code, &obj, eplus, CAP) {
                        Ok(rep) => out.check(rep.agree, || {
                            format!("m=1 u0={u0:?} u1={u1:?} E+={eplus}: {rep:?}")
                        }),
                        Err(err) => out.fail(format!("crosscheck failed: {err}")),
                    }
                }
            }
        }
    }
    // exhaustive m = 2 grid: q=2, n=5, r=3
    {
        let code = LinearCode::sample(gf(2), 5, 3, 77_001);
        let words: Vec<Vector> = crate::combin::Tuples::new(2, 5).collect();
        for (i, u0) in words.iter().enumerate() {
            if i % stride != 0 {
                continue;
            }
            for (j, u1) in words.iter().enumerate() {
                if j % (stride * 2) != 0 {
                    continue;
                }
                for (k, u2) in words.iter().enumerate() {
                    if k % (stride * 2) != 0 {
                        continue;
                    }
                    let obj = WordObject::Space(WordSpace {
                        base: u0.clone(),
                        dirs: vec![u1.clone(), u2.clone()],
                    });
                    for eplus in [0usize, 1, 2] {
                        match agreement::reformulation_crosscheck(&code, &obj, eplus, CAP) {
                            Ok(rep) => out.check(rep.agree, || {
                                format!("m=2 ({i},{j},{k}) E+={eplus}: {rep:?}")
                            }),
                            Err(err) => out.fail(format!("crosscheck failed: {err}")),
                        }
                    }
                }
            }
        }
    }
    // sampled degree-2 curves: q=3, n=5, r=3
    {
        let code = LinearCode::sample(gf(3), 5, 3, 77_002);
        let mut rng = seeds::rng(0x7e7e, "agreement-curves", 0);
        for _ in 0..curve_cases {
            let coeffs: Vec<Vector> = (0..3)
                .map(|_| (0..5).map(|_| rng.random_range(0..3u32)).collect())
                .collect();
            let obj = WordObject::Curve(WordCurve { coeffs });
            let eplus = rng.random_range(0..=3usize);
            match agreement::reformulation_crosscheck(&code, &obj, eplus, CAP) {
                Ok(rep) => out.check(rep.agree, || format!("curve E+={eplus}: {rep:?}")),
                Err(err) => out.fail(format!("crosscheck failed: {err}")),
            }
        }
    }
    timed(out, started)
}

/// Full-column-rank matrices push uniform H to a uniform image: every
/// outcome frequency within 5σ of samples·q^{−rt}.
pub fn suite_uniform_image(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("uniform-image-frequencies");
    let samples = match level {
        Level::Quick => 4000,
        Level::Full => 10_000,
    };
    for q in [2u64, 3] {
        let f = gf(q);
        for r in [1usize, 2] {
            for t in [1usize, 2] {
                let n = 4;
                // full column rank; the second column mixes coordinates
                let mut cols = vec![vec![0u32; n]; t];
                cols[0][0] = 1;
                if t == 2 {
                    cols[1][1] = 1;
                    cols[1][0] = 1;
                }
                let x = Matrix::from_cols(cols);
                match uniform_image_test(&f, &x, r, samples, 4242 + q + (r * 10 + t) as u64, 100_000)
                {
                    Ok(rep) => {
                        out.check(rep.max_deviation_sigmas < 5.0, || {
                            format!(
                                "q={q} r={r} t={t}: deviation {:.2}σ",
                                rep.max_deviation_sigmas
                            )
                        });
                        out.check(rep.counts.len() as u64 == q.pow((r * t) as u32), || {
                            "table size mismatch".into()
                        });
                    }
                    Err(err) => out.fail(format!("uniform image failed: {err}")),
                }
            }
        }
    }
    timed(out, started)
}

/// Entropy identities, the ball-volume entropy bound grid, the
/// governing-exponent sign audits, a worked plan, and ceil/floor
/// stability under precision doubling.
pub fn suite_planner(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("planner-entropy-and-audits");
    let digits = 50;
    let _ = level;

    let entropy = planner::audit_entropy(digits);
    out.checks += entropy.entries.len() as u64;
    if !entropy.pass {
        for e in entropy.entries.iter().filter(|e| !e.ok).take(4) {
            out.fail(format!("entropy: {} {} = {}", e.name, e.params, e.value));
        }
    }

    let exponents = planner::audit_exponents(digits);
    out.checks += exponents.entries.len() as u64;
    if !exponents.pass {
        for e in exponents.entries.iter().filter(|e| !e.ok).take(4) {
            out.fail(format!("exponent: {} {} = {}", e.name, e.params, e.value));
        }
    }

    // worked example: R = 1/2, ε = 1/10
    match planner::plan(&planner::PlanRequest {
        kind: planner::PlanKind::LineGapTwoRadius,
        rate: (1, 2),
        eps: (1, 10),
        rho: (3, 10),
        n: 1000,
        digits,
    }) {
        Ok(p) => {
            out.check(p.iterations == 9, || format!("iterations {}", p.iterations));
            out.check((p.a_eps.approx - 0.030103).abs() < 1e-6, || {
                format!("a_eps = {}", p.a_eps.approx)
            });
        }
        Err(err) => out.fail(format!("worked plan failed: {err}")),
    }

    // stability under precision doubling
    for kind in [
        planner::PlanKind::LineGapTwoRadius,
        planner::PlanKind::LineGapOneRadius,
        planner::PlanKind::SpaceCaTwoRadius { m: 2 },
        planner::PlanKind::CurveCaTwoRadius { degree: 2 },
        planner::PlanKind::CurveCaOneRadius { degree: 2 },
        planner::PlanKind::SpaceCaOneRadius,
    ] {
        let mk = |digits| planner::PlanRequest {
            kind,
            rate: (1, 2),
            eps: (1, 10),
            rho: (1, 5),
            n: 1000,
            digits,
        };
        match (planner::plan(&mk(50)), planner::plan(&mk(100))) {
            (Ok(a), Ok(b)) => {
                out.check(
                    a.threshold == b.threshold
                        && a.iterations == b.iterations
                        && a.d_n == b.d_n
                        && a.q_min == b.q_min,
                    || format!("{kind:?} unstable under precision doubling"),
                );
            }
            (Err(err), _) | (_, Err(err)) => out.fail(format!("plan failed: {err}")),
        }
    }
    timed(out, started)
}

/// Line-to-space lifting, gap and CA modes, exhaustively over lines and
/// dimension ≤ 2 spaces on random codes at q = 4, n = 8, r = 4, E = 1.
pub fn suite_lifting(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("line-to-space-lifting");
    let codes = match level {
        Level::Quick => 4,
        Level::Full => 20,
    };
    for seed in 0..codes {
        let code = LinearCode::sample(gf(4), 8, 4, 80_000 + seed);
        for eplus in [1usize, 2] {
            match agreement::lifting_test(&code, 1, eplus, None, LiftingMode::Gap, seed, CAP) {
                Ok(rep) => {
                    out.check(rep.asserted, || "gap antecedent should hold at measured tau".into());
                    out.check(rep.pass && rep.space_violations.is_empty(), || {
                        format!("gap lifting violated: {:?}", rep.space_violations)
                    });
                }
                Err(err) => out.fail(format!("gap lifting failed: {err}")),
            }
        }
        match agreement::lifting_test(
            &code,
            1,
            1,
            None,
            LiftingMode::CorrelatedAgreement,
            seed,
            CAP,
        ) {
            Ok(rep) => {
                let hypothesis_ok = rep.list_size.as_ref().is_some_and(|l| l.ok);
                if hypothesis_ok {
                    out.check(rep.asserted, || "CA implication should be asserted".into());
                    out.check(rep.pass && rep.space_violations.is_empty(), || {
                        format!("CA lifting violated: {:?}", rep.space_violations)
                    });
                } else {
                    // hypothesis unmet is reported, never asserted
                    out.check(!rep.asserted, || "asserted without the hypothesis".into());
                }
            }
            Err(err) => out.fail(format!("CA lifting failed: {err}")),
        }
    }
    timed(out, started)
}

/// Reruns with identical config and master seed are byte-identical
/// (timestamp aside), and worker-pool runs match serial runs.
pub fn suite_determinism(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("harness-determinism");
    let trials = match level {
        Level::Quick => 3,
        Level::Full => 8,
    };
    let mut configs = vec![
        ExperimentConfig {
            mode: Mode::LineGap,
            q: 8,
            n: 8,
            r: 4,
            e: 1,
            eplus: 2,
            trials,
            master_seed: 42,
            enumeration: Enumeration::Sampled(80),
            ..ExperimentConfig::default()
        },
        ExperimentConfig {
            mode: Mode::SpaceCa,
            q: 4,
            n: 8,
            r: 4,
            e: 1,
            eplus: 1,
            m: 2,
            trials,
            master_seed: 43,
            enumeration: Enumeration::Sampled(60),
            ..ExperimentConfig::default()
        },
    ];
    if level == Level::Full {
        configs.push(ExperimentConfig {
            mode: Mode::LineGap,
            q: 4,
            n: 8,
            r: 3,
            e: 1,
            eplus: 2,
            trials: 4,
            master_seed: 44,
            enumeration: Enumeration::Full,
            ..ExperimentConfig::default()
        });
    }
    for cfg in &configs {
        let a = match runners::run(cfg) {
            Ok(v) => v,
            Err(err) => {
                out.fail(format!("run failed: {err}"));
                continue;
            }
        };
        let b = runners::run(cfg).expect("second run of a valid config");
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        records::write_csv(&a.records, &mut csv_a).unwrap();
        records::write_csv(&b.records, &mut csv_b).unwrap();
        out.check(
            records::strip_timestamp(std::str::from_utf8(&csv_a).unwrap())
                == records::strip_timestamp(std::str::from_utf8(&csv_b).unwrap()),
            || format!("{:?}: rerun differs", cfg.mode),
        );
        let mut par = cfg.clone();
        par.jobs = 4;
        match runners::run(&par) {
            Ok(c) => out.check(a.records == c.records, || {
                format!("{:?}: parallel differs from serial", cfg.mode)
            }),
            Err(err) => out.fail(format!("parallel run failed: {err}")),
        }
        // counterexamples never appear in any of these runs
        out.check(a.summary.counterexamples == 0, || {
            "threshold counterexample in determinism soak".into()
        });
    }
    timed(out, started)
}

/// Witnesses assembled from stored ball preimages on objects without
/// correlated agreement always satisfy the forced count threshold.
pub fn suite_threshold_soak(level: Level) -> SuiteResult {
    let started = std::time::Instant::now();
    let mut out = SuiteResult::new("witness-threshold-soak");
    let target = match level {
        Level::Quick => 200u64,
        Level::Full => 1000,
    };
    let mut checked = 0u64;
    let mut seed = 0u64;
    'outer: while checked < target && seed < 400 {
        seed += 1;
        let q = [4u64, 5, 8, 9][(seed % 4) as usize];
        let n = 8 + (seed % 5) as usize; // ≤ 12
        let r = 4 + (seed % 2) as usize;
        let code = LinearCode::sample(gf(q), n, r, 50_000 + seed);
        let Ok(dist) = code.min_distance(CAP) else {
            continue;
        };
        let e = 1usize;
        for eplus in [1usize, 2] {
            if !dist.at_least(eplus + 1) {
                continue;
            }
            let Ok(table) = syndrome_weight_table(&code, eplus, CAP) else {
                continue 'outer;
            };
            let set_e = table.set_at(&code, e);
            let members: Vec<Vector> = set_e.syndromes().cloned().collect();
            if members.len() < 3 {
                continue;
            }
            let f = code.field();
            let mut rng = seeds::rng(seed, "threshold-soak", eplus as u64);
            for _ in 0..4 {
                // a line through two members: the densest candidates
                let i = rng.random_range(0..members.len());
                let j = rng.random_range(0..members.len());
                if i == j {
                    continue;
                }
                let s0 = members[i].clone();
                let s1: Vector = members[j]
                    .iter()
                    .zip(&s0)
                    .map(|(&a, &b)| f.sub(a, b))
                    .collect();
                let line = geometry::SyndromeLine::new(f, s0.clone(), s1.clone());
                if !line.is_nondegenerate() {
                    continue;
                }
                let count = f
                    .elements()
                    .filter(|&a| set_e.contains(&line.eval(f, a)))
                    .count() as u64;
                if count < 2 {
                    continue;
                }
                let contained = f
                    .elements()
                    .all(|a| table.member_at(&line.eval(f, a), eplus));
                if contained {
                    continue;
                }
                // assemble the witness from the stored preimages
                let mut points = Vec::new();
                let mut cols = Vec::new();
                for alpha in f.elements() {
                    if let Some(x) = set_e.preimage(&line.eval(f, alpha)) {
                        points.push(alpha);
                        cols.push(x.clone());
                    }
                }
                let Ok(w) = witness::WitnessMatrix::new(
                    witness::SyndromeTarget::Line(line),
                    witness::EvaluationDesign::line(points),
                    Matrix::from_cols(cols),
                    e,
                ) else {
                    continue;
                };
                match witness::threshold_check(
                    &code,
                    &w,
                    eplus,
                    GapHypothesis::LineNotContained(true),
                ) {
                    Ok(rep) => {
                        checked += 1;
                        out.check(
                            matches!(rep.verdict, ThresholdVerdict::Holds),
                            || format!("q={q} n={n} seed={seed}: {rep:?}"),
                        );
                    }
                    Err(witness::WitnessError::RadiusOutOfRange { .. }) => {}
                    Err(err) => out.fail(format!("threshold check errored: {err}")),
                }
            }
        }
    }
    out.check(checked >= target.min(200), || {
        format!("only {checked} threshold checks ran")
    });
    timed(out, started)
}

/// The distance marker never mislabels: spot check that sampled codes
/// with the infinite marker have no nonzero codeword.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_selftest_passes() {
        let report = selftest(Level::Quick);
        for suite in &report.suites {
            assert!(
                suite.pass,
                "suite {} failed: {:?}",
                suite.name, suite.failures
            );
        }
        assert!(report.pass);
    }

    #[test]
    fn suite_results_serialize() {
        let r = suite_uniform_image(Level::Quick);
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("uniform-image"));
    }
}
