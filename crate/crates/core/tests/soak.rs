//! Extended randomized soaks, several times the acceptance load. Not
//! part of the default test run:
//!
//!     cargo test -p gaplab-core --test soak -- --ignored --nocapture

use gaplab_core::agreement::{self, WordObject};
use gaplab_core::ball::{syndrome_weight_table, BallQuery, Strategy};
use gaplab_core::geometry::{SyndromeLine, WordCurve, WordSpace};
use gaplab_core::witness::{
    self, DesignKind, GapHypothesis, ThresholdVerdict,
};
use gaplab_core::{Field, LinearCode, Matrix};
use rand::Rng;
use std::sync::Arc;

const CAP: u64 = 2_000_000_000;

fn gf(q: u64) -> Arc<Field> {
    Arc::new(Field::new(q).unwrap())
}

#[test]
#[ignore = "extended soak; run with --ignored"]
fn membership_equivalence_10k() {
    let mut rng = gaplab_core::seeds::rng(0x50a0, "soak-membership", 0);
    for trial in 0..10_000u64 {
        let q = [2u64, 3, 4, 5, 7, 8, 9][(trial % 7) as usize];
        let r = rng.random_range(2..=5usize);
        let n = rng.random_range(6..=10usize);
        let code = LinearCode::sample(gf(q), n, r, 100_000 + trial);
        let y: Vec<u32> = (0..n)
            .map(|_| rng.random_range(0..code.field().q()))
            .collect();
        let e = rng.random_range(0..=n);
        let (d, _) = code.distance_to_code(&y, CAP).unwrap();
        let s = code.syndrome(&y).unwrap();
        let member = BallQuery::new(&code, e, Strategy::Auto)
            .unwrap()
            .member(&s, CAP)
            .unwrap()
            .is_some();
        assert_eq!(member, d <= e, "trial {trial}: q={q} n={n} r={r} E={e} d={d}");
    }
}

#[test]
#[ignore = "extended soak; run with --ignored"]
fn agreement_equivalence_5k() {
    let mut rng = gaplab_core::seeds::rng(0x50a1, "soak-agreement", 0);
    for trial in 0..5_000u64 {
        let q = [2u64, 3][(trial % 2) as usize];
        let n = rng.random_range(5..=7usize);
        let r = rng.random_range((n - 2).max(3)..=n); // small k keeps brute force cheap
        let code = LinearCode::sample(gf(q), n, r, 200_000 + trial);
        let arity = rng.random_range(2..=3usize);
        let coeffs: Vec<Vec<u32>> = (0..arity)
            .map(|_| {
                (0..n)
                    .map(|_| rng.random_range(0..code.field().q()))
                    .collect()
            })
            .collect();
        let obj = if trial % 3 == 0 {
            WordObject::Curve(WordCurve {
                coeffs: coeffs.clone(),
            })
        } else {
            WordObject::Space(WordSpace {
                base: coeffs[0].clone(),
                dirs: coeffs[1..].to_vec(),
            })
        };
        let eplus = rng.random_range(0..=3usize);
        let rep = agreement::reformulation_crosscheck(&code, &obj, eplus, CAP).unwrap();
        assert!(rep.agree, "trial {trial}: {rep:?}");
    }
}

#[test]
#[ignore = "extended soak; run with --ignored"]
fn reduction_and_threshold_1k() {
    let kinds = [
        DesignKind::Line,
        DesignKind::Space { m: 2 },
        DesignKind::Curve { degree: 2 },
    ];
    let mut produced = 0u64;
    let mut attempt = 0u64;
    while produced < 1000 && attempt < 3000 {
        attempt += 1;
        let kind = kinds[(attempt % 3) as usize];
        let q = [7u64, 8, 9][(attempt % 3) as usize];
        let n = 10 + (attempt % 5) as usize;
        let code = LinearCode::sample(gf(q), n, 3, 300_000 + attempt);
        let h = kind.arity();
        let delta = 1 + (attempt / 3) % 3;
        let t = h + delta as usize;
        let threshold = kind.degeneracy_threshold(q) as usize;
        let k_points = match kind {
            DesignKind::Space { .. } => (threshold + delta as usize + 5).min(16),
            _ => (t + 3).min(q as usize),
        };
        let Ok(w) = witness::synth_witness(&code, kind, t, k_points, 3, attempt, CAP) else {
            continue;
        };
        produced += 1;
        let d_lower = code
            .min_distance(CAP)
            .ok()
            .and_then(|d| d.finite())
            .unwrap_or(1);
        let (reduced, cert) = witness::reduce_rank_once(&code, &w, d_lower).unwrap();
        assert!(cert.rank_after < cert.rank_before);
        assert!(witness::verify_witness(&code, &reduced).is_ok());
        assert!(cert.retained.len() >= cert.certified_minimum(w.k()));
        match witness::reduce_to_base(&code, &w, d_lower) {
            Ok(out) => {
                assert_eq!(out.witness.rank(code.field()), w.target.h());
            }
            Err(witness::WitnessError::ThresholdUnderflow { .. }) => {}
            Err(other) => panic!("attempt {attempt}: {other}"),
        }
    }
    assert!(produced >= 1000, "only {produced} witnesses synthesized");
}

#[test]
#[ignore = "extended soak; run with --ignored"]
fn forced_count_threshold_5k() {
    let mut checked = 0u64;
    let mut seed = 0u64;
    while checked < 5000 && seed < 3000 {
        seed += 1;
        let q = [4u64, 5, 7, 8, 9][(seed % 5) as usize];
        let n = 8 + (seed % 6) as usize; // ≤ 13
        let r = 4 + (seed % 3) as usize;
        let code = LinearCode::sample(gf(q), n, r, 400_000 + seed);
        let Ok(dist) = code.min_distance(CAP) else {
            continue;
        };
        for (e, eplus) in [(1usize, 1usize), (1, 2), (2, 2), (2, 3)] {
            if !dist.at_least(eplus + 1) {
                continue;
            }
            let Ok(table) = syndrome_weight_table(&code, eplus, CAP) else {
                continue;
            };
            let set_e = table.set_at(&code, e);
            let members: Vec<Vec<u32>> = set_e.syndromes().cloned().collect();
            if members.len() < 3 {
                continue;
            }
            let f = code.field();
            let mut rng = gaplab_core::seeds::rng(seed, "soak-threshold", (e * 10 + eplus) as u64);
            for _ in 0..4 {
                let i = rng.random_range(0..members.len());
                let j = rng.random_range(0..members.len());
                if i == j {
                    continue;
                }
                let s0 = members[i].clone();
                let s1: Vec<u32> = members[j]
                    .iter()
                    .zip(&s0)
                    .map(|(&a, &b)| f.sub(a, b))
                    .collect();
                let line = SyndromeLine::new(f, s0, s1);
                if !line.is_nondegenerate() {
                    continue;
                }
                let mut points = Vec::new();
                let mut cols = Vec::new();
                let mut contained = true;
                for alpha in f.elements() {
                    let p = line.eval(f, alpha);
                    if let Some(x) = set_e.preimage(&p) {
                        points.push(alpha);
                        cols.push(x.clone());
                    }
                    if !table.member_at(&p, eplus) {
                        contained = false;
                    }
                }
                if points.len() < 2 || contained {
                    continue;
                }
                let w = witness::WitnessMatrix::new(
                    witness::SyndromeTarget::Line(line),
                    witness::EvaluationDesign::line(points),
                    Matrix::from_cols(cols),
                    e,
                )
                .unwrap();
                match witness::threshold_check(&code, &w, eplus, GapHypothesis::LineNotContained(true))
                {
                    Ok(rep) => {
                        checked += 1;
                        assert!(
                            matches!(rep.verdict, ThresholdVerdict::Holds),
                            "seed {seed}: {rep:?}"
                        );
                    }
                    Err(witness::WitnessError::RadiusOutOfRange { .. }) => {}
                    Err(other) => panic!("{other}"),
                }
            }
        }
    }
    println!("threshold checks run: {checked}");
    assert!(checked >= 2000, "only {checked} checks ran");
}
