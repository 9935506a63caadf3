//! Constructive obstructions: an explicit pair (x1, x2) whose line
//! x1 + α·x2 has weight exactly E at K chosen α's and weight E+1
//! everywhere else. On any code with minimum distance ≥ 2E+2, the
//! induced syndrome line has ≥ K members of H_E without being contained
//! in it — so a zero-slack gap property cannot hold with threshold
//! below K/q. Certificates carry all witnesses and re-verify from
//! scratch.

use crate::ball::SyndromeSet;
use crate::codes::{CodeDescriptor, CodesError, Distance, LinearCode};
use crate::field::Field;
use crate::geometry::SyndromeLine;
use crate::linalg::{weight, Vector};
use crate::seeds;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversarialError {
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("minimum distance {found} is below the required {required}; offending codeword {witness:?}")]
    DistanceTooSmall {
        found: usize,
        required: usize,
        witness: Option<Vector>,
    },
    #[error("no code with distance >= {target} found in {tries} samples (best seen: {best})")]
    NotFound {
        target: usize,
        tries: u64,
        best: usize,
    },
    #[error("instance does not match the code: {0}")]
    Mismatch(String),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("code error: {0}")]
    Codes(#[from] CodesError),
    #[error("ball error: {0}")]
    Ball(#[from] crate::ball::BallError),
}

/// Where the construction places its nonzero coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinatePolicy {
    /// i_t = t−1 and j_s = K+s−1 (a prefix of the coordinates)
    Prefix,
    /// a seeded random choice of distinct coordinates
    Seeded(u64),
}

/// The built pair with its bookkeeping. The weight profile — exactly E
/// at the chosen α's and E+1 at every other α — is re-verified over all
/// q evaluations at construction time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoSlackInstance {
    pub n: usize,
    pub q: u64,
    pub e: usize,
    pub k: usize,
    pub alphas: Vec<u32>,
    pub x1: Vector,
    pub x2: Vector,
    /// coordinates carrying −α_t (support of x2)
    pub coords_i: Vec<usize>,
    /// coordinates carrying 1 (the weight padding)
    pub coords_j: Vec<usize>,
}

/// Builds the pair: x2 is the indicator of K distinct coordinates
/// i_1..i_K; x1 carries −α_t at i_t and 1 at each of E+1−K further
/// coordinates j_s. Then x1 + α·x2 has weight E exactly when α is one
/// of the chosen α's, and E+1 otherwise.
pub fn build_no_slack_pair(
    f: &Field,
    n: usize,
    e: usize,
    alphas: &[u32],
    policy: CoordinatePolicy,
) -> Result<NoSlackInstance, AdversarialError> {
    let q = u64::from(f.q());
    let k = alphas.len();
    if k < 1 {
        return Err(AdversarialError::ParameterViolation("need K >= 1".into()));
    }
    if k > e + 1 {
        return Err(AdversarialError::ParameterViolation(format!(
            "K <= E+1 fails: K={k}, E={e}"
        )));
    }
    if e + 1 >= n {
        return Err(AdversarialError::ParameterViolation(format!(
            "E+1 < n fails: E={e}, n={n}"
        )));
    }
    if k as u64 >= q {
        return Err(AdversarialError::ParameterViolation(format!(
            "K < q fails: K={k}, q={q}"
        )));
    }
    let distinct: std::collections::BTreeSet<_> = alphas.iter().collect();
    if distinct.len() != k {
        return Err(AdversarialError::ParameterViolation(
            "evaluation points must be pairwise distinct".into(),
        ));
    }
    if alphas.iter().any(|&a| a >= f.q()) {
        return Err(AdversarialError::ParameterViolation(
            "evaluation point outside the field".into(),
        ));
    }

    let coords: Vec<usize> = match policy {
        CoordinatePolicy::Prefix => (0..e + 1).collect(),
        CoordinatePolicy::Seeded(seed) => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut seeds::rng(seed, "no-slack-coords", 0));
            all.truncate(e + 1);
            all
        }
    };
    let coords_i = coords[..k].to_vec();
    let coords_j = coords[k..].to_vec();

    let mut x2 = vec![0u32; n];
    for &i in &coords_i {
        x2[i] = 1;
    }
    let mut x1 = vec![0u32; n];
    for (t, &i) in coords_i.iter().enumerate() {
        x1[i] = f.neg(alphas[t]);
    }
    for &j in &coords_j {
        x1[j] = 1;
    }

    let inst = NoSlackInstance {
        n,
        q,
        e,
        k,
        alphas: alphas.to_vec(),
        x1,
        x2,
        coords_i,
        coords_j,
    };
    inst.verify_profile(f)?;
    Ok(inst)
}

impl NoSlackInstance {
    /// x1 + α·x2.
    pub fn eval(&self, f: &Field, alpha: u32) -> Vector {
        self.x1
            .iter()
            .zip(&self.x2)
            .map(|(&a, &b)| f.add(a, f.mul(alpha, b)))
            .collect()
    }

    /// Re-checks the exact weight profile over every α ∈ F_q.
    pub fn verify_profile(&self, f: &Field) -> Result<(), AdversarialError> {
        for alpha in f.elements() {
            let w = weight(&self.eval(f, alpha));
            let expected = if self.alphas.contains(&alpha) {
                self.e
            } else {
                self.e + 1
            };
            if w != expected {
                return Err(AdversarialError::CertificationFailed(format!(
                    "weight at alpha={alpha} is {w}, expected {expected}"
                )));
            }
        }
        Ok(())
    }
}

/// One certified member of the bad syndrome line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedMember {
    pub alpha: u32,
    pub syndrome: Vector,
    /// weight-E preimage, re-verifiable via H
    pub preimage: Vector,
}

/// A machine-checkable gap violation: K distinct syndromes of the line
/// inside H_E plus one evaluation proven outside it by exhaustive
/// enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub instance: NoSlackInstance,
    pub code: CodeDescriptor,
    pub distance: String,
    pub s0: Vector,
    pub s1: Vector,
    pub members: Vec<CertifiedMember>,
    pub excluded_alpha: u32,
    pub excluded_syndrome: Vector,
}

impl ViolationCertificate {
    /// Re-verifies every claim from scratch: the weight profile, each
    /// member's preimage, syndrome distinctness, and the excluded
    /// point's absence from the exhaustive H_E set.
    pub fn verify(&self, code: &LinearCode, set_e: &SyndromeSet) -> Result<(), AdversarialError> {
        let f = code.field();
        self.instance.verify_profile(f)?;
        let mut seen = std::collections::BTreeSet::new();
        for m in &self.members {
            if weight(&m.preimage) > self.instance.e {
                return Err(AdversarialError::CertificationFailed(
                    "member preimage too heavy".into(),
                ));
            }
            if code.syndrome(&m.preimage)? != m.syndrome {
                return Err(AdversarialError::CertificationFailed(
                    "member preimage does not map to its syndrome".into(),
                ));
            }
            if !set_e.contains(&m.syndrome) {
                return Err(AdversarialError::CertificationFailed(
                    "member syndrome missing from H_E".into(),
                ));
            }
            if !seen.insert(m.syndrome.clone()) {
                return Err(AdversarialError::CertificationFailed(
                    "member syndromes not pairwise distinct".into(),
                ));
            }
        }
        if set_e.contains(&self.excluded_syndrome) {
            return Err(AdversarialError::CertificationFailed(
                "excluded syndrome is in H_E after all".into(),
            ));
        }
        Ok(())
    }

    pub fn line(&self, f: &Field) -> SyndromeLine {
        SyndromeLine::new(f, self.s0.clone(), self.s1.clone())
    }
}

/// Assembles the instance with a code of verified distance ≥ 2E+2 into
/// a certificate: |L ∩ H_E| ≥ K yet L ⊄ H_E. `set_e` must be the
/// exhaustive enumeration of H_E for this code.
pub fn certify_violation(
    code: &LinearCode,
    inst: &NoSlackInstance,
    set_e: &SyndromeSet,
    cap: u64,
) -> Result<ViolationCertificate, AdversarialError> {
    if code.n() != inst.n || code.q() != inst.q {
        return Err(AdversarialError::Mismatch(format!(
            "code is (q={}, n={}), instance is (q={}, n={})",
            code.q(),
            code.n(),
            inst.q,
            inst.n
        )));
    }
    if set_e.radius() != inst.e {
        return Err(AdversarialError::Mismatch(format!(
            "syndrome set has radius {}, instance has E={}",
            set_e.radius(),
            inst.e
        )));
    }
    let required = 2 * inst.e + 2;
    let dist = code.min_distance(cap)?;
    if !dist.at_least(required) {
        let witness = code.min_weight_codeword(cap)?;
        let found = match dist {
            Distance::Finite(d) => d,
            Distance::Infinite => unreachable!("infinite distance passes any bound"),
        };
        return Err(AdversarialError::DistanceTooSmall {
            found,
            required,
            witness,
        });
    }
    let f = code.field();
    inst.verify_profile(f)?;
    let s0 = code.syndrome(&inst.x1)?;
    let s1 = code.syndrome(&inst.x2)?;

    let mut members = Vec::with_capacity(inst.k);
    let mut seen = std::collections::BTreeSet::new();
    for &alpha in &inst.alphas {
        let preimage = inst.eval(f, alpha);
        debug_assert_eq!(weight(&preimage), inst.e);
        let syndrome = code.syndrome(&preimage)?;
        if !set_e.contains(&syndrome) {
            return Err(AdversarialError::CertificationFailed(
                "weight-E preimage's syndrome missing from the exhaustive set".into(),
            ));
        }
        // a collision would give a nonzero codeword of weight K < d
        if !seen.insert(syndrome.clone()) {
            return Err(AdversarialError::CertificationFailed(
                "syndrome collision despite the distance bound".into(),
            ));
        }
        members.push(CertifiedMember {
            alpha,
            syndrome,
            preimage,
        });
    }

    // the first α outside the chosen set: weight E+1, and its syndrome
    // must fall outside H_E (else a codeword of weight ≤ 2E+1 exists)
    let excluded_alpha = f
        .elements()
        .find(|a| !inst.alphas.contains(a))
        .expect("K < q leaves a free evaluation point");
    let excluded_syndrome = code.syndrome(&inst.eval(f, excluded_alpha))?;
    if set_e.contains(&excluded_syndrome) {
        return Err(AdversarialError::CertificationFailed(
            "line is contained in H_E despite the distance bound".into(),
        ));
    }

    Ok(ViolationCertificate {
        instance: inst.clone(),
        code: code.descriptor(),
        distance: dist.to_string(),
        s0,
        s1,
        members,
        excluded_alpha,
        excluded_syndrome,
    })
}

/// Rejection-samples parity-check matrices until the code's exact
/// minimum distance reaches `d_target`. Deterministic for a given seed;
/// reports the best distance seen on failure.
pub fn find_code_with_distance(
    field: Arc<Field>,
    n: usize,
    r: usize,
    d_target: usize,
    max_tries: u64,
    seed: u64,
    cap: u64,
) -> Result<LinearCode, AdversarialError> {
    let mut best = 0usize;
    for i in 0..max_tries {
        let code = LinearCode::sample(Arc::clone(&field), n, r, seeds::derive(seed, "dsearch", i));
        let dist = code.min_distance(cap)?;
        if dist.at_least(d_target) {
            return Ok(code);
        }
        if let Distance::Finite(d) = dist {
            best = best.max(d);
        }
    }
    Err(AdversarialError::NotFound {
        target: d_target,
        tries: max_tries,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{BallQuery, Strategy};
    use rand::Rng;

    const CAP: u64 = 50_000_000;

    fn gf(q: u64) -> Arc<Field> {
        Arc::new(Field::new(q).unwrap())
    }

    #[test]
    fn worked_example_over_gf5() {
        // n=8, q=5, E=3, K=2, α=(0,1)
        let f = gf(5);
        let inst = build_no_slack_pair(&f, 8, 3, &[0, 1], CoordinatePolicy::Prefix).unwrap();
        assert_eq!(inst.x2, vec![1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(inst.x1, vec![0, 4, 1, 1, 0, 0, 0, 0]);
        let weights: Vec<usize> = (0..5).map(|a| weight(&inst.eval(&f, a))).collect();
        assert_eq!(weights, vec![3, 3, 4, 4, 4]);
    }

    #[test]
    fn k_equals_e_plus_one_has_no_padding() {
        let f = gf(7);
        let inst = build_no_slack_pair(&f, 9, 2, &[1, 3, 5], CoordinatePolicy::Prefix).unwrap();
        assert!(inst.coords_j.is_empty());
        for &a in &[1, 3, 5] {
            assert_eq!(weight(&inst.eval(&f, a)), 2);
        }
    }

    #[test]
    fn parameter_violations_are_named() {
        let f = gf(3);
        // K = q
        let err = build_no_slack_pair(&f, 9, 4, &[0, 1, 2], CoordinatePolicy::Prefix).unwrap_err();
        assert!(matches!(err, AdversarialError::ParameterViolation(ref m) if m.contains("K < q")));
        // E+1 >= n
        let err = build_no_slack_pair(&f, 4, 3, &[0, 1], CoordinatePolicy::Prefix).unwrap_err();
        assert!(matches!(err, AdversarialError::ParameterViolation(ref m) if m.contains("E+1 < n")));
        // K > E+1
        let err = build_no_slack_pair(&f, 9, 0, &[0, 1], CoordinatePolicy::Prefix).unwrap_err();
        assert!(matches!(err, AdversarialError::ParameterViolation(ref m) if m.contains("K <= E+1")));
        // duplicate alphas
        let err = build_no_slack_pair(&f, 9, 2, &[1, 1], CoordinatePolicy::Prefix).unwrap_err();
        assert!(matches!(err, AdversarialError::ParameterViolation(ref m) if m.contains("distinct")));
    }

    #[test]
    fn random_draws_keep_the_profile() {
        let mut rng = crate::seeds::rng(0xad, "no-slack-profile", 0);
        for trial in 0..100u64 {
            let q = [3u64, 4, 5, 7, 8, 9, 11][(trial % 7) as usize];
            let f = gf(q);
            let n = rng.random_range(4..=16usize);
            let e = rng.random_range(1..n - 1);
            let kmax = (e + 1).min(q as usize - 1);
            let k = rng.random_range(1..=kmax);
            let mut alphas: Vec<u32> = f.elements().collect();
            alphas.shuffle(&mut rng);
            alphas.truncate(k);
            let policy = if trial % 2 == 0 {
                CoordinatePolicy::Prefix
            } else {
                CoordinatePolicy::Seeded(trial)
            };
            // constructor re-verifies the profile over all q evaluations
            let inst = build_no_slack_pair(&f, n, e, &alphas, policy).unwrap();
            let exact_e = f
                .elements()
                .filter(|&a| weight(&inst.eval(&f, a)) == e)
                .count();
            assert_eq!(exact_e, k, "q={q} n={n} e={e} k={k}");
        }
    }

    #[test]
    fn certificate_on_a_high_distance_code() {
        // q=8, n=14, r=10, E=1 needs d >= 4
        let f = gf(8);
        let code = find_code_with_distance(Arc::clone(&f), 14, 10, 4, 100, 7, CAP).unwrap();
        assert!(code.min_distance(CAP).unwrap().at_least(4));
        let inst = build_no_slack_pair(&f, 14, 1, &[2, 5], CoordinatePolicy::Prefix).unwrap();
        let set = BallQuery::new(&code, 1, Strategy::FullEnumeration)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        let cert = certify_violation(&code, &inst, &set, CAP).unwrap();
        assert_eq!(cert.members.len(), 2);
        cert.verify(&code, &set).unwrap();
        // and the certified line really has >= K members without containment
        let line = cert.line(code.field());
        let members = code
            .field()
            .elements()
            .filter(|&a| set.contains(&line.eval(code.field(), a)))
            .count();
        assert!(members >= 2);
        assert!(!set.contains(&cert.excluded_syndrome));
    }

    #[test]
    fn zero_code_always_certifies() {
        // H = identity: no nonzero codewords, distance marker inf
        let f = gf(5);
        let code = LinearCode::from_parity_check(Arc::clone(&f), crate::linalg::Matrix::identity(6));
        assert_eq!(code.min_distance(CAP).unwrap(), Distance::Infinite);
        let inst = build_no_slack_pair(&f, 6, 1, &[0, 3], CoordinatePolicy::Prefix).unwrap();
        let set = BallQuery::new(&code, 1, Strategy::FullEnumeration)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        let cert = certify_violation(&code, &inst, &set, CAP).unwrap();
        cert.verify(&code, &set).unwrap();
        assert_eq!(cert.distance, "inf");
    }

    #[test]
    fn low_distance_code_is_rejected() {
        // find a code whose distance is positive but below 2E+2, and
        // check the named rejection with its witness codeword
        let f = gf(3);
        let e = 1;
        for seed in 0..200u64 {
            let code = LinearCode::sample(Arc::clone(&f), 8, 3, seed);
            let d = code.min_distance(CAP).unwrap();
            let Distance::Finite(d) = d else { continue };
            if d >= 2 * e + 2 {
                continue;
            }
            let inst = build_no_slack_pair(&f, 8, e, &[0, 1], CoordinatePolicy::Prefix).unwrap();
            let set = BallQuery::new(&code, e, Strategy::FullEnumeration)
                .unwrap()
                .enumerate(CAP)
                .unwrap();
            let err = certify_violation(&code, &inst, &set, CAP).unwrap_err();
            match err {
                AdversarialError::DistanceTooSmall {
                    found,
                    required,
                    witness,
                } => {
                    assert_eq!(found, d);
                    assert_eq!(required, 4);
                    let w = witness.expect("finite distance has a witness");
                    assert_eq!(weight(&w), d);
                    assert!(code.contains(&w));
                }
                other => panic!("unexpected error {other:?}"),
            }
            return;
        }
        panic!("no low-distance sample found");
    }

    #[test]
    fn impossible_distance_target_reports_best() {
        let f = gf(2);
        let err = find_code_with_distance(f, 6, 3, 7, 20, 1, CAP).unwrap_err();
        match err {
            AdversarialError::NotFound { target, tries, .. } => {
                assert_eq!(target, 7);
                assert_eq!(tries, 20);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trivial_distance_target_succeeds_immediately() {
        let f = gf(3);
        let code = find_code_with_distance(f, 7, 3, 1, 10, 5, CAP).unwrap();
        assert!(code.min_distance(CAP).unwrap().at_least(1));
    }

    #[test]
    fn certificates_serialize() {
        let f = gf(5);
        let code = LinearCode::from_parity_check(Arc::clone(&f), crate::linalg::Matrix::identity(6));
        let inst = build_no_slack_pair(&f, 6, 1, &[0, 3], CoordinatePolicy::Prefix).unwrap();
        let set = BallQuery::new(&code, 1, Strategy::FullEnumeration)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        let cert = certify_violation(&code, &inst, &set, CAP).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        let back: ViolationCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
