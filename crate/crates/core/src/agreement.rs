//! Exact deciders for proximity gap and correlated agreement on
//! concrete codes.
//!
//! Correlated agreement for target syndromes s_0..s_m at radius E⁺ asks
//! for a joint preimage matrix X = [x_0|..|x_m] with H·x_i = s_i whose
//! nonzero rows fit in one coordinate set of size ≤ E⁺. The decision
//! reduces to support-restricted column-span tests: T works iff every
//! s_i lies in the column span of H restricted to T. Searching supports
//! by increasing size, lexicographic within a size, yields the minimal
//! support and a deterministic witness.

use crate::ball::SyndromeSet;
use crate::codes::{CodesError, LinearCode};
use crate::combin::{binomial, within_budget, Combinations, Tuples};
use crate::field::Field;
use crate::geometry::{
    enumerate_affine_spaces, enumerate_syndrome_lines, GeometryError, SyndromeCurve, SyndromeLine,
    SyndromeSpace, WordCurve, WordSpace,
};
use crate::linalg::{solve_linear, Matrix, Vector};
use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgreementError {
    #[error("budget exceeded: about {estimate} operations (cap {cap})")]
    BudgetExceeded { estimate: BigUint, cap: u64 },
    #[error("target syndrome {index} has length {got}, expected {expected}")]
    BadTarget {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("code error: {0}")]
    Codes(#[from] CodesError),
    #[error("geometry error: {0}")]
    Geometry(#[from] GeometryError),
    #[error("ball error: {0}")]
    Ball(#[from] crate::ball::BallError),
}

/// Outcome of a correlated-agreement decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaResult {
    pub decision: bool,
    /// lexicographically first support of minimal size, when one exists
    pub support: Option<Vec<usize>>,
    /// joint preimage supported on `support` (free variables zero)
    pub witness: Option<Matrix>,
}

impl CaResult {
    /// Re-verifies the stored witness against the code and targets.
    pub fn verify(&self, code: &LinearCode, targets: &[Vector], eplus: usize) -> bool {
        if !self.decision {
            return self.witness.is_none();
        }
        let Some(w) = &self.witness else {
            return false;
        };
        if w.row_weight() > eplus {
            return false;
        }
        for (i, s) in targets.iter().enumerate() {
            let x = w.col(i);
            match code.syndrome(&x) {
                Ok(got) if &got == s => {}
                _ => return false,
            }
        }
        true
    }
}

/// Decides whether targets s_0..s_m admit a joint preimage of row
/// weight ≤ E⁺. The cap counts support rank tests (Σ_{i≤E⁺} C(n,i)).
pub fn ca_decide(
    code: &LinearCode,
    targets: &[Vector],
    eplus: usize,
    cap: u64,
) -> Result<CaResult, AgreementError> {
    let r = code.r();
    for (index, s) in targets.iter().enumerate() {
        if s.len() != r {
            return Err(AgreementError::BadTarget {
                index,
                got: s.len(),
                expected: r,
            });
        }
    }
    let n = code.n() as u64;
    let mut tests = BigUint::ZERO;
    for i in 0..=eplus as u64 {
        tests += binomial(n, i);
    }
    if within_budget(&tests, cap).is_none() {
        return Err(AgreementError::BudgetExceeded {
            estimate: tests,
            cap,
        });
    }
    let f = code.field();
    let h = code.parity_check();
    let arity = targets.len();
    for size in 0..=eplus {
        for supp in Combinations::new(code.n(), size) {
            let restricted = h.select_cols(&supp);
            let base_rank = restricted.rank(f);
            // augment with all targets at once
            let mut aug_cols = restricted.col_vecs();
            aug_cols.extend(targets.iter().cloned());
            let aug_rank = Matrix::from_cols(aug_cols).rank(f);
            if aug_rank != base_rank {
                continue;
            }
            // every target solvable over T: build the witness
            let mut witness = Matrix::zero(code.n(), arity);
            for (i, s) in targets.iter().enumerate() {
                let z = solve_linear(f, &restricted, s)
                    .expect("solvable: spans agree on this support");
                for (slot, &pos) in supp.iter().enumerate() {
                    witness.set(pos, i, z[slot]);
                }
            }
            debug_assert!(witness.row_weight() <= eplus);
            return Ok(CaResult {
                decision: true,
                support: Some(supp),
                witness: Some(witness),
            });
        }
    }
    Ok(CaResult {
        decision: false,
        support: None,
        witness: None,
    })
}

/// Word-space object whose coefficient-wise agreement is cross-checked.
#[derive(Debug, Clone)]
pub enum WordObject {
    Space(WordSpace),
    Curve(WordCurve),
}

impl WordObject {
    fn coefficients(&self) -> Vec<&Vector> {
        match self {
            WordObject::Space(s) => {
                let mut v = vec![&s.base];
                v.extend(s.dirs.iter());
                v
            }
            WordObject::Curve(c) => c.coeffs.iter().collect(),
        }
    }
}

/// Both routes of the agreement equivalence, which must coincide:
/// existence of codewords c_0..c_m with |∪ supp(c_i − u_i)| ≤ E⁺
/// (brute force over codeword tuples), versus the syndrome-side
/// decision on the push-forward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub brute_force: bool,
    pub syndrome_side: bool,
    pub agree: bool,
}

pub fn reformulation_crosscheck(
    code: &LinearCode,
    object: &WordObject,
    eplus: usize,
    cap: u64,
) -> Result<CrosscheckReport, AgreementError> {
    let coeffs = object.coefficients();
    let arity = coeffs.len() as u64;
    let tuples = crate::combin::power(code.q(), code.dimension() as u64 * arity);
    if within_budget(&tuples, cap).is_none() {
        return Err(AgreementError::BudgetExceeded {
            estimate: tuples,
            cap,
        });
    }
    let mut codewords = Vec::new();
    code.for_each_codeword(|c| {
        codewords.push(c.clone());
        true
    });
    let f = code.field();
    let us: Vec<Vector> = coeffs.iter().map(|v| (*v).clone()).collect();
    let brute_force = tuple_search(f, &codewords, &us, 0, &mut vec![false; code.n()], 0, eplus);

    let targets: Vec<Vector> = us
        .iter()
        .map(|u| code.syndrome(u))
        .collect::<Result<_, _>>()?;
    let ca = ca_decide(code, &targets, eplus, cap)?;
    Ok(CrosscheckReport {
        brute_force,
        syndrome_side: ca.decision,
        agree: brute_force == ca.decision,
    })
}

/// Depth-first search over codeword tuples, pruning as soon as the
/// accumulated disagreement union exceeds E⁺.
fn tuple_search(
    f: &Field,
    codewords: &[Vector],
    us: &[Vector],
    level: usize,
    used: &mut Vec<bool>,
    used_count: usize,
    eplus: usize,
) -> bool {
    if level == us.len() {
        return true;
    }
    let u = &us[level];
    for c in codewords {
        let mut added = Vec::new();
        let mut count = used_count;
        let mut ok = true;
        for (i, (&ci, &ui)) in c.iter().zip(u).enumerate() {
            if ci != ui && !used[i] {
                if count == eplus {
                    ok = false;
                    break;
                }
                used[i] = true;
                added.push(i);
                count += 1;
            }
        }
        let _ = f;
        if ok && tuple_search(f, codewords, us, level + 1, used, count, eplus) {
            for i in added {
                used[i] = false;
            }
            return true;
        }
        for i in added {
            used[i] = false;
        }
    }
    false
}

/// Membership statistics of a syndrome object against H_E and H_{E⁺}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub object_id: String,
    pub kind: String,
    /// distinct object points in H_E
    pub count_in_ball: u64,
    /// distinct object points
    pub total_points: u64,
    /// evaluation-tuple count (spaces: over F_q^m; curves: over α)
    pub eval_count: Option<u64>,
    pub eval_total: Option<u64>,
    pub contained_in_big_ball: bool,
    pub ratio: f64,
    pub threshold: Option<f64>,
}

impl GapReport {
    /// A line violates the gap property at count threshold K iff it has
    /// K+1 members without being contained in the larger ball.
    pub fn is_violation_at_count(&self, k: u64) -> bool {
        self.count_in_ball > k && !self.contained_in_big_ball
    }
}

fn fmt_vec(v: &[u32]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

pub fn line_id(line: &SyndromeLine) -> String {
    format!("line({}|{})", fmt_vec(&line.s0), fmt_vec(&line.s1))
}

pub fn space_id(space: &SyndromeSpace) -> String {
    let dirs: Vec<String> = space.dirs.iter().map(|d| fmt_vec(d)).collect();
    format!("space({}|{})", fmt_vec(&space.s0), dirs.join("|"))
}

pub fn curve_id(curve: &SyndromeCurve) -> String {
    let cs: Vec<String> = curve.coeffs.iter().map(|c| fmt_vec(c)).collect();
    format!("curve({})", cs.join("|"))
}

/// Exact |L ∩ H_E| (set semantics) and containment in H_{E⁺}.
pub fn gap_check_line(
    f: &Field,
    line: &SyndromeLine,
    set_e: &SyndromeSet,
    set_eplus: &SyndromeSet,
    threshold: Option<f64>,
) -> GapReport {
    let points = line.point_set(f);
    let total = points.len() as u64;
    let count = points.iter().filter(|p| set_e.contains(p)).count() as u64;
    let contained = points.iter().all(|p| set_eplus.contains(p));
    GapReport {
        object_id: line_id(line),
        kind: "line".into(),
        count_in_ball: count,
        total_points: total,
        eval_count: None,
        eval_total: None,
        contained_in_big_ball: contained,
        ratio: count as f64 / total as f64,
        threshold,
    }
}

/// Exact |S ∩ H_E| / |S| with containment; reports both the set-ratio
/// and the raw evaluation-tuple ratio, which differ when the direction
/// vectors are dependent.
pub fn gap_check_space(
    f: &Field,
    space: &SyndromeSpace,
    set_e: &SyndromeSet,
    set_eplus: &SyndromeSet,
    threshold: Option<f64>,
) -> GapReport {
    let points = space.point_set(f);
    let total = points.len() as u64;
    let count = points.iter().filter(|p| set_e.contains(p)).count() as u64;
    let contained = points.iter().all(|p| set_eplus.contains(p));
    let mut eval_count = 0u64;
    let mut eval_total = 0u64;
    for beta in Tuples::new(u64::from(f.q()), space.m()) {
        eval_total += 1;
        if set_e.contains(&space.eval(f, &beta)) {
            eval_count += 1;
        }
    }
    GapReport {
        object_id: space_id(space),
        kind: "space".into(),
        count_in_ball: count,
        total_points: total,
        eval_count: Some(eval_count),
        eval_total: Some(eval_total),
        contained_in_big_ball: contained,
        ratio: count as f64 / total as f64,
        threshold,
    }
}

/// Curve statistics over the q evaluation points.
pub fn gap_check_curve(
    f: &Field,
    curve: &SyndromeCurve,
    set_e: &SyndromeSet,
    set_eplus: &SyndromeSet,
    threshold: Option<f64>,
) -> GapReport {
    let q = u64::from(f.q());
    let mut count = 0u64;
    let mut contained = true;
    for alpha in f.elements() {
        let p = curve.eval(f, alpha);
        if set_e.contains(&p) {
            count += 1;
        }
        if !set_eplus.contains(&p) {
            contained = false;
        }
    }
    GapReport {
        object_id: curve_id(curve),
        kind: "curve".into(),
        count_in_ball: count,
        total_points: q,
        eval_count: Some(count),
        eval_total: Some(q),
        contained_in_big_ball: contained,
        ratio: count as f64 / q as f64,
        threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftingMode {
    Gap,
    CorrelatedAgreement,
}

/// List-size hypothesis check: |{c : d(x,c) ≤ E}| < q on sampled words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListSizeCheck {
    pub sampled: usize,
    pub max_list: u64,
    pub ok: bool,
}

/// Outcome of the line-to-space lifting test on one code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftingReport {
    pub mode: LiftingMode,
    pub e: usize,
    pub eplus: usize,
    pub lines_checked: usize,
    /// line-level threshold τ as an exact fraction (measured when no
    /// explicit τ was supplied)
    pub tau: (u64, u64),
    /// lifted threshold τ·q/(q−1)
    pub tau_lifted: (u64, u64),
    pub line_antecedent_holds: bool,
    pub line_violations: Vec<String>,
    pub list_size: Option<ListSizeCheck>,
    pub spaces_checked: usize,
    pub space_violations: Vec<String>,
    /// whether the implication was actually asserted (antecedent held
    /// and, in CA mode, the list-size hypothesis was met)
    pub asserted: bool,
    pub pass: bool,
}

/// Verifies the line-to-space lifting empirically on one code: if every
/// line satisfies the line-level property at τ, then every affine space
/// of dimension ≤ 2 must satisfy the space-level property at τ·q/(q−1).
/// In CA mode the line property is checked at every radius E' ≤ E and
/// the list-size hypothesis is verified on sampled words first.
/// With `tau = None` the sharpest τ consistent with the line level is
/// measured and used, so the antecedent holds by construction.
pub fn lifting_test(
    code: &LinearCode,
    e: usize,
    eplus: usize,
    tau: Option<(u64, u64)>,
    mode: LiftingMode,
    seed: u64,
    cap: u64,
) -> Result<LiftingReport, AgreementError> {
    let f = code.field();
    let q = u64::from(f.q());
    let table = crate::ball::syndrome_weight_table(code, eplus.max(e), cap)?;
    let set_e = table.set_at(code, e);
    let set_eplus = table.set_at(code, eplus);
    let lines = enumerate_syndrome_lines(f, code.r(), None, cap)?;

    // line level
    let mut measured: (u64, u64) = (0, 1);
    let mut line_violations = Vec::new();
    let provided = tau.is_some();
    let tau_line = tau.unwrap_or((0, 1));
    match mode {
        LiftingMode::Gap => {
            for line in &lines {
                let rep = gap_check_line(f, line, &set_e, &set_eplus, None);
                if !rep.contained_in_big_ball {
                    if provided {
                        // property at τ: ratio > τ must imply containment
                        if rep.count_in_ball * tau_line.1 > tau_line.0 * rep.total_points {
                            line_violations.push(rep.object_id.clone());
                        }
                    } else if rep.count_in_ball * measured.1 > measured.0 * rep.total_points {
                        measured = (rep.count_in_ball, rep.total_points);
                    }
                }
            }
        }
        LiftingMode::CorrelatedAgreement => {
            for eprime in 0..=e {
                let set_ep = table.set_at(code, eprime);
                for line in &lines {
                    // canonical lines always have s1 ≠ 0: a dimension-1
                    // syndrome space
                    let count = f
                        .elements()
                        .filter(|&a| set_ep.contains(&line.eval(f, a)))
                        .count() as u64;
                    if count == 0 {
                        continue;
                    }
                    let targets = [line.s0.clone(), line.s1.clone()];
                    let ca = ca_decide(code, &targets, eprime, cap)?;
                    if !ca.decision {
                        if provided {
                            if count * tau_line.1 > tau_line.0 * q {
                                line_violations.push(format!("{}@E'={eprime}", line_id(line)));
                            }
                        } else if count * measured.1 > measured.0 * q {
                            measured = (count, q);
                        }
                    }
                }
            }
        }
    }
    let tau_used = if provided { tau_line } else { measured };
    let line_antecedent_holds = line_violations.is_empty();
    let tau_lifted = (tau_used.0 * q, tau_used.1 * (q - 1));

    // list-size hypothesis (CA mode only)
    let mut list_size = None;
    let mut hypothesis_ok = true;
    if mode == LiftingMode::CorrelatedAgreement {
        let mut rng = crate::seeds::rng(seed, "lifting-list-size", 0);
        let mut max_list = 0u64;
        let sampled = 64;
        for _ in 0..sampled {
            let y: Vector = (0..code.n()).map(|_| rng.random_range(0..f.q())).collect();
            let count = code.count_codewords_in_ball(&y, e, cap)?;
            max_list = max_list.max(count);
        }
        let ok = max_list < q;
        hypothesis_ok = ok;
        list_size = Some(ListSizeCheck {
            sampled,
            max_list,
            ok,
        });
    }

    // space level, dimensions 1 and 2
    let mut spaces_checked = 0;
    let mut space_violations = Vec::new();
    let asserted = line_antecedent_holds && hypothesis_ok;
    if asserted {
        for m in 1..=2usize.min(code.r()) {
            let spaces = enumerate_affine_spaces(f, code.r(), m, cap)?;
            for space in spaces {
                spaces_checked += 1;
                let pts = space.point_set(f);
                let total = pts.len() as u64;
                let count = pts.iter().filter(|p| set_e.contains(p)).count() as u64;
                if count * tau_lifted.1 <= tau_lifted.0 * total {
                    continue; // ratio not above the lifted threshold
                }
                match mode {
                    LiftingMode::Gap => {
                        if !pts.iter().all(|p| set_eplus.contains(p)) {
                            space_violations.push(space_id(&space));
                        }
                    }
                    LiftingMode::CorrelatedAgreement => {
                        let mut targets = vec![space.s0.clone()];
                        targets.extend(space.dirs.iter().cloned());
                        let ca = ca_decide(code, &targets, e, cap)?;
                        if !ca.decision {
                            space_violations.push(space_id(&space));
                        }
                    }
                }
            }
        }
    }
    let pass = !asserted || space_violations.is_empty();
    Ok(LiftingReport {
        mode,
        e,
        eplus,
        lines_checked: lines.len(),
        tau: tau_used,
        tau_lifted,
        line_antecedent_holds,
        line_violations,
        list_size,
        spaces_checked,
        space_violations,
        asserted,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{BallQuery, Strategy};
    use crate::geometry::push_space;
    use crate::linalg::weight;
    use std::sync::Arc;

    const CAP: u64 = 50_000_000;

    fn gf(q: u64) -> Arc<Field> {
        Arc::new(Field::new(q).unwrap())
    }

    #[test]
    fn zero_targets_give_empty_support() {
        let code = LinearCode::sample(gf(3), 7, 3, 1);
        let out = ca_decide(&code, &[vec![0; 3], vec![0; 3]], 2, CAP).unwrap();
        assert!(out.decision);
        assert_eq!(out.support, Some(vec![]));
        assert!(out.witness.unwrap().is_zero());
    }

    #[test]
    fn full_radius_reduces_to_solvability() {
        let code = LinearCode::sample(gf(4), 6, 3, 2);
        let f = code.field();
        // a target in the column span of H
        let y: Vector = (0..6).map(|i| (i % 4) as u32).collect();
        let s = code.syndrome(&y).unwrap();
        let out = ca_decide(&code, std::slice::from_ref(&s), code.n(), CAP).unwrap();
        assert!(out.decision);
        assert!(out.verify(&code, &[s], code.n()));
        // outside the column span: never solvable
        let rank = code.parity_check().rank(f);
        if rank < code.r() {
            // craft a syndrome outside the span
            let mut elim = crate::linalg::Eliminator::new(f, code.r());
            for j in 0..code.n() {
                elim.insert(code.parity_check().col(j));
            }
            let outside = crate::combin::Tuples::new(code.q(), code.r())
                .map(|t| t.to_vec())
                .find(|t| !elim.contains(t))
                .expect("rank-deficient column span misses something");
            let out = ca_decide(&code, &[outside], code.n(), CAP).unwrap();
            assert!(!out.decision);
        }
    }

    #[test]
    fn minimal_support_is_found() {
        let code = LinearCode::sample(gf(5), 8, 4, 7);
        // targets solvable on the single column {3}
        let h = code.parity_check();
        let f = code.field();
        let col3 = h.col(3);
        let s0: Vector = col3.iter().map(|&v| f.mul(2, v)).collect();
        let s1: Vector = col3.iter().map(|&v| f.mul(4, v)).collect();
        let out = ca_decide(&code, &[s0.clone(), s1.clone()], 3, CAP).unwrap();
        assert!(out.decision);
        assert_eq!(out.support.as_deref(), Some(&[3usize][..]));
        assert!(out.verify(&code, &[s0, s1], 3));
    }

    #[test]
    fn monotone_in_radius() {
        let code = LinearCode::sample(gf(3), 8, 4, 9);
        let mut rng = crate::seeds::rng(1, "ca-monotone", 0);
        for _ in 0..40 {
            let targets: Vec<Vector> = (0..2)
                .map(|_| (0..4).map(|_| rng.random_range(0..3u32)).collect())
                .collect();
            let mut prev = false;
            for eplus in 0..=8 {
                let out = ca_decide(&code, &targets, eplus, CAP).unwrap();
                assert!(!prev || out.decision, "decision lost at E+={eplus}");
                prev = out.decision;
            }
        }
    }

    #[test]
    fn crosscheck_object_inside_code() {
        // coefficients all codewords: both sides true at E+ = 0
        let code = LinearCode::sample(gf(3), 6, 2, 11);
        let basis = code.kernel_basis();
        assert!(basis.len() >= 2);
        let obj = WordObject::Space(WordSpace {
            base: basis[0].clone(),
            dirs: vec![basis[1].clone()],
        });
        let rep = reformulation_crosscheck(&code, &obj, 0, CAP).unwrap();
        assert!(rep.brute_force);
        assert!(rep.syndrome_side);
        assert!(rep.agree);
    }

    #[test]
    fn crosscheck_exhaustive_small_grid() {
        // q=2, n=6, r=3, m=1: every (u0, u1) pair agrees across routes
        let code = LinearCode::sample(gf(2), 6, 3, 5);
        let f = code.field();
        let words: Vec<Vector> = Tuples::new(2, 6).collect();
        let _ = f;
        for (i, u0) in words.iter().enumerate().step_by(3) {
            for u1 in words.iter().skip(i % 5).step_by(7) {
                let obj = WordObject::Space(WordSpace {
                    base: u0.clone(),
                    dirs: vec![u1.clone()],
                });
                for eplus in [0, 1, 2, 3] {
                    let rep = reformulation_crosscheck(&code, &obj, eplus, CAP).unwrap();
                    assert!(rep.agree, "u0={u0:?} u1={u1:?} E+={eplus} {rep:?}");
                }
            }
        }
    }

    #[test]
    fn crosscheck_sampled_curves() {
        let code = LinearCode::sample(gf(3), 5, 3, 13);
        let mut rng = crate::seeds::rng(2, "crosscheck-curve", 0);
        for _ in 0..60 {
            let coeffs: Vec<Vector> = (0..3)
                .map(|_| (0..5).map(|_| rng.random_range(0..3u32)).collect())
                .collect();
            let obj = WordObject::Curve(WordCurve { coeffs });
            for eplus in [0, 1, 2] {
                let rep = reformulation_crosscheck(&code, &obj, eplus, CAP).unwrap();
                assert!(rep.agree, "{rep:?}");
            }
        }
    }

    #[test]
    fn gap_reports_count_matches_pointwise() {
        let code = LinearCode::sample(gf(4), 8, 4, 3);
        let f = code.field();
        let table = crate::ball::syndrome_weight_table(&code, 2, CAP).unwrap();
        let set1 = table.set_at(&code, 1);
        let set2 = table.set_at(&code, 2);
        let mut rng = crate::seeds::rng(3, "gap-space", 0);
        for _ in 0..50 {
            let space = SyndromeSpace::new(
                f,
                (0..4).map(|_| rng.random_range(0..4u32)).collect(),
                vec![
                    (0..4).map(|_| rng.random_range(0..4u32)).collect(),
                    (0..4).map(|_| rng.random_range(0..4u32)).collect(),
                ],
            );
            let rep = gap_check_space(f, &space, &set1, &set2, None);
            let brute = space
                .point_set(f)
                .iter()
                .filter(|p| set1.contains(p))
                .count() as u64;
            assert_eq!(rep.count_in_ball, brute);
            assert_eq!(rep.total_points, 4u64.pow(space.dir_rank as u32));
            // eval ratio uses q^m tuples
            assert_eq!(rep.eval_total, Some(16));
        }
    }

    #[test]
    fn singleton_space_is_contained_when_member() {
        let code = LinearCode::sample(gf(3), 6, 3, 21);
        let f = code.field();
        let set0 = BallQuery::new(&code, 0, Strategy::Auto)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        // S = {0}: ratio 1, contained at any radius
        let space = SyndromeSpace::new(f, vec![0; 3], vec![vec![0; 3]]);
        let rep = gap_check_space(f, &space, &set0, &set0, None);
        assert_eq!(rep.total_points, 1);
        assert_eq!(rep.count_in_ball, 1);
        assert!(rep.contained_in_big_ball);
    }

    #[test]
    fn lifting_gap_mode_small_code() {
        for seed in 0..4u64 {
            let code = LinearCode::sample(gf(4), 8, 4, 400 + seed);
            let rep = lifting_test(&code, 1, 2, None, LiftingMode::Gap, seed, CAP).unwrap();
            assert!(rep.line_antecedent_holds);
            assert!(rep.asserted);
            assert!(rep.pass, "{rep:?}");
            assert!(rep.space_violations.is_empty());
        }
    }

    #[test]
    fn lifting_ca_mode_small_code() {
        for seed in 0..2u64 {
            let code = LinearCode::sample(gf(4), 8, 4, 500 + seed);
            let rep = lifting_test(
                &code,
                1,
                1,
                None,
                LiftingMode::CorrelatedAgreement,
                seed,
                CAP,
            )
            .unwrap();
            let ls = rep.list_size.as_ref().expect("list sizes sampled");
            if ls.ok {
                assert!(rep.asserted);
                assert!(rep.pass, "{rep:?}");
            } else {
                assert!(!rep.asserted);
            }
        }
    }

    #[test]
    fn lifting_with_unattainable_tau_records_line_failures() {
        // τ = 0 forces every line with any member to be contained;
        // violations are recorded and spaces are skipped
        let code = LinearCode::sample(gf(3), 7, 3, 31);
        let rep = lifting_test(&code, 1, 1, Some((0, 1)), LiftingMode::Gap, 0, CAP).unwrap();
        if !rep.line_antecedent_holds {
            assert!(!rep.asserted);
            assert_eq!(rep.spaces_checked, 0);
            assert!(rep.pass); // vacuous
        }
    }

    #[test]
    fn ca_agrees_with_pushforward_witness_structure() {
        // when CA holds, the witness differs from (u_i) by codewords
        let code = LinearCode::sample(gf(3), 7, 4, 17);
        let f = code.field();
        let mut rng = crate::seeds::rng(4, "ca-structure", 0);
        for _ in 0..30 {
            let space = WordSpace {
                base: (0..7).map(|_| rng.random_range(0..3u32)).collect(),
                dirs: vec![(0..7).map(|_| rng.random_range(0..3u32)).collect()],
            };
            let syn = push_space(&code, &space).unwrap();
            let targets = [syn.s0.clone(), syn.dirs[0].clone()];
            let out = ca_decide(&code, &targets, 3, CAP).unwrap();
            if out.decision {
                let w = out.witness.as_ref().unwrap();
                assert!(out.verify(&code, &targets, 3));
                // u_i − x_i must be codewords
                for (i, u) in [&space.base, &space.dirs[0]].iter().enumerate() {
                    let x = w.col(i);
                    let c: Vector = u.iter().zip(&x).map(|(&a, &b)| f.sub(a, b)).collect();
                    assert!(code.contains(&c));
                }
            }
        }
    }

    #[test]
    fn report_counts_weight_zero_target() {
        // all-zero target always decides true with empty support
        let code = LinearCode::sample(gf(2), 5, 2, 77);
        let out = ca_decide(&code, &[vec![0, 0]], 0, CAP).unwrap();
        assert!(out.decision);
        assert_eq!(weight(&out.witness.unwrap().col(0)), 0);
    }
}
