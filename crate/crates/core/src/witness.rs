//! Witness matrices for syndrome lines, affine m-spaces, and polynomial
//! curves, and the deterministic rank-reduction machinery built on them.
//!
//! A witness matrix holds K columns of weight ≤ E mapping to prescribed
//! points of one syndrome object. One engine drives all three kinds; the
//! kinds differ only in their design rows (all-ones plus evaluation
//! scalars, coordinate rows, or Vandermonde powers) and the base rank
//! h = dim span of the target coefficients. Reduction steps certify the
//! retained column count, and `threshold_check` re-derives the count
//! threshold a bad object forces, flagging any violation as a
//! counterexample (which must never occur).

use crate::codes::{CodeDescriptor, CodesError, LinearCode};
use crate::field::Field;
use crate::geometry::{SyndromeCurve, SyndromeLine, SyndromeSpace};
use crate::linalg::{
    express_in_row_basis, row_space_tools, support, weight, LinalgError, Matrix, Vector,
};
use crate::seeds;
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("witness rank {rank} does not exceed the target span dimension {base}")]
    RankTooLow { rank: usize, base: usize },
    #[error("degenerate evaluation design: {0}")]
    DesignDegenerate(String),
    #[error("degenerate target: {0}")]
    TargetDegenerate(String),
    #[error("column {column} violates the witness predicate: {reason}")]
    NotAWitness { column: usize, reason: String },
    #[error("retained column count {retained} at or below the degeneracy threshold {threshold}")]
    ThresholdUnderflow { retained: usize, threshold: u64 },
    #[error("minimum distance not computed for this code")]
    MissingDistance,
    #[error("radii violate 0 < E <= E+ < d: E={e}, E+={eplus}, d={d}")]
    RadiusOutOfRange { e: usize, eplus: usize, d: String },
    #[error("kind mismatch between target and design")]
    KindMismatch,
    #[error("synthesis infeasible: {0}")]
    InfeasibleBudget(String),
    #[error("budget exceeded: about {estimate} operations (cap {cap})")]
    BudgetExceeded { estimate: BigUint, cap: u64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Codes(#[from] CodesError),
}

/// Which family of syndrome objects a witness covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignKind {
    Line,
    Space { m: usize },
    Curve { degree: usize },
}

impl DesignKind {
    /// Number of coefficient vectors / design rows.
    pub fn arity(&self) -> usize {
        match self {
            DesignKind::Line => 2,
            DesignKind::Space { m } => m + 1,
            DesignKind::Curve { degree } => degree + 1,
        }
    }

    /// Retained-count threshold below which iterated reduction loses its
    /// design guarantee: 1 for lines, q^{m−1} for spaces, ℓ for curves.
    pub fn degeneracy_threshold(&self, q: u64) -> u64 {
        match self {
            DesignKind::Line => 1,
            DesignKind::Space { m } => q.pow((m - 1) as u32),
            DesignKind::Curve { degree } => *degree as u64,
        }
    }
}

/// Evaluation points for the witness columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignPoints {
    /// α_j for lines and curves
    Scalars(Vec<u32>),
    /// β_j ∈ F_q^m for spaces
    Tuples(Vec<Vector>),
}

/// K pairwise-distinct evaluation points; the induced design rows come
/// from `rows`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationDesign {
    pub kind: DesignKind,
    pub points: DesignPoints,
}

impl EvaluationDesign {
    pub fn line(alphas: Vec<u32>) -> EvaluationDesign {
        EvaluationDesign {
            kind: DesignKind::Line,
            points: DesignPoints::Scalars(alphas),
        }
    }

    pub fn space(betas: Vec<Vector>) -> EvaluationDesign {
        let m = betas.first().map_or(0, Vec::len);
        EvaluationDesign {
            kind: DesignKind::Space { m },
            points: DesignPoints::Tuples(betas),
        }
    }

    pub fn curve(degree: usize, alphas: Vec<u32>) -> EvaluationDesign {
        EvaluationDesign {
            kind: DesignKind::Curve { degree },
            points: DesignPoints::Scalars(alphas),
        }
    }

    pub fn len(&self) -> usize {
        match &self.points {
            DesignPoints::Scalars(v) => v.len(),
            DesignPoints::Tuples(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    /// The induced matrix U: row 0 all ones, then per kind the
    /// evaluation scalars, the coordinate rows, or the Vandermonde
    /// power rows.
    pub fn rows(&self, f: &Field) -> Matrix {
        let k = self.len();
        let arity = self.arity();
        let mut u = Matrix::zero(arity, k);
        for j in 0..k {
            u.set(0, j, 1);
        }
        match (&self.kind, &self.points) {
            (DesignKind::Line, DesignPoints::Scalars(alphas)) => {
                for (j, &a) in alphas.iter().enumerate() {
                    u.set(1, j, a);
                }
            }
            (DesignKind::Space { m }, DesignPoints::Tuples(betas)) => {
                for (j, beta) in betas.iter().enumerate() {
                    for (i, &value) in beta.iter().enumerate().take(*m) {
                        u.set(1 + i, j, value);
                    }
                }
            }
            (DesignKind::Curve { degree }, DesignPoints::Scalars(alphas)) => {
                for (j, &a) in alphas.iter().enumerate() {
                    let mut pw = 1u32;
                    for i in 1..=*degree {
                        pw = f.mul(pw, a);
                        u.set(i, j, pw);
                    }
                }
            }
            _ => unreachable!("constructors keep kind and points consistent"),
        }
        u
    }

    /// Points pairwise distinct and shaped for the kind.
    pub fn validate(&self) -> Result<(), WitnessError> {
        match (&self.kind, &self.points) {
            (DesignKind::Line, DesignPoints::Scalars(v))
            | (DesignKind::Curve { .. }, DesignPoints::Scalars(v)) => {
                let set: BTreeSet<_> = v.iter().collect();
                if set.len() != v.len() {
                    return Err(WitnessError::DesignDegenerate(
                        "evaluation points are not pairwise distinct".into(),
                    ));
                }
            }
            (DesignKind::Space { m }, DesignPoints::Tuples(v)) => {
                if v.iter().any(|b| b.len() != *m) {
                    return Err(WitnessError::DesignDegenerate(
                        "evaluation tuple has wrong length".into(),
                    ));
                }
                let set: BTreeSet<_> = v.iter().collect();
                if set.len() != v.len() {
                    return Err(WitnessError::DesignDegenerate(
                        "evaluation points are not pairwise distinct".into(),
                    ));
                }
            }
            _ => return Err(WitnessError::KindMismatch),
        }
        Ok(())
    }

    /// Whether the design rows have full rank `arity`. For spaces this
    /// says the β's do not sit inside an affine hyperplane; for curves
    /// it is the Vandermonde condition on ≥ degree+1 distinct points.
    pub fn full_rank(&self, f: &Field) -> bool {
        self.rows(f).rank(f) == self.arity()
    }

    /// The sub-design at the given point indices.
    pub fn restrict(&self, keep: &[usize]) -> EvaluationDesign {
        let points = match &self.points {
            DesignPoints::Scalars(v) => DesignPoints::Scalars(keep.iter().map(|&j| v[j]).collect()),
            DesignPoints::Tuples(v) => {
                DesignPoints::Tuples(keep.iter().map(|&j| v[j].clone()).collect())
            }
        };
        EvaluationDesign {
            kind: self.kind,
            points,
        }
    }
}

/// The syndrome object a witness matrix covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyndromeTarget {
    Line(SyndromeLine),
    Space(SyndromeSpace),
    Curve(SyndromeCurve),
}

impl SyndromeTarget {
    pub fn kind(&self) -> DesignKind {
        match self {
            SyndromeTarget::Line(_) => DesignKind::Line,
            SyndromeTarget::Space(s) => DesignKind::Space { m: s.m() },
            SyndromeTarget::Curve(c) => DesignKind::Curve { degree: c.degree() },
        }
    }

    /// Coefficient syndromes s_0, s_1, .., in order.
    pub fn coefficients(&self) -> Vec<&Vector> {
        match self {
            SyndromeTarget::Line(l) => vec![&l.s0, &l.s1],
            SyndromeTarget::Space(s) => s.coefficients(),
            SyndromeTarget::Curve(c) => c.coeffs.iter().collect(),
        }
    }

    /// h = dim span of the coefficient syndromes.
    pub fn h(&self) -> usize {
        match self {
            SyndromeTarget::Line(l) => usize::from(l.dim),
            SyndromeTarget::Space(s) => s.h,
            SyndromeTarget::Curve(c) => c.h,
        }
    }

    /// The target syndrome at design point j.
    pub fn eval_design(&self, f: &Field, design: &EvaluationDesign, j: usize) -> Vector {
        match (self, &design.points) {
            (SyndromeTarget::Line(l), DesignPoints::Scalars(a)) => l.eval(f, a[j]),
            (SyndromeTarget::Space(s), DesignPoints::Tuples(b)) => s.eval(f, &b[j]),
            (SyndromeTarget::Curve(c), DesignPoints::Scalars(a)) => c.eval(f, a[j]),
            _ => unreachable!("kind consistency checked at construction"),
        }
    }
}

/// Columns x_1..x_K of weight ≤ E with H·x_j equal to the target at
/// design point j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessMatrix {
    pub target: SyndromeTarget,
    pub design: EvaluationDesign,
    /// n×K; column j is x_j
    pub columns: Matrix,
    /// E
    pub radius: usize,
}

/// First violation found by `verify_witness`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessViolation {
    pub column: usize,
    pub reason: String,
}

impl WitnessMatrix {
    pub fn new(
        target: SyndromeTarget,
        design: EvaluationDesign,
        columns: Matrix,
        radius: usize,
    ) -> Result<WitnessMatrix, WitnessError> {
        if target.kind() != design.kind {
            return Err(WitnessError::KindMismatch);
        }
        design.validate()?;
        if design.len() != columns.cols() {
            return Err(WitnessError::DesignDegenerate(format!(
                "{} design points for {} columns",
                design.len(),
                columns.cols()
            )));
        }
        Ok(WitnessMatrix {
            target,
            design,
            columns,
            radius,
        })
    }

    pub fn k(&self) -> usize {
        self.columns.cols()
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.columns.rank(f)
    }

    /// Y = [target at point 1 | .. | target at point K].
    pub fn target_images(&self, f: &Field) -> Matrix {
        let cols = (0..self.k())
            .map(|j| self.target.eval_design(f, &self.design, j))
            .collect();
        Matrix::from_cols(cols)
    }
}

/// Checks both witness conditions; reports the first offending column.
pub fn verify_witness(code: &LinearCode, w: &WitnessMatrix) -> Result<(), WitnessViolation> {
    let f = code.field();
    for j in 0..w.k() {
        let col = w.columns.col(j);
        let wt = weight(&col);
        if wt > w.radius {
            return Err(WitnessViolation {
                column: j,
                reason: format!("weight {wt} exceeds E = {}", w.radius),
            });
        }
        let got = code.syndrome(&col).expect("column length n");
        let want = w.target.eval_design(f, &w.design, j);
        if got != want {
            return Err(WitnessViolation {
                column: j,
                reason: "syndrome does not match the target point".into(),
            });
        }
    }
    Ok(())
}

/// What the reduction step eliminated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Elimination {
    Eliminated {
        codeword: Vector,
        support_size: usize,
    },
    /// every coefficient beyond the base vanished, so the rank was
    /// already lower than claimed
    RankAlreadyLower,
}

/// Certificate for one rank-reduction step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    /// J, indices into the input witness columns
    pub retained: Vec<usize>,
    pub eliminated: Elimination,
    pub pivot_coordinate: Option<usize>,
    pub rank_before: usize,
    pub rank_after: usize,
    /// (|supp(c)| − E, |supp(c)|): the certified retained fraction from
    /// the actual eliminated support
    pub retained_fraction: Option<(u64, u64)>,
    /// (d − E, d) from the supplied distance lower bound (0 numerator
    /// when d ≤ E)
    pub gamma_lower: (u64, u64),
}

impl ReductionCertificate {
    /// ceil(K·(|supp| − E)/|supp|), the certified minimum for |J|.
    pub fn certified_minimum(&self, k: usize) -> usize {
        match self.retained_fraction {
            Some((num, den)) if den > 0 => (k as u64 * num).div_ceil(den) as usize,
            _ => 0,
        }
    }
}

fn gamma_pair(d_lower: usize, e: usize) -> (u64, u64) {
    let d = d_lower.max(1) as u64;
    (d.saturating_sub(e as u64), d)
}

/// One deterministic rank-reduction step: expresses the witness over a
/// basis of its row space extending the target image rows, picks the
/// expressed coefficient codeword with the largest support (ties:
/// smallest index), pigeonholes a pivot coordinate of that support
/// where the most columns vanish (ties: smallest index), and keeps
/// exactly those columns. The result witnesses the same target with
/// rank ≤ t−1 and |J| ≥ ceil(K·(|supp(c)|−E)/|supp(c)|).
pub fn reduce_rank_once(
    code: &LinearCode,
    w: &WitnessMatrix,
    d_lower: usize,
) -> Result<(WitnessMatrix, ReductionCertificate), WitnessError> {
    let f = code.field();
    w.design.validate()?;
    if let Err(v) = verify_witness(code, w) {
        return Err(WitnessError::NotAWitness {
            column: v.column,
            reason: v.reason,
        });
    }
    if matches!(w.design.kind, DesignKind::Line) && w.target.h() != 2 {
        return Err(WitnessError::TargetDegenerate(
            "line target must have dim span{s0,s1} = 2".into(),
        ));
    }
    let t = w.columns.rank(f);
    let h = w.target.h();
    if t <= h {
        return Err(WitnessError::RankTooLow { rank: t, base: h });
    }
    if !w.design.full_rank(f) {
        return Err(WitnessError::DesignDegenerate(match w.design.kind {
            DesignKind::Line => "all evaluation scalars coincide".into(),
            DesignKind::Space { .. } => "evaluation points lie inside an affine hyperplane".into(),
            DesignKind::Curve { degree } => {
                format!("need more than {degree} distinct evaluation points")
            }
        }));
    }

    let k = w.k();
    let y = w.target_images(f);
    // Row(Y) ⊆ Row(X) because Y = HX; extend a basis of Row(Y) to one
    // of Row(X) using rows of X, then express X in it. Coefficient
    // columns beyond the first h are codewords.
    let (base, completion) = row_space_tools(f, &w.columns, &y.row_vecs())?;
    debug_assert_eq!(base.len(), h);
    let mut rows = base;
    rows.extend(completion);
    let w_basis = Matrix::from_rows(rows);
    let coeffs = express_in_row_basis(f, &w.columns, &w_basis)?;
    let mut eliminated: Option<(Vector, usize)> = None;
    for l in h..t {
        let c = coeffs.col(l);
        let wt = weight(&c);
        debug_assert!(code.contains(&c), "beyond-base coefficients are codewords");
        if wt > 0 && eliminated.as_ref().is_none_or(|(_, bw)| wt > *bw) {
            eliminated = Some((c, wt));
        }
    }
    let Some((codeword, supp_size)) = eliminated else {
        // cannot happen when rank(X) = t exactly, but honor the
        // contract: report the marker and leave the witness unchanged
        let cert = ReductionCertificate {
            retained: (0..k).collect(),
            eliminated: Elimination::RankAlreadyLower,
            pivot_coordinate: None,
            rank_before: t,
            rank_after: t,
            retained_fraction: None,
            gamma_lower: gamma_pair(d_lower, w.radius),
        };
        return Ok((w.clone(), cert));
    };

    // pigeonhole: the support coordinate where the most columns vanish
    let supp = support(&codeword);
    let mut pivot = supp[0];
    let mut best_zeros = 0usize;
    for &i in &supp {
        let zeros = (0..k).filter(|&j| w.columns.get(i, j) == 0).count();
        if zeros > best_zeros {
            best_zeros = zeros;
            pivot = i;
        }
    }
    let retained: Vec<usize> = (0..k).filter(|&j| w.columns.get(pivot, j) == 0).collect();
    let reduced = WitnessMatrix {
        target: w.target.clone(),
        design: w.design.restrict(&retained),
        columns: w.columns.select_cols(&retained),
        radius: w.radius,
    };
    let rank_after = reduced.columns.rank(f);
    debug_assert!(rank_after < t);
    let cert = ReductionCertificate {
        retained,
        eliminated: Elimination::Eliminated {
            codeword,
            support_size: supp_size,
        },
        pivot_coordinate: Some(pivot),
        rank_before: t,
        rank_after,
        retained_fraction: Some((supp_size.saturating_sub(w.radius) as u64, supp_size as u64)),
        gamma_lower: gamma_pair(d_lower, w.radius),
    };
    debug_assert!(cert.retained.len() >= cert.certified_minimum(k));
    Ok((reduced, cert))
}

/// Result of iterating the reduction down to the base rank: the
/// parametrization coefficients with H·a_i = s_i exactly, the surviving
/// original column indices, and the per-step certificate chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseExtraction {
    /// a_0, a_1, .., one per target coefficient
    pub coefficients: Vec<Vector>,
    /// indices into the original witness columns
    pub retained: Vec<usize>,
    pub chain: Vec<ReductionCertificate>,
    /// the final reduced witness
    pub witness: WitnessMatrix,
}

/// Iterates `reduce_rank_once` until the rank equals the base dimension
/// h, then expresses the surviving columns exactly over the design
/// rows. Errors with `ThresholdUnderflow` if the retained count ever
/// falls to the kind's degeneracy threshold (q^{m−1} for spaces, ℓ for
/// curves, 1 for lines); above the threshold the restricted design is
/// guaranteed to keep full rank, which is what the final expression
/// needs.
pub fn reduce_to_base(
    code: &LinearCode,
    w: &WitnessMatrix,
    d_lower: usize,
) -> Result<BaseExtraction, WitnessError> {
    let f = code.field();
    let threshold = w.design.kind.degeneracy_threshold(code.q());
    let h = w.target.h();
    let mut current = w.clone();
    let mut index_map: Vec<usize> = (0..w.k()).collect();
    let mut chain = Vec::new();
    loop {
        let t = current.columns.rank(f);
        if t <= h {
            break;
        }
        let (next, cert) = reduce_rank_once(code, &current, d_lower)?;
        if (next.k() as u64) <= threshold {
            return Err(WitnessError::ThresholdUnderflow {
                retained: next.k(),
                threshold,
            });
        }
        index_map = cert.retained.iter().map(|&j| index_map[j]).collect();
        chain.push(cert);
        current = next;
    }
    if let Err(v) = verify_witness(code, &current) {
        return Err(WitnessError::NotAWitness {
            column: v.column,
            reason: v.reason,
        });
    }
    // final parametrization: X_J = [a_0 | a_1 | ..] · U_J
    let u = current.design.rows(f);
    if u.rank(f) != current.design.arity() {
        return Err(WitnessError::DesignDegenerate(
            "surviving evaluation points no longer span the design".into(),
        ));
    }
    let coeff_matrix = express_in_row_basis(f, &current.columns, &u)?;
    let coefficients: Vec<Vector> = (0..current.design.arity())
        .map(|i| coeff_matrix.col(i))
        .collect();
    // H·a_i = s_i, bit-exactly
    for (a, s) in coefficients.iter().zip(current.target.coefficients()) {
        if &code.syndrome(a)? != s {
            return Err(WitnessError::TargetDegenerate(
                "extracted coefficients do not map to the target syndromes".into(),
            ));
        }
    }
    // every surviving column equals the parametrization at its point
    for j in 0..current.k() {
        let mut expect = vec![0u32; code.n()];
        for (i, a) in coefficients.iter().enumerate() {
            let c = u.get(i, j);
            if c != 0 {
                for (slot, &ai) in expect.iter_mut().zip(a) {
                    if ai != 0 {
                        *slot = f.add(*slot, f.mul(c, ai));
                    }
                }
            }
        }
        if expect != current.columns.col(j) {
            return Err(WitnessError::TargetDegenerate(
                "surviving column differs from its parametrized value".into(),
            ));
        }
    }
    Ok(BaseExtraction {
        coefficients,
        retained: index_map,
        chain,
        witness: current,
    })
}

/// Outcome of checking the count threshold a bad object forces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdVerdict {
    /// K·γ^{t−h} is within the bound, as required
    Holds,
    /// the hypothesis flag was false, so the threshold does not apply
    NotApplicable,
    /// the inequality failed; this falsifies either the hypotheses or
    /// the implementation and must never occur
    Counterexample(Box<CounterexampleCertificate>),
}

/// Full reproduction bundle for a threshold violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub code: CodeDescriptor,
    pub witness: WitnessMatrix,
    pub eplus: usize,
    pub k: usize,
    pub rank: usize,
    pub base: usize,
    pub lhs: String,
    pub rhs: String,
}

/// Report from `threshold_check`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub verdict: ThresholdVerdict,
    pub k: usize,
    pub rank: usize,
    pub base: usize,
    /// floor((E+ + 1)/(E+ − E + 1))
    pub b_floor: u64,
    /// exact γ = (d − E)/d
    pub gamma: (u64, u64),
}

/// Hypothesis under which the threshold inequality is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapHypothesis {
    /// for lines: L ⊄ H_{E+}
    LineNotContained(bool),
    /// for spaces and curves: no row-weight-E+ joint preimage exists
    NoCorrelatedAgreement(bool),
}

impl GapHypothesis {
    fn active(&self) -> bool {
        match self {
            GapHypothesis::LineNotContained(b) | GapHypothesis::NoCorrelatedAgreement(b) => *b,
        }
    }
}

/// Checks the forced count threshold for a verified witness on a bad
/// object: K·γ^{t−h} ≤ B for lines, ≤ (E⁺+1)/(E⁺−E+1)·q^{m−1} for
/// spaces, and ≤ ℓ·(E⁺+1)/(E⁺−E+1) for curves. The space and curve
/// bounds are kept as exact rationals — that is what the
/// ball-intersection lemmas deliver; flooring them first is strictly
/// stronger and fails on real instances. All comparisons are exact
/// integer arithmetic.
pub fn threshold_check(
    code: &LinearCode,
    w: &WitnessMatrix,
    eplus: usize,
    hypothesis: GapHypothesis,
) -> Result<ThresholdReport, WitnessError> {
    let f = code.field();
    let e = w.radius;
    let Some(dist) = code.cached_distance() else {
        return Err(WitnessError::MissingDistance);
    };
    // threshold hypotheses: 0 < E ≤ E+ < d
    if e == 0 || e > eplus || !dist.at_least(eplus + 1) {
        return Err(WitnessError::RadiusOutOfRange {
            e,
            eplus,
            d: dist.to_string(),
        });
    }
    if let Err(v) = verify_witness(code, w) {
        return Err(WitnessError::NotAWitness {
            column: v.column,
            reason: v.reason,
        });
    }
    let k = w.k();
    let t = w.columns.rank(f);
    let h = w.target.h();
    if matches!(w.design.kind, DesignKind::Line) && h != 2 {
        return Err(WitnessError::TargetDegenerate(
            "line target must have dim span{s0,s1} = 2".into(),
        ));
    }
    let b_floor = ((eplus + 1) / (eplus - e + 1)) as u64;
    let (gnum, gden) = match dist {
        crate::codes::Distance::Finite(d) => ((d - e) as u64, d as u64),
        // no nonzero codewords: reduction never discards a column
        crate::codes::Distance::Infinite => (1, 1),
    };
    let report = |verdict| ThresholdReport {
        verdict,
        k,
        rank: t,
        base: h,
        b_floor,
        gamma: (gnum, gden),
    };
    if !hypothesis.active() {
        return Ok(report(ThresholdVerdict::NotApplicable));
    }
    let delta = t.saturating_sub(h) as u32;
    let gn = BigUint::from(gnum).pow(delta);
    let gd = BigUint::from(gden).pow(delta);
    let (lhs, rhs) = match w.design.kind {
        DesignKind::Line => (BigUint::from(k as u64) * gn, BigUint::from(b_floor) * gd),
        DesignKind::Space { m } => {
            let qpow = crate::combin::power(code.q(), (m - 1) as u64);
            (
                BigUint::from(k as u64) * gn * BigUint::from((eplus - e + 1) as u64),
                BigUint::from((eplus + 1) as u64) * qpow * gd,
            )
        }
        DesignKind::Curve { degree } => (
            BigUint::from(k as u64) * gn * BigUint::from((eplus - e + 1) as u64),
            BigUint::from(degree as u64) * BigUint::from((eplus + 1) as u64) * gd,
        ),
    };
    if lhs <= rhs {
        Ok(report(ThresholdVerdict::Holds))
    } else {
        let cert = CounterexampleCertificate {
            code: code.descriptor(),
            witness: w.clone(),
            eplus,
            k,
            rank: t,
            base: h,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        };
        Ok(report(ThresholdVerdict::Counterexample(Box::new(cert))))
    }
}

/// Builds a witness with exactly the requested rank: base coefficient
/// vectors with tiny disjoint supports give the rank-h skeleton, then
/// selected columns are swapped for alternative low-weight preimages of
/// the same target points (differing by codewords found via one ball
/// walk) until the rank reaches `target_rank`.
pub fn synth_witness(
    code: &LinearCode,
    kind: DesignKind,
    target_rank: usize,
    k_points: usize,
    e: usize,
    seed: u64,
    cap: u64,
) -> Result<WitnessMatrix, WitnessError> {
    let f = code.field();
    let n = code.n();
    let arity = kind.arity();
    let q = code.q();
    if code.r() < arity {
        return Err(WitnessError::InfeasibleBudget(format!(
            "independent target syndromes need r >= {arity}"
        )));
    }
    if e < arity {
        return Err(WitnessError::InfeasibleBudget(format!(
            "weight budget: need E >= {arity} for the base vectors"
        )));
    }
    if n < arity {
        return Err(WitnessError::InfeasibleBudget(
            "word length too small for disjoint base supports".into(),
        ));
    }
    if target_rank < arity {
        return Err(WitnessError::RankTooLow {
            rank: target_rank,
            base: arity,
        });
    }
    if target_rank > arity + code.dimension() {
        return Err(WitnessError::InfeasibleBudget(format!(
            "rank {target_rank} exceeds base {arity} plus code dimension {}",
            code.dimension()
        )));
    }
    if k_points < target_rank {
        return Err(WitnessError::InfeasibleBudget(
            "need at least target_rank design points".into(),
        ));
    }
    let domain = match kind {
        DesignKind::Line | DesignKind::Curve { .. } => q,
        DesignKind::Space { m } => q.saturating_pow(m as u32),
    };
    if (k_points as u64) > domain {
        return Err(WitnessError::InfeasibleBudget(format!(
            "only {domain} distinct evaluation points exist"
        )));
    }

    // one ball walk per call: all weight ≤ E words bucketed by syndrome
    let walk_cost = crate::combin::ball_volume(n as u64, q, e as u64);
    if crate::combin::within_budget(&walk_cost, cap).is_none() {
        return Err(WitnessError::BudgetExceeded {
            estimate: walk_cost,
            cap,
        });
    }
    const PREIMAGES_PER_SYNDROME: usize = 48;
    let mut preimages: BTreeMap<Vector, Vec<Vector>> = BTreeMap::new();
    for wgt in 0..=e {
        crate::codes::for_each_word_of_weight(f, n, wgt, &mut |x| {
            let s = code.syndrome(x).expect("length n");
            let bucket = preimages.entry(s).or_default();
            if bucket.len() < PREIMAGES_PER_SYNDROME {
                bucket.push(x.to_vec());
            }
            true
        });
    }

    const ATTEMPTS: u64 = 64;
    for attempt in 0..ATTEMPTS {
        let mut rng = seeds::rng(seed, "synth-witness", attempt);
        let design = match kind {
            DesignKind::Line | DesignKind::Curve { .. } => {
                let mut all: Vec<u32> = f.elements().collect();
                all.shuffle(&mut rng);
                all.truncate(k_points);
                match kind {
                    DesignKind::Line => EvaluationDesign::line(all),
                    DesignKind::Curve { degree } => EvaluationDesign::curve(degree, all),
                    DesignKind::Space { .. } => unreachable!(),
                }
            }
            DesignKind::Space { m } => {
                let mut set = BTreeSet::new();
                let mut guard = 0;
                while set.len() < k_points && guard < 10_000 {
                    let beta: Vector = (0..m).map(|_| rng.random_range(0..f.q())).collect();
                    set.insert(beta);
                    guard += 1;
                }
                if set.len() < k_points {
                    continue;
                }
                let mut pts: Vec<Vector> = set.into_iter().collect();
                pts.shuffle(&mut rng);
                EvaluationDesign::space(pts)
            }
        };
        if !design.full_rank(f) {
            continue;
        }

        // base vectors: singletons on distinct coordinates
        let mut coords: Vec<usize> = (0..n).collect();
        coords.shuffle(&mut rng);
        let bases: Vec<Vector> = (0..arity)
            .map(|i| {
                let mut v = vec![0u32; n];
                v[coords[i]] = rng.random_range(1..f.q());
                v
            })
            .collect();
        let syndromes: Vec<Vector> = bases
            .iter()
            .map(|b| code.syndrome(b).expect("length n"))
            .collect();
        if Matrix::from_rows(syndromes.clone()).rank(f) != arity {
            continue;
        }
        let target = match kind {
            DesignKind::Line => SyndromeTarget::Line(SyndromeLine::new(
                f,
                syndromes[0].clone(),
                syndromes[1].clone(),
            )),
            DesignKind::Space { .. } => SyndromeTarget::Space(SyndromeSpace::new(
                f,
                syndromes[0].clone(),
                syndromes[1..].to_vec(),
            )),
            DesignKind::Curve { .. } => {
                SyndromeTarget::Curve(SyndromeCurve::new(f, syndromes.clone()))
            }
        };

        // columns on the parametrization by the base vectors
        let urows = design.rows(f);
        let mut columns: Vec<Vector> = (0..k_points)
            .map(|j| {
                let mut x = vec![0u32; n];
                for (i, b) in bases.iter().enumerate() {
                    let c = urows.get(i, j);
                    if c != 0 {
                        for (xi, &bi) in x.iter_mut().zip(b) {
                            if bi != 0 {
                                *xi = f.add(*xi, f.mul(c, bi));
                            }
                        }
                    }
                }
                x
            })
            .collect();

        // swap columns for alternative preimages until the rank target;
        // a candidate outside the current column span bumps the rank
        // because the swapped-out parametrized column stays in it
        let mut elim = crate::linalg::Eliminator::new(f, n);
        for c in &columns {
            elim.insert(c.clone());
        }
        let mut rank = Matrix::from_cols(columns.clone()).rank(f);
        debug_assert_eq!(rank, arity);
        let mut order: Vec<usize> = (0..k_points).collect();
        order.shuffle(&mut rng);
        for &j in &order {
            if rank >= target_rank {
                break;
            }
            let s = target.eval_design(f, &design, j);
            let Some(bucket) = preimages.get(&s) else {
                continue;
            };
            for alt in bucket {
                if *alt == columns[j] || elim.contains(alt) {
                    continue;
                }
                let saved = std::mem::replace(&mut columns[j], alt.clone());
                let new_rank = Matrix::from_cols(columns.clone()).rank(f);
                if new_rank > rank {
                    rank = new_rank;
                    elim.insert(alt.clone());
                    break;
                }
                columns[j] = saved;
            }
        }
        if rank != target_rank {
            continue;
        }
        let w = WitnessMatrix::new(target, design, Matrix::from_cols(columns), e)?;
        if verify_witness(code, &w).is_ok() {
            return Ok(w);
        }
    }
    Err(WitnessError::InfeasibleBudget(format!(
        "no rank-{target_rank} witness found in {ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_linear;
    use std::sync::Arc;

    const CAP: u64 = 50_000_000;

    fn gf(q: u64) -> Arc<Field> {
        Arc::new(Field::new(q).unwrap())
    }

    /// Code with small r (dense syndrome collisions) for synthesis.
    fn synth_code(q: u64, n: usize, r: usize, seed: u64) -> LinearCode {
        LinearCode::sample(gf(q), n, r, seed)
    }

    #[test]
    fn verify_accepts_zero_witness() {
        let code = synth_code(5, 8, 3, 1);
        let f = code.field();
        let target = SyndromeTarget::Line(SyndromeLine::new(f, vec![0; 3], vec![0; 3]));
        let design = EvaluationDesign::line(vec![0, 1, 2]);
        let w = WitnessMatrix::new(target, design, Matrix::zero(8, 3), 2).unwrap();
        assert!(verify_witness(&code, &w).is_ok());
    }

    #[test]
    fn verify_reports_weight_violation() {
        let code = synth_code(5, 8, 3, 1);
        let f = code.field();
        let target = SyndromeTarget::Line(SyndromeLine::new(f, vec![0; 3], vec![0; 3]));
        let design = EvaluationDesign::line(vec![0, 1]);
        let mut cols = Matrix::zero(8, 2);
        // column 1 gets weight 3 > E = 2
        cols.set(0, 1, 1);
        cols.set(1, 1, 1);
        cols.set(2, 1, 1);
        let w = WitnessMatrix::new(target, design, cols, 2).unwrap();
        let v = verify_witness(&code, &w).unwrap_err();
        assert_eq!(v.column, 1);
        assert!(v.reason.contains("weight"));
    }

    #[test]
    fn duplicate_design_points_rejected() {
        let d = EvaluationDesign::line(vec![0, 1, 1]);
        assert!(matches!(
            d.validate(),
            Err(WitnessError::DesignDegenerate(_))
        ));
    }

    #[test]
    fn synth_base_rank_sits_on_parametrization() {
        let code = synth_code(7, 10, 3, 3);
        let w = synth_witness(&code, DesignKind::Line, 2, 5, 3, 11, CAP).unwrap();
        assert!(verify_witness(&code, &w).is_ok());
        assert_eq!(w.rank(code.field()), 2);
        // zero iterations: direct parametrization
        let out = reduce_to_base(&code, &w, 1).unwrap();
        assert!(out.chain.is_empty());
        assert_eq!(out.retained.len(), w.k());
    }

    #[test]
    fn synth_hits_requested_ranks() {
        let code = synth_code(8, 12, 3, 5);
        for (kind, t) in [
            (DesignKind::Line, 3),
            (DesignKind::Line, 4),
            (DesignKind::Space { m: 2 }, 4),
            (DesignKind::Curve { degree: 2 }, 4),
        ] {
            let e = kind.arity().max(3);
            let w = synth_witness(&code, kind, t, 7, e, 21, CAP).unwrap();
            assert!(verify_witness(&code, &w).is_ok());
            assert_eq!(w.rank(code.field()), t, "{kind:?}");
            assert_eq!(w.target.h(), kind.arity());
        }
    }

    #[test]
    fn synth_rejects_rank_beyond_code_dimension() {
        // k = n − rank(H) is tiny here
        let code = synth_code(4, 6, 5, 9);
        let k = code.dimension();
        let err = synth_witness(&code, DesignKind::Line, 2 + k + 1, 4, 3, 1, CAP).unwrap_err();
        assert!(matches!(err, WitnessError::InfeasibleBudget(_)));
    }

    /// Three weight-2 columns with disjoint supports forced onto a
    /// nondegenerate syndrome line; the one eliminable codeword has
    /// support 6, so the step keeps exactly ceil(3·(6−2)/6) = 2 columns.
    fn planted_rank3_line() -> (LinearCode, WitnessMatrix) {
        let f = gf(5);
        let x1: Vector = vec![1, 1, 0, 0, 0, 0, 0, 0, 0, 0];
        let x2: Vector = vec![0, 0, 1, 1, 0, 0, 0, 0, 0, 0];
        let x3: Vector = vec![0, 0, 0, 0, 1, 1, 0, 0, 0, 0];
        let s0: Vector = vec![1, 0, 0, 0];
        let s1: Vector = vec![0, 1, 0, 0];
        // want H x_j = s0 + α_j s1 for α = 0,1,2: solve for H row-wise
        let xmat = Matrix::from_cols(vec![x1.clone(), x2.clone(), x3.clone()]);
        let xt = xmat.transpose(); // 3×10
        let targets = [
            vec![1u32, 1, 1], // ⟨row 0 of H, x_j⟩ over j
            vec![0, 1, 2],
            vec![0, 0, 0],
            vec![0, 0, 0],
        ];
        let rows: Vec<Vector> = targets
            .iter()
            .map(|y| solve_linear(&f, &xt, y).expect("consistent by construction"))
            .collect();
        let h = Matrix::from_rows(rows);
        let code = LinearCode::from_parity_check(Arc::clone(&f), h);
        let target = SyndromeTarget::Line(SyndromeLine::new(&f, s0, s1));
        let design = EvaluationDesign::line(vec![0, 1, 2]);
        let w = WitnessMatrix::new(target, design, xmat, 2).unwrap();
        (code, w)
    }

    /// Space target with dependent coefficient syndromes (s2 = 2·s1, so
    /// h = 2 < arity 3): the engine must reduce to h and recover all
    /// three coefficients exactly, dependencies included.
    #[test]
    fn degenerate_space_target_reduces_to_base() {
        let f = gf(5);
        let n = 10;
        // seven evaluation points; enough survive one reduction to stay
        // above the q^{m−1} = 5 degeneracy threshold
        let betas: Vec<Vector> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![2, 1],
            vec![3, 1],
            vec![4, 0],
        ];
        // target evaluations are s0 + (β1 + 2β2)·s1; six columns sit on
        // the plane spanned by e7, e8 and the last one is fresh
        let factors = [0u32, 1, 2, 3, 4, 0];
        let mut cols: Vec<Vector> = factors
            .iter()
            .map(|&fj| add(&f, &unit(n, 7, 1), &unit(n, 8, fj)))
            .collect();
        cols.push(add(&f, &unit(n, 0, 1), &unit(n, 1, 1)));
        let s0: Vector = vec![1, 0, 0, 0];
        let s1: Vector = vec![0, 1, 0, 0];
        let s2: Vector = vec![0, 2, 0, 0];
        let xmat = Matrix::from_cols(cols);
        let xt = xmat.transpose(); // 7×10
        let ys = [
            vec![1u32, 1, 1, 1, 1, 1, 1],
            vec![0, 1, 2, 3, 4, 0, 4],
            vec![0, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 0],
        ];
        let hrows: Vec<Vector> = ys
            .iter()
            .map(|y| solve_linear(&f, &xt, y).expect("consistent by construction"))
            .collect();
        let code = LinearCode::from_parity_check(Arc::clone(&f), Matrix::from_rows(hrows));
        let space = SyndromeSpace::new(&f, s0.clone(), vec![s1.clone(), s2.clone()]);
        assert_eq!(space.h, 2);
        assert_eq!(space.dir_rank, 1);
        let w = WitnessMatrix::new(
            SyndromeTarget::Space(space),
            EvaluationDesign::space(betas),
            xmat,
            2,
        )
        .unwrap();
        assert!(verify_witness(&code, &w).is_ok());
        assert_eq!(w.rank(code.field()), 3);

        let (reduced, cert) = reduce_rank_once(&code, &w, 1).unwrap();
        assert_eq!(cert.rank_before, 3);
        assert_eq!(cert.rank_after, 2);
        assert!(verify_witness(&code, &reduced).is_ok());

        let out = reduce_to_base(&code, &w, 1).unwrap();
        assert_eq!(out.coefficients.len(), 3);
        assert_eq!(code.syndrome(&out.coefficients[0]).unwrap(), s0);
        assert_eq!(code.syndrome(&out.coefficients[1]).unwrap(), s1);
        assert_eq!(code.syndrome(&out.coefficients[2]).unwrap(), s2);
    }

    fn unit(n: usize, at: usize, value: u32) -> Vector {
        let mut v = vec![0u32; n];
        v[at] = value;
        v
    }

    fn add(f: &Field, a: &Vector, b: &Vector) -> Vector {
        a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
    }

    #[test]
    fn planted_line_reduces_with_frozen_certificate() {
        let (code, w) = planted_rank3_line();
        assert!(verify_witness(&code, &w).is_ok());
        assert_eq!(w.rank(code.field()), 3);

        let (reduced, cert) = reduce_rank_once(&code, &w, 1).unwrap();
        assert_eq!(cert.rank_before, 3);
        assert_eq!(cert.rank_after, 2);
        // span(X) ∩ ker(H) is spanned by x1 + 3·x2 + x3: support 6
        match &cert.eliminated {
            Elimination::Eliminated {
                codeword,
                support_size,
            } => {
                assert_eq!(*support_size, 6);
                assert!(code.contains(codeword));
            }
            other => panic!("expected an eliminated codeword, got {other:?}"),
        }
        // every support coordinate zeroes exactly two columns; smallest
        // index wins
        assert_eq!(cert.pivot_coordinate, Some(0));
        assert_eq!(cert.retained, vec![1, 2]);
        assert_eq!(cert.certified_minimum(3), 2); // ceil(3·4/6)
        assert!(verify_witness(&code, &reduced).is_ok());
    }

    #[test]
    fn reduce_rejects_base_rank_witness() {
        let code = synth_code(7, 10, 3, 4);
        let w = synth_witness(&code, DesignKind::Line, 2, 5, 3, 2, CAP).unwrap();
        assert!(matches!(
            reduce_rank_once(&code, &w, 1),
            Err(WitnessError::RankTooLow { rank: 2, base: 2 })
        ));
    }

    #[test]
    fn hyperplane_design_is_not_full_rank() {
        let f = gf(5);
        // β's all on the hyperplane {β_1 = 0} of F_5^2
        let betas: Vec<Vector> = (0..4).map(|i| vec![0, i as u32]).collect();
        let design = EvaluationDesign::space(betas);
        assert!(design.validate().is_ok());
        assert!(!design.full_rank(&f));
        // a full-rank point set passes
        let good = EvaluationDesign::space(vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert!(good.full_rank(&f));
    }

    #[test]
    fn full_reduction_recovers_exact_parametrization() {
        let mut runs = 0;
        for seed in 0..12u64 {
            let code = synth_code(8, 12, 3, 100 + seed);
            for (kind, t) in [
                (DesignKind::Line, 4),
                (DesignKind::Space { m: 2 }, 4),
                (DesignKind::Curve { degree: 2 }, 4),
            ] {
                let e = kind.arity().max(3);
                let Ok(w) = synth_witness(&code, kind, t, 8, e, seed, CAP) else {
                    continue;
                };
                match reduce_to_base(&code, &w, 1) {
                    Ok(out) => {
                        runs += 1;
                        // identities re-checked inside; spot-check the
                        // coefficient syndromes once more
                        for (a, s) in out
                            .coefficients
                            .iter()
                            .zip(out.witness.target.coefficients())
                        {
                            assert_eq!(&code.syndrome(a).unwrap(), s);
                        }
                        assert_eq!(out.witness.rank(code.field()), w.target.h());
                        // chain certificates compose
                        let mut k = w.k();
                        for cert in &out.chain {
                            assert!(cert.retained.len() >= cert.certified_minimum(k));
                            k = cert.retained.len();
                        }
                    }
                    Err(WitnessError::ThresholdUnderflow { .. }) => {
                        // legitimate when too few columns survive
                    }
                    Err(other) => panic!("unexpected reduction failure: {other}"),
                }
            }
        }
        assert!(runs >= 15, "only {runs} full reductions succeeded");
    }

    #[test]
    fn threshold_check_requires_cached_distance() {
        let code = synth_code(5, 9, 3, 77);
        let w = synth_witness(&code, DesignKind::Line, 2, 3, 2, 5, CAP).unwrap();
        assert!(matches!(
            threshold_check(&code, &w, 2, GapHypothesis::LineNotContained(true)),
            Err(WitnessError::MissingDistance)
        ));
    }

    #[test]
    fn threshold_check_gates_on_radii() {
        let (code, w) = planted_rank3_line();
        code.min_distance(CAP).unwrap();
        // the planted H has zero columns, so d(C) = 1 and E+ ≥ d
        let err = threshold_check(&code, &w, 2, GapHypothesis::LineNotContained(true));
        assert!(matches!(err, Err(WitnessError::RadiusOutOfRange { .. })));
    }

    #[test]
    fn design_rows_are_vandermonde_for_curves() {
        let f = gf(5);
        let d = EvaluationDesign::curve(2, vec![1, 2, 3]);
        let rows = d.rows(&f);
        assert_eq!(rows.row(0), &[1, 1, 1]);
        assert_eq!(rows.row(1), &[1, 2, 3]);
        assert_eq!(rows.row(2), &[1, 4, 4]); // squares mod 5
        assert!(d.full_rank(&f));
    }
}
