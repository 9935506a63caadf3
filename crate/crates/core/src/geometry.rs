//! Affine lines, m-spaces, and polynomial curves in word space and
//! syndrome space, with exact ball-intersection counts and the
//! combinatorial bounds they obey, plus canonical enumeration of
//! syndrome lines and affine subspaces.
//!
//! Count operations return the relevant bound next to the exact count so
//! property tests can assert the implication directly. Lines are
//! canonicalized as unordered point sets (the (s0,s1) parametrization is
//! many-to-one), so enumeration never double-counts.

use crate::codes::{CodesError, LinearCode};
use crate::combin::{within_budget, Tuples};
use crate::field::Field;
use crate::linalg::{weight, Matrix, Vector};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("line direction is zero")]
    DegenerateDirection,
    #[error("need 0 <= E <= E+ <= n, got E={e}, E+={eplus}, n={n}")]
    InvalidRadii { e: usize, eplus: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("budget exceeded: about {estimate} operations (cap {cap})")]
    BudgetExceeded { estimate: BigUint, cap: u64 },
    #[error("code error: {0}")]
    Codes(#[from] CodesError),
}

/// Affine line a + αb in word space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordLine {
    pub a: Vector,
    pub b: Vector,
}

/// Affine syndrome line s0 + αs1, tagged with dim span{s0, s1}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SyndromeLine {
    pub s0: Vector,
    pub s1: Vector,
    /// dim span{s0, s1} ∈ {0, 1, 2}
    pub dim: u8,
}

/// Affine m-space u0 + span(u1..um) in word space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpace {
    pub base: Vector,
    pub dirs: Vec<Vector>,
}

/// Affine syndrome space with its span statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeSpace {
    pub s0: Vector,
    pub dirs: Vec<Vector>,
    /// h = dim span{s0, s1, .., sm}
    pub h: usize,
    /// dim span{s1, .., sm}; the point set has q^dir_rank elements
    pub dir_rank: usize,
}

/// Polynomial curve Γ(α) = u0 + Σ α^j u_j of degree ≤ coeffs.len()−1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCurve {
    /// u0, u1, .., u_ℓ
    pub coeffs: Vec<Vector>,
}

/// Syndrome curve S(α) = s0 + Σ α^j s_j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeCurve {
    pub coeffs: Vec<Vector>,
    /// h = dim span{s0, .., s_ℓ}
    pub h: usize,
}

fn span_dim(f: &Field, vecs: &[&Vector]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    Matrix::from_rows(vecs.iter().map(|v| (*v).clone()).collect()).rank(f)
}

fn affine_eval(f: &Field, base: &[u32], dirs: &[Vector], beta: &[u32]) -> Vector {
    let mut out = base.to_vec();
    for (bi, dir) in beta.iter().zip(dirs) {
        if *bi != 0 {
            for (o, &d) in out.iter_mut().zip(dir) {
                if d != 0 {
                    *o = f.add(*o, f.mul(*bi, d));
                }
            }
        }
    }
    out
}

fn poly_eval(f: &Field, coeffs: &[Vector], alpha: u32) -> Vector {
    let n = coeffs[0].len();
    let mut out = vec![0u32; n];
    let mut pw = 1u32; // alpha^j
    for (j, coeff) in coeffs.iter().enumerate() {
        if j > 0 {
            pw = f.mul(pw, alpha);
        }
        if pw != 0 {
            for (o, &c) in out.iter_mut().zip(coeff) {
                if c != 0 {
                    *o = f.add(*o, f.mul(pw, c));
                }
            }
        }
    }
    out
}

impl WordLine {
    pub fn eval(&self, f: &Field, alpha: u32) -> Vector {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&ai, &bi)| f.add(ai, f.mul(alpha, bi)))
            .collect()
    }
}

impl SyndromeLine {
    pub fn new(f: &Field, s0: Vector, s1: Vector) -> SyndromeLine {
        let dim = span_dim(f, &[&s0, &s1]) as u8;
        SyndromeLine { s0, s1, dim }
    }

    pub fn eval(&self, f: &Field, alpha: u32) -> Vector {
        self.s0
            .iter()
            .zip(&self.s1)
            .map(|(&ai, &bi)| f.add(ai, f.mul(alpha, bi)))
            .collect()
    }

    /// The line as a set of points (1 point when s1 = 0, else q).
    pub fn point_set(&self, f: &Field) -> BTreeSet<Vector> {
        f.elements().map(|a| self.eval(f, a)).collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.dim == 2
    }

    /// γ·s1, for classifying through-origin lines.
    fn direction_multiple(&self, f: &Field, gamma: u32) -> Vector {
        self.s1.iter().map(|&v| f.mul(gamma, v)).collect()
    }
}

impl WordSpace {
    pub fn m(&self) -> usize {
        self.dirs.len()
    }

    pub fn eval(&self, f: &Field, beta: &[u32]) -> Vector {
        affine_eval(f, &self.base, &self.dirs, beta)
    }

    /// Coefficient matrix [u0 | u1 | .. | um].
    pub fn coefficient_matrix(&self) -> Matrix {
        let mut cols = vec![self.base.clone()];
        cols.extend(self.dirs.iter().cloned());
        Matrix::from_cols(cols)
    }
}

impl SyndromeSpace {
    pub fn new(f: &Field, s0: Vector, dirs: Vec<Vector>) -> SyndromeSpace {
        let mut all: Vec<&Vector> = vec![&s0];
        all.extend(dirs.iter());
        let h = span_dim(f, &all);
        let dir_refs: Vec<&Vector> = dirs.iter().collect();
        let dir_rank = span_dim(f, &dir_refs);
        SyndromeSpace {
            s0,
            dirs,
            h,
            dir_rank,
        }
    }

    pub fn m(&self) -> usize {
        self.dirs.len()
    }

    pub fn eval(&self, f: &Field, beta: &[u32]) -> Vector {
        affine_eval(f, &self.s0, &self.dirs, beta)
    }

    /// Distinct points; |S| = q^dir_rank.
    pub fn point_set(&self, f: &Field) -> BTreeSet<Vector> {
        Tuples::new(u64::from(f.q()), self.m())
            .map(|beta| self.eval(f, &beta))
            .collect()
    }

    /// Coefficient vectors s0, s1, .., sm in order.
    pub fn coefficients(&self) -> Vec<&Vector> {
        let mut v = vec![&self.s0];
        v.extend(self.dirs.iter());
        v
    }
}

impl WordCurve {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, f: &Field, alpha: u32) -> Vector {
        poly_eval(f, &self.coeffs, alpha)
    }

    pub fn coefficient_matrix(&self) -> Matrix {
        Matrix::from_cols(self.coeffs.clone())
    }
}

impl SyndromeCurve {
    pub fn new(f: &Field, coeffs: Vec<Vector>) -> SyndromeCurve {
        let refs: Vec<&Vector> = coeffs.iter().collect();
        let h = span_dim(f, &refs);
        SyndromeCurve { coeffs, h }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, f: &Field, alpha: u32) -> Vector {
        poly_eval(f, &self.coeffs, alpha)
    }
}

/// Outcome of classifying a syndrome line against H_E.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineClass {
    /// dim span{s0,s1} ≤ 1; the count class is forced.
    Degenerate {
        case: DegenerateCase,
        /// the forced count: 0 or 1 for singletons, 1 or q through 0
        predicted: u64,
        /// recount over the actual point set; must equal `predicted`
        actual: u64,
    },
    /// dim = 2: exact |L ∩ H_E| (all q points distinct).
    Nondegenerate { count: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateCase {
    /// s1 = 0: the line is the single point {s0}
    Singleton,
    /// s1 ≠ 0, s0 ∈ span{s1}: the line is {γ·s1}, which contains 0
    ThroughOrigin,
}

/// Classifies a syndrome line: degenerate lines get their forced count
/// class (0, 1, or q), nondegenerate lines get the exact count.
pub fn classify_line(f: &Field, line: &SyndromeLine, set: &crate::ball::SyndromeSet) -> LineClass {
    if line.dim == 2 {
        let count = f
            .elements()
            .filter(|&a| set.contains(&line.eval(f, a)))
            .count() as u64;
        return LineClass::Nondegenerate { count };
    }
    let points = line.point_set(f);
    let actual = points.iter().filter(|p| set.contains(p)).count() as u64;
    if weight(&line.s1) == 0 {
        let predicted = u64::from(set.contains(&line.s0));
        LineClass::Degenerate {
            case: DegenerateCase::Singleton,
            predicted,
            actual,
        }
    } else {
        // 0 is always a member, so the count is 1 unless some nonzero
        // multiple of s1 lies in H_E, in which case scaling a preimage
        // covers the whole line.
        let any_nonzero = f
            .units()
            .any(|g| set.contains(&line.direction_multiple(f, g)));
        let predicted = if any_nonzero { u64::from(f.q()) } else { 1 };
        LineClass::Degenerate {
            case: DegenerateCase::ThroughOrigin,
            predicted,
            actual,
        }
    }
}

/// |ℓ ∩ B_E| with the slack bound it must obey.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineBallCount {
    pub count: u64,
    /// ℓ ⊆ B_{E+}
    pub contained_in_big_ball: bool,
    /// floor((E+ + 1)/(E+ − E + 1)); count ≤ bound unless contained
    pub bound: u64,
}

/// Exact |ℓ ∩ B_E| over all q points of a word-space line.
pub fn line_ball_count(
    f: &Field,
    line: &WordLine,
    e: usize,
    eplus: usize,
) -> Result<LineBallCount, GeometryError> {
    let n = line.a.len();
    if weight(&line.b) == 0 {
        return Err(GeometryError::DegenerateDirection);
    }
    if e > eplus || eplus > n {
        return Err(GeometryError::InvalidRadii { e, eplus, n });
    }
    let mut count = 0u64;
    let mut contained = true;
    for alpha in f.elements() {
        let w = weight(&line.eval(f, alpha));
        if w <= e {
            count += 1;
        }
        if w > eplus {
            contained = false;
        }
    }
    let bound = ((eplus + 1) / (eplus - e + 1)) as u64;
    Ok(LineBallCount {
        count,
        contained_in_big_ball: contained,
        bound,
    })
}

/// |U ∩ B_E| statistics for an affine m-space, counted over evaluation
/// tuples α ∈ F_q^m. The bound is the exact rational
/// (E+ + 1)/(E+ − E + 1) · q^{m−1}; flooring the first factor before
/// multiplying by q^{m−1} is strictly smaller and is NOT obeyed
/// (counterexamples exist at q = 3, m = 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceBallCount {
    pub count: u64,
    /// |Supp(U)| = row weight of [u0 | u1 | .. | um]
    pub supp_size: usize,
    /// bound as an exact fraction (num, den); count ≤ num/den whenever
    /// supp_size > E+
    pub bound_num: u64,
    pub bound_den: u64,
}

impl SpaceBallCount {
    pub fn bound_holds(&self) -> bool {
        u128::from(self.count) * u128::from(self.bound_den) <= u128::from(self.bound_num)
    }
}

pub fn space_ball_count(
    f: &Field,
    space: &WordSpace,
    e: usize,
    eplus: usize,
    cap: u64,
) -> Result<SpaceBallCount, GeometryError> {
    let n = space.base.len();
    if e > eplus || eplus > n {
        return Err(GeometryError::InvalidRadii { e, eplus, n });
    }
    let m = space.m();
    let points = crate::combin::power(u64::from(f.q()), m as u64);
    if within_budget(&points, cap).is_none() {
        return Err(GeometryError::BudgetExceeded {
            estimate: points,
            cap,
        });
    }
    let mut count = 0u64;
    for beta in Tuples::new(u64::from(f.q()), m) {
        if weight(&space.eval(f, &beta)) <= e {
            count += 1;
        }
    }
    let supp_size = space.coefficient_matrix().row_weight();
    Ok(SpaceBallCount {
        count,
        supp_size,
        bound_num: (eplus + 1) as u64 * u64::from(f.q()).pow(m.saturating_sub(1) as u32),
        bound_den: (eplus - e + 1) as u64,
    })
}

/// |{α : Γ(α) ∈ B_E}| statistics for a degree-ℓ curve. The bound is the
/// exact rational ℓ·(E+ + 1)/(E+ − E + 1), unfloored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveBallCount {
    pub count: u64,
    /// row weight of the coefficient matrix [u0 | .. | u_ℓ]
    pub rowwt: usize,
    /// bound as an exact fraction (num, den); count ≤ num/den whenever
    /// rowwt > E+
    pub bound_num: u64,
    pub bound_den: u64,
}

impl CurveBallCount {
    pub fn bound_holds(&self) -> bool {
        u128::from(self.count) * u128::from(self.bound_den) <= u128::from(self.bound_num)
    }
}

pub fn curve_ball_count(
    f: &Field,
    curve: &WordCurve,
    e: usize,
    eplus: usize,
) -> Result<CurveBallCount, GeometryError> {
    let n = curve.coeffs[0].len();
    if e > eplus || eplus > n {
        return Err(GeometryError::InvalidRadii { e, eplus, n });
    }
    let count = f
        .elements()
        .filter(|&a| weight(&curve.eval(f, a)) <= e)
        .count() as u64;
    let rowwt = curve.coefficient_matrix().row_weight();
    Ok(CurveBallCount {
        count,
        rowwt,
        bound_num: curve.degree() as u64 * (eplus + 1) as u64,
        bound_den: (eplus - e + 1) as u64,
    })
}

/// s_i = H·u_i for a word-space line.
pub fn push_line(code: &LinearCode, line: &WordLine) -> Result<SyndromeLine, GeometryError> {
    let s0 = code.syndrome(&line.a)?;
    let s1 = code.syndrome(&line.b)?;
    Ok(SyndromeLine::new(code.field(), s0, s1))
}

/// Coefficient-wise push-forward of an affine m-space.
pub fn push_space(code: &LinearCode, space: &WordSpace) -> Result<SyndromeSpace, GeometryError> {
    let s0 = code.syndrome(&space.base)?;
    let dirs = space
        .dirs
        .iter()
        .map(|d| code.syndrome(d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SyndromeSpace::new(code.field(), s0, dirs))
}

/// Coefficient-wise push-forward of a polynomial curve.
pub fn push_curve(code: &LinearCode, curve: &WordCurve) -> Result<SyndromeCurve, GeometryError> {
    let coeffs = curve
        .coeffs
        .iter()
        .map(|c| code.syndrome(c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SyndromeCurve::new(code.field(), coeffs))
}

/// Number of distinct affine lines in F_q^r: q^{r−1}(q^r − 1)/(q − 1).
pub fn line_count(q: u64, r: usize) -> BigUint {
    let points = crate::combin::power(q, r as u64);
    let dirs = (points - 1u32) / (q - 1);
    dirs * crate::combin::power(q, (r - 1) as u64)
}

/// Every affine line of F_q^r exactly once, as canonical
/// representatives: the direction is scaled so its first nonzero entry
/// is 1, and the base point is the unique line point whose entry at
/// that position is 0 (the lexicographically smallest point).
///
/// With a `filter`, only lines through at least two filter points are
/// produced (deduplicated), which is how the harness finds candidate
/// high-count lines without scanning everything.
pub fn enumerate_syndrome_lines(
    f: &Field,
    r: usize,
    filter: Option<&[Vector]>,
    cap: u64,
) -> Result<Vec<SyndromeLine>, GeometryError> {
    let q = u64::from(f.q());
    if let Some(points) = filter {
        let pairs = (points.len() as u64).saturating_mul(points.len() as u64) / 2 + 1;
        if pairs > cap {
            return Err(GeometryError::BudgetExceeded {
                estimate: BigUint::from(pairs),
                cap,
            });
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (i, p1) in points.iter().enumerate() {
            for p2 in points.iter().skip(i + 1) {
                if p1 == p2 {
                    continue;
                }
                let diff: Vector = p2.iter().zip(p1).map(|(&a, &b)| f.sub(a, b)).collect();
                let (s0, s1) = canonical_line(f, p1, &diff);
                if seen.insert((s0.clone(), s1.clone())) {
                    out.push(SyndromeLine::new(f, s0, s1));
                }
            }
        }
        return Ok(out);
    }
    let total = line_count(q, r);
    if within_budget(&(total.clone() * BigUint::from(r as u64)), cap).is_none() {
        return Err(GeometryError::BudgetExceeded {
            estimate: total,
            cap,
        });
    }
    let mut out = Vec::new();
    // canonical directions: first nonzero coordinate at position `lead`
    // equals 1, free entries after it
    for lead in 0..r {
        for tail in Tuples::new(q, r - lead - 1) {
            let mut s1 = vec![0u32; r];
            s1[lead] = 1;
            s1[lead + 1..].copy_from_slice(&tail);
            // base points: entry 0 at `lead`, the rest free
            for rest in Tuples::new(q, r - 1) {
                let mut s0 = vec![0u32; r];
                let mut it = rest.iter();
                for (pos, slot) in s0.iter_mut().enumerate() {
                    if pos != lead {
                        *slot = *it.next().expect("length r-1");
                    }
                }
                out.push(SyndromeLine::new(f, s0, s1.clone()));
            }
        }
    }
    debug_assert_eq!(BigUint::from(out.len() as u64), total);
    Ok(out)
}

/// Canonical (s0, s1) for the line through `p` with direction `dir ≠ 0`.
pub fn canonical_line(f: &Field, p: &[u32], dir: &[u32]) -> (Vector, Vector) {
    let lead = dir
        .iter()
        .position(|&v| v != 0)
        .expect("direction must be nonzero");
    let inv = f.inv(dir[lead]).expect("leading entry is nonzero");
    let s1: Vector = dir.iter().map(|&v| f.mul(inv, v)).collect();
    let shift = p[lead];
    let s0: Vector = p
        .iter()
        .zip(&s1)
        .map(|(&pi, &di)| f.sub(pi, f.mul(shift, di)))
        .collect();
    (s0, s1)
}

/// Every affine m-dimensional subspace of F_q^r exactly once. Direction
/// subspaces are enumerated by their reduced row echelon basis; the base
/// point is the unique coset representative with zeros at the pivots.
pub fn enumerate_affine_spaces(
    f: &Field,
    r: usize,
    m: usize,
    cap: u64,
) -> Result<Vec<SyndromeSpace>, GeometryError> {
    assert!(m >= 1 && m <= r);
    let q = u64::from(f.q());
    let total = affine_space_count(q, r, m);
    if within_budget(&(total.clone() * BigUint::from((m * r) as u64)), cap).is_none() {
        return Err(GeometryError::BudgetExceeded {
            estimate: total,
            cap,
        });
    }
    let mut out = Vec::new();
    for pivots in crate::combin::Combinations::new(r, m) {
        // free positions per row: after the row's pivot, excluding pivots
        let free: Vec<Vec<usize>> = (0..m)
            .map(|i| {
                (pivots[i] + 1..r)
                    .filter(|j| !pivots.contains(j))
                    .collect()
            })
            .collect();
        let free_total: usize = free.iter().map(Vec::len).sum();
        let base_free: Vec<usize> = (0..r).filter(|j| !pivots.contains(j)).collect();
        for fill in Tuples::new(q, free_total) {
            let mut rows = vec![vec![0u32; r]; m];
            let mut k = 0;
            for (i, row) in rows.iter_mut().enumerate() {
                row[pivots[i]] = 1;
                for &j in &free[i] {
                    row[j] = fill[k];
                    k += 1;
                }
            }
            for base_fill in Tuples::new(q, base_free.len()) {
                let mut s0 = vec![0u32; r];
                for (&j, &v) in base_free.iter().zip(&base_fill) {
                    s0[j] = v;
                }
                out.push(SyndromeSpace::new(f, s0, rows.clone()));
            }
        }
    }
    debug_assert_eq!(BigUint::from(out.len() as u64), total);
    Ok(out)
}

/// Number of affine m-subspaces of F_q^r:
/// q^{r−m} · Π_{i=0..m−1} (q^{r−i} − 1)/(q^{m−i} − 1).
pub fn affine_space_count(q: u64, r: usize, m: usize) -> BigUint {
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..m {
        num *= crate::combin::power(q, (r - i) as u64) - 1u32;
        den *= crate::combin::power(q, (m - i) as u64) - 1u32;
    }
    (num / den) * crate::combin::power(q, (r - m) as u64)
}
