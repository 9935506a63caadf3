//! Linear codes in the random parity-check-matrix model.
//!
//! A code is ker(H) for an r×n matrix H over GF(q). Distance queries are
//! exact and budgeted: every operation picks the cheaper of codeword
//! enumeration (q^k words) and increasing-radius ball search
//! (Σ C(n,i)(q−1)^i words), and refuses up front when both exceed the
//! caller's cost cap.

use crate::combin::{self, ball_volume, shell_volume, within_budget};
use crate::field::Field;
use crate::linalg::{weight, Matrix, Vector};
use crate::seeds;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodesError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("budget exceeded: cheapest strategy costs about {estimate} operations (cap {cap})")]
    BudgetExceeded { estimate: BigUint, cap: u64 },
    #[error("outcome table would have {cells} cells (cap {cap})")]
    TableTooLarge { cells: BigUint, cap: u64 },
    #[error("matrix does not have full column rank")]
    NotFullColumnRank,
}

/// Minimum distance, with a distinguished marker for the zero code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distance {
    Finite(usize),
    /// The zero code has no nonzero codeword.
    Infinite,
}

impl Distance {
    pub fn at_least(self, x: usize) -> bool {
        match self {
            Distance::Finite(d) => d >= x,
            Distance::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

/// ker(H) with its kernel basis and (lazily computed) exact minimum
/// distance. Immutable after construction; share with `Arc`.
pub struct LinearCode {
    field: Arc<Field>,
    h: Matrix,
    kernel_basis: Vec<Vector>,
    seed: Option<u64>,
    // (distance, one minimum-weight nonzero codeword when finite)
    dist: OnceLock<(Distance, Option<Vector>)>,
}

impl std::fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearCode")
            .field("q", &self.field.q())
            .field("n", &self.n())
            .field("r", &self.r())
            .field("k", &self.dimension())
            .field("seed", &self.seed)
            .finish()
    }
}

/// JSON shape used by the harness for code serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub q: u64,
    pub n: usize,
    pub r: usize,
    /// Row-major entries of H.
    pub h: Vec<u32>,
    pub seed: Option<u64>,
}

impl LinearCode {
    /// Wraps an explicit parity-check matrix.
    pub fn from_parity_check(field: Arc<Field>, h: Matrix) -> LinearCode {
        let kernel_basis = kernel_basis(&field, &h);
        LinearCode {
            field,
            h,
            kernel_basis,
            seed: None,
            dist: OnceLock::new(),
        }
    }

    /// Samples H with i.i.d. uniform entries from the seeded stream;
    /// identical (seed, n, r, q) reproduce H bit-exactly.
    pub fn sample(field: Arc<Field>, n: usize, r: usize, seed: u64) -> LinearCode {
        assert!(r >= 1 && r <= n, "need 1 <= r <= n");
        let mut rng = seeds::rng(seed, "code.parity", 0);
        let mut h = Matrix::zero(r, n);
        for i in 0..r {
            for j in 0..n {
                h.set(i, j, rng.random_range(0..field.q()));
            }
        }
        let mut code = LinearCode::from_parity_check(field, h);
        code.seed = Some(seed);
        code
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<Field> {
        Arc::clone(&self.field)
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn r(&self) -> usize {
        self.h.rows()
    }

    pub fn q(&self) -> u64 {
        u64::from(self.field.q())
    }

    /// k = n − rank(H).
    pub fn dimension(&self) -> usize {
        self.kernel_basis.len()
    }

    pub fn kernel_basis(&self) -> &[Vector] {
        &self.kernel_basis
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        CodeDescriptor {
            q: self.q(),
            n: self.n(),
            r: self.r(),
            h: (0..self.r()).flat_map(|i| self.h.row(i).to_vec()).collect(),
            seed: self.seed,
        }
    }

    pub fn from_descriptor(field: Arc<Field>, d: &CodeDescriptor) -> LinearCode {
        assert_eq!(u64::from(field.q()), d.q);
        let mut h = Matrix::zero(d.r, d.n);
        for i in 0..d.r {
            for j in 0..d.n {
                h.set(i, j, d.h[i * d.n + j]);
            }
        }
        let mut code = LinearCode::from_parity_check(field, h);
        code.seed = d.seed;
        code
    }

    /// H·y.
    pub fn syndrome(&self, y: &[u32]) -> Result<Vector, CodesError> {
        if y.len() != self.n() {
            return Err(CodesError::DimensionMismatch {
                expected: self.n(),
                got: y.len(),
            });
        }
        Ok(self.h.mul_vec(&self.field, y))
    }

    /// Whether y is a codeword.
    pub fn contains(&self, y: &[u32]) -> bool {
        self.syndrome(y).map(|s| weight(&s) == 0).unwrap_or(false)
    }

    /// Visits every codeword (including 0) in message-tuple order.
    /// Stops early when the visitor returns false.
    pub fn for_each_codeword(&self, mut visit: impl FnMut(&Vector) -> bool) {
        let f = &self.field;
        let k = self.dimension();
        let n = self.n();
        for msg in combin::Tuples::new(self.q(), k) {
            let mut word = vec![0u32; n];
            for (i, &c) in msg.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (w, &b) in word.iter_mut().zip(&self.kernel_basis[i]) {
                    if b != 0 {
                        *w = f.add(*w, f.mul(c, b));
                    }
                }
            }
            if !visit(&word) {
                return;
            }
        }
    }

    /// Exact minimum distance (cached). The zero code reports the
    /// infinite marker.
    pub fn min_distance(&self, cap: u64) -> Result<Distance, CodesError> {
        if let Some((d, _)) = self.dist.get() {
            return Ok(*d);
        }
        let computed = self.compute_min_distance(cap)?;
        let _ = self.dist.set(computed.clone());
        Ok(self.dist.get().expect("just set").0)
    }

    /// Distance already computed by an earlier call, if any.
    pub fn cached_distance(&self) -> Option<Distance> {
        self.dist.get().map(|(d, _)| *d)
    }

    /// A minimum-weight nonzero codeword (when the distance is finite
    /// and has been computed).
    pub fn min_weight_codeword(&self, cap: u64) -> Result<Option<Vector>, CodesError> {
        self.min_distance(cap)?;
        Ok(self.dist.get().and_then(|(_, w)| w.clone()))
    }

    fn compute_min_distance(&self, cap: u64) -> Result<(Distance, Option<Vector>), CodesError> {
        let k = self.dimension() as u64;
        if k == 0 {
            return Ok((Distance::Infinite, None));
        }
        let n = self.n() as u64;
        let q = self.q();
        let codeword_cost = combin::power(q, k);
        // Increasing-radius search is cheaper when low-weight codewords
        // exist early; its cost is unknown up front, so walk shells while
        // the spent budget stays below both the cap and the codeword
        // enumeration cost, then fall back.
        let mut spent = BigUint::ZERO;
        let radius_viable = |spent: &BigUint| {
            within_budget(spent, cap).is_some() && *spent <= codeword_cost
        };
        for w in 1..=n {
            spent += shell_volume(n, q, w);
            if !radius_viable(&spent) {
                break;
            }
            if let Some(found) = self.first_codeword_of_weight(w as usize) {
                return Ok((Distance::Finite(w as usize), Some(found)));
            }
        }
        if within_budget(&codeword_cost, cap).is_some() {
            let (d, wit) = self.min_distance_by_codewords();
            return Ok((d, wit));
        }
        let estimate = codeword_cost.min(spent);
        Err(CodesError::BudgetExceeded { estimate, cap })
    }

    /// First weight-w codeword in canonical (support, value) order.
    fn first_codeword_of_weight(&self, w: usize) -> Option<Vector> {
        let mut out = None;
        for_each_word_of_weight(&self.field, self.n(), w, &mut |x| {
            if self.contains(x) {
                out = Some(x.to_vec());
                false
            } else {
                true
            }
        });
        out
    }

    fn min_distance_by_codewords(&self) -> (Distance, Option<Vector>) {
        let mut best: Option<(usize, Vector)> = None;
        self.for_each_codeword(|c| {
            let w = weight(c);
            if w > 0 {
                let better = match &best {
                    None => true,
                    Some((bw, bc)) => w < *bw || (w == *bw && c < bc),
                };
                if better {
                    best = Some((w, c.clone()));
                }
            }
            true
        });
        match best {
            Some((w, c)) => (Distance::Finite(w), Some(c)),
            None => (Distance::Infinite, None),
        }
    }

    /// Exact d(y, C) with one achieving codeword; ties broken by the
    /// lexicographically smallest codeword.
    pub fn distance_to_code(&self, y: &[u32], cap: u64) -> Result<(usize, Vector), CodesError> {
        if y.len() != self.n() {
            return Err(CodesError::DimensionMismatch {
                expected: self.n(),
                got: y.len(),
            });
        }
        let f = &self.field;
        let n = self.n() as u64;
        let q = self.q();
        let k = self.dimension() as u64;
        let codeword_cost = combin::power(q, k);
        let target = self.syndrome(y)?;

        let mut spent = BigUint::ZERO;
        for e in 0..=self.n() {
            spent += shell_volume(n, q, e as u64);
            if within_budget(&spent, cap).is_none() || spent > codeword_cost {
                break;
            }
            // All weight-e displacements x with Hx = Hy; candidate
            // codeword is y − x. Keep the lexicographically smallest.
            let mut best: Option<Vector> = None;
            for_each_word_of_weight(f, self.n(), e, &mut |x| {
                if self.h.mul_vec(f, x) == target {
                    let c: Vector = y
                        .iter()
                        .zip(x)
                        .map(|(&yi, &xi)| f.sub(yi, xi))
                        .collect();
                    if best.as_ref().is_none_or(|b| c < *b) {
                        best = Some(c);
                    }
                }
                true
            });
            if let Some(c) = best {
                return Ok((e, c));
            }
        }
        if within_budget(&codeword_cost, cap).is_some() {
            let mut best: Option<(usize, Vector)> = None;
            self.for_each_codeword(|c| {
                let d = y
                    .iter()
                    .zip(c)
                    .filter(|(a, b)| *a != *b)
                    .count();
                let better = match &best {
                    None => true,
                    Some((bd, bc)) => d < *bd || (d == *bd && c < bc),
                };
                if better {
                    best = Some((d, c.clone()));
                }
                true
            });
            let (d, c) = best.expect("code contains at least the zero word");
            return Ok((d, c));
        }
        Err(CodesError::BudgetExceeded {
            estimate: codeword_cost.min(spent),
            cap,
        })
    }

    /// Exact |{c ∈ C : d(y,c) ≤ E}|.
    pub fn count_codewords_in_ball(
        &self,
        y: &[u32],
        e: usize,
        cap: u64,
    ) -> Result<u64, CodesError> {
        if y.len() != self.n() {
            return Err(CodesError::DimensionMismatch {
                expected: self.n(),
                got: y.len(),
            });
        }
        let f = &self.field;
        let n = self.n() as u64;
        let q = self.q();
        let k = self.dimension() as u64;
        let codeword_cost = combin::power(q, k);
        if e >= self.n() {
            // the whole code
            return codeword_cost
                .to_u64()
                .ok_or(CodesError::BudgetExceeded {
                    estimate: codeword_cost.clone(),
                    cap,
                });
        }
        let ball_cost = ball_volume(n, q, e as u64);
        let use_codewords = codeword_cost <= ball_cost;
        let cheapest = codeword_cost.clone().min(ball_cost.clone());
        if within_budget(&cheapest, cap).is_none() {
            return Err(CodesError::BudgetExceeded {
                estimate: cheapest,
                cap,
            });
        }
        let mut count = 0u64;
        if use_codewords {
            self.for_each_codeword(|c| {
                let d = y.iter().zip(c).filter(|(a, b)| *a != *b).count();
                if d <= e {
                    count += 1;
                }
                true
            });
        } else {
            // displacements x of weight ≤ E with Hx = Hy biject onto
            // codewords within distance E of y
            let target = self.syndrome(y)?;
            for w in 0..=e {
                for_each_word_of_weight(f, self.n(), w, &mut |x| {
                    if self.h.mul_vec(f, x) == target {
                        count += 1;
                    }
                    true
                });
            }
        }
        Ok(count)
    }
}

/// Kernel basis of H (RREF back-substitution, free columns ascending).
pub(crate) fn kernel_basis(f: &Field, h: &Matrix) -> Vec<Vector> {
    let n = h.cols();
    // full row reduction
    let mut rows: Vec<(usize, Vector)> = Vec::new();
    for i in 0..h.rows() {
        let mut v = h.row(i).to_vec();
        for (p, row) in &rows {
            let c = v[*p];
            if c != 0 {
                for (vj, rj) in v.iter_mut().zip(row) {
                    if *rj != 0 {
                        *vj = f.sub(*vj, f.mul(c, *rj));
                    }
                }
            }
        }
        if let Some(p) = v.iter().position(|&x| x != 0) {
            let inv = f.inv(v[p]).expect("pivot is nonzero");
            for x in v.iter_mut() {
                *x = f.mul(*x, inv);
            }
            // clear column p in the existing rows
            for (_, row) in rows.iter_mut() {
                let c = row[p];
                if c != 0 {
                    for (rj, vj) in row.iter_mut().zip(&v) {
                        if *vj != 0 {
                            *rj = f.sub(*rj, f.mul(c, *vj));
                        }
                    }
                }
            }
            let at = rows.partition_point(|(q, _)| *q < p);
            rows.insert(at, (p, v));
        }
    }
    let pivots: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
    let mut basis = Vec::new();
    for fc in 0..n {
        if pivots.contains(&fc) {
            continue;
        }
        let mut v = vec![0u32; n];
        v[fc] = 1;
        for (p, row) in &rows {
            v[*p] = f.neg(row[fc]);
        }
        basis.push(v);
    }
    basis
}

/// Visits every word of exact weight w in canonical order: supports in
/// lexicographic order, then value assignments (canonical codes 1..q)
/// in lexicographic order. The visitor returns false to stop.
pub fn for_each_word_of_weight(
    f: &Field,
    n: usize,
    w: usize,
    visit: &mut impl FnMut(&[u32]) -> bool,
) {
    if w == 0 {
        visit(&vec![0u32; n]);
        return;
    }
    if w > n {
        return;
    }
    let mut word = vec![0u32; n];
    for supp in combin::Combinations::new(n, w) {
        for values in combin::Tuples::new(u64::from(f.q()) - 1, w) {
            for (i, &pos) in supp.iter().enumerate() {
                word[pos] = values[i] + 1;
            }
            let keep_going = visit(&word);
            for &pos in &supp {
                word[pos] = 0;
            }
            if !keep_going {
                return;
            }
        }
    }
}

/// Frequency table of HX over uniformly sampled H, for checking that
/// full-column-rank X pushes uniform H to a uniform image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformImageReport {
    pub q: u64,
    pub r: usize,
    pub t: usize,
    pub samples: u64,
    /// counts[packed(Y)] over all Y in F_q^{r×t}
    pub counts: Vec<u64>,
    /// expected count per cell = samples · q^{−rt}
    pub expected: f64,
    /// max |count − expected| over cells, in units of the binomial σ
    pub max_deviation_sigmas: f64,
}

/// Tabulates HX for `samples` uniformly random H. The table has q^{rt}
/// cells and is capped.
pub fn uniform_image_test(
    field: &Field,
    x: &Matrix,
    r: usize,
    samples: u64,
    seed: u64,
    table_cap: u64,
) -> Result<UniformImageReport, CodesError> {
    let t = x.cols();
    let n = x.rows();
    if x.rank(field) != t {
        return Err(CodesError::NotFullColumnRank);
    }
    let q = u64::from(field.q());
    let cells = combin::power(q, (r * t) as u64);
    let Some(cells) = within_budget(&cells, table_cap) else {
        return Err(CodesError::TableTooLarge {
            cells: combin::power(q, (r * t) as u64),
            cap: table_cap,
        });
    };
    let mut counts = vec![0u64; cells as usize];
    let mut rng = seeds::rng(seed, "uniform-image", 0);
    let mut h = Matrix::zero(r, n);
    for _ in 0..samples {
        for i in 0..r {
            for j in 0..n {
                h.set(i, j, rng.random_range(0..field.q()));
            }
        }
        let y = h.mul(field, x);
        let mut idx = 0u64;
        for i in 0..r {
            for j in 0..t {
                idx = idx * q + u64::from(y.get(i, j));
            }
        }
        counts[idx as usize] += 1;
    }
    let p = 1.0 / cells as f64;
    let expected = samples as f64 * p;
    let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
    let max_dev = counts
        .iter()
        .map(|&c| (c as f64 - expected).abs())
        .fold(0.0f64, f64::max);
    let max_deviation_sigmas = if sigma > 0.0 { max_dev / sigma } else { 0.0 };
    Ok(UniformImageReport {
        q,
        r,
        t,
        samples,
        counts,
        expected,
        max_deviation_sigmas,
    })
}
