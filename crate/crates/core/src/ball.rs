//! Exact membership in the syndrome ball H_E = {Hx : wt(x) ≤ E}.
//!
//! Membership queries return a re-verifiable witness: a preimage x with
//! Hx = s and wt(x) ≤ E. Witnesses are deterministic — the first hit in
//! the canonical word order (weight ascending, then support, then value
//! assignment, all lexicographic) — so fixtures are stable across runs
//! and across the two search strategies.

use crate::codes::{for_each_word_of_weight, CodesError, LinearCode};
use crate::combin::{ball_volume as ball_volume_big, binomial, within_budget};
use crate::linalg::{solve_linear, weight, Vector};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::combin::ball_volume;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BallError {
    #[error("budget exceeded: strategy costs about {estimate} operations (cap {cap})")]
    BudgetExceeded { estimate: BigUint, cap: u64 },
    #[error("radius {e} out of range 0..={n}")]
    RadiusOutOfRange { e: usize, n: usize },
    #[error("cache key mismatch: expected {expected:?}, found {found:?}")]
    CacheKeyMismatch { expected: CacheKey, found: CacheKey },
    #[error("code error: {0}")]
    Codes(#[from] CodesError),
    #[error("io error: {0}")]
    Io(String),
}

/// Identifies the code and radius a cached syndrome set was built for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub seed: Option<u64>,
    pub n: usize,
    pub r: usize,
    pub q: u64,
    pub e: usize,
}

/// Search strategy for membership queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Walk all words of weight ≤ E in canonical order.
    FullEnumeration,
    /// Per support T with |T| ≤ E, solve the restricted system H_T z = s.
    ExhaustiveSupport,
    /// Pick whichever estimated cost is lower.
    #[default]
    Auto,
}

/// A membership query against one code at one radius.
pub struct BallQuery<'c> {
    code: &'c LinearCode,
    e: usize,
    strategy: Strategy,
}

/// H_E as an explicit set: every member syndrome with one stored
/// preimage of weight ≤ E (the first found in canonical order).
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeSet {
    pub key: CacheKey,
    /// sorted by syndrome for binary search
    members: Vec<(Vector, Vector)>,
}

impl<'c> BallQuery<'c> {
    pub fn new(code: &'c LinearCode, e: usize, strategy: Strategy) -> Result<Self, BallError> {
        if e > code.n() {
            return Err(BallError::RadiusOutOfRange { e, n: code.n() });
        }
        Ok(BallQuery { code, e, strategy })
    }

    fn enumeration_cost(&self) -> BigUint {
        ball_volume_big(self.code.n() as u64, self.code.q(), self.e as u64)
    }

    fn support_cost(&self) -> BigUint {
        // one restricted solve per support, roughly r·(|T|+1) element ops
        let n = self.code.n() as u64;
        let r = self.code.r() as u64;
        let mut total = BigUint::ZERO;
        for i in 0..=self.e as u64 {
            total += binomial(n, i) * BigUint::from(r * (i + 1));
        }
        total
    }

    fn pick_strategy(&self, cap: u64) -> Result<Strategy, BallError> {
        let full = self.enumeration_cost();
        let supp = self.support_cost();
        let (strategy, cost) = match self.strategy {
            Strategy::FullEnumeration => (Strategy::FullEnumeration, full),
            Strategy::ExhaustiveSupport => (Strategy::ExhaustiveSupport, supp),
            Strategy::Auto => {
                if supp < full {
                    (Strategy::ExhaustiveSupport, supp)
                } else {
                    (Strategy::FullEnumeration, full)
                }
            }
        };
        if within_budget(&cost, cap).is_none() {
            return Err(BallError::BudgetExceeded {
                estimate: cost,
                cap,
            });
        }
        Ok(strategy)
    }

    /// A preimage x with Hx = s and wt(x) ≤ E, or None when s ∉ H_E.
    pub fn member(&self, s: &[u32], cap: u64) -> Result<Option<Vector>, BallError> {
        if s.len() != self.code.r() {
            return Err(BallError::Codes(CodesError::DimensionMismatch {
                expected: self.code.r(),
                got: s.len(),
            }));
        }
        match self.pick_strategy(cap)? {
            Strategy::ExhaustiveSupport => self.member_by_support(s, cap),
            _ => Ok(self.member_by_walk(s)),
        }
    }

    fn member_by_walk(&self, s: &[u32]) -> Option<Vector> {
        let f = self.code.field();
        let h = self.code.parity_check();
        let mut found = None;
        for w in 0..=self.e {
            for_each_word_of_weight(f, self.code.n(), w, &mut |x| {
                if h.mul_vec(f, x) == s {
                    found = Some(x.to_vec());
                    false
                } else {
                    true
                }
            });
            if found.is_some() {
                break;
            }
        }
        found
    }

    fn member_by_support(&self, s: &[u32], cap: u64) -> Result<Option<Vector>, BallError> {
        let f = self.code.field();
        let h = self.code.parity_check();
        let n = self.code.n();
        let mut spent: u128 = 0;
        for size in 0..=self.e {
            for supp in crate::combin::Combinations::new(n, size) {
                spent += (self.code.r() * (size + 1)) as u128;
                if spent > u128::from(cap) {
                    return Err(BallError::BudgetExceeded {
                        estimate: BigUint::from(spent),
                        cap,
                    });
                }
                let restricted = h.select_cols(&supp);
                let Some(particular) = solve_linear(f, &restricted, s) else {
                    continue;
                };
                // Solutions form particular + ker(H_T); an all-nonzero
                // solution has true support exactly T. Smaller supports
                // were already tried, so the first one found here is the
                // canonical witness; take the lexicographically least.
                let kernel = restricted_kernel(f, &restricted);
                let dim = kernel.len() as u32;
                match u64::from(f.q()).checked_pow(dim) {
                    Some(c) => {
                        spent += u128::from(c) * size.max(1) as u128;
                        if spent > u128::from(cap) {
                            return Err(BallError::BudgetExceeded {
                                estimate: BigUint::from(spent),
                                cap,
                            });
                        }
                    }
                    None => {
                        return Err(BallError::BudgetExceeded {
                            estimate: crate::combin::power(self.code.q(), u64::from(dim)),
                            cap,
                        })
                    }
                }
                let mut best: Option<Vec<u32>> = None;
                for coeffs in crate::combin::Tuples::new(u64::from(f.q()), kernel.len()) {
                    let mut z = particular.clone();
                    for (c, b) in coeffs.iter().zip(&kernel) {
                        if *c != 0 {
                            for (zi, bi) in z.iter_mut().zip(b) {
                                if *bi != 0 {
                                    *zi = f.add(*zi, f.mul(*c, *bi));
                                }
                            }
                        }
                    }
                    if z.iter().all(|&v| v != 0) && best.as_ref().is_none_or(|b| z < *b) {
                        best = Some(z);
                    }
                }
                if let Some(z) = best {
                    let mut x = vec![0u32; n];
                    for (i, &pos) in supp.iter().enumerate() {
                        x[pos] = z[i];
                    }
                    return Ok(Some(x));
                }
            }
        }
        Ok(None)
    }

    /// The full set H_E with one minimal preimage per member.
    pub fn enumerate(&self, cap: u64) -> Result<SyndromeSet, BallError> {
        let cost = self.enumeration_cost();
        if within_budget(&cost, cap).is_none() {
            return Err(BallError::BudgetExceeded {
                estimate: cost,
                cap,
            });
        }
        let f = self.code.field();
        let h = self.code.parity_check();
        let mut members = std::collections::BTreeMap::new();
        for w in 0..=self.e {
            for_each_word_of_weight(f, self.code.n(), w, &mut |x| {
                let s = h.mul_vec(f, x);
                members.entry(s).or_insert_with(|| x.to_vec());
                true
            });
        }
        Ok(SyndromeSet {
            key: CacheKey {
                seed: self.code.seed(),
                n: self.code.n(),
                r: self.code.r(),
                q: self.code.q(),
                e: self.e,
            },
            members: members.into_iter().collect(),
        })
    }
}

fn restricted_kernel(f: &crate::field::Field, a: &crate::linalg::Matrix) -> Vec<Vector> {
    crate::codes::kernel_basis(f, a)
}

impl SyndromeSet {
    pub fn radius(&self) -> usize {
        self.key.e
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        self.preimage(s).is_some()
    }

    /// Stored preimage for a member syndrome.
    pub fn preimage(&self, s: &[u32]) -> Option<&Vector> {
        self.members
            .binary_search_by(|(k, _)| k.as_slice().cmp(s))
            .ok()
            .map(|i| &self.members[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vector, &Vector)> {
        self.members.iter().map(|(s, x)| (s, x))
    }

    pub fn syndromes(&self) -> impl Iterator<Item = &Vector> {
        self.members.iter().map(|(s, _)| s)
    }

    /// Every stored preimage must re-verify against the code.
    pub fn verify(&self, code: &LinearCode) -> bool {
        self.members.iter().all(|(s, x)| {
            weight(x) <= self.key.e && code.syndrome(x).map(|t| t == *s).unwrap_or(false)
        })
    }

    pub fn save_json(&self, w: impl std::io::Write) -> Result<(), BallError> {
        serde_json::to_writer(w, self).map_err(|e| BallError::Io(e.to_string()))
    }

    pub fn load_json(r: impl std::io::Read, expected: &CacheKey) -> Result<SyndromeSet, BallError> {
        let set: SyndromeSet =
            serde_json::from_reader(r).map_err(|e| BallError::Io(e.to_string()))?;
        if set.key != *expected {
            return Err(BallError::CacheKeyMismatch {
                expected: expected.clone(),
                found: set.key,
            });
        }
        Ok(set)
    }
}

/// Coset-leader weights: for every reachable syndrome, the minimum
/// weight of a preimage (with one witness), walked up to `max_weight`.
/// `complete` is set when every syndrome in the column space of H was
/// reached, so larger radii add nothing.
#[derive(Debug, Clone)]
pub struct SyndromeTable {
    pub max_weight_walked: usize,
    pub complete: bool,
    entries: Vec<(Vector, (usize, Vector))>,
}

impl SyndromeTable {
    pub fn leader_weight(&self, s: &[u32]) -> Option<usize> {
        self.entries
            .binary_search_by(|(k, _)| k.as_slice().cmp(s))
            .ok()
            .map(|i| self.entries[i].1 .0)
    }

    pub fn leader(&self, s: &[u32]) -> Option<&Vector> {
        self.entries
            .binary_search_by(|(k, _)| k.as_slice().cmp(s))
            .ok()
            .map(|i| &self.entries[i].1 .1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True membership test for radius e within the walked range.
    pub fn member_at(&self, s: &[u32], e: usize) -> bool {
        assert!(
            self.complete || e <= self.max_weight_walked,
            "table walked only to weight {}",
            self.max_weight_walked
        );
        self.leader_weight(s).is_some_and(|w| w <= e)
    }

    /// H_e as a SyndromeSet, for e within the walked range.
    pub fn set_at(&self, code: &LinearCode, e: usize) -> SyndromeSet {
        assert!(self.complete || e <= self.max_weight_walked);
        SyndromeSet {
            key: CacheKey {
                seed: code.seed(),
                n: code.n(),
                r: code.r(),
                q: code.q(),
                e,
            },
            members: self
                .entries
                .iter()
                .filter(|(_, (w, _))| *w <= e)
                .map(|(s, (_, x))| (s.clone(), x.clone()))
                .collect(),
        }
    }
}

/// Builds the coset-leader table by walking words of weight 0, 1, ... up
/// to `max_weight`, stopping early once the whole column space of H has
/// been reached.
pub fn syndrome_weight_table(
    code: &LinearCode,
    max_weight: usize,
    cap: u64,
) -> Result<SyndromeTable, BallError> {
    let f = code.field();
    let h = code.parity_check();
    let col_space_size = crate::combin::power(code.q(), (code.n() - code.dimension()) as u64);
    let mut table = std::collections::BTreeMap::new();
    let mut spent = BigUint::ZERO;
    let mut complete = false;
    let mut walked = 0usize;
    for w in 0..=max_weight.min(code.n()) {
        spent += crate::combin::shell_volume(code.n() as u64, code.q(), w as u64);
        if within_budget(&spent, cap).is_none() {
            return Err(BallError::BudgetExceeded {
                estimate: spent,
                cap,
            });
        }
        for_each_word_of_weight(f, code.n(), w, &mut |x| {
            let s = h.mul_vec(f, x);
            table.entry(s).or_insert_with(|| (w, x.to_vec()));
            true
        });
        walked = w;
        if BigUint::from(table.len() as u64) == col_space_size {
            complete = true;
            break;
        }
    }
    Ok(SyndromeTable {
        max_weight_walked: walked,
        complete,
        entries: table.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::linalg::Matrix;
    use rand::Rng;
    use std::sync::Arc;

    const CAP: u64 = 10_000_000;

    fn gf(q: u64) -> Arc<Field> {
        Arc::new(Field::new(q).unwrap())
    }

    #[test]
    fn zero_syndrome_has_zero_witness() {
        let code = LinearCode::sample(gf(5), 6, 3, 1);
        for e in 0..=6 {
            let q = BallQuery::new(&code, e, Strategy::Auto).unwrap();
            let w = q.member(&[0; 3], CAP).unwrap().unwrap();
            assert_eq!(w, vec![0; 6]);
        }
    }

    #[test]
    fn identity_parity_check_gives_plain_hamming_ball() {
        let f = gf(3);
        let code = LinearCode::from_parity_check(Arc::clone(&f), Matrix::identity(4));
        let q = BallQuery::new(&code, 1, Strategy::Auto).unwrap();
        // e2 has weight 1
        let e2 = vec![0, 1, 0, 0];
        assert_eq!(q.member(&e2, CAP).unwrap(), Some(e2.clone()));
        // weight-2 syndrome is outside H_1
        assert_eq!(q.member(&[0, 1, 2, 0], CAP).unwrap(), None);
        // |H_E| = vol(B_E) when H is the identity
        for e in 0..=4usize {
            let set = BallQuery::new(&code, e, Strategy::Auto)
                .unwrap()
                .enumerate(CAP)
                .unwrap();
            let vol = ball_volume(4, 3, e as u64);
            assert_eq!(BigUint::from(set.len() as u64), vol);
        }
    }

    #[test]
    fn repeated_column_collapses_the_ball() {
        // H = [1,1] over GF(2): H_1 = {0, 1}, smaller than vol(B_1) = 3
        let f = gf(2);
        let code = LinearCode::from_parity_check(f, Matrix::from_rows(vec![vec![1, 1]]));
        let set = BallQuery::new(&code, 1, Strategy::Auto)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.contains(&[0]));
        assert!(set.contains(&[1]));
        // first-found preimage of syndrome (1) is (1,0)
        assert_eq!(set.preimage(&[1]), Some(&vec![1, 0]));
    }

    #[test]
    fn enumerate_radius_zero() {
        let code = LinearCode::sample(gf(4), 5, 2, 9);
        let set = BallQuery::new(&code, 0, Strategy::Auto)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.contains(&[0, 0]));
    }

    #[test]
    fn sets_are_nested_and_verify() {
        for q in [2u64, 3, 4] {
            let code = LinearCode::sample(gf(q), 7, 3, q);
            let mut prev: Option<SyndromeSet> = None;
            for e in 0..=4usize {
                let set = BallQuery::new(&code, e, Strategy::Auto)
                    .unwrap()
                    .enumerate(CAP)
                    .unwrap();
                assert!(set.verify(&code));
                if let Some(p) = &prev {
                    for (s, _) in p.iter() {
                        assert!(set.contains(s), "H_{} ⊄ H_{}", e - 1, e);
                    }
                    assert!(set.len() >= p.len());
                }
                prev = Some(set);
            }
        }
    }

    #[test]
    fn member_monotone_in_radius() {
        let code = LinearCode::sample(gf(3), 8, 4, 17);
        let set = BallQuery::new(&code, 3, Strategy::Auto)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        for (s, _) in set.iter() {
            let first = (0..=8usize)
                .find(|&e| {
                    BallQuery::new(&code, e, Strategy::Auto)
                        .unwrap()
                        .member(s, CAP)
                        .unwrap()
                        .is_some()
                })
                .expect("member of H_3");
            for e in first..=8 {
                let q = BallQuery::new(&code, e, Strategy::Auto).unwrap();
                assert!(q.member(s, CAP).unwrap().is_some());
            }
        }
    }

    #[test]
    fn strategies_agree_on_witnesses() {
        for q in [2u64, 5, 8] {
            let code = LinearCode::sample(gf(q), 7, 3, 100 + q);
            let walk = BallQuery::new(&code, 2, Strategy::FullEnumeration).unwrap();
            let supp = BallQuery::new(&code, 2, Strategy::ExhaustiveSupport).unwrap();
            // every syndrome in F_q^r at small r
            for s in crate::combin::Tuples::new(q, 3) {
                let a = walk.member(&s, CAP).unwrap();
                let b = supp.member(&s, CAP).unwrap();
                assert_eq!(a, b, "q={q} s={s:?}");
            }
        }
    }

    #[test]
    fn membership_matches_distance_threshold() {
        // d(y, C) ≤ E ⟺ Hy ∈ H_E
        let mut rng = crate::seeds::rng(0xba11, "ball-vs-dist", 0);
        for trial in 0..200u64 {
            let q = [2u64, 3, 4, 5][(trial % 4) as usize];
            let code = LinearCode::sample(gf(q), 7, 3, trial);
            let y: Vector = (0..7)
                .map(|_| rng.random_range(0..code.field().q()))
                .collect();
            let (d, _) = code.distance_to_code(&y, CAP).unwrap();
            let s = code.syndrome(&y).unwrap();
            for e in 0..=7usize {
                let query = BallQuery::new(&code, e, Strategy::Auto).unwrap();
                let member = query.member(&s, CAP).unwrap().is_some();
                assert_eq!(member, d <= e, "d={d} e={e}");
            }
        }
    }

    #[test]
    fn ball_volume_matches_direct_enumeration() {
        for q in [2u64, 3, 4] {
            let f = gf(q);
            for n in 1..=8usize {
                for e in 0..=n {
                    let mut count = 0u64;
                    for w in 0..=e {
                        for_each_word_of_weight(&f, n, w, &mut |_| {
                            count += 1;
                            true
                        });
                    }
                    assert_eq!(BigUint::from(count), ball_volume(n as u64, q, e as u64));
                }
            }
        }
    }

    #[test]
    fn whole_space_volume() {
        assert_eq!(ball_volume(5, 3, 5), BigUint::from(243u32));
        assert_eq!(ball_volume(3, 7, 0), BigUint::from(1u32));
    }

    #[test]
    fn budget_rejection() {
        let code = LinearCode::sample(gf(16), 16, 4, 0);
        let q = BallQuery::new(&code, 8, Strategy::FullEnumeration).unwrap();
        assert!(matches!(
            q.enumerate(1000),
            Err(BallError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn cache_roundtrip_and_key_check() {
        let code = LinearCode::sample(gf(4), 6, 2, 55);
        let set = BallQuery::new(&code, 2, Strategy::Auto)
            .unwrap()
            .enumerate(CAP)
            .unwrap();
        let mut buf = Vec::new();
        set.save_json(&mut buf).unwrap();
        let back = SyndromeSet::load_json(&buf[..], &set.key).unwrap();
        assert_eq!(back, set);
        let wrong = CacheKey {
            e: 3,
            ..set.key.clone()
        };
        assert!(matches!(
            SyndromeSet::load_json(&buf[..], &wrong),
            Err(BallError::CacheKeyMismatch { .. })
        ));
    }

    #[test]
    fn weight_table_agrees_with_sets() {
        let code = LinearCode::sample(gf(3), 8, 3, 4);
        let table = syndrome_weight_table(&code, 8, CAP).unwrap();
        assert!(table.complete);
        for e in 0..=3usize {
            let direct = BallQuery::new(&code, e, Strategy::Auto)
                .unwrap()
                .enumerate(CAP)
                .unwrap();
            let derived = table.set_at(&code, e);
            assert_eq!(direct, derived);
        }
    }
}
