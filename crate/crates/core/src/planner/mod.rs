//! Explicit parameter planning: exact evaluation of the alphabet and
//! threshold recipes, the q-ary entropy and ball-volume bounds behind
//! them, the union-bound expressions for bad-object probabilities, and
//! sign audits of the governing exponents across admissible grids.
//!
//! Amounts that are rational in the inputs (iteration counts, E, E⁺,
//! and the one-radius thresholds) are computed with exact integer
//! arithmetic; everything touching a logarithm runs at a configurable
//! decimal precision (≥ 50 digits) and every ceil/floor carries its
//! distance to the nearest integer boundary, so precision doubling can
//! be checked to leave results unchanged.

mod prec;

pub use prec::Precision;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("admissibility violated: {inequality}")]
    AdmissibilityViolation { inequality: String },
    #[error("hypothesis violated: {requirement}")]
    HypothesisViolation { requirement: String },
}

/// Exact nonnegative rational as (numerator, denominator).
pub type Rat = (u64, u64);

fn check_rat(name: &str, r: Rat) -> Result<(), PlannerError> {
    if r.1 == 0 {
        return Err(PlannerError::DomainError(format!(
            "{name} has a zero denominator"
        )));
    }
    Ok(())
}

/// The default working precision in decimal digits.
pub const DEFAULT_DIGITS: usize = 50;

/// Results within this distance of an integer boundary are flagged as
/// precision-sensitive.
pub const BOUNDARY_FLAG: f64 = 1e-20;

/// One ceil/floor record: what was rounded, the result, and how far the
/// pre-rounding value sat from the nearest integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rounding {
    pub name: String,
    pub result: BigUint,
    pub margin: f64,
    pub flagged: bool,
    /// computed on the exact rational path (margin itself exact)
    pub exact: bool,
}

fn rounding(name: &str, result: BigUint, margin: f64, exact: bool) -> Rounding {
    Rounding {
        name: name.to_string(),
        result,
        flagged: !exact && margin < BOUNDARY_FLAG,
        margin,
        exact,
    }
}

/// q-ary entropy H_q(x) = x·log_q(q−1) − x·log_q x − (1−x)·log_q(1−x),
/// evaluated at the working precision. Domain 0 < x ≤ 1 − 1/q (the
/// value at the right endpoint is exactly 1).
pub fn entropy_q(rho: Rat, q: u64, p: &Precision) -> Result<astro_float::BigFloat, PlannerError> {
    check_rat("rho", rho)?;
    if q < 2 {
        return Err(PlannerError::DomainError("q must be at least 2".into()));
    }
    // 0 < ρ ≤ 1 − 1/q ⟺ 0 < ρ·q ≤ q − 1
    if rho.0 == 0 || (rho.0 as u128) * (q as u128) > (rho.1 as u128) * ((q - 1) as u128) {
        return Err(PlannerError::DomainError(format!(
            "rho = {}/{} outside (0, 1 − 1/q] for q = {q}",
            rho.0, rho.1
        )));
    }
    let x = p.ratio(rho.0, rho.1);
    let one = p.int(1);
    let lnq = p.ln(&p.int(q));
    let logq = |v: &astro_float::BigFloat| p.div(&p.ln(v), &lnq);
    let t1 = p.mul(&x, &logq(&p.int(q - 1)));
    let t2 = p.mul(&x, &logq(&x));
    let omx = p.sub(&one, &x);
    let t3 = if rho.0 == rho.1 {
        p.int(0)
    } else {
        p.mul(&omx, &logq(&omx))
    };
    Ok(p.sub(&p.sub(&t1, &t2), &t3))
}

/// Binary entropy H₂.
pub fn entropy_2(rho: Rat, p: &Precision) -> Result<astro_float::BigFloat, PlannerError> {
    entropy_q(rho, 2, p)
}

/// The line slack bound B = floor((E⁺+1)/(E⁺−E+1)) and the retained
/// fraction γ = (d−E)/d, both exact. Requires 0 < E ≤ E⁺ < d.
pub fn slack_parameters(e: u64, eplus: u64, d: u64) -> Result<(u64, Rat), PlannerError> {
    if e == 0 || e > eplus || eplus >= d {
        return Err(PlannerError::DomainError(format!(
            "need 0 < E <= E+ < d, got E={e}, E+={eplus}, d={d}"
        )));
    }
    let b = (eplus + 1) / (eplus - e + 1);
    Ok((b, (d - e, d)))
}

/// Exact ball volume next to its first-order entropy exponent. The
/// exponent H_q(E/n)·n is reported for comparison, never asserted as a
/// bound on its own: the lower-order terms are real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub n: u64,
    pub q: u64,
    pub e: u64,
    pub exact: BigUint,
    pub log_q_exact: f64,
    /// H_q(E/n)·n; None outside the entropy domain (E = 0 or E/n > 1 − 1/q)
    pub entropy_exponent: Option<f64>,
}

/// |B_E| exactly, with log_q and the entropy estimate side by side.
pub fn ball_volume_report(n: u64, q: u64, e: u64, digits: usize) -> Result<VolumeReport, PlannerError> {
    if q < 2 || e > n || n == 0 {
        return Err(PlannerError::DomainError(format!(
            "need q >= 2 and 0 <= E <= n, got q={q}, E={e}, n={n}"
        )));
    }
    let p = Precision::with_digits(digits.max(DEFAULT_DIGITS));
    let exact = crate::combin::ball_volume(n, q, e);
    let log_q_exact = p.to_f64(&p.div(&p.ln(&p.big(&exact)), &p.ln(&p.int(q))));
    let entropy_exponent = entropy_q((e, n), q, &p)
        .ok()
        .map(|h| p.to_f64(&p.mul(&h, &p.int(n))));
    Ok(VolumeReport {
        n,
        q,
        e,
        exact,
        log_q_exact,
        entropy_exponent,
    })
}

/// Which recipe to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanKind {
    /// line gap with slack E⁺ = E + ceil(εn)
    LineGapTwoRadius,
    /// line gap at E⁺ = E (alphabet grows with n)
    LineGapOneRadius,
    /// m-space correlated agreement with slack
    SpaceCaTwoRadius { m: u64 },
    /// dimension-1 correlated agreement at E⁺ = E
    SpaceCaOneRadius,
    /// degree-ℓ curve correlated agreement with slack
    CurveCaTwoRadius { degree: u64 },
    /// degree-ℓ curve correlated agreement at E⁺ = E
    CurveCaOneRadius { degree: u64 },
}

impl PlanKind {
    fn two_radius(&self) -> bool {
        matches!(
            self,
            PlanKind::LineGapTwoRadius
                | PlanKind::SpaceCaTwoRadius { .. }
                | PlanKind::CurveCaTwoRadius { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub kind: PlanKind,
    pub rate: Rat,
    pub eps: Rat,
    pub rho: Rat,
    pub n: u64,
    pub digits: usize,
}

/// A decimal value carried at full precision plus an f64 approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecValue {
    pub dec: String,
    pub approx: f64,
}

/// Sign audit of the exponent controlling the failure probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditValue {
    pub expression: String,
    pub value: f64,
    /// "< 0" or "<= 0"
    pub required: String,
    pub ok: bool,
}

/// Whether the derived threshold counts members (K) or is the rounded
/// density numerator (τ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdKind {
    CountK,
    CeilTau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub kind: PlanKind,
    pub rate: Rat,
    pub eps: Rat,
    pub rho: Rat,
    pub n: u64,
    pub digits: usize,
    pub a_eps: PrecValue,
    pub b_eps: PrecValue,
    pub delta: PrecValue,
    /// ℓ (line recipes) or λ (space/curve recipes)
    pub iterations: u64,
    pub threshold: BigUint,
    pub threshold_kind: ThresholdKind,
    pub e: u64,
    pub eplus: u64,
    pub d_n: u64,
    /// smallest admissible alphabet size from the recipe itself
    pub q_min: BigUint,
    /// the coarser sufficient bound ceil((2/ε)^{2/ε})
    pub q_min_simplified: BigUint,
    pub exponent_audit: AuditValue,
    pub roundings: Vec<Rounding>,
}

fn exact_floor_u128(num: u128, den: u128) -> (u128, f64) {
    let q = num / den;
    let rem = num % den;
    let margin = rem.min(den - rem) as f64 / den as f64;
    (q, margin)
}

fn exact_ceil_u128(num: u128, den: u128) -> (u128, f64) {
    let (fl, margin) = exact_floor_u128(num, den);
    let q = if num.is_multiple_of(den) { fl } else { fl + 1 };
    (q, margin)
}

fn exact_floor_big(num: &BigUint, den: &BigUint) -> (BigUint, f64) {
    let q = num / den;
    let rem = num % den;
    let other = den - &rem;
    let closer = rem.clone().min(other);
    let margin = closer.to_f64().unwrap_or(f64::MAX) / den.to_f64().unwrap_or(f64::MAX);
    (q, margin)
}

/// Evaluates one parameter recipe. Admissibility violations are
/// rejected with the失 inequality named.
pub fn plan(req: &PlanRequest) -> Result<Plan, PlannerError> {
    check_rat("rate", req.rate)?;
    check_rat("eps", req.eps)?;
    check_rat("rho", req.rho)?;
    let (rn, rd) = req.rate;
    let (en, ed) = req.eps;
    let (pn, pd) = req.rho;
    if rn == 0 || rn >= rd {
        return Err(PlannerError::AdmissibilityViolation {
            inequality: "0 < R < 1".into(),
        });
    }
    // 0 < ε < (1−R)/2 ⟺ 2·εn·rd < εd·(rd−rn)
    if en == 0 || 2 * (en as u128) * (rd as u128) >= (ed as u128) * ((rd - rn) as u128) {
        return Err(PlannerError::AdmissibilityViolation {
            inequality: "0 < eps < (1 − R)/2".into(),
        });
    }
    if pn == 0 {
        return Err(PlannerError::AdmissibilityViolation {
            inequality: "rho > 0".into(),
        });
    }
    if req.n == 0 {
        return Err(PlannerError::DomainError("n must be positive".into()));
    }
    let digits = req.digits.max(DEFAULT_DIGITS);
    let p = Precision::with_digits(digits);

    // a_ε = ε/log2(1/ε), b_ε = ε/(1 + log2(1/ε))
    let eps_f = p.ratio(en, ed);
    let inv_eps = p.div(&p.int(1), &eps_f);
    let log2_inv = p.log2(&inv_eps);
    let a_eps = p.div(&eps_f, &log2_inv);
    let b_eps = p.div(&eps_f, &p.add(&p.int(1), &log2_inv));
    let one_minus_r = p.ratio(rd - rn, rd);
    let rho_f = p.ratio(pn, pd);

    // admissible radius
    if req.kind.two_radius() {
        // ρ < 1 − R − ε − a_ε  (a_ε is irrational: compare at precision)
        let bound = p.sub(&p.sub(&one_minus_r, &eps_f), &a_eps);
        if p.sub(&bound, &rho_f).is_negative() || rho_f == bound {
            return Err(PlannerError::AdmissibilityViolation {
                inequality: "rho < 1 − R − eps − eps/log2(1/eps)".into(),
            });
        }
    } else {
        // ρ < 1 − R − ε, exactly: ρ·rd·ed + ε·rd·pd < (rd−rn)·pd·ed
        let lhs = (pn as u128) * (rd as u128) * (ed as u128)
            + (en as u128) * (rd as u128) * (pd as u128);
        let rhs = ((rd - rn) as u128) * (pd as u128) * (ed as u128);
        if lhs >= rhs {
            return Err(PlannerError::AdmissibilityViolation {
                inequality: "rho < 1 − R − eps".into(),
            });
        }
    }

    let mut roundings = Vec::new();

    // iteration count: ceil(c·(1−R)/ε) − shift, exact
    let (c, shift, expr_c) = match req.kind {
        PlanKind::LineGapTwoRadius | PlanKind::LineGapOneRadius | PlanKind::SpaceCaOneRadius => {
            (2u128, 1u128, 2u64)
        }
        PlanKind::SpaceCaTwoRadius { m } => ((m + 1) as u128, (m + 2) as u128, m + 1),
        PlanKind::CurveCaTwoRadius { degree } => ((degree + 1) as u128, (degree + 2) as u128, degree + 1),
        PlanKind::CurveCaOneRadius { degree } => ((degree + 1) as u128, (degree + 1) as u128, degree + 1),
    };
    let _ = expr_c;
    let iter_num = c * ((rd - rn) as u128) * (ed as u128);
    let iter_den = (rd as u128) * (en as u128);
    let (iter_ceil, iter_margin) = exact_ceil_u128(iter_num, iter_den);
    let iterations = (iter_ceil - shift) as u64;
    roundings.push(rounding(
        "iterations",
        BigUint::from(iter_ceil),
        iter_margin,
        true,
    ));

    // E = floor(ρn), E⁺ = E + ceil(εn)
    let (e128, e_margin) = exact_floor_u128((pn as u128) * (req.n as u128), pd as u128);
    let e = e128 as u64;
    roundings.push(rounding("E", BigUint::from(e), e_margin, true));
    let (eps_n, eps_n_margin) = exact_ceil_u128((en as u128) * (req.n as u128), ed as u128);
    let eplus = if req.kind.two_radius() {
        roundings.push(rounding(
            "E+ increment",
            BigUint::from(eps_n),
            eps_n_margin,
            true,
        ));
        e + eps_n as u64
    } else {
        e
    };

    // δ and d_n
    let (delta, d_n) = if req.kind.two_radius() {
        let delta = p.sub(&one_minus_r, &a_eps);
        let (dn, dn_margin) = p.floor_uint(&p.mul(&delta, &p.int(req.n)));
        roundings.push(rounding("d_n", dn.clone(), dn_margin, false));
        (delta, dn.to_u64().expect("d_n <= n"))
    } else {
        // δ = 1 − R − ε, exact rational
        let num = ((rd - rn) as u128) * (ed as u128) - (en as u128) * (rd as u128);
        let den = (rd as u128) * (ed as u128);
        let (dn, dn_margin) = exact_floor_u128(num * (req.n as u128), den);
        roundings.push(rounding("d_n", BigUint::from(dn), dn_margin, true));
        (p.ratio(num as u64, den as u64), dn as u64)
    };

    // threshold K or τ
    let (threshold, threshold_kind) = if req.kind.two_radius() {
        // τ/K = ceil(scale·(1+ρ/ε)·(δ/(δ−ρ))^iters)
        let scale = match req.kind {
            PlanKind::CurveCaTwoRadius { degree } => degree,
            _ => 1,
        };
        let one_plus = p.add(&p.int(1), &p.div(&rho_f, &eps_f));
        let ratio = p.div(&delta, &p.sub(&delta, &rho_f));
        let value = p.mul(
            &p.int(scale.max(1)),
            &p.mul(&one_plus, &p.powi(&ratio, iterations)),
        );
        let (k, margin) = p.ceil_uint(&value);
        let name = if matches!(req.kind, PlanKind::LineGapTwoRadius) {
            "K"
        } else {
            "tau"
        };
        roundings.push(rounding(name, k.clone(), margin, false));
        let tk = if matches!(req.kind, PlanKind::LineGapTwoRadius) {
            ThresholdKind::CountK
        } else {
            ThresholdKind::CeilTau
        };
        (k, tk)
    } else {
        // K = floor(scale·(E+1)·(d_n/(d_n−E))^iters), exact
        if d_n <= e {
            return Err(PlannerError::AdmissibilityViolation {
                inequality: "d_n > E (n too small for this rate/eps/rho)".into(),
            });
        }
        let scale = match req.kind {
            PlanKind::CurveCaOneRadius { degree } => degree,
            _ => 1,
        };
        let num = BigUint::from(scale.max(1))
            * BigUint::from(e + 1)
            * BigUint::from(d_n).pow(iterations as u32);
        let den = BigUint::from(d_n - e).pow(iterations as u32);
        let (k, margin) = exact_floor_big(&num, &den);
        roundings.push(rounding("K", k.clone(), margin, true));
        (k, ThresholdKind::CountK)
    };

    // q_min: max((2/ε)^{1/ε}, threshold + offset)
    let offset = match req.kind {
        PlanKind::LineGapTwoRadius => 1u32,
        PlanKind::LineGapOneRadius | PlanKind::SpaceCaOneRadius => 2,
        PlanKind::SpaceCaTwoRadius { .. } | PlanKind::CurveCaTwoRadius { .. } => 1,
        PlanKind::CurveCaOneRadius { .. } => 2,
    };
    let two_over_eps = p.div(&p.int(2), &eps_f);
    let pow1 = p.pow(&two_over_eps, &inv_eps);
    let (qmin_pow, qmin_margin) = p.ceil_uint(&pow1);
    roundings.push(rounding("q_min power term", qmin_pow.clone(), qmin_margin, false));
    let q_min = qmin_pow.max(threshold.clone() + BigUint::from(offset));
    let pow2 = p.pow(&two_over_eps, &p.mul(&p.int(2), &inv_eps));
    let (q_min_simplified, qs_margin) = p.ceil_uint(&pow2);
    roundings.push(rounding(
        "q_min simplified",
        q_min_simplified.clone(),
        qs_margin,
        false,
    ));

    // exponent audit
    let exponent_audit = audit_for(&p, req.kind, req.rate, req.eps, req.rho, iterations, &b_eps);

    let pv = |x: &astro_float::BigFloat| PrecValue {
        dec: p.to_string(x),
        approx: p.to_f64(x),
    };
    Ok(Plan {
        kind: req.kind,
        rate: req.rate,
        eps: req.eps,
        rho: req.rho,
        n: req.n,
        digits,
        a_eps: pv(&a_eps),
        b_eps: pv(&b_eps),
        delta: pv(&delta),
        iterations,
        threshold,
        threshold_kind,
        e,
        eplus,
        d_n,
        q_min,
        q_min_simplified,
        exponent_audit,
        roundings,
    })
}

/// The union-bound exponent the recipe's proof drives negative.
fn audit_for(
    p: &Precision,
    kind: PlanKind,
    rate: Rat,
    eps: Rat,
    rho: Rat,
    iterations: u64,
    b_eps: &astro_float::BigFloat,
) -> AuditValue {
    let (rn, rd) = rate;
    let one_minus_r = p.ratio(rd - rn, rd);
    let rho_f = p.ratio(rho.0, rho.1);
    let eps_f = p.ratio(eps.0, eps.1);
    match kind {
        PlanKind::LineGapTwoRadius => {
            // 2(1−R) + (ℓ+3)(ρ + b_ε − (1−R)) < 0
            let inner = p.sub(&p.add(&rho_f, b_eps), &one_minus_r);
            let v = p.add(
                &p.mul(&p.int(2), &one_minus_r),
                &p.mul(&p.int(iterations + 3), &inner),
            );
            AuditValue {
                expression: "2(1−R) + (iters+3)(rho + b_eps − (1−R))".into(),
                value: p.to_f64(&v),
                required: "< 0".into(),
                ok: v.is_negative(),
            }
        }
        PlanKind::SpaceCaTwoRadius { m } => {
            let inner = p.sub(&p.add(&rho_f, b_eps), &one_minus_r);
            let v = p.add(
                &p.mul(&p.int(m + 1), &one_minus_r),
                &p.mul(&p.int(m + iterations + 2), &inner),
            );
            AuditValue {
                expression: "(m+1)(1−R) + (m+iters+2)(rho + b_eps − (1−R))".into(),
                value: p.to_f64(&v),
                required: "< 0".into(),
                ok: v.is_negative(),
            }
        }
        PlanKind::CurveCaTwoRadius { degree } => {
            let inner = p.sub(&p.add(&rho_f, b_eps), &one_minus_r);
            let v = p.add(
                &p.mul(&p.int(degree + 1), &one_minus_r),
                &p.mul(&p.int(degree + iterations + 2), &inner),
            );
            AuditValue {
                expression: "(deg+1)(1−R) + (deg+iters+2)(rho + b_eps − (1−R))".into(),
                value: p.to_f64(&v),
                required: "< 0".into(),
                ok: v.is_negative(),
            }
        }
        PlanKind::LineGapOneRadius | PlanKind::SpaceCaOneRadius => {
            // 2(1−R) − (ℓ+3)ε < 0, exact in the inputs
            let v = p.sub(
                &p.mul(&p.int(2), &one_minus_r),
                &p.mul(&p.int(iterations + 3), &eps_f),
            );
            AuditValue {
                expression: "2(1−R) − (iters+3)·eps".into(),
                value: p.to_f64(&v),
                required: "< 0".into(),
                ok: v.is_negative(),
            }
        }
        PlanKind::CurveCaOneRadius { degree } => {
            // (deg+1)(1−R) − (deg+iters+2)ε ≤ 0
            let v = p.sub(
                &p.mul(&p.int(degree + 1), &one_minus_r),
                &p.mul(&p.int(degree + iterations + 2), &eps_f),
            );
            let ok = v.is_negative() || v.is_zero();
            AuditValue {
                expression: "(deg+1)(1−R) − (deg+iters+2)·eps".into(),
                value: p.to_f64(&v),
                required: "<= 0".into(),
                ok,
            }
        }
    }
}

/// Object family for the union-bound expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnionBoundKind {
    Line,
    Space { m: u64 },
    Curve { degree: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionBoundRequest {
    pub kind: UnionBoundKind,
    pub n: u64,
    pub q: u64,
    pub r: u64,
    pub e: u64,
    pub eplus: u64,
    pub k: u64,
    pub s: u64,
    pub d: u64,
    pub digits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundReport {
    pub log_q: f64,
    pub log_q_dec: String,
    pub negative: bool,
    /// whether the stricter E⁺ < d (required by `threshold_check`, not
    /// by the moment bound itself) also holds
    pub eplus_below_distance: bool,
}

/// log_q of the bad-object probability bound, with exact big-integer
/// counting inside the logarithms.
pub fn union_bound(req: &UnionBoundRequest) -> Result<UnionBoundReport, PlannerError> {
    let &UnionBoundRequest {
        kind,
        n,
        q,
        r,
        e,
        eplus,
        k,
        s,
        d,
        digits,
    } = req;
    if e == 0 || e > eplus || e >= d {
        return Err(PlannerError::HypothesisViolation {
            requirement: "0 < E <= E+ and E < d".into(),
        });
    }
    if k < 2 {
        return Err(PlannerError::HypothesisViolation {
            requirement: "K >= 2".into(),
        });
    }
    let b = (eplus + 1) / (eplus - e + 1);
    // K > B·γ^{−s} (scaled per kind), exactly:
    // K·(d−E)^s > scale·B·d^s
    let gs = BigUint::from(d - e).pow(s as u32);
    let ds = BigUint::from(d).pow(s as u32);
    let scale = match kind {
        UnionBoundKind::Line => BigUint::from(1u32),
        UnionBoundKind::Space { m } => crate::combin::power(q, m - 1),
        UnionBoundKind::Curve { degree } => BigUint::from(degree),
    };
    if BigUint::from(k) * gs <= scale * BigUint::from(b) * ds {
        return Err(PlannerError::HypothesisViolation {
            requirement: "K > B·gamma^{-s} (scaled for the object family)".into(),
        });
    }

    let p = Precision::with_digits(digits.max(DEFAULT_DIGITS));
    let lnq = p.ln(&p.int(q));
    let logq_big = |v: &BigUint| -> Option<astro_float::BigFloat> {
        if v == &BigUint::ZERO {
            None
        } else {
            Some(p.div(&p.ln(&p.big(v)), &lnq))
        }
    };
    let ball = crate::combin::ball_volume(n, q, e);
    let value = match kind {
        UnionBoundKind::Line => {
            // 2r + log_q C(q,K) + log_q C(K,s+3) + (s+3)(log_q|B_E| − r)
            let c1 = crate::combin::binomial(q, k);
            let c2 = crate::combin::binomial(k, s + 3);
            match (logq_big(&c1), logq_big(&c2), logq_big(&ball)) {
                (Some(l1), Some(l2), Some(lb)) => {
                    let t4 = p.mul(&p.int(s + 3), &p.sub(&lb, &p.int(r)));
                    Some(p.add(&p.add(&p.add(&p.int(2 * r), &l1), &l2), &t4))
                }
                _ => None,
            }
        }
        UnionBoundKind::Space { m } => {
            // log_q C(q^m,K) − r(s+1)
            //   + log_q(C(K,m+s+1)|B|^{m+s+1} + C(K,m+s+2)|B|^{m+s+2})
            let c0 = num_integer::binomial(crate::combin::power(q, m), BigUint::from(k));
            let t1 = crate::combin::binomial(k, m + s + 1) * ball.pow((m + s + 1) as u32);
            let t2 = crate::combin::binomial(k, m + s + 2) * ball.pow((m + s + 2) as u32);
            let sum = t1 + t2;
            match (logq_big(&c0), logq_big(&sum)) {
                (Some(l0), Some(ls)) => {
                    Some(p.add(&p.sub(&l0, &p.int(r * (s + 1))), &ls))
                }
                _ => None,
            }
        }
        UnionBoundKind::Curve { degree } => {
            // log_q C(q,K) − r(s+1)
            //   + log_q Σ_{h=1}^{deg+1} q^{h(deg+1)} C(K,h+s+1)|B|^{h+s+1}
            let c0 = crate::combin::binomial(q, k);
            let mut sum = BigUint::ZERO;
            for h in 1..=degree + 1 {
                sum += crate::combin::power(q, h * (degree + 1))
                    * crate::combin::binomial(k, h + s + 1)
                    * ball.pow((h + s + 1) as u32);
            }
            match (logq_big(&c0), logq_big(&sum)) {
                (Some(l0), Some(ls)) => {
                    Some(p.add(&p.sub(&l0, &p.int(r * (s + 1))), &ls))
                }
                _ => None,
            }
        }
    };
    Ok(match value {
        Some(v) => UnionBoundReport {
            log_q: p.to_f64(&v),
            log_q_dec: p.to_string(&v),
            negative: v.is_negative(),
            eplus_below_distance: eplus < d,
        },
        // a zero factor: the event is impossible
        None => UnionBoundReport {
            log_q: f64::NEG_INFINITY,
            log_q_dec: "-inf".into(),
            negative: true,
            eplus_below_distance: eplus < d,
        },
    })
}

/// One grid entry of an audit run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub name: String,
    pub params: String,
    pub value: f64,
    pub required: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
    pub pass: bool,
}

/// Exponent sign audit across the admissible grid
/// R ∈ {1/4, 1/2, 3/4}, ε ∈ {1/20, 1/10}, ρ swept in steps of 1/40,
/// m and degree in {1, 2, 3}.
pub fn audit_exponents(digits: usize) -> AuditReport {
    let mut entries = Vec::new();
    let rates: [Rat; 3] = [(1, 4), (1, 2), (3, 4)];
    let epss: [Rat; 2] = [(1, 20), (1, 10)];
    let kinds: Vec<(String, PlanKind)> = {
        let mut v = vec![
            ("line gap two-radius".to_string(), PlanKind::LineGapTwoRadius),
            ("line gap one-radius".to_string(), PlanKind::LineGapOneRadius),
            ("space ca one-radius".to_string(), PlanKind::SpaceCaOneRadius),
        ];
        for m in 1..=3 {
            v.push((format!("space ca two-radius m={m}"), PlanKind::SpaceCaTwoRadius { m }));
        }
        for degree in 1..=3 {
            v.push((
                format!("curve ca two-radius deg={degree}"),
                PlanKind::CurveCaTwoRadius { degree },
            ));
            v.push((
                format!("curve ca one-radius deg={degree}"),
                PlanKind::CurveCaOneRadius { degree },
            ));
        }
        v
    };
    for rate in rates {
        for eps in epss {
            for j in 1..40u64 {
                let rho: Rat = (j, 40);
                for (name, kind) in &kinds {
                    let req = PlanRequest {
                        kind: *kind,
                        rate,
                        eps,
                        rho,
                        n: 10_000,
                        digits,
                    };
                    match plan(&req) {
                        Ok(p) => entries.push(AuditEntry {
                            name: name.clone(),
                            params: format!(
                                "R={}/{} eps={}/{} rho={}/{}",
                                rate.0, rate.1, eps.0, eps.1, rho.0, rho.1
                            ),
                            value: p.exponent_audit.value,
                            required: p.exponent_audit.required.clone(),
                            ok: p.exponent_audit.ok,
                        }),
                        Err(PlannerError::AdmissibilityViolation { .. }) => {} // off-grid
                        Err(e) => entries.push(AuditEntry {
                            name: name.clone(),
                            params: format!("{e}"),
                            value: f64::NAN,
                            required: "evaluable".into(),
                            ok: false,
                        }),
                    }
                }
            }
        }
    }
    let pass = entries.iter().all(|e| e.ok);
    AuditReport { entries, pass }
}

/// Entropy identities and bounds: H_q(1 − 1/q) = 1 to 1e−12, and the
/// comparison H_q(ρ) ≤ ρ + H₂(ρ)/log₂(q) on a 10×10 grid.
pub fn audit_entropy(digits: usize) -> AuditReport {
    let p = Precision::with_digits(digits.max(DEFAULT_DIGITS));
    let mut entries = Vec::new();
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 16, 64] {
        let h = entropy_q((q - 1, q), q, &p).expect("endpoint in domain");
        let dev = (p.to_f64(&h) - 1.0).abs();
        entries.push(AuditEntry {
            name: "entropy maximum".into(),
            params: format!("q={q}"),
            value: dev,
            required: "|H_q(1-1/q) - 1| < 1e-12".into(),
            ok: dev < 1e-12,
        });
    }
    let qs = [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16];
    for q in qs {
        for i in 1..=10u64 {
            let rho: Rat = (i, 20);
            // stay inside (0, 1 − 1/q]
            if (rho.0 as u128) * (q as u128) > (rho.1 as u128) * ((q - 1) as u128) {
                continue;
            }
            let hq = entropy_q(rho, q, &p).expect("domain checked");
            let h2 = entropy_2(rho, &p).expect("domain ok for q=2");
            let bound = p.add(
                &p.ratio(rho.0, rho.1),
                &p.div(&h2, &p.log2(&p.int(q))),
            );
            let ok = !p.sub(&bound, &hq).is_negative();
            entries.push(AuditEntry {
                name: "entropy upper bound".into(),
                params: format!("q={q} rho={}/{}", rho.0, rho.1),
                value: p.to_f64(&p.sub(&bound, &hq)),
                required: ">= 0".into(),
                ok,
            });
        }
    }
    let pass = entries.iter().all(|e| e.ok);
    AuditReport { entries, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_endpoint_is_one() {
        let p = Precision::with_digits(50);
        for q in [2u64, 3, 5, 9, 16] {
            let h = entropy_q((q - 1, q), q, &p).unwrap();
            assert!((p.to_f64(&h) - 1.0).abs() < 1e-12, "q={q}");
        }
        // H_2(1/2) = 1
        let h = entropy_q((1, 2), 2, &p).unwrap();
        assert!((p.to_f64(&h) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_domain_is_enforced() {
        let p = Precision::with_digits(50);
        assert!(entropy_q((0, 1), 3, &p).is_err());
        assert!(entropy_q((3, 4), 3, &p).is_err()); // 3/4 > 2/3
        assert!(entropy_q((1, 2), 1, &p).is_err());
    }

    #[test]
    fn entropy_matches_f64_reference() {
        let p = Precision::with_digits(50);
        for (rho, q) in [((1u64, 4u64), 3u64), ((1, 10), 8), ((2, 5), 5)] {
            let h = p.to_f64(&entropy_q(rho, q, &p).unwrap());
            let x = rho.0 as f64 / rho.1 as f64;
            let lq = (q as f64).ln();
            let reference = x * ((q - 1) as f64).ln() / lq - x * x.ln() / lq
                - (1.0 - x) * (1.0 - x).ln() / lq;
            assert!((h - reference).abs() < 1e-12, "rho={rho:?} q={q}");
        }
    }

    #[test]
    fn slack_parameters_examples() {
        // E+ = E: B = E + 1
        for e in 1..6u64 {
            let (b, _) = slack_parameters(e, e, 100).unwrap();
            assert_eq!(b, e + 1);
        }
        // floor(5/3) = 1
        let (b, _) = slack_parameters(2, 4, 100).unwrap();
        assert_eq!(b, 1);
        // γ = (10−4)/10
        let (_, gamma) = slack_parameters(4, 5, 10).unwrap();
        assert_eq!(gamma, (6, 10));
        assert!(slack_parameters(0, 2, 10).is_err());
        assert!(slack_parameters(3, 2, 10).is_err());
        assert!(slack_parameters(2, 10, 10).is_err());
    }

    #[test]
    fn worked_two_radius_line_plan() {
        // R = 1/2, ε = 1/10: a_ε ≈ 0.030103, δ ≈ 0.469897, 9 iterations
        let req = PlanRequest {
            kind: PlanKind::LineGapTwoRadius,
            rate: (1, 2),
            eps: (1, 10),
            rho: (3, 10),
            n: 1000,
            digits: 50,
        };
        let plan = plan(&req).unwrap();
        assert!((plan.a_eps.approx - 0.030103).abs() < 1e-6);
        assert!((plan.delta.approx - 0.469897).abs() < 1e-6);
        assert_eq!(plan.iterations, 9);
        assert_eq!(plan.e, 300);
        assert_eq!(plan.eplus, 400);
        assert!(plan.exponent_audit.ok);
        // δ/(δ−ρ) ≈ 2.7659; K = ceil(4·2.7659^9) ≈ ceil(37956.28....)
        let k = plan.threshold.to_u64().unwrap();
        assert!((37_000..39_000).contains(&k), "K = {k}");
        assert!(plan.q_min >= plan.threshold + BigUint::from(1u32));
    }

    #[test]
    fn one_radius_k_is_exact() {
        let req = PlanRequest {
            kind: PlanKind::LineGapOneRadius,
            rate: (1, 2),
            eps: (1, 10),
            rho: (1, 5),
            n: 100,
            digits: 50,
        };
        let plan = plan(&req).unwrap();
        // δ = 0.4, d_n = 40, E = 20, ℓ = 9: K = floor(21·2^9) = 10752
        assert_eq!(plan.d_n, 40);
        assert_eq!(plan.e, 20);
        assert_eq!(plan.iterations, 9);
        assert_eq!(plan.threshold, BigUint::from(10_752u32));
        let k_round = plan.roundings.iter().find(|r| r.name == "K").unwrap();
        assert!(k_round.exact);
        assert_eq!(k_round.margin, 0.0); // exactly an integer here
        // q_min = max((20)^10, K+2) = 20^10
        assert_eq!(plan.q_min, BigUint::from(10_240_000_000_000u64));
    }

    #[test]
    fn space_iterations_track_line_iterations() {
        // λ for m = 1 is the line iteration count minus 2
        for (rate, eps) in [((1u64, 2u64), (1u64, 10u64)), ((1, 4), (1, 20)), ((3, 4), (1, 25))] {
            let line = plan(&PlanRequest {
                kind: PlanKind::LineGapTwoRadius,
                rate,
                eps,
                rho: (1, 100),
                n: 1000,
                digits: 50,
            })
            .unwrap();
            let space = plan(&PlanRequest {
                kind: PlanKind::SpaceCaTwoRadius { m: 1 },
                rate,
                eps,
                rho: (1, 100),
                n: 1000,
                digits: 50,
            })
            .unwrap();
            assert_eq!(space.iterations, line.iterations - 2);
        }
    }

    #[test]
    fn admissibility_boundaries_reject() {
        // ρ = 1 − R − ε exactly: strict inequality fails
        let req = PlanRequest {
            kind: PlanKind::LineGapOneRadius,
            rate: (1, 2),
            eps: (1, 10),
            rho: (2, 5), // 0.4 = 1 − 0.5 − 0.1
            n: 100,
            digits: 50,
        };
        match plan(&req) {
            Err(PlannerError::AdmissibilityViolation { inequality }) => {
                assert!(inequality.contains("1 − R − eps"));
            }
            other => panic!("expected admissibility violation, got {other:?}"),
        }
        // ε too large
        let req = PlanRequest {
            kind: PlanKind::LineGapTwoRadius,
            rate: (1, 2),
            eps: (1, 4),
            rho: (1, 10),
            n: 100,
            digits: 50,
        };
        assert!(matches!(
            plan(&req),
            Err(PlannerError::AdmissibilityViolation { .. })
        ));
    }

    #[test]
    fn plans_are_stable_under_precision_doubling() {
        for kind in [
            PlanKind::LineGapTwoRadius,
            PlanKind::LineGapOneRadius,
            PlanKind::SpaceCaTwoRadius { m: 2 },
            PlanKind::CurveCaTwoRadius { degree: 2 },
            PlanKind::CurveCaOneRadius { degree: 2 },
        ] {
            let mk = |digits| PlanRequest {
                kind,
                rate: (1, 2),
                eps: (1, 10),
                rho: (1, 5),
                n: 1000,
                digits,
            };
            let a = plan(&mk(50)).unwrap();
            let b = plan(&mk(100)).unwrap();
            assert_eq!(a.iterations, b.iterations);
            assert_eq!(a.threshold, b.threshold);
            assert_eq!(a.d_n, b.d_n);
            assert_eq!(a.q_min, b.q_min);
            for (ra, rb) in a.roundings.iter().zip(&b.roundings) {
                assert_eq!(ra.result, rb.result, "{} moved under doubling", ra.name);
                // flags may only fire on exact boundary hits (for
                // example (2/ε)^{1/ε} with 1/ε an integer), never on
                // values that merely sit close to one
                if ra.flagged {
                    assert_eq!(ra.margin, 0.0, "{}: {:?}", ra.name, ra);
                }
            }
        }
    }

    #[test]
    fn one_radius_k_grows_linearly() {
        // K/n stabilizes within 1% across the top decade
        let ratio_at = |n: u64| {
            let p = plan(&PlanRequest {
                kind: PlanKind::LineGapOneRadius,
                rate: (1, 2),
                eps: (1, 10),
                rho: (1, 5),
                n,
                digits: 50,
            })
            .unwrap();
            p.threshold.to_f64().unwrap() / n as f64
        };
        let r4 = ratio_at(10_000);
        let r5 = ratio_at(100_000);
        assert!(
            (r4 - r5).abs() / r5 < 0.01,
            "K/n not stable: {r4} vs {r5}"
        );
    }

    #[test]
    fn union_bound_line_finite_and_monotone_in_r() {
        let base = UnionBoundRequest {
            kind: UnionBoundKind::Line,
            n: 8,
            q: 8,
            r: 4,
            e: 1,
            eplus: 1,
            k: 5,
            s: 1,
            d: 3,
            digits: 50,
        };
        let v4 = union_bound(&base).unwrap();
        assert!(v4.log_q.is_finite());
        let mut more = base.clone();
        more.r = 5;
        let v5 = union_bound(&more).unwrap();
        assert!(v5.log_q < v4.log_q, "{} !< {}", v5.log_q, v4.log_q);
        let mut even_more = base.clone();
        even_more.r = 6;
        let v6 = union_bound(&even_more).unwrap();
        assert!(v6.log_q < v5.log_q);
    }

    #[test]
    fn union_bound_rejects_weak_k() {
        // K below the forced threshold is a hypothesis violation
        let req = UnionBoundRequest {
            kind: UnionBoundKind::Line,
            n: 8,
            q: 8,
            r: 4,
            e: 1,
            eplus: 1,
            k: 2,
            s: 1,
            d: 3,
            digits: 50,
        };
        assert!(matches!(
            union_bound(&req),
            Err(PlannerError::HypothesisViolation { .. })
        ));
    }

    #[test]
    fn union_bound_space_and_curve_evaluate() {
        let space = UnionBoundRequest {
            kind: UnionBoundKind::Space { m: 2 },
            n: 8,
            q: 4,
            r: 4,
            e: 1,
            eplus: 2,
            k: 15,
            s: 1,
            d: 4,
            digits: 50,
        };
        assert!(union_bound(&space).unwrap().log_q.is_finite());
        let curve = UnionBoundRequest {
            kind: UnionBoundKind::Curve { degree: 2 },
            n: 8,
            q: 9,
            r: 4,
            e: 1,
            eplus: 2,
            k: 8,
            s: 1,
            d: 4,
            digits: 50,
        };
        assert!(union_bound(&curve).unwrap().log_q.is_finite());
    }

    #[test]
    fn exponent_audits_pass() {
        let rep = audit_exponents(50);
        assert!(!rep.entries.is_empty());
        assert!(
            rep.pass,
            "failing entries: {:?}",
            rep.entries.iter().filter(|e| !e.ok).take(5).collect::<Vec<_>>()
        );
    }

    #[test]
    fn entropy_audit_passes() {
        let rep = audit_entropy(50);
        assert!(rep.entries.len() >= 100);
        assert!(rep.pass);
    }

    #[test]
    fn volume_report_brackets_the_entropy_exponent() {
        // for E/n ≤ 1 − 1/q the exact volume satisfies
        // H_q(ρ)n − log_q(n+1) ≤ log_q|B_E| ≤ H_q(ρ)n
        for (n, q, e) in [(100u64, 4u64, 25u64), (60, 3, 20), (200, 8, 50)] {
            let rep = ball_volume_report(n, q, e, 50).unwrap();
            let h = rep.entropy_exponent.expect("inside the entropy domain");
            let slack = ((n + 1) as f64).ln() / (q as f64).ln();
            assert!(rep.log_q_exact <= h + 1e-9, "{rep:?}");
            assert!(rep.log_q_exact >= h - slack - 1e-9, "{rep:?}");
        }
        // outside the entropy domain the exponent is absent
        let rep = ball_volume_report(10, 2, 9, 50).unwrap();
        assert!(rep.entropy_exponent.is_none());
        assert_eq!(ball_volume_report(10, 2, 0, 50).unwrap().exact, BigUint::from(1u32));
    }
}
