//! The binomial bracket calculus and the quasi-nilpotent equivalence
//! decision procedure.
//!
//! For a (generally non-commuting) pair the bracket is
//! `(T - S)^[n] = sum_k (-1)^{n-k} C(n,k) T^k S^{n-k}`, equivalently
//! `(L_T - R_S)^n(I)` for the left/right multiplication operators on
//! matrix space. Two operators are quasi-nilpotent equivalent when
//! `p_hat((T - S)^[n])^{1/n} -> 0` in both argument orders for every
//! calibration seminorm.
//!
//! In finite dimension the limit is zero exactly when the brackets vanish
//! identically from `n* = 2 dim - 1` on, which happens exactly when the
//! semisimple parts of the two operators coincide: writing `T = D + N_T`,
//! `S = D + N_S` with a shared semisimple part, `L_T - R_S` splits into a
//! semisimple part annihilating the identity and a nilpotent part of index
//! at most `2 dim - 1`. The decision procedure tests the bracket norms at
//! the cutoff and cross-checks against the semisimple-part oracle; a
//! disagreement is surfaced, never resolved silently.

use num_bigint::BigUint;
use num_complex::Complex64 as C64;

use crate::calibration::Calibration;
use crate::error::{Error, Result};
use crate::linalg::eigen::{defective_aware_cluster_tol, semisimple_part};
use crate::matrix::{ComplexMatrix, ComplexVector};

/// Default relative tolerance for the equivalence decision.
pub const EQUIVALENCE_REL_TOL: f64 = 1e-9;

/// Relative tolerance for the semisimple-part oracle distance.
pub const ORACLE_REL_TOL: f64 = 1e-7;

/// Binomial coefficient as f64: exact in u64 up to n = 60, arbitrary
/// precision beyond (C(64, 32) already overflows 64 bits).
fn binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    if n <= 60 {
        let mut c: u64 = 1;
        for i in 1..=k {
            c = c * (n - k + i) as u64 / i as u64;
        }
        c as f64
    } else {
        let mut c = BigUint::from(1u32);
        for i in 1..=k {
            c = c * BigUint::from(n - k + i) / BigUint::from(i);
        }
        // Fits in f64 for every n this crate can reach.
        c.to_string().parse::<f64>().unwrap_or(f64::INFINITY)
    }
}

fn check_same_square(t: &ComplexMatrix, s: &ComplexMatrix) -> Result<usize> {
    if !t.is_square() || !s.is_square() || t.rows() != s.rows() {
        return Err(Error::DimensionMismatch(format!(
            "expected two square matrices of equal dimension, got {}x{} and {}x{}",
            t.rows(),
            t.cols(),
            s.rows(),
            s.cols()
        )));
    }
    Ok(t.rows())
}

/// The bracket by its defining binomial sum, with exact integer
/// coefficients. Serves as the oracle for the recurrence route.
pub fn bracket_direct(t: &ComplexMatrix, s: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let dim = check_same_square(t, s)?;
    let mut t_powers = Vec::with_capacity(n + 1);
    let mut s_powers = Vec::with_capacity(n + 1);
    t_powers.push(ComplexMatrix::identity(dim));
    s_powers.push(ComplexMatrix::identity(dim));
    for k in 1..=n {
        t_powers.push(t_powers[k - 1].mul(t));
        s_powers.push(s_powers[k - 1].mul(s));
    }
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for k in 0..=n {
        let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let coeff = C64::new(sign * binomial(n, k), 0.0);
        acc = acc.add(&t_powers[k].mul(&s_powers[n - k]).scale(coeff));
    }
    Ok(acc)
}

/// Bracket values `(T - S)^[0..=n_max]` with their calibration seminorms.
#[derive(Debug, Clone)]
pub struct BracketSequence {
    /// `terms[n] = (T - S)^[n]`; `terms[0] = I`, `terms[1] = T - S`.
    pub terms: Vec<ComplexMatrix>,
    /// `norms[n] = max_p p_hat(terms[n])`.
    pub norms: Vec<f64>,
    /// `roots[n-1] = norms[n]^{1/n}` for n >= 1: the decay curve.
    pub roots: Vec<f64>,
}

/// Build the bracket sequence by the recurrence
/// `(T - S)^[n+1] = T (T - S)^[n] - (T - S)^[n] S`, cross-checking the
/// leading terms against the direct binomial sum.
pub fn bracket_sequence(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cal: &Calibration,
    n_max: usize,
) -> Result<BracketSequence> {
    let dim = check_same_square(t, s)?;
    if dim != cal.space_dim() {
        return Err(Error::DimensionMismatch(format!(
            "operators are {dim}x{dim} but the calibration lives on dimension {}",
            cal.space_dim()
        )));
    }
    // Quotient boundedness of both inputs (brackets inherit it).
    cal.max_induced_norm(t)?;
    cal.max_induced_norm(s)?;

    let mut terms = Vec::with_capacity(n_max + 1);
    terms.push(ComplexMatrix::identity(dim));
    for n in 0..n_max {
        let prev = &terms[n];
        terms.push(t.mul(prev).sub(&prev.mul(s)));
    }

    // Re-verify the recurrence against the direct sum on the leading terms.
    let scale_base = t.op_norm_est() + s.op_norm_est();
    for (n, term) in terms.iter().enumerate().take(n_max.min(12) + 1).skip(1) {
        let direct = bracket_direct(t, s, n)?;
        let residual = term.sub(&direct).max_abs();
        let limit = 1e-10 * scale_base.powi(n as i32).max(f64::MIN_POSITIVE);
        if residual > limit {
            return Err(Error::BracketMismatch {
                n,
                residual,
                limit,
            });
        }
    }

    let mut norms = Vec::with_capacity(terms.len());
    for term in &terms {
        norms.push(cal.max_member_norm(term));
    }
    let roots = norms
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, b)| b.powf(1.0 / n as f64))
        .collect();
    Ok(BracketSequence {
        terms,
        norms,
        roots,
    })
}

/// Residual of the convolution identity
/// `sum_k C(n,k) (T - S)^[k] (S - R)^[n-k] = (T - R)^[n]`
/// in the max-abs norm, both sides computed independently.
pub fn convolution_residual(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    r: &ComplexMatrix,
    n: usize,
) -> Result<f64> {
    check_same_square(t, s)?;
    check_same_square(s, r)?;
    let dim = t.rows();
    let mut lhs = ComplexMatrix::zeros(dim, dim);
    for k in 0..=n {
        let left = bracket_direct(t, s, k)?;
        let right = bracket_direct(s, r, n - k)?;
        lhs = lhs.add(&left.mul(&right).scale(C64::new(binomial(n, k), 0.0)));
    }
    let rhs = bracket_direct(t, r, n)?;
    Ok(lhs.sub(&rhs).max_abs())
}

/// Outcome of the quasi-nilpotent equivalence decision.
#[derive(Debug, Clone)]
pub struct EquivalenceVerdict {
    /// Bracket-norm decision at the cutoff, both argument orders.
    pub equivalent: bool,
    /// The exact cutoff `n* = 2 dim - 1`.
    pub cutoff: usize,
    /// `(b_{n*}, b_{n*+1})` for the (T, S) order.
    pub residual_forward: (f64, f64),
    /// `(b_{n*}, b_{n*+1})` for the (S, T) order.
    pub residual_reverse: (f64, f64),
    /// Scale `(1 + |T| + |S|)^{n*}` the residuals are compared against.
    pub scale: f64,
    /// Whether the semisimple parts coincide (the independent oracle).
    pub oracle_equivalent: bool,
    /// Whether the bracket decision and the oracle agree.
    pub oracle_agrees: bool,
    /// Per-n decay `max(norms_TS[n], norms_ST[n])^{1/n}`, n = 1..=n*+1.
    pub decay_curve: Vec<f64>,
}

/// Decide quasi-nilpotent equivalence by testing the bracket norms at the
/// exact finite-dimensional cutoff, in both argument orders, and
/// cross-checking against semisimple-part equality.
pub fn decide_equivalence(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cal: &Calibration,
    tol_rel: f64,
) -> Result<EquivalenceVerdict> {
    let dim = check_same_square(t, s)?;
    let cutoff = 2 * dim - 1;

    let forward = bracket_sequence(t, s, cal, cutoff + 1)?;
    let reverse = bracket_sequence(s, t, cal, cutoff + 1)?;

    let scale = (1.0 + t.op_norm_est() + s.op_norm_est()).powi(cutoff as i32);
    let limit = tol_rel * scale;
    let residual_forward = (forward.norms[cutoff], forward.norms[cutoff + 1]);
    let residual_reverse = (reverse.norms[cutoff], reverse.norms[cutoff + 1]);
    let equivalent = residual_forward.0 <= limit
        && residual_forward.1 <= limit
        && residual_reverse.0 <= limit
        && residual_reverse.1 <= limit;

    // The oracle clusters at the defective-aware tolerance: eigenvalues of a
    // nilpotent block of index k scatter like eps^{1/k}, and the semisimple
    // part is only meaningful once that scatter is merged.
    let d_t = semisimple_part(t, defective_aware_cluster_tol(t))?;
    let d_s = semisimple_part(s, defective_aware_cluster_tol(s))?;
    let oracle_scale = 1.0 + t.op_norm_est() + s.op_norm_est();
    let oracle_equivalent = d_t.sub(&d_s).max_abs() <= ORACLE_REL_TOL * oracle_scale;

    let decay_curve = (1..=cutoff + 1)
        .map(|n| {
            forward.norms[n]
                .max(reverse.norms[n])
                .powf(1.0 / n as f64)
        })
        .collect();

    Ok(EquivalenceVerdict {
        equivalent,
        cutoff,
        residual_forward,
        residual_reverse,
        scale,
        oracle_equivalent,
        oracle_agrees: equivalent == oracle_equivalent,
        decay_curve,
    })
}

/// One row of the bracket decay table.
#[derive(Debug, Clone)]
pub struct DecayRow {
    pub n: usize,
    /// Seminorm name, or "max" for the family maximum.
    pub seminorm: String,
    /// `p_hat((T - S)^[n])`.
    pub norm: f64,
    /// `norm^{1/n}`; NaN for the n = 0 row.
    pub root: f64,
}

/// Per-seminorm bracket decay `(n, b_n, b_n^{1/n})` for n = 0..=n_max,
/// with a "max" row per n aggregating the family.
pub fn decay_table(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cal: &Calibration,
    n_max: usize,
) -> Result<Vec<DecayRow>> {
    let seq = bracket_sequence(t, s, cal, n_max)?;
    let mut rows = Vec::with_capacity((n_max + 1) * (cal.seminorms().len() + 1));
    for (n, term) in seq.terms.iter().enumerate() {
        let root_of = |b: f64| {
            if n == 0 {
                f64::NAN
            } else {
                b.powf(1.0 / n as f64)
            }
        };
        let mut family_max = 0.0_f64;
        for p in cal.seminorms() {
            let b = p.member_norm(term);
            family_max = family_max.max(b);
            rows.push(DecayRow {
                n,
                seminorm: p.name().to_string(),
                norm: b,
                root: root_of(b),
            });
        }
        rows.push(DecayRow {
            n,
            seminorm: "max".to_string(),
            norm: family_max,
            root: root_of(family_max),
        });
    }
    Ok(rows)
}

/// Evaluate the transfer series `sum_n (T - S)^[n] v / (mu - lambda)^{n+1}`.
///
/// With `S = lambda I` this reproduces `R(mu, T) v` (the Neumann form of the
/// resolvent); with `(lambda I - S) v = 0` the result satisfies
/// `(mu I - T) result = v`.
pub fn bracket_resolvent_series(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    lambda: C64,
    mu: C64,
    v: &ComplexVector,
    n_max: usize,
) -> Result<ComplexVector> {
    let dim = check_same_square(t, s)?;
    if v.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "vector has dimension {}, expected {dim}",
            v.dim()
        )));
    }
    let denom = mu - lambda;
    if denom.norm() == 0.0 {
        return Err(Error::Validation(
            "transfer series requires mu != lambda".into(),
        ));
    }

    let v_scale = v.norm();
    let mut bracket = ComplexMatrix::identity(dim);
    let mut denom_power = denom; // (mu - lambda)^{n+1}
    let mut sum = ComplexVector::zeros(dim);
    let mut prev_norm = f64::INFINITY;
    let mut growth_streak = 0usize;
    for n in 0..=n_max {
        if n > 0 {
            bracket = t.mul(&bracket).sub(&bracket.mul(s));
            denom_power *= denom;
        }
        let contribution = bracket.apply(v).scale(C64::new(1.0, 0.0) / denom_power);
        let c_norm = contribution.norm();
        if !c_norm.is_finite() {
            return Err(Error::DivergenceDetected {
                at_term: n,
                consecutive: growth_streak,
            });
        }
        sum = sum.add(&contribution);
        if c_norm <= 1e-14 * v_scale {
            break;
        }
        if c_norm > prev_norm {
            growth_streak += 1;
            if growth_streak >= 8 {
                return Err(Error::DivergenceDetected {
                    at_term: n,
                    consecutive: growth_streak,
                });
            }
        } else {
            growth_streak = 0;
        }
        prev_norm = c_norm;
    }
    Ok(sum)
}

/// Partial-sum certificate for the series `sum_n (T - S)^[n]`.
#[derive(Debug, Clone)]
pub struct SeriesReport {
    /// The (finite) sum of the series.
    pub sum: ComplexMatrix,
    /// `max_p p_hat(partial_m)` for m = 0..
    pub partial_norms: Vec<f64>,
    /// Largest `max_p p_hat(partial_m - partial_n)` over m > n >= cutoff.
    pub cauchy_residual: f64,
    pub cauchy_ok: bool,
}

/// Sum `sum_n (T - S)^[n]` for an equivalent pair and certify the Cauchy
/// tail. At desk scale the brackets vanish from the cutoff on, so the sum
/// is exact.
pub fn series_convergence_check(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cal: &Calibration,
) -> Result<SeriesReport> {
    let verdict = decide_equivalence(t, s, cal, EQUIVALENCE_REL_TOL)?;
    if !verdict.oracle_agrees {
        return Err(Error::OracleDisagreement);
    }
    if !verdict.equivalent {
        return Err(Error::NotEquivalent);
    }
    let cutoff = verdict.cutoff;
    let seq = bracket_sequence(t, s, cal, cutoff + 1)?;

    let dim = t.rows();
    let mut partials: Vec<ComplexMatrix> = Vec::with_capacity(seq.terms.len());
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for term in &seq.terms {
        acc = acc.add(term);
        partials.push(acc.clone());
    }
    let mut partial_norms = Vec::with_capacity(partials.len());
    for p in &partials {
        partial_norms.push(cal.max_member_norm(p));
    }

    let mut cauchy_residual = 0.0_f64;
    for n in cutoff..partials.len() {
        for m in n + 1..partials.len() {
            let diff = partials[m].sub(&partials[n]);
            cauchy_residual = cauchy_residual.max(cal.max_member_norm(&diff));
        }
    }
    let scale = (1.0 + t.op_norm_est() + s.op_norm_est()).powi(cutoff as i32);
    let cauchy_ok = cauchy_residual <= 1e-10 * scale;
    Ok(SeriesReport {
        sum: partials.last().unwrap().clone(),
        partial_norms,
        cauchy_residual,
        cauchy_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd::svd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> ComplexMatrix {
        let entries: Vec<_> = (0..dim * dim)
            .map(|_| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            .collect();
        ComplexMatrix::new(dim, dim, entries).unwrap()
    }

    fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        svd(&random_matrix(rng, dim, 1.0)).u
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(60, 30), 118264581564861424.0);
        // Beyond u64: C(64, 32) = 1832624140942590534.
        assert_eq!(binomial(64, 32), 1.832_624_140_942_590_5e18);
    }

    #[test]
    fn bracket_base_cases() {
        let t = ComplexMatrix::from_real(&[&[1.0, 2.0], &[0.5, -1.0]]).unwrap();
        let s = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(bracket_direct(&t, &s, 0)
            .unwrap()
            .sub(&ComplexMatrix::identity(2))
            .max_abs()
            == 0.0);
        assert!(bracket_direct(&t, &s, 1).unwrap().sub(&t.sub(&s)).max_abs() == 0.0);
    }

    #[test]
    fn bracket_of_nilpotent_shift_pair() {
        // T = upper shift, S = lower shift: T^2 = S^2 = 0, TS = diag(1, 0),
        // so (T - S)^[2] = T^2 - 2TS + S^2 = [[-2, 0], [0, 0]].
        let t = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let s = ComplexMatrix::from_real(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        let b2 = bracket_direct(&t, &s, 2).unwrap();
        let expected = ComplexMatrix::from_real(&[&[-2.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert!(b2.sub(&expected).max_abs() < 1e-15);
        // Every binomial term vanishes from n = 3 on.
        assert!(bracket_direct(&t, &s, 3).unwrap().max_abs() == 0.0);
        assert!(bracket_direct(&t, &s, 4).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn sequence_reflexive_and_jordan_cases() {
        let cal = Calibration::euclidean(2);
        let t = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let seq = bracket_sequence(&t, &t, &cal, 5).unwrap();
        for n in 1..=5 {
            assert!(seq.norms[n] < 1e-14, "reflexive norm at {n}");
        }
        let id = ComplexMatrix::identity(2);
        let seq = bracket_sequence(&t, &id, &cal, 4).unwrap();
        // (T - I) is nilpotent of index 2: terms vanish from n = 2.
        assert!(seq.norms[1] > 0.5);
        assert!(seq.norms[2] < 1e-14);
        assert!(seq.norms[3] < 1e-14);
    }

    #[test]
    fn commuting_pair_collapses_to_ordinary_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let cal = Calibration::euclidean(3);
        // Commuting pair: polynomials in the same matrix.
        let a = random_matrix(&mut rng, 3, 1.0);
        let t = a.mul(&a).scale(C64::new(0.3, 0.0)).add(&a);
        let s = a.scale(C64::new(0.5, -0.25));
        let seq = bracket_sequence(&t, &s, &cal, 12).unwrap();
        let diff = t.sub(&s);
        let scale = (t.op_norm_est() + s.op_norm_est()).max(1.0);
        for n in 0..=12 {
            let expected = diff.pow(n);
            let err = seq.terms[n].sub(&expected).max_abs();
            assert!(
                err <= 1e-10 * scale.powi(n as i32),
                "n = {n}: commuting collapse residual {err:.3e}"
            );
        }
    }

    #[test]
    fn recurrence_matches_direct_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        for dim in 2..=6 {
            let cal = Calibration::euclidean(dim);
            let t = random_matrix(&mut rng, dim, 2.0);
            let s = random_matrix(&mut rng, dim, 2.0);
            // bracket_sequence cross-checks internally and errors on mismatch.
            bracket_sequence(&t, &s, &cal, 12).unwrap();
        }
    }

    #[test]
    fn convolution_identity_special_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let t = random_matrix(&mut rng, 3, 1.0);
        let s = random_matrix(&mut rng, 3, 1.0);
        let r = random_matrix(&mut rng, 3, 1.0);

        // R = S collapses to the bracket itself; T = S likewise.
        assert!(convolution_residual(&t, &s, &s, 4).unwrap() < 1e-12);
        assert!(convolution_residual(&t, &t, &r, 5).unwrap() < 1e-12);

        let scale = (1.0 + t.op_norm_est() + s.op_norm_est() + r.op_norm_est()).powi(5);
        let resid = convolution_residual(&t, &s, &r, 5).unwrap();
        assert!(resid <= 1e-9 * scale, "residual {resid:.3e} vs scale {scale:.3e}");
    }

    /// Jordan-structured operator with prescribed semisimple part: conjugate
    /// a block-diagonal eigenvalue pattern plus a block-respecting strictly
    /// upper nilpotent by a unitary. The nilpotent commutes with the
    /// eigenvalue pattern precisely because it never crosses blocks.
    fn structured_pair(
        rng: &mut ChaCha8Rng,
        dim: usize,
        shared: bool,
    ) -> (ComplexMatrix, ComplexMatrix) {
        // Block sizes: first block gets at least 2 when dim allows.
        let first = if dim >= 2 { 2 } else { 1 };
        let mut sizes = vec![first];
        let mut used = first;
        while used < dim {
            let s = 1 + (rng.gen_range(0..2) as usize).min(dim - used - 1);
            sizes.push(s);
            used += s;
        }
        // Block eigenvalues on a ring of radius 0.9: norms stay near 1 while
        // block gaps stay O(1), which the cutoff threshold needs.
        let offset_angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let k = sizes.len();
        let mut values = Vec::new();
        let mut offsets = Vec::new();
        let mut off = 0;
        for (bi, &sz) in sizes.iter().enumerate() {
            let theta = offset_angle + std::f64::consts::TAU * bi as f64 / k as f64;
            let lambda = C64::new(0.0, theta).exp() * 0.9
                + C64::new(rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03));
            offsets.push(off);
            for _ in 0..sz {
                values.push(lambda);
                off += 1;
            }
        }
        let d = ComplexMatrix::diagonal(&values);
        let nil = |rng: &mut ChaCha8Rng| {
            let mut n = ComplexMatrix::zeros(dim, dim);
            for (bi, &sz) in sizes.iter().enumerate() {
                let o = offsets[bi];
                for i in 0..sz {
                    for j in i + 1..sz {
                        n[(o + i, o + j)] =
                            C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                    }
                }
            }
            n
        };
        let q = random_unitary(rng, dim);
        let conj = |m: &ComplexMatrix| q.mul(m).mul(&q.adjoint());
        let t = conj(&d.add(&nil(rng)));
        let s = if shared {
            conj(&d.add(&nil(rng)))
        } else {
            // Reflect the eigenvalue pattern to break semisimple equality
            // while keeping the same ring of values.
            let d2 = ComplexMatrix::diagonal(&values).scale(C64::new(-1.0, 0.0));
            conj(&d2.add(&nil(rng)))
        };
        (t, s)
    }

    /// Brute-force validation of the cutoff characterization: the bracket
    /// decision must coincide with semisimple-part equality on structured
    /// pairs across small dimensions.
    #[test]
    fn cutoff_decision_matches_oracle_on_structured_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        let mut positives = 0;
        let mut negatives = 0;
        for round in 0..40 {
            let dim = 2 + round % 4; // 2..=5
            let shared = round % 2 == 0;
            let (t, s) = structured_pair(&mut rng, dim, shared);
            let cal = Calibration::euclidean(dim);
            let verdict = decide_equivalence(&t, &s, &cal, EQUIVALENCE_REL_TOL).unwrap();
            assert!(
                verdict.oracle_agrees,
                "round {round}: bracket decision {} vs oracle {}",
                verdict.equivalent, verdict.oracle_equivalent
            );
            assert_eq!(verdict.equivalent, shared, "round {round}");
            if shared {
                positives += 1;
            } else {
                negatives += 1;
            }
        }
        assert!(positives >= 15 && negatives >= 15);
    }

    #[test]
    fn equivalence_examples() {
        let cal = Calibration::euclidean(2);
        // Jordan block vs identity: brackets vanish from n = 2.
        let t = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let id = ComplexMatrix::identity(2);
        let verdict = decide_equivalence(&t, &id, &cal, EQUIVALENCE_REL_TOL).unwrap();
        assert!(verdict.equivalent);
        assert!(verdict.oracle_agrees);
        assert_eq!(verdict.cutoff, 3);

        // Same spectrum, different semisimple parts: not equivalent, and the
        // decay roots sit at 1.
        let d1 = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let d2 = ComplexMatrix::from_real(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        let verdict = decide_equivalence(&d1, &d2, &cal, EQUIVALENCE_REL_TOL).unwrap();
        assert!(!verdict.equivalent);
        assert!(verdict.oracle_agrees);
        assert!((verdict.residual_forward.0 - 1.0).abs() < 1e-12);
        for root in &verdict.decay_curve {
            assert!((root - 1.0).abs() < 1e-12);
        }

        // Two nilpotent shifts are equivalent (both semisimple parts zero).
        let up = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let down = ComplexMatrix::from_real(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        let verdict = decide_equivalence(&up, &down, &cal, EQUIVALENCE_REL_TOL).unwrap();
        assert!(verdict.equivalent);
        assert!(verdict.oracle_agrees);
    }

    #[test]
    fn transfer_series_reproduces_resolvent() {
        // S = lambda I: the series is the Neumann form of R(mu, T).
        let t = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let s = ComplexMatrix::zeros(2, 2); // lambda = 0
        let v = ComplexVector::basis(2, 0);
        let result =
            bracket_resolvent_series(&t, &s, C64::new(0.0, 0.0), C64::new(5.0, 0.0), &v, 400)
                .unwrap();
        let expected = v.scale(C64::new(0.25, 0.0));
        assert!(result.sub(&expected).norm() < 1e-8 * expected.norm() + 1e-12);
    }

    #[test]
    fn transfer_series_trivial_and_kernel_cases() {
        // T = S: only n = 0 survives, sum = v / (mu - lambda).
        let t = ComplexMatrix::from_real(&[&[1.0, 2.0], &[0.0, -1.0]]).unwrap();
        let v = ComplexVector::from_real(&[1.0, -2.0]).unwrap();
        let lambda = C64::new(0.3, 0.1);
        let result = bracket_resolvent_series(&t, &t, lambda, lambda + 2.0, &v, 50).unwrap();
        assert!(result.sub(&v.scale(C64::new(0.5, 0.0))).norm() < 1e-14);

        // (lambda I - S) v = 0 forces (mu I - T) result = v.
        let jordan = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let identity = ComplexMatrix::identity(2);
        let mu = C64::new(4.0, 0.0);
        let v = ComplexVector::basis(2, 0);
        let result =
            bracket_resolvent_series(&jordan, &identity, C64::new(1.0, 0.0), mu, &v, 50).unwrap();
        let mut shifted = jordan.scale(C64::new(-1.0, 0.0));
        for i in 0..2 {
            shifted[(i, i)] += mu;
        }
        let check = shifted.apply(&result);
        assert!(check.sub(&v).norm() < 1e-7 * v.norm());
    }

    #[test]
    fn transfer_series_detects_divergence() {
        // |mu - lambda| far below the radius of T - lambda I.
        let t = ComplexMatrix::from_real(&[&[3.0, 0.0], &[0.0, 0.0]]).unwrap();
        let s = ComplexMatrix::zeros(2, 2);
        let v = ComplexVector::basis(2, 0);
        match bracket_resolvent_series(&t, &s, C64::new(0.0, 0.0), C64::new(0.5, 0.0), &v, 300) {
            Err(Error::DivergenceDetected { .. }) => {}
            other => panic!("expected DivergenceDetected, got {other:?}"),
        }
    }

    #[test]
    fn series_sum_examples() {
        let cal = Calibration::euclidean(2);
        let id = ComplexMatrix::identity(2);

        // T = S: the sum is the identity.
        let report = series_convergence_check(&id, &id, &cal).unwrap();
        assert!(report.sum.sub(&id).max_abs() < 1e-14);
        assert!(report.cauchy_ok);

        // Jordan vs identity: sum = I + (T - I) = T.
        let t = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let report = series_convergence_check(&t, &id, &cal).unwrap();
        assert!(report.sum.sub(&t).max_abs() < 1e-13);
        assert!(report.cauchy_ok);

        // Nilpotent shift pair: three nonzero terms.
        let up = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let down = ComplexMatrix::from_real(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        let report = series_convergence_check(&up, &down, &cal).unwrap();
        let expected = id
            .add(&up.sub(&down))
            .add(&bracket_direct(&up, &down, 2).unwrap());
        assert!(report.sum.sub(&expected).max_abs() < 1e-13);

        // Non-equivalent pair is rejected.
        let d1 = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let d2 = ComplexMatrix::from_real(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            series_convergence_check(&d1, &d2, &cal),
            Err(Error::NotEquivalent)
        ));
    }

    #[test]
    fn equivalence_implies_equal_spectra() {
        use crate::spectral::{hausdorff_distance, qp_spectrum};
        let mut rng = ChaCha8Rng::seed_from_u64(999);
        for round in 0..10 {
            let dim = 2 + round % 3;
            let (t, s) = structured_pair(&mut rng, dim, true);
            let cal = Calibration::euclidean(dim);
            let verdict = decide_equivalence(&t, &s, &cal, EQUIVALENCE_REL_TOL).unwrap();
            assert!(verdict.equivalent);
            let tol = crate::linalg::eigen::default_cluster_tol(&t);
            let spec_t = qp_spectrum(&t, &cal, tol).unwrap();
            let spec_s = qp_spectrum(&s, &cal, tol).unwrap();
            let vt: Vec<C64> = spec_t.qp_spectrum.iter().map(|c| c.value).collect();
            let vs: Vec<C64> = spec_s.qp_spectrum.iter().map(|c| c.value).collect();
            assert!(hausdorff_distance(&vt, &vs) <= 1e-7);
        }
    }
}
