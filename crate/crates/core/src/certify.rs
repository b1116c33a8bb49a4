//! Arithmeticity certificates.
//!
//! A word `γ` certifies a hypergeometric group when the transvection
//! `T = 1 + v_R v_L` and its conjugate `γTγ⁻¹` have linearly independent,
//! Ω-orthogonal directions: `v_L · γ v_R = 0` and `v_R, γ v_R` independent.
//! Given Zariski density, two such transvections force finite index in
//! `Sp_Ω(ℤ)`.
//!
//! [`build_proof_witness`] goes one step further and constructs the element
//! `R = X₁^a X₂^{-b}` whose restriction to `W = span(x₁, x₂, x₃)` is a
//! nontrivial transvection along `W ∩ W⊥`, checking every identity exactly.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::form::{invariant_form_space, solve_invariant_form};
use crate::group::{
    build_group, eval_word, parse_word, Generators, GroupError, Transvection, Word, WordError,
};
use crate::json;
use crate::linalg::{
    self, independent_pair, primitive_part, rank_of_vectors, IntMatrix, IntVector,
};
use crate::params::ParamTuple;
use crate::search::{find_in_orbit, SearchConfig, SearchError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("certificate does not pass: {0}")]
    NotPassing(String),
    #[error("no word of length at most {depth} moves v_R off both orthogonal complements")]
    NoWitness { depth: usize },
    #[error("witness identity violated: {0}")]
    WitnessInvariant(String),
}

/// Parameters together with a candidate word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub alpha: ParamTuple,
    pub beta: ParamTuple,
    pub gamma: Word,
    /// The word as originally written.
    pub gamma_text: String,
    pub label: Option<String>,
}

impl Certificate {
    pub fn new(
        alpha: ParamTuple,
        beta: ParamTuple,
        gamma_text: &str,
        label: Option<String>,
    ) -> Result<Self, WordError> {
        Ok(Self {
            alpha,
            beta,
            gamma: parse_word(gamma_text)?,
            gamma_text: gamma_text.to_string(),
            label,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// The raw checks for one word against one pair of generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateChecks {
    pub transvection_ok: bool,
    #[serde(serialize_with = "json::int")]
    pub orthogonality_value: BigInt,
    pub independent: bool,
    pub form_dimension: usize,
    #[serde(serialize_with = "ser_lambda")]
    pub lambda: Option<BigRational>,
    pub verdict: Verdict,
    pub reason: Option<String>,
}

fn ser_lambda<S: serde::Serializer>(l: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match l {
        Some(r) if r.is_integer() => s.serialize_str(&r.numer().to_string()),
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub label: Option<String>,
    pub alpha: ParamTuple,
    pub beta: ParamTuple,
    pub word: String,
    #[serde(flatten)]
    pub checks: CertificateChecks,
    /// Zariski density is taken as given, not verified.
    pub assumed_zariski_dense: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.verdict == Verdict::Pass
    }
}

/// Runs the certificate checks for `word` against arbitrary generators.
pub fn check_generators(gens: &Generators, word: &Word) -> Result<CertificateChecks, CertifyError> {
    let mut t = gens.transvection()?;
    let m = eval_word(word, gens);
    let image = m.mul_vec(&t.v_r).expect("square");
    let orthogonality_value = linalg::dot(&t.v_l, &image);
    let independent = independent_pair(&t.v_r, &image);
    let form_dimension = invariant_form_space(gens).len();
    let form = solve_invariant_form(gens).ok();
    t.lambda = form.as_ref().and_then(|f| f.transvection_scalar(&t).ok());

    let reason = if !orthogonality_value.is_zero() {
        Some(format!("v_L·γ·v_R = {orthogonality_value}, not orthogonal"))
    } else if !independent {
        Some("v_R and γ·v_R are linearly dependent".to_string())
    } else if form_dimension != 1 {
        Some(format!(
            "invariant form space has dimension {form_dimension}"
        ))
    } else {
        None
    };
    Ok(CertificateChecks {
        transvection_ok: true,
        orthogonality_value,
        independent,
        form_dimension,
        lambda: t.lambda,
        verdict: if reason.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        reason,
    })
}

/// Builds the group and checks the certificate word.
pub fn check_certificate(c: &Certificate) -> Result<VerificationReport, CertifyError> {
    let gp = build_group(&c.alpha, &c.beta)?;
    Ok(VerificationReport {
        label: c.label.clone(),
        alpha: c.alpha.clone(),
        beta: c.beta.clone(),
        word: c.gamma_text.clone(),
        checks: check_generators(&gp.gens, &c.gamma)?,
        assumed_zariski_dense: true,
    })
}

/// The unipotent element built from a passing certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    #[serde(serialize_with = "json::vector")]
    pub x1: IntVector,
    #[serde(serialize_with = "json::vector")]
    pub x2: IntVector,
    #[serde(serialize_with = "json::vector")]
    pub x3: IntVector,
    /// `x₃ = γ′ · x₁`.
    #[serde(serialize_with = "ser_display")]
    pub x3_word: Word,
    /// Exponent of `X₁` in `R`.
    #[serde(serialize_with = "json::int")]
    pub a: BigInt,
    /// Exponent of `X₂⁻¹` in `R`.
    #[serde(serialize_with = "json::int")]
    pub b: BigInt,
    #[serde(rename = "R", serialize_with = "json::matrix")]
    pub r: IntMatrix,
    /// Primitive direction of `R x₃ - x₃`, spanning `W ∩ W⊥`.
    #[serde(serialize_with = "json::vector")]
    pub direction: IntVector,
    #[serde(rename = "W_basis", serialize_with = "json::vectors")]
    pub w_basis: Vec<IntVector>,
    /// `Ω(x₁, x₃)` and `Ω(x₂, x₃)`.
    #[serde(serialize_with = "json::vector")]
    pub pairings: IntVector,
}

fn ser_display<S: serde::Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(w)
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.magnitude().clone()
}

/// Builds `R = X₁^a X₂^{-b}` with `X₁ = T`, `X₂ = γTγ⁻¹` and checks that it
/// fixes `x₁, x₂` and moves `x₃` along `Ω(x₂,x₃)x₁ - Ω(x₁,x₃)x₂`.
///
/// `x₃ = γ′x₁` is the first orbit vector, in breadth-first order up to
/// `search_depth`, that is orthogonal to neither `x₁` nor `x₂`.
pub fn build_proof_witness(
    c: &Certificate,
    search_depth: usize,
) -> Result<WitnessReport, CertifyError> {
    let gp = build_group(&c.alpha, &c.beta)?;
    let checks = check_generators(&gp.gens, &c.gamma)?;
    if checks.verdict != Verdict::Pass {
        return Err(CertifyError::NotPassing(checks.reason.unwrap_or_default()));
    }
    witness_for_generators(&gp.gens, &c.gamma, search_depth)
}

pub fn witness_for_generators(
    gens: &Generators,
    gamma: &Word,
    search_depth: usize,
) -> Result<WitnessReport, CertifyError> {
    let broken = |what: &str| CertifyError::WitnessInvariant(what.to_string());
    let n = gens.dim();
    let form = solve_invariant_form(gens).map_err(|e| broken(&e.to_string()))?;
    let t: Transvection = gens.transvection()?;
    let m = eval_word(gamma, gens);
    let m_inv = eval_word(&gamma.inverse(), gens);
    let x1 = t.v_r.clone();
    let x2 = m.mul_vec(&x1).expect("square");
    let w_l = m_inv.row_mul(&t.v_l).expect("square");
    let x_1 = t.matrix.clone();
    let x_2 = m.mul(&x_1).and_then(|p| p.mul(&m_inv)).expect("square");
    let expected_x2 = IntMatrix::identity(n)
        .add(&IntMatrix::outer(&x2, &w_l))
        .expect("same shape");
    if x_2 != expected_x2 {
        return Err(broken("γTγ⁻¹ ≠ 1 + (γv_R)(v_Lγ⁻¹)"));
    }

    let cfg = SearchConfig {
        max_depth: search_depth,
        ..SearchConfig::default()
    };
    let off_both = |v: &[i128]| {
        let v: IntVector = v.iter().map(|&e| BigInt::from(e)).collect();
        Ok(!linalg::dot(&t.v_l, &v).is_zero() && !linalg::dot(&w_l, &v).is_zero())
    };
    let outcome = find_in_orbit(gens, &x1, None, &cfg, off_both, &mut |_| {})?;
    let (x3_word, x3) = outcome.found.ok_or(CertifyError::NoWitness {
        depth: search_depth,
    })?;

    let vl_x3 = linalg::dot(&t.v_l, &x3);
    let wl_x3 = linalg::dot(&w_l, &x3);
    let a = &wl_x3 * &wl_x3;
    let b = &vl_x3 * &vl_x3;
    let x_2_inv = linalg::unimodular_inverse(&x_2).map_err(|e| broken(&e.to_string()))?;
    let r = x_1
        .pow(&to_biguint(&a))
        .and_then(|p| p.mul(&x_2_inv.pow(&to_biguint(&b))?))
        .expect("square");

    if r.mul_vec(&x1).expect("square") != x1 {
        return Err(broken("R x₁ ≠ x₁"));
    }
    if r.mul_vec(&x2).expect("square") != x2 {
        return Err(broken("R x₂ ≠ x₂"));
    }
    let pairing = |u: &[BigInt], v: &[BigInt]| form.pairing(u, v).expect("lengths match");
    let o13 = pairing(&x1, &x3);
    let o23 = pairing(&x2, &x3);
    let target: IntVector = x1
        .iter()
        .zip(&x2)
        .map(|(p, q)| &o23 * p - &o13 * q)
        .collect();
    let moved: IntVector = r
        .mul_vec(&x3)
        .expect("square")
        .iter()
        .zip(&x3)
        .map(|(p, q)| p - q)
        .collect();
    if moved.iter().all(Zero::is_zero) || target.iter().all(Zero::is_zero) {
        return Err(broken("R acts trivially on x₃"));
    }
    if independent_pair(&moved, &target) {
        return Err(broken("R x₃ - x₃ is not along Ω(x₂,x₃)x₁ - Ω(x₁,x₃)x₂"));
    }
    if rank_of_vectors(&[&x1, &x2, &x3]) != 3 {
        return Err(broken("x₁, x₂, x₃ do not span a 3-dimensional subspace"));
    }
    if o13.is_zero() || o23.is_zero() {
        return Err(broken("x₃ is orthogonal to x₁ or x₂"));
    }
    let direction = primitive_part(&moved);
    for (name, x) in [("x₁", &x1), ("x₂", &x2), ("x₃", &x3)] {
        if !pairing(&direction, x).is_zero() {
            return Err(CertifyError::WitnessInvariant(format!(
                "direction is not Ω-orthogonal to {name}"
            )));
        }
    }
    debug_assert!(a.is_positive() && b.is_positive());
    Ok(WitnessReport {
        w_basis: vec![x1.clone(), x2.clone(), x3.clone()],
        x1,
        x2,
        x3,
        x3_word,
        a,
        b,
        r,
        direction,
        pairings: vec![o13, o23],
    })
}
