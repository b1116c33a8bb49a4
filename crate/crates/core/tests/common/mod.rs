//! Independent oracles shared by the integration tests and the acceptance
//! harness. Everything here uses plain nested vectors and textbook formulas
//! (Leibniz expansion, adjugates, Cayley-Hamilton, explicit word expansion)
//! so it shares no code paths with the library under test.
#![allow(dead_code)]

use std::collections::HashSet;

use hgp_core::catalog::list_all;
use hgp_core::certify::{CertifyError, Verdict, WitnessReport};
use hgp_core::form::SymplecticForm;
use hgp_core::group::{GroupPresentation, Letter};
use hgp_core::linalg::{rank_of_vectors, rational_nullspace, unimodular_inverse, IntMatrix};
use hgp_core::params::{cyclotomic_poly, IntPolynomial};
use hgp_core::{
    build_group, build_proof_witness, check_certificate, eval_word, parse_word,
    solve_invariant_form, Generators, Word,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

pub type Mat = Vec<Vec<BigInt>>;

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn to_mat(m: &IntMatrix) -> Mat {
    m.to_rows()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { big(1) } else { big(0) })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(big(0), |acc, t| acc + &a[i][t] * &b[t][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Mat, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(big(0), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn vec_mat(v: &[BigInt], a: &Mat) -> Vec<BigInt> {
    (0..a[0].len())
        .map(|j| {
            v.iter()
                .zip(a)
                .fold(big(0), |acc, (x, row)| acc + x * &row[j])
        })
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(big(0), |acc, (x, y)| acc + x * y)
}

/// `Ω(x, y) = xᵀ Ω y`.
pub fn pairing(omega: &Mat, x: &[BigInt], y: &[BigInt]) -> BigInt {
    dot(x, &mat_vec(omega, y))
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    // Heap's algorithm with parity tracking.
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut odd = false;
    out.push((p.clone(), odd));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            odd = !odd;
            out.push((p.clone(), odd));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Leibniz expansion over all permutations.
pub fn det_leibniz(a: &Mat) -> BigInt {
    let n = a.len();
    if n == 0 {
        return big(1);
    }
    permutations(n).into_iter().fold(big(0), |acc, (p, odd)| {
        let term = (0..n).fold(big(1), |t, i| t * &a[i][p[i]]);
        if odd {
            acc - term
        } else {
            acc + term
        }
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Largest `k` with a nonzero `k × k` minor.
pub fn rank_by_minors(a: &Mat) -> usize {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    for k in (1..=rows.min(cols)).rev() {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Mat = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect())
                    .collect();
                if !det_leibniz(&minor).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

/// Rank of a list of vectors, taken as the rows of a matrix.
pub fn vectors_rank(vs: &[Vec<BigInt>]) -> usize {
    rank_by_minors(&vs.to_vec())
}

/// `adj(A) / det(A)`, defined only when `det(A) = ±1`.
pub fn inverse_adjugate(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let d = det_leibniz(a);
    if d.abs() != big(1) {
        return None;
    }
    let cofactor = |i: usize, j: usize| {
        let minor: Mat = (0..n)
            .filter(|&r| r != i)
            .map(|r| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| a[r][c].clone())
                    .collect()
            })
            .collect();
        let m = det_leibniz(&minor);
        if (i + j).is_multiple_of(2) {
            m
        } else {
            -m
        }
    };
    Some(
        (0..n)
            .map(|i| (0..n).map(|j| cofactor(j, i) * &d).collect())
            .collect(),
    )
}

/// Inverse of a companion matrix `C` of a monic `p` with `p(0) = ±1`, via
/// Cayley-Hamilton: `C⁻¹ = -(C^{n-1} + c_{n-1} C^{n-2} + … + c_1) / c_0`.
pub fn companion_inverse(c: &Mat, p: &[BigInt]) -> Mat {
    let n = c.len();
    let c0 = &p[0];
    assert!(c0.abs() == big(1), "constant term must be a unit");
    // Horner: H = C^{n-1} + p_{n-1} C^{n-2} + … + p_1.
    let mut h = identity(n);
    for k in (1..n).rev() {
        h = mat_mul(&h, c);
        for (i, row) in h.iter_mut().enumerate() {
            row[i] += &p[k];
        }
    }
    h.iter()
        .map(|row| row.iter().map(|x| -(x * c0)).collect())
        .collect()
}

pub fn are_parallel(u: &[BigInt], v: &[BigInt]) -> bool {
    let n = u.len();
    (0..n).all(|i| (i + 1..n).all(|j| &u[i] * &v[j] == &u[j] * &v[i]))
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(big(0), |g, x| g.gcd(x))
}

/// Generated word syntax tree.
#[derive(Debug, Clone)]
pub enum Node {
    Gen(bool, i64),
    Group(Vec<Node>, i64),
}

fn power(exp: i64) -> String {
    match exp {
        1 => String::new(),
        e if e < 0 && e % 2 == 0 => format!("^{{{e}}}"),
        e => format!("^{e}"),
    }
}

pub fn render(nodes: &[Node]) -> String {
    nodes
        .iter()
        .map(|n| match n {
            Node::Gen(is_a, e) => format!("{}{}", if *is_a { 'A' } else { 'B' }, power(*e)),
            Node::Group(inner, e) => format!("({}){}", render(inner), power(*e)),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn node_strategy() -> impl Strategy<Value = Vec<Node>> {
    let exp = prop_oneof![Just(1i64), -3i64..=3];
    let leaf = (any::<bool>(), exp.clone()).prop_map(|(a, e)| Node::Gen(a, e));
    let tree = leaf.prop_recursive(3, 12, 4, move |inner| {
        prop_oneof![
            2 => (any::<bool>(), exp.clone()).prop_map(|(a, e)| Node::Gen(a, e)),
            1 => (prop::collection::vec(inner, 1..4), exp.clone())
                .prop_map(|(v, e)| Node::Group(v, e)),
        ]
    });
    prop::collection::vec(tree, 0..5)
}

/// Matrix and inverse of a word tree, expanded by hand.
pub struct Interp<'a> {
    pub a: &'a Mat,
    pub a_inv: &'a Mat,
    pub b: &'a Mat,
    pub b_inv: &'a Mat,
}

impl Interp<'_> {
    pub fn eval(&self, nodes: &[Node]) -> (Mat, Mat) {
        let n = self.a.len();
        let mut m = identity(n);
        let mut m_inv = identity(n);
        for node in nodes {
            let (x, x_inv) = match node {
                Node::Gen(true, e) => self.pow(self.a, self.a_inv, *e),
                Node::Gen(false, e) => self.pow(self.b, self.b_inv, *e),
                Node::Group(inner, e) => {
                    let (g, g_inv) = self.eval(inner);
                    self.pow(&g, &g_inv, *e)
                }
            };
            m = mat_mul(&m, &x);
            m_inv = mat_mul(&x_inv, &m_inv);
        }
        (m, m_inv)
    }

    fn pow(&self, x: &Mat, x_inv: &Mat, e: i64) -> (Mat, Mat) {
        let (base, inv) = if e < 0 { (x_inv, x) } else { (x, x_inv) };
        let mut p = identity(x.len());
        let mut q = identity(x.len());
        for _ in 0..e.unsigned_abs() {
            p = mat_mul(&p, base);
            q = mat_mul(inv, &q);
        }
        (p, q)
    }
}

/// Number of letters the tree expands to.
pub fn expanded_len(nodes: &[Node]) -> usize {
    nodes
        .iter()
        .map(|n| match n {
            Node::Gen(_, e) => e.unsigned_abs() as usize,
            Node::Group(inner, e) => expanded_len(inner) * e.unsigned_abs() as usize,
        })
        .sum()
}

pub fn group(label: &str) -> GroupPresentation {
    list_all()
        .iter()
        .find(|e| e.label == label)
        .unwrap_or_else(|| panic!("no catalog row {label}"))
        .resolve()
        .expect("catalog row resolves")
        .group
}

/// The generators and their Cayley-Hamilton inverses as plain matrices.
pub fn oracle_generators(gp: &GroupPresentation) -> (Mat, Mat, Mat, Mat) {
    let a = to_mat(gp.gens.a());
    let b = to_mat(gp.gens.b());
    let a_inv = companion_inverse(&a, gp.f.coeffs());
    let b_inv = companion_inverse(&b, gp.g.coeffs());
    (a, a_inv, b, b_inv)
}

// ---------------------------------------------------------------------------
// Checks shared by the property tests and the acceptance harness. Each
// returns a description of the first mismatch.

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Parser plus evaluator against the hand expansion, and `Display` round trip.
pub fn check_word_tree(gp: &GroupPresentation, nodes: &[Node]) -> Check {
    let (a, a_inv, b, b_inv) = oracle_generators(gp);
    let interp = Interp {
        a: &a,
        a_inv: &a_inv,
        b: &b,
        b_inv: &b_inv,
    };
    let text = render(nodes);
    let word = parse_word(&text).map_err(|e| format!("`{text}` rejected: {e}"))?;
    ensure(word.len() == expanded_len(nodes), || {
        format!("`{text}` expanded to {} letters", word.len())
    })?;
    let (expected, expected_inv) = interp.eval(nodes);
    ensure(to_mat(&eval_word(&word, &gp.gens)) == expected, || {
        format!("`{text}` evaluates differently")
    })?;
    ensure(
        to_mat(&eval_word(&word.inverse(), &gp.gens)) == expected_inv,
        || format!("inverse of `{text}` evaluates differently"),
    )?;
    let shown = word.to_string();
    let reparsed = parse_word(&shown).map_err(|e| format!("display `{shown}` rejected: {e}"))?;
    ensure(reparsed == word, || {
        format!("`{text}` -> `{shown}` does not round trip")
    })
}

/// Determinant, rank, inverse and nullspace of a square matrix against the
/// naive formulas.
pub fn check_exactlin(rows: &[Vec<i64>]) -> Check {
    let n = rows.len();
    let m = IntMatrix::from_rows(rows);
    let naive: Mat = rows
        .iter()
        .map(|r| r.iter().map(|&x| big(x)).collect())
        .collect();
    let det = det_leibniz(&naive);
    ensure(m.determinant().unwrap() == det, || {
        format!("det of {rows:?}")
    })?;
    let rank = rank_by_minors(&naive);
    ensure(m.rank() == rank, || {
        format!("rank of {rows:?}: {} vs {rank}", m.rank())
    })?;
    match (unimodular_inverse(&m), inverse_adjugate(&naive)) {
        (Ok(inv), Some(expected)) => {
            ensure(to_mat(&inv) == expected, || format!("inverse of {rows:?}"))?
        }
        (Err(_), None) => {}
        (got, want) => {
            return Err(format!(
                "invertibility of {rows:?}: library {} oracle {}",
                got.is_ok(),
                want.is_some()
            ))
        }
    }
    let kernel = rational_nullspace(&m.to_rational());
    ensure(kernel.len() == n - rank, || {
        format!("nullspace of {rows:?} has dimension {}", kernel.len())
    })?;
    for v in &kernel {
        ensure(mat_vec(&naive, v).iter().all(Zero::is_zero), || {
            format!("{v:?} not in kernel of {rows:?}")
        })?;
        ensure(gcd_all(v) == big(1), || format!("{v:?} not primitive"))?;
    }
    ensure(vectors_rank(&kernel) == kernel.len(), || {
        format!("nullspace basis of {rows:?} is dependent")
    })
}

/// `∏_{d | n} Φ_d = xⁿ - 1`, plus `Φ_n` vanishing at a primitive root.
pub fn check_cyclotomic(n: u64) -> Check {
    let mut product = IntPolynomial::one();
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        product = product.mul(&cyclotomic_poly(d).map_err(|e| e.to_string())?);
    }
    ensure(
        product == IntPolynomial::x_pow_minus_one(n as usize),
        || format!("divisor product for {n} is {product}"),
    )?;
    let phi = cyclotomic_poly(n).unwrap();
    let theta = std::f64::consts::TAU / n as f64;
    let (re, im) = phi.eval_complex(theta.cos(), theta.sin());
    let scale: f64 = phi
        .coeffs()
        .iter()
        .map(|c| num_traits::ToPrimitive::to_f64(&c.abs()).unwrap())
        .sum();
    ensure(re.hypot(im) < 1e-9 * scale, || {
        format!("Φ_{n} at a primitive root is {re}+{im}i")
    })
}

pub fn words_up_to(len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut last = vec![Word::empty()];
    for _ in 0..len {
        last = last
            .iter()
            .flat_map(|w| {
                Letter::ALL
                    .iter()
                    .map(move |&l| Word::new([vec![l], w.letters().to_vec()].concat()))
            })
            .collect();
        out.extend(last.iter().cloned());
    }
    out
}

/// All vectors `w · root` over every word of length at most `depth`.
pub fn naive_orbit(gens: &Generators, root: &[BigInt], depth: usize) -> HashSet<Vec<BigInt>> {
    words_up_to(depth)
        .iter()
        .map(|w| to_mat(&eval_word(w, gens)))
        .map(|m| mat_vec(&m, root))
        .collect()
}

/// Antisymmetric, primitive, nondegenerate, invariant, and `v_L = λ v_Rᵀ Ω`
/// for the `λ` reported by the certificate check.
pub fn check_form(label: &str) -> Check {
    let gp = group(label);
    let form: SymplecticForm = solve_invariant_form(&gp.gens).map_err(|e| e.to_string())?;
    let omega = to_mat(form.matrix());
    let n = omega.len();
    ensure(
        transpose(&omega)
            == omega
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect::<Mat>(),
        || format!("{label}: Ω not antisymmetric"),
    )?;
    ensure(gcd_all(&omega.concat()) == big(1), || {
        format!("{label}: Ω not primitive")
    })?;
    ensure(!det_leibniz(&omega).is_zero(), || {
        format!("{label}: Ω degenerate")
    })?;
    for (name, g) in [("A", gp.gens.a()), ("B", gp.gens.b())] {
        let g = to_mat(g);
        ensure(
            mat_mul(&mat_mul(&transpose(&g), &omega), &g) == omega,
            || format!("{label}: Ω not invariant under {name}"),
        )?;
    }
    let t = gp.gens.transvection().map_err(|e| e.to_string())?;
    let cov = vec_mat(&t.v_r, &omega);
    let pivot = (0..n)
        .find(|&i| !cov[i].is_zero())
        .ok_or("v_Rᵀ Ω is zero")?;
    ensure(
        (0..n).all(|j| &t.v_l[j] * &cov[pivot] == &t.v_l[pivot] * &cov[j]),
        || format!("{label}: v_L not proportional to v_Rᵀ Ω"),
    )?;
    let expected = num_rational::BigRational::new(t.v_l[pivot].clone(), cov[pivot].clone());
    let entry = list_all().iter().find(|e| e.label == label).unwrap();
    let report =
        check_certificate(&entry.resolve().unwrap().certificate).map_err(|e| e.to_string())?;
    ensure(report.checks.lambda.as_ref() == Some(&expected), || {
        format!("{label}: λ {:?} vs {expected}", report.checks.lambda)
    })?;
    ensure(!expected.is_zero(), || format!("{label}: λ = 0"))
}

/// Re-derives every identity of the unipotent witness by hand.
pub fn check_witness(label: &str, w: &WitnessReport) -> Check {
    let gp = group(label);
    let entry = list_all().iter().find(|e| e.label == label).unwrap();
    let gamma = entry.resolve().unwrap().certificate.gamma;
    let n = gp.gens.dim();
    let omega = to_mat(solve_invariant_form(&gp.gens).unwrap().matrix());
    let (a, a_inv, b, b_inv) = oracle_generators(&gp);
    let interp = Interp {
        a: &a,
        a_inv: &a_inv,
        b: &b,
        b_inv: &b_inv,
    };
    let nodes: Vec<Node> = gamma
        .letters()
        .iter()
        .map(|l| match l {
            Letter::A => Node::Gen(true, 1),
            Letter::AInv => Node::Gen(true, -1),
            Letter::B => Node::Gen(false, 1),
            Letter::BInv => Node::Gen(false, -1),
        })
        .collect();
    let (g, g_inv) = interp.eval(&nodes);
    let t = gp.gens.transvection().unwrap();
    let x1 = t.v_r.clone();
    let x2 = mat_vec(&g, &x1);
    let w_l = vec_mat(&t.v_l, &g_inv);
    ensure(w.x1 == x1 && w.x2 == x2, || {
        format!("{label}: x₁/x₂ differ")
    })?;

    // x₃ must be the image of its reported word.
    let mut x3_nodes = Vec::new();
    for l in w.x3_word.letters() {
        x3_nodes.push(match l {
            Letter::A => Node::Gen(true, 1),
            Letter::AInv => Node::Gen(true, -1),
            Letter::B => Node::Gen(false, 1),
            Letter::BInv => Node::Gen(false, -1),
        });
    }
    let (g3, _) = interp.eval(&x3_nodes);
    ensure(mat_vec(&g3, &x1) == w.x3, || {
        format!("{label}: x₃ is not γ′x₁")
    })?;
    let p1 = dot(&t.v_l, &w.x3);
    let p2 = dot(&w_l, &w.x3);
    ensure(!p1.is_zero() && !p2.is_zero(), || {
        format!("{label}: x₃ orthogonal to x₁ or x₂")
    })?;
    ensure(w.a == &p2 * &p2 && w.b == &p1 * &p1, || {
        format!("{label}: exponents a, b")
    })?;

    // Both factors are unipotent, so the powers are linear in the exponent.
    let mut r1 = identity(n);
    let mut r2 = identity(n);
    for i in 0..n {
        for j in 0..n {
            r1[i][j] += &w.a * &x1[i] * &t.v_l[j];
            r2[i][j] -= &w.b * &x2[i] * &w_l[j];
        }
    }
    let r = mat_mul(&r1, &r2);
    ensure(to_mat(&w.r) == r, || {
        format!("{label}: R differs from X₁^a X₂^-b")
    })?;
    ensure(mat_vec(&r, &x1) == x1, || format!("{label}: R x₁ ≠ x₁"))?;
    ensure(mat_vec(&r, &x2) == x2, || format!("{label}: R x₂ ≠ x₂"))?;
    let moved: Vec<BigInt> = mat_vec(&r, &w.x3)
        .iter()
        .zip(&w.x3)
        .map(|(p, q)| p - q)
        .collect();
    let o13 = pairing(&omega, &x1, &w.x3);
    let o23 = pairing(&omega, &x2, &w.x3);
    let target: Vec<BigInt> = x1
        .iter()
        .zip(&x2)
        .map(|(u, v)| &o23 * u - &o13 * v)
        .collect();
    ensure(moved.iter().any(|x| !x.is_zero()), || {
        format!("{label}: R fixes x₃")
    })?;
    ensure(are_parallel(&moved, &target), || {
        format!("{label}: R x₃ - x₃ not along the predicted line")
    })?;
    ensure(are_parallel(&moved, &w.direction), || {
        format!("{label}: reported direction is off")
    })?;
    for x in [&x1, &x2, &w.x3] {
        ensure(pairing(&omega, &w.direction, x).is_zero(), || {
            format!("{label}: direction not Ω-orthogonal")
        })?;
    }
    ensure(
        vectors_rank(&[x1.clone(), x2.clone(), w.x3.clone()]) == 3,
        || format!("{label}: x₁, x₂, x₃ dependent"),
    )?;
    ensure(rank_of_vectors(&[&x1, &x2, &w.x3]) == 3, || {
        format!("{label}: library rank disagrees")
    })?;
    ensure(w.pairings == vec![o13, o23], || {
        format!("{label}: pairings differ")
    })
}

/// Builds and checks the witness of one catalog row.
pub fn witness_row(label: &str, depth: usize) -> Check {
    let entry = list_all().iter().find(|e| e.label == label).unwrap();
    let cert = entry.resolve().map_err(|e| e.to_string())?.certificate;
    let w = build_proof_witness(&cert, depth).map_err(|e: CertifyError| format!("{label}: {e}"))?;
    check_witness(label, &w)
}

/// A random unimodular matrix as a product of elementary operations.
pub fn random_unimodular(n: usize, steps: usize, rng: &mut impl rand::Rng) -> IntMatrix {
    let mut m = identity(n);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..3) {
            0 => m.swap(i, j),
            1 => {
                let c = big(rng.gen_range(-2..=2));
                let row_j = m[j].clone();
                for (x, y) in m[i].iter_mut().zip(row_j) {
                    *x += &c * y;
                }
            }
            _ => {
                for x in m[i].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
    }
    let rows: Vec<BigInt> = m.concat();
    IntMatrix::new(n, n, rows).unwrap()
}

/// Verdict of `word` on a conjugated copy of the generators, computed with
/// the oracle matrices.
pub fn oracle_verdict(gens: &Generators, word: &Word) -> Verdict {
    let t = gens.transvection().unwrap();
    let m = to_mat(&eval_word(word, gens));
    let image = mat_vec(&m, &t.v_r);
    let orth = dot(&t.v_l, &image).is_zero();
    let indep = vectors_rank(&[t.v_r.clone(), image]) == 2;
    let unique = hgp_core::form::invariant_form_space(gens).len() == 1;
    if orth && indep && unique {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

pub fn labels() -> Vec<String> {
    list_all().iter().map(|e| e.label.clone()).collect()
}

pub fn one() -> BigInt {
    BigInt::one()
}

pub fn group_from(alpha: &str, beta: &str) -> GroupPresentation {
    build_group(
        &hgp_core::parse_rational_tuple(alpha).unwrap(),
        &hgp_core::parse_rational_tuple(beta).unwrap(),
    )
    .unwrap()
}
