//! The check engine: every constructive claim is a named, exactly evaluated
//! check producing pass/fail with a reproducible witness on failure.
//!
//! Check names are a stable public contract: new checks append, existing
//! names never change. Negative controls (names ending in `_negcontrol`) run
//! the same machinery on fixtures engineered to fail; they are excluded from
//! default suite runs and only selected by filters containing `negcontrol`.

use crate::basis::{
    build_basis, conforming_face_fn, dim_formula, expand_conforming, gram_matrix, hat_function,
    nc_facet_fn, nc_simplex_fn, psi_big, psi_z, BasisTag, Bc,
};
use crate::complex::SimplicialComplex;
use crate::dofs::{
    approx_op_2d, assemble_dofs, edge_basis_2d, edge_dofs_2d, facet_conforming_tags,
    facet_mean_dof_k1, interpolate, make_mark, MarkPolicy, MarkTarget,
};
use crate::error::Error;
use crate::fe::FeFunction;
use crate::integrate::{integral_normalized, integrate_out_trailing, l2_normalized};
use crate::jacobi::{
    endpoint_minus, endpoint_plus, jacobi_poly, jacobi_shifted, rho, weighted_integral_sym,
    JacobiParams,
};
use crate::linalg::{det, rank_exact, rank_lower_bound_modp, Matrix};
use crate::num::{factorial, multi_indices, rat_int, render, sign_pow, Rational};
use crate::orthopoly::{simplex_orthopoly, weighted_inner, OrthoIndex};
use crate::poly::MultiPoly;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// Parameters a check ran with; fields are serialized only when present so
/// reports stay compact and byte-stable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub params: CheckParams,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn pass(name: &str, params: CheckParams) -> Self {
        Check {
            name: name.to_string(),
            params,
            status: CheckStatus::Pass,
            witness: None,
        }
    }

    fn fail(name: &str, params: CheckParams, witness: String) -> Self {
        Check {
            name: name.to_string(),
            params,
            status: CheckStatus::Fail,
            witness: Some(witness),
        }
    }

    fn skipped(name: &str, params: CheckParams, reason: String) -> Self {
        Check {
            name: name.to_string(),
            params,
            status: CheckStatus::Skipped,
            witness: Some(reason),
        }
    }

    fn from_witness(name: &str, params: CheckParams, witness: Option<String>) -> Self {
        match witness {
            None => Check::pass(name, params),
            Some(w) => Check::fail(name, params, w),
        }
    }
}

/// Structured verification report. `elapsed_ms` is filled by the caller (the
/// core stays clock-free); everything else is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub mesh: String,
    pub checks: Vec<Check>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        let mut skipped = 0;
        for c in &self.checks {
            match c.status {
                CheckStatus::Pass => pass += 1,
                CheckStatus::Fail => fail += 1,
                CheckStatus::Skipped => skipped += 1,
            }
        }
        (pass, fail, skipped)
    }
}

fn params_dk(mesh: &str, d: usize, k: usize) -> CheckParams {
    CheckParams {
        mesh: Some(mesh.to_string()),
        d: Some(d),
        k: Some(k),
        ..Default::default()
    }
}

fn params_dkb(mesh: &str, d: usize, k: usize, bc: Bc) -> CheckParams {
    CheckParams {
        mesh: Some(mesh.to_string()),
        d: Some(d),
        k: Some(k),
        bc: Some(bc.as_str().to_string()),
        ..Default::default()
    }
}

// ---------------------------------------------------------------------------
// foundations (mesh-independent)
// ---------------------------------------------------------------------------

/// Jacobi orthogonality (weighted moments below the degree vanish) for the
/// parameter families in use.
pub fn check_jacobi_orthogonality(n_max: usize) -> Check {
    let name = "jacobi_orthogonality";
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for b in 0..=6 {
        pairs.push((0, b));
        pairs.push((b, 0));
    }
    for a in 0..=9 {
        pairs.push((a, 1));
    }
    pairs.sort_unstable();
    pairs.dedup();
    for (alpha, beta) in pairs {
        for n in 0..=n_max {
            let p = jacobi_poly(JacobiParams::new(n, alpha, beta));
            for m in 0..n {
                let mut mono = alloc::vec![Rational::zero(); m + 1];
                mono[m] = Rational::one();
                let q = p.mul(&crate::poly::UniPoly::from_coeffs(mono));
                let v = weighted_integral_sym(&q, alpha, beta);
                if !v.is_zero() {
                    return Check::fail(
                        name,
                        CheckParams::default(),
                        format!("(n={n},a={alpha},b={beta}) moment m={m} = {}", render(&v)),
                    );
                }
            }
            let sq = weighted_integral_sym(&p.mul(&p), alpha, beta);
            if sq.is_zero() {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("(n={n},a={alpha},b={beta}) has zero norm"),
                );
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

/// Endpoint identities `P_n(1) = (a+1)_n/n!`, `P_n(-1) = (-1)^n (b+1)_n/n!`,
/// specializing to `P_n^{(0,d-2)}(-1) = (-1)^n rho_n`.
pub fn check_jacobi_endpoints(n_max: usize) -> Check {
    let name = "jacobi_endpoints";
    for alpha in 0..=6 {
        for beta in 0..=6 {
            for n in 0..=n_max {
                let jp = JacobiParams::new(n, alpha, beta);
                let p = jacobi_poly(jp);
                if p.eval(&rat_int(1)) != endpoint_plus(jp) {
                    return Check::fail(
                        name,
                        CheckParams::default(),
                        format!("P_{n}^{{({alpha},{beta})}}(1) != (a+1)_n/n!"),
                    );
                }
                if p.eval(&rat_int(-1)) != endpoint_minus(jp) {
                    return Check::fail(
                        name,
                        CheckParams::default(),
                        format!("P_{n}^{{({alpha},{beta})}}(-1) != (-1)^n (b+1)_n/n!"),
                    );
                }
            }
        }
    }
    // rho specialization for the (0, d-2) family
    for d in 2..=8usize {
        for n in 0..=n_max {
            let p = jacobi_poly(JacobiParams::new(n, 0, d - 2));
            let want = sign_pow(n) * rho(n, d);
            if p.eval(&rat_int(-1)) != want {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("P_{n}^{{(0,{})}}(-1) != (-1)^n rho_n", d - 2),
                );
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

/// Simplex orthogonal polynomials: `(P_a, P_b) = delta_ab c_a` with
/// `c_a != 0`, for `ell <= ell_max`, `|alpha| <= deg_max`.
pub fn check_orthopoly_orthogonality(ell_max: usize, deg_max: usize) -> Check {
    let name = "orthopoly_orthogonality";
    for ell in 1..=ell_max {
        let idxs = multi_indices(ell, deg_max);
        let polys: Vec<MultiPoly> = idxs
            .iter()
            .map(|a| simplex_orthopoly(&OrthoIndex::new(ell, a.clone())).expect("ell >= 1"))
            .collect();
        for i in 0..polys.len() {
            for j in i..polys.len() {
                let v = weighted_inner(ell, &polys[i], &polys[j]);
                if i == j && v.is_zero() {
                    return Check::fail(
                        name,
                        CheckParams::default(),
                        format!("ell={ell} alpha={:?}: zero norm", idxs[i]),
                    );
                }
                if i != j && !v.is_zero() {
                    return Check::fail(
                        name,
                        CheckParams::default(),
                        format!(
                            "ell={ell} alpha={:?} beta={:?}: inner product {}",
                            idxs[i],
                            idxs[j],
                            render(&v)
                        ),
                    );
                }
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

/// The closed forms of the `ell = 1, 2` orthogonal polynomials, matched
/// term by term.
pub fn check_orthopoly_closed_forms() -> Check {
    let name = "orthopoly_closed_forms";
    // ell = 1: P_a^{(1,1)}(2 lambda_1 - 1)
    for a in 0..=4usize {
        let p = simplex_orthopoly(&OrthoIndex::new(1, alloc::vec![a])).expect("ell 1");
        let arg = &MultiPoly::var(2, 1).scale(&rat_int(2)) - &MultiPoly::one(2);
        let expect = jacobi_poly(JacobiParams::new(a, 1, 1)).compose_multi(&arg);
        if !p.bary_eq(&expect) {
            return Check::fail(name, CheckParams::default(), format!("ell=1 alpha={a}"));
        }
    }
    // ell = 2: P_{a1}^{(2a2+3,1)}(2l1-1) (1-l1)^{a2} P_{a2}^{(1,1)}(2l2/(1-l1)-1)
    for a1 in 0..=2usize {
        for a2 in 0..=2usize {
            let p = simplex_orthopoly(&OrthoIndex::new(2, alloc::vec![a1, a2])).expect("ell 2");
            let n = 3;
            let l1 = MultiPoly::var(n, 1);
            let l2 = MultiPoly::var(n, 2);
            let one = MultiPoly::one(n);
            let d2 = &one - &l1;
            let f1 = jacobi_poly(JacobiParams::new(a1, 2 * a2 + 3, 1))
                .compose_multi(&(&l1.scale(&rat_int(2)) - &one));
            let jac2 = jacobi_poly(JacobiParams::new(a2, 1, 1));
            let mut f2 = MultiPoly::zero(n);
            for (i, c) in jac2.coeffs().iter().enumerate() {
                let term =
                    &(&l2.scale(&rat_int(2)) - &d2).pow(i as u32) * &d2.pow((a2 - i) as u32);
                f2 = &f2 + &term.scale(c);
            }
            if !p.bary_eq(&(&f1 * &f2)) {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("ell=2 alpha=({a1},{a2})"),
                );
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

/// `int (1-x)(1+x) (P_nu^{(1,1)})^2 = 1/gamma_nu` for `nu <= nu_max`.
pub fn check_gamma_normalization(nu_max: usize) -> Check {
    let name = "gamma_normalization";
    for nu in 0..=nu_max {
        let p = jacobi_poly(JacobiParams::new(nu, 1, 1));
        let got = weighted_integral_sym(&p.mul(&p), 1, 1);
        let want = crate::dofs::gamma_nu(nu).recip();
        if got != want {
            return Check::fail(
                name,
                CheckParams::default(),
                format!("nu={nu}: integral {} != {}", render(&got), render(&want)),
            );
        }
    }
    Check::pass(name, CheckParams::default())
}

/// The facet-moment reduction: integrating the monomial
/// `prod_{j>=2} x_j^{a_j}` over the trailing facet variables yields
/// `c x_1^{a_1} (1-x_1)^{d-2+|a'|}` with `c = a'!/(d-2+|a'|)!`.
pub fn check_g_moment_identity(d_max: usize, deg_max: usize) -> Check {
    let name = "g_moment_identity";
    for d in 2..=d_max {
        let m = d - 1; // facet coordinates x_1..x_{d-1}
        for alpha in multi_indices(m, deg_max) {
            let mut mono = MultiPoly::one(m);
            for (j, &a) in alpha.iter().enumerate() {
                for _ in 0..a {
                    mono = &mono * &MultiPoly::var(m, j);
                }
            }
            let got = integrate_out_trailing(&mono, 1);
            let tail: usize = alpha[1..].iter().sum();
            let mut cnum = Rational::one();
            for &a in &alpha[1..] {
                cnum *= Rational::from_integer(factorial(a));
            }
            let c = cnum / Rational::from_integer(factorial(d - 2 + tail));
            let x1 = MultiPoly::var(m, 0);
            let one = MultiPoly::one(m);
            let expect =
                (&x1.pow(alpha[0] as u32) * &(&one - &x1).pow((d - 2 + tail) as u32)).scale(&c);
            if got != expect {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("d={d} alpha={alpha:?}"),
                );
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

fn q_matrix(d: usize, s: i64) -> Matrix {
    Matrix::from_fn(d, d, |i, j| if i == j { rat_int(-s) } else { rat_int(1) })
}

fn r_matrix(d: usize, s: i64) -> Matrix {
    Matrix::from_fn(d, d, |i, j| {
        if i > 0 && i == j {
            rat_int(-s)
        } else {
            rat_int(1)
        }
    })
}

fn int_pow(base: Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= &base;
    }
    acc
}

/// `det Q_d(s) = (-1)^{d+1} (1+s)^{d-1} (d-1-s)` on the integer grid
/// `s in [-2, d]`.
pub fn check_det_q(d_max: usize) -> Check {
    let name = "det_q_closed_form";
    for d in 2..=d_max {
        for s in -2..=d as i64 {
            let got = det(&q_matrix(d, s));
            let want =
                sign_pow(d + 1) * int_pow(rat_int(1 + s), d - 1) * rat_int(d as i64 - 1 - s);
            if got != want {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("d={d} s={s}: det {} != {}", render(&got), render(&want)),
                );
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

/// `det R_d(s) = (-1-s)^{d-1}` on the same grid.
pub fn check_det_r(d_max: usize) -> Check {
    let name = "det_r_closed_form";
    for d in 2..=d_max {
        for s in -2..=d as i64 {
            let got = det(&r_matrix(d, s));
            let want = int_pow(rat_int(-1 - s), d - 1);
            if got != want {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("d={d} s={s}: det {} != {}", render(&got), render(&want)),
                );
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

/// The regularity statement `det Q_{d+1}(d-1) = (-d)^d != 0`.
pub fn check_det_q_regular(d_max: usize) -> Check {
    let name = "det_q_regular";
    for d in 2..=d_max {
        let got = det(&q_matrix(d + 1, d as i64 - 1));
        let want = int_pow(rat_int(-(d as i64)), d);
        if got != want || got.is_zero() {
            return Check::fail(
                name,
                CheckParams::default(),
                format!("d={d}: det {} != {}", render(&got), render(&want)),
            );
        }
    }
    Check::pass(name, CheckParams::default())
}

/// The sign/vanishing facts about `rho_k`:
/// `d-1+(-1)^k rho_k = 0 iff (k=1 or (d=2 and k odd))`,
/// `d+(-1)^k rho_k != 0`, and `rho_k = 1 iff d = 2`.
pub fn check_technical_identities(d_max: usize, k_max: usize) -> Check {
    let name = "technical_identities";
    for d in 2..=d_max {
        for k in 1..=k_max {
            let r = rho(k, d);
            let s = sign_pow(k);
            let a = rat_int(d as i64 - 1) + s.clone() * r.clone();
            let a_zero_expected = k == 1 || (d == 2 && k % 2 == 1);
            if a.is_zero() != a_zero_expected {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("(a) d={d} k={k}: d-1+(-1)^k rho_k = {}", render(&a)),
                );
            }
            let b = rat_int(d as i64) + s * r.clone();
            if b.is_zero() {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("(b) d={d} k={k}: d+(-1)^k rho_k = 0"),
                );
            }
            if (r == Rational::one()) != (d == 2) {
                return Check::fail(
                    name,
                    CheckParams::default(),
                    format!("(c) d={d} k={k}: rho_k = {}", render(&r)),
                );
            }
        }
    }
    Check::pass(name, CheckParams::default())
}

// ---------------------------------------------------------------------------
// mesh-dependent checks
// ---------------------------------------------------------------------------

/// Monomial spanning set for `P_{k-1}(F)` on a facet: all barycentric
/// monomials of total degree `<= k - 1` (redundant but spanning, which is
/// harmless for zero tests).
fn facet_monomials(d: usize, k: usize) -> Vec<MultiPoly> {
    multi_indices(d, k.saturating_sub(1))
        .into_iter()
        .map(|beta| {
            let mut m = MultiPoly::one(d);
            for (i, &b) in beta.iter().enumerate() {
                for _ in 0..b {
                    m = &m * &MultiPoly::var(d, i);
                }
            }
            m
        })
        .collect()
}

/// Engine behind the moment checks: first offending (facet, monomial)
/// moment of the jumps of `v`, and of its boundary traces when `zero_bc`.
fn moment_witness(
    cx: &SimplicialComplex,
    k: usize,
    v: &FeFunction,
    label: &str,
    zero_bc: bool,
) -> Option<String> {
    let d = cx.dim();
    let monomials = facet_monomials(d, k);
    for facet in cx.facets() {
        let relevant = facet.patch.iter().any(|kk| v.part_ref(*kk).is_some());
        if !relevant {
            continue;
        }
        if facet.on_boundary {
            if !zero_bc {
                continue;
            }
            let tr = v.trace(cx, facet.patch[0], d - 1, facet.id);
            for (bi, q) in monomials.iter().enumerate() {
                let m = integral_normalized(&(&tr * q));
                if !m.is_zero() {
                    return Some(format!(
                        "{label}: boundary facet {} monomial #{bi}: moment {}",
                        facet.id,
                        render(&m)
                    ));
                }
            }
        } else {
            let jump = v.jump(cx, facet.id).expect("interior facet");
            if jump.is_zero() {
                continue;
            }
            for (bi, q) in monomials.iter().enumerate() {
                let m = integral_normalized(&(&jump * q));
                if !m.is_zero() {
                    return Some(format!(
                        "{label}: interior facet {} monomial #{bi}: jump moment {}",
                        facet.id,
                        render(&m)
                    ));
                }
            }
        }
    }
    None
}

/// Every assembled basis member satisfies the maximal-space moment
/// conditions: interior jump moments of degree `<= k-1` vanish, and (zero
/// boundary conditions) boundary traces are orthogonal to `P_{k-1}(F)`.
pub fn check_moment_conditions(cx: &SimplicialComplex, mesh: &str, k: usize, bc: Bc) -> Check {
    let name = "moment_conditions";
    let params = params_dkb(mesh, cx.dim(), k, bc);
    let basis = match build_basis(cx, k, bc) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("basis construction failed: {e}")),
    };
    for (tag, f) in &basis.entries {
        if let Some(w) = moment_witness(cx, k, f, &tag.render(), bc == Bc::Zero) {
            return Check::fail(name, params, w);
        }
    }
    Check::pass(name, params)
}

/// Lemma-level facet conditions of the shifted Jacobi polynomial: trace 1 on
/// the facet opposite the vertex, vanishing moments on the other facets.
pub fn check_orthofacetprop(cx: &SimplicialComplex, mesh: &str, k: usize) -> (Check, Check) {
    let d = cx.dim();
    let params = params_dk(mesh, d, k);
    let shifted = jacobi_shifted(k, d);
    let monomials = facet_monomials(d, k);
    let mut witness_a: Option<String> = None;
    let mut witness_b: Option<String> = None;
    'outer: for kk in 0..cx.mesh().num_simplices() {
        for &z in cx.mesh().simplex(kk) {
            let pos = cx.vertex_position(kk, z).unwrap();
            let jac = shifted.compose_multi(&MultiPoly::var(d + 1, pos));
            let f = FeFunction::from_parts(d, [(kk, jac)]);
            for &facet_id in &cx.faces_of_simplex(kk, d - 1) {
                let opposite = cx.opposite_vertex(kk, facet_id) == z;
                let tr = f.trace(cx, kk, d - 1, facet_id);
                if opposite {
                    if !tr.bary_eq(&MultiPoly::one(d)) && witness_a.is_none() {
                        witness_a =
                            Some(format!("K={kk} z={z}: trace on opposite facet is not 1"));
                    }
                } else {
                    for (bi, q) in monomials.iter().enumerate() {
                        let m = integral_normalized(&(&tr * q));
                        if !m.is_zero() {
                            witness_b = Some(format!(
                                "K={kk} z={z} facet={facet_id} monomial #{bi}: moment {}",
                                render(&m)
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    (
        Check::from_witness("orthofacetprop_a", params.clone(), witness_a),
        Check::from_witness("orthofacetprop_b", params, witness_b),
    )
}

/// Vertex-value formulas of the non-conforming functions.
pub fn check_vertex_values(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "vertex_values";
    let d = cx.dim();
    let params = params_dk(mesh, d, k);
    let simplex_want = (rat_int(d as i64 - 1) + sign_pow(k) * rho(k, d)) / rat_int(d as i64);
    for kk in 0..cx.mesh().num_simplices() {
        let f = nc_simplex_fn(cx, k, kk);
        for &z in cx.mesh().simplex(kk) {
            let got = f.vertex_value(cx, kk, z);
            if got != simplex_want {
                return Check::fail(
                    name,
                    params,
                    format!(
                        "B^CR,K: K={kk} z={z}: value {} != {}",
                        render(&got),
                        render(&simplex_want)
                    ),
                );
            }
        }
    }
    let facet_base = (rat_int(1) + sign_pow(k + 1) * rho(k, d)) / rat_int(d as i64);
    for facet in cx.facets() {
        let f = nc_facet_fn(cx, k, facet.id);
        for &kk in &facet.patch {
            for &z in cx.mesh().simplex(kk) {
                let got = f.vertex_value(cx, kk, z);
                let want = if facet.vertices.contains(&z) {
                    facet_base.clone()
                } else {
                    facet_base.clone() * rat_int(1 - d as i64)
                };
                if got != want {
                    return Check::fail(
                        name,
                        params,
                        format!(
                            "B^CR,F: F={} K={kk} z={z}: value {} != {}",
                            facet.id,
                            render(&got),
                            render(&want)
                        ),
                    );
                }
            }
        }
    }
    Check::pass(name, params)
}

/// Order-one closed forms: `B_1^{CR,K} = 0` and
/// `B_1^{CR,F}|_K = 1 - d lambda_{K,F}`.
pub fn check_bk1_identities(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "bk1_identities";
    let d = cx.dim();
    let params = params_dk(mesh, d, 1);
    for kk in 0..cx.mesh().num_simplices() {
        if !nc_simplex_fn(cx, 1, kk).is_zero() {
            return Check::fail(name, params, format!("B_1^CR,K nonzero on K={kk}"));
        }
    }
    for facet in cx.facets() {
        let f = nc_facet_fn(cx, 1, facet.id);
        for &kk in &facet.patch {
            let opp = cx.opposite_vertex(kk, facet.id);
            let pos = cx.vertex_position(kk, opp).unwrap();
            let expect =
                &MultiPoly::one(d + 1) - &MultiPoly::var(d + 1, pos).scale(&rat_int(d as i64));
            if !f.part(kk).bary_eq(&expect) {
                return Check::fail(
                    name,
                    params,
                    format!("B_1^CR,F: F={} K={kk} != 1 - d lambda", facet.id),
                );
            }
        }
    }
    Check::pass(name, params)
}

/// Exact Gram rank of the assembled basis equals the dimension formula.
pub fn check_direct_sum_rank(cx: &SimplicialComplex, mesh: &str, k: usize, bc: Bc) -> Check {
    let name = "direct_sum_rank";
    let params = params_dkb(mesh, cx.dim(), k, bc);
    let basis = match build_basis(cx, k, bc) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("basis construction failed: {e}")),
    };
    let expected = dim_formula(cx, k, bc);
    if basis.len() != expected {
        return Check::fail(
            name,
            params,
            format!("basis count {} != formula {expected}", basis.len()),
        );
    }
    if expected == 0 {
        return Check::pass(name, params);
    }
    let funcs: Vec<&FeFunction> = basis.functions().collect();
    let g = gram_matrix(cx, &funcs);
    let lb = rank_lower_bound_modp(&g);
    let rank = if lb == expected { lb } else { rank_exact(&g) };
    if rank != expected {
        return Check::fail(
            name,
            params,
            format!("Gram rank {rank} != expected dimension {expected}"),
        );
    }
    Check::pass(name, params)
}

/// Even order: stacking the full conforming family with *all* simplex
/// functions yields rank deficit exactly one, with kernel the `Psi_k`
/// relation (verified by exact function arithmetic).
pub fn check_even_k_dependency(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "even_k_dependency";
    let params = params_dkb(mesh, cx.dim(), k, Bc::Full);
    if k % 2 != 0 {
        return Check::skipped(name, params, String::from("only defined for even k"));
    }
    let basis = match build_basis(cx, k, Bc::Full) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("basis construction failed: {e}")),
    };
    let mut funcs: Vec<FeFunction> = Vec::new();
    for (tag, f) in &basis.entries {
        if !matches!(tag, BasisTag::NcSimplex(_)) {
            funcs.push(f.clone());
        }
    }
    let conforming_count = funcs.len();
    for kk in 0..cx.mesh().num_simplices() {
        funcs.push(nc_simplex_fn(cx, k, kk));
    }
    let n = funcs.len();
    let refs: Vec<&FeFunction> = funcs.iter().collect();
    let g = gram_matrix(cx, &refs);
    // kernel: Psi_k = sum_K B_k^{CR,K} lies in S_k; exhibit its conforming
    // expansion and check the combination rebuilds Psi_k exactly
    let psi = match psi_big(cx, k) {
        Ok(p) => p,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    let (coeffs, residual) = match expand_conforming(cx, k, &psi, 0) {
        Ok(r) => r,
        Err(e) => return Check::fail(name, params, format!("expansion failed: {e}")),
    };
    if !residual.is_zero() {
        return Check::fail(
            name,
            params,
            String::from("Psi_k is not in the conforming span (nonzero residual)"),
        );
    }
    let mut rebuilt = FeFunction::zero(cx.dim());
    for (tag, c) in &coeffs {
        let f = match tag {
            BasisTag::Vertex(z) => hat_function(cx, *z),
            BasisTag::Face { ell, face, alpha } => {
                match conforming_face_fn(cx, k, *ell, *face, alpha) {
                    Ok(f) => f,
                    Err(e) => return Check::fail(name, params, format!("{e}")),
                }
            }
            _ => return Check::fail(name, params, String::from("unexpected expansion tag")),
        };
        rebuilt = rebuilt.add(&f.scale(c));
    }
    if !rebuilt.fe_eq(&psi) {
        return Check::fail(
            name,
            params,
            String::from("conforming expansion does not rebuild Psi_k"),
        );
    }
    // rank must be exactly n - 1: the kernel vector gives <= n - 1, the
    // modular bound (or exact elimination) gives >= n - 1
    let lb = rank_lower_bound_modp(&g);
    let rank_ge = if lb >= n - 1 { lb } else { rank_exact(&g) };
    if rank_ge < n - 1 {
        return Check::fail(
            name,
            params,
            format!("overcomplete Gram rank {rank_ge} < n-1 = {}", n - 1),
        );
    }
    if rank_ge > n - 1 {
        return Check::fail(
            name,
            params,
            format!(
                "overcomplete Gram has full rank {rank_ge}; expected deficit 1 (n = {n}, conforming = {conforming_count})"
            ),
        );
    }
    Check::pass(name, params)
}

/// The biduality Gram of the assembled degrees of freedom against the basis
/// is exactly the identity.
pub fn check_biduality_general(cx: &SimplicialComplex, mesh: &str, k: usize, bc: Bc) -> Check {
    let name = "biduality_general";
    let params = params_dkb(mesh, cx.dim(), k, bc);
    if k % 2 == 0 {
        return Check::skipped(name, params, String::from("degrees of freedom need odd k"));
    }
    let basis = match build_basis(cx, k, bc) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("basis construction failed: {e}")),
    };
    let mark = make_mark(cx, MarkPolicy::SmallestId);
    let dofs = match assemble_dofs(cx, &basis, &mark) {
        Ok(d) => d,
        Err(Error::SingleSimplexMesh) => {
            return Check::skipped(
                name,
                params,
                String::from("boundary dofs need more than one simplex"),
            )
        }
        Err(e) => return Check::fail(name, params, format!("dof assembly failed: {e}")),
    };
    let g = dofs.gram_against(cx, &basis);
    match g.identity_defect() {
        None => Check::pass(name, params),
        Some((i, j, v)) => Check::fail(
            name,
            params,
            format!(
                "J[{i}]({}) = {} (dual tag {})",
                basis.entries[j].0.render(),
                render(&v),
                dofs.functionals[i].tag.render()
            ),
        ),
    }
}

/// 2-D edge functionals against the edge basis: Kronecker across all edge
/// pairs, plus the "annihilates interior bubbles" half of the statement.
pub fn check_biduality_edges_2d(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "biduality_edges_2d";
    let params = params_dk(mesh, 2, k);
    if cx.dim() != 2 || k % 2 == 0 {
        return Check::skipped(name, params, String::from("needs d = 2 and odd k"));
    }
    let edges: Vec<usize> = cx.faces(1).iter().map(|f| f.id).collect();
    for &e in &edges {
        let dofs = match edge_dofs_2d(cx, k, e) {
            Ok(d) => d,
            Err(err) => return Check::fail(name, params, format!("{err}")),
        };
        for &ep in &edges {
            let funcs = match edge_basis_2d(cx, k, ep) {
                Ok(fs) => fs,
                Err(err) => return Check::fail(name, params, format!("{err}")),
            };
            for (nu, j_fn) in dofs.iter().enumerate() {
                for (mu, b) in funcs.iter().enumerate() {
                    let got = j_fn.eval(cx, b);
                    let want = if e == ep && nu == mu {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    if got != want {
                        return Check::fail(
                            name,
                            params,
                            format!("J_{nu}^{e}(B_{mu}^{ep}) = {}", render(&got)),
                        );
                    }
                }
            }
        }
    }
    // annihilation of the interior bubble space
    if k >= 3 {
        for kk in 0..cx.mesh().num_simplices() {
            let cell = cx.face_id(2, cx.mesh().simplex(kk)).expect("cell face");
            for alpha in multi_indices(2, k - 3) {
                let bubble = match conforming_face_fn(cx, k, 2, cell, &alpha) {
                    Ok(b) => b,
                    Err(err) => return Check::fail(name, params, format!("{err}")),
                };
                for &e in &edges {
                    let dofs = edge_dofs_2d(cx, k, e).expect("checked above");
                    for (nu, j_fn) in dofs.iter().enumerate() {
                        let got = j_fn.eval(cx, &bubble);
                        if !got.is_zero() {
                            return Check::fail(
                                name,
                                params,
                                format!(
                                    "J_{nu}^{e}(W_K P_{alpha:?}) = {} on K={kk}",
                                    render(&got)
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    Check::pass(name, params)
}

/// Order-one facet means against the facet functions, any dimension.
pub fn check_biduality_facet_means(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "biduality_facet_means_k1";
    let params = params_dk(mesh, cx.dim(), 1);
    let facets: Vec<usize> = cx.facets().iter().map(|f| f.id).collect();
    for &f in &facets {
        let j0 = facet_mean_dof_k1(cx, f);
        for &fp in &facets {
            let b = nc_facet_fn(cx, 1, fp);
            let got = j0.eval(cx, &b);
            let want = if f == fp {
                Rational::one()
            } else {
                Rational::zero()
            };
            if got != want {
                return Check::fail(
                    name,
                    params,
                    format!("J_0^{f}(B_1^CR,{fp}) = {}", render(&got)),
                );
            }
        }
    }
    Check::pass(name, params)
}

/// Restricted traces on boundary facets are linearly independent in
/// `L^2(F)` whenever the adjacent simplex has a non-boundary facet.
pub fn check_restricted_trace_independence(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "restricted_trace_independence";
    let d = cx.dim();
    let params = params_dk(mesh, d, k);
    if k % 2 == 0 {
        return Check::skipped(name, params, String::from("stated for odd k"));
    }
    let mut tested = false;
    for facet in cx.facets() {
        if !facet.on_boundary {
            continue;
        }
        let side = facet.patch[0];
        let facets_of_k = cx.faces_of_simplex(side, d - 1);
        let boundary_facets: Vec<usize> = facets_of_k
            .iter()
            .copied()
            .filter(|&f| cx.face(d - 1, f).on_boundary)
            .collect();
        if boundary_facets.len() == facets_of_k.len() {
            continue; // precondition |F•(K)| < |F(K)| violated for this K
        }
        tested = true;
        let conf_tags = facet_conforming_tags(cx, k, facet.id);
        let mut traces: Vec<MultiPoly> = Vec::new();
        for tag in &conf_tags {
            let BasisTag::Face { ell, face, alpha } = tag else {
                unreachable!()
            };
            let f = match conforming_face_fn(cx, k, *ell, *face, alpha) {
                Ok(f) => f,
                Err(e) => return Check::fail(name, params, format!("{e}")),
            };
            traces.push(f.trace(cx, side, d - 1, facet.id));
        }
        for &fp in &boundary_facets {
            traces.push(nc_facet_fn(cx, k, fp).trace(cx, side, d - 1, facet.id));
        }
        let n = traces.len();
        let g = Matrix::from_fn(n, n, |i, j| l2_normalized(&traces[i], &traces[j]));
        let rank = rank_exact(&g);
        if rank != n {
            return Check::fail(
                name,
                params,
                format!("facet {}: trace Gram rank {rank} < {n}", facet.id),
            );
        }
    }
    if !tested {
        return Check::skipped(
            name,
            params,
            String::from("precondition |F•(K)| < |F(K)| violated on every boundary facet"),
        );
    }
    Check::pass(name, params)
}

/// `psi_k^z`: support inside the vertex patch, zero interior jumps, and the
/// Kronecker vertex values `(1 + (-1)^{k+1} rho_k) delta_{y,z}`.
pub fn check_psi_z(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "psi_z_properties";
    let d = cx.dim();
    let params = params_dk(mesh, d, k);
    let scale = rat_int(1) + sign_pow(k + 1) * rho(k, d);
    for vface in cx.faces(0) {
        let z = vface.vertices[0];
        let psi = psi_z(cx, k, z);
        for kk in psi.support() {
            if !vface.patch.contains(&kk) {
                return Check::fail(
                    name,
                    params,
                    format!("psi^{z}: support leaks to simplex {kk}"),
                );
            }
        }
        for facet in cx.facets() {
            if facet.on_boundary {
                continue;
            }
            let j = psi.jump(cx, facet.id).expect("interior");
            if !j.canonical_bary().is_zero() {
                return Check::fail(
                    name,
                    params,
                    format!("psi^{z}: nonzero jump across facet {}", facet.id),
                );
            }
        }
        for yface in cx.faces(0) {
            let y = yface.vertices[0];
            for &kk in &yface.patch {
                let got = psi.vertex_value(cx, kk, y);
                let want = if y == z { scale.clone() } else { Rational::zero() };
                if got != want {
                    return Check::fail(
                        name,
                        params,
                        format!("psi^{z}({y}) = {} != {}", render(&got), render(&want)),
                    );
                }
            }
        }
    }
    Check::pass(name, params)
}

/// `Psi_k` (even orders) has identically vanishing interior jumps.
pub fn check_psi_big(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "psi_big_continuity";
    let params = params_dk(mesh, cx.dim(), k);
    if k % 2 != 0 {
        return Check::skipped(name, params, String::from("Psi_k needs even k"));
    }
    let psi = match psi_big(cx, k) {
        Ok(p) => p,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    for facet in cx.facets() {
        if facet.on_boundary {
            continue;
        }
        let j = psi.jump(cx, facet.id).expect("interior");
        if !j.canonical_bary().is_zero() {
            return Check::fail(
                name,
                params,
                format!("nonzero jump across facet {}", facet.id),
            );
        }
    }
    Check::pass(name, params)
}

/// Interpolation is the identity on the assembled space: every basis member
/// reproduces with a unit coefficient vector, a deterministic combination
/// round-trips idempotently, and zero-trace inputs have vanishing
/// boundary-family coefficients.
pub fn check_interp_projection(cx: &SimplicialComplex, mesh: &str, k: usize, bc: Bc) -> Check {
    let name = "interp_projection";
    let params = params_dkb(mesh, cx.dim(), k, bc);
    if k % 2 == 0 {
        return Check::skipped(name, params, String::from("degrees of freedom need odd k"));
    }
    let basis = match build_basis(cx, k, bc) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("basis construction failed: {e}")),
    };
    let mark = make_mark(cx, MarkPolicy::SmallestId);
    let dofs = match assemble_dofs(cx, &basis, &mark) {
        Ok(d) => d,
        Err(Error::SingleSimplexMesh) => {
            return Check::skipped(
                name,
                params,
                String::from("boundary dofs need more than one simplex"),
            )
        }
        Err(e) => return Check::fail(name, params, format!("dof assembly failed: {e}")),
    };
    for (i, (tag, b)) in basis.entries.iter().enumerate() {
        let (coeffs, result) = interpolate(cx, &basis, &dofs, b);
        for (j, c) in coeffs.iter().enumerate() {
            let want = if i == j { Rational::one() } else { Rational::zero() };
            if *c != want {
                return Check::fail(
                    name,
                    params,
                    format!("member {}: coefficient {j} = {}", tag.render(), render(c)),
                );
            }
        }
        if !result.fe_eq(b) {
            return Check::fail(
                name,
                params,
                format!("member {} not reproduced", tag.render()),
            );
        }
    }
    // deterministic combination; idempotence
    let combo: Vec<Rational> = (0..basis.len())
        .map(|i| crate::num::rat(((i % 5) as i64) - 2, 1 + (i % 3) as i64))
        .collect();
    let u = basis.combine(&combo);
    let (c1, v1) = interpolate(cx, &basis, &dofs, &u);
    if !v1.fe_eq(&u) || c1 != combo {
        return Check::fail(name, params, String::from("combination not reproduced"));
    }
    let (_, v2) = interpolate(cx, &basis, &dofs, &v1);
    if !v2.fe_eq(&v1) {
        return Check::fail(name, params, String::from("interpolation not idempotent"));
    }
    // zero-trace input into the full-space operator: boundary coefficients
    // must vanish
    if bc == Bc::Full {
        if let Ok(zbasis) = build_basis(cx, k, Bc::Zero) {
            if !zbasis.is_empty() {
                let zcombo: Vec<Rational> = (0..zbasis.len())
                    .map(|i| crate::num::rat(1 + (i % 3) as i64, 2))
                    .collect();
                let zu = zbasis.combine(&zcombo);
                let (coeffs, _) = interpolate(cx, &basis, &dofs, &zu);
                for (j, c) in coeffs.iter().enumerate() {
                    let boundary_tagged = match &basis.entries[j].0 {
                        BasisTag::Face { ell, face, .. } => cx.face(*ell, *face).on_boundary,
                        BasisTag::NcFacet(f) => cx.face(cx.dim() - 1, *f).on_boundary,
                        _ => false,
                    };
                    if boundary_tagged && !c.is_zero() {
                        return Check::fail(
                            name,
                            params,
                            format!(
                                "zero-trace input: boundary coefficient {} = {}",
                                basis.entries[j].0.render(),
                                render(c)
                            ),
                        );
                    }
                }
            }
        }
    }
    Check::pass(name, params)
}

/// The 2-D approximation operator reproduces every zero-bc member exactly.
pub fn check_approx_op_2d(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "approx_op_2d_projection";
    let params = params_dk(mesh, 2, k);
    if cx.dim() != 2 || k % 2 == 0 {
        return Check::skipped(name, params, String::from("needs d = 2 and odd k"));
    }
    let basis = match build_basis(cx, k, Bc::Zero) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    for (tag, b) in &basis.entries {
        match approx_op_2d(cx, k, b, Bc::Zero) {
            Ok(out) => {
                if !out.fe_eq(b) {
                    return Check::fail(
                        name,
                        params,
                        format!("member {} not reproduced", tag.render()),
                    );
                }
            }
            Err(e) => return Check::fail(name, params, format!("{e}")),
        }
    }
    Check::pass(name, params)
}

/// Containment `S_k subset CR_k`: every hat function is exactly
/// representable in the full basis (via `psi_k^z` for odd `k`), and the
/// constant 1 re-expands exactly.
pub fn check_containment(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "containment_s_in_cr";
    let d = cx.dim();
    let params = params_dkb(mesh, d, k, Bc::Full);
    let one = FeFunction::from_parts(
        d,
        (0..cx.mesh().num_simplices()).map(|kk| (kk, MultiPoly::one(d + 1))),
    );
    if k % 2 == 0 {
        // hats are basis members; expand the constant hierarchically
        let (coeffs, residual) = match expand_conforming(cx, k, &one, 0) {
            Ok(r) => r,
            Err(e) => return Check::fail(name, params, format!("{e}")),
        };
        if !residual.is_zero() {
            return Check::fail(name, params, String::from("constant 1 has nonzero residual"));
        }
        for (tag, c) in &coeffs {
            match tag {
                BasisTag::Vertex(_) if c.is_one() => {}
                _ => {
                    return Check::fail(
                        name,
                        params,
                        format!("unexpected coefficient at {}", tag.render()),
                    )
                }
            }
        }
        return Check::pass(name, params);
    }
    // odd k: hat_z = psi_k^z / (1 + rho_k) + conforming remainder
    let scale = rat_int(1) + rho(k, d);
    for vface in cx.faces(0) {
        let z = vface.vertices[0];
        let hat = hat_function(cx, z);
        let tilde = psi_z(cx, k, z).scale(&scale.clone().recip());
        let remainder = hat.sub(&tilde);
        let (_, residual) = match expand_conforming(cx, k, &remainder, 1) {
            Ok(r) => r,
            Err(e) => return Check::fail(name, params, format!("{e}")),
        };
        if !residual.is_zero() {
            return Check::fail(
                name,
                params,
                format!("hat function of vertex {z} is not in the assembled space"),
            );
        }
    }
    // constant 1 = sum_z hat_z: facet coefficients d/(1+rho_k), remainder
    // conforming
    let mut work = one;
    for facet in cx.facets() {
        let c = rat_int(d as i64) / scale.clone();
        work = work.sub(&nc_facet_fn(cx, k, facet.id).scale(&c));
    }
    let (_, residual) = match expand_conforming(cx, k, &work, 1) {
        Ok(r) => r,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    if !residual.is_zero() {
        return Check::fail(
            name,
            params,
            String::from("constant 1 is not exactly representable"),
        );
    }
    Check::pass(name, params)
}

/// Mark-assignment containment invariants under both policies.
pub fn check_mark_invariants(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "mark_invariants";
    let d = cx.dim();
    let params = CheckParams {
        mesh: Some(mesh.to_string()),
        d: Some(d),
        ..Default::default()
    };
    for policy in [MarkPolicy::SmallestId, MarkPolicy::LargestId] {
        let mark = make_mark(cx, policy);
        for ell in 0..=d {
            for face in cx.faces(ell) {
                match mark.get(ell, face.id) {
                    MarkTarget::Simplex(s) => {
                        if face.on_boundary || !face.patch.contains(&s) {
                            return Check::fail(
                                name,
                                params,
                                format!("face ({ell},{}) marked to simplex {s}", face.id),
                            );
                        }
                    }
                    MarkTarget::BoundaryFacet(bf) => {
                        let bface = cx.face(d - 1, bf);
                        if !face.on_boundary
                            || !bface.on_boundary
                            || !face.vertices.iter().all(|v| bface.vertices.contains(v))
                        {
                            return Check::fail(
                                name,
                                params,
                                format!("face ({ell},{}) marked to facet {bf}", face.id),
                            );
                        }
                    }
                }
            }
        }
    }
    Check::pass(name, params)
}

/// Facet-carried functionals are well defined on the assembled zero-bc
/// space: the two one-sided evaluations agree on every member, and weights
/// stay within degree `k - 1`.
pub fn check_facet_well_definedness(cx: &SimplicialComplex, mesh: &str, k: usize) -> Check {
    let name = "facet_well_definedness";
    let d = cx.dim();
    let params = params_dk(mesh, d, k);
    let basis = match build_basis(cx, k, Bc::Zero) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    let mut functionals: Vec<crate::dofs::Functional> = Vec::new();
    if k == 1 {
        for facet in cx.facets() {
            if !facet.on_boundary {
                functionals.push(facet_mean_dof_k1(cx, facet.id));
            }
        }
    }
    if d == 2 && k % 2 == 1 {
        for edge in cx.faces(1) {
            if !edge.on_boundary {
                match edge_dofs_2d(cx, k, edge.id) {
                    Ok(mut dofs) => functionals.append(&mut dofs),
                    Err(e) => return Check::fail(name, params, format!("{e}")),
                }
            }
        }
    }
    if functionals.is_empty() {
        return Check::skipped(
            name,
            params,
            String::from("no facet-carried functionals for this (d, k)"),
        );
    }
    for j_fn in &functionals {
        if j_fn.weight_degree() + 1 > k {
            return Check::fail(
                name,
                params,
                format!(
                    "functional {} weight degree {} > k - 1",
                    j_fn.tag.render(),
                    j_fn.weight_degree()
                ),
            );
        }
        for (tag, b) in &basis.entries {
            let a = j_fn.eval(cx, b);
            if let Some(other) = j_fn.eval_other_side(cx, b) {
                if a != other {
                    return Check::fail(
                        name,
                        params,
                        format!(
                            "functional {} on member {}: sides {} vs {}",
                            j_fn.tag.render(),
                            tag.render(),
                            render(&a),
                            render(&other)
                        ),
                    );
                }
            }
        }
    }
    Check::pass(name, params)
}

// ---------------------------------------------------------------------------
// negative controls
// ---------------------------------------------------------------------------

/// A one-sided constant fixture whose jump has a nonzero mean; the moment
/// machinery must fail on it with a witness.
pub fn negcontrol_moment_conditions(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "moment_conditions_negcontrol";
    let params = params_dk(mesh, cx.dim(), 1);
    let d = cx.dim();
    let Some(facet) = cx.facets().iter().find(|f| !f.on_boundary) else {
        return Check::skipped(name, params, String::from("mesh has no interior facet"));
    };
    let k0 = facet.patch[0];
    let bad = FeFunction::from_parts(d, [(k0, MultiPoly::one(d + 1))]);
    match moment_witness(cx, 1, &bad, "one-sided constant", false) {
        Some(w) => Check::fail(name, params, w),
        None => Check::pass(name, params), // a pass here means the detector is broken
    }
}

/// A perturbed non-conforming function must violate the vertex-value
/// formulas.
pub fn negcontrol_vertex_values(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "vertex_values_negcontrol";
    let d = cx.dim();
    let params = params_dk(mesh, d, 2);
    let k = 2;
    let f = nc_simplex_fn(cx, k, 0).add(&hat_function(cx, cx.mesh().simplex(0)[0]));
    let want = (rat_int(d as i64 - 1) + sign_pow(k) * rho(k, d)) / rat_int(d as i64);
    for &z in cx.mesh().simplex(0) {
        let got = f.vertex_value(cx, 0, z);
        if got != want {
            return Check::fail(
                name,
                params,
                format!("perturbed value {} != {}", render(&got), render(&want)),
            );
        }
    }
    Check::pass(name, params)
}

/// A sign error in the closed form must be caught.
pub fn negcontrol_det() -> Check {
    let name = "det_negcontrol";
    let params = CheckParams::default();
    let d = 3usize;
    let s = 1i64;
    let got = det(&q_matrix(d, s));
    let wrong =
        -(sign_pow(d + 1) * int_pow(rat_int(1 + s), d - 1) * rat_int(d as i64 - 1 - s));
    if got != wrong {
        return Check::fail(
            name,
            params,
            format!(
                "det Q_3(1) = {} differs from sign-flipped closed form {}",
                render(&got),
                render(&wrong)
            ),
        );
    }
    Check::pass(name, params)
}

/// A perturbed Jacobi polynomial must fail the orthogonality test.
pub fn negcontrol_jacobi() -> Check {
    let name = "jacobi_negcontrol";
    let params = CheckParams::default();
    let p = jacobi_poly(JacobiParams::new(3, 1, 1));
    let perturbed = p.add(&crate::poly::UniPoly::constant(crate::num::rat(1, 7)));
    let v = weighted_integral_sym(&perturbed, 1, 1);
    if v.is_zero() {
        return Check::pass(name, params);
    }
    Check::fail(
        name,
        params,
        format!("perturbed P_3^(1,1) has moment {}", render(&v)),
    )
}

/// A duplicated basis member must produce a rank deficit.
pub fn negcontrol_rank(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "direct_sum_negcontrol";
    let params = params_dkb(mesh, cx.dim(), 1, Bc::Full);
    let basis = match build_basis(cx, 1, Bc::Full) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    let mut funcs: Vec<&FeFunction> = basis.functions().collect();
    let first = funcs[0];
    funcs.push(first);
    let g = gram_matrix(cx, &funcs);
    let n = funcs.len();
    let rank = rank_exact(&g);
    if rank == n {
        return Check::pass(name, params);
    }
    Check::fail(name, params, format!("duplicated member: rank {rank} < {n}"))
}

/// A rescaled functional must break the biduality identity.
pub fn negcontrol_biduality(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "biduality_negcontrol";
    let params = params_dkb(mesh, cx.dim(), 1, Bc::Zero);
    let basis = match build_basis(cx, 1, Bc::Zero) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    if basis.is_empty() {
        return Check::skipped(name, params, String::from("empty basis"));
    }
    let mark = make_mark(cx, MarkPolicy::SmallestId);
    let mut dofs = match assemble_dofs(cx, &basis, &mark) {
        Ok(d) => d,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    dofs.functionals[0].scale *= rat_int(2);
    let g = dofs.gram_against(cx, &basis);
    match g.identity_defect() {
        Some((i, j, v)) => Check::fail(
            name,
            params,
            format!("rescaled functional: entry ({i},{j}) = {}", render(&v)),
        ),
        None => Check::pass(name, params),
    }
}

/// Dropping one facet term from `psi_k^z` must break continuity. The
/// dropped term is a facet through `z` other than the interior facet used
/// to pick `z` (that one can be continuous across its own facet), so its
/// one-sided trace unbalances the cancellation.
pub fn negcontrol_psi(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "psi_negcontrol";
    let params = params_dk(mesh, cx.dim(), 3);
    let Some(facet) = cx.facets().iter().find(|f| !f.on_boundary) else {
        return Check::skipped(name, params, String::from("mesh has no interior facet"));
    };
    let z = facet.vertices[0];
    let k = 3;
    let Some(dropped) = cx
        .facets()
        .iter()
        .find(|f| f.id != facet.id && f.vertices.contains(&z))
    else {
        return Check::skipped(name, params, String::from("vertex lies on a single facet"));
    };
    let truncated = psi_z(cx, k, z).sub(&nc_facet_fn(cx, k, dropped.id));
    for f in cx.facets() {
        if f.on_boundary {
            continue;
        }
        let j = truncated.jump(cx, f.id).expect("interior");
        if !j.canonical_bary().is_zero() {
            return Check::fail(
                name,
                params,
                format!("truncated psi^{z}: nonzero jump across facet {}", f.id),
            );
        }
    }
    Check::pass(name, params)
}

/// A corrupted coefficient vector must fail re-expansion equality.
pub fn negcontrol_interp(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "interp_negcontrol";
    let params = params_dkb(mesh, cx.dim(), 1, Bc::Zero);
    let basis = match build_basis(cx, 1, Bc::Zero) {
        Ok(b) => b,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    if basis.is_empty() {
        return Check::skipped(name, params, String::from("empty basis"));
    }
    let mark = make_mark(cx, MarkPolicy::SmallestId);
    let dofs = match assemble_dofs(cx, &basis, &mark) {
        Ok(d) => d,
        Err(e) => return Check::fail(name, params, format!("{e}")),
    };
    let u = basis.entries[0].1.clone();
    let (mut coeffs, _) = interpolate(cx, &basis, &dofs, &u);
    coeffs[0] += rat_int(1);
    let corrupted = basis.combine(&coeffs);
    if corrupted.fe_eq(&u) {
        return Check::pass(name, params);
    }
    Check::fail(
        name,
        params,
        String::from("corrupted coefficients change the function"),
    )
}

/// Duplicating a trace must break restricted-trace independence.
pub fn negcontrol_restricted_trace(cx: &SimplicialComplex, mesh: &str) -> Check {
    let name = "restricted_trace_negcontrol";
    let d = cx.dim();
    let params = params_dk(mesh, d, 1);
    let Some(facet) = cx.facets().iter().find(|f| f.on_boundary) else {
        return Check::skipped(name, params, String::from("no boundary facet"));
    };
    let side = facet.patch[0];
    let tr = nc_facet_fn(cx, 1, facet.id).trace(cx, side, d - 1, facet.id);
    let traces = [tr.clone(), tr];
    let g = Matrix::from_fn(2, 2, |i, j| l2_normalized(&traces[i], &traces[j]));
    let rank = rank_exact(&g);
    if rank == 2 {
        return Check::pass(name, params);
    }
    Check::fail(name, params, format!("duplicated trace: rank {rank} < 2"))
}

// ---------------------------------------------------------------------------
// suite driver
// ---------------------------------------------------------------------------

/// Suite configuration: orders to run and an optional name-prefix filter.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub k_values: Vec<usize>,
    pub filter: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            k_values: alloc::vec![1, 2, 3],
            filter: None,
        }
    }
}

fn selected(name: &str, filter: &Option<String>) -> bool {
    match filter {
        None => !name.ends_with("_negcontrol"),
        Some(f) => {
            if name.ends_with("_negcontrol") && !f.contains("negcontrol") {
                return false;
            }
            name.starts_with(f.as_str())
        }
    }
}

/// Runs the deterministic check suite over one or more meshes.
/// Mesh-independent foundations run once; per-mesh checks run for every
/// requested order. Negative controls run only when the filter mentions
/// them. `elapsed_ms` is left at zero for the caller to fill.
pub fn run_suite(meshes: &[(String, &SimplicialComplex)], cfg: &SuiteConfig) -> Report {
    let mut checks: Vec<Check> = Vec::new();

    let f = &cfg.filter;
    // foundations
    if selected("jacobi_orthogonality", f) {
        checks.push(check_jacobi_orthogonality(8));
    }
    if selected("jacobi_endpoints", f) {
        checks.push(check_jacobi_endpoints(8));
    }
    if selected("orthopoly_orthogonality", f) {
        checks.push(check_orthopoly_orthogonality(3, 4));
    }
    if selected("orthopoly_closed_forms", f) {
        checks.push(check_orthopoly_closed_forms());
    }
    if selected("gamma_normalization", f) {
        checks.push(check_gamma_normalization(5));
    }
    if selected("g_moment_identity", f) {
        checks.push(check_g_moment_identity(4, 3));
    }
    if selected("det_q_closed_form", f) {
        checks.push(check_det_q(8));
    }
    if selected("det_r_closed_form", f) {
        checks.push(check_det_r(8));
    }
    if selected("det_q_regular", f) {
        checks.push(check_det_q_regular(8));
    }
    if selected("technical_identities", f) {
        checks.push(check_technical_identities(8, 10));
    }

    for (mesh_name, cx) in meshes {
        if selected("mark_invariants", f) {
            checks.push(check_mark_invariants(cx, mesh_name));
        }
        if selected("bk1_identities", f) {
            checks.push(check_bk1_identities(cx, mesh_name));
        }
        if selected("biduality_facet_means_k1", f) {
            checks.push(check_biduality_facet_means(cx, mesh_name));
        }
        for &k in &cfg.k_values {
            if selected("orthofacetprop_a", f) || selected("orthofacetprop_b", f) {
                let (a, b) = check_orthofacetprop(cx, mesh_name, k);
                if selected("orthofacetprop_a", f) {
                    checks.push(a);
                }
                if selected("orthofacetprop_b", f) {
                    checks.push(b);
                }
            }
            if selected("vertex_values", f) {
                checks.push(check_vertex_values(cx, mesh_name, k));
            }
            for bc in [Bc::Full, Bc::Zero] {
                if selected("moment_conditions", f) {
                    checks.push(check_moment_conditions(cx, mesh_name, k, bc));
                }
                if selected("direct_sum_rank", f) {
                    checks.push(check_direct_sum_rank(cx, mesh_name, k, bc));
                }
                if k % 2 == 1 && selected("biduality_general", f) {
                    checks.push(check_biduality_general(cx, mesh_name, k, bc));
                }
                if k % 2 == 1 && selected("interp_projection", f) {
                    checks.push(check_interp_projection(cx, mesh_name, k, bc));
                }
            }
            if k % 2 == 0 && selected("even_k_dependency", f) {
                checks.push(check_even_k_dependency(cx, mesh_name, k));
            }
            if cx.dim() == 2 && k % 2 == 1 && selected("biduality_edges_2d", f) {
                checks.push(check_biduality_edges_2d(cx, mesh_name, k));
            }
            if k % 2 == 1 && selected("restricted_trace_independence", f) {
                checks.push(check_restricted_trace_independence(cx, mesh_name, k));
            }
            if selected("psi_z_properties", f) {
                checks.push(check_psi_z(cx, mesh_name, k));
            }
            if k % 2 == 0 && selected("psi_big_continuity", f) {
                checks.push(check_psi_big(cx, mesh_name, k));
            }
            if cx.dim() == 2 && k % 2 == 1 && selected("approx_op_2d_projection", f) {
                checks.push(check_approx_op_2d(cx, mesh_name, k));
            }
            if selected("containment_s_in_cr", f) {
                checks.push(check_containment(cx, mesh_name, k));
            }
            if selected("facet_well_definedness", f) {
                checks.push(check_facet_well_definedness(cx, mesh_name, k));
            }
        }
        // negative controls (selected only by explicit filter)
        if selected("moment_conditions_negcontrol", f) {
            checks.push(negcontrol_moment_conditions(cx, mesh_name));
        }
        if selected("vertex_values_negcontrol", f) {
            checks.push(negcontrol_vertex_values(cx, mesh_name));
        }
        if selected("direct_sum_negcontrol", f) {
            checks.push(negcontrol_rank(cx, mesh_name));
        }
        if selected("biduality_negcontrol", f) {
            checks.push(negcontrol_biduality(cx, mesh_name));
        }
        if selected("psi_negcontrol", f) {
            checks.push(negcontrol_psi(cx, mesh_name));
        }
        if selected("interp_negcontrol", f) {
            checks.push(negcontrol_interp(cx, mesh_name));
        }
        if selected("restricted_trace_negcontrol", f) {
            checks.push(negcontrol_restricted_trace(cx, mesh_name));
        }
    }
    if selected("det_negcontrol", f) {
        checks.push(negcontrol_det());
    }
    if selected("jacobi_negcontrol", f) {
        checks.push(negcontrol_jacobi());
    }

    let mesh_names: Vec<String> = meshes.iter().map(|(n, _)| n.clone()).collect();
    Report {
        version: String::from(env!("CARGO_PKG_VERSION")),
        mesh: mesh_names.join(","),
        checks,
        elapsed_ms: 0,
    }
}
