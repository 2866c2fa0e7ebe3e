//! Binary64 quadrature for the demo interpolation path: Gauss-Legendre
//! nodes mapped onto simplices and facets by the collapsing (Duffy)
//! transform. Never used for verification; exact claims all live in the
//! rational core.

use crspace_core::complex::SimplicialComplex;
use crspace_core::dofs::{Carrier, DofSet};
use num_traits::ToPrimitive;

/// Gauss-Legendre nodes and weights on `[0, 1]`, by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // Chebyshev initial guess on [-1, 1]
        let mut x = -((std::f64::consts::PI * (k as f64 + 0.75)) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrates `f` over the reference `m`-simplex (affine coordinates) with
/// an order-`n` tensor rule collapsed by the Duffy transform.
pub fn integrate_reference_simplex(m: usize, n: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let rule = gauss_legendre_01(n);
    let mut acc = 0.0;
    let mut idx = vec![0usize; m];
    loop {
        let mut x = vec![0.0; m];
        let mut w = 1.0;
        let mut remaining = 1.0;
        for j in 0..m {
            let (u, wu) = rule[idx[j]];
            x[j] = u * remaining;
            w *= wu * remaining;
            remaining -= x[j];
        }
        acc += w * f(&x);
        // odometer
        let mut j = 0;
        loop {
            if j == m {
                return acc;
            }
            idx[j] += 1;
            if idx[j] < rule.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// The spec'd quadrature order for the demo path.
pub fn demo_order(k: usize, d: usize) -> usize {
    (2 * k + d).div_ceil(2) + 1
}

/// Approximate coefficients `J_i(u)` of a callable on the assembled dof set
/// (binary64; demo only).
pub fn callable_coefficients(
    cx: &SimplicialComplex,
    dofs: &DofSet,
    u: &dyn Fn(&[f64]) -> f64,
    order: usize,
) -> Vec<f64> {
    let d = cx.dim();
    dofs.functionals
        .iter()
        .map(|j| match j.carrier {
            Carrier::Simplex(k) => {
                let s = cx.mesh().simplex(k);
                let verts: Vec<Vec<f64>> = s
                    .iter()
                    .map(|&z| {
                        cx.mesh().vertex(z)
                            .iter()
                            .map(|c| c.to_f64().unwrap())
                            .collect()
                    })
                    .collect();
                let vol = cx.mesh().volume(k).to_f64().unwrap();
                let dfact = (1..=d).product::<usize>() as f64;
                let integral = integrate_reference_simplex(d, order, &|x| {
                    let mut lam = vec![1.0 - x.iter().sum::<f64>()];
                    lam.extend_from_slice(x);
                    let mut p = vec![0.0; d];
                    for (i, pi) in p.iter_mut().enumerate() {
                        *pi = lam
                            .iter()
                            .zip(&verts)
                            .map(|(l, v)| l * v[i])
                            .sum();
                    }
                    j.weight.eval_f64(&lam) * u(&p)
                });
                integral * dfact * vol * j.scale.to_f64().unwrap()
            }
            Carrier::Facet { facet, .. } => {
                let face = cx.face(d - 1, facet);
                let verts: Vec<Vec<f64>> = face
                    .vertices
                    .iter()
                    .map(|&z| {
                        cx.mesh().vertex(z)
                            .iter()
                            .map(|c| c.to_f64().unwrap())
                            .collect()
                    })
                    .collect();
                // measure-normalized pairing: (d-1)! * integral over the
                // reference facet
                let m = d - 1;
                let mfact = (1..=m).product::<usize>() as f64;
                let integral = integrate_reference_simplex(m, order, &|x| {
                    let mut lam = vec![1.0 - x.iter().sum::<f64>()];
                    lam.extend_from_slice(x);
                    let mut p = vec![0.0; d];
                    for (i, pi) in p.iter_mut().enumerate() {
                        *pi = lam
                            .iter()
                            .zip(&verts)
                            .map(|(l, v)| l * v[i])
                            .sum();
                    }
                    j.weight.eval_f64(&lam) * u(&p)
                });
                integral * mfact * j.scale.to_f64().unwrap()
            }
        })
        .collect()
}

/// Named demo functions for the quadrature interpolation path.
pub fn demo_function(name: &str, d: usize) -> Option<Box<dyn Fn(&[f64]) -> f64>> {
    match name {
        "sinprod" => Some(Box::new(move |x: &[f64]| {
            x.iter()
                .map(|xi| (std::f64::consts::PI * xi).sin())
                .product()
        })),
        "expsum" => Some(Box::new(move |x: &[f64]| x.iter().sum::<f64>().exp())),
        "radial" => Some(Box::new(move |x: &[f64]| {
            let r2: f64 = x.iter().map(|xi| xi * xi).sum();
            1.0 / (1.0 + r2)
        })),
        _ => {
            let _ = d;
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        // order n integrates degree 2n-1 exactly on [0,1]
        let rule = gauss_legendre_01(4);
        let integral: f64 = rule.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((integral - 1.0 / 8.0).abs() < 1e-13);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn duffy_volume_and_moment() {
        // volume of the reference triangle and int x over it
        let vol = integrate_reference_simplex(2, 5, &|_| 1.0);
        assert!((vol - 0.5).abs() < 1e-13);
        let mx = integrate_reference_simplex(2, 5, &|x| x[0]);
        assert!((mx - 1.0 / 6.0).abs() < 1e-13);
        // 3-simplex volume
        let v3 = integrate_reference_simplex(3, 4, &|_| 1.0);
        assert!((v3 - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn callable_path_matches_exact_on_polynomials() {
        use crspace_core::basis::{build_basis, Bc};
        use crspace_core::dofs::{assemble_dofs, make_mark, MarkPolicy};
        use crspace_core::mesh;
        let cx = SimplicialComplex::build(mesh::two_simplex(2).unwrap());
        let basis = build_basis(&cx, 3, Bc::Full).unwrap();
        let mark = make_mark(&cx, MarkPolicy::SmallestId);
        let dofs = assemble_dofs(&cx, &basis, &mark).unwrap();
        // u(x, y) = x^2 - y/2 as callable vs exact path
        let p = crate::polyparse::parse_poly("x0^2 - 1/2*x1", 2).unwrap();
        let fe = crate::polyparse::global_poly_to_fe(&cx, &p);
        let exact = dofs.evaluate_all(&cx, &fe);
        let approx = callable_coefficients(&cx, &dofs, &|x| p.eval_f64(x), demo_order(3, 2));
        for (e, a) in exact.iter().zip(&approx) {
            let ef = e.to_f64().unwrap();
            assert!((ef - a).abs() < 1e-10, "{ef} vs {a}");
        }
    }
}
