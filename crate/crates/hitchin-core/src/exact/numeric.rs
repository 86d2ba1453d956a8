use super::pmatrix::PolyMatrix;
use crate::error::{Error, Result};
use crate::ExactComplex;
use num_complex::Complex64;

/// Default residual tolerance shared by the numeric oracles.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Simultaneous root iteration (Durand-Kerner) for a complex polynomial given
/// by ascending coefficients. Deterministic: fixed initial configuration and
/// a fixed sweep schedule. Returns the n roots in iteration order.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let monic = to_monic(coeffs);
    let n = monic.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0 + monic.iter().take(n).map(|c| c.norm()).fold(0.0, f64::max);
    let start: Vec<Complex64> = (0..n)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * (j as f64) / (n as f64) + 0.4;
            Complex64::from_polar(0.5 * radius + 0.5, angle)
        })
        .collect();
    kerner_iterate(&monic, start)
}

/// Same iteration warm-started from `init`; used by loop continuation where
/// the previous step's roots are excellent guesses.
pub fn poly_roots_from(coeffs: &[Complex64], init: &[Complex64]) -> Vec<Complex64> {
    let monic = to_monic(coeffs);
    let n = monic.len().saturating_sub(1);
    assert_eq!(init.len(), n, "warm start size mismatch");
    if n == 0 {
        return Vec::new();
    }
    // Split any coincident guesses; the update divides by pairwise gaps.
    let mut start = init.to_vec();
    for j in 0..n {
        for k in 0..j {
            if (start[j] - start[k]).norm() < 1e-12 {
                start[j] += Complex64::new(1e-9 * (j as f64 + 1.0), 1.5e-9);
            }
        }
    }
    kerner_iterate(&monic, start)
}

fn to_monic(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |v| v.norm() == 0.0) {
        c.pop();
    }
    assert!(!c.is_empty(), "zero polynomial has no well-defined roots");
    let lead = *c.last().unwrap();
    for v in c.iter_mut() {
        *v /= lead;
    }
    c
}

fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn kerner_iterate(monic: &[Complex64], mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let n = roots.len();
    const MAX_SWEEPS: usize = 400;
    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for j in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for k in 0..n {
                if k != j {
                    denom *= roots[j] - roots[k];
                }
            }
            if denom.norm() < 1e-300 {
                roots[j] += Complex64::new(1e-8, 2e-8);
                continue;
            }
            let delta = eval(monic, roots[j]) / denom;
            roots[j] -= delta;
            let scale = 1.0 + roots[j].norm();
            max_step = max_step.max(delta.norm() / scale);
        }
        if max_step < 1e-14 {
            break;
        }
    }
    roots
}

/// Numeric spectrum of a polynomial matrix at a sample point: the roots of
/// the exact characteristic polynomial evaluated at `z0`. Residual contract:
/// every root r satisfies `|p(r)| <= tol * (1 + ||M(z0)||_F^n)`.
pub fn eigenvalues_numeric(m: &PolyMatrix, z0: &ExactComplex, tol: f64) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::structure("eigenvalues need a square matrix"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let char_coeffs = m.char_poly();
    let z = z0.to_f64();
    // det(x I - M(z0)) = x^n + c_1(z0) x^{n-1} + ... + c_n(z0),
    // stored ascending for the root iteration.
    let mut poly = vec![Complex64::new(0.0, 0.0); n + 1];
    poly[n] = Complex64::new(1.0, 0.0);
    for (i, c) in char_coeffs.iter().enumerate() {
        poly[n - 1 - i] = c.eval_f64(z);
    }
    let roots = poly_roots(&poly);
    let frob: f64 = m
        .eval_f64(z)
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let bound = tol * (1.0 + frob.powi(n as i32));
    let worst = roots
        .iter()
        .map(|r| eval(&poly, *r).norm())
        .fold(0.0, f64::max);
    if worst > bound {
        return Err(Error::numeric(
            format!("root residual {worst:e} exceeds bound {bound:e}"),
            worst,
        ));
    }
    Ok(roots)
}

/// Multiset comparison of complex values up to a tolerance, by greedy
/// matching. Suitable for eigenvalue correspondence checks.
pub fn multiset_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut unused: Vec<Complex64> = b.to_vec();
    for x in a {
        let best = unused
            .iter()
            .enumerate()
            .min_by(|(_, u), (_, v)| {
                (x - *u).norm().partial_cmp(&(x - *v).norm()).unwrap()
            })
            .map(|(i, u)| (i, (x - u).norm()));
        match best {
            Some((i, d)) if d <= tol => {
                unused.swap_remove(i);
            }
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;

    #[test]
    fn roots_of_factored_cubic() {
        // (z - 1)(z - 2i)(z + 3) expanded.
        let r1 = Complex64::new(1.0, 0.0);
        let r2 = Complex64::new(0.0, 2.0);
        let r3 = Complex64::new(-3.0, 0.0);
        let coeffs = vec![
            r1 * r2 * r3 * Complex64::new(-1.0, 0.0),
            r1 * r2 + r1 * r3 + r2 * r3,
            -(r1 + r2 + r3),
            Complex64::new(1.0, 0.0),
        ];
        let roots = poly_roots(&coeffs);
        assert!(multiset_close(&roots, &[r1, r2, r3], 1e-10));
    }

    #[test]
    fn repeated_root_converges() {
        // (z - 1)^3 = z^3 - 3z^2 + 3z - 1.
        let coeffs = vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(-3.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let roots = poly_roots(&coeffs);
        for r in roots {
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn matrix_eigenvalues_at_sample_point() {
        // [[0, w], [1, 0]] at z0 = 4 with w = z: eigenvalues +-2.
        let mut m = PolyMatrix::zeros(2, 2);
        m.set(0, 1, Poly::identity());
        m.set(1, 0, Poly::one());
        let vals = eigenvalues_numeric(&m, &ExactComplex::from_int(4), DEFAULT_TOL).unwrap();
        assert!(multiset_close(
            &vals,
            &[Complex64::new(2.0, 0.0), Complex64::new(-2.0, 0.0)],
            1e-9
        ));
    }
}
