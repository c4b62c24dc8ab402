#![allow(dead_code)]

//! Shared helpers for the integration suites: fixture loading, random
//! well-conditioned stiffness generation and an eigenvalue oracle that
//! is independent of the library's decomposition path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::Value;
use stiffid::torsor::{Mat3, Mat6};

pub fn fixture(name: &str) -> Value {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read fixture {}: {e}", path.display()));
    serde_json::from_str(&text).expect("fixture parses")
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn mat6_from(v: &Value) -> Mat6 {
    let rows = v.as_array().expect("6x6 array");
    let mut m = Mat6::ZERO;
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.as_array().expect("row").iter().enumerate() {
            m.0[i][j] = cell.as_f64().expect("number");
        }
    }
    m
}

pub fn mat3_from(v: &Value) -> Mat3 {
    let rows = v.as_array().expect("3x3 array");
    let mut m = Mat3::ZERO;
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.as_array().expect("row").iter().enumerate() {
            m.0[i][j] = cell.as_f64().expect("number");
        }
    }
    m
}

pub fn vec3_from(v: &Value) -> [f64; 3] {
    let a = v.as_array().expect("3-vector");
    [
        a[0].as_f64().unwrap(),
        a[1].as_f64().unwrap(),
        a[2].as_f64().unwrap(),
    ]
}

pub fn rel_frobenius(a: &Mat6, b: &Mat6) -> f64 {
    (*a - *b).frobenius_norm() / b.frobenius_norm()
}

/// Random 6x6 orthogonal matrix (Gram-Schmidt over seeded Gaussians).
fn random_orthogonal(rng: &mut ChaCha12Rng) -> Mat6 {
    let mut cols = [[0.0f64; 6]; 6];
    for col in cols.iter_mut() {
        for v in col.iter_mut() {
            // Box-Muller keeps this independent of rand_distr
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            *v = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
    for j in 0..6 {
        for k in 0..j {
            let dot: f64 = (0..6).map(|i| cols[j][i] * cols[k][i]).sum();
            for i in 0..6 {
                cols[j][i] -= dot * cols[k][i];
            }
        }
        let norm: f64 = (0..6).map(|i| cols[j][i] * cols[j][i]).sum::<f64>().sqrt();
        for i in 0..6 {
            cols[j][i] /= norm;
        }
    }
    Mat6::from_columns(&cols)
}

/// Random stiffness with spectral condition number exactly `cond`
/// (singular values log-spaced) and magnitudes in the bench range.
pub fn random_stiffness(seed: u64, cond: f64) -> Mat6 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let u = random_orthogonal(&mut rng);
    let v = random_orthogonal(&mut rng);
    let mut d = Mat6::ZERO;
    for i in 0..6 {
        d.0[i][i] = 1e6 * cond.powf(i as f64 / 5.0);
    }
    u.mul_mat(&d).mul_mat(&v.transpose())
}

/// Characteristic-polynomial eigenvalue oracle, independent of the
/// library path: p(λ) = det(M − λI) is reconstructed by Lagrange
/// interpolation of determinants at four sample points, then its real
/// roots are isolated by sign scanning and polished by bisection.
pub fn char_poly_roots_oracle(m: &Mat3) -> Vec<f64> {
    let scale = m.frobenius_norm().max(1e-300);
    let a = m.scale(1.0 / scale);
    let det_shifted = |lambda: f64| -> f64 {
        let mut s = a;
        for i in 0..3 {
            s.0[i][i] -= lambda;
        }
        s.determinant()
    };
    // cubic through 4 samples: coefficients via divided differences
    let xs = [-2.0, -0.5, 0.5, 2.0];
    let ys: Vec<f64> = xs.iter().map(|&x| det_shifted(x)).collect();
    // Newton's divided-difference form, expanded to monomial coefficients
    let mut dd = ys.clone();
    for order in 1..4 {
        for i in (order..4).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - order]);
        }
    }
    // expand prod terms
    let mut coeffs = [0.0f64; 4]; // c0 + c1 x + c2 x² + c3 x³
    let mut basis = [1.0, 0.0, 0.0, 0.0];
    for (order, &d) in dd.iter().enumerate() {
        for (c, b) in coeffs.iter_mut().zip(basis.iter()) {
            *c += d * b;
        }
        if order < 3 {
            // basis *= (x - xs[order])
            let mut next = [0.0f64; 4];
            for i in 0..3 {
                next[i + 1] += basis[i];
                next[i] -= xs[order] * basis[i];
            }
            next[3] -= 0.0;
            basis = next;
        }
    }
    let p = |x: f64| coeffs[0] + coeffs[1] * x + coeffs[2] * x * x + coeffs[3] * x * x * x;

    // scan for sign changes over a generous bracket
    let mut roots = Vec::new();
    let lo = -4.0;
    let hi = 4.0;
    let n = 400_000;
    let mut prev_x = lo;
    let mut prev_y = p(lo);
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let y = p(x);
        if y == 0.0 {
            roots.push(x);
        } else if prev_y.signum() != y.signum() && prev_y != 0.0 {
            let (mut a, mut b) = (prev_x, x);
            let (mut fa, _) = (prev_y, y);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = p(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa.signum() == fm.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_y = y;
    }
    roots.sort_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap());
    roots.iter().map(|r| r * scale).collect()
}
