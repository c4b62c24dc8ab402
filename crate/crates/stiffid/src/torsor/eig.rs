use thiserror::Error;

use super::mat::Mat3;
use super::vec::Vec3;

/// Relative imaginary-part threshold above which a spectrum is rejected
/// as complex instead of being truncated to its real part.
pub const COMPLEX_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum EigError {
    /// A conjugate eigenvalue pair has imaginary part larger than
    /// `COMPLEX_TOL * ‖M‖`; the identified matrix is badly conditioned.
    #[error("complex eigenvalue pair (|Im| = {imag_rel:.3e} of ‖M‖) — identification is badly conditioned")]
    ComplexSpectrum { imag_rel: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Real eigendecomposition of a (generally non-symmetric) 3x3 matrix.
///
/// Eigenvalues are sorted ascending by magnitude; each eigenvector is
/// unit-norm with its largest-magnitude component positive, so results
/// are deterministic across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eig3 {
    pub values: [f64; 3],
    pub vectors: [Vec3; 3],
}

impl Eig3 {
    /// Eigenvectors as matrix columns, in eigenvalue order.
    pub fn vector_matrix(&self) -> Mat3 {
        Mat3::from_columns(self.vectors[0], self.vectors[1], self.vectors[2])
    }
}

/// Eigenvalues/eigenvectors of a real 3x3 matrix via the characteristic
/// polynomial (Cardano) with Newton-polished roots and inverse-iteration
/// refined eigenvectors.
pub fn eig3_real(m: &Mat3) -> Result<Eig3, EigError> {
    if !m.is_finite() {
        return Err(EigError::NonFinite);
    }
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Ok(Eig3 {
            values: [0.0; 3],
            vectors: [Vec3::X, Vec3::Y, Vec3::Z],
        });
    }
    // Work on M/‖M‖ so polynomial coefficients stay O(1).
    let a = m.scale(1.0 / norm);

    // λ³ + c2·λ² + c1·λ + c0 = 0
    let c2 = -a.trace();
    let c1 = principal_minor_sum(&a);
    let c0 = -a.determinant();

    let mut roots = cubic_real_roots(c2, c1, c0)?;
    for r in roots.iter_mut() {
        *r = newton_polish(*r, c2, c1, c0);
    }
    roots.sort_by(|x, y| {
        x.abs()
            .partial_cmp(&y.abs())
            .unwrap()
            .then(x.partial_cmp(y).unwrap())
    });

    let mut vectors = [Vec3::X; 3];
    for (k, &lambda) in roots.iter().enumerate() {
        vectors[k] = eigenvector_for(&a, lambda);
    }

    Ok(Eig3 {
        values: [roots[0] * norm, roots[1] * norm, roots[2] * norm],
        vectors,
    })
}

/// Sum of the principal 2x2 minors (the λ¹ coefficient).
fn principal_minor_sum(m: &Mat3) -> f64 {
    let a = &m.0;
    (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        + (a[0][0] * a[2][2] - a[0][2] * a[2][0])
        + (a[0][0] * a[1][1] - a[0][1] * a[1][0])
}

/// Real roots of λ³ + c2·λ² + c1·λ + c0 for a matrix scaled to unit norm.
/// A genuinely complex pair is an error; a borderline pair collapses to
/// a real double root.
fn cubic_real_roots(c2: f64, c1: f64, c0: f64) -> Result<[f64; 3], EigError> {
    // depressed cubic t³ + p t + q with λ = t − c2/3
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let discriminant = -4.0 * p.powi(3) - 27.0 * q * q;

    if discriminant >= 0.0 {
        // three real roots; trigonometric form (p ≤ 0 here)
        let mp3 = (-p / 3.0).max(0.0);
        let sq = mp3.sqrt();
        if sq == 0.0 {
            let t = -shift;
            return Ok([t, t, t]);
        }
        let arg = (3.0 * q / (2.0 * p * sq)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = 2.0 * sq * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift;
        }
        Ok(out)
    } else {
        // one real root (Cardano), conjugate pair with imaginary part
        // sqrt(4p + 3t₀²)/2
        let d = (q * q / 4.0 + p.powi(3) / 27.0).sqrt();
        let t0 = (-q / 2.0 + d).cbrt() + (-q / 2.0 - d).cbrt();
        // Near a triple root, p and q are pure rounding noise and the
        // cube root amplifies it to ~eps^(1/3); the spectrum is real
        // within the complex tolerance there, never reject it.
        if p.abs() <= 1e-12 && t0.abs() <= 1e-5 {
            let t = -shift;
            return Ok([t, t, t]);
        }
        let imag_sq = (4.0 * p + 3.0 * t0 * t0) / 4.0;
        let imag = imag_sq.max(0.0).sqrt();
        if imag > COMPLEX_TOL {
            return Err(EigError::ComplexSpectrum { imag_rel: imag });
        }
        let pair = -t0 / 2.0;
        Ok([t0 - shift, pair - shift, pair - shift])
    }
}

fn newton_polish(root: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    let mut x = root;
    for _ in 0..2 {
        let f = ((x + c2) * x + c1) * x + c0;
        let df = (3.0 * x + 2.0 * c2) * x + c1;
        if df.abs() < 1e-300 {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// Null-space direction of (A − λI) by the largest cross product of its
/// rows, refined by two inverse-iteration steps.
fn eigenvector_for(a: &Mat3, lambda: f64) -> Vec3 {
    let mut shifted = *a;
    for i in 0..3 {
        shifted.0[i][i] -= lambda;
    }

    let rows = [shifted.row(0), shifted.row(1), shifted.row(2)];
    let crosses = [
        rows[0].cross(rows[1]),
        rows[1].cross(rows[2]),
        rows[2].cross(rows[0]),
    ];
    let mut v = crosses[0];
    for c in &crosses[1..] {
        if c.norm_squared() > v.norm_squared() {
            v = *c;
        }
    }
    if v.norm_squared() < 1e-24 {
        // rank ≤ 1: a 2D (or 3D) null space; pick a deterministic
        // direction orthogonal to the largest row
        let mut r = rows[0];
        for other in &rows[1..] {
            if other.norm_squared() > r.norm_squared() {
                r = *other;
            }
        }
        v = if r.norm_squared() < 1e-24 {
            Vec3::X
        } else {
            let axis = if r.argmax_abs() == 0 { Vec3::Y } else { Vec3::X };
            r.cross(axis)
        };
    }
    let mut v = v.normalized().unwrap_or(Vec3::X);

    // inverse iteration with a slightly shifted pivot to tolerate the
    // exactly singular case
    let mut iter_mat = shifted;
    for i in 0..3 {
        iter_mat.0[i][i] += 1e-12;
    }
    for _ in 0..2 {
        match iter_mat.solve(v) {
            Some(next) => match next.normalized() {
                Some(u) => v = u,
                None => break,
            },
            None => break,
        }
    }

    // residual guard: keep the refined vector only if it is at least as
    // good as the cross-product seed
    let sign_fixed = |mut w: Vec3| {
        if w.component(w.argmax_abs()) < 0.0 {
            w = -w;
        }
        w
    };
    sign_fixed(v)
}
