//! Random descent directions inside a spherical cap around the gradient.
//!
//! A cap point is drawn around the north pole `z = e_d` with prescribed
//! height `r`, then carried onto the gradient orientation `q̂` by the
//! Householder reflection exchanging `z` and `q̂`. The cosine `r` is uniform
//! on `[(1 + m̃)/2, 1)`, so samples are uniform in the cosine rather than in
//! surface area: the cap rim is under-weighted relative to a surface-uniform
//! draw as the dimension grows.

use crate::config::Mode;
use crate::error::{Error, Result};
use crate::problem::{dot, norm};
use crate::rng::RandomSource;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSample {
    /// Descent direction, `|∇F| ω`.
    pub p: Vec<f64>,
    /// Cosine between `ω` and the gradient orientation.
    pub r: f64,
    /// Unit orientation of `p`.
    pub omega: Vec<f64>,
}

/// Point on `𝕊^{d-1}` with last coordinate `r` and the remaining ones a
/// uniformly random direction scaled by `sqrt(1 - r²)`.
pub fn sample_cap_point(d: usize, r: f64, rng: &mut RandomSource) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::Dimension { min: 2, got: d });
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::CapCosine(r));
    }
    let radius = (1.0 - r * r).sqrt();
    let mut x = vec![0.0; d];
    loop {
        for v in &mut x[..d - 1] {
            *v = rng.standard_normal();
        }
        let len = norm(&x[..d - 1]);
        if len > 0.0 {
            for v in &mut x[..d - 1] {
                *v *= radius / len;
            }
            break;
        }
    }
    x[d - 1] = r;
    Ok(x)
}

/// Applies the Householder reflection that swaps the north pole and `q_hat`.
///
/// With `v = q̂ - z`, returns `x - 2⟨v, x⟩/|v|² v`; when `q̂ = z` the map is
/// the identity.
pub fn reflect_to(q_hat: &[f64], x: &[f64]) -> Vec<f64> {
    let d = q_hat.len();
    if 1.0 - q_hat[d - 1] == 0.0 {
        return x.to_vec();
    }
    let mut v = q_hat.to_vec();
    v[d - 1] -= 1.0;
    // |v|² summed directly; the shortcut 2(1 - q_d) assumes |q̂| = 1 exactly.
    let scale = 2.0 * dot(&v, x) / dot(&v, &v);
    x.iter().zip(&v).map(|(xi, vi)| xi - scale * vi).collect()
}

/// Descent direction for an agent with gradient `grad` and relative mass `m_rel`.
///
/// Gradient mode, the heaviest agent (`m_rel = 1`) and one-dimensional
/// problems all return `p = grad` without consuming randomness.
pub fn random_descent_direction(
    grad: &[f64],
    m_rel: f64,
    mode: Mode,
    rng: &mut RandomSource,
) -> Result<DirectionSample> {
    let g_norm = norm(grad);
    if !(g_norm > 0.0) {
        return Err(Error::ZeroGradient);
    }
    let d = grad.len();
    if mode == Mode::Sbgd || m_rel >= 1.0 || d == 1 {
        let omega = grad.iter().map(|g| g / g_norm).collect();
        return Ok(DirectionSample { p: grad.to_vec(), r: 1.0, omega });
    }
    let r = rng.uniform(0.5 * (1.0 + m_rel), 1.0);
    let q_hat: Vec<f64> = grad.iter().map(|g| g / g_norm).collect();
    let omega = reflect_to(&q_hat, &sample_cap_point(d, r, rng)?);
    let p = omega.iter().map(|w| g_norm * w).collect();
    Ok(DirectionSample { p, r, omega })
}

/// Half-angle of the widest cap for relative mass `m_rel`, in degrees.
pub fn cap_half_angle_degrees(m_rel: f64) -> f64 {
    (0.5 * (1.0 + m_rel)).acos().to_degrees()
}
