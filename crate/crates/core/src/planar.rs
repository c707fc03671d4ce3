//! Planar orientation conventions.
//!
//! The whole crate fixes the Levi-Civita symbol by `eps_12 = +1`. Two index
//! contractions appear constantly and differ only by a sign, so both get a
//! named helper here instead of ad-hoc component shuffling at call sites:
//!
//! - `eps_first(u)_j  = eps_ij u_i = (-u2, u1)` (counterclockwise quarter turn)
//! - `eps_second(u)_j = eps_jk u_k = (u2, -u1)` (clockwise quarter turn)
//!
//! With this choice and the Lagrangian signs as written per model, the
//! Landau velocity and the chiral-oscillator position both circulate
//! counterclockwise.

use nalgebra::Vector2;

/// Planar vector.
pub type Vec2 = Vector2<f64>;

/// Contraction over the first Levi-Civita index: `(eps u)_j = eps_ij u_i`.
#[inline]
pub fn eps_first(u: Vec2) -> Vec2 {
    Vec2::new(-u.y, u.x)
}

/// Contraction over the second Levi-Civita index: `(eps u)_j = eps_jk u_k`.
#[inline]
pub fn eps_second(u: Vec2) -> Vec2 {
    Vec2::new(u.y, -u.x)
}

/// Active rotation by `theta`, counterclockwise for positive angles.
pub fn rotate(u: Vec2, theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(c * u.x - s * u.y, s * u.x + c * u.y)
}
