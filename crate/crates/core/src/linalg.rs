//! Vector kernels. Storage is `f32`; every reduction accumulates in `f64`.

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

#[inline]
pub fn norm(a: &[f32]) -> f64 {
    dot(a, a).sqrt()
}

fn check_dims(a: &[f32], b: &[f32]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Scales `v` to unit length. Zero (or non-finite) norms are rejected.
pub fn normalize(v: &[f32]) -> Result<Vec<f32>> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|&x| (x as f64 / n) as f32).collect())
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64> {
    check_dims(u, v)?;
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Angular distance `sqrt(2 - 2 cos(u, v))`, in `[0, 2]`.
///
/// Computed as the Euclidean distance between the two unit vectors, which
/// is the same quantity but exact for parallel and antiparallel inputs.
pub fn angular_distance(u: &[f32], v: &[f32]) -> Result<f64> {
    check_dims(u, v)?;
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let sq: f64 = u
        .iter()
        .zip(v)
        .map(|(&x, &y)| {
            let d = x as f64 / nu - y as f64 / nv;
            d * d
        })
        .sum();
    Ok(sq.sqrt().min(2.0))
}

/// Angular distance between two vectors already normalized by [`normalize`].
#[inline]
pub fn unit_distance(a: &[f32], b: &[f32]) -> f32 {
    let sq: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    (sq.sqrt() as f32).min(2.0)
}
