//! The exact triangularizers of a noiseless model and the geodesic distance
//! to the nearest one.

use crate::bounds::GroundTruthModel;
use crate::error::{Error, Result};
use crate::linalg::{orthogonal_log, OrthogonalFrame};
use crate::permutations::permutations;
use crate::scalar::Real;

/// Largest dimension enumerated exhaustively (`2⁵·5! = 3840` frames).
pub const MAX_ENUM_DIM: usize = 5;

/// All `2^d·d!` exact joint triangularizers of the noiseless matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularizerFamily<T> {
    pub frames: Vec<OrthogonalFrame<T>>,
    /// Column order of `V` orthonormalized into each frame.
    pub permutations: Vec<Vec<usize>>,
    /// Column signs applied after orthonormalization, `±1`.
    pub signs: Vec<Vec<i8>>,
}

impl<T> TriangularizerFamily<T> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Frames are ordered permutation-major (lexicographic permutations), then
/// by sign mask with bit `i` flipping column `i`.
pub fn enumerate_exact_triangularizers<T: Real>(gt: &GroundTruthModel<T>) -> Result<TriangularizerFamily<T>> {
    let d = gt.d();
    if d > MAX_ENUM_DIM {
        return Err(Error::TooLarge { d, limit: MAX_ENUM_DIM });
    }
    let gamma = gt.gamma();
    let scale = gt.lambda().max_abs().powi(2);
    if d > 1 && !(gamma > T::tol(1e-14) * scale) {
        return Err(Error::DegenerateSpectrum { gamma: gamma.to_f64_lossy() });
    }
    let mut family = TriangularizerFamily { frames: Vec::new(), permutations: Vec::new(), signs: Vec::new() };
    for perm in permutations(d) {
        let q = gt.triangularizer_for(&perm);
        for mask in 0..(1usize << d) {
            let signs: Vec<i8> = (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let mut m = q.matrix().clone();
            for (j, &s) in signs.iter().enumerate() {
                if s < 0 {
                    m.column_mut(j).iter_mut().for_each(|x| *x = -*x);
                }
            }
            family.frames.push(OrthogonalFrame::new_unchecked(m));
            family.permutations.push(perm.clone());
            family.signs.push(signs);
        }
    }
    Ok(family)
}

/// `min ‖log(U∘ᵀU)‖_F` over family frames in the same connected component
/// as `U`, with the index of the minimizer.
///
/// Frames whose relative rotation has an eigenvalue at `−1` have no
/// principal logarithm and are skipped.
pub fn distance_to_nearest<T: Real>(u: &OrthogonalFrame<T>, family: &TriangularizerFamily<T>) -> Result<(T, usize)> {
    let mut best: Option<(T, usize)> = None;
    for (k, frame) in family.frames.iter().enumerate() {
        if frame.dim() != u.dim() {
            return Err(crate::error::dim_mismatch("frame dimension differs from the family"));
        }
        let rel = frame.relative_to(u);
        if rel.determinant() < T::zero() {
            continue;
        }
        let alpha = match orthogonal_log(&rel) {
            Ok(x) => x.norm(),
            Err(Error::LogBranchAmbiguous { .. }) => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(b, _)| alpha < b) {
            best = Some((alpha, k));
        }
    }
    best.ok_or(Error::NoComparableFrame)
}
