//! Finitely generated Kleinian groups: presentations, reduced-word
//! enumeration, limit-set sampling and distances between boundary samples.

mod empty_ball;
mod hausdorff;
mod limit_set;
pub mod spatial;
mod words;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{ElementClass, MoebiusTransform};

pub use empty_ball::{fibonacci_sphere, grid_spacing, largest_empty_ball, EmptyBall};
pub use hausdorff::{directed_hausdorff, hausdorff_distance, min_distance_to_sample};
pub use limit_set::{limit_set_sample, LimitSetConfig, LimitSetSample, SampleMethod};
pub use words::{
    enumerate_reduced_words, letter_transform, reduced_word_count, visit_reduced_words, ReducedWords,
};

/// Generators of a (presumed discrete) subgroup of `PSL(2, ℂ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub label: String,
    pub generators: Vec<MoebiusTransform>,
}

impl GroupPresentation {
    pub fn new(label: impl Into<String>, generators: Vec<MoebiusTransform>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("group needs at least one generator".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.classify(1e-12) == ElementClass::Identity {
                return Err(Error::InvalidArgument(format!("generator {i} is the identity")));
            }
        }
        Ok(GroupPresentation { label: label.into(), generators })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Conjugate every generator: `g ↦ h g h⁻¹`.
    pub fn conjugate(&self, h: &MoebiusTransform, label: impl Into<String>) -> Self {
        let hinv = h.inverse();
        GroupPresentation {
            label: label.into(),
            generators: self.generators.iter().map(|g| h * &(g * &hinv)).collect(),
        }
    }

    /// Generator pairs violating Jørgensen's inequality
    /// `|tr²A - 4| + |tr[A, B] - 2| ≥ 1`. A violation on a non-elementary
    /// pair means the group is not discrete. Pairs with `tr[A, B] = 2`
    /// (elementary) are skipped.
    pub fn jorgensen_violations(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for (j, b) in self.generators.iter().enumerate() {
                if i == j {
                    continue;
                }
                let comm = a * &(b * &(a.inverse() * b.inverse()));
                let tc = comm.trace();
                // the commutator trace does not depend on the choice of lifts
                if (tc - 2.0).norm() < 1e-9 {
                    continue;
                }
                let tr = a.trace();
                let value = (tr * tr - 4.0).norm() + (tc - 2.0).norm();
                if value < 1.0 {
                    out.push((i, j, value));
                }
            }
        }
        out
    }
}

/// Genus-2 Fuchsian group pairing the sides of the regular hyperbolic
/// octagon with interior angles `π/4` (angle sum `2π`), in the unit-disk
/// model. Every generator preserves the unit circle, so the limit set is
/// `|z| = 1`.
///
/// The generators are `A_k = (α, β ω^k; β ω^{-k}, α)` for `k = 0..4`, with
/// `α = 1 + √2`, `β = √(α² - 1)` and `ω = e^{iπ/4}`; they satisfy
/// [`OCTAGON_RELATOR`].
pub fn build_octagon_group() -> GroupPresentation {
    let alpha = 1.0 + std::f64::consts::SQRT_2;
    let beta = (alpha * alpha - 1.0).sqrt();
    let generators = (0..4)
        .map(|k| {
            let w = Complex64::from_polar(beta, k as f64 * std::f64::consts::FRAC_PI_4);
            MoebiusTransform::new(alpha.into(), w, w.conj(), alpha.into())
                .expect("octagon generators are unimodular")
        })
        .collect();
    GroupPresentation { label: "regular octagon (genus 2)".into(), generators }
}

/// Surface relator of [`build_octagon_group`] as letters: generator `k` is
/// letter `2k`, its inverse `2k + 1`.
pub const OCTAGON_RELATOR: [usize; 8] = [0, 3, 4, 7, 1, 2, 5, 6];

/// Product of a letter word, left to right.
pub fn word_transform(group: &GroupPresentation, letters: &[usize]) -> MoebiusTransform {
    letters
        .iter()
        .fold(MoebiusTransform::identity(), |acc, &l| acc * letter_transform(group, l))
}
