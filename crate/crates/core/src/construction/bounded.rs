//! Correction of a bounded function by two-rail runs on its nonnegative parts.

use num_complex::Complex;

use super::{run, ConstructionOptions, CorrectionResult, Schedules};
use crate::error::Result;
use crate::group::GroupFunction;
use crate::scalar::Scalar;
use crate::set::{IndexSet, SpectrumSet};
use crate::spectral::{EnumeratedBasis, SufficientPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartKind {
    PositiveReal,
    NegativeReal,
    PositiveImag,
    NegativeImag,
}

impl PartKind {
    pub const ALL: [PartKind; 4] =
        [PartKind::PositiveReal, PartKind::NegativeReal, PartKind::PositiveImag, PartKind::NegativeImag];

    fn extract<S: Scalar>(self, v: Complex<S>) -> S {
        let x = match self {
            PartKind::PositiveReal => v.re,
            PartKind::NegativeReal => -v.re,
            PartKind::PositiveImag => v.im,
            PartKind::NegativeImag => -v.im,
        };
        x.max(S::zero())
    }

    fn phase<S: Scalar>(self) -> Complex<S> {
        match self {
            PartKind::PositiveReal => Complex::new(S::one(), S::zero()),
            PartKind::NegativeReal => Complex::new(-S::one(), S::zero()),
            PartKind::PositiveImag => Complex::new(S::zero(), S::one()),
            PartKind::NegativeImag => Complex::new(S::zero(), -S::one()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundedOptions {
    pub n_max: usize,
    pub g_tol: f64,
    pub construction: ConstructionOptions,
}

#[derive(Clone, Debug)]
pub struct PartResult<S: Scalar> {
    pub kind: PartKind,
    /// Rail `w₁ = v + 1`.
    pub upper: CorrectionResult<S>,
    /// Rail `w₂ ≡ 1`.
    pub lower: CorrectionResult<S>,
    /// `χ_{b₁} w₁ − χ_{b₂}`.
    pub output: GroupFunction<S>,
}

#[derive(Clone, Debug)]
pub struct BoundedCorrection<S: Scalar> {
    pub f: GroupFunction<S>,
    pub parts: Vec<PartResult<S>>,
    /// Union of the `K` sets of every rail run.
    pub k_union: SpectrumSet,
}

impl<S: Scalar> BoundedCorrection<S> {
    /// Largest relative `g` residual over all rail runs.
    pub fn max_g_residual(&self) -> f64 {
        self.parts
            .iter()
            .flat_map(|p| [p.upper.report.g_residual, p.lower.report.g_residual])
            .fold(0.0, f64::max)
    }

    /// Sum over rail runs of `2‖g‖₁`, which bounds each run's extraction error.
    pub fn extraction_bound(&self) -> f64 {
        self.parts.iter().map(|p| p.upper.report.extraction_bound + p.lower.report.extraction_bound).sum()
    }
}

/// Splits `h` (`‖h‖_∞ ≤ 1`) into nonnegative parts, corrects each with
/// budget `ε/4` on the rails `v + 1` and `1`, and recombines.
pub fn correct_bounded<S: Scalar>(
    h: &GroupFunction<S>,
    epsilon: S,
    pair: &SufficientPair,
    basis: &EnumeratedBasis,
    options: &BoundedOptions,
) -> Result<BoundedCorrection<S>> {
    let group = h.group();
    let budget = epsilon / S::lit(4.0);
    let g_tol = S::lit(options.g_tol);
    let mut f = GroupFunction::zeros(group);
    let mut parts = Vec::new();
    let mut k_union = IndexSet::empty(group.len());
    for kind in PartKind::ALL {
        let v: Vec<S> = h.values().iter().map(|&z| kind.extract(z)).collect();
        // finite-group surrogate of the continuity set: the whole support
        let a = IndexSet::from_predicate(group.len(), |x| v[x] > S::zero());
        if a.is_empty() {
            continue;
        }
        let w1 = GroupFunction::from_real(group, &v.iter().map(|&x| x + S::one()).collect::<Vec<_>>());
        let w2 = GroupFunction::constant(group, S::one());
        let upper = run(
            &a,
            &w1,
            pair,
            basis,
            &Schedules::standard(budget, options.n_max, g_tol, false)?,
            &options.construction,
        )?;
        let lower = run(
            &a,
            &w2,
            pair,
            basis,
            &Schedules::standard(budget, options.n_max, g_tol, true)?,
            &options.construction,
        )?;
        k_union.union_with(upper.k_set());
        k_union.union_with(lower.k_set());
        let output = &upper.corrected() - &lower.corrected();
        let phase = kind.phase::<S>();
        f = &f + &output.map(|z| z * phase);
        parts.push(PartResult { kind, upper, lower, output });
    }
    Ok(BoundedCorrection { f, parts, k_union })
}
