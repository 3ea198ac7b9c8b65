//! Building blocks of one construction step.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Group, GroupFunction};
use crate::kernels::{block_ladder, covering_partition, Partition, PartitionStyle};
use crate::scalar::Scalar;
use crate::set::SpectrumSet;

/// `g = f (1 − f/(t w))`. Values of `f` are clamped into `[0, t w]` first;
/// anything further out than the tolerance is an error.
pub fn auxiliary<S: Scalar>(f: &GroupFunction<S>, t: S, w: &GroupFunction<S>) -> Result<GroupFunction<S>> {
    if !f.same_group(w) {
        return Err(Error::GroupMismatch);
    }
    let tol = S::tol(1e-9);
    let mut out = Vec::with_capacity(f.values().len());
    for (i, (fv, wv)) in f.values().iter().zip(w.values()).enumerate() {
        let upper = t * wv.re;
        let x = fv.re;
        if x < -tol || x > upper + tol {
            return Err(Error::RangeViolation { index: i, value: x.as_f64(), upper: upper.as_f64() });
        }
        let x = x.max(S::zero()).min(upper);
        out.push(x * (S::one() - x / upper));
    }
    Ok(GroupFunction::from_real(f.group(), &out))
}

fn truncated_norm_sq<S: Scalar>(vals: &[S], delta: S) -> S {
    vals.iter().filter(|&&v| v >= delta).fold(S::zero(), |acc, &v| acc + (v - delta) * (v - delta))
}

/// Largest `δ` with `‖(g − δ) χ_{g ≥ δ}‖₂ > (9/10) ‖g‖₂`, by bisection to
/// relative width `1e-9`. Returns `δ` and the truncated function.
pub fn threshold_truncate<S: Scalar>(g: &GroupFunction<S>) -> Result<(S, GroupFunction<S>)> {
    let vals = g.real_parts();
    let total = vals.iter().fold(S::zero(), |acc, &v| acc + v * v);
    if !(total > S::zero()) {
        return Err(Error::ZeroFunction);
    }
    let target = S::lit(0.81) * total;
    let top = vals.iter().copied().fold(S::zero(), S::max);
    let (mut lo, mut hi) = (S::zero(), top);
    let width = S::tol(1e-9) * top;
    while hi - lo > width {
        let mid = (lo + hi) / S::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if truncated_norm_sq(&vals, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = lo;
    let trunc: Vec<S> = vals.iter().map(|&v| if v >= delta { v - delta } else { S::zero() }).collect();
    Ok((delta, GroupFunction::from_real(g.group(), &trunc)))
}

/// Output of [`build_h`].
#[derive(Clone, Debug)]
pub struct HBuild<S: Scalar> {
    pub partition: Partition<S>,
    pub coeffs: Vec<S>,
    pub h: GroupFunction<S>,
    /// `Σ c_i² ‖α_i‖₂²`.
    pub coeff_energy: S,
}

impl<S: Scalar> HBuild<S> {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == S::zero())
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c > S::zero()).map(|(i, _)| i)
    }
}

/// `h = Σ c_i α_i` with `c_i = g_trunc(x_i)`, on the coarsest block of the
/// ladder for which `h ≤ g` and `‖h‖₂² ≥ ½‖g‖₂²`.
pub fn build_h<S: Scalar>(
    g_trunc: &GroupFunction<S>,
    g_orig: &GroupFunction<S>,
    style: PartitionStyle,
) -> Result<HBuild<S>> {
    let group: &Arc<Group<S>> = g_trunc.group();
    let ladder = block_ladder(group, style);
    let tol = S::tol(1e-10);
    let g_energy = g_orig.norm_l2_sq();
    let finish = |partition: Partition<S>, coeffs: Vec<S>| {
        let h = partition.combine(&coeffs);
        let proto = partition.prototype().norm_l2_sq();
        let coeff_energy = coeffs.iter().fold(S::zero(), |acc, &c| acc + c * c * proto);
        HBuild { partition, coeffs, h, coeff_energy }
    };
    if g_trunc.norm_sup() == S::zero() {
        let partition = covering_partition(group, &ladder[0])?;
        let coeffs = vec![S::zero(); partition.len()];
        return Ok(finish(partition, coeffs));
    }
    for spec in &ladder {
        let partition = covering_partition(group, spec)?;
        let coeffs: Vec<S> = partition.centers().iter().map(|&x| g_trunc.re_at(x).max(S::zero())).collect();
        let built = finish(partition, coeffs);
        let below = built.h.values().iter().zip(g_orig.values()).all(|(h, g)| h.re <= g.re + tol);
        if below && built.h.norm_l2_sq() >= S::lit(0.5) * g_energy {
            return Ok(built);
        }
    }
    Err(Error::PartitionExhausted { level: ladder.len() - 1 })
}

/// First `γ` in the search order with `±γ + E ⊂ allowed`, `±γ + E` disjoint
/// from `forbidden`, and `2γ = 0` or `±2γ ∉ square_spectrum`. Returns the
/// character and the spectrum `(γ + E) ∪ (−γ + E)`.
pub fn find_character<S: Scalar>(
    group: &Group<S>,
    beta_spectrum: &SpectrumSet,
    square_spectrum: &SpectrumSet,
    allowed: &SpectrumSet,
    forbidden: &SpectrumSet,
) -> Option<(usize, SpectrumSet)> {
    let offsets = beta_spectrum.to_vec();
    let fits = |shift: usize| {
        offsets.iter().all(|&e| {
            let z = group.add(shift, e);
            allowed.contains(z) && !forbidden.contains(z)
        })
    };
    for &gamma in group.search_order() {
        let minus = group.neg(gamma);
        if !fits(gamma) || (minus != gamma && !fits(minus)) {
            continue;
        }
        let double = group.add(gamma, gamma);
        if double != 0 && (square_spectrum.contains(double) || square_spectrum.contains(group.neg(double))) {
            continue;
        }
        let spectrum = group.translate_set(beta_spectrum, gamma).union(&group.translate_set(beta_spectrum, minus));
        return Some((gamma, spectrum));
    }
    None
}
