//! Sufficient pairs, summation bases, splitting unions `E_ℬ`, coordination,
//! partial-sum projections `P_B` and the `u`-norm.
//!
//! On a finite dual group every set is compact, so sufficiency is taken
//! relative to an explicit admissible family: all translates of boxes whose
//! per-factor half-widths stay below a cap.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{fourier, inverse_fourier, Group, GroupFunction};
use crate::scalar::Scalar;
use crate::set::{IndexSet, SpectrumSet};

pub const DEFAULT_BASIS_CAP: usize = 1 << 17;

/// A translated box `c + Π_j {−r_j..r_j}` in `Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxSet {
    pub center: usize,
    pub half_widths: Vec<usize>,
}

impl BoxSet {
    pub fn to_set<S: Scalar>(&self, group: &Group<S>) -> SpectrumSet {
        group.translate_set(&box_at_zero(group, &self.half_widths), self.center)
    }
}

fn box_at_zero<S: Scalar>(group: &Group<S>, half_widths: &[usize]) -> SpectrumSet {
    IndexSet::from_predicate(group.len(), |i| {
        group.signed_coords(i).iter().zip(half_widths).all(|(&c, &r)| c.unsigned_abs() as usize <= r)
    })
}

/// Translates of boxes with per-factor half-width `≤ max_half_widths[j]`;
/// `center_radius` optionally keeps only centers with max coordinate
/// magnitude `≤` the radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleFamily {
    pub max_half_widths: Vec<usize>,
    #[serde(default)]
    pub center_radius: Option<usize>,
}

impl AdmissibleFamily {
    /// Half-width cap `N_j / 8` on every factor, all centers.
    pub fn default_for<S: Scalar>(group: &Group<S>) -> Self {
        Self { max_half_widths: group.orders().iter().map(|&n| n / 8).collect(), center_radius: None }
    }

    pub fn uniform<S: Scalar>(group: &Group<S>, half_width: usize) -> Self {
        Self {
            max_half_widths: group.orders().iter().map(|&n| half_width.min(n / 2)).collect(),
            center_radius: None,
        }
    }

    pub fn with_center_radius(mut self, radius: usize) -> Self {
        self.center_radius = Some(radius);
        self
    }

    pub fn half_width_vectors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &cap in &self.max_half_widths {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=cap).map(move |r| {
                        let mut w = v.clone();
                        w.push(r);
                        w
                    })
                })
                .collect();
        }
        out
    }

    pub fn centers<S: Scalar>(&self, group: &Group<S>) -> Vec<usize> {
        (0..group.len())
            .filter(|&c| self.center_radius.is_none_or(|r| group.max_abs_coord(c) <= r))
            .collect()
    }

    pub fn members<S: Scalar>(&self, group: &Group<S>) -> Vec<BoxSet> {
        let centers = self.centers(group);
        self.half_width_vectors()
            .into_iter()
            .flat_map(|hw| centers.iter().map(move |&c| BoxSet { center: c, half_widths: hw.clone() }))
            .collect()
    }
}

/// `(R, S)` with the family against which sufficiency is judged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficientPair {
    pub r: SpectrumSet,
    pub s: SpectrumSet,
    pub family: AdmissibleFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockOrder {
    /// Blocks are ranges of the linear character index.
    Index,
    /// Blocks are ranges of the Walsh–Paley rank.
    Paley,
}

impl SufficientPair {
    pub fn new(r: SpectrumSet, s: SpectrumSet, family: AdmissibleFamily) -> Self {
        Self { r, s, family }
    }

    /// `S = ∪ blocks`, `R = −S`. Blocks are half-open ranges `[lo, hi)`.
    pub fn gapped<S: Scalar>(
        group: &Group<S>,
        blocks: &[(usize, usize)],
        order: BlockOrder,
        family: AdmissibleFamily,
    ) -> Self {
        let s = IndexSet::from_predicate(group.len(), |g| {
            let key = match order {
                BlockOrder::Index => g,
                BlockOrder::Paley => group.paley_rank(g),
            };
            blocks.iter().any(|&(lo, hi)| lo <= key && key < hi)
        });
        let r = group.negate_set(&s);
        Self { r, s, family }
    }

    pub fn union(&self) -> SpectrumSet {
        self.r.union(&self.s)
    }

    pub fn strip(&self, removed: &SpectrumSet) -> Self {
        Self { r: self.r.difference(removed), s: self.s.difference(removed), family: self.family.clone() }
    }
}

/// Blocks `[start, start + width)`, separated by gaps; width and gap are
/// multiplied by `growth` after every block. Stops at `limit`.
pub fn gapped_blocks(start: usize, width: usize, gap: usize, count: usize, growth: f64, limit: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut lo, mut w, mut gp) = (start, width as f64, gap as f64);
    for _ in 0..count {
        let hi = (lo + w.round().max(1.0) as usize).min(limit);
        if lo >= hi {
            break;
        }
        out.push((lo, hi));
        lo = hi + gp.round() as usize;
        w *= growth;
        gp *= growth;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficiencyReport {
    pub sufficient: bool,
    /// One entry per admissible set, with the first witness `γ` found.
    pub witnesses: Vec<(BoxSet, Option<usize>)>,
}

impl SufficiencyReport {
    pub fn first_failure(&self) -> Option<&BoxSet> {
        self.witnesses.iter().find(|(_, w)| w.is_none()).map(|(b, _)| b)
    }
}

fn fit_table<S: Scalar>(group: &Group<S>, set: &SpectrumSet, offsets: &[usize]) -> Vec<bool> {
    (0..group.len()).map(|z| offsets.iter().all(|&o| set.contains(group.add(z, o)))).collect()
}

fn witness_search<S: Scalar>(
    group: &Group<S>,
    r: &SpectrumSet,
    s: &SpectrumSet,
    family: &AdmissibleFamily,
    stop_at_first_failure: bool,
) -> SufficiencyReport {
    let order = group.search_order();
    let centers = family.centers(group);
    let mut witnesses = Vec::new();
    let mut sufficient = true;
    for hw in family.half_width_vectors() {
        let offsets = box_at_zero(group, &hw).to_vec();
        let fit_r = fit_table(group, r, &offsets);
        let fit_s = fit_table(group, s, &offsets);
        let found: Vec<Option<usize>> = centers
            .par_iter()
            .map(|&c| order.iter().copied().find(|&g| fit_r[group.sub(c, g)] && fit_s[group.add(c, g)]))
            .collect();
        for (&c, w) in centers.iter().zip(found) {
            if w.is_none() {
                sufficient = false;
            }
            witnesses.push((BoxSet { center: c, half_widths: hw.clone() }, w));
            if stop_at_first_failure && !sufficient {
                return SufficiencyReport { sufficient, witnesses };
            }
        }
    }
    SufficiencyReport { sufficient, witnesses }
}

/// For every admissible `E`: is there `γ` with `−γ + E ⊂ R` and `γ + E ⊂ S`?
pub fn is_sufficient<S: Scalar>(group: &Group<S>, pair: &SufficientPair) -> SufficiencyReport {
    witness_search(group, &pair.r, &pair.s, &pair.family, false)
}

fn sufficient_quick<S: Scalar>(group: &Group<S>, pair: &SufficientPair) -> bool {
    witness_search(group, &pair.r, &pair.s, &pair.family, true).sufficient
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SummationBasis {
    /// Cubes `{γ : max_j |γ_j| ≤ k}`.
    SymmetricInterval,
    /// All nonempty solid sets, enumerated by staircase profile.
    Solid {
        #[serde(default = "default_basis_cap")]
        cap: usize,
    },
    /// Prefixes of the Walsh–Paley enumeration.
    WalshPrefix,
    Explicit { sets: Vec<Vec<usize>> },
}

fn default_basis_cap() -> usize {
    DEFAULT_BASIS_CAP
}

/// The members of a basis, materialized for a particular group.
#[derive(Clone, Debug)]
pub struct EnumeratedBasis {
    pub kind: SummationBasis,
    pub members: Vec<SpectrumSet>,
}

impl SummationBasis {
    pub fn enumerate<S: Scalar>(&self, group: &Group<S>) -> Result<EnumeratedBasis> {
        self.enumerate_with_cap(group, DEFAULT_BASIS_CAP)
    }

    pub fn enumerate_with_cap<S: Scalar>(&self, group: &Group<S>, cap: usize) -> Result<EnumeratedBasis> {
        let n = group.len();
        let members = match self {
            SummationBasis::SymmetricInterval => {
                let top = group.orders().iter().map(|&m| m / 2).max().unwrap_or(0);
                if top + 1 > cap {
                    return Err(Error::BasisNotEnumerable { cap });
                }
                let mags: Vec<usize> = (0..n).map(|i| group.max_abs_coord(i)).collect();
                (0..=top).map(|k| IndexSet::from_predicate(n, |i| mags[i] <= k)).collect()
            }
            SummationBasis::WalshPrefix => {
                if n > cap {
                    return Err(Error::BasisNotEnumerable { cap });
                }
                let ranks: Vec<usize> = (0..n).map(|i| group.paley_rank(i)).collect();
                let mut cur = IndexSet::empty(n);
                let by_rank: Vec<usize> = (0..n).map(|r| group.from_paley_rank(r)).collect();
                let mut out = Vec::with_capacity(n);
                for (m, &g) in by_rank.iter().enumerate() {
                    debug_assert_eq!(ranks[g], m);
                    cur.insert(g);
                    out.push(cur.clone());
                }
                out
            }
            SummationBasis::Solid { cap: own_cap } => solid_sets(group, cap.min(*own_cap))?,
            SummationBasis::Explicit { sets } => {
                if sets.len() > cap {
                    return Err(Error::BasisNotEnumerable { cap });
                }
                let members: Vec<SpectrumSet> =
                    sets.iter().map(|s| IndexSet::from_indices(n, s.iter().copied())).collect();
                let mut cover = IndexSet::empty(n);
                for m in &members {
                    cover.union_with(m);
                }
                if cover.len() != n {
                    return Err(Error::InvalidBasis("members do not cover the dual group".into()));
                }
                members
            }
        };
        Ok(EnumeratedBasis { kind: self.clone(), members })
    }
}

/// Down-sets of the grid `Π_j [0, dims_j]`, row-major, empty set included.
fn downsets(dims: &[usize], cap: usize) -> Result<Vec<Vec<bool>>> {
    let m0 = dims[0];
    if dims.len() == 1 {
        return Ok((0..=m0 + 1).map(|h| (0..=m0).map(|i| i < h).collect()).collect());
    }
    let sub = downsets(&dims[1..], cap)?;
    let sub_len = sub[0].len();
    let subset = |a: &Vec<bool>, b: &Vec<bool>| a.iter().zip(b).all(|(&x, &y)| !x || y);
    let mut out = Vec::new();
    // chains D_0 ⊇ D_1 ⊇ … ⊇ D_{m0} of sub-downsets
    fn extend(
        sub: &[Vec<bool>],
        chain: &mut Vec<usize>,
        rows: usize,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
        subset: &dyn Fn(&Vec<bool>, &Vec<bool>) -> bool,
    ) -> Result<()> {
        if chain.len() == rows {
            if out.len() >= cap {
                return Err(Error::BasisNotEnumerable { cap });
            }
            out.push(chain.clone());
            return Ok(());
        }
        for k in 0..sub.len() {
            if let Some(&prev) = chain.last() {
                if !subset(&sub[k], &sub[prev]) {
                    continue;
                }
            }
            chain.push(k);
            extend(sub, chain, rows, out, cap, subset)?;
            chain.pop();
        }
        Ok(())
    }
    let mut chains = Vec::new();
    extend(&sub, &mut Vec::new(), m0 + 1, &mut chains, cap, &subset)?;
    for chain in chains {
        let mut grid = Vec::with_capacity((m0 + 1) * sub_len);
        for k in chain {
            grid.extend_from_slice(&sub[k]);
        }
        out.push(grid);
    }
    Ok(out)
}

fn solid_sets<S: Scalar>(group: &Group<S>, cap: usize) -> Result<Vec<SpectrumSet>> {
    let dims: Vec<usize> = group.orders().iter().map(|&n| n / 2).collect();
    let grids = downsets(&dims, cap.saturating_add(1))?;
    let n = group.len();
    let cells: Vec<usize> = (0..n)
        .map(|i| {
            let mags: Vec<usize> = group.signed_coords(i).iter().map(|c| c.unsigned_abs() as usize).collect();
            mags.iter().zip(&dims).fold(0, |acc, (&m, &d)| acc * (d + 1) + m)
        })
        .collect();
    let members: Vec<SpectrumSet> = grids
        .into_iter()
        .filter(|grid| grid.iter().any(|&b| b))
        .map(|grid| IndexSet::from_predicate(n, |i| grid[cells[i]]))
        .collect();
    if members.len() > cap {
        return Err(Error::BasisNotEnumerable { cap });
    }
    Ok(members)
}

/// `B` splits `E` when both `E ∩ B` and `E ∖ B` are nonempty.
pub fn splits(b: &SpectrumSet, e: &SpectrumSet) -> bool {
    e.intersects(b) && !e.is_subset(b)
}

/// `E_ℬ`: the union of all basis members that split `E`.
pub fn splitting_union(e: &SpectrumSet, basis: &EnumeratedBasis) -> SpectrumSet {
    let mut out = IndexSet::empty(e.universe());
    for b in &basis.members {
        if splits(b, e) {
            out.union_with(b);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinationReport {
    pub coordinated: bool,
    pub counterexample: Option<BoxSet>,
    pub probes: usize,
}

/// For each probe set `E`, strip `E_ℬ` from both halves of the pair and
/// re-check sufficiency.
pub fn is_coordinated<S: Scalar>(
    group: &Group<S>,
    basis: &EnumeratedBasis,
    pair: &SufficientPair,
    probes: &AdmissibleFamily,
) -> CoordinationReport {
    let mut cache: HashMap<SpectrumSet, bool> = HashMap::new();
    let members = probes.members(group);
    let count = members.len();
    for e in members {
        let eb = splitting_union(&e.to_set(group), basis);
        let ok = *cache.entry(eb.clone()).or_insert_with(|| sufficient_quick(group, &pair.strip(&eb)));
        if !ok {
            return CoordinationReport { coordinated: false, counterexample: Some(e), probes: count };
        }
    }
    CoordinationReport { coordinated: true, counterexample: None, probes: count }
}

/// `P_B f = 𝓕⁻¹(χ_B 𝓕f)`.
pub fn partial_sum<S: Scalar>(f: &GroupFunction<S>, b: &SpectrumSet) -> GroupFunction<S> {
    inverse_fourier(&fourier(f).restrict(b))
}

/// `sup_B ‖P_B f‖_∞` over the members, with the index of a maximizer.
pub fn max_partial_sum<S: Scalar>(f: &GroupFunction<S>, members: &[SpectrumSet]) -> (S, Option<usize>) {
    let fh = fourier(f);
    let sups: Vec<S> = members.par_iter().map(|b| inverse_fourier(&fh.restrict(b)).norm_sup()).collect();
    let mut best = (S::zero(), None);
    for (i, v) in sups.into_iter().enumerate() {
        if best.1.is_none() || v > best.0 {
            best = (v, Some(i));
        }
    }
    best
}

/// `‖f‖_u = max_B (‖P_B f‖_∞ + ‖f‖₁)` and an attaining member.
pub fn u_norm<S: Scalar>(f: &GroupFunction<S>, basis: &EnumeratedBasis) -> (S, Option<usize>) {
    if basis.members.is_empty() {
        return (f.norm_l1(), None);
    }
    let (sup, idx) = max_partial_sum(f, &basis.members);
    (sup + f.norm_l1(), idx)
}

/// Convenience for callers holding a shared group handle.
pub fn enumerate_basis<S: Scalar>(group: &Arc<Group<S>>, basis: &SummationBasis) -> Result<EnumeratedBasis> {
    basis.enumerate(group)
}
