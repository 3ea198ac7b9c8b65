//! Fejér-type approximate identities `Φ_U`, the window search that picks
//! `U_n`, and covering partitions of unity `{α_i}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{apply_multiplier, fourier, inverse_fourier, GroupFunction, Group, SpectralFunction};
use crate::scalar::Scalar;
use crate::set::{ElementSet, IndexSet, SpectrumSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowStyle {
    /// Product of symmetric segments `{−u_j..u_j}`.
    Interval { half_widths: Vec<usize> },
    /// `H_level = {γ : γ_k = 0 for k ≥ level}`; on `Z_2^m` these are the
    /// Walsh–Paley prefixes of length `2^level`.
    Subgroup { level: usize },
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSearch {
    Interval,
    Subgroup,
}

/// A symmetric set `U ⊂ Γ` containing zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumWindow {
    set: SpectrumSet,
    style: WindowStyle,
}

impl SpectrumWindow {
    pub fn interval<S: Scalar>(group: &Group<S>, half_widths: &[usize]) -> Result<Self> {
        if half_widths.len() != group.rank() {
            return Err(Error::InvalidWindow(format!(
                "{} half-widths for a group of rank {}",
                half_widths.len(),
                group.rank()
            )));
        }
        let clamped: Vec<usize> =
            half_widths.iter().zip(group.orders()).map(|(&u, &n)| u.min(n / 2)).collect();
        let set = IndexSet::from_predicate(group.len(), |i| {
            group.signed_coords(i).iter().zip(&clamped).all(|(&c, &u)| c.unsigned_abs() as usize <= u)
        });
        Ok(Self { set, style: WindowStyle::Interval { half_widths: clamped } })
    }

    /// Same half-width `s` on every factor (clamped to `N_j/2`).
    pub fn interval_uniform<S: Scalar>(group: &Group<S>, s: usize) -> Self {
        Self::interval(group, &vec![s; group.rank()]).expect("rank matches")
    }

    pub fn subgroup<S: Scalar>(group: &Group<S>, level: usize) -> Result<Self> {
        if level > group.rank() {
            return Err(Error::InvalidWindow(format!("subgroup level {level} exceeds rank {}", group.rank())));
        }
        let set = IndexSet::from_predicate(group.len(), |i| group.coords(i)[level..].iter().all(|&c| c == 0));
        Ok(Self { set, style: WindowStyle::Subgroup { level } })
    }

    pub fn full<S: Scalar>(group: &Group<S>) -> Self {
        Self { set: IndexSet::full(group.len()), style: WindowStyle::Custom }
    }

    pub fn from_set<S: Scalar>(group: &Group<S>, set: SpectrumSet) -> Result<Self> {
        if set.universe() != group.len() {
            return Err(Error::InvalidWindow("set lives on a different dual group".into()));
        }
        if !set.contains(0) {
            return Err(Error::InvalidWindow("window must contain 0".into()));
        }
        if group.negate_set(&set) != set {
            return Err(Error::InvalidWindow("window must be symmetric".into()));
        }
        Ok(Self { set, style: WindowStyle::Custom })
    }

    #[inline]
    pub fn set(&self) -> &SpectrumSet {
        &self.set
    }

    #[inline]
    pub fn style(&self) -> &WindowStyle {
        &self.style
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn contains_window(&self, other: &SpectrumWindow) -> bool {
        other.set.is_subset(&self.set)
    }
}

/// `ψ_U = (χ_U ∗ χ_U)/|U|` on `Γ` and `Φ_U = 𝓕⁻¹ψ_U` on `G`.
#[derive(Clone, Debug)]
pub struct FejerSystem<S: Scalar> {
    pub psi: SpectralFunction<S>,
    pub phi: GroupFunction<S>,
    multiplier: Vec<S>,
}

impl<S: Scalar> FejerSystem<S> {
    /// `Φ_U ∗ f`, applied as a Fourier multiplier.
    pub fn smooth(&self, f: &GroupFunction<S>) -> GroupFunction<S> {
        apply_multiplier(f, &self.multiplier)
    }

    pub fn multiplier(&self) -> &[S] {
        &self.multiplier
    }

    /// `supp ψ_U = U + U`.
    pub fn support(&self) -> SpectrumSet {
        IndexSet::from_predicate(self.multiplier.len(), |i| self.multiplier[i] > S::zero())
    }
}

/// Autocorrelation counts `#(U ∩ (ξ − U))` for every `ξ`.
fn autocorrelation_counts<S: Scalar>(group: &Arc<Group<S>>, window: &SpectrumSet) -> Vec<usize> {
    let chi = GroupFunction::indicator(group, window);
    let fh = fourier(&chi);
    let sq: Vec<_> = fh.coeffs().iter().map(|&c| c * c).collect();
    let conv = inverse_fourier(&SpectralFunction::from_complex(group, sq));
    // conv = |G|⁻¹ Σ_η χ_U(η) χ_U(ξ − η); counts are integers
    let n = S::from_count(group.len());
    conv.values().iter().map(|v| (v.re * n).round().to_usize().unwrap_or(0)).collect()
}

pub fn fejer_system<S: Scalar>(group: &Arc<Group<S>>, window: &SpectrumWindow) -> FejerSystem<S> {
    let counts = autocorrelation_counts(group, window.set());
    let size = S::from_count(window.len());
    let multiplier: Vec<S> = counts.iter().map(|&c| S::from_count(c) / size).collect();
    let psi = SpectralFunction::from_real(group, &multiplier);
    let floor = -S::tol(1e-12);
    let phi = inverse_fourier(&psi).map_real(|v| {
        debug_assert!(v >= floor * S::from_count(group.len()), "Fejér kernel negative: {v}");
        if v < S::zero() {
            S::zero()
        } else {
            v
        }
    });
    FejerSystem { psi, phi, multiplier }
}

/// Conditions `U_n` has to satisfy.
pub struct WindowConstraints<'a, S: Scalar> {
    pub search: WindowSearch,
    pub previous: Option<&'a SpectrumWindow>,
    /// `‖Φ_U ∗ f − f‖₁ < rho` for each target.
    pub l1_targets: &'a [GroupFunction<S>],
    pub rho: S,
    /// `Φ_U ∗ w ≤ ratio · w`.
    pub domination: Option<(&'a GroupFunction<S>, S)>,
    /// `‖Φ_U ∗ α‖₂² ≥ ½‖α‖₂²`; translates of one bump need only one entry.
    pub bumps: &'a [GroupFunction<S>],
}

impl<'a, S: Scalar> WindowConstraints<'a, S> {
    pub fn new(search: WindowSearch) -> Self {
        Self { search, previous: None, l1_targets: &[], rho: S::infinity(), domination: None, bumps: &[] }
    }
}

struct PreparedConstraints<S: Scalar> {
    targets: Vec<SpectralFunction<S>>,
    rho: S,
    domination: Option<(GroupFunction<S>, SpectralFunction<S>, S)>,
    bumps: Vec<SpectralFunction<S>>,
}

impl<S: Scalar> PreparedConstraints<S> {
    fn new(c: &WindowConstraints<'_, S>) -> Self {
        Self {
            targets: c.l1_targets.iter().map(fourier).collect(),
            rho: c.rho,
            domination: c.domination.map(|(w, r)| (w.clone(), fourier(w), r)),
            bumps: c.bumps.iter().map(fourier).collect(),
        }
    }

    fn satisfied_by(&self, psi: &[S]) -> bool {
        for fh in &self.targets {
            let diff: Vec<S> = psi.iter().map(|&p| p - S::one()).collect();
            let err = inverse_fourier(&fh.multiply(&diff)).norm_l1();
            if !(err < self.rho) {
                return false;
            }
        }
        if let Some((w, wh, ratio)) = &self.domination {
            let smoothed = inverse_fourier(&wh.multiply(psi));
            let tol = S::tol(1e-12);
            let ok = smoothed
                .values()
                .iter()
                .zip(w.values())
                .all(|(s, wv)| s.re <= *ratio * wv.re + tol);
            if !ok {
                return false;
            }
        }
        for ah in &self.bumps {
            let total = ah.norm_l2_sq();
            let kept = ah.coeffs().iter().zip(psi).fold(S::zero(), |acc, (c, &p)| acc + c.norm_sqr() * p * p);
            if kept < S::lit(0.5) * total - S::tol(1e-14) {
                return false;
            }
        }
        true
    }
}

/// Candidate ladder for a search style, smallest first. The last rung is `Γ`.
fn candidates<S: Scalar>(group: &Group<S>, search: WindowSearch) -> Vec<SpectrumWindow> {
    match search {
        WindowSearch::Interval => {
            let top = group.orders().iter().map(|&n| n / 2).max().unwrap_or(0);
            (0..=top).map(|s| SpectrumWindow::interval_uniform(group, s)).collect()
        }
        WindowSearch::Subgroup => {
            (0..=group.rank()).map(|l| SpectrumWindow::subgroup(group, l).expect("level in range")).collect()
        }
    }
}

pub fn window_satisfies<S: Scalar>(
    group: &Arc<Group<S>>,
    window: &SpectrumWindow,
    constraints: &WindowConstraints<'_, S>,
) -> bool {
    let prepared = PreparedConstraints::new(constraints);
    prepared.satisfied_by(fejer_system(group, window).multiplier())
}

/// Smallest window on the ladder that contains the previous window and meets
/// every constraint. The ladder is probed at doubling offsets from the
/// starting rung, then scanned rung by rung inside the last bracket, which
/// keeps the result monotone in the budgets.
pub fn select_window<S: Scalar>(group: &Arc<Group<S>>, constraints: &WindowConstraints<'_, S>) -> SpectrumWindow {
    let ladder = candidates(group, constraints.search);
    let start = match constraints.previous {
        Some(prev) => ladder.iter().position(|w| w.contains_window(prev)).unwrap_or(ladder.len() - 1),
        None => 0,
    };
    let prepared = PreparedConstraints::new(constraints);
    let ok = |i: usize| prepared.satisfied_by(fejer_system(group, &ladder[i]).multiplier());

    let last = ladder.len() - 1;
    if ok(start) {
        return ladder[start].clone();
    }
    let mut lo = start;
    let mut step = 1;
    let hi = loop {
        let probe = (start + step).min(last);
        if probe == last || ok(probe) {
            break probe;
        }
        lo = probe;
        step *= 2;
    };
    if let Some(i) = (lo + 1..hi).find(|&i| ok(i)) {
        return ladder[i].clone();
    }
    // Γ always qualifies when every budget is positive
    ladder[hi].clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionStyle {
    Triangle,
    Coset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockSpec {
    /// `V = Π_j {−b_j..b_j}`, `(2b_j + 1) | N_j`, centers on the lattice of
    /// multiples of `2b_j + 1`.
    Triangle { half: Vec<usize> },
    /// `V = {x : x_k = 0 for k < level}`; its cosets are contiguous blocks.
    Coset { level: usize },
}

/// Bumps `α_i(t) = (χ_V ∗ χ_V)(t − x_i)/|V|` for a tiling family `x_i + V`.
///
/// Bumps are stored as one prototype centered at zero plus the list of
/// centers; `bump(i)` materializes a translate.
#[derive(Clone, Debug)]
pub struct Partition<S: Scalar> {
    group: Arc<Group<S>>,
    spec: BlockSpec,
    block: ElementSet,
    centers: Vec<usize>,
    prototype: GroupFunction<S>,
    proto_support: Vec<(usize, S)>,
    dimension: usize,
}

impl<S: Scalar> Partition<S> {
    pub fn style(&self) -> PartitionStyle {
        match self.spec {
            BlockSpec::Triangle { .. } => PartitionStyle::Triangle,
            BlockSpec::Coset { .. } => PartitionStyle::Coset,
        }
    }

    pub fn spec(&self) -> &BlockSpec {
        &self.spec
    }

    pub fn block(&self) -> &ElementSet {
        &self.block
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn prototype(&self) -> &GroupFunction<S> {
        &self.prototype
    }

    /// `d` in the multiplicity bound `2^d`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bump(&self, i: usize) -> GroupFunction<S> {
        let g = &self.group;
        let x0 = self.centers[i];
        let mut vals = vec![S::zero(); g.len()];
        for &(off, v) in &self.proto_support {
            vals[g.add(off, x0)] = v;
        }
        GroupFunction::from_real(g, &vals)
    }

    /// `Σ_i c_i α_i`.
    pub fn combine(&self, coeffs: &[S]) -> GroupFunction<S> {
        assert_eq!(coeffs.len(), self.centers.len());
        let g = &self.group;
        let mut vals = vec![S::zero(); g.len()];
        for (&x0, &c) in self.centers.iter().zip(coeffs) {
            if c == S::zero() {
                continue;
            }
            for &(off, v) in &self.proto_support {
                let x = g.add(off, x0);
                vals[x] = vals[x] + c * v;
            }
        }
        GroupFunction::from_real(g, &vals)
    }

    /// Largest number of bump supports through a single point.
    pub fn multiplicity(&self) -> usize {
        let g = &self.group;
        let mut count = vec![0usize; g.len()];
        for &x0 in &self.centers {
            for &(off, _) in &self.proto_support {
                count[g.add(off, x0)] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// Normalized Haar measure of `V`.
    pub fn block_measure(&self) -> S {
        S::from_count(self.block.len()) / S::from_count(self.group.len())
    }
}

fn odd_divisors(n: usize) -> Vec<usize> {
    (1..=n).step_by(2).filter(|m| n.is_multiple_of(*m)).collect()
}

pub fn covering_partition<S: Scalar>(group: &Arc<Group<S>>, spec: &BlockSpec) -> Result<Partition<S>> {
    let g = group;
    match spec {
        BlockSpec::Triangle { half } => {
            if half.len() != g.rank() {
                return Err(Error::InvalidWindow(format!("{} half sizes for rank {}", half.len(), g.rank())));
            }
            for (&b, &n) in half.iter().zip(g.orders()) {
                if n % (2 * b + 1) != 0 {
                    return Err(Error::NonDividingBlock { half: b, order: n });
                }
            }
            // per-factor profile #(V_j ∩ (d − V_j)) / |V_j|, wrap-around included
            let profiles: Vec<Vec<S>> = half
                .iter()
                .zip(g.orders())
                .map(|(&b, &n)| {
                    let seg: Vec<usize> = (0..=2 * b).map(|k| (n + k - b) % n).collect();
                    let member = |y: usize| seg.contains(&y);
                    (0..n)
                        .map(|d| {
                            let c = seg.iter().filter(|&&y| member((d + n - y) % n)).count();
                            S::from_count(c) / S::from_count(2 * b + 1)
                        })
                        .collect()
                })
                .collect();
            let prototype = GroupFunction::from_fn(g, |x| {
                g.coords(x).iter().zip(&profiles).fold(S::one(), |acc, (&c, p)| acc * p[c])
            });
            let block = IndexSet::from_predicate(g.len(), |x| {
                g.signed_coords(x).iter().zip(half).all(|(&c, &b)| c.unsigned_abs() as usize <= b)
            });
            let centers: Vec<usize> = (0..g.len())
                .filter(|&x| g.coords(x).iter().zip(half).all(|(&c, &b)| c % (2 * b + 1) == 0))
                .collect();
            Ok(Partition::assemble(g, spec.clone(), block, centers, prototype, g.dimension()))
        }
        BlockSpec::Coset { level } => {
            if *level > g.rank() {
                return Err(Error::InvalidWindow(format!("coset level {level} exceeds rank {}", g.rank())));
            }
            let block = IndexSet::from_predicate(g.len(), |x| g.coords(x)[..*level].iter().all(|&c| c == 0));
            let prototype = GroupFunction::indicator(g, &block);
            let centers: Vec<usize> =
                (0..g.len()).filter(|&x| g.coords(x)[*level..].iter().all(|&c| c == 0)).collect();
            Ok(Partition::assemble(g, spec.clone(), block, centers, prototype, 0))
        }
    }
}

impl<S: Scalar> Partition<S> {
    fn assemble(
        group: &Arc<Group<S>>,
        spec: BlockSpec,
        block: ElementSet,
        centers: Vec<usize>,
        prototype: GroupFunction<S>,
        dimension: usize,
    ) -> Self {
        let proto_support =
            prototype.values().iter().enumerate().filter(|(_, v)| v.re > S::zero()).map(|(i, v)| (i, v.re)).collect();
        Self { group: Arc::clone(group), spec, block, centers, prototype, proto_support, dimension }
    }
}

/// Block ladder for `build_h`, coarsest first, each rung roughly half the
/// previous one per factor, ending at point masses.
pub fn block_ladder<S: Scalar>(group: &Group<S>, style: PartitionStyle) -> Vec<BlockSpec> {
    match style {
        PartitionStyle::Coset => (0..=group.rank()).map(|level| BlockSpec::Coset { level }).collect(),
        PartitionStyle::Triangle => {
            let divs: Vec<Vec<usize>> = group.orders().iter().map(|&n| odd_divisors(n)).collect();
            let mut out: Vec<BlockSpec> = Vec::new();
            let mut level = 0u32;
            loop {
                let half: Vec<usize> = divs
                    .iter()
                    .map(|d| {
                        let top = *d.last().expect("1 divides n");
                        let target = (top >> level.min(63)).max(1);
                        let m = d.iter().copied().filter(|&m| m <= target).max().unwrap_or(1);
                        (m - 1) / 2
                    })
                    .collect();
                let done = half.iter().all(|&b| b == 0);
                let spec = BlockSpec::Triangle { half };
                if out.last() != Some(&spec) {
                    out.push(spec);
                }
                if done {
                    break;
                }
                level += 1;
            }
            out
        }
    }
}
