//! The inductive engine: the triangular family `f_k^{(n)}`, character
//! selection, extraction of `b`, and the two-rail correction of bounded
//! functions.

mod bounded;
mod ops;

use std::sync::Arc;

use log::{debug, info};

pub use bounded::{correct_bounded, BoundedCorrection, BoundedOptions, PartKind, PartResult};
pub use ops::{auxiliary, build_h, find_character, threshold_truncate, HBuild};

use crate::error::{Error, Result};
use crate::group::{fourier, Group, GroupFunction};
use crate::kernels::{
    fejer_system, select_window, BlockSpec, PartitionStyle, SpectrumWindow, WindowConstraints, WindowSearch,
};
use crate::scalar::Scalar;
use crate::set::{ElementSet, IndexSet, SpectrumSet};
use crate::spectral::{is_coordinated, is_sufficient, splitting_union, AdmissibleFamily, EnumeratedBasis, SufficientPair};
use crate::verify::{self, Report, ReportInputs};

pub const DEFAULT_G_TOL: f64 = 0.05;
pub const DEFAULT_N_MAX: usize = 12;

/// Pointwise tolerance for range and sandwich checks.
const RANGE_TOL: f64 = 1e-9;
/// Tolerance for integral conservation.
const CONSERVATION_TOL: f64 = 1e-10;
/// Coefficients below this are treated as outside a spectrum when the
/// engine records supports. Deliberately far below the verifier threshold.
const SPECTRUM_TAU: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct Schedules<S: Scalar> {
    pub epsilon: S,
    /// `t_0, …, t_{n_max}`.
    pub t: Vec<S>,
    /// `ρ_0, …, ρ_{n_max}`.
    pub rho: Vec<S>,
    pub n_max: usize,
    /// Stop once `‖g_n‖₂ ≤ g_tol ‖χ_a w‖₂`.
    pub g_tol: S,
}

impl<S: Scalar> Schedules<S> {
    /// `t_n = 1 + (ε/2)(1 − 2^{−n−1})` (or `t_n ≡ 1` for the unit weight) and
    /// `ρ_n = ε² 4^{−n−2}`.
    pub fn standard(epsilon: S, n_max: usize, g_tol: S, unit_weight: bool) -> Result<Self> {
        let half = S::lit(0.5);
        let t = (0..=n_max)
            .map(|n| {
                if unit_weight {
                    S::one()
                } else {
                    S::one() + epsilon * half * (S::one() - half.powi(n as i32 + 1))
                }
            })
            .collect();
        let rho = (0..=n_max).map(|n| epsilon * epsilon * S::lit(0.25).powi(n as i32 + 2)).collect();
        Self::new(epsilon, t, rho, n_max, g_tol)
    }

    pub fn new(epsilon: S, t: Vec<S>, rho: Vec<S>, n_max: usize, g_tol: S) -> Result<Self> {
        let s = Self { epsilon, t, rho, n_max, g_tol };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSchedule(m));
        if !(self.epsilon > S::zero()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.g_tol >= S::zero()) {
            return bad("g_tol must be non-negative".into());
        }
        if self.t.len() <= self.n_max || self.rho.len() <= self.n_max {
            return bad(format!("t and rho need at least n_max + 1 = {} entries", self.n_max + 1));
        }
        let t = &self.t[..=self.n_max];
        let unit = t.iter().all(|&v| v == S::one());
        if !unit {
            if t.iter().any(|&v| !(v > S::one() && v <= S::one() + self.epsilon)) {
                return bad("every t_n must lie in (1, 1 + epsilon]".into());
            }
            if t.windows(2).any(|p| !(p[1] > p[0])) {
                return bad("t must be strictly increasing".into());
            }
        }
        let rho = &self.rho[..=self.n_max];
        if rho.iter().any(|&r| !(r > S::zero())) {
            return bad("every rho_n must be positive".into());
        }
        let root_sum = rho.iter().fold(S::zero(), |acc, &r| acc + r.sqrt());
        if !(root_sum < self.epsilon) {
            return bad(format!("sum of sqrt(rho_n) = {root_sum} is not below epsilon"));
        }
        Ok(())
    }

    pub fn t_at(&self, n: usize) -> S {
        self.t[n]
    }

    pub fn rho_at(&self, n: usize) -> S {
        self.rho[n]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionOptions {
    pub window_search: WindowSearch,
    pub partition_style: PartitionStyle,
    /// Check sufficiency and coordination of the pair before starting.
    pub checks: bool,
    /// Probe sets for the coordination check; the pair's own family if unset.
    pub probes: Option<AdmissibleFamily>,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        Self {
            window_search: WindowSearch::Interval,
            partition_style: PartitionStyle::Triangle,
            checks: true,
            probes: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BumpRecord {
    pub bump: usize,
    pub center: usize,
    pub coeff: f64,
    pub gamma: usize,
}

#[derive(Clone, Debug)]
pub struct StepTrace {
    pub level: usize,
    pub window: SpectrumWindow,
    pub block: Option<BlockSpec>,
    pub delta: f64,
    /// `‖g_n‖₂` of the function the step started from.
    pub g_norm: f64,
    pub h_norm_sq: f64,
    pub coeff_energy: f64,
    pub bumps: Vec<BumpRecord>,
    pub retried: bool,
    pub conservation_residual: f64,
}

/// Single-owner state of a run; mutated only by [`ConstructionState::step`].
#[derive(Clone, Debug)]
pub struct ConstructionState<S: Scalar> {
    pub group: Arc<Group<S>>,
    pub a: ElementSet,
    pub w: GroupFunction<S>,
    pub pair: SufficientPair,
    pub basis: EnumeratedBasis,
    pub schedules: Schedules<S>,
    pub options: ConstructionOptions,
    /// Current level `n`.
    pub level: usize,
    /// `f_0^{(n)}, …, f_n^{(n)}`.
    pub row: Vec<GroupFunction<S>>,
    pub windows: Vec<SpectrumWindow>,
    pub k_set: SpectrumSet,
    pub f00: GroupFunction<S>,
    /// Recorded spectrum of `f_0^{(0)}` followed by one entry per increment.
    pub spectra: Vec<SpectrumSet>,
    pub forbidden: SpectrumSet,
    pub trace: Vec<StepTrace>,
    target_mass: S,
    a_norm: S,
    rs: SpectrumSet,
}

fn validate_weight<S: Scalar>(w: &GroupFunction<S>) -> Result<()> {
    let imag = w.max_imag();
    if imag > S::tol(1e-12) {
        return Err(Error::InvalidWeight(format!("weight has imaginary part {:e}", imag.as_f64())));
    }
    let (lo, hi) = (w.min_re(), w.max_re());
    if !(lo > S::zero()) {
        return Err(Error::InvalidWeight(format!("weight must be positive, minimum is {lo}")));
    }
    if hi > S::lit(2.0) + S::tol(1e-12) {
        return Err(Error::InvalidWeight(format!("weight exceeds 2 (maximum {hi})")));
    }
    Ok(())
}

impl<S: Scalar> ConstructionState<S> {
    /// Level 0: picks `U_0`, sets `f_0^{(0)} = Φ_{U_0} ∗ (χ_a w)` and `K = U_0 + U_0`.
    pub fn init(
        a: &ElementSet,
        w: &GroupFunction<S>,
        pair: &SufficientPair,
        basis: &EnumeratedBasis,
        schedules: &Schedules<S>,
        options: &ConstructionOptions,
    ) -> Result<Self> {
        let group = Arc::clone(w.group());
        if a.universe() != group.len() || pair.r.universe() != group.len() || pair.s.universe() != group.len() {
            return Err(Error::GroupMismatch);
        }
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        validate_weight(w)?;
        schedules.validate()?;
        if options.checks {
            let rep = is_sufficient(&group, pair);
            if let Some(e) = rep.first_failure() {
                return Err(Error::PairNotSufficient { center: e.center, half_widths: e.half_widths.clone() });
            }
            let probes = options.probes.as_ref().unwrap_or(&pair.family);
            let coord = is_coordinated(&group, basis, pair, probes);
            if let Some(e) = coord.counterexample {
                return Err(Error::NotCoordinated { center: e.center, half_widths: e.half_widths });
            }
        }

        let chi_w = GroupFunction::from_fn(&group, |x| if a.contains(x) { w.re_at(x) } else { S::zero() });
        let target_mass = chi_w.integral().re;
        let a_norm = chi_w.norm_l2();
        let t0 = schedules.t_at(0);
        let targets = [chi_w.clone()];
        let constraints = WindowConstraints {
            search: options.window_search,
            previous: None,
            l1_targets: &targets,
            rho: schedules.rho_at(0),
            domination: Some((w, t0)),
            bumps: &[],
        };
        let window = select_window(&group, &constraints);
        let fejer = fejer_system(&group, &window);
        let f00 = fejer.smooth(&chi_w).re();
        let k_set = fejer.support();
        let spec0 = fourier(&f00).support(S::lit(SPECTRUM_TAU)).intersection(&k_set);
        let mut forbidden = k_set.union(&splitting_union(&k_set, basis));
        forbidden.union_with(&splitting_union(&spec0, basis));
        info!(
            "init: |G| = {}, |a| = {}, |U_0| = {}, |K| = {}",
            group.len(),
            a.len(),
            window.len(),
            k_set.len()
        );
        let state = Self {
            rs: pair.union(),
            group,
            a: a.clone(),
            w: w.clone(),
            pair: pair.clone(),
            basis: basis.clone(),
            schedules: schedules.clone(),
            options: options.clone(),
            level: 0,
            row: vec![f00.clone()],
            windows: vec![window],
            k_set,
            f00,
            spectra: vec![spec0],
            forbidden,
            trace: Vec::new(),
            target_mass,
            a_norm,
        };
        state.check_invariants(None)?;
        Ok(state)
    }

    pub fn current(&self) -> &GroupFunction<S> {
        self.row.last().expect("row is never empty")
    }

    pub fn t_current(&self) -> S {
        self.schedules.t_at(self.level)
    }

    /// `∫_a w`.
    pub fn target_mass(&self) -> S {
        self.target_mass
    }

    /// `g` of the current level, relative to `‖χ_a w‖₂`.
    pub fn g_residual(&self) -> Result<S> {
        let g = auxiliary(self.current(), self.t_current(), &self.w)?;
        Ok(g.norm_l2() / self.a_norm)
    }

    /// Increments `f_0^{(n)}, f_1^{(n)} − f_0^{(n)}, …`.
    pub fn increments(&self) -> Vec<GroupFunction<S>> {
        let mut out = vec![self.row[0].clone()];
        for k in 1..self.row.len() {
            out.push(&self.row[k] - &self.row[k - 1]);
        }
        out
    }

    /// Level `n − 1` to level `n`.
    pub fn step(&mut self) -> Result<()> {
        let n = self.level + 1;
        if n > self.schedules.n_max {
            return Err(Error::InvalidSchedule(format!("level {n} is beyond n_max")));
        }
        let t_prev = self.schedules.t_at(n - 1);
        let t_n = self.schedules.t_at(n);
        let f_last = self.current().clone();
        let g = auxiliary(&f_last, t_prev, &self.w)?;
        let (delta, g_trunc) = match threshold_truncate(&g) {
            Ok(x) => x,
            Err(Error::ZeroFunction) => (S::zero(), GroupFunction::zeros(&self.group)),
            Err(e) => return Err(e),
        };
        let built = build_h(&g_trunc, &g, self.options.partition_style).map_err(|e| match e {
            Error::PartitionExhausted { .. } => Error::PartitionExhausted { level: n },
            other => other,
        })?;
        let bumps = if built.is_zero() { vec![] } else { vec![built.partition.prototype().clone()] };
        let ratio = t_n / t_prev;
        let previous = self.windows.last().expect("window history is never empty").clone();
        let mut constraints = WindowConstraints {
            search: self.options.window_search,
            previous: Some(&previous),
            l1_targets: &self.row,
            rho: self.schedules.rho_at(n),
            domination: Some((&self.w, ratio)),
            bumps: &bumps,
        };
        let window = select_window(&self.group, &constraints);
        let staged = match self.stage(n, &window, &built) {
            Ok(s) => s,
            Err(Error::SpectrumExhausted { .. }) if !bumps.is_empty() => {
                constraints.bumps = &[];
                let relaxed = select_window(&self.group, &constraints);
                if relaxed == window {
                    return Err(Error::SpectrumExhausted { level: n, bump: 0 });
                }
                debug!("level {n}: retrying with |U| = {} instead of {}", relaxed.len(), window.len());
                let mut s = self.stage(n, &relaxed, &built)?;
                s.retried = true;
                s
            }
            Err(e) => return Err(e),
        };

        let fejer = fejer_system(&self.group, &staged.window);
        let lower = fejer.smooth(&(&f_last - &g)).re();
        let upper = fejer.smooth(&(&f_last + &g)).re();

        self.level = n;
        self.row = staged.row;
        self.windows.push(staged.window.clone());
        self.spectra.push(staged.spectrum);
        self.forbidden = staged.forbidden;
        let conservation = self.conservation_residual();
        self.trace.push(StepTrace {
            level: n,
            window: staged.window,
            block: Some(built.partition.spec().clone()),
            delta: delta.as_f64(),
            g_norm: g.norm_l2().as_f64(),
            h_norm_sq: built.h.norm_l2_sq().as_f64(),
            coeff_energy: built.coeff_energy.as_f64(),
            bumps: staged.bumps,
            retried: staged.retried,
            conservation_residual: conservation.as_f64(),
        });
        let last = self.trace.last().expect("just pushed");
        debug!(
            "level {n}: |U| = {}, block {:?}, {} bumps, delta = {:e}, |g| = {:e}",
            last.window.len(),
            last.block,
            last.bumps.len(),
            last.delta,
            last.g_norm
        );
        self.check_invariants(Some((&lower, &upper)))
    }

    /// Everything a step produces for a given window, without touching the state.
    fn stage(&self, n: usize, window: &SpectrumWindow, built: &HBuild<S>) -> Result<Staged<S>> {
        let group = &self.group;
        let fejer = fejer_system(group, window);
        let mut row: Vec<GroupFunction<S>> = self.row.iter().map(|f| fejer.smooth(f).re()).collect();
        let mut forbidden = self.forbidden.clone();
        let mut spectrum = IndexSet::empty(group.len());
        let mut increment = GroupFunction::zeros(group);
        let mut bumps = Vec::new();
        if !built.is_zero() {
            let beta_proto = fejer.smooth(built.partition.prototype()).re();
            let tau = S::lit(SPECTRUM_TAU);
            let beta_spec = fourier(&beta_proto).support(tau).intersection(&fejer.support());
            let square_spec = fourier(&(&beta_proto * &beta_proto)).support(tau);
            for i in built.active() {
                let found = find_character(group, &beta_spec, &square_spec, &self.rs, &forbidden);
                let Some((gamma, e)) = found else {
                    debug!(
                        "level {n}: no character for bump {i} (|U| = {}, |supp β| = {}, |forbidden| = {})",
                        window.len(),
                        beta_spec.len(),
                        forbidden.len()
                    );
                    return Err(Error::SpectrumExhausted { level: n, bump: i });
                };
                forbidden.union_with(&e);
                forbidden.union_with(&splitting_union(&e, &self.basis));
                spectrum.union_with(&e);
                let center = built.partition.centers()[i];
                let c = built.coeffs[i];
                let modulated = crate::group::modulate_real(&beta_proto.translate(center), gamma)?;
                increment = &increment + &modulated.scale(c);
                bumps.push(BumpRecord { bump: i, center, coeff: c.as_f64(), gamma });
            }
        }
        let next = &row[row.len() - 1] + &increment;
        row.push(next);
        Ok(Staged { window: window.clone(), row, spectrum, forbidden, bumps, retried: false })
    }

    /// Largest `|∫ f_k^{(n)} − ∫_a w|` over the current row.
    pub fn conservation_residual(&self) -> S {
        self.row.iter().map(|f| (f.integral().re - self.target_mass).abs()).fold(S::zero(), S::max)
    }

    fn violation(&self, what: String) -> Error {
        Error::InvariantViolation { level: self.level, what }
    }

    fn check_invariants(&self, sandwich: Option<(&GroupFunction<S>, &GroupFunction<S>)>) -> Result<()> {
        let tol = S::tol(RANGE_TOL);
        let t = self.t_current();
        for (k, f) in self.row.iter().enumerate() {
            for (x, (v, w)) in f.values().iter().zip(self.w.values()).enumerate() {
                if v.re < -tol || v.re > t * w.re + tol {
                    return Err(self.violation(format!("f_{k} = {} at {x} outside [0, t w]", v.re)));
                }
            }
        }
        let scale = S::one().max(self.target_mass);
        let cons = self.conservation_residual();
        if cons > S::tol(CONSERVATION_TOL) * scale {
            return Err(self.violation(format!("integral drift {:e}", cons.as_f64())));
        }
        if !self.spectra[0].is_subset(&self.k_set) {
            return Err(self.violation("spectrum of f_0 leaves K".into()));
        }
        for (k, s) in self.spectra.iter().enumerate().skip(1) {
            if !s.is_subset(&self.rs) {
                return Err(self.violation(format!("spectrum of increment {k} leaves R ∪ S")));
            }
            for (j, earlier) in self.spectra[..k].iter().enumerate() {
                if s.intersects(earlier) {
                    return Err(self.violation(format!("spectra of increments {j} and {k} overlap")));
                }
            }
        }
        if let Some((lower, upper)) = sandwich {
            let f = self.current();
            for x in 0..self.group.len() {
                let v = f.re_at(x);
                if v < lower.re_at(x) - tol || v > upper.re_at(x) + tol {
                    return Err(self.violation(format!("sandwich fails at {x}")));
                }
            }
        }
        Ok(())
    }
}

struct Staged<S: Scalar> {
    window: SpectrumWindow,
    row: Vec<GroupFunction<S>>,
    spectrum: SpectrumSet,
    forbidden: SpectrumSet,
    bumps: Vec<BumpRecord>,
    retried: bool,
}

#[derive(Clone, Debug)]
pub struct CorrectionResult<S: Scalar> {
    pub b: ElementSet,
    pub f_final: GroupFunction<S>,
    pub t_final: S,
    pub report: Report,
    pub state: ConstructionState<S>,
}

impl<S: Scalar> CorrectionResult<S> {
    pub fn k_set(&self) -> &SpectrumSet {
        &self.state.k_set
    }

    pub fn pair(&self) -> &SufficientPair {
        &self.state.pair
    }

    /// `χ_b w`.
    pub fn corrected(&self) -> GroupFunction<S> {
        let w = &self.state.w;
        GroupFunction::from_fn(w.group(), |x| if self.b.contains(x) { w.re_at(x) } else { S::zero() })
    }

    pub fn report_inputs(&self) -> ReportInputs<'_, S> {
        let st = &self.state;
        ReportInputs {
            a: &st.a,
            b: &self.b,
            w: &st.w,
            f_final: &self.f_final,
            f00: &st.f00,
            k_set: &st.k_set,
            r: &st.pair.r,
            s: &st.pair.s,
            basis: &st.basis,
            t_final: self.t_final,
            epsilon: st.schedules.epsilon,
            iterations: st.level,
        }
    }
}

/// `b = {x : f(x) > t w(x)/2}`.
pub fn extract<S: Scalar>(f: &GroupFunction<S>, t: S, w: &GroupFunction<S>) -> ElementSet {
    let half = S::lit(0.5);
    IndexSet::from_predicate(f.group().len(), |x| f.re_at(x) > t * w.re_at(x) * half)
}

/// Steps until `‖g_n‖₂ ≤ g_tol ‖χ_a w‖₂`, then extracts `b` and attaches a
/// freshly computed report.
pub fn run<S: Scalar>(
    a: &ElementSet,
    w: &GroupFunction<S>,
    pair: &SufficientPair,
    basis: &EnumeratedBasis,
    schedules: &Schedules<S>,
    options: &ConstructionOptions,
) -> Result<CorrectionResult<S>> {
    let mut state = ConstructionState::init(a, w, pair, basis, schedules, options)?;
    loop {
        let residual = state.g_residual()?;
        if residual <= schedules.g_tol {
            info!("converged at level {} (g residual {:e})", state.level, residual.as_f64());
            break;
        }
        if state.level >= schedules.n_max {
            return Err(Error::NotConverged { iterations: state.level, residual: residual.as_f64() });
        }
        state.step()?;
    }
    let t_final = state.t_current();
    let f_final = state.current().clone();
    let b = extract(&f_final, t_final, &state.w);
    let mut result = CorrectionResult { b, f_final, t_final, report: Report::default(), state };
    result.report = verify::report(&result.report_inputs())?;
    Ok(result)
}
