//! Independent verification of run outputs and the log-law sweep.
//!
//! Every figure is recomputed from raw outputs (`a`, `b`, `w`, `f_final`,
//! `f_0^{(0)}`, `K`, `R`, `S`) with fresh transforms and sums.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{run, ConstructionOptions, Schedules};
use crate::error::{Error, Result};
use crate::group::{fourier, inverse_fourier, GroupFunction};
use crate::scalar::Scalar;
use crate::set::{ElementSet, SpectrumSet};
use crate::spectral::{splits, EnumeratedBasis, SufficientPair};

/// Coefficients at or below this magnitude do not count as spectrum.
pub const SPECTRUM_THRESHOLD: f64 = 1e-10;
/// Slack on the partial-sum bounds.
pub const PARTIAL_SUM_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub epsilon: f64,
    pub t_final: f64,
    pub iterations: usize,
    /// `∫_{a△b} w²`.
    pub sym_diff_weighted: f64,
    /// `sym_diff_weighted / ε`.
    pub measured_constant: f64,
    pub spectrum_ok: bool,
    pub offenders: Vec<usize>,
    /// `max ‖P_B f‖_∞` over members `B ⊇ K`.
    pub usup_inside: f64,
    /// `t · max w + 3`.
    pub usup_inside_bound: f64,
    /// `max ‖P_B f‖_∞` over members splitting `supp 𝓕f_0^{(0)}`.
    pub usup_splitting: f64,
    /// `‖𝓕f_0^{(0)}‖₁`.
    pub l1_bound_f00: f64,
    pub partial_sums_ok: bool,
    pub u_norm: f64,
    /// `max(|∫f_final − ∫_a w|, |∫f_0^{(0)} − ∫_a w|)`.
    pub conservation_residual: f64,
    /// `|t ∫_b w − ∫_a w|`.
    pub extraction_residual: f64,
    /// `2‖g‖₁`, which bounds the extraction residual.
    pub extraction_bound: f64,
    /// `‖g‖₂ / ‖χ_a w‖₂` for `g` built from `f_final`.
    pub g_residual: f64,
    /// `|b| − |a|` for the unit weight.
    pub card_diff: Option<i64>,
    /// Set when `||b| − |a||/|G|` exceeds `2‖g‖₁`.
    pub card_flag: bool,
}

pub struct ReportInputs<'a, S: Scalar> {
    pub a: &'a ElementSet,
    pub b: &'a ElementSet,
    pub w: &'a GroupFunction<S>,
    pub f_final: &'a GroupFunction<S>,
    pub f00: &'a GroupFunction<S>,
    pub k_set: &'a SpectrumSet,
    pub r: &'a SpectrumSet,
    pub s: &'a SpectrumSet,
    pub basis: &'a EnumeratedBasis,
    pub t_final: S,
    pub epsilon: S,
    pub iterations: usize,
}

/// `∫_{a△b} w²` under the normalized measure.
pub fn sym_diff_weighted<S: Scalar>(a: &ElementSet, b: &ElementSet, w: &GroupFunction<S>) -> S {
    let n = S::from_count(w.values().len());
    a.symmetric_difference(b).iter().fold(S::zero(), |acc, x| acc + w.get(x).norm_sqr()) / n
}

/// Characters with `|𝓕f| > 1e-10` outside `K ∪ R ∪ S`.
pub fn spectrum_within<S: Scalar>(
    f: &GroupFunction<S>,
    k: &SpectrumSet,
    r: &SpectrumSet,
    s: &SpectrumSet,
) -> (bool, Vec<usize>) {
    let support = fourier(f).support(S::lit(SPECTRUM_THRESHOLD));
    let offenders: Vec<usize> = support.iter().filter(|&g| !(k.contains(g) || r.contains(g) || s.contains(g))).collect();
    (offenders.is_empty(), offenders)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialSumReport {
    /// `‖P_B f‖_∞` per basis member.
    pub per_member: Vec<f64>,
    pub inside: Vec<usize>,
    pub splitting: Vec<usize>,
    pub usup_inside: f64,
    pub usup_splitting: f64,
    pub l1_bound_f00: f64,
    pub inside_bound: f64,
    pub u_norm: f64,
}

impl PartialSumReport {
    pub fn inside_ok(&self) -> bool {
        self.usup_inside <= self.inside_bound + PARTIAL_SUM_SLACK
    }

    pub fn splitting_ok(&self) -> bool {
        self.usup_splitting <= self.l1_bound_f00 + PARTIAL_SUM_SLACK
    }
}

/// Sup norms of every partial sum, classified into `B ⊇ K` and `B` splitting
/// `supp 𝓕f_0^{(0)}`.
pub fn partial_sum_report<S: Scalar>(
    f_final: &GroupFunction<S>,
    f00: &GroupFunction<S>,
    k_set: &SpectrumSet,
    basis: &EnumeratedBasis,
    t_final: S,
    max_w: S,
) -> PartialSumReport {
    let fh = fourier(f_final);
    let f00h = fourier(f00);
    let spec0 = f00h.support(S::lit(SPECTRUM_THRESHOLD));
    let per_member: Vec<f64> =
        basis.members.par_iter().map(|b| inverse_fourier(&fh.restrict(b)).norm_sup().as_f64()).collect();
    let inside: Vec<usize> = (0..basis.members.len()).filter(|&i| k_set.is_subset(&basis.members[i])).collect();
    let splitting: Vec<usize> = (0..basis.members.len()).filter(|&i| splits(&basis.members[i], &spec0)).collect();
    let max_over = |idx: &[usize]| idx.iter().map(|&i| per_member[i]).fold(0.0, f64::max);
    let usup_inside = max_over(&inside);
    let usup_splitting = max_over(&splitting);
    let sup_all = per_member.iter().copied().fold(0.0, f64::max);
    PartialSumReport {
        usup_inside,
        usup_splitting,
        l1_bound_f00: f00h.norm_l1().as_f64(),
        inside_bound: (t_final * max_w).as_f64() + 3.0,
        u_norm: sup_all + f_final.norm_l1().as_f64(),
        per_member,
        inside,
        splitting,
    }
}

pub fn report<S: Scalar>(inp: &ReportInputs<'_, S>) -> Result<Report> {
    let w = inp.w;
    let group = w.group();
    let n = group.len();
    if inp.a.universe() != n || inp.b.universe() != n || !inp.f_final.same_group(w) || !inp.f00.same_group(w) {
        return Err(Error::GroupMismatch);
    }
    let eps = inp.epsilon.as_f64();
    let sym = sym_diff_weighted(inp.a, inp.b, w).as_f64();
    let (spectrum_ok, offenders) = spectrum_within(inp.f_final, inp.k_set, inp.r, inp.s);
    let max_w = w.max_re();
    let ps = partial_sum_report(inp.f_final, inp.f00, inp.k_set, inp.basis, inp.t_final, max_w);

    let nn = n as f64;
    let mass_a = inp.a.iter().map(|x| w.re_at(x).as_f64()).sum::<f64>() / nn;
    let mass_b = inp.b.iter().map(|x| w.re_at(x).as_f64()).sum::<f64>() / nn;
    let conservation_residual = (inp.f_final.integral().re.as_f64() - mass_a)
        .abs()
        .max((inp.f00.integral().re.as_f64() - mass_a).abs());

    let t = inp.t_final.as_f64();
    let mut g_l1 = 0.0;
    let mut g_l2 = 0.0;
    for x in 0..n {
        let top = t * w.re_at(x).as_f64();
        let v = inp.f_final.re_at(x).as_f64().clamp(0.0, top);
        let g = v * (1.0 - v / top);
        g_l1 += g;
        g_l2 += g * g;
    }
    g_l1 /= nn;
    let g_l2 = (g_l2 / nn).sqrt();
    let a_l2 = (inp.a.iter().map(|x| w.re_at(x).as_f64().powi(2)).sum::<f64>() / nn).sqrt();

    let unit = w.values().iter().all(|v| v.re == S::one() && v.im == S::zero());
    let card_diff = unit.then(|| inp.b.len() as i64 - inp.a.len() as i64);
    let card_flag = card_diff.is_some_and(|d| (d.unsigned_abs() as f64) / nn > 2.0 * g_l1 + 1e-12);

    Ok(Report {
        epsilon: eps,
        t_final: t,
        iterations: inp.iterations,
        sym_diff_weighted: sym,
        measured_constant: sym / eps,
        spectrum_ok,
        offenders,
        usup_inside: ps.usup_inside,
        usup_inside_bound: ps.inside_bound,
        usup_splitting: ps.usup_splitting,
        l1_bound_f00: ps.l1_bound_f00,
        partial_sums_ok: ps.inside_ok() && ps.splitting_ok(),
        u_norm: ps.u_norm,
        conservation_residual,
        extraction_residual: (t * mass_b - mass_a).abs(),
        extraction_bound: 2.0 * g_l1,
        g_residual: if a_l2 > 0.0 { g_l2 / a_l2 } else { 0.0 },
        card_diff,
        card_flag,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub u_norm: Option<f64>,
    /// `log(2 + ε⁻¹ ∫_a w)`.
    pub log_term: f64,
    pub ratio: Option<f64>,
    pub iterations: Option<usize>,
    pub runtime_ms: u64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitVerdict {
    /// `"ok"`, `"failed"` or `"insufficient points"`.
    pub status: String,
    pub points: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    /// `max_ratio / min_ratio`.
    pub spread: Option<f64>,
    pub slope_ok: bool,
    pub spread_ok: bool,
    pub passed: bool,
}

/// Minimum number of successful rows for a fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares slope of `u_norm` against the log term, required to be at
/// most twice the smallest ratio; the ratio spread must stay within 2.
pub fn fit_log_law(rows: &[SweepRow]) -> FitVerdict {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.log_term, r.u_norm?, r.ratio?)))
        .collect();
    let ratios = || pts.iter().map(|p| p.2);
    let min_ratio = ratios().reduce(f64::min);
    let max_ratio = ratios().reduce(f64::max);
    let spread = min_ratio.zip(max_ratio).map(|(lo, hi)| hi / lo);
    if pts.len() < MIN_FIT_POINTS {
        return FitVerdict {
            status: "insufficient points".into(),
            points: pts.len(),
            slope: None,
            intercept: None,
            min_ratio,
            max_ratio,
            spread,
            slope_ok: false,
            spread_ok: false,
            passed: false,
        };
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let min_r = min_ratio.expect("non-empty");
    let slope_ok = slope <= 2.0 * min_r;
    let spread_ok = spread.is_some_and(|s| s <= 2.0);
    let passed = slope_ok && spread_ok;
    FitVerdict {
        status: if passed { "ok" } else { "failed" }.into(),
        points: pts.len(),
        slope: Some(slope),
        intercept: Some(my - slope * mx),
        min_ratio,
        max_ratio,
        spread,
        slope_ok,
        spread_ok,
        passed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub fit: FitVerdict,
}

pub struct SweepSpec<'a, S: Scalar> {
    pub a: &'a ElementSet,
    pub w: &'a GroupFunction<S>,
    pub pair: &'a SufficientPair,
    pub basis: &'a EnumeratedBasis,
    pub n_max: usize,
    pub g_tol: S,
    pub options: &'a ConstructionOptions,
}

/// One pipeline run per `ε` (rows run concurrently), tabulating
/// `u_norm(f_final) / log(2 + ε⁻¹ ∫_a w)`. Row failures are kept as markers.
pub fn log_law_sweep<S: Scalar>(spec: &SweepSpec<'_, S>, eps_list: &[S]) -> Result<SweepTable> {
    if eps_list.is_empty() {
        return Err(Error::InvalidSchedule("empty epsilon list".into()));
    }
    if eps_list.windows(2).any(|p| !(p[1] < p[0])) {
        return Err(Error::InvalidSchedule("epsilon list must be strictly decreasing".into()));
    }
    if spec.a.is_empty() {
        return Err(Error::EmptySet);
    }
    let w = spec.w;
    let n = w.values().len() as f64;
    let mass = spec.a.iter().map(|x| w.re_at(x).as_f64()).sum::<f64>() / n;
    let unit = w.values().iter().all(|v| v.re == S::one());
    let rows: Vec<SweepRow> = eps_list
        .par_iter()
        .map(|&eps| {
            let e = eps.as_f64();
            let log_term = (2.0 + mass / e).ln();
            let started = Instant::now();
            let outcome = Schedules::standard(eps, spec.n_max, spec.g_tol, unit)
                .and_then(|sched| run(spec.a, w, spec.pair, spec.basis, &sched, spec.options));
            let runtime_ms = started.elapsed().as_millis() as u64;
            match outcome {
                Ok(res) => SweepRow {
                    epsilon: e,
                    u_norm: Some(res.report.u_norm),
                    log_term,
                    ratio: Some(res.report.u_norm / log_term),
                    iterations: Some(res.report.iterations),
                    runtime_ms,
                    error: None,
                },
                Err(err) => SweepRow {
                    epsilon: e,
                    u_norm: None,
                    log_term,
                    ratio: None,
                    iterations: None,
                    runtime_ms,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();
    let fit = fit_log_law(&rows);
    Ok(SweepTable { rows, fit })
}
