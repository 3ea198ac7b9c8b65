//! JSON run configuration and its resolution into core objects.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use scf_core::construction::{ConstructionOptions, DEFAULT_G_TOL, DEFAULT_N_MAX};
use scf_core::kernels::{PartitionStyle, WindowSearch};
use scf_core::spectral::{
    gapped_blocks, AdmissibleFamily, BlockOrder, EnumeratedBasis, SufficientPair, SummationBasis,
};
use scf_core::{Group, GroupFunction, IndexSet, Schedules};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Cyclic factor orders.
    pub group: Vec<usize>,
    pub a: SetSpec,
    #[serde(default)]
    pub weight: WeightSpec,
    pub pair: PairSpec,
    #[serde(default = "default_basis")]
    pub basis: SummationBasis,
    pub schedules: ScheduleSpec,
    #[serde(default)]
    pub construction: ConstructionSpec,
    /// Seed for random generators in the config.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Strictly decreasing ε values for `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
}

fn default_basis() -> SummationBasis {
    SummationBasis::SymmetricInterval
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Explicit { indices: Vec<usize> },
    /// `{start, …, start + len − 1}` in element index order.
    Interval { start: usize, len: usize },
    /// `size` distinct elements drawn with the config seed.
    Random { size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    Explicit { values: Vec<f64> },
    /// Linear in the element index from `low` to `high`.
    Ramp { low: f64, high: f64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Constant { value: 1.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// Same cap on every factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_half_widths: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_radius: Option<usize>,
}

impl FamilySpec {
    fn resolve(&self, group: &Group) -> CliResult<AdmissibleFamily> {
        let mut fam = match (&self.half_width, &self.max_half_widths) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either half_width or max_half_widths, not both".into()))
            }
            (Some(h), None) => AdmissibleFamily::uniform(group, *h),
            (None, Some(v)) => {
                if v.len() != group.rank() {
                    return Err(CliError::Config(format!(
                        "max_half_widths has {} entries for a group of rank {}",
                        v.len(),
                        group.rank()
                    )));
                }
                AdmissibleFamily { max_half_widths: v.clone(), center_radius: None }
            }
            (None, None) => AdmissibleFamily::default_for(group),
        };
        fam.center_radius = self.center_radius;
        Ok(fam)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    /// `S` is the union of half-open blocks `[lo, hi)`, `R = −S`.
    Gapped {
        blocks: Vec<(usize, usize)>,
        #[serde(default = "index_order")]
        order: BlockOrder,
        #[serde(default)]
        family: FamilySpec,
    },
    /// Blocks from a start, width, gap and growth factor.
    Generated {
        start: usize,
        width: usize,
        gap: usize,
        count: usize,
        #[serde(default = "unit_growth")]
        growth: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        limit: Option<usize>,
        #[serde(default = "index_order")]
        order: BlockOrder,
        #[serde(default)]
        family: FamilySpec,
    },
    Explicit {
        r: Vec<usize>,
        s: Vec<usize>,
        #[serde(default)]
        family: FamilySpec,
    },
}

fn index_order() -> BlockOrder {
    BlockOrder::Index
}

fn unit_growth() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub epsilon: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_g_tol")]
    pub g_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

fn default_g_tol() -> f64 {
    DEFAULT_G_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSpec {
    #[serde(default = "default_search")]
    pub window_search: WindowSearch,
    #[serde(default = "default_style")]
    pub partition_style: PartitionStyle,
    #[serde(default = "yes")]
    pub checks: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<FamilySpec>,
}

fn default_search() -> WindowSearch {
    WindowSearch::Interval
}

fn default_style() -> PartitionStyle {
    PartitionStyle::Triangle
}

fn yes() -> bool {
    true
}

impl Default for ConstructionSpec {
    fn default() -> Self {
        Self { window_search: default_search(), partition_style: default_style(), checks: true, probes: None }
    }
}

/// A configuration turned into the objects the core works with.
pub struct Resolved {
    pub group: Arc<Group>,
    pub a: IndexSet,
    pub w: GroupFunction,
    pub pair: SufficientPair,
    pub basis: EnumeratedBasis,
    pub schedules: Schedules,
    pub options: ConstructionOptions,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    /// Applies command-line overrides.
    pub fn with_overrides(mut self, seed: Option<u64>, no_checks: bool) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        if no_checks {
            self.construction.checks = false;
        }
        self
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let config = |e: scf_core::Error| CliError::Config(e.to_string());
        let group = Group::new(&self.group).map_err(config)?;
        let n = group.len();
        let in_range = |what: &str, v: &[usize]| match v.iter().find(|&&i| i >= n) {
            Some(i) => Err(CliError::Config(format!("{what} index {i} out of range for |G| = {n}"))),
            None => Ok(()),
        };

        let a = match &self.a {
            SetSpec::Explicit { indices } => {
                in_range("a", indices)?;
                IndexSet::from_indices(n, indices.iter().copied())
            }
            SetSpec::Interval { start, len } => {
                if start + len > n {
                    return Err(CliError::Config(format!("interval [{start}, {}) exceeds |G| = {n}", start + len)));
                }
                IndexSet::from_indices(n, *start..start + len)
            }
            SetSpec::Random { size } => {
                if *size > n {
                    return Err(CliError::Config(format!("random set of size {size} exceeds |G| = {n}")));
                }
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
                IndexSet::from_indices(n, idx[..*size].iter().copied())
            }
        };

        let w = match &self.weight {
            WeightSpec::Constant { value } => GroupFunction::constant(&group, *value),
            WeightSpec::Explicit { values } => {
                if values.len() != n {
                    return Err(CliError::Config(format!("weight has {} values for |G| = {n}", values.len())));
                }
                GroupFunction::from_real(&group, values)
            }
            WeightSpec::Ramp { low, high } => {
                let span = (n.max(2) - 1) as f64;
                GroupFunction::from_fn(&group, |x| low + (high - low) * x as f64 / span)
            }
        };

        let pair = match &self.pair {
            PairSpec::Gapped { blocks, order, family } => {
                check_blocks(blocks, n)?;
                SufficientPair::gapped(&*group, blocks, *order, family.resolve(&group)?)
            }
            PairSpec::Generated { start, width, gap, count, growth, limit, order, family } => {
                if *width == 0 || growth.is_nan() || *growth < 1.0 {
                    return Err(CliError::Config("generated blocks need width ≥ 1 and growth ≥ 1".into()));
                }
                let blocks = gapped_blocks(*start, *width, *gap, *count, *growth, limit.unwrap_or(n / 2));
                if blocks.is_empty() {
                    return Err(CliError::Config("block generator produced no blocks".into()));
                }
                SufficientPair::gapped(&*group, &blocks, *order, family.resolve(&group)?)
            }
            PairSpec::Explicit { r, s, family } => {
                in_range("R", r)?;
                in_range("S", s)?;
                SufficientPair::new(
                    IndexSet::from_indices(n, r.iter().copied()),
                    IndexSet::from_indices(n, s.iter().copied()),
                    family.resolve(&group)?,
                )
            }
        };

        let basis = self.basis.enumerate(&group).map_err(config)?;
        let unit = matches!(self.weight, WeightSpec::Constant { value } if value == 1.0);
        let sc = &self.schedules;
        let schedules = match (&sc.t, &sc.rho) {
            (Some(t), Some(rho)) => Schedules::new(sc.epsilon, t.clone(), rho.clone(), sc.n_max, sc.g_tol),
            (None, None) => Schedules::standard(sc.epsilon, sc.n_max, sc.g_tol, unit),
            _ => return Err(CliError::Config("explicit schedules need both t and rho".into())),
        }
        .map_err(config)?;

        let probes = match &self.construction.probes {
            Some(p) => Some(p.resolve(&group)?),
            None => None,
        };
        let options = ConstructionOptions {
            window_search: self.construction.window_search,
            partition_style: self.construction.partition_style,
            checks: self.construction.checks,
            probes,
        };
        Ok(Resolved { group, a, w, pair, basis, schedules, options })
    }
}

fn check_blocks(blocks: &[(usize, usize)], n: usize) -> CliResult<()> {
    for &(lo, hi) in blocks {
        if lo >= hi || hi > n {
            return Err(CliError::Config(format!("block [{lo}, {hi}) is empty or exceeds |Γ| = {n}")));
        }
    }
    Ok(())
}

/// Built-in configuration used by `demo`: 77 random elements of `Z_256`.
pub fn demo_config() -> RunConfig {
    RunConfig {
        group: vec![256],
        a: SetSpec::Random { size: 77 },
        weight: WeightSpec::default(),
        pair: PairSpec::Generated {
            start: 24,
            width: 12,
            gap: 8,
            count: 3,
            growth: 1.5,
            limit: Some(128),
            order: BlockOrder::Index,
            family: FamilySpec { half_width: Some(1), max_half_widths: None, center_radius: Some(4) },
        },
        basis: SummationBasis::SymmetricInterval,
        schedules: ScheduleSpec { epsilon: 0.05, n_max: 12, g_tol: 0.05, t: None, rho: None },
        construction: ConstructionSpec::default(),
        seed: 7,
        out: None,
        eps_list: None,
    }
}
