//! Acceptance gate. Prints one line per criterion and exits non-zero if any
//! criterion fails.

mod common;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use scf_core::construction::{
    correct_bounded, run, BoundedOptions, ConstructionOptions, ConstructionState, CorrectionResult, Schedules,
};
use scf_core::group::{fourier, inverse_fourier, modulate_real, Group, GroupFunction};
use scf_core::kernels::{
    block_ladder, covering_partition, fejer_system, PartitionStyle, SpectrumWindow, WindowSearch,
};
use scf_core::set::IndexSet;
use scf_core::spectral::{
    gapped_blocks, is_sufficient, splitting_union, AdmissibleFamily, BlockOrder, SufficientPair, SummationBasis,
};
use scf_core::verify::{log_law_sweep, spectrum_within, SweepSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------------------------------------------------------------- criterion 1

fn criterion_1() -> Outcome {
    let groups: Vec<Vec<usize>> = vec![
        vec![4096],
        vec![64, 64],
        vec![2; 12],
        vec![16, 16, 16],
        vec![3, 5, 7],
        vec![9, 27],
        vec![2, 3, 4, 5],
        vec![1000],
        vec![64],
        vec![2; 6],
        vec![3, 4, 5],
        vec![7, 9],
        vec![8, 8],
        vec![5, 5],
        vec![60],
        vec![2, 2, 3, 5],
    ];
    let built: Vec<Arc<Group<f64>>> = groups.iter().map(|o| Group::new(o).unwrap()).collect();
    let mut rng = common::rng(1);
    let (mut worst_planch, mut worst_round, mut worst_oracle) = (0.0f64, 0.0f64, 0.0f64);
    let mut oracle_checks = 0;
    for i in 0..1000 {
        let k = i % groups.len();
        let g = &built[k];
        let vals: Vec<Complex64> =
            (0..g.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let f = GroupFunction::from_complex(g, vals.clone());
        let fh = fourier(&f);
        let energy = f.norm_l2_sq();
        worst_planch = worst_planch.max((energy - fh.norm_l2_sq()).abs() / energy);
        let back = inverse_fourier(&fh);
        worst_round = worst_round.max((&back - &f).norm_sup() / f.norm_sup());
        if g.len() <= 64 {
            let oracle = common::dft(&groups[k], &vals);
            let dev = oracle.iter().zip(fh.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst_oracle = worst_oracle.max(dev);
            oracle_checks += 1;
        }
    }
    let pass = worst_planch <= 1e-10 && worst_round <= 1e-10 && worst_oracle <= 1e-12 && oracle_checks > 0;
    outcome(
        pass,
        format!(
            "1000 functions: plancherel rel {worst_planch:.2e}, round trip rel {worst_round:.2e}, \
             oracle max dev {worst_oracle:.2e} over {oracle_checks} small groups"
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let groups: Vec<Vec<usize>> =
        vec![vec![64], vec![27], vec![45], vec![8, 8], vec![2; 6], vec![3, 9], vec![5, 7], vec![4, 6], vec![243]];
    let (mut kernels, mut worst_neg, mut worst_mass) = (0usize, 0.0f64, 0.0f64);
    let (mut partitions, mut worst_sum, mut worst_l1) = (0usize, 0.0f64, 0.0f64);
    let mut multiplicity_ok = true;
    for orders in &groups {
        let g = Group::<f64>::new(orders).unwrap();
        let top = orders.iter().map(|&n| n / 2).max().unwrap();
        let mut windows: Vec<SpectrumWindow> = (0..=top).map(|s| SpectrumWindow::interval_uniform(&g, s)).collect();
        windows.extend((0..=g.rank()).map(|l| SpectrumWindow::subgroup(&g, l).unwrap()));
        for w in &windows {
            let fs = fejer_system(&g, w);
            let raw = inverse_fourier(&fs.psi);
            let scale = raw.norm_sup().max(1.0);
            worst_neg = worst_neg.max((-raw.min_re() / scale).max(0.0));
            worst_mass = worst_mass.max((fs.phi.integral().re - 1.0).abs());
            kernels += 1;
        }
        for style in [PartitionStyle::Triangle, PartitionStyle::Coset] {
            for spec in block_ladder(&g, style) {
                let p = covering_partition(&g, &spec).unwrap();
                let ones = vec![1.0; p.len()];
                let total = p.combine(&ones);
                worst_sum = worst_sum.max((&total - &GroupFunction::constant(&g, 1.0)).norm_sup());
                let mut count = vec![0usize; g.len()];
                for i in 0..p.len() {
                    let bump = p.bump(i);
                    worst_l1 = worst_l1.max((fourier(&bump).norm_l1() - 1.0).abs());
                    for x in bump.support(0.0).iter() {
                        count[x] += 1;
                    }
                }
                let mult = count.into_iter().max().unwrap();
                multiplicity_ok &= mult <= 1 << p.dimension();
                partitions += 1;
            }
        }
    }
    let pass = worst_neg <= 1e-12 && worst_mass <= 1e-12 && worst_sum <= 1e-12 && worst_l1 <= 1e-10 && multiplicity_ok;
    outcome(
        pass,
        format!(
            "{kernels} kernels: min Φ/‖Φ‖∞ ≥ −{worst_neg:.1e}, |∫Φ−1| ≤ {worst_mass:.1e}; \
             {partitions} partitions: |Σα−1| ≤ {worst_sum:.1e}, |‖𝓕α‖₁−1| ≤ {worst_l1:.1e}, multiplicity ≤ 2^d: {multiplicity_ok}"
        ),
    )
}

// ------------------------------------------------------- shared configurations

fn cyclic_run() -> (CorrectionResult<f64>, Duration) {
    let g = Group::<f64>::new(&[256]).unwrap();
    let a = IndexSet::from_indices(256, common::random_subset(7, 256, 77));
    let blocks = gapped_blocks(24, 12, 8, 3, 1.5, 128);
    assert!(blocks.len() >= 3);
    let pair = SufficientPair::gapped(
        &*g,
        &blocks,
        BlockOrder::Index,
        AdmissibleFamily::uniform(&g, 1).with_center_radius(4),
    );
    let basis = SummationBasis::SymmetricInterval.enumerate(&g).unwrap();
    let sched = Schedules::standard(0.05, 12, 0.05, true).unwrap();
    let started = Instant::now();
    let res = run(&a, &GroupFunction::constant(&g, 1.0), &pair, &basis, &sched, &ConstructionOptions::default())
        .expect("cyclic run");
    (res, started.elapsed())
}

fn dyadic_run() -> (CorrectionResult<f64>, Duration) {
    let g = Group::<f64>::new(&[2; 10]).unwrap();
    let a = IndexSet::from_indices(1024, 0..337);
    let pair = SufficientPair::gapped(&*g, &[(32, 1024)], BlockOrder::Paley, AdmissibleFamily::default_for(&g));
    let basis = SummationBasis::WalshPrefix.enumerate(&g).unwrap();
    let sched = Schedules::standard(0.5, 12, 0.05, true).unwrap();
    let opts = ConstructionOptions {
        window_search: WindowSearch::Subgroup,
        partition_style: PartitionStyle::Coset,
        checks: true,
        probes: None,
    };
    let started = Instant::now();
    let res = run(&a, &GroupFunction::constant(&g, 1.0), &pair, &basis, &sched, &opts).expect("dyadic run");
    (res, started.elapsed())
}

/// Criterion-3 style assertions shared with criterion 5.
fn run_assertions(res: &CorrectionResult<f64>, n_max: usize) -> (bool, String) {
    let r = &res.report;
    let st = &res.state;
    let (spec_ok, offenders) = spectrum_within(&res.f_final, &st.k_set, &st.pair.r, &st.pair.s);
    let mut worst_cons = st.trace.iter().map(|t| t.conservation_residual).fold(0.0, f64::max);
    worst_cons = worst_cons.max(st.conservation_residual());
    let mass = st.target_mass();
    let sym: f64 = res.b.symmetric_difference(&st.a).len() as f64 / st.group.len() as f64;
    let eps = st.schedules.epsilon;
    let pass = r.iterations <= n_max
        && spec_ok
        && offenders.is_empty()
        && r.spectrum_ok
        && sym <= 10.0 * eps
        && worst_cons <= 1e-10 * mass.max(1.0);
    (
        pass,
        format!(
            "converged at n = {} (|K| = {}), offenders {}, ∫a△b = {:.4} ({:.3}·ε), conservation ≤ {:.1e}",
            r.iterations,
            st.k_set.len(),
            offenders.len(),
            sym,
            sym / eps,
            worst_cons
        ),
    )
}

/// Partial sums over every basis member by direct synthesis.
fn partial_sum_assertions(res: &CorrectionResult<f64>) -> (bool, String) {
    let st = &res.state;
    let orders = st.group.orders().to_vec();
    let n = st.group.len();
    let f: Vec<Complex64> = res.f_final.values().to_vec();
    let f00: Vec<Complex64> = st.f00.values().to_vec();
    let coeffs = common::dft(&orders, &f);
    let c00 = common::dft(&orders, &f00);
    let spec0: Vec<bool> = c00.iter().map(|c| c.norm() > 1e-10).collect();
    let l1: f64 = c00.iter().map(|c| c.norm()).sum();
    let table: Vec<Complex64> = (0..n * n).map(|k| common::chi(&orders, k / n, k % n)).collect();
    let (mut inside, mut splitting) = (0.0f64, 0.0f64);
    let (mut n_inside, mut n_split) = (0, 0);
    for b in &st.basis.members {
        let member: Vec<bool> = (0..n).map(|i| b.contains(i)).collect();
        let sup = (0..n)
            .map(|x| b.iter().map(|gm| coeffs[gm] * table[gm * n + x]).sum::<Complex64>().norm())
            .fold(0.0, f64::max);
        if st.k_set.iter().all(|k| member[k]) {
            inside = inside.max(sup);
            n_inside += 1;
        }
        let meets = (0..n).any(|i| spec0[i] && member[i]);
        let leaves = (0..n).any(|i| spec0[i] && !member[i]);
        if meets && leaves {
            splitting = splitting.max(sup);
            n_split += 1;
        }
    }
    let bound_inside = res.t_final * st.w.max_re() + 3.0;
    let r = &res.report;
    let pass = inside <= bound_inside + 1e-8
        && bound_inside <= 5.0 + 1e-8
        && splitting <= l1 + 1e-8
        && (inside - r.usup_inside).abs() <= 1e-9
        && (splitting - r.usup_splitting).abs() <= 1e-9
        && (l1 - r.l1_bound_f00).abs() <= 1e-9;
    (
        pass,
        format!(
            "{} members: B ⊇ K ({n_inside}) sup {inside:.4} ≤ {bound_inside:.4}; \
             B splitting ({n_split}) sup {splitting:.4} ≤ ‖𝓕f00‖₁ = {l1:.4}",
            st.basis.members.len()
        ),
    )
}

// ------------------------------------------------------ criteria 3, 4, 5, 6

fn orthogonality_and_energy(st: &ConstructionState<f64>) -> (bool, f64, f64, usize) {
    let inc = st.increments();
    let mut worst_inner = 0.0f64;
    for i in 0..inc.len() {
        for j in i + 1..inc.len() {
            let denom = inc[i].norm_l2() * inc[j].norm_l2();
            if denom > 0.0 {
                worst_inner = worst_inner.max(inc[i].inner(&inc[j]).norm() / denom);
            }
        }
    }
    let g = &st.group;
    let mut worst_energy = 0.0f64;
    let mut bumps = 0;
    for t in &st.trace {
        let Some(spec) = &t.block else { continue };
        let fs = fejer_system(g, &t.window);
        let part = covering_partition(g, spec).unwrap();
        for b in &t.bumps {
            let beta = fs.smooth(&part.bump(b.bump)).re();
            let m = modulate_real(&beta, b.gamma).unwrap();
            let full = beta.norm_l2_sq();
            let expect = if g.add(b.gamma, b.gamma) == 0 { full } else { 0.5 * full };
            worst_energy = worst_energy.max((m.norm_l2_sq() - expect).abs() / expect);
            bumps += 1;
        }
    }
    (worst_inner <= 1e-9 && worst_energy <= 1e-9, worst_inner, worst_energy, bumps)
}

/// A cyclic run that takes one genuine step with a non-order-two character.
fn cyclic_step_state() -> ConstructionState<f64> {
    let g = Group::<f64>::new(&[32]).unwrap();
    let a = IndexSet::from_indices(32, 0..16);
    let pair = SufficientPair::gapped(&*g, &[(4, 12)], BlockOrder::Index, AdmissibleFamily::uniform(&g, 0).with_center_radius(0));
    let basis = SummationBasis::SymmetricInterval.enumerate(&g).unwrap();
    let sched = Schedules::new(1.6, vec![1.0; 2], vec![0.6, 0.1], 1, 0.05).unwrap();
    let opts = ConstructionOptions {
        window_search: WindowSearch::Interval,
        partition_style: PartitionStyle::Coset,
        checks: true,
        probes: None,
    };
    let mut st = ConstructionState::init(&a, &GroupFunction::constant(&g, 1.0), &pair, &basis, &sched, &opts).unwrap();
    st.step().unwrap();
    st
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Outcome {
    let g = Group::<f64>::new(&[128]).unwrap();
    let blocks = gapped_blocks(12, 12, 6, 3, 1.5, 64);
    let pair = SufficientPair::gapped(
        &*g,
        &blocks,
        BlockOrder::Index,
        AdmissibleFamily::uniform(&g, 1).with_center_radius(4),
    );
    let basis = SummationBasis::SymmetricInterval.enumerate(&g).unwrap();
    let opts = BoundedOptions { n_max: 12, g_tol: 0.05, construction: ConstructionOptions::default() };
    let eps = 0.1;
    let started = Instant::now();
    let check = |h: &GroupFunction<f64>, ceiling: f64| -> (bool, String) {
        let out = correct_bounded(h, eps, &pair, &basis, &opts).expect("bounded correction");
        let sup = out.f.norm_sup();
        let changed = (&out.f - h).support(1e-12).len() as f64 / 128.0;
        let allowance = eps + out.extraction_bound();
        let (spec_ok, offenders) = spectrum_within(&out.f, &out.k_union, &pair.r, &pair.s);
        let pass = sup <= ceiling && changed <= allowance && spec_ok;
        (
            pass,
            format!(
                "‖f‖∞ = {sup:.3} ≤ {ceiling}, |{{h≠f}}|/|G| = {changed:.4} ≤ {allowance:.4}, offenders {}",
                offenders.len()
            ),
        )
    };
    let ramp = GroupFunction::from_fn(&g, |x| if x < 64 { (x + 1) as f64 / 64.0 } else { 0.0 });
    let (p1, d1) = check(&ramp, 3.0);
    let mut rng = common::rng(11);
    let complex: Vec<Complex64> = (0..128)
        .map(|x| {
            if x < 64 {
                Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let h = GroupFunction::from_complex(&g, complex);
    let (p2, d2) = check(&h, 12.0);
    outcome(p1 && p2, format!("ramp: {d1}; complex: {d2}; {:.2?}", started.elapsed()))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Outcome {
    let g = Group::<f64>::new(&[512]).unwrap();
    let a = IndexSet::from_indices(512, 0..32);
    let blocks = gapped_blocks(40, 24, 12, 4, 1.5, 256);
    let pair = SufficientPair::gapped(
        &*g,
        &blocks,
        BlockOrder::Index,
        AdmissibleFamily::uniform(&g, 1).with_center_radius(4),
    );
    let basis = SummationBasis::SymmetricInterval.enumerate(&g).unwrap();
    let w = GroupFunction::constant(&g, 1.0);
    let opts = ConstructionOptions::default();
    let spec = SweepSpec { a: &a, w: &w, pair: &pair, basis: &basis, n_max: 12, g_tol: 0.05, options: &opts };
    let started = Instant::now();
    let table = log_law_sweep(&spec, &[0.2, 0.1, 0.05, 0.025]).expect("sweep");
    let elapsed = started.elapsed();
    let ratios: Vec<String> = table.rows.iter().map(|r| format!("{:.3}", r.ratio.unwrap_or(f64::NAN))).collect();
    let ok_rows = table.rows.iter().all(|r| r.error.is_none());
    let spread = table.fit.spread.unwrap_or(f64::INFINITY);
    let pass = ok_rows && spread <= 2.0 && elapsed <= Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "ratios [{}], max/min = {spread:.3} ≤ 2, fit slope {:.3} (status {}), {elapsed:.2?}",
            ratios.join(", "),
            table.fit.slope.unwrap_or(f64::NAN),
            table.fit.status
        ),
    )
}

// ---------------------------------------------------------------- criterion 9

fn random_orders(rng: &mut impl Rng) -> Vec<usize> {
    match rng.gen_range(0..3) {
        0 => vec![rng.gen_range(2..=256)],
        1 => {
            let a = rng.gen_range(2..=16);
            let b = rng.gen_range(2..=256 / a);
            vec![a, b]
        }
        _ => vec![2; rng.gen_range(1..=8)],
    }
}

fn criterion_9() -> Outcome {
    let mut rng = common::rng(9);
    let cases = 240;
    let mut suff_mismatch = 0;
    let mut union_mismatch = 0;
    let mut boxes_checked = 0usize;
    let mut unions_checked = 0usize;
    for case in 0..cases {
        let orders = random_orders(&mut rng);
        let n = common::len(&orders);
        let g = Group::<f64>::new(&orders).unwrap();

        // sufficiency
        let p = rng.gen_range(0.3..0.97);
        let s: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
        let r: Vec<bool> = if rng.gen_bool(0.5) {
            (0..n).map(|i| s[common::neg(&orders, i)]).collect()
        } else {
            (0..n).map(|_| rng.gen_bool(p)).collect()
        };
        let mut caps: Vec<usize> = orders.iter().map(|&m| rng.gen_range(0..=2usize.min(m / 2))).collect();
        while caps.iter().map(|c| c + 1).product::<usize>() > 9 {
            let k = rng.gen_range(0..caps.len());
            caps[k] = caps[k].saturating_sub(1);
        }
        let radius = if n <= 64 && rng.gen_bool(0.5) { None } else { Some(rng.gen_range(0..=3)) };
        let family = AdmissibleFamily { max_half_widths: caps.clone(), center_radius: radius };
        let pair = SufficientPair::new(
            IndexSet::from_predicate(n, |i| r[i]),
            IndexSet::from_predicate(n, |i| s[i]),
            family,
        );
        let rep = is_sufficient(&g, &pair);
        let lib: HashMap<(usize, Vec<usize>), Option<usize>> =
            rep.witnesses.iter().map(|(b, w)| ((b.center, b.half_widths.clone()), *w)).collect();
        let mut all = true;
        let mut hws = vec![vec![]];
        for &c in &caps {
            hws = hws.into_iter().flat_map(|v: Vec<usize>| (0..=c).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        for hw in &hws {
            for c in 0..n {
                if radius.is_some_and(|rad| common::max_abs_coord(&orders, c) > rad) {
                    continue;
                }
                let e = common::box_set(&orders, c, hw);
                let elems: Vec<usize> = (0..n).filter(|&i| e[i]).collect();
                let exists = (0..n).any(|gm| {
                    let mg = common::neg(&orders, gm);
                    elems.iter().all(|&x| r[common::add(&orders, x, mg)] && s[common::add(&orders, x, gm)])
                });
                all &= exists;
                boxes_checked += 1;
                match lib.get(&(c, hw.clone())) {
                    Some(w) if w.is_some() == exists => {
                        if let Some(gm) = *w {
                            let mg = common::neg(&orders, gm);
                            let valid = elems
                                .iter()
                                .all(|&x| r[common::add(&orders, x, mg)] && s[common::add(&orders, x, gm)]);
                            if !valid {
                                suff_mismatch += 1;
                            }
                        }
                    }
                    _ => suff_mismatch += 1,
                }
            }
        }
        if lib.len() != hws.len() * (0..n).filter(|&c| radius.is_none_or(|rad| common::max_abs_coord(&orders, c) <= rad)).count()
            || all != rep.sufficient
        {
            suff_mismatch += 1;
        }

        // splitting unions
        let (basis, members): (SummationBasis, Vec<Vec<bool>>) = match case % 3 {
            0 => {
                let top = orders.iter().map(|&m| m / 2).max().unwrap();
                let cubes = (0..=top)
                    .map(|j| (0..n).map(|i| common::max_abs_coord(&orders, i) <= j).collect())
                    .collect();
                (SummationBasis::SymmetricInterval, cubes)
            }
            1 => {
                let prefixes = (1..=n).map(|m| (0..n).map(|i| common::paley_rank(&orders, i) < m).collect()).collect();
                (SummationBasis::WalshPrefix, prefixes)
            }
            _ => {
                let mut sets: Vec<Vec<usize>> = (0..rng.gen_range(1..8))
                    .map(|_| (0..n).filter(|_| rng.gen_bool(0.3)).collect())
                    .collect();
                sets.push((0..n).collect());
                let members = sets.iter().map(|v| (0..n).map(|i| v.contains(&i)).collect()).collect();
                (SummationBasis::Explicit { sets }, members)
            }
        };
        let enumerated = basis.enumerate(&g).unwrap();
        let lib_members: Vec<Vec<bool>> =
            enumerated.members.iter().map(|m| (0..n).map(|i| m.contains(i)).collect()).collect();
        if lib_members != members {
            union_mismatch += 1;
        }
        for _ in 0..4 {
            let e: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.1)).collect();
            let mut expect = vec![false; n];
            for m in &members {
                let meets = (0..n).any(|i| e[i] && m[i]);
                let leaves = (0..n).any(|i| e[i] && !m[i]);
                if meets && leaves {
                    for i in 0..n {
                        expect[i] |= m[i];
                    }
                }
            }
            let got = splitting_union(&IndexSet::from_predicate(n, |i| e[i]), &enumerated);
            if (0..n).any(|i| got.contains(i) != expect[i]) {
                union_mismatch += 1;
            }
            unions_checked += 1;
        }
    }
    outcome(
        suff_mismatch == 0 && union_mismatch == 0,
        format!(
            "{cases} seeded cases (|Γ| ≤ 256): {boxes_checked} admissible sets, {unions_checked} splitting unions; \
             mismatches: sufficiency {suff_mismatch}, unions {union_mismatch}"
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    let started = Instant::now();
    let mut c1 = criterion_1();
    let t1 = started.elapsed();
    c1.pass &= t1 <= Duration::from_secs(30);
    c1.detail.push_str(&format!(", {t1:.2?}"));
    results.push((1, "transform core", c1));

    results.push((2, "kernel and partition properties", criterion_2()));

    let (cyc, cyc_time) = cyclic_run();
    let (p3, d3) = run_assertions(&cyc, 12);
    let p3 = p3 && cyc_time <= Duration::from_secs(60);
    results.push((3, "end-to-end correction on Z_256", outcome(p3, format!("{d3}, {cyc_time:.2?}"))));

    let (p4, d4) = partial_sum_assertions(&cyc);
    results.push((4, "partial-sum bounds (Z_256 run)", outcome(p4, d4)));

    let (dy, dy_time) = dyadic_run();
    let (p5a, d5a) = run_assertions(&dy, 12);
    let (p5b, d5b) = partial_sum_assertions(&dy);
    let g = &dy.state.group;
    let all_order_two = (0..g.len()).all(|gm| g.add(gm, gm) == 0);
    let steps = dy.state.trace.len();
    let p5 = p5a && p5b && all_order_two && steps > 0;
    results.push((
        5,
        "dyadic run on Z_2^10",
        outcome(
            p5,
            format!("{d5a}; {d5b}; {steps} nontrivial steps; 2γ = 0 for all γ: {all_order_two}; {dy_time:.2?}"),
        ),
    ));

    let step_state = cyclic_step_state();
    let mut p6 = true;
    let mut d6 = Vec::new();
    for (name, st) in [("Z_256", &cyc.state), ("Z_2^10", &dy.state), ("Z_32 one step", &step_state)] {
        let (ok, inner, energy, bumps) = orthogonality_and_energy(st);
        p6 &= ok;
        d6.push(format!("{name}: {} increments, max |⟨·,·⟩| rel {inner:.1e}, {bumps} bumps energy rel {energy:.1e}", st.row.len()));
    }
    results.push((6, "orthogonality and energy", outcome(p6, d6.join("; "))));

    results.push((7, "bounded correction on Z_128", criterion_7()));
    results.push((8, "log-law sweep on Z_512", criterion_8()));
    results.push((9, "spectral-structure oracles", criterion_9()));

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("acceptance criterion {n} {name}: {tag} ({})", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
