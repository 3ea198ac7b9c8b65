//! Finite abelian groups `Z_{N_1} × … × Z_{N_r}`, functions on them, and
//! their Fourier transforms.
//!
//! Elements and characters share the row-major mixed-radix index
//! (last factor fastest). The character with coordinates `γ` acts by
//! `γ(x) = exp(2πi Σ_j γ_j x_j / N_j)`.
//!
//! Normalizations: the Haar measure on `G` has total mass one, the one on
//! `Γ` is counting measure. Then
//!
//! ```text
//! f̂(γ) = |G|⁻¹ Σ_x f(x) conj γ(x),      f(x) = Σ_γ f̂(γ) γ(x),
//! (f ∗ g)(x) = |G|⁻¹ Σ_y f(y) g(x − y),  (f ∗ g)^ = f̂ ĝ,
//! ```
//!
//! and the transform is unitary from `L²(G)` onto `ℓ²(Γ)`.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set::{ElementSet, IndexSet, SpectrumSet};

pub const DEFAULT_GROUP_CAP: usize = 1 << 22;

struct FactorPlan<S: Scalar> {
    forward: Arc<dyn Fft<S>>,
    inverse: Arc<dyn Fft<S>>,
}

pub struct Group<S: Scalar> {
    orders: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
    plans: Vec<Option<FactorPlan<S>>>,
    order: OnceLock<Vec<usize>>,
}

impl<S: Scalar> std::fmt::Debug for Group<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group").field("orders", &self.orders).finish()
    }
}

impl<S: Scalar> PartialEq for Group<S> {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
    }
}

impl<S: Scalar> Group<S> {
    pub fn new(orders: &[usize]) -> Result<Arc<Self>> {
        Self::with_cap(orders, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(orders: &[usize], cap: usize) -> Result<Arc<Self>> {
        if orders.is_empty() {
            return Err(Error::EmptyOrders);
        }
        if let Some(&n) = orders.iter().find(|&&n| n < 2) {
            return Err(Error::FactorTooSmall(n));
        }
        let order: u128 = orders.iter().map(|&n| n as u128).product();
        if order > cap as u128 {
            return Err(Error::GroupTooLarge { order, cap });
        }
        let len = order as usize;
        let mut strides = vec![1; orders.len()];
        for j in (0..orders.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * orders[j + 1];
        }
        let mut planner = FftPlanner::<S>::new();
        let plans = orders
            .iter()
            .map(|&n| {
                (n > 2).then(|| FactorPlan {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .collect();
        Ok(Arc::new(Self { orders: orders.to_vec(), strides, len, plans, order: OnceLock::new() }))
    }

    #[inline]
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// `|G|`, which equals `|Γ|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_dyadic(&self) -> bool {
        self.orders.iter().all(|&n| n == 2)
    }

    /// Number of cyclic factors of order > 2.
    pub fn dimension(&self) -> usize {
        self.orders.iter().filter(|&&n| n > 2).count()
    }

    pub fn coords(&self, mut i: usize) -> Vec<usize> {
        let mut c = vec![0; self.orders.len()];
        for j in (0..self.orders.len()).rev() {
            c[j] = i % self.orders[j];
            i /= self.orders[j];
        }
        c
    }

    /// Coordinates are reduced modulo the factor orders.
    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.orders).zip(&self.strides).map(|((&c, &n), &s)| (c % n) * s).sum()
    }

    pub fn index_signed(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((&c, &n), &s)| (c.rem_euclid(n as i64) as usize) * s)
            .sum()
    }

    /// Representatives in `(−N/2, N/2]`.
    pub fn signed_coords(&self, i: usize) -> Vec<i64> {
        self.coords(i)
            .into_iter()
            .zip(&self.orders)
            .map(|(c, &n)| if 2 * c > n { c as i64 - n as i64 } else { c as i64 })
            .collect()
    }

    pub fn max_abs_coord(&self, i: usize) -> usize {
        self.signed_coords(i).into_iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let mut out = 0;
        let (mut a, mut b) = (i, j);
        for k in (0..self.orders.len()).rev() {
            let n = self.orders[k];
            out += ((a % n + b % n) % n) * self.strides[k];
            a /= n;
            b /= n;
        }
        out
    }

    pub fn neg(&self, i: usize) -> usize {
        let mut out = 0;
        let mut a = i;
        for k in (0..self.orders.len()).rev() {
            let n = self.orders[k];
            out += ((n - a % n) % n) * self.strides[k];
            a /= n;
        }
        out
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }

    pub fn is_order_two(&self, i: usize) -> bool {
        self.add(i, i) == 0
    }

    /// Enumeration position used by the Walsh–Paley (and Vilenkin) ordering:
    /// factor 0 is the least significant digit.
    pub fn paley_rank(&self, i: usize) -> usize {
        let c = self.coords(i);
        let mut rank = 0;
        for (k, &n) in self.orders.iter().enumerate().rev() {
            rank = rank * n + c[k];
        }
        rank
    }

    pub fn from_paley_rank(&self, mut rank: usize) -> usize {
        let mut c = vec![0; self.orders.len()];
        for (k, &n) in self.orders.iter().enumerate() {
            c[k] = rank % n;
            rank /= n;
        }
        self.index(&c)
    }

    /// Deterministic character search order: increasing max coordinate
    /// magnitude, ties broken lexicographically on signed coordinates read
    /// from the last factor to the first (on `Z_2^m` this is Paley order).
    pub fn search_order(&self) -> &[usize] {
        self.order.get_or_init(|| {
            let mut keyed: Vec<(usize, Vec<i64>, usize)> = (0..self.len)
                .map(|i| {
                    let mut c = self.signed_coords(i);
                    c.reverse();
                    (self.max_abs_coord(i), c, i)
                })
                .collect();
            keyed.sort();
            keyed.into_iter().map(|(_, _, i)| i).collect()
        })
    }

    /// `γ(x)` for character index `gamma` and element index `x`.
    pub fn character_value(&self, gamma: usize, x: usize) -> Complex<S> {
        let g = self.coords(gamma);
        let xc = self.coords(x);
        // phase as an exact fraction num / len of a full turn
        let mut num = 0u128;
        let len = self.len as u128;
        for k in 0..self.orders.len() {
            let n = self.orders[k];
            num += ((g[k] * xc[k]) % n) as u128 * (len / n as u128);
        }
        let num = num % len;
        if (4 * num).is_multiple_of(len) {
            let (one, zero) = (S::one(), S::zero());
            return match 4 * num / len {
                0 => Complex::new(one, zero),
                1 => Complex::new(zero, one),
                2 => Complex::new(-one, zero),
                _ => Complex::new(zero, -one),
            };
        }
        let theta = S::lit(2.0 * std::f64::consts::PI * num as f64 / len as f64);
        Complex::new(theta.cos(), theta.sin())
    }

    pub fn translate_set(&self, set: &IndexSet, by: usize) -> IndexSet {
        IndexSet::from_indices(self.len, set.iter().map(|i| self.add(i, by)))
    }

    pub fn negate_set(&self, set: &IndexSet) -> IndexSet {
        IndexSet::from_indices(self.len, set.iter().map(|i| self.neg(i)))
    }

    pub fn sumset(&self, a: &IndexSet, b: &IndexSet) -> IndexSet {
        let mut out = IndexSet::empty(self.len);
        let bs: Vec<usize> = b.iter().collect();
        for i in a.iter() {
            for &j in &bs {
                out.insert(self.add(i, j));
            }
        }
        out
    }

    /// In-place separable transform along every factor. Forward transforms
    /// are unnormalized here; callers apply `1/|G|`.
    fn transform(&self, data: &mut [Complex<S>], inverse: bool) {
        debug_assert_eq!(data.len(), self.len);
        for (axis, &n) in self.orders.iter().enumerate() {
            let stride = self.strides[axis];
            let block = n * stride;
            match &self.plans[axis] {
                None => {
                    // order two: Walsh–Hadamard butterfly
                    for base in (0..self.len).step_by(block) {
                        for off in 0..stride {
                            let i = base + off;
                            let j = i + stride;
                            let (u, v) = (data[i], data[j]);
                            data[i] = u + v;
                            data[j] = u - v;
                        }
                    }
                }
                Some(plan) => {
                    let fft = if inverse { &plan.inverse } else { &plan.forward };
                    if stride == 1 {
                        fft.process(data);
                        continue;
                    }
                    let lines = self.len / n;
                    let mut buf = vec![Complex::new(S::zero(), S::zero()); self.len];
                    let mut line = 0;
                    for base in (0..self.len).step_by(block) {
                        for off in 0..stride {
                            let dst = &mut buf[line * n..(line + 1) * n];
                            for (k, d) in dst.iter_mut().enumerate() {
                                *d = data[base + off + k * stride];
                            }
                            line += 1;
                        }
                    }
                    debug_assert_eq!(line, lines);
                    fft.process(&mut buf);
                    line = 0;
                    for base in (0..self.len).step_by(block) {
                        for off in 0..stride {
                            let src = &buf[line * n..(line + 1) * n];
                            for (k, s) in src.iter().enumerate() {
                                data[base + off + k * stride] = *s;
                            }
                            line += 1;
                        }
                    }
                }
            }
        }
    }
}

/// Build a group from its cyclic factor orders.
pub fn make_group<S: Scalar>(orders: &[usize]) -> Result<Arc<Group<S>>> {
    Group::new(orders)
}

#[inline]
fn czero<S: Scalar>() -> Complex<S> {
    Complex::new(S::zero(), S::zero())
}

/// A complex-valued function on `G`, indexed by element.
#[derive(Clone, Debug)]
pub struct GroupFunction<S: Scalar> {
    group: Arc<Group<S>>,
    values: Vec<Complex<S>>,
}

impl<S: Scalar> GroupFunction<S> {
    pub fn from_complex(group: &Arc<Group<S>>, values: Vec<Complex<S>>) -> Self {
        assert_eq!(values.len(), group.len(), "function length must equal |G|");
        Self { group: Arc::clone(group), values }
    }

    pub fn from_real(group: &Arc<Group<S>>, values: &[S]) -> Self {
        Self::from_complex(group, values.iter().map(|&v| Complex::new(v, S::zero())).collect())
    }

    pub fn from_fn<F: FnMut(usize) -> S>(group: &Arc<Group<S>>, mut f: F) -> Self {
        Self::from_complex(group, (0..group.len()).map(|i| Complex::new(f(i), S::zero())).collect())
    }

    pub fn zeros(group: &Arc<Group<S>>) -> Self {
        Self::from_complex(group, vec![czero(); group.len()])
    }

    pub fn constant(group: &Arc<Group<S>>, c: S) -> Self {
        Self::from_fn(group, |_| c)
    }

    pub fn indicator(group: &Arc<Group<S>>, set: &ElementSet) -> Self {
        Self::from_fn(group, |i| if set.contains(i) { S::one() } else { S::zero() })
    }

    pub fn character(group: &Arc<Group<S>>, gamma: usize) -> Self {
        Self::from_complex(group, (0..group.len()).map(|x| group.character_value(gamma, x)).collect())
    }

    #[inline]
    pub fn group(&self) -> &Arc<Group<S>> {
        &self.group
    }

    #[inline]
    pub fn values(&self) -> &[Complex<S>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex<S>] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex<S> {
        self.values[i]
    }

    #[inline]
    pub fn re_at(&self, i: usize) -> S {
        self.values[i].re
    }

    pub fn real_parts(&self) -> Vec<S> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn same_group(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group
    }

    pub fn max_imag(&self) -> S {
        self.values.iter().fold(S::zero(), |m, v| m.max(v.im.abs()))
    }

    pub fn is_real(&self, tol: S) -> bool {
        self.max_imag() <= tol
    }

    pub fn re(&self) -> Self {
        self.map(|v| Complex::new(v.re, S::zero()))
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|v| v * c)
    }

    pub fn map<F: Fn(Complex<S>) -> Complex<S>>(&self, f: F) -> Self {
        Self { group: Arc::clone(&self.group), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn map_real<F: Fn(S) -> S>(&self, f: F) -> Self {
        self.map(|v| Complex::new(f(v.re), S::zero()))
    }

    pub fn zip_with<F: Fn(Complex<S>, Complex<S>) -> Complex<S>>(&self, other: &Self, f: F) -> Result<Self> {
        if !self.same_group(other) {
            return Err(Error::GroupMismatch);
        }
        Ok(Self {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// `y ↦ f(y − x)`.
    pub fn translate(&self, x: usize) -> Self {
        let g = &self.group;
        let mut out = vec![czero(); g.len()];
        for (y, v) in self.values.iter().enumerate() {
            out[g.add(y, x)] = *v;
        }
        Self { group: Arc::clone(g), values: out }
    }

    /// `∫ f` under the normalized Haar measure.
    pub fn integral(&self) -> Complex<S> {
        let s = self.values.iter().fold(czero::<S>(), |acc, &v| acc + v);
        s / S::from_count(self.values.len())
    }

    pub fn norm_l1(&self) -> S {
        self.values.iter().fold(S::zero(), |acc, v| acc + v.norm()) / S::from_count(self.values.len())
    }

    pub fn norm_l2_sq(&self) -> S {
        self.values.iter().fold(S::zero(), |acc, v| acc + v.norm_sqr()) / S::from_count(self.values.len())
    }

    pub fn norm_l2(&self) -> S {
        self.norm_l2_sq().sqrt()
    }

    pub fn norm_sup(&self) -> S {
        self.values.iter().fold(S::zero(), |m, v| m.max(v.norm()))
    }

    /// `∫ f conj g`.
    pub fn inner(&self, other: &Self) -> Complex<S> {
        let s = self.values.iter().zip(&other.values).fold(czero::<S>(), |acc, (&a, &b)| acc + a * b.conj());
        s / S::from_count(self.values.len())
    }

    pub fn min_re(&self) -> S {
        self.values.iter().fold(S::infinity(), |m, v| m.min(v.re))
    }

    pub fn max_re(&self) -> S {
        self.values.iter().fold(S::neg_infinity(), |m, v| m.max(v.re))
    }

    /// Elements where `|f| > tau`.
    pub fn support(&self, tau: S) -> ElementSet {
        IndexSet::from_predicate(self.values.len(), |i| self.values[i].norm() > tau)
    }
}

impl<S: Scalar> Add for &GroupFunction<S> {
    type Output = GroupFunction<S>;
    fn add(self, rhs: Self) -> GroupFunction<S> {
        self.zip_with(rhs, |a, b| a + b).expect("group mismatch in add")
    }
}

impl<S: Scalar> Sub for &GroupFunction<S> {
    type Output = GroupFunction<S>;
    fn sub(self, rhs: Self) -> GroupFunction<S> {
        self.zip_with(rhs, |a, b| a - b).expect("group mismatch in sub")
    }
}

impl<S: Scalar> Mul for &GroupFunction<S> {
    type Output = GroupFunction<S>;
    fn mul(self, rhs: Self) -> GroupFunction<S> {
        self.zip_with(rhs, |a, b| a * b).expect("group mismatch in mul")
    }
}

impl<S: Scalar> Neg for &GroupFunction<S> {
    type Output = GroupFunction<S>;
    fn neg(self) -> GroupFunction<S> {
        self.map(|v| -v)
    }
}

/// Coefficients on `Γ`, indexed by character.
#[derive(Clone, Debug)]
pub struct SpectralFunction<S: Scalar> {
    group: Arc<Group<S>>,
    coeffs: Vec<Complex<S>>,
}

impl<S: Scalar> SpectralFunction<S> {
    pub fn from_complex(group: &Arc<Group<S>>, coeffs: Vec<Complex<S>>) -> Self {
        assert_eq!(coeffs.len(), group.len(), "coefficient length must equal |Γ|");
        Self { group: Arc::clone(group), coeffs }
    }

    pub fn from_real(group: &Arc<Group<S>>, coeffs: &[S]) -> Self {
        Self::from_complex(group, coeffs.iter().map(|&c| Complex::new(c, S::zero())).collect())
    }

    #[inline]
    pub fn group(&self) -> &Arc<Group<S>> {
        &self.group
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex<S>] {
        &self.coeffs
    }

    #[inline]
    pub fn get(&self, gamma: usize) -> Complex<S> {
        self.coeffs[gamma]
    }

    /// `{γ : |f̂(γ)| > tau}`.
    pub fn support(&self, tau: S) -> SpectrumSet {
        IndexSet::from_predicate(self.coeffs.len(), |i| self.coeffs[i].norm() > tau)
    }

    /// `‖f̂‖₁` with counting measure on `Γ`.
    pub fn norm_l1(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, c| acc + c.norm())
    }

    pub fn norm_l2_sq(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn multiply(&self, multiplier: &[S]) -> Self {
        Self {
            group: Arc::clone(&self.group),
            coeffs: self.coeffs.iter().zip(multiplier).map(|(&c, &m)| c * m).collect(),
        }
    }

    pub fn restrict(&self, set: &SpectrumSet) -> Self {
        Self {
            group: Arc::clone(&self.group),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| if set.contains(i) { c } else { czero() })
                .collect(),
        }
    }
}

pub fn fourier<S: Scalar>(f: &GroupFunction<S>) -> SpectralFunction<S> {
    let g = &f.group;
    let mut data = f.values.clone();
    g.transform(&mut data, false);
    let scale = S::one() / S::from_count(g.len());
    for v in &mut data {
        *v = *v * scale;
    }
    SpectralFunction { group: Arc::clone(g), coeffs: data }
}

pub fn inverse_fourier<S: Scalar>(fh: &SpectralFunction<S>) -> GroupFunction<S> {
    let g = &fh.group;
    let mut data = fh.coeffs.clone();
    g.transform(&mut data, true);
    GroupFunction { group: Arc::clone(g), values: data }
}

/// `(f ∗ g)(x) = |G|⁻¹ Σ_y f(y) g(x − y)`, computed through the transform.
pub fn convolve<S: Scalar>(f: &GroupFunction<S>, g: &GroupFunction<S>) -> Result<GroupFunction<S>> {
    if !f.same_group(g) {
        return Err(Error::GroupMismatch);
    }
    let fh = fourier(f);
    let gh = fourier(g);
    let prod: Vec<Complex<S>> = fh.coeffs.iter().zip(&gh.coeffs).map(|(&a, &b)| a * b).collect();
    Ok(inverse_fourier(&SpectralFunction { group: Arc::clone(f.group()), coeffs: prod }))
}

/// Convolution with the kernel whose transform is `multiplier`.
pub fn apply_multiplier<S: Scalar>(f: &GroupFunction<S>, multiplier: &[S]) -> GroupFunction<S> {
    inverse_fourier(&fourier(f).multiply(multiplier))
}

/// `Re(f γ)` for a real `f`.
pub fn modulate_real<S: Scalar>(f: &GroupFunction<S>, gamma: usize) -> Result<GroupFunction<S>> {
    let tol = S::tol(1e-10);
    let imag = f.max_imag();
    if imag > tol {
        return Err(Error::NotReal(imag.as_f64()));
    }
    let g = f.group();
    let dyadic_char = g.is_order_two(gamma);
    Ok(GroupFunction::from_fn(g, |x| {
        let c = g.character_value(gamma, x);
        // order-two characters are ±1; keep them exact
        let re = if dyadic_char { c.re.round() } else { c.re };
        f.values[x].re * re
    }))
}
