//! Normal forms of Eisenstein polynomials: the step-0 and step-m reductions,
//! uniformizer substitution through a resultant-free lifting step, and the
//! multiset of all reduced polynomials generating a fixed extension.
//!
//! The engine is `lift_factor`: given `h(T) = f(F(T))` for a degree-lowering
//! change of uniformizer `F`, it extracts the degree-`n` Eisenstein factor of
//! `h` by repeatedly multiplying with binomials `(1 − cT^{r-n})`, killing the
//! most significant unwanted monomial as measured by the mixed valuation
//! `(v_L(c)+r, −r)`.  No resultants, no `O_L` arithmetic: every operation is
//! linear algebra on `O_K` coefficients.
//!
//! Reduction then proceeds level by level: step 0 normalizes the unit class
//! of the constant term into a fixed system of power-class representatives;
//! step `m` normalizes the digit at position `nj+i = n(φ(m)+1)` into the
//! canonical complement of the image of `θ ↦ η̄^j S_m(θ)`.  Integer
//! ramification breaks are exactly the levels where that map has a kernel,
//! producing finitely many branches; exploring all of them yields a multiset
//! whose distinct entries are the reduced generators of the extension and
//! whose uniform multiplicity is the number of automorphisms.

use crate::error::Error;
use crate::padics::{BaseField, IntegerElement, Valuation};
use crate::ramify::{
    ramification_data, residual_poly_with, EisensteinPoly, RamData, ResidualBody,
};
use crate::rational::{rat, Rat};
use crate::residue::{
    enumerate_span, gcd, kernel_basis, reduce_by_rref, rref, solve_lex_min, ResidueElement,
    ResidueField,
};
use crate::Result;
use num::{One, Zero};
use std::collections::BTreeMap;

/// Mixed valuation `(v_L(c)+r, −r)` of a monomial `cT^r`, compared
/// lexicographically: smaller means "more significant" for the lifting step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MixedValuation(pub i64, pub i64);

impl MixedValuation {
    pub fn of(n: usize, v_k: usize, r: usize) -> Self {
        MixedValuation((n * v_k + r) as i64, -(r as i64))
    }
}

/// Multiset of reduced polynomials generating the same extension as the
/// input, truncated at the Krasner bound.
#[derive(Clone, Debug)]
pub struct ReducedMultiset {
    /// Distinct reduced polynomials with multiplicities, sorted by digits.
    pub entries: Vec<(EisensteinPoly, usize)>,
    /// Total branch count (= B, the product of the break root-counts).
    pub b: u64,
    /// Common multiplicity (= number of automorphisms of the extension).
    pub aut: u64,
}

impl ReducedMultiset {
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn same_entries(&self, other: &ReducedMultiset) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1)
    }
}

/// Counting invariants of the extension generated by `f`.
#[derive(Clone, Debug)]
pub struct AutInfo {
    /// `B = Π ρ_i` over integer breaks (`ρ_0 = gcd(n, q−1)`).
    pub b: u64,
    /// Number of automorphisms (common multiplicity of the multiset).
    pub aut: u64,
    /// The distinct reduced polynomials.
    pub reduced: Vec<EisensteinPoly>,
}

/// Valuation level `n(φ(t_k)+1)` beyond which digits do not affect the
/// generated extension.
pub fn krasner_bound(data: &RamData) -> usize {
    let b = rat(data.n as i64, 1) * (data.phi_eval(data.t_max()) + Rat::one());
    b.floor().to_integer() as usize
}

/// Working precision (in `v_K` digits) required to carry a full reduction:
/// the Krasner digit depth plus a guard.
pub fn required_precision(data: &RamData) -> usize {
    (data.phi_eval(data.t_max()).floor().to_integer() as usize) + 4
}

fn coeff_val(base: &BaseField, c: &IntegerElement) -> Valuation {
    base.val(c)
}

/// Extract the degree-`n` Eisenstein factor of `h` (coefficients low-first,
/// leading coefficient included and required to be of valuation 0 after
/// normalization at `T^n`), correct for every monomial below the mixed
/// valuation target `target_v1 = n·(precision+1)`.
pub fn lift_factor(
    h: &[IntegerElement],
    base: &BaseField,
    n: usize,
    target_v1: usize,
) -> Result<Vec<IntegerElement>> {
    let mut h: Vec<IntegerElement> = h.to_vec();
    if h.len() < n + 1 {
        return Err(Error::Internal("composition shorter than the expected factor".into()));
    }
    let step_cap = target_v1 * target_v1 + 256;
    let mut steps = 0usize;
    loop {
        // Find the most significant live monomial of degree > n.
        let mut best: Option<(MixedValuation, usize)> = None;
        for (r, c) in h.iter().enumerate().skip(n + 1) {
            match coeff_val(base, c) {
                Valuation::Exact(v) => {
                    let fv = MixedValuation::of(n, v, r);
                    if (fv.0 as usize) < target_v1 && best.is_none_or(|(b, _)| fv < b) {
                        best = Some((fv, r));
                    }
                }
                Valuation::BelowPrecision { precision } => {
                    // Unknown coefficient: droppable only if its lower bound
                    // already clears the target.
                    if n * precision + r < target_v1 {
                        return Err(Error::PrecisionInsufficient { needed: precision + 1 });
                    }
                }
            }
        }
        let Some((_, r)) = best else { break };
        steps += 1;
        if steps > step_cap {
            return Err(Error::LiftBudgetExceeded { steps });
        }
        // Multiply by (1 − cT^{r−n}) with c = h_r / h_n, killing T^r.
        let hn_inv = base.unit_inv(&h[n])?;
        let c = base.mul(&h[r], &hn_inv);
        let shift = r - n;
        let old = h.clone();
        let new_len = old.len() + shift;
        let zero = base.zero(base.default_precision());
        h.resize(new_len.max(h.len()), zero.clone());
        for (k, ck) in old.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let t = base.mul(&c, ck);
            h[k + shift] = base.sub(&h[k + shift], &t);
        }
        // The targeted coefficient is now exactly zero; make that structural
        // so stale below-precision noise cannot resurrect it.
        h[r] = zero.clone();
        // Drop certified-dead coefficients to keep the support small.
        for (k, ck) in h.iter_mut().enumerate().skip(n + 1) {
            if let Valuation::Exact(v) = base.val(ck) {
                if n * v + k >= target_v1 {
                    *ck = zero.clone();
                }
            }
        }
        while h.len() > n + 1 && h.last().is_some_and(|c| c.is_zero()) {
            h.pop();
        }
    }
    // Normalize to a monic degree-n polynomial.
    let lead_inv = base.unit_inv(&h[n])?;
    let coeffs: Vec<IntegerElement> = h[..n].iter().map(|c| base.mul(c, &lead_inv)).collect();
    Ok(coeffs)
}

/// `f(T + cT^{m+1} + Σ tail_k T^{m+1+k})` as a raw coefficient vector.
fn compose(
    f: &EisensteinPoly,
    c: &IntegerElement,
    m: usize,
    tail: &[(usize, IntegerElement)],
) -> Result<Vec<IntegerElement>> {
    let base = &f.base;
    let n = f.n();
    let prec = base.default_precision();
    // F(T) = T + cT^{m+1} + tail, as a coefficient vector.
    let mut fsub = vec![base.zero(prec); m + 2];
    fsub[1] = base.one(prec);
    fsub[m + 1] = c.clone();
    for (off, t) in tail {
        debug_assert!(*off >= 1);
        if fsub.len() < m + 2 + off {
            fsub.resize(m + 2 + off, base.zero(prec));
        }
        fsub[m + 1 + off] = base.add(&fsub[m + 1 + off], t);
    }
    // Horner: h = ((1·F + f_{n-1})·F + …)·F + f_0.
    let mut h = vec![base.one(prec)];
    for i in (0..n).rev() {
        h = poly_mul(base, &h, &fsub);
        h[0] = base.add(&h[0], &f.coeffs[i]);
    }
    Ok(h)
}

fn poly_mul(base: &BaseField, a: &[IntegerElement], b: &[IntegerElement]) -> Vec<IntegerElement> {
    let prec = base.default_precision();
    let mut out = vec![base.zero(prec); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let t = base.mul(x, y);
            out[i + j] = base.add(&out[i + j], &t);
        }
    }
    out
}

/// Minimal polynomial of the uniformizer `ρ = π + θπ^{m+1} + O(π^{m+2})`,
/// computed by composing `F(T) = T − θT^{m+1}` with `f` and lifting out the
/// Eisenstein factor.  `θ = 0` returns `f` unchanged.
pub fn substitute(f: &EisensteinPoly, theta: &ResidueElement, m: usize) -> Result<EisensteinPoly> {
    substitute_with_tail(f, theta, m, &[])
}

/// `substitute` with explicit higher-order terms: the change of uniformizer
/// becomes `π = ρ − θρ^{m+1} + Σ tail_k ρ^{m+1+k}`.  The generated extension
/// and the completed reduction are independent of the tail.
pub fn substitute_with_tail(
    f: &EisensteinPoly,
    theta: &ResidueElement,
    m: usize,
    tail: &[(usize, ResidueElement)],
) -> Result<EisensteinPoly> {
    if theta.is_zero() && tail.is_empty() {
        return Ok(f.clone());
    }
    let base = &f.base;
    let prec = base.default_precision();
    let c = base.neg(&base.rep(theta, prec));
    let tail_lifted: Vec<(usize, IntegerElement)> =
        tail.iter().map(|(off, d)| (*off, base.rep(d, prec))).collect();
    let h = compose(f, &c, m, &tail_lifted)?;
    let coeffs = lift_factor(&h, base, f.n(), f.n() * (prec + 1))?;
    EisensteinPoly::new(base.clone(), coeffs)
}

/// Minimal polynomial of the uniformizer `ρ` with `π = ρ(1 + θρ^m)`,
/// the composition direction used for norm computations.
pub(crate) fn substitute_unit_scale(
    f: &EisensteinPoly,
    theta: &ResidueElement,
    m: usize,
) -> Result<EisensteinPoly> {
    if theta.is_zero() {
        return Ok(f.clone());
    }
    let base = &f.base;
    let prec = base.default_precision();
    let c = base.rep(theta, prec);
    let h = compose(f, &c, m, &[])?;
    let coeffs = lift_factor(&h, base, f.n(), f.n() * (prec + 1))?;
    EisensteinPoly::new(base.clone(), coeffs)
}

/// Replace `f(T)` by `θ^n f(θ^{−1}T)` for a unit residue `θ`: scales digit
/// `(i, j)` by `θ^{n−i}` without changing the generated extension.
fn scale_generator(f: &EisensteinPoly, theta: &ResidueElement) -> Result<EisensteinPoly> {
    let base = &f.base;
    let kappa = base.residue_field();
    if *theta == kappa.one() {
        return Ok(f.clone());
    }
    let n = f.n();
    let mut coeffs = Vec::with_capacity(n);
    for (i, fi) in f.coeffs.iter().enumerate() {
        let scale = kappa.pow(theta, (n - i) as u64);
        let digits = fi.digits.iter().map(|d| kappa.mul(d, &scale)).collect();
        coeffs.push(base.from_digits(digits)?);
    }
    EisensteinPoly::new(base.clone(), coeffs)
}

/// The fixed system of unit-class representatives for step 0: first
/// occurrence (in the residue-field element order) of each class of
/// `κ^× / (κ^×)^n`.
pub fn step0_representatives(f: &EisensteinPoly) -> Vec<ResidueElement> {
    f.base.residue_field().power_class_reps(f.n() as u64)
}

fn step0_theta(f: &EisensteinPoly) -> Result<ResidueElement> {
    let kappa = f.base.residue_field();
    let alpha = f.eta();
    let reps = step0_representatives(f);
    let d = gcd(f.n() as u64, kappa.q - 1);
    let beta = reps
        .iter()
        .find(|r| {
            let ratio = kappa.div(&alpha, r);
            kappa.dlog(&ratio).map(|e| e % d == 0).unwrap_or(false)
        })
        .cloned()
        .ok_or_else(|| Error::Internal("no power-class representative matched".into()))?;
    let ratio = kappa.div(&beta, &alpha);
    kappa
        .nth_root_min_dlog(&ratio, f.n() as u64)
        .ok_or_else(|| Error::Internal("step-0 root must exist within the class".into()))
}

/// Step 0 of the reduction: normalize the residue of `−f_0/π_K` into the
/// fixed representative system by a substitution `T ↦ θ^{−1}T` (scaled back
/// to monic).  Idempotent.
pub fn reduce_step0(f: &EisensteinPoly) -> Result<EisensteinPoly> {
    scale_generator(f, &step0_theta(f)?)
}

/// The digit position `(i, j)` rewritten by the level-`m` substitution:
/// `nj + i = n(φ(m) + 1)`.
fn level_position(data: &RamData, m: u64) -> Result<(usize, usize)> {
    let pos = rat(data.n as i64, 1) * (data.phi_eval(rat(m as i64, 1)) + Rat::one());
    if !pos.is_integer() {
        return Err(Error::Internal(format!("level {m} has non-integral digit position")));
    }
    let pos = pos.to_integer() as usize;
    Ok((pos % data.n, pos / data.n))
}

/// The linearized level map `θ ↦ η̄^j S_m(θ)` as additive terms; `None` when
/// the residual polynomial at `m` is identically zero.
fn twisted_terms(
    f: &EisensteinPoly,
    data: &RamData,
    m: u64,
    j: usize,
) -> Result<Vec<(u32, ResidueElement)>> {
    let kappa = f.base.residue_field();
    let sm = residual_poly_with(f, data, m)?;
    let ResidualBody::Additive(terms) = &sm.body else {
        return Err(Error::Internal("level maps are defined for m ≥ 1".into()));
    };
    let etaj = kappa.pow(&f.eta(), j as u64);
    Ok(terms.iter().map(|(a, c)| (*a, kappa.mul(c, &etaj))).collect())
}

/// All residues `θ` solving `η̄^j S_m(θ) = rhs`, lexicographically sorted;
/// empty when `rhs` is not in the image.
fn level_solutions(
    kappa: &ResidueField,
    terms: &[(u32, ResidueElement)],
    rhs: &ResidueElement,
) -> Vec<ResidueElement> {
    let p = kappa.p;
    let mat = kappa.additive_map_matrix(terms);
    let Some(particular) = solve_lex_min(&mat, &rhs.coords, p) else {
        return vec![];
    };
    let kernel = kernel_basis(&mat, p);
    let mut out: Vec<ResidueElement> = enumerate_span(&kernel, kappa.f, p)
        .into_iter()
        .map(|k| {
            let kk = ResidueElement { coords: k };
            kappa.add(&ResidueElement { coords: particular.clone() }, &kk)
        })
        .collect();
    out.sort();
    out
}

/// Number of kernel elements of the level map (the branch arity at `m`).
fn level_kernel_size(kappa: &ResidueField, terms: &[(u32, ResidueElement)]) -> u64 {
    let mat = kappa.additive_map_matrix(terms);
    let kernel = kernel_basis(&mat, kappa.p);
    kappa.p.pow(kernel.len() as u32)
}

/// Canonical representative of `α` modulo the image of the level map.
fn canonical_digit(
    kappa: &ResidueField,
    terms: &[(u32, ResidueElement)],
    alpha: &ResidueElement,
) -> ResidueElement {
    let p = kappa.p;
    let mat = kappa.additive_map_matrix(terms);
    // Image basis: columns of the matrix.
    let mut image: Vec<Vec<u64>> =
        (0..kappa.f).map(|c| mat.iter().map(|row| row[c]).collect()).collect();
    let pivots = rref(&mut image, p);
    let mut coords = alpha.coords.clone();
    reduce_by_rref(&mut coords, &image, &pivots, p);
    ResidueElement { coords }
}

/// One reduction step at integer level `m ≥ 1`: normalize the digit at
/// position `n(φ(m)+1)` to its canonical representative.  At integer breaks
/// the solution is only determined modulo the kernel of `S_m`; the `choice`
/// kernel element selects the branch and is required there.
pub fn reduce_step(
    f: &EisensteinPoly,
    m: u64,
    choice: Option<&ResidueElement>,
) -> Result<EisensteinPoly> {
    let data = ramification_data(f)?;
    let kappa = f.base.residue_field().clone();
    let (i, j) = level_position(&data, m)?;
    let terms = twisted_terms(f, &data, m, j)?;
    let alpha = f.coeff_digit(i, j)?;
    let beta = canonical_digit(&kappa, &terms, &alpha);
    let rhs = kappa.sub(&alpha, &beta);
    let solutions = level_solutions(&kappa, &terms, &rhs);
    if solutions.is_empty() {
        return Err(Error::Internal("canonical digit not reachable".into()));
    }
    let is_break = data.breaks.contains(&rat(m as i64, 1));
    let theta = if is_break {
        let Some(k) = choice else {
            return Err(Error::ChoiceRequired {
                level: m as i64,
                arity: level_kernel_size(&kappa, &terms) as usize,
            });
        };
        kappa.add(&solutions[0], k)
    } else {
        solutions[0].clone()
    };
    substitute(f, &theta, m as usize)
}

/// Zero every digit with `nj + i > bound` (positions beyond the Krasner
/// bound do not affect the generated extension).
pub(crate) fn truncate_poly(f: &EisensteinPoly, bound: usize) -> Result<EisensteinPoly> {
    let base = &f.base;
    let kappa = base.residue_field();
    let n = f.n();
    let mut coeffs = Vec::with_capacity(n);
    for (i, fi) in f.coeffs.iter().enumerate() {
        let digits = fi
            .digits
            .iter()
            .enumerate()
            .map(|(j, d)| if n * j + i > bound { kappa.zero() } else { d.clone() })
            .collect();
        coeffs.push(base.from_digits(digits)?);
    }
    EisensteinPoly::new(base.clone(), coeffs)
}

fn digit_key(f: &EisensteinPoly, bound: usize) -> Result<Vec<Vec<u64>>> {
    let n = f.n();
    let mut key = vec![];
    for w in n..=bound {
        let i = w % n;
        let j = w / n;
        if j == 0 || i >= n {
            continue;
        }
        key.push(f.coeff_digit(i, j)?.coords);
    }
    Ok(key)
}

/// The canonical reduced polynomial reachable from `f` by the zero-kernel
/// branch at every break, truncated at the Krasner bound.
pub fn reduce(f: &EisensteinPoly) -> Result<EisensteinPoly> {
    let data = ramification_data(f)?;
    let need = required_precision(&data);
    f.base.require_precision(need)?;
    let zero = f.base.residue_field().zero();
    let mut g = reduce_step0(f)?;
    let mut m = 1u64;
    while rat(m as i64, 1) <= data.t_max() {
        g = reduce_step(&g, m, Some(&zero))?;
        m += 1;
    }
    truncate_poly(&g, krasner_bound(&data))
}

/// Explore every reduction branch: `gcd(n, q−1)` step-0 scalings and the
/// kernel of `S_{t_i}` at each integer break, then truncate at the Krasner
/// bound and collect the multiset.
pub fn all_reduced(f: &EisensteinPoly) -> Result<ReducedMultiset> {
    let data = ramification_data(f)?;
    let need = required_precision(&data);
    f.base.require_precision(need)?;
    let kappa = f.base.residue_field().clone();
    let q = kappa.q;
    let n = f.n() as u64;
    let d = gcd(n, q - 1);
    // Step-0 branches: the canonical scaling times each n-th root of unity.
    let theta0 = step0_theta(f)?;
    let g = kappa.primitive_root();
    let mut frontier = vec![];
    for k in 0..d {
        let mu = kappa.pow(&g, k * ((q - 1) / d));
        frontier.push(scale_generator(f, &kappa.mul(&theta0, &mu))?);
    }
    // Integer levels 1..t_k.
    let mut m = 1u64;
    while rat(m as i64, 1) <= data.t_max() {
        let is_break = data.breaks.contains(&rat(m as i64, 1));
        let mut next = Vec::with_capacity(frontier.len());
        for g in &frontier {
            let gdata = ramification_data(g)?;
            let (i, j) = level_position(&gdata, m)?;
            let terms = twisted_terms(g, &gdata, m, j)?;
            let alpha = g.coeff_digit(i, j)?;
            let beta = canonical_digit(&kappa, &terms, &alpha);
            let rhs = kappa.sub(&alpha, &beta);
            let solutions = level_solutions(&kappa, &terms, &rhs);
            if solutions.is_empty() {
                return Err(Error::Internal("canonical digit not reachable".into()));
            }
            if is_break {
                for theta in &solutions {
                    next.push(substitute(g, theta, m as usize)?);
                }
            } else {
                next.push(substitute(g, &solutions[0], m as usize)?);
            }
        }
        frontier = next;
        m += 1;
    }
    let bound = krasner_bound(&data);
    let mut entries: BTreeMap<Vec<Vec<u64>>, (EisensteinPoly, usize)> = BTreeMap::new();
    for g in &frontier {
        let t = truncate_poly(g, bound)?;
        let key = digit_key(&t, bound)?;
        entries.entry(key).and_modify(|e| e.1 += 1).or_insert((t, 1));
    }
    let b = frontier.len() as u64;
    let entries: Vec<(EisensteinPoly, usize)> = entries.into_values().collect();
    let aut = entries[0].1 as u64;
    if entries.iter().any(|e| e.1 as u64 != aut) {
        return Err(Error::Internal(
            "reduced multiset has non-uniform multiplicities".into(),
        ));
    }
    Ok(ReducedMultiset { entries, b, aut })
}

/// `B`, the automorphism count, and the distinct reduced polynomials of the
/// extension generated by `f`.  `B` is computed independently from the
/// break data (`ρ_0 = gcd(n, q−1)` and the kernel sizes of `S_{t_i}` at
/// integer breaks) and cross-checked against the branch count.
pub fn aut_info(f: &EisensteinPoly) -> Result<AutInfo> {
    let data = ramification_data(f)?;
    let kappa = f.base.residue_field().clone();
    let mut b = gcd(f.n() as u64, kappa.q - 1);
    for t in &data.breaks {
        if t.is_integer() && *t > Rat::zero() {
            let m = t.to_integer() as u64;
            let (_, j) = level_position(&data, m)?;
            let terms = twisted_terms(f, &data, m, j)?;
            b *= level_kernel_size(&kappa, &terms);
        }
    }
    let multiset = all_reduced(f)?;
    if multiset.b != b {
        return Err(Error::Internal(format!(
            "branch count {} disagrees with the break formula {}",
            multiset.b, b
        )));
    }
    Ok(AutInfo {
        b,
        aut: multiset.aut,
        reduced: multiset.entries.into_iter().map(|e| e.0).collect(),
    })
}
