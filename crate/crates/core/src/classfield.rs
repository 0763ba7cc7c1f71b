//! Defining polynomials for totally ramified abelian extensions prescribed
//! by norm data.
//!
//! A finite-index subgroup `N ≤ K^×` containing a uniformizer is described
//! by a [`NormGroupSpec`]: a designated uniformizer `π_N ∈ N`, the order of
//! the tame quotient, and, for each unit level `u` where `N` cuts a proper
//! condition, a surjective `F_p`-linear map on residue digits whose kernel
//! names the admissible digits at that level.  The subgroup meant by such a
//! datum is the closed group generated by `π_N`, the Teichmüller lifts of
//! the allowed tame classes, the canonical lifts `1 + ω(c)π^w` of kernel
//! digits at condition levels and of arbitrary digits at all other levels,
//! and every unit congruent to `1` past the last condition level.  Distinct
//! data generate distinct groups, and membership of a unit is decidable by
//! peeling those canonical factors off digit by digit ([`NormGroupSpec::contains_unit`]).
//!
//! [`construct`] produces the reduced Eisenstein polynomial whose root field
//! has norm group exactly `N`.  The constant coefficient is pinned to
//! `(−1)^n π_N`; the ramification polygon — hence the set of free digit
//! positions of the reduced form — is synthesized from the condition levels
//! alone ([`skeleton`]); and the free digits are then determined a stage at
//! a time by solving linear conditions that place norms of principal units
//! ([`norm_unit`]) inside `N`.  Each stage targets the digit positions whose
//! effect on unit norms first becomes visible at the stage's level, so the
//! system is triangular across stages and never revisits a solved digit.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::padics::{binomial_exact, BaseField, IntegerElement, Valuation};
use crate::ramify::{
    derive_ram_data, ramification_data, reduced_support, val_p, EisensteinPoly, NewtonPolygon,
    RamData, SupportKind,
};
use crate::rational::{rat, Rat};
use crate::reduce::{required_precision, substitute_unit_scale};
use crate::residue::{kernel_basis, mat_vec, rref, solve_lex_min, ResidueElement};
use crate::Result;

/// Norm data for a totally ramified class field: a uniformizer that must be
/// a norm, the tame index, and one surjective digit condition per wild level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormGroupSpec {
    pub base: BaseField,
    /// Designated uniformizer contained in the group.
    pub pi_n: IntegerElement,
    /// Order of the tame quotient; divides `q - 1`.
    pub tame_order: u64,
    /// Level `u` ↦ matrix rows (length `f`, entries mod `p`) of a surjective
    /// `F_p`-linear map on the residue field whose kernel is the set of
    /// admissible digits of `ε - 1` at depth `u` after peeling.
    pub wild: BTreeMap<u64, Vec<Vec<u64>>>,
}

impl NormGroupSpec {
    pub fn new(
        base: BaseField,
        pi_n: IntegerElement,
        tame_order: u64,
        wild: BTreeMap<u64, Vec<Vec<u64>>>,
    ) -> Result<Self> {
        let p = base.p();
        let wild = wild
            .into_iter()
            .map(|(u, mat)| {
                let mat = mat
                    .into_iter()
                    .map(|row| row.into_iter().map(|x| x % p).collect())
                    .collect();
                (u, mat)
            })
            .collect();
        let spec = NormGroupSpec { base, pi_n, tame_order, wild };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.base.p();
        let fdim = self.base.f() as usize;
        match self.base.val(&self.pi_n) {
            Valuation::Exact(1) => {}
            _ => {
                return Err(Error::InvalidSpec(
                    "the designated norm must be a uniformizer".into(),
                ))
            }
        }
        if self.tame_order == 0 || (self.base.q() - 1) % self.tame_order != 0 {
            return Err(Error::InvalidSpec(format!(
                "tame order {} does not divide q - 1 = {}",
                self.tame_order,
                self.base.q() - 1
            )));
        }
        for (&u, mat) in &self.wild {
            if u == 0 {
                return Err(Error::InvalidSpec("unit condition levels start at 1".into()));
            }
            if mat.is_empty() || mat.iter().any(|row| row.len() != fdim) {
                return Err(Error::InvalidSpec(format!(
                    "condition at level {u} must have rows of length {fdim}"
                )));
            }
            let mut m = mat.clone();
            let pivots = rref(&mut m, p);
            if pivots.len() != mat.len() {
                return Err(Error::InvalidSpec(format!(
                    "condition at level {u} is not surjective (dependent rows)"
                )));
            }
        }
        if self.wild_rank() > 24 || self.degree() > 100_000 {
            return Err(Error::InvalidSpec("datum degree too large".into()));
        }
        Ok(())
    }

    /// Total number of independent wild conditions (`s` with `n = n'·p^s`).
    pub fn wild_rank(&self) -> u32 {
        self.wild.values().map(|m| m.len() as u32).sum()
    }

    /// Degree of the class field: tame order times `p^(wild rank)`.
    pub fn degree(&self) -> usize {
        self.tame_order as usize * (self.base.p() as usize).pow(self.wild_rank())
    }

    /// Divide out the canonical factors of a unit below `limit`: the
    /// Teichmüller lift of its residue (which must lie in the allowed tame
    /// classes) and one canonical lift `1 + ω(c)π^w` per level `w < limit`,
    /// verifying the kernel condition at every condition level passed.
    fn peel_to(&self, eps: &IntegerElement, limit: u64) -> Result<IntegerElement> {
        let base = &self.base;
        let kappa = base.residue_field();
        let prec = eps.precision();
        let e0 = base.digit(eps, 0)?;
        if e0.is_zero() {
            return Err(Error::NotAUnit);
        }
        if self.tame_order > 1 {
            let dl = kappa.dlog(&e0).expect("nonzero residue has a discrete log");
            if dl % self.tame_order != 0 {
                return Err(Error::InconsistentNormDatum(
                    "unit residue lies outside the allowed tame classes".into(),
                ));
            }
        }
        let one = base.one(prec);
        let mut y = eps.clone();
        if e0 != kappa.one() {
            y = base.mul(&y, &base.unit_inv(&base.rep(&e0, prec))?);
        }
        for w in 1..limit as usize {
            let c = base.digit(&base.sub(&y, &one), w)?;
            if c.is_zero() {
                continue;
            }
            if let Some(mat) = self.wild.get(&(w as u64)) {
                if mat_vec(mat, &c.coords, base.p()).iter().any(|&x| x != 0) {
                    return Err(Error::InconsistentNormDatum(format!(
                        "digit at level {w} violates the condition there"
                    )));
                }
            }
            let fac = base.add(&one, &base.shift(&base.rep(&c, prec), w));
            y = base.mul(&y, &base.unit_inv(&fac)?);
        }
        Ok(y)
    }

    /// Evaluate the level-`u` condition map on a unit: peel everything below
    /// `u` (verifying membership along the way), then apply the matrix at
    /// `u` to the remaining digit of `ε - 1`.  A zero vector means the unit
    /// satisfies the condition at level `u`.
    pub fn level_value(&self, eps: &IntegerElement, u: u64) -> Result<Vec<u64>> {
        let mat = self
            .wild
            .get(&u)
            .ok_or_else(|| Error::InvalidSpec(format!("no condition at level {u}")))?;
        if u as usize >= eps.precision() {
            return Err(Error::PrecisionInsufficient { needed: u as usize + 1 });
        }
        let y = self.peel_to(eps, u)?;
        let one = self.base.one(eps.precision());
        let c = self.base.digit(&self.base.sub(&y, &one), u as usize)?;
        Ok(mat_vec(mat, &c.coords, self.base.p()))
    }

    /// Whether a unit lies in the group described by this datum.
    pub fn contains_unit(&self, eps: &IntegerElement) -> Result<bool> {
        let top = self.wild.keys().max().copied().unwrap_or(0);
        match self.peel_to(eps, top + 1) {
            Ok(_) => Ok(true),
            Err(Error::InconsistentNormDatum(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Recover the canonical datum of the closed subgroup generated by
    /// `π_N`, the given units, and everything congruent to `1` at depth
    /// `level_cap`.  Fails when that subgroup is not expressible by
    /// canonical digit conditions (its levels don't split along the
    /// canonical lifts).  Exponential in `q^level_cap`; intended for small
    /// cross-checks against independently known norm groups.
    pub fn from_unit_generators(
        base: &BaseField,
        pi_n: &IntegerElement,
        unit_gens: &[IntegerElement],
        level_cap: usize,
    ) -> Result<NormGroupSpec> {
        base.require_precision(level_cap + 1)?;
        let p = base.p();
        let q = base.q();
        let kappa = base.residue_field().clone();
        let mut gens = vec![];
        for g in unit_gens {
            if base.digit(g, 0)?.is_zero() {
                return Err(Error::NotAUnit);
            }
            gens.push(base.truncate(g, level_cap));
        }
        // Closure of the generated subgroup of (O/π^level_cap)^× under
        // multiplication (finite group, so inverses come for free).
        let mut closure: BTreeSet<IntegerElement> = BTreeSet::new();
        closure.insert(base.truncate(&base.one(level_cap), level_cap));
        let mut work: Vec<IntegerElement> = closure.iter().cloned().collect();
        while let Some(x) = work.pop() {
            for g in &gens {
                let y = base.truncate(&base.mul(&x, g), level_cap);
                if closure.insert(y.clone()) {
                    work.push(y);
                }
            }
        }
        // Tame order: index of the subgroup of κ^× generated by the residues.
        let mut tame_order = q - 1;
        for g in &gens {
            let dl = kappa.dlog(&base.digit(g, 0)?).expect("unit residue");
            tame_order = gcd(tame_order, dl);
        }
        // Level data: at each depth, the digits of x - 1 over members with
        // x ≡ 1 (mod π^u) span the admissible set; a proper span is a
        // condition level, its annihilator the condition matrix.
        let one = base.one(level_cap);
        let mut wild = BTreeMap::new();
        let mut rank_sum = 0u32;
        for u in 1..level_cap {
            let mut rows: Vec<Vec<u64>> = vec![];
            for x in &closure {
                let t = base.sub(x, &one);
                if (0..u).all(|w| {
                    self_digit_is_zero(base, &t, w)
                }) {
                    rows.push(base.digit(&t, u)?.coords.clone());
                }
            }
            let ann = kernel_basis(&rows, p);
            if !ann.is_empty() {
                rank_sum += ann.len() as u32;
                wild.insert(u as u64, ann);
            }
        }
        let spec = NormGroupSpec::new(base.clone(), pi_n.clone(), tame_order, wild)?;
        // The canonical group of the derived datum must agree with the
        // generated subgroup: every generator product must pass the peeling
        // test, and the group orders mod π^level_cap must coincide.
        for x in &closure {
            if !spec.contains_unit(x)? {
                return Err(Error::InvalidSpec(
                    "unit generators do not span a canonically presentable subgroup at this depth"
                        .into(),
                ));
            }
        }
        let expected_times = (spec.tame_order as u128) * (p as u128).pow(rank_sum);
        let full = (q as u128 - 1) * (q as u128).pow(level_cap as u32 - 1);
        if (closure.len() as u128) * expected_times != full {
            return Err(Error::InvalidSpec(
                "unit generators do not span a canonically presentable subgroup at this depth"
                    .into(),
            ));
        }
        Ok(spec)
    }
}

fn self_digit_is_zero(base: &BaseField, x: &IntegerElement, w: usize) -> bool {
    base.digit(x, w).map(|d| d.is_zero()).unwrap_or(false)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Ramification data of the class field determined by the condition levels
/// alone, together with the free digit positions of its reduced defining
/// polynomial.  The lower breaks follow from the transition function: level
/// `u_r` sits at `t_r = t_{r-1} + (u_r - u_{r-1})·n / g_r` where `g_r` is
/// the wild group order below the `r`-th break, and the polygon has one
/// segment of slope `-t_r` per break (plus a flat tame segment).
pub fn skeleton(spec: &NormGroupSpec) -> Result<(RamData, Vec<(usize, usize)>)> {
    spec.validate()?;
    let p = spec.base.p();
    let n = spec.degree();
    if n < 2 {
        return Err(Error::InvalidSpec(
            "the datum describes the base field itself (degree 1)".into(),
        ));
    }
    let s = spec.wild_rank();
    // Vertices accumulated right to left.
    let mut rev: Vec<(usize, i64)> = vec![(n, 0)];
    if spec.tame_order > 1 {
        rev.push(((p as usize).pow(s), 0));
    }
    let mut remaining = s; // wild rank strictly above the current break
    let mut t_prev = 0i64;
    let mut u_prev = 0i64;
    let mut ord = 0i64;
    for (&u, mat) in &spec.wild {
        let g = (p as i64).pow(remaining);
        debug_assert_eq!((u as i64 - u_prev) * n as i64 % g, 0);
        let t = t_prev + (u as i64 - u_prev) * n as i64 / g;
        let x_right = rev.last().unwrap().0;
        remaining -= mat.len() as u32;
        let x_left = (p as usize).pow(remaining);
        ord += t * (x_right - x_left) as i64;
        rev.push((x_left, ord));
        t_prev = t;
        u_prev = u as i64;
    }
    debug_assert_eq!(rev.last().unwrap().0, 1);
    rev.reverse();
    let data = derive_ram_data(NewtonPolygon { vertices: rev }, n, p)?;
    // In characteristic zero a wild break cannot exceed the bound imposed
    // by v(p): reject data demanding deeper ramification than exists.
    if spec.base.is_char_zero() {
        for l in 0..s as usize {
            let cap = rat(n as i64, (p as i64).pow(l as u32 + 1) - (p as i64).pow(l as u32));
            if data.tau[l] > cap {
                return Err(Error::InvalidSpec(format!(
                    "condition level at wild depth {l} demands ramification deeper than v(p) allows"
                )));
            }
        }
    }
    let support = reduced_support(&data)
        .into_iter()
        .filter(|e| e.i != 0 && e.kind == SupportKind::Range)
        .map(|e| (e.i, e.j))
        .collect();
    Ok((data, support))
}

/// The norm `N(1 + ω(θ)ρ^m)` of a principal unit of the field cut out by
/// `f`, where `ρ` is the root of the substituted polynomial with
/// `π = ρ(1 + ω(θ)ρ^m)`: the ratio `f_0 / g_0` of the constant coefficients
/// computes it exactly.
pub fn norm_unit(f: &EisensteinPoly, theta: &ResidueElement, m: usize) -> Result<IntegerElement> {
    if m == 0 {
        return Err(Error::InvalidSpec("unit levels start at m = 1".into()));
    }
    let base = &f.base;
    if theta.is_zero() {
        return Ok(base.one(base.default_precision()));
    }
    let g = substitute_unit_scale(f, theta, m)?;
    let fu = base.unshift(&f.coeffs[0], 1)?;
    let gu = base.unshift(&g.coeffs[0], 1)?;
    Ok(base.mul(&fu, &base.unit_inv(&gu)?))
}

/// Digit positions `(i, j)` with `p^ℓ ∥ i` exactly, inside the level-`ℓ`
/// band `ξ_ℓ + n ≤ nj + i < σ_ℓ + n`, ordered by `nj + i`.
pub fn range_pairs(data: &RamData, l: u32) -> Vec<(usize, usize)> {
    let n = data.n as i64;
    let lo = data.xi[l as usize] + rat(n, 1);
    let hi = data.sigma[l as usize] + rat(n, 1);
    let mut out = vec![];
    let mut z = lo.ceil().to_integer();
    while rat(z, 1) < hi {
        let i = (z % n) as usize;
        let j = (z as usize - i) / data.n;
        if i != 0 && val_p(data.p, i as u64) == l && j >= 1 {
            out.push((i, j));
        }
        z += 1;
    }
    out
}

/// The unit level `m` and condition level `u` at which the digit `(i, j)`
/// of a reduced polynomial is determined: `m` solves
/// `nj + i + p^ℓ·m = σ_ℓ + n` and `u` is the upper break over `τ_ℓ`.
pub fn stage_parameters(data: &RamData, i: usize, j: usize) -> Option<(u64, u64)> {
    let l = val_p(data.p, i as u64);
    if l > data.s {
        return None;
    }
    let pl = (data.p as i64).pow(l);
    let num = data.sigma[l as usize] + rat(data.n as i64, 1) - rat((data.n * j + i) as i64, 1);
    if num <= rat(0, 1) || !num.is_integer() || num.to_integer() % pl != 0 {
        return None;
    }
    let u = rat(data.n as i64, 1).recip() * data.sigma[l as usize];
    if !u.is_integer() {
        return None;
    }
    Some(((num.to_integer() / pl) as u64, u.to_integer() as u64))
}

/// Norms of principal units at level `m` do not depend on the digit `(i, j)`
/// below this many digits: the first level where the digit can matter is
/// `(nj + i + min_{k ≤ ℓ}(ξ_k − ξ_ℓ + p^k m)) / n − 1`.
pub fn norm_level_bound(data: &RamData, i: usize, j: usize, m: u64) -> Rat {
    let l = val_p(data.p, i as u64).min(data.s) as usize;
    let best = (0..=l)
        .map(|k| data.xi[k] - data.xi[l] + rat((data.p as i64).pow(k as u32) * m as i64, 1))
        .min()
        .expect("at least one term");
    (rat((data.n * j + i) as i64, 1) + best) / rat(data.n as i64, 1) - rat(1, 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageReport {
    /// Condition level whose map the stage makes vanish on unit norms.
    pub u: u64,
    /// Unit level of the norms evaluated at this stage.
    pub m: u64,
    /// Digit positions determined by this stage.
    pub positions: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub poly: EisensteinPoly,
    pub data: RamData,
    pub stages: Vec<StageReport>,
}

struct StagePlan {
    u: u64,
    m: u64,
    /// `(wild depth ℓ, i, j)` for every depth sharing the stage's break.
    targets: Vec<(u32, usize, usize)>,
}

/// Pick the next solvable stage: the smallest break `t` among the pending
/// heads such that the lower envelope of the determination lines is, at the
/// abscissa where it reaches `nφ(t) + n`, supported only by depths whose
/// break is `t` (so norms at that level see exactly the targeted digits).
fn choose_stage(data: &RamData, pending: &BTreeSet<(usize, usize)>) -> Result<StagePlan> {
    let n = data.n as i64;
    let p = data.p;
    // (slope p^k, intercept nj+i+ξ_k−ξ_ℓ, depth ℓ) for the head of each depth.
    let mut lines: Vec<(i64, Rat, u32)> = vec![];
    let mut head_depths: Vec<u32> = vec![];
    for l in 0..data.s {
        let head = range_pairs(data, l).into_iter().find(|pos| pending.contains(pos));
        if let Some((i, j)) = head {
            head_depths.push(l);
            for k in 0..=l {
                lines.push((
                    (p as i64).pow(k),
                    rat((data.n * j + i) as i64, 1) + data.xi[k as usize] - data.xi[l as usize],
                    l,
                ));
            }
        }
    }
    if lines.is_empty() {
        return Err(Error::Internal("no pending digits on the schedule".into()));
    }
    let mut cands: Vec<Rat> = head_depths.iter().map(|&l| data.tau[l as usize]).collect();
    cands.sort();
    cands.dedup();
    for t in cands {
        let v = rat(n, 1) * data.phi_eval(t) + rat(n, 1);
        let x = lines
            .iter()
            .map(|&(a, b, _)| (v - b) / rat(a, 1))
            .max()
            .expect("nonempty lines");
        // Depths supporting the envelope at x, split by one-sided slope.
        let at_x: Vec<(i64, u32)> = lines
            .iter()
            .filter(|&&(a, b, _)| rat(a, 1) * x + b == v)
            .map(|&(a, _, l)| (a, l))
            .collect();
        debug_assert!(!at_x.is_empty());
        let max_slope = at_x.iter().map(|&(a, _)| a).max().unwrap();
        let min_slope = at_x.iter().map(|&(a, _)| a).min().unwrap();
        let active_ok = at_x
            .iter()
            .filter(|&&(a, _)| a == max_slope || a == min_slope)
            .all(|&(_, l)| data.tau[l as usize] == t);
        if !active_ok {
            continue;
        }
        if !x.is_integer() {
            return Err(Error::Internal("stage level is not an integer".into()));
        }
        let m = x.to_integer();
        if m < 1 || m as u64 % p == 0 || rat(m, 1) > t {
            return Err(Error::Internal(format!("stage level {m} out of range")));
        }
        let u = data.phi_eval(t);
        if !u.is_integer() {
            return Err(Error::Internal("upper break at a stage is not an integer".into()));
        }
        let mut targets = vec![];
        for l in 0..data.s {
            if data.tau[l as usize] != t {
                continue;
            }
            let best = (0..=l)
                .map(|k| {
                    data.xi[k as usize] - data.xi[l as usize]
                        + rat((p as i64).pow(k) * m, 1)
                })
                .min()
                .expect("at least one term");
            let z = v - best;
            if !z.is_integer() {
                return Err(Error::Internal("stage target is not a digit position".into()));
            }
            let z = z.to_integer();
            let i = (z % n) as usize;
            let j = (z as usize - i) / data.n;
            if i == 0 || val_p(p, i as u64) != l || j < 1 {
                return Err(Error::Internal("stage target leaves the digit band".into()));
            }
            if !pending.contains(&(i, j)) {
                return Err(Error::Internal("stage retargets a solved digit".into()));
            }
            targets.push((l, i, j));
        }
        if targets.is_empty() {
            return Err(Error::Internal("stage has no digit targets".into()));
        }
        return Ok(StagePlan { u: u.to_integer() as u64, m: m as u64, targets });
    }
    Err(Error::Internal(
        "no stage level lies interior to its merged determination interval".into(),
    ))
}

/// The reduced defining polynomial of the class field of the datum.
pub fn construct(spec: &NormGroupSpec) -> Result<EisensteinPoly> {
    Ok(construct_detailed(spec)?.poly)
}

/// As [`construct`], also reporting the synthesized ramification data and
/// the stage-by-stage schedule that determined each digit.
pub fn construct_detailed(spec: &NormGroupSpec) -> Result<Construction> {
    let (data, support) = skeleton(spec)?;
    let base = &spec.base;
    base.require_precision(required_precision(&data))?;
    let prec = base.default_precision();
    let kappa = base.residue_field().clone();
    let p = base.p();
    let fdim = base.f() as usize;
    let n = data.n;
    let mut coeffs = vec![base.zero(prec); n];
    coeffs[0] = if n % 2 == 0 { spec.pi_n.clone() } else { base.neg(&spec.pi_n) };
    let eta = kappa.neg(&base.digit(&coeffs[0], 1)?);
    debug_assert!(!eta.is_zero());
    let mut pending: BTreeSet<(usize, usize)> = support.iter().copied().collect();
    let mut stages = vec![];
    let mut guard = support.len() + 1;
    while !pending.is_empty() {
        if guard == 0 {
            return Err(Error::Internal("stage schedule failed to terminate".into()));
        }
        guard -= 1;
        let plan = choose_stage(&data, &pending)?;
        let mat_u = spec
            .wild
            .get(&plan.u)
            .ok_or_else(|| {
                Error::InconsistentNormDatum(format!(
                    "the datum has no condition at level {}, but the ramification demands one",
                    plan.u
                ))
            })?;
        let lam_count = plan.targets.len();
        if mat_u.len() != lam_count {
            return Err(Error::InconsistentNormDatum(format!(
                "condition at level {} has rank {}, expected {}",
                plan.u,
                mat_u.len(),
                lam_count
            )));
        }
        // Per-target scaling of the digit's effect on level-u norm digits:
        // binom(i, p^ℓ)·η^(σ_ℓ/n − j), a unit.
        let mut lam = vec![];
        for &(l, i, j) in &plan.targets {
            let bin = binomial_exact(i as u64, p.pow(l))?;
            let bbar = base.digit(&base.from_integer(bin), 0)?;
            let e = data.sigma[l as usize] / rat(n as i64, 1) - rat(j as i64, 1);
            debug_assert!(e.is_integer() && e >= rat(0, 1));
            let lam_l = kappa.mul(&bbar, &kappa.pow(&eta, e.to_integer() as u64));
            debug_assert!(!lam_l.is_zero());
            lam.push(lam_l);
        }
        // Base point: targeted digits zeroed, previously solved ones kept.
        for &(_, i, j) in &plan.targets {
            coeffs[i] = base.set_digit(&coeffs[i], j, kappa.zero())?;
        }
        let f0 = EisensteinPoly::new(base.clone(), coeffs.clone())?;
        // One block of equations per residue-basis direction of θ: the norm
        // value must vanish under the level map, and each unknown digit
        // shifts it linearly by its λ·θ^(p^ℓ) multiple.
        let ncols = lam_count * fdim;
        let mut a = vec![vec![0u64; ncols]; lam_count * fdim];
        let mut b = vec![0u64; lam_count * fdim];
        for k0 in 0..fdim {
            let mut coordv = vec![0u64; fdim];
            coordv[k0] = 1;
            let theta = ResidueElement { coords: coordv };
            let eps = norm_unit(&f0, &theta, plan.m as usize)?;
            let r = spec.level_value(&eps, plan.u)?;
            for (trow, &rv) in r.iter().enumerate() {
                b[k0 * lam_count + trow] = (p - rv % p) % p;
            }
            for (li, &(l, _, _)) in plan.targets.iter().enumerate() {
                let tpow = kappa.pow(&theta, p.pow(l));
                let scale = kappa.mul(&lam[li], &tpow);
                for k in 0..fdim {
                    let mut cv = vec![0u64; fdim];
                    cv[k] = 1;
                    let alpha = ResidueElement { coords: cv };
                    let col = mat_vec(mat_u, &kappa.mul(&alpha, &scale).coords, p);
                    for (trow, &cvv) in col.iter().enumerate() {
                        a[k0 * lam_count + trow][li * fdim + k] = cvv;
                    }
                }
            }
        }
        let z = solve_lex_min(&a, &b, p).ok_or_else(|| {
            Error::InconsistentNormDatum("singular digit system at a condition level".into())
        })?;
        for (li, &(_, i, j)) in plan.targets.iter().enumerate() {
            let d = ResidueElement { coords: z[li * fdim..(li + 1) * fdim].to_vec() };
            coeffs[i] = base.set_digit(&coeffs[i], j, d)?;
            pending.remove(&(i, j));
        }
        stages.push(StageReport {
            u: plan.u,
            m: plan.m,
            positions: plan.targets.iter().map(|&(_, i, j)| (i, j)).collect(),
        });
    }
    let poly = EisensteinPoly::new(base.clone(), coeffs)?;
    // The finished polynomial must realize the synthesized polygon and pass
    // every scheduled membership condition exactly (not just linearly
    // around the stage base points).
    let realized = ramification_data(&poly)?;
    if realized.polygon.vertices != data.polygon.vertices {
        return Err(Error::InconsistentNormDatum(
            "constructed polynomial has unexpected ramification".into(),
        ));
    }
    for st in &stages {
        for k0 in 0..fdim {
            let mut coordv = vec![0u64; fdim];
            coordv[k0] = 1;
            let theta = ResidueElement { coords: coordv };
            let eps = norm_unit(&poly, &theta, st.m as usize)?;
            if !spec.contains_unit(&eps)? {
                return Err(Error::InconsistentNormDatum(
                    "a scheduled unit norm escapes the group after solving".into(),
                ));
            }
        }
    }
    Ok(Construction { poly, data, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identify::{is_isomorphic, Verdict};
    use crate::reduce::{all_reduced, reduce};

    fn q2(prec: usize) -> BaseField {
        BaseField::char_zero(2, 1, prec).unwrap()
    }

    fn q3(prec: usize) -> BaseField {
        BaseField::char_zero(3, 1, prec).unwrap()
    }

    fn poly(base: &BaseField, coeffs: &[i128]) -> EisensteinPoly {
        EisensteinPoly::from_integer_coeffs(base, coeffs).unwrap()
    }

    fn id_map() -> Vec<Vec<u64>> {
        vec![vec![1]]
    }

    fn spec_of(
        base: &BaseField,
        pi: i128,
        tame: u64,
        wild: &[(u64, Vec<Vec<u64>>)],
    ) -> NormGroupSpec {
        NormGroupSpec::new(
            base.clone(),
            base.from_integer(pi),
            tame,
            wild.iter().cloned().collect(),
        )
        .unwrap()
    }

    #[test]
    fn validate_accepts_the_reference_data() {
        let b2 = q2(8);
        let b3 = q3(8);
        spec_of(&b2, 2, 1, &[(1, id_map())]).validate().unwrap();
        spec_of(&b3, 3, 2, &[]).validate().unwrap();
        spec_of(&b3, 3, 2, &[(1, id_map())]).validate().unwrap();
    }

    #[test]
    fn validate_rejects_bad_data() {
        let b3 = q3(8);
        // Non-uniformizer designated norm.
        let r = NormGroupSpec::new(b3.clone(), b3.from_integer(9), 1, BTreeMap::new());
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
        // Tame order not dividing q - 1.
        let r = NormGroupSpec::new(b3.clone(), b3.from_integer(3), 4, BTreeMap::new());
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
        // Dependent (non-surjective) condition rows.
        let mat = vec![vec![1], vec![1]];
        let r = NormGroupSpec::new(
            b3.clone(),
            b3.from_integer(3),
            1,
            [(1u64, mat)].into_iter().collect(),
        );
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn skeleton_quadratic_over_q2() {
        let base = q2(8);
        let spec = spec_of(&base, 2, 1, &[(1, id_map())]);
        let (data, support) = skeleton(&spec).unwrap();
        assert_eq!(data.n, 2);
        assert_eq!(data.breaks, vec![rat(1, 1)]);
        assert_eq!(data.polygon.vertices, vec![(1, 1), (2, 0)]);
        assert_eq!(support, vec![(1, 1)]);
    }

    #[test]
    fn skeleton_tame_quadratic_over_q3() {
        let base = q3(8);
        let spec = spec_of(&base, 3, 2, &[]);
        let (data, support) = skeleton(&spec).unwrap();
        assert_eq!(data.n, 2);
        assert_eq!(data.breaks, vec![rat(0, 1)]);
        assert!(support.is_empty());
    }

    #[test]
    fn skeleton_sextic_over_q3() {
        let base = q3(8);
        let spec = spec_of(&base, 3, 2, &[(1, id_map())]);
        let (data, support) = skeleton(&spec).unwrap();
        assert_eq!(data.n, 6);
        assert_eq!(data.polygon.vertices, vec![(1, 4), (3, 0), (6, 0)]);
        assert_eq!(data.breaks, vec![rat(0, 1), rat(2, 1)]);
        assert_eq!(support, vec![(4, 1), (5, 1)]);
        assert_eq!(stage_parameters(&data, 4, 1), Some((2, 1)));
        assert_eq!(stage_parameters(&data, 5, 1), Some((1, 1)));
    }

    #[test]
    fn skeleton_biquadratic_over_q2() {
        let base = q2(12);
        let spec = spec_of(&base, 2, 1, &[(1, id_map()), (2, id_map())]);
        let (data, support) = skeleton(&spec).unwrap();
        assert_eq!(data.n, 4);
        assert_eq!(data.polygon.vertices, vec![(1, 5), (2, 2), (4, 0)]);
        assert_eq!(data.breaks, vec![rat(1, 1), rat(3, 1)]);
        assert_eq!(support, vec![(2, 1), (1, 2), (3, 2)]);
    }

    #[test]
    fn skeleton_rejects_impossible_ramification() {
        // A level-3 condition on a quadratic over Q_2 would demand a break
        // beyond v(p): no such extension exists.
        let base = q2(10);
        let spec = spec_of(&base, 2, 1, &[(3, id_map())]);
        assert!(matches!(skeleton(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn norm_unit_reference_values() {
        let base = q2(8);
        let kappa = base.residue_field().clone();
        let one = kappa.one();
        // N(1 + ρ) for T² + 2T + 2 is a square-class-1 unit: ≡ 1 (mod 4).
        let f = poly(&base, &[2, 2]);
        let eps = norm_unit(&f, &one, 1).unwrap();
        assert!(base.eq_mod(&eps, &base.from_integer(1), 2).unwrap());
        // N(1 + ρ) for T² + 2 is ≡ 3 (mod 8).
        let f = poly(&base, &[2, 0]);
        let eps = norm_unit(&f, &one, 1).unwrap();
        assert!(base.eq_mod(&eps, &base.from_integer(3), 3).unwrap());
        // θ = 0 is the trivial substitution.
        let eps = norm_unit(&f, &kappa.zero(), 1).unwrap();
        assert_eq!(eps, base.one(base.default_precision()));
        // N(1 + ρ) for T³ − 3 is ≡ 4 (mod 9).
        let b3 = q3(8);
        let f = poly(&b3, &[-3, 0, 0]);
        let eps = norm_unit(&f, &b3.residue_field().one(), 1).unwrap();
        assert!(b3.eq_mod(&eps, &b3.from_integer(4), 2).unwrap());
    }

    #[test]
    fn norms_insensitive_below_the_digit_bound() {
        // Unit norms at level m agree below (nj+i+min(ξ_k−ξ_ℓ+p^k m))/n − 1
        // digits when the (i,j) digit changes.
        let base = q2(10);
        let one = base.residue_field().one();
        let f = poly(&base, &[2, 0]);
        let g = poly(&base, &[2, 2]);
        let data = ramification_data(&g).unwrap();
        let bound = norm_level_bound(&data, 1, 1, 3);
        assert!(bound >= rat(2, 1));
        let ef = norm_unit(&f, &one, 3).unwrap();
        let eg = norm_unit(&g, &one, 3).unwrap();
        assert!(base.eq_mod(&ef, &eg, 2).unwrap());

        let b3 = q3(10);
        let one3 = b3.residue_field().one();
        let f = poly(&b3, &[-3, 0, 0]);
        let g = poly(&b3, &[-3, 0, 3]);
        let data = ramification_data(&g).unwrap();
        let bound = norm_level_bound(&data, 2, 1, 4);
        assert!(bound >= rat(2, 1));
        let ef = norm_unit(&f, &one3, 4).unwrap();
        let eg = norm_unit(&g, &one3, 4).unwrap();
        assert!(b3.eq_mod(&ef, &eg, 2).unwrap());
    }

    #[test]
    fn norm_delta_is_linear_in_the_scheduled_digit() {
        // At the scheduled level m = M(i,j) the digit moves the norm by
        // +π^u·z·λ·θ^(p^ℓ) with λ = binom(i, p^ℓ)·η^(σ_ℓ/n − j).  For the
        // cubic family T³ + 3zT² − 3: λ = binom(2,1)·η⁰ = 2, u = 1.
        let base = q3(8);
        let kappa = base.residue_field().clone();
        let one = kappa.one();
        let eps0 = norm_unit(&poly(&base, &[-3, 0, 0]), &one, 1).unwrap();
        for z in 1..3i128 {
            let fz = poly(&base, &[-3, 0, 3 * if z == 2 { -1 } else { 1 }]);
            let epsz = norm_unit(&fz, &one, 1).unwrap();
            let delta = base.sub(&epsz, &eps0);
            let expected = base.from_integer(3 * 2 * if z == 2 { -1 } else { 1 });
            assert!(
                base.eq_mod(&delta, &expected, 2).unwrap(),
                "digit {z}: delta mismatch"
            );
        }
    }

    #[test]
    fn construct_quadratics_over_q2() {
        let base = q2(10);
        // ⟨2⟩·(1 + 4Z₂) is the norm group of the 4th cyclotomic field.
        let f = construct(&spec_of(&base, 2, 1, &[(1, id_map())])).unwrap();
        assert_eq!(f, poly(&base, &[2, 2]));
        // ⟨−2⟩·(1 + 4Z₂).
        let f = construct(&spec_of(&base, -2, 1, &[(1, id_map())])).unwrap();
        assert_eq!(f, poly(&base, &[-2, 2]));
        // Level-2 conditions: ⟨±2⟩·⟨3⟩·(1 + 8Z₂).
        let f = construct(&spec_of(&base, 2, 1, &[(2, id_map())])).unwrap();
        assert_eq!(f, poly(&base, &[2, 0]));
        let f = construct(&spec_of(&base, -2, 1, &[(2, id_map())])).unwrap();
        assert_eq!(f, poly(&base, &[-2, 4]));
        // That last group also contains 10 = −2·(−5), so the field matches
        // the reduced class of T² + 10.
        assert_eq!(
            is_isomorphic(&f, &poly(&base, &[10, 0])).unwrap(),
            Verdict::Isomorphic
        );
    }

    #[test]
    fn construct_tame_quadratic_over_q3() {
        let base = q3(8);
        let f = construct(&spec_of(&base, 3, 2, &[])).unwrap();
        assert_eq!(f, poly(&base, &[3, 0]));
    }

    #[test]
    fn construct_cyclic_cubic_over_q3() {
        let base = q3(8);
        let spec = spec_of(&base, 3, 1, &[(1, id_map())]);
        let got = construct_detailed(&spec).unwrap();
        assert_eq!(got.poly, poly(&base, &[-3, 0, 3]));
        assert_eq!(
            got.stages,
            vec![StageReport { u: 1, m: 1, positions: vec![(2, 1)] }]
        );
        // The degree-3 subfield of the 9th cyclotomic field has this norm
        // group; its generator ζ₉ + ζ₉⁻¹ − 2 has minimal polynomial
        // T³ + 6T² + 9T + 3.
        let cyclo = poly(&base, &[3, 9, 6]);
        assert_eq!(is_isomorphic(&got.poly, &cyclo).unwrap(), Verdict::Isomorphic);
        // Equal reduced classes, with full multiplicity (cyclic extension).
        let ours = all_reduced(&got.poly).unwrap();
        let theirs = all_reduced(&cyclo).unwrap();
        assert!(ours.same_entries(&theirs));
        assert_eq!(ours.aut, 3);
        // Changing the designated norm to 12 = 3·(1 + 9·…) picks the
        // sibling cyclic cubic.
        let spec = spec_of(&base, 12, 1, &[(1, id_map())]);
        let f = construct(&spec).unwrap();
        assert_eq!(f, poly(&base, &[-12, 0, 3]));
        assert_eq!(is_isomorphic(&f, &cyclo).unwrap(), Verdict::NonIsomorphic);
    }

    #[test]
    fn construct_biquadratic_over_q2() {
        // Conditions at levels 1 and 2 over Q₂: the norm group of the 8th
        // cyclotomic field ⟨2⟩·(1 + 8Z₂).
        let base = q2(14);
        let spec = spec_of(&base, 2, 1, &[(1, id_map()), (2, id_map())]);
        let got = construct_detailed(&spec).unwrap();
        let stages: Vec<(u64, u64)> = got.stages.iter().map(|s| (s.u, s.m)).collect();
        assert_eq!(stages, vec![(1, 1), (2, 3), (2, 1)]);
        let cyclo = poly(&base, &[2, 4, 6, 4]);
        assert_eq!(is_isomorphic(&got.poly, &cyclo).unwrap(), Verdict::Isomorphic);
        let red = all_reduced(&got.poly).unwrap();
        assert_eq!(red.aut, 4);
        assert_eq!(red.distinct(), 1);
        assert_eq!(red.entries[0].0, got.poly);
    }

    #[test]
    fn construct_sextic_cyclotomic_over_q3() {
        // Tame order 2 with a level-1 condition over Q₃: the norm group of
        // the 9th cyclotomic field; ζ₉ − 1 has minimal polynomial
        // T⁶ + 6T⁵ + 15T⁴ + 21T³ + 18T² + 9T + 3.
        let base = q3(10);
        let spec = spec_of(&base, 3, 2, &[(1, id_map())]);
        let got = construct_detailed(&spec).unwrap();
        let stages: Vec<(u64, u64)> = got.stages.iter().map(|s| (s.u, s.m)).collect();
        assert_eq!(stages, vec![(1, 2), (1, 1)]);
        let cyclo = poly(&base, &[3, 9, 18, 21, 15, 6]);
        assert_eq!(is_isomorphic(&got.poly, &cyclo).unwrap(), Verdict::Isomorphic);
        let red = all_reduced(&got.poly).unwrap();
        assert_eq!(red.aut, 6);
        assert_eq!(red.entries[0].0, got.poly);
    }

    #[test]
    fn constructed_polynomials_are_reduced_and_stable() {
        let b2 = q2(12);
        let b3 = q3(10);
        // Designated norms with plain digit patterns, so the construction
        // lands exactly on the canonical class representative.  (A
        // designated norm like −2 carries digits at every depth and yields
        // a polynomial reduced with respect to that uniformizer instead.)
        let specs = [
            spec_of(&b2, 2, 1, &[(1, id_map())]),
            spec_of(&b2, 2, 1, &[(2, id_map())]),
            spec_of(&b3, 3, 1, &[(1, id_map())]),
            spec_of(&b3, 3, 2, &[(1, id_map())]),
        ];
        for spec in &specs {
            let got = construct_detailed(spec).unwrap();
            assert_eq!(reduce(&got.poly).unwrap(), got.poly);
            // Scheduled norms land in the group; unscheduled prime-to-p
            // levels do too (all norms lie in the norm group).
            for st in &got.stages {
                let eps = norm_unit(&got.poly, &spec.base.residue_field().one(), st.m as usize)
                    .unwrap();
                assert!(spec.contains_unit(&eps).unwrap());
                assert_eq!(
                    spec.level_value(&eps, st.u).unwrap(),
                    vec![0; spec.wild[&st.u].len()]
                );
            }
            let tmax = got.data.t_max();
            let mut m = 1i64;
            while rat(m, 1) <= tmax {
                if m as u64 % spec.base.p() != 0 {
                    let eps =
                        norm_unit(&got.poly, &spec.base.residue_field().one(), m as usize).unwrap();
                    assert!(spec.contains_unit(&eps).unwrap(), "norm at level {m} escapes");
                }
                m += 1;
            }
        }
    }

    #[test]
    fn membership_checks_catch_violations() {
        let base = q2(10);
        let spec = spec_of(&base, 2, 1, &[(1, id_map()), (2, id_map())]);
        // 3 = 1 + 2 violates the level-1 condition outright.
        let r = spec.level_value(&base.from_integer(3), 2);
        assert!(matches!(r, Err(Error::InconsistentNormDatum(_))));
        assert!(!spec.contains_unit(&base.from_integer(3)).unwrap());
        // 5 = 1 + 4 violates level 2.
        assert!(!spec.contains_unit(&base.from_integer(5)).unwrap());
        assert_eq!(spec.level_value(&base.from_integer(5), 2).unwrap(), vec![1]);
        // 9 = 1 + 8 satisfies both conditions.
        assert!(spec.contains_unit(&base.from_integer(9)).unwrap());
        // Non-units are rejected outright.
        assert!(matches!(
            spec.level_value(&base.from_integer(2), 1),
            Err(Error::NotAUnit)
        ));
    }

    #[test]
    fn unit_generators_recover_the_reference_data() {
        let base = q2(10);
        let two = base.from_integer(2);
        // ⟨5⟩ closes 1 + 4Z₂: a single level-1 condition.
        let spec =
            NormGroupSpec::from_unit_generators(&base, &two, &[base.from_integer(5)], 3).unwrap();
        assert_eq!(spec.tame_order, 1);
        assert_eq!(spec.wild, [(1u64, id_map())].into_iter().collect());
        assert_eq!(construct(&spec).unwrap(), poly(&base, &[2, 2]));
        // ⟨3⟩ closes to a level-2 condition (3 is the canonical level-1 lift).
        let spec =
            NormGroupSpec::from_unit_generators(&base, &two, &[base.from_integer(3)], 3).unwrap();
        assert_eq!(spec.wild, [(2u64, id_map())].into_iter().collect());
        assert_eq!(construct(&spec).unwrap(), poly(&base, &[2, 0]));
        // ⟨7⟩ is not canonically presentable: 7 = (1 + 2)(1 + 4)·… mixes
        // levels against the canonical lifts.
        let r = NormGroupSpec::from_unit_generators(&base, &two, &[base.from_integer(7)], 3);
        assert!(matches!(r, Err(Error::InvalidSpec(_))));

        let b3 = q3(10);
        let three = b3.from_integer(3);
        // ⟨−1, 1 + 9⟩: tame classes absorb −1, leaving a level-1 condition.
        let spec = NormGroupSpec::from_unit_generators(
            &b3,
            &three,
            &[b3.from_integer(-1), b3.from_integer(10)],
            3,
        )
        .unwrap();
        assert_eq!(spec.tame_order, 1);
        assert_eq!(spec.wild, [(1u64, id_map())].into_iter().collect());
        assert_eq!(construct(&spec).unwrap(), poly(&b3, &[-3, 0, 3]));
        // ⟨1 + 9⟩ alone: full tame quotient and the same level-1 condition.
        let spec =
            NormGroupSpec::from_unit_generators(&b3, &three, &[b3.from_integer(10)], 3).unwrap();
        assert_eq!(spec.tame_order, 2);
        assert_eq!(spec.wild, [(1u64, id_map())].into_iter().collect());
        assert_eq!(
            is_isomorphic(&construct(&spec).unwrap(), &poly(&b3, &[3, 9, 18, 21, 15, 6]))
                .unwrap(),
            Verdict::Isomorphic
        );
    }
}
