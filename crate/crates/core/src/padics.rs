//! Exact truncated arithmetic in the ring of integers `O_K` of the base
//! local field `K`.
//!
//! `K` is either the unramified extension of `Q_p` with residue field
//! `κ = F_{p^f}` (characteristic 0) or the Laurent series field `κ((t))`
//! (characteristic `p`).  Elements of `O_K` are stored as digit vectors
//!
//! ```text
//!   x = Σ_j  rep(d_j) · π_K^j,      d_j ∈ κ,
//! ```
//!
//! where `π_K = u·p` (resp. `u·t`) for a fixed unit `u` (default 1), and the
//! representative set is the Teichmüller set `{0} ∪ {ω(d) : ω(d)^q = ω(d)}`
//! in characteristic 0 and `κ` itself (as constants) in characteristic `p`.
//! Teichmüller representatives are multiplicatively closed, which keeps the
//! digit manipulations of the reduction algorithms exact.
//!
//! A value with `N` digits is known modulo `π_K^N`; sums and products carry
//! the minimum precision of their operands, and any operation that would
//! have to invent unknown digits reports
//! [`Error::PrecisionInsufficient`](crate::Error::PrecisionInsufficient)
//! instead.
//!
//! In characteristic 0 the digit arithmetic is implemented by converting to
//! a "raw" form — coordinates in `Z[x]/(p^N, M(x))` for the lifted residue
//! modulus `M` — doing plain modular arithmetic there, and converting back.
//! This requires `p^N` to fit comfortably in machine words; the base field
//! constructor enforces `p^N ≤ 2^63`.

use crate::error::Error;
use crate::residue::{ResidueElement, ResidueField};
use crate::Result;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

/// Valuation of a truncated element: either exactly known, or only known to
/// be at least the precision of the operand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(usize),
    BelowPrecision { precision: usize },
}

impl Valuation {
    /// The exact value, if known.
    pub fn exact(self) -> Option<usize> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::BelowPrecision { .. } => None,
        }
    }

    /// The exact value; panics when the valuation is below precision.
    pub fn expect_exact(self, what: &str) -> usize {
        match self {
            Valuation::Exact(v) => v,
            Valuation::BelowPrecision { precision } => {
                panic!("{what}: valuation not visible at precision {precision}")
            }
        }
    }

    /// A guaranteed lower bound (the valuation itself, or the precision).
    pub fn lower_bound(self) -> usize {
        match self {
            Valuation::Exact(v) => v,
            Valuation::BelowPrecision { precision } => precision,
        }
    }
}

/// Element of `O_K`, a digit vector of length = precision.
///
/// Digits are residue field elements naming representatives (Teichmüller in
/// characteristic 0, constants in characteristic `p`).  All arithmetic goes
/// through [`BaseField`] methods.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerElement {
    pub digits: Vec<ResidueElement>,
}

impl IntegerElement {
    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|d| d.is_zero())
    }
}

struct BaseData {
    kappa: ResidueField,
    char_zero: bool,
    default_precision: usize,
    /// Digits of the uniformizer unit `u` with respect to `π_K` itself.
    unit_digits: Vec<ResidueElement>,
    // --- characteristic-0 machinery (empty in characteristic p) ---
    /// Residue modulus lifted to integer coefficients.
    lifted_modulus: Vec<u128>,
    /// `p^default_precision`.
    pn: u128,
    u_inv_raw: Vec<u128>,
    pi_pows: RwLock<Vec<Vec<u128>>>,
    teich_cache: RwLock<HashMap<u64, Vec<u128>>>,
}

impl fmt::Debug for BaseData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseData")
            .field("p", &self.kappa.p)
            .field("f", &self.kappa.f)
            .field("char_zero", &self.char_zero)
            .field("default_precision", &self.default_precision)
            .finish()
    }
}

/// The base local field `K`, cheaply clonable (shared immutable data).
#[derive(Clone, Debug)]
pub struct BaseField(Arc<BaseData>);

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.kappa == other.0.kappa
                && self.0.char_zero == other.0.char_zero
                && self.0.unit_digits == other.0.unit_digits)
    }
}

impl Eq for BaseField {}

impl Hash for BaseField {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kappa.p.hash(state);
        self.0.kappa.f.hash(state);
        self.0.char_zero.hash(state);
        self.0.unit_digits.hash(state);
    }
}

// ---- raw arithmetic in Z[x]/(p^N, M(x)) ----
//
// Vectors of length f with entries in [0, pn).  pn ≤ 2^63, so a product of
// two entries fits in u128 and entries can be accumulated after reduction.

fn raw_zero(f: usize) -> Vec<u128> {
    vec![0; f]
}

fn raw_add(a: &[u128], b: &[u128], pn: u128) -> Vec<u128> {
    a.iter().zip(b).map(|(&x, &y)| (x + y) % pn).collect()
}

fn raw_sub(a: &[u128], b: &[u128], pn: u128) -> Vec<u128> {
    a.iter().zip(b).map(|(&x, &y)| (x + pn - y) % pn).collect()
}

fn raw_mul(a: &[u128], b: &[u128], m: &[u128], pn: u128) -> Vec<u128> {
    let f = a.len();
    let mut prod = vec![0u128; 2 * f - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj % pn) % pn;
        }
    }
    // Reduce modulo the monic lifted modulus of degree f.
    for i in (f..2 * f - 1).rev() {
        let lead = prod[i];
        if lead == 0 {
            continue;
        }
        prod[i] = 0;
        for (k, &mk) in m.iter().enumerate().take(f) {
            let idx = i - f + k;
            prod[idx] = (prod[idx] + pn - lead * mk % pn) % pn;
        }
    }
    prod.truncate(f);
    prod
}

fn raw_pow(a: &[u128], mut e: u64, m: &[u128], pn: u128) -> Vec<u128> {
    let mut acc = raw_zero(a.len());
    acc[0] = 1;
    let mut b = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = raw_mul(&acc, &b, m, pn);
        }
        b = raw_mul(&b, &b, m, pn);
        e >>= 1;
    }
    acc
}

/// Newton inversion of a unit (residue nonzero) modulo `p^N`.
fn raw_inv(a: &[u128], m: &[u128], p: u64, pn: u128, kappa: &ResidueField) -> Vec<u128> {
    let res = ResidueElement { coords: a.iter().map(|&c| (c % p as u128) as u64).collect() };
    assert!(!res.is_zero(), "raw_inv of a non-unit");
    let mut v: Vec<u128> = kappa.inv(&res).coords.iter().map(|&c| c as u128).collect();
    let mut two = raw_zero(a.len());
    two[0] = 2 % pn;
    // Precision doubles per step; log2(64) + slack covers the cap.
    for _ in 0..8 {
        let av = raw_mul(a, &v, m, pn);
        let corr = raw_sub(&two, &av, pn);
        v = raw_mul(&v, &corr, m, pn);
    }
    debug_assert!({
        let check = raw_mul(a, &v, m, pn);
        check[0] == 1 && check[1..].iter().all(|&c| c == 0)
    });
    v
}

/// Teichmüller representative of `d`: the fixed point of `z ↦ z^q` lifting
/// `d`, computed by iterating the power map (one digit of convergence per
/// step).
fn raw_teich(d: &ResidueElement, m: &[u128], q: u64, pn: u128, steps: usize) -> Vec<u128> {
    let mut z: Vec<u128> = d.coords.iter().map(|&c| c as u128).collect();
    for _ in 0..steps {
        z = raw_pow(&z, q, m, pn);
    }
    z
}

impl BaseField {
    /// The unramified extension of `Q_p` with residue degree `f`,
    /// uniformizer `p`.
    pub fn char_zero(p: u64, f: usize, default_precision: usize) -> Result<Self> {
        let kappa = ResidueField::new(p, f)?;
        let one = kappa.one();
        Self::with_uniformizer_unit(kappa, true, default_precision, vec![one])
    }

    /// The Laurent series field `F_{p^f}((t))`, uniformizer `t`.
    pub fn char_p(p: u64, f: usize, default_precision: usize) -> Result<Self> {
        let kappa = ResidueField::new(p, f)?;
        let one = kappa.one();
        Self::with_uniformizer_unit(kappa, false, default_precision, vec![one])
    }

    /// General constructor with an explicit uniformizer unit `u`, given by
    /// its digit vector *with respect to `π_K = u·p` itself* (the data is
    /// self-consistent for any digit vector with invertible constant term).
    /// Digits of `u` beyond the supplied vector are taken to be zero.
    pub fn with_uniformizer_unit(
        kappa: ResidueField,
        char_zero: bool,
        default_precision: usize,
        unit_digits: Vec<ResidueElement>,
    ) -> Result<Self> {
        if default_precision == 0 {
            return Err(Error::InvalidSpec("precision must be positive".into()));
        }
        if unit_digits.is_empty() || unit_digits[0].is_zero() {
            return Err(Error::NotAUnit);
        }
        for d in &unit_digits {
            if d.coords.len() != kappa.f {
                return Err(Error::InvalidSpec("unit digit has wrong coordinate length".into()));
            }
        }
        let p = kappa.p;
        if !char_zero {
            return Ok(BaseField(Arc::new(BaseData {
                kappa,
                char_zero,
                default_precision,
                unit_digits,
                lifted_modulus: vec![],
                pn: 0,
                u_inv_raw: vec![],
                pi_pows: RwLock::new(vec![]),
                teich_cache: RwLock::new(HashMap::new()),
            })));
        }
        // p^N must stay within exact machine range.
        let mut pn: u128 = 1;
        for _ in 0..default_precision {
            pn = pn.checked_mul(p as u128).filter(|&v| v <= 1 << 63).ok_or(
                Error::InvalidSpec(format!(
                    "precision {default_precision} over p = {p} exceeds the exact arithmetic range"
                )),
            )?;
        }
        let m: Vec<u128> = kappa.modulus.iter().map(|&c| c as u128).collect();
        let q = kappa.q;
        let f = kappa.f;
        let teich =
            |d: &ResidueElement| -> Vec<u128> { raw_teich(d, &m, q, pn, default_precision) };
        // Bootstrap the raw form of u from its self-referential digits:
        // u^(k+1) = Σ_j ω(u_j)·(u^(k)·p)^j gains one correct digit per pass.
        let mut u_raw = teich(&unit_digits[0]);
        for _ in 0..default_precision {
            let mut pi = u_raw.clone();
            for c in pi.iter_mut() {
                *c = *c * p as u128 % pn;
            }
            let mut acc = raw_zero(f);
            let mut pi_j = raw_zero(f);
            pi_j[0] = 1;
            for d in &unit_digits {
                if !d.is_zero() {
                    acc = raw_add(&acc, &raw_mul(&teich(d), &pi_j, &m, pn), pn);
                }
                pi_j = raw_mul(&pi_j, &pi, &m, pn);
            }
            u_raw = acc;
        }
        let u_inv_raw = raw_inv(&u_raw, &m, p, pn, &kappa);
        let mut pi_raw = u_raw.clone();
        for c in pi_raw.iter_mut() {
            *c = *c * p as u128 % pn;
        }
        let mut one = raw_zero(f);
        one[0] = 1;
        Ok(BaseField(Arc::new(BaseData {
            kappa,
            char_zero,
            default_precision,
            unit_digits,
            lifted_modulus: m,
            pn,
            u_inv_raw,
            pi_pows: RwLock::new(vec![one, pi_raw]),
            teich_cache: RwLock::new(HashMap::new()),
        })))
    }

    /// Same field, different working precision.
    pub fn with_precision(&self, precision: usize) -> Result<Self> {
        Self::with_uniformizer_unit(
            self.0.kappa.clone(),
            self.0.char_zero,
            precision,
            self.0.unit_digits.clone(),
        )
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.0.kappa
    }

    pub fn p(&self) -> u64 {
        self.0.kappa.p
    }

    pub fn f(&self) -> usize {
        self.0.kappa.f
    }

    pub fn q(&self) -> u64 {
        self.0.kappa.q
    }

    pub fn is_char_zero(&self) -> bool {
        self.0.char_zero
    }

    pub fn default_precision(&self) -> usize {
        self.0.default_precision
    }

    pub fn uniformizer_unit_digits(&self) -> &[ResidueElement] {
        &self.0.unit_digits
    }

    /// Error out unless this base can carry `needed` digits.
    pub fn require_precision(&self, needed: usize) -> Result<()> {
        if needed > self.0.default_precision {
            Err(Error::PrecisionInsufficient { needed })
        } else {
            Ok(())
        }
    }

    // ---- construction of elements ----

    pub fn zero(&self, precision: usize) -> IntegerElement {
        IntegerElement { digits: vec![self.0.kappa.zero(); precision] }
    }

    pub fn one(&self, precision: usize) -> IntegerElement {
        let mut x = self.zero(precision);
        x.digits[0] = self.0.kappa.one();
        x
    }

    /// Element with the single digit `d` at position 0 (the representative
    /// of `d`: Teichmüller in characteristic 0, the constant in
    /// characteristic `p`).
    pub fn rep(&self, d: &ResidueElement, precision: usize) -> IntegerElement {
        let mut x = self.zero(precision);
        x.digits[0] = d.clone();
        x
    }

    /// Validated construction from digits.
    pub fn from_digits(&self, digits: Vec<ResidueElement>) -> Result<IntegerElement> {
        if self.0.char_zero && digits.len() > self.0.default_precision {
            return Err(Error::PrecisionInsufficient { needed: digits.len() });
        }
        for d in &digits {
            if d.coords.len() != self.0.kappa.f || d.coords.iter().any(|&c| c >= self.p()) {
                return Err(Error::InvalidSpec("digit out of range for this base field".into()));
            }
        }
        Ok(IntegerElement { digits })
    }

    /// Digit expansion of the rational integer `n` at default precision.
    /// In characteristic `p` this is the constant `n mod p`.
    pub fn from_integer(&self, n: i128) -> IntegerElement {
        let prec = self.0.default_precision;
        if !self.0.char_zero {
            let mut x = self.zero(prec);
            x.digits[0] = self.0.kappa.from_i64(n.rem_euclid(self.p() as i128) as i64);
            return x;
        }
        let mut raw = raw_zero(self.f());
        raw[0] = (n.rem_euclid(self.0.pn as i128)) as u128;
        self.raw_to_digits(raw, prec)
    }

    // ---- raw-form plumbing (characteristic 0) ----

    fn teich_raw(&self, d: &ResidueElement) -> Vec<u128> {
        let code = self.0.kappa.element_code(d);
        if let Some(hit) = self.0.teich_cache.read().unwrap().get(&code) {
            return hit.clone();
        }
        let z = raw_teich(d, &self.0.lifted_modulus, self.q(), self.0.pn, self.0.default_precision);
        self.0.teich_cache.write().unwrap().insert(code, z.clone());
        z
    }

    fn pi_pow_raw(&self, j: usize) -> Vec<u128> {
        {
            let pows = self.0.pi_pows.read().unwrap();
            if j < pows.len() {
                return pows[j].clone();
            }
        }
        let mut pows = self.0.pi_pows.write().unwrap();
        while pows.len() <= j {
            let next =
                raw_mul(&pows[pows.len() - 1], &pows[1], &self.0.lifted_modulus, self.0.pn);
            pows.push(next);
        }
        pows[j].clone()
    }

    fn digits_to_raw(&self, x: &IntegerElement) -> Vec<u128> {
        debug_assert!(self.0.char_zero);
        debug_assert!(x.digits.len() <= self.0.default_precision);
        let mut acc = raw_zero(self.f());
        for (j, d) in x.digits.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let term = raw_mul(&self.teich_raw(d), &self.pi_pow_raw(j), &self.0.lifted_modulus, self.0.pn);
            acc = raw_add(&acc, &term, self.0.pn);
        }
        acc
    }

    fn raw_to_digits(&self, mut raw: Vec<u128>, precision: usize) -> IntegerElement {
        debug_assert!(self.0.char_zero);
        debug_assert!(precision <= self.0.default_precision);
        let p = self.p() as u128;
        let mut digits = Vec::with_capacity(precision);
        for _ in 0..precision {
            let d = ResidueElement { coords: raw.iter().map(|&c| (c % p) as u64).collect() };
            if !d.is_zero() {
                raw = raw_sub(&raw, &self.teich_raw(&d), self.0.pn);
            }
            // Divide by π_K = u·p: multiply by u^{-1}, then exactly by p.
            raw = raw_mul(&raw, &self.0.u_inv_raw, &self.0.lifted_modulus, self.0.pn);
            for c in raw.iter_mut() {
                debug_assert_eq!(*c % p, 0, "digit stripping must leave a multiple of p");
                *c /= p;
            }
            digits.push(d);
        }
        IntegerElement { digits }
    }

    // ---- arithmetic ----

    pub fn add(&self, x: &IntegerElement, y: &IntegerElement) -> IntegerElement {
        let prec = x.precision().min(y.precision());
        if !self.0.char_zero {
            let digits = (0..prec).map(|j| self.0.kappa.add(&x.digits[j], &y.digits[j])).collect();
            return IntegerElement { digits };
        }
        let raw = raw_add(&self.digits_to_raw(x), &self.digits_to_raw(y), self.0.pn);
        self.raw_to_digits(raw, prec)
    }

    pub fn neg(&self, x: &IntegerElement) -> IntegerElement {
        if !self.0.char_zero {
            let digits = x.digits.iter().map(|d| self.0.kappa.neg(d)).collect();
            return IntegerElement { digits };
        }
        let raw = raw_sub(&raw_zero(self.f()), &self.digits_to_raw(x), self.0.pn);
        self.raw_to_digits(raw, x.precision())
    }

    pub fn sub(&self, x: &IntegerElement, y: &IntegerElement) -> IntegerElement {
        let prec = x.precision().min(y.precision());
        if !self.0.char_zero {
            let digits = (0..prec).map(|j| self.0.kappa.sub(&x.digits[j], &y.digits[j])).collect();
            return IntegerElement { digits };
        }
        let raw = raw_sub(&self.digits_to_raw(x), &self.digits_to_raw(y), self.0.pn);
        self.raw_to_digits(raw, prec)
    }

    pub fn mul(&self, x: &IntegerElement, y: &IntegerElement) -> IntegerElement {
        let prec = x.precision().min(y.precision());
        if !self.0.char_zero {
            let k = &self.0.kappa;
            let mut digits = vec![k.zero(); prec];
            for (i, xi) in x.digits.iter().enumerate().take(prec) {
                if xi.is_zero() {
                    continue;
                }
                for (j, yj) in y.digits.iter().enumerate() {
                    if i + j >= prec {
                        break;
                    }
                    digits[i + j] = k.add(&digits[i + j], &k.mul(xi, yj));
                }
            }
            return IntegerElement { digits };
        }
        let raw = raw_mul(&self.digits_to_raw(x), &self.digits_to_raw(y), &self.0.lifted_modulus, self.0.pn);
        self.raw_to_digits(raw, prec)
    }

    /// Small power by repeated squaring (precision of `x`).
    pub fn pow(&self, x: &IntegerElement, mut e: u64) -> IntegerElement {
        let mut acc = self.one(x.precision());
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit (digit 0 nonzero).
    pub fn unit_inv(&self, x: &IntegerElement) -> Result<IntegerElement> {
        if x.precision() == 0 || x.digits[0].is_zero() {
            return Err(Error::NotAUnit);
        }
        let k = &self.0.kappa;
        if !self.0.char_zero {
            // Power series inversion: d'_0 = d_0^{-1},
            // d'_m = -d_0^{-1} Σ_{i=1..m} d_i d'_{m-i}.
            let d0inv = k.inv(&x.digits[0]);
            let mut out = vec![k.zero(); x.precision()];
            out[0] = d0inv.clone();
            for m in 1..x.precision() {
                let mut s = k.zero();
                for i in 1..=m {
                    s = k.add(&s, &k.mul(&x.digits[i], &out[m - i]));
                }
                out[m] = k.neg(&k.mul(&d0inv, &s));
            }
            return Ok(IntegerElement { digits: out });
        }
        let raw = raw_inv(&self.digits_to_raw(x), &self.0.lifted_modulus, self.p(), self.0.pn, k);
        Ok(self.raw_to_digits(raw, x.precision()))
    }

    /// Multiply by `π_K^k` (shift digits up).  The result's precision grows
    /// by `k`, capped at the base's working precision in characteristic 0.
    pub fn shift(&self, x: &IntegerElement, k: usize) -> IntegerElement {
        let mut digits = vec![self.0.kappa.zero(); k];
        digits.extend(x.digits.iter().cloned());
        if self.0.char_zero && digits.len() > self.0.default_precision {
            digits.truncate(self.0.default_precision);
        }
        IntegerElement { digits }
    }

    /// Divide by `π_K^k`; requires the first `k` digits to vanish.  The
    /// result has `k` fewer digits of precision.
    pub fn unshift(&self, x: &IntegerElement, k: usize) -> Result<IntegerElement> {
        if x.precision() < k {
            return Err(Error::PrecisionInsufficient { needed: k });
        }
        if x.digits[..k].iter().any(|d| !d.is_zero()) {
            return Err(Error::Internal("unshift of an element with too small valuation".into()));
        }
        Ok(IntegerElement { digits: x.digits[k..].to_vec() })
    }

    /// Forget digits beyond `precision`.
    pub fn truncate(&self, x: &IntegerElement, precision: usize) -> IntegerElement {
        let mut digits = x.digits.clone();
        digits.truncate(precision);
        IntegerElement { digits }
    }

    pub fn val(&self, x: &IntegerElement) -> Valuation {
        match x.digits.iter().position(|d| !d.is_zero()) {
            Some(j) => Valuation::Exact(j),
            None => Valuation::BelowPrecision { precision: x.precision() },
        }
    }

    pub fn digit(&self, x: &IntegerElement, j: usize) -> Result<ResidueElement> {
        x.digits.get(j).cloned().ok_or(Error::PrecisionInsufficient { needed: j + 1 })
    }

    pub fn set_digit(&self, x: &IntegerElement, j: usize, d: ResidueElement) -> Result<IntegerElement> {
        if j >= x.precision() {
            return Err(Error::PrecisionInsufficient { needed: j + 1 });
        }
        if d.coords.len() != self.f() || d.coords.iter().any(|&c| c >= self.p()) {
            return Err(Error::InvalidSpec("digit out of range for this base field".into()));
        }
        let mut out = x.clone();
        out.digits[j] = d;
        Ok(out)
    }

    /// Do `x` and `y` agree modulo `π_K^m`?  Errors if either operand has
    /// fewer than `m` digits.
    pub fn eq_mod(&self, x: &IntegerElement, y: &IntegerElement, m: usize) -> Result<bool> {
        if x.precision() < m || y.precision() < m {
            return Err(Error::PrecisionInsufficient { needed: m });
        }
        let d = self.sub(x, y);
        Ok(d.digits[..m].iter().all(|c| c.is_zero()))
    }
}

/// Number of carries when adding `a` and `b` in base `p`; by Kummer's
/// theorem this is `v_p` of the binomial coefficient `C(a+b, b)`.
pub fn carries_base_p(p: u64, a: u64, b: u64) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut carry = 0u64;
    let mut count = 0u32;
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        if s >= p {
            carry = 1;
            count += 1;
        } else {
            carry = 0;
        }
        a /= p;
        b /= p;
    }
    count
}

/// `v_p` of the binomial coefficient `C(n, k)` (0 for `k > n`).
pub fn binomial_val_p(p: u64, n: u64, k: u64) -> u32 {
    if k > n {
        return 0;
    }
    carries_base_p(p, n - k, k)
}

/// The binomial coefficient `C(n, k)` as an exact integer; errors when the
/// value no longer fits in the exact range.
pub fn binomial_exact(n: u64, k: u64) -> Result<i128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as i128)
            .ok_or_else(|| Error::InvalidSpec("binomial coefficient overflows exact range".into()))?;
        acc /= (i + 1) as i128;
    }
    Ok(acc)
}
