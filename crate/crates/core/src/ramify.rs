//! Eisenstein polynomials, ramification polygons, transition functions and
//! residual polynomials.
//!
//! For a monic Eisenstein polynomial `f` of degree `n` over `O_K` with root
//! `π` (so `L = K(π)` is totally ramified of degree `n`), the *ramification
//! polynomial* is `Φ(T) = π^{-n} f(πT + π)`, and the *ramification polygon*
//! is the lower Newton polygon of `Φ` over the abscissa range `[1, n]`.  The
//! polygon only depends on the valuations
//!
//! ```text
//!   v_L(Φ_j) = min_{i ≥ j}  n·v_K(C(i,j)) + n·v_K(f_i) + (i - n),
//! ```
//!
//! and every candidate term in the minimum has a distinct valuation class
//! modulo `n`, so the minimum is attained by a single term and everything is
//! computable exactly from digit data — no arithmetic in `O_L` is required,
//! and binomial valuations come from carry counting.  The same uniqueness
//! gives closed forms for the residual polynomial coefficients.
//!
//! From the polygon we derive the ramification breaks, the Hasse–Herbrand
//! transition function `φ` and its inverse `ψ`, the invariant triples
//! `(τ_ℓ, ξ_ℓ, σ_ℓ)`, and the support of reduced polynomials: the set of
//! digit positions `(i, j)` that can carry a nonzero digit in a reduced
//! Eisenstein polynomial generating the same extension.

use crate::error::Error;
use crate::padics::{binomial_exact, binomial_val_p, BaseField, IntegerElement, Valuation};
use crate::rational::{rat, ExtRat, PiecewiseLinear, Rat};
use crate::residue::ResidueElement;
use crate::Result;
use num::{One, Zero};

/// A monic Eisenstein polynomial `T^n + f_{n-1}T^{n-1} + … + f_0` over the
/// ring of integers of `base`.  The leading coefficient is implicit;
/// `coeffs[i]` is `f_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EisensteinPoly {
    pub base: BaseField,
    pub coeffs: Vec<IntegerElement>,
}

impl EisensteinPoly {
    /// Validating constructor: `v_K(f_i) ≥ 1` for all `i` and `v_K(f_0) = 1`.
    pub fn new(base: BaseField, coeffs: Vec<IntegerElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSpec("an Eisenstein polynomial has degree at least 1".into()));
        }
        let f = EisensteinPoly { base, coeffs };
        f.check_eisenstein()?;
        Ok(f)
    }

    /// Degree.
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// Re-validate the Eisenstein conditions.
    pub fn check_eisenstein(&self) -> Result<()> {
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Valuation::Exact(0) = self.base.val(c) {
                return Err(Error::NotEisenstein { index: i });
            }
        }
        match self.base.val(&self.coeffs[0]) {
            Valuation::Exact(1) => Ok(()),
            Valuation::Exact(_) => Err(Error::NotEisenstein { index: 0 }),
            Valuation::BelowPrecision { precision } if precision >= 2 => {
                Err(Error::NotEisenstein { index: 0 })
            }
            Valuation::BelowPrecision { .. } => Err(Error::PrecisionInsufficient { needed: 2 }),
        }
    }

    /// Convenience constructor from integer coefficients `f_0, …, f_{n-1}`
    /// (the leading 1 is implicit), at the base's default precision.
    pub fn from_integer_coeffs(base: &BaseField, coeffs: &[i128]) -> Result<Self> {
        let elems = coeffs.iter().map(|&c| base.from_integer(c)).collect();
        EisensteinPoly::new(base.clone(), elems)
    }

    /// The residue `η̄ = res(-f_0 / π_K)`, the unit class that steers all
    /// residue computations with negative powers of the uniformizer of `L`
    /// (`π^n ≡ -f_0 mod π^{n+1}`).
    pub fn eta(&self) -> ResidueElement {
        let kappa = self.base.residue_field();
        kappa.neg(&self.coeffs[0].digits[1])
    }

    /// Digit `j` of coefficient `i` (with the implicit leading coefficient:
    /// `i = n` reads the constant 1).
    pub fn coeff_digit(&self, i: usize, j: usize) -> Result<ResidueElement> {
        let kappa = self.base.residue_field();
        if i == self.n() {
            return Ok(if j == 0 { kappa.one() } else { kappa.zero() });
        }
        self.base.digit(&self.coeffs[i], j)
    }
}

/// The ramification polygon: lower convex hull of `(j, v_L(Φ_j))`,
/// `1 ≤ j ≤ n`, with ordinates in `v_L` units (integers).  Divide
/// `hull_at(x)` by `n` to express the hull in base-valuation units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Hull vertices, abscissa strictly increasing; the last vertex is
    /// always `(n, 0)`.
    pub vertices: Vec<(usize, i64)>,
}

impl NewtonPolygon {
    /// Value of the hull (as a function on `[x_first, n]`) at rational `x`.
    pub fn hull_at(&self, x: Rat) -> Rat {
        let pts = &self.vertices;
        assert!(
            x >= rat(pts[0].0 as i64, 1) && x <= rat(pts[pts.len() - 1].0 as i64, 1),
            "abscissa outside the polygon range"
        );
        for w in pts.windows(2) {
            let (x0, y0) = (rat(w[0].0 as i64, 1), rat(w[0].1, 1));
            let (x1, y1) = (rat(w[1].0 as i64, 1), rat(w[1].1, 1));
            if x <= x1 {
                return y0 + (y1 - y0) / (x1 - x0) * (x - x0);
            }
        }
        rat(pts[pts.len() - 1].1, 1)
    }
}

/// Ramification invariants of an Eisenstein polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamData {
    pub n: usize,
    /// Residue characteristic of the base field.
    pub p: u64,
    /// `v_p(n)`.
    pub s: u32,
    /// Lower ramification breaks `t_1 < … < t_k` (a tame extension
    /// contributes the break 0).
    pub breaks: Vec<Rat>,
    /// Cardinalities `γ_0 > γ_1 > … > γ_k` of the ramification subsets
    /// (`γ_0 = n`, and `γ_i = #Γ_{t_i^+}`).
    pub gammas: Vec<u64>,
    /// `τ_ℓ` for `ℓ = 0..s`: the smallest `t` such that `nφ` has slope
    /// `≤ p^ℓ` on `[t, ∞)`.
    pub tau: Vec<Rat>,
    /// `ξ_ℓ = nφ(τ_ℓ) - p^ℓ τ_ℓ`.
    pub xi: Vec<Rat>,
    /// `σ_ℓ = nφ(τ_ℓ)`; up to the factor `n` these are the upper breaks.
    pub sigma: Vec<Rat>,
    /// Hasse–Herbrand transition function `φ` and its inverse `ψ`.
    pub phi: PiecewiseLinear,
    pub psi: PiecewiseLinear,
    pub polygon: NewtonPolygon,
}

impl RamData {
    pub fn phi_eval(&self, x: Rat) -> Rat {
        self.phi.eval(x)
    }

    pub fn psi_eval(&self, y: Rat) -> Rat {
        self.psi.eval(y)
    }

    /// The largest break (0 for an unramified-at-`p` tame situation, i.e.
    /// degree 1 or purely tame polygons).
    pub fn t_max(&self) -> Rat {
        self.breaks.last().copied().unwrap_or_else(Rat::zero)
    }

    /// Breaks with the conventional sentinels `t_0 = +∞` and
    /// `t_{k+1} = -∞`.
    pub fn break_sentinel(&self, i: usize) -> ExtRat {
        if i == 0 {
            ExtRat::PosInf
        } else if i <= self.breaks.len() {
            // Sentinel indexing runs downward: t_0 = +∞ sits above the
            // largest break.
            ExtRat::Fin(self.breaks[self.breaks.len() - i])
        } else {
            ExtRat::NegInf
        }
    }
}

/// Residual polynomial attached to level `m` of the polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualPolynomial {
    pub m: u64,
    pub body: ResidualBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidualBody {
    /// `Σ c_a T^(p^a)`, stored as `(a, c_a)` with nonzero `c_a`, `a`
    /// increasing (levels `m ≥ 1`).
    Additive(Vec<(u32, ResidueElement)>),
    /// The tame residual `(1 + T^(p^s))^(n') - 1` at level 0.
    Tame { ps: u64, n_prime: u64 },
}

impl ResidualPolynomial {
    /// Evaluate as a map `κ → κ`.
    pub fn eval(&self, kappa: &crate::residue::ResidueField, theta: &ResidueElement) -> ResidueElement {
        match &self.body {
            ResidualBody::Additive(terms) => kappa.eval_additive(terms, theta),
            ResidualBody::Tame { ps, n_prime } => {
                let t = kappa.pow(theta, *ps);
                let u = kappa.add(&kappa.one(), &t);
                kappa.sub(&kappa.pow(&u, *n_prime), &kappa.one())
            }
        }
    }

    /// Number of monomials (for the additive shape).
    pub fn monomial_count(&self) -> usize {
        match &self.body {
            ResidualBody::Additive(terms) => terms.len(),
            ResidualBody::Tame { .. } => usize::MAX,
        }
    }
}

/// Valuation data of one coefficient `Φ_j` of the ramification polynomial.
struct Column {
    /// Certified minimal term: `(v_L, i_star)`.
    exact: Option<(i64, usize)>,
    /// Smallest lower bound contributed by below-precision coefficients.
    uncertain_lb: Option<i64>,
}

/// `v_p(n)`.
pub(crate) fn val_p(p: u64, mut n: u64) -> u32 {
    let mut s = 0;
    while n % p == 0 {
        n /= p;
        s += 1;
    }
    s
}

fn columns(f: &EisensteinPoly) -> Vec<Column> {
    let n = f.n();
    let p = f.base.p();
    let char_zero = f.base.is_char_zero();
    let mut cols = Vec::with_capacity(n);
    for j in 1..=n {
        let mut exact: Option<(i64, usize)> = None;
        let mut uncertain: Option<i64> = None;
        for i in j..=n {
            let carries = binomial_val_p(p, i as u64, j as u64) as i64;
            if !char_zero && carries > 0 {
                // The binomial coefficient vanishes in characteristic p.
                continue;
            }
            let carry_part = if char_zero { carries } else { 0 };
            let fi_val = if i == n { Valuation::Exact(0) } else { f.base.val(&f.coeffs[i]) };
            match fi_val {
                Valuation::Exact(v) => {
                    let t = (n as i64) * (carry_part + v as i64) + i as i64 - n as i64;
                    if exact.is_none_or(|(best, _)| t < best) {
                        exact = Some((t, i));
                    }
                }
                Valuation::BelowPrecision { precision } => {
                    let lb = (n as i64) * (carry_part + precision as i64) + i as i64 - n as i64;
                    if uncertain.is_none_or(|best| lb < best) {
                        uncertain = Some(lb);
                    }
                }
            }
        }
        cols.push(Column { exact, uncertain_lb: uncertain });
    }
    cols
}

fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    // Monotone chain over x-sorted points.  Pop the middle point whenever the
    // incoming slope is at least the outgoing slope (it lies on or above the
    // chord), so collinear interior points are not kept as vertices.
    let mut hull: Vec<(usize, i64)> = vec![];
    for &(x, y) in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            if (y2 - y1) * (x as i64 - x2 as i64) >= (y - y2) * (x2 as i64 - x1 as i64) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

/// The ramification polygon of `f`.
pub fn ramification_polygon(f: &EisensteinPoly) -> Result<NewtonPolygon> {
    let n = f.n();
    let cols = columns(f);
    let mut pts = vec![];
    for (idx, c) in cols.iter().enumerate() {
        if let Some((v, _)) = c.exact {
            pts.push((idx + 1, v));
        }
    }
    if pts.is_empty() || pts[0].0 != 1 {
        // Φ_1 = f'(π)·π^(1-n) has invisible valuation: either the precision
        // is too low, or (characteristic p) the polynomial is inseparable.
        return Err(Error::PrecisionInsufficient { needed: f.base.default_precision() + 1 });
    }
    let hull = lower_hull(&pts);
    let polygon = NewtonPolygon { vertices: hull };
    debug_assert_eq!(polygon.vertices.last(), Some(&(n, 0)));
    // Certify that below-precision coefficients cannot dig under the hull.
    for (idx, c) in cols.iter().enumerate() {
        if let Some(lb) = c.uncertain_lb {
            let x = (idx + 1) as i64;
            if x < polygon.vertices[0].0 as i64 {
                continue;
            }
            if rat(lb, 1) < polygon.hull_at(rat(x, 1)) {
                return Err(Error::PrecisionInsufficient { needed: f.base.default_precision() + 1 });
            }
        }
    }
    // Interior vertices of a ramification polygon sit at p-power abscissas.
    for &(x, _) in &polygon.vertices[..polygon.vertices.len() - 1] {
        let x = x as u64;
        let p = f.base.p();
        let reduced = x / p.pow(val_p(p, x));
        if reduced != 1 {
            return Err(Error::Internal(format!("polygon vertex at non-p-power abscissa {x}")));
        }
    }
    Ok(polygon)
}

/// Full ramification data (polygon, breaks, transition functions, τ/ξ/σ).
pub fn ramification_data(f: &EisensteinPoly) -> Result<RamData> {
    let polygon = ramification_polygon(f)?;
    derive_ram_data(polygon, f.n(), f.base.p())
}

/// Derive breaks, transition functions and the τ/ξ/σ tables from a
/// ramification polygon alone.  Used both for polygons read off a concrete
/// polynomial and for polygons synthesized from prescribed break data.
pub(crate) fn derive_ram_data(polygon: NewtonPolygon, n: usize, p: u64) -> Result<RamData> {
    let s = val_p(p, n as u64);
    let verts = &polygon.vertices;
    // Segments right-to-left give breaks in increasing order; γ's are the
    // reversed vertex abscissas.
    let mut breaks = vec![];
    let mut gammas = vec![n as u64];
    for w in verts.windows(2).rev() {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let t = rat(y0 - y1, x1 as i64 - x0 as i64);
        breaks.push(t);
        gammas.push(x0 as u64);
    }
    // Sanity: breaks strictly increasing, higher γ's are p-powers.
    debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]));
    for &g in &gammas[1..] {
        let red = g / p.pow(val_p(p, g));
        if red != 1 {
            return Err(Error::Internal(format!("ramification subset cardinality {g} not a p-power")));
        }
    }
    // φ: slope γ_i/n on [t_i, t_{i+1}] (t_0 := 0 start, slope γ_0/n = 1).
    let mut pts = vec![(Rat::zero(), Rat::zero())];
    let mut slope = Rat::one();
    for (i, &t) in breaks.iter().enumerate() {
        if t > pts.last().unwrap().0 {
            let (x0, y0) = *pts.last().unwrap();
            pts.push((t, y0 + slope * (t - x0)));
        }
        slope = rat(gammas[i + 1] as i64, n as i64);
    }
    let phi = PiecewiseLinear::new(pts.clone(), slope);
    let psi_pts = pts.iter().map(|&(x, y)| (y, x)).collect();
    let psi = PiecewiseLinear::new(psi_pts, slope.recip());
    // τ_ℓ: smallest t with slope of nφ ≤ p^ℓ from t on.  Slope of nφ after
    // break t_i is γ_i, so τ_ℓ = t_i for the first i with γ_i ≤ p^ℓ.
    let mut tau = vec![];
    let mut xi = vec![];
    let mut sigma = vec![];
    for l in 0..=s {
        let pl = (p as i64).pow(l);
        let mut t_l = Rat::zero();
        if (gammas[0] as i64) > pl {
            // Find first i ≥ 1 with γ_i ≤ p^ℓ; τ_ℓ is the corresponding
            // break (γ's and breaks both run outward from γ_0).
            for (i, &g) in gammas.iter().enumerate().skip(1) {
                if (g as i64) <= pl {
                    t_l = breaks[i - 1];
                    break;
                }
            }
        }
        let s_l = rat(n as i64, 1) * phi.eval(t_l);
        tau.push(t_l);
        sigma.push(s_l);
        xi.push(s_l - rat(pl, 1) * t_l);
    }
    debug_assert!(xi[s as usize].is_zero(), "ξ_s must vanish");
    Ok(RamData { n, p, s, breaks, gammas, tau, xi, sigma, phi, psi, polygon })
}

/// `v_L` of the different of `L/K`: the polygon ordinate at abscissa 1 plus
/// `n - 1` (i.e. `v_L(f'(π))`, since `Φ_1 = f'(π)·π^(1-n)`).  For totally
/// ramified extensions this also equals `v_K` of the discriminant.
pub fn different_val(f: &EisensteinPoly) -> Result<usize> {
    let polygon = ramification_polygon(f)?;
    Ok(polygon.vertices[0].1 as usize + f.n() - 1)
}

/// Residual polynomial `S_m` of `f` at integer level `m`, using
/// already-computed ramification data.
pub fn residual_poly_with(f: &EisensteinPoly, data: &RamData, m: u64) -> Result<ResidualPolynomial> {
    let n = f.n();
    let p = f.base.p();
    if m == 0 {
        let ps = p.pow(data.s);
        return Ok(ResidualPolynomial {
            m: 0,
            body: ResidualBody::Tame { ps, n_prime: n as u64 / ps },
        });
    }
    let kappa = f.base.residue_field();
    let eta_inv = kappa.inv(&f.eta());
    let cols = columns(f);
    let nphi = data.phi_eval(rat(m as i64, 1)) * rat(n as i64, 1);
    debug_assert!(nphi.is_integer());
    let nphi = nphi.to_integer();
    let mut terms = vec![];
    for a in 0..=data.s {
        let pa = p.pow(a) as usize;
        if pa > n {
            break;
        }
        let line = nphi - (pa as i64) * m as i64;
        if line < 0 {
            continue;
        }
        let col = &cols[pa - 1];
        // A below-precision term at or under the support line could tie the
        // minimum and corrupt the residue.
        if let Some(lb) = col.uncertain_lb {
            if lb <= line {
                return Err(Error::PrecisionInsufficient { needed: f.base.default_precision() + 1 });
            }
        }
        let Some((v, i_star)) = col.exact else { continue };
        if v != line {
            continue;
        }
        // Φ_{p^a} ≡ C(i*, p^a)·f_{i*}·π^{i*-n} up to higher-valuation terms;
        // its residue against the support line is digit_w(c)·η̄^{-w} for
        // c = C(i*,p^a)·f_{i*} and w = v_K(c).
        let c = if i_star == n {
            f.base.from_integer(binomial_exact(n as u64, pa as u64)?)
        } else {
            let binom = f.base.from_integer(binomial_exact(i_star as u64, pa as u64)?);
            f.base.mul(&binom, &f.coeffs[i_star])
        };
        let w = match f.base.val(&c) {
            Valuation::Exact(w) => w,
            Valuation::BelowPrecision { precision } => {
                return Err(Error::PrecisionInsufficient { needed: precision + 1 })
            }
        };
        debug_assert_eq!((n as i64) * (w as i64), (n as i64) - (i_star as i64) + line);
        let digit = f.base.digit(&c, w)?;
        let coeff = kappa.mul(&digit, &kappa.pow(&eta_inv, w as u64));
        debug_assert!(!coeff.is_zero());
        terms.push((a, coeff));
    }
    Ok(ResidualPolynomial { m, body: ResidualBody::Additive(terms) })
}

/// Residual polynomial `S_m` of `f` (recomputes the ramification data).
pub fn residual_poly(f: &EisensteinPoly, m: u64) -> Result<ResidualPolynomial> {
    let data = ramification_data(f)?;
    residual_poly_with(f, &data, m)
}

/// Kind of an admissible digit position in a reduced polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportKind {
    /// Ordinary band position: `ξ_ℓ ≤ nj - n + i < σ_ℓ` for `p^ℓ ∥ i`.
    Range,
    /// Candidate exceptional position `nj - n + i = σ_r` (carries the break
    /// index `r`).  Whether it actually occurs depends on the residual
    /// polynomial at the corresponding break having a nonzero root, which
    /// callers check against a concrete polynomial.
    Exception { r: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportEntry {
    pub i: usize,
    pub j: usize,
    pub kind: SupportKind,
}

/// Digit positions `(i, j)` of `f_{i,j}` that may be nonzero in a reduced
/// Eisenstein polynomial with the given ramification data, ordered by
/// `nj + i` (the position's valuation weight).  The always-present digit
/// `f_{0,1}` (forced to `-η̄` by the degree-0 normalization) is excluded.
pub fn reduced_support(data: &RamData) -> Vec<SupportEntry> {
    let n = data.n as i64;
    let p = data.p;
    let s = data.s;
    let mut out = vec![];
    // j is bounded by the largest band edge: nj - n + i < σ_0.
    let max_nj = data.sigma[0].ceil().to_integer() + n + 1;
    let jmax = (max_nj / n + 1) as usize;
    for i in 0..data.n {
        let l_eff = if i == 0 { s } else { val_p(p, i as u64).min(s) };
        for j in 1..=jmax {
            let w = n * (j as i64) - n + i as i64;
            let wr = rat(w, 1);
            if i != 0 && wr >= data.xi[l_eff as usize] && wr < data.sigma[l_eff as usize] {
                out.push(SupportEntry { i, j, kind: SupportKind::Range });
                continue;
            }
            if i == 0 && j == 1 {
                continue; // fixed by the leading normalization
            }
            // Exceptional candidates: nj - n + i = σ_r for some r ≤ ℓ with
            // τ_r > 0 (take the smallest such r).
            for r in 0..=l_eff {
                if data.tau[r as usize] > Rat::zero() && wr == data.sigma[r as usize] {
                    out.push(SupportEntry { i, j, kind: SupportKind::Exception { r } });
                    break;
                }
            }
        }
    }
    out.sort_by_key(|e| (n as usize) * e.j + e.i);
    out
}

// ---- arithmetic in O_L = O_K[T]/(f) ----

/// Element `Σ a_i π^i` of `O_L`, with `a_i ∈ O_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionElement {
    pub coords: Vec<IntegerElement>,
}

/// Context for arithmetic in `O_L`; holds the defining polynomial.
pub struct ExtRing {
    pub poly: EisensteinPoly,
}

impl ExtRing {
    pub fn new(poly: EisensteinPoly) -> Self {
        ExtRing { poly }
    }

    fn n(&self) -> usize {
        self.poly.n()
    }

    pub fn zero(&self, precision: usize) -> ExtensionElement {
        ExtensionElement { coords: vec![self.poly.base.zero(precision); self.n()] }
    }

    pub fn from_base(&self, x: &IntegerElement) -> ExtensionElement {
        let mut e = self.zero(x.precision());
        e.coords[0] = x.clone();
        e
    }

    /// The class of `T`, i.e. the root `π` itself.
    pub fn pi(&self, precision: usize) -> ExtensionElement {
        let mut e = self.zero(precision);
        e.coords[1] = self.poly.base.one(precision);
        e
    }

    pub fn add(&self, x: &ExtensionElement, y: &ExtensionElement) -> ExtensionElement {
        let base = &self.poly.base;
        let coords = x.coords.iter().zip(&y.coords).map(|(a, b)| base.add(a, b)).collect();
        ExtensionElement { coords }
    }

    pub fn sub(&self, x: &ExtensionElement, y: &ExtensionElement) -> ExtensionElement {
        let base = &self.poly.base;
        let coords = x.coords.iter().zip(&y.coords).map(|(a, b)| base.sub(a, b)).collect();
        ExtensionElement { coords }
    }

    pub fn scalar_mul(&self, c: &IntegerElement, x: &ExtensionElement) -> ExtensionElement {
        let base = &self.poly.base;
        let coords = x.coords.iter().map(|a| base.mul(c, a)).collect();
        ExtensionElement { coords }
    }

    pub fn mul(&self, x: &ExtensionElement, y: &ExtensionElement) -> ExtensionElement {
        let base = &self.poly.base;
        let n = self.n();
        let prec = x
            .coords
            .iter()
            .chain(&y.coords)
            .map(|c| c.precision())
            .min()
            .unwrap_or(0);
        let mut conv = vec![base.zero(prec); 2 * n - 1];
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                conv[i + j] = base.add(&conv[i + j], &base.mul(a, b));
            }
        }
        // Reduce with π^n = -(f_0 + f_1 π + … + f_{n-1} π^{n-1}).
        for idx in (n..2 * n - 1).rev() {
            let c = conv[idx].clone();
            if c.is_zero() {
                continue;
            }
            conv[idx] = base.zero(prec);
            for r in 0..n {
                let t = base.mul(&c, &self.poly.coeffs[r]);
                conv[idx - n + r] = base.sub(&conv[idx - n + r], &t);
            }
        }
        conv.truncate(n);
        ExtensionElement { coords: conv }
    }

    /// Valuation `v_L(x) = min_i (n·v_K(a_i) + i)`: exact if witnessed by a
    /// fully known coordinate, otherwise a lower bound from the precision.
    pub fn val(&self, x: &ExtensionElement) -> Valuation {
        let base = &self.poly.base;
        let n = self.n();
        let mut exact: Option<usize> = None;
        let mut bound = usize::MAX;
        for (i, a) in x.coords.iter().enumerate() {
            match base.val(a) {
                Valuation::Exact(v) => {
                    let t = n * v + i;
                    if exact.is_none_or(|b| t < b) {
                        exact = Some(t);
                    }
                }
                Valuation::BelowPrecision { precision } => {
                    bound = bound.min(n * precision + i);
                }
            }
        }
        match exact {
            Some(v) if v <= bound => Valuation::Exact(v),
            _ => Valuation::BelowPrecision { precision: bound.min(usize::MAX) },
        }
    }

    /// Evaluate the defining polynomial's sibling `g` (given by its
    /// coefficient list, leading 1 implicit) at `x`, reducing modulo the
    /// defining polynomial.
    pub fn eval_poly(&self, g: &EisensteinPoly, x: &ExtensionElement) -> ExtensionElement {
        let base = &self.poly.base;
        let prec = x.coords.iter().map(|c| c.precision()).min().unwrap_or(0);
        // Horner from the top: ((x + f_{n-1})·x + f_{n-2})·x …
        let mut out = self.from_base(&base.one(prec));
        for i in (0..g.n()).rev() {
            out = self.mul(&out, x);
            out.coords[0] = base.add(&out.coords[0], &g.coeffs[i]);
        }
        out
    }
}
