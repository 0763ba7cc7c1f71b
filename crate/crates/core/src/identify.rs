//! Isomorphism testing for totally ramified extensions presented by
//! Eisenstein polynomials: leading-difference analysis, cheap greedy
//! rejection criteria, the exact decision through reduced multisets, and an
//! independent digit-search root counter used as a testing oracle.
//!
//! The greedy filters never prove isomorphism; they either rule it out for
//! a stated reason or return `Inconclusive`.  The exact test compares the
//! multisets of reduced polynomials, which characterize the extension.

use crate::error::Error;
use crate::padics::Valuation;
use crate::ramify::{
    ramification_data, ramification_polygon, residual_poly_with, EisensteinPoly, ExtRing,
    RamData, ResidualBody,
};
use crate::rational::{rat, ExtRat, Rat};
use crate::reduce::all_reduced;
use crate::residue::{in_rref_span, rref, ResidueElement};
use crate::Result;

/// Where the leading difference of two Eisenstein polynomials sits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffReport {
    /// `v_L(f(π) − g(π)) = min_i n·v_K(f_i − g_i) + i` (distinct mod `n`,
    /// so the minimum is achieved exactly once).
    pub v: usize,
    /// The coefficient index achieving `v`.
    pub i: usize,
    /// The reduction level of the difference: `r = ψ(v/n − 1)`.
    pub r: Rat,
    /// `w = (v − i)/n`, the digit depth of the leading difference.
    pub w: usize,
    /// Residue class of `(f_i − g_i) π^{i−v}`.
    pub residual: ResidueElement,
}

/// Reason a pair of polynomials cannot generate the same extension (or, for
/// non-Galois pairs, cannot be greedily reduced into one another).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleOutReason {
    PolygonMismatch,
    NonIntegerLevel,
    ResidualNotInImage,
    CongruenceFail,
}

impl std::fmt::Display for RuleOutReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RuleOutReason::PolygonMismatch => "ramification polygons differ",
            RuleOutReason::NonIntegerLevel => "leading difference at a non-integer level",
            RuleOutReason::ResidualNotInImage => "leading residual outside the break image",
            RuleOutReason::CongruenceFail => "congruence fails at the difference level",
        };
        f.write_str(s)
    }
}

/// Outcome of an identification query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    RuledOut(RuleOutReason),
    Inconclusive,
    Isomorphic,
    NonIsomorphic,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::RuledOut(r) => write!(f, "ruled out: {r}"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
            Verdict::Isomorphic => f.write_str("isomorphic"),
            Verdict::NonIsomorphic => f.write_str("non-isomorphic"),
        }
    }
}

fn check_comparable(f: &EisensteinPoly, g: &EisensteinPoly) -> Result<()> {
    if f.base != g.base {
        return Err(Error::BaseMismatch);
    }
    if f.n() != g.n() {
        return Err(Error::InvalidSpec("polynomials have different degrees".into()));
    }
    Ok(())
}

/// Locate the leading difference of `f` and `g` and express it as a level
/// and a residue class.
pub fn lead_diff(f: &EisensteinPoly, g: &EisensteinPoly) -> Result<DiffReport> {
    check_comparable(f, g)?;
    let base = &f.base;
    let n = f.n();
    let mut best: Option<(usize, usize)> = None;
    for i in 0..n {
        let d = base.sub(&f.coeffs[i], &g.coeffs[i]);
        if d.is_zero() {
            continue;
        }
        let Valuation::Exact(vk) = base.val(&d) else { unreachable!("nonzero digits") };
        let v = n * vk + i;
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, i));
        }
    }
    let Some((v, i)) = best else {
        return Err(Error::IndistinguishablePolynomials);
    };
    let data = ramification_data(f)?;
    let r = data.psi_eval(rat(v as i64 - n as i64, n as i64));
    let w = (v - i) / n;
    let kappa = base.residue_field();
    let d = base.sub(&f.coeffs[i], &g.coeffs[i]);
    let digit = base.digit(&d, w)?;
    let residual = kappa.mul(&digit, &kappa.pow_i(&f.eta(), -(w as i64)));
    Ok(DiffReport { v, i, r, w, residual })
}

/// Is `alpha` in the image of the level map `θ ↦ η̄^j S_m(θ)`?  For wild
/// levels the map is additive and the test is linear algebra; the tame
/// level `m = 0` has a non-additive map whose image is enumerated.
fn residual_in_image(
    f: &EisensteinPoly,
    data: &RamData,
    m: u64,
    j: usize,
    alpha: &ResidueElement,
) -> Result<bool> {
    let kappa = f.base.residue_field();
    let sm = residual_poly_with(f, data, m)?;
    let etaj = kappa.pow(&f.eta(), j as u64);
    match &sm.body {
        ResidualBody::Additive(terms) => {
            let twisted: Vec<(u32, ResidueElement)> =
                terms.iter().map(|(a, c)| (*a, kappa.mul(c, &etaj))).collect();
            let mat = kappa.additive_map_matrix(&twisted);
            let mut image: Vec<Vec<u64>> =
                (0..kappa.f).map(|c| mat.iter().map(|row| row[c]).collect()).collect();
            let pivots = rref(&mut image, kappa.p);
            Ok(in_rref_span(&alpha.coords, &image, &pivots, kappa.p))
        }
        ResidualBody::Tame { .. } => Ok(kappa
            .elements()
            .iter()
            .any(|theta| kappa.mul(&etaj, &sm.eval(kappa, theta)) == *alpha)),
    }
}

/// The largest level `m` at which the Krasner-style congruence between `f`
/// and `g` holds: the minimum over nonzero monomials `cT^i` of `f − g` of
/// `max_{j ≤ a} (v_L(c) + i − n − ξ_j)/p^j`, with `a = min(v_p(i), s)` and
/// `a = s` for `i = 0`.  Returns `+∞` when `f = g` at working precision.
pub fn congruence_level(f: &EisensteinPoly, g: &EisensteinPoly) -> Result<ExtRat> {
    check_comparable(f, g)?;
    let base = &f.base;
    let n = f.n();
    let data = ramification_data(f)?;
    let s = data.s;
    let p = base.p();
    let mut level = ExtRat::PosInf;
    for i in 0..n {
        let d = base.sub(&f.coeffs[i], &g.coeffs[i]);
        if d.is_zero() {
            continue;
        }
        let Valuation::Exact(vk) = base.val(&d) else { unreachable!("nonzero digits") };
        let vl = (n * vk + i) as i64;
        let a = if i == 0 {
            s
        } else {
            let mut e = 0u32;
            let mut ii = i as u64;
            while ii % p == 0 {
                e += 1;
                ii /= p;
            }
            e.min(s)
        };
        let mut mono = ExtRat::NegInf;
        for j in 0..=a {
            let xi = data.xi[j as usize];
            let pj = rat((p as i64).pow(j), 1);
            let c = ExtRat::Fin((rat(vl - n as i64, 1) - xi) / pj);
            if c > mono {
                mono = c;
            }
        }
        if mono < level {
            level = mono;
        }
    }
    Ok(level)
}

/// Cheap rejection pipeline: polygon comparison, level integrality, break
/// residual membership, and the congruence filter, in that order.  Never
/// claims isomorphism; a `RuledOut` verdict is conclusive for pairs with a
/// Galois side, and means "no greedy reduction path" in general.
pub fn greedy_filter(f: &EisensteinPoly, g: &EisensteinPoly) -> Result<Verdict> {
    check_comparable(f, g)?;
    if ramification_polygon(f)? != ramification_polygon(g)? {
        return Ok(Verdict::RuledOut(RuleOutReason::PolygonMismatch));
    }
    let report = lead_diff(f, g)?;
    if !report.r.is_integer() {
        return Ok(Verdict::RuledOut(RuleOutReason::NonIntegerLevel));
    }
    let data = ramification_data(f)?;
    if data.breaks.contains(&report.r) {
        let m = report.r.to_integer() as u64;
        if !residual_in_image(f, &data, m, report.w, &report.residual)? {
            return Ok(Verdict::RuledOut(RuleOutReason::ResidualNotInImage));
        }
    }
    if congruence_level(f, g)? < ExtRat::Fin(report.r) {
        return Ok(Verdict::RuledOut(RuleOutReason::CongruenceFail));
    }
    Ok(Verdict::Inconclusive)
}

/// Decide isomorphism exactly by comparing the reduced multisets of both
/// polynomials.  The multisets of two extensions are equal or disjoint;
/// anything else indicates an internal inconsistency.
pub fn is_isomorphic(f: &EisensteinPoly, g: &EisensteinPoly) -> Result<Verdict> {
    check_comparable(f, g)?;
    let mf = all_reduced(f)?;
    let mg = all_reduced(g)?;
    if mf.same_entries(&mg) {
        return Ok(Verdict::Isomorphic);
    }
    let overlap = mf
        .entries
        .iter()
        .any(|(a, _)| mg.entries.iter().any(|(b, _)| a == b));
    if overlap {
        return Err(Error::Internal("reduced multisets partially overlap".into()));
    }
    Ok(Verdict::NonIsomorphic)
}

/// A search depth sufficient for `root_count` to separate genuine roots:
/// past twice the different valuation plus the last break, every surviving
/// digit expansion corresponds to exactly one root.
pub fn default_root_precision(g: &EisensteinPoly) -> Result<usize> {
    let data = ramification_data(g)?;
    let d = crate::ramify::different_val(g)?;
    Ok(2 * d + data.t_max().ceil().to_integer() as usize + 2)
}

/// Count the roots of `f` in `K[T]/(g)` to `precision` digits of `v_L`, by
/// branch-and-bound over digit expansions of candidate roots.  A partial
/// expansion `x` of depth `D` survives iff `v_L(f(x)) ≥ D + 1`; past the
/// root-separation depth `⌊t_max⌋ + 1` the bar rises to `D + 1 + d` with `d`
/// the different valuation of `f`, because a prefix of an actual root `α`
/// then satisfies `v_L(f(x)) = d + v_L(x − α)`, so the strengthened test
/// keeps exactly one survivor per root at the final depth.  Entirely
/// independent of the reduction machinery, so it can serve as an oracle.
pub fn root_count(f: &EisensteinPoly, g: &EisensteinPoly, precision: usize) -> Result<usize> {
    check_comparable(f, g)?;
    const NODE_BUDGET: usize = 200_000;
    let base = &f.base;
    let kappa = base.residue_field().clone();
    let prec = base.default_precision();
    let n = f.n();
    let d = crate::ramify::different_val(f)?;
    let t_floor = ramification_data(f)?.t_max().floor().to_integer() as usize;
    base.require_precision((precision + 1 + d) / n + 2)?;
    let ring = ExtRing::new(g.clone());
    // π-powers up to the search depth.
    let mut pi_pows = Vec::with_capacity(precision + 1);
    pi_pows.push(ring.from_base(&base.one(prec)));
    let pi = ring.pi(prec);
    for w in 1..=precision {
        let prev = pi_pows[w - 1].clone();
        pi_pows.push(ring.mul(&prev, &pi));
    }
    let digits: Vec<_> = kappa.elements();
    let mut frontier = vec![ring.zero(prec)];
    let mut nodes = 0usize;
    for depth in 1..=precision {
        let mut next = vec![];
        for x in &frontier {
            for c in &digits {
                let cand = if c.is_zero() {
                    x.clone()
                } else {
                    ring.add(x, &ring.scalar_mul(&base.rep(c, prec), &pi_pows[depth]))
                };
                nodes += 1;
                if nodes > NODE_BUDGET {
                    return Err(Error::SearchBudgetExceeded { nodes });
                }
                let fx = ring.eval_poly(f, &cand);
                let need = if depth > t_floor || depth == precision {
                    depth + 1 + d
                } else {
                    depth + 1
                };
                let keep = match ring.val(&fx) {
                    Valuation::Exact(v) => v >= need,
                    Valuation::BelowPrecision { precision: lb } => {
                        if lb < need {
                            return Err(Error::PrecisionInsufficient { needed: prec + 1 });
                        }
                        true
                    }
                };
                if keep {
                    next.push(cand);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            return Ok(0);
        }
    }
    Ok(frontier.len())
}
