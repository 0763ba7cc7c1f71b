//! Census of all totally ramified extensions of a fixed degree.
//!
//! Every totally ramified degree-`n` extension is generated by a root of a
//! *reduced* Eisenstein polynomial, and a reduced polynomial has nonzero
//! digits only at the distinguished position `(0, 1)` and at the finitely
//! many support positions determined by its ramification polygon.  Sweeping
//! all digit assignments on the support of every candidate polygon therefore
//! visits every isomorphism class at least once; classes are then keyed by
//! their smallest reduced form, which is a complete invariant.
//!
//! The census is certified by the mass formula: summing
//! `(n / #Aut) · q^{n - 1 - d}` over the classes found (with `d` the
//! discriminant valuation) must give exactly `n`, which fails if any class
//! were missed or double-counted.

use crate::error::Error;
use crate::padics::{BaseField, IntegerElement};
use crate::ramify::{
    derive_ram_data, ramification_polygon, reduced_support, val_p, EisensteinPoly, NewtonPolygon,
    RamData,
};
use crate::rational::{rat, Rat};
use crate::reduce::{all_reduced, required_precision};
use crate::Result;
use num::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// One isomorphism class of totally ramified degree-`n` extensions.
#[derive(Clone, Debug)]
pub struct ClassInfo {
    /// All distinct reduced defining polynomials of the extension, sorted by
    /// digits; the first one is the canonical class representative.
    pub reduced: Vec<EisensteinPoly>,
    /// Automorphism count of the extension.
    pub aut: u64,
    /// Branch count `B = aut · |reduced|`.
    pub b: u64,
    /// Valuation of the discriminant.
    pub disc_exponent: usize,
    /// Lower-numbering ramification breaks (with multiplicity one per
    /// polygon segment).
    pub breaks: Vec<Rat>,
}

impl ClassInfo {
    /// The canonical representative: the smallest reduced polynomial.
    pub fn rep(&self) -> &EisensteinPoly {
        &self.reduced[0]
    }
}

/// The complete list of isomorphism classes in degree `n`, plus the mass
/// total certifying completeness.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub n: usize,
    /// All classes, ordered by ramification polygon and then by the
    /// representative's digits.
    pub classes: Vec<ClassInfo>,
    /// `Σ (n / aut) · q^{n - 1 - disc_exponent}` over all classes; equals
    /// `n` exactly when the census is complete.
    pub mass: Rat,
}

impl Enumeration {
    /// Whether the mass total confirms the census (Serre's mass formula).
    pub fn mass_checks(&self) -> bool {
        self.mass == rat(self.n as i64, 1)
    }
}

fn strictly_convex(vertices: &[(usize, i64)]) -> bool {
    vertices.windows(3).all(|w| {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let (x2, y2) = w[2];
        (y1 - y0) * (x2 as i64 - x1 as i64) < (y2 - y1) * (x1 as i64 - x0 as i64)
    })
}

/// All polygons that can occur as the ramification polygon of a degree-`n`
/// Eisenstein polynomial over `base`.
///
/// Vertices left of the tame segment sit at `p`-power abscissas `p^ℓ`
/// (`ℓ < s = v_p(n)`) with integer ordinate between 1 and `n(s - ℓ)`.  The
/// cap comes from the leading coefficient: its contribution to the
/// `p^ℓ`-th coefficient of the ramification polynomial is
/// `binom(n, p^ℓ) π^{n - p^ℓ}`, of valuation `n(s - ℓ) + n - p^ℓ`, and no
/// other term can cancel it (their valuations differ from it mod `n`), so
/// the ordinate at `p^ℓ` — vertex or not — is at most `n(s - ℓ)`.
/// Candidate hulls that exceed the cap at any `p`-power abscissa are
/// discarded.
///
/// In residue characteristic `p` with `p | n` the census is infinite
/// (wild extensions of a Laurent-series field have unbounded discriminant),
/// so only tame degrees are accepted there.
pub fn candidate_polygons(base: &BaseField, n: usize) -> Result<Vec<NewtonPolygon>> {
    if n < 2 {
        return Err(Error::InvalidSpec("enumeration needs degree at least 2".into()));
    }
    let p = base.p();
    let s = val_p(p, n as u64);
    if !base.is_char_zero() && s > 0 {
        return Err(Error::InvalidSpec(
            "wildly ramified extensions in characteristic p form infinite families".into(),
        ));
    }
    if s == 0 {
        return Ok(vec![NewtonPolygon { vertices: vec![(1, 0), (n, 0)] }]);
    }
    let beta = |l: u32| (n as i64) * ((s - l) as i64);
    let ps = (p as usize).pow(s);
    let mut out = vec![];
    // Choose which of p^1 … p^{s-1} carry a vertex; (1, y_0) and (p^s, 0)
    // are always vertices (the ordinate at p^s is exactly 0, and p | n
    // forces a positive ordinate at 1).
    for mask in 0u32..(1 << (s - 1)) {
        let chosen: Vec<u32> = (1..s).filter(|l| mask & (1 << (l - 1)) != 0).collect();
        // Odometer over the ordinates (y_0, y_ℓ for chosen ℓ).
        let levels: Vec<u32> = std::iter::once(0).chain(chosen.iter().copied()).collect();
        let mut ys: Vec<i64> = vec![1; levels.len()];
        'sweep: loop {
            let mut vertices: Vec<(usize, i64)> = levels
                .iter()
                .zip(&ys)
                .map(|(&l, &y)| ((p as usize).pow(l), y))
                .collect();
            vertices.push((ps, 0));
            if n > ps {
                vertices.push((n, 0));
            }
            let polygon = NewtonPolygon { vertices };
            if strictly_convex(&polygon.vertices)
                && (1..s).all(|l| {
                    levels.contains(&l)
                        || polygon.hull_at(rat((p as i64).pow(l), 1)) <= rat(beta(l), 1)
                })
            {
                out.push(polygon);
            }
            let mut k = levels.len();
            loop {
                if k == 0 {
                    break 'sweep;
                }
                k -= 1;
                ys[k] += 1;
                if ys[k] <= beta(levels[k]) {
                    break;
                }
                ys[k] = 1;
            }
        }
    }
    Ok(out)
}

fn polygon_classes(
    base: &BaseField,
    n: usize,
    data: &RamData,
) -> Result<BTreeMap<Vec<IntegerElement>, ClassInfo>> {
    let kappa = base.residue_field();
    let q = base.q();
    let prec = base.default_precision();
    let support = reduced_support(data);
    let mut classes = BTreeMap::new();
    // codes[0] picks the unit digit at (0, 1); codes[k + 1] the digit at
    // support position k.
    let mut codes = vec![0u64; support.len() + 1];
    codes[0] = 1;
    'sweep: loop {
        let mut coeffs = vec![base.zero(prec); n];
        coeffs[0] = base.set_digit(&coeffs[0], 1, kappa.element_from_code(codes[0]))?;
        for (k, e) in support.iter().enumerate() {
            if codes[k + 1] != 0 {
                coeffs[e.i] =
                    base.set_digit(&coeffs[e.i], e.j, kappa.element_from_code(codes[k + 1]))?;
            }
        }
        let f = EisensteinPoly::new(base.clone(), coeffs)?;
        // Assignments whose actual polygon differs (some digit choice was
        // degenerate) belong to another polygon's sweep; skip them here so
        // no class is counted under two polygons.
        if ramification_polygon(&f)?.vertices == data.polygon.vertices {
            let multiset = all_reduced(&f)?;
            let key = multiset.entries[0].0.coeffs.clone();
            classes.entry(key).or_insert_with(|| ClassInfo {
                reduced: multiset.entries.iter().map(|(g, _)| g.clone()).collect(),
                aut: multiset.aut,
                b: multiset.b,
                disc_exponent: data.polygon.vertices[0].1 as usize + n - 1,
                breaks: data.breaks.clone(),
            });
        }
        let mut k = 0;
        loop {
            codes[k] += 1;
            if codes[k] < q {
                break;
            }
            // Position 0 is the unit digit of f_0 and never takes code 0.
            codes[k] = if k == 0 { 1 } else { 0 };
            k += 1;
            if k == codes.len() {
                break 'sweep;
            }
        }
    }
    Ok(classes)
}

/// Enumerate every totally ramified degree-`n` extension of `base` up to
/// isomorphism.
///
/// The result lists one [`ClassInfo`] per class and the mass total; callers
/// should check [`Enumeration::mass_checks`] (it holds whenever the
/// arithmetic is exact, i.e. always — it is exposed as data rather than an
/// assertion so the census remains inspectable).
pub fn enumerate_totally_ramified(base: &BaseField, n: usize) -> Result<Enumeration> {
    let polygons = candidate_polygons(base, n)?;
    let p = base.p();
    let mut jobs = vec![];
    let mut need = 1;
    for polygon in polygons {
        let data = derive_ram_data(polygon, n, p)?;
        need = need.max(required_precision(&data));
        jobs.push(data);
    }
    base.require_precision(need)?;
    let buckets = jobs
        .par_iter()
        .map(|data| polygon_classes(base, n, data))
        .collect::<Result<Vec<_>>>()?;
    // Order classes by their polygon first, then by representative digits,
    // so census output is stable under re-partitioning of the sweep.
    let mut merged = BTreeMap::new();
    for (data, bucket) in jobs.iter().zip(buckets) {
        for (key, class) in bucket {
            merged.insert((data.polygon.vertices.clone(), key), class);
        }
    }
    let q = base.q() as i64;
    let classes: Vec<ClassInfo> = merged.into_values().collect();
    let mut mass = Rat::zero();
    for c in &classes {
        let codim = (c.disc_exponent + 1 - n) as u32;
        mass += rat(n as i64, c.aut as i64) / rat(q.pow(codim), 1);
    }
    Ok(Enumeration { n, classes, mass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2(prec: usize) -> BaseField {
        BaseField::char_zero(2, 1, prec).unwrap()
    }

    fn q3(prec: usize) -> BaseField {
        BaseField::char_zero(3, 1, prec).unwrap()
    }

    fn vertex_lists(polygons: &[NewtonPolygon]) -> Vec<Vec<(usize, i64)>> {
        polygons.iter().map(|pg| pg.vertices.clone()).collect()
    }

    #[test]
    fn candidate_polygons_quadratic() {
        let polygons = candidate_polygons(&q2(12), 2).unwrap();
        assert_eq!(
            vertex_lists(&polygons),
            vec![vec![(1, 1), (2, 0)], vec![(1, 2), (2, 0)]],
        );
    }

    #[test]
    fn candidate_polygons_tame() {
        let polygons = candidate_polygons(&q3(12), 2).unwrap();
        assert_eq!(vertex_lists(&polygons), vec![vec![(1, 0), (2, 0)]]);
    }

    #[test]
    fn candidate_polygons_sextic_over_q3() {
        // s = 1, tame part 2: vertices (1, y0) with y0 ≤ 6, then (3, 0), (6, 0).
        let polygons = candidate_polygons(&q3(12), 6).unwrap();
        let lists = vertex_lists(&polygons);
        assert_eq!(lists.len(), 6);
        for (k, vs) in lists.iter().enumerate() {
            assert_eq!(*vs, vec![(1, k as i64 + 1), (3, 0), (6, 0)]);
        }
    }

    #[test]
    fn candidate_polygons_quartic_over_q2_counts() {
        // Hand count: 6 one-segment hulls (2y0/3 ≤ 4 at the skipped
        // abscissa 2) plus 18 two-segment hulls (2y0 > 3y1, y1 ≤ 4).
        let polygons = candidate_polygons(&q2(20), 4).unwrap();
        assert_eq!(polygons.len(), 24);
        for pg in &polygons {
            assert!(strictly_convex(&pg.vertices));
            assert_eq!(*pg.vertices.last().unwrap(), (4, 0));
        }
    }

    #[test]
    fn wild_char_p_census_is_rejected() {
        let base = BaseField::char_p(2, 1, 12).unwrap();
        assert!(matches!(candidate_polygons(&base, 2), Err(Error::InvalidSpec(_))));
        assert!(matches!(enumerate_totally_ramified(&base, 4), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn tame_char_p_census_works() {
        let base = BaseField::char_p(2, 1, 12).unwrap();
        let census = enumerate_totally_ramified(&base, 3).unwrap();
        // x^3 - t u for u in the residue field: one class per cube class of
        // units; over F_2 every unit is a cube, so a single class of mass 3.
        assert_eq!(census.classes.len(), 1);
        assert_eq!(census.classes[0].aut, 1);
        assert!(census.mass_checks());
    }

    #[test]
    fn quadratics_over_q2() {
        let census = enumerate_totally_ramified(&q2(10), 2).unwrap();
        let base = q2(10);
        let expected = [
            (vec![2, 2], 2),
            (vec![6, 2], 2),
            (vec![2, 0], 3),
            (vec![10, 0], 3),
            (vec![2, 4], 3),
            (vec![10, 4], 3),
        ];
        assert_eq!(census.classes.len(), expected.len());
        let mut found: Vec<(Vec<i128>, usize)> = vec![];
        for c in &census.classes {
            assert_eq!(c.aut, 2);
            assert_eq!(c.b, 2);
            assert_eq!(c.reduced.len(), 1);
            let decode = |x: &IntegerElement| -> i128 {
                (1..=4)
                    .map(|j| base.digit(x, j).map(|d| d.coords[0]).unwrap_or(0) << j)
                    .sum::<u64>() as i128
            };
            found.push((c.rep().coeffs.iter().map(decode).collect(), c.disc_exponent));
        }
        found.sort();
        let mut want: Vec<(Vec<i128>, usize)> =
            expected.iter().map(|(c, d)| (c.clone(), *d)).collect();
        want.sort();
        assert_eq!(found, want);
        assert!(census.mass_checks());
    }

    #[test]
    fn tame_quadratics_over_q3() {
        let census = enumerate_totally_ramified(&q3(8), 2).unwrap();
        assert_eq!(census.classes.len(), 2);
        for c in &census.classes {
            assert_eq!(c.aut, 2);
            assert_eq!(c.disc_exponent, 1);
            assert_eq!(c.breaks, vec![rat(0, 1)]);
        }
        assert!(census.mass_checks());
        // The two classes are T^2 + 3 and T^2 + 6 (unit classes mod squares).
        let base = q3(8);
        let mut units: Vec<u64> = census
            .classes
            .iter()
            .map(|c| {
                assert!(c.rep().coeffs[1].is_zero());
                base.digit(&c.rep().coeffs[0], 1).unwrap().coords[0]
            })
            .collect();
        units.sort();
        assert_eq!(units, vec![1, 2]);
    }

    #[test]
    fn cubics_over_q3() {
        let census = enumerate_totally_ramified(&q3(10), 3).unwrap();
        assert_eq!(census.classes.len(), 9);
        let mut discs: Vec<usize> = census.classes.iter().map(|c| c.disc_exponent).collect();
        discs.sort();
        assert_eq!(discs, vec![3, 3, 4, 4, 4, 4, 5, 5, 5]);
        let galois = census.classes.iter().filter(|c| c.aut == 3).count();
        assert_eq!(galois, 3);
        assert!(census.classes.iter().all(|c| c.aut == 3 || c.aut == 1));
        // Galois cubics all have the middle discriminant (break 1).
        for c in &census.classes {
            if c.aut == 3 {
                assert_eq!(c.disc_exponent, 4);
                assert_eq!(c.breaks, vec![rat(1, 1)]);
            }
        }
        assert!(census.mass_checks());
    }

    #[test]
    fn quartics_over_q2_mass() {
        let census = enumerate_totally_ramified(&q2(10), 4).unwrap();
        assert!(census.mass_checks(), "mass {} ≠ 4", census.mass);
        // Sanity on the census shape: the five unramified-free quartic
        // class invariants must each divide the degree.
        for c in &census.classes {
            assert!(4 % c.aut == 0);
            assert_eq!(c.b, c.aut * c.reduced.len() as u64);
        }
    }
}
