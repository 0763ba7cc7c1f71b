//! Serializable descriptions of base fields, Eisenstein polynomials,
//! isomorphism classes, and norm-group data — the on-disk formats consumed
//! and produced by the command-line tools.
//!
//! Every record type round-trips bit-exactly with its in-memory
//! counterpart: `describe` followed by `realize` reproduces the original
//! object, including per-coefficient precision of truncated polynomials.

use crate::classfield::NormGroupSpec;
use crate::enumerate::ClassInfo;
use crate::error::Error;
use crate::padics::BaseField;
use crate::ramify::EisensteinPoly;
use crate::residue::{ResidueElement, ResidueField};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Description of a base field: `Q_{p^f}`-style (characteristic 0) or
/// `F_{p^f}((t))`, with working precision and, when nonstandard, the
/// uniformizer unit digits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseRecord {
    pub p: u64,
    pub f: usize,
    /// 0 for a p-adic base field, `p` for a Laurent-series base field.
    #[serde(rename = "char", default)]
    pub characteristic: u64,
    pub prec: usize,
    /// Defining modulus of the residue field, low degree first.  Written on
    /// output for transparency; validated on input when present (only the
    /// canonical lexicographically-smallest modulus is supported).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    /// Digits of the unit `u` with `π_K = u·p`, with respect to `π_K`
    /// itself; absent for the standard uniformizer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unif_unit: Option<Vec<Vec<u64>>>,
}

fn coords_ok(coords: &[u64], kappa: &ResidueField) -> Result<()> {
    if coords.len() != kappa.f || coords.iter().any(|&c| c >= kappa.p) {
        return Err(Error::InvalidSpec(format!(
            "digit coordinates must be {} values below {}",
            kappa.f, kappa.p
        )));
    }
    Ok(())
}

impl BaseRecord {
    pub fn describe(base: &BaseField) -> Self {
        let kappa = base.residue_field();
        let unit = base.uniformizer_unit_digits();
        let standard = unit[0] == kappa.one() && unit[1..].iter().all(|d| d.is_zero());
        BaseRecord {
            p: base.p(),
            f: base.f(),
            characteristic: if base.is_char_zero() { 0 } else { base.p() },
            prec: base.default_precision(),
            modulus: Some(kappa.modulus.clone()),
            unif_unit: (!standard)
                .then(|| unit.iter().map(|d| d.coords.clone()).collect()),
        }
    }

    pub fn realize(&self) -> Result<BaseField> {
        if self.characteristic != 0 && self.characteristic != self.p {
            return Err(Error::InvalidSpec(format!(
                "characteristic must be 0 or {}, got {}",
                self.p, self.characteristic
            )));
        }
        let char_zero = self.characteristic == 0;
        let kappa = ResidueField::new(self.p, self.f)?;
        if let Some(m) = &self.modulus {
            if *m != kappa.modulus {
                return Err(Error::InvalidSpec(format!(
                    "unsupported residue modulus {m:?}; this build fixes the \
                     canonical modulus {:?}",
                    kappa.modulus
                )));
            }
        }
        match &self.unif_unit {
            None if char_zero => BaseField::char_zero(self.p, self.f, self.prec),
            None => BaseField::char_p(self.p, self.f, self.prec),
            Some(digits) => {
                let digits = digits
                    .iter()
                    .map(|coords| {
                        coords_ok(coords, &kappa)?;
                        Ok(ResidueElement { coords: coords.clone() })
                    })
                    .collect::<Result<Vec<_>>>()?;
                BaseField::with_uniformizer_unit(kappa, char_zero, self.prec, digits)
            }
        }
    }
}

/// An Eisenstein polynomial as explicit digit data.  `coeffs[i]` lists every
/// digit `[j, coords]` of `f_i` for `j` below that coefficient's precision,
/// so truncated polynomials (whose coefficients carry fewer digits) are
/// represented faithfully.  Indices absent from the map are zero
/// coefficients at full precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub base: BaseRecord,
    pub n: usize,
    pub coeffs: BTreeMap<usize, Vec<(usize, Vec<u64>)>>,
}

impl PolyRecord {
    pub fn describe(f: &EisensteinPoly) -> Self {
        let coeffs = f
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let digits =
                    c.digits.iter().enumerate().map(|(j, d)| (j, d.coords.clone())).collect();
                (i, digits)
            })
            .collect();
        PolyRecord { base: BaseRecord::describe(&f.base), n: f.n(), coeffs }
    }

    pub fn realize(&self) -> Result<EisensteinPoly> {
        let base = self.base.realize()?;
        let kappa = base.residue_field().clone();
        if self.n == 0 {
            return Err(Error::InvalidSpec("polynomial degree must be positive".into()));
        }
        let mut coeffs = vec![base.zero(base.default_precision()); self.n];
        for (&i, digits) in &self.coeffs {
            if i >= self.n {
                return Err(Error::InvalidSpec(format!(
                    "coefficient index {i} out of range for degree {}",
                    self.n
                )));
            }
            let mut list = Vec::with_capacity(digits.len());
            for (pos, (j, coords)) in digits.iter().enumerate() {
                if *j != pos {
                    return Err(Error::InvalidSpec(format!(
                        "digits of coefficient {i} must be listed densely from 0, \
                         found index {j} at position {pos}"
                    )));
                }
                coords_ok(coords, &kappa)?;
                list.push(ResidueElement { coords: coords.clone() });
            }
            coeffs[i] = base.from_digits(list)?;
        }
        EisensteinPoly::new(base, coeffs)
    }
}

/// One isomorphism class of totally ramified extensions, as emitted (one
/// JSON object per line) by the enumeration pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub p: u64,
    pub f: usize,
    pub n: usize,
    /// Lower-numbering ramification breaks as exact `"num/den"` strings.
    pub lower_breaks: Vec<String>,
    pub disc_exponent: usize,
    pub aut: u64,
    /// Branch count; always `aut × reduced.len()`.
    #[serde(rename = "B")]
    pub b: u64,
    /// Every reduced defining polynomial of the class, smallest first.
    pub reduced: Vec<PolyRecord>,
}

impl ClassRecord {
    pub fn describe(info: &ClassInfo) -> Self {
        let rep = info.rep();
        ClassRecord {
            p: rep.base.p(),
            f: rep.base.f(),
            n: rep.n(),
            lower_breaks: info
                .breaks
                .iter()
                .map(|t| format!("{}/{}", t.numer(), t.denom()))
                .collect(),
            disc_exponent: info.disc_exponent,
            aut: info.aut,
            b: info.b,
            reduced: info.reduced.iter().map(PolyRecord::describe).collect(),
        }
    }
}

/// One wild (higher-unit) condition of a norm-group datum: the rows of a
/// surjective `F_p`-linear map on the residue field at level `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WildConditionRecord {
    pub u: u64,
    pub rows: Vec<Vec<u64>>,
}

/// Norm-group datum: the input format of the class-field construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormGroupRecord {
    pub base: BaseRecord,
    /// Digit list of the designated uniformizer-norm.
    #[serde(rename = "pi_N")]
    pub pi_n: Vec<Vec<u64>>,
    pub tame_order: u64,
    #[serde(default)]
    pub wild: Vec<WildConditionRecord>,
}

impl NormGroupRecord {
    pub fn describe(spec: &NormGroupSpec) -> Self {
        NormGroupRecord {
            base: BaseRecord::describe(&spec.base),
            pi_n: spec.pi_n.digits.iter().map(|d| d.coords.clone()).collect(),
            tame_order: spec.tame_order,
            wild: spec
                .wild
                .iter()
                .map(|(&u, rows)| WildConditionRecord { u, rows: rows.clone() })
                .collect(),
        }
    }

    pub fn realize(&self) -> Result<NormGroupSpec> {
        let base = self.base.realize()?;
        let kappa = base.residue_field().clone();
        let mut digits = self
            .pi_n
            .iter()
            .map(|coords| {
                coords_ok(coords, &kappa)?;
                Ok(ResidueElement { coords: coords.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        // The digit list denotes an exact element: unlisted digits are zero.
        while digits.len() < base.default_precision() {
            digits.push(kappa.zero());
        }
        let pi_n = base.from_digits(digits)?;
        let mut wild = BTreeMap::new();
        for cond in &self.wild {
            if wild.insert(cond.u, cond.rows.clone()).is_some() {
                return Err(Error::InvalidSpec(format!(
                    "duplicate wild condition at level {}",
                    cond.u
                )));
            }
        }
        NormGroupSpec::new(base, pi_n, self.tame_order, wild)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfield::construct;
    use crate::enumerate::enumerate_totally_ramified;
    use crate::reduce::reduce;

    fn kappa_digit(base: &BaseField, c: u64) -> ResidueElement {
        base.residue_field().element_from_code(c)
    }

    fn roundtrip_poly(f: &EisensteinPoly) {
        let record = PolyRecord::describe(f);
        let text = serde_json::to_string(&record).unwrap();
        let back: PolyRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, record);
        let g = back.realize().unwrap();
        assert_eq!(g.coeffs, f.coeffs);
        assert_eq!(g.base.default_precision(), f.base.default_precision());
        assert_eq!(g.base.is_char_zero(), f.base.is_char_zero());
    }

    #[test]
    fn polynomial_round_trips_bit_exactly() {
        let q2 = BaseField::char_zero(2, 1, 10).unwrap();
        roundtrip_poly(&EisensteinPoly::from_integer_coeffs(&q2, &[2, 2]).unwrap());
        roundtrip_poly(&EisensteinPoly::from_integer_coeffs(&q2, &[2, 0, 6, 4]).unwrap());
        // A reduced polynomial (digits zeroed beyond the truncation bound).
        let reduced = reduce(&EisensteinPoly::from_integer_coeffs(&q2, &[-2, 0]).unwrap()).unwrap();
        roundtrip_poly(&reduced);
        // Coefficients of differing precision survive the trip.
        let short = EisensteinPoly::new(
            q2.clone(),
            vec![
                q2.from_digits(vec![kappa_digit(&q2, 0), kappa_digit(&q2, 1)]).unwrap(),
                q2.from_digits(vec![kappa_digit(&q2, 0), kappa_digit(&q2, 1), kappa_digit(&q2, 1)])
                    .unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(short.coeffs[0].precision(), 2);
        assert_eq!(short.coeffs[1].precision(), 3);
        roundtrip_poly(&short);
        // Unramified residue extension.
        let q4 = BaseField::char_zero(2, 2, 8).unwrap();
        roundtrip_poly(&EisensteinPoly::from_integer_coeffs(&q4, &[2, 2, 0]).unwrap());
        // Laurent-series base: T^2 + 2t + t^3.
        let f5 = BaseField::char_p(5, 1, 9).unwrap();
        let mut c0 = f5.set_digit(&f5.zero(9), 1, kappa_digit(&f5, 2)).unwrap();
        c0 = f5.set_digit(&c0, 3, kappa_digit(&f5, 1)).unwrap();
        roundtrip_poly(&EisensteinPoly::new(f5.clone(), vec![c0, f5.zero(9)]).unwrap());
    }

    #[test]
    fn nonstandard_uniformizer_is_preserved() {
        let kappa = ResidueField::new(3, 1).unwrap();
        let unit = vec![kappa.one(), kappa.one()];
        let base = BaseField::with_uniformizer_unit(kappa, true, 8, unit).unwrap();
        let record = BaseRecord::describe(&base);
        assert_eq!(record.unif_unit, Some(vec![vec![1], vec![1]]));
        let back = record.realize().unwrap();
        assert_eq!(back, base);
        assert_eq!(back.default_precision(), 8);
    }

    #[test]
    fn base_record_validates_input() {
        let bad_char = BaseRecord {
            p: 2,
            f: 1,
            characteristic: 3,
            prec: 6,
            modulus: None,
            unif_unit: None,
        };
        assert!(matches!(bad_char.realize(), Err(Error::InvalidSpec(_))));
        let bad_modulus = BaseRecord {
            p: 2,
            f: 2,
            characteristic: 0,
            prec: 6,
            modulus: Some(vec![1, 0, 1]),
            unif_unit: None,
        };
        assert!(matches!(bad_modulus.realize(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn poly_record_rejects_sparse_or_out_of_range_digits() {
        let q2 = BaseField::char_zero(2, 1, 6).unwrap();
        let f = EisensteinPoly::from_integer_coeffs(&q2, &[2, 2]).unwrap();
        let mut record = PolyRecord::describe(&f);
        record.coeffs.get_mut(&0).unwrap().remove(1);
        assert!(matches!(record.realize(), Err(Error::InvalidSpec(_))));
        let mut record = PolyRecord::describe(&f);
        record.coeffs.get_mut(&0).unwrap()[1].1 = vec![7];
        assert!(matches!(record.realize(), Err(Error::InvalidSpec(_))));
        let mut record = PolyRecord::describe(&f);
        record.coeffs.insert(5, vec![]);
        assert!(matches!(record.realize(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn class_records_satisfy_the_branch_count_identity() {
        let q3 = BaseField::char_zero(3, 1, 10).unwrap();
        let census = enumerate_totally_ramified(&q3, 3).unwrap();
        for info in &census.classes {
            let record = ClassRecord::describe(info);
            assert_eq!(record.b, record.aut * record.reduced.len() as u64);
            assert_eq!(record.n, 3);
            let text = serde_json::to_string(&record).unwrap();
            let back: ClassRecord = serde_json::from_str(&text).unwrap();
            assert_eq!(back, record);
            // Every serialized reduced form realizes back to its original.
            for (rec, poly) in back.reduced.iter().zip(&info.reduced) {
                assert_eq!(rec.realize().unwrap().coeffs, poly.coeffs);
            }
        }
    }

    #[test]
    fn norm_group_record_drives_the_construction() {
        let text = r#"{
            "base": {"p": 2, "f": 1, "char": 0, "prec": 12},
            "pi_N": [[0], [1]],
            "tame_order": 1,
            "wild": [{"u": 1, "rows": [[1]]}, {"u": 2, "rows": [[1]]}]
        }"#;
        let record: NormGroupRecord = serde_json::from_str(text).unwrap();
        let spec = record.realize().unwrap();
        let poly = construct(&spec).unwrap();
        // The parsed datum must drive the construction exactly like the
        // equivalent in-memory one (here: the norm group of the 8th
        // cyclotomic field, conditions at levels 1 and 2 over Q_2).
        let base = BaseField::char_zero(2, 1, 12).unwrap();
        let direct = NormGroupSpec::new(
            base.clone(),
            base.from_integer(2),
            1,
            [(1, vec![vec![1]]), (2, vec![vec![1]])].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(poly, construct(&direct).unwrap());
        // describe ∘ realize is stable and loses nothing.
        let echoed = NormGroupRecord::describe(&spec);
        assert_eq!(echoed.base.modulus, Some(vec![0, 1]));
        let again = echoed.realize().unwrap();
        assert_eq!(again.pi_n, spec.pi_n);
        assert_eq!(again.tame_order, spec.tame_order);
        assert_eq!(again.wild, spec.wild);
        assert_eq!(NormGroupRecord::describe(&again), echoed);
    }

    #[test]
    fn duplicate_wild_levels_are_rejected() {
        let record = NormGroupRecord {
            base: BaseRecord {
                p: 2,
                f: 1,
                characteristic: 0,
                prec: 10,
                modulus: None,
                unif_unit: None,
            },
            pi_n: vec![vec![0], vec![1]],
            tame_order: 1,
            wild: vec![
                WildConditionRecord { u: 1, rows: vec![vec![1]] },
                WildConditionRecord { u: 1, rows: vec![vec![1]] },
            ],
        };
        assert!(matches!(record.realize(), Err(Error::InvalidSpec(_))));
    }
}
