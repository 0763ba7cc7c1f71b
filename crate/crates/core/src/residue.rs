//! Finite fields `F_{p^f}` as explicit polynomial quotient rings.
//!
//! Elements are coordinate vectors over `F_p` with respect to the power
//! basis `1, x, …, x^{f-1}` of `F_p[x]/(modulus)`.  The modulus is chosen
//! canonically (the lexicographically smallest monic irreducible of the
//! requested degree), so a field is determined by `(p, f)` alone and two
//! independently constructed fields agree element-for-element.
//!
//! Besides ring arithmetic the module provides the pieces the reduction
//! algorithms lean on: discrete logarithms, canonical `n`-th roots, power
//! class representatives, matrices of additive (`p`-polynomial) maps, and
//! row-reduction over `F_p` with *lexicographically minimal* solutions so
//! that every normalizing choice in the callers is deterministic.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Element of a [`ResidueField`], stored as its coordinate vector
/// `[c_0, …, c_{f-1}]` (low degree first, entries in `[0, p)`).
///
/// Elements do not carry a reference to their field; all arithmetic goes
/// through [`ResidueField`] methods.  The derived `Ord` is lexicographic on
/// coordinates, which is the canonical "coordinate order" used whenever a
/// smallest representative has to be picked.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResidueElement {
    pub coords: Vec<u64>,
}

impl ResidueElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// The finite field `F_{p^f} = F_p[x]/(modulus)`.
#[derive(Debug)]
pub struct ResidueField {
    pub p: u64,
    pub f: usize,
    /// Monic irreducible polynomial of degree `f` over `F_p`, low degree
    /// first (length `f + 1`, last entry `1`).
    pub modulus: Vec<u64>,
    /// `p^f`.
    pub q: u64,
    /// Primitive root and discrete log table, built on first use.
    prim: OnceLock<(ResidueElement, Vec<u64>)>,
}

impl Clone for ResidueField {
    fn clone(&self) -> Self {
        ResidueField {
            p: self.p,
            f: self.f,
            modulus: self.modulus.clone(),
            q: self.q,
            prim: OnceLock::new(),
        }
    }
}

impl PartialEq for ResidueField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.modulus == other.modulus
    }
}

impl Eq for ResidueField {}

/// Discrete log tables are materialized as dense vectors, so cap the field
/// size; every supported workload is far below this.
const MAX_DLOG_TABLE: u64 = 1 << 20;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- dense polynomial arithmetic over F_p (low degree first) ----

fn ptrim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn prem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    ptrim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mk) in m.iter().enumerate() {
                let idx = shift + k;
                r[idx] = (r[idx] + p * p - (lead * mk) % p) % p;
            }
        }
        ptrim(&mut r);
        if r.len() == a.len() && r.len() > dm {
            // Leading coefficient was already 0; ptrim handled it.
            unreachable!();
        }
    }
    r
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        // Make b monic so prem applies.
        let lead = *b.last().unwrap();
        if lead != 1 {
            let inv = modpow(lead, p - 2, p);
            for c in b.iter_mut() {
                *c = (*c * inv) % p;
            }
        }
        let r = prem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn ppowmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = prem(&pmul(&acc, &b, p), m, p);
        }
        b = prem(&pmul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

fn modpow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Rabin irreducibility test for a monic polynomial of degree `f` over `F_p`.
fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    let x = vec![0u64, 1];
    // x^(p^(f/r)) != x mod g for every prime r | f, as residues must not lie
    // in a proper subfield...
    let mut rem = f;
    let mut r = 2;
    let mut prime_divisors = vec![];
    while rem > 1 {
        if rem % r == 0 {
            prime_divisors.push(r);
            while rem % r == 0 {
                rem /= r;
            }
        }
        r += 1;
    }
    for r in prime_divisors {
        let e = (p as u128).pow((f / r) as u32);
        assert!(e <= u64::MAX as u128, "field too large");
        let xe = ppowmod(&x, e as u64, g, p);
        // gcd(x^(p^(f/r)) - x, g) must be constant.
        let mut diff = xe;
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        ptrim(&mut diff);
        let d = pgcd(&diff, g, p);
        if d.len() != 1 {
            return false;
        }
    }
    // ...and x^(p^f) == x mod g.
    let e = (p as u128).pow(f as u32);
    assert!(e <= u64::MAX as u128, "field too large");
    let xe = ppowmod(&x, e as u64, g, p);
    xe == prem(&x, g, p)
}

impl ResidueField {
    /// Construct `F_{p^f}` with the canonical modulus: the monic irreducible
    /// polynomial of degree `f` whose coefficient vector `(c_0, …, c_{f-1})`
    /// is lexicographically smallest.
    pub fn new(p: u64, f: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::InvalidSpec("residue degree must be positive".into()));
        }
        let q = (p as u128).pow(f as u32);
        if q > u64::MAX as u128 {
            return Err(Error::InvalidSpec(format!("residue field of size {p}^{f} is too large")));
        }
        // Odometer over (c_0, …, c_{f-1}) with the last coordinate moving
        // fastest enumerates coefficient vectors in increasing lex order.
        let mut coeffs = vec![0u64; f];
        loop {
            let mut g = coeffs.clone();
            g.push(1);
            if is_irreducible(&g, p) {
                return Ok(ResidueField { p, f, modulus: g, q: q as u64, prim: OnceLock::new() });
            }
            let mut i = f;
            loop {
                if i == 0 {
                    return Err(Error::Internal(format!("no irreducible of degree {f} over F_{p}")));
                }
                i -= 1;
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
            }
        }
    }

    pub fn zero(&self) -> ResidueElement {
        ResidueElement { coords: vec![0; self.f] }
    }

    pub fn one(&self) -> ResidueElement {
        self.from_u64(1)
    }

    /// The image of the integer `n` (i.e. `n mod p` as a constant).
    pub fn from_u64(&self, n: u64) -> ResidueElement {
        let mut coords = vec![0; self.f];
        coords[0] = n % self.p;
        ResidueElement { coords }
    }

    pub fn from_i64(&self, n: i64) -> ResidueElement {
        let p = self.p as i64;
        self.from_u64(n.rem_euclid(p) as u64)
    }

    fn check(&self, a: &ResidueElement) {
        debug_assert_eq!(a.coords.len(), self.f);
        debug_assert!(a.coords.iter().all(|&c| c < self.p));
    }

    pub fn add(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        self.check(a);
        self.check(b);
        let coords = a.coords.iter().zip(&b.coords).map(|(&x, &y)| (x + y) % self.p).collect();
        ResidueElement { coords }
    }

    pub fn sub(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &ResidueElement) -> ResidueElement {
        self.check(a);
        let coords = a.coords.iter().map(|&x| (self.p - x) % self.p).collect();
        ResidueElement { coords }
    }

    pub fn mul(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        self.check(a);
        self.check(b);
        let prod = pmul(&a.coords, &b.coords, self.p);
        let mut coords = prem(&prod, &self.modulus, self.p);
        coords.resize(self.f, 0);
        ResidueElement { coords }
    }

    /// Scalar multiple by an `F_p` scalar.
    pub fn scale(&self, a: &ResidueElement, s: u64) -> ResidueElement {
        self.check(a);
        let s = s % self.p;
        let coords = a.coords.iter().map(|&x| x * s % self.p).collect();
        ResidueElement { coords }
    }

    pub fn pow(&self, a: &ResidueElement, e: u64) -> ResidueElement {
        let mut acc = self.one();
        let mut b = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Power with a possibly negative exponent (inverts first if needed).
    pub fn pow_i(&self, a: &ResidueElement, e: i64) -> ResidueElement {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.pow(&self.inv(a), (-e) as u64)
        }
    }

    /// Multiplicative inverse.  Panics on zero.
    pub fn inv(&self, a: &ResidueElement) -> ResidueElement {
        assert!(!a.is_zero(), "inverse of zero in residue field");
        self.pow(a, self.q - 2)
    }

    pub fn div(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        self.mul(a, &self.inv(b))
    }

    /// `a^(p^k)`.
    pub fn frobenius_pow(&self, a: &ResidueElement, k: u32) -> ResidueElement {
        let mut acc = a.clone();
        for _ in 0..k {
            acc = self.pow(&acc, self.p);
        }
        acc
    }

    /// Encode the element as an integer in `[0, q)`, base `p`, coordinate 0
    /// least significant.
    pub fn element_code(&self, a: &ResidueElement) -> u64 {
        self.check(a);
        let mut code = 0u64;
        for &c in a.coords.iter().rev() {
            code = code * self.p + c;
        }
        code
    }

    pub fn element_from_code(&self, mut code: u64) -> ResidueElement {
        let mut coords = vec![0; self.f];
        for c in coords.iter_mut() {
            *c = code % self.p;
            code /= self.p;
        }
        assert_eq!(code, 0, "code out of range");
        ResidueElement { coords }
    }

    /// All field elements in increasing coordinate order
    /// (lexicographic on `(c_0, …, c_{f-1})`).
    pub fn elements(&self) -> Vec<ResidueElement> {
        let mut out = Vec::with_capacity(self.q as usize);
        let mut coords = vec![0u64; self.f];
        loop {
            out.push(ResidueElement { coords: coords.clone() });
            let mut i = self.f;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < self.p {
                    break;
                }
                coords[i] = 0;
            }
        }
    }

    fn prim_data(&self) -> &(ResidueElement, Vec<u64>) {
        self.prim.get_or_init(|| {
            assert!(
                self.q <= MAX_DLOG_TABLE,
                "residue field of size {} exceeds the discrete log table cap",
                self.q
            );
            // Smallest element (in coordinate order) of multiplicative
            // order q - 1.
            let mut root = None;
            'outer: for cand in self.elements() {
                if cand.is_zero() {
                    continue;
                }
                // Check order by ruling out all maximal proper divisors.
                let ord = self.q - 1;
                if ord > 1 {
                    let mut m = ord;
                    let mut d = 2;
                    let mut prime_divs = vec![];
                    while m > 1 {
                        if d * d > m {
                            prime_divs.push(m);
                            break;
                        }
                        if m % d == 0 {
                            prime_divs.push(d);
                            while m % d == 0 {
                                m /= d;
                            }
                        }
                        d += 1;
                    }
                    for r in prime_divs {
                        if self.pow(&cand, ord / r) == self.one() {
                            continue 'outer;
                        }
                    }
                }
                root = Some(cand);
                break;
            }
            let root = root.expect("multiplicative group of a finite field is cyclic");
            let mut table = vec![u64::MAX; self.q as usize];
            let mut acc = self.one();
            for k in 0..self.q - 1 {
                table[self.element_code(&acc) as usize] = k;
                acc = self.mul(&acc, &root);
            }
            (root, table)
        })
    }

    /// The canonical primitive root: the coordinate-order smallest element
    /// of multiplicative order `q - 1`.
    pub fn primitive_root(&self) -> ResidueElement {
        self.prim_data().0.clone()
    }

    /// Discrete logarithm with respect to [`ResidueField::primitive_root`];
    /// `None` for the zero element.
    pub fn dlog(&self, a: &ResidueElement) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        Some(self.prim_data().1[self.element_code(a) as usize])
    }

    /// Canonical solution of `θ^n = target` for nonzero `target`: among all
    /// solutions, the one with the smallest discrete logarithm.  `None` when
    /// no solution exists.
    pub fn nth_root_min_dlog(&self, target: &ResidueElement, n: u64) -> Option<ResidueElement> {
        let t = self.dlog(target)?;
        let m = self.q - 1;
        // Solve n*e = t (mod m).
        let (g, inv) = {
            let g = gcd(n % m, m);
            if t % g != 0 {
                return None;
            }
            let red = m / g;
            // Inverse of n/g modulo m/g.
            let ng = (n % m) / g;
            (g, mod_inverse(ng % red, red)?)
        };
        let red = m / g;
        let e0 = (t / g) % red * inv % red;
        Some(self.pow(&self.primitive_root(), e0))
    }

    /// Representatives of the power classes `κ^× / (κ^×)^k`, in coordinate
    /// order of the representative (each class is represented by its
    /// coordinate-order smallest member).
    pub fn power_class_reps(&self, k: u64) -> Vec<ResidueElement> {
        let m = self.q - 1;
        let d = gcd(k % m, m).max(1);
        let d = if m == 0 { 1 } else { d };
        let mut seen = vec![false; d as usize];
        let mut reps = vec![];
        for cand in self.elements() {
            if cand.is_zero() {
                continue;
            }
            let class = (self.dlog(&cand).unwrap() % d) as usize;
            if !seen[class] {
                seen[class] = true;
                reps.push(cand);
                if reps.len() == d as usize {
                    break;
                }
            }
        }
        reps
    }

    /// Matrix (over `F_p`, acting on coordinate columns) of the additive map
    /// `θ ↦ Σ c_a θ^(p^a)` given by `terms = [(a, c_a), …]`.
    pub fn additive_map_matrix(&self, terms: &[(u32, ResidueElement)]) -> Vec<Vec<u64>> {
        let mut mat = vec![vec![0u64; self.f]; self.f];
        for i in 0..self.f {
            let mut basis = self.zero();
            basis.coords[i] = 1;
            let img = self.eval_additive(terms, &basis);
            for (r, row) in mat.iter_mut().enumerate() {
                row[i] = img.coords[r];
            }
        }
        mat
    }

    /// Evaluate the additive polynomial `Σ c_a T^(p^a)` at `θ`.
    pub fn eval_additive(&self, terms: &[(u32, ResidueElement)], theta: &ResidueElement) -> ResidueElement {
        let mut acc = self.zero();
        for (a, c) in terms {
            let t = self.frobenius_pow(theta, *a);
            acc = self.add(&acc, &self.mul(c, &t));
        }
        acc
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Inverse of `a` modulo `m` (not necessarily prime), if it exists.
pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

// ---- linear algebra over F_p ----

/// Reduced row echelon form in place; returns the pivot columns.  Zero rows
/// are removed.
pub fn rref(mat: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = mat.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..ncols {
        let Some(sel) = (row..mat.len()).find(|&r| mat[r][col] % p != 0) else {
            continue;
        };
        mat.swap(row, sel);
        let inv = modpow(mat[row][col], p - 2, p);
        for c in mat[row].iter_mut() {
            *c = *c * inv % p;
        }
        for r in 0..mat.len() {
            if r != row && mat[r][col] % p != 0 {
                let factor = mat[r][col] % p;
                for c in 0..ncols {
                    mat[r][c] = (mat[r][c] + p * p - factor * mat[row][c] % p) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == mat.len() {
            break;
        }
    }
    mat.truncate(row);
    pivots
}

/// Subtract multiples of the RREF `rows` from `v` so that `v` becomes zero
/// at every pivot column.  With `rows` spanning a subspace `W`, the result
/// is the lexicographically smallest element of the coset `v + W`.
pub fn reduce_by_rref(v: &mut [u64], rows: &[Vec<u64>], pivots: &[usize], p: u64) {
    for (row, &piv) in rows.iter().zip(pivots) {
        let factor = v[piv] % p;
        if factor != 0 {
            for (vc, rc) in v.iter_mut().zip(row) {
                *vc = (*vc + p * p - factor * rc % p) % p;
            }
        }
    }
}

/// Does `v` lie in the row space of the RREF `rows`?
pub fn in_rref_span(v: &[u64], rows: &[Vec<u64>], pivots: &[usize], p: u64) -> bool {
    let mut w = v.to_vec();
    reduce_by_rref(&mut w, rows, pivots, p);
    w.iter().all(|&c| c % p == 0)
}

/// Basis (in RREF) of the null space `{x : Ax = 0}` of a matrix over `F_p`.
pub fn kernel_basis(a: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let mut m = a.to_vec();
    let pivots = rref(&mut m, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = vec![];
    for &fc in &free {
        let mut v = vec![0u64; ncols];
        v[fc] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - m[r][fc] % p) % p;
        }
        basis.push(v);
    }
    let _ = rref(&mut basis, p);
    basis
}

/// Lexicographically smallest solution of `Ax = b` over `F_p`, or `None` if
/// the system is inconsistent.
pub fn solve_lex_min(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi % p);
            r
        })
        .collect();
    let pivots = rref(&mut aug, p);
    if pivots.contains(&ncols) {
        return None; // a pivot in the augmented column means 0 = nonzero
    }
    let mut x = vec![0u64; ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols];
    }
    // x is now the particular solution with free variables zero; make it
    // canonical by reducing against the kernel.
    let ker = kernel_basis(a, p);
    let kpiv: Vec<usize> = {
        // kernel_basis returns RREF rows; recover their pivot columns.
        ker.iter().map(|row| row.iter().position(|&c| c != 0).unwrap()).collect()
    };
    reduce_by_rref(&mut x, &ker, &kpiv, p);
    Some(x)
}

/// Matrix-vector product over `F_p`.
pub fn mat_vec(mat: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    mat.iter()
        .map(|row| row.iter().zip(v).fold(0u64, |acc, (&m, &x)| (acc + m * x) % p))
        .collect()
}

/// All vectors in the span of `basis` (over `F_p`), sorted lexicographically.
pub fn enumerate_span(basis: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0u64; ncols]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for v in &out {
            for s in 0..p {
                let w: Vec<u64> = v.iter().zip(b).map(|(&x, &y)| (x + s * y) % p).collect();
                next.push(w);
            }
        }
        out = next;
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        // Degree 1: the modulus is x itself.
        assert_eq!(ResidueField::new(2, 1).unwrap().modulus, vec![0, 1]);
        assert_eq!(ResidueField::new(7, 1).unwrap().modulus, vec![0, 1]);
        // F_4 = F_2[x]/(x^2 + x + 1).
        assert_eq!(ResidueField::new(2, 2).unwrap().modulus, vec![1, 1, 1]);
        // F_25: x^2 + x + 1 is again the lex-smallest irreducible.
        assert_eq!(ResidueField::new(5, 2).unwrap().modulus, vec![1, 1, 1]);
        // F_8: among the two irreducible cubics, x^3 + x^2 + 1 has the
        // lex-smaller coefficient vector (1,0,1) vs (1,1,0).
        assert_eq!(ResidueField::new(2, 3).unwrap().modulus, vec![1, 0, 1, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(ResidueField::new(6, 1), Err(Error::NotPrime(6))));
        assert!(ResidueField::new(2, 0).is_err());
    }

    #[test]
    fn f4_arithmetic() {
        let k = ResidueField::new(2, 2).unwrap();
        let x = ResidueElement { coords: vec![0, 1] };
        // x^2 = x + 1 and x^3 = 1.
        assert_eq!(k.mul(&x, &x), ResidueElement { coords: vec![1, 1] });
        assert_eq!(k.pow(&x, 3), k.one());
        assert_eq!(k.inv(&x), k.mul(&x, &x));
    }

    #[test]
    fn exhaustive_inverses() {
        for (p, f) in [(2, 3), (3, 2), (5, 1), (7, 1)] {
            let k = ResidueField::new(p, f).unwrap();
            for a in k.elements() {
                if a.is_zero() {
                    continue;
                }
                assert_eq!(k.mul(&a, &k.inv(&a)), k.one());
            }
        }
    }

    #[test]
    fn primitive_roots_are_canonical() {
        assert_eq!(ResidueField::new(2, 1).unwrap().primitive_root().coords, vec![1]);
        assert_eq!(ResidueField::new(3, 1).unwrap().primitive_root().coords, vec![2]);
        assert_eq!(ResidueField::new(5, 1).unwrap().primitive_root().coords, vec![2]);
        // In F_4 the class of x (coords [0,1]) has order 3 and is the
        // smallest element of full order.
        assert_eq!(ResidueField::new(2, 2).unwrap().primitive_root().coords, vec![0, 1]);
    }

    #[test]
    fn dlog_round_trip() {
        let k = ResidueField::new(3, 2).unwrap();
        let g = k.primitive_root();
        for e in 0..8 {
            let a = k.pow(&g, e);
            assert_eq!(k.dlog(&a), Some(e));
        }
        assert_eq!(k.dlog(&k.zero()), None);
    }

    #[test]
    fn canonical_nth_roots() {
        let k3 = ResidueField::new(3, 1).unwrap();
        let two = k3.from_u64(2);
        // 2 is not a square mod 3.
        assert_eq!(k3.nth_root_min_dlog(&two, 2), None);
        // θ^2 = 1 has solutions 1 and 2; the one with smaller dlog is 1.
        assert_eq!(k3.nth_root_min_dlog(&k3.one(), 2), Some(k3.one()));
        let k5 = ResidueField::new(5, 1).unwrap();
        // θ^2 = 4: solutions 2 and 3 with dlogs 1 and 3; pick 2.
        assert_eq!(k5.nth_root_min_dlog(&k5.from_u64(4), 2), Some(k5.from_u64(2)));
    }

    #[test]
    fn power_classes_mod_squares_of_f3() {
        let k = ResidueField::new(3, 1).unwrap();
        let reps = k.power_class_reps(2);
        assert_eq!(reps, vec![k.from_u64(1), k.from_u64(2)]);
        // gcd(k, q-1) = 1 collapses everything to a single class.
        assert_eq!(k.power_class_reps(3).len(), 1);
    }

    #[test]
    fn frobenius_matrix_on_f4() {
        let k = ResidueField::new(2, 2).unwrap();
        // The map θ ↦ θ^2.
        let m = k.additive_map_matrix(&[(1, k.one())]);
        assert_eq!(m, vec![vec![1, 1], vec![0, 1]]);
        assert!(kernel_basis(&m, 2).is_empty());
        // θ ↦ θ^2 + θ kills exactly F_2.
        let m2 = k.additive_map_matrix(&[(1, k.one()), (0, k.one())]);
        let ker = kernel_basis(&m2, 2);
        assert_eq!(ker, vec![vec![1, 0]]);
    }

    #[test]
    fn lex_min_solutions() {
        // x0 + x1 = 1 over F_2: solutions (0,1) and (1,0); lex-min is (0,1).
        let a = vec![vec![1u64, 1]];
        assert_eq!(solve_lex_min(&a, &[1], 2), Some(vec![0, 1]));
        // Inconsistent system.
        let a2 = vec![vec![1u64, 1], vec![1, 1]];
        assert_eq!(solve_lex_min(&a2, &[1, 0], 2), None);
        // Brute-force check of lex minimality over F_3.
        let a3 = vec![vec![1u64, 2, 1], vec![0, 0, 0]];
        let b3 = vec![2u64, 0];
        let got = solve_lex_min(&a3, &b3, 3).unwrap();
        let mut best: Option<Vec<u64>> = None;
        for x0 in 0..3u64 {
            for x1 in 0..3u64 {
                for x2 in 0..3u64 {
                    let v = vec![x0, x1, x2];
                    if mat_vec(&a3, &v, 3) == b3 && best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
        assert_eq!(Some(got), best);
    }

    #[test]
    fn coset_reduction_is_lex_min() {
        // W = span{(1,1,0), (0,0,1)} over F_2 in RREF.
        let rows = vec![vec![1u64, 1, 0], vec![0, 0, 1]];
        let pivots = vec![0usize, 2];
        let mut v = vec![1u64, 0, 1];
        reduce_by_rref(&mut v, &rows, &pivots, 2);
        assert_eq!(v, vec![0, 1, 0]);
        assert!(in_rref_span(&[1, 1, 1], &rows, &pivots, 2));
        assert!(!in_rref_span(&[1, 0, 0], &rows, &pivots, 2));
    }

    #[test]
    fn span_enumeration_is_sorted_and_complete() {
        let basis = vec![vec![1u64, 0], vec![0, 1]];
        let all = enumerate_span(&basis, 2, 3);
        assert_eq!(all.len(), 9);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn element_codes_round_trip() {
        let k = ResidueField::new(3, 2).unwrap();
        for code in 0..9 {
            assert_eq!(k.element_code(&k.element_from_code(code)), code);
        }
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn field_laws_f9(a in 0u64..9, b in 0u64..9, c in 0u64..9) {
            let k = ResidueField::new(3, 2).unwrap();
            let (a, b, c) = (k.element_from_code(a), k.element_from_code(b), k.element_from_code(c));
            prop_assert_eq!(k.add(&k.add(&a, &b), &c), k.add(&a, &k.add(&b, &c)));
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            // Frobenius is additive.
            prop_assert_eq!(
                k.frobenius_pow(&k.add(&a, &b), 1),
                k.add(&k.frobenius_pow(&a, 1), &k.frobenius_pow(&b, 1))
            );
        }

        #[test]
        fn rank_nullity_f2(rows in proptest::collection::vec(proptest::collection::vec(0u64..2, 4), 1..5)) {
            let mut m = rows.clone();
            let pivots = rref(&mut m, 2);
            let ker = kernel_basis(&rows, 2);
            prop_assert_eq!(pivots.len() + ker.len(), 4);
            for v in &ker {
                prop_assert!(mat_vec(&rows, v, 2).iter().all(|&x| x == 0));
            }
        }
    }
}
