//! Finite algebra of polyhomogeneous index sets.
//!
//! An index set is a discrete set of pairs `(z, k)` (exponent, log power).
//! Sets are stored truncated at a cutoff: entries with `z > cutoff` are
//! implied by closure and never stored. Exponents are real; two exponents
//! within `1e-9` of each other are the same exponent.
//!
//! The closure axioms are
//!
//! * `(z, k) ∈ E ⇒ (z, l) ∈ E` for `0 ≤ l ≤ k`,
//! * `(z, k) ∈ E ⇒ (z + j, k) ∈ E` for `j ∈ N₀`.
//!
//! Boundary spectra (sets of indicial roots) are not shift-closed; they are
//! built with [`IndexSet::boundary_spectrum`] and only ever enter the
//! algebra through [`hat`].

use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_CUTOFF: f64 = 6.0;
const TOL: f64 = 1e-9;

/// One exponent with the largest log power present at it.
type Profile = Vec<(f64, u32)>;

#[derive(Debug, Clone)]
pub struct IndexSet {
    /// Sorted by exponent, then log power; unique up to `TOL`.
    pairs: Vec<(f64, u32)>,
    cutoff: f64,
}

impl IndexSet {
    pub fn empty(cutoff: f64) -> Self {
        Self {
            pairs: Vec::new(),
            cutoff,
        }
    }

    /// Stores `pairs` as given (no closure). Entries above the cutoff are
    /// dropped.
    pub fn from_pairs(pairs: &[(f64, u32)], cutoff: f64) -> Self {
        let mut v: Vec<(f64, u32)> = pairs
            .iter()
            .copied()
            .filter(|&(z, _)| z <= cutoff + TOL)
            .collect();
        sort_pairs(&mut v);
        v.dedup_by(|a, b| same_exp(a.0, b.0) && a.1 == b.1);
        Self { pairs: v, cutoff }
    }

    /// Smallest index set containing `pairs`.
    pub fn closure_of(pairs: &[(f64, u32)], cutoff: f64) -> Self {
        let profile = to_profile(pairs);
        Self::from_profile(&shift_close(&profile, cutoff), cutoff)
    }

    /// `N₀` truncated at the cutoff.
    pub fn naturals(cutoff: f64) -> Self {
        Self::closure_of(&[(0.0, 0)], cutoff)
    }

    /// A set of simple roots `{(z, 0)}`, not shift-closed.
    pub fn boundary_spectrum(roots: &[f64], cutoff: f64) -> Self {
        let pairs: Vec<(f64, u32)> = roots.iter().map(|&z| (z, 0)).collect();
        Self::from_pairs(&pairs, cutoff)
    }

    fn from_profile(profile: &[(f64, u32)], cutoff: f64) -> Self {
        let mut pairs = Vec::new();
        for &(z, k) in profile {
            if z <= cutoff + TOL {
                pairs.extend((0..=k).map(|l| (z, l)));
            }
        }
        Self { pairs, cutoff }
    }

    fn profile(&self) -> Profile {
        to_profile(&self.pairs)
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, u32)] {
        &self.pairs
    }

    pub fn contains(&self, z: f64, k: u32) -> bool {
        self.pairs.iter().any(|&(w, l)| same_exp(w, z) && l == k)
    }

    /// Largest log power at exponent `z`, if present.
    pub fn max_log(&self, z: f64) -> Option<u32> {
        self.pairs
            .iter()
            .filter(|&&(w, _)| same_exp(w, z))
            .map(|&(_, k)| k)
            .max()
    }

    /// Checks both closure axioms below the cutoff.
    pub fn validate(&self) -> bool {
        self.pairs.iter().all(|&(z, k)| {
            let lowered = (0..k).all(|l| self.contains(z, l));
            let mut shifted = true;
            let mut j = 1.0;
            while z + j <= self.cutoff + TOL {
                shifted &= self.contains(z + j, k);
                j += 1.0;
            }
            lowered && shifted
        })
    }

    /// `min {z : (z, 0) ∈ E}`, or `+∞` for the empty set.
    pub fn inf(&self) -> f64 {
        self.pairs
            .iter()
            .filter(|&&(_, k)| k == 0)
            .map(|&(z, _)| z)
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest exponent over all entries, `+∞` when empty.
    pub fn min_exponent(&self) -> f64 {
        self.pairs.iter().map(|&(z, _)| z).fold(f64::INFINITY, f64::min)
    }

    /// Set inclusion `self ⊆ other`.
    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.pairs.iter().all(|&(z, k)| other.contains(z, k))
    }

    /// Equality of the stored sets (both directions of inclusion).
    pub fn same_as(&self, other: &IndexSet) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    /// Exponents shifted by `s` (`E + {(s, 0)}`), closure-completed.
    pub fn shifted(&self, s: f64) -> IndexSet {
        let p: Profile = self.profile().into_iter().map(|(z, k)| (z + s, k)).collect();
        IndexSet::from_profile(&shift_close(&p, self.cutoff), self.cutoff)
    }

    /// Plain set union, closure-completed.
    pub fn union(&self, other: &IndexSet) -> Result<IndexSet> {
        check_cutoffs(self, other)?;
        let p = merge_max(&self.profile(), &other.profile());
        Ok(IndexSet::from_profile(&shift_close(&p, self.cutoff), self.cutoff))
    }
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        (self.cutoff - other.cutoff).abs() < TOL && self.same_as(other)
    }
}

impl fmt::Display for IndexSet {
    /// One line per exponent: `z^{k-list}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return writeln!(f, "∅");
        }
        let mut i = 0;
        while i < self.pairs.len() {
            let z = self.pairs[i].0;
            let mut ks = Vec::new();
            while i < self.pairs.len() && same_exp(self.pairs[i].0, z) {
                ks.push(self.pairs[i].1.to_string());
                i += 1;
            }
            writeln!(f, "{}^{{{}}}", fmt_exponent(z), ks.join(","))?;
        }
        Ok(())
    }
}

fn fmt_exponent(z: f64) -> String {
    let s = format!("{z:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn same_exp(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn sort_pairs(v: &mut [(f64, u32)]) {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

fn to_profile(pairs: &[(f64, u32)]) -> Profile {
    let mut v = pairs.to_vec();
    sort_pairs(&mut v);
    let mut out: Profile = Vec::new();
    for (z, k) in v {
        match out.last_mut() {
            Some(last) if same_exp(last.0, z) => last.1 = last.1.max(k),
            _ => out.push((z, k)),
        }
    }
    out
}

fn merge_max(a: &[(f64, u32)], b: &[(f64, u32)]) -> Profile {
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    to_profile(&all)
}

fn shift_close(p: &[(f64, u32)], cutoff: f64) -> Profile {
    let mut all = Vec::new();
    for &(z, k) in p {
        let mut w = z;
        while w <= cutoff + TOL {
            all.push((w, k));
            w += 1.0;
        }
    }
    to_profile(&all)
}

fn raw_add(a: &[(f64, u32)], b: &[(f64, u32)], cutoff: f64) -> Profile {
    let mut all = Vec::new();
    for &(z1, k1) in a {
        for &(z2, k2) in b {
            let z = z1 + z2;
            if z <= cutoff + TOL {
                all.push((z, k1 + k2));
            }
        }
    }
    to_profile(&all)
}

fn raw_ext_union(a: &[(f64, u32)], b: &[(f64, u32)]) -> Profile {
    let mut all: Vec<(f64, u32)> = a.iter().chain(b).copied().collect();
    for &(z1, k1) in a {
        for &(z2, k2) in b {
            if same_exp(z1, z2) {
                all.push((z1, k1 + k2 + 1));
            }
        }
    }
    to_profile(&all)
}

fn check_cutoffs(a: &IndexSet, b: &IndexSet) -> Result<()> {
    if (a.cutoff - b.cutoff).abs() > TOL {
        return Err(Error::IndexSet(format!(
            "mismatched cutoffs {} and {}",
            a.cutoff, b.cutoff
        )));
    }
    Ok(())
}

/// `E₁ + E₂ = {(z₁+z₂, k₁+k₂)}`, closure-completed.
pub fn add(a: &IndexSet, b: &IndexSet) -> Result<IndexSet> {
    check_cutoffs(a, b)?;
    let p = raw_add(&a.profile(), &b.profile(), a.cutoff);
    Ok(IndexSet::from_profile(&shift_close(&p, a.cutoff), a.cutoff))
}

/// Extended union `E₁ ∪̄ E₂`: the union plus `(z, k₁+k₂+1)` wherever both
/// sets carry the exponent `z`. Closure-completed.
pub fn ext_union(a: &IndexSet, b: &IndexSet) -> Result<IndexSet> {
    check_cutoffs(a, b)?;
    let p = raw_ext_union(&a.profile(), &b.profile());
    Ok(IndexSet::from_profile(&shift_close(&p, a.cutoff), a.cutoff))
}

/// `Ê_b = ∪̄_{i ∈ N₀} (E_b + i)` for a boundary spectrum `E_b`.
///
/// The union runs until every shifted copy lies above the cutoff.
pub fn hat(eb: &IndexSet) -> IndexSet {
    let cutoff = eb.cutoff;
    let base = eb.profile();
    let Some(lowest) = base.first().map(|p| p.0) else {
        return IndexSet::empty(cutoff);
    };
    let mut acc = base.clone();
    let mut i = 1.0;
    while lowest + i <= cutoff + TOL {
        let shifted = raw_add(&base, &[(i, 0)], cutoff);
        acc = raw_ext_union(&acc, &shifted);
        i += 1.0;
    }
    IndexSet::from_profile(&shift_close(&acc, cutoff), cutoff)
}

/// The index sets `(Ê_b, Ě_b, Ẽ_b)` of the b-regime parametrix:
///
/// * `Ê_b = ∪̄_i (E_b + i)`,
/// * `Ě_b = Ê_b ∪̄ Ê_b`,
/// * `Ẽ_b = {(0,0)} ∪ ((N₀ + 1) ∪̄ (Ê_b + Ě_b))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametrixFamily {
    pub hat: IndexSet,
    pub check: IndexSet,
    pub tilde: IndexSet,
}

pub fn parametrix_family(eb: &IndexSet) -> ParametrixFamily {
    let cutoff = eb.cutoff;
    let hat_e = hat(eb);
    let check_e = ext_union(&hat_e, &hat_e).expect("same cutoff");
    let sum = add(&hat_e, &check_e).expect("same cutoff");
    let n1 = IndexSet::naturals(cutoff).shifted(1.0);
    let inner = ext_union(&n1, &sum).expect("same cutoff");
    let tilde = IndexSet::closure_of(&[(0.0, 0)], cutoff)
        .union(&inner)
        .expect("same cutoff");
    ParametrixFamily {
        hat: hat_e,
        check: check_e,
        tilde,
    }
}

/// Index family of a full b-operator on the four boundary faces.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFamily {
    pub lb: IndexSet,
    pub rb: IndexSet,
    pub bf: IndexSet,
    pub bf0: IndexSet,
}

/// Index family of the composition `A ∘ B`:
///
/// * `G_lb = (E_bf + F_lb) ∪̄ E_lb`
/// * `G_rb = (E_rb + F_bf) ∪̄ F_rb`
/// * `G_bf = (E_bf + F_bf) ∪̄ (E_lb + F_rb)`
/// * `G_bf0 = E_bf0 + F_bf0`
///
/// Defined only when `Re(E_rb + F_lb) > 0`.
pub fn compose_b(e: &IndexFamily, f: &IndexFamily) -> Result<IndexFamily> {
    check_cutoffs(&e.rb, &f.lb)?;
    let overlap = raw_add(&e.rb.profile(), &f.lb.profile(), f64::INFINITY);
    let lowest = overlap.first().map(|p| p.0).unwrap_or(f64::INFINITY);
    if !(lowest > 0.0) {
        return Err(Error::CompositionUndefined(lowest));
    }
    Ok(IndexFamily {
        lb: ext_union(&add(&e.bf, &f.lb)?, &e.lb)?,
        rb: ext_union(&add(&e.rb, &f.bf)?, &f.rb)?,
        bf: ext_union(&add(&e.bf, &f.bf)?, &add(&e.lb, &f.rb)?)?,
        bf0: add(&e.bf0, &f.bf0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: f64 = DEFAULT_CUTOFF;

    #[test]
    fn naturals_valid_with_zero_inf() {
        let n0 = IndexSet::naturals(C);
        assert!(n0.validate());
        assert_eq!(n0.inf(), 0.0);
        assert_eq!(n0.pairs().len(), 7);
    }

    #[test]
    fn missing_lower_log_is_invalid() {
        let e = IndexSet::from_pairs(&[(1.0, 1)], C);
        assert!(!e.validate());
        let e = IndexSet::from_pairs(&[(5.5, 0)], C);
        assert!(e.validate());
        let e = IndexSet::from_pairs(&[(4.5, 0)], C);
        assert!(!e.validate());
    }

    #[test]
    fn empty_inf_is_infinite() {
        assert_eq!(IndexSet::empty(C).inf(), f64::INFINITY);
    }

    #[test]
    fn extended_union_basics() {
        let e = IndexSet::closure_of(&[(0.5, 0), (2.0, 1)], C);
        assert_eq!(ext_union(&e, &IndexSet::empty(C)).unwrap(), e);

        let two = IndexSet::closure_of(&[(2.0, 0)], C);
        let u = ext_union(&two, &two).unwrap();
        assert!(u.contains(2.0, 0) && u.contains(2.0, 1) && !u.contains(2.0, 2));
        assert!(u.contains(5.0, 1));
        assert!(!u.contains(1.0, 0));
    }

    #[test]
    fn addition_basics() {
        let s = add(
            &IndexSet::closure_of(&[(1.0, 0)], C),
            &IndexSet::closure_of(&[(2.0, 0)], C),
        )
        .unwrap();
        assert!(s.contains(3.0, 0));
        assert_eq!(s.inf(), 3.0);
        assert!(add(&IndexSet::naturals(C), &IndexSet::naturals(4.0)).is_err());
    }

    #[test]
    fn hat_of_three_dimensional_sphere_spectrum() {
        let roots: Vec<f64> = (0..8).map(|j| j as f64 + 0.5).collect();
        let eb = IndexSet::boundary_spectrum(&roots, C);
        let h = hat(&eb);
        assert!(h.contains(1.5, 1));
        assert_eq!(h.max_log(0.5), Some(0));
        assert_eq!(h.max_log(2.5), Some(2));
        assert_eq!(h.inf(), 0.5);
        assert!(h.validate());
    }

    #[test]
    fn hat_without_collisions_has_no_logs() {
        let eb = IndexSet::boundary_spectrum(&[2f64.sqrt(), std::f64::consts::PI], C);
        let h = hat(&eb);
        assert!(h.pairs().iter().all(|&(_, k)| k == 0));
        assert!(h.contains(2f64.sqrt() + 3.0, 0));
    }

    #[test]
    fn parametrix_family_infima() {
        let roots: Vec<f64> = (0..8).map(|j| j as f64 + 0.5).collect();
        let fam = parametrix_family(&IndexSet::boundary_spectrum(&roots, C));
        assert_eq!(fam.hat.inf(), 0.5);
        assert_eq!(fam.check.inf(), 0.5);
        assert_eq!(fam.tilde.inf(), 0.0);
        assert_eq!(fam.check.max_log(0.5), Some(1));
    }

    #[test]
    fn composition_precondition() {
        let family = |lb: &[(f64, u32)], rb: &[(f64, u32)], bf: &[(f64, u32)]| IndexFamily {
            lb: IndexSet::closure_of(lb, C),
            rb: IndexSet::closure_of(rb, C),
            bf: IndexSet::closure_of(bf, C),
            bf0: IndexSet::naturals(C),
        };
        let e = family(&[(1.0, 0)], &[(0.2, 0)], &[(0.0, 0)]);
        let f = family(&[(-0.5, 0)], &[(-0.5, 0)], &[(0.0, 0)]);
        assert!(matches!(compose_b(&e, &f), Err(Error::CompositionUndefined(_))));

        let e = family(&[(1.0, 0)], &[(1.0, 0)], &[(0.0, 0)]);
        let g = compose_b(&e, &f).unwrap();
        assert!(g.bf.contains(0.5, 0));
    }

    #[test]
    fn identity_like_composition_keeps_left_face() {
        let e = IndexFamily {
            lb: IndexSet::closure_of(&[(0.5, 1)], C),
            rb: IndexSet::closure_of(&[(1.5, 0)], C),
            bf: IndexSet::naturals(C),
            bf0: IndexSet::naturals(C),
        };
        let f = IndexFamily {
            lb: IndexSet::empty(C),
            rb: IndexSet::empty(C),
            bf: IndexSet::naturals(C),
            bf0: IndexSet::naturals(C),
        };
        let g = compose_b(&e, &f).unwrap();
        assert_eq!(g.lb, e.lb);
    }

    #[test]
    fn display_format() {
        let e = IndexSet::closure_of(&[(4.5, 1)], C);
        assert_eq!(e.to_string(), "4.5^{0,1}\n5.5^{0,1}\n");
        assert_eq!(IndexSet::empty(C).to_string(), "∅\n");
    }
}
