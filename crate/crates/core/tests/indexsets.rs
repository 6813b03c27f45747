//! Index-set algebra: closure axioms, exhaustive checks of the extended
//! union on small sets, the parametrix family of the sphere cone and the
//! composition precondition.

use conic_spectral::cross_section::{mode_constants, CrossSection};
use conic_spectral::error::Error;
use conic_spectral::indexsets::*;

const CUTOFF: f64 = 4.0;

/// Every closed set generated by at most two of the pairs
/// `{0, 0.5, 1.5} × {0, 1}`, plus the empty set.
fn small_sets() -> Vec<IndexSet> {
    let atoms: Vec<(f64, u32)> = [0.0, 0.5, 1.5].iter().flat_map(|&z| [(z, 0), (z, 1)]).collect();
    let mut sets = vec![IndexSet::empty(CUTOFF)];
    for i in 0..atoms.len() {
        sets.push(IndexSet::closure_of(&[atoms[i]], CUTOFF));
        for j in i + 1..atoms.len() {
            sets.push(IndexSet::closure_of(&[atoms[i], atoms[j]], CUTOFF));
        }
    }
    sets
}

#[test]
fn generated_sets_satisfy_closure_axioms() {
    for s in small_sets() {
        assert!(s.validate(), "{s}");
    }
    assert!(!IndexSet::from_pairs(&[(0.5, 1)], CUTOFF).validate());
    assert!(!IndexSet::from_pairs(&[(0.5, 0)], CUTOFF).validate());
}

#[test]
fn extended_union_commutes_exhaustively() {
    let sets = small_sets();
    for a in &sets {
        for b in &sets {
            let ab = ext_union(a, b).unwrap();
            assert_eq!(ab, ext_union(b, a).unwrap(), "{a} / {b}");
            assert!(ab.validate());
            assert!(a.is_subset(&ab) && b.is_subset(&ab));
        }
    }
}

#[test]
fn extended_union_associates_exhaustively() {
    let sets = small_sets();
    for a in &sets {
        for b in &sets {
            let ab = ext_union(a, b).unwrap();
            for c in &sets {
                let left = ext_union(&ab, c).unwrap();
                let right = ext_union(a, &ext_union(b, c).unwrap()).unwrap();
                assert_eq!(left, right, "{a} / {b} / {c}");
            }
        }
    }
}

#[test]
fn addition_commutes_and_absorbs_naturals() {
    let sets = small_sets();
    let nat = IndexSet::naturals(CUTOFF);
    for a in &sets {
        for b in &sets {
            assert_eq!(add(a, b).unwrap(), add(b, a).unwrap());
        }
        if !a.is_empty() {
            assert_eq!(add(a, &nat).unwrap(), *a);
        }
    }
}

#[test]
fn sphere_cone_parametrix_family() {
    let cs = CrossSection::round_sphere(2, 12).unwrap();
    let roots = mode_constants(3, &cs).unwrap().indicial_im;
    let eb = IndexSet::boundary_spectrum(&roots, DEFAULT_CUTOFF);
    let fam = parametrix_family(&eb);
    assert!(fam.hat.contains(1.5, 1));
    assert!(!fam.hat.contains(0.5, 1));
    assert_eq!(fam.hat.inf(), 0.5);
    assert_eq!(fam.check.inf(), 0.5);
    for set in [&fam.hat, &fam.check, &fam.tilde] {
        assert!(set.validate());
    }
}

#[test]
fn mismatched_cutoffs_are_rejected() {
    let a = IndexSet::naturals(4.0);
    let b = IndexSet::naturals(5.0);
    assert!(matches!(ext_union(&a, &b), Err(Error::IndexSet(_))));
}

#[test]
fn composition_needs_positive_overlap() {
    let family = |rb: f64, lb: f64| IndexFamily {
        lb: IndexSet::closure_of(&[(lb, 0)], CUTOFF),
        rb: IndexSet::closure_of(&[(rb, 0)], CUTOFF),
        bf: IndexSet::naturals(CUTOFF),
        bf0: IndexSet::naturals(CUTOFF),
    };
    // Re(E_rb + F_lb) = 0 exactly is not enough
    assert!(matches!(
        compose_b(&family(0.5, 0.0), &family(0.0, -0.5)),
        Err(Error::CompositionUndefined(_))
    ));
    let g = compose_b(&family(0.5, 0.5), &family(0.5, 0.5)).unwrap();
    assert!(g.lb.validate() && g.rb.validate() && g.bf.validate() && g.bf0.validate());
}
