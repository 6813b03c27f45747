//! Index sets of the parametrix built from the indicial roots of the cone
//! over `S²`.

use conic_spectral::cross_section::{mode_constants, CrossSection};
use conic_spectral::indexsets::{parametrix_family, IndexSet, DEFAULT_CUTOFF};

fn main() -> conic_spectral::Result<()> {
    let roots = mode_constants(3, &CrossSection::round_sphere(2, 8)?)?.indicial_im;
    let fam = parametrix_family(&IndexSet::boundary_spectrum(&roots, DEFAULT_CUTOFF));
    print!("hat:\n{}check:\n{}tilde:\n{}", fam.hat, fam.check, fam.tilde);
    println!("inf hat = {}, inf check = {}", fam.hat.inf(), fam.check.inf());
    Ok(())
}
