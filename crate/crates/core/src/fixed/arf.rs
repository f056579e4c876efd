//! Brute-force census of quadratic refinements of the standard symplectic
//! form on `F₂^{2g}`, split by Arf invariant.
//!
//! A vector is a `2g`-bit mask: the low `g` bits are the `a`-coordinates and
//! the high `g` bits the `b`-coordinates, with `ω(x, y) = Σ aᵢb'ᵢ + a'ᵢbᵢ`.
//! Every refinement of `ω` is `q_ℓ(x) = Σ aᵢbᵢ + ℓ(x)` for a unique linear
//! form `ℓ`, so there are exactly `2^{2g}` of them.

use crate::error::{Error, Result};

pub const MAX_ARF_GENUS: u32 = 6;

fn mask(g: u32) -> u32 {
    (1u32 << g) - 1
}

/// `q_ℓ(x)` for the refinement indexed by the linear form `ell`.
pub fn quadratic_form_value(g: u32, ell: u32, x: u32) -> u32 {
    let a = x & mask(g);
    let b = (x >> g) & mask(g);
    ((a & b).count_ones() + (ell & x).count_ones()) & 1
}

/// The symplectic form `ω(x, y)`.
pub fn symplectic_form(g: u32, x: u32, y: u32) -> u32 {
    let m = mask(g);
    let (a, b) = (x & m, (x >> g) & m);
    let (c, d) = (y & m, (y >> g) & m);
    ((a & d).count_ones() + (b & c).count_ones()) & 1
}

/// Arf invariant as the value taken most often by `q`.
pub fn arf_by_majority(g: u32, ell: u32) -> u32 {
    let total = 1u64 << (2 * g);
    let zeros = (0..total as u32)
        .filter(|&x| quadratic_form_value(g, ell, x) == 0)
        .count() as u64;
    u32::from(zeros < total / 2)
}

/// Arf invariant as `Σ q(eᵢ)·q(fᵢ)` over the standard symplectic basis.
pub fn arf_by_symplectic_basis(g: u32, ell: u32) -> u32 {
    (0..g)
        .map(|i| {
            let e = 1u32 << i;
            let f = 1u32 << (g + i);
            quadratic_form_value(g, ell, e) * quadratic_form_value(g, ell, f)
        })
        .sum::<u32>()
        & 1
}

/// `(n_even, n_odd)`: the number of refinements with Arf invariant 0 and 1.
pub fn arf_census(g: u32) -> Result<(u64, u64)> {
    if !(1..=MAX_ARF_GENUS).contains(&g) {
        return Err(Error::OutOfRange {
            what: "arf census genus",
            detail: format!("{g} not in 1..={MAX_ARF_GENUS}"),
        });
    }
    let forms = 1u32 << (2 * g);
    let odd = (0..forms)
        .filter(|&ell| arf_by_majority(g, ell) == 1)
        .count() as u64;
    Ok((u64::from(forms) - odd, odd))
}
