//! Brill–Noether stratification of the exceptional divisor, the divisorial
//! contraction `φ: M_last → M̄`, and the degree bookkeeping around the first
//! flop in divisibility 2.
//!
//! `Δ = ⊔ Δ(k)` for `1 ≤ k ≤ ⌊√g⌋`, where `Δ(k)` is a `Gr(k, 2k)`-bundle
//! over the `(2g − 2k²)`-dimensional moduli space of stable objects with
//! Mukai vector `b_k`.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{canonical_classes, pairing, square, Divisibility, GenusContext, MukaiVector};
use crate::walls::movable_nef;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumDatum {
    pub k: i64,
    pub b_k: MukaiVector,
    /// `b_k² + 2`.
    pub base_dim: i64,
    /// The Grassmannian `Gr(k, 2k)` of each fiber.
    pub grass_fiber: (i64, i64),
    pub fiber_dim: i64,
    pub total_dim: i64,
    pub codim_in_delta: i64,
}

/// `b_k` for the given context.
///
/// In divisibility 2 this is `v − k·v(A)`, the class of the quotient in
/// `A ⊗ W^∨ → F → F_k`. The closed form `−(2k, (1−k)h, (1−k/2)g − 1)` that
/// is sometimes quoted for it does not reproduce the base dimension
/// `2g − 2k²`; see [`alternative_b_k_div2`].
pub fn b_k(ctx: &GenusContext, k: i64) -> MukaiVector {
    let k_big = BigInt::from(k);
    match ctx.case() {
        Divisibility::Div1 => MukaiVector::new(-k_big.clone(), 1, -k_big),
        Divisibility::Div2 => {
            let cl = canonical_classes(ctx);
            let a = cl.a.expect("divisibility 2 carries v(A)");
            &cl.v - &a.scale(&k_big)
        }
    }
}

/// The closed form `−(2k, (1−k)h, (1−k/2)g − 1)`, kept for comparison in
/// diagnostics only.
pub fn alternative_b_k_div2(ctx: &GenusContext, k: i64) -> MukaiVector {
    let g = ctx.genus_big();
    let k_big = BigInt::from(k);
    // (1 − k/2)·g − 1 is integral because g is even.
    let s = &g - &k_big * &g / 2u32 - 1u32;
    MukaiVector::new(-2i32 * &k_big, &k_big - 1u32, -s)
}

pub fn max_stratum_index(ctx: &GenusContext) -> i64 {
    ctx.genus().sqrt() as i64
}

pub fn strata(ctx: &GenusContext) -> Vec<StratumDatum> {
    let g = ctx.g();
    (1..=max_stratum_index(ctx))
        .map(|k| {
            let b = b_k(ctx, k);
            let base_dim = i64::try_from(square(&b, ctx) + 2u32).expect("bounded by 2g");
            let fiber_dim = k * k;
            debug_assert_eq!(base_dim, 2 * g - 2 * k * k);
            StratumDatum {
                k,
                b_k: b,
                base_dim,
                grass_fiber: (k, 2 * k),
                fiber_dim,
                total_dim: base_dim + fiber_dim,
                codim_in_delta: fiber_dim - 1,
            }
        })
        .collect()
}

/// Diagnostics for the strata: in divisibility 2, how the alternative
/// closed form for `b_k` compares with `v − k·v(A)`.
pub fn strata_diagnostics(ctx: &GenusContext) -> Vec<String> {
    if ctx.case() != Divisibility::Div2 {
        return Vec::new();
    }
    let g = ctx.g();
    (1..=max_stratum_index(ctx))
        .filter_map(|k| {
            let alt = alternative_b_k_div2(ctx, k);
            let alt_dim = square(&alt, ctx) + 2u32;
            let expected = BigInt::from(2 * g - 2 * k * k);
            (alt_dim != expected).then(|| {
                format!(
                    "b_{k}: closed form -(2k,(1-k)h,(1-k/2)g-1) = {alt} gives base dim {alt_dim} != {expected}; using v - k*v(A) = {}",
                    b_k(ctx, k)
                )
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionChecks {
    pub delta_square_is_minus_two: bool,
    pub delta_lambda_orthogonal: bool,
    pub lambda_on_movable_boundary: bool,
}

impl ContractionChecks {
    pub fn all(&self) -> bool {
        self.delta_square_is_minus_two
            && self.delta_lambda_orthogonal
            && self.lambda_on_movable_boundary
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionDatum {
    pub delta: MukaiVector,
    pub lambda: MukaiVector,
    /// `k` in `λ = k·f + δ`.
    pub f_coefficient: i64,
    pub checks: ContractionChecks,
}

impl ContractionDatum {
    pub fn relation(&self) -> String {
        format!("lambda = {}f + delta", self.f_coefficient)
    }
}

pub fn contraction_datum(ctx: &GenusContext) -> ContractionDatum {
    let cl = canonical_classes(ctx);
    let k = cl.f_coefficient();
    let mov = movable_nef(ctx);
    let checks = ContractionChecks {
        delta_square_is_minus_two: square(&cl.delta, ctx) == BigInt::from(-2),
        delta_lambda_orthogonal: pairing(&cl.delta, &cl.lambda, ctx).is_zero(),
        lambda_on_movable_boundary: mov.movable_rays[1] == cl.lambda
            && &cl.f.scale(&BigInt::from(k)) + &cl.delta == cl.lambda,
    };
    ContractionDatum {
        delta: cl.delta,
        lambda: cl.lambda,
        f_coefficient: k,
        checks,
    }
}

/// Numerology of the rigid bundle `A` and of the first flop in
/// divisibility 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerDiv2 {
    /// `h⁰(S, A^∨) = 2 + g/2`.
    pub h0_a_dual: BigInt,
    /// `h⁰(S, A^∨)/2 = 1 + g/4`.
    pub point_count_r: BigInt,
    /// `mult_Σ(Δ) = h⁰(C, A^∨|_C)`.
    pub mult_sigma_delta: BigInt,
    /// `Δ·γ` for a line `γ` in the zero section.
    pub delta_dot_gamma: BigInt,
    /// `m = deg(L|_γ) = 1 + Δ·γ`.
    pub m_degree: BigInt,
    pub m_is_odd: bool,
}

pub fn ledger_div2(ctx: &GenusContext) -> Result<LedgerDiv2> {
    ctx.require("ledger_div2", Divisibility::Div2)?;
    let g = ctx.genus_big();
    let h0 = BigInt::from(2) + &g / 2u32;
    let delta_dot_gamma = -(&g / 2u32 + 2u32);
    let m_degree = BigInt::one() + &delta_dot_gamma;
    Ok(LedgerDiv2 {
        point_count_r: BigInt::one() + &g / 4u32,
        mult_sigma_delta: h0.clone(),
        h0_a_dual: h0,
        delta_dot_gamma,
        m_is_odd: m_is_odd(&m_degree),
        m_degree,
    })
}

fn m_is_odd(m: &BigInt) -> bool {
    !(m % 2u32).is_zero()
}

/// `m = 1 + ((2, −h, g/2), (1, 0, 1))` for any even genus, including
/// `g ≡ 2 (mod 4)` where no divisibility 2 moduli space exists. Diagnostic
/// only.
pub fn first_flop_degree(genus: u64) -> Result<(BigInt, bool)> {
    if genus < 2 || !genus.is_multiple_of(2) {
        return Err(Error::OutOfRange {
            what: "genus",
            detail: format!("{genus} must be even and at least 2"),
        });
    }
    let h2 = crate::lattice::h_square(genus);
    let delta = MukaiVector::new(2, -1, BigInt::from(genus / 2));
    let gamma = MukaiVector::new(1, 0, 1);
    let m = BigInt::one() + delta.pair(&gamma, &h2);
    let odd = m_is_odd(&m);
    Ok((m, odd))
}
