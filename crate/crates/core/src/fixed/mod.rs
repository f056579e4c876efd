//! Connected components of the fixed locus of the antisymplectic
//! involution `τ`, their transport through the flop chain, and the
//! linearization signs that separate them on `M̄`.
//!
//! Divisibility 1: `Fix(τ) = S⁺ ⊔ S⁻` (closures of even and odd
//! theta-characteristics on smooth curves of `|H|`); `S⁻ ⊂ Δ` and its image
//! under the contraction drops to dimension `g − 1`.
//!
//! Divisibility 2: `Fix(τ) = Σ ⊔ Ω` (zero section and closure of nonzero
//! 2-torsion). `Σ` is the center of the first flop, `Ω ⊄ Δ`, and the
//! linearization of `L = O(λ)` at points of `Σ` changes by `(−1)^m` across
//! the first flop.

pub mod arf;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::lattice::{canonical_classes, divisibility, Divisibility, GenusContext};
use crate::strata::ledger_div2;
use crate::walls::{enumerate_walls_div2, model_chain, WallDatum};

pub use arf::arf_census;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentName {
    Sigma,
    Omega,
    SPlus,
    SMinus,
}

impl ComponentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentName::Sigma => "Sigma",
            ComponentName::Omega => "Omega",
            ComponentName::SPlus => "SPlus",
            ComponentName::SMinus => "SMinus",
        }
    }
}

impl fmt::Display for ComponentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Character by which `τ` acts on the fiber of the polarizing line bundle
/// at a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Trivial,
    Det,
    Unset,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Trivial => "Trivial",
            Sign::Det => "Det",
            Sign::Unset => "Unset",
        }
    }

    fn flipped(self) -> Sign {
        match self {
            Sign::Trivial => Sign::Det,
            Sign::Det => Sign::Trivial,
            Sign::Unset => Sign::Unset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedComponentReport {
    pub name: ComponentName,
    pub dim: i64,
    /// Containment in the exceptional divisor on `M`.
    pub contained_in_delta: bool,
    /// Number of fixed points in a smooth Lagrangian fiber.
    pub fiber_count: BigUint,
    /// Sign on the last model (divisibility 2); `Unset` in divisibility 1.
    pub sign: Sign,
    pub image_dim_after_contraction: i64,
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// `(zero section, nonzero)` 2-torsion points of a `g`-dimensional
/// principally polarized abelian variety: `(1, 2^{2g} − 1)`.
pub fn two_torsion_counts(genus: u64) -> (BigUint, BigUint) {
    (BigUint::one(), pow2(2 * genus) - 1u32)
}

/// `(even, odd)` theta-characteristics on a genus `g` curve:
/// `2^{g−1}(2^g + 1)` and `2^{g−1}(2^g − 1)`.
pub fn theta_characteristic_counts(genus: u64) -> (BigUint, BigUint) {
    assert!(genus >= 1, "theta-characteristics need genus >= 1");
    let base = pow2(genus - 1);
    let full = pow2(genus);
    (&base * (&full + 1u32), &base * (full - 1u32))
}

pub fn fiber_counts(ctx: &GenusContext) -> BTreeMap<ComponentName, BigUint> {
    let (a, b, (x, y)) = match ctx.case() {
        Divisibility::Div1 => (
            ComponentName::SPlus,
            ComponentName::SMinus,
            theta_characteristic_counts(ctx.genus()),
        ),
        Divisibility::Div2 => (
            ComponentName::Sigma,
            ComponentName::Omega,
            two_torsion_counts(ctx.genus()),
        ),
    };
    BTreeMap::from([(a, x), (b, y)])
}

pub fn components(ctx: &GenusContext) -> Vec<FixedComponentReport> {
    let g = ctx.g();
    let mut counts = fiber_counts(ctx);
    let mut take = |name| counts.remove(&name).expect("count present");
    match ctx.case() {
        Divisibility::Div1 => vec![
            FixedComponentReport {
                name: ComponentName::SPlus,
                dim: g,
                contained_in_delta: false,
                fiber_count: take(ComponentName::SPlus),
                sign: Sign::Unset,
                image_dim_after_contraction: g,
            },
            FixedComponentReport {
                name: ComponentName::SMinus,
                dim: g,
                contained_in_delta: true,
                fiber_count: take(ComponentName::SMinus),
                sign: Sign::Unset,
                // Δ(1) → M^st(b_1) has fibers P¹ meeting S⁻ in curves.
                image_dim_after_contraction: g - 1,
            },
        ],
        Divisibility::Div2 => {
            let signs = linearization_signs(ctx).final_signs;
            vec![
                FixedComponentReport {
                    name: ComponentName::Sigma,
                    dim: g,
                    contained_in_delta: true,
                    fiber_count: take(ComponentName::Sigma),
                    sign: signs[&ComponentName::Sigma],
                    image_dim_after_contraction: g,
                },
                FixedComponentReport {
                    name: ComponentName::Omega,
                    dim: g,
                    contained_in_delta: false,
                    fiber_count: take(ComponentName::Omega),
                    sign: signs[&ComponentName::Omega],
                    image_dim_after_contraction: g,
                },
            ]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipDims {
    pub gamma_dim: i64,
    pub gamma_prime_dim: i64,
}

/// Local model of a flip: `τ` acts on `P^{n−1}`-bundles over `W` with
/// eigenspaces of dimensions `p` and `n − p`. The fixed component `Γ` that
/// is a `P^{p−1}`-bundle over `W` is replaced by the `P^{n−p−1}`-bundle `Γ'`
/// of the annihilator.
pub fn standard_flip(n: i64, p: i64, dim_w: i64) -> Result<FlipDims> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "flip rank n = {n} must be at least 2"
        )));
    }
    if !(1..n).contains(&p) {
        return Err(Error::Domain(format!(
            "eigenspace dim p = {p} not in 1..{n}"
        )));
    }
    if dim_w < 0 {
        return Err(Error::Domain(format!("base dimension {dim_w} is negative")));
    }
    Ok(FlipDims {
        gamma_dim: dim_w + p - 1,
        gamma_prime_dim: dim_w + (n - p) - 1,
    })
}

/// Eigenspace type of the involution on the projectivized fibers
/// `P(Ext¹(R', R))` of a flop center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberAction {
    Trivial,
    Split(i64, i64),
    Unknown,
}

/// Known eigenspace splits: recorded only for `g = 4` and `g = 8`.
pub fn fiber_action(ctx: &GenusContext, wall: &WallDatum) -> FiberAction {
    if ctx.case() != Divisibility::Div2 {
        return FiberAction::Unknown;
    }
    match (ctx.genus(), wall.c, wall.d) {
        (4 | 8, 0, -1) => FiberAction::Trivial,
        (4, 0, 0) => FiberAction::Split(1, 2),
        (8, 0, 0) => FiberAction::Split(1, 6),
        (8, 0, 1) => FiberAction::Split(2, 3),
        _ => FiberAction::Unknown,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportStatus {
    Untouched,
    FloppedAtThisWall,
    DualSide,
}

impl TransportStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TransportStatus::Untouched => "Untouched",
            TransportStatus::FloppedAtThisWall => "FloppedAtThisWall",
            TransportStatus::DualSide => "DualSide",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportState {
    pub model_label: String,
    pub components: Vec<(ComponentName, TransportStatus)>,
    pub signs: BTreeMap<ComponentName, Sign>,
    pub component_count: usize,
}

#[derive(Debug, Clone)]
struct Descriptor {
    name: ComponentName,
    dim: i64,
    contained_in_delta: bool,
    /// Wall whose flop center is exactly this component.
    center_of: Option<(i64, i64)>,
    status: TransportStatus,
    sign: Sign,
}

/// Transport of `Σ` and `Ω` from `M` to `M_last`.
///
/// Rules, applied wall by wall:
/// 1. A flop center lies inside the strict transform of `Δ`, so a
///    component not contained in `Δ` is carried over unchanged.
/// 2. A component that is the flop center (`Σ`, the zero section, at
///    `(0, −1)`) is replaced by its dual-side transform, which is no longer
///    contained in `Δ`; its sign is multiplied by `(−1)^m`.
/// 3. Any other situation is outside the rules and reported as an error.
pub fn flip_transport(ctx: &GenusContext) -> Result<Vec<TransportState>> {
    ctx.require("flip_transport", Divisibility::Div2)?;
    let walls = enumerate_walls_div2(ctx)?;
    let ledger = ledger_div2(ctx)?;
    let chain = model_chain(ctx);
    let labels: Vec<String> = chain.model_nodes().map(|n| n.label()).collect();
    let g = ctx.g();

    let mut comps = vec![
        Descriptor {
            name: ComponentName::Sigma,
            dim: g,
            contained_in_delta: true,
            center_of: Some((0, -1)),
            status: TransportStatus::Untouched,
            sign: Sign::Trivial,
        },
        Descriptor {
            name: ComponentName::Omega,
            dim: g,
            contained_in_delta: false,
            center_of: None,
            status: TransportStatus::Untouched,
            sign: Sign::Trivial,
        },
    ];

    let snapshot = |label: &str, comps: &[Descriptor]| TransportState {
        model_label: label.to_string(),
        components: comps.iter().map(|c| (c.name, c.status)).collect(),
        signs: comps.iter().map(|c| (c.name, c.sign)).collect(),
        component_count: comps.len(),
    };

    let mut states = vec![snapshot(&labels[0], &comps)];
    for (i, wall) in walls.walls.iter().enumerate() {
        for comp in comps.iter_mut() {
            if comp.status == TransportStatus::FloppedAtThisWall {
                comp.status = TransportStatus::DualSide;
            }
            if !comp.contained_in_delta {
                continue;
            }
            if comp.center_of == Some(wall.indices()) {
                if comp.dim != wall.center_dim() {
                    return Err(Error::Domain(format!(
                        "{} has dimension {} but the center of ({},{}) has dimension {}",
                        comp.name,
                        comp.dim,
                        wall.c,
                        wall.d,
                        wall.center_dim()
                    )));
                }
                comp.status = TransportStatus::FloppedAtThisWall;
                comp.contained_in_delta = false;
                if ledger.m_is_odd {
                    comp.sign = comp.sign.flipped();
                }
            } else {
                return Err(Error::Domain(format!(
                    "no transport rule for {} inside Δ at wall ({},{})",
                    comp.name, wall.c, wall.d
                )));
            }
        }
        states.push(snapshot(&labels[i + 1], &comps));
    }
    Ok(states)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizationReport {
    pub per_model: Vec<(String, BTreeMap<ComponentName, Sign>)>,
    pub final_signs: BTreeMap<ComponentName, Sign>,
    pub sign_changes: usize,
    /// Whether the images of the surviving components are disjoint in `M̄`.
    pub disjoint_in_mbar: bool,
    /// Connected components of the fixed locus on `M̄`.
    pub main_theorem_count: u32,
}

pub fn linearization_signs(ctx: &GenusContext) -> LinearizationReport {
    match ctx.case() {
        Divisibility::Div1 => {
            let signs = BTreeMap::from([
                (ComponentName::SPlus, Sign::Unset),
                (ComponentName::SMinus, Sign::Unset),
            ]);
            // S⁻ drops dimension under φ; S⁺ is the only g-dimensional image.
            LinearizationReport {
                per_model: vec![("M".into(), signs.clone())],
                final_signs: signs,
                sign_changes: 0,
                disjoint_in_mbar: true,
                main_theorem_count: 1,
            }
        }
        Divisibility::Div2 => {
            let states = flip_transport(ctx).expect("transport rules cover divisibility 2");
            let sign_changes = states
                .windows(2)
                .map(|w| {
                    w[0].signs
                        .iter()
                        .filter(|(name, s)| w[1].signs[*name] != **s)
                        .count()
                })
                .sum();
            let final_signs = states.last().expect("non-empty").signs.clone();
            // L_last = φ*(L̄): a common point of Σ̄ and Ω̄ would carry both
            // characters at once.
            let disjoint = final_signs[&ComponentName::Sigma] != final_signs[&ComponentName::Omega];
            LinearizationReport {
                per_model: states
                    .into_iter()
                    .map(|s| (s.model_label, s.signs))
                    .collect(),
                final_signs,
                sign_changes,
                disjoint_in_mbar: disjoint,
                main_theorem_count: if disjoint { 2 } else { 1 },
            }
        }
    }
}

/// `main_theorem_count` and `div(λ)` side by side.
pub fn main_theorem_check(ctx: &GenusContext) -> (u32, BigInt) {
    let count = linearization_signs(ctx).main_theorem_count;
    let div = divisibility(&canonical_classes(ctx).lambda, ctx).expect("λ ∈ v⊥");
    (count, div)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(g: u64, case: Divisibility) -> GenusContext {
        GenusContext::new(g, case).unwrap()
    }

    #[test]
    fn component_examples() {
        let c = components(&ctx(5, Divisibility::Div1));
        let minus = c.iter().find(|x| x.name == ComponentName::SMinus).unwrap();
        assert_eq!(minus.image_dim_after_contraction, 4);
        assert!(minus.contained_in_delta);

        let c = components(&ctx(4, Divisibility::Div2));
        assert!(c[0].contained_in_delta);
        assert_eq!(c[0].sign, Sign::Det);

        let c = components(&ctx(8, Divisibility::Div2));
        assert_eq!(c[1].name, ComponentName::Omega);
        assert!(!c[1].contained_in_delta);
        assert_eq!(c[1].sign, Sign::Trivial);
    }

    #[test]
    fn fiber_count_examples() {
        assert_eq!(two_torsion_counts(2).1, BigUint::from(15u32));
        assert_eq!(two_torsion_counts(1).1, BigUint::from(3u32));
        let (even, odd) = theta_characteristic_counts(2);
        assert_eq!((even, odd), (BigUint::from(10u32), BigUint::from(6u32)));

        for g in [4u64, 8, 64] {
            let counts = fiber_counts(&ctx(g, Divisibility::Div2));
            let total: BigUint = counts.values().sum();
            assert_eq!(total, pow2(2 * g));
        }
        for g in [2u64, 3, 100] {
            let counts = fiber_counts(&ctx(g, Divisibility::Div1));
            let total: BigUint = counts.values().sum();
            assert_eq!(total, pow2(2 * g));
        }
    }

    #[test]
    fn theta_counts_match_arf_census() {
        for g in 1..=5u32 {
            let (even, odd) = arf_census(g).unwrap();
            let (e, o) = theta_characteristic_counts(u64::from(g));
            assert_eq!((BigUint::from(even), BigUint::from(odd)), (e, o));
        }
    }

    #[test]
    fn standard_flip_examples() {
        assert_eq!(
            standard_flip(3, 1, 0),
            Ok(FlipDims {
                gamma_dim: 0,
                gamma_prime_dim: 1
            })
        );
        assert_eq!(
            standard_flip(3, 1, 4),
            Ok(FlipDims {
                gamma_dim: 4,
                gamma_prime_dim: 5
            })
        );
        assert_eq!(
            standard_flip(7, 1, 4),
            Ok(FlipDims {
                gamma_dim: 4,
                gamma_prime_dim: 9
            })
        );
        assert!(standard_flip(1, 1, 0).is_err());
        assert!(standard_flip(3, 3, 0).is_err());
        assert!(standard_flip(3, 0, 0).is_err());
        assert!(standard_flip(3, 1, -1).is_err());
    }

    #[test]
    fn known_fiber_actions_fill_the_fibers() {
        for g in [4, 8] {
            let c = ctx(g, Divisibility::Div2);
            for w in enumerate_walls_div2(&c).unwrap().walls {
                match fiber_action(&c, &w) {
                    FiberAction::Split(p, q) => assert_eq!(p + q, w.fiber_proj_dim + 1),
                    FiberAction::Trivial => assert_eq!((w.c, w.d), (0, -1)),
                    FiberAction::Unknown => panic!("g={g} ({},{}) should be known", w.c, w.d),
                }
            }
        }
        let c = ctx(12, Divisibility::Div2);
        let last = enumerate_walls_div2(&c).unwrap().walls.pop().unwrap();
        assert_eq!(fiber_action(&c, &last), FiberAction::Unknown);
    }

    #[test]
    fn transport_examples() {
        let s = flip_transport(&ctx(4, Divisibility::Div2)).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.last().unwrap().component_count, 2);
        assert_eq!(s[0].model_label, "M_{0,-1}");
        assert_eq!(s[2].model_label, "M_last");

        let s = flip_transport(&ctx(8, Divisibility::Div2)).unwrap();
        assert_eq!(s.len(), 4);
        let sigma: Vec<_> = s.iter().map(|x| x.components[0].1).collect();
        assert_eq!(
            sigma,
            vec![
                TransportStatus::Untouched,
                TransportStatus::FloppedAtThisWall,
                TransportStatus::DualSide,
                TransportStatus::DualSide
            ]
        );
        assert!(s
            .iter()
            .all(|x| x.components[1].1 == TransportStatus::Untouched));

        let s = flip_transport(&ctx(12, Divisibility::Div2)).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.iter().all(|x| x.component_count == 2));

        assert!(flip_transport(&ctx(12, Divisibility::Div1)).is_err());
    }

    #[test]
    fn linearization_examples() {
        let r = linearization_signs(&ctx(4, Divisibility::Div2));
        assert_eq!(r.final_signs[&ComponentName::Sigma], Sign::Det);
        assert_eq!(r.final_signs[&ComponentName::Omega], Sign::Trivial);
        assert!(r.disjoint_in_mbar);
        assert_eq!(r.main_theorem_count, 2);

        let r = linearization_signs(&ctx(8, Divisibility::Div2));
        assert_eq!(r.sign_changes, 1);
        assert_eq!(r.per_model[0].1[&ComponentName::Sigma], Sign::Trivial);
        assert_eq!(r.per_model[1].1[&ComponentName::Sigma], Sign::Det);

        let r = linearization_signs(&ctx(3, Divisibility::Div1));
        assert_eq!(r.main_theorem_count, 1);
    }

    #[test]
    fn main_theorem_matches_divisibility() {
        for c in GenusContext::admissible_up_to(60) {
            let (count, div) = main_theorem_check(&c);
            assert_eq!(BigInt::from(count), div, "g={} {}", c.genus(), c.case());
        }
    }
}
