//! Walls of the movable cone and the chain of birational models.
//!
//! In divisibility 1 the nef and movable cones coincide and the only
//! candidate wall classes are `±δ`. In divisibility 2 the walls are
//! indexed by pairs `(c, d)` with `c ≥ 0`, `d ≥ −1`,
//!
//! ```text
//! (a) 4d + (2c+1)² ≤ g − 1
//! (b) ((g−1)c² − d) / (2c+1) ∈ Z
//! ```
//!
//! with slope `μ = (g − 1 − 4d − (2c+1)²) / (2(2c+1)²)` and wall class
//! `a = (2c+1, −c·h, ((g−1)c² − d)/(2c+1))`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::lattice::{canonical_classes, pairing, square, Divisibility, GenusContext, MukaiVector};

/// One wall of `Mov(M)` in the divisibility 2 case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallDatum {
    pub c: i64,
    pub d: i64,
    pub slope: BigRational,
    /// `a_{c,d}`.
    pub wall_vector: MukaiVector,
    /// `v − a_{c,d}`.
    pub complement_vector: MukaiVector,
    /// Dimension of each factor of the flop center `M(a) × M(v − a)`.
    pub center_factor_dim: i64,
    /// Dimension of the projective fibers of the flopped bundle.
    pub fiber_proj_dim: i64,
}

impl WallDatum {
    pub fn indices(&self) -> (i64, i64) {
        (self.c, self.d)
    }

    /// Dimension of the flop center `P(V)` over `M(a) × M(v − a)`.
    pub fn center_dim(&self) -> i64 {
        2 * self.center_factor_dim + self.fiber_proj_dim
    }
}

/// Two walls with the same slope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeTie {
    pub first: (i64, i64),
    pub second: (i64, i64),
    pub slope: BigRational,
}

impl fmt::Display for SlopeTie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "walls ({},{}) and ({},{}) share slope {}; ordered lexicographically, no chamber separates them",
            self.first.0, self.first.1, self.second.0, self.second.1, self.slope
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallList {
    /// Sorted by slope, descending; ties broken by `(c, d)` ascending.
    pub walls: Vec<WallDatum>,
    pub ties: Vec<SlopeTie>,
}

impl WallList {
    pub fn indices(&self) -> Vec<(i64, i64)> {
        self.walls.iter().map(WallDatum::indices).collect()
    }

    pub fn diagnostics(&self) -> Vec<String> {
        self.ties.iter().map(|t| t.to_string()).collect()
    }
}

/// `μ_{c,d}` as an exact fraction. Negative when condition (a) fails.
pub fn wall_slope(c: i64, d: i64, genus: u64) -> BigRational {
    let odd = BigInt::from(2 * c + 1);
    let odd_sq = &odd * &odd;
    let num = BigInt::from(genus) - 1u32 - BigInt::from(4 * d) - &odd_sq;
    BigRational::new(num, BigInt::from(2) * odd_sq)
}

/// `a_{c,d}`, or `None` when condition (b) fails.
pub fn wall_vector(c: i64, d: i64, genus: u64) -> Option<MukaiVector> {
    let odd = BigInt::from(2 * c + 1);
    let c_big = BigInt::from(c);
    let num = (BigInt::from(genus) - 1u32) * &c_big * &c_big - d;
    let (s, rem) = num.div_rem(&odd);
    rem.is_zero().then(|| MukaiVector::new(odd, -c_big, s))
}

/// The wall conditions for a single class `a`: `a ≠ 0`, `a² ≥ −2` and
/// `0 ≤ (a, v) ≤ v²/2`.
pub fn is_wall_class(a: &MukaiVector, ctx: &GenusContext) -> bool {
    if a.is_zero() {
        return false;
    }
    let v = ctx.mukai_vector();
    let av = pairing(a, &v, ctx);
    square(a, ctx) >= BigInt::from(-2)
        && !av.is_negative()
        && BigInt::from(2) * av <= square(&v, ctx)
}

/// Candidate wall classes in the hyperbolic plane `Zδ + Zv` (divisibility
/// 1). The Gram matrix there is `diag(−2, 2g−2)`, so the constraints read
/// `0 ≤ y(2g−2) ≤ g−1` and `−2x² + (2g−2)y² ≥ −2`.
pub fn hyperbolic_scan_div1(ctx: &GenusContext) -> Result<Vec<MukaiVector>> {
    ctx.require("hyperbolic_scan_div1", Divisibility::Div1)?;
    let classes = canonical_classes(ctx);
    let h2 = ctx.h_square();
    let half_v2 = BigInt::from(ctx.genus()) - 1u32;
    let mut found = Vec::new();
    // 0 ≤ y·h² ≤ g − 1
    let y_max = half_v2.div_floor(h2);
    let mut y = BigInt::zero();
    while y <= y_max {
        // x² ≤ 1 + (g − 1)·y²
        let bound = BigInt::one() + &half_v2 * &y * &y;
        let x_max = bound.sqrt();
        let mut x = x_max.clone();
        while x >= -&x_max {
            let a = &classes.delta.scale(&x) + &classes.v.scale(&y);
            if is_wall_class(&a, ctx) {
                found.push(a);
            }
            x -= 1u32;
        }
        y += 1u32;
    }
    Ok(found)
}

/// All walls `(c, d)` of the movable cone in divisibility 2.
pub fn enumerate_walls_div2(ctx: &GenusContext) -> Result<WallList> {
    ctx.require("enumerate_walls_div2", Divisibility::Div2)?;
    let g = ctx.g();
    let v = ctx.mukai_vector();
    let mut walls = Vec::new();
    // d ≥ −1 in (a) gives (2c+1)² ≤ g + 3.
    let mut c = 0i64;
    while (2 * c + 1) * (2 * c + 1) <= g + 3 {
        let odd_sq = (2 * c + 1) * (2 * c + 1);
        let d_max = (g - 1 - odd_sq).div_euclid(4);
        for d in -1..=d_max {
            let Some(a) = wall_vector(c, d, ctx.genus()) else {
                continue;
            };
            let complement = &v - &a;
            let fiber_proj_dim = pairing(&a, &complement, ctx) - 1u32;
            walls.push(WallDatum {
                c,
                d,
                slope: wall_slope(c, d, ctx.genus()),
                complement_vector: complement,
                wall_vector: a,
                center_factor_dim: 2 * d + 2,
                fiber_proj_dim: i64::try_from(fiber_proj_dim).expect("bounded by g"),
            });
        }
        c += 1;
    }
    walls.sort_by(|x, y| {
        y.slope
            .cmp(&x.slope)
            .then_with(|| x.indices().cmp(&y.indices()))
    });
    let ties = walls
        .windows(2)
        .filter(|w| w[0].slope == w[1].slope)
        .map(|w| SlopeTie {
            first: w[0].indices(),
            second: w[1].indices(),
            slope: w[0].slope.clone(),
        })
        .collect();
    Ok(WallList { walls, ties })
}

/// Primitive integral generator of the ray `λ + μ·f`.
pub fn cleared_ray(lambda: &MukaiVector, f: &MukaiVector, slope: &BigRational) -> MukaiVector {
    let q = slope.denom();
    let p = slope.numer();
    (&lambda.scale(q) + &f.scale(p)).primitive()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovableNef {
    pub movable_rays: [MukaiVector; 2],
    pub nef_rays_of_m: [MukaiVector; 2],
    /// Primitive generators of the interior walls, in wall order.
    pub interior_wall_rays: Vec<MukaiVector>,
}

pub fn movable_nef(ctx: &GenusContext) -> MovableNef {
    let cl = canonical_classes(ctx);
    let movable_rays = [cl.f.clone(), cl.lambda.clone()];
    match ctx.case() {
        Divisibility::Div1 => MovableNef {
            nef_rays_of_m: movable_rays.clone(),
            movable_rays,
            interior_wall_rays: Vec::new(),
        },
        Divisibility::Div2 => {
            let walls = enumerate_walls_div2(ctx).expect("case checked");
            let interior_wall_rays: Vec<_> = walls
                .walls
                .iter()
                .map(|w| cleared_ray(&cl.lambda, &cl.f, &w.slope))
                .collect();
            MovableNef {
                nef_rays_of_m: [cl.f.clone(), interior_wall_rays[0].clone()],
                movable_rays,
                interior_wall_rays,
            }
        }
    }
}

/// A totally semistable wall on the relevant path would need a spherical
/// class `R` with `(v(R), v) < 0` that is a multiple of `1 − g` and still
/// equal to `1` in the decomposition of `v`; impossible once `g − 1 ∤ 1`.
pub fn totally_semistable_guard(ctx: &GenusContext) -> Result<bool> {
    ctx.require("totally_semistable_guard", Divisibility::Div2)?;
    let gm1 = ctx.genus_big() - 1u32;
    Ok(!BigInt::one().is_multiple_of(&gm1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelNode {
    /// `M_{c,d}`, the model on which the wall `(c, d)` is crossed next.
    Model { c: i64, d: i64 },
    /// The last model, carrying the divisorial contraction.
    Last,
    /// `M` itself when there are no flops.
    Single,
    /// `M̄`.
    Contracted,
    /// The base `P^g` of the Lagrangian fibration.
    Base { genus: u64 },
}

impl ModelNode {
    pub fn label(&self) -> String {
        match self {
            ModelNode::Model { c, d } => format!("M_{{{c},{d}}}"),
            ModelNode::Last => "M_last".into(),
            ModelNode::Single => "M".into(),
            ModelNode::Contracted => "Mbar".into(),
            ModelNode::Base { genus } => format!("P^{genus}"),
        }
    }

    pub fn dot_id(&self) -> String {
        fn spell(x: i64) -> String {
            if x < 0 {
                format!("m{}", -x)
            } else {
                x.to_string()
            }
        }
        match self {
            ModelNode::Model { c, d } => format!("M_{}_{}", spell(*c), spell(*d)),
            ModelNode::Last => "M_last".into(),
            ModelNode::Single => "M".into(),
            ModelNode::Contracted => "Mbar".into(),
            ModelNode::Base { .. } => "Pg".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Flop,
    Fibration,
    DivisorialContraction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelChain {
    pub nodes: Vec<ModelNode>,
    pub edges: Vec<ChainEdge>,
}

impl ModelChain {
    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    /// Nodes that are birational models of `M` (everything except `P^g`
    /// and `M̄`).
    pub fn model_nodes(&self) -> impl Iterator<Item = &ModelNode> {
        self.nodes.iter().filter(|n| {
            matches!(
                n,
                ModelNode::Model { .. } | ModelNode::Last | ModelNode::Single
            )
        })
    }
}

pub fn model_chain(ctx: &GenusContext) -> ModelChain {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    match ctx.case() {
        Divisibility::Div1 => {
            nodes.push(ModelNode::Single);
        }
        Divisibility::Div2 => {
            let walls = enumerate_walls_div2(ctx).expect("case checked");
            for w in &walls.walls {
                nodes.push(ModelNode::Model { c: w.c, d: w.d });
            }
            nodes.push(ModelNode::Last);
            for (i, w) in walls.walls.iter().enumerate() {
                edges.push(ChainEdge {
                    from: i,
                    to: i + 1,
                    kind: EdgeKind::Flop,
                    label: format!("f_{{{},{}}}", w.c, w.d),
                });
            }
        }
    }
    let last = nodes.len() - 1;
    nodes.push(ModelNode::Base { genus: ctx.genus() });
    nodes.push(ModelNode::Contracted);
    edges.push(ChainEdge {
        from: 0,
        to: last + 1,
        kind: EdgeKind::Fibration,
        label: "pi".into(),
    });
    edges.push(ChainEdge {
        from: last,
        to: last + 2,
        kind: EdgeKind::DivisorialContraction,
        label: "phi".into(),
    });
    ModelChain { nodes, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn div2(g: u64) -> GenusContext {
        GenusContext::new(g, Divisibility::Div2).unwrap()
    }

    fn div1(g: u64) -> GenusContext {
        GenusContext::new(g, Divisibility::Div1).unwrap()
    }

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn hyperbolic_scan_examples() {
        for g in [2, 5, 100] {
            assert_eq!(
                hyperbolic_scan_div1(&div1(g)).unwrap(),
                vec![MukaiVector::new(1, 0, 1), MukaiVector::new(-1, 0, -1)]
            );
        }
        assert!(matches!(
            hyperbolic_scan_div1(&div2(4)),
            Err(Error::WrongCase { .. })
        ));
    }

    #[test]
    fn walls_genus_4() {
        let w = enumerate_walls_div2(&div2(4)).unwrap();
        assert_eq!(w.indices(), vec![(0, -1), (0, 0)]);
        assert_eq!(w.walls[0].slope, q(3, 1));
        assert_eq!(w.walls[0].wall_vector, MukaiVector::new(1, 0, 1));
        assert_eq!(w.walls[1].slope, q(1, 1));
        assert_eq!(w.walls[1].wall_vector, MukaiVector::new(1, 0, 0));
        assert_eq!(w.walls[1].fiber_proj_dim, 2);
        assert!(w.ties.is_empty());
    }

    #[test]
    fn walls_genus_8_and_12() {
        let w = enumerate_walls_div2(&div2(8)).unwrap();
        assert_eq!(w.indices(), vec![(0, -1), (0, 0), (0, 1)]);
        assert_eq!(w.walls[2].wall_vector, MukaiVector::new(1, 0, -1));
        let dims: Vec<_> = w.walls.iter().map(|x| x.fiber_proj_dim).collect();
        assert_eq!(dims, vec![8, 6, 4]);

        let w = enumerate_walls_div2(&div2(12)).unwrap();
        assert_eq!(w.indices(), vec![(0, -1), (0, 0), (0, 1), (0, 2), (1, -1)]);
        assert_eq!(w.walls[4].wall_vector, MukaiVector::new(3, -1, 4));
        assert_eq!(w.walls[4].slope, q(1, 3));
    }

    #[test]
    fn first_tie_appears_at_genus_24() {
        for g in (4..24).step_by(4) {
            assert!(enumerate_walls_div2(&div2(g)).unwrap().ties.is_empty());
        }
        let w = enumerate_walls_div2(&div2(24)).unwrap();
        assert_eq!(
            w.ties,
            vec![SlopeTie {
                first: (0, 5),
                second: (1, -1),
                slope: q(1, 1)
            }]
        );
        assert_eq!(w.diagnostics().len(), 1);
    }

    #[test]
    fn wrong_case_is_rejected() {
        assert!(enumerate_walls_div2(&div1(8)).is_err());
        assert!(totally_semistable_guard(&div1(8)).is_err());
    }

    #[test]
    fn movable_nef_examples() {
        let m = movable_nef(&div1(7));
        assert_eq!(
            m.nef_rays_of_m,
            [MukaiVector::new(0, 0, -1), MukaiVector::new(1, 0, -1)]
        );
        assert!(m.interior_wall_rays.is_empty());

        // λ + 3f = (2,−1,−2), λ + f = (2,−1,0)
        let m = movable_nef(&div2(4));
        assert_eq!(
            m.interior_wall_rays,
            vec![MukaiVector::new(2, -1, -2), MukaiVector::new(2, -1, 0)]
        );

        let m = movable_nef(&div2(8));
        assert_eq!(m.nef_rays_of_m[1], m.interior_wall_rays[0]);

        // μ = 1/3 at g = 12: 3λ + f = (6,−3,14) is primitive.
        let m = movable_nef(&div2(12));
        assert_eq!(m.interior_wall_rays[4], MukaiVector::new(6, -3, 14));
    }

    #[test]
    fn interior_rays_are_orthogonal_to_their_walls() {
        for g in (4..=80).step_by(4) {
            let ctx = div2(g);
            let walls = enumerate_walls_div2(&ctx).unwrap();
            let m = movable_nef(&ctx);
            for (w, ray) in walls.walls.iter().zip(&m.interior_wall_rays) {
                assert!(pairing(ray, &w.wall_vector, &ctx).is_zero());
            }
        }
    }

    #[test]
    fn totally_semistable_guard_holds() {
        for g in [4, 8, 12, 400] {
            assert_eq!(totally_semistable_guard(&div2(g)), Ok(true));
        }
        assert!(GenusContext::new(2, Divisibility::Div2).is_err());
    }

    #[test]
    fn chains() {
        let c = model_chain(&div2(4));
        assert_eq!(c.model_nodes().count(), 3);
        assert_eq!(c.count(EdgeKind::Flop), 2);
        assert_eq!(c.count(EdgeKind::Fibration), 1);
        assert_eq!(c.count(EdgeKind::DivisorialContraction), 1);

        let c = model_chain(&div2(8));
        assert_eq!(c.model_nodes().count(), 4);
        assert_eq!(c.count(EdgeKind::Flop), 3);
        assert_eq!(c.edges[2].label, "f_{0,1}");

        for g in [2, 3, 9] {
            let c = model_chain(&div1(g));
            assert_eq!(c.count(EdgeKind::Flop), 0);
            assert_eq!(c.count(EdgeKind::Fibration), 1);
            assert_eq!(c.count(EdgeKind::DivisorialContraction), 1);
        }
    }

    #[test]
    fn dot_ids() {
        assert_eq!(ModelNode::Model { c: 0, d: -1 }.dot_id(), "M_0_m1");
        assert_eq!(ModelNode::Model { c: 1, d: 2 }.dot_id(), "M_1_2");
        assert_eq!(ModelNode::Base { genus: 8 }.label(), "P^8");
    }
}
