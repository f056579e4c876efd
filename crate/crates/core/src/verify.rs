//! Aggregate verification: an invariant sweep over every admissible
//! `(g, divisibility)` up to a bound, plus a table of pinned values.
//!
//! Each pin is recomputed from the library and compared with its expected
//! integer list. [`mutate_pin`] perturbs one expected value so that the
//! suite can be checked to fail.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fixed::{
    arf_census, components, fiber_counts, flip_transport, linearization_signs, main_theorem_check,
    standard_flip, theta_characteristic_counts, ComponentName, Sign, TransportStatus,
};
use crate::lattice::{
    canonical_classes, determinant, divisibility, invariant_lattice, pairing, signature, square,
    standard_gram, ClassKind, Divisibility, GenusContext, MukaiVector,
};
use crate::report::{emit_chain_dot, emit_json, ReportBundle, Section};
use crate::strata::{contraction_datum, first_flop_degree, ledger_div2, strata};
use crate::walls::{
    cleared_ray, enumerate_walls_div2, hyperbolic_scan_div1, is_wall_class, model_chain,
    movable_nef, EdgeKind,
};

/// Largest genus for which the Arf oracle runs inside `verify`.
pub const VERIFY_ARF_GENUS: u32 = 4;

#[derive(Debug, Clone)]
pub struct Pin {
    pub id: &'static str,
    pub expected: Vec<i64>,
    compute: fn() -> Result<Vec<i64>>,
}

impl Pin {
    pub fn actual(&self) -> Result<Vec<i64>> {
        (self.compute)()
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub contexts_checked: usize,
    pub checks_run: usize,
    pub pins_checked: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Checker<'a> {
    report: &'a mut VerifyReport,
    prefix: String,
}

impl Checker<'_> {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.report.checks_run += 1;
        if !ok {
            let msg = format!("{}: {}", self.prefix, what());
            self.report.failures.push(msg);
        }
    }

    fn fail(&mut self, msg: String) {
        self.report.checks_run += 1;
        self.report.failures.push(format!("{}: {msg}", self.prefix));
    }
}

fn ctx(g: u64, case: Divisibility) -> Result<GenusContext> {
    GenusContext::new(g, case)
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Domain(format!("{x} does not fit a pinned value")))
}

fn flatten(vs: &[MukaiVector]) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(3 * vs.len());
    for v in vs {
        for x in v.components() {
            out.push(to_i64(x)?);
        }
    }
    Ok(out)
}

fn wall_indices(g: u64) -> Result<Vec<i64>> {
    let list = enumerate_walls_div2(&ctx(g, Divisibility::Div2)?)?;
    Ok(list
        .indices()
        .into_iter()
        .flat_map(|(c, d)| [c, d])
        .collect())
}

fn wall_vectors(g: u64) -> Result<Vec<i64>> {
    let list = enumerate_walls_div2(&ctx(g, Divisibility::Div2)?)?;
    let vs: Vec<_> = list.walls.into_iter().map(|w| w.wall_vector).collect();
    flatten(&vs)
}

fn find_wall(g: u64, c: i64, d: i64) -> Result<crate::walls::WallDatum> {
    enumerate_walls_div2(&ctx(g, Divisibility::Div2)?)?
        .walls
        .into_iter()
        .find(|w| w.indices() == (c, d))
        .ok_or_else(|| Error::Domain(format!("no wall ({c},{d}) at g={g}")))
}

fn slopes(g: u64) -> Result<Vec<i64>> {
    let list = enumerate_walls_div2(&ctx(g, Divisibility::Div2)?)?;
    let mut out = Vec::new();
    for w in &list.walls {
        out.push(to_i64(w.slope.numer())?);
        out.push(to_i64(w.slope.denom())?);
    }
    Ok(out)
}

fn classes(g: u64, case: Divisibility) -> Result<Vec<i64>> {
    let cl = canonical_classes(&ctx(g, case)?);
    let mut vs = vec![cl.v, cl.f, cl.delta, cl.lambda];
    vs.extend(cl.a);
    flatten(&vs)
}

fn invariant_gram(g: u64, case: Divisibility) -> Result<Vec<i64>> {
    let lat = invariant_lattice(&ctx(g, case)?);
    lat.gram.iter().flatten().map(to_i64).collect()
}

fn ledger(g: u64) -> Result<Vec<i64>> {
    let l = ledger_div2(&ctx(g, Divisibility::Div2)?)?;
    [
        &l.h0_a_dual,
        &l.point_count_r,
        &l.mult_sigma_delta,
        &l.delta_dot_gamma,
        &l.m_degree,
    ]
    .into_iter()
    .map(to_i64)
    .chain(std::iter::once(Ok(i64::from(l.m_is_odd))))
    .collect()
}

fn strata_dims(g: u64, case: Divisibility) -> Result<Vec<i64>> {
    Ok(strata(&ctx(g, case)?)
        .into_iter()
        .flat_map(|s| [s.base_dim, s.total_dim])
        .collect())
}

fn arf(g: u32) -> Result<Vec<i64>> {
    let (e, o) = arf_census(g)?;
    Ok(vec![e as i64, o as i64])
}

fn counts(g: u64, case: Divisibility) -> Result<Vec<i64>> {
    fiber_counts(&ctx(g, case)?)
        .values()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::Domain(format!("{x} does not fit a pinned value")))
        })
        .collect()
}

fn sign_code(s: Sign) -> i64 {
    match s {
        Sign::Trivial => 0,
        Sign::Det => 1,
        Sign::Unset => -1,
    }
}

fn final_signs(g: u64) -> Result<Vec<i64>> {
    let rep = linearization_signs(&ctx(g, Divisibility::Div2)?);
    Ok(rep.final_signs.values().map(|s| sign_code(*s)).collect())
}

fn flop_counts() -> Result<Vec<i64>> {
    [
        (4, Divisibility::Div2),
        (8, Divisibility::Div2),
        (5, Divisibility::Div1),
    ]
    .into_iter()
    .map(|(g, case)| Ok(model_chain(&ctx(g, case)?).count(EdgeKind::Flop) as i64))
    .collect()
}

fn main_theorem_counts() -> Result<Vec<i64>> {
    [
        (3, Divisibility::Div1),
        (5, Divisibility::Div1),
        (4, Divisibility::Div2),
        (8, Divisibility::Div2),
    ]
    .into_iter()
    .map(|(g, case)| Ok(i64::from(main_theorem_check(&ctx(g, case)?).0)))
    .collect()
}

fn lambda_divisibilities() -> Result<Vec<i64>> {
    [(5, Divisibility::Div1), (8, Divisibility::Div2)]
        .into_iter()
        .map(|(g, case)| {
            let c = ctx(g, case)?;
            to_i64(&divisibility(&canonical_classes(&c).lambda, &c)?)
        })
        .collect()
}

/// The pinned expected-value table.
pub fn pinned_table() -> Vec<Pin> {
    macro_rules! pin {
        ($id:literal, [$($e:expr),* $(,)?], $f:expr) => {
            Pin { id: $id, expected: vec![$($e),*], compute: $f }
        };
    }
    use Divisibility::{Div1, Div2};
    vec![
        pin!("walls.g4.indices", [0, -1, 0, 0], || wall_indices(4)),
        pin!("walls.g4.vectors", [1, 0, 1, 1, 0, 0], || wall_vectors(4)),
        pin!("walls.g4.slopes", [3, 1, 1, 1], || slopes(4)),
        pin!("walls.g8.indices", [0, -1, 0, 0, 0, 1], || wall_indices(8)),
        pin!("walls.g8.a_0_1", [1, 0, -1], || {
            flatten(&[find_wall(8, 0, 1)?.wall_vector])
        }),
        pin!("walls.g12.count", [5], || Ok(vec![
            wall_indices(12)?.len() as i64 / 2
        ])),
        pin!("walls.g12.a_1_m1", [3, -1, 4], || {
            flatten(&[find_wall(12, 1, -1)?.wall_vector])
        }),
        pin!("walls.g12.slope_1_m1", [1, 3], || {
            let w = find_wall(12, 1, -1)?;
            Ok(vec![to_i64(w.slope.numer())?, to_i64(w.slope.denom())?])
        }),
        pin!("walls.g24.tie", [0, 5, 1, -1], || {
            let list = enumerate_walls_div2(&ctx(24, Div2)?)?;
            Ok(list
                .ties
                .iter()
                .flat_map(|t| [t.first.0, t.first.1, t.second.0, t.second.1])
                .collect())
        }),
        pin!("walls.g4.fiber_proj_dims", [4, 2], || {
            let list = enumerate_walls_div2(&ctx(4, Div2)?)?;
            Ok(list.walls.iter().map(|w| w.fiber_proj_dim).collect())
        }),
        pin!("walls.g8.fiber_proj_dims", [8, 6, 4], || {
            let list = enumerate_walls_div2(&ctx(8, Div2)?)?;
            Ok(list.walls.iter().map(|w| w.fiber_proj_dim).collect())
        }),
        pin!("walls.g8.center_factor_dims", [0, 2, 4], || {
            let list = enumerate_walls_div2(&ctx(8, Div2)?)?;
            Ok(list.walls.iter().map(|w| w.center_factor_dim).collect())
        }),
        pin!("walls.g4.interior_rays", [2, -1, -2, 2, -1, 0], || {
            flatten(&movable_nef(&ctx(4, Div2)?).interior_wall_rays)
        }),
        pin!("scan.div1.g4", [1, 0, 1, -1, 0, -1], || {
            flatten(&hyperbolic_scan_div1(&ctx(4, Div1)?)?)
        }),
        pin!(
            "classes.div1.g4",
            [0, 1, 0, 0, 0, -1, 1, 0, 1, 1, 0, -1],
            || { classes(4, Div1) }
        ),
        pin!(
            "classes.div2.g4",
            [0, 1, -3, 0, 0, -1, 2, -1, 2, 2, -1, 1, 2, -1, 2],
            || classes(4, Div2)
        ),
        pin!("gram.div1.g4", [0, -1, -1, 0], || invariant_gram(4, Div1)),
        pin!("gram.div2.g4", [6, -2, -2, 0], || invariant_gram(4, Div2)),
        pin!("gram.div2.g8.lambda_coordinates", [1, 3], || {
            let c = ctx(8, Div2)?;
            let (x, y) = invariant_lattice(&c)
                .coordinates(&canonical_classes(&c).lambda)
                .ok_or_else(|| Error::Domain("lambda outside the lattice".into()))?;
            Ok(vec![to_i64(&x)?, to_i64(&y)?])
        }),
        pin!("divisibility.lambda", [1, 2], lambda_divisibilities),
        pin!("ledger.g4", [4, 2, 4, -4, -3, 1], || ledger(4)),
        pin!("ledger.g8", [6, 3, 6, -6, -5, 1], || ledger(8)),
        pin!("ledger.g48.m", [-25], || Ok(vec![ledger(48)?[4]])),
        pin!("ledger.g6.first_flop_degree", [-4, 0], || {
            let (m, odd) = first_flop_degree(6)?;
            Ok(vec![to_i64(&m)?, i64::from(odd)])
        }),
        pin!("strata.div1.g4", [6, 7, 0, 4], || strata_dims(4, Div1)),
        pin!("strata.div2.g8", [14, 15, 8, 12], || strata_dims(8, Div2)),
        pin!("strata.div1.g4.b_2", [-2, 1, -2], || {
            flatten(&[strata(&ctx(4, Div1)?)[1].b_k.clone()])
        }),
        pin!("contraction.div2.g4.delta", [2, -1, 2], || {
            flatten(&[contraction_datum(&ctx(4, Div2)?).delta])
        }),
        pin!("arf.g1", [3, 1], || arf(1)),
        pin!("arf.g2", [10, 6], || arf(2)),
        pin!("arf.g3", [36, 28], || arf(3)),
        pin!("arf.g4", [136, 120], || arf(4)),
        pin!("fiber_counts.div2.g4", [1, 255], || counts(4, Div2)),
        pin!("fiber_counts.div1.g3", [36, 28], || counts(3, Div1)),
        pin!("fixed.div1.g5.sminus_image_dim", [4], || {
            Ok(components(&ctx(5, Div1)?)
                .iter()
                .filter(|c| c.name == ComponentName::SMinus)
                .map(|c| c.image_dim_after_contraction)
                .collect())
        }),
        pin!("standard_flip.3_1_4", [4, 5], || {
            let f = standard_flip(3, 1, 4)?;
            Ok(vec![f.gamma_dim, f.gamma_prime_dim])
        }),
        pin!("chain.flop_counts", [2, 3, 0], flop_counts),
        pin!("main_theorem.counts", [1, 1, 2, 2], main_theorem_counts),
        pin!("signs.g4.final", [1, 0], || final_signs(4)),
        pin!("signs.g8.sign_changes", [1], || {
            Ok(vec![
                linearization_signs(&ctx(8, Div2)?).sign_changes as i64,
            ])
        }),
    ]
}

pub fn pin_ids() -> Vec<&'static str> {
    pinned_table().into_iter().map(|p| p.id).collect()
}

/// Perturb the first expected value of pin `id` by one.
pub fn mutate_pin(table: &mut [Pin], id: &str) -> Result<()> {
    let pin = table
        .iter_mut()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::OutOfRange {
            what: "pin id",
            detail: format!("unknown pin {id:?}"),
        })?;
    match pin.expected.first_mut() {
        Some(x) => *x += 1,
        None => pin.expected.push(1),
    }
    Ok(())
}

pub fn check_pins(table: &[Pin], report: &mut VerifyReport) {
    for pin in table {
        report.pins_checked += 1;
        let mut ck = Checker {
            report,
            prefix: format!("pin {}", pin.id),
        };
        match pin.actual() {
            Ok(actual) => ck.check(actual == pin.expected, || {
                format!("expected {:?}, computed {actual:?}", pin.expected)
            }),
            Err(e) => ck.fail(format!("computation failed: {e}")),
        }
    }
}

fn check_lattice(ctx: &GenusContext, ck: &mut Checker) {
    let cl = canonical_classes(ctx);
    let two = BigInt::from(2);
    ck.check(square(&cl.v, ctx) == ctx.h_square().clone(), || {
        "v^2 != 2g-2".into()
    });
    ck.check(square(&cl.f, ctx).is_zero(), || "f^2 != 0".into());
    ck.check(square(&cl.delta, ctx) == -two.clone(), || {
        "delta^2 != -2".into()
    });
    ck.check(square(&cl.lambda, ctx) == two, || "lambda^2 != 2".into());
    ck.check(pairing(&cl.delta, &cl.lambda, ctx).is_zero(), || {
        "(delta, lambda) != 0".into()
    });
    for (name, w) in [("f", &cl.f), ("delta", &cl.delta), ("lambda", &cl.lambda)] {
        ck.check(pairing(w, &cl.v, ctx).is_zero(), || {
            format!("{name} not in v-perp")
        });
    }
    ck.check(
        crate::lattice::classify(&cl.delta, ctx).kind == ClassKind::Spherical,
        || "delta not spherical".into(),
    );
    let k = BigInt::from(cl.f_coefficient());
    ck.check(&cl.f.scale(&k) + &cl.delta == cl.lambda, || {
        format!("lambda != {k}f + delta")
    });
    match divisibility(&cl.lambda, ctx) {
        Ok(d) => {
            ck.check(d == BigInt::from(ctx.case().value()), || {
                format!("div(lambda) = {d}")
            });
            ck.check((square(&cl.lambda, ctx) % &d).is_zero(), || {
                "div(lambda) does not divide lambda^2".into()
            });
        }
        Err(e) => ck.fail(format!("divisibility(lambda): {e}")),
    }
    let lat = invariant_lattice(ctx);
    for b in &lat.basis {
        ck.check(pairing(b, &cl.v, ctx).is_zero(), || {
            format!("basis {b} not in v-perp")
        });
    }
    ck.check(lat.coordinates(&cl.lambda).is_some(), || {
        "lambda not integral in the invariant basis".into()
    });
    let gram = standard_gram(ctx);
    ck.check(determinant(&gram).abs() == ctx.h_square().clone(), || {
        "|det| != 2g-2".into()
    });
    let sig = signature(&gram);
    ck.check((sig.positive, sig.negative, sig.zero) == (2, 1, 0), || {
        format!("signature {sig:?}")
    });
}

fn check_walls(ctx: &GenusContext, ck: &mut Checker) {
    let cl = canonical_classes(ctx);
    let chain = model_chain(ctx);
    let mov = movable_nef(ctx);
    match ctx.case() {
        Divisibility::Div1 => {
            match hyperbolic_scan_div1(ctx) {
                Ok(scan) => ck.check(scan == vec![cl.delta.clone(), -&cl.delta], || {
                    format!("hyperbolic scan {scan:?}")
                }),
                Err(e) => ck.fail(format!("hyperbolic scan: {e}")),
            }
            ck.check(mov.interior_wall_rays.is_empty(), || {
                "interior walls in div 1".into()
            });
            ck.check(chain.count(EdgeKind::Flop) == 0, || "flops in div 1".into());
        }
        Divisibility::Div2 => {
            let list = match enumerate_walls_div2(ctx) {
                Ok(l) => l,
                Err(e) => return ck.fail(format!("wall enumeration: {e}")),
            };
            let g = ctx.g();
            let gm1 = ctx.genus_big() - 1u32;
            for w in &list.walls {
                let a = &w.wall_vector;
                let (c, d) = w.indices();
                let tag = format!("wall ({c},{d})");
                ck.check(square(a, ctx) == BigInt::from(2 * d), || {
                    format!("{tag}: a^2 != 2d")
                });
                ck.check(pairing(a, &cl.v, ctx) == gm1, || {
                    format!("{tag}: (a,v) != g-1")
                });
                let ray = cleared_ray(&cl.lambda, &cl.f, &w.slope);
                ck.check(pairing(&ray, a, ctx).is_zero(), || {
                    format!("{tag}: lambda + mu f not orthogonal to a")
                });
                ck.check(
                    pairing(&cl.delta, a, ctx) <= BigInt::from(-(2 * c + 1)),
                    || format!("{tag}: (delta,a) > -(2c+1)"),
                );
                ck.check(
                    w.center_factor_dim == 2 * d + 2 && w.center_factor_dim >= 0,
                    || format!("{tag}: center factor dim"),
                );
                ck.check(
                    w.fiber_proj_dim >= 1
                        && BigInt::from(w.fiber_proj_dim + 1)
                            == pairing(a, &w.complement_vector, ctx),
                    || format!("{tag}: fiber proj dim"),
                );
                ck.check(&w.complement_vector + a == cl.v, || {
                    format!("{tag}: complement")
                });
                ck.check(!w.slope.is_negative(), || format!("{tag}: negative slope"));
                let boundary = 4 * d + (2 * c + 1) * (2 * c + 1) == g - 1;
                ck.check(!w.slope.is_zero() || boundary, || {
                    format!("{tag}: zero slope off the boundary")
                });
                ck.check(is_wall_class(a, ctx), || format!("{tag}: not a wall class"));
            }
            let sorted = list.walls.windows(2).all(|p| {
                p[0].slope > p[1].slope
                    || (p[0].slope == p[1].slope && p[0].indices() < p[1].indices())
            });
            ck.check(sorted, || "walls out of order".into());
            let ties = list
                .walls
                .windows(2)
                .filter(|p| p[0].slope == p[1].slope)
                .count();
            ck.check(ties == list.ties.len(), || {
                "slope ties not all reported".into()
            });
            ck.check(mov.interior_wall_rays.len() == list.walls.len(), || {
                "one interior ray per wall".into()
            });
            ck.check(chain.count(EdgeKind::Flop) == list.walls.len(), || {
                "flop edges != wall count".into()
            });
            ck.check(chain.model_nodes().count() == list.walls.len() + 1, || {
                "model node count".into()
            });
            let first = list.walls.first().map(|w| w.indices());
            ck.check(first == Some((0, -1)), || format!("first wall {first:?}"));
        }
    }
    ck.check(chain.count(EdgeKind::Fibration) == 1, || {
        "fibration edges != 1".into()
    });
    ck.check(chain.count(EdgeKind::DivisorialContraction) == 1, || {
        "contraction edges != 1".into()
    });
    ck.check(
        emit_chain_dot(&chain) == emit_chain_dot(&model_chain(ctx)),
        || "DOT output not stable".into(),
    );
}

fn check_strata(ctx: &GenusContext, ck: &mut Checker) {
    let g = ctx.g();
    let s = strata(ctx);
    let kmax = num_integer::Roots::sqrt(&ctx.genus()) as usize;
    ck.check(s.len() == kmax, || {
        format!("{} strata, expected {kmax}", s.len())
    });
    for st in &s {
        let k = st.k;
        ck.check(st.base_dim == 2 * g - 2 * k * k && st.base_dim >= 0, || {
            format!("stratum {k}: base dim")
        });
        ck.check(
            BigInt::from(st.base_dim) == square(&st.b_k, ctx) + 2u32,
            || format!("stratum {k}: base dim != b_k^2 + 2"),
        );
        ck.check(st.total_dim == 2 * g - k * k, || {
            format!("stratum {k}: total dim")
        });
        ck.check(
            st.fiber_dim == st.grass_fiber.0 * (st.grass_fiber.1 - st.grass_fiber.0),
            || format!("stratum {k}: Grassmannian dim"),
        );
        ck.check(st.codim_in_delta == k * k - 1, || {
            format!("stratum {k}: codim")
        });
    }
    if let Some(first) = s.first() {
        ck.check(first.total_dim == 2 * g - 1, || {
            "k=1 stratum not dense in Delta".into()
        });
    }
    ck.check(
        s.windows(2)
            .all(|p| p[0].base_dim > p[1].base_dim && p[0].total_dim > p[1].total_dim),
        || "strata dims not strictly decreasing".into(),
    );
    let cd = contraction_datum(ctx);
    ck.check(cd.checks.all(), || {
        format!("contraction checks {:?}", cd.checks)
    });
}

fn check_ledger(ctx: &GenusContext, ck: &mut Checker) {
    let l = match ledger_div2(ctx) {
        Ok(l) => l,
        Err(e) => return ck.fail(format!("ledger: {e}")),
    };
    let g = ctx.genus_big();
    ck.check(l.m_degree == -(&g / 2u32 + 1u32), || "m != -(g/2+1)".into());
    ck.check(l.m_is_odd, || "m even".into());
    ck.check(l.h0_a_dual == &l.point_count_r * 2u32, || "h0 != 2r".into());
    ck.check(l.mult_sigma_delta == l.h0_a_dual, || "mult != h0".into());
    let a01 = MukaiVector::new(1, 0, 1);
    let delta = canonical_classes(ctx).delta;
    ck.check(l.delta_dot_gamma == pairing(&delta, &a01, ctx), || {
        "Delta.gamma disagrees with (delta, a_{0,-1})".into()
    });
}

fn check_fixed(ctx: &GenusContext, ck: &mut Checker) {
    let g = ctx.genus();
    let comps = components(ctx);
    let total: num_bigint::BigUint = comps.iter().map(|c| &c.fiber_count).sum();
    ck.check(total == num_bigint::BigUint::from(1u32) << (2 * g), || {
        "fiber counts do not sum to 2^{2g}".into()
    });
    ck.check(comps.iter().all(|c| c.dim == ctx.g()), || {
        "component dim != g".into()
    });
    let by_name: BTreeMap<_, _> = comps.iter().map(|c| (c.name, c)).collect();
    let (count, div) = main_theorem_check(ctx);
    ck.check(BigInt::from(count) == div, || {
        format!("count {count} != div {div}")
    });
    match ctx.case() {
        Divisibility::Div1 => {
            ck.check(
                by_name
                    .get(&ComponentName::SMinus)
                    .is_some_and(|c| c.contained_in_delta)
                    && by_name
                        .get(&ComponentName::SPlus)
                        .is_some_and(|c| !c.contained_in_delta),
                || "S+/S- containment".into(),
            );
            let (e, o) = theta_characteristic_counts(g);
            let fc = fiber_counts(ctx);
            ck.check(
                fc[&ComponentName::SPlus] == e && fc[&ComponentName::SMinus] == o,
                || "theta counts".into(),
            );
            if g <= u64::from(VERIFY_ARF_GENUS) {
                match arf_census(g as u32) {
                    Ok((ne, no)) => ck.check(
                        num_bigint::BigUint::from(ne) == e && num_bigint::BigUint::from(no) == o,
                        || format!("Arf oracle ({ne},{no}) disagrees with theta counts"),
                    ),
                    Err(e) => ck.fail(format!("Arf oracle: {e}")),
                }
            }
        }
        Divisibility::Div2 => {
            ck.check(
                by_name
                    .get(&ComponentName::Sigma)
                    .is_some_and(|c| c.contained_in_delta)
                    && by_name
                        .get(&ComponentName::Omega)
                        .is_some_and(|c| !c.contained_in_delta),
                || "Sigma/Omega containment".into(),
            );
            let states = match flip_transport(ctx) {
                Ok(s) => s,
                Err(e) => return ck.fail(format!("transport: {e}")),
            };
            ck.check(states.iter().all(|s| s.component_count == 2), || {
                "component count changed".into()
            });
            let flops: Vec<_> = states
                .iter()
                .flat_map(|s| {
                    s.components
                        .iter()
                        .map(move |(n, st)| (s.model_label.as_str(), *n, *st))
                })
                .filter(|(_, _, st)| *st == TransportStatus::FloppedAtThisWall)
                .collect();
            ck.check(
                flops.len() == 1
                    && flops[0].1 == ComponentName::Sigma
                    && states.len() > 1
                    && flops[0].0 == states[1].model_label,
                || format!("flop events {flops:?}"),
            );
            let lin = linearization_signs(ctx);
            let m_odd = ledger_div2(ctx).map(|l| l.m_is_odd).unwrap_or(false);
            ck.check(
                lin.sign_changes == usize::from(m_odd) && lin.sign_changes == 1,
                || format!("{} sign changes", lin.sign_changes),
            );
            ck.check(
                lin.final_signs.get(&ComponentName::Sigma) == Some(&Sign::Det)
                    && lin.final_signs.get(&ComponentName::Omega) == Some(&Sign::Trivial),
                || format!("final signs {:?}", lin.final_signs),
            );
            ck.check(lin.disjoint_in_mbar, || "not disjoint in Mbar".into());
        }
    }
}

fn check_report(ctx: &GenusContext, ck: &mut Checker) {
    let mut sections = vec![
        Section::Classes,
        Section::Walls,
        Section::Strata,
        Section::Fixed,
        Section::Chain,
    ];
    if ctx.case() == Divisibility::Div2 {
        sections.push(Section::Ledger);
    }
    let bundle = match ReportBundle::build(ctx, &sections) {
        Ok(b) => b,
        Err(e) => return ck.fail(format!("report: {e}")),
    };
    let text = emit_json(&bundle);
    ck.check(!has_float(&text), || "float in JSON".into());
    match serde_json::from_str::<Value>(&text) {
        Ok(v) => {
            let mut again = serde_json::to_string_pretty(&v).unwrap_or_default();
            again.push('\n');
            ck.check(again == text, || {
                "JSON round trip not byte-identical".into()
            });
            if let Some(walls) = v["walls"].as_array() {
                for w in walls {
                    let ok = w["slope"].as_str().and_then(parse_fraction).is_some();
                    ck.check(ok, || format!("bad slope {}", w["slope"]));
                }
            }
        }
        Err(e) => ck.fail(format!("JSON does not parse: {e}")),
    }
}

fn has_float(text: &str) -> bool {
    fn walk(v: &Value) -> bool {
        match v {
            Value::Number(n) => !n
                .to_string()
                .bytes()
                .all(|b| b.is_ascii_digit() || b == b'-'),
            Value::Array(a) => a.iter().any(walk),
            Value::Object(o) => o.values().any(walk),
            _ => false,
        }
    }
    serde_json::from_str::<Value>(text)
        .map(|v| walk(&v))
        .unwrap_or(true)
}

/// Parse a `"p/q"` string with `q > 0` in lowest terms.
pub fn parse_fraction(s: &str) -> Option<BigRational> {
    let (p, q) = s.split_once('/')?;
    let p: BigInt = p.parse().ok()?;
    let q: BigInt = q.parse().ok()?;
    if !q.is_positive() {
        return None;
    }
    let r = BigRational::new(p.clone(), q.clone());
    (r.numer() == &p && r.denom() == &q).then_some(r)
}

/// Invariants for a single context.
pub fn check_context(ctx: &GenusContext, report: &mut VerifyReport) {
    let mut ck = Checker {
        report,
        prefix: format!("g={} {}", ctx.genus(), ctx.case()),
    };
    check_lattice(ctx, &mut ck);
    check_walls(ctx, &mut ck);
    check_strata(ctx, &mut ck);
    if ctx.case() == Divisibility::Div2 {
        check_ledger(ctx, &mut ck);
    }
    check_fixed(ctx, &mut ck);
    check_report(ctx, &mut ck);
    ck.report.contexts_checked += 1;
}

fn check_global(max_genus: u64, report: &mut VerifyReport) {
    let mut ck = Checker {
        report,
        prefix: "global".into(),
    };
    for g in 1..=VERIFY_ARF_GENUS {
        match arf_census(g) {
            Ok((e, o)) => {
                ck.check(e + o == 1u64 << (2 * g), || format!("arf g={g}: total"));
                ck.check(e - o == 1u64 << g, || format!("arf g={g}: difference"));
            }
            Err(e) => ck.fail(format!("arf g={g}: {e}")),
        }
    }
    for g in (2..=max_genus).step_by(2) {
        match first_flop_degree(g) {
            Ok((_, odd)) => ck.check(odd == (g % 4 == 0), || {
                format!("first flop degree parity at g={g}")
            }),
            Err(e) => ck.fail(format!("first flop degree g={g}: {e}")),
        }
    }
    for (n, p, w) in [
        (2, 1, 0),
        (3, 1, 4),
        (3, 2, 4),
        (7, 1, 8),
        (5, 2, 6),
        (5, 3, 6),
    ] {
        match standard_flip(n, p, w) {
            Ok(f) => ck.check(f.gamma_dim + f.gamma_prime_dim == 2 * w + n - 2, || {
                format!("standard_flip({n},{p},{w}) does not conserve n")
            }),
            Err(e) => ck.fail(format!("standard_flip({n},{p},{w}): {e}")),
        }
    }
}

/// Full suite: global identities, the invariant sweep over every admissible
/// context with `g ≤ max_genus`, and the pinned table (optionally with one
/// pin mutated).
pub fn run_verify(max_genus: u64, mutate: Option<&str>) -> Result<VerifyReport> {
    let mut table = pinned_table();
    if let Some(id) = mutate {
        mutate_pin(&mut table, id)?;
    }
    let mut report = VerifyReport::default();
    check_global(max_genus, &mut report);
    for ctx in GenusContext::admissible_up_to(max_genus) {
        check_context(&ctx, &mut report);
    }
    check_pins(&table, &mut report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pins_pass_unmutated() {
        let mut r = VerifyReport::default();
        check_pins(&pinned_table(), &mut r);
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn every_single_mutation_is_caught() {
        for id in pin_ids() {
            let mut table = pinned_table();
            mutate_pin(&mut table, id).unwrap();
            let mut r = VerifyReport::default();
            check_pins(&table, &mut r);
            assert_eq!(r.failures.len(), 1, "{id}");
            assert!(r.failures[0].contains(id));
        }
    }

    #[test]
    fn pin_ids_are_unique() {
        let ids = pin_ids();
        let set: std::collections::BTreeSet<_> = ids.iter().collect();
        assert_eq!(set.len(), ids.len());
    }

    #[test]
    fn unknown_pin_is_rejected() {
        assert!(run_verify(4, Some("no.such.pin")).is_err());
    }

    #[test]
    fn sweep_small() {
        let r = run_verify(24, None).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.contexts_checked, 23 + 6);
    }

    #[test]
    fn fractions() {
        assert!(parse_fraction("3/1").is_some());
        assert!(parse_fraction("-1/3").is_some());
        assert!(parse_fraction("2/6").is_none());
        assert!(parse_fraction("1/-3").is_none());
        assert!(parse_fraction("3").is_none());
    }
}
