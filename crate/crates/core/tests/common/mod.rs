//! Independent oracles shared by the integration tests. Everything here
//! uses plain `i128` arithmetic and literal class coordinates; nothing is
//! routed through the library's lattice code.
#![allow(dead_code)]

use std::path::PathBuf;

use lagrangian_walls::MukaiVector;
use num_traits::ToPrimitive;

pub type V = [i128; 3];

pub fn pair(a: V, b: V, g: i128) -> i128 {
    a[1] * b[1] * (2 * g - 2) - a[0] * b[2] - a[2] * b[0]
}

pub fn arr(v: &MukaiVector) -> V {
    [
        v.r.to_i128().unwrap(),
        v.c.to_i128().unwrap(),
        v.s.to_i128().unwrap(),
    ]
}

pub fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `p/q` reduced with `q > 0`.
pub fn reduce(p: i128, q: i128) -> (i128, i128) {
    let g = gcd(p, q);
    let s = if q < 0 { -1 } else { 1 };
    (s * p / g, s * q / g)
}

#[derive(Debug, Default)]
pub struct Div2Scan {
    /// `(a, μ)` with `(a, v) = g − 1`, `a_r > 0`, `μ ≥ 0`.
    pub walls: Vec<(V, (i128, i128))>,
    /// Hits with `0 < (a, v) < g − 1`.
    pub intermediate: Vec<V>,
    /// Hits with `(a, v) = 0` and `μ > 0`.
    pub interior_spherical: Vec<V>,
    /// Any admissible hit on the boundary of the search box.
    pub on_box_boundary: Vec<V>,
}

/// Brute-force scan of `a = (r, x, s)` in a box for divisibility 2,
/// `v = (0, 1, 1 − g)`. Keeps every class with `a² ≥ −2`,
/// `0 ≤ (a, v) ≤ g − 1` whose orthogonal ray `λ + μf` has `μ ≥ 0`, where
/// `μ = −(λ, a)/(f, a)`.
pub fn div2_wall_scan(g: i128, rb: i128, xb: i128, sb: i128) -> Div2Scan {
    let v = [0, 1, 1 - g];
    let lambda = [2, -1, g / 2 - 1];
    let f = [0, 0, -1];
    let mut out = Div2Scan::default();
    for r in -rb..=rb {
        for x in -xb..=xb {
            for s in -sb..=sb {
                let a = [r, x, s];
                if a == [0, 0, 0] || pair(a, a, g) < -2 {
                    continue;
                }
                let av = pair(a, v, g);
                if !(0..=g - 1).contains(&av) {
                    continue;
                }
                let fa = pair(f, a, g);
                if fa == 0 {
                    continue;
                }
                let (p, q) = reduce(-pair(lambda, a, g), fa);
                if p < 0 {
                    continue;
                }
                if r.abs() == rb || x.abs() == xb || s.abs() == sb {
                    out.on_box_boundary.push(a);
                }
                if av == g - 1 {
                    if r > 0 {
                        out.walls.push((a, (p, q)));
                    }
                } else if av == 0 {
                    if p > 0 {
                        out.interior_spherical.push(a);
                    }
                } else {
                    out.intermediate.push(a);
                }
            }
        }
    }
    out
}

/// Classes `a = xδ + yv` (divisibility 1, `δ = (1,0,1)`, `v = (0,1,0)`)
/// with `|x|, |y| ≤ bound`, `a ≠ 0`, `a² ≥ −2`, `0 ≤ (a, v) ≤ g − 1`.
pub fn hyperbolic_box(g: i128, bound: i128) -> Vec<V> {
    let delta = [1, 0, 1];
    let v = [0, 1, 0];
    let mut out = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            let a = [
                x * delta[0] + y * v[0],
                x * delta[1] + y * v[1],
                x * delta[2] + y * v[2],
            ];
            if a == [0, 0, 0] || pair(a, a, g) < -2 {
                continue;
            }
            let av = pair(a, v, g);
            if (0..=g - 1).contains(&av) {
                out.push(a);
            }
        }
    }
    out
}

/// `(b_k, b_k² + 2, b_k² + 2 + k²)` from the literal formulas, squared by
/// expanding the pairing.
pub fn strata_oracle(g: i128, div2: bool) -> Vec<(V, i128, i128)> {
    let kmax = (0..).take_while(|k: &i128| k * k <= g).last().unwrap();
    (1..=kmax)
        .map(|k| {
            let b = if div2 {
                [-2 * k, 1 + k, 1 - g - k * g / 2]
            } else {
                [-k, 1, -k]
            };
            let base = pair(b, b, g) + 2;
            (b, base, base + k * k)
        })
        .collect()
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_lagwalls"))
}
