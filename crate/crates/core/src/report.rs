//! Report assembly and serialization (text, TSV, JSON, DOT).
//!
//! JSON never contains floating point: integers are emitted as exact JSON
//! numbers of arbitrary size and rationals as `"p/q"` strings with `q > 0`.
//! Object keys come out sorted.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde_json::{json, Map, Number, Value};

use crate::error::Result;
use crate::fixed::{
    components, flip_transport, linearization_signs, FixedComponentReport, LinearizationReport,
    TransportState,
};
use crate::lattice::{
    canonical_classes, classify, divisibility, invariant_lattice, square, CanonicalClasses,
    ClassKind, Divisibility, EigenLattice, GenusContext, MukaiVector,
};
use crate::strata::{
    contraction_datum, ledger_div2, strata, strata_diagnostics, ContractionDatum, LedgerDiv2,
    StratumDatum,
};
use crate::walls::{
    enumerate_walls_div2, hyperbolic_scan_div1, model_chain, movable_nef, totally_semistable_guard,
    EdgeKind, ModelChain, MovableNef, WallDatum,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Classes,
    Walls,
    Strata,
    Ledger,
    Fixed,
    Chain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Tsv,
    Dot,
}

#[derive(Debug, Clone)]
pub struct ClassesSection {
    pub classes: CanonicalClasses,
    pub invariant: EigenLattice,
    pub divisibility_lambda: BigInt,
    pub contraction: ContractionDatum,
}

#[derive(Debug, Clone)]
pub struct WallsSection {
    pub walls: Vec<WallDatum>,
    pub movable: MovableNef,
    pub hyperbolic_scan: Option<Vec<MukaiVector>>,
    pub no_totally_semistable_walls: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct FixedSection {
    pub components: Vec<FixedComponentReport>,
    pub linearization: LinearizationReport,
    pub transport: Option<Vec<TransportState>>,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub ctx: GenusContext,
    pub classes: Option<ClassesSection>,
    pub walls: Option<WallsSection>,
    pub strata: Option<Vec<StratumDatum>>,
    pub ledger: Option<LedgerDiv2>,
    pub fixed: Option<FixedSection>,
    pub chain: Option<ModelChain>,
    pub diagnostics: Vec<String>,
}

impl ReportBundle {
    pub fn build(ctx: &GenusContext, sections: &[Section]) -> Result<Self> {
        let mut bundle = ReportBundle {
            ctx: ctx.clone(),
            classes: None,
            walls: None,
            strata: None,
            ledger: None,
            fixed: None,
            chain: None,
            diagnostics: Vec::new(),
        };
        for section in sections {
            match section {
                Section::Classes => {
                    let classes = canonical_classes(ctx);
                    bundle.classes = Some(ClassesSection {
                        invariant: invariant_lattice(ctx),
                        divisibility_lambda: divisibility(&classes.lambda, ctx)?,
                        contraction: contraction_datum(ctx),
                        classes,
                    });
                }
                Section::Walls => {
                    let section = match ctx.case() {
                        Divisibility::Div1 => {
                            bundle.diagnostics.push(
                                "divisibility 1: nef cone equals movable cone, no interior walls"
                                    .into(),
                            );
                            WallsSection {
                                walls: Vec::new(),
                                movable: movable_nef(ctx),
                                hyperbolic_scan: Some(hyperbolic_scan_div1(ctx)?),
                                no_totally_semistable_walls: None,
                            }
                        }
                        Divisibility::Div2 => {
                            let list = enumerate_walls_div2(ctx)?;
                            bundle.diagnostics.extend(list.diagnostics());
                            WallsSection {
                                walls: list.walls,
                                movable: movable_nef(ctx),
                                hyperbolic_scan: None,
                                no_totally_semistable_walls: Some(totally_semistable_guard(ctx)?),
                            }
                        }
                    };
                    bundle.walls = Some(section);
                }
                Section::Strata => {
                    bundle.strata = Some(strata(ctx));
                    bundle.diagnostics.extend(strata_diagnostics(ctx));
                }
                Section::Ledger => bundle.ledger = Some(ledger_div2(ctx)?),
                Section::Fixed => {
                    let transport = match ctx.case() {
                        Divisibility::Div1 => None,
                        Divisibility::Div2 => Some(flip_transport(ctx)?),
                    };
                    bundle.fixed = Some(FixedSection {
                        components: components(ctx),
                        linearization: linearization_signs(ctx),
                        transport,
                    });
                }
                Section::Chain => {
                    if ctx.case() == Divisibility::Div2 {
                        bundle
                            .diagnostics
                            .extend(enumerate_walls_div2(ctx)?.diagnostics());
                    }
                    bundle.chain = Some(model_chain(ctx));
                }
            }
        }
        Ok(bundle)
    }
}

pub fn int_value(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("decimal integer"))
}

fn uint_value(x: &BigUint) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("decimal integer"))
}

fn i64_value(x: i64) -> Value {
    Value::Number(x.into())
}

/// `"p/q"` with `q > 0`, always including the denominator.
pub fn fraction_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn vector_value(v: &MukaiVector) -> Value {
    Value::Array(v.components().into_iter().map(int_value).collect())
}

fn kind_str(kind: ClassKind) -> &'static str {
    match kind {
        ClassKind::Spherical => "Spherical",
        ClassKind::Isotropic => "Isotropic",
        ClassKind::Positive => "Positive",
        ClassKind::Other => "Other",
    }
}

fn edge_kind_str(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Flop => "Flop",
        EdgeKind::Fibration => "Fibration",
        EdgeKind::DivisorialContraction => "DivisorialContraction",
    }
}

fn named_classes(cl: &CanonicalClasses) -> Vec<(&'static str, &MukaiVector)> {
    let mut out = vec![
        ("v", &cl.v),
        ("f", &cl.f),
        ("delta", &cl.delta),
        ("lambda", &cl.lambda),
    ];
    if let Some(a) = &cl.a {
        out.push(("A", a));
    }
    out
}

fn classes_json(ctx: &GenusContext, s: &ClassesSection) -> Value {
    let mut classes = Map::new();
    for (name, v) in named_classes(&s.classes) {
        let c = classify(v, ctx);
        classes.insert(
            name.into(),
            json!({
                "vector": vector_value(v),
                "square": int_value(&square(v, ctx)),
                "kind": kind_str(c.kind),
                "moduli_dim": c.moduli_dim.as_ref().map_or(Value::Null, int_value),
            }),
        );
    }
    let gram: Vec<Value> = s
        .invariant
        .gram
        .iter()
        .map(|row| Value::Array(row.iter().map(int_value).collect()))
        .collect();
    json!({
        "classes": classes,
        "divisibility_lambda": int_value(&s.divisibility_lambda),
        "invariant_lattice": {
            "basis": s.invariant.basis.iter().map(vector_value).collect::<Vec<_>>(),
            "gram": gram,
        },
        "relation": s.contraction.relation(),
        "contraction_checks": {
            "delta_square_is_minus_two": s.contraction.checks.delta_square_is_minus_two,
            "delta_lambda_orthogonal": s.contraction.checks.delta_lambda_orthogonal,
            "lambda_on_movable_boundary": s.contraction.checks.lambda_on_movable_boundary,
        },
    })
}

fn wall_json(w: &WallDatum) -> Value {
    json!({
        "c": i64_value(w.c),
        "d": i64_value(w.d),
        "slope": fraction_string(&w.slope),
        "a": vector_value(&w.wall_vector),
        "complement": vector_value(&w.complement_vector),
        "center_factor_dim": i64_value(w.center_factor_dim),
        "fiber_proj_dim": i64_value(w.fiber_proj_dim),
    })
}

fn movable_json(s: &WallsSection) -> Value {
    let mut m = Map::new();
    m.insert(
        "movable_rays".into(),
        Value::Array(s.movable.movable_rays.iter().map(vector_value).collect()),
    );
    m.insert(
        "nef_rays_of_m".into(),
        Value::Array(s.movable.nef_rays_of_m.iter().map(vector_value).collect()),
    );
    m.insert(
        "interior_wall_rays".into(),
        Value::Array(
            s.movable
                .interior_wall_rays
                .iter()
                .map(vector_value)
                .collect(),
        ),
    );
    if let Some(scan) = &s.hyperbolic_scan {
        m.insert(
            "hyperbolic_scan".into(),
            Value::Array(scan.iter().map(vector_value).collect()),
        );
    }
    if let Some(b) = s.no_totally_semistable_walls {
        m.insert("no_totally_semistable_walls".into(), Value::Bool(b));
    }
    Value::Object(m)
}

fn stratum_json(s: &StratumDatum) -> Value {
    json!({
        "k": i64_value(s.k),
        "b_k": vector_value(&s.b_k),
        "base_dim": i64_value(s.base_dim),
        "fiber_dim": i64_value(s.fiber_dim),
        "total_dim": i64_value(s.total_dim),
        "codim_in_delta": i64_value(s.codim_in_delta),
        "grass_fiber": [i64_value(s.grass_fiber.0), i64_value(s.grass_fiber.1)],
    })
}

fn ledger_json(l: &LedgerDiv2) -> Value {
    json!({
        "h0_a_dual": int_value(&l.h0_a_dual),
        "point_count_r": int_value(&l.point_count_r),
        "mult_sigma_delta": int_value(&l.mult_sigma_delta),
        "delta_dot_gamma": int_value(&l.delta_dot_gamma),
        "m_degree": int_value(&l.m_degree),
        "m_is_odd": l.m_is_odd,
    })
}

fn fixed_json(s: &FixedSection) -> Value {
    let comps: Vec<Value> = s
        .components
        .iter()
        .map(|c| {
            json!({
                "name": c.name.as_str(),
                "dim": i64_value(c.dim),
                "contained_in_delta": c.contained_in_delta,
                "fiber_count": uint_value(&c.fiber_count),
                "sign": c.sign.as_str(),
                "image_dim_after_contraction": i64_value(c.image_dim_after_contraction),
            })
        })
        .collect();
    let signs: Map<String, Value> = s
        .linearization
        .final_signs
        .iter()
        .map(|(k, v)| (k.as_str().to_string(), Value::String(v.as_str().into())))
        .collect();
    let mut m = Map::new();
    m.insert("components".into(), Value::Array(comps));
    m.insert("signs".into(), Value::Object(signs));
    m.insert(
        "main_theorem_count".into(),
        Value::Number(s.linearization.main_theorem_count.into()),
    );
    m.insert(
        "disjoint_in_mbar".into(),
        Value::Bool(s.linearization.disjoint_in_mbar),
    );
    m.insert(
        "sign_changes".into(),
        Value::Number(s.linearization.sign_changes.into()),
    );
    if let Some(states) = &s.transport {
        let states: Vec<Value> = states
            .iter()
            .map(|st| {
                let comps: Map<String, Value> = st
                    .components
                    .iter()
                    .map(|(n, status)| (n.as_str().to_string(), status.as_str().into()))
                    .collect();
                let signs: Map<String, Value> = st
                    .signs
                    .iter()
                    .map(|(n, sign)| (n.as_str().to_string(), sign.as_str().into()))
                    .collect();
                json!({
                    "model": st.model_label,
                    "status": comps,
                    "signs": signs,
                    "component_count": st.component_count,
                })
            })
            .collect();
        m.insert("transport".into(), Value::Array(states));
    }
    Value::Object(m)
}

fn chain_json(c: &ModelChain) -> Value {
    let nodes: Vec<Value> = c
        .nodes
        .iter()
        .map(|n| json!({"id": n.dot_id(), "label": n.label()}))
        .collect();
    let edges: Vec<Value> = c
        .edges
        .iter()
        .map(|e| {
            json!({
                "from": c.nodes[e.from].dot_id(),
                "to": c.nodes[e.to].dot_id(),
                "kind": edge_kind_str(e.kind),
                "label": e.label,
            })
        })
        .collect();
    json!({"nodes": nodes, "edges": edges})
}

pub fn bundle_value(bundle: &ReportBundle) -> Value {
    let mut m = Map::new();
    m.insert("genus".into(), Value::Number(bundle.ctx.genus().into()));
    m.insert(
        "divisibility".into(),
        Value::Number(bundle.ctx.case().value().into()),
    );
    if let Some(s) = &bundle.classes {
        m.insert("classes".into(), classes_json(&bundle.ctx, s));
    }
    if let Some(s) = &bundle.walls {
        m.insert(
            "walls".into(),
            Value::Array(s.walls.iter().map(wall_json).collect()),
        );
        m.insert("movable".into(), movable_json(s));
    }
    if let Some(s) = &bundle.strata {
        m.insert(
            "strata".into(),
            Value::Array(s.iter().map(stratum_json).collect()),
        );
    }
    if let Some(l) = &bundle.ledger {
        m.insert("ledger".into(), ledger_json(l));
    }
    if let Some(f) = &bundle.fixed {
        m.insert("fixed".into(), fixed_json(f));
    }
    if let Some(c) = &bundle.chain {
        m.insert("chain".into(), chain_json(c));
    }
    m.insert(
        "diagnostics".into(),
        Value::Array(
            bundle
                .diagnostics
                .iter()
                .cloned()
                .map(Value::String)
                .collect(),
        ),
    );
    Value::Object(m)
}

pub fn emit_json(bundle: &ReportBundle) -> String {
    let mut out = serde_json::to_string_pretty(&bundle_value(bundle)).expect("serializable");
    out.push('\n');
    out
}

pub fn emit_chain_dot(chain: &ModelChain) -> String {
    let mut out = String::from("digraph model_chain {\n    rankdir=LR;\n");
    for n in &chain.nodes {
        let _ = writeln!(out, "    {} [label=\"{}\"];", n.dot_id(), n.label());
    }
    for e in &chain.edges {
        let from = chain.nodes[e.from].dot_id();
        let to = chain.nodes[e.to].dot_id();
        match e.kind {
            EdgeKind::Flop => {
                let _ = writeln!(
                    out,
                    "    {from} -> {to} [style=dashed, label=\"{}\"];",
                    e.label
                );
            }
            _ => {
                let _ = writeln!(out, "    {from} -> {to} [label=\"{}\"];", e.label);
            }
        }
    }
    out.push_str("}\n");
    out
}

fn tsv_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join("\t"));
    out.push('\n');
}

/// One TSV table for the first section present in the bundle.
pub fn emit_tsv(bundle: &ReportBundle) -> String {
    let ctx = &bundle.ctx;
    let mut out = String::new();
    if let Some(s) = &bundle.classes {
        tsv_row(
            &mut out,
            &["name", "r", "c", "s", "square", "kind"].map(String::from),
        );
        for (name, v) in named_classes(&s.classes) {
            tsv_row(
                &mut out,
                &[
                    name.to_string(),
                    v.r.to_string(),
                    v.c.to_string(),
                    v.s.to_string(),
                    square(v, ctx).to_string(),
                    kind_str(classify(v, ctx).kind).to_string(),
                ],
            );
        }
    } else if let Some(s) = &bundle.walls {
        tsv_row(
            &mut out,
            &[
                "c",
                "d",
                "slope",
                "a_r",
                "a_c",
                "a_s",
                "center_factor_dim",
                "fiber_proj_dim",
            ]
            .map(String::from),
        );
        for w in &s.walls {
            tsv_row(
                &mut out,
                &[
                    w.c.to_string(),
                    w.d.to_string(),
                    fraction_string(&w.slope),
                    w.wall_vector.r.to_string(),
                    w.wall_vector.c.to_string(),
                    w.wall_vector.s.to_string(),
                    w.center_factor_dim.to_string(),
                    w.fiber_proj_dim.to_string(),
                ],
            );
        }
    } else if let Some(s) = &bundle.strata {
        tsv_row(
            &mut out,
            &[
                "k",
                "b_r",
                "b_c",
                "b_s",
                "base_dim",
                "fiber_dim",
                "total_dim",
                "codim_in_delta",
            ]
            .map(String::from),
        );
        for st in s {
            tsv_row(
                &mut out,
                &[
                    st.k.to_string(),
                    st.b_k.r.to_string(),
                    st.b_k.c.to_string(),
                    st.b_k.s.to_string(),
                    st.base_dim.to_string(),
                    st.fiber_dim.to_string(),
                    st.total_dim.to_string(),
                    st.codim_in_delta.to_string(),
                ],
            );
        }
    } else if let Some(l) = &bundle.ledger {
        tsv_row(
            &mut out,
            &[
                "h0_a_dual",
                "point_count_r",
                "mult_sigma_delta",
                "delta_dot_gamma",
                "m_degree",
                "m_is_odd",
            ]
            .map(String::from),
        );
        tsv_row(
            &mut out,
            &[
                l.h0_a_dual.to_string(),
                l.point_count_r.to_string(),
                l.mult_sigma_delta.to_string(),
                l.delta_dot_gamma.to_string(),
                l.m_degree.to_string(),
                l.m_is_odd.to_string(),
            ],
        );
    } else if let Some(f) = &bundle.fixed {
        tsv_row(
            &mut out,
            &[
                "name",
                "dim",
                "contained_in_delta",
                "fiber_count",
                "sign",
                "image_dim_after_contraction",
            ]
            .map(String::from),
        );
        for c in &f.components {
            tsv_row(
                &mut out,
                &[
                    c.name.to_string(),
                    c.dim.to_string(),
                    c.contained_in_delta.to_string(),
                    c.fiber_count.to_string(),
                    c.sign.as_str().to_string(),
                    c.image_dim_after_contraction.to_string(),
                ],
            );
        }
    } else if let Some(c) = &bundle.chain {
        tsv_row(&mut out, &["from", "to", "kind", "label"].map(String::from));
        for e in &c.edges {
            tsv_row(
                &mut out,
                &[
                    c.nodes[e.from].dot_id(),
                    c.nodes[e.to].dot_id(),
                    edge_kind_str(e.kind).to_string(),
                    e.label.clone(),
                ],
            );
        }
    }
    out
}

pub fn emit_text(bundle: &ReportBundle) -> String {
    let ctx = &bundle.ctx;
    let mut out = String::new();
    let _ = writeln!(out, "genus {}, {}", ctx.genus(), ctx.case());
    if let Some(s) = &bundle.classes {
        out.push_str("\nclasses\n");
        for (name, v) in named_classes(&s.classes) {
            let c = classify(v, ctx);
            let _ = writeln!(
                out,
                "  {name:<7} {v:<20} square {:<6} {}",
                square(v, ctx).to_string(),
                kind_str(c.kind)
            );
        }
        let _ = writeln!(out, "  {}", s.contraction.relation());
        let _ = writeln!(out, "  div(lambda) = {}", s.divisibility_lambda);
        let [b0, b1] = &s.invariant.basis;
        let g = &s.invariant.gram;
        let _ = writeln!(
            out,
            "  invariant lattice <{b0}, {b1}>, gram [[{}, {}], [{}, {}]]",
            g[0][0], g[0][1], g[1][0], g[1][1]
        );
    }
    if let Some(s) = &bundle.walls {
        out.push_str("\nwalls\n");
        let [f, l] = &s.movable.movable_rays;
        let _ = writeln!(out, "  Mov(M) = <{f}, {l}>");
        let [f, n] = &s.movable.nef_rays_of_m;
        let _ = writeln!(out, "  Nef(M) = <{f}, {n}>");
        if let Some(scan) = &s.hyperbolic_scan {
            let list: Vec<String> = scan.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "  wall classes in <delta, v>: {}", list.join(", "));
        }
        for (w, ray) in s.walls.iter().zip(&s.movable.interior_wall_rays) {
            let _ = writeln!(
                out,
                "  ({},{})  mu = {:<6} a = {:<16} ray {:<16} center dims 2x{} + P^{}",
                w.c,
                w.d,
                fraction_string(&w.slope),
                w.wall_vector.to_string(),
                ray.to_string(),
                w.center_factor_dim,
                w.fiber_proj_dim
            );
        }
    }
    if let Some(s) = &bundle.strata {
        out.push_str("\nstrata\n");
        for st in s {
            let _ = writeln!(
                out,
                "  k={}  b_k = {:<16} Gr({},{})-bundle over dim {}, total dim {}, codim {}",
                st.k,
                st.b_k.to_string(),
                st.grass_fiber.0,
                st.grass_fiber.1,
                st.base_dim,
                st.total_dim,
                st.codim_in_delta
            );
        }
    }
    if let Some(l) = &bundle.ledger {
        out.push_str("\nledger\n");
        let _ = writeln!(out, "  h0(A^v)          = {}", l.h0_a_dual);
        let _ = writeln!(out, "  r                = {}", l.point_count_r);
        let _ = writeln!(out, "  mult_Sigma(Delta) = {}", l.mult_sigma_delta);
        let _ = writeln!(out, "  Delta.gamma      = {}", l.delta_dot_gamma);
        let _ = writeln!(
            out,
            "  m                = {} ({})",
            l.m_degree,
            if l.m_is_odd { "odd" } else { "even" }
        );
    }
    if let Some(f) = &bundle.fixed {
        out.push_str("\nfixed locus\n");
        for c in &f.components {
            let _ = writeln!(
                out,
                "  {:<7} dim {}  in Delta: {:<5}  fiber count {}  sign {}  image dim {}",
                c.name.as_str(),
                c.dim,
                c.contained_in_delta,
                c.fiber_count,
                c.sign.as_str(),
                c.image_dim_after_contraction
            );
        }
        if let Some(states) = &f.transport {
            for st in states {
                let parts: Vec<String> = st
                    .components
                    .iter()
                    .map(|(n, s)| format!("{}={}/{}", n, s.as_str(), st.signs[n].as_str()))
                    .collect();
                let _ = writeln!(out, "  {:<10} {}", st.model_label, parts.join("  "));
            }
        }
        let _ = writeln!(
            out,
            "  disjoint in Mbar: {}, connected components: {}",
            f.linearization.disjoint_in_mbar, f.linearization.main_theorem_count
        );
    }
    if let Some(c) = &bundle.chain {
        out.push_str("\nchain\n");
        for e in &c.edges {
            let _ = writeln!(
                out,
                "  {} -> {}  {} {}",
                c.nodes[e.from].label(),
                c.nodes[e.to].label(),
                edge_kind_str(e.kind),
                e.label
            );
        }
    }
    for d in &bundle.diagnostics {
        let _ = writeln!(out, "# note: {d}");
    }
    out
}
