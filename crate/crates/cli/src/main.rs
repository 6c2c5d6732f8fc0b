//! Command-line interface: membership queries, the enumeration oracle, the
//! probability map, the Monte Carlo index, the Tukey structure and
//! beta-hulls. Results go to stdout as JSON; diagnostics to stderr.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use uhull::beta::{beta_hull_2d, beta_hull_oracle};
use uhull::geom::{ConvexRegion, Point};
use uhull::io::{load_model, load_queries, ProbMapFile};
use uhull::mc::{build_mc_index, MCIndex, MCIndexFile};
use uhull::membership::{membership_2d, membership_dd};
use uhull::model::{brute_force_membership, UncertainPointSet, DEFAULT_OUTCOME_CAP};
use uhull::probmap::{build_probability_map, LocateResult, ProbabilityMap};
use uhull::scalar::{format_rat, parse_decimal, Rat};
use uhull::tukey::{build_tukey_structure, query_tukey, DEFAULT_TUKEY_C};
use uhull::Error;

#[derive(Parser)]
#[command(name = "uhull", about = "Convex hulls over uncertain points", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArg {
    /// JSON model file.
    #[arg(long)]
    model: String,
}

#[derive(Subcommand)]
enum Command {
    /// Exact membership probabilities (2D sweep or d-dimensional recursion).
    Membership {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        queries: String,
        /// Binary64 probability accumulation instead of exact rationals.
        #[arg(long)]
        fast: bool,
        /// Radial-order facet enumeration for d >= 3.
        #[arg(long)]
        dd_radial: bool,
    },
    /// Exhaustive outcome-enumeration reference.
    Oracle {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        queries: String,
    },
    /// Probability map construction and queries.
    Map {
        #[command(flatten)]
        model: ModelArg,
        #[command(subcommand)]
        action: MapAction,
    },
    /// Monte Carlo index.
    Mc {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(subcommand)]
        action: McAction,
    },
    /// Tukey-depth approximation structure.
    Tukey {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = DEFAULT_TUKEY_C)]
        c: f64,
        /// Override every site probability with a uniform value.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        queries: String,
    },
    /// Beta-hull of a multipoint model.
    Beta {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        beta: String,
        /// Compare against the halfplane-enumeration oracle.
        #[arg(long)]
        check: bool,
        /// Write an SVG rendering.
        #[arg(long)]
        svg: Option<String>,
    },
}

#[derive(Subcommand)]
enum MapAction {
    /// Build the map and serialize it.
    Build {
        #[arg(long)]
        out: String,
    },
    /// Locate queries in a serialized map.
    Query {
        #[arg(long)]
        index: String,
        #[arg(long)]
        queries: String,
    },
    /// Vertex, edge and face counts.
    Stats,
    /// Render the arrangement with faces shaded by probability.
    Svg {
        #[arg(long)]
        out: String,
    },
}

#[derive(Subcommand)]
enum McAction {
    Build {
        #[arg(long)]
        out: String,
    },
    Query {
        /// Reuse a serialized index instead of sampling.
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        queries: String,
    },
}

fn outcome_cap() -> u128 {
    std::env::var("UH_OUTCOME_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_OUTCOME_CAP)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::DimensionMismatch { .. }
        | Error::ProbabilityOutOfRange(_)
        | Error::GroupMassExceedsOne { .. }
        | Error::DegenerateSites(_)
        | Error::ModelTagMismatch(_)
        | Error::InvalidParameter(_)
        | Error::NonUniform(_) => 2,
        Error::Degenerate(_) | Error::DegenerateProjection { .. } => 3,
        Error::CapExceeded { .. } => 4,
        _ => 1,
    }
}

fn read_model(path: &str) -> Result<UncertainPointSet, Error> {
    let text = fs::read_to_string(path)?;
    let model = load_model(&text)?;
    model.validate()?;
    Ok(model)
}

fn read_queries(path: &str, dim: usize) -> Result<Vec<Point>, Error> {
    let text = fs::read_to_string(path)?;
    load_queries(&text, dim)
}

fn query_json(q: &Point) -> serde_json::Value {
    json!(q.coords().iter().map(format_rat).collect::<Vec<String>>())
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Membership {
            model,
            queries,
            fast,
            dd_radial,
        } => {
            let m = read_model(&model.model)?;
            let qs = read_queries(&queries, m.dimension)?;
            let mut results = Vec::new();
            for q in &qs {
                let value = if m.dimension == 2 {
                    if fast {
                        json!(membership_2d::<f64>(q, &m)?)
                    } else {
                        json!(format_rat(&membership_2d::<Rat>(q, &m)?))
                    }
                } else if fast {
                    json!(membership_dd::<f64>(q, &m, dd_radial)?)
                } else {
                    json!(format_rat(&membership_dd::<Rat>(q, &m, dd_radial)?))
                };
                results.push(json!({"query": query_json(q), "probability": value}));
            }
            println!("{}", json!({ "results": results }));
        }
        Command::Oracle { model, queries } => {
            let m = read_model(&model.model)?;
            let qs = read_queries(&queries, m.dimension)?;
            let cap = outcome_cap();
            let mut results = Vec::new();
            for q in &qs {
                let pi = brute_force_membership(q, &m, cap)?;
                results.push(json!({"query": query_json(q), "probability": format_rat(&pi)}));
            }
            println!("{}", json!({ "results": results }));
        }
        Command::Map { model, action } => {
            let m = read_model(&model.model)?;
            match action {
                MapAction::Build { out } => {
                    let map = build_probability_map(&m)?;
                    let file = map.to_file();
                    fs::write(&out, serde_json::to_string(&file)?)?;
                    let stats = map.stats();
                    println!(
                        "{}",
                        json!({"written": out, "vertices": stats.vertices,
                               "edges": stats.edges, "faces": stats.faces})
                    );
                }
                MapAction::Query { index, queries } => {
                    let text = fs::read_to_string(&index)?;
                    let file: ProbMapFile = serde_json::from_str(&text)?;
                    let map = ProbabilityMap::from_file(file)?;
                    let qs = read_queries(&queries, 2)?;
                    let mut results = Vec::new();
                    for q in &qs {
                        let row = match map.locate(q)? {
                            LocateResult::Face { face } => json!({
                                "query": query_json(q),
                                "face": face,
                                "probability": format_rat(map.face_probability(face)),
                            }),
                            LocateResult::OnSkeleton => {
                                // Lower-dimensional faces carry no stored
                                // value; answer directly.
                                let pi = membership_2d::<Rat>(q, &m)?;
                                json!({
                                    "query": query_json(q),
                                    "on_skeleton": true,
                                    "probability": format_rat(&pi),
                                })
                            }
                        };
                        results.push(row);
                    }
                    println!("{}", json!({ "results": results }));
                }
                MapAction::Stats => {
                    let map = build_probability_map(&m)?;
                    let stats = map.stats();
                    println!(
                        "{}",
                        json!({"vertices": stats.vertices, "edges": stats.edges,
                               "faces": stats.faces})
                    );
                }
                MapAction::Svg { out } => {
                    let map = build_probability_map(&m)?;
                    fs::write(&out, uhull::svg::probability_map_svg(&map))?;
                    println!("{}", json!({ "written": out }));
                }
            }
        }
        Command::Mc {
            model,
            eps,
            delta,
            seed,
            action,
        } => {
            let m = read_model(&model.model)?;
            match action {
                McAction::Build { out } => {
                    let idx = build_mc_index(&m, eps, delta, seed)?;
                    let file = idx.to_file(m.total_sites());
                    fs::write(&out, serde_json::to_string(&file)?)?;
                    println!("{}", json!({"written": out, "samples": idx.sample_count}));
                }
                McAction::Query { index, queries } => {
                    let idx = match index {
                        Some(path) => {
                            let text = fs::read_to_string(&path)?;
                            let file: MCIndexFile = serde_json::from_str(&text)?;
                            MCIndex::from_file(file, &m)?
                        }
                        None => build_mc_index(&m, eps, delta, seed)?,
                    };
                    let qs = read_queries(&queries, m.dimension)?;
                    let mut results = Vec::new();
                    for q in &qs {
                        let hits = idx.hits(q)?;
                        results.push(json!({
                            "query": query_json(q),
                            "estimate": hits as f64 / idx.sample_count as f64,
                            "hits": hits,
                            "samples": idx.sample_count,
                        }));
                    }
                    println!("{}", json!({ "results": results }));
                }
            }
        }
        Command::Tukey {
            model,
            c,
            gamma,
            queries,
        } => {
            let mut m = read_model(&model.model)?;
            if let Some(g) = gamma {
                let g = parse_decimal(&g)?;
                for group in &mut m.groups {
                    for site in &mut group.sites {
                        site.prob = g.clone();
                    }
                }
                m.validate()?;
            }
            let ts = build_tukey_structure(&m, c)?;
            let qs = read_queries(&queries, 2)?;
            let mut results = Vec::new();
            for q in &qs {
                let out = query_tukey(&ts, &m, q)?;
                results.push(json!({
                    "query": query_json(q),
                    "estimate": format_rat(&out.estimate),
                    "inside_region": out.inside_region,
                    "n_q": out.n_q,
                }));
            }
            println!(
                "{}",
                json!({
                    "t0": ts.t0,
                    "threshold": ts.t0_threshold,
                    "region_empty": ts.region.is_empty(),
                    "results": results,
                })
            );
        }
        Command::Beta {
            model,
            beta,
            check,
            svg,
        } => {
            let m = read_model(&model.model)?;
            let b = parse_decimal(&beta)?;
            let hull = beta_hull_2d(&m, &b)?;
            let region_json = |r: &ConvexRegion| match r {
                ConvexRegion::WholePlane => json!({"kind": "whole_plane"}),
                ConvexRegion::Empty => json!({"kind": "empty"}),
                ConvexRegion::Point(p) => json!({"kind": "point", "vertex": query_json(p)}),
                ConvexRegion::Segment(a, bb) => json!({
                    "kind": "segment",
                    "vertices": [query_json(a), query_json(bb)],
                }),
                ConvexRegion::Polygon(v) => json!({
                    "kind": "polygon",
                    "vertices": v.iter().map(query_json).collect::<Vec<_>>(),
                }),
                other => json!({"kind": "unbounded", "detail": format!("{other:?}")}),
            };
            let mut doc = json!({"beta": format_rat(&b), "hull": region_json(&hull.region)});
            if check {
                let oracle = beta_hull_oracle(&m, &b)?;
                let agree = match (&hull.region, &oracle.region) {
                    (ConvexRegion::WholePlane, ConvexRegion::WholePlane) => true,
                    (a, b) => a.canonical_vertices() == b.canonical_vertices(),
                };
                doc["oracle_agrees"] = json!(agree);
            }
            if let Some(path) = svg {
                fs::write(&path, uhull::svg::beta_hull_svg(&m, &hull.region))?;
                doc["svg"] = json!(path);
            }
            println!("{doc}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
