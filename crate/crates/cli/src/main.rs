//! Command-line workbench. Every subcommand is deterministic given the
//! scenario file and the seed; all numbers print as exact rationals.

use clap::{Parser, Subcommand};
use parconn::{
    app_map, bun_map, canonical_divisor, elm_minus_exponents, elm_plus_exponents, fuchs_check,
    h1_basis, invert_app_bun, moduli_dimensions, projectively_equal, reconstruct, residue_functional,
    rr_space_basis, twist_exponents, v0_membership, validate_connection, ConnectionData,
    DifferentialForm, Divisor, Error, ReconstructOptions, Sampler, Scenario,
};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "parconn", about = "exact workbench for parabolic logarithmic connections")]
struct Cli {
    /// Scenario JSON file, or the name of a builtin (flagship-n1, flagship-n2).
    #[arg(long, global = true, default_value = "flagship-n1")]
    scenario: String,
    /// Overrides the scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Compact JSON output (default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Pretty-printed JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Genus, moduli dimensions, and cohomology dimensions for the scenario.
    Info,
    /// Basis of the global sections of O(W) for a divisor (default: the twist A).
    RrBasis {
        /// Divisor as JSON entries [[point, mult], ...].
        #[arg(long)]
        divisor: Option<String>,
    },
    /// Overlap representatives of a basis of H^1(O(W)) (default: W = -A - D).
    H1Basis {
        #[arg(long)]
        divisor: Option<String>,
    },
    /// Draw one (gamma, b') pair and print the cup pairing value.
    Pair,
    /// Check the exponent sum relation for the scenario's exponents.
    Fuchs,
    /// Apply an elementary transformation to the scenario's exponents.
    Elm {
        #[arg(long, conflicts_with_all = ["plus", "twist"])]
        minus: bool,
        #[arg(long, conflicts_with = "twist")]
        plus: bool,
        #[arg(long)]
        twist: bool,
        /// Marked point index.
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
    /// Draw bundles and report how often they admit a unique sub-line bundle.
    V0Check {
        #[arg(long, default_value_t = 5)]
        samples: u32,
    },
    /// Validate a connection JSON file (as emitted by `reconstruct`).
    Validate {
        #[arg(long)]
        connection: String,
    },
    /// Reconstruct the connection for one drawn (gamma, b') pair.
    Reconstruct,
    /// Sample pairs, invert, re-extract, and check exact round trips.
    Roundtrip {
        #[arg(long, default_value_t = 5)]
        samples: u32,
    },
}

fn load_scenario(cli: &Cli) -> Result<Scenario, Error> {
    let mut sc = if let Some(s) = Scenario::builtin(&cli.scenario) {
        s
    } else {
        let text = std::fs::read_to_string(&cli.scenario).map_err(|e| Error::Schema {
            field: "scenario".into(),
            message: format!("{}: {e}", cli.scenario),
        })?;
        Scenario::from_json(&text)?
    };
    if let Some(seed) = cli.seed {
        sc.seed = seed;
    }
    Ok(sc)
}

fn parse_divisor(s: &str) -> Result<Divisor, Error> {
    serde_json::from_str(s).map_err(|e| Error::Schema {
        field: "divisor".into(),
        message: e.to_string(),
    })
}

fn emit(cli: &Cli, v: &Value) {
    let out = if cli.pretty {
        serde_json::to_string_pretty(v).unwrap()
    } else {
        serde_json::to_string(v).unwrap()
    };
    println!("{out}");
}

// exit 1 for a failed assertion, 2 for schema or precondition problems
fn run(cli: &Cli) -> Result<bool, Error> {
    let sc = load_scenario(cli)?;
    let curve = sc.curve()?;
    let g = curve.genus() as i64;
    let n = sc.t.len() as i64;
    match &cli.cmd {
        Cmd::Info => {
            let dims = moduli_dimensions(g, n);
            let mut d_div = Divisor::zero();
            for t in &sc.t {
                d_div = d_div.add(&Divisor::point(t.clone()));
            }
            let a = sc.a_divisor();
            let h0 = rr_space_basis(&curve, &a.add(&canonical_divisor(&curve)).add(&d_div))?.len();
            let w = a.neg().sub(&d_div);
            let h1 = rr_space_basis(&curve, &canonical_divisor(&curve).sub(&w))?.len();
            emit(cli, &json!({
                "scenario": sc.name,
                "genus": g,
                "marked_points": n,
                "dimensions": dims,
                "h0_twisted_differentials": h0,
                "h1_dual_twist": h1,
                "target_identity": dims.fixed_determinant_bundles + (3 * g - 3 + n)
                    == dims.fixed_trace_connections,
            }));
            Ok(true)
        }
        Cmd::RrBasis { divisor } => {
            let d = match divisor {
                Some(s) => parse_divisor(s)?,
                None => sc.a_divisor(),
            };
            let basis = rr_space_basis(&curve, &d)?;
            emit(cli, &json!({ "divisor": d, "dim": basis.len(), "basis": basis }));
            Ok(true)
        }
        Cmd::H1Basis { divisor } => {
            let d = match divisor {
                Some(s) => parse_divisor(s)?,
                None => {
                    let mut w = sc.a_divisor().neg();
                    for t in &sc.t {
                        w = w.sub(&Divisor::point(t.clone()));
                    }
                    w
                }
            };
            let lb = sc.bundle(&curve)?;
            let basis = h1_basis(&curve, &lb.cover, &d)?;
            emit(cli, &json!({ "divisor": d, "dim": basis.len(), "cocycles": basis }));
            Ok(true)
        }
        Cmd::Pair => {
            let mut sampler = Sampler::new(&sc)?;
            let pb = sampler.draw_bundle()?;
            let gamma = sampler.draw_gamma();
            let value = residue_functional(
                &curve,
                &sampler.bundle.cover,
                &DifferentialForm::new(gamma.mul(&pb.bprime.cocycle, &curve)),
            )?;
            emit(cli, &json!({
                "gamma": gamma,
                "bprime": pb.bprime.cocycle,
                "pairing": value,
                "on_sigma": value.is_zero(),
                "skips": { "v0": sampler.skips.v0_skips },
            }));
            Ok(true)
        }
        Cmd::Fuchs => {
            let ok = fuchs_check(&sc.nu);
            emit(cli, &json!({ "nu": sc.nu, "fuchs": ok }));
            Ok(ok)
        }
        Cmd::Elm { minus, plus, twist, point } => {
            let out = if *twist {
                twist_exponents(&sc.nu, *point)?
            } else if *plus {
                elm_plus_exponents(&sc.nu, *point)?
            } else if *minus {
                elm_minus_exponents(&sc.nu, *point)?
            } else {
                return Err(Error::Precondition(
                    "choose one of --minus, --plus, --twist".into(),
                ));
            };
            emit(cli, &json!({ "input": sc.nu, "output": out, "fuchs": fuchs_check(&out) }));
            Ok(true)
        }
        Cmd::V0Check { samples } => {
            let mut sampler = Sampler::new(&sc)?;
            let mut hits = 0u32;
            for _ in 0..*samples {
                let pb = sampler.draw_bundle()?;
                if v0_membership(&curve, &pb)? {
                    hits += 1;
                }
            }
            emit(cli, &json!({
                "samples": samples,
                "in_v0": hits,
                "skipped_outside_v0": sampler.skips.v0_skips,
            }));
            Ok(true)
        }
        Cmd::Validate { connection } => {
            let text = std::fs::read_to_string(connection).map_err(|e| Error::Schema {
                field: "connection".into(),
                message: format!("{connection}: {e}"),
            })?;
            let conn: ConnectionData = serde_json::from_str(&text).map_err(|e| Error::Schema {
                field: "connection".into(),
                message: e.to_string(),
            })?;
            let sampler = Sampler::new(&sc)?;
            let report = validate_connection(&curve, &conn, &sampler.line_connection)?;
            let ok = report.pass();
            emit(cli, &json!({ "pass": ok, "report": report }));
            Ok(ok)
        }
        Cmd::Reconstruct => {
            let mut sampler = Sampler::new(&sc)?;
            let sample = sampler.draw()?;
            let res = reconstruct(
                &curve,
                &sample.gamma,
                &sample.pb,
                &sc.nu,
                &sampler.line_connection,
                ReconstructOptions::default(),
            )?;
            emit(cli, &json!({
                "lambda": res.lambda,
                "connection": res.connection,
                "certificates": res.certificates,
                "skips": { "v0": sampler.skips.v0_skips, "sigma": sampler.skips.sigma_skips },
            }));
            Ok(res.certificates.pass())
        }
        Cmd::Roundtrip { samples } => {
            let mut sampler = Sampler::new(&sc)?;
            let mut rows = vec![];
            let mut all_ok = true;
            for i in 0..*samples {
                let sample = sampler.draw()?;
                let pairing = residue_functional(
                    &curve,
                    &sampler.bundle.cover,
                    &DifferentialForm::new(sample.gamma.mul(&sample.pb.bprime.cocycle, &curve)),
                )?;
                let res = invert_app_bun(
                    &curve,
                    &sample.gamma,
                    &sample.pb,
                    &sc.nu,
                    &sampler.line_connection,
                    ReconstructOptions::default(),
                )?;
                let app = app_map(&curve, &res.connection)?;
                let ok = projectively_equal(&app, &sample.gamma)
                    && bun_map(&res.connection) == sample.pb
                    && res.lambda.is_one()
                    && res.certificates.pass();
                if !ok {
                    all_ok = false;
                    rows.push(json!({
                        "sample": i, "ok": false, "pairing": pairing,
                        "gamma": sample.gamma, "connection": res.connection,
                    }));
                } else {
                    rows.push(json!({ "sample": i, "ok": true, "pairing": pairing }));
                }
            }
            emit(cli, &json!({
                "samples": samples,
                "pass": all_ok,
                "results": rows,
                "skips": { "v0": sampler.skips.v0_skips, "sigma": sampler.skips.sigma_skips },
            }));
            Ok(all_ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Schema { .. } | Error::Precondition(_) | Error::Parse(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
