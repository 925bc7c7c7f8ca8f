//! Chebyshev centers, optimality certificates, and extremal-set diagnostics
//! in finite-dimensional l_p spaces, on the command line.
//!
//! Exit codes: `0` success; `1` a sampled inequality violation
//! (`check-lemma`) or an internal/output failure; `2` input parse or
//! validation error; `3` solver nonconvergence (the center report still
//! carries the best iterate); `4` the candidate set emptied during simplex
//! extraction.

mod format;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use format::PointSetFile;
use lpcheb::{
    chebyshev_center, chernykh_check, extract_certificate, extract_simplex, extremality_report,
    feasibility_check, generate_basis_set, generate_hadamard_set, jung_constant,
    packing_lower_bound, t_identity, verify_certificate, ExtractError, ExtractionParams,
    ExtremalError, LpSpace, PointSet, SolverConfig, SolverError, ACTIVE_TOL_DEFAULT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use report::{sha256_hex, RunReport};
use serde::Serialize;
use std::fmt;
use std::io::Read;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "lpcheb",
    version,
    about = "Chebyshev centers, optimality certificates, and extremal-set \
             diagnostics in l_p spaces (1 < p < infinity)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the Chebyshev center of a point-set file and certify it
    Center {
        /// Point-set file, or - for stdin
        #[arg(default_value = "-")]
        input: String,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Compare the radius against the Jung bound: ratio and gap
    Ratio {
        /// Point-set file, or - for stdin
        #[arg(default_value = "-")]
        input: String,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Extract m + 1 points whose pairwise distances all nearly reach the
    /// diameter
    Simplex {
        /// Point-set file, or - for stdin
        #[arg(default_value = "-")]
        input: String,
        /// The simplex has m + 1 vertices
        #[arg(long)]
        m: usize,
        /// Relative slack on powered edge lengths, in (0, 1)
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Write a canonical point-set file for one of the built-in families
    Generate {
        /// Which family to generate
        #[arg(value_enum)]
        kind: Kind,
        /// basis: the number of points n >= 2; hadamard: the exponent
        /// k >= 1 of the 2^k-point family
        #[arg(long)]
        size: u32,
        /// Norm exponent of the ambient space
        #[arg(long)]
        p: f64,
        /// Output path, or - for stdout
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Sample the coordinatewise power inequality and report violations
    CheckLemma {
        /// Norm exponent of the ambient space
        #[arg(long)]
        p: f64,
        /// Number of sampled (a, b) pairs
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Seed for the sampler
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pairs are drawn uniformly from [-range, range]^2
        #[arg(long, default_value_t = 10.0)]
        range: f64,
    },
    /// Emit a CSV of diameter, radius, ratio, and gap across family sizes
    Trend {
        /// Which family to sweep
        #[arg(value_enum)]
        kind: Kind,
        /// Norm exponent of the ambient space
        #[arg(long)]
        p: f64,
        /// Comma-separated sizes (basis: n values; hadamard: k values)
        #[arg(long, required = true, value_delimiter = ',')]
        sizes: Vec<u32>,
        /// Also compute a packing lower bound for simplices with m + 1
        /// vertices at each size
        #[arg(long)]
        m: Option<usize>,
        /// Output path, or - for stdout
        #[arg(long, default_value = "-")]
        out: String,
        #[command(flatten)]
        solver: SolverFlags,
    },
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Certificate residual at which a solve is accepted
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Iteration budget across all solver phases and restarts
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Seed for the randomized restart perturbations
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverFlags {
    fn config(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            seed: self.seed,
            ..SolverConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Basis,
    Hadamard,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Basis => "basis",
            Kind::Hadamard => "hadamard",
        })
    }
}

#[derive(Debug, Error)]
enum CliError {
    /// Exit 2: the input or a parameter failed validation.
    #[error("{0}")]
    Input(String),
    /// Exit 4: simplex extraction ran out of candidates.
    #[error("simplex extraction: {0}")]
    Infeasible(String),
    /// Exit 1: output or internal failure.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 4,
        }
    }
}

impl From<format::FormatError> for CliError {
    fn from(e: format::FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Center { input, solver } => cmd_center(&input, &solver),
        Command::Ratio { input, solver } => cmd_ratio(&input, &solver),
        Command::Simplex { input, m, delta, solver } => cmd_simplex(&input, m, delta, &solver),
        Command::Generate { kind, size, p, out } => cmd_generate(kind, size, p, &out),
        Command::CheckLemma { p, samples, seed, range } => cmd_check_lemma(p, samples, seed, range),
        Command::Trend { kind, p, sizes, m, out, solver } => {
            cmd_trend(kind, p, &sizes, m, &out, &solver)
        }
    }
}

fn argv() -> Vec<String> {
    std::env::args().collect()
}

fn read_input(path: &str) -> Result<(String, String), CliError> {
    let bytes = if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::Input(format!("input: {e}")))?;
        buf
    } else {
        std::fs::read(path).map_err(|e| CliError::Input(format!("input {path}: {e}")))?
    };
    let digest = sha256_hex(&bytes);
    let text =
        String::from_utf8(bytes).map_err(|_| CliError::Input("input: not valid UTF-8".into()))?;
    Ok((text, digest))
}

fn write_output(path: &str, text: &str) -> Result<(), CliError> {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| CliError::Failure(format!("output {path}: {e}")))
    }
}

fn load_point_set(input: &str) -> Result<(PointSet, String), CliError> {
    let (text, digest) = read_input(input)?;
    let file = PointSetFile::parse(&text)?;
    Ok((file.to_point_set()?, digest))
}

#[derive(Debug, Serialize)]
struct CertificateSection {
    active_indices: Vec<usize>,
    weights: Vec<f64>,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct VerificationSection {
    pairing_residual: f64,
    distance_residual: f64,
    functional_norm_residual: f64,
    cancellation_residual: f64,
    weight_sum_residual: f64,
    max_residual: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct CenterReport {
    p: f64,
    n: usize,
    dim: usize,
    converged: bool,
    iterations: usize,
    radius: f64,
    center: Vec<f64>,
    certificate: CertificateSection,
    verification: VerificationSection,
    /// Weighted pairwise spread of the certificate; 2 * radius when exact.
    t_identity: f64,
    t_identity_deviation: f64,
}

fn cmd_center(input: &str, solver: &SolverFlags) -> Result<i32, CliError> {
    let start = Instant::now();
    let (a, digest) = load_point_set(input)?;
    let cfg = solver.config()?;
    let (result, converged) = match chebyshev_center(&a, &cfg) {
        Ok(r) => (r, true),
        Err(SolverError::NonConvergence { best, .. }) => (*best, false),
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let cert = extract_certificate(&a, &result.center, ACTIVE_TOL_DEFAULT)
        .map_err(|e| CliError::Failure(format!("certificate extraction: {e}")))?;
    let verification = verify_certificate(&a, &result.center, &cert, cfg.tol);
    let max_residual = verification.max_residual();
    let t = t_identity(&a, &cert);
    let results = CenterReport {
        p: a.space().p(),
        n: a.len(),
        dim: a.dim(),
        converged,
        iterations: result.iterations,
        radius: result.radius,
        center: result.center,
        certificate: CertificateSection {
            active_indices: cert.active_indices,
            weights: cert.weights,
            residual: cert.residual,
        },
        verification: VerificationSection {
            pairing_residual: verification.pairing_residual,
            distance_residual: verification.distance_residual,
            functional_norm_residual: verification.functional_norm_residual,
            cancellation_residual: verification.cancellation_residual,
            weight_sum_residual: verification.weight_sum_residual,
            max_residual,
            passed: max_residual <= cfg.tol,
        },
        t_identity: t,
        t_identity_deviation: (t - 2.0 * result.radius).abs(),
    };
    let summary = format!(
        "center: n={} dim={} p={} radius {:.12} residual {:.3e} ({} iterations)",
        results.n,
        results.dim,
        results.p,
        results.radius,
        results.certificate.residual,
        results.iterations
    );
    RunReport {
        command: argv(),
        input_sha256: Some(digest),
        results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    }
    .emit();
    if converged {
        eprintln!("{summary}");
        Ok(0)
    } else {
        eprintln!("{summary} [did not converge; best iterate reported]");
        Ok(3)
    }
}

#[derive(Debug, Serialize)]
struct RatioReport {
    p: f64,
    n: usize,
    dim: usize,
    converged: bool,
    diameter: f64,
    radius: f64,
    jung: f64,
    ratio: f64,
    gap: f64,
    certificate_residual: f64,
}

fn cmd_ratio(input: &str, solver: &SolverFlags) -> Result<i32, CliError> {
    let start = Instant::now();
    let (a, digest) = load_point_set(input)?;
    let cfg = solver.config()?;
    let (results, converged) = match extremality_report(&a, &cfg) {
        Ok(rep) => (
            RatioReport {
                p: a.space().p(),
                n: a.len(),
                dim: a.dim(),
                converged: true,
                diameter: rep.diameter,
                radius: rep.radius,
                jung: rep.jung,
                ratio: rep.ratio,
                gap: rep.gap,
                certificate_residual: rep.certificate_residual,
            },
            true,
        ),
        Err(ExtremalError::Solver(SolverError::NonConvergence { best, .. })) => {
            let diameter = a.diameter();
            let jung = jung_constant(a.space()).value;
            let bound = jung * diameter;
            (
                RatioReport {
                    p: a.space().p(),
                    n: a.len(),
                    dim: a.dim(),
                    converged: false,
                    diameter,
                    radius: best.radius,
                    jung,
                    ratio: best.radius / bound,
                    gap: bound - best.radius,
                    certificate_residual: best.certificate_residual,
                },
                false,
            )
        }
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let summary = format!(
        "ratio: n={} p={} radius {:.12} / bound {:.12} = {:.6} (gap {:.3e})",
        results.n,
        results.p,
        results.radius,
        results.jung * results.diameter,
        results.ratio,
        results.gap
    );
    RunReport {
        command: argv(),
        input_sha256: Some(digest),
        results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    }
    .emit();
    if converged {
        eprintln!("{summary}");
        Ok(0)
    } else {
        eprintln!("{summary} [did not converge; best iterate reported]");
        Ok(3)
    }
}

#[derive(Debug, Serialize)]
struct SimplexReport {
    p: f64,
    n: usize,
    dim: usize,
    m: usize,
    delta: f64,
    vertex_indices: Vec<usize>,
    /// Smallest pairwise distance among the selected vertices.
    min_edge: f64,
    diameter: f64,
    /// diameter * (1 - delta)^(1/p), the floor every edge must reach.
    edge_floor: f64,
    /// Certificate weight outside the heavy set.
    lambda: f64,
    heavy_set: Vec<usize>,
    t_values: Vec<f64>,
    /// Per selected vertex: certificate weight outside its neighborhood.
    neighborhood_masses: Vec<f64>,
    feasibility_margin: f64,
    feasible: bool,
}

fn cmd_simplex(input: &str, m: usize, delta: f64, solver: &SolverFlags) -> Result<i32, CliError> {
    let start = Instant::now();
    let (a, digest) = load_point_set(input)?;
    let cfg = solver.config()?;
    let result = match extract_simplex(&a, &ExtractionParams { m, delta }, &cfg) {
        Ok(r) => r,
        Err(ExtractError::IntersectionEmpty { found, need, margin }) => {
            return Err(CliError::Infeasible(format!(
                "candidate set emptied after {found} of {need} vertices \
                 (feasibility margin {margin:.6e}); the set is too far from \
                 extremal for m = {m} at delta = {delta}"
            )));
        }
        Err(ExtractError::Solver(SolverError::NonConvergence { residual, tol, .. })) => {
            eprintln!(
                "simplex: the center solve behind the certificate stopped at \
                 residual {residual:.3e} (tol {tol:.1e}); no extraction attempted"
            );
            return Ok(3);
        }
        Err(
            e @ (ExtractError::InvalidParams(_)
            | ExtractError::DegenerateSet
            | ExtractError::TooFewPoints { .. }),
        ) => return Err(CliError::Input(e.to_string())),
        Err(e) => return Err(CliError::Failure(e.to_string())),
    };
    let d = a.diameter();
    let p = a.space().p();
    let check = feasibility_check(&result.diagnostics.neighborhood_masses, m)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let results = SimplexReport {
        p,
        n: a.len(),
        dim: a.dim(),
        m,
        delta,
        vertex_indices: result.vertex_indices.clone(),
        min_edge: result.min_edge,
        diameter: d,
        edge_floor: d * (1.0 - delta).powf(1.0 / p),
        lambda: result.diagnostics.lambda,
        heavy_set: result.diagnostics.heavy_set.clone(),
        t_values: result.diagnostics.t_values.clone(),
        neighborhood_masses: result.diagnostics.neighborhood_masses.clone(),
        feasibility_margin: check.margin,
        feasible: check.feasible,
    };
    eprintln!(
        "simplex: {} vertices with min edge {:.9} >= floor {:.9} (diameter {:.9})",
        results.vertex_indices.len(),
        results.min_edge,
        results.edge_floor,
        d
    );
    RunReport {
        command: argv(),
        input_sha256: Some(digest),
        results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    }
    .emit();
    Ok(0)
}

fn generate_family(kind: Kind, size: u32, space: LpSpace) -> Result<PointSet, CliError> {
    match kind {
        Kind::Basis => generate_basis_set(size as usize, space),
        Kind::Hadamard => generate_hadamard_set(size, space),
    }
    .map_err(|e| CliError::Input(e.to_string()))
}

fn cmd_generate(kind: Kind, size: u32, p: f64, out: &str) -> Result<i32, CliError> {
    let space = LpSpace::new(p).map_err(|e| CliError::Input(e.to_string()))?;
    let set = generate_family(kind, size, space)?;
    let file = PointSetFile::from_point_set(&set);
    write_output(out, &file.canonical())?;
    let dest = if out == "-" { "stdout" } else { out };
    eprintln!(
        "generate: {kind} size {size} p {p} -> {} points of dimension {} ({dest})",
        set.len(),
        set.dim()
    );
    Ok(0)
}

#[derive(Debug, Serialize)]
struct LemmaReport {
    p: f64,
    samples: u64,
    seed: u64,
    range: f64,
    /// Residuals below this count as violations.
    threshold: f64,
    min_residual: f64,
    violations: u64,
    worst_a: f64,
    worst_b: f64,
}

fn cmd_check_lemma(p: f64, samples: u64, seed: u64, range: f64) -> Result<i32, CliError> {
    const THRESHOLD: f64 = -1e-10;
    let start = Instant::now();
    if !range.is_finite() || range <= 0.0 {
        return Err(CliError::Input(format!("range must be finite and positive, got {range}")));
    }
    if samples == 0 {
        return Err(CliError::Input("samples must be at least 1".into()));
    }
    let space = LpSpace::new(p).map_err(|e| CliError::Input(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_residual = f64::INFINITY;
    let mut worst = (0.0_f64, 0.0_f64);
    let mut violations = 0u64;
    for _ in 0..samples {
        let a: f64 = rng.gen_range(-range..range);
        let b: f64 = rng.gen_range(-range..range);
        let residual = chernykh_check(space, a, b);
        if residual < min_residual {
            min_residual = residual;
            worst = (a, b);
        }
        if residual < THRESHOLD {
            violations += 1;
        }
    }
    let results = LemmaReport {
        p,
        samples,
        seed,
        range,
        threshold: THRESHOLD,
        min_residual,
        violations,
        worst_a: worst.0,
        worst_b: worst.1,
    };
    RunReport {
        command: argv(),
        input_sha256: None,
        results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    }
    .emit();
    if violations > 0 {
        eprintln!(
            "check-lemma: p={p}: {violations} of {samples} samples violate \
             (worst {min_residual:.3e} at ({:.4}, {:.4}))",
            worst.0, worst.1
        );
        Ok(1)
    } else {
        eprintln!("check-lemma: p={p}: clean over {samples} samples (min residual {min_residual:.3e})");
        Ok(0)
    }
}

fn cmd_trend(
    kind: Kind,
    p: f64,
    sizes: &[u32],
    m: Option<usize>,
    out: &str,
    solver: &SolverFlags,
) -> Result<i32, CliError> {
    if sizes.is_empty() {
        return Err(CliError::Input("sizes must contain at least one entry".into()));
    }
    let space = LpSpace::new(p).map_err(|e| CliError::Input(e.to_string()))?;
    let cfg = solver.config()?;
    let mut csv = String::from("size,diameter,radius,jung,ratio,gap");
    if m.is_some() {
        csv.push_str(",packing");
    }
    csv.push('\n');
    for &size in sizes {
        let set = generate_family(kind, size, space)?;
        let rep = match extremality_report(&set, &cfg) {
            Ok(r) => r,
            Err(ExtremalError::Solver(SolverError::NonConvergence { residual, tol, .. })) => {
                eprintln!(
                    "trend: {kind} size {size}: solve stopped at residual \
                     {residual:.3e} (tol {tol:.1e}); no CSV written"
                );
                return Ok(3);
            }
            Err(e) => return Err(CliError::Input(e.to_string())),
        };
        csv.push_str(&format!(
            "{size},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            rep.diameter, rep.radius, rep.jung, rep.ratio, rep.gap
        ));
        if let Some(m) = m {
            let bound = packing_lower_bound(&set, m, &cfg).map_err(|e| match e {
                ExtractError::Solver(SolverError::NonConvergence { .. }) => {
                    CliError::Failure(format!("packing bound for size {size}: {e}"))
                }
                other => CliError::Input(format!("packing bound for size {size}: {other}")),
            })?;
            csv.push_str(&format!(",{bound:.16e}"));
        }
        csv.push('\n');
    }
    write_output(out, &csv)?;
    let dest = if out == "-" { "stdout" } else { out };
    eprintln!("trend: {kind} p {p} -> {} rows ({dest})", sizes.len());
    Ok(0)
}
