//! Batch CLI over the caloric library: dimension tables, basis emission,
//! heat-Poisson solving, energy sweeps, graph identity checks, and volume
//! growth, with JSON or TSV output.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 internal inconsistency,
//! 4 identity or tolerance breach.

use std::fmt::Write as _;
use std::process::ExitCode;

use caloric::sampling::{random_exact_function, rng_from_seed};
use caloric::*;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "caloric",
    about = "Exact harmonic/caloric polynomial spaces on lattice Cayley graphs \
             and discrete heat-energy diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisKind {
    Harmonic,
    Caloric,
}

#[derive(Args)]
struct CommonOut {
    /// Output format
    #[arg(long, value_enum, default_value = "tsv")]
    output: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension table of the polynomial spaces for k = 0..=k_max
    Dims {
        /// Ambient dimension n of the lattice Z^n
        #[arg(long)]
        n: usize,
        /// Largest degree in the table
        #[arg(long)]
        k_max: u32,
        /// Generating-set file (default: {±e_1, …, ±e_n})
        #[arg(long)]
        gens: Option<String>,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Emit an exact basis of a harmonic or caloric polynomial space
    Basis {
        #[arg(long, value_enum)]
        kind: BasisKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        gens: Option<String>,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Solve (Δ - ∂_t) u = g exactly and print u (self-verified)
    Poisson {
        /// Source polynomial in the text grammar, e.g. "x1^2 t - 1"
        #[arg(long)]
        g: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gens: Option<String>,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Energy report rows over a sweep of radii
    Caccioppoli {
        /// Caloric polynomial in the text grammar (lattice mode)
        #[arg(long, conflicts_with = "graph")]
        u: Option<String>,
        #[arg(long, requires = "u")]
        n: Option<usize>,
        /// Box radius of the lattice window (lattice mode)
        #[arg(long, requires = "u", alias = "box")]
        box_radius: Option<i64>,
        #[arg(long, requires = "u")]
        gens: Option<String>,
        /// Graph file (spectral mode)
        #[arg(long, conflicts_with = "u")]
        graph: Option<String>,
        /// Which spectral mode to use, by |θ| ascending (spectral mode)
        #[arg(long, requires = "graph", default_value = "1")]
        spectral_index: usize,
        /// Center vertex label (spectral mode; default: first vertex)
        #[arg(long, requires = "graph")]
        center: Option<String>,
        /// Comma-separated radii, each >= 1 (exact literals)
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<String>,
        /// Dilation of the denominator cylinder
        #[arg(long, default_value = "36")]
        dilation: u32,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Exact identity checks (Green, product rule, Γ ≥ 0, cutoff, divergence)
    Checks {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "20")]
        trials: usize,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Exact μ(B_R) growth table and fitted exponent
    Volume {
        #[arg(long)]
        graph: String,
        /// Center vertex label
        #[arg(long)]
        x0: String,
        #[arg(long)]
        r_max: u64,
        #[command(flatten)]
        out: CommonOut,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    fn breach(message: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Dims {
            n,
            k_max,
            gens,
            out,
        } => cmd_dims(n, k_max, gens, out.output),
        Command::Basis {
            kind,
            n,
            k,
            gens,
            out,
        } => cmd_basis(kind, n, k, gens, out.output),
        Command::Poisson { g, n, gens, out } => cmd_poisson(&g, n, gens, out.output),
        Command::Caccioppoli {
            u,
            n,
            box_radius,
            gens,
            graph,
            spectral_index,
            center,
            radii,
            dilation,
            out,
        } => cmd_caccioppoli(
            u,
            n,
            box_radius,
            gens,
            graph,
            spectral_index,
            center,
            radii,
            dilation,
            out.output,
        ),
        Command::Checks {
            graph,
            seed,
            trials,
            out,
        } => cmd_checks(&graph, seed, trials, out.output),
        Command::Volume {
            graph,
            x0,
            r_max,
            out,
        } => cmd_volume(&graph, &x0, r_max, out.output),
    }
}

fn load_generating_set(n: usize, path: Option<&str>) -> Result<GeneratingSet, Failure> {
    match path {
        None => {
            if n == 0 {
                return Err(Failure::validation("dimension must be at least 1"));
            }
            Ok(GeneratingSet::standard(n))
        }
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::validation(format!("cannot read '{path}': {e}")))?;
            GeneratingSet::parse(&text, n).map_err(|e| Failure::validation(e.to_string()))
        }
    }
}

fn load_graph(path: &str) -> Result<WeightedGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("cannot read '{path}': {e}")))?;
    WeightedGraph::parse_text(&text).map_err(|e| Failure::validation(e.to_string()))
}

fn generators_json(s: &GeneratingSet) -> Value {
    json!(s.generators())
}

fn emit_table(format: OutputFormat, header: &[&str], rows: &[Vec<String>], json_doc: Value) {
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&json_doc).unwrap()),
        OutputFormat::Tsv => {
            println!("{}", header.join("\t"));
            for row in rows {
                println!("{}", row.join("\t"));
            }
        }
    }
}

fn cmd_dims(
    n: usize,
    k_max: u32,
    gens: Option<String>,
    format: OutputFormat,
) -> Result<(), Failure> {
    let s = load_generating_set(n, gens.as_deref())?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for k in 0..=k_max {
        let dim_pk = monomial_basis(n, k, false).len();
        let dim_parabolic = monomial_basis(n, k, true).len();
        let dim_harmonic = harmonic_basis(&s, k).dimension();
        let dim_caloric = caloric_basis(&s, k).dimension();
        let formula = caloric_dimension_formula(n, k);
        let matches = dim_caloric as u64 == formula;
        let bound_satisfied = if k >= 2 && k % 2 == 0 {
            let half = k / 2;
            Some(dim_caloric <= (half as usize + 1) * dim_harmonic)
        } else {
            None
        };
        rows.push(vec![
            k.to_string(),
            dim_pk.to_string(),
            dim_parabolic.to_string(),
            dim_harmonic.to_string(),
            dim_caloric.to_string(),
            formula.to_string(),
            matches.to_string(),
            bound_satisfied.map_or("-".to_string(), |b| b.to_string()),
        ]);
        json_rows.push(json!({
            "k": k,
            "dim_pk": dim_pk,
            "dim_parabolic": dim_parabolic,
            "dim_harmonic": dim_harmonic,
            "dim_caloric": dim_caloric,
            "formula": formula,
            "match": matches,
            "bound_satisfied": bound_satisfied,
        }));
    }
    let doc = json!({
        "command": "dims",
        "n": n,
        "k_max": k_max,
        "generators": generators_json(&s),
        "rows": json_rows,
    });
    emit_table(
        format,
        &[
            "k",
            "dim_pk",
            "dim_parabolic",
            "dim_harmonic",
            "dim_caloric",
            "formula",
            "match",
            "bound_satisfied",
        ],
        &rows,
        doc,
    );
    Ok(())
}

fn cmd_basis(
    kind: BasisKind,
    n: usize,
    k: u32,
    gens: Option<String>,
    format: OutputFormat,
) -> Result<(), Failure> {
    let s = load_generating_set(n, gens.as_deref())?;
    let basis = match kind {
        BasisKind::Harmonic => harmonic_basis(&s, k),
        BasisKind::Caloric => caloric_basis(&s, k),
    };
    let (formula, matches) = match kind {
        BasisKind::Caloric => {
            let formula = caloric_dimension_formula(n, k);
            (Some(formula), Some(basis.dimension() as u64 == formula))
        }
        BasisKind::Harmonic => (None, None),
    };
    let polynomials: Vec<String> = basis.polynomials.iter().map(|p| p.to_string()).collect();
    let rows: Vec<Vec<String>> = polynomials
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), p.clone()])
        .collect();
    let doc = json!({
        "kind": basis.kind.as_str(),
        "n": n,
        "k": k,
        "generators": generators_json(&s),
        "dimension": basis.dimension(),
        "polynomials": polynomials,
        "formula_dimension": formula,
        "match": matches,
    });
    emit_table(format, &["index", "polynomial"], &rows, doc);
    Ok(())
}

fn cmd_poisson(
    g_text: &str,
    n: usize,
    gens: Option<String>,
    format: OutputFormat,
) -> Result<(), Failure> {
    let s = load_generating_set(n, gens.as_deref())?;
    let g =
        SpaceTimePolynomial::parse(g_text, n).map_err(|e| Failure::validation(e.to_string()))?;
    let u = poisson_solve(&s, &g).map_err(|e| Failure::internal(e.to_string()))?;
    if heat_operator(&s, &u) != g {
        return Err(Failure::internal(
            "self-verification failed: (Δ - ∂_t)u does not reproduce g",
        ));
    }
    match format {
        OutputFormat::Tsv => println!("{u}"),
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "poisson",
                "n": n,
                "g": g.to_string(),
                "u": u.to_string(),
                "verified": true,
            }))
            .unwrap()
        ),
    }
    Ok(())
}

fn parse_radii(tokens: &[String]) -> Result<Vec<Rational>, Failure> {
    let one = rational_int(1);
    tokens
        .iter()
        .map(|tok| {
            let r = parse_exact_number(tok).map_err(Failure::validation)?;
            if r < one {
                return Err(Failure::validation(format!(
                    "radius {tok} rejected: R >= 1 required"
                )));
            }
            Ok(r)
        })
        .collect()
}

fn sweep_threads(jobs: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, usize::from);
    let cap = std::env::var("CALORIC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(available);
    cap.min(jobs).max(1)
}

#[allow(clippy::too_many_arguments)]
fn cmd_caccioppoli(
    u_text: Option<String>,
    n: Option<usize>,
    box_radius: Option<i64>,
    gens: Option<String>,
    graph_path: Option<String>,
    spectral_index: usize,
    center: Option<String>,
    radii_tokens: Vec<String>,
    dilation: u32,
    format: OutputFormat,
) -> Result<(), Failure> {
    let radii = parse_radii(&radii_tokens)?;
    if let Some(u_text) = u_text {
        let n = n.ok_or_else(|| Failure::validation("--n is required with --u"))?;
        let box_radius =
            box_radius.ok_or_else(|| Failure::validation("--box is required with --u"))?;
        let s = load_generating_set(n, gens.as_deref())?;
        let u = SpaceTimePolynomial::parse(&u_text, n)
            .map_err(|e| Failure::validation(e.to_string()))?;
        let residual = heat_operator(&s, &u);
        if !residual.is_zero() {
            return Err(Failure::validation(format!(
                "u is not caloric: (Δ - ∂_t)u = {residual}"
            )));
        }
        let segment =
            LatticeSegment::new(s, box_radius).map_err(|e| Failure::validation(e.to_string()))?;
        let center = vec![0i64; n];

        let threads = sweep_threads(radii.len());
        let mut reports: Vec<Option<Result<CaccioppoliReport<Rational>, CylinderError>>> =
            std::iter::repeat_with(|| None).take(radii.len()).collect();
        std::thread::scope(|scope| {
            for (chunk_id, chunk) in reports
                .chunks_mut(radii.len().div_ceil(threads))
                .enumerate()
            {
                let segment = &segment;
                let u = &u;
                let radii = &radii;
                let center = &center;
                let chunk_size = radii.len().div_ceil(threads);
                scope.spawn(move || {
                    for (offset, slot) in chunk.iter_mut().enumerate() {
                        let idx = chunk_id * chunk_size + offset;
                        *slot = Some(caccioppoli_report(
                            segment,
                            u,
                            center,
                            &radii[idx],
                            dilation,
                        ));
                    }
                });
            }
        });

        let mut rows = Vec::new();
        let mut json_rows = Vec::new();
        let mut max_ratio: Option<Rational> = None;
        for (radius, report) in radii.iter().zip(reports) {
            let report = report
                .expect("sweep filled every slot")
                .map_err(|e| Failure::validation(format!("radius {radius}: {e}")))?;
            max_ratio = Some(match max_ratio {
                None => report.ratio.clone(),
                Some(m) => m.max(report.ratio.clone()),
            });
            rows.push(vec![
                radius.to_string(),
                report.gradient_term.to_string(),
                report.time_term.to_string(),
                report.denominator.to_string(),
                report.ratio.to_string(),
            ]);
            json_rows.push(json!({
                "radius": radius.to_string(),
                "gradient_term": report.gradient_term.to_string(),
                "time_term": report.time_term.to_string(),
                "denominator": report.denominator.to_string(),
                "ratio": report.ratio.to_string(),
            }));
        }
        let max_ratio = max_ratio.expect("at least one radius").to_string();
        let doc = json!({
            "command": "caccioppoli",
            "mode": "lattice",
            "u": u.to_string(),
            "n": n,
            "box_radius": box_radius,
            "dilation": dilation,
            "rows": json_rows,
            "max_ratio": max_ratio,
        });
        emit_table(
            format,
            &[
                "radius",
                "gradient_term",
                "time_term",
                "denominator",
                "ratio",
            ],
            &rows,
            doc,
        );
        if format == OutputFormat::Tsv {
            println!("# max_ratio\t{max_ratio}");
        }
        Ok(())
    } else {
        let path = graph_path.expect("clap enforces --u or --graph");
        let graph = load_graph(&path)?;
        if spectral_index == 0 {
            return Err(Failure::validation("--spectral-index is 1-based"));
        }
        let fields = spectral_ancient_solutions(&graph, spectral_index)
            .map_err(|e| Failure::validation(e.to_string()))?;
        let field = &fields[spectral_index - 1];
        let center_vertex = match center {
            None => 0,
            Some(label) => graph
                .index_of(&label)
                .ok_or_else(|| Failure::validation(format!("unknown vertex '{label}'")))?,
        };
        let mut rows = Vec::new();
        let mut json_rows = Vec::new();
        let mut max_ratio = f64::NEG_INFINITY;
        for radius in &radii {
            let report =
                caccioppoli_report_spectral(&graph, field, center_vertex, radius, dilation)
                    .map_err(|e| Failure::validation(format!("radius {radius}: {e}")))?;
            max_ratio = max_ratio.max(report.ratio);
            rows.push(vec![
                radius.to_string(),
                format!("{:.12e}", report.gradient_term),
                format!("{:.12e}", report.time_term),
                format!("{:.12e}", report.denominator),
                format!("{:.12e}", report.ratio),
            ]);
            json_rows.push(json!({
                "radius": radius.to_string(),
                "gradient_term": report.gradient_term,
                "time_term": report.time_term,
                "denominator": report.denominator,
                "ratio": report.ratio,
            }));
        }
        let doc = json!({
            "command": "caccioppoli",
            "mode": "spectral",
            "graph": path,
            "spectral_index": spectral_index,
            "theta": field.modes[0].0,
            "dilation": dilation,
            "rows": json_rows,
            "max_ratio": max_ratio,
        });
        emit_table(
            format,
            &[
                "radius",
                "gradient_term",
                "time_term",
                "denominator",
                "ratio",
            ],
            &rows,
            doc,
        );
        if format == OutputFormat::Tsv {
            println!("# max_ratio\t{max_ratio:.12e}");
        }
        Ok(())
    }
}

struct CheckOutcome {
    name: &'static str,
    detail: String,
    pass: bool,
}

fn cmd_checks(
    graph_path: &str,
    seed: u64,
    trials: usize,
    format: OutputFormat,
) -> Result<(), Failure> {
    let graph = load_graph(graph_path)?;
    let mut rng = rng_from_seed(seed);
    let mut outcomes = Vec::new();

    let mut worst_green = Rational::zero();
    let mut worst_product = Rational::zero();
    let mut gamma_ok = true;
    let mut worst_divergence = Rational::zero();
    for _ in 0..trials {
        let f = random_exact_function(&mut rng, &graph);
        let g = random_exact_function(&mut rng, &graph);
        let green = green_identity_residual(&graph, &f, &g)
            .map_err(|e| Failure::validation(e.to_string()))?
            .abs();
        worst_green = worst_green.max(green);
        for (x, y, _) in graph.edges() {
            let r = product_rule_residual(&graph, &f, &g, x, y)
                .map_err(|e| Failure::validation(e.to_string()))?
                .abs();
            worst_product = worst_product.max(r);
        }
        let gam = gamma(&graph, &f);
        gamma_ok &= gam
            .exact_values()
            .expect("exact mode")
            .iter()
            .all(|v| !v.is_negative());
        let div = divergence_residual(&graph, &f)
            .map_err(|e| Failure::validation(e.to_string()))?
            .abs();
        worst_divergence = worst_divergence.max(div);
    }
    outcomes.push(CheckOutcome {
        name: "green_identity",
        detail: format!("max |residual| = {worst_green}"),
        pass: worst_green.is_zero(),
    });
    outcomes.push(CheckOutcome {
        name: "product_rule",
        detail: format!("max |residual| = {worst_product}"),
        pass: worst_product.is_zero(),
    });
    outcomes.push(CheckOutcome {
        name: "gamma_nonnegative",
        detail: String::from(if gamma_ok {
            "all values >= 0"
        } else {
            "negative value seen"
        }),
        pass: gamma_ok,
    });
    outcomes.push(CheckOutcome {
        name: "divergence_identity",
        detail: format!("max |Σ Δf μ| = {worst_divergence}"),
        pass: worst_divergence.is_zero(),
    });

    // cutoff bounds at a few radii around the first vertex
    let mut cutoff_ok = true;
    let two = rational_int(2);
    for radius in [rational_int(1), rational_int(2), rational_int(3)] {
        let eta = cutoff(&graph, 0, &radius);
        let values = eta.exact_values().expect("exact mode");
        let bound = &two / &radius;
        cutoff_ok &= values
            .iter()
            .all(|v| !v.is_negative() && *v <= rational_int(1));
        for x in 0..graph.vertex_count() {
            for (y, _) in graph.neighbors(x) {
                cutoff_ok &= (&values[*y] - &values[x]).abs() <= bound;
            }
        }
    }
    outcomes.push(CheckOutcome {
        name: "cutoff_bounds",
        detail: String::from("0 <= η <= 1, η|B_R = 1, support in B_2R, |∇η| <= 2/R"),
        pass: cutoff_ok,
    });

    let all_pass = outcomes.iter().all(|o| o.pass);
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                o.name.to_string(),
                trials.to_string(),
                o.detail.clone(),
                if o.pass { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let doc = json!({
        "command": "checks",
        "graph": graph_path,
        "seed": seed,
        "trials": trials,
        "results": outcomes.iter().map(|o| json!({
            "name": o.name,
            "detail": o.detail,
            "pass": o.pass,
        })).collect::<Vec<_>>(),
        "all_pass": all_pass,
    });
    emit_table(format, &["check", "trials", "detail", "status"], &rows, doc);
    if all_pass {
        Ok(())
    } else {
        Err(Failure::breach("one or more identity checks failed"))
    }
}

fn cmd_volume(graph_path: &str, x0: &str, r_max: u64, format: OutputFormat) -> Result<(), Failure> {
    let graph = load_graph(graph_path)?;
    let center = graph
        .index_of(x0)
        .ok_or_else(|| Failure::validation(format!("unknown vertex '{x0}'")))?;
    let growth =
        volume_growth_fit(&graph, center, r_max).map_err(|e| Failure::validation(e.to_string()))?;
    let rows: Vec<Vec<String>> = growth
        .table
        .iter()
        .map(|(r, m)| vec![r.to_string(), m.to_string()])
        .collect();
    let doc = json!({
        "command": "volume",
        "graph": graph_path,
        "x0": x0,
        "r_max": r_max,
        "rows": growth.table.iter().map(|(r, m)| json!({
            "r": r,
            "mu_ball": m.to_string(),
        })).collect::<Vec<_>>(),
        "alpha_hat": growth.alpha_hat,
    });
    emit_table(format, &["r", "mu_ball"], &rows, doc);
    if format == OutputFormat::Tsv {
        let mut line = String::from("# alpha_hat\t");
        let _ = write!(line, "{:.6}", growth.alpha_hat);
        println!("{line}");
    }
    Ok(())
}
