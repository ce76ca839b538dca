use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qlens_core::{
    graph_k_theory, lens_graph, lens_k_theory, skew_product, smith_normal_form, sphere_graph,
    weight_labelling, wp1_canonical, wp1_graph, wp_k_theory, DirectedMultigraph, IntegerMatrix,
    KTheory, Multiplicity, WeightVector, WprojError,
};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    Sphere,
    Skew,
    LensGraph,
    LensK,
    Wp1Graph,
    WpK,
    Snf,
    GraphK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
    Text,
}

/// Graphs and K-theory of quantum lens spaces and weighted projective spaces.
#[derive(Debug, Parser)]
#[command(name = "qlens", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Sphere dimension parameter; defaults to one less than the number of weights.
    #[arg(long = "n")]
    n: Option<usize>,
    /// Order of the cyclic group.
    #[arg(long = "N")]
    modulus: Option<u64>,
    /// Comma-separated positive weights m_0,...,m_n.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON input for `snf` and `graph-k`; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Hypothesis(String),
    Parse(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Hypothesis(_) => 3,
            Failure::Parse(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Hypothesis(m) | Failure::Parse(m) | Failure::Io(m) => m,
        }
    }
}

fn usage(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("qlens: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qlens: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    check_flags(cli)?;
    let text = match cli.command {
        Command::Sphere => {
            let n = cli.n.ok_or_else(|| usage("sphere needs --n"))?;
            render_graph(&sphere_graph(n), cli.format)
        }
        Command::Skew => {
            let (n, modulus, m) = lens_args(cli)?;
            let labelling = weight_labelling(n, modulus, &m).map_err(usage)?;
            let skew = skew_product(&sphere_graph(n), &labelling).map_err(usage)?;
            render_graph(&skew, cli.format)
        }
        Command::LensGraph => {
            let (n, modulus, m) = lens_args(cli)?;
            render_graph(&lens_graph(n, modulus, &m).map_err(usage)?, cli.format)
        }
        Command::LensK => {
            let (n, modulus, m) = lens_args(cli)?;
            render_k(&lens_k_theory(n, modulus, &m).map_err(usage)?, cli.format)?
        }
        Command::Wp1Graph => {
            let m = weights(cli)?;
            let [m0, m1] = m.as_slice() else {
                return Err(usage("wp1-graph needs exactly two weights"));
            };
            let g = wp1_graph(*m0, *m1).map_err(usage)?;
            let canon = wp1_canonical(*m0, *m1).map_err(usage)?;
            let (r0, r1) = canon.reduced;
            match cli.format.unwrap_or(Format::Dot) {
                Format::Json => json!({
                    "graph": serde_json::from_str::<serde_json::Value>(&g.to_json())
                        .expect("graph JSON is valid"),
                    "canonical": {"gcd": canon.gcd, "reduced": [r0, r1]},
                })
                .to_string(),
                Format::Dot => format!("// WP^1({m0},{m1}) = WP^1({r0},{r1})\n{}", g.to_dot()),
                Format::Text => format!("WP^1({m0},{m1}) = WP^1({r0},{r1})\n{}", graph_text(&g)),
            }
        }
        Command::WpK => {
            let m = weights(cli)?;
            let kt = wp_k_theory(&m).map_err(|e| match e {
                WprojError::HypothesisNotSatisfied { .. } => Failure::Hypothesis(e.to_string()),
                other => usage(other),
            })?;
            match cli.format.unwrap_or(Format::Text) {
                Format::Json => kt.to_json_value().to_string(),
                Format::Text => kt.k_theory.to_string(),
                Format::Dot => return Err(usage("wp-k has no dot output")),
            }
        }
        Command::Snf => {
            let a = IntegerMatrix::from_json(&read_input(cli)?)
                .map_err(|e| Failure::Parse(e.to_string()))?;
            let snf = smith_normal_form(&a);
            match cli.format.unwrap_or(Format::Text) {
                Format::Json => snf.to_json_value().to_string(),
                Format::Text => {
                    let factors: Vec<String> = snf
                        .invariant_factors()
                        .iter()
                        .map(ToString::to_string)
                        .collect();
                    format!("{}invariant factors: {}", snf.diagonal, factors.join(" "))
                        .trim_end()
                        .to_string()
                }
                Format::Dot => return Err(usage("snf has no dot output")),
            }
        }
        Command::GraphK => {
            let g = DirectedMultigraph::from_json(&read_input(cli)?)
                .map_err(|e| Failure::Parse(e.to_string()))?;
            render_k(&graph_k_theory(&g), cli.format)?
        }
    };
    write_output(cli, &text)
}

/// Rejects flags that the chosen subcommand does not read.
fn check_flags(cli: &Cli) -> Result<(), Failure> {
    use Command::*;
    let c = cli.command;
    let unused = [
        ("--n", cli.n.is_some() && matches!(c, Snf | GraphK)),
        (
            "--N",
            cli.modulus.is_some() && !matches!(c, Skew | LensGraph | LensK),
        ),
        (
            "--weights",
            cli.weights.is_some() && matches!(c, Sphere | Snf | GraphK),
        ),
        ("--input", cli.input.is_some() && !matches!(c, Snf | GraphK)),
    ];
    match unused.iter().find(|(_, bad)| *bad) {
        Some((flag, _)) => Err(usage(format!(
            "{flag} is not used by {}",
            c.to_possible_value()
                .expect("no skipped variants")
                .get_name()
        ))),
        None => Ok(()),
    }
}

fn weights(cli: &Cli) -> Result<WeightVector, Failure> {
    let w = cli
        .weights
        .clone()
        .ok_or_else(|| usage("--weights is required"))?;
    if let Some(n) = cli.n {
        if w.len() != n + 1 {
            return Err(usage(format!(
                "--n {n} needs {} weights, got {}",
                n + 1,
                w.len()
            )));
        }
    }
    WeightVector::new(w).map_err(usage)
}

fn lens_args(cli: &Cli) -> Result<(usize, u64, WeightVector), Failure> {
    let m = weights(cli)?;
    let modulus = cli.modulus.ok_or_else(|| usage("--N is required"))?;
    if modulus == 0 {
        return Err(usage("--N must be at least 1"));
    }
    Ok((m.len() - 1, modulus, m))
}

fn render_graph(g: &DirectedMultigraph, format: Option<Format>) -> String {
    match format.unwrap_or(Format::Dot) {
        Format::Dot => g.to_dot(),
        Format::Json => g.to_json(),
        Format::Text => graph_text(g),
    }
}

fn graph_text(g: &DirectedMultigraph) -> String {
    let mut lines: Vec<String> = g.vertices().iter().map(|v| format!("vertex {v}")).collect();
    for e in g.edges() {
        let (s, r) = (g.vertex(e.source), g.vertex(e.range));
        lines.push(match &e.multiplicity {
            Multiplicity::Finite(k) if *k == 1u32.into() => format!("{s} -> {r}"),
            m => format!("{s} -> {r} ({m})"),
        });
    }
    lines.join("\n")
}

fn render_k(kt: &KTheory, format: Option<Format>) -> Result<String, Failure> {
    match format.unwrap_or(Format::Text) {
        Format::Text => Ok(kt.to_string()),
        Format::Json => Ok(kt.to_json()),
        Format::Dot => Err(usage("K-theory has no dot output")),
    }
}

fn read_input(cli: &Cli) -> Result<String, Failure> {
    match &cli.input {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display()))),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Io(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<(), Failure> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.output {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write standard output: {e}"))),
    }
}
