//! `pcswave`: design, verify and run prime coset sum wavelet filter banks.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 bad input.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pcswave::arith::{format_rational, is_prime};
use pcswave::filterbank::{bank_report, verify_combined_biorthogonality, Provenance, WaveletFilterBank};
use pcswave::filters::{Filter1D, FilterJson, DEFAULT_MAX_ORDER};
use pcswave::lattice::Convention;
use pcswave::polyphase::matmul_check;
use pcswave::transform::{self, io as tio, Tensor};

/// Oracle agreement bound for `analyze --oracle`, relative to `max(1, ‖y‖∞)`.
const ORACLE_TOLERANCE: f64 = 1e-11;

#[derive(Parser)]
#[command(name = "pcswave", version, about = "Prime coset sum wavelet filter banks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Gamma {
    Standard,
    Centered,
}

impl From<Gamma> for Convention {
    fn from(g: Gamma) -> Self {
        match g {
            Gamma::Standard => Convention::Standard,
            Gamma::Centered => Convention::Centered,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a bank from 1-D generators G (analysis) and H (interpolatory synthesis).
    Design {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long, value_enum, default_value = "centered")]
        gamma: Gamma,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check perfect reconstruction and report exact diagnostics.
    Verify {
        bank: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: u32,
        /// Also write the polyphase matrices A and S as JSON term maps.
        #[arg(long)]
        dump_polyphase: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Multilevel decomposition of a PCST tensor into a PCSC container.
    Analyze {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        input: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Cross-check against the filter-and-downsample transform.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Reconstruction of a PCSC container into a PCST tensor.
    Synthesize {
        #[arg(long)]
        bank: PathBuf,
        input: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Original tensor to measure the round-trip error against.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Count multiplications of one decompose and reconstruct cycle.
    Bench {
        #[arg(long)]
        bank: PathBuf,
        /// Axis lengths such as 81x81.
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long)]
        compare_tensor_model: bool,
        #[arg(long)]
        json: bool,
    },
}

/// Exit 1: an identity failed. Exit 2: input or precondition problem.
enum Failure {
    Check(String),
    Input(String),
}

impl From<pcswave::Error> for Failure {
    fn from(e: pcswave::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

fn load_filter(path: &Path, name: &str, p: i64) -> Result<Filter1D, Failure> {
    let f = FilterJson::parse(&read_text(path)?).map_err(|e| input(format!("{name} ({}): {e}", path.display())))?;
    if f.p() != p {
        return Err(input(format!("{name} has dilation {} but --p is {p}", f.p())));
    }
    Filter1D::from_nd(f).map_err(|e| input(format!("{name}: {e}")))
}

fn load_bank(path: &Path) -> Result<WaveletFilterBank, Failure> {
    WaveletFilterBank::parse(&read_text(path)?).map_err(|e| input(format!("bank {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| input(format!("cannot write {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

fn parse_shape(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(['x', 'X', ','])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| input(format!("invalid shape {s:?}: axis lengths must be positive integers")))
        })
        .collect()
}

fn design(p: i64, dim: usize, g: &Path, h: &Path, gamma: Gamma, output: &Path, as_json: bool) -> Outcome {
    if !is_prime(p) {
        return Err(input(format!("dilation must be prime, got {p}")));
    }
    if dim == 0 {
        return Err(input("dimension must be at least 1"));
    }
    if p == 2 && matches!(gamma, Gamma::Centered) {
        return Err(input(
            "the centered representative set needs an odd prime; use --gamma standard for p = 2",
        ));
    }
    let gf = load_filter(g, "G", p)?;
    let hf = load_filter(h, "H", p)?;
    let bank = WaveletFilterBank::build_pcs_bank(&gf, &hf, dim, gamma.into())?;
    let mut w = create(output)?;
    writeln!(w, "{}", bank.to_json_string()).map_err(|e| input(e.to_string()))?;
    w.flush().map_err(|e| input(e.to_string()))?;

    let report = bank_report(&bank, DEFAULT_MAX_ORDER);
    let names = bank.filter_names();
    let supports: Vec<usize> = bank
        .analysis_filters()
        .into_iter()
        .chain(bank.synthesis_filters())
        .map(|f| f.support_size())
        .collect();
    if as_json {
        let filters: serde_json::Map<_, _> = names.iter().cloned().zip(supports.iter().map(|&s| json!(s))).collect();
        println!(
            "{}",
            json!({
                "output": output.display().to_string(),
                "p": p, "dim": dim, "convention": Convention::from(gamma).to_string(),
                "support": filters,
                "guarantee": report.guarantee,
                "floor": report.floor,
            })
        );
    } else {
        println!(
            "wrote {} (p = {p}, dim = {dim}, gamma = {})",
            output.display(),
            Convention::from(gamma)
        );
        println!("{:<12} {:>8}", "filter", "support");
        for (n, s) in names.iter().zip(&supports) {
            println!("{n:<12} {s:>8}");
        }
        println!(
            "guaranteed order floor min(a1, a2, a3) = {} (a1 = {}, a2 = {}, a3 = {})",
            report.floor, report.guarantee.alpha1, report.guarantee.alpha2, report.guarantee.alpha3
        );
    }
    Ok(())
}

fn verify(path: &Path, max_order: u32, dump: Option<&Path>, as_json: bool) -> Outcome {
    if max_order == 0 {
        return Err(input("--max-order must be at least 1"));
    }
    let bank = load_bank(path)?;
    let mut failures = Vec::new();

    let bio = verify_combined_biorthogonality(&bank);
    if !bio.passed {
        let r = &bio.residuals[0];
        failures.push(format!(
            "combined biorthogonality S·A = (1/q)I fails at (row {}, col {}): residual {}",
            r.row, r.col, r.residual
        ));
    }
    let interp = bank.tau_d().interpolatory_error("tau_d");
    if let Some(e) = &interp {
        failures.push(e.to_string());
    }
    let pair = bank.tau().is_biorthogonal(bank.tau_d())?;
    if !pair {
        failures.push("lowpass pair (tau, tau_d) is not biorthogonal".into());
    }
    let mismatched = bank.rederive_mismatches()?;
    if !mismatched.is_empty() {
        failures.push(format!(
            "stored filters differ from the generators: {}",
            mismatched.join(", ")
        ));
    }
    let report = bank_report(&bank, max_order);
    let pcs = matches!(bank.provenance(), Provenance::PrimeCosetSum { .. });
    if pcs && !report.violations.is_empty() {
        failures.push(report.violations.join("; "));
    }

    if let Some(dump) = dump {
        let (a, s) = pcswave::filterbank::bank_matrices(&bank)?;
        let doc = json!({ "A": a.to_json(), "S": s.to_json(), "identity_holds": matmul_check(&s, &a, bank.sys().q()) });
        let mut w = create(dump)?;
        writeln!(w, "{doc:#}").map_err(|e| input(e.to_string()))?;
    }

    if as_json {
        println!(
            "{:#}",
            json!({
                "combined_biorthogonality": bio,
                "tau_d_interpolatory": interp.is_none(),
                "lowpass_pair_biorthogonal": pair,
                "rederive_mismatches": mismatched,
                "report": report,
                "passed": failures.is_empty(),
            })
        );
    } else {
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        println!(
            "bank {} (p = {}, dim = {}, gamma = {})",
            path.display(),
            bank.sys().p(),
            bank.sys().n(),
            bank.sys().convention()
        );
        println!("{}  combined biorthogonality S·A = (1/q)I", mark(bio.passed));
        for r in bio.residuals.iter().take(5) {
            println!("      residual at (row {}, col {}): {}", r.row, r.col, r.residual);
        }
        println!("{}  tau_d interpolatory", mark(interp.is_none()));
        println!("{}  (tau, tau_d) biorthogonal", mark(pair));
        if pcs {
            println!("{}  stored filters match generators", mark(mismatched.is_empty()));
            println!(
                "{}  order floor min(a1, a2, a3) = {} (a1 = {}, a2 = {}, a3 = {})",
                mark(report.violations.is_empty()),
                report.floor,
                report.guarantee.alpha1,
                report.guarantee.alpha2,
                report.guarantee.alpha3
            );
        }
        println!();
        println!(
            "{:<12} {:>7} {:>7} {:>6} {:>8} {:>9} {:>8}",
            "filter", "support", "lowpass", "interp", "accuracy", "vanishing", "flatness"
        );
        let sat = |v: u32| {
            if v >= max_order {
                format!(">={v}")
            } else {
                v.to_string()
            }
        };
        for fr in &report.filters {
            let d = &fr.diagnostics;
            println!(
                "{:<12} {:>7} {:>7} {:>6} {:>8} {:>9} {:>8}",
                fr.name,
                d.support_size,
                if d.is_lowpass { "yes" } else { "no" },
                if d.is_interpolatory { "yes" } else { "no" },
                sat(d.accuracy),
                sat(d.vanishing_moments),
                sat(d.flatness)
            );
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("\n")))
    }
}

fn analyze(bank: &Path, levels: usize, inp: &Path, output: &Path, oracle: bool, as_json: bool) -> Outcome {
    if levels == 0 {
        return Err(input("--levels must be at least 1"));
    }
    let bank = load_bank(bank)?;
    let y = tio::read_tensor(&mut open(inp)?).map_err(|e| input(format!("{}: {e}", inp.display())))?;
    transform::check_shape(y.shape(), bank.sys().n(), bank.sys().p(), levels)?;
    let coeffs = transform::decompose_fast(&y, &bank, levels)?;
    let mut w = create(output)?;
    tio::write_coeffs(&mut w, &coeffs)?;
    w.flush().map_err(|e| input(e.to_string()))?;

    let back = transform::reconstruct_fast(&coeffs, &bank)?;
    let norm = y.max_abs();
    let round_trip = back.max_abs_diff(&y);
    let oracle_diff = if oracle {
        let direct = transform::decompose_direct(&y, &bank, levels)?;
        let mut d = coeffs.coarse.max_abs_diff(&direct.coarse);
        for (a, b) in coeffs.details.iter().flatten().zip(direct.details.iter().flatten()) {
            d = d.max(a.max_abs_diff(b));
        }
        Some(d)
    } else {
        None
    };
    if as_json {
        println!(
            "{}",
            json!({"output": output.display().to_string(), "levels": levels, "max_abs_input": norm,
                   "round_trip_max_abs_error": round_trip, "oracle_max_abs_difference": oracle_diff})
        );
    } else {
        println!(
            "wrote {} ({} levels, {} subbands)",
            output.display(),
            levels,
            1 + levels * (bank.sys().q() - 1)
        );
        println!("round-trip max abs error: {round_trip:e} (max |y| = {norm:e})");
        if let Some(d) = oracle_diff {
            println!("oracle max abs difference: {d:e}");
        }
    }
    if let Some(d) = oracle_diff {
        if d > ORACLE_TOLERANCE * norm.max(1.0) {
            return Err(Failure::Check(format!(
                "fast and direct decompositions differ by {d:e}, above {ORACLE_TOLERANCE:e} relative"
            )));
        }
    }
    Ok(())
}

fn synthesize(bank: &Path, inp: &Path, output: &Path, reference: Option<&Path>, as_json: bool) -> Outcome {
    let bank = load_bank(bank)?;
    let coeffs = tio::read_coeffs(&mut open(inp)?).map_err(|e| input(format!("{}: {e}", inp.display())))?;
    if coeffs.p != bank.sys().p() || coeffs.input_shape.len() != bank.sys().n() {
        return Err(input(format!(
            "coefficients were made with p = {} in {} dimensions, bank has p = {} in {}",
            coeffs.p,
            coeffs.input_shape.len(),
            bank.sys().p(),
            bank.sys().n()
        )));
    }
    let y: Tensor<f64> = transform::reconstruct_fast(&coeffs, &bank)?;
    let mut w = create(output)?;
    tio::write_tensor(&mut w, &y)?;
    w.flush().map_err(|e| input(e.to_string()))?;
    let err = match reference {
        Some(r) => {
            let orig = tio::read_tensor(&mut open(r)?)?;
            if orig.shape() != y.shape() {
                return Err(input(format!(
                    "reference shape {:?} differs from {:?}",
                    orig.shape(),
                    y.shape()
                )));
            }
            Some(y.max_abs_diff(&orig))
        }
        None => None,
    };
    if as_json {
        println!(
            "{}",
            json!({"output": output.display().to_string(), "shape": y.shape(), "max_abs_error": err})
        );
    } else {
        println!("wrote {} (shape {:?})", output.display(), y.shape());
        if let Some(e) = err {
            println!("max abs error against reference: {e:e}");
        }
    }
    Ok(())
}

fn bench(bank: &Path, shape: &str, levels: usize, tensor_model: bool, as_json: bool) -> Outcome {
    if levels == 0 {
        return Err(input("--levels must be at least 1"));
    }
    let shape = parse_shape(shape)?;
    let bank = load_bank(bank)?;
    transform::check_shape(&shape, bank.sys().n(), bank.sys().p(), levels)?;
    let oc = transform::count_ops(&bank, &shape, levels)?;
    let c = &oc.per_sample_constant;
    let pcs_le_tp = oc.per_sample_bound <= oc.tensor_model;
    if as_json {
        let mut doc = oc.to_json();
        doc["matches_prediction"] = json!(oc.matches_prediction());
        if tensor_model {
            doc["bound_le_tensor_model"] = json!(pcs_le_tp);
        }
        println!("{doc:#}");
    } else {
        println!("counting convention: {}", transform::count::CONVENTION);
        println!(
            "p = {}, n = {}, shape = {:?}, levels = {}, N = {}",
            oc.p, oc.n, shape, oc.levels, oc.samples
        );
        println!("alpha = {}, beta = {}, alpha~ = {}", oc.alpha, oc.beta, oc.alpha_tilde);
        println!("measured multiplications: {}", oc.multiplicative_ops);
        for (j, v) in oc.per_level.iter().enumerate() {
            println!("  level {j}: {v}");
        }
        println!("closed-form prediction: {}", format_rational(&oc.predicted));
        println!(
            "per-sample constant: {} ~ {:.4}",
            format_rational(c),
            pcswave::arith::to_f64(c)
        );
        println!(
            "per-sample bound 2b + 2(p-1)(a+1)/p + 1: {}",
            format_rational(&oc.per_sample_bound)
        );
        if tensor_model {
            let rel = if pcs_le_tp { "<=" } else { ">" };
            let label = if oc.p == 2 { "C_PCS = a + 2b + 2" } else { "bound" };
            println!(
                "tensor model C_TP = (a + b)n = {}; {label} = {} {rel} C_TP",
                format_rational(&oc.tensor_model),
                format_rational(&oc.per_sample_bound)
            );
        }
    }
    if !oc.matches_prediction() {
        return Err(Failure::Check(format!(
            "measured count {} differs from the closed form {}",
            oc.multiplicative_ops,
            format_rational(&oc.predicted)
        )));
    }
    Ok(())
}

fn configure_threads() -> Outcome {
    if let Ok(v) = std::env::var("PCSWAVE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| input(format!("PCSWAVE_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| input(format!("cannot configure {n} worker threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Design {
            p,
            dim,
            g,
            h,
            gamma,
            output,
            json,
        } => design(p, dim, &g, &h, gamma, &output, json),
        Command::Verify {
            bank,
            max_order,
            dump_polyphase,
            json,
        } => verify(&bank, max_order, dump_polyphase.as_deref(), json),
        Command::Analyze {
            bank,
            levels,
            input,
            output,
            oracle,
            json,
        } => analyze(&bank, levels, &input, &output, oracle, json),
        Command::Synthesize {
            bank,
            input,
            output,
            reference,
            json,
        } => synthesize(&bank, &input, &output, reference.as_deref(), json),
        Command::Bench {
            bank,
            shape,
            levels,
            compare_tensor_model,
            json,
        } => bench(&bank, &shape, levels, compare_tensor_model, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
