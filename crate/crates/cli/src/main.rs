//! `critline` — command-line front end for the phase-comparator toolkit.
//!
//! Outputs are deterministic for a fixed seed and configuration: every
//! artifact embeds the tool version, the seed, and an echo of the invocation;
//! wall-clock timing goes to stderr so reruns stay byte-identical.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use critline_core::assembly::{
    lattice_energy, square_energy_1p, square_energy_2p, SquareMeta, TwoParamThresholds,
};
use critline_core::circuit::{self, NoiseSpec, StateVector};
use critline_core::encoding;
use critline_core::eta::{
    toy_comparator_oracle, toy_observable_oracle, EtaEngine, EtaInput, OracleFile,
};
use critline_core::phasediag::{brute_scan, solve_1crt, solve_2crt, CrtMode, CrtPrmInstance};
use critline_core::qpe::{self, QpePoint};
use critline_core::spectral::{diagonalize, guarded_chain_matrix, trivial_chain_matrix, xy_spectrum};
use critline_core::verify;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "critline", version, about = "phase-comparator QPE analytics and phase-diagram solvers", disable_help_subcommand = true)]
struct Cli {
    /// Seed recorded in every artifact and used by all pseudorandomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout). Relative paths resolve against
    /// CRITLINE_OUT_DIR when set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid subcommands (parallel builds only).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON config file mirroring the global flags ({"seed":…,"threads":…}).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EtaMode {
    One,
    Two,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectrumModel {
    Xy,
    Trivial,
    Guarded,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiagramMode {
    #[value(name = "1crt")]
    OneCrt,
    #[value(name = "2crt")]
    TwoCrt,
}

#[derive(Subcommand)]
#[command(allow_negative_numbers = true)]
enum Command {
    /// Encode a positive integer as its base-4 self-certifying string.
    Encode { n: u64 },
    /// Decode a base-4 string back to its integer.
    Decode { string: String },
    /// Closed-form QPE readout profile (CSV: label, mass) or a mass curve
    /// over a ξ grid (CSV: xi, mass).
    #[command(allow_negative_numbers = true)]
    Qpe {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run the phase-comparator circuit and print the readout histogram.
    #[command(allow_negative_numbers = true)]
    Compare {
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        t: u32,
        /// Per-gate spectral-norm noise on the fixed gate set.
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Product-formula error and effective-Hamiltonian constant on the
    /// benchmark chain.
    #[command(allow_negative_numbers = true)]
    Trotter {
        #[arg(long)]
        sites: usize,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        step: f64,
    },
    /// Sorted eigenvalues of a reference model.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[arg(long, value_enum)]
        model: SpectrumModel,
        #[arg(long)]
        length: usize,
        /// Truncate the output to the lowest K levels.
        #[arg(long)]
        k: Option<usize>,
        /// Dense-sector shift of the guarded model.
        #[arg(long, default_value_t = 1.25)]
        shift: f64,
    },
    /// Evaluate the acceptance functional against an oracle chain.
    #[command(allow_negative_numbers = true)]
    Eta {
        #[arg(long, value_enum)]
        mode: EtaMode,
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        t: u32,
        /// Oracle file (JSON); defaults to the built-in toy for the mode.
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Eigenstate index input; omit to maximize over eigenstates.
        #[arg(long)]
        input: Option<usize>,
    },
    /// Square and lattice energies from an acceptance value.
    #[command(allow_negative_numbers = true)]
    Assemble {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        theta: Option<f64>,
        /// Concentrated observable eigenvalue for the two-parameter form.
        #[arg(long, default_value_t = 2.0)]
        lambda_jstar: f64,
        #[arg(long, default_value_t = 32.0)]
        p2: f64,
        /// Lattice size for the tiled total (default 2L).
        #[arg(long)]
        lattice: Option<u64>,
        /// Target square size (defaults to --l).
        #[arg(long)]
        target_l: Option<u64>,
        /// Target marker offset (defaults to --m).
        #[arg(long)]
        target_m: Option<u64>,
    },
    /// Solve a critical-parameter instance by bisection, optionally with a
    /// brute-force grid written as CSV.
    PhaseDiagram {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        mode: DiagramMode,
        #[arg(long)]
        tol: f64,
        /// Also classify an exhaustive grid at this resolution.
        #[arg(long)]
        brute: Option<usize>,
        /// Where the grid CSV goes (default phase_grid.csv).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the invariant suite; nonzero exit on any violation.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(serde::Deserialize, Default)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config: String,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    meta: Meta,
    data: T,
}

/// 17 significant digits: round-trip exact for doubles.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    match execute(cli) {
        Ok(code) => {
            eprintln!("critline: completed in {} ms", started.elapsed().as_millis());
            code
        }
        Err(err) => {
            eprintln!("critline: error: {err}");
            match err.downcast_ref::<critline_core::Error>() {
                Some(critline_core::Error::PromiseViolation(_))
                | Some(critline_core::Error::CalibrationViolated(_)) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let file_config: FileConfig = match &cli.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file_config.seed).unwrap_or(42);
    let out = cli.out.clone().or(file_config.out);
    let threads = cli.threads.or(file_config.threads);
    configure_threads(threads);

    let config_echo = std::env::args().collect::<Vec<_>>().join(" ");
    let meta = Meta {
        tool: "critline",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config: config_echo,
    };

    match cli.command {
        Command::Encode { n } => {
            let encoded = encoding::enc(n)?;
            emit_text(&out, &format!("{}\n", encoded.to_digit_string()))?;
        }
        Command::Decode { string } => {
            let value = encoding::enc_inverse_str(&string)?;
            emit_text(&out, &format!("{value}\n"))?;
        }
        Command::Qpe { t, xi, grid } => {
            let mut csv = String::new();
            push_meta_comments(&mut csv, &meta);
            match grid {
                None => {
                    csv.push_str("label,mass\n");
                    let profile = qpe::profile(QpePoint::new(t, xi)?)?;
                    for (label, amp) in &profile.amplitudes {
                        csv.push_str(&format!("{label},{}\n", fmt_f64(amp.norm_sqr())));
                    }
                }
                Some(n) => {
                    csv.push_str("xi,mass\n");
                    let xis = critline_core::grid::linspace(-0.5, 0.4999, n.max(2));
                    let masses = critline_core::grid::map_points(&xis, |&x| {
                        qpe::low_half_mass(QpePoint { t, xi: x })
                    });
                    for (x, m) in xis.iter().zip(masses) {
                        csv.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(m)));
                    }
                }
            }
            emit_text(&out, &csv)?;
        }
        Command::Compare { phi, lambda, t, noise } => {
            let u_a = circuit::phase_unitary(lambda);
            let u_b = circuit::phase_unitary(phi);
            let e = StateVector::basis_state(1, 0)?;
            let spec = noise.map(|eps| NoiseSpec::new(eps, seed)).transpose()?;
            let state = circuit::phase_comparator_run(&u_a, &u_b, &e, &e, t as usize, spec.as_ref())?;
            let histogram = circuit::readout_distribution(&state, t as usize);
            #[derive(Serialize)]
            struct CompareOut {
                phi: f64,
                lambda: f64,
                t: u32,
                noise: Option<f64>,
                low_half_mass: f64,
                histogram: Vec<(i64, f64)>,
            }
            let low_half_mass = histogram.iter().filter(|(l, _)| *l <= 0).map(|(_, p)| p).sum();
            emit_json(
                &out,
                &Envelope {
                    meta,
                    data: CompareOut { phi, lambda, t, noise, low_half_mass, histogram },
                },
            )?;
        }
        Command::Trotter { sites, time, step } => {
            let report = critline_core::hamsim::trotter_report(sites, time, step)?;
            emit_json(&out, &Envelope { meta, data: report })?;
        }
        Command::Spectrum { model, length, k, shift } => {
            let spectrum = match model {
                SpectrumModel::Xy => xy_spectrum(length)?,
                SpectrumModel::Trivial => {
                    if length > 12 {
                        anyhow::bail!("trivial model capped at 12 sites for dense solves");
                    }
                    diagonalize(&trivial_chain_matrix(length))?
                }
                SpectrumModel::Guarded => diagonalize(&guarded_chain_matrix(length, shift)?)?,
            };
            #[derive(Serialize)]
            struct SpectrumOut {
                model: &'static str,
                length: usize,
                ground_degeneracy: usize,
                gap: f64,
                eigenvalues: Vec<f64>,
            }
            let name = match model {
                SpectrumModel::Xy => "xy",
                SpectrumModel::Trivial => "trivial",
                SpectrumModel::Guarded => "guarded",
            };
            let eigenvalues = match k {
                Some(k) => spectrum.eigenvalues.iter().copied().take(k).collect(),
                None => spectrum.eigenvalues.clone(),
            };
            emit_json(
                &out,
                &Envelope {
                    meta,
                    data: SpectrumOut {
                        model: name,
                        length,
                        ground_degeneracy: spectrum.ground_degeneracy,
                        gap: spectrum.gap,
                        eigenvalues,
                    },
                },
            )?;
        }
        Command::Eta { mode, phi, theta, t, oracle, input } => {
            let spec = match oracle {
                Some(path) => {
                    let file: OracleFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    file.to_spec()?
                }
                None => match mode {
                    EtaMode::One => toy_comparator_oracle()?,
                    EtaMode::Two => toy_observable_oracle()?,
                },
            };
            let engine = EtaEngine::new(spec)?;
            let evaluation = match (mode, input) {
                (EtaMode::One, Some(g)) => engine.eta_one(phi, t, &EtaInput::Eigenstate(g))?,
                (EtaMode::One, None) => engine.eta_one_max(phi, t)?,
                (EtaMode::Two, Some(g)) => {
                    let theta = theta
                        .ok_or_else(|| anyhow::anyhow!("--theta is required for --mode two"))?;
                    engine.eta_two(phi, theta, t, &EtaInput::Eigenstate(g))?
                }
                (EtaMode::Two, None) => {
                    let theta = theta
                        .ok_or_else(|| anyhow::anyhow!("--theta is required for --mode two"))?;
                    engine.eta_two_max(phi, theta, t)?
                }
            };
            emit_json(&out, &Envelope { meta, data: evaluation })?;
        }
        Command::Assemble {
            eta,
            l,
            m,
            b,
            theta,
            lambda_jstar,
            p2,
            lattice,
            target_l,
            target_m,
        } => {
            let square_meta = SquareMeta {
                l_n: target_l.unwrap_or(l),
                m_n: target_m.unwrap_or(m),
                b,
            };
            let square = match theta {
                None => square_energy_1p(eta, l, m, &square_meta)?,
                Some(_) => {
                    let thresholds = TwoParamThresholds { lambda_jstar, p2 };
                    square_energy_2p(eta, l, m, &square_meta, &thresholds)?
                }
            };
            let lattice_size = lattice.unwrap_or(2 * l);
            let lattice_out = lattice_energy(&square, lattice_size, square_meta.l_n)?;
            #[derive(Serialize)]
            struct AssembleOut {
                square: critline_core::assembly::SquareEnergy,
                lattice: critline_core::assembly::LatticeEnergy,
            }
            emit_json(&out, &Envelope { meta, data: AssembleOut { square, lattice: lattice_out } })?;
        }
        Command::PhaseDiagram { instance, mode, tol, brute, csv } => {
            let instance: CrtPrmInstance =
                serde_json::from_str(&std::fs::read_to_string(&instance)?)?;
            match (mode, &instance.mode) {
                (DiagramMode::OneCrt, CrtMode::One { .. }) => {}
                (DiagramMode::TwoCrt, CrtMode::Two { .. }) => {}
                _ => anyhow::bail!("--mode does not match the instance file"),
            }
            let oracle = instance.build_oracle()?;
            let diagram = match mode {
                DiagramMode::OneCrt => solve_1crt(&instance, oracle.as_ref(), tol)?,
                DiagramMode::TwoCrt => solve_2crt(&instance, oracle.as_ref(), tol)?,
            };
            if let Some(resolution) = brute {
                let grid = brute_scan(&instance, oracle.as_ref(), resolution)?;
                let mut text = String::new();
                push_meta_comments(&mut text, &meta);
                text.push_str("phi,theta,label\n");
                for p in &grid.grid {
                    text.push_str(&format!(
                        "{},{},{}\n",
                        fmt_f64(p.phi),
                        fmt_f64(p.theta),
                        match p.label {
                            critline_core::phasediag::PhaseLabel::A => "A",
                            critline_core::phasediag::PhaseLabel::B => "B",
                        }
                    ));
                }
                let path = csv.unwrap_or_else(|| PathBuf::from("phase_grid.csv"));
                write_file(&path, &text)?;
                eprintln!("critline: grid written to {}", path.display());
            }
            emit_json(&out, &Envelope { meta, data: diagram })?;
        }
        Command::Verify { suite } => {
            if suite != "all" {
                anyhow::bail!("unknown suite {suite:?}; only \"all\" is available");
            }
            let results = verify::run_all(seed);
            let report = verify::render_report(seed, &results);
            emit_text(&out, &report)?;
            if results.iter().any(|r| !r.passed) {
                return Ok(2);
            }
        }
    }
    Ok(0)
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) {}

fn push_meta_comments(buf: &mut String, meta: &Meta) {
    buf.push_str(&format!(
        "# tool={} version={} seed={}\n# config: {}\n",
        meta.tool, meta.version, meta.seed, meta.config
    ));
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("CRITLINE_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    let resolved = resolve_out(path);
    if let Some(parent) = resolved.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&resolved, contents)?;
    Ok(())
}

fn emit_text(out: &Option<PathBuf>, contents: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_file(path, contents)?,
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(out, &text)
}
