//! Command-line surface: generators, constructions, certificates and
//! verification over the stable text formats of [`crate::textio`].
//!
//! Exit codes: `0` success, `1` verification failure, `2` input or
//! feasibility error. Every distance printed is an exact `p/q`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::perm::{generate, halmos_distance, GeneratorKind, PermSystem, WeakNeighborhood};
use crate::rokhlin::{ergodic_smoothing, periodic_approximation, rokhlin_tower};
use crate::textio;
use crate::witness::build_unbalanced_witness_jobs;
use crate::{Error, Rational, Result};

/// Outcome of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    /// `0` success, `1` verification failure, `2` input/feasibility error.
    pub exit_code: i32,
    /// Files written by the invocation.
    pub output_paths: Vec<PathBuf>,
}

impl CommandResult {
    fn ok(output_paths: Vec<PathBuf>) -> Self {
        CommandResult {
            exit_code: 0,
            output_paths,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "halmos",
    version,
    about = "Exact finite models of measure-preserving dynamics: towers, periodic approximation, conjugators and unbalancedness witnesses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Rotation,
    RandomCycle,
    RandomPermutation,
    MPeriodic,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a permutation system and write it to a file
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        /// Rotation step (kind = rotation)
        #[arg(long)]
        a: Option<usize>,
        /// Cycle length (kind = m-periodic)
        #[arg(long)]
        m: Option<usize>,
        /// PRNG seed; mandatory for the random kinds
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the exact Halmos distance between two systems
    Dist {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
    },
    /// Extract the canonical Rokhlin tower of the given height
    Tower {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the m-periodic approximation of an ergodic system
    Approx {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge the cycles of a system into a single n-cycle
    Smooth {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a near-identity conjugator certificate for two n-cycles
    Conj {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
        /// Distance budget, e.g. 1/20
        #[arg(long, value_parser = textio::parse_ratio)]
        delta: Rational,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Build a full unbalancedness witness
    Witness(WitnessArgs),
    /// Prefix-agreement machinery for sequences of distinct rationals
    Splus {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Cylinder intervals, e.g. 0/1,2/1;8/1,10/1
        #[arg(long = "box", allow_hyphen_values = true)]
        box_spec: Option<String>,
        /// Stabilizer depth
        #[arg(long)]
        k: Option<usize>,
        /// Build the two-edge interleaving path instead of a cylinder witness
        #[arg(long)]
        path: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a certificate file written by conj, witness or splus
    Verify {
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        squiggle: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    t1: PathBuf,
    #[arg(long)]
    t2: PathBuf,
    /// Center of the target neighborhood U
    #[arg(long)]
    center: PathBuf,
    /// Marker sets of U (a `sets` file); omit for no markers
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Radius of U
    #[arg(long = "u-eps", value_parser = textio::parse_ratio)]
    u_eps: Rational,
    /// Radius of the identity ball V
    #[arg(long = "v-eps", value_parser = textio::parse_ratio)]
    v_eps: Rational,
    #[arg(long, value_parser = textio::parse_ratio)]
    delta: Rational,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// Parses `argv` (including the program name) and runs one command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not failures
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return CommandResult {
                exit_code: code,
                output_paths: vec![],
            };
        }
    };
    match dispatch(cli.command) {
        Ok(result) => result,
        Err(e) => {
            eprintln!("error: {e}");
            CommandResult {
                exit_code: 2,
                output_paths: vec![],
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_perm(path: &Path) -> Result<PermSystem> {
    textio::parse_perm(&read(path)?)
}

fn dispatch(command: Command) -> Result<CommandResult> {
    match command {
        Command::Gen {
            kind,
            n,
            a,
            m,
            seed,
            out,
        } => {
            let (kind, needs_seed) = match kind {
                KindArg::Rotation => (GeneratorKind::Rotation(a.unwrap_or(1)), false),
                KindArg::RandomCycle => (GeneratorKind::RandomCycle, true),
                KindArg::RandomPermutation => (GeneratorKind::RandomPermutation, true),
                KindArg::MPeriodic => {
                    let m = m.ok_or_else(|| {
                        Error::Invalid("--m is required for kind m-periodic".into())
                    })?;
                    (GeneratorKind::MPeriodic(m), true)
                }
            };
            if needs_seed && seed.is_none() {
                return Err(Error::Invalid("--seed is required for random kinds".into()));
            }
            let p = generate(kind, n, seed.unwrap_or(0))?;
            write(&out, &textio::perm_to_string(&p))?;
            println!("wrote {} (n={n})", out.display());
            Ok(CommandResult::ok(vec![out]))
        }
        Command::Dist { s, t } => {
            let d = halmos_distance(&read_perm(&s)?, &read_perm(&t)?)?;
            println!("d = {}", textio::format_ratio(d));
            Ok(CommandResult::ok(vec![]))
        }
        Command::Tower { t, m, out } => {
            let tower = rokhlin_tower(&read_perm(&t)?, m)?;
            println!(
                "tower height {} with {} columns, residual measure {}",
                tower.height(),
                tower.base().len(),
                textio::format_ratio(tower.residual_measure())
            );
            let mut paths = vec![];
            if let Some(out) = out {
                write(&out, &textio::tower_to_string(&tower))?;
                println!("wrote {}", out.display());
                paths.push(out);
            }
            Ok(CommandResult::ok(paths))
        }
        Command::Approx { t, m, out } => {
            let t = read_perm(&t)?;
            let p = periodic_approximation(&t, m)?;
            let d = halmos_distance(&t, &p)?;
            write(&out, &textio::perm_to_string(&p))?;
            println!(
                "d(t, approximation) = {}; wrote {}",
                textio::format_ratio(d),
                out.display()
            );
            Ok(CommandResult::ok(vec![out]))
        }
        Command::Smooth { s, out } => {
            let (smoothed, cost) = ergodic_smoothing(&read_perm(&s)?);
            write(&out, &textio::perm_to_string(&smoothed))?;
            println!(
                "cost = {}; wrote {}",
                textio::format_ratio(cost),
                out.display()
            );
            Ok(CommandResult::ok(vec![out]))
        }
        Command::Conj {
            s,
            t,
            delta,
            out,
            jobs,
        } => {
            let cert = crate::conjugator::build_conjugator_jobs(
                &read_perm(&s)?,
                &read_perm(&t)?,
                delta,
                jobs.max(1),
            )?;
            write(&out, &textio::cert_to_string(&cert))?;
            println!(
                "conj-dist = {} < delta = {}, id-dist = {}, window = {}; wrote {}",
                textio::format_ratio(cert.measured_conj_dist),
                textio::format_ratio(cert.delta_target),
                textio::format_ratio(cert.measured_id_dist),
                cert.window,
                out.display()
            );
            if cert.identity_anchoring_flag() {
                println!(
                    "note: h moves more atoms than s and t disagree on (id-dist {} > input-dist {})",
                    textio::format_ratio(cert.measured_id_dist),
                    textio::format_ratio(cert.input_dist)
                );
            }
            Ok(CommandResult::ok(vec![out]))
        }
        Command::Witness(args) => {
            let t1 = read_perm(&args.t1)?;
            let t2 = read_perm(&args.t2)?;
            let center = read_perm(&args.center)?;
            let sets = match &args.sets {
                Some(path) => textio::parse_sets(&read(path)?)?,
                None => vec![],
            };
            let u_spec = WeakNeighborhood::new(center, sets, args.u_eps)?;
            let w = build_unbalanced_witness_jobs(
                &t1,
                &t2,
                &u_spec,
                args.v_eps,
                args.delta,
                args.seed,
                args.jobs.max(1),
            )?;
            write(&args.out, &textio::witness_to_string(&w))?;
            println!(
                "final-dist = {} < 2*delta = {}; wrote {}",
                textio::format_ratio(w.final_dist),
                textio::format_ratio(w.delta * Rational::new(2, 1)),
                args.out.display()
            );
            Ok(CommandResult::ok(vec![args.out]))
        }
        Command::Splus {
            x,
            y,
            box_spec,
            k,
            path,
            out,
        } => {
            let x = textio::parse_seq(&read(&x)?)?;
            let y = textio::parse_seq(&read(&y)?)?;
            if path {
                let p = crate::splus::squiggle_path(&x, &y)?;
                write(&out, &textio::seq_to_string(&p.z))?;
                println!(
                    "interleaved {} + {} entries; x shares {} values with z, y shares {}; wrote {}",
                    x.len(),
                    y.len(),
                    p.x_edge.0.len(),
                    p.y_edge.0.len(),
                    out.display()
                );
                return Ok(CommandResult::ok(vec![out]));
            }
            let spec = box_spec
                .ok_or_else(|| Error::Invalid("--box is required without --path".into()))?;
            let intervals = textio::parse_box_spec(&spec)?;
            let k =
                k.ok_or_else(|| Error::Invalid("--k is required without --path".into()))?;
            let w = crate::splus::squiggle_witness(&x, &y, &intervals, k)?;
            write(&out, &textio::squiggle_to_string(&x, &y, &w))?;
            println!(
                "prefix agreement r = {}, k = {}; wrote {}",
                w.intervals.len(),
                w.k,
                out.display()
            );
            Ok(CommandResult::ok(vec![out]))
        }
        Command::Verify {
            cert,
            witness,
            squiggle,
        } => {
            let given = [cert.is_some(), witness.is_some(), squiggle.is_some()]
                .iter()
                .filter(|&&b| b)
                .count();
            if given != 1 {
                return Err(Error::Invalid(
                    "pass exactly one of --cert, --witness, --squiggle".into(),
                ));
            }
            let valid = if let Some(path) = cert {
                let cert = textio::parse_cert(&read(&path)?)?;
                let ok = crate::conjugator::verify_conjugator(&cert);
                report(
                    ok,
                    &format!(
                        "conjugator certificate: conj-dist {} against delta {}",
                        textio::format_ratio(cert.measured_conj_dist),
                        textio::format_ratio(cert.delta_target)
                    ),
                );
                ok
            } else if let Some(path) = witness {
                let w = textio::parse_witness(&read(&path)?)?;
                let ok = crate::witness::verify_witness(&w);
                report(
                    ok,
                    &format!(
                        "unbalancedness witness: final-dist {} against 2*delta {}",
                        textio::format_ratio(w.final_dist),
                        textio::format_ratio(w.delta * Rational::new(2, 1))
                    ),
                );
                ok
            } else {
                let path = squiggle.expect("one flag is set");
                let (x, y, w) = textio::parse_squiggle(&read(&path)?)?;
                let ok = crate::splus::verify_squiggle(&x, &y, &w);
                report(
                    ok,
                    &format!("squiggle witness: r = {}, k = {}", w.intervals.len(), w.k),
                );
                ok
            };
            Ok(CommandResult {
                exit_code: if valid { 0 } else { 1 },
                output_paths: vec![],
            })
        }
    }
}

fn report(ok: bool, what: &str) {
    if ok {
        println!("VALID {what}");
    } else {
        println!("INVALID {what}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CommandResult {
        run(std::iter::once("halmos").chain(args.iter().copied()))
    }

    #[test]
    fn gen_dist_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("t.perm");
        let r = run_args(&[
            "gen",
            "--kind",
            "rotation",
            "--n",
            "12",
            "--a",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.output_paths, vec![out.clone()]);
        let r = run_args(&["dist", "--s", out.to_str().unwrap(), "--t", out.to_str().unwrap()]);
        assert_eq!(r.exit_code, 0);
    }

    #[test]
    fn gen_random_requires_seed() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.perm");
        let r = run_args(&[
            "gen",
            "--kind",
            "random-cycle",
            "--n",
            "8",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(r.exit_code, 2);
    }

    #[test]
    fn unknown_flags_exit_2() {
        let r = run_args(&["frobnicate"]);
        assert_eq!(r.exit_code, 2);
        let r = run_args(&["gen", "--bogus"]);
        assert_eq!(r.exit_code, 2);
    }

    #[test]
    fn domain_errors_exit_2() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("t.perm");
        run_args(&[
            "gen", "--kind", "rotation", "--n", "10", "--a", "1", "--out",
            t.to_str().unwrap(),
        ]);
        let out = dir.path().join("p.perm");
        let r = run_args(&[
            "approx",
            "--t",
            t.to_str().unwrap(),
            "--m",
            "4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(r.exit_code, 2);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run_args(&["--help"]).exit_code, 0);
    }
}
