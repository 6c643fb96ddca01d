mod config;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use thinstrip::analysis::{
    annulus_oracle, count_bound_states, dirichlet_compare, one_d_extrapolated, resolvent_gap_sweep, robin_sweep,
    strip_spectrum, sweep_thm1, transverse_nu_detailed, write_gap_csv, write_sweep_csv, GridLadder, NeumannSide,
    StripProblem, Summary, SweepOptions, SweepReport,
};
use thinstrip::coefficients::{effective_potential, EffectiveVariant};
use thinstrip::discretize::{build_grid, BoundaryConditionSet};
use thinstrip::geometry::{embed, CurvatureProfile, Interval, Preset};
use thinstrip::Error;

use config::{expand_config, provenance, Cli, Command, Options};

/// Outcome of a failed run: a message and the exit code.
#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("i/o error: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn missing(name: &str) -> Failure {
    Failure::Config(format!("missing --{name}"))
}

fn parse_list(text: &str, name: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Config(format!("cannot parse `{v}` in --{name}")))
        })
        .collect()
}

fn default_interval(preset: &Preset) -> (f64, f64) {
    match preset {
        Preset::Zero => (0.0, 1.0),
        Preset::Constant { .. } => (0.0, PI),
        Preset::GaussianDip { s0, .. } => (s0 - 6.0, s0 + 6.0),
        Preset::Negcos => (-PI, PI),
    }
}

fn profile(o: &Options) -> Result<CurvatureProfile, Failure> {
    let preset = Preset::parse_spec(o.profile.as_deref().ok_or_else(|| missing("profile"))?)?;
    let (a, b) = match &o.interval {
        Some(text) => match parse_list(text, "interval")?.as_slice() {
            [a, b] => (*a, *b),
            _ => return Err(Failure::Config("--interval expects `a,b`".into())),
        },
        None => default_interval(&preset),
    };
    // a localized dip lives on the real line; the other presets on their interval
    let truncated = o.truncated.unwrap_or(matches!(preset, Preset::GaussianDip { .. }));
    let interval = if truncated {
        Interval::truncated(a, b)?
    } else {
        Interval::new(a, b)?
    };
    Ok(CurvatureProfile::new(preset, interval))
}

fn eps_list(o: &Options) -> Result<Vec<f64>, Failure> {
    parse_list(o.eps.as_deref().ok_or_else(|| missing("eps"))?, "eps")
}

fn single_eps(o: &Options) -> Result<f64, Failure> {
    match eps_list(o)?.as_slice() {
        [e] => Ok(*e),
        _ => Err(Failure::Config("--eps expects a single value for this command".into())),
    }
}

fn alpha(o: &Options) -> Result<Preset, Failure> {
    Ok(Preset::parse_spec(o.alpha.as_deref().ok_or_else(|| missing("alpha"))?)?)
}

fn tol(o: &Options) -> f64 {
    o.tol.unwrap_or(1e-9)
}

fn sweep_options(o: &Options) -> Result<SweepOptions, Failure> {
    let d = SweepOptions::default();
    Ok(SweepOptions {
        ladder: GridLadder::new(
            o.ns.unwrap_or(d.ladder.ns),
            o.nt.unwrap_or(d.ladder.nt),
            o.levels.unwrap_or(d.ladder.levels),
        )?,
        ns_1d: o.ns1d.unwrap_or(d.ns_1d),
        levels_1d: o.levels1d.unwrap_or(d.levels_1d),
        tol: tol(o),
        workers: workers(o)?,
        truncation_check: o.truncation_check.unwrap_or(true),
    })
}

fn workers(o: &Options) -> Result<usize, Failure> {
    match o.workers.unwrap_or(1) {
        0 => Err(Failure::Config("--workers must be at least 1".into())),
        w => Ok(w),
    }
}

/// Writes to `--out` or stdout.
fn with_output(o: &Options, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    match &o.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
        }
    }
    Ok(())
}

fn write_summary(path: Option<&Path>, summary: &Summary) -> Outcome {
    if let Some(p) = path {
        std::fs::write(p, summary.to_json() + "\n")?;
    }
    Ok(())
}

fn finish_sweep(o: &Options, report: &SweepReport, prov: &str) -> Outcome {
    with_output(o, |w| write_sweep_csv(w, &report.records, Some(prov)))?;
    write_summary(o.summary.as_deref(), &Summary::from_sweep(report))?;
    for (name, ok) in report.verdicts() {
        eprintln!("{name}: {}", if ok { "pass" } else { "fail" });
    }
    if !report.records.iter().any(|r| r.trusted.iter().any(|&t| t)) {
        return Err(Failure::Numerical(
            "no sweep record is trustworthy: discretization error is not small against the remainder".into(),
        ));
    }
    Ok(())
}

fn run_command(command: &Command) -> Outcome {
    let o = command.options();
    let prov = provenance(command);
    match command {
        Command::Spectrum(_) => {
            let eps = single_eps(o)?;
            let bc = match o.bc.as_deref().unwrap_or("dn") {
                "dn" => BoundaryConditionSet::DN,
                "dd" => BoundaryConditionSet::DD,
                "robin" => BoundaryConditionSet::robin(alpha(o)?),
                other => return Err(Failure::Config(format!("unknown --bc `{other}` (dn, dd, robin)"))),
            };
            let problem = StripProblem::new(profile(o)?, eps, bc)?;
            let grid = build_grid(problem.profile.interval(), o.ns.unwrap_or(256), o.nt.unwrap_or(32))?;
            let s = strip_spectrum(&problem, &grid, o.m.unwrap_or(3), tol(o))?;
            with_output(o, |w| {
                writeln!(w, "# {prov}")?;
                writeln!(w, "j,lambda,residual")?;
                for (j, (l, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
                    writeln!(w, "{},{l},{r}", j + 1)?;
                }
                Ok(())
            })
        }
        Command::Sweep(_) => {
            let report = sweep_thm1(&profile(o)?, &eps_list(o)?, o.jmax.unwrap_or(1), &sweep_options(o)?)?;
            finish_sweep(o, &report, &prov)
        }
        Command::Dirichlet(_) => {
            let report = dirichlet_compare(&profile(o)?, &eps_list(o)?, o.jmax.unwrap_or(1), &sweep_options(o)?)?;
            finish_sweep(o, &report, &prov)
        }
        Command::Robin(_) => {
            let report = robin_sweep(&profile(o)?, alpha(o)?, &eps_list(o)?, o.jmax.unwrap_or(1), &sweep_options(o)?)?;
            finish_sweep(o, &report, &prov)
        }
        Command::Transverse(_) => {
            let c = o.c.ok_or_else(|| missing("c"))?;
            let e = transverse_nu_detailed(c, o.tol.unwrap_or(1e-10))?;
            println!("nu = {}", e.nu);
            println!("error estimate = {:e} (Nt = {})", e.error, e.nt);
            Ok(())
        }
        Command::Effective1d(_) => {
            let p = profile(o)?;
            let eps = single_eps(o)?;
            let (variant, a) = match o.variant.as_deref().unwrap_or("dn") {
                "dn" => (EffectiveVariant::DN, None),
                "dirichlet" => (EffectiveVariant::Dirichlet, None),
                "robin" => (EffectiveVariant::Robin, Some(alpha(o)?)),
                other => return Err(Failure::Config(format!("unknown --variant `{other}` (dn, dirichlet, robin)"))),
            };
            let v = effective_potential(&p, eps, variant, a)?;
            let e = one_d_extrapolated(
                &|s| v.value(s),
                p.interval(),
                o.ns1d.or(o.ns).unwrap_or(1024),
                o.levels1d.or(o.levels).unwrap_or(3),
                o.m.unwrap_or(3),
                tol(o),
            )?;
            with_output(o, |w| {
                writeln!(w, "# {prov}")?;
                writeln!(w, "j,lambda_1d,disc_err")?;
                for (j, (l, err)) in e.values.iter().zip(&e.errors).enumerate() {
                    writeln!(w, "{},{l},{err}", j + 1)?;
                }
                Ok(())
            })
        }
        Command::Resolvent(_) => {
            let report = resolvent_gap_sweep(
                &profile(o)?,
                o.k,
                &eps_list(o)?,
                (o.ns.unwrap_or(256), o.nt.unwrap_or(32)),
                o.tol.unwrap_or(1e-8),
                workers(o)?,
            )?;
            with_output(o, |w| write_gap_csv(w, &report, Some(&prov)))?;
            write_summary(o.summary.as_deref(), &Summary::from_gap(&report))
        }
        Command::Count(_) => {
            let problem = StripProblem::dn(profile(o)?, single_eps(o)?)?;
            let grid = build_grid(problem.profile.interval(), o.ns.unwrap_or(512), o.nt.unwrap_or(32))?;
            let c = count_bound_states(&problem, &grid, o.margin, tol(o))?;
            println!("count = {}", c.count);
            println!("threshold = {}", c.threshold);
            println!("margin = {}", c.margin);
            if let Some(d) = c.doubled {
                println!("doubled interval count = {d}");
            }
            Ok(())
        }
        Command::Oracle(_) => {
            let r = o.radius.unwrap_or(1.0);
            let side = match o.side.as_deref() {
                None => NeumannSide::Inner,
                Some("inner") => NeumannSide::Inner,
                Some("outer") => NeumannSide::Outer,
                Some(other) => return Err(Failure::Config(format!("unknown --side `{other}` (inner, outer)"))),
            };
            let ks = annulus_oracle(r, single_eps(o)?, o.theta.unwrap_or(PI), side, o.m.unwrap_or(3))?;
            with_output(o, |w| {
                writeln!(w, "# {prov}")?;
                writeln!(w, "index,k2")?;
                for (i, k2) in ks.iter().enumerate() {
                    writeln!(w, "{},{k2}", i + 1)?;
                }
                Ok(())
            })
        }
        Command::Embed(_) => {
            let outline = embed(&profile(o)?, single_eps(o)?, o.points.unwrap_or(201))?;
            let crossings = outline.self_intersections();
            if !crossings.is_empty() {
                eprintln!("warning: sampled outline has {} self-crossings", crossings.len());
            }
            with_output(o, |w| {
                writeln!(w, "# {prov}")?;
                outline.write_csv(w)
            })
        }
    }
}

fn run(argv: Vec<String>) -> ExitCode {
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        // clap prints help and version to stdout with code 0, usage errors with code 2
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_command(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    run(std::env::args().collect())
}
