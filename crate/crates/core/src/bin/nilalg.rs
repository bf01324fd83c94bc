use clap::{Args, Parser, Subcommand, ValueEnum};
use nilalg::algebra::Algebra;
use nilalg::catalog::{self, Catalog};
use nilalg::cohomology::{self, BilinearForm};
use nilalg::degeneration::{self, ClosedSet};
use nilalg::scalar::{parse::parse_scalar, Gq, Var};
use nilalg::{action, extension, ff, invariants, report};
use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nilalg", version, about = "Exact checks for nilpotent Leibniz algebras of small dimension")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Catalog file to use instead of the shipped data.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Degeneration certificate file to use instead of the shipped one.
    #[arg(long, global = true)]
    certs: Option<PathBuf>,
    /// Closed-set file to use instead of the shipped one.
    #[arg(long, global = true)]
    rsets: Option<PathBuf>,
    /// Parameter value, name=value; repeatable.
    #[arg(long = "param", global = true, value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Number of parameter samples for sampled checks.
    #[arg(long, global = true, default_value_t = 3)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Cmd {
    /// Right Leibniz identity and nilpotency for catalog entries (all when none named).
    Check { names: Vec<String> },
    /// Z², B² and an H² basis.
    H2 { name: String },
    /// Verify automorphism action tables (all when none named).
    Act { tables: Vec<String> },
    /// Central extension of a base by cocycles, e.g. --forms "D13; D21".
    Extend {
        #[arg(required_unless_present = "rebuild")]
        base: Option<String>,
        #[arg(long)]
        forms: Option<String>,
        /// Print the catalog rebuilt from the bases and orbit representatives.
        #[arg(long)]
        rebuild: bool,
    },
    /// Derivation algebra dimension and orbit dimension.
    Der { name: String },
    /// Basis-independent invariants.
    Fingerprint { name: String },
    /// Check degeneration certificates.
    Degenerate,
    /// Closed-set membership and randomized probes.
    Closedset {
        #[arg(long, default_value_t = 100)]
        borel_trials: usize,
        #[arg(long, default_value_t = 500)]
        target_trials: usize,
    },
    /// Enumerate nilpotent Leibniz algebras over F_p.
    EnumerateFf {
        #[arg(long)]
        dim: usize,
        #[arg(long = "char")]
        p: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites (all when none named).
    Report {
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Include wall-clock timings (reports are then no longer byte-stable).
        #[arg(long)]
        timings: bool,
        /// Also enumerate n = 3 over F_3 in the ff suite.
        #[arg(long)]
        ff_extended: bool,
    },
}

type Res<T> = Result<T, String>;

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn load_catalog(g: &Global) -> Res<Catalog> {
    match &g.catalog {
        Some(p) => catalog::load_catalog(p).map_err(err),
        None => Ok(Catalog::shipped()),
    }
}

fn params(g: &Global) -> Res<HashMap<Var, Gq>> {
    g.params
        .iter()
        .map(|s| {
            let (k, v) = s.split_once('=').ok_or_else(|| format!("--param expects name=value, got '{}'", s))?;
            let x = parse_scalar(v.trim()).map_err(err)?;
            let c = x.as_constant().ok_or_else(|| format!("parameter value '{}' is not a constant", v))?;
            Ok((Var::new(k.trim()), c))
        })
        .collect()
}

/// The entry, specialised at any --param values that it uses.
fn instance(cat: &Catalog, name: &str, g: &Global) -> Res<Algebra> {
    let a = cat.algebra(name).map_err(err)?;
    let p: HashMap<Var, Gq> = params(g)?.into_iter().filter(|(v, _)| a.params.contains(v)).collect();
    if p.is_empty() {
        Ok(a.clone())
    } else {
        a.at(&p).map_err(err)
    }
}

fn run(cli: Cli) -> Res<bool> {
    let g = &cli.global;
    if let Some(j) = g.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().map_err(err)?;
    }
    match &cli.cmd {
        Cmd::Check { names } => {
            let cat = load_catalog(g)?;
            let mut ok = true;
            for e in cat.entries.iter().filter(|e| names.is_empty() || names.iter().any(|n| n == e.name())) {
                let leib = e.algebra.check_right_leibniz();
                let nil = catalog::nilpotent_generic(&e.algebra).map_err(err)?;
                ok &= leib.is_none() && nil;
                match leib {
                    None => println!("{} right-leibniz ok nilpotent {}", e.name(), nil),
                    Some(f) => println!("{} right-leibniz FAILS {} nilpotent {}", e.name(), f, nil),
                }
            }
            Ok(ok)
        }
        Cmd::H2 { name } => {
            let cat = load_catalog(g)?;
            let a = instance(&cat, name, g)?;
            let c = cohomology::cohomology_basis(&a).map_err(err)?;
            println!("{}: dim Z2 = {}, dim B2 = {}, dim H2 = {}", name, c.z2.len(), c.b2.len(), c.dim_h2());
            for (i, f) in c.h2.iter().enumerate() {
                println!("  H{} = {}", i + 1, f);
            }
            if let Some(e) = cat.get(name) {
                if let Some(h) = e.h2 {
                    let forms = e.nabla_forms().map_err(err)?;
                    let t = cohomology::check_h2_table(&a, &forms).map_err(err)?;
                    println!("listed table: {} classes, expected {}, ok {}", t.listed, h, t.ok(h));
                    return Ok(t.ok(h) || forms.is_empty());
                }
            }
            Ok(true)
        }
        Cmd::Act { tables } => {
            let cat = load_catalog(g)?;
            let mut ok = true;
            for t in catalog::shipped_action_tables().iter().filter(|t| tables.is_empty() || tables.contains(&t.name)) {
                let a = cat.algebra(&t.base).map_err(err)?;
                let c = action::verify_action_table(a, t).map_err(err)?;
                ok &= c.matches();
                if c.matches() {
                    println!("{} match", t.name);
                } else {
                    println!("{} MISMATCH", t.name);
                    if let Some((i, j)) = c.aut_counterexample {
                        println!("  phi fails to be an automorphism at (e{}, e{})", i + 1, j + 1);
                    }
                    for (k, d) in &c.mismatches {
                        println!("  a{}*: computed - claimed = {}", k, d);
                    }
                }
            }
            Ok(ok)
        }
        Cmd::Extend { base, forms, rebuild } => {
            if *rebuild {
                print!("{}", catalog::reconstruct_shipped().map_err(err)?.emit());
                return Ok(true);
            }
            let cat = load_catalog(g)?;
            let name = base.as_deref().unwrap_or_default();
            let b = instance(&cat, name, g)?;
            let forms = forms.as_deref().ok_or("extend needs --forms")?;
            let fs: Vec<BilinearForm> = forms.split(';').map(|s| BilinearForm::parse(b.n, s.trim())).collect::<Result<_, _>>().map_err(err)?;
            let ts = cohomology::ts_membership(&b, &fs).map_err(err)?;
            let ext = extension::central_extension(&b, &fs).map_err(err)?;
            println!("extension of {} by {} (in T_s: {})", name, forms, ts.in_ts() && ts.independent);
            for l in ext.product_lines() {
                println!("  {}", l);
            }
            Ok(true)
        }
        Cmd::Der { name } => {
            let cat = load_catalog(g)?;
            let a = instance(&cat, name, g)?;
            match invariants::der_dim(&a) {
                Ok(d) => println!("{}: dim Der = {} (generic)", name, d),
                Err(e) => println!("{}: generic rank undetermined ({})", name, e),
            }
            for s in invariants::default_samples(&a, g.samples) {
                let mut keys: Vec<_> = s.iter().map(|(k, v)| format!("{}={}", k.name(), v)).collect();
                keys.sort();
                let d = invariants::der_dim_at(&a, &s).map_err(err)?;
                println!("  [{}] dim Der = {}, orbit dimension = {}", keys.join(","), d, a.n * a.n - d);
            }
            Ok(true)
        }
        Cmd::Fingerprint { name } => {
            let cat = load_catalog(g)?;
            let a = instance(&cat, name, g)?;
            let s = invariants::default_samples(&a, 1);
            let sample = if a.params.is_empty() { None } else { s.first() };
            println!("{}: {}", name, invariants::fingerprint(&a, sample).map_err(err)?);
            Ok(true)
        }
        Cmd::Degenerate => {
            let cat = load_catalog(g)?;
            let certs = match &g.certs {
                Some(p) => degeneration::parse_certificates(&std::fs::read_to_string(p).map_err(err)?, &p.display().to_string()).map_err(err)?,
                None => degeneration::shipped_certificates(),
            };
            let opts = report::Options { certs, samples: g.samples, ..report::Options::default() };
            let checks = report::degenerations(&cat, &opts);
            for c in &checks {
                println!("{:8} {} {}", c.status, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.status != report::Status::Fail))
        }
        Cmd::Closedset { borel_trials, target_trials } => {
            let cat = load_catalog(g)?;
            let rsets: Vec<ClosedSet> = match &g.rsets {
                Some(p) => degeneration::parse_closed_sets(&std::fs::read_to_string(p).map_err(err)?, &p.display().to_string()).map_err(err)?,
                None => degeneration::shipped_closed_sets(),
            };
            let opts = report::Options { rsets, seed: g.seed, borel_trials: *borel_trials, target_trials: *target_trials, ..report::Options::default() };
            let checks = report::nondegen_evidence(&cat, &opts);
            for c in &checks {
                println!("{:8} {} {}", c.status, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.status != report::Status::Fail))
        }
        Cmd::EnumerateFf { dim, p, out } => {
            let (r, cl) = ff::run_oracle(*dim, *p).map_err(err)?;
            let text = ff::render(&cl);
            match out {
                Some(path) => std::fs::write(path, &text).map_err(err)?,
                None => print!("{}", text),
            }
            eprintln!(
                "classes {} (union-find {}), canonical sets agree {}, orbit-stabilizer {}, full count {}",
                r.classes_a,
                r.classes_b,
                r.same_canonicals,
                r.orbit_stabilizer,
                r.full_count.map_or("n/a".to_string(), |c| c.to_string())
            );
            Ok(r.passed())
        }
        Cmd::Report { suites, timings, ff_extended } => {
            let cat = load_catalog(g)?;
            let chosen: Vec<report::Suite> = if suites.is_empty() {
                report::Suite::ALL.to_vec()
            } else {
                suites.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
            };
            let mut opts = report::Options { seed: g.seed, samples: g.samples, ..report::Options::default() };
            if let Some(p) = &g.certs {
                opts.certs = degeneration::parse_certificates(&std::fs::read_to_string(p).map_err(err)?, &p.display().to_string()).map_err(err)?;
            }
            if let Some(p) = &g.rsets {
                opts.rsets = degeneration::parse_closed_sets(&std::fs::read_to_string(p).map_err(err)?, &p.display().to_string()).map_err(err)?;
            }
            if *ff_extended {
                opts.ff_sizes.push((3, 3));
            }
            let reports: Vec<report::SuiteReport> = chosen.iter().map(|s| report::run_suite(&cat, *s, &opts)).collect();
            let format = match g.format {
                OutFormat::Text => report::Format::Text,
                OutFormat::Structured => report::Format::Structured,
            };
            print!("{}", report::render(&reports, format, g.seed, *timings));
            Ok(reports.iter().all(|r| r.passed()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
