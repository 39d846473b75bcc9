use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use bvinf::config::{load_gamma, read, resolve, AlgebraConfig, MorphismConfig, PairingConfig};
use bvinf::fixtures::a1_bundle;
use bvinf::graded::Truncation;
use bvinf::hodge::{
    check_pairing_compatibility, check_pairing_compatibility_twisted, cohomology, miniversality_check,
    polarization_check, quasi_iso_check, verify_pairing_axioms, PairingSpec, PairingTable, PolarizationData,
    Selector,
};
use bvinf::mc::{
    mc_residual, solve_mc_universal, twist_morphism, twist_operator, verify_twisted_morphism,
    verify_twisted_operator, ContractionData, McElement, ResidualMode,
};
use bvinf::morphisms::{verify_morphism, BvMorphism};
use bvinf::operators::{verify_bv, BvInstance, SweepRange};
use bvinf::probe::probes;
use bvinf::report::{Check, Report};
use clap::{Parser, Subcommand, ValueEnum};

/// Exact checks for commutative BV∞ algebras, their morphisms, Maurer–Cartan
/// elements and pairings.
#[derive(Parser, Debug)]
#[command(name = "bvinf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the polynomial-degree window.
    #[arg(long, global = true)]
    n_poly: Option<u32>,
    /// Override the h-order.
    #[arg(long, global = true)]
    n_hbar: Option<u32>,
    /// Override the parameter order.
    #[arg(long, global = true)]
    n_param: Option<u32>,
    /// Largest arity in bracket and cumulant sweeps.
    #[arg(long, global = true, default_value_t = 4)]
    arity_max: usize,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order bounds and Δ² = 0 for an algebra config.
    CheckBv { config: PathBuf },
    /// Chain-map, unit and cumulant conditions for a morphism config.
    CheckMorphism { config: PathBuf },
    /// Universal Maurer–Cartan element over the cohomology.
    SolveMc { config: PathBuf },
    /// Twisted operator checks for an MC element given as JSON.
    Twist { config: PathBuf, gamma: PathBuf },
    /// Pairing axioms and compatibility along a morphism.
    Pairing { config: PathBuf },
    /// The built-in A1 -> point example end to end.
    DemoA1,
}

/// Failure to even set up a run; exit code 2.
#[derive(Debug)]
struct Setup(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Setup {
    fn from(e: E) -> Self {
        Setup(e.into())
    }
}

impl Cli {
    fn truncation(&self, base: Truncation) -> Truncation {
        Truncation::new(
            self.n_poly.unwrap_or(base.n_poly),
            self.n_hbar.unwrap_or(base.n_hbar),
            self.n_param.unwrap_or(base.n_param),
        )
    }

    fn sweep(&self, t: Truncation) -> SweepRange {
        SweepRange::new(self.arity_max, t.n_poly)
    }

    fn algebra(&self, path: &Path) -> Result<BvInstance, Setup> {
        let cfg = AlgebraConfig::parse(&read(path)?)?;
        let t = self.truncation(cfg.truncation.unwrap_or_default());
        Ok(cfg.build(Some(t))?)
    }

    fn morphism(&self, path: &Path) -> Result<BvMorphism, Setup> {
        let cfg = MorphismConfig::parse(&read(path)?)?;
        let source = self.algebra(&resolve(path, &cfg.source))?;
        let target = AlgebraConfig::parse(&read(&resolve(path, &cfg.target))?)?.build(Some(source.truncation))?;
        Ok(cfg.build(source, target)?)
    }
}

fn check_bv(cli: &Cli, path: &Path) -> Result<Report, Setup> {
    let inst = cli.algebra(path)?;
    Ok(verify_bv(&inst, cli.sweep(inst.truncation)))
}

fn check_morphism(cli: &Cli, path: &Path) -> Result<Report, Setup> {
    let f = cli.morphism(path)?;
    let t = f.source.truncation;
    let mut rep = verify_morphism(&f, cli.sweep(t));
    rep.extend(quasi_iso_check(&f, t.n_poly, t.n_poly));
    Ok(rep)
}

fn mc_report(inst: &BvInstance, arity_max: usize) -> Result<(Report, Option<McElement>), Setup> {
    let mut rep = Report::new(format!("mc:{}", inst.name()), inst.truncation);
    let cd = ContractionData::new(inst, inst.truncation.n_poly)?;
    let basis: Vec<&str> = cd.representatives().iter().map(|r| r.label.as_str()).collect();
    rep.value("basis", serde_json::to_value(&basis)?);
    rep.value("contraction_window", inst.truncation.n_poly);
    let sol = match solve_mc_universal(inst, &cd) {
        Ok(s) => s,
        Err(e) => {
            rep.push(Check::fail("solved", e.to_string()));
            return Ok((rep, None));
        }
    };
    let ring = sol.element.ring();
    rep.value("gamma", sol.element.render());
    rep.value("gamma_by_hbar", serde_json::to_value(sol.element.table())?);
    rep.push(Check::pass("solved").with_range(format!("u-order <= {}", inst.truncation.n_param)));
    let res = mc_residual(ring, &inst.delta, sol.element.gamma(), ResidualMode::Strict);
    rep.push(match res {
        Ok(r) if r.is_zero() => Check::pass("MC residual vanishes (both routes)"),
        Ok(r) => Check::fail("MC residual vanishes (both routes)", bvinf::graded::render_series(ring, &r)),
        Err(e) => Check::fail("MC residual vanishes (both routes)", e.to_string()),
    });
    rep.extend(miniversality_check(inst, &cd, &sol.element));
    // the twisted operator is again a BV∞ operator
    let tw = twist_operator(&inst.delta, &sol.element);
    let ps = probes(ring, 20, 0, inst.truncation.n_poly.min(4));
    let sweep = SweepRange::new(arity_max.min(3), inst.truncation.n_poly.min(4));
    rep.extend(verify_twisted_operator(&tw, &ps, sweep));
    Ok((rep, Some(sol.element)))
}

fn solve_mc(cli: &Cli, path: &Path) -> Result<Report, Setup> {
    Ok(mc_report(&cli.algebra(path)?, cli.arity_max)?.0)
}

fn twist(cli: &Cli, path: &Path, gamma: &Path) -> Result<Report, Setup> {
    let inst = cli.algebra(path)?;
    let g = load_gamma(gamma, &inst)?;
    let mut rep = Report::new(format!("twist:{}", inst.name()), inst.truncation);
    rep.push(match mc_residual(g.ring(), &inst.delta, g.gamma(), ResidualMode::Strict) {
        Ok(r) if r.is_zero() => Check::pass("MC residual vanishes (both routes)"),
        Ok(r) => Check::fail("MC residual vanishes (both routes)", bvinf::graded::render_series(g.ring(), &r)),
        Err(e) => Check::fail("MC residual vanishes (both routes)", e.to_string()),
    });
    let tw = twist_operator(&inst.delta, &g);
    let ps = probes(g.ring(), 50, 0, inst.truncation.n_poly.min(4));
    let sweep = SweepRange::new(cli.arity_max.min(3), inst.truncation.n_poly.min(4));
    rep.extend(verify_twisted_operator(&tw, &ps, sweep));
    Ok(rep)
}

fn table(spec: &PairingSpec, t: Truncation) -> Result<PairingTable, Setup> {
    Ok(PairingTable::from_spec(spec, Truncation::new(t.n_poly, t.n_hbar.max(2 * t.n_poly), 0))?)
}

fn pairing(cli: &Cli, path: &Path) -> Result<Report, Setup> {
    let cfg = PairingConfig::parse(&read(path)?)?;
    let f = cli.morphism(&resolve(path, &cfg.morphism))?;
    let t = f.source.truncation;
    let window = cfg.window.min(t.n_poly);
    let cd_a = ContractionData::new(&f.source, t.n_poly)?;
    let cd_b = ContractionData::new(&f.target, t.n_poly)?;
    let pa = table(&cfg.source, t)?;
    let pb = table(&cfg.target, t)?;
    let mut rep = Report::new(format!("pairing:{}->{}", f.source.name(), f.target.name()), t);
    for (side, p) in [("source", &pa), ("target", &pb)] {
        for mut c in verify_pairing_axioms(p).checks {
            c.name = format!("{side}: {}", c.name);
            rep.push(c);
        }
        for mut c in polarization_check(p, &PolarizationData::new(p, cfg.pole_window)).checks {
            c.name = format!("{side}: {}", c.name);
            rep.push(c);
        }
    }
    rep.extend(check_pairing_compatibility(&f, &cd_a, &cd_b, &pa, &pb, window));
    if let Some(g) = &cfg.gamma {
        let gamma = load_gamma(&resolve(path, g), &f.source)?;
        rep.extend(check_pairing_compatibility_twisted(&f, &gamma, &cd_a, &cd_b, &pa, &pb, window.min(4)));
    }
    Ok(rep)
}

fn demo_a1(cli: &Cli) -> Result<Report, Setup> {
    let t = cli.truncation(Truncation::new(8, 8, 2));
    let plain = Truncation::new(t.n_poly, t.n_hbar, 0);
    let bundle = a1_bundle(plain);
    let sweep = cli.sweep(plain);
    let mut rep = Report::new("demo:A1", t);
    rep.extend(verify_bv(&bundle.source, sweep));
    rep.extend(verify_bv(&bundle.target, sweep));
    rep.extend(verify_morphism(&bundle.morphism, sweep));

    let slice = cohomology(&bundle.source, Selector::Delta0, t.n_poly)?;
    rep.value("betti", serde_json::to_value(&slice.betti)?);

    let unit = PairingSpec {
        labels: vec!["1".into()],
        degrees: vec![0],
        entries: vec![vec!["1".into()]],
    };
    let cd_a = ContractionData::new(&bundle.source, t.n_poly)?;
    let cd_b = ContractionData::new(&bundle.target, 0)?;
    let (pa, pb) = (table(&unit, plain)?, table(&unit, plain)?);
    rep.extend(check_pairing_compatibility(&bundle.morphism, &cd_a, &cd_b, &pa, &pb, t.n_poly.min(8)));

    let deformed = a1_bundle(t);
    let (mc, gamma) = mc_report(&deformed.source, cli.arity_max)?;
    rep.extend(mc);
    if let Some(g) = gamma {
        match twist_morphism(&deformed.morphism, &g) {
            Ok(tw) => {
                let ps = probes(g.ring(), 12, 0, 2);
                let tuples: Vec<_> = (1..=cli.arity_max.min(3))
                    .flat_map(|n| ps.chunks(n).filter(|c| c.len() == n).map(<[_]>::to_vec).collect::<Vec<_>>())
                    .collect();
                rep.extend(verify_twisted_morphism(&tw, &tuples));
            }
            Err(e) => rep.push(Check::fail("twisted morphism", e.to_string())),
        }
    }
    Ok(rep)
}

fn run(cli: &Cli) -> Result<Report, Setup> {
    match &cli.command {
        Command::CheckBv { config } => check_bv(cli, config),
        Command::CheckMorphism { config } => check_morphism(cli, config),
        Command::SolveMc { config } => solve_mc(cli, config),
        Command::Twist { config, gamma } => twist(cli, config, gamma),
        Command::Pairing { config } => pairing(cli, config),
        Command::DemoA1 => demo_a1(cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rep = match run(&cli) {
        Ok(r) => r,
        Err(Setup(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, rep.to_json()).with_context(|| format!("writing {}", path.display())) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    match cli.format {
        Format::Text => print!("{}", rep.render_text()),
        Format::Json => println!("{}", rep.to_json()),
    }
    if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
