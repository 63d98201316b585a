//! `rmspace` command-line driver.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use rmspace::bergman::{duality_pairing_analytic, operator_norm_estimate, project, project_rule, KernelOperator};
use rmspace::mixed_norm::rm_norm;
use rmspace::theorem::{
    boundary_points, compactness_grid_scan, delta_exponent_fit_cached, exponent_grid, inclusion_grid_scan,
    scan_config, DeltaFamily, Functional, NormCache, ScanRow,
};
use rmspace::witness::{embedding_params, PnoboundWitness};
use rmspace::{
    AnalyticFunction, Complex64, ExponentPair, ExtendedExponent, NormValue, PolarGrid, QuadratureConfig,
};

const EXIT_ERROR: u8 = 1;
const EXIT_DIVERGED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "rmspace", version, about = "Experiments on the mixed-norm spaces RM(p,q) of the unit disc")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON file with quadrature settings (missing fields take defaults)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized estimates
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for CSV/JSON artifacts and manifest.json; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Polar grid as <angles>x<radii>
    #[arg(long, global = true, default_value = "64x64")]
    grid: String,
    /// Relative tolerance, overriding the config file
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed norm of one function, as NormEstimate JSON
    Norm {
        /// Function spec as JSON, or @path to a JSON file
        #[arg(long)]
        function: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Inclusion predicate against witness scans on an exponent grid
    ScanInclusion {
        /// Comma-separated exponents; fractions and inf are accepted
        #[arg(long, default_value = "1,4/3,2,4,inf")]
        exponents: String,
    },
    /// Compactness predicate against witness scans on an exponent grid
    ScanCompactness {
        #[arg(long, default_value = "1,4/3,2,4,inf")]
        exponents: String,
    },
    /// Fitted growth exponents of point and derivative evaluation
    ScanFunctional {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Comma-separated evaluation radii in (0, 1), increasing
        #[arg(long)]
        z: Option<String>,
    },
    /// Grid Bergman projection of a function at a list of points
    Project {
        #[arg(long)]
        function: String,
        /// Points as re,im pairs separated by ';'
        #[arg(long)]
        points: String,
    },
    /// Parameter table and invariant checks of the disc construction
    Witness {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
    },
    /// Regenerate every report table into --out
    Report,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config: &'a QuadratureConfig,
    config_sha256: String,
    seed: u64,
    artifacts: Vec<String>,
    wall_time_secs: f64,
}

struct Run {
    command: &'static str,
    cfg: QuadratureConfig,
    seed: u64,
    out: Option<PathBuf>,
    artifacts: Vec<String>,
    started: Instant,
}

impl Run {
    fn hash(&self) -> String {
        let json = serde_json::to_string(&self.cfg).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    fn footer(&self) -> String {
        format!("# rmspace {} seed={} config_sha256={}\n", self.command, self.seed, self.hash())
    }

    /// Write an artifact into the output directory, or print it.
    fn emit(&mut self, name: &str, body: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(name), body)?;
                self.artifacts.push(name.to_string());
            }
            None => print!("{body}"),
        }
        Ok(())
    }

    fn emit_csv(&mut self, name: &str, mut body: String) -> anyhow::Result<()> {
        body.push_str(&self.footer());
        self.emit(name, &body)
    }

    fn finish(self) -> anyhow::Result<()> {
        let Some(dir) = &self.out else { return Ok(()) };
        let m = RunManifest {
            command: self.command,
            config: &self.cfg,
            config_sha256: self.hash(),
            seed: self.seed,
            artifacts: self.artifacts.clone(),
            wall_time_secs: self.started.elapsed().as_secs_f64(),
        };
        fs::create_dir_all(dir)?;
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(())
    }
}

fn parse_exponent(s: &str) -> anyhow::Result<ExtendedExponent> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (
                a.trim().parse().map_err(|_| anyhow::anyhow!("bad exponent '{s}'"))?,
                b.trim().parse().map_err(|_| anyhow::anyhow!("bad exponent '{s}'"))?,
            );
            Ok(ExtendedExponent::finite(a / b)?)
        }
        None => Ok(s.parse()?),
    }
}

fn parse_list<T>(s: &str, sep: char, f: impl Fn(&str) -> anyhow::Result<T>) -> anyhow::Result<Vec<T>> {
    s.split(sep).filter(|t| !t.trim().is_empty()).map(|t| f(t.trim())).collect()
}

fn parse_f64(s: &str) -> anyhow::Result<f64> {
    s.trim().parse().map_err(|_| anyhow::anyhow!("bad number '{s}'"))
}

fn load_function(spec: &str) -> anyhow::Result<AnalyticFunction> {
    let text = match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)?,
        None => spec.to_string(),
    };
    Ok(AnalyticFunction::from_json(&text)?)
}

fn load_config(g: &Global, base: QuadratureConfig) -> anyhow::Result<QuadratureConfig> {
    let mut cfg = match &g.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => base,
    };
    if let Some(t) = g.tol {
        cfg.rel_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verdict(w: Option<bool>, yes: &str, no: &str) -> String {
    match w {
        Some(true) => yes.into(),
        Some(false) => no.into(),
        None => "inconclusive".into(),
    }
}

fn scan_csv(rows: &[ScanRow], yes: &str, no: &str) -> String {
    let mut s = String::from("p0,q0,p,q,predicted,witness,agreement\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.p0,
            r.q0,
            r.p,
            r.q,
            if r.predicted { yes } else { no },
            verdict(r.witness, yes, no),
            r.agreement()
        );
    }
    s
}

fn functional_csv(pq: ExponentPair, z: &[f64], cache: &NormCache) -> rmspace::Result<(String, bool)> {
    let s = pq.reciprocal_sum();
    let mut out = String::new();
    let mut all = true;
    for (which, name, predicted) in
        [(Functional::PointEval, "point", s), (Functional::DerivativeEval, "derivative", s + 1.0)]
    {
        let fit = delta_exponent_fit_cached(pq, which, z, &DeltaFamily::Standard, cache)?;
        let agree = (fit.slope - predicted).abs() <= 0.1;
        all &= agree;
        let _ = writeln!(
            out,
            "{},{},{name},{},{:.6},{:.6},{:.3e},{:.6},{agree}",
            pq.p,
            pq.q,
            fit.points.len(),
            fit.slope,
            fit.intercept,
            fit.residual,
            predicted
        );
    }
    Ok((out, all))
}

const FUNCTIONAL_HEADER: &str = "p,q,functional,points,slope,intercept,residual,predicted,agreement\n";

fn witness_csv(p: f64, k: usize) -> rmspace::Result<(String, bool)> {
    let e = embedding_params(p, k)?;
    let c = e.checks();
    let mut s = String::from("k,r,a,a_minus_1,eps,theta\n");
    for i in 0..k {
        let _ = writeln!(s, "{i},{:e},{:e},{:e},{:e},{:e}", e.r[i], e.a[i], e.a_minus_1[i], e.eps[i], e.theta[i]);
    }
    let ok = c.eps_sum < 1.0 && c.min_sector_gap > 0.0 && c.max_theta < std::f64::consts::PI;
    let _ = writeln!(
        s,
        "# checks eps_sum={:e} eps_sum_bound={:e} tail_bound={:e} min_sector_gap={:e} max_theta={:e} normalization_error={:e} ok={ok}",
        c.eps_sum, c.eps_sum_bound, c.tail_bound, c.min_sector_gap, c.max_theta, c.normalization_error
    );
    Ok((s, ok))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let g = &cli.global;
    let started = Instant::now();
    let run = |command: &'static str, base: QuadratureConfig| -> anyhow::Result<Run> {
        Ok(Run { command, cfg: load_config(g, base)?, seed: g.seed, out: g.out.clone(), artifacts: vec![], started })
    };
    let code = match &cli.command {
        Command::Norm { function, p, q } => {
            let mut r = run("norm", QuadratureConfig::default())?;
            let f = load_function(function)?;
            let pq = ExponentPair::new(parse_exponent(p)?, parse_exponent(q)?);
            let est = rm_norm(&f, pq, &r.cfg)?;
            r.emit("norm.json", &(serde_json::to_string_pretty(&est)? + "\n"))?;
            r.finish()?;
            if est.converged {
                0
            } else if est.value == NormValue::Infinite {
                if let Some(x) = est.divergence_exponent {
                    eprintln!("diverged with growth exponent {x:.4}");
                }
                EXIT_DIVERGED
            } else {
                EXIT_INCONCLUSIVE
            }
        }
        Command::ScanInclusion { exponents } => {
            let mut r = run("scan-inclusion", scan_config())?;
            let grid = parse_list(exponents, ',', parse_exponent)?;
            let rows: Vec<ScanRow> =
                inclusion_grid_scan(&grid, &NormCache::new(r.cfg.clone()))?.into_iter().map(|x| x.0).collect();
            r.emit_csv("scan_inclusion.csv", scan_csv(&rows, "included", "excluded"))?;
            r.finish()?;
            if rows.iter().all(|x| x.witness.is_some()) { 0 } else { EXIT_INCONCLUSIVE }
        }
        Command::ScanCompactness { exponents } => {
            let mut r = run("scan-compactness", scan_config())?;
            let grid = parse_list(exponents, ',', parse_exponent)?;
            let rows: Vec<ScanRow> =
                compactness_grid_scan(&grid, &NormCache::new(r.cfg.clone()))?.into_iter().map(|x| x.0).collect();
            r.emit_csv("scan_compactness.csv", scan_csv(&rows, "compact", "noncompact"))?;
            r.finish()?;
            if rows.iter().all(|x| x.witness.is_some()) { 0 } else { EXIT_INCONCLUSIVE }
        }
        Command::ScanFunctional { p, q, z } => {
            let mut r = run("scan-functional", scan_config())?;
            let pq = ExponentPair::new(parse_exponent(p)?, parse_exponent(q)?);
            let zs = match z {
                Some(s) => parse_list(s, ',', parse_f64)?,
                None => boundary_points(3..=8),
            };
            let (body, _) = functional_csv(pq, &zs, &NormCache::new(r.cfg.clone()))?;
            r.emit_csv("scan_functional.csv", format!("{FUNCTIONAL_HEADER}{body}"))?;
            r.finish()?;
            0
        }
        Command::Project { function, points } => {
            let mut r = run("project", QuadratureConfig::default())?;
            let grid = PolarGrid::from_spec(&g.grid)?;
            let f = load_function(function)?;
            let pts = parse_list(points, ';', |t| {
                let (re, im) = t.split_once(',').unwrap_or((t, "0"));
                Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?))
            })?;
            let mut s = String::from("z_re,z_im,P_re,P_im\n");
            for z in pts {
                let v = project(&f, z, &grid)?;
                let _ = writeln!(s, "{:e},{:e},{:e},{:e}", z.re, z.im, v.re, v.im);
            }
            r.emit_csv("project.csv", s)?;
            r.finish()?;
            0
        }
        Command::Witness { p, k } => {
            let mut r = run("witness", QuadratureConfig::default())?;
            let (body, ok) = witness_csv(*p, *k)?;
            r.emit_csv("witness.csv", body)?;
            r.finish()?;
            if ok { 0 } else { EXIT_ERROR }
        }
        Command::Report => {
            if g.out.is_none() {
                return Err(anyhow::anyhow!("report needs --out <dir>"));
            }
            let mut r = run("report", QuadratureConfig::default())?;
            report(&mut r, &g.grid)?;
            r.finish()?;
            0
        }
    };
    Ok(code)
}

fn report(r: &mut Run, grid_spec: &str) -> anyhow::Result<()> {
    use rmspace::exponent::{Finite, Infinity};
    let cfg = r.cfg.clone();

    let mut s = String::from("p,q,n,value,closed_form,rel_err\n");
    for p in [1.0, 2.0, 4.0] {
        for q in [Finite(1.0), Finite(2.0), Finite(4.0), Infinity] {
            for n in 0..=64u32 {
                let v = rm_norm(&AnalyticFunction::monomial(n), ExponentPair::new(Finite(p), q), &cfg)?;
                let want = (1.0 + n as f64 * p).powf(-1.0 / p);
                let _ = writeln!(s, "{p},{q},{n},{:.12e},{want:.12e},{:.3e}", v.last(), (v.last() - want).abs() / want);
            }
        }
    }
    r.emit_csv("monomial_norms.csv", s)?;

    let mut s = String::from("p,q,alpha,converged,diverged,divergence_exponent,expected_finite\n");
    for p in [1.0, 2.0, 4.0] {
        for q in [1.0, 2.0, 4.0] {
            let pq = ExponentPair::finite(p, q)?;
            for factor in [0.9, 1.1] {
                let a = factor * pq.reciprocal_sum();
                let e = rm_norm(&AnalyticFunction::power_singularity(a), pq, &cfg)?;
                let exp = e.divergence_exponent.map(|x| format!("{x:.6}")).unwrap_or_default();
                let _ = writeln!(s, "{p},{q},{a:.6},{},{},{exp},{}", e.converged, e.diverged(), factor < 1.0);
            }
        }
    }
    r.emit_csv("frontier.csv", s)?;

    let cache = NormCache::new(scan_config());
    let mut s = String::from(FUNCTIONAL_HEADER);
    for (p, q) in [(2.0, 2.0), (2.0, 4.0), (4.0, 2.0)] {
        s += &functional_csv(ExponentPair::finite(p, q)?, &boundary_points(3..=8), &cache)?.0;
    }
    r.emit_csv("functional.csv", s)?;

    for p in [1, 2, 4] {
        r.emit_csv(&format!("witness_p{p}.csv"), witness_csv(p as f64, 16)?.0)?;
    }

    let grid = exponent_grid();
    let rows: Vec<ScanRow> = inclusion_grid_scan(&grid, &cache)?.into_iter().map(|x| x.0).collect();
    r.emit_csv("scan_inclusion.csv", scan_csv(&rows, "included", "excluded"))?;
    let rows: Vec<ScanRow> = compactness_grid_scan(&grid, &cache)?.into_iter().map(|x| x.0).collect();
    r.emit_csv("scan_compactness.csv", scan_csv(&rows, "compact", "noncompact"))?;

    let pgrid = PolarGrid::new(128, 128)?;
    let pts = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::from_polar(0.9, 1.0),
        Complex64::new(-0.7, 0.0),
    ];
    let mut s = String::from("n,z_re,z_im,abs_error,pairing\n");
    for n in 0..=8u32 {
        let f = AnalyticFunction::monomial(n);
        let pair = duality_pairing_analytic(&f, &f, &pgrid)?;
        for z in pts {
            let err = (project(&f, z, &pgrid)? - z.powu(n)).norm();
            let _ = writeln!(s, "{n},{:e},{:e},{err:.3e},{:.12e}", z.re, z.im, pair.re);
        }
    }
    r.emit_csv("projection.csv", s)?;

    let mut s = String::from("p,one_minus_a,abs_projection\n");
    let rule = PnoboundWitness::omega_rule(40);
    for p in [2.0, 4.0] {
        let w = PnoboundWitness::new(p)?;
        let samples = w.sample(&rule);
        for k in 2..=18 {
            let g = 0.5f64.powi(k);
            let v = project_rule(&rule, &samples, Complex64::new(1.0 - g, 0.0))?;
            let _ = writeln!(s, "{p},{g:e},{:.12e}", v.norm());
        }
    }
    r.emit_csv("blowup.csv", s)?;

    let mut s = String::from("grid,p,q,lower_bound\n");
    let pq = ExponentPair::finite(2.0, 2.0)?;
    for spec in ["32x32", grid_spec] {
        let g = PolarGrid::from_spec(spec)?;
        let est = operator_norm_estimate(&KernelOperator::bergman(&g), pq, &g, 6, r.seed)?;
        let _ = writeln!(s, "{spec},2,2,{:.12e}", est.lower_bound);
    }
    r.emit_csv("bergman_norm.csv", s)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
