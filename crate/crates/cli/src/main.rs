mod config;
mod models;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use cagecalc::cellsolve::{
    cell_dirichlet_numeric, cell_dirichlet_tilde, cell_neumann, cell_neumann_higher, dirichlet_constants, CellOptions,
};
use cagecalc::discrete::{field_grid, free_field, solve_helmholtz, solve_laplace, DiscreteOptions};
use cagecalc::geometry::{BoundaryCondition, Curve, WireModel, WireShape};
use cagecalc::homogenized::Equation;
use cagecalc::resonance::{locate_peak, neumann_resonance, ModeSpec};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use config::{Config, ResonanceSection, ShapeName};
use models::{geometry, report_for, CellCache};

#[derive(Parser)]
#[command(name = "cagecalc", version, about = "Shielding and resonance of wire cages")]
struct Cli {
    /// Output directory (overrides [output].dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep k, δ or M and write one CSV column per model and probe.
    Sweep { config: PathBuf },
    /// Field of the discrete solution on a rectangular grid.
    Grid { config: PathBuf },
    /// Shift, width and amplitude of one resonance.
    Resonance { config: PathBuf },
    /// Far-field constants of one cell problem.
    Cell {
        /// disk, perpendicular, tangential or square.
        shape: String,
        delta: f64,
        #[arg(long, value_enum, default_value = "dirichlet")]
        bc: Bc,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        model: u8,
        /// Also write the sampled cell solution as CSV.
        #[arg(long)]
        grid: bool,
    },
    /// Run the acceptance checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bc {
    Dirichlet,
    Neumann,
}

enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
    Other(anyhow::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

type Run<T> = std::result::Result<T, Failure>;

trait Classify<T> {
    fn config(self) -> Run<T>;
    fn solver(self) -> Run<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for std::result::Result<T, E> {
    fn config(self) -> Run<T> {
        self.map_err(|e| Failure::Config(e.into()))
    }
    fn solver(self) -> Run<T> {
        self.map_err(|e| Failure::Solver(e.into()))
    }
}

struct Ctx {
    out: Option<PathBuf>,
    quiet: bool,
}

impl Ctx {
    fn dir(&self, cfg: Option<&Config>) -> PathBuf {
        match (&self.out, cfg) {
            (Some(d), _) => d.clone(),
            (None, Some(c)) => PathBuf::from(&c.output.dir),
            (None, None) => PathBuf::from("."),
        }
    }

    fn write(&self, path: &Path, body: &str) -> Run<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display())).map_err(Failure::Other)?;
        if !self.quiet {
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn sweep(ctx: &Ctx, path: &Path) -> Run<()> {
    let cfg = Config::load(path).config()?;
    let hash = cfg.hash();
    let s = cfg.sweep.as_ref().ok_or_else(|| anyhow!("{}: no [sweep] section", path.display())).config()?;
    let t = Instant::now();
    let out = if s.track.is_some() { sweep::run_track(&cfg, &hash) } else { sweep::run_sweep(&cfg, &hash) }.solver()?;
    let dir = ctx.dir(Some(&cfg));
    let stem = &cfg.output.name;
    ctx.write(&dir.join(format!("{stem}.json")), &pretty(&out.summary))?;
    if let Some((i, v, msg)) = out.failure {
        return Err(Failure::Solver(anyhow!("sample {i} ({} = {v}): {msg}", s.variable.name())));
    }
    ctx.write(&dir.join(format!("{stem}.csv")), &out.csv)?;
    if !ctx.quiet {
        eprintln!("{} samples in {:.1} s", s.count, t.elapsed().as_secs_f64());
    }
    Ok(())
}

fn grid(ctx: &Ctx, path: &Path) -> Run<()> {
    let cfg = Config::load(path).config()?;
    let g = cfg.grid.as_ref().ok_or_else(|| anyhow!("{}: no [grid] section", path.display())).config()?;
    if cfg.cage.m > 0 && cfg.cage.shape != ShapeName::Disk {
        return Err(Failure::Config(anyhow!("cage.shape: the discrete solver handles disk wires only")));
    }
    let cage = cfg.cage.core(cfg.cage.m, cfg.cage.delta);
    let geom = geometry(&cage).config()?;
    let opts = DiscreteOptions { p: cfg.solver.p, c: None, symmetry: cfg.solver.symmetry };
    let (eq, k, z0) = (cfg.source.equation, cfg.source.k, cfg.source.z0());
    let sol = match eq {
        Equation::Laplace => solve_laplace(&geom, z0, &opts),
        Equation::Helmholtz => solve_helmholtz(&geom, k, z0, &opts),
    }
    .solver()?;
    let field = field_grid(&sol, (g.x[0], g.x[1]), (g.y[0], g.y[1]), g.nx, g.ny);
    let hash = cfg.hash();
    let csv = format!("# config-hash={hash}\n{}", field.to_csv());

    let inside = field
        .ys
        .iter()
        .flat_map(|&y| field.xs.iter().map(move |&x| Complex64::new(x, y)))
        .zip(&field.values)
        .filter(|(z, v)| z.norm() < 1.0 && v.re.is_finite())
        .map(|(_, v)| v.re.abs())
        .fold(0.0, f64::max);
    let summary = json!({
        "config_hash": hash,
        "nx": g.nx,
        "ny": g.ny,
        "max_abs_re_inside": inside,
        "free_field_origin_abs": free_field(eq, k, Complex64::new(0.0, 0.0), z0).norm(),
        "collocation_residual": sol.collocation_residual.max,
    });
    let dir = ctx.dir(Some(&cfg));
    let stem = &cfg.output.name;
    ctx.write(&dir.join(format!("{stem}.csv")), &csv)?;
    ctx.write(&dir.join(format!("{stem}.json")), &pretty(&summary))
}

fn resonance(ctx: &Ctx, path: &Path) -> Run<()> {
    let cfg = Config::load(path).config()?;
    let rs = cfg.resonance.clone().unwrap_or(ResonanceSection {
        mode: [0, 1],
        bc: BoundaryCondition::Dirichlet,
        compare: false,
        probe: [0.0, 0.0],
    });
    let cage = cfg.cage.core(cfg.cage.m, cfg.cage.delta);
    if cage.m == 0 {
        return Err(Failure::Config(anyhow!("cage.m: a resonance report needs wires")));
    }
    let cells = CellCache::default();
    let hash = cfg.hash();
    let [a, b] = rs.mode;
    let body = match rs.bc {
        BoundaryCondition::Neumann => {
            let mode = ModeSpec::circle_neumann(a, b).config()?;
            let c = cells.get(cage.shape, cage.delta, cage.model).solver()?;
            let lambda = c.lambda.ok_or_else(|| anyhow!("no blockage coefficient for {:?}", cage.shape)).solver()?;
            let r = neumann_resonance(&mode, cage.epsilon() * lambda).solver()?;
            json!({ "config_hash": hash, "kind": "neumann", "lambda": lambda, "report": r })
        }
        BoundaryCondition::Dirichlet => {
            let mode = match cage.curve {
                Curve::UnitCircle => ModeSpec::circle(a, b),
                Curve::UnitSquare => ModeSpec::square(a, b),
            }
            .config()?;
            let z0 = cfg.source.z0();
            let r = report_for(&mode, &cage, z0, &cells).solver()?;
            let probe = Complex64::new(rs.probe[0], rs.probe[1]);
            let mut v = json!({
                "config_hash": hash,
                "kind": "dirichlet",
                "report": r,
                "probe": rs.probe,
                "predicted_peak_field": r.peak_field(probe),
            });
            if rs.compare {
                if cage.shape != WireShape::Disk {
                    return Err(Failure::Config(anyhow!("resonance.compare: the discrete solver handles disk wires only")));
                }
                let geom = geometry(&cage).config()?;
                let opts = DiscreteOptions { p: cfg.solver.p, c: None, symmetry: cfg.solver.symmetry };
                let reach = (10.0 * r.fwhm).max(0.01);
                let amp = |k: f64| {
                    solve_helmholtz(&geom, k, z0, &opts).and_then(|s| s.evaluate(probe)).map(|v| v.norm()).unwrap_or(f64::NAN)
                };
                let (kp, peak) = locate_peak(amp, r.k_peak - reach, r.k_peak + reach, 41, 1e-8);
                v["discrete"] = json!({ "k_peak": kp, "peak_field": peak, "window": [r.k_peak - reach, r.k_peak + reach] });
            }
            v
        }
    };
    let dir = ctx.dir(Some(&cfg));
    ctx.write(&dir.join(format!("{}.json", cfg.output.name)), &pretty(&body))
}

fn cell(ctx: &Ctx, shape: &str, delta: f64, bc: Bc, model: u8, dump: bool) -> Run<()> {
    let name = ShapeName::parse(shape)
        .ok_or_else(|| anyhow!("unknown shape {shape:?}; expected disk, perpendicular, tangential or square"))
        .config()?;
    let shape = name.shape();
    let model = if model == 2 { WireModel::Model2 } else { WireModel::Model1 };
    let opts = CellOptions::default();
    let (body, grid) = match bc {
        Bc::Dirichlet => {
            let (mut c, grid) = match shape {
                WireShape::Disk | WireShape::Square => {
                    let (sol, c) = cell_dirichlet_numeric(shape, delta, &opts).solver()?;
                    (c, Some(sol))
                }
                _ => (dirichlet_constants(shape, delta, &opts).solver()?, None),
            };
            if shape == WireShape::Disk && delta < 0.5 {
                let t = cell_dirichlet_tilde(shape, delta, model).solver()?;
                c.sigma_tilde_minus = Some(t[2]);
                c.tau_tilde_minus = Some(t[3]);
                c.model = Some(model);
            }
            (json!({ "bc": "dirichlet", "constants": c }), grid)
        }
        Bc::Neumann => {
            let (sol, lambda) = cell_neumann(shape, delta, &opts).solver()?;
            let higher = cell_neumann_higher(shape, delta, model).ok();
            let mut v = json!({ "bc": "neumann", "shape": shape, "delta": delta, "lambda": lambda });
            if let Some((mt, mh, mc)) = higher {
                v["mu_tilde"] = json!(mt);
                v["mu_hat"] = json!(mh);
                v["mu_check"] = json!(mc);
            }
            (v, sol)
        }
    };
    let text = pretty(&body);
    print!("{text}");
    if ctx.out.is_some() || dump {
        let dir = ctx.dir(None);
        let stem = format!("cell_{shape}_{delta}", shape = name_of(name));
        ctx.write(&dir.join(format!("{stem}.json")), &text)?;
        if dump {
            let g = grid.ok_or_else(|| anyhow!("no grid solution for this shape; its constants are closed form")).config()?;
            ctx.write(&dir.join(format!("{stem}.csv")), &g.to_csv())?;
        }
    }
    Ok(())
}

fn name_of(s: ShapeName) -> &'static str {
    match s {
        ShapeName::Disk => "disk",
        ShapeName::Perpendicular => "perpendicular",
        ShapeName::Tangential => "tangential",
        ShapeName::Square => "square",
    }
}

fn selftest(ctx: &Ctx) -> Run<bool> {
    let mut all = true;
    for (id, check) in cagecalc::acceptance::CHECKS {
        let v = cagecalc::acceptance::run(id, *check);
        all &= v.passed;
        if !ctx.quiet || !v.passed {
            println!("{v}");
        }
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = Ctx { out: cli.out, quiet: cli.quiet };
    let r = match &cli.command {
        Command::Sweep { config } => sweep(&ctx, config),
        Command::Grid { config } => grid(&ctx, config),
        Command::Resonance { config } => resonance(&ctx, config),
        Command::Cell { shape, delta, bc, model, grid } => cell(&ctx, shape, *delta, *bc, *model, *grid),
        Command::Selftest => match selftest(&ctx) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
