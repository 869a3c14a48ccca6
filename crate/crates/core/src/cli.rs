//! The `glasscape` command line.
//!
//! Each subcommand resolves its parameters (flags first, then the
//! `--config` file, then built-in defaults), runs the library operation,
//! writes CSV or `key value` files into the output directory and prints a
//! one-line summary. Errors map to exit codes through
//! [`GlassError::exit_code`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand as ClapSubcommand};

use crate::complexity::{e0_pure, e_infinity, ground_state_near, ThetaSurface};
use crate::error::{GlassError, Result};
use crate::io::{render_csv, render_summary, write_file, Cell, ExperimentConfig, Header, Mode};
use crate::mixture::{classify, Mixture};
use crate::montecarlo::experiments::{crt_count_from, search_replicas};
use crate::montecarlo::gibbs::{BAND_MASS_THRESHOLD, CHAOS_MASS_THRESHOLD};
use crate::montecarlo::{chaos_experiment, gibbs_experiment, goe_check, sample_hamiltonian, GibbsConfig, OverlapHistogram};
use crate::paircomplexity::{check_condition_m, Psi0Profile};
use crate::thermo::phase_summary;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "GLASSCAPE_THREADS";

/// Slack between the empirical Kac-Rice exponent and `sup Θ` in test mode.
pub const CRT_SLACK: f64 = 0.2;

#[derive(Debug, Parser)]
#[command(name = "glasscape", version, about = "Landscape complexity of mixed spherical p-spin glasses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Mixture file (`p value` lines).
    #[arg(long)]
    pub mixture: Option<PathBuf>,
    /// Experiment config (`key value` lines); flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Temperatures in the tempering ladder.
    #[arg(long, default_value_t = 6)]
    pub ladder: usize,
    #[arg(long)]
    pub mode: Option<Mode>,
}

#[derive(Debug, ClapSubcommand)]
pub enum Command {
    /// Pure, pure-like, critical or full.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Θ surface on a (u, x) grid.
    Complexity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        u_range: Option<Vec<f64>>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        x_range: Option<Vec<f64>>,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// E₀(q), x₀(q) and E∞(q) on a grid of radii.
    E0 {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.9, 1.0])]
        q_range: Vec<f64>,
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// Ψ⁰ profile on [−1, 1].
    Psi0 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Condition M verdict.
    Condm {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
    },
    /// q_c, q*, q**, E*, F_β and the gap at one or more β.
    Phase {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
    },
    /// Kac-Rice first-moment count of q-critical points.
    SimulateCrt {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
        /// Descent starts per replica (default 5·N).
        #[arg(long)]
        starts: Option<usize>,
        /// Window centre in energy per site (default −E₀(q)).
        #[arg(long, allow_negative_numbers = true)]
        u_center: Option<f64>,
        /// Window centre in radial derivative per √N (default −x₀(q)).
        #[arg(long, allow_negative_numbers = true)]
        x_center: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        half_width: f64,
    },
    /// Overlap structure of the Gibbs measure.
    SimulateGibbs {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Overlaps across two temperatures.
    SimulateChaos {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        beta2: Option<f64>,
    },
    /// GOE log-determinant against Ω.
    GoeCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        replicas: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Classify,
    Complexity,
    E0,
    Psi0,
    Condm,
    Phase,
    SimulateCrt,
    SimulateGibbs,
    SimulateChaos,
    GoeCheck,
}

impl Subcommand {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subcommand::Classify => "classify",
            Subcommand::Complexity => "complexity",
            Subcommand::E0 => "e0",
            Subcommand::Psi0 => "psi0",
            Subcommand::Condm => "condm",
            Subcommand::Phase => "phase",
            Subcommand::SimulateCrt => "simulate-crt",
            Subcommand::SimulateGibbs => "simulate-gibbs",
            Subcommand::SimulateChaos => "simulate-chaos",
            Subcommand::GoeCheck => "goe-check",
        }
    }
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub q: f64,
    pub betas: Vec<f64>,
    pub beta2: f64,
    pub n: usize,
    pub replicas: usize,
    pub chains: usize,
    pub sweeps: usize,
    pub ladder: usize,
    pub starts: usize,
    pub step: f64,
    pub points: usize,
    pub u_range: Option<(f64, f64)>,
    pub x_range: Option<(f64, f64)>,
    pub q_range: (f64, f64),
    pub u_center: Option<f64>,
    pub x_center: Option<f64>,
    pub half_width: f64,
    pub x: f64,
    pub mode: Mode,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            q: 1.0,
            betas: vec![40.0],
            beta2: 30.0,
            n: 32,
            replicas: 50,
            chains: 8,
            sweeps: 400,
            ladder: 6,
            starts: 0,
            step: 0.01,
            points: 41,
            u_range: None,
            x_range: None,
            q_range: (0.9, 1.0),
            u_center: None,
            x_center: None,
            half_width: 0.05,
            x: 3.0,
            mode: Mode::Exploratory,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub mixture_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub params: Params,
}

fn pair(v: Option<Vec<f64>>) -> Option<(f64, f64)> {
    v.map(|v| (v[0], v[1]))
}

impl RunConfig {
    /// Merge flags, the optional config file and defaults.
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (sub, common) = match &cli.command {
            Command::Classify { common } => (Subcommand::Classify, common),
            Command::Complexity { common, .. } => (Subcommand::Complexity, common),
            Command::E0 { common, .. } => (Subcommand::E0, common),
            Command::Psi0 { common, .. } => (Subcommand::Psi0, common),
            Command::Condm { common, .. } => (Subcommand::Condm, common),
            Command::Phase { common, .. } => (Subcommand::Phase, common),
            Command::SimulateCrt { common, .. } => (Subcommand::SimulateCrt, common),
            Command::SimulateGibbs { common, .. } => (Subcommand::SimulateGibbs, common),
            Command::SimulateChaos { common, .. } => (Subcommand::SimulateChaos, common),
            Command::GoeCheck { common, .. } => (Subcommand::GoeCheck, common),
        };
        let common = common.clone();
        let file = match &common.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let mut p = Params::default();
        p.q = file.q.unwrap_or(p.q);
        p.n = file.n.unwrap_or(p.n);
        p.replicas = file.replicas.unwrap_or(p.replicas);
        p.chains = file.chains.unwrap_or(p.chains);
        p.sweeps = file.sweeps.unwrap_or(p.sweeps);
        p.mode = file.mode.unwrap_or(p.mode);
        if let Some(b) = file.beta {
            p.betas = vec![b];
        }
        let apply_sim = |p: &mut Params, s: &SimArgs| {
            p.n = s.n.unwrap_or(p.n);
            p.chains = s.chains.unwrap_or(p.chains);
            p.sweeps = s.sweeps.unwrap_or(p.sweeps);
            p.ladder = s.ladder;
            p.mode = s.mode.unwrap_or(p.mode);
        };
        match cli.command {
            Command::Classify { .. } => {}
            Command::Complexity { q, u_range, x_range, points, .. } => {
                p.q = q.unwrap_or(p.q);
                p.u_range = pair(u_range);
                p.x_range = pair(x_range);
                p.points = points;
            }
            Command::E0 { q_range, points, .. } => {
                p.q_range = (q_range[0], q_range[1]);
                p.points = points;
            }
            Command::Psi0 { step, .. } | Command::Condm { step, .. } => p.step = step,
            Command::Phase { beta, .. } => {
                if !beta.is_empty() {
                    p.betas = beta;
                }
            }
            Command::SimulateCrt {
                sim,
                q,
                replicas,
                starts,
                u_center,
                x_center,
                half_width,
                ..
            } => {
                apply_sim(&mut p, &sim);
                p.q = q.unwrap_or(p.q);
                p.replicas = replicas.unwrap_or(p.replicas);
                p.starts = starts.unwrap_or(5 * p.n);
                p.u_center = u_center;
                p.x_center = x_center;
                p.half_width = half_width;
            }
            Command::SimulateGibbs { sim, beta, .. } => {
                apply_sim(&mut p, &sim);
                if let Some(b) = beta {
                    p.betas = vec![b];
                } else if file.beta.is_none() {
                    p.betas = vec![20.0];
                }
            }
            Command::SimulateChaos { sim, beta, beta2, .. } => {
                apply_sim(&mut p, &sim);
                if let Some(b) = beta {
                    p.betas = vec![b];
                } else if file.beta.is_none() {
                    p.betas = vec![20.0];
                }
                p.beta2 = beta2.unwrap_or(p.beta2);
            }
            Command::GoeCheck { n, x, replicas, .. } => {
                p.n = n;
                p.x = x;
                p.replicas = replicas.or(file.replicas).unwrap_or(100);
            }
        }
        Ok(RunConfig {
            subcommand: sub,
            mixture_path: common.mixture.or(file.mixture_file),
            output_dir: common.out,
            seed: common.seed.or(file.seed).unwrap_or(1),
            params: p,
        })
    }

    fn load_mixture(&self) -> Result<Mixture> {
        let path = self
            .mixture_path
            .as_ref()
            .ok_or_else(|| GlassError::Usage(format!("{} needs --mixture", self.subcommand.as_str())))?;
        fs::read_to_string(path)?.parse()
    }

    /// Canonical text hashed into output headers. The output directory is
    /// left out so that the same run in two places gives identical files.
    fn canonical(&self, mixture: Option<&Mixture>) -> String {
        let mut s = format!("subcommand {}\nseed {}\n", self.subcommand.as_str(), self.seed);
        if let Some(m) = mixture {
            s.push_str(&m.to_file_string());
        }
        let _ = write!(s, "{:?}\n", self.params);
        s
    }
}

fn fmt_num(x: f64) -> String {
    crate::io::fmt_f64(x)
}

fn histogram_rows(h: &OverlapHistogram) -> Vec<Vec<Cell>> {
    h.counts
        .iter()
        .enumerate()
        .map(|(i, &c)| vec![h.bin_edges[i].into(), h.bin_edges[i + 1].into(), c.into()])
        .collect()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `(E₀(q), x₀(q))`, with the pure case handled by scaling.
fn ground_state_at(m: &Mixture, q: f64, guess: Option<f64>) -> Result<(f64, f64)> {
    if let Some(p) = m.pure_degree() {
        let e = e0_pure(p)? * m.coeff(p).sqrt();
        return Ok((e * q.powi(p as i32), p as f64 * e * q.powi(p as i32 - 1)));
    }
    let gs = ground_state_near(m, q, guess)?;
    Ok((gs.e0, gs.x0))
}

/// Execute one run. Returns the one-line summary.
pub fn run(cfg: &RunConfig) -> Result<String> {
    let p = &cfg.params;
    let out = &cfg.output_dir;
    let mixture = if cfg.subcommand == Subcommand::GoeCheck {
        None
    } else {
        Some(cfg.load_mixture()?)
    };
    let header = Header::new(&cfg.canonical(mixture.as_ref()), cfg.seed);
    let m = || mixture.as_ref().expect("mixture loaded for this subcommand");
    match cfg.subcommand {
        Subcommand::Classify => {
            let c = classify(m())?;
            let text = render_summary(
                &header,
                &[
                    ("kind", c.kind.as_str().into()),
                    ("g_literal", c.g_literal.into()),
                    ("g_via_theta", c.g_via_theta.into()),
                    ("agree", c.agree.into()),
                ],
            );
            write_file(&out.join("classification.txt"), &text)?;
            Ok(format!(
                "kind={} g_literal={} g_via_theta={} agree={}",
                c.kind,
                fmt_num(c.g_literal),
                fmt_num(c.g_via_theta),
                c.agree
            ))
        }
        Subcommand::Complexity => {
            let surf = ThetaSurface::new(m(), p.q)?;
            let e_inf = e_infinity(m(), p.q);
            let (ulo, uhi) = p.u_range.unwrap_or((-2.0 * e_inf, -0.5 * e_inf));
            let s = surf.scale();
            let (xlo, xhi) = p.x_range.unwrap_or((-3.0 * s, 0.0));
            let mut rows = Vec::new();
            let mut best = f64::NEG_INFINITY;
            for u in grid(ulo, uhi, p.points) {
                for x in grid(xlo, xhi, p.points) {
                    let t = surf.eval(u, x);
                    best = best.max(t);
                    rows.push(vec![p.q.into(), u.into(), x.into(), t.into()]);
                }
            }
            write_file(&out.join("theta.csv"), &render_csv(&header, &["q", "u", "x", "theta"], &rows))?;
            Ok(format!("theta grid {}x{} at q={} max={}", p.points, p.points, p.q, fmt_num(best)))
        }
        Subcommand::E0 => {
            let mut rows = Vec::new();
            let mut guess = None;
            let qs = grid(p.q_range.0, p.q_range.1, p.points);
            for &q in qs.iter().rev() {
                let (e0, x0) = ground_state_at(m(), q, guess)?;
                guess = Some(e0);
                rows.push(vec![q.into(), e0.into(), x0.into(), e_infinity(m(), q).into()]);
            }
            rows.reverse();
            write_file(&out.join("e0.csv"), &render_csv(&header, &["q", "e0", "x0", "e_inf"], &rows))?;
            let (e0, x0) = ground_state_at(m(), 1.0, None)?;
            Ok(format!("e0(1)={} x0(1)={}", fmt_num(e0), fmt_num(x0)))
        }
        Subcommand::Psi0 => {
            let prof = Psi0Profile::new(m())?;
            let k = (2.0 / p.step).round() as usize;
            let mut rows = Vec::new();
            for i in 0..=k {
                let r = (-1.0 + 2.0 * i as f64 / k as f64).clamp(-1.0, 1.0);
                rows.push(vec![r.into(), prof.eval(r)?.into()]);
            }
            write_file(&out.join("psi0.csv"), &render_csv(&header, &["r", "psi0"], &rows))?;
            Ok(format!("psi0 profile with {} points, psi0(0)={}", k + 1, fmt_num(prof.interior(0.0)?)))
        }
        Subcommand::Condm => {
            let v = check_condition_m(m(), p.step)?;
            let clause = v.failed_clause.map(|c| c.as_str()).unwrap_or("none");
            let text = render_summary(
                &header,
                &[
                    ("holds", v.holds.into()),
                    ("failed_clause", clause.into()),
                    ("psi0_zero", v.psi0_at_zero.into()),
                    ("d2_psi0_zero", v.d2_psi0_at_zero.into()),
                    ("max_margin", v.max_margin.into()),
                    ("endpoint_plus", v.endpoint_plus.into()),
                    ("endpoint_minus", v.endpoint_minus.into()),
                ],
            );
            write_file(&out.join("condm.txt"), &text)?;
            Ok(format!("holds={} failed_clause={} max_margin={}", v.holds, clause, fmt_num(v.max_margin)))
        }
        Subcommand::Phase => {
            let mut rows = Vec::new();
            let mut last = None;
            for &beta in &p.betas {
                let s = phase_summary(m(), beta)?;
                rows.push(vec![
                    s.beta.into(),
                    s.q_c.into(),
                    s.q_star.into(),
                    s.q_star_star.into(),
                    s.e_star.into(),
                    s.f_beta.into(),
                    s.gap_finite.into(),
                    s.gap_limit.into(),
                ]);
                last = Some(s);
            }
            let s = last.ok_or_else(|| GlassError::Usage("phase needs at least one --beta".into()))?;
            write_file(
                &out.join("phase.csv"),
                &render_csv(
                    &header,
                    &["beta", "q_c", "q_star", "q_star_star", "e_star", "f_beta", "gap_finite", "gap_limit"],
                    &rows,
                ),
            )?;
            let text = render_summary(
                &header,
                &[
                    ("beta", s.beta.into()),
                    ("q_c", s.q_c.into()),
                    ("q_star", s.q_star.into()),
                    ("q_star_star", s.q_star_star.into()),
                    ("e_star", s.e_star.into()),
                    ("f_beta", s.f_beta.into()),
                    ("t_minus", s.t_minus.into()),
                    ("t_plus", s.t_plus.into()),
                    ("t_c", s.t_c.into()),
                    ("gap_finite", s.gap_finite.into()),
                    ("gap_limit", s.gap_limit.into()),
                ],
            );
            write_file(&out.join("phase.txt"), &text)?;
            Ok(format!(
                "beta={} q_star_star={} q_c={} q_star={}",
                s.beta,
                fmt_num(s.q_star_star),
                fmt_num(s.q_c),
                fmt_num(s.q_star)
            ))
        }
        Subcommand::SimulateCrt => {
            let (e0, x0) = ground_state_at(m(), p.q, None)?;
            let uc = p.u_center.unwrap_or(-e0);
            let xc = p.x_center.unwrap_or(-x0);
            let w = p.half_width;
            let searches = search_replicas(m(), p.n, p.q, p.replicas, p.starts, cfg.seed)?;
            let c = crt_count_from(m(), &searches, (uc - w, uc + w), (xc - w, xc + w))?;
            let rows: Vec<Vec<Cell>> = searches
                .iter()
                .flat_map(|s| s.points.iter())
                .map(|pt| {
                    vec![
                        pt.energy_per_site.into(),
                        pt.radial_per_sqrt.into(),
                        pt.grad_residual.into(),
                        pt.index.into(),
                    ]
                })
                .collect();
            write_file(
                &out.join("critical_points.csv"),
                &render_csv(&header, &["energy_per_site", "radial_per_sqrt", "grad_residual", "index"], &rows),
            )?;
            let gap = c.log_mean_count_per_n - c.theta_sup;
            write_file(
                &out.join("crt.txt"),
                &render_summary(
                    &header,
                    &[
                        ("n", c.n.into()),
                        ("q", p.q.into()),
                        ("replicas", p.replicas.into()),
                        ("starts", p.starts.into()),
                        ("u_center", uc.into()),
                        ("x_center", xc.into()),
                        ("half_width", w.into()),
                        ("mean_count", c.mean_count.into()),
                        ("log_mean_count_per_n", c.log_mean_count_per_n.into()),
                        ("theta_sup", c.theta_sup.into()),
                        ("zero_fraction", c.zero_fraction.into()),
                        ("mode", p.mode.as_str().into()),
                    ],
                ),
            )?;
            if p.mode == Mode::Test && !(gap.abs() <= CRT_SLACK) {
                return Err(GlassError::CheckFailed(format!(
                    "empirical exponent {} vs sup Θ {}",
                    fmt_num(c.log_mean_count_per_n),
                    fmt_num(c.theta_sup)
                )));
            }
            Ok(format!(
                "log_mean_count_per_n={} theta_sup={} zero_fraction={}",
                fmt_num(c.log_mean_count_per_n),
                fmt_num(c.theta_sup),
                fmt_num(c.zero_fraction)
            ))
        }
        Subcommand::SimulateGibbs => {
            let h = sample_hamiltonian(m(), p.n, cfg.seed)?;
            let gcfg = GibbsConfig {
                chains: p.chains,
                sweeps: p.sweeps,
                ladder: p.ladder,
                ..GibbsConfig::default()
            };
            let r = gibbs_experiment(&h, p.betas[0], &gcfg, cfg.seed)?;
            write_file(
                &out.join("overlaps.csv"),
                &render_csv(&header, &["bin_lo", "bin_hi", "count"], &histogram_rows(&r.histogram)),
            )?;
            write_file(
                &out.join("gibbs.txt"),
                &render_summary(
                    &header,
                    &[
                        ("n", p.n.into()),
                        ("beta", r.beta.into()),
                        ("q_star", r.q_star.into()),
                        ("e_star", r.e_star.into()),
                        ("centers", r.centers.len().into()),
                        ("band_mass", r.band_mass.into()),
                        ("same_band_pairs", r.same_band_pairs.into()),
                        ("same_band_mass", r.same_band_mass.into()),
                        ("same_band_z", r.same_band_z.into()),
                        ("cross_band_pairs", r.cross_band_pairs.into()),
                        ("cross_band_mass", r.cross_band_mass.into()),
                        ("cross_band_z", r.cross_band_z.into()),
                        ("n_pairs", r.histogram.n_pairs.into()),
                        ("mass_zero", r.histogram.mass_zero.into()),
                        ("mass_plus", r.histogram.mass_plus.into()),
                        ("mass_minus", r.histogram.mass_minus.into()),
                        ("min_acceptance", r.min_acceptance.into()),
                        ("non_mixing", r.non_mixing.into()),
                        ("mode", p.mode.as_str().into()),
                    ],
                ),
            )?;
            if p.mode == Mode::Test
                && !(r.same_band_mass >= BAND_MASS_THRESHOLD && r.cross_band_mass >= BAND_MASS_THRESHOLD)
            {
                return Err(GlassError::CheckFailed(format!(
                    "same-band mass {} (z {}), cross-band mass {} (z {})",
                    fmt_num(r.same_band_mass),
                    fmt_num(r.same_band_z),
                    fmt_num(r.cross_band_mass),
                    fmt_num(r.cross_band_z)
                )));
            }
            Ok(format!(
                "band_mass={} same_band_mass={} cross_band_mass={} non_mixing={}",
                fmt_num(r.band_mass),
                fmt_num(r.same_band_mass),
                fmt_num(r.cross_band_mass),
                r.non_mixing
            ))
        }
        Subcommand::SimulateChaos => {
            let h = sample_hamiltonian(m(), p.n, cfg.seed)?;
            let gcfg = GibbsConfig {
                chains: p.chains,
                sweeps: p.sweeps,
                ladder: p.ladder,
                ..GibbsConfig::default()
            };
            let r = chaos_experiment(&h, p.betas[0], p.beta2, &gcfg, 0.2, cfg.seed)?;
            write_file(
                &out.join("chaos_overlaps.csv"),
                &render_csv(&header, &["bin_lo", "bin_hi", "count"], &histogram_rows(&r.histogram)),
            )?;
            write_file(
                &out.join("chaos.txt"),
                &render_summary(
                    &header,
                    &[
                        ("n", p.n.into()),
                        ("beta1", r.beta1.into()),
                        ("beta2", r.beta2.into()),
                        ("n_pairs", r.histogram.n_pairs.into()),
                        ("mass_near_zero", r.mass_near_zero.into()),
                        ("chaos_width", r.chaos_width.into()),
                        ("z", r.z.into()),
                        ("min_acceptance", r.min_acceptance.into()),
                        ("non_mixing", r.non_mixing.into()),
                        ("mode", p.mode.as_str().into()),
                    ],
                ),
            )?;
            if p.mode == Mode::Test && !(r.mass_near_zero >= CHAOS_MASS_THRESHOLD) {
                return Err(GlassError::CheckFailed(format!(
                    "cross-temperature mass near 0 is {} (z {})",
                    fmt_num(r.mass_near_zero),
                    fmt_num(r.z)
                )));
            }
            Ok(format!("mass_near_zero={} z={}", fmt_num(r.mass_near_zero), fmt_num(r.z)))
        }
        Subcommand::GoeCheck => {
            let c = goe_check(p.n, p.x, p.replicas, cfg.seed)?;
            let diff = c.mean_log_det_per_n - c.omega_x;
            write_file(
                &out.join("goe.txt"),
                &render_summary(
                    &header,
                    &[
                        ("n", p.n.into()),
                        ("x", p.x.into()),
                        ("replicas", p.replicas.into()),
                        ("mean_log_det_per_n", c.mean_log_det_per_n.into()),
                        ("standard_error", c.standard_error.into()),
                        ("omega_x", c.omega_x.into()),
                        ("difference", diff.into()),
                    ],
                ),
            )?;
            Ok(format!(
                "mean_log_det_per_n={} omega={} difference={}",
                fmt_num(c.mean_log_det_per_n),
                fmt_num(c.omega_x),
                fmt_num(diff)
            ))
        }
    }
}

fn configure_threads() {
    if let Some(k) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if k > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
}

/// Parse arguments, run, print the summary and return the exit status.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    configure_threads();
    match RunConfig::from_cli(cli).and_then(|cfg| run(&cfg)) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Convenience for tests and examples: run with arguments after the
/// program name, writing into `out`.
pub fn run_args(args: &[&str], out: &Path) -> i32 {
    let mut all: Vec<OsString> = vec!["glasscape".into()];
    all.extend(args.iter().map(OsString::from));
    all.push("--out".into());
    all.push(out.as_os_str().to_owned());
    main_from_args(all)
}
