//! Gibbs sampling on the sphere of radius `√N` and overlap statistics.
//!
//! Each chain is a parallel-tempering ladder, geometric in β from `β/8` to
//! `β`. Moves rotate the state along a great circle in a random tangent
//! direction; the angle is tuned towards 30% acceptance during burn-in and
//! frozen afterwards.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::critical::{find_q_critical_from, CriticalPoint, DEFAULT_TOL};
use super::hamiltonian::HamiltonianInstance;
use super::stats::fraction_z;
use super::{overlap, rng_stream, uniform_sphere};
use crate::complexity::ground_state_solution;
use crate::error::{GlassError, Result};
use crate::thermo;

const CHAIN_TAG: u64 = 0x6368_6169;
const TARGET_ACCEPTANCE: f64 = 0.3;
const ADAPT_EVERY: usize = 50;

/// Acceptance below this at the target temperature flags a stuck sampler.
pub const NON_MIXING_ACCEPTANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsConfig {
    pub chains: usize,
    /// Total sweeps per chain; the first half is burn-in. One sweep is `N`
    /// proposals at every ladder temperature followed by one round of swaps.
    pub sweeps: usize,
    pub ladder: usize,
    /// Record the target-temperature state every `thin` sweeps.
    pub thin: usize,
    /// Half-width ε of the bands.
    pub band_eps: f64,
    /// Window around the overlap targets when counting masses.
    pub mass_width: f64,
    /// Band centres must satisfy `|H(σ₀)/N + E*| ≤ center_slack`.
    pub center_slack: f64,
    pub bins: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            chains: 8,
            sweeps: 400,
            ladder: 6,
            thin: 10,
            band_eps: 0.1,
            mass_width: 0.15,
            center_slack: 0.1,
            bins: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_pairs: u64,
    /// `q*²` for equal temperatures, `q*(β₁)q*(β₂)` across temperatures.
    pub target: f64,
    pub width: f64,
    pub mass_zero: f64,
    pub mass_plus: f64,
    pub mass_minus: f64,
}

impl OverlapHistogram {
    pub fn from_overlaps(rs: &[f64], bins: usize, target: f64, width: f64) -> Self {
        let bin_edges: Vec<f64> = (0..=bins).map(|i| -1.0 + 2.0 * i as f64 / bins as f64).collect();
        let mut counts = vec![0u64; bins];
        for &r in rs {
            let k = (((r + 1.0) / 2.0 * bins as f64).floor() as isize).clamp(0, bins as isize - 1);
            counts[k as usize] += 1;
        }
        let n = rs.len().max(1) as f64;
        let mass = |c: f64| rs.iter().filter(|&&r| (r - c).abs() < width).count() as f64 / n;
        OverlapHistogram {
            bin_edges,
            counts,
            n_pairs: rs.len() as u64,
            target,
            width,
            mass_zero: mass(0.0),
            mass_plus: mass(target),
            mass_minus: mass(-target),
        }
    }
}

/// Recorded target-temperature states of one chain.
#[derive(Debug, Clone)]
pub struct ChainTrace {
    pub samples: Vec<Vec<f64>>,
    pub energies: Vec<f64>,
    /// Post-burn-in acceptance at the target temperature.
    pub acceptance: f64,
    pub swap_rate: f64,
}

struct Slot {
    beta: f64,
    theta: f64,
    accepted: usize,
    proposed: usize,
}

fn propose<R: Rng>(rng: &mut R, sigma: &[f64], theta: f64) -> Vec<f64> {
    let n = sigma.len();
    let nf = n as f64;
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let proj = overlap(&v, sigma);
    v.iter_mut().zip(sigma).for_each(|(a, s)| *a -= proj * s);
    let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let (c, s) = (theta.cos(), theta.sin());
    let mut out: Vec<f64> = sigma.iter().zip(&v).map(|(a, b)| c * a + s * b * nf.sqrt() / vn).collect();
    let norm = out.iter().map(|a| a * a).sum::<f64>().sqrt();
    out.iter_mut().for_each(|a| *a *= nf.sqrt() / norm);
    out
}

/// Run one parallel-tempering chain targeting `β`.
pub fn run_chain(h: &HamiltonianInstance, beta: f64, cfg: &GibbsConfig, seed: u64, chain: u64) -> ChainTrace {
    let n = h.n();
    let mut rng = rng_stream(seed, CHAIN_TAG, chain);
    let k = cfg.ladder.max(1);
    let betas: Vec<f64> = (0..k)
        .map(|i| if k == 1 { beta } else { beta / 8.0 * 8f64.powf(i as f64 / (k - 1) as f64) })
        .collect();
    let mut slots: Vec<Slot> = betas
        .iter()
        .map(|&b| Slot {
            beta: b,
            theta: (1.0 / (b * n as f64).max(1.0)).sqrt().min(1.0),
            accepted: 0,
            proposed: 0,
        })
        .collect();
    let mut states: Vec<Vec<f64>> = (0..k).map(|_| uniform_sphere(&mut rng, n, (n as f64).sqrt())).collect();
    let mut energies: Vec<f64> = states.iter().map(|s| h.value(s)).collect();
    let burn = cfg.sweeps / 2;
    let (mut swaps, mut swap_tries) = (0usize, 0usize);
    let mut trace = ChainTrace {
        samples: Vec::new(),
        energies: Vec::new(),
        acceptance: 0.0,
        swap_rate: 0.0,
    };
    for sweep in 0..cfg.sweeps {
        if sweep == burn {
            slots.iter_mut().for_each(|s| {
                s.accepted = 0;
                s.proposed = 0;
            });
            swaps = 0;
            swap_tries = 0;
        }
        for (i, slot) in slots.iter_mut().enumerate() {
            for _ in 0..n {
                let cand = propose(&mut rng, &states[i], slot.theta);
                let e = h.value(&cand);
                let log_a = -slot.beta * (e - energies[i]);
                let u: f64 = rng.random();
                slot.proposed += 1;
                if log_a >= 0.0 || u < log_a.exp() {
                    states[i] = cand;
                    energies[i] = e;
                    slot.accepted += 1;
                }
                if sweep < burn && slot.proposed % ADAPT_EVERY == 0 {
                    let rate = slot.accepted as f64 / slot.proposed as f64;
                    slot.theta = (slot.theta * (2.0 * (rate - TARGET_ACCEPTANCE)).exp()).clamp(1e-5, 1.5);
                    slot.accepted = 0;
                    slot.proposed = 0;
                }
            }
        }
        for i in 0..k.saturating_sub(1) {
            let log_a = (slots[i].beta - slots[i + 1].beta) * (energies[i] - energies[i + 1]);
            let u: f64 = rng.random();
            swap_tries += 1;
            if log_a >= 0.0 || u < log_a.exp() {
                states.swap(i, i + 1);
                energies.swap(i, i + 1);
                swaps += 1;
            }
        }
        if sweep >= burn && (sweep - burn) % cfg.thin.max(1) == 0 {
            trace.samples.push(states[k - 1].clone());
            trace.energies.push(energies[k - 1]);
        }
    }
    let cold = &slots[k - 1];
    trace.acceptance = cold.accepted as f64 / cold.proposed.max(1) as f64;
    trace.swap_rate = swaps as f64 / swap_tries.max(1) as f64;
    trace
}

fn run_chains(h: &HamiltonianInstance, beta: f64, cfg: &GibbsConfig, seed: u64, offset: u64) -> Vec<ChainTrace> {
    (0..cfg.chains as u64)
        .into_par_iter()
        .map(|c| run_chain(h, beta, cfg, seed, offset + c))
        .collect()
}

#[derive(Debug, Clone)]
pub struct GibbsReport {
    pub beta: f64,
    pub q_star: f64,
    pub e_star: f64,
    pub histogram: OverlapHistogram,
    /// Fraction of recorded samples inside some band.
    pub band_mass: f64,
    pub centers: Vec<CriticalPoint>,
    pub same_band_pairs: usize,
    pub same_band_mass: f64,
    pub same_band_z: f64,
    pub cross_band_pairs: usize,
    pub cross_band_mass: f64,
    pub cross_band_z: f64,
    pub min_acceptance: f64,
    pub non_mixing: bool,
}

/// Mass threshold used for the purity and orthogonality z-scores.
pub const BAND_MASS_THRESHOLD: f64 = 0.8;

/// Mass threshold used for the chaos z-score.
pub const CHAOS_MASS_THRESHOLD: f64 = 0.7;

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(GlassError::Domain(format!("β = {beta} must be positive")))
    }
}

/// Sample `G_{N,β}` with independent chains, locate the `q*`-critical points
/// the chains sit near, and sort inter-chain overlaps into same-band and
/// cross-band pairs.
pub fn gibbs_experiment(h: &HamiltonianInstance, beta: f64, cfg: &GibbsConfig, seed: u64) -> Result<GibbsReport> {
    check_beta(beta)?;
    let m = h.mixture();
    let (qs, _) = thermo::q_star(m, beta)?;
    let e_star = ground_state_solution(m, qs)?.e0;
    let traces = run_chains(h, beta, cfg, seed, 0);

    let starts: Vec<Vec<f64>> = traces.iter().filter_map(|t| t.samples.last().cloned()).collect();
    let centers: Vec<CriticalPoint> = find_q_critical_from(h, qs, &starts, DEFAULT_TOL)?
        .into_iter()
        .filter(|c| (c.energy_per_site + e_star).abs() <= cfg.center_slack)
        .collect();

    let assign = |s: &[f64]| -> Option<usize> {
        centers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, overlap(s, &c.sigma)))
            .filter(|(_, r)| (r - qs).abs() <= cfg.band_eps)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    };
    let labels: Vec<Vec<Option<usize>>> = traces
        .iter()
        .map(|t| t.samples.iter().map(|s| assign(s)).collect())
        .collect();
    let total: usize = labels.iter().map(|l| l.len()).sum();
    let inside: usize = labels.iter().flatten().filter(|l| l.is_some()).count();

    let target = qs * qs;
    let mut all = Vec::new();
    let (mut same, mut same_hit, mut cross, mut cross_hit) = (0, 0, 0, 0);
    let records = traces.iter().map(|t| t.samples.len()).min().unwrap_or(0);
    for a in 0..traces.len() {
        for b in a + 1..traces.len() {
            for t in 0..records {
                let r = overlap(&traces[a].samples[t], &traces[b].samples[t]);
                all.push(r);
                match (labels[a][t], labels[b][t]) {
                    (Some(x), Some(y)) if x == y => {
                        same += 1;
                        same_hit += usize::from((r - target).abs() < cfg.mass_width);
                    }
                    (Some(_), Some(_)) => {
                        cross += 1;
                        cross_hit += usize::from(r.abs() < cfg.mass_width);
                    }
                    _ => {}
                }
            }
        }
    }
    let min_acceptance = traces.iter().map(|t| t.acceptance).fold(f64::INFINITY, f64::min);
    let frac = |hit: usize, tot: usize| if tot == 0 { 0.0 } else { hit as f64 / tot as f64 };
    Ok(GibbsReport {
        beta,
        q_star: qs,
        e_star,
        histogram: OverlapHistogram::from_overlaps(&all, cfg.bins, target, cfg.mass_width),
        band_mass: frac(inside, total),
        centers,
        same_band_pairs: same,
        same_band_mass: frac(same_hit, same),
        same_band_z: fraction_z(same_hit, same, BAND_MASS_THRESHOLD),
        cross_band_pairs: cross,
        cross_band_mass: frac(cross_hit, cross),
        cross_band_z: fraction_z(cross_hit, cross, BAND_MASS_THRESHOLD),
        min_acceptance,
        non_mixing: min_acceptance < NON_MIXING_ACCEPTANCE,
    })
}

#[derive(Debug, Clone)]
pub struct ChaosReport {
    pub beta1: f64,
    pub beta2: f64,
    pub histogram: OverlapHistogram,
    /// Fraction of cross-temperature pairs with `|R| < chaos_width`.
    pub mass_near_zero: f64,
    pub chaos_width: f64,
    pub z: f64,
    pub min_acceptance: f64,
    pub non_mixing: bool,
}

/// Overlaps between independent samples at two temperatures.
pub fn chaos_experiment(
    h: &HamiltonianInstance,
    beta1: f64,
    beta2: f64,
    cfg: &GibbsConfig,
    chaos_width: f64,
    seed: u64,
) -> Result<ChaosReport> {
    check_beta(beta1)?;
    check_beta(beta2)?;
    if beta1 == beta2 {
        return Err(GlassError::Precondition("chaos needs two distinct temperatures".into()));
    }
    let m = h.mixture();
    let target = match (thermo::q_star(m, beta1), thermo::q_star(m, beta2)) {
        (Ok((a, _)), Ok((b, _))) => a * b,
        _ => 1.0,
    };
    let first = run_chains(h, beta1, cfg, seed, 0);
    let second = run_chains(h, beta2, cfg, seed, 1 << 32);
    let records = first.iter().chain(&second).map(|t| t.samples.len()).min().unwrap_or(0);
    let mut rs = Vec::new();
    for a in &first {
        for b in &second {
            for t in 0..records {
                rs.push(overlap(&a.samples[t], &b.samples[t]));
            }
        }
    }
    let hits = rs.iter().filter(|r| r.abs() < chaos_width).count();
    let min_acceptance = first.iter().chain(&second).map(|t| t.acceptance).fold(f64::INFINITY, f64::min);
    Ok(ChaosReport {
        beta1,
        beta2,
        histogram: OverlapHistogram::from_overlaps(&rs, cfg.bins, target, cfg.mass_width),
        mass_near_zero: if rs.is_empty() { 0.0 } else { hits as f64 / rs.len() as f64 },
        chaos_width,
        z: fraction_z(hits, rs.len(), CHAOS_MASS_THRESHOLD),
        min_acceptance,
        non_mixing: min_acceptance < NON_MIXING_ACCEPTANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::sample_hamiltonian;
    use crate::Mixture;

    #[test]
    fn histogram_counts_every_pair() {
        let h = OverlapHistogram::from_overlaps(&[-1.0, -0.2, 0.0, 0.5, 1.0], 4, 0.5, 0.1);
        assert_eq!(h.counts.iter().sum::<u64>(), h.n_pairs);
        assert_eq!(h.counts, vec![1, 1, 1, 2]);
        assert_eq!(h.mass_plus, 0.2);
    }

    #[test]
    fn proposals_stay_on_the_sphere() {
        let mut rng = rng_stream(1, 2, 3);
        let s = uniform_sphere(&mut rng, 10, 10f64.sqrt());
        let t = propose(&mut rng, &s, 0.3);
        assert!((overlap(&t, &t) - 1.0).abs() < 1e-12);
        assert!((overlap(&s, &t) - 0.3f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn chains_are_reproducible_and_pairs_exclude_self() {
        let m = Mixture::new([(3, 0.96), (4, 0.04)]).unwrap();
        let h = sample_hamiltonian(&m, 8, 3).unwrap();
        let cfg = GibbsConfig {
            chains: 3,
            sweeps: 40,
            thin: 5,
            ..GibbsConfig::default()
        };
        let a = run_chain(&h, 5.0, &cfg, 7, 0);
        let b = run_chain(&h, 5.0, &cfg, 7, 0);
        assert_eq!(a.samples, b.samples);
        let rep = gibbs_experiment(&h, 20.0, &cfg, 7).unwrap();
        // 3 chains give 3 distinct pairs per record; no chain meets itself.
        assert_eq!(rep.histogram.n_pairs, 3 * 4);
    }

    #[test]
    fn equal_temperatures_are_rejected() {
        let m = Mixture::new([(3, 0.96), (4, 0.04)]).unwrap();
        let h = sample_hamiltonian(&m, 6, 3).unwrap();
        let r = chaos_experiment(&h, 10.0, 10.0, &GibbsConfig::default(), 0.2, 1);
        assert!(matches!(r, Err(GlassError::Precondition(_))));
    }
}
