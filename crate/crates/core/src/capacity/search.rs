//! Brute-force maximisation of the Holevo quantity over pure-state ensembles.
//!
//! Three stages, all deterministic:
//!
//! 1. every pair of grid states on the Bloch sphere, every probability split
//!    on the `1/probability_steps` lattice;
//! 2. greedy growth up to `max_members` states, again over the grid;
//! 3. `refine_rounds` rounds of coordinate moves on each member's angles and on
//!    pairwise probability transfers, halving both step sizes every round.
//!
//! Ties keep the earliest candidate in grid order. Stage 1 is evaluated in
//! parallel, but candidates are reduced in grid order, so the result does
//! not depend on the thread count.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{capacity_closed_form, entanglement_assisted_lower_bound, entropy_from_radius, holevo_chi, Ensemble, MAX_MEMBERS};
use crate::channel::{ChannelParams, DeltaChannel};
use crate::error::{Error, Result};
use crate::qubit::QubitState;

/// Search budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizerConfig {
    /// Polar grid spacing is `pi / polar_bands`; both poles are included once.
    pub polar_bands: usize,
    pub azimuth_steps: usize,
    /// Probability lattice spacing is `1 / probability_steps`.
    pub probability_steps: usize,
    pub refine_rounds: usize,
    pub max_members: usize,
    /// Cap on improvement sweeps within one refinement round.
    pub max_sweeps: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            polar_bands: 24,
            azimuth_steps: 48,
            probability_steps: 16,
            refine_rounds: 3,
            max_members: MAX_MEMBERS,
            max_sweeps: 200,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what, value: usize| Err(Error::Domain { what, value: value as f64 });
        if self.polar_bands < 2 {
            return bad("polar_bands", self.polar_bands);
        }
        if self.azimuth_steps < 1 {
            return bad("azimuth_steps", self.azimuth_steps);
        }
        if self.probability_steps < 2 {
            return bad("probability_steps", self.probability_steps);
        }
        if self.max_members < 1 || self.max_members > MAX_MEMBERS {
            return bad("max_members", self.max_members);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchDiagnostics {
    /// Holevo evaluations across all stages.
    pub evaluations: u64,
    /// Accepted refinement moves.
    pub refinement_moves: u64,
    /// `|c_closed - c_bruteforce|`.
    pub gap: f64,
    /// Whether Bob's fixed component `P` vanishes, the condition under which
    /// `c_closed` is the exact capacity.
    pub bob_phase_tuned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Closed form with `nu_b * r_b`, bits.
    pub c_closed: f64,
    /// Best Holevo quantity found by the search, bits.
    pub c_bruteforce: f64,
    pub best_ensemble: Ensemble,
    /// Entanglement-assisted quantum capacity lower bound, `c_closed / 2`.
    pub q_ea_lower: f64,
    pub nu_eff: f64,
    pub diagnostics: SearchDiagnostics,
}

#[derive(Debug, Clone, Copy)]
struct Member {
    p: f64,
    polar: f64,
    azimuth: f64,
    out: [f64; 3],
    entropy: f64,
}

struct Evaluator<'a> {
    channel: &'a DeltaChannel,
    evaluations: u64,
}

impl Evaluator<'_> {
    fn member(&self, p: f64, polar: f64, azimuth: f64) -> Result<Member> {
        let out = self.channel.apply(&QubitState::pure(polar, azimuth))?;
        Ok(Member {
            p,
            polar,
            azimuth,
            out: out.bloch(),
            entropy: entropy_from_radius(out.radius()),
        })
    }

    fn chi(&mut self, members: &[Member]) -> f64 {
        self.evaluations += 1;
        chi_of(members)
    }
}

fn chi_of(members: &[Member]) -> f64 {
    let mut avg = [0.0; 3];
    let mut conditional = 0.0;
    for m in members {
        for (a, o) in avg.iter_mut().zip(&m.out) {
            *a += m.p * o;
        }
        conditional += m.p * m.entropy;
    }
    let r = (avg[0] * avg[0] + avg[1] * avg[1] + avg[2] * avg[2]).sqrt();
    entropy_from_radius(r) - conditional
}

fn grid(cfg: &OptimizerConfig) -> Vec<(f64, f64)> {
    let mut points = vec![(0.0, 0.0)];
    for i in 1..cfg.polar_bands {
        let polar = PI * i as f64 / cfg.polar_bands as f64;
        for j in 0..cfg.azimuth_steps {
            points.push((polar, 2.0 * PI * j as f64 / cfg.azimuth_steps as f64));
        }
    }
    points.push((PI, 0.0));
    points
}

/// Best pair `(chi, j, k)` with first index `i`.
fn best_partner(members: &[Member], i: usize, steps: usize) -> (f64, usize, usize) {
    let a = &members[i];
    let mut best = (f64::NEG_INFINITY, i, 0);
    for (j, b) in members.iter().enumerate().skip(i + 1) {
        for k in 1..steps {
            let p = k as f64 / steps as f64;
            let q = 1.0 - p;
            let avg = [
                p * a.out[0] + q * b.out[0],
                p * a.out[1] + q * b.out[1],
                p * a.out[2] + q * b.out[2],
            ];
            let r = (avg[0] * avg[0] + avg[1] * avg[1] + avg[2] * avg[2]).sqrt();
            let chi = entropy_from_radius(r) - p * a.entropy - q * b.entropy;
            if chi > best.0 {
                best = (chi, j, k);
            }
        }
    }
    best
}

/// Maximises the Holevo quantity over ensembles of up to `max_members` pure
/// states and compares it with the closed-form capacity.
pub fn capacity_bruteforce(params: &ChannelParams, cfg: &OptimizerConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    let channel = DeltaChannel::new(*params)?;
    let mut ev = Evaluator {
        channel: &channel,
        evaluations: 0,
    };

    let candidates: Vec<Member> = grid(cfg)
        .into_iter()
        .map(|(polar, azimuth)| ev.member(1.0, polar, azimuth))
        .collect::<Result<_>>()?;
    let steps = cfg.probability_steps;

    // Stage 1: a single state carries no information; pairs from the grid.
    let mut best_members = vec![candidates[0]];
    let mut best_chi = ev.chi(&best_members);
    if cfg.max_members >= 2 {
        let per_first: Vec<(f64, usize, usize)> = (0..candidates.len())
            .into_par_iter()
            .map(|i| best_partner(&candidates, i, steps))
            .collect();
        let n = candidates.len() as u64;
        ev.evaluations += n * (n - 1) / 2 * (steps as u64 - 1);
        for (i, &(chi, j, k)) in per_first.iter().enumerate() {
            if chi > best_chi {
                let p = k as f64 / steps as f64;
                best_chi = chi;
                best_members = vec![
                    Member { p, ..candidates[i] },
                    Member {
                        p: 1.0 - p,
                        ..candidates[j]
                    },
                ];
            }
        }
    }

    // Stage 2: greedy growth.
    while best_members.len() < cfg.max_members {
        let mut improved = None;
        for c in &candidates {
            for k in 1..steps {
                let q = k as f64 / steps as f64;
                let mut trial: Vec<Member> = best_members
                    .iter()
                    .map(|m| Member {
                        p: m.p * (1.0 - q),
                        ..*m
                    })
                    .collect();
                trial.push(Member { p: q, ..*c });
                let chi = ev.chi(&trial);
                if chi > best_chi {
                    best_chi = chi;
                    improved = Some(trial);
                }
            }
        }
        match improved {
            Some(m) => best_members = m,
            None => break,
        }
    }

    // Stage 3: coordinate refinement.
    let mut moves = 0u64;
    let mut angle_step = PI / cfg.polar_bands as f64;
    let mut prob_step = 1.0 / steps as f64;
    for _ in 0..cfg.refine_rounds {
        angle_step *= 0.5;
        prob_step *= 0.5;
        for _ in 0..cfg.max_sweeps {
            let mut improved = false;
            for idx in 0..best_members.len() {
                for (dp, da) in [(angle_step, 0.0), (-angle_step, 0.0), (0.0, angle_step), (0.0, -angle_step)] {
                    let m = best_members[idx];
                    let moved = ev.member(m.p, m.polar + dp, m.azimuth + da)?;
                    let mut trial = best_members.clone();
                    trial[idx] = moved;
                    let chi = ev.chi(&trial);
                    if chi > best_chi {
                        best_chi = chi;
                        best_members = trial;
                        improved = true;
                        moves += 1;
                    }
                }
            }
            for to in 0..best_members.len() {
                for from in 0..best_members.len() {
                    if to == from || best_members[from].p < prob_step {
                        continue;
                    }
                    let mut trial = best_members.clone();
                    trial[from].p -= prob_step;
                    trial[to].p += prob_step;
                    let chi = ev.chi(&trial);
                    if chi > best_chi {
                        best_chi = chi;
                        best_members = trial;
                        improved = true;
                        moves += 1;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }

    let kept: Vec<Member> = best_members.into_iter().filter(|m| m.p > 0.0).collect();
    let total: f64 = kept.iter().map(|m| m.p).sum();
    let ensemble = Ensemble::new(
        kept.iter()
            .map(|m| (m.p / total, QubitState::pure(m.polar, m.azimuth)))
            .collect(),
    )?;
    let c_bruteforce = holevo_chi(&channel, &ensemble)?;

    let r_b = params.bob_initial.purity_radius().min(1.0);
    let c_closed = capacity_closed_form(params.stats.nu_b, r_b, params.stats.delta_ab)?;
    Ok(CapacityResult {
        c_closed,
        c_bruteforce,
        best_ensemble: ensemble,
        q_ea_lower: entanglement_assisted_lower_bound(c_closed),
        nu_eff: params.stats.nu_b * r_b,
        diagnostics: SearchDiagnostics {
            evaluations: ev.evaluations,
            refinement_moves: moves,
            gap: (c_closed - c_bruteforce).abs(),
            bob_phase_tuned: params.bob_fixed_component().abs() < 1e-12,
        },
    })
}

/// Brute-force capacity at one of Bob's phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseProbe {
    pub phase_b: f64,
    /// Bob's fixed component `P` at this phase.
    pub fixed_component: f64,
    pub c_bruteforce: f64,
    /// The tuned-phase closed form for the same Bob state.
    pub c_tuned: f64,
}

/// Sweeps Bob's phase with everything else fixed and reports the searched
/// capacity at each value next to the tuned-phase closed form. This probes
/// whether an untuned phase ever beats the tuned one.
pub fn probe_bob_phase(params: &ChannelParams, phases: &[f64], cfg: &OptimizerConfig) -> Result<Vec<PhaseProbe>> {
    phases
        .iter()
        .map(|&phase_b| {
            let p = ChannelParams { phase_b, ..*params };
            let result = capacity_bruteforce(&p, cfg)?;
            Ok(PhaseProbe {
                phase_b,
                fixed_component: p.bob_fixed_component(),
                c_bruteforce: result.c_bruteforce,
                c_tuned: result.c_closed,
            })
        })
        .collect()
}
