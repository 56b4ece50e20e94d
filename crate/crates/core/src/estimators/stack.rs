use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_exploration_sequence, BondParams, LazyBonds};
use crate::environment::{Environment, Model, Phi, RadiusDistribution, Region};
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Window, WindowGraph};
use crate::numeric::linear_fit;
use crate::rng::{bond_seed, env_seed, hash_words, CounterRng, TAG_AUX};

/// Bootstrap resamples used for the trend test.
pub const BOOTSTRAP_RESAMPLES: usize = 400;

/// Parameters of an upward exploration-sequence experiment on the stack
/// model.
#[derive(Debug, Clone)]
pub struct TPlusSetup {
    pub spec: GraphSpec,
    pub window: Window,
    pub dist: RadiusDistribution,
    pub params: BondParams,
    /// Decay rate `c` defining `phi`.
    pub decay_rate: f64,
    pub l0: u64,
    pub max_k: u64,
    pub replicas: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivalCurve {
    /// `P(T+ > m)` for `m = 0..=m_max` (Kaplan-Meier).
    pub survival: Vec<f64>,
    pub at_risk: Vec<u64>,
    pub events: Vec<u64>,
    pub replicas: u64,
    /// Replicas whose environment had no admissible index in the window.
    pub no_index: u64,
    /// Sequences that ran out of window before succeeding.
    pub exhausted: u64,
    /// Sequences in which some exploration touched the window boundary.
    pub censored: u64,
    /// Least-squares slope of `ln P(T+ > m)` against `m`.
    pub slope: f64,
    /// One-sided 95% bootstrap upper bound on the slope.
    pub slope_upper: f64,
    pub level_floor: u64,
}

impl SurvivalCurve {
    pub fn decays(&self) -> bool {
        self.slope_upper < 0.0
    }
}

/// Kaplan-Meier survival `P(T > m)` for `m = 0..=m_max` from
/// `(time, event)` pairs; `event = false` means censored at `time`.
pub fn kaplan_meier(obs: &[(u64, bool)], m_max: u64) -> (Vec<f64>, Vec<u64>, Vec<u64>) {
    let mut at_time_event = vec![0u64; m_max as usize + 2];
    let mut at_time_any = vec![0u64; m_max as usize + 2];
    for &(t, e) in obs {
        let slot = t.min(m_max + 1) as usize;
        at_time_any[slot] += 1;
        if e && t <= m_max {
            at_time_event[slot] += 1;
        }
    }
    let mut remaining = obs.len() as u64;
    let mut s = if remaining > 0 {
        1.0 - at_time_event[0] as f64 / remaining as f64
    } else {
        1.0
    };
    let mut survival = vec![s];
    let mut at_risk = vec![remaining];
    let mut events = vec![at_time_event[0]];
    remaining -= at_time_any[0];
    for m in 1..=m_max as usize {
        let n = remaining;
        let d = at_time_event[m];
        if n > 0 {
            s *= 1.0 - d as f64 / n as f64;
        }
        survival.push(s);
        at_risk.push(n);
        events.push(d);
        remaining -= at_time_any[m];
    }
    (survival, at_risk, events)
}

fn log_slope(survival: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = survival
        .iter()
        .enumerate()
        .take_while(|(_, &s)| s > 0.0)
        .map(|(m, &s)| (m as f64, s.ln()))
        .collect();
    linear_fit(&pts).map_or(f64::NAN, |f| f.slope)
}

/// Samples `T+` over independent environments and bond configurations and
/// tests whether `P(T+ > m)` decays in `m <= m_max`.
pub fn t_plus_survival(setup: &TPlusSetup, m_max: u64) -> Result<SurvivalCurve> {
    if setup.replicas == 0 {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    let params = BondParams::new(setup.params.p, setup.params.q)?;
    let phi = Phi::new(&setup.spec, setup.decay_rate)?;
    let level_floor = phi.level_floor(&setup.dist);
    let graph = WindowGraph::new(&setup.spec, setup.window)?;

    #[derive(Clone, Copy)]
    enum Obs {
        NoIndex,
        Done { time: u64, event: bool, censored: bool },
    }
    let observations: Vec<Obs> = (0..setup.replicas)
        .into_par_iter()
        .map(|j| -> Result<Obs> {
            let env = Environment::sample_for_window(
                Model::Stack,
                &setup.dist,
                setup.window,
                env_seed(setup.master_seed, j),
            );
            let region = Region::build(&env, &setup.spec, setup.window)?;
            let bonds = LazyBonds::new(&graph, &region, params, bond_seed(setup.master_seed, j, 0));
            match run_exploration_sequence(&env, &graph, &bonds, &phi, setup.l0, level_floor, setup.max_k, m_max as usize + 1)
            {
                Ok(out) => Ok(match out.t_plus {
                    Some(t) => Obs::Done {
                        time: t as u64,
                        event: true,
                        censored: out.censored,
                    },
                    None => Obs::Done {
                        time: out.runs.len() as u64,
                        event: false,
                        censored: out.censored,
                    },
                }),
                Err(Error::EmptyIndexSet) => Ok(Obs::NoIndex),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    let (mut no_index, mut exhausted, mut censored) = (0, 0, 0);
    for o in &observations {
        match *o {
            Obs::NoIndex => no_index += 1,
            Obs::Done {
                time,
                event,
                censored: c,
            } => {
                pairs.push((time, event));
                exhausted += (!event) as u64;
                censored += c as u64;
            }
        }
    }
    let (survival, at_risk, events) = kaplan_meier(&pairs, m_max);
    let slope = log_slope(&survival);

    let mut rng = CounterRng::new(hash_words(&[setup.master_seed, TAG_AUX]));
    let mut slopes: Vec<f64> = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut sample = vec![(0u64, false); pairs.len()];
    if !pairs.is_empty() {
        for _ in 0..BOOTSTRAP_RESAMPLES {
            for slot in sample.iter_mut() {
                *slot = pairs[rng.below(pairs.len() as u64) as usize];
            }
            let (s, _, _) = kaplan_meier(&sample, m_max);
            let b = log_slope(&s);
            slopes.push(if b.is_nan() { 0.0 } else { b });
        }
    }
    slopes.sort_by(f64::total_cmp);
    let slope_upper = if slopes.is_empty() {
        f64::NAN
    } else {
        slopes[((slopes.len() as f64) * 0.95).ceil() as usize - 1]
    };

    Ok(SurvivalCurve {
        survival,
        at_risk,
        events,
        replicas: setup.replicas,
        no_index,
        exhausted,
        censored,
        slope,
        slope_upper,
        level_floor,
    })
}
