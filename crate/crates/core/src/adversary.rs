//! Simulated up-to-one attacker against a Laplace curator.
//!
//! Each trial the curator releases the query answer on the true database with
//! noise calibrated to the sensitivity of the chosen semantics. The attacker
//! knows its prior, the rules and the mechanism, evaluates the query on every
//! graph of its attack space and guesses a maximum-likelihood candidate.
//! Under Laplace noise that is the candidate whose answer is closest to the
//! observation; with zero sensitivity it is a candidate with the exact answer.

use std::collections::BTreeSet;
use std::io::{self, Write};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kg::Graph;
use crate::mechanism::{release_answer, stream_rng, ReleaseSpec};
use crate::sensitivity::{
    classical_sensitivity, evaluate, onto_sensitivity, perceived_sensitivity, CountQuery,
};
use crate::spaces::{attack_space, AttackerInstance, Semantics, SpaceConfig};

#[derive(Debug, Clone)]
pub struct GameConfig {
    /// The curated (saturated) database.
    pub true_db: Graph,
    pub prior: Graph,
    /// Schema, rules and space restriction shared by curator and attacker.
    pub space: SpaceConfig,
    pub query: CountQuery,
    pub epsilon: f64,
    pub semantics: Semantics,
    pub trials: u64,
    pub seed: u64,
    pub antecedent_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub noisy_value: f64,
    /// Index of the guessed graph in the (sorted) attack space.
    pub guess: usize,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameReport {
    pub semantics: Semantics,
    pub epsilon: f64,
    /// Sensitivity the curator calibrated its noise with.
    pub sensitivity: u64,
    pub classical_sensitivity: u64,
    pub perceived_sensitivity: u64,
    /// Query answer of each attack-space candidate, in candidate order.
    pub candidate_answers: Vec<u64>,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// Success rate of a uniform guess.
    pub baseline: f64,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl GameReport {
    /// One CSV row per trial, optionally preceded by the header line.
    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> io::Result<()> {
        if header {
            writeln!(out, "semantics,trial,noisy_value,guess,correct")?;
        }
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{}",
                self.semantics, r.trial, r.noisy_value, r.guess, r.correct
            )?;
        }
        Ok(())
    }
}

/// Indices of the candidates an ML attacker may pick after observing
/// `observed`.
fn most_likely(answers: &[u64], observed: f64, raw: bool) -> Vec<usize> {
    if raw {
        return (0..answers.len())
            .filter(|&i| answers[i] as f64 == observed)
            .collect();
    }
    let distance = |i: usize| (answers[i] as f64 - observed).abs();
    let best = (0..answers.len()).map(distance).fold(f64::INFINITY, f64::min);
    (0..answers.len()).filter(|&i| distance(i) == best).collect()
}

pub fn run_game(cfg: &GameConfig) -> Result<GameReport> {
    if cfg.trials == 0 {
        return Err(Error::DegenerateGame("no trials requested".into()));
    }
    let attacker = AttackerInstance {
        prior: cfg.prior.clone(),
        rules: cfg.space.rules.clone(),
    };
    let space: BTreeSet<Graph> = attack_space(&attacker, &cfg.space)?;
    if space.len() < 2 {
        return Err(Error::DegenerateGame(format!(
            "attack space has {} candidate(s); at least 2 are needed",
            space.len()
        )));
    }
    let candidates: Vec<&Graph> = space.iter().collect();
    let Some(truth) = candidates.iter().position(|g| *g == &cfg.true_db) else {
        return Err(Error::DegenerateGame(
            "the true database is not in the attacker's space".into(),
        ));
    };

    let cap = cfg.antecedent_cap;
    let classical = classical_sensitivity(&cfg.query, &cfg.true_db, &cfg.space)?.value;
    let perceived = perceived_sensitivity(&cfg.query, &cfg.true_db, &cfg.space, cap)?.value;
    let sensitivity = match cfg.semantics {
        Semantics::Classical => classical,
        Semantics::Onto => onto_sensitivity(&cfg.query, &cfg.true_db, &cfg.space, cap)?.value,
    };
    let spec = ReleaseSpec::new(cfg.epsilon, sensitivity, cfg.seed)?;

    let answers: Vec<u64> = candidates.iter().map(|g| evaluate(&cfg.query, g)).collect();
    let true_answer = answers[truth];

    let mut records = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, trial);
        let released = release_answer(true_answer, &spec, &mut rng)?;
        let plausible = most_likely(&answers, released.noisy_value, sensitivity == 0);
        let guess = plausible[rng.gen_range(0..plausible.len())];
        records.push(TrialRecord {
            trial,
            noisy_value: released.noisy_value,
            guess,
            correct: guess == truth,
        });
    }

    let successes = records.iter().filter(|r| r.correct).count() as u64;
    Ok(GameReport {
        semantics: cfg.semantics,
        epsilon: cfg.epsilon,
        sensitivity,
        classical_sensitivity: classical,
        perceived_sensitivity: perceived,
        candidate_answers: answers,
        trials: cfg.trials,
        successes,
        success_rate: successes as f64 / cfg.trials as f64,
        baseline: 1.0 / candidates.len() as f64,
        records,
    })
}
