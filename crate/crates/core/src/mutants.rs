//! Deliberately faulty variants of the reference model.
//!
//! Each mutant wraps [`MixtureModel`] and replaces exactly one operation; every
//! other operation forwards to the reference unchanged. The registry is used to
//! show that the consistency and Geweke suites actually detect bugs.

use std::fmt;
use std::str::FromStr;

use crate::consistency::{check_all, ConsistencyConfig};
use crate::distributions::{Dirichlet, Gaussian, InverseGamma, Multinomial};
use crate::error::{Error, Result};
use crate::geweke::{geweke_run, GewekeConfig, Verdict};
use crate::model::{cluster_counts, joint_terms, log_evidence, residual_sum_sq, Block, Dataset, MixtureModel, Model, ModelSpec, State, Statistic};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutantId {
    /// The unmodified reference model.
    Identity,
    /// `cond_sigma_sq_n` scales the residual sum of squares by 0.51 instead of 0.5.
    M1,
    /// `cond_mu` drops the prior precision 1/σ²_μ for occupied clusters.
    M2,
    /// `cond_pi` drops the α offset for occupied components.
    M3,
    /// `cond_z` omits the log π prior term from the log odds.
    M4,
    /// `joint_log_p` drops the Gaussian prior on μ.
    M5,
}

/// Where a mutant is expected to show up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    Consistency(Block),
    Geweke(Statistic),
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detector::Consistency(b) => write!(f, "consistency:{b}"),
            Detector::Geweke(s) => write!(f, "geweke:{s}"),
        }
    }
}

impl MutantId {
    pub const ALL: [MutantId; 6] = [
        MutantId::Identity,
        MutantId::M1,
        MutantId::M2,
        MutantId::M3,
        MutantId::M4,
        MutantId::M5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutantId::Identity => "none",
            MutantId::M1 => "M1",
            MutantId::M2 => "M2",
            MutantId::M3 => "M3",
            MutantId::M4 => "M4",
            MutantId::M5 => "M5",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            MutantId::Identity => "reference model, no fault",
            MutantId::M1 => "cond_sigma_sq_n uses 0.51 instead of 0.5 on the residual term",
            MutantId::M2 => "cond_mu omits the prior precision for occupied clusters",
            MutantId::M3 => "cond_pi adds counts without the alpha offset for occupied components",
            MutantId::M4 => "cond_z omits the log pi prior term",
            MutantId::M5 => "joint_log_p drops the Gaussian prior on mu",
        }
    }

    pub fn expected_detectors(self) -> Vec<Detector> {
        match self {
            MutantId::Identity => vec![],
            MutantId::M1 => vec![
                Detector::Consistency(Block::SigmaSqN),
                Detector::Geweke(Statistic::SigmaSqN),
            ],
            MutantId::M2 => vec![Detector::Consistency(Block::Mu)],
            MutantId::M3 => vec![Detector::Consistency(Block::Pi)],
            MutantId::M4 => vec![Detector::Consistency(Block::Z)],
            MutantId::M5 => vec![
                Detector::Consistency(Block::Mu),
                Detector::Consistency(Block::SigmaSqMu),
            ],
        }
    }
}

impl fmt::Display for MutantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for MutantId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MutantId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown mutant {s:?}")))
    }
}

/// The reference model with (at most) one injected fault.
#[derive(Debug, Clone, PartialEq)]
pub struct MutantModel {
    reference: MixtureModel,
    id: MutantId,
}

pub fn apply_mutant(spec: ModelSpec, id: MutantId) -> MutantModel {
    MutantModel {
        reference: MixtureModel::new(spec),
        id,
    }
}

impl MutantModel {
    pub fn id(&self) -> MutantId {
        self.id
    }

    pub fn reference(&self) -> &MixtureModel {
        &self.reference
    }
}

impl Model for MutantModel {
    fn spec(&self) -> &ModelSpec {
        self.reference.spec()
    }

    fn cond_pi(&self, state: &State) -> Result<Dirichlet> {
        if self.id != MutantId::M3 {
            return self.reference.cond_pi(state);
        }
        let alpha = self.spec().alpha;
        let counts = cluster_counts(&state.z, self.spec().k);
        // empty components keep alpha so the parameters stay valid
        Dirichlet::new(counts.iter().map(|&c| if c > 0 { c as f64 } else { alpha }).collect())
    }

    fn cond_z(&self, state: &State, data: &Dataset) -> Result<Multinomial> {
        if self.id != MutantId::M4 {
            return self.reference.cond_z(state, data);
        }
        self.reference.cond_pi(state)?; // same validation as the reference
        Multinomial::from_log_odds(&log_evidence(state, data))
    }

    fn cond_mu(&self, state: &State, data: &Dataset) -> Result<Gaussian> {
        if self.id != MutantId::M2 {
            return self.reference.cond_mu(state, data);
        }
        let reference = self.reference.cond_mu(state, data)?;
        let d = data.d();
        let counts = cluster_counts(&state.z, self.spec().k);
        let mut mean = Vec::with_capacity(reference.len());
        let mut var = Vec::with_capacity(reference.len());
        for i in 0..reference.len() {
            let n_k = counts[i / d];
            if n_k == 0 {
                mean.push(reference.mean(i));
                var.push(reference.var(i));
                continue;
            }
            // recover the natural parameter from the reference, then drop 1/σ²_μ
            let lam = 1.0 / reference.var(i);
            let h = reference.mean(i) * lam;
            let lam = n_k as f64 / state.sigma_sq_n;
            mean.push(h / lam);
            var.push(1.0 / lam);
        }
        Gaussian::new(mean, var)
    }

    fn cond_sigma_sq_mu(&self, state: &State) -> Result<InverseGamma> {
        self.reference.cond_sigma_sq_mu(state)
    }

    fn cond_sigma_sq_n(&self, state: &State, data: &Dataset) -> Result<InverseGamma> {
        if self.id != MutantId::M1 {
            return self.reference.cond_sigma_sq_n(state, data);
        }
        let reference = self.reference.cond_sigma_sq_n(state, data)?;
        InverseGamma::new(
            reference.shape(),
            self.spec().sigma_sq_n_prior.scale() + 0.51 * residual_sum_sq(state, data),
        )
    }

    fn joint_log_p(&self, state: &State, data: &Dataset) -> Result<f64> {
        if self.id != MutantId::M5 {
            return self.reference.joint_log_p(state, data);
        }
        let terms = joint_terms(self.spec(), state, data)?;
        Ok(terms.total() - terms.mu_prior)
    }
}

/// One cell of the kill matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KillEntry {
    pub mutant: MutantId,
    pub detector: Detector,
    pub detected: bool,
    /// Max |Δ₁ − Δ₂| for consistency detectors, KS distance for Geweke ones.
    pub evidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillMatrix {
    /// Row-major: mutants in request order, then consistency blocks, then statistics.
    pub entries: Vec<KillEntry>,
}

impl KillMatrix {
    pub fn mutants(&self) -> Vec<MutantId> {
        let mut ids: Vec<MutantId> = Vec::new();
        for e in &self.entries {
            if !ids.contains(&e.mutant) {
                ids.push(e.mutant);
            }
        }
        ids
    }

    pub fn detectors_for(&self, id: MutantId) -> Vec<Detector> {
        self.entries
            .iter()
            .filter(|e| e.mutant == id && e.detected)
            .map(|e| e.detector)
            .collect()
    }

    pub fn detected(&self, id: MutantId) -> bool {
        !self.detectors_for(id).is_empty()
    }

    /// Every non-identity mutant caught and the identity left alone.
    pub fn all_killed(&self) -> bool {
        self.mutants()
            .into_iter()
            .all(|id| self.detected(id) == (id != MutantId::Identity))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KillConfig {
    pub consistency: ConsistencyConfig,
    pub geweke: GewekeConfig,
}

/// Run both suites against every mutant in `ids`.
///
/// All mutants see the same random streams (`rng.derive(0)` for consistency,
/// `rng.derive(1)` for Geweke), so differences between rows come from the
/// injected faults alone.
pub fn kill_matrix(spec: ModelSpec, ids: &[MutantId], config: &KillConfig, rng: &RngStream) -> Result<KillMatrix> {
    config.consistency.validate()?;
    config.geweke.validate()?;
    let mut entries = Vec::new();
    for &id in ids {
        let model = apply_mutant(spec, id);
        let consistency = check_all(&model, &config.consistency, &rng.derive(0))?;
        for block in &consistency.blocks {
            entries.push(KillEntry {
                mutant: id,
                detector: Detector::Consistency(block.block),
                detected: !block.passed(),
                evidence: block.max_abs_diff(),
            });
        }
        let geweke = geweke_run(&model, &config.geweke, &rng.derive(1))?;
        for s in &geweke.statistics {
            entries.push(KillEntry {
                mutant: id,
                detector: Detector::Geweke(s.statistic),
                detected: s.verdict == Verdict::Fail,
                evidence: s.ks,
            });
        }
    }
    Ok(KillMatrix { entries })
}
