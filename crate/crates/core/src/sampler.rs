//! Reversible-jump sampler over ridge structures.
//!
//! Each iteration proposes a birth, death or change (chosen uniformly),
//! accepts it by Metropolis–Hastings using the marginal likelihood with the
//! coefficients and noise variance integrated out, and then refreshes
//! `beta`, `sigma2` and `tau` by Gibbs steps on the resulting design.

use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{self, build_component_basis};
use crate::chain::{PosteriorChain, Traces};
use crate::conjugate::{self, GramCache};
use crate::dataset::{Dataset, Features};
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::linalg::Matrix;
use crate::math;
use crate::model::{ModelState, RidgeComponent, RidgeKind};
use crate::proposals::{self, AdaptiveWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Likelihood {
    #[default]
    Marginal,
    #[cfg(any(test, feature = "test-hooks"))]
    Unit,
}

/// Model state together with its design matrix and Gram statistics.
#[derive(Debug, Clone)]
pub struct SamplerState {
    model: ModelState,
    design: Matrix,
    gram: GramCache,
    likelihood: Likelihood,
}

impl SamplerState {
    /// Empty model with `tau = 1`, `sigma2 = var(y)` and `beta = [mean(y)]`.
    pub fn initial(data: &Dataset) -> Result<Self> {
        let y = &data.y;
        let mut sigma2 = math::variance(y);
        if !(sigma2 > 0.0) {
            sigma2 = 1.0;
        }
        let model = ModelState { components: Vec::new(), beta: vec![math::mean(y)], sigma2, tau: 1.0 };
        Self::from_model(model, data)
    }

    pub fn from_model(model: ModelState, data: &Dataset) -> Result<Self> {
        let design = model.rebuild_design(&data.features)?;
        if design.cols() != model.beta.len() {
            return Err(Error::DimensionMismatch("coefficient count does not match design width"));
        }
        let gram = conjugate::gram_cache(&design, &data.y)?;
        Ok(Self { model, design, gram, likelihood: Likelihood::Marginal })
    }

    pub fn model(&self) -> &ModelState {
        &self.model
    }

    pub fn into_model(self) -> ModelState {
        self.model
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn gram(&self) -> &GramCache {
        &self.gram
    }

    /// Replaces every likelihood ratio by one, so the chain targets the
    /// prior. Used to check the structural moves in isolation.
    #[cfg(any(test, feature = "test-hooks"))]
    #[doc(hidden)]
    pub fn use_unit_likelihood(&mut self) {
        self.likelihood = Likelihood::Unit;
    }

    fn log_likelihood_ratio(&self, candidate: &GramCache, column_change: isize) -> Result<f64> {
        match self.likelihood {
            Likelihood::Marginal => {
                let tau = self.model.tau;
                let size = -0.5 * column_change as f64 * math::log1p(tau);
                let new = conjugate::log_marginal_quadform(candidate, tau)?;
                let old = conjugate::log_marginal_quadform(&self.gram, tau)?;
                Ok(size + new - old)
            }
            #[cfg(any(test, feature = "test-hooks"))]
            Likelihood::Unit => Ok(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StepKind {
    Birth,
    Death,
    Change,
    /// A death or change drawn while the model is empty.
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub kind: StepKind,
    pub accepted: bool,
    /// Log acceptance ratio; `-inf` when the proposal was degenerate.
    pub log_alpha: f64,
    /// Slot inserted at, or ridge removed or changed.
    pub index: Option<usize>,
}

impl StepOutcome {
    fn skipped() -> Self {
        Self { kind: StepKind::Skipped, accepted: false, log_alpha: f64::NEG_INFINITY, index: None }
    }

    fn rejected(kind: StepKind, index: Option<usize>) -> Self {
        Self { kind, accepted: false, log_alpha: f64::NEG_INFINITY, index }
    }
}

/// A design and its Gram statistics for a proposed structure.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub design: Matrix,
    pub gram: GramCache,
}

/// A new ridge and the position it would take in the component list.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthProposal {
    pub component: RidgeComponent,
    pub slot: usize,
}

/// A replacement for ridge `index`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeProposal {
    pub index: usize,
    pub component: RidgeComponent,
}

/// Builds a ridge on `features` with direction `direction` over `set`,
/// drawing the initial knot uniformly from its prior bounds. Dummy-only
/// sets become indicator ridges.
pub fn build_ridge<R: Rng + ?Sized>(
    features: &Features,
    hyper: &Hyperparams,
    set: Vec<usize>,
    direction: Vec<f64>,
    rng: &mut R,
) -> Result<RidgeComponent> {
    if set.iter().all(|&j| features.is_dummy(j)) {
        return Ok(RidgeComponent { features: set, direction, kind: RidgeKind::Indicator });
    }
    let mut sorted = features.project(&direction);
    math::sort_floats(&mut sorted);
    let bounds = basis::knot_bounds_sorted(&sorted, hyper.q, hyper.p0)?;
    let t0 = bounds.at(rng.random::<f64>());
    let knots = basis::interior_knots_sorted(&sorted, t0, hyper.basis_size)?;
    Ok(RidgeComponent { features: set, direction, kind: RidgeKind::Spline { t0, knots } })
}

fn embed(set: &[usize], active: &[f64], p: usize) -> Vec<f64> {
    let mut theta = vec![0.0; p];
    for (&j, &v) in set.iter().zip(active) {
        theta[j] = v;
    }
    theta
}

/// Draws a birth proposal: active count from `omega`, feature set from
/// `upsilon`, direction uniform on the active sub-sphere, initial knot from
/// its prior, and a uniform insertion slot.
pub fn propose_birth<R: Rng + ?Sized>(
    model: &ModelState,
    data: &Dataset,
    hyper: &Hyperparams,
    weights: &AdaptiveWeights,
    rng: &mut R,
) -> Result<BirthProposal> {
    let p = data.p();
    let a = proposals::sample_categorical(&weights.omega, rng) + 1;
    let set = proposals::sample_feature_set(&weights.upsilon, a, rng);
    let active = proposals::sample_uniform_subsphere(a, rng);
    let direction = embed(&set, &active, p);
    let component = build_ridge(&data.features, hyper, set, direction, rng)?;
    let slot = rng.random_range(0..=model.m());
    Ok(BirthProposal { component, slot })
}

pub fn birth_candidate(state: &SamplerState, data: &Dataset, proposal: &BirthProposal) -> Result<Candidate> {
    let block = build_component_basis(&data.features, &proposal.component)?;
    let mut design = state.design.clone();
    design.insert_columns(state.model.column_offset_or_end(proposal.slot), &block);
    let gram = conjugate::gram_cache(&design, &data.y)?;
    Ok(Candidate { design, gram })
}

/// Log Metropolis–Hastings ratio of a birth, with `weights` the adaptive
/// weights of the current (pre-birth) state.
pub fn birth_log_alpha(
    state: &SamplerState,
    data: &Dataset,
    hyper: &Hyperparams,
    weights: &AdaptiveWeights,
    proposal: &BirthProposal,
) -> Result<(f64, Candidate)> {
    let candidate = birth_candidate(state, data, proposal)?;
    let c = &proposal.component;
    let lik = state.log_likelihood_ratio(&candidate.gram, c.width() as isize)?;
    let m_star = (state.model.m() + 1) as f64;
    let prior_over_proposal = math::ln(hyper.lambda)
        - math::ln(m_star)
        - math::ln(hyper.max_active as f64)
        - math::ln_choose(data.p(), c.active())
        - math::ln(weights.omega_normalized(c.active()))
        - proposals::feature_set_log_prob(&c.features, &weights.upsilon)?;
    Ok((lik + prior_over_proposal, candidate))
}

pub fn death_candidate(state: &SamplerState, data: &Dataset, victim: usize) -> Result<Candidate> {
    let mut design = state.design.clone();
    design.remove_columns(state.model.column_offset(victim), state.model.components[victim].width());
    let gram = conjugate::gram_cache(&design, &data.y)?;
    Ok(Candidate { design, gram })
}

/// Log Metropolis–Hastings ratio for deleting ridge `victim`. The reverse
/// birth's adaptive weights are computed from the state without the victim.
pub fn death_log_alpha(
    state: &SamplerState,
    data: &Dataset,
    hyper: &Hyperparams,
    victim: usize,
) -> Result<(f64, Candidate)> {
    let candidate = death_candidate(state, data, victim)?;
    let c = &state.model.components[victim];
    let lik = state.log_likelihood_ratio(&candidate.gram, -(c.width() as isize))?;
    let mut reduced = state.model.components.clone();
    reduced.remove(victim);
    let weights = proposals::adaptive_weights(&reduced, hyper, data.p());
    let m = state.model.m() as f64;
    let proposal_over_prior = math::ln(weights.omega_normalized(c.active()))
        + proposals::feature_set_log_prob(&c.features, &weights.upsilon)?
        - math::ln(hyper.lambda)
        + math::ln(m)
        + math::ln(hyper.max_active as f64)
        + math::ln_choose(data.p(), c.active());
    Ok((lik + proposal_over_prior, candidate))
}

/// Draws a change of ridge `index`: spline ridges get a power spherical
/// perturbation of the active direction and a fresh initial knot from its
/// prior; indicator ridges get a uniformly drawn dummy-only set of the same
/// size.
pub fn propose_change<R: Rng + ?Sized>(
    model: &ModelState,
    data: &Dataset,
    hyper: &Hyperparams,
    index: usize,
    rng: &mut R,
) -> Result<ChangeProposal> {
    let current = &model.components[index];
    let p = data.p();
    let a = current.active();
    let component = if current.is_indicator() {
        let dummies = data.features.dummy_indices();
        let uniform = vec![1.0; dummies.len()];
        let picks = proposals::sample_feature_set(&uniform, a, rng);
        let set: Vec<usize> = picks.into_iter().map(|i| dummies[i]).collect();
        let active = proposals::sample_uniform_subsphere(a, rng);
        let direction = embed(&set, &active, p);
        RidgeComponent { features: set, direction, kind: RidgeKind::Indicator }
    } else {
        let mu: Vec<f64> = current.features.iter().map(|&j| current.direction[j]).collect();
        let active = proposals::sample_power_spherical(&mu, hyper.kappa, rng)?;
        let direction = embed(&current.features, &active, p);
        build_ridge(&data.features, hyper, current.features.clone(), direction, rng)?
    };
    Ok(ChangeProposal { index, component })
}

pub fn change_candidate(state: &SamplerState, data: &Dataset, proposal: &ChangeProposal) -> Result<Candidate> {
    let block = build_component_basis(&data.features, &proposal.component)?;
    let old = &state.model.components[proposal.index];
    if block.cols() != old.width() {
        return Err(Error::DimensionMismatch("change proposal altered the ridge width"));
    }
    let mut design = state.design.clone();
    design.replace_columns(state.model.column_offset(proposal.index), &block);
    let gram = conjugate::gram_cache(&design, &data.y)?;
    Ok(Candidate { design, gram })
}

/// Log ratio of a change: the marginal likelihood ratio alone, since the
/// direction proposal is symmetric and the knot is drawn from its prior.
pub fn change_log_alpha(state: &SamplerState, data: &Dataset, proposal: &ChangeProposal) -> Result<(f64, Candidate)> {
    let candidate = change_candidate(state, data, proposal)?;
    let lik = state.log_likelihood_ratio(&candidate.gram, 0)?;
    Ok((lik, candidate))
}

fn accept<R: Rng + ?Sized>(log_alpha: f64, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    log_alpha >= 0.0 || u < math::exp(log_alpha)
}

pub fn birth_step<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &Dataset,
    hyper: &Hyperparams,
    weights: &AdaptiveWeights,
    rng: &mut R,
) -> StepOutcome {
    let proposal = match propose_birth(&state.model, data, hyper, weights, rng) {
        Ok(p) => p,
        Err(_) => return StepOutcome::rejected(StepKind::Birth, None),
    };
    let (log_alpha, candidate) = match birth_log_alpha(state, data, hyper, weights, &proposal) {
        Ok(v) => v,
        Err(_) => return StepOutcome::rejected(StepKind::Birth, Some(proposal.slot)),
    };
    let accepted = accept(log_alpha, rng);
    if accepted {
        let offset = state.model.column_offset_or_end(proposal.slot);
        let width = proposal.component.width();
        state.model.beta.splice(offset..offset, core::iter::repeat_n(0.0, width));
        state.model.components.insert(proposal.slot, proposal.component);
        state.design = candidate.design;
        state.gram = candidate.gram;
    }
    StepOutcome { kind: StepKind::Birth, accepted, log_alpha, index: Some(proposal.slot) }
}

pub fn death_step<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &Dataset,
    hyper: &Hyperparams,
    rng: &mut R,
) -> StepOutcome {
    let m = state.model.m();
    if m == 0 {
        return StepOutcome::skipped();
    }
    let victim = rng.random_range(0..m);
    let (log_alpha, candidate) = match death_log_alpha(state, data, hyper, victim) {
        Ok(v) => v,
        Err(_) => return StepOutcome::rejected(StepKind::Death, Some(victim)),
    };
    let accepted = accept(log_alpha, rng);
    if accepted {
        let offset = state.model.column_offset(victim);
        let width = state.model.components[victim].width();
        state.model.beta.drain(offset..offset + width);
        state.model.components.remove(victim);
        state.design = candidate.design;
        state.gram = candidate.gram;
    }
    StepOutcome { kind: StepKind::Death, accepted, log_alpha, index: Some(victim) }
}

pub fn change_step<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &Dataset,
    hyper: &Hyperparams,
    rng: &mut R,
) -> StepOutcome {
    let m = state.model.m();
    if m == 0 {
        return StepOutcome::skipped();
    }
    let index = rng.random_range(0..m);
    let proposal = match propose_change(&state.model, data, hyper, index, rng) {
        Ok(p) => p,
        Err(_) => return StepOutcome::rejected(StepKind::Change, Some(index)),
    };
    let (log_alpha, candidate) = match change_log_alpha(state, data, &proposal) {
        Ok(v) => v,
        Err(_) => return StepOutcome::rejected(StepKind::Change, Some(index)),
    };
    let accepted = accept(log_alpha, rng);
    if accepted {
        state.model.components[index] = proposal.component;
        state.design = candidate.design;
        state.gram = candidate.gram;
    }
    StepOutcome { kind: StepKind::Change, accepted, log_alpha, index: Some(index) }
}

/// Gibbs refresh of `beta`, then `sigma2`, then `tau`, using the previous
/// `tau` in the coefficient covariance and the previous `sigma2` in the
/// coefficient draw.
pub fn gibbs_update<R: Rng + ?Sized>(state: &mut SamplerState, rng: &mut R) {
    let n = state.gram.n;
    let model = &mut state.model;
    let beta = conjugate::gibbs_beta(&state.gram, model.sigma2, model.tau, rng);
    let (residual, fitted) = conjugate::fit_sums(&state.gram, &beta);
    let sigma2 = conjugate::gibbs_sigma2(residual.max(f64::MIN_POSITIVE), n, rng);
    let tau = conjugate::gibbs_tau(fitted, sigma2, model.basis_columns(), n, rng);
    model.beta = beta;
    model.sigma2 = sigma2;
    model.tau = tau;
}

/// One full iteration: a uniformly chosen structural move followed by the
/// Gibbs refresh.
pub fn mcmc_step<R: Rng + ?Sized>(
    state: &mut SamplerState,
    data: &Dataset,
    hyper: &Hyperparams,
    rng: &mut R,
) -> StepOutcome {
    let outcome = match rng.random_range(0..3u8) {
        0 => {
            let weights = proposals::adaptive_weights(&state.model.components, hyper, data.p());
            birth_step(state, data, hyper, &weights, rng)
        }
        1 => death_step(state, data, hyper, rng),
        _ => change_step(state, data, hyper, rng),
    };
    gibbs_update(state, rng);
    outcome
}

/// A chain bound to one dataset with its own seeded generator.
pub struct Sampler<'a> {
    data: &'a Dataset,
    hyper: Hyperparams,
    state: SamplerState,
    rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(data: &'a Dataset, hyper: &Hyperparams) -> Result<Self> {
        hyper.validate(data.p())?;
        Ok(Self {
            data,
            hyper: hyper.clone(),
            state: SamplerState::initial(data)?,
            rng: ChaCha8Rng::seed_from_u64(hyper.seed),
        })
    }

    #[cfg(any(test, feature = "test-hooks"))]
    #[doc(hidden)]
    pub fn use_unit_likelihood(&mut self) {
        self.state.use_unit_likelihood();
    }

    pub fn step(&mut self) -> StepOutcome {
        mcmc_step(&mut self.state, self.data, &self.hyper, &mut self.rng)
    }

    pub fn state(&self) -> &SamplerState {
        &self.state
    }

    pub fn model(&self) -> &ModelState {
        &self.state.model
    }
}

/// Runs `n_mcmc` iterations from the empty model, recording scalar traces
/// at every iteration and full states after `n_burn`.
pub fn run_chain(data: &Dataset, hyper: &Hyperparams) -> Result<PosteriorChain> {
    let mut sampler = Sampler::new(data, hyper)?;
    let mut traces = Traces::with_capacity(hyper.n_mcmc);
    let mut states = Vec::with_capacity(hyper.n_mcmc - hyper.n_burn);
    for s in 0..hyper.n_mcmc {
        let outcome = sampler.step();
        traces.record(sampler.model(), &outcome);
        if s >= hyper.n_burn {
            states.push(sampler.model().clone());
        }
    }
    Ok(PosteriorChain {
        hyper: hyper.clone(),
        standardization: data.features.standardization.clone(),
        states,
        traces,
    })
}
