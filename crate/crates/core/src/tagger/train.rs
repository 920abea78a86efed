//! CRF training by stochastic gradient ascent on the L2-regularized
//! conditional log-likelihood.
//!
//! The partition function runs over the same candidate-restricted lattice
//! used for decoding, so probability mass is only ever spread over classes
//! that accept each token.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{extract_features, Hyper, TaggerError, TaggerModel, START};
use crate::classes::{ClassId, ClassRegistry};
use crate::induction::LabeledSentence;

struct Position {
    cands: Vec<u32>,
    gold: usize,
    features: usize,
    /// Emission parameters, `features` per candidate.
    emit: Vec<usize>,
    /// Transition parameters `[prev][cur]` (just `[cur]` at the start).
    trans: Vec<usize>,
}

#[derive(Default)]
struct Params {
    features: Vec<String>,
    feature_index: HashMap<String, u32>,
    emission: HashMap<(u32, u32), usize>,
    transition: HashMap<(u32, u32), usize>,
    len: usize,
}

impl Params {
    fn feature(&mut self, name: String) -> u32 {
        if let Some(&id) = self.feature_index.get(&name) {
            return id;
        }
        let id = self.features.len() as u32;
        self.features.push(name.clone());
        self.feature_index.insert(name, id);
        id
    }

    fn slot(map: &mut HashMap<(u32, u32), usize>, len: &mut usize, key: (u32, u32)) -> usize {
        *map.entry(key).or_insert_with(|| {
            *len += 1;
            *len - 1
        })
    }

    fn emission(&mut self, feature: u32, class: u32) -> usize {
        Self::slot(&mut self.emission, &mut self.len, (feature, class))
    }

    fn transition(&mut self, prev: u32, class: u32) -> usize {
        Self::slot(&mut self.transition, &mut self.len, (prev, class))
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn prepare(
    labeled: &[LabeledSentence],
    registry: &ClassRegistry,
    params: &mut Params,
) -> Result<Vec<Vec<Position>>, TaggerError> {
    let mut out = Vec::with_capacity(labeled.len());
    for (s, sentence) in labeled.iter().enumerate() {
        let mut positions: Vec<Position> = Vec::with_capacity(sentence.tokens.len());
        for i in 0..sentence.tokens.len() {
            let fs = extract_features(&sentence.tokens, i, registry);
            let cands: Vec<u32> = fs.candidates.iter().map(|c| c.0).collect();
            let gold = cands
                .iter()
                .position(|&c| c == sentence.labels[i].0)
                .ok_or(TaggerError::InvalidLabel { sentence: s, position: i })?;
            let feature_ids: Vec<u32> = fs.names(registry).into_iter().map(|f| params.feature(f)).collect();
            let mut emit = Vec::with_capacity(cands.len() * feature_ids.len());
            for &c in &cands {
                for &f in &feature_ids {
                    emit.push(params.emission(f, c));
                }
            }
            let mut trans = Vec::new();
            match positions.last() {
                None => trans.extend(cands.iter().map(|&c| params.transition(START, c))),
                Some(prev) => {
                    for &p in &prev.cands {
                        for &c in &cands {
                            trans.push(params.transition(p, c));
                        }
                    }
                }
            }
            positions.push(Position { cands, gold, features: feature_ids.len(), emit, trans });
        }
        out.push(positions);
    }
    Ok(out)
}

/// Weights stored as `scale * raw` so the L2 decay is O(1) per step.
struct Weights {
    raw: Vec<f64>,
    scale: f64,
}

impl Weights {
    fn get(&self, k: usize) -> f64 {
        self.raw[k] * self.scale
    }

    fn decay(&mut self, factor: f64) {
        self.scale *= factor;
        if self.scale < 1e-9 {
            for w in &mut self.raw {
                *w *= self.scale;
            }
            self.scale = 1.0;
        }
    }

    fn add(&mut self, k: usize, delta: f64) {
        self.raw[k] += delta / self.scale;
    }
}

/// Log-likelihood of the gold path of one sentence; fills `grad` with its
/// (unregularized) gradient as `(parameter, delta)` pairs.
fn likelihood(positions: &[Position], w: &Weights, grad: &mut Vec<(usize, f64)>) -> f64 {
    grad.clear();
    let n = positions.len();
    if n == 0 {
        return 0.0;
    }
    let emission: Vec<Vec<f64>> = positions
        .iter()
        .map(|p| {
            (0..p.cands.len())
                .map(|j| p.emit[j * p.features..(j + 1) * p.features].iter().map(|&k| w.get(k)).sum())
                .collect()
        })
        .collect();
    let trans = |i: usize, k: usize, j: usize| -> f64 {
        let p = &positions[i];
        if i == 0 {
            w.get(p.trans[j])
        } else {
            w.get(p.trans[k * p.cands.len() + j])
        }
    };

    let mut alpha: Vec<Vec<f64>> = Vec::with_capacity(n);
    alpha.push((0..positions[0].cands.len()).map(|j| trans(0, 0, j) + emission[0][j]).collect());
    for i in 1..n {
        let prev = &alpha[i - 1];
        let row = (0..positions[i].cands.len())
            .map(|j| log_sum_exp((0..prev.len()).map(|k| prev[k] + trans(i, k, j))) + emission[i][j])
            .collect();
        alpha.push(row);
    }
    let mut beta: Vec<Vec<f64>> = vec![Vec::new(); n];
    beta[n - 1] = vec![0.0; positions[n - 1].cands.len()];
    for i in (0..n - 1).rev() {
        let next = &beta[i + 1];
        beta[i] = (0..positions[i].cands.len())
            .map(|k| log_sum_exp((0..next.len()).map(|j| trans(i + 1, k, j) + emission[i + 1][j] + next[j])))
            .collect();
    }
    let log_z = log_sum_exp(alpha[n - 1].iter().copied());

    let mut gold_score = 0.0;
    for i in 0..n {
        let p = &positions[i];
        let g = p.gold;
        gold_score += emission[i][g];
        gold_score += if i == 0 { trans(0, 0, g) } else { trans(i, positions[i - 1].gold, g) };
        for j in 0..p.cands.len() {
            let marginal = (alpha[i][j] + beta[i][j] - log_z).exp();
            let observed = if j == g { 1.0 } else { 0.0 };
            let delta = observed - marginal;
            if delta != 0.0 {
                for &k in &p.emit[j * p.features..(j + 1) * p.features] {
                    grad.push((k, delta));
                }
            }
        }
        if i == 0 {
            for j in 0..p.cands.len() {
                let marginal = (alpha[0][j] + beta[0][j] - log_z).exp();
                let observed = if j == g { 1.0 } else { 0.0 };
                grad.push((p.trans[j], observed - marginal));
            }
        } else {
            let prev_gold = positions[i - 1].gold;
            for (k, &a) in alpha[i - 1].iter().enumerate() {
                for j in 0..p.cands.len() {
                    let marginal = (a + trans(i, k, j) + emission[i][j] + beta[i][j] - log_z).exp();
                    let observed = if k == prev_gold && j == g { 1.0 } else { 0.0 };
                    grad.push((p.trans[k * p.cands.len() + j], observed - marginal));
                }
            }
        }
    }

    gold_score - log_z
}

fn step(positions: &[Position], w: &mut Weights, eta: f64, decay: f64, grad: &mut Vec<(usize, f64)>) {
    likelihood(positions, w, grad);
    w.decay(decay);
    for &(k, delta) in grad.iter() {
        w.add(k, eta * delta);
    }
}

/// Trains a tagger on labeled sentences whose labels come from `registry`.
/// Deterministic for a fixed `hyper.seed`.
pub fn train(labeled: &[LabeledSentence], registry: &ClassRegistry, hyper: &Hyper) -> Result<TaggerModel, TaggerError> {
    if labeled.iter().all(|s| s.tokens.is_empty()) {
        return Err(TaggerError::EmptyCorpus);
    }
    let mut params = Params::default();
    let data = prepare(labeled, registry, &mut params)?;

    let lambda = 2.0 * hyper.l2 / data.len() as f64;
    let mut weights = Weights { raw: vec![0.0; params.len], scale: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grad = Vec::new();
    let mut t = 0.0;
    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for &s in &order {
            let eta = hyper.learning_rate / (1.0 + lambda * hyper.learning_rate * t);
            let decay = (1.0 - eta * lambda).max(0.0);
            step(&data[s], &mut weights, eta, decay, &mut grad);
            t += 1.0;
        }
    }

    let mut emissions = vec![Vec::new(); params.features.len()];
    for (&(f, c), &k) in &params.emission {
        emissions[f as usize].push((ClassId(c), weights.get(k)));
    }
    for row in &mut emissions {
        row.sort_by_key(|&(c, _)| c);
    }
    let transitions = params.transition.iter().map(|(&key, &k)| (key, weights.get(k))).collect();
    Ok(TaggerModel {
        registry_id: registry.snapshot_id(),
        hyper: hyper.clone(),
        features: params.features,
        feature_index: params.feature_index,
        emissions,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_is_stable() {
        let v = [1000.0, 1000.0];
        assert!((log_sum_exp(v.iter().copied()) - (1000.0 + 2f64.ln())).abs() < 1e-9);
        assert_eq!(log_sum_exp(std::iter::empty::<f64>()), f64::NEG_INFINITY);
    }

    fn toy_positions(params: &mut Params) -> Vec<Position> {
        use crate::profile::Profile;
        let mut reg = ClassRegistry::from_profile(&Profile::english()).unwrap();
        reg.add_generated("2", "second");
        let tokens: Vec<String> = ["I", "2", "2", "TV"].iter().map(|s| s.to_string()).collect();
        let labels = tokens.iter().map(|t| *reg.candidates(t).last().unwrap()).collect();
        let sentence = LabeledSentence { tokens, labels };
        prepare(&[sentence], &reg, params).unwrap().pop().unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut params = Params::default();
        let positions = toy_positions(&mut params);
        // arbitrary but fixed weights
        let raw: Vec<f64> = (0..params.len).map(|k| ((k * 7919) % 13) as f64 / 13.0 - 0.5).collect();
        let w = Weights { raw: raw.clone(), scale: 1.0 };
        let mut grad = Vec::new();
        likelihood(&positions, &w, &mut grad);
        let mut analytic = vec![0.0; params.len];
        for &(k, d) in &grad {
            analytic[k] += d;
        }
        let h = 1e-6;
        let mut scratch = Vec::new();
        for k in 0..params.len {
            let mut plus = raw.clone();
            plus[k] += h;
            let mut minus = raw.clone();
            minus[k] -= h;
            let lp = likelihood(&positions, &Weights { raw: plus, scale: 1.0 }, &mut scratch);
            let lm = likelihood(&positions, &Weights { raw: minus, scale: 1.0 }, &mut scratch);
            let numeric = (lp - lm) / (2.0 * h);
            assert!((numeric - analytic[k]).abs() < 1e-6, "param {k}: {numeric} vs {}", analytic[k]);
        }
    }

    #[test]
    fn likelihood_is_a_log_probability() {
        let mut params = Params::default();
        let positions = toy_positions(&mut params);
        let w = Weights { raw: vec![0.0; params.len], scale: 1.0 };
        let ll = likelihood(&positions, &w, &mut Vec::new());
        // uniform weights: every path through the candidate lattice is equally likely
        let paths: usize = positions.iter().map(|p| p.cands.len()).product();
        assert!((ll + (paths as f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn lazy_scale_matches_eager_decay() {
        let mut w = Weights { raw: vec![1.0, -2.0], scale: 1.0 };
        for _ in 0..100 {
            w.decay(0.5);
            w.add(0, 0.25);
        }
        // fixed point of x = 0.5 x + 0.25
        assert!((w.get(0) - 0.5).abs() < 1e-9);
        assert!(w.get(1).abs() < 1e-20);
    }
}
