use proptest::prelude::*;

use super::*;
use crate::induction::LabeledSentence;
use crate::profile::Profile;

fn english() -> ClassRegistry {
    ClassRegistry::from_profile(&Profile::english()).unwrap()
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn id(reg: &ClassRegistry, name: &str) -> ClassId {
    reg.lookup(name).unwrap_or_else(|| panic!("no class {name}"))
}

/// Registry with a second reading of "2" so the tagger has a real choice.
fn two_way() -> ClassRegistry {
    let mut reg = english();
    reg.add_generated("2", "second");
    reg
}

fn two_way_corpus(reg: &ClassRegistry) -> Vec<LabeledSentence> {
    let cardinal = id(reg, "cardinal");
    let second = id(reg, "2_to_second_AG");
    let selfc = id(reg, "self");
    let sil = id(reg, "sil");
    let mut out = Vec::new();
    for noun in ["cats", "dogs", "cars", "books", "days"] {
        out.push(LabeledSentence {
            tokens: toks(&format!("we saw 2 {noun} ,")),
            labels: vec![selfc, selfc, cardinal, selfc, sil],
        });
    }
    for what in ["place", "round", "prize", "floor", "try"] {
        out.push(LabeledSentence { tokens: toks(&format!("the 2 {what} ,")), labels: vec![selfc, second, selfc, sil] });
    }
    out
}

fn quick() -> Hyper {
    Hyper { epochs: 30, ..Hyper::default() }
}

/// A model with the given weights and no training, for decoder tests.
fn model_from(
    reg: &ClassRegistry,
    features: Vec<String>,
    emissions: Vec<(u32, u32, f64)>,
    transitions: Vec<(i64, u32, f64)>,
) -> TaggerModel {
    TaggerModel::from_record(ModelRecord {
        registry_id: reg.snapshot_id(),
        hyper: Hyper::default(),
        features,
        emissions,
        transitions,
    })
    .unwrap()
}

#[test]
fn learns_context_dependent_reading() {
    let reg = two_way();
    let data = two_way_corpus(&reg);
    let model = train(&data, &reg, &quick()).unwrap();
    let (mut right, mut total) = (0, 0);
    for s in &data {
        let pred = model.predict(&s.tokens, &reg).unwrap();
        for (p, g) in pred.iter().zip(&s.labels) {
            total += 1;
            right += usize::from(*p == Some(*g));
        }
    }
    assert!(right as f64 / total as f64 >= 0.95, "{right}/{total}");
}

#[test]
fn forced_choice_when_single_candidate() {
    let reg = english();
    let model = model_from(&reg, vec![], vec![], vec![]);
    let pred = model.predict(&toks(", ."), &reg).unwrap();
    let sil = id(&reg, "sil");
    assert_eq!(pred, vec![Some(sil), Some(sil)]);
}

#[test]
fn unaccepted_token_is_unresolved() {
    let reg = english();
    let model = model_from(&reg, vec![], vec![], vec![]);
    let pred = model.predict(&toks("a ☂ b"), &reg).unwrap();
    assert!(pred[0].is_some());
    assert_eq!(pred[1], None);
    assert!(pred[2].is_some());
}

#[test]
fn ties_go_to_lower_index() {
    let reg = english();
    let model = model_from(&reg, vec![], vec![], vec![]);
    // "Hello" is accepted by self (index 0) and spell; with zero weights they tie.
    let pred = model.predict(&toks("Hello world"), &reg).unwrap();
    let selfc = id(&reg, "self");
    assert_eq!(pred, vec![Some(selfc), Some(selfc)]);
}

#[test]
fn untrained_weights_never_escape_candidates() {
    let reg = english();
    // A strong bias toward "year" must not put it on a token it rejects.
    let year = id(&reg, "year");
    let model = model_from(&reg, vec!["cand=cardinal".into()], vec![(0, year.0, 100.0)], vec![]);
    let pred = model.predict(&toks("42"), &reg).unwrap();
    assert_ne!(pred[0], Some(year));
    assert!(reg.accepts(pred[0].unwrap(), "42"));
}

#[test]
fn registry_mismatch_is_reported() {
    let reg = two_way();
    let model = train(&two_way_corpus(&reg), &reg, &quick()).unwrap();
    let other = english();
    assert!(matches!(model.predict(&toks("2"), &other), Err(TaggerError::RegistryMismatch { .. })));
}

#[test]
fn empty_corpus_is_rejected() {
    let reg = english();
    assert_eq!(train(&[], &reg, &quick()), Err(TaggerError::EmptyCorpus));
    let empty = LabeledSentence { tokens: vec![], labels: vec![] };
    assert_eq!(train(&[empty], &reg, &quick()), Err(TaggerError::EmptyCorpus));
}

#[test]
fn label_outside_candidates_is_rejected() {
    let reg = english();
    let bad = LabeledSentence { tokens: toks("Hello"), labels: vec![id(&reg, "year")] };
    assert!(matches!(train(&[bad], &reg, &quick()), Err(TaggerError::InvalidLabel { sentence: 0, position: 0 })));
}

#[test]
fn training_is_deterministic() {
    let reg = two_way();
    let data = two_way_corpus(&reg);
    let a = train(&data, &reg, &quick()).unwrap();
    let b = train(&data, &reg, &quick()).unwrap();
    assert_eq!(a.to_record(), b.to_record());
    let c = train(&data, &reg, &Hyper { seed: 7, ..quick() }).unwrap();
    assert_eq!(c.hyper().seed, 7);
}

#[test]
fn record_round_trip_keeps_predictions() {
    let reg = two_way();
    let data = two_way_corpus(&reg);
    let model = train(&data, &reg, &quick()).unwrap();
    let json = serde_json::to_string(&model.to_record()).unwrap();
    let back = TaggerModel::from_record(serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(back, model);
    for s in &data {
        assert_eq!(back.predict(&s.tokens, &reg).unwrap(), model.predict(&s.tokens, &reg).unwrap());
    }
}

#[test]
fn hyper_set_parses_and_validates() {
    let mut h = Hyper::default();
    h.set("l2", "0.5").unwrap();
    h.set("epochs", "3").unwrap();
    assert_eq!((h.l2, h.epochs), (0.5, 3));
    assert!(h.set("learning_rate", "0").is_err());
    assert!(h.set("bogus", "1").is_err());
    assert!(h.set("epochs", "x").is_err());
}

/// Score of a full path under the model, summing emissions and transitions.
fn path_score(model: &TaggerModel, lattice: &Lattice, path: &[usize]) -> f64 {
    let mut score = 0.0;
    let mut prev = None;
    for (i, &j) in path.iter().enumerate() {
        let c = lattice.candidates[i][j];
        score += model.transition_score(prev, c) + lattice.emission[i][j];
        prev = Some(c);
    }
    score
}

/// Best score over every candidate-restricted path, by enumeration.
fn brute_force_best(model: &TaggerModel, lattice: &Lattice) -> f64 {
    let sizes: Vec<usize> = lattice.candidates.iter().map(Vec::len).collect();
    let mut path = vec![0; sizes.len()];
    let mut best = f64::NEG_INFINITY;
    loop {
        best = best.max(path_score(model, lattice, &path));
        let mut i = 0;
        loop {
            if i == sizes.len() {
                return best;
            }
            path[i] += 1;
            if path[i] < sizes[i] {
                break;
            }
            path[i] = 0;
            i += 1;
        }
    }
}

const POOL: [&str; 8] = ["2", "12", "Hello", "TV", ",", "2020", "IV", "x"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn viterbi_matches_exhaustive_search(
        picks in prop::collection::vec(0..POOL.len(), 1..5),
        em in prop::collection::vec(-3.0f64..3.0, 64),
        tr in prop::collection::vec(-3.0f64..3.0, 64),
    ) {
        let reg = two_way();
        let tokens: Vec<String> = picks.iter().map(|&i| POOL[i].to_string()).collect();
        // Weights for the candidate features of every pool token on every class.
        let features: Vec<String> = reg.ids().map(|c| format!("cand={}", reg.name(c))).collect();
        let n = reg.len() as u32;
        let emissions = (0..n)
            .flat_map(|f| (0..n).map(move |c| (f, c)))
            .enumerate()
            .map(|(k, (f, c))| (f, c, em[k % em.len()]))
            .collect();
        let transitions = (-1..n as i64)
            .flat_map(|p| (0..n).map(move |c| (p, c)))
            .enumerate()
            .map(|(k, (p, c))| (p, c, tr[k % tr.len()]))
            .collect();
        let model = model_from(&reg, features, emissions, transitions);
        let lattice = model.lattice(&tokens, &reg);
        let pred = model.decode(&lattice);
        // every pool token has at least one candidate
        let path: Vec<usize> = pred
            .iter()
            .enumerate()
            .map(|(i, c)| lattice.candidates[i].iter().position(|x| Some(*x) == *c).unwrap())
            .collect();
        for (tok, c) in tokens.iter().zip(&pred) {
            prop_assert!(reg.accepts(c.unwrap(), tok));
        }
        let got = path_score(&model, &lattice, &path);
        let want = brute_force_best(&model, &lattice);
        prop_assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}
