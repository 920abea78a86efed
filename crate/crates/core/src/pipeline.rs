//! End-to-end normalization: tokenize, realign, classify, verbalize, join.

use crate::classes::{ClassId, ClassRegistry};
use crate::model::{ModelError, TrainedModel};
use crate::profile::Profile;
use crate::realign::Realigner;
use crate::tagger::{TaggerError, TaggerModel};
use crate::tokenizer::Token;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationResult {
    pub input: String,
    /// Tokens in spoken order.
    pub tokens: Vec<Token>,
    pub classes: Vec<Option<ClassId>>,
    /// Spoken form per token; `None` where no class accepted the token.
    pub normalizations: Vec<Option<String>>,
    pub output: String,
    /// Indices of tokens no class accepted.
    pub unresolved: Vec<usize>,
}

/// A trained tagger and registry paired with the profile's realigner.
#[derive(Clone, Debug)]
pub struct Pipeline {
    tagger: TaggerModel,
    registry: ClassRegistry,
    realigner: Realigner,
}

impl Pipeline {
    pub fn new(tagger: TaggerModel, registry: ClassRegistry, profile: &Profile) -> Result<Self, TaggerError> {
        tagger.check_registry(&registry)?;
        Ok(Pipeline { tagger, registry, realigner: Realigner::new(profile) })
    }

    /// Builds a pipeline from a model file's contents, refusing a profile
    /// other than the one the model was trained with.
    pub fn from_model(model: TrainedModel, profile: &Profile) -> Result<Self, ModelError> {
        model.check_profile(profile)?;
        Ok(Self::new(model.tagger, model.registry, profile)?)
    }

    pub fn registry(&self) -> &ClassRegistry {
        &self.registry
    }

    pub fn tagger(&self) -> &TaggerModel {
        &self.tagger
    }

    pub fn realigner(&self) -> &Realigner {
        &self.realigner
    }

    pub fn normalize(&self, sentence: &str) -> NormalizationResult {
        let tokens = self.realigner.segment(sentence);
        let keys: Vec<String> = tokens.iter().map(|t| t.key().into_owned()).collect();
        let classes = self.tagger.decode(&self.tagger.lattice(&keys, &self.registry));
        let normalizations: Vec<Option<String>> = classes
            .iter()
            .zip(&keys)
            .map(|(class, key)| {
                class.map(|c| self.registry.normalize(c, key).expect("decoded classes accept their tokens"))
            })
            .collect();
        let unresolved = classes.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(i, _)| i).collect();
        let output =
            normalizations.iter().flatten().filter(|s| !s.is_empty()).map(String::as_str).collect::<Vec<_>>().join(" ");
        NormalizationResult { input: sentence.to_string(), tokens, classes, normalizations, output, unresolved }
    }
}

pub fn normalize_sentence(
    model: &TaggerModel,
    registry: &ClassRegistry,
    profile: &Profile,
    sentence: &str,
) -> Result<NormalizationResult, TaggerError> {
    Ok(Pipeline::new(model.clone(), registry.clone(), profile)?.normalize(sentence))
}
