//! Model files.
//!
//! A model file is a single JSON document holding the format tag and
//! version, the profile it was trained with, the full class registry and
//! the tagger weights. Numbers are written as decimal text and read back
//! exactly, so the file does not depend on host endianness.
//!
//! ```text
//! {"format":"tnorm-model","version":1,"profile_id":"en","profile_fingerprint":"…",
//!  "registry":{…},"tagger":{"registry_id":"…","hyper":{…},"features":[…],
//!  "emissions":[[feature,class,weight],…],"transitions":[[prev|-1,class,weight],…]}}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{ClassError, ClassRegistry, RegistryRecord};
use crate::profile::Profile;
use crate::tagger::{ModelRecord, TaggerError, TaggerModel};

pub const MODEL_FORMAT: &str = "tnorm-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot access model {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("not a model file: {0}")]
    Format(String),
    #[error("unsupported model version {0} (expected {MODEL_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Tagger(#[from] TaggerError),
    #[error(
        "model was trained with profile `{model}` ({model_fp:.12}) but profile `{given}` ({given_fp:.12}) was given"
    )]
    ProfileMismatch { model: String, model_fp: String, given: String, given_fp: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    version: u32,
    profile_id: String,
    profile_fingerprint: String,
    registry: RegistryRecord,
    tagger: ModelRecord,
}

/// Registry and tagger weights trained together.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub profile_id: String,
    pub profile_fingerprint: String,
    pub registry: ClassRegistry,
    pub tagger: TaggerModel,
}

impl TrainedModel {
    pub fn new(profile: &Profile, registry: ClassRegistry, tagger: TaggerModel) -> Result<Self, ModelError> {
        tagger.check_registry(&registry)?;
        Ok(TrainedModel {
            profile_id: profile.id.clone(),
            profile_fingerprint: profile.fingerprint(),
            registry,
            tagger,
        })
    }

    pub fn check_profile(&self, profile: &Profile) -> Result<(), ModelError> {
        let given_fp = profile.fingerprint();
        if given_fp != self.profile_fingerprint {
            return Err(ModelError::ProfileMismatch {
                model: self.profile_id.clone(),
                model_fp: self.profile_fingerprint.clone(),
                given: profile.id.clone(),
                given_fp,
            });
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            profile_id: self.profile_id.clone(),
            profile_fingerprint: self.profile_fingerprint.clone(),
            registry: self.registry.to_record(),
            tagger: self.tagger.to_record(),
        };
        let mut bytes = serde_json::to_vec(&file).expect("model serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let header: Header = serde_json::from_slice(bytes).map_err(|e| ModelError::Format(e.to_string()))?;
        if header.format != MODEL_FORMAT {
            return Err(ModelError::Format(format!("format tag `{}`", header.format)));
        }
        if header.version != MODEL_VERSION {
            return Err(ModelError::Version(header.version));
        }
        let file: ModelFile = serde_json::from_slice(bytes).map_err(|e| ModelError::Format(e.to_string()))?;
        let registry = ClassRegistry::from_record(&file.registry)?;
        let tagger = TaggerModel::from_record(file.tagger)?;
        tagger.check_registry(&registry)?;
        if tagger.max_class_index().is_some_and(|c| c as usize >= registry.len()) {
            return Err(TaggerError::Malformed("weight refers to a class outside the registry".into()).into());
        }
        Ok(TrainedModel {
            profile_id: file.profile_id,
            profile_fingerprint: file.profile_fingerprint,
            registry,
            tagger,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(&bytes)
    }
}
