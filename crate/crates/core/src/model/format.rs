//! JSON model files.
//!
//! Every file is an object with a `"type"` tag and the fields of the matching model. Matrices
//! are arrays of rows; symbols are referenced by label. Unknown fields are rejected.
//!
//! ```json
//! {"type": "markov_mixture", "alphabet": ["a", "b"], "y0": "a",
//!  "weights": [0.5, 0.5],
//!  "components": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    Alphabet, Distribution, HmmModel, IidMixtureModel, MarkovMixtureModel, Model, PartitionedKernelMixture,
    StochasticMatrix, DEL_LABEL,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelFile {
    Hmm(HmmFile),
    MarkovMixture(MarkovMixtureFile),
    IidMixture(IidMixtureFile),
    PartitionedKernelMixture(PartitionedFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HmmFile {
    pub alphabet: Vec<String>,
    pub hidden_states: Vec<String>,
    pub initial: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    pub readout: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovMixtureFile {
    pub alphabet: Vec<String>,
    pub y0: String,
    pub weights: Vec<f64>,
    pub components: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IidMixtureFile {
    pub alphabet: Vec<String>,
    pub weights: Vec<f64>,
    pub components: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionedFile {
    pub alphabet: Vec<String>,
    /// E_1, E_2, ...; a leading `["@del"]` cell (E_0) is accepted and ignored.
    pub cells: Vec<Vec<String>>,
    pub y0: String,
    pub weights: Vec<f64>,
    /// `kernels[h][j]` is the row t_h(j+1, ·).
    pub kernels: Vec<Vec<Vec<f64>>>,
}

fn lookup(alphabet: &Alphabet, label: &str) -> Result<usize> {
    alphabet.index(label).ok_or_else(|| Error::UnknownSymbol(label.to_string()))
}

impl ModelFile {
    pub fn into_model(self) -> Result<Model> {
        Ok(match self {
            ModelFile::Hmm(f) => Model::Hmm(HmmModel {
                alphabet: Alphabet(f.alphabet),
                hidden_states: f.hidden_states,
                initial: Distribution(f.initial),
                transition: StochasticMatrix(f.transition),
                readout: f.readout.into_iter().map(Distribution).collect(),
            }),
            ModelFile::MarkovMixture(f) => {
                let alphabet = Alphabet(f.alphabet);
                Model::MarkovMixture(MarkovMixtureModel {
                    y0: lookup(&alphabet, &f.y0)?,
                    alphabet,
                    weights: Distribution(f.weights),
                    components: f.components.into_iter().map(StochasticMatrix).collect(),
                })
            }
            ModelFile::IidMixture(f) => Model::IidMixture(IidMixtureModel {
                alphabet: Alphabet(f.alphabet),
                weights: Distribution(f.weights),
                components: f.components.into_iter().map(Distribution).collect(),
            }),
            ModelFile::PartitionedKernelMixture(f) => {
                let alphabet = Alphabet(f.alphabet);
                let mut cells = f.cells;
                if cells.first().is_some_and(|c| c.len() == 1 && c[0] == DEL_LABEL) {
                    cells.remove(0);
                }
                let cells = cells
                    .iter()
                    .map(|c| c.iter().map(|l| lookup(&alphabet, l)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Model::Partitioned(PartitionedKernelMixture {
                    y0: lookup(&alphabet, &f.y0)?,
                    alphabet,
                    cells,
                    weights: Distribution(f.weights),
                    kernels: f.kernels.into_iter().map(|t| t.into_iter().map(Distribution).collect()).collect(),
                })
            }
        })
    }

    pub fn from_model(model: &Model) -> ModelFile {
        match model {
            Model::Hmm(m) => ModelFile::Hmm(HmmFile {
                alphabet: m.alphabet.0.clone(),
                hidden_states: m.hidden_states.clone(),
                initial: m.initial.0.clone(),
                transition: m.transition.0.clone(),
                readout: m.readout.iter().map(|d| d.0.clone()).collect(),
            }),
            Model::MarkovMixture(m) => ModelFile::MarkovMixture(MarkovMixtureFile {
                alphabet: m.alphabet.0.clone(),
                y0: m.alphabet.label(m.y0).to_string(),
                weights: m.weights.0.clone(),
                components: m.components.iter().map(|p| p.0.clone()).collect(),
            }),
            Model::IidMixture(m) => ModelFile::IidMixture(IidMixtureFile {
                alphabet: m.alphabet.0.clone(),
                weights: m.weights.0.clone(),
                components: m.components.iter().map(|d| d.0.clone()).collect(),
            }),
            Model::Partitioned(m) => ModelFile::PartitionedKernelMixture(PartitionedFile {
                alphabet: m.alphabet.0.clone(),
                cells: m.cells.iter().map(|c| c.iter().map(|&s| m.alphabet.label(s).to_string()).collect()).collect(),
                y0: m.alphabet.label(m.y0).to_string(),
                weights: m.weights.0.clone(),
                kernels: m.kernels.iter().map(|t| t.iter().map(|d| d.0.clone()).collect()).collect(),
            }),
        }
    }
}

pub fn model_from_json(text: &str) -> Result<Model> {
    serde_json::from_str::<ModelFile>(text)?.into_model()
}

pub fn model_to_json(model: &Model) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model files always serialize")
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    model_from_json(&std::fs::read_to_string(path)?)
}
