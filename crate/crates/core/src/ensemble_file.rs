//! JSON ensemble-spec ingestion and serialization.
//!
//! The document format is shared by the CLI and the test fixtures:
//!
//! ```json
//! {
//!   "name": "chain-7",
//!   "codes": { "hamming7": ["1001110", "0101101", "0011011"] },
//!   "row_codes": ["hamming7", "hamming7"],
//!   "edge_column_maps": [[1,2,3,4,5,6,7], [1,2,3,4,5,6,7]],
//!   "punctured": [false, false, false, false, false, false, false],
//!   "base": [[1,1,1,1,1,1,1], [1,1,1,1,1,1,1]],
//!   "coupling": {
//!     "components": [[[0,0,0,0,1,1,1],[1,1,1,0,0,0,0]],
//!                    [[1,1,1,1,0,0,0],[0,0,0,1,1,1,1]]],
//!     "mode": { "terminated": { "L": 50 } }
//!   }
//! }
//! ```
//!
//! Column maps are 1-based in the file (matching how parity-matrix
//! columns are usually labeled) and in the component-major slot order
//! described in [`crate::protograph`]. `base` is required for
//! uncoupled documents and optional next to `coupling`, where it must
//! equal the component sum. Parity rows are strings over '0'/'1';
//! malformed rows fail with the line/column anchored JSON error.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::gf2::ConstraintCode;
use crate::protograph::{
    edge_spread, CouplingSpec, EnsembleDef, GldpcProtograph, IntMatrix, TerminationMode,
};
use crate::{Error, Result};

/// One parity row as a '0'/'1' string; validated during parsing so
/// format errors carry the document position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow(pub String);

impl Serialize for BitRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BitRow {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = BitRow;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a string of '0' and '1' characters")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<BitRow, E> {
                if s.is_empty() {
                    return Err(E::custom("empty parity row"));
                }
                if let Some(bad) = s.chars().find(|&c| c != '0' && c != '1') {
                    return Err(E::custom(format!(
                        "invalid character {bad:?} in parity row"
                    )));
                }
                Ok(BitRow(s.to_string()))
            }
        }
        deserializer.deserialize_str(V)
    }
}

/// Termination mode in file form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFile {
    Unterminated {
        #[serde(rename = "T")]
        period: usize,
    },
    Terminated {
        #[serde(rename = "L")]
        coupling_len: usize,
    },
    TailBiting {
        #[serde(rename = "lambda")]
        coupling_len: usize,
    },
}

impl From<TerminationMode> for ModeFile {
    fn from(m: TerminationMode) -> Self {
        match m {
            TerminationMode::Unterminated { period } => ModeFile::Unterminated { period },
            TerminationMode::Terminated { coupling_len } => {
                ModeFile::Terminated { coupling_len }
            }
            TerminationMode::TailBiting { coupling_len } => {
                ModeFile::TailBiting { coupling_len }
            }
        }
    }
}

impl From<ModeFile> for TerminationMode {
    fn from(m: ModeFile) -> Self {
        match m {
            ModeFile::Unterminated { period } => TerminationMode::Unterminated { period },
            ModeFile::Terminated { coupling_len } => {
                TerminationMode::Terminated { coupling_len }
            }
            ModeFile::TailBiting { coupling_len } => {
                TerminationMode::TailBiting { coupling_len }
            }
        }
    }
}

/// Coupling block of the document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingFile {
    /// Component base matrices `B_0..B_w`, row-major.
    pub components: Vec<Vec<Vec<u32>>>,
    pub mode: ModeFile,
}

/// The ensemble-spec document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpecFile {
    pub name: String,
    /// Named constraint codes: parity rows as bit strings.
    pub codes: BTreeMap<String, Vec<BitRow>>,
    /// Constraint code per base-matrix row.
    pub row_codes: Vec<String>,
    /// 1-based column per edge slot, per base-matrix row, in
    /// component-major slot order.
    pub edge_column_maps: Vec<Vec<usize>>,
    /// Puncturing flag per variable column.
    pub punctured: Vec<bool>,
    /// Uncoupled base matrix; required when `coupling` is absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingFile>,
}

/// A parsed document: either a coupled ensemble or a plain protograph.
#[derive(Debug, Clone)]
pub enum ParsedEnsemble {
    Coupled(EnsembleDef),
    Uncoupled(GldpcProtograph),
}

impl ParsedEnsemble {
    /// The concrete protograph this document denotes (terminating or
    /// tail-biting coupled ensembles per their mode).
    pub fn protograph(&self) -> Result<GldpcProtograph> {
        match self {
            ParsedEnsemble::Coupled(def) => def.protograph(),
            ParsedEnsemble::Uncoupled(p) => Ok(p.clone()),
        }
    }

    pub fn coupled(&self) -> Option<&EnsembleDef> {
        match self {
            ParsedEnsemble::Coupled(def) => Some(def),
            ParsedEnsemble::Uncoupled(_) => None,
        }
    }
}

impl EnsembleSpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Builds the document for a coupled ensemble definition.
    pub fn from_ensemble(name: &str, def: &EnsembleDef) -> Self {
        let mut codes = BTreeMap::new();
        let mut row_codes = Vec::new();
        for (i, code) in def.codes.iter().enumerate() {
            let key = format!("code{i}");
            codes.insert(
                key.clone(),
                code.bit_strings().into_iter().map(BitRow).collect(),
            );
            row_codes.push(key);
        }
        EnsembleSpecFile {
            name: name.to_string(),
            codes,
            row_codes,
            edge_column_maps: def
                .column_maps
                .iter()
                .map(|m| m.iter().map(|&c| c + 1).collect())
                .collect(),
            punctured: def.punctured.clone(),
            base: Some(def.coupling.summed_base().row_vecs()),
            coupling: Some(CouplingFile {
                components: def
                    .coupling
                    .components()
                    .iter()
                    .map(IntMatrix::row_vecs)
                    .collect(),
                mode: def.coupling.mode().into(),
            }),
        }
    }

    /// Validates the document into ensemble structures.
    pub fn parse(&self) -> Result<ParsedEnsemble> {
        let mut codes: Vec<Arc<ConstraintCode>> = Vec::with_capacity(self.row_codes.len());
        for name in &self.row_codes {
            let rows = self
                .codes
                .get(name)
                .ok_or_else(|| Error::SpecFile(format!("unknown code name `{name}`")))?;
            let strings: Vec<&str> = rows.iter().map(|r| r.0.as_str()).collect();
            codes.push(Arc::new(ConstraintCode::from_bit_strings(&strings)?));
        }
        let maps: Vec<Vec<usize>> = self
            .edge_column_maps
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.iter()
                    .map(|&c| {
                        c.checked_sub(1).ok_or_else(|| {
                            Error::SpecFile(format!("row {i}: column indices are 1-based"))
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        match &self.coupling {
            Some(c) => {
                let components: Vec<IntMatrix> = c
                    .components
                    .iter()
                    .map(|rows| IntMatrix::from_rows(rows))
                    .collect::<Result<_>>()?;
                let spec = match &self.base {
                    Some(base_rows) => {
                        let base = IntMatrix::from_rows(base_rows)?;
                        edge_spread(&base, components, c.mode.into())?
                    }
                    None => CouplingSpec::new(components, c.mode.into())?,
                };
                let def = EnsembleDef::new(spec, codes, maps, self.punctured.clone())?;
                Ok(ParsedEnsemble::Coupled(def))
            }
            None => {
                let base_rows = self.base.as_ref().ok_or_else(|| {
                    Error::SpecFile("either `base` or `coupling` is required".into())
                })?;
                let base = IntMatrix::from_rows(base_rows)?;
                let proto = GldpcProtograph::from_base(
                    &base,
                    &codes,
                    &maps,
                    self.punctured.clone(),
                )?;
                Ok(ParsedEnsemble::Uncoupled(proto))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protograph::Builtin;

    #[test]
    fn builtin_round_trips_through_json() {
        for builtin in Builtin::ALL {
            let def = builtin.ensemble();
            let file = EnsembleSpecFile::from_ensemble(builtin.name(), &def);
            let text = file.to_json().unwrap();
            let back = EnsembleSpecFile::from_json(&text).unwrap();
            let reparsed = back.parse().unwrap();
            let def2 = reparsed.coupled().expect("builtins are coupled");
            assert_eq!(def2.coupling, def.coupling, "{}", builtin.name());
            assert_eq!(def2.column_maps, def.column_maps);
            assert_eq!(def2.punctured, def.punctured);
            for (a, b) in def2.codes.iter().zip(&def.codes) {
                assert_eq!(a, b);
            }
            // Serialize -> parse -> serialize is the identity.
            let text2 = EnsembleSpecFile::from_ensemble(builtin.name(), def2)
                .to_json()
                .unwrap();
            assert_eq!(text, text2);
        }
    }

    #[test]
    fn malformed_parity_rows_are_position_anchored() {
        let doc = r#"{
  "name": "bad",
  "codes": { "c": ["10x1"] },
  "row_codes": ["c"],
  "edge_column_maps": [[1,2,3,4]],
  "punctured": [false, false, false, false],
  "base": [[1,1,1,1]]
}"#;
        let err = EnsembleSpecFile::from_json(doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("invalid character"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn unknown_code_reference_fails() {
        let doc = r#"{
  "name": "bad",
  "codes": { "c": ["1111"] },
  "row_codes": ["missing"],
  "edge_column_maps": [[1,2,3,4]],
  "punctured": [false, false, false, false],
  "base": [[1,1,1,1]]
}"#;
        let file = EnsembleSpecFile::from_json(doc).unwrap();
        assert!(matches!(file.parse(), Err(Error::SpecFile(_))));
    }

    #[test]
    fn component_sum_mismatch_is_rejected() {
        let def = Builtin::A7.ensemble();
        let mut file = EnsembleSpecFile::from_ensemble("A7", &def);
        file.base.as_mut().unwrap()[0][0] = 2;
        assert!(matches!(file.parse(), Err(Error::EdgeSpreadMismatch)));
    }

    #[test]
    fn uncoupled_documents_parse_to_plain_protographs() {
        let doc = r#"{
  "name": "block",
  "codes": { "h7": ["1001110", "0101101", "0011011"] },
  "row_codes": ["h7", "h7"],
  "edge_column_maps": [[1,2,3,4,5,6,7],[1,2,3,4,5,6,7]],
  "punctured": [false,false,false,false,false,false,false],
  "base": [[1,1,1,1,1,1,1],[1,1,1,1,1,1,1]]
}"#;
        let file = EnsembleSpecFile::from_json(doc).unwrap();
        let parsed = file.parse().unwrap();
        let proto = parsed.protograph().unwrap();
        assert_eq!(proto.n_vars(), 7);
        assert_eq!(proto.n_constraints(), 2);
        assert_eq!(proto.design_rate().unwrap(), crate::Rate::new(1, 7));
    }
}
