//! Serialized artifacts. Every JSON document carries a `schema` tag naming
//! one of the files under `schemas/`.

use serde::{Deserialize, Serialize};

use qcanon_core::adapted::{Param, VerificationReport};
use qcanon_core::crystal::CrystalGraph;
use qcanon_core::scalar::{LaurentScalar, RationalScalar};

pub const BASIS_SCHEMA: &str = "qcanon/basis/v1";
pub const REPORT_SCHEMA: &str = "qcanon/verification-report/v1";
pub const GRAPH_SCHEMA: &str = "qcanon/crystal-graph/v1";
pub const STRING_SCHEMA: &str = "qcanon/string-datum/v1";
pub const CONE_SCHEMA: &str = "qcanon/cone/v1";
pub const CENTER_SCHEMA: &str = "qcanon/center/v1";
pub const ADAPTED_SCHEMA: &str = "qcanon/adapted/v1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PbwTerm {
    pub n: Param,
    pub coeff: LaurentScalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WordTerm {
    pub word: String,
    pub coeff: RationalScalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisElement {
    pub m: Param,
    /// Expansion in the PBW basis (canonical) or the dual PBW basis (dual).
    pub expansion_pbw: Vec<PbwTerm>,
    /// Coordinates on the pivot words spanning the weight space.
    pub expansion_words: Vec<WordTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Slice {
    pub word: String,
    pub weight: Vec<i64>,
    pub elements: Vec<BasisElement>,
}

#[derive(Debug, Serialize)]
pub struct BasisDoc<'a> {
    pub schema: &'static str,
    #[serde(rename = "type")]
    pub type_label: &'a str,
    pub word: &'a str,
    pub kind: &'a str,
    pub slices: &'a [Slice],
}

#[derive(Debug, Serialize)]
pub struct ReportDoc<'a> {
    pub schema: &'static str,
    pub suite: &'a str,
    pub passed: bool,
    pub reports: &'a [VerificationReport],
}

#[derive(Debug, Serialize)]
pub struct GraphDoc<'a> {
    pub schema: &'static str,
    #[serde(rename = "type")]
    pub type_label: &'a str,
    pub word: &'a str,
    #[serde(flatten)]
    pub graph: &'a CrystalGraph,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StringOut {
    pub param_word: String,
    pub param: Param,
    pub string_word: String,
    pub string: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeOut {
    pub param_word: String,
    pub gen_word: String,
    pub sigma: bool,
    pub generators: Vec<Param>,
    pub simplicial: bool,
    pub unimodular: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decomposition {
    pub param: Param,
    pub center_part: Param,
    pub rest: Param,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CenterOut {
    pub word: String,
    /// Parameter of `z` at each fundamental weight.
    pub generators: Vec<Param>,
    pub decomposition: Option<Decomposition>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdaptedOut {
    pub word: String,
    pub params: Vec<Param>,
    /// `q_commute[r][s] = k` with `X^r X^s = q^k X^s X^r`.
    pub q_commute: Vec<Vec<i64>>,
}

/// A JSON document: the artifact's fields behind a `schema` tag.
#[derive(Debug, Serialize)]
pub struct Tagged<'a, T> {
    pub schema: &'static str,
    #[serde(rename = "type")]
    pub type_label: &'a str,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn fmt_param(p: &[i64]) -> String {
    p.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}
