//! One algebra shared by the bases of several reduced words.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::canonical::CanonicalBasis;
use crate::cartan::{CartanData, ReducedWord};
use crate::error::Result;
use crate::freealg::Algebra;
use crate::pbw::PbwBasis;

pub struct Session {
    pub alg: Arc<Algebra>,
    bases: Mutex<HashMap<Vec<usize>, Arc<CanonicalBasis>>>,
}

impl Session {
    pub fn new(cartan: CartanData, height_cap: i64) -> Self {
        Session { alg: Arc::new(Algebra::with_cap(cartan, height_cap)), bases: Mutex::new(HashMap::new()) }
    }

    /// Parse a type label such as `"B2"`.
    pub fn parse(type_label: &str, height_cap: i64) -> Result<Self> {
        Ok(Self::new(CartanData::parse(type_label)?, height_cap))
    }

    pub fn cartan(&self) -> &CartanData {
        &self.alg.cartan
    }

    pub fn word(&self, s: &str) -> Result<ReducedWord> {
        ReducedWord::parse(&self.alg.cartan, s)
    }

    /// The canonical basis for a reduced word, built once per word.
    pub fn basis(&self, word: &ReducedWord) -> Result<Arc<CanonicalBasis>> {
        if let Some(b) = self.bases.lock().expect("session cache poisoned").get(&word.letters) {
            return Ok(b.clone());
        }
        let pbw = Arc::new(PbwBasis::new(self.alg.clone(), word.clone())?);
        let cb = Arc::new(CanonicalBasis::new(pbw));
        Ok(self.bases.lock().expect("session cache poisoned").entry(word.letters.clone()).or_insert(cb).clone())
    }

    pub fn basis_for(&self, s: &str) -> Result<Arc<CanonicalBasis>> {
        self.basis(&self.word(s)?)
    }
}
