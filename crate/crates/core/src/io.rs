//! JSON file formats.
//!
//! Complex: `{ "name", "dim", "cells": [count per dim], "incidence": { "k": [[[face, coeff], ...] per k-cell] } }`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, CellComplex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub name: String,
    pub dim: usize,
    pub cells: Vec<usize>,
    #[serde(default)]
    pub incidence: BTreeMap<String, Vec<Vec<(usize, i64)>>>,
}

impl ComplexFile {
    pub fn from_complex(x: &CellComplex) -> Self {
        let incidence = (1..=x.dim())
            .map(|k| (k.to_string(), x.incidence(k).to_vec()))
            .collect();
        ComplexFile {
            name: x.name().to_string(),
            dim: x.dim(),
            cells: x.counts().to_vec(),
            incidence,
        }
    }

    pub fn to_complex(&self) -> Result<CellComplex> {
        if self.cells.len() != self.dim + 1 {
            return Err(Error::Format(format!(
                "dim is {} but {} cell counts were given",
                self.dim,
                self.cells.len()
            )));
        }
        let mut incidence = vec![Vec::new(); self.dim + 1];
        for (key, lists) in &self.incidence {
            let k: usize = key
                .parse()
                .map_err(|_| Error::Format(format!("bad incidence key {key:?}")))?;
            if k == 0 || k > self.dim {
                return Err(Error::Format(format!("incidence key {k} out of range")));
            }
            incidence[k] = lists.clone();
        }
        for (k, inc) in incidence.iter_mut().enumerate().skip(1) {
            if inc.is_empty() && self.cells[k] > 0 {
                return Err(Error::Format(format!("missing incidence for dimension {k}")));
            }
        }
        build_complex(self.name.clone(), self.cells.clone(), incidence)
    }
}

pub fn parse_complex(json: &str) -> Result<CellComplex> {
    let file: ComplexFile = serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))?;
    file.to_complex()
}

pub fn complex_to_json(x: &CellComplex) -> String {
    serde_json::to_string(&ComplexFile::from_complex(x)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = crate::generators::torus2();
        let back = parse_complex(&complex_to_json(&t)).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.name(), "torus2");
    }

    #[test]
    fn rejects_bad_square() {
        let json = r#"{"name":"bad","dim":2,"cells":[2,1,1],"incidence":{"1":[[[0,1],[1,1]]],"2":[[[0,1]]]}}"#;
        assert_eq!(parse_complex(json).unwrap_err().kind(), "BoundaryNotSquareZero");
    }
}
