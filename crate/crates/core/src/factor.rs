//! Method selection and export metadata shared by the CLI and schedules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dshb::dshb_factorize;
use crate::matrix::SparseMatrix;
use crate::partition::Partition;
use crate::rhb::rhb_factorize;
use crate::sds::sds_factorize;

/// Single-matrix `A` factors with `J_0 A J_0 = J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Rhb,
    Dshb,
    SdsLeft,
    SdsRight,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Rhb, Method::Dshb, Method::SdsLeft, Method::SdsRight];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rhb => "rhb",
            Method::Dshb => "dshb",
            Method::SdsLeft => "sds-left",
            Method::SdsRight => "sds-right",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "rhb" => Ok(Method::Rhb),
            "dshb" => Ok(Method::Dshb),
            "sds-left" => Ok(Method::SdsLeft),
            "sds-right" => Ok(Method::SdsRight),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

pub fn factor_matrix(partition: &Partition, method: Method) -> SparseMatrix {
    match method {
        Method::Rhb => rhb_factorize(partition).a,
        Method::Dshb => dshb_factorize(partition).a,
        Method::SdsLeft => sds_factorize(partition).a_left,
        Method::SdsRight => sds_factorize(partition).a_right,
    }
}

/// Sidecar written next to exported factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorMetadata {
    pub method: String,
    pub partition: String,
    pub n: usize,
    pub tau: usize,
    pub nnz: usize,
    pub d_max: usize,
    /// Named exact values, e.g. RHB alphas, as `num/den` strings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<NamedValues>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Files written alongside, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValues {
    pub name: String,
    pub values: Vec<String>,
}

impl FactorMetadata {
    pub fn for_matrix(method: &str, partition: &Partition, a: &SparseMatrix) -> Self {
        FactorMetadata {
            method: method.to_string(),
            partition: partition.to_string(),
            n: partition.n(),
            tau: partition.tau(),
            nnz: a.nnz(),
            d_max: a.d_max(),
            parameters: Vec::new(),
            notes: Vec::new(),
            files: Vec::new(),
        }
    }

    /// Metadata for `method`, with the method specific tables filled in.
    pub fn describe(partition: &Partition, method: Method) -> (SparseMatrix, Self) {
        let fmt_all = |vs: &[crate::matrix::Rational]| vs.iter().map(|v| v.to_string()).collect();
        match method {
            Method::Rhb => {
                let f = rhb_factorize(partition);
                let mut meta = Self::for_matrix("rhb", partition, &f.a);
                meta.parameters.push(NamedValues {
                    name: "alpha".into(),
                    values: fmt_all(&f.alphas),
                });
                for (k, betas) in f.betas.iter().enumerate().filter(|(_, b)| !b.is_empty()) {
                    meta.parameters.push(NamedValues {
                        name: format!("beta_{}", k + 1),
                        values: fmt_all(betas),
                    });
                }
                (f.a, meta)
            }
            Method::Dshb => {
                let f = dshb_factorize(partition);
                let mut meta = Self::for_matrix("dshb", partition, &f.a);
                meta.parameters.push(NamedValues {
                    name: "scaling_factors".into(),
                    values: fmt_all(&f.scaling_factors()),
                });
                meta.notes.push(format!(
                    "erratum: the quoted nnz formula sum k*n_k = {} undercounts; the factor has sum (2k-1)*n_k = {}",
                    f.quoted_nnz_formula(),
                    f.counted_nnz_formula()
                ));
                (f.a, meta)
            }
            Method::SdsLeft | Method::SdsRight => {
                let f = sds_factorize(partition);
                let a = if method == Method::SdsLeft {
                    f.a_left
                } else {
                    f.a_right
                };
                let mut meta = Self::for_matrix(method.name(), partition, &a);
                meta.parameters.push(NamedValues {
                    name: "t_factor_nnz".into(),
                    values: f.t_factors.iter().map(|t| t.nnz().to_string()).collect(),
                });
                (a, meta)
            }
        }
    }
}
