//! JSON descriptors for functions and pairs.

use super::{Fun, GaussPolyFun, MonomialGaussFun, ProfileFun, RadialGrid};
use crate::error::{Error, Result};
use crate::scalars::Dimension;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Serde adapter storing a complex number as `[re, im]`.
pub mod c64_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }

    pub mod vec {
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
            pairs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            let pairs = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(pairs.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
        }
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Wire form of a [`Fun`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunDescriptor {
    Gausspoly {
        d: Dimension,
        #[serde(with = "c64_pair")]
        width: Complex64,
        #[serde(with = "c64_pair::vec")]
        coeffs: Vec<Complex64>,
    },
    Monomial {
        d: Dimension,
        alpha: Vec<u32>,
        #[serde(with = "c64_pair", default = "one")]
        c: Complex64,
        #[serde(with = "c64_pair")]
        width: Complex64,
    },
    Profile {
        d: Dimension,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        #[serde(with = "c64_pair::vec")]
        samples: Vec<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<f64>,
    },
}

impl From<&Fun> for FunDescriptor {
    fn from(f: &Fun) -> Self {
        match f {
            Fun::GaussPoly(g) => FunDescriptor::Gausspoly {
                d: g.d,
                width: g.width,
                coeffs: g.coeffs.clone(),
            },
            Fun::Monomial(m) => FunDescriptor::Monomial {
                d: m.d,
                alpha: m.alpha.clone(),
                c: m.coeff,
                width: m.width,
            },
            Fun::Profile(p) => FunDescriptor::Profile {
                d: p.d,
                nodes: p.grid.nodes.clone(),
                weights: p.grid.weights.clone(),
                samples: p.samples.clone(),
                support: Some(p.grid.support),
            },
        }
    }
}

impl TryFrom<FunDescriptor> for Fun {
    type Error = Error;
    fn try_from(desc: FunDescriptor) -> Result<Fun> {
        Ok(match desc {
            FunDescriptor::Gausspoly { d, width, coeffs } => {
                Fun::GaussPoly(GaussPolyFun::new(d, width, coeffs)?)
            }
            FunDescriptor::Monomial { d, alpha, c, width } => {
                Fun::Monomial(MonomialGaussFun::new(d, alpha, c, width)?)
            }
            FunDescriptor::Profile {
                d,
                nodes,
                weights,
                samples,
                support,
            } => {
                let grid = RadialGrid::from_parts(nodes, weights, support)?;
                Fun::Profile(ProfileFun::new(d, Arc::new(grid), samples)?)
            }
        })
    }
}

impl Fun {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FunDescriptor::from(self)).expect("descriptor serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Fun> {
        let desc: FunDescriptor = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("function descriptor: {e}")))?;
        Fun::try_from(desc)
    }
}

/// An ordered pair `(f, g)` on a shared dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDescriptor {
    pub f: FunDescriptor,
    pub g: FunDescriptor,
}

impl PairDescriptor {
    pub fn new(f: &Fun, g: &Fun) -> Self {
        PairDescriptor {
            f: f.into(),
            g: g.into(),
        }
    }

    pub fn into_pair(self) -> Result<(Fun, Fun)> {
        let f = Fun::try_from(self.f)?;
        let g = Fun::try_from(self.g)?;
        if f.dim() != g.dim() {
            return Err(Error::Usage(format!(
                "pair dimensions differ: {} vs {}",
                f.dim(),
                g.dim()
            )));
        }
        Ok((f, g))
    }
}
