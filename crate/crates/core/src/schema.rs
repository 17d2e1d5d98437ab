//! Stable JSON schemas for wave functions, fields, and reports.
//!
//! Amplitudes serialize as `[re, im]` pairs, row-major over
//! `[node][component]`; every document carries a `schema` version field.

use crate::error::{Error, Result};
use crate::fields::{FieldLayout, SpinorField};
use crate::irreps::SpinLabel;
use crate::orbits::MassShell;
use crate::scalar::C;
use crate::wigner_rep::{AngularScheme, MomentumGrid, WaveFunction};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngularSchema {
    Lebedev26,
    Product { n_theta: usize, n_phi: usize },
}

impl From<AngularScheme> for AngularSchema {
    fn from(a: AngularScheme) -> Self {
        match a {
            AngularScheme::Lebedev26 => AngularSchema::Lebedev26,
            AngularScheme::Product { n_theta, n_phi } => AngularSchema::Product { n_theta, n_phi },
        }
    }
}

impl From<AngularSchema> for AngularScheme {
    fn from(a: AngularSchema) -> Self {
        match a {
            AngularSchema::Lebedev26 => AngularScheme::Lebedev26,
            AngularSchema::Product { n_theta, n_phi } => AngularScheme::Product { n_theta, n_phi },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridSchema {
    /// "massive" or "massless"
    pub shell: String,
    pub mass: f64,
    pub p_max: f64,
    pub n_radial: usize,
    pub angular: AngularSchema,
}

impl GridSchema {
    pub fn of(grid: &MomentumGrid<f64>) -> Self {
        let (shell, mass) = match grid.shell {
            MassShell::Massive { mass } => ("massive".to_string(), mass),
            MassShell::Massless => ("massless".to_string(), 0.0),
        };
        GridSchema {
            shell,
            mass,
            p_max: grid.p_max,
            n_radial: grid.n_radial,
            angular: grid.angular.into(),
        }
    }

    pub fn build(&self) -> Result<Arc<MomentumGrid<f64>>> {
        let shell = match self.shell.as_str() {
            "massive" => MassShell::Massive { mass: self.mass },
            "massless" => MassShell::Massless,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown shell kind '{other}'"
                )))
            }
        };
        MomentumGrid::build(shell, self.p_max, self.n_radial, self.angular.clone().into())
    }
}

fn pack(amps: &[C<f64>]) -> Vec<[f64; 2]> {
    amps.iter().map(|z| [z.re, z.im]).collect()
}

fn unpack(amps: &[[f64; 2]]) -> Vec<C<f64>> {
    amps.iter().map(|p| Complex::new(p[0], p[1])).collect()
}

/// Wave function document: mass, twice-spin, grid spec, amplitudes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaveFunctionSchema {
    pub schema: u32,
    pub twice_spin: u32,
    pub grid: GridSchema,
    pub amplitudes: Vec<[f64; 2]>,
}

impl WaveFunctionSchema {
    pub fn of(wf: &WaveFunction<f64>) -> Self {
        WaveFunctionSchema {
            schema: SCHEMA_VERSION,
            twice_spin: wf.spin.twice(),
            grid: GridSchema::of(&wf.grid),
            amplitudes: pack(&wf.amps),
        }
    }

    pub fn build(&self) -> Result<WaveFunction<f64>> {
        let grid = self.grid.build()?;
        let spin = SpinLabel::from_twice(self.twice_spin)?;
        let expected = grid.len() * spin.dim();
        if self.amplitudes.len() != expected {
            return Err(Error::InvalidConfig(format!(
                "amplitude count {} does not match grid x spin size {expected}",
                self.amplitudes.len()
            )));
        }
        Ok(WaveFunction {
            grid,
            spin,
            amps: unpack(&self.amplitudes),
        })
    }
}

/// Spinor field document: the wave-function schema extended with a component
/// layout tag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSchema {
    pub schema: u32,
    pub twice_spin: u32,
    /// One of "phi", "chi", "bispinor", "bw", "pf", "rs".
    pub layout: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pf_dotted: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pf_undotted: Option<u32>,
    pub components_per_node: usize,
    pub grid: GridSchema,
    pub amplitudes: Vec<[f64; 2]>,
}

impl FieldSchema {
    pub fn of(field: &SpinorField<f64>) -> Self {
        let (pf_dotted, pf_undotted) = match field.layout {
            FieldLayout::PauliFierz { dotted, undotted } => (Some(dotted), Some(undotted)),
            _ => (None, None),
        };
        FieldSchema {
            schema: SCHEMA_VERSION,
            twice_spin: field.spin.twice(),
            layout: field.layout.tag().to_string(),
            pf_dotted,
            pf_undotted,
            components_per_node: field.comps,
            grid: GridSchema::of(&field.grid),
            amplitudes: pack(&field.values),
        }
    }
}

/// A complex matrix as row-major `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixSchema {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixSchema {
    pub fn of(m: &crate::linalg::CMat<f64>) -> Self {
        MatrixSchema {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}
