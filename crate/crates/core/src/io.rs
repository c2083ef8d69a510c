//! JSON encodings for matrices, channels, switch specifications, outputs and
//! ensembles.
//!
//! A complex matrix is a list of rows, each entry a `[re, im]` pair:
//!
//! ```json
//! [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]
//! ```
//!
//! A channel is `{ "d": 2, "kraus": [matrix, …] }`. A switch specification is
//! `{ "d": …, "channels": [channel, …], "perms": [[…], …], "control": matrix | "fourier" }`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{ComplexMatrix, DensityMatrix, Ensemble, KrausChannel};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::switch::{fourier_control, SwitchOutput, SwitchSpec};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::DimensionMismatch(format!(
            "row {i} has {} entries, expected {ncols}",
            r.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

pub fn density_from_json(rows: &MatrixJson) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix_from_json(rows)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub d: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            d: ch.dim(),
            kraus: ch.kraus().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let kraus = self
            .kraus
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        let ch = KrausChannel::new(kraus)?;
        if ch.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "channel declares d = {} but Kraus operators are {}x{}",
                self.d,
                ch.dim(),
                ch.dim()
            )));
        }
        Ok(ch)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ControlJson {
    Named(String),
    Matrix(MatrixJson),
}

impl ControlJson {
    pub fn resolve(&self, m: usize) -> Result<DensityMatrix> {
        match self {
            ControlJson::Named(name) if name == "fourier" => Ok(fourier_control(m)),
            ControlJson::Named(name) => Err(Error::InvalidSpec(format!(
                "unknown control state {name:?} (expected \"fourier\" or a matrix)"
            ))),
            ControlJson::Matrix(rows) => density_from_json(rows),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecJson {
    pub d: usize,
    pub channels: Vec<ChannelJson>,
    pub perms: Vec<Permutation>,
    pub control: ControlJson,
}

impl SpecJson {
    pub fn to_spec(&self) -> Result<SwitchSpec> {
        let channels = self
            .channels
            .iter()
            .map(ChannelJson::to_channel)
            .collect::<Result<Vec<_>>>()?;
        if let Some(ch) = channels.iter().find(|c| c.dim() != self.d) {
            return Err(Error::InvalidSpec(format!(
                "spec declares d = {} but a channel acts on {}",
                self.d,
                ch.dim()
            )));
        }
        let control = self.control.resolve(self.perms.len())?;
        SwitchSpec::new(channels, self.perms.clone(), control)
    }
}

/// Parses a switch specification; syntax errors report line and column.
pub fn parse_spec(text: &str) -> Result<SwitchSpec> {
    let raw: SpecJson = serde_json::from_str(text)?;
    raw.to_spec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputJson {
    pub d: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub perms: Vec<Permutation>,
    /// `blocks[p][q]` is attached to `|π_p⟩⟨π_q|`.
    pub blocks: Vec<Vec<MatrixJson>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_deviation: Option<f64>,
}

impl From<&SwitchOutput> for OutputJson {
    fn from(out: &SwitchOutput) -> Self {
        let m = out.m();
        Self {
            d: out.d(),
            m,
            perms: out.perms().to_vec(),
            blocks: (0..m)
                .map(|p| (0..m).map(|q| matrix_to_json(out.block(p, q))).collect())
                .collect(),
            max_deviation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntryJson {
    pub p: f64,
    pub rho: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub states: Vec<EnsembleEntryJson>,
}

pub fn parse_ensemble(text: &str) -> Result<Ensemble> {
    let raw: EnsembleJson = serde_json::from_str(text)?;
    let entries = raw
        .states
        .iter()
        .map(|e| Ok((e.p, density_from_json(&e.rho)?)))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::make_cdpc;

    #[test]
    fn channel_json_shape() {
        let json =
            serde_json::to_value(ChannelJson::from_channel(&crate::make_identity_channel(2)))
                .unwrap();
        assert_eq!(
            json,
            serde_json::json!({"d": 2, "kraus": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]})
        );
    }

    #[test]
    fn spec_round_trip_through_json() {
        let cdpc = ChannelJson::from_channel(&make_cdpc(2).unwrap());
        let raw = SpecJson {
            d: 2,
            channels: vec![cdpc.clone(), cdpc],
            perms: Permutation::cyclic_set(2),
            control: ControlJson::Named("fourier".into()),
        };
        let text = serde_json::to_string(&raw).unwrap();
        let spec = parse_spec(&text).unwrap();
        assert_eq!((spec.d(), spec.n(), spec.m()), (2, 2, 2));
        assert_eq!(spec.control(), &fourier_control(2));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_spec("{\n  \"d\": 2,\n  \"channels\": [,]\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn invalid_contents_are_rejected() {
        assert!(matrix_from_json(&vec![vec![[1.0, 0.0]], vec![]]).is_err());
        assert!(ControlJson::Named("plus".into()).resolve(2).is_err());
        let bad = ChannelJson {
            d: 2,
            kraus: vec![vec![
                vec![[0.5, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [0.5, 0.0]],
            ]],
        };
        assert!(bad.to_channel().is_err());
        let wrong_d = ChannelJson {
            d: 3,
            ..ChannelJson::from_channel(&crate::make_identity_channel(2))
        };
        assert!(wrong_d.to_channel().is_err());
    }

    #[test]
    fn ensemble_parsing() {
        let e = parse_ensemble(
            r#"{"states": [
                {"p": 0.5, "rho": [[[1,0],[0,0]],[[0,0],[0,0]]]},
                {"p": 0.5, "rho": [[[0,0],[0,0]],[[0,0],[1,0]]]}
            ]}"#,
        )
        .unwrap();
        assert_eq!(e.entries().len(), 2);
        assert!(parse_ensemble(r#"{"states": [{"p": 0.4, "rho": [[[1,0]]]}]}"#).is_err());
    }
}
