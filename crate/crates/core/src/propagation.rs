//! Log-distance path loss with log-normal shadowing, and the attenuation
//! tensor `a[l, z, c]` consumed by the game.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::rng::{self, Stream};
use crate::scenario::{PoaKind, Scenario};
use crate::{Error, Result};

/// Path-loss parameters for one kind of access point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindModel {
    pub exponent: f64,
    pub intercept_db: f64,
    pub shadowing_std_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationModel {
    #[serde(rename = "macro")]
    pub macro_model: KindModel,
    #[serde(rename = "micro")]
    pub micro_model: KindModel,
    /// dB per decade of frequency relative to `reference_frequency_hz`.
    pub frequency_coefficient_db: f64,
    pub reference_frequency_hz: f64,
    pub min_distance_m: f64,
    /// Extra i.i.d. dB fading applied to vehicular users per update period;
    /// 0 disables it.
    pub vehicular_fading_std_db: f64,
}

impl Default for PropagationModel {
    fn default() -> Self {
        Self {
            macro_model: KindModel {
                exponent: 3.5,
                intercept_db: 13.5,
                shadowing_std_db: 6.0,
            },
            micro_model: KindModel {
                exponent: 3.67,
                intercept_db: 30.5,
                shadowing_std_db: 4.0,
            },
            frequency_coefficient_db: 20.0,
            reference_frequency_hz: 1e9,
            min_distance_m: 10.0,
            vehicular_fading_std_db: 0.0,
        }
    }
}

impl PropagationModel {
    /// The same model with shadowing disabled.
    pub fn without_shadowing(&self) -> Self {
        let mut m = self.clone();
        m.macro_model.shadowing_std_db = 0.0;
        m.micro_model.shadowing_std_db = 0.0;
        m
    }

    pub fn kind(&self, kind: PoaKind) -> &KindModel {
        match kind {
            PoaKind::Macro => &self.macro_model,
            PoaKind::Micro => &self.micro_model,
        }
    }

    pub fn check(&self) -> Result<()> {
        for (name, k) in [("macro", &self.macro_model), ("micro", &self.micro_model)] {
            if !(k.exponent >= 2.0) {
                return Err(Error::InvalidConfig(format!(
                    "propagation.{name}.exponent must be >= 2"
                )));
            }
            if !(k.shadowing_std_db >= 0.0) || !k.intercept_db.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "propagation.{name}: shadowing_std_db must be >= 0 and intercept finite"
                )));
            }
        }
        if !(self.frequency_coefficient_db >= 0.0)
            || !(self.reference_frequency_hz > 0.0)
            || !(self.min_distance_m > 0.0)
            || !(self.vehicular_fading_std_db >= 0.0)
        {
            return Err(Error::InvalidConfig(
                "propagation: frequency coefficient >= 0, reference frequency > 0, min distance > 0, fading std >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Path loss in dB at distance `d` (already clamped) and frequency `f`.
    pub fn path_loss_db(&self, kind: PoaKind, distance_m: f64, frequency_hz: f64) -> f64 {
        let k = self.kind(kind);
        k.intercept_db
            + 10.0 * k.exponent * distance_m.log10()
            + self.frequency_coefficient_db * (frequency_hz / self.reference_frequency_hz).log10()
    }

    /// Linear power gain in `[0, 1]`. Distances below the minimum are clamped.
    pub fn path_gain(
        &self,
        kind: PoaKind,
        distance_m: f64,
        frequency_hz: f64,
        shadow_db: f64,
    ) -> Result<f64> {
        if !(distance_m > 0.0) {
            return Err(Error::InvalidDistance(distance_m));
        }
        if !(frequency_hz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "frequency must be > 0, got {frequency_hz}"
            )));
        }
        let d = distance_m.max(self.min_distance_m);
        let pl = self.path_loss_db(kind, d, frequency_hz);
        Ok(db_to_linear(shadow_db - pl).min(1.0))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Dense `(location, tile, carrier)` array of linear gains.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuationTensor {
    locations: usize,
    tiles: usize,
    carriers: usize,
    data: Vec<f64>,
}

impl AttenuationTensor {
    pub fn from_vec(locations: usize, tiles: usize, carriers: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != locations * tiles * carriers {
            return Err(Error::InvalidInput(format!(
                "tensor data has {} entries, expected {}x{}x{}",
                data.len(),
                locations,
                tiles,
                carriers
            )));
        }
        if let Some(bad) = data.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::InvalidInput(format!(
                "attenuation entry {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            locations,
            tiles,
            carriers,
            data,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.locations, self.tiles, self.carriers)
    }

    #[inline]
    fn offset(&self, l: usize, z: usize, c: usize) -> usize {
        (l * self.tiles + z) * self.carriers + c
    }

    #[inline]
    pub fn get(&self, location: usize, tile: usize, carrier: usize) -> f64 {
        self.data[self.offset(location, tile, carrier)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matches(&self, scenario: &Scenario) -> bool {
        self.dims()
            == (
                scenario.locations().len(),
                scenario.tiles().len(),
                scenario.carriers().len(),
            )
    }

    /// CSV with columns `location_id,tile_id,carrier_id,gain`, row-major.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["location_id", "tile_id", "carrier_id", "gain"])?;
        for l in 0..self.locations {
            for z in 0..self.tiles {
                for c in 0..self.carriers {
                    w.write_record(&[
                        l.to_string(),
                        z.to_string(),
                        c.to_string(),
                        format!("{:.16e}", self.get(l, z, c)),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, dims: (usize, usize, usize)) -> Result<Self> {
        let (nl, nz, nc) = dims;
        let mut data = vec![f64::NAN; nl * nz * nc];
        let mut rdr = csv::Reader::from_reader(reader);
        let parse_err = |message: String| Error::Parse {
            file: "attenuation.csv".into(),
            message,
        };
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 4 {
                return Err(parse_err(format!("row {row}: expected 4 columns")));
            }
            let idx = |i: usize| -> Result<usize> {
                record[i]
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("row {row}: {e}")))
            };
            let (l, z, c) = (idx(0)?, idx(1)?, idx(2)?);
            if l >= nl || z >= nz || c >= nc {
                return Err(parse_err(format!("row {row}: index out of range")));
            }
            let gain: f64 = record[3]
                .parse()
                .map_err(|e| parse_err(format!("row {row}: {e}")))?;
            data[(l * nz + z) * nc + c] = gain;
        }
        if data.iter().any(|g| g.is_nan()) {
            return Err(parse_err("missing entries".into()));
        }
        Self::from_vec(nl, nz, nc, data)
    }
}

/// Gains from every location to every tile centre on every carrier.
///
/// One shadowing draw per `(location, tile)` pair is shared by all carriers.
pub fn build_attenuation_tensor(
    scenario: &Scenario,
    model: &PropagationModel,
    seed: u64,
) -> Result<AttenuationTensor> {
    model.check()?;
    let nl = scenario.locations().len();
    let nz = scenario.tiles().len();
    let nc = scenario.carriers().len();
    let mut rng = rng::stream(seed, Stream::Shadowing);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut data = Vec::with_capacity(nl * nz * nc);
    for loc in scenario.locations() {
        let sigma = model.kind(loc.kind).shadowing_std_db;
        for tile in scenario.tiles() {
            let shadow = sigma * std_normal.sample(&mut rng);
            let d = loc.position.distance(&tile.center()).max(f64::MIN_POSITIVE);
            for carrier in scenario.carriers() {
                data.push(model.path_gain(loc.kind, d, carrier.center_frequency_hz, shadow)?);
            }
        }
    }
    AttenuationTensor::from_vec(nl, nz, nc, data)
}

/// UE-weighted mean gain of `location` on `carrier` over `served_tiles`.
///
/// Falls back to the unweighted mean when the tiles hold no users.
pub fn average_attenuation(
    scenario: &Scenario,
    tensor: &AttenuationTensor,
    location: usize,
    carrier: usize,
    served_tiles: &[usize],
) -> Result<f64> {
    if served_tiles.is_empty() {
        return Err(Error::EmptyTileSet(location));
    }
    let total: u64 = served_tiles
        .iter()
        .map(|&z| scenario.tile(z).ue_count() as u64)
        .sum();
    if total == 0 {
        let sum: f64 = served_tiles
            .iter()
            .map(|&z| tensor.get(location, z, carrier))
            .sum();
        return Ok(sum / served_tiles.len() as f64);
    }
    Ok(served_tiles
        .iter()
        .map(|&z| scenario.tile(z).ue_count() as f64 / total as f64 * tensor.get(location, z, carrier))
        .sum())
}
