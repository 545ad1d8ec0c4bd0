//! On-disk formats: fringe grids (CSV, JSON), density matrices (JSON, CSV
//! parts) and witness certificates (JSON).
//!
//! Numbers are written in Rust's shortest round-trip form, so a file parsed
//! back yields bit-identical values.

use std::fmt::Write as _;

use angular_qudit_core::state::BasisLabel;
use angular_qudit_core::{
    Basis, CMatrix, Complex64, DensityMatrix, FringeGrid, MeasurementOperator, SolverStatus,
    WitnessCertificate,
};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

pub const GENERATOR: &str = concat!("angular-qudit ", env!("CARGO_PKG_VERSION"));

/// Ordered `key=value` pairs carried in file headers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl Serialize for Metadata {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Metadata {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> serde::de::Visitor<'de> for V {
            type Value = Metadata;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a map of strings")
            }
            fn visit_map<A: serde::de::MapAccess<'de>>(self, mut map: A) -> Result<Metadata, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, String>()? {
                    out.push((k, v));
                }
                Ok(Metadata(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// Maps `-0.0` to `0.0` so files never show a signed zero.
fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

fn parse_error(what: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("{what}: {detail}"))
}

// ---- fringe grids ----

/// One `(l_s, l_i, rate)` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub l_s: i64,
    pub l_i: i64,
    pub rate: f64,
}

/// A fringe grid as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeTable {
    pub generator: String,
    pub parameters: Metadata,
    pub samples: Vec<Sample>,
}

impl FringeTable {
    pub fn new(parameters: Metadata, grid: &FringeGrid) -> Self {
        let mut samples = Vec::with_capacity(grid.rates.len());
        for (r, &l_i) in grid.l_i.iter().enumerate() {
            for (&l_s, &rate) in grid.l_s.iter().zip(grid.row(r)) {
                samples.push(Sample { l_s, l_i, rate });
            }
        }
        FringeTable {
            generator: GENERATOR.to_string(),
            parameters,
            samples,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# generator={}", self.generator).unwrap();
        for (k, v) in &self.parameters.0 {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out.push_str("l_s,l_i,rate\n");
        for s in &self.samples {
            writeln!(out, "{},{},{:?}", s.l_s, s.l_i, s.rate).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut generator = None;
        let mut parameters = Metadata::default();
        let mut samples = Vec::new();
        let mut header_seen = false;
        for (no, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta
                    .split_once('=')
                    .ok_or_else(|| parse_error("fringe CSV", format!("line {}: bad metadata", no + 1)))?;
                if k == "generator" {
                    generator = Some(v.to_string());
                } else {
                    parameters.push(k, v);
                }
                continue;
            }
            if !header_seen {
                if line != "l_s,l_i,rate" {
                    return Err(parse_error(
                        "fringe CSV",
                        format!("line {}: expected header l_s,l_i,rate", no + 1),
                    ));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let bad = || parse_error("fringe CSV", format!("line {}: expected l_s,l_i,rate", no + 1));
            if fields.len() != 3 {
                return Err(bad());
            }
            samples.push(Sample {
                l_s: fields[0].parse().map_err(|_| bad())?,
                l_i: fields[1].parse().map_err(|_| bad())?,
                rate: fields[2].parse().map_err(|_| bad())?,
            });
        }
        if !header_seen {
            return Err(parse_error("fringe CSV", "missing header row"));
        }
        Ok(FringeTable {
            generator: generator.ok_or_else(|| parse_error("fringe CSV", "missing generator line"))?,
            parameters,
            samples,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fringe table serializes") + "\n"
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| parse_error("fringe JSON", e))
    }
}

// ---- matrices ----

/// Row-major complex matrix as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn new(m: &CMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .as_slice()
                .iter()
                .map(|z| [unsigned_zero(z.re), unsigned_zero(z.im)])
                .collect(),
        }
    }

    pub fn to_matrix(&self, what: &str) -> CliResult<CMatrix> {
        let data = self
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        CMatrix::from_row_major(self.rows, self.cols, data)
            .ok_or_else(|| parse_error(what, format!("expected {} entries", self.rows * self.cols)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisJson {
    PathwayDiagonal { slits: usize },
    Pathway { signal: usize, idler: usize },
    Oam { l_max: i64 },
    Product { signal: usize, idler: usize },
}

impl From<Basis> for BasisJson {
    fn from(b: Basis) -> Self {
        match b {
            Basis::PathwayDiagonal { slits } => BasisJson::PathwayDiagonal { slits },
            Basis::Pathway { signal, idler } => BasisJson::Pathway { signal, idler },
            Basis::Oam { l_max } => BasisJson::Oam { l_max },
            Basis::Product { signal, idler } => BasisJson::Product { signal, idler },
        }
    }
}

impl From<BasisJson> for Basis {
    fn from(b: BasisJson) -> Self {
        match b {
            BasisJson::PathwayDiagonal { slits } => Basis::PathwayDiagonal { slits },
            BasisJson::Pathway { signal, idler } => Basis::Pathway { signal, idler },
            BasisJson::Oam { l_max } => Basis::Oam { l_max },
            BasisJson::Product { signal, idler } => Basis::Product { signal, idler },
        }
    }
}

/// A density matrix with its basis, also split into real and imaginary
/// parts for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub generator: String,
    pub parameters: Metadata,
    pub dim: usize,
    /// `[d_s, d_i]`; absent for the reduced pathway basis.
    pub bipartition: Option<[usize; 2]>,
    pub basis: BasisJson,
    pub basis_labels: Vec<[i64; 2]>,
    pub entries: Vec<[f64; 2]>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl DensityJson {
    pub fn new(parameters: Metadata, state: &DensityMatrix) -> Self {
        let m = state.matrix();
        let d = state.dim();
        let labels = state
            .basis_labels()
            .into_iter()
            .map(|l| match l {
                BasisLabel::Pathway(n, m) => [n as i64, m as i64],
                BasisLabel::Oam(ls, li) => [ls, li],
                BasisLabel::Index(a, b) => [a as i64, b as i64],
            })
            .collect();
        DensityJson {
            generator: GENERATOR.to_string(),
            parameters,
            dim: d,
            bipartition: state.bipartition().map(|(a, b)| [a, b]),
            basis: state.basis().into(),
            basis_labels: labels,
            entries: m
                .as_slice()
                .iter()
                .map(|z| [unsigned_zero(z.re), unsigned_zero(z.im)])
                .collect(),
            real: (0..d)
                .map(|r| m.row(r).iter().map(|z| unsigned_zero(z.re)).collect())
                .collect(),
            imag: (0..d)
                .map(|r| m.row(r).iter().map(|z| unsigned_zero(z.im)).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("density serializes") + "\n"
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| parse_error("density JSON", e))
    }

    /// Rebuilds and re-validates the state from `entries`.
    pub fn to_state(&self) -> CliResult<DensityMatrix> {
        let m = MatrixJson {
            rows: self.dim,
            cols: self.dim,
            entries: self.entries.clone(),
        }
        .to_matrix("density JSON")?;
        Ok(DensityMatrix::new(m, self.basis.into())?)
    }

    /// Real or imaginary part as a headerless CSV matrix.
    pub fn part_csv(&self, imaginary: bool) -> String {
        let rows = if imaginary { &self.imag } else { &self.real };
        let mut out = String::new();
        for row in rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

// ---- certificates ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub label: String,
    /// Measured expectation value.
    pub value: f64,
    /// Signal and idler factors for product operators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<[MatrixJson; 2]>,
    /// Full operator when it is not a stored product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
}

/// Everything needed to re-check a witness bound without the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub generator: String,
    pub dims: [usize; 2],
    pub status: String,
    pub iterations: usize,
    /// `null` when no interior-point iterate was produced.
    pub duality_gap: Option<f64>,
    pub objective: f64,
    pub bound: f64,
    pub trace_multiplier: f64,
    pub nu: Vec<f64>,
    pub h: MatrixJson,
    pub measurements: Vec<MeasurementJson>,
}

impl CertificateJson {
    pub fn new(cert: &WitnessCertificate, ops: &[MeasurementOperator], data: &[f64]) -> Self {
        let measurements = ops
            .iter()
            .zip(data)
            .map(|(op, &value)| MeasurementJson {
                label: op.label.clone(),
                value,
                local: op
                    .local_factors
                    .as_ref()
                    .map(|(a, b)| [MatrixJson::new(a), MatrixJson::new(b)]),
                matrix: op.local_factors.is_none().then(|| MatrixJson::new(&op.matrix)),
            })
            .collect();
        CertificateJson {
            generator: GENERATOR.to_string(),
            dims: [cert.dims.0, cert.dims.1],
            status: cert.status.as_str().to_string(),
            iterations: cert.iterations,
            duality_gap: cert.duality_gap.is_finite().then_some(cert.duality_gap),
            objective: cert.objective,
            bound: cert.bound,
            trace_multiplier: cert.trace_multiplier,
            nu: cert.nu.clone(),
            h: MatrixJson::new(&cert.h),
            measurements,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| parse_error("certificate JSON", e))
    }

    /// Certificate, operators and data, with shapes checked.
    pub fn decode(&self) -> CliResult<(WitnessCertificate, Vec<MeasurementOperator>, Vec<f64>)> {
        let dims = (self.dims[0], self.dims[1]);
        let status = SolverStatus::parse(&self.status)
            .ok_or_else(|| parse_error("certificate JSON", format!("unknown status {:?}", self.status)))?;
        let mut ops = Vec::with_capacity(self.measurements.len());
        let mut data = Vec::with_capacity(self.measurements.len());
        for (k, m) in self.measurements.iter().enumerate() {
            let what = format!("certificate measurement {k} ({})", m.label);
            let op = match (&m.local, &m.matrix) {
                (Some([a, b]), None) => {
                    MeasurementOperator::product(&a.to_matrix(&what)?, &b.to_matrix(&what)?, m.label.clone())
                }
                (None, Some(full)) => MeasurementOperator::new(full.to_matrix(&what)?, dims, m.label.clone()),
                _ => return Err(parse_error(&what, "needs exactly one of `local` and `matrix`")),
            }
            .map_err(|e| parse_error(&what, e))?;
            if op.dims != dims {
                return Err(parse_error(
                    &what,
                    format!("dimensions {:?} differ from {:?}", op.dims, dims),
                ));
            }
            ops.push(op);
            data.push(m.value);
        }
        let cert = WitnessCertificate {
            dims,
            h: self.h.to_matrix("certificate H")?,
            nu: self.nu.clone(),
            trace_multiplier: self.trace_multiplier,
            objective: self.objective,
            bound: self.bound,
            status,
            iterations: self.iterations,
            duality_gap: self.duality_gap.unwrap_or(f64::INFINITY),
        };
        Ok((cert, ops, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use angular_qudit_core::{pure_qudit_state, PathwayStateParams};

    fn table() -> FringeTable {
        let mut meta = Metadata::default();
        meta.push("N", 2);
        meta.push("alpha", "pi/10");
        FringeTable {
            generator: GENERATOR.to_string(),
            parameters: meta,
            samples: vec![
                Sample {
                    l_s: -1,
                    l_i: 2,
                    rate: 0.1,
                },
                Sample {
                    l_s: 0,
                    l_i: 2,
                    rate: 1.0 / 3.0,
                },
                Sample {
                    l_s: 1,
                    l_i: 2,
                    rate: 1e-300,
                },
            ],
        }
    }

    #[test]
    fn fringe_csv_round_trip_is_exact() {
        let t = table();
        let csv = t.to_csv();
        assert!(csv.contains("\nl_s,l_i,rate\n"));
        assert!(csv.starts_with("# generator=angular-qudit "));
        assert_eq!(FringeTable::from_csv(&csv).unwrap(), t);
    }

    #[test]
    fn fringe_json_round_trip_is_exact() {
        let t = table();
        assert_eq!(FringeTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn csv_without_header_is_rejected() {
        assert!(FringeTable::from_csv("# generator=x\n0,0,1\n").is_err());
        assert!(FringeTable::from_csv("# generator=x\nl_s,l_i,rate\n0,0\n").is_err());
    }

    #[test]
    fn density_round_trip() {
        let state = pure_qudit_state(&PathwayStateParams::uniform(3, 0.5, 0.7)).unwrap();
        let j = DensityJson::new(Metadata::default(), &state);
        assert_eq!(j.bipartition, None);
        assert_eq!(j.basis_labels, vec![[0, 0], [1, 1], [2, 2]]);
        let back = DensityJson::from_json(&j.to_json()).unwrap().to_state().unwrap();
        assert_eq!(back, state);
        assert_eq!(j.part_csv(false).lines().count(), 3);
    }

    #[test]
    fn metadata_keeps_order() {
        let mut m = Metadata::default();
        m.push("z", 1);
        m.push("a", 2);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"z":"1","a":"2"}"#);
        assert_eq!(serde_json::from_str::<Metadata>(&s).unwrap(), m);
    }
}
