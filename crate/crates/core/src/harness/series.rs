//! Grouping of persisted rows into the inputs of the scaling analyses.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::ensemble::{Observable, Row, Stat};
use super::fss::ScalingPoint;
use crate::error::{Error, Result};

/// The probability a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    Pz,
    Pu,
    Pxx,
}

impl Parameter {
    pub fn of(self, row: &Row) -> f64 {
        match self {
            Parameter::Pz => row.p_z,
            Parameter::Pu => row.p_u,
            Parameter::Pxx => row.p_xx,
        }
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pz" | "p_z" => Ok(Parameter::Pz),
            "pu" | "p_u" => Ok(Parameter::Pu),
            "pxx" | "p_xx" => Ok(Parameter::Pxx),
            _ => Err(Error::Config(format!("unknown parameter '{s}'"))),
        }
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<u64> = values.map(f64::to_bits).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// First of `p_z`, `p_u`, `p_xx` that takes more than one value.
pub fn infer_parameter(rows: &[Row]) -> Result<Parameter> {
    [Parameter::Pz, Parameter::Pu, Parameter::Pxx]
        .into_iter()
        .find(|p| distinct(rows.iter().map(|r| p.of(r))) > 1)
        .ok_or_else(|| Error::Analysis("rows do not vary any probability".into()))
}

type PointKey = (usize, u64);

/// Mean and standard error of `observable` per `(L, p)`. Rows that differ
/// in anything but `p` and the trajectory must not share a point.
pub fn scaling_points(rows: &[Row], observable: Observable, parameter: Option<Parameter>) -> Result<Vec<ScalingPoint>> {
    let parameter = match parameter {
        Some(p) => p,
        None => infer_parameter(rows)?,
    };
    let mut groups: BTreeMap<PointKey, Vec<&Row>> = BTreeMap::new();
    for row in rows {
        groups.entry((row.num_qubits, parameter.of(row).to_bits())).or_default().push(row);
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((size, p_bits), members) in groups {
        let first = members[0];
        let mixed = members.iter().any(|r| {
            r.model != first.model
                || r.p_z != first.p_z
                || r.p_u != first.p_u
                || r.p_xx != first.p_xx
                || r.depth != first.depth
                || r.boundary != first.boundary
        });
        if mixed {
            return Err(Error::Analysis(format!(
                "rows at L = {size}, p = {} mix different circuits",
                f64::from_bits(p_bits)
            )));
        }
        let values: Vec<f64> = members.iter().filter_map(|r| r.value(observable)).collect();
        let stat = Stat::from_values(&values).ok_or_else(|| {
            Error::Analysis(format!("no {observable} values at L = {size}, p = {}", f64::from_bits(p_bits)))
        })?;
        out.push(ScalingPoint { p: f64::from_bits(p_bits), size, mean: stat.mean, stderr: stat.stderr });
    }
    Ok(out)
}

/// `(L, mean)` pairs of a single-parameter-point data set.
pub fn size_series(rows: &[Row], observable: Observable) -> Result<Vec<(f64, f64)>> {
    for p in [Parameter::Pz, Parameter::Pu, Parameter::Pxx] {
        if distinct(rows.iter().map(|r| p.of(r))) > 1 {
            return Err(Error::Analysis("size series needs rows at one probability point".into()));
        }
    }
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for row in rows {
        if let Some(v) = row.value(observable) {
            groups.entry(row.num_qubits).or_default().push(v);
        }
    }
    Ok(groups
        .into_iter()
        .filter_map(|(l, v)| Stat::from_values(&v).map(|s| (l as f64, s.mean)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Boundary, Model};
    use crate::harness::SCHEMA_VERSION;

    fn row(l: usize, p_z: f64, index: u64, i3: f64) -> Row {
        Row {
            schema_version: SCHEMA_VERSION,
            model: Model::ProjectiveIsing,
            num_qubits: l,
            p_z,
            p_xx: 1.0 - p_z,
            p_u: 0.0,
            depth: 4 * l,
            boundary: Boundary::Open,
            master_seed: 0,
            trajectory_index: index,
            f_q: Some(i3 * 2.0),
            i3: Some(i3),
            s_half: None,
            wall_ms: 0.0,
        }
    }

    #[test]
    fn groups_by_size_and_probability() {
        let rows = vec![row(8, 0.1, 0, 1.0), row(8, 0.1, 1, 0.0), row(8, 0.2, 0, 0.5), row(16, 0.1, 0, 1.0)];
        let pts = scaling_points(&rows, Observable::Tmi, None).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!((pts[0].size, pts[0].p, pts[0].mean), (8, 0.1, 0.5));
        assert!((pts[0].stderr - 0.5).abs() < 1e-12);
        assert!(matches!(size_series(&rows, Observable::Qfi), Err(Error::Analysis(_))));
    }

    #[test]
    fn mixed_circuits_are_rejected() {
        let mut other = row(8, 0.1, 1, 0.0);
        other.boundary = Boundary::Periodic;
        let rows = vec![row(8, 0.1, 0, 1.0), other];
        assert!(scaling_points(&rows, Observable::Tmi, Some(Parameter::Pz)).is_err());
    }

    #[test]
    fn size_series_means() {
        let rows = vec![row(8, 0.5, 0, 1.0), row(8, 0.5, 1, 3.0), row(16, 0.5, 0, 2.0)];
        assert_eq!(size_series(&rows, Observable::Tmi).unwrap(), vec![(8.0, 2.0), (16.0, 2.0)]);
    }
}
