//! The two closed-form model spaces: the punctured plane with the restricted
//! Euclidean metric, and the cylinder R x S^1 with the product of the
//! Euclidean and arc-length metrics. Both have infinite cyclic fundamental
//! group; loops are tracked by winding number.
//!
//! On the punctured plane the distance between two points is the Euclidean
//! value even when the straight segment hits the puncture: detours around it
//! approach that value without attaining it, and the infimum is what the
//! metric restriction gives. Geodesic interpolation, by contrast, does
//! require the segment to miss the puncture.

use crate::error::{Error, Result};
use serde_json::{json, Value};

pub const ANALYTIC_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticSpace {
    PuncturedPlane {
        puncture: [f64; 2],
        basepoint: [f64; 2],
    },
    /// Coordinates are (axial, arc position in [0, circumference)).
    Cylinder {
        circumference: f64,
        basepoint: [f64; 2],
    },
}

impl AnalyticSpace {
    pub fn punctured_plane(puncture: [f64; 2], basepoint: [f64; 2]) -> Result<Self> {
        if (basepoint[0] - puncture[0]).abs() < ANALYTIC_EPS
            && (basepoint[1] - puncture[1]).abs() < ANALYTIC_EPS
        {
            return Err(Error::InvalidPoint("basepoint coincides with the puncture".into()));
        }
        Ok(AnalyticSpace::PuncturedPlane { puncture, basepoint })
    }

    pub fn cylinder(circumference: f64, basepoint: [f64; 2]) -> Result<Self> {
        if !(circumference > 0.0) {
            return Err(Error::Malformed("circumference must be positive".into()));
        }
        Ok(AnalyticSpace::Cylinder {
            circumference,
            basepoint: [basepoint[0], basepoint[1].rem_euclid(circumference)],
        })
    }

    pub fn basepoint(&self) -> [f64; 2] {
        match self {
            AnalyticSpace::PuncturedPlane { basepoint, .. } => *basepoint,
            AnalyticSpace::Cylinder { basepoint, .. } => *basepoint,
        }
    }

    pub fn validate_coords(&self, p: [f64; 2]) -> Result<()> {
        match self {
            AnalyticSpace::PuncturedPlane { puncture, .. } => {
                if (p[0] - puncture[0]).abs() < ANALYTIC_EPS
                    && (p[1] - puncture[1]).abs() < ANALYTIC_EPS
                {
                    Err(Error::InvalidPoint("point coincides with the puncture".into()))
                } else {
                    Ok(())
                }
            }
            AnalyticSpace::Cylinder { .. } => {
                if p.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint("non-finite cylinder coordinates".into()))
                }
            }
        }
    }

    pub fn distance(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        match self {
            AnalyticSpace::PuncturedPlane { .. } => {
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
            }
            AnalyticSpace::Cylinder { circumference, .. } => {
                let da = p[0] - q[0];
                let darc = arc_distance(p[1], q[1], *circumference);
                (da * da + darc * darc).sqrt()
            }
        }
    }

    /// Point at fraction `t` along the geodesic from `p` to `q`.
    ///
    /// Errors: on the plane when the segment passes through the puncture; on
    /// the cylinder when `p` and `q` are arc-antipodal (two shortest arcs).
    /// The non-strict variant breaks the cylinder tie toward the positive
    /// arc direction.
    pub fn interpolate(&self, p: [f64; 2], q: [f64; 2], t: f64, strict: bool) -> Result<[f64; 2]> {
        match self {
            AnalyticSpace::PuncturedPlane { puncture, .. } => {
                if strict && segment_hits_point(p, q, *puncture) {
                    return Err(Error::AmbiguousGeodesic(
                        format!("{p:?}"),
                        format!("{q:?}"),
                    ));
                }
                Ok([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])])
            }
            AnalyticSpace::Cylinder { circumference, .. } => {
                let c = *circumference;
                let mut delta = (q[1] - p[1]).rem_euclid(c);
                if delta > c / 2.0 + ANALYTIC_EPS {
                    delta -= c;
                } else if (delta - c / 2.0).abs() <= ANALYTIC_EPS && strict {
                    return Err(Error::AmbiguousGeodesic(
                        format!("{p:?}"),
                        format!("{q:?}"),
                    ));
                }
                Ok([
                    p[0] + t * (q[0] - p[0]),
                    (p[1] + t * delta).rem_euclid(c),
                ])
            }
        }
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Malformed("analytic space must be a JSON object".into()))?;
        let model = obj
            .get("model")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Malformed("missing model".into()))?;
        let coords = |key: &str| -> Result<[f64; 2]> {
            let a = obj
                .get(key)
                .and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Malformed(format!("missing {key}")))?;
            Ok([
                a[0].as_f64().ok_or_else(|| Error::Malformed("bad coordinate".into()))?,
                a[1].as_f64().ok_or_else(|| Error::Malformed("bad coordinate".into()))?,
            ])
        };
        match model {
            "punctured_plane" => {
                let puncture = if obj.contains_key("puncture") {
                    coords("puncture")?
                } else {
                    [0.0, 0.0]
                };
                AnalyticSpace::punctured_plane(puncture, coords("basepoint")?)
            }
            "cylinder" => {
                let c = obj
                    .get("circumference")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Malformed("missing circumference".into()))?;
                let basepoint = if obj.contains_key("basepoint") {
                    coords("basepoint")?
                } else {
                    [0.0, 0.0]
                };
                AnalyticSpace::cylinder(c, basepoint)
            }
            other => Err(Error::Malformed(format!("unknown analytic model {other:?}"))),
        }
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            AnalyticSpace::PuncturedPlane { puncture, basepoint } => json!({
                "model": "punctured_plane",
                "puncture": puncture,
                "basepoint": basepoint,
            }),
            AnalyticSpace::Cylinder { circumference, basepoint } => json!({
                "model": "cylinder",
                "circumference": circumference,
                "basepoint": basepoint,
            }),
        }
    }
}

pub fn arc_distance(a: f64, b: f64, circumference: f64) -> f64 {
    let d = (a - b).rem_euclid(circumference);
    d.min(circumference - d)
}

fn segment_hits_point(p: [f64; 2], q: [f64; 2], x: [f64; 2]) -> bool {
    let dx = q[0] - p[0];
    let dy = q[1] - p[1];
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return (p[0] - x[0]).abs() < ANALYTIC_EPS && (p[1] - x[1]).abs() < ANALYTIC_EPS;
    }
    let t = ((x[0] - p[0]) * dx + (x[1] - p[1]) * dy) / len2;
    if !(0.0..=1.0).contains(&t) {
        return false;
    }
    let cx = p[0] + t * dx - x[0];
    let cy = p[1] + t * dy - x[1];
    (cx * cx + cy * cy).sqrt() < ANALYTIC_EPS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_distance_is_euclidean() {
        let y = AnalyticSpace::punctured_plane([0.0, 0.0], [1.0, 0.0]).unwrap();
        // The segment passes through the puncture; the restricted metric
        // still reports the Euclidean value (infimum of detours).
        assert_eq!(y.distance([1.0, 0.0], [-1.0, 0.0]), 2.0);
        assert!(y.interpolate([1.0, 0.0], [-1.0, 0.0], 0.5, true).is_err());
        assert!(y.interpolate([1.0, 0.0], [0.0, 1.0], 0.5, true).is_ok());
    }

    #[test]
    fn cylinder_distance_is_product_metric() {
        let c = AnalyticSpace::cylinder(4.0, [0.0, 0.0]).unwrap();
        assert!((c.distance([0.0, 0.5], [0.0, 3.5]) - 1.0).abs() < 1e-12);
        assert!((c.distance([3.0, 0.0], [0.0, 0.0]) - 3.0).abs() < 1e-12);
        let d = c.distance([1.0, 0.0], [0.0, 1.0]);
        assert!((d - (2.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cylinder_interpolation_takes_short_arc() {
        let c = AnalyticSpace::cylinder(4.0, [0.0, 0.0]).unwrap();
        let m = c.interpolate([0.0, 3.5], [0.0, 0.5], 0.5, true).unwrap();
        assert!((m[1] - 0.0).abs() < 1e-12 || (m[1] - 4.0).abs() < 1e-12);
        // Antipodal arcs are ambiguous in strict mode.
        assert!(c.interpolate([0.0, 0.0], [0.0, 2.0], 0.5, true).is_err());
        assert!(c.interpolate([0.0, 0.0], [0.0, 2.0], 0.5, false).is_ok());
    }
}
