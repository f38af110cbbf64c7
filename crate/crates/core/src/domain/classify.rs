//! Topology of the vortex domain from the centre-speed criterion.

use serde::{Deserialize, Serialize};

use crate::field::steiner::SteinerReport;
use crate::solver::FieldSolver;

/// Relative half-width of the lemniscate band around `v^z(0,0) = W`.
pub const LEMNISCATE_BAND: f64 = 1e-3;

/// Steadiness residual above which the pair is not trusted as a traveling
/// solution.
pub const STEADINESS_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    #[serde(rename = "oval2d")]
    Oval2D,
    #[serde(rename = "spheroid")]
    Spheroid,
    #[serde(rename = "lemniscate")]
    Lemniscate,
    #[serde(rename = "toroid")]
    Toroid,
}

/// Case I: centre speed at least `W`, level `γ = 0`. Case II: centre speed
/// below `W`, level `γ < 0` and a hole of radius `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub topology: Topology,
    pub case: Case,
    pub center_speed: f64,
    pub speed: f64,
    pub band: f64,
    pub assumptions_verified: bool,
    pub notes: Vec<String>,
}

impl Classification {
    pub fn speed_ratio(&self) -> f64 {
        self.center_speed / self.speed
    }
}

/// Compares the centre speed with `W`. Preconditions that could not be
/// confirmed are recorded in `notes` and clear `assumptions_verified`, but
/// the classification is still produced.
pub fn classify(
    solver: &FieldSolver,
    steiner: Option<&SteinerReport>,
    residual: Option<f64>,
) -> Classification {
    let w = solver.speed();
    let c = solver.center_speed();
    let band = LEMNISCATE_BAND * w;
    let mut notes = Vec::new();
    match steiner {
        Some(r) if !r.is_symmetric => notes.push(format!(
            "profile not Steiner-symmetric (max violation {:e})",
            r.max_violation
        )),
        None => notes.push("Steiner symmetry not checked".into()),
        _ => {}
    }
    match residual {
        Some(r) if r > STEADINESS_THRESHOLD => notes.push(format!(
            "steadiness residual {r:.3e} above {STEADINESS_THRESHOLD}"
        )),
        None => notes.push("steadiness not checked".into()),
        _ => {}
    }
    let case = if c >= w { Case::I } else { Case::II };
    let topology = if !solver.is_ring() {
        Topology::Oval2D
    } else if (c - w).abs() <= band {
        Topology::Lemniscate
    } else if c > w {
        Topology::Spheroid
    } else {
        Topology::Toroid
    };
    Classification {
        topology,
        case: if solver.is_ring() { case } else { Case::I },
        center_speed: c,
        speed: w,
        band,
        assumptions_verified: notes.is_empty(),
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::steiner::check_steiner;
    use crate::field::vorticity::{TravelingVortex, VorticitySpec};

    #[test]
    fn hill_is_spheroid() {
        let tv = TravelingVortex::hill(1.0, 1.0).unwrap();
        let rep = check_steiner(&tv.vorticity, 40);
        let s = FieldSolver::new(tv);
        let c = classify(&s, Some(&rep), Some(0.0));
        assert_eq!(c.topology, Topology::Spheroid);
        assert_eq!(c.case, Case::I);
        assert!(c.assumptions_verified);
        assert!((c.speed_ratio() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn dipoles_are_ovals_and_flags_propagate() {
        let tv = TravelingVortex::new(VorticitySpec::gaussian_pair(1.0, 1.0, 0.2).unwrap(), 10.0).unwrap();
        let c = classify(&FieldSolver::new(tv), None, Some(0.5));
        assert_eq!(c.topology, Topology::Oval2D);
        assert!(!c.assumptions_verified);
        assert_eq!(c.notes.len(), 2);
    }

    #[test]
    fn slow_ring_is_spheroid_fast_ring_is_toroid() {
        let spec = VorticitySpec::gaussian_ring(1.0, 1.0, 0.05).unwrap();
        let s = FieldSolver::new(TravelingVortex::new(spec.clone(), 0.3).unwrap());
        assert_eq!(classify(&s, None, None).topology, Topology::Spheroid);
        let s = FieldSolver::new(TravelingVortex::new(spec, 0.7).unwrap());
        let c = classify(&s, None, None);
        assert_eq!(c.topology, Topology::Toroid);
        assert_eq!(c.case, Case::II);
    }
}
