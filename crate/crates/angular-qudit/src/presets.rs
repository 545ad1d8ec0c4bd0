//! Built-in scenarios for the published figure parameter sets and a few
//! witness runs.

use crate::angle::Angle;
use crate::scenario::{
    CheckSpec, ConventionSpec, MaskSpec, MeasurementKind, OutputSpec, ScanSpec, Scenario, SpectrumSpec,
    StateModel, StateSpec, SweepParameter, SweepSpec, WitnessSpec, SCHEMA_VERSION,
};

/// Every preset name, in listing order.
pub const PRESET_NAMES: &[&str] = &[
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6a",
    "fig6b",
    "fig6",
    "fig7a",
    "fig7b",
    "fig7",
    "fig8",
    "witness-bell",
    "witness-diagonal",
    "witness-incoherent",
    "witness-adaptive",
];

fn pi(num: i64, den: i64) -> Angle {
    Angle::pi_fraction(num, den)
}

fn base(name: &str, description: &str, slits: usize, beta: Angle, visibility: f64) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        description: Some(description.to_string()),
        mask: MaskSpec {
            slits,
            idler_slits: None,
            alpha: pi(1, 10),
            beta,
            check: CheckSpec::Budget,
        },
        state: StateSpec {
            model: StateModel::Symmetric,
            visibility,
            phase: pi(0, 1),
            weights: None,
            convention: ConventionSpec::Ladder,
        },
        spectrum: SpectrumSpec::default(),
        scan: None,
        sweep: None,
        witness: None,
        outputs: OutputSpec::default(),
    }
}

fn density_preset(name: &str, slits: usize) -> Scenario {
    let mut s = base(
        name,
        &format!("N = {slits} symmetric pathway state, V = 1, theta in {{0, pi/4}}"),
        slits,
        pi(1, 10),
        1.0,
    );
    s.sweep = Some(SweepSpec {
        parameter: SweepParameter::Phase,
        values: vec![pi(0, 1), pi(1, 4)],
    });
    s
}

fn scan(l_i: &[i64], lo: i64, hi: i64) -> Option<ScanSpec> {
    Some(ScanSpec {
        l_i: l_i.to_vec(),
        l_s: [lo, hi],
        normalization: Default::default(),
    })
}

fn fringe_preset(name: &str, description: &str, slits: usize, beta: Angle, l_i: i64, range: i64) -> Scenario {
    let mut s = base(name, description, slits, beta, 0.875);
    s.mask.check = CheckSpec::NonOverlapping;
    s.scan = scan(&[l_i], -range, range);
    s
}

fn witness_preset(name: &str, description: &str, visibility: f64, kind: MeasurementKind) -> Scenario {
    let mut s = base(name, description, 2, pi(1, 4), visibility);
    s.witness = Some(WitnessSpec {
        measurements: kind,
        ..WitnessSpec::default()
    });
    s
}

/// The preset called `name`, if any.
pub fn preset(name: &str) -> Option<Scenario> {
    let s = match name {
        "fig2" => density_preset(name, 2),
        "fig3" => density_preset(name, 4),
        "fig4" => density_preset(name, 5),
        "fig5" => density_preset(name, 10),
        "fig6a" => fringe_preset(name, "N = 2, beta = pi/4, l_i = 2", 2, pi(1, 4), 2, 12),
        "fig6b" => fringe_preset(name, "N = 2, beta = pi/4, l_i = -2", 2, pi(1, 4), -2, 12),
        "fig6" => {
            let mut s = fringe_preset(name, "N = 2, l_i = 0, slit spacing sweep", 2, pi(1, 4), 0, 12);
            s.sweep = Some(SweepSpec {
                parameter: SweepParameter::Beta,
                values: vec![pi(1, 6), pi(1, 4), pi(1, 2), pi(1, 1)],
            });
            s
        }
        "fig7a" => fringe_preset(name, "N = 6, beta = pi/4, l_i = -2", 6, pi(1, 4), -2, 30),
        "fig7b" => fringe_preset(name, "N = 6, beta = pi/4, l_i = 2", 6, pi(1, 4), 2, 30),
        "fig7" => {
            let mut s = fringe_preset(name, "N = 6, l_i = 0, slit spacing sweep", 6, pi(1, 4), 0, 30);
            s.mask.check = CheckSpec::Unchecked;
            s.sweep = Some(SweepSpec {
                parameter: SweepParameter::Beta,
                values: vec![pi(1, 4), pi(1, 7), pi(1, 11), pi(1, 14)],
            });
            s
        }
        "fig8" => {
            let mut s = fringe_preset(name, "N = 6, M = 3 mixed state, l_i = 0", 6, pi(1, 4), 0, 30);
            s.mask.idler_slits = Some(3);
            s.state.model = StateModel::Mixed;
            s.sweep = Some(SweepSpec {
                parameter: SweepParameter::Beta,
                values: vec![pi(1, 4), pi(1, 7)],
            });
            s
        }
        "witness-bell" => witness_preset(
            name,
            "N = 2, V = 1 with local tomography on both sides",
            1.0,
            MeasurementKind::Complete,
        ),
        "witness-diagonal" => witness_preset(
            name,
            "N = 2, V = 1 with joint OAM projectors only",
            1.0,
            MeasurementKind::Diagonal,
        ),
        "witness-incoherent" => witness_preset(
            name,
            "N = 2, V = 0 with local tomography on both sides",
            0.0,
            MeasurementKind::Complete,
        ),
        "witness-adaptive" => {
            let mut s = witness_preset(
                name,
                "N = 2, V = 0.875 with OAM projectors and dominant-cell superpositions",
                0.875,
                MeasurementKind::Adaptive,
            );
            if let Some(w) = &mut s.witness {
                w.tolerance = 1e-6;
            }
            s
        }
        _ => return None,
    };
    Some(s)
}
