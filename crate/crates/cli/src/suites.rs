//! Bundled reference values and the checks that recompute them.

use std::fmt;

use anyhow::{bail, Result};
use zptower::analysis::{constants, Q};
use zptower::tower::TowerSpec;

use crate::compute::compute_levels;

/// Kernel dimensions `a^(1..)` per level, starting at level 1.
struct TowerFixture {
    spec: fn() -> TowerSpec,
    genus: &'static [u64],
    kernels: &'static [&'static [usize]],
}

fn p3d7() -> TowerSpec {
    TowerSpec::basic(3, 7).expect("valid")
}
fn p3d7_b() -> TowerSpec {
    TowerSpec::from_int_terms(3, &[(0, 1, 7), (0, -1, 5), (0, -1, 2)], "p3d7-b").expect("valid")
}
fn p3d7_c() -> TowerSpec {
    TowerSpec::from_int_terms(3, &[(0, 1, 7), (0, -1, 5)], "p3d7-c").expect("valid")
}
fn p3d5() -> TowerSpec {
    TowerSpec::from_int_terms(3, &[(0, 1, 5), (0, -1, 2)], "p3d5").expect("valid")
}
fn p3d5_b() -> TowerSpec {
    TowerSpec::from_int_terms(3, &[(0, 1, 5), (0, -1, 4), (0, -1, 1)], "p3d5-b").expect("valid")
}
fn p2d7() -> TowerSpec {
    TowerSpec::basic(2, 7).expect("valid")
}
fn p2d21() -> TowerSpec {
    TowerSpec::from_int_terms(2, &[(0, 1, 21), (0, 1, 19), (0, 1, 15), (0, 1, 13), (0, 1, 9)], "p2d21").expect("valid")
}
fn p2d21_b() -> TowerSpec {
    TowerSpec::from_int_terms(2, &[(0, 1, 21), (0, 1, 13), (0, 1, 9), (0, 1, 5), (0, 1, 3)], "p2d21-b").expect("valid")
}

const P3D7: &[TowerFixture] = &[
    TowerFixture { spec: p3d7, genus: &[6, 66, 624], kernels: &[&[4], &[25], &[214]] },
    TowerFixture { spec: p3d7_b, genus: &[6, 66, 624], kernels: &[&[3], &[24], &[213]] },
    TowerFixture { spec: p3d7_c, genus: &[6, 66, 624], kernels: &[&[3], &[24], &[213]] },
];

const P3D5: &[TowerFixture] = &[
    TowerFixture {
        spec: p3d5,
        genus: &[4, 46, 442],
        kernels: &[
            &[2, 4, 4, 4, 4, 4, 4, 4, 4, 4],
            &[19, 26, 31, 35, 39, 42, 45, 46, 46, 46],
            &[154, 230, 275, 305, 326, 344, 362, 368, 374, 380],
        ],
    },
    TowerFixture {
        spec: p3d5_b,
        genus: &[4, 46, 442],
        kernels: &[
            &[2, 4, 4, 4, 4, 4, 4, 4, 4, 4],
            &[18, 26, 31, 35, 39, 42, 45, 46, 46, 46],
            &[153, 230, 275, 305, 326, 344, 360, 368, 374, 380],
        ],
    },
];

const P2D7: &[TowerFixture] = &[TowerFixture {
    spec: p2d7,
    genus: &[3, 16, 70, 290, 1178, 4746],
    kernels: &[&[2], &[5], &[19], &[75], &[299], &[1195]],
}];

pub const P2D21_KERNELS: &[&[usize]] = &[
    &[5, 8, 9, 10, 10, 10, 10, 10, 10, 10],
    &[16, 25, 31, 36, 40, 43, 45, 47, 48, 49],
    &[58, 94, 116, 131, 142, 152, 162, 169, 175, 180],
    &[226, 363, 452, 517, 562, 603, 635, 660, 680, 696],
];

pub const P2D21_B_KERNELS: &[&[usize]] = &[
    &[5, 8, 9, 10, 10, 10, 10, 10, 10, 10],
    &[16, 25, 33, 39, 42, 45, 47, 49, 50, 51],
    &[58, 95, 117, 131, 142, 152, 162, 171, 179, 185],
    &[226, 363, 453, 519, 562, 603, 637, 662, 683, 697],
];

const P2D21: &[TowerFixture] = &[
    TowerFixture { spec: p2d21, genus: &[10, 51, 217, 885], kernels: P2D21_KERNELS },
    TowerFixture { spec: p2d21_b, genus: &[10, 51, 217, 885], kernels: P2D21_B_KERNELS },
];

/// `(r, d * alpha(r, p), m(r, p))`.
pub const CONSTANTS_P2_D21: &[(u32, (i128, i128), u32)] = &[
    (1, (7, 8), 1),
    (2, (7, 5), 2),
    (3, (7, 4), 1),
    (4, (2, 1), 3),
    (5, (35, 16), 1),
    (6, (7, 3), 3),
    (7, (49, 20), 2),
    (8, (28, 11), 5),
    (9, (21, 8), 0),
    (10, (35, 13), 6),
];

pub const CONSTANTS_P3_D5: &[(u32, (i128, i128), u32)] = &[
    (1, (5, 24), 1),
    (2, (5, 16), 2),
    (3, (3, 8), 2),
    (4, (5, 12), 1),
    (5, (25, 56), 3),
    (6, (15, 32), 4),
    (7, (35, 72), 1),
    (8, (1, 2), 2),
    (9, (45, 88), 5),
    (10, (25, 48), 2),
];

pub const SUITES: &[&str] =
    &["p3d7-levels1-3", "p3d5-levels1-3", "p2d7-levels1-6", "p2d21-levels1-4", "constants"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub expected: String,
    pub actual: String,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok())
    }

    fn push(&mut self, label: String, expected: impl fmt::Debug, actual: impl fmt::Debug) {
        self.checks.push(Check { label, expected: format!("{expected:?}"), actual: format!("{actual:?}") });
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad = self.mismatches().count();
        writeln!(f, "suite {}: {} checks, {} mismatches", self.name, self.checks.len(), bad)?;
        for c in &self.checks {
            let tag = if c.ok() { "ok  " } else { "FAIL" };
            writeln!(f, "  {tag} {}: expected {} got {}", c.label, c.expected, c.actual)?;
        }
        Ok(())
    }
}

fn run_towers(report: &mut SuiteReport, fixtures: &[TowerFixture]) -> Result<()> {
    for fx in fixtures {
        let spec = (fx.spec)();
        let powers = fx.kernels[0].len();
        let recs = compute_levels(&spec, fx.genus.len(), powers)?;
        for (i, rec) in recs.iter().enumerate() {
            report.push(format!("{} level {} genus", spec.name, rec.level), fx.genus[i], rec.genus);
            report.push(format!("{} level {} kernels", spec.name, rec.level), fx.kernels[i], &rec.kernels);
        }
    }
    Ok(())
}

fn run_constants(report: &mut SuiteReport) -> Result<()> {
    for (p, d, rows) in [(2u32, 21i128, CONSTANTS_P2_D21), (3, 5, CONSTANTS_P3_D5)] {
        for &(r, (num, den), m) in rows {
            let c = constants(r, p)?;
            report.push(format!("p={p} d={d} r={r} d*alpha"), Q::new(num, den), c.alpha * Q::from_integer(d));
            report.push(format!("p={p} r={r} period"), m, c.period);
        }
    }
    for p in [2u32, 3, 5, 7, 11, 13] {
        let pi = p as i128;
        report.push(format!("alpha(1,{p})"), Q::new(pi - 1, 4 * pi * (pi + 1)), constants(1, p)?.alpha);
    }
    Ok(())
}

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let mut report = SuiteReport { name: name.to_string(), checks: Vec::new() };
    match name {
        "p3d7-levels1-3" => run_towers(&mut report, P3D7)?,
        "p3d5-levels1-3" => run_towers(&mut report, P3D5)?,
        "p2d7-levels1-6" => run_towers(&mut report, P2D7)?,
        "p2d21-levels1-4" => run_towers(&mut report, P2D21)?,
        "constants" => run_constants(&mut report)?,
        _ => bail!("unknown suite {name:?}; known suites: {}", SUITES.join(", ")),
    }
    Ok(report)
}
