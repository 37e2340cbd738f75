mod common;

use logwave_core::fem1d::{assemble, assemble_penalty, build_mesh};
use logwave_core::geometry::{BoundaryMotion, Interval, MovingDomainFamily};
use proptest::prelude::*;

use common::{riemann, riemann_entries};

const HORIZON: f64 = 10.0;

fn family_strategy() -> impl Strategy<Value = MovingDomainFamily> {
    (
        0.0..0.4f64,
        0.6..1.0f64,
        0.0..0.05f64,
        0.0..0.05f64,
        any::<bool>(),
        0.1..2.0f64,
    )
        .prop_map(|(l0, r0, sl, sr, saturating, rate)| {
            let ambient = Interval::new(0.0, 1.0).unwrap();
            let initial = Interval::new(l0, r0).unwrap();
            let motion = if saturating {
                BoundaryMotion::Saturating {
                    left_inf: (l0 - 10.0 * sl).max(0.0),
                    right_inf: (r0 + 10.0 * sr).min(1.0),
                    rate,
                }
            } else {
                BoundaryMotion::Linear {
                    left_speed: sl,
                    right_speed: sr,
                }
            };
            MovingDomainFamily::new(ambient, initial, motion, HORIZON).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn penalty_is_between_zero_and_mass(
        fam in family_strategy(),
        m in 3usize..40,
        t in 0.0..HORIZON,
        x in prop::collection::vec(-5.0..5.0f64, 40),
    ) {
        let sys = assemble(&build_mesh(fam.ambient(), m).unwrap());
        let pen = assemble_penalty(&sys.mesh, &fam, t).unwrap();
        let x = &x[..m];
        let q = pen.quad_form(x);
        let full = sys.mass.quad_form(x);
        prop_assert!(q >= -1e-14 * full);
        prop_assert!(q <= full * (1.0 + 1e-12));
    }

    #[test]
    fn penalty_form_is_non_increasing_in_time(
        fam in family_strategy(),
        m in 3usize..40,
        t1 in 0.0..HORIZON,
        t2 in 0.0..HORIZON,
        x in prop::collection::vec(-5.0..5.0f64, 40),
    ) {
        let (t1, t2) = (t1.min(t2), t1.max(t2));
        let sys = assemble(&build_mesh(fam.ambient(), m).unwrap());
        let x = &x[..m];
        let q1 = assemble_penalty(&sys.mesh, &fam, t1).unwrap().quad_form(x);
        let q2 = assemble_penalty(&sys.mesh, &fam, t2).unwrap().quad_form(x);
        prop_assert!(q2 <= q1 + 1e-13 * (1.0 + q1.abs()));
    }

    #[test]
    fn indicator_is_non_increasing_in_time(
        fam in family_strategy(),
        x in 0.0..1.0f64,
        t1 in 0.0..HORIZON,
        t2 in 0.0..HORIZON,
    ) {
        let (t1, t2) = (t1.min(t2), t1.max(t2));
        prop_assert!(fam.indicator(x, t2).unwrap() <= fam.indicator(x, t1).unwrap());
    }

    #[test]
    fn overlap_length_matches_riemann_count(
        fam in family_strategy(),
        lo in 0.0..0.9f64,
        len in 0.01..0.1f64,
        t in 0.0..HORIZON,
    ) {
        let cell = Interval::new(lo, (lo + len).min(1.0)).unwrap();
        let pieces = fam.overlap(t, cell).unwrap();
        let total: f64 = pieces.iter().map(Interval::len).sum();
        let n = 200_000;
        let outside = riemann(cell.lo, cell.hi, n, |x| f64::from(fam.indicator(x, t).unwrap()));
        prop_assert!((total - outside).abs() <= 2.0 * cell.len() / n as f64);
        for p in &pieces {
            prop_assert!(cell.contains_interval(p));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn assembled_entries_match_riemann_oracle(
        fam in family_strategy(),
        m in 3usize..30,
        t in 0.0..HORIZON,
    ) {
        let sys = assemble(&build_mesh(fam.ambient(), m).unwrap());
        let pen = assemble_penalty(&sys.mesh, &fam, t).unwrap();
        // midpoint error on w_i² is h/(6n²)
        let cells = ((sys.mesh.h() * 2e6) as usize).max(20_000);
        for i in 0..m {
            for j in i..(i + 2).min(m) {
                let r = riemann_entries(&sys.mesh, &fam, t, i, j, cells);
                prop_assert!((sys.mass.get(i, j) - r.mass).abs() < 1e-10);
                prop_assert!((sys.stiffness.get(i, j) - r.stiffness).abs() < 1e-10 * (1.0 + r.stiffness.abs()));
                prop_assert!((pen.get(i, j) - r.penalty).abs() < 1e-10, "({i},{j}) {} vs {}", pen.get(i, j), r.penalty);
            }
        }
    }
}

#[test]
fn boundary_inside_an_element_matches_riemann_oracle() {
    // Ω_t = (0, 0.5) with nodes at k/101: the boundary splits an element.
    let fam = MovingDomainFamily::new(
        Interval::new(0.0, 1.0).unwrap(),
        Interval::new(0.0, 0.5).unwrap(),
        BoundaryMotion::Constant,
        1.0,
    )
    .unwrap();
    let sys = assemble(&build_mesh(fam.ambient(), 100).unwrap());
    let pen = assemble_penalty(&sys.mesh, &fam, 0.0).unwrap();
    for i in 45..55 {
        for j in i..i + 2 {
            let r = riemann_entries(&sys.mesh, &fam, 0.0, i, j, 20_000);
            assert!((pen.get(i, j) - r.penalty).abs() < 1e-10);
        }
    }
    // the split element carries a strictly partial entry
    let full = sys.mass.get(49, 49);
    let split = pen.get(49, 49);
    assert!(split > 0.0 && split < full);
}
