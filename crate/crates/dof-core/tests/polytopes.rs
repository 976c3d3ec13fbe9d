use dof_core::geometry::{canonicalize, convex_hull, eliminate_redundant, maximize, set_equal, subset, unit_simplex, Halfspace, Region};
use dof_core::math::{dot, int, rat, RatVector, Rational};
use proptest::prelude::*;

fn positive_rows() -> impl Strategy<Value = Vec<Vec<(i64, i64)>>> {
    proptest::collection::vec(proptest::collection::vec((1i64..=6, 1i64..=6), 3), 1..5)
}

fn region(rows: &[Vec<(i64, i64)>]) -> Region {
    let hs = rows.iter().map(|r| Halfspace::unit(r.iter().map(|&(p, q)| rat(p, q)).collect())).collect();
    Region::from_halfspaces(3, hs).unwrap()
}

proptest! {
    #[test]
    fn vertices_are_feasible_and_tight_on_three_rows(rows in positive_rows()) {
        let r = region(&rows);
        for v in r.vertices() {
            prop_assert!(r.contains(v).unwrap());
            prop_assert!(r.tight_halfspaces(v).len() >= 3);
        }
    }

    #[test]
    fn redundancy_elimination_keeps_the_set(rows in positive_rows()) {
        let r = region(&rows);
        let e = eliminate_redundant(&r);
        let rebuilt = Region::from_halfspaces(3, e.halfspaces.clone()).unwrap();
        prop_assert!(set_equal(&r, &rebuilt).unwrap());
        prop_assert!(e.halfspaces.len() <= canonicalize(&r).halfspaces.len());
    }

    #[test]
    fn adding_a_row_shrinks(rows in positive_rows(), extra in proptest::collection::vec((1i64..=6, 1i64..=6), 3)) {
        let r = region(&rows);
        let mut more = rows.clone();
        more.push(extra);
        let s = region(&more);
        prop_assert!(subset(&s, &r).unwrap());
    }

    #[test]
    fn maximum_dominates_every_vertex(rows in positive_rows(), c in proptest::collection::vec(0i64..=5, 3)) {
        let r = region(&rows);
        let c: RatVector = c.into_iter().map(int).collect();
        let (best, at) = maximize(&r, &c).unwrap();
        prop_assert_eq!(dot(&c, &at), best.clone());
        prop_assert!(r.vertices().iter().all(|v| dot(&c, v) <= best));
    }

    #[test]
    fn hull_of_simplex_points_contains_them(a in 1i64..5, b in 1i64..5, c in 1i64..5) {
        let pts = vec![vec![int(0); 3], vec![int(a), int(0), int(0)], vec![int(0), int(b), int(0)], vec![int(0), int(0), int(c)]];
        let h = convex_hull(&pts, &[]).unwrap();
        prop_assert!(!h.degenerate);
        let tri = convex_hull(&pts[1..], &[]).unwrap();
        prop_assert!(tri.degenerate);
        for p in &pts {
            prop_assert!(h.region.contains(p).unwrap());
        }
        // x/a + y/b + z/c ≤ 1 is the hull
        let want = Region::from_halfspaces(3, vec![Halfspace::unit(vec![rat(1, a), rat(1, b), rat(1, c)])]).unwrap();
        prop_assert!(set_equal(&h.region, &want).unwrap());
    }
}

#[test]
fn unit_simplex_in_three_dimensions() {
    let s = unit_simplex(3);
    assert_eq!(s.vertices().len(), 4);
    let ones: Vec<Rational> = vec![int(1); 3];
    assert_eq!(maximize(&s, &ones).unwrap().0, int(1));
}
