use coexist::engine::Scene;
use coexist::geometry::project_to_plane;
use coexist::scenario::{parse_scenario, Scenario, DEFAULT_SCENARIO};

#[test]
fn loads_without_warnings() {
    let loaded = parse_scenario(DEFAULT_SCENARIO).unwrap();
    assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
    assert_eq!(loaded.scenario.bs_sites.len(), 5);
    assert_eq!(loaded.scenario.satellites.len(), 3);
    assert_eq!(loaded.scenario.num_sectors(), 15);
}

#[test]
fn neighbouring_sites_are_a_few_km_apart() {
    let s = Scenario::bundled_default();
    let pts: Vec<_> = s
        .bs_sites
        .iter()
        .map(|b| project_to_plane(b.position, s.origin).unwrap())
        .collect();
    for (i, p) in pts.iter().enumerate() {
        let nearest = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| p.distance(*q))
            .fold(f64::INFINITY, f64::min);
        assert!((3_900.0..=5_210.0).contains(&nearest), "site {i}: {nearest}");
    }
}

/// Passes take turns: at most one satellite overlaps the cluster per slot.
#[test]
fn passes_do_not_overlap_in_time() {
    let scene = Scene::new(Scenario::bundled_default()).unwrap();
    let mut seen = [false; 3];
    for t in 0..scene.num_slots() {
        let views = scene.satellite_views(t).unwrap();
        let over: Vec<usize> = (0..3).filter(|&v| views[v].overlap.iter().any(|&o| o)).collect();
        assert!(over.len() <= 1, "slot {t}: {over:?}");
        for v in over {
            seen[v] = true;
        }
    }
    assert_eq!(seen, [true; 3]);
}
