use hybrid_bell::cpt::enumerate_facets;
use hybrid_bell::{CardinalityTuple, Scenario, SymmetryGroup};

#[test]
fn four_party_counts() {
    let s = Scenario::new(4, 2).unwrap();
    for (h, want) in [("1,1,1,1", 5), ("2,1,1", 9), ("2,2", 7), ("3,1", 6)] {
        let h: CardinalityTuple = h.parse().unwrap();
        let c = enumerate_facets(s, &h, &SymmetryGroup::default()).unwrap();
        for e in &c.entries {
            println!("{h} {} lift {}/{} prank {}", e.text, e.lift.rank, e.lift.target, e.projected_rank);
        }
        assert_eq!(c.entries.len(), want, "{h}");
    }
}

#[test]
fn five_party_counts() {
    let s = Scenario::new(5, 2).unwrap();
    for (h, want) in [("1,1,1,1,1", 9), ("2,1,1,1", 27), ("2,2,1", 38), ("3,1,1", 45), ("3,2", 59), ("4,1", 21)] {
        let t = std::time::Instant::now();
        let h: CardinalityTuple = h.parse().unwrap();
        let c = enumerate_facets(s, &h, &SymmetryGroup::default()).unwrap();
        let lifts = c.entries.iter().filter(|e| e.lift.is_facet()).count();
        println!("{h} {} entries, {} lift, vertices {}, points {}, {:?}", c.entries.len(), lifts, c.vertices, c.projected_points, t.elapsed());
        assert_eq!(c.entries.len(), want, "{h}");
    }
}
