use invplan_core::canonical;
use invplan_core::inference::property_likelihoods;
use invplan_core::predicate::PropertyPredicate;
use std::time::Instant;

#[test]
fn peek_properties() {
    for (scen, ty) in [
        (canonical::explain_naive(), "naive"),
        (canonical::explain_sophisticated(), "sophisticated"),
    ] {
        let names = scen.hypothesis_grid.name_table(&scen.grid);
        let props = vec![
            PropertyPredicate::parse("unaware-d1-open", "p_open(D1) < 0.15", &names).unwrap(),
            PropertyPredicate::parse("believes-noodle-open", "p_open(Noodle) > 0.85", &names).unwrap(),
            PropertyPredicate::parse("prefers-d2-branch", "u(D2) > u(D1)", &names).unwrap(),
            PropertyPredicate::parse("discounting-type", &format!("type = {ty}"), &names).unwrap(),
        ];
        let t0 = Instant::now();
        let scores = property_likelihoods(&scen.hypothesis_grid, &scen.grid, &scen.episodes, &props).unwrap();
        println!("{} ({} hyps, {:?}):", scen.name, scen.hypothesis_grid.hypothesis_count(), t0.elapsed());
        for (name, score) in &scores {
            println!("   {name}: {score:.4}");
        }
    }
}
