// diagnostic: per-nu mean expected sum of rates
use testprio::sim::generator::{generate_synthetic_suite, GeneratorSpec};
use testprio::sim::execute;

fn main() {
    let mut spec = GeneratorSpec::new(300, 20, 24, 8);
    spec.linkage = 0.0;
    let (suite, profile) = generate_synthetic_suite(&spec, 11).unwrap();
    let mut by_nu: std::collections::BTreeMap<usize, (f64, f64, usize)> = Default::default();
    for t in &suite.tests {
        let esum: f64 = t.us.iter().map(|u| profile.rates[u]).sum();
        let nou = execute(t, &profile, 0).unwrap().nou as f64;
        let e = by_nu.entry(t.nu()).or_insert((0.0, 0.0, 0));
        e.0 += esum; e.1 += nou; e.2 += 1;
    }
    for (nu, (esum, nou, c)) in by_nu {
        println!("nu={nu:2} count={c:3} mean_expected={:.3} mean_nou={:.3}", esum / c as f64, nou / c as f64);
    }
}
