//! The (kappa, mu, nu) identity suite over every catalog default.

use std::collections::BTreeMap;

use acm_core::catalog;
use acm_core::kmn::{identity_suite, SuiteOptions, ID_MU_EIGEN, ID_NABLA_XI_PHI_H, ID_XI_KAPPA};
use acm_core::structure::ClassifyOptions;

#[test]
fn every_catalog_default_satisfies_the_suite() {
    for entry in catalog::list() {
        let m = catalog::build(entry.name, &BTreeMap::new()).unwrap();
        let pts = m.sample_points(3, 42);
        let class = m.structure.classify(&pts, &ClassifyOptions::default()).unwrap();
        assert_eq!(class.tag, entry.expected_class, "{}", entry.name);
        let report =
            identity_suite(&m.structure, class.effective_alpha(), &pts, &SuiteOptions::default())
                .unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {} = {:e}", entry.name, c.name, c.residual);
        }
        let cosym = class.effective_alpha() == 0.0;
        assert_eq!(report.get(ID_NABLA_XI_PHI_H).is_some(), cosym, "{}", entry.name);
        assert_eq!(report.get(ID_MU_EIGEN).is_some(), cosym, "{}", entry.name);
        assert!(report.get(ID_XI_KAPPA).is_some());
    }
}

#[test]
fn suite_detects_a_wrong_alpha() {
    // running the Kenmotsu model as if it were cosymplectic breaks h^2 and nabla xi
    let m = catalog::build("kenmotsu5", &BTreeMap::new()).unwrap();
    let r = identity_suite(&m.structure, 0.0, &m.sample_points(1, 1), &SuiteOptions::default());
    match r {
        Ok(report) => assert!(!report.passed()),
        Err(e) => assert!(e.to_string().contains("nabla xi"), "{e}"),
    }
}
